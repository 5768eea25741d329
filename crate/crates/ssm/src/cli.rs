//! Model parsing, the end-to-end analysis driver, builtin example models,
//! and report emission. The `ssm` binary is a thin wrapper over this
//! module.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::config::Tolerances;
use crate::error::{Result, SsmError};
use crate::model::{self, ChannelBody, ChannelSpec, DensityMatrix, KrausSample};
use crate::num::{identity, kron, CMatrix, ONE, ZERO};
use crate::structure::{self, SteadyStateAnalysis};
use crate::verify::{self, CheckEntry};

/// Everything the analysis pipeline needs for one run.
#[derive(Debug, Clone)]
pub struct AnalysisRequest {
    pub channel: ChannelSpec,
    /// A known steady state. When absent, one is computed from the fixed
    /// space of the channel.
    pub steady_state: Option<DensityMatrix>,
    pub tolerances: Tolerances,
    pub seed: u64,
    /// Include the manifold operator basis in the report.
    pub emit_basis: bool,
}

impl AnalysisRequest {
    pub fn new(channel: ChannelSpec, steady_state: Option<DensityMatrix>) -> Self {
        AnalysisRequest {
            channel,
            steady_state,
            tolerances: Tolerances::default(),
            seed: 0,
            emit_basis: false,
        }
    }
}

// ---------------------------------------------------------------------------
// Builtin models

fn pauli() -> [CMatrix; 3] {
    let i = Complex64::i();
    [
        CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
        CMatrix::from_row_slice(2, 2, &[ZERO, -i, i, ZERO]),
        CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
    ]
}

fn kron3(a: &CMatrix, b: &CMatrix, c: &CMatrix) -> CMatrix {
    kron(&kron(a, b), c)
}

/// Collective spin operators S_k = Σ_i σ_k^(i) on three qubits, plus the
/// Hilbert space dimension.
pub fn collective_spin_ops() -> (Vec<CMatrix>, usize) {
    let p = pauli();
    let id = identity(2);
    let s = p
        .iter()
        .map(|sk| kron3(sk, &id, &id) + kron3(&id, sk, &id) + kron3(&id, &id, sk))
        .collect();
    (s, 8)
}

/// The pairwise exchange operators σ⃗_i·σ⃗_j for (1,2), (2,3), (1,3); they
/// generate the commutant of the collective-decoherence noise algebra.
pub fn pauli_dot_pairs() -> Vec<CMatrix> {
    let p = pauli();
    let id = identity(2);
    let mut out = Vec::new();
    for (a, b) in [(0usize, 1usize), (1, 2), (0, 2)] {
        let mut dot = CMatrix::zeros(8, 8);
        for sk in &p {
            let mut factors = [&id, &id, &id];
            factors[a] = sk;
            factors[b] = sk;
            dot += kron3(factors[0], factors[1], factors[2]);
        }
        out.push(dot);
    }
    out
}

/// Three qubits under collective decoherence: jump operators √γ_k·S_k.
/// The maximally mixed state is steady.
pub fn builtin_example_1(gamma: [f64; 3]) -> Result<AnalysisRequest> {
    if gamma.iter().any(|g| *g < 0.0) {
        return Err(SsmError::Channel("decay rates must be nonnegative".into()));
    }
    let (s, dim) = collective_spin_ops();
    let jumps = s
        .into_iter()
        .zip(gamma)
        .map(|(sk, g)| sk * Complex64::new(g.sqrt(), 0.0))
        .collect();
    let channel = ChannelSpec::lindblad(
        dim,
        CMatrix::zeros(dim, dim),
        jumps,
        "collective-decoherence",
    );
    Ok(AnalysisRequest::new(
        channel,
        Some(DensityMatrix::maximally_mixed(dim)),
    ))
}

/// Two qubits under an interpolated random-unitary channel,
/// E_w(ρ) = (1−w)ρ + w·P(ρ), sampled at the given interpolation weights w.
/// P has the four Kraus operators ½{I⊗I, σx⊗I, σy⊗σz, σz⊗σz}. In a
/// time-convolutionless picture w plays the role of an integrated memory
/// kernel, so sampling several w covers a whole non-Markovian trajectory.
pub fn builtin_example_2(weights: &[f64]) -> Result<AnalysisRequest> {
    if weights.is_empty() {
        return Err(SsmError::Channel(
            "at least one interpolation weight is required".into(),
        ));
    }
    if weights.iter().any(|w| !(0.0..=1.0).contains(w)) {
        return Err(SsmError::Channel(
            "interpolation weights must lie in [0, 1]".into(),
        ));
    }
    let p = pauli();
    let id = identity(2);
    let half = Complex64::new(0.5, 0.0);
    let mixers = [
        kron(&id, &id) * half,
        kron(&p[0], &id) * half,
        kron(&p[1], &p[2]) * half,
        kron(&p[2], &p[2]) * half,
    ];
    let samples = weights
        .iter()
        .map(|&w| {
            let mut kraus = vec![identity(4) * Complex64::new((1.0 - w).sqrt(), 0.0)];
            let root = Complex64::new(w.sqrt(), 0.0);
            kraus.extend(mixers.iter().map(|e| e * root));
            KrausSample { time: w, kraus }
        })
        .collect();
    let channel = ChannelSpec::time_sampled(4, samples, "interpolated-mixing");
    Ok(AnalysisRequest::new(
        channel,
        Some(DensityMatrix::maximally_mixed(4)),
    ))
}

/// Three qubits under a non-unital channel that decays the first qubit to
/// |0⟩ while scrambling the other two:
/// E₀=√(1−2p)·I, E₁=√p·|0⟩⟨0|⊗σx⊗σx, E₂=√p·|0⟩⟨0|⊗σz⊗I,
/// E₃=√(2p)·|0⟩⟨1|⊗I⊗I. The state ¼|0⟩⟨0|⊗I⊗I is steady.
pub fn builtin_example_3(p: f64) -> Result<AnalysisRequest> {
    if !(0.0..=0.5).contains(&p) {
        return Err(SsmError::Channel(
            "decay strength must lie in [0, 1/2]".into(),
        ));
    }
    let s = pauli();
    let id = identity(2);
    let mut p00 = CMatrix::zeros(2, 2);
    p00[(0, 0)] = ONE;
    let mut p01 = CMatrix::zeros(2, 2);
    p01[(0, 1)] = ONE;
    let kraus = vec![
        kron3(&id, &id, &id) * Complex64::new((1.0 - 2.0 * p).sqrt(), 0.0),
        kron3(&p00, &s[0], &s[0]) * Complex64::new(p.sqrt(), 0.0),
        kron3(&p00, &s[2], &id) * Complex64::new(p.sqrt(), 0.0),
        kron3(&p01, &id, &id) * Complex64::new((2.0 * p).sqrt(), 0.0),
    ];
    let channel = ChannelSpec::kraus(8, kraus, "one-qubit-drain");
    let rho = kron3(&p00, &id, &id) * Complex64::new(0.25, 0.0);
    let steady = DensityMatrix::new(rho, &Tolerances::default())?;
    Ok(AnalysisRequest::new(channel, Some(steady)))
}

/// Builtin models by number, with "key=value" parameter overrides.
pub fn builtin_example(number: u32, params: &[(String, f64)]) -> Result<AnalysisRequest> {
    let lookup = |key: &str, default: f64| -> f64 {
        params
            .iter()
            .rev()
            .find(|(k, _)| k == key)
            .map(|(_, v)| *v)
            .unwrap_or(default)
    };
    let known = |allowed: &[&str]| -> Result<()> {
        for (k, _) in params {
            if !allowed.contains(&k.as_str()) {
                return Err(SsmError::Parse {
                    path: format!("--param {k}"),
                    message: format!("unknown parameter for example {number}"),
                });
            }
        }
        Ok(())
    };
    match number {
        1 => {
            known(&["gamma_x", "gamma_y", "gamma_z"])?;
            builtin_example_1([
                lookup("gamma_x", 1.0),
                lookup("gamma_y", 1.0),
                lookup("gamma_z", 1.0),
            ])
        }
        2 => {
            known(&["f"])?;
            if params.iter().any(|(k, _)| k == "f") {
                builtin_example_2(&[lookup("f", 0.5)])
            } else {
                builtin_example_2(&[0.25, 0.5, 0.75])
            }
        }
        3 => {
            known(&["p"])?;
            builtin_example_3(lookup("p", 0.25))
        }
        _ => Err(SsmError::Parse {
            path: "example".into(),
            message: format!("unknown builtin example {number}; use 1, 2 or 3"),
        }),
    }
}

// ---------------------------------------------------------------------------
// JSON input

type RawMatrix = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSample {
    t: f64,
    kraus: Vec<RawMatrix>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    dim: usize,
    kind: String,
    #[serde(default)]
    label: Option<String>,
    #[serde(default)]
    kraus: Option<Vec<RawMatrix>>,
    #[serde(default)]
    hamiltonian: Option<RawMatrix>,
    #[serde(default)]
    lindblad: Option<Vec<RawMatrix>>,
    #[serde(default)]
    samples: Option<Vec<RawSample>>,
    #[serde(default)]
    steady_state: Option<RawMatrix>,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    tolerances: Option<BTreeMap<String, f64>>,
}

fn matrix_from_raw(raw: &RawMatrix, dim: usize, path: &str) -> Result<CMatrix> {
    if raw.len() != dim || raw.iter().any(|row| row.len() != dim) {
        return Err(SsmError::Parse {
            path: path.into(),
            message: format!("expected a {dim}x{dim} matrix of [re, im] pairs"),
        });
    }
    Ok(CMatrix::from_fn(dim, dim, |i, j| {
        Complex64::new(raw[i][j][0], raw[i][j][1])
    }))
}

fn matrices_from_raw(raw: &[RawMatrix], dim: usize, path: &str) -> Result<Vec<CMatrix>> {
    raw.iter()
        .enumerate()
        .map(|(k, m)| matrix_from_raw(m, dim, &format!("{path}/{k}")))
        .collect()
}

fn matrix_to_raw(m: &CMatrix) -> RawMatrix {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

/// Parse a model description from JSON text. See the README for the
/// schema; complex numbers are [re, im] pairs and matrices are row-major
/// arrays of rows.
pub fn parse_model_str(text: &str) -> Result<AnalysisRequest> {
    let raw: RawModel = serde_json::from_str(text).map_err(|e| SsmError::Parse {
        path: "/".into(),
        message: e.to_string(),
    })?;
    if raw.dim == 0 {
        return Err(SsmError::Parse {
            path: "/dim".into(),
            message: "dimension must be positive".into(),
        });
    }
    let label = raw.label.clone().unwrap_or_else(|| raw.kind.clone());
    let body = match raw.kind.as_str() {
        "kraus" => {
            let ops = raw.kraus.as_deref().filter(|k| !k.is_empty()).ok_or_else(|| {
                SsmError::Parse {
                    path: "/kraus".into(),
                    message: "kind \"kraus\" requires a nonempty \"kraus\" array".into(),
                }
            })?;
            ChannelBody::Kraus(matrices_from_raw(ops, raw.dim, "/kraus")?)
        }
        "lindblad" => {
            let hamiltonian = match &raw.hamiltonian {
                Some(h) => matrix_from_raw(h, raw.dim, "/hamiltonian")?,
                None => CMatrix::zeros(raw.dim, raw.dim),
            };
            let jumps = match &raw.lindblad {
                Some(ops) => matrices_from_raw(ops, raw.dim, "/lindblad")?,
                None => Vec::new(),
            };
            if raw.hamiltonian.is_none() && jumps.is_empty() {
                return Err(SsmError::Parse {
                    path: "/lindblad".into(),
                    message: "kind \"lindblad\" requires \"hamiltonian\" or \"lindblad\" ops"
                        .into(),
                });
            }
            ChannelBody::Lindblad {
                hamiltonian,
                lindblad_ops: jumps,
            }
        }
        "time_sampled" => {
            let samples = raw.samples.as_deref().filter(|s| !s.is_empty()).ok_or_else(
                || SsmError::Parse {
                    path: "/samples".into(),
                    message: "kind \"time_sampled\" requires a nonempty \"samples\" array"
                        .into(),
                },
            )?;
            let mut out = Vec::with_capacity(samples.len());
            for (k, s) in samples.iter().enumerate() {
                out.push(KrausSample {
                    time: s.t,
                    kraus: matrices_from_raw(&s.kraus, raw.dim, &format!("/samples/{k}/kraus"))?,
                });
            }
            ChannelBody::TimeSampled(out)
        }
        other => {
            return Err(SsmError::Parse {
                path: "/kind".into(),
                message: format!(
                    "unknown kind {other:?}; expected \"kraus\", \"lindblad\" or \"time_sampled\""
                ),
            });
        }
    };
    let channel = ChannelSpec {
        dim: raw.dim,
        body,
        label,
    };
    let mut tolerances = Tolerances::default();
    if let Some(overrides) = &raw.tolerances {
        tolerances = tolerances.with_overrides(overrides)?;
    }
    let steady_state = match &raw.steady_state {
        Some(m) => Some(DensityMatrix::new(
            matrix_from_raw(m, raw.dim, "/steady_state")?,
            &tolerances,
        )?),
        None => None,
    };
    Ok(AnalysisRequest {
        channel,
        steady_state,
        tolerances,
        seed: raw.seed.unwrap_or(0),
        emit_basis: false,
    })
}

pub fn parse_model(path: &Path) -> Result<AnalysisRequest> {
    let text = std::fs::read_to_string(path).map_err(|e| SsmError::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_model_str(&text)
}

/// Serialize a request back into the input schema (used by `random-model`
/// and for the provenance digest).
pub fn model_to_json(request: &AnalysisRequest) -> Value {
    let mut map = serde_json::Map::new();
    map.insert("dim".into(), request.channel.dim.into());
    map.insert("kind".into(), request.channel.kind_name().into());
    map.insert("label".into(), request.channel.label.clone().into());
    let raw = |m: &CMatrix| serde_json::to_value(matrix_to_raw(m)).expect("plain numbers");
    match &request.channel.body {
        ChannelBody::Kraus(ops) => {
            map.insert("kraus".into(), Value::Array(ops.iter().map(raw).collect()));
        }
        ChannelBody::Lindblad {
            hamiltonian,
            lindblad_ops,
        } => {
            map.insert("hamiltonian".into(), raw(hamiltonian));
            map.insert(
                "lindblad".into(),
                Value::Array(lindblad_ops.iter().map(raw).collect()),
            );
        }
        ChannelBody::TimeSampled(samples) => {
            let arr = samples
                .iter()
                .map(|s| {
                    serde_json::json!({
                        "t": s.time,
                        "kraus": Value::Array(s.kraus.iter().map(raw).collect()),
                    })
                })
                .collect();
            map.insert("samples".into(), Value::Array(arr));
        }
    }
    if let Some(rho) = &request.steady_state {
        map.insert("steady_state".into(), raw(rho.matrix()));
    }
    map.insert("seed".into(), request.seed.into());
    map.insert(
        "tolerances".into(),
        serde_json::to_value(request.tolerances.to_map()).expect("plain numbers"),
    );
    Value::Object(map)
}

fn input_digest(request: &AnalysisRequest) -> String {
    let canonical = serde_json::to_string(&model_to_json(request)).expect("valid json");
    let mut hasher = Sha256::new();
    hasher.update(canonical.as_bytes());
    format!("{:x}", hasher.finalize())
}

// ---------------------------------------------------------------------------
// Analysis driver and report

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub version: String,
    pub seed: u64,
    pub input_digest: String,
    pub tolerances: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BlockReport {
    pub multiplicity: usize,
    pub irrep_dim: usize,
    pub weight: f64,
    pub fixed_factor: RawMatrix,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub label: String,
    pub kind: String,
    pub dim: usize,
    pub steady_state_source: String,
    pub support_rank: usize,
    pub algebra_dimension: usize,
    pub commutant_dimension: usize,
    pub ssm_dimension: usize,
    pub blocks: Vec<BlockReport>,
    pub checks: Vec<CheckEntry>,
    pub all_checks_pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<RawMatrix>>,
    pub provenance: Provenance,
}

#[derive(Debug, Clone)]
pub struct AnalysisOutcome {
    pub report: AnalysisReport,
    pub analysis: SteadyStateAnalysis,
    pub steady_state: DensityMatrix,
}

/// The full pipeline: validate, obtain a steady state, compute the
/// manifold structure, and cross-check it against the brute-force fixed
/// space.
pub fn run_analysis(request: &AnalysisRequest) -> Result<AnalysisOutcome> {
    let tol = &request.tolerances;
    let mut checks = model::validate_channel(&request.channel, tol)
        .map_err(|e| e.at_stage("validate"))?;

    let (rho0, source) = match &request.steady_state {
        Some(rho) => (rho.clone(), "given"),
        None => (
            model::find_steady_state(&request.channel, tol)
                .map_err(|e| e.at_stage("find_steady_state"))?,
            "computed",
        ),
    };
    checks
        .entries
        .push(verify::check_steady(&request.channel, &rho0, tol)?);
    checks.extend(verify::check_cptp_unital(&request.channel, tol)?);

    let analysis = structure::analyze_steady_structure(&request.channel, &rho0, request.seed, tol)?;

    // Independent oracle: the manifold dimension must match the dimension
    // of the fixed space of the channel restricted to the support.
    let fixed_dim = verify::fixed_space_dimension(&request.channel, &analysis.support, tol)
        .map_err(|e| e.at_stage("fixed_space"))?;
    checks.entries.push(CheckEntry::new(
        "fixed_space_dimension",
        (fixed_dim as f64 - analysis.structure.ssm_dimension as f64).abs(),
        0.5,
    ));

    let blocks = analysis
        .structure
        .blocks
        .iter()
        .map(|b| BlockReport {
            multiplicity: b.n,
            irrep_dim: b.d,
            weight: b.weight,
            fixed_factor: matrix_to_raw(b.rho2.matrix()),
        })
        .collect();
    let basis = request.emit_basis.then(|| {
        structure::ssm_operator_basis(&analysis.structure)
            .iter()
            .map(matrix_to_raw)
            .collect()
    });
    let report = AnalysisReport {
        label: request.channel.label.clone(),
        kind: request.channel.kind_name().into(),
        dim: request.channel.dim,
        steady_state_source: source.into(),
        support_rank: analysis.support.rank,
        algebra_dimension: analysis.algebra.len(),
        commutant_dimension: analysis.commutant.len(),
        ssm_dimension: analysis.structure.ssm_dimension,
        blocks,
        all_checks_pass: checks.all_pass(),
        checks: checks.entries,
        basis,
        provenance: Provenance {
            version: env!("CARGO_PKG_VERSION").into(),
            seed: request.seed,
            input_digest: input_digest(request),
            tolerances: tol.to_map(),
        },
    };
    Ok(AnalysisOutcome {
        report,
        analysis,
        steady_state: rho0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Text,
}

/// Render a report. JSON output is byte-stable for a fixed input and seed:
/// field order is fixed by the struct, map keys are sorted, and floats use
/// the shortest round-trip form.
pub fn emit_report(report: &AnalysisReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report is serializable");
            s.push('\n');
            s
        }
        ReportFormat::Text => {
            let mut s = String::new();
            use std::fmt::Write;
            let _ = writeln!(s, "model: {} ({}, dim {})", report.label, report.kind, report.dim);
            let _ = writeln!(
                s,
                "steady state: {} | support rank {}",
                report.steady_state_source, report.support_rank
            );
            let _ = writeln!(
                s,
                "noise algebra dim {} | commutant dim {} | manifold dim {}",
                report.algebra_dimension, report.commutant_dimension, report.ssm_dimension
            );
            let block_list = report
                .blocks
                .iter()
                .map(|b| format!("{}x{} (weight {:.6})", b.multiplicity, b.irrep_dim, b.weight))
                .collect::<Vec<_>>()
                .join(", ");
            let _ = writeln!(s, "blocks (n x d): {block_list}");
            for c in &report.checks {
                let _ = writeln!(
                    s,
                    "  [{}] {:<28} residual {:.3e}  tol {:.1e}",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.residual,
                    c.tolerance
                );
            }
            let _ = writeln!(
                s,
                "overall: {}",
                if report.all_checks_pass { "PASS" } else { "FAIL" }
            );
            s
        }
    }
}
