//! Dynamics and state representation: channel specifications, density
//! matrices, support subspaces, modified Kraus generators, and a
//! convenience steady-state finder.

use num_complex::Complex64;

use crate::config::Tolerances;
use crate::error::{Result, SsmError};
use crate::num::{self, identity, CMatrix, CVector};
use crate::verify::{self, CheckEntry, VerificationReport};

/// One time sample of a Kraus family.
#[derive(Debug, Clone)]
pub struct KrausSample {
    pub time: f64,
    pub kraus: Vec<CMatrix>,
}

#[derive(Debug, Clone)]
pub enum ChannelBody {
    /// A single CPTP map given by Kraus operators.
    Kraus(Vec<CMatrix>),
    /// Markovian generator: Hamiltonian plus Lindblad operators.
    Lindblad {
        hamiltonian: CMatrix,
        lindblad_ops: Vec<CMatrix>,
    },
    /// A family of CPTP maps sampled at several times.
    TimeSampled(Vec<KrausSample>),
}

#[derive(Debug, Clone)]
pub struct ChannelSpec {
    pub dim: usize,
    pub body: ChannelBody,
    pub label: String,
}

impl ChannelSpec {
    pub fn kraus(dim: usize, ops: Vec<CMatrix>, label: impl Into<String>) -> Self {
        ChannelSpec {
            dim,
            body: ChannelBody::Kraus(ops),
            label: label.into(),
        }
    }

    pub fn lindblad(
        dim: usize,
        hamiltonian: CMatrix,
        lindblad_ops: Vec<CMatrix>,
        label: impl Into<String>,
    ) -> Self {
        ChannelSpec {
            dim,
            body: ChannelBody::Lindblad {
                hamiltonian,
                lindblad_ops,
            },
            label: label.into(),
        }
    }

    pub fn time_sampled(dim: usize, samples: Vec<KrausSample>, label: impl Into<String>) -> Self {
        ChannelSpec {
            dim,
            body: ChannelBody::TimeSampled(samples),
            label: label.into(),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self.body {
            ChannelBody::Kraus(_) => "kraus",
            ChannelBody::Lindblad { .. } => "lindblad",
            ChannelBody::TimeSampled(_) => "time_sampled",
        }
    }

    fn check_shapes(&self) -> Result<()> {
        let d = self.dim;
        let bad = |what: &str, m: &CMatrix| {
            Err(SsmError::Dimension(format!(
                "{what} is {}x{}, expected {d}x{d}",
                m.nrows(),
                m.ncols()
            )))
        };
        match &self.body {
            ChannelBody::Kraus(ops) => {
                if ops.is_empty() {
                    return Err(SsmError::Channel("empty Kraus family".into()));
                }
                for (k, e) in ops.iter().enumerate() {
                    if e.nrows() != d || e.ncols() != d {
                        return bad(&format!("kraus[{k}]"), e);
                    }
                }
            }
            ChannelBody::Lindblad {
                hamiltonian,
                lindblad_ops,
            } => {
                if hamiltonian.nrows() != d || hamiltonian.ncols() != d {
                    return bad("hamiltonian", hamiltonian);
                }
                for (k, a) in lindblad_ops.iter().enumerate() {
                    if a.nrows() != d || a.ncols() != d {
                        return bad(&format!("lindblad[{k}]"), a);
                    }
                }
            }
            ChannelBody::TimeSampled(samples) => {
                if samples.is_empty() {
                    return Err(SsmError::Channel("no time samples".into()));
                }
                for (s, sample) in samples.iter().enumerate() {
                    if sample.kraus.is_empty() {
                        return Err(SsmError::Channel(format!("sample {s} has no Kraus operators")));
                    }
                    for (k, e) in sample.kraus.iter().enumerate() {
                        if e.nrows() != d || e.ncols() != d {
                            return bad(&format!("samples[{s}].kraus[{k}]"), e);
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

fn kraus_sum_residual(ops: &[CMatrix], dim: usize) -> f64 {
    let mut sum = CMatrix::zeros(dim, dim);
    for e in ops {
        sum += e.adjoint() * e;
    }
    (sum - identity(dim)).norm()
}

/// Structural and tolerance validation of a channel. Structural problems
/// (shape mismatches) are errors; tolerance violations come back as failed
/// report entries.
pub fn validate_channel(spec: &ChannelSpec, tol: &Tolerances) -> Result<VerificationReport> {
    spec.check_shapes()?;
    let mut entries = Vec::new();
    match &spec.body {
        ChannelBody::Kraus(ops) => {
            entries.push(CheckEntry::new(
                "kraus_completeness",
                kraus_sum_residual(ops, spec.dim),
                tol.cptp,
            ));
        }
        ChannelBody::Lindblad { hamiltonian, .. } => {
            let scale = hamiltonian.norm().max(1.0);
            entries.push(CheckEntry::new(
                "hamiltonian_hermitian",
                (hamiltonian - hamiltonian.adjoint()).norm() / scale,
                tol.herm,
            ));
        }
        ChannelBody::TimeSampled(samples) => {
            for (s, sample) in samples.iter().enumerate() {
                entries.push(CheckEntry::new(
                    format!("kraus_completeness[{s}]"),
                    kraus_sum_residual(&sample.kraus, spec.dim),
                    tol.cptp,
                ));
            }
        }
    }
    Ok(VerificationReport { entries })
}

#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, positivity, and unit trace.
    pub fn new(matrix: CMatrix, tol: &Tolerances) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(SsmError::Dimension(format!(
                "density matrix is {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let eig = num::hermitian_eig(&matrix, tol)?;
        let min = eig.eigenvalues.min();
        if min < -tol.psd {
            return Err(SsmError::NotPositive {
                min_eigenvalue: min,
            });
        }
        let trace = matrix.trace();
        if (trace - num::ONE).norm() > 1e-10 {
            return Err(SsmError::State(format!(
                "trace is {trace}, expected 1 within 1e-10"
            )));
        }
        Ok(DensityMatrix { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Maximally mixed state I/d.
    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix {
            matrix: identity(dim) * Complex64::new(1.0 / dim as f64, 0.0),
        }
    }
}

/// Support subspace of a steady state, with the restricted ρ̃₀ and its
/// square-root factors cached for the modified-Kraus construction.
#[derive(Debug, Clone)]
pub struct SupportSubspace {
    pub full_dim: usize,
    pub rank: usize,
    /// d×r isometry onto the support.
    pub isometry: CMatrix,
    /// Support projector V·V†.
    pub projector: CMatrix,
    /// ρ̃₀ = V†ρ₀V, full rank on the support.
    pub rho0_restricted: CMatrix,
    /// ρ̃₀^{1/2}.
    pub sqrt_restricted: CMatrix,
    /// ρ̃₀^{-1/2}.
    pub pinv_sqrt_restricted: CMatrix,
}

impl SupportSubspace {
    /// Restrict a full-space operator to the support: V†·X·V.
    pub fn restrict(&self, x: &CMatrix) -> CMatrix {
        self.isometry.adjoint() * x * &self.isometry
    }

    /// Embed a support operator into the full space: V·X·V†.
    pub fn embed(&self, x: &CMatrix) -> CMatrix {
        &self.isometry * x * self.isometry.adjoint()
    }
}

/// Support projector of ρ₀: eigenvectors with eigenvalue above
/// support_tol relative to the largest one.
pub fn support_of(rho0: &DensityMatrix, support_tol: f64, tol: &Tolerances) -> Result<SupportSubspace> {
    let eig = num::hermitian_eig(rho0.matrix(), tol)?;
    let lambda_max = eig.eigenvalues.max();
    if lambda_max <= 0.0 {
        return Err(SsmError::State("state is numerically zero".into()));
    }
    let cut = support_tol * lambda_max;
    let keep: Vec<usize> = (0..eig.eigenvalues.len())
        .filter(|&i| eig.eigenvalues[i] > cut)
        .collect();
    let rank = keep.len();
    let mut isometry = CMatrix::zeros(rho0.dim(), rank);
    for (k, &i) in keep.iter().enumerate() {
        isometry.set_column(k, &eig.eigenvectors.column(i));
    }
    let projector = &isometry * isometry.adjoint();
    let rho0_restricted = isometry.adjoint() * rho0.matrix() * &isometry;
    let sqrt_restricted = num::psd_sqrt(&rho0_restricted, tol)?;
    let pinv_sqrt_restricted = num::psd_pinv_sqrt(&rho0_restricted, support_tol, tol)?;
    Ok(SupportSubspace {
        full_dim: rho0.dim(),
        rank,
        isometry,
        projector,
        rho0_restricted,
        sqrt_restricted,
        pinv_sqrt_restricted,
    })
}

/// Generators of a *-algebra on the support subspace. Daggers are never
/// materialized; every algebra computation adds them implicitly.
#[derive(Debug, Clone)]
pub struct GeneratorSet {
    pub dim: usize,
    pub generators: Vec<CMatrix>,
    pub dagger_closed: bool,
}

fn is_scalar_multiple(x: &CMatrix, y: &CMatrix, tol: f64) -> bool {
    let nx = x.norm();
    let ny = y.norm();
    // Cauchy–Schwarz equality |<X,Y>| = ||X||·||Y|| iff Y ∝ X.
    (nx * ny - num::hs_inner(x, y).norm()).abs() <= tol * nx * ny
}

/// Raw generating operators of the noise algebra, on the full space.
/// Zero operators are dropped; time-sampled unions are deduplicated up to
/// scalar multiples.
pub fn raw_generators(spec: &ChannelSpec, tol: &Tolerances) -> Vec<CMatrix> {
    let nonzero = |ops: &[CMatrix]| -> Vec<CMatrix> {
        ops.iter().filter(|m| m.norm() > 1e-14).cloned().collect()
    };
    match &spec.body {
        ChannelBody::Kraus(ops) => nonzero(ops),
        ChannelBody::Lindblad {
            hamiltonian,
            lindblad_ops,
        } => {
            let mut gens = Vec::new();
            if hamiltonian.norm() > 1e-14 {
                gens.push(hamiltonian.clone());
            }
            gens.extend(nonzero(lindblad_ops));
            gens
        }
        ChannelBody::TimeSampled(samples) => {
            let mut gens: Vec<CMatrix> = Vec::new();
            for sample in samples {
                for e in nonzero(&sample.kraus) {
                    if !gens.iter().any(|g| is_scalar_multiple(g, &e, tol.dedup)) {
                        gens.push(e);
                    }
                }
            }
            gens
        }
    }
}

/// Modified generators Ẽ = ρ̃₀^{-1/2}·(V†GV)·ρ̃₀^{1/2} on the support.
pub fn modified_generators(raw: &[CMatrix], support: &SupportSubspace) -> GeneratorSet {
    let mut generators = Vec::new();
    for g in raw {
        let restricted = support.restrict(g);
        let modified = &support.pinv_sqrt_restricted * restricted * &support.sqrt_restricted;
        if modified.norm() > 1e-12 * g.norm().max(1.0) {
            generators.push(modified);
        }
    }
    GeneratorSet {
        dim: support.rank,
        generators,
        dagger_closed: true,
    }
}

fn positive_part(h: &CMatrix, tol: &Tolerances) -> Result<CMatrix> {
    let eig = num::hermitian_eig(h, tol)?;
    let mut out = CMatrix::zeros(h.nrows(), h.ncols());
    for i in 0..eig.eigenvalues.len() {
        if eig.eigenvalues[i] > 0.0 {
            let v: CVector = eig.eigenvectors.column(i).into();
            out += &v * v.adjoint() * Complex64::new(eig.eigenvalues[i], 0.0);
        }
    }
    Ok(out)
}

/// Convenience fixed-point finder: extracts a density matrix from the fixed
/// space of the (super)operator and certifies it a posteriori.
pub fn find_steady_state(spec: &ChannelSpec, tol: &Tolerances) -> Result<DensityMatrix> {
    spec.check_shapes()?;
    let basis = verify::full_space_fixed_basis(spec, tol)?;
    if basis.is_empty() {
        return Err(SsmError::Numerical(
            "fixed space of the channel is numerically empty".into(),
        ));
    }
    for x in &basis {
        let herm = (x + x.adjoint()) * Complex64::new(0.5, 0.0);
        let skew = (x - x.adjoint()) * Complex64::new(0.0, 0.5);
        for h in [herm, skew] {
            for sign in [1.0, -1.0] {
                let part = positive_part(&(&h * Complex64::new(sign, 0.0)), tol)?;
                let trace = part.trace().re;
                if trace <= 1e-10 {
                    continue;
                }
                let candidate = part * Complex64::new(1.0 / trace, 0.0);
                if verify::steady_residual(spec, &candidate)? <= tol.steady {
                    return Ok(DensityMatrix::new(candidate, tol)?);
                }
            }
        }
    }
    Err(SsmError::Numerical(
        "no positive fixed element found in the fixed space".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli;
    use crate::num::{kron, ONE, ZERO};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    pub(crate) fn sigma_x() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
    }

    pub(crate) fn sigma_y() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[ZERO, -Complex64::i(), Complex64::i(), ZERO])
    }

    pub(crate) fn sigma_z() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
    }

    #[test]
    fn validate_identity_kraus() {
        let tol = Tolerances::default();
        let spec = ChannelSpec::kraus(2, vec![identity(2)], "id");
        let report = validate_channel(&spec, &tol).unwrap();
        assert!(report.all_pass());
        assert!(report.entries[0].residual < 1e-14);
    }

    #[test]
    fn validate_reference_two_qubit_kraus() {
        let tol = Tolerances::default();
        let half = c(0.5, 0.0);
        let ops = vec![
            kron(&identity(2), &identity(2)) * half,
            kron(&sigma_x(), &identity(2)) * half,
            kron(&sigma_y(), &sigma_z()) * half,
            kron(&sigma_z(), &sigma_z()) * half,
        ];
        let spec = ChannelSpec::kraus(4, ops, "two-qubit error model");
        assert!(validate_channel(&spec, &tol).unwrap().all_pass());
    }

    #[test]
    fn validate_reports_broken_completeness() {
        let tol = Tolerances::default();
        let spec = ChannelSpec::kraus(2, vec![identity(2), identity(2)], "broken");
        let report = validate_channel(&spec, &tol).unwrap();
        assert!(!report.all_pass());
        // Σ E†E = 2I, residual ‖I‖_F = √2.
        assert!((report.entries[0].residual - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn support_of_full_rank_state() {
        let tol = Tolerances::default();
        let rho = DensityMatrix::maximally_mixed(8);
        let s = support_of(&rho, tol.support, &tol).unwrap();
        assert_eq!(s.rank, 8);
        assert!((s.projector - identity(8)).norm() < 1e-12);
    }

    #[test]
    fn support_of_embedded_state() {
        // ρ₀ = ¼|0⟩⟨0|⊗I⊗I on three qubits: rank 4, P = |0⟩⟨0|⊗I⊗I.
        let tol = Tolerances::default();
        let mut p = CMatrix::zeros(2, 2);
        p[(0, 0)] = ONE;
        let rho = kron(&p, &identity(4)) * c(0.25, 0.0);
        let rho = DensityMatrix::new(rho, &tol).unwrap();
        let s = support_of(&rho, tol.support, &tol).unwrap();
        assert_eq!(s.rank, 4);
        assert!((&s.projector - kron(&p, &identity(4))).norm() < 1e-10);
        // Tr(ρ₀P) = 1.
        let overlap = (rho.matrix() * &s.projector).trace();
        assert!((overlap - ONE).norm() < 1e-10);
    }

    #[test]
    fn support_of_pure_state() {
        let tol = Tolerances::default();
        let mut m = CMatrix::zeros(3, 3);
        m[(1, 1)] = ONE;
        let rho = DensityMatrix::new(m, &tol).unwrap();
        assert_eq!(support_of(&rho, tol.support, &tol).unwrap().rank, 1);
    }

    #[test]
    fn raw_generators_drop_zero_hamiltonian() {
        let tol = Tolerances::default();
        let spec = cli::builtin_example_1([1.0, 1.0, 1.0]).unwrap();
        let gens = raw_generators(&spec.channel, &tol);
        assert_eq!(gens.len(), 3);
    }

    #[test]
    fn raw_generators_dedup_time_samples() {
        let tol = Tolerances::default();
        let sample = KrausSample {
            time: 0.0,
            kraus: vec![identity(2)],
        };
        let spec = ChannelSpec::time_sampled(2, vec![sample.clone(), sample], "dup");
        assert_eq!(raw_generators(&spec, &tol).len(), 1);
    }

    #[test]
    fn modified_generators_identity_state_is_restriction() {
        let tol = Tolerances::default();
        let rho = DensityMatrix::maximally_mixed(4);
        let support = support_of(&rho, tol.support, &tol).unwrap();
        let g = kron(&sigma_x(), &sigma_z());
        let gens = modified_generators(&[g.clone()], &support);
        assert_eq!(gens.generators.len(), 1);
        let expected = support.restrict(&g);
        assert!((&gens.generators[0] - expected).norm() < 1e-10);
    }

    #[test]
    fn modified_generators_match_full_space_conjugation() {
        // Full-rank ρ₀: V†·(ρ₀^{-1/2} G ρ₀^{1/2})·V computed in the full
        // space must agree with the restricted construction.
        let tol = Tolerances::default();
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(9);
        let g = crate::verify::random_density(&mut rng, 4).matrix().clone() * c(3.0, 0.0);
        let rho_m = crate::verify::random_density(&mut rng, 4).matrix().clone();
        let rho = DensityMatrix::new(rho_m.clone(), &tol).unwrap();
        let support = support_of(&rho, tol.support, &tol).unwrap();
        let gens = modified_generators(&[g.clone()], &support);

        let sqrt = num::psd_sqrt(&rho_m, &tol).unwrap();
        let pinv = num::psd_pinv_sqrt(&rho_m, tol.support, &tol).unwrap();
        let full = pinv * &g * sqrt;
        let expected = support.restrict(&full);
        assert!((&gens.generators[0] - expected).norm() < 1e-8);
    }

    #[test]
    fn modified_generators_example_3_structure() {
        let tol = Tolerances::default();
        let spec = cli::builtin_example_3(0.25).unwrap();
        let rho0 = spec.steady_state.clone().unwrap();
        let support = support_of(&rho0, tol.support, &tol).unwrap();
        let raw = raw_generators(&spec.channel, &tol);
        assert_eq!(raw.len(), 4);
        let gens = modified_generators(&raw, &support);
        // E_3 maps the support into its complement, so its modification is 0.
        assert_eq!(gens.generators.len(), 3);
        // Each survivor is proportional to a restricted unitary (norm √4·w).
        for g in &gens.generators {
            let gg = g.adjoint() * g;
            let scale = gg.trace().re / 4.0;
            assert!((gg - identity(4) * c(scale, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn find_steady_state_unital_and_examples() {
        let tol = Tolerances::default();
        let spec = cli::builtin_example_2(&[0.5]).unwrap().channel;
        let rho = find_steady_state(&spec, &tol).unwrap();
        assert!(verify::steady_residual(&spec, rho.matrix()).unwrap() <= 1e-10);

        let spec3 = cli::builtin_example_3(0.25).unwrap().channel;
        let rho3 = find_steady_state(&spec3, &tol).unwrap();
        assert!(verify::steady_residual(&spec3, rho3.matrix()).unwrap() <= 1e-10);

        let spec1 = cli::builtin_example_1([1.0, 1.0, 1.0]).unwrap().channel;
        let rho1 = find_steady_state(&spec1, &tol).unwrap();
        assert!(verify::steady_residual(&spec1, rho1.matrix()).unwrap() <= 1e-10);
    }

    #[test]
    fn unital_properties_of_modified_kraus() {
        // P1: Σ Ẽ Ẽ† = I and P2: Σ Ẽ† ρ̃₀ Ẽ = ρ̃₀ for a complete Kraus
        // family with a steady ρ₀.
        let tol = Tolerances::default();
        let spec = cli::builtin_example_3(0.3).unwrap();
        let rho0 = spec.steady_state.clone().unwrap();
        let support = support_of(&rho0, tol.support, &tol).unwrap();
        let ops = match &spec.channel.body {
            ChannelBody::Kraus(ops) => ops.clone(),
            _ => unreachable!(),
        };
        let mut unital = CMatrix::zeros(4, 4);
        let mut dual_fixed = CMatrix::zeros(4, 4);
        for e in &ops {
            let restricted = support.restrict(e);
            let m = &support.pinv_sqrt_restricted * restricted * &support.sqrt_restricted;
            unital += &m * m.adjoint();
            dual_fixed += m.adjoint() * &support.rho0_restricted * &m;
        }
        assert!((unital - identity(4)).norm() < 1e-8);
        assert!((dual_fixed - &support.rho0_restricted).norm() < 1e-8);
    }
}
