//! Independent numerical checks: superoperator construction, fixed-space
//! oracles, steadiness/covariance/CPTP residuals, and random model
//! generation with a known block structure.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::config::Tolerances;
use crate::error::{Result, SsmError};
use crate::model::{ChannelBody, ChannelSpec, DensityMatrix, SupportSubspace};
use crate::num::{self, identity, kron, unvec, vec_of, CMatrix, ONE};

/// One named residual-versus-tolerance check.
#[derive(Debug, Clone, Serialize)]
pub struct CheckEntry {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckEntry {
    pub fn new(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        CheckEntry {
            name: name.into(),
            residual,
            tolerance,
            pass: residual <= tolerance,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct VerificationReport {
    pub entries: Vec<CheckEntry>,
}

impl VerificationReport {
    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn extend(&mut self, other: VerificationReport) {
        self.entries.extend(other.entries);
    }
}

/// A linear map on operators, stored in the column-stacking convention
/// vec(A·X·B) = (Bᵀ⊗A)·vec(X).
#[derive(Debug, Clone)]
pub struct Superoperator {
    pub dim: usize,
    pub matrix: CMatrix,
}

impl Superoperator {
    /// Φ(X) = Σ_k E_k X E_k†.
    pub fn from_kraus(ops: &[CMatrix]) -> Self {
        let dim = ops[0].nrows();
        let mut matrix = CMatrix::zeros(dim * dim, dim * dim);
        for e in ops {
            matrix += kron(&e.conjugate(), e);
        }
        Superoperator { dim, matrix }
    }

    /// L(X) = −i[H,X] + Σ_k A_k X A_k† − ½{A_k†A_k, X}.
    pub fn from_lindblad(hamiltonian: &CMatrix, jump_ops: &[CMatrix]) -> Self {
        let dim = hamiltonian.nrows();
        let id = identity(dim);
        let mut matrix = (kron(&id, hamiltonian) - kron(&hamiltonian.transpose(), &id))
            * Complex64::new(0.0, -1.0);
        for a in jump_ops {
            let ada = a.adjoint() * a;
            matrix += kron(&a.conjugate(), a)
                - (kron(&id, &ada) + kron(&ada.transpose(), &id)) * Complex64::new(0.5, 0.0);
        }
        Superoperator { dim, matrix }
    }

    pub fn apply(&self, x: &CMatrix) -> CMatrix {
        unvec(&(&self.matrix * vec_of(x)), self.dim, self.dim).expect("dimension fixed")
    }
}

/// Σ_k E_k X E_k†.
pub fn apply_kraus(ops: &[CMatrix], x: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(x.nrows(), x.ncols());
    for e in ops {
        out += e * x * e.adjoint();
    }
    out
}

/// Heisenberg picture, Σ_k E_k† X E_k.
pub fn apply_dual_kraus(ops: &[CMatrix], x: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(x.nrows(), x.ncols());
    for e in ops {
        out += e.adjoint() * x * e;
    }
    out
}

/// −i[H,X] + Σ_k A_k X A_k† − ½{A_k†A_k, X}.
pub fn apply_lindblad(hamiltonian: &CMatrix, jump_ops: &[CMatrix], x: &CMatrix) -> CMatrix {
    let mut out = num::commutator(hamiltonian, x) * Complex64::new(0.0, -1.0);
    for a in jump_ops {
        let ada = a.adjoint() * a;
        out += a * x * a.adjoint() - (&ada * x + x * &ada) * Complex64::new(0.5, 0.0);
    }
    out
}

/// Action of the channel on one operator; for a time-sampled family the
/// result of every sample map is returned.
pub fn apply_channel(spec: &ChannelSpec, x: &CMatrix) -> Vec<CMatrix> {
    match &spec.body {
        ChannelBody::Kraus(ops) => vec![apply_kraus(ops, x)],
        ChannelBody::Lindblad {
            hamiltonian,
            lindblad_ops,
        } => vec![apply_lindblad(hamiltonian, lindblad_ops, x)],
        ChannelBody::TimeSampled(samples) => samples
            .iter()
            .map(|s| apply_kraus(&s.kraus, x))
            .collect(),
    }
}

fn channel_scale(spec: &ChannelSpec) -> f64 {
    let mut scale = 1.0f64;
    match &spec.body {
        ChannelBody::Kraus(ops) => {
            for e in ops {
                scale = scale.max(e.norm());
            }
        }
        ChannelBody::Lindblad {
            hamiltonian,
            lindblad_ops,
        } => {
            scale = scale.max(hamiltonian.norm());
            for a in lindblad_ops {
                scale = scale.max(a.norm() * a.norm());
            }
        }
        ChannelBody::TimeSampled(samples) => {
            for s in samples {
                for e in &s.kraus {
                    scale = scale.max(e.norm());
                }
            }
        }
    }
    scale
}

/// Relative steadiness residual: ‖Φ(X)−X‖ for each sample map, or ‖L(X)‖
/// for a generator, normalized by the operator and channel scales. The
/// maximum over samples is returned.
pub fn steady_residual(spec: &ChannelSpec, x: &CMatrix) -> Result<f64> {
    if x.nrows() != spec.dim || x.ncols() != spec.dim {
        return Err(SsmError::Dimension(format!(
            "operator is {}x{}, channel dimension is {}",
            x.nrows(),
            x.ncols(),
            spec.dim
        )));
    }
    let scale = x.norm().max(1.0) * channel_scale(spec);
    let residual = match &spec.body {
        ChannelBody::Lindblad {
            hamiltonian,
            lindblad_ops,
        } => apply_lindblad(hamiltonian, lindblad_ops, x).norm(),
        _ => apply_channel(spec, x)
            .iter()
            .map(|y| (y - x).norm())
            .fold(0.0, f64::max),
    };
    Ok(residual / scale)
}

pub fn check_steady(spec: &ChannelSpec, rho: &DensityMatrix, tol: &Tolerances) -> Result<CheckEntry> {
    Ok(CheckEntry::new(
        "steady_state",
        steady_residual(spec, rho.matrix())?,
        tol.steady,
    ))
}

fn fixed_constraints(spec: &ChannelSpec) -> Vec<CMatrix> {
    let n2 = spec.dim * spec.dim;
    match &spec.body {
        ChannelBody::Kraus(ops) => {
            vec![Superoperator::from_kraus(ops).matrix - identity(n2)]
        }
        ChannelBody::Lindblad {
            hamiltonian,
            lindblad_ops,
        } => vec![Superoperator::from_lindblad(hamiltonian, lindblad_ops).matrix],
        ChannelBody::TimeSampled(samples) => samples
            .iter()
            .map(|s| Superoperator::from_kraus(&s.kraus).matrix - identity(n2))
            .collect(),
    }
}

fn fixed_basis_of_constraints(
    constraints: &[CMatrix],
    dim: usize,
    tol: &Tolerances,
) -> Result<Vec<CMatrix>> {
    let n2 = dim * dim;
    let mut stacked = CMatrix::zeros(constraints.len() * n2, n2);
    for (k, c) in constraints.iter().enumerate() {
        stacked.view_mut((k * n2, 0), (n2, n2)).copy_from(c);
    }
    let null = num::svd_nullspace(&stacked, tol.nullspace);
    null.vectors
        .column_iter()
        .map(|v| unvec(&v.into_owned(), dim, dim))
        .collect()
}

/// HS-orthonormal basis of the joint fixed space of the channel on the
/// full Hilbert space. This is the brute-force oracle the algebraic
/// pipeline is checked against.
pub fn full_space_fixed_basis(spec: &ChannelSpec, tol: &Tolerances) -> Result<Vec<CMatrix>> {
    fixed_basis_of_constraints(&fixed_constraints(spec), spec.dim, tol)
}

fn restricted_spec(spec: &ChannelSpec, support: &SupportSubspace) -> Result<ChannelSpec> {
    let leak_tol = 1e-8;
    let complement = identity(support.full_dim) - &support.projector;
    let restrict = |ops: &[CMatrix]| -> Result<Vec<CMatrix>> {
        for e in ops {
            let leak = (&complement * e * &support.projector).norm();
            if leak > leak_tol * e.norm().max(1.0) {
                return Err(SsmError::Numerical(format!(
                    "support is not invariant under the channel (leak {leak:.3e})"
                )));
            }
        }
        Ok(ops.iter().map(|e| support.restrict(e)).collect())
    };
    let body = match &spec.body {
        ChannelBody::Kraus(ops) => ChannelBody::Kraus(restrict(ops)?),
        ChannelBody::Lindblad {
            hamiltonian,
            lindblad_ops,
        } => {
            let mut k = hamiltonian * Complex64::i();
            for a in lindblad_ops {
                k += a.adjoint() * a * Complex64::new(0.5, 0.0);
            }
            restrict(&[k])?;
            ChannelBody::Lindblad {
                hamiltonian: support.restrict(hamiltonian),
                lindblad_ops: restrict(lindblad_ops)?,
            }
        }
        ChannelBody::TimeSampled(samples) => ChannelBody::TimeSampled(
            samples
                .iter()
                .map(|s| {
                    Ok(crate::model::KrausSample {
                        time: s.time,
                        kraus: restrict(&s.kraus)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?,
        ),
    };
    Ok(ChannelSpec {
        dim: support.rank,
        body,
        label: spec.label.clone(),
    })
}

/// Dimension of the fixed space of the channel restricted to an invariant
/// support subspace. Errors if the support leaks.
pub fn fixed_space_dimension(
    spec: &ChannelSpec,
    support: &SupportSubspace,
    tol: &Tolerances,
) -> Result<usize> {
    let restricted = restricted_spec(spec, support)?;
    Ok(full_space_fixed_basis(&restricted, tol)?.len())
}

/// Cesàro mean (1/N)·Σ_{n=1..N} Φⁿ of the channel restricted to the
/// support, as a superoperator matrix. Converges (at rate 1/N) to the
/// spectral projection onto the fixed space. A Lindblad generator L is
/// replaced by its resolvent (I − L)⁻¹, a channel-like map with the same
/// fixed space. For a time-sampled family the sample maps are averaged
/// first, which has the same joint fixed space.
pub fn cesaro_fixed_projection(
    spec: &ChannelSpec,
    support: &SupportSubspace,
    terms: usize,
) -> Result<Superoperator> {
    let restricted = restricted_spec(spec, support)?;
    let r = restricted.dim;
    let phi = match &restricted.body {
        ChannelBody::Kraus(ops) => Superoperator::from_kraus(ops).matrix,
        ChannelBody::Lindblad {
            hamiltonian,
            lindblad_ops,
        } => {
            let l = Superoperator::from_lindblad(hamiltonian, lindblad_ops).matrix;
            (identity(r * r) - l).try_inverse().ok_or_else(|| {
                SsmError::Numerical("resolvent of the generator is singular".into())
            })?
        }
        ChannelBody::TimeSampled(samples) => {
            let mut m = CMatrix::zeros(r * r, r * r);
            for s in samples {
                m += Superoperator::from_kraus(&s.kraus).matrix;
            }
            m / Complex64::new(samples.len() as f64, 0.0)
        }
    };
    let mut power = identity(r * r);
    let mut sum = CMatrix::zeros(r * r, r * r);
    for _ in 0..terms {
        power = &phi * power;
        sum += &power;
    }
    Ok(Superoperator {
        dim: r,
        matrix: sum / Complex64::new(terms as f64, 0.0),
    })
}

/// U = exp(iK) for Hermitian K, via the eigendecomposition.
pub fn unitary_exp(k: &CMatrix, tol: &Tolerances) -> Result<CMatrix> {
    let eig = num::hermitian_eig(k, tol)?;
    let phases = DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|&l| Complex64::new(0.0, l).exp()),
    );
    let v = &eig.eigenvectors;
    Ok(v * CMatrix::from_diagonal(&phases) * v.adjoint())
}

/// Covariance residual ‖Φ(UXU†) − U·Φ(X)·U†‖ over all sample maps,
/// normalized by the scales involved.
pub fn check_covariance(
    spec: &ChannelSpec,
    u: &CMatrix,
    x: &CMatrix,
    tol: &Tolerances,
) -> Result<CheckEntry> {
    let rotated = apply_channel(spec, &(u * x * u.adjoint()));
    let plain = apply_channel(spec, x);
    let scale = x.norm().max(1.0) * channel_scale(spec);
    let residual = rotated
        .iter()
        .zip(&plain)
        .map(|(a, b)| (a - u * b * u.adjoint()).norm())
        .fold(0.0, f64::max)
        / scale;
    Ok(CheckEntry::new("covariance", residual, tol.steady))
}

/// Trace preservation and unitality residuals. A generator is trace
/// preserving iff its dual kills the identity, and unital iff it kills the
/// identity.
pub fn check_cptp_unital(spec: &ChannelSpec, tol: &Tolerances) -> Result<VerificationReport> {
    let id = identity(spec.dim);
    let mut entries = Vec::new();
    let mut push_pair = |tag: String, tp: f64, unital: f64| {
        entries.push(CheckEntry::new(format!("trace_preserving{tag}"), tp, tol.cptp));
        entries.push(CheckEntry::new(format!("unital{tag}"), unital, tol.cptp));
    };
    match &spec.body {
        ChannelBody::Kraus(ops) => push_pair(
            String::new(),
            (apply_dual_kraus(ops, &id) - &id).norm(),
            (apply_kraus(ops, &id) - &id).norm(),
        ),
        ChannelBody::Lindblad {
            hamiltonian,
            lindblad_ops,
        } => {
            // Dual: i[H,X] + Σ A†XA − ½{A†A, X}; at X = I it vanishes
            // identically, reported for symmetry.
            let mut dual = num::commutator(hamiltonian, &id) * Complex64::i();
            for a in lindblad_ops {
                dual += a.adjoint() * &id * a - a.adjoint() * a;
            }
            push_pair(
                String::new(),
                dual.norm(),
                apply_lindblad(hamiltonian, lindblad_ops, &id).norm(),
            );
        }
        ChannelBody::TimeSampled(samples) => {
            for (k, s) in samples.iter().enumerate() {
                push_pair(
                    format!("[{k}]"),
                    (apply_dual_kraus(&s.kraus, &id) - &id).norm(),
                    (apply_kraus(&s.kraus, &id) - &id).norm(),
                );
            }
        }
    }
    Ok(VerificationReport { entries })
}

pub fn random_density(rng: &mut impl Rng, n: usize) -> DensityMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let mut m = &g * g.adjoint();
    // A Wishart matrix is almost surely positive definite; normalizing the
    // trace makes it a valid state for any tolerance.
    m /= m.trace();
    DensityMatrix::new(m, &Tolerances::default()).expect("Wishart state is valid")
}

/// Haar-distributed unitary via the phase-fixed QR decomposition of a
/// complex Ginibre matrix.
pub fn haar_unitary(rng: &mut impl Rng, n: usize) -> CMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Recipe for a synthetic channel with a prescribed block structure.
#[derive(Debug, Clone)]
pub struct RandomModelRequest {
    /// (multiplicity n, irrep dimension d) per block.
    pub blocks: Vec<(usize, usize)>,
    /// Optional total dimension; the complement of the support decays into
    /// it, making the channel non-unital.
    pub embed_dim: Option<usize>,
    pub num_kraus: usize,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct RandomModel {
    pub channel: ChannelSpec,
    pub steady_state: DensityMatrix,
    /// The planted (n, d) pairs, sorted the way the analysis reports them.
    pub blocks: Vec<(usize, usize)>,
}

/// Build a Kraus channel whose steady-state manifold on the support of the
/// returned state has exactly the requested block structure. Each Kraus
/// operator is a scaled random unitary of the form W(⊕_α I_n⊗V_α)W†, so
/// the noise algebra is generically W(⊕_α 1_n⊗Mat_d)W†. With an embed
/// dimension, the complement of the support decays into it.
pub fn random_model(request: &RandomModelRequest, tol: &Tolerances) -> Result<RandomModel> {
    if request.blocks.is_empty() {
        return Err(SsmError::Dimension("at least one block is required".into()));
    }
    if request.num_kraus < 2 {
        return Err(SsmError::Dimension(
            "at least two Kraus operators are needed to pin the block algebras".into(),
        ));
    }
    let r: usize = request.blocks.iter().map(|&(n, d)| n * d).sum();
    let full = request.embed_dim.unwrap_or(r);
    if full < r {
        return Err(SsmError::Dimension(format!(
            "embed dimension {full} is smaller than the support rank {r}"
        )));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(request.seed);
    let w = haar_unitary(&mut rng, r);

    // Kraus weights: a generic point of the simplex.
    let mut weights: Vec<f64> = (0..request.num_kraus)
        .map(|_| -rng.gen::<f64>().max(1e-12).ln())
        .collect();
    let total: f64 = weights.iter().sum();
    for p in &mut weights {
        *p /= total;
    }

    let mut kraus = Vec::with_capacity(request.num_kraus + full - r);
    for &p in &weights {
        let mut block_diag = CMatrix::zeros(r, r);
        let mut offset = 0;
        for &(n, d) in &request.blocks {
            let v = kron(&identity(n), &haar_unitary(&mut rng, d));
            block_diag
                .view_mut((offset, offset), (n * d, n * d))
                .copy_from(&v);
            offset += n * d;
        }
        let u = &w * block_diag * w.adjoint() * Complex64::new(p.sqrt(), 0.0);
        let mut e = CMatrix::zeros(full, full);
        e.view_mut((0, 0), (r, r)).copy_from(&u);
        kraus.push(e);
    }
    // One decay operator |s⟩⟨c| per complement vector keeps the family
    // trace preserving while draining everything outside the support.
    for c in r..full {
        let mut e = CMatrix::zeros(full, full);
        e[(c % r, c)] = ONE;
        kraus.push(e);
    }

    // Steady state: W(⊕_α X_α ⊗ I_d/d)W†, full rank on the support.
    let mut rho_support = CMatrix::zeros(r, r);
    let mut offset = 0;
    for &(n, d) in &request.blocks {
        let x = random_density(&mut rng, n).matrix().clone() * Complex64::new(rng.gen::<f64>() + 0.1, 0.0);
        rho_support
            .view_mut((offset, offset), (n * d, n * d))
            .copy_from(&(kron(&x, &identity(d)) / Complex64::new(d as f64, 0.0)));
        offset += n * d;
    }
    rho_support = &w * rho_support * w.adjoint();
    rho_support /= rho_support.trace();
    let mut rho = CMatrix::zeros(full, full);
    rho.view_mut((0, 0), (r, r)).copy_from(&rho_support);

    let channel = ChannelSpec::kraus(full, kraus, "random");
    let steady_state = DensityMatrix::new(rho, tol)?;
    let residual = steady_residual(&channel, steady_state.matrix())?;
    if residual > tol.steady {
        return Err(SsmError::Numerical(format!(
            "constructed state is not steady (residual {residual:.3e})"
        )));
    }
    let mut blocks = request.blocks.clone();
    blocks.sort_by(|a, b| (b.1, b.0).cmp(&(a.1, a.0)));
    Ok(RandomModel {
        channel,
        steady_state,
        blocks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model;
    use crate::num::ZERO;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn sz() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
    }

    #[test]
    fn superoperator_matches_direct_application() {
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let e0 = random_density(&mut rng, 3).matrix().clone();
        let e1 = random_density(&mut rng, 3).matrix().clone() * Complex64::i();
        let x = random_density(&mut rng, 3).matrix().clone();
        let phi = Superoperator::from_kraus(&[e0.clone(), e1.clone()]);
        assert!((phi.apply(&x) - apply_kraus(&[e0, e1], &x)).norm() < 1e-12);

        let h = random_density(&mut rng, 3).matrix().clone();
        let a = random_density(&mut rng, 3).matrix().clone() * Complex64::new(0.0, 2.0);
        let l = Superoperator::from_lindblad(&h, &[a.clone()]);
        assert!((l.apply(&x) - apply_lindblad(&h, &[a], &x)).norm() < 1e-12);
    }

    #[test]
    fn lindblad_is_trace_preserving_by_construction() {
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        let h = {
            let g = random_density(&mut rng, 4).matrix().clone();
            (&g + g.adjoint()) * Complex64::new(0.5, 0.0)
        };
        let a = random_density(&mut rng, 4).matrix().clone() * Complex64::new(1.0, 0.3);
        let x = random_density(&mut rng, 4).matrix().clone();
        assert!(apply_lindblad(&h, &[a], &x).trace().norm() < 1e-12);
    }

    #[test]
    fn fixed_basis_of_dephasing_channel() {
        // Kraus {√½·I, √½·σ_z} fixes exactly the diagonal operators.
        let s = Complex64::new(0.5f64.sqrt(), 0.0);
        let spec =
            ChannelSpec::kraus(2, vec![identity(2) * s, sz() * s], "dephasing");
        let basis = full_space_fixed_basis(&spec, &tol()).unwrap();
        assert_eq!(basis.len(), 2);
        for b in &basis {
            assert!(b[(0, 1)].norm() < 1e-12 && b[(1, 0)].norm() < 1e-12);
            assert!(steady_residual(&spec, b).unwrap() < 1e-12);
        }
    }

    #[test]
    fn fixed_basis_of_depolarizing_lindbladian() {
        // Jump operators σ_x, σ_y, σ_z leave only multiples of I fixed.
        let sx = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
        let sy = CMatrix::from_row_slice(
            2,
            2,
            &[ZERO, -Complex64::i(), Complex64::i(), ZERO],
        );
        let spec = ChannelSpec::lindblad(2, CMatrix::zeros(2, 2), vec![sx, sy, sz()], "depolarizing");
        let basis = full_space_fixed_basis(&spec, &tol()).unwrap();
        assert_eq!(basis.len(), 1);
        let b = &basis[0];
        assert!((b - identity(2) * b[(0, 0)]).norm() < 1e-10);
    }

    #[test]
    fn cesaro_mean_agrees_with_fixed_space() {
        let s = Complex64::new(0.5f64.sqrt(), 0.0);
        let spec =
            ChannelSpec::kraus(2, vec![identity(2) * s, sz() * s], "dephasing");
        let rho = DensityMatrix::maximally_mixed(2);
        let support = model::support_of(&rho, 1e-10, &tol()).unwrap();
        let proj = cesaro_fixed_projection(&spec, &support, 400).unwrap();
        // The Cesàro mean acts as the identity on fixed operators and
        // kills the off-diagonal decaying directions.
        let fixed = CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ZERO * ONE]);
        assert!((proj.apply(&fixed) - &fixed).norm() < 1e-10);
        let coherent = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]);
        // Dephasing maps the coherence to zero exactly after averaging:
        // Φ(|0⟩⟨1|) = 0.
        assert!(proj.apply(&coherent).norm() < 1e-10);
    }

    #[test]
    fn cesaro_projection_is_idempotent_for_random_model() {
        let model = random_model(
            &RandomModelRequest {
                blocks: vec![(2, 2), (1, 3)],
                embed_dim: None,
                num_kraus: 3,
                seed: 42,
            },
            &tol(),
        )
        .unwrap();
        let support = model::support_of(&model.steady_state, 1e-10, &tol()).unwrap();
        // Converges at rate 1/N towards an idempotent of rank Σn² = 5.
        let coarse = cesaro_fixed_projection(&model.channel, &support, 2000).unwrap();
        let proj = cesaro_fixed_projection(&model.channel, &support, 8000).unwrap();
        assert!((proj.matrix.clone() * &proj.matrix - &proj.matrix).norm() < 1e-2);
        assert!((proj.matrix.trace().re - 5.0).abs() < 1e-2);
        let coarse_err = (coarse.matrix.trace().re - 5.0).abs();
        let fine_err = (proj.matrix.trace().re - 5.0).abs();
        let ratio = coarse_err / fine_err.max(1e-12);
        assert!((2.0..8.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn unitary_exp_is_unitary() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let g = random_density(&mut rng, 4).matrix().clone();
        let k = (&g + g.adjoint()) * Complex64::new(3.0, 0.0);
        let u = unitary_exp(&k, &tol()).unwrap();
        assert!((u.adjoint() * &u - identity(4)).norm() < 1e-10);
        // exp(i·0) = I.
        let id = unitary_exp(&CMatrix::zeros(4, 4), &tol()).unwrap();
        assert!((id - identity(4)).norm() < 1e-12);
    }

    #[test]
    fn cptp_checks_flag_non_unital_channel() {
        let p: f64 = 0.3;
        let e0 = CMatrix::from_row_slice(
            2,
            2,
            &[ONE, ZERO, ZERO, Complex64::new((1.0 - p).sqrt(), 0.0)],
        );
        let e1 = CMatrix::from_row_slice(
            2,
            2,
            &[ZERO, Complex64::new(p.sqrt(), 0.0), ZERO, ZERO],
        );
        let spec = ChannelSpec::kraus(2, vec![e0, e1], "decay");
        let report = check_cptp_unital(&spec, &tol()).unwrap();
        let tp = report.entries.iter().find(|e| e.name == "trace_preserving").unwrap();
        let un = report.entries.iter().find(|e| e.name == "unital").unwrap();
        assert!(tp.pass);
        assert!(!un.pass);
        assert!((un.residual - p * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn random_model_has_planted_fixed_space_dimension() {
        for (seed, blocks, embed) in [
            (1u64, vec![(1usize, 1usize)], None),
            (2, vec![(2, 2)], None),
            (3, vec![(2, 2), (1, 3)], Some(9)),
            (4, vec![(3, 1), (2, 3)], Some(12)),
        ] {
            let model = random_model(
                &RandomModelRequest {
                    blocks: blocks.clone(),
                    embed_dim: embed,
                    num_kraus: 3,
                    seed,
                },
                &tol(),
            )
            .unwrap();
            assert!(
                steady_residual(&model.channel, model.steady_state.matrix()).unwrap() < 1e-10
            );
            let support =
                model::support_of(&model.steady_state, 1e-10, &tol()).unwrap();
            assert_eq!(support.rank, blocks.iter().map(|&(n, d)| n * d).sum::<usize>());
            let expected: usize = blocks.iter().map(|&(n, _)| n * n).sum();
            assert_eq!(
                fixed_space_dimension(&model.channel, &support, &tol()).unwrap(),
                expected
            );
            if embed.is_some() {
                let report = check_cptp_unital(&model.channel, &tol()).unwrap();
                assert!(report.entries.iter().find(|e| e.name == "trace_preserving").unwrap().pass);
                assert!(!report.entries.iter().find(|e| e.name == "unital").unwrap().pass);
            }
        }
    }

    #[test]
    fn covariance_of_dephasing_under_diagonal_rotation() {
        let s = Complex64::new(0.5f64.sqrt(), 0.0);
        let spec =
            ChannelSpec::kraus(2, vec![identity(2) * s, sz() * s], "dephasing");
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let x = random_density(&mut rng, 2).matrix().clone();
        // σ_z generates a commutant rotation: covariance holds.
        let u = unitary_exp(&(sz() * Complex64::new(0.7, 0.0)).clone(), &tol()).unwrap();
        assert!(check_covariance(&spec, &u, &x, &tol()).unwrap().pass);
        // σ_x does not commute with the noise algebra: covariance fails.
        let sx = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
        let v = unitary_exp(&(sx * Complex64::new(0.7, 0.0)).clone(), &tol()).unwrap();
        assert!(!check_covariance(&spec, &v, &x, &tol()).unwrap().pass);
    }
}
