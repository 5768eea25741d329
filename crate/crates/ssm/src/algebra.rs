//! Linear bases of the modified noise algebra and its commutant, random
//! Hermitian elements, and the twirl as a Hilbert–Schmidt projection.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::config::Tolerances;
use crate::error::{Result, SsmError};
use crate::model::GeneratorSet;
use crate::num::{self, identity, kron, unvec, CMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgebraKind {
    NoiseAlgebra,
    Commutant,
}

/// A Hilbert–Schmidt-orthonormal linear basis of a matrix *-algebra.
#[derive(Debug, Clone)]
pub struct OperatorAlgebraBasis {
    pub dim: usize,
    pub kind: AlgebraKind,
    pub basis: Vec<CMatrix>,
}

impl OperatorAlgebraBasis {
    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// Residual of re-expanding X in the span of the basis.
    pub fn expansion_residual(&self, x: &CMatrix) -> f64 {
        let mut projected = CMatrix::zeros(self.dim, self.dim);
        for b in &self.basis {
            projected += b * num::hs_inner(b, x);
        }
        (projected - x).norm() / x.norm().max(1.0)
    }

    /// Hilbert–Schmidt projection of X onto the span.
    pub fn project(&self, x: &CMatrix) -> CMatrix {
        let mut projected = CMatrix::zeros(self.dim, self.dim);
        for b in &self.basis {
            projected += b * num::hs_inner(b, x);
        }
        projected
    }
}

/// Joint nullspace of the commutation constraints I⊗A − Aᵀ⊗I over all
/// generators and their daggers. For small stacks this is a direct SVD;
/// large stacks (the double-commutant pass) go through the Gram matrix
/// Σ Mᵢ†Mᵢ, whose zero eigenspace is the same nullspace.
fn commutation_nullspace(constraints: &[CMatrix], rel_tol: f64, tol: &Tolerances) -> Result<CMatrix> {
    let n = constraints[0].ncols();
    let rows: usize = constraints.iter().map(|m| m.nrows()).sum();
    if rows <= 8 * n {
        let mut stacked = CMatrix::zeros(rows, n);
        let mut row = 0;
        for m in constraints {
            stacked.view_mut((row, 0), (m.nrows(), n)).copy_from(m);
            row += m.nrows();
        }
        Ok(num::svd_nullspace(&stacked, rel_tol).vectors)
    } else {
        let mut gram = CMatrix::zeros(n, n);
        for m in constraints {
            gram += m.adjoint() * m;
        }
        let eig = num::hermitian_eig(&gram, tol)?;
        // Zero eigenvalues of the Gram matrix carry noise of order
        // eps·λ_max, so the cut lives on the eigenvalue scale rather than
        // the squared singular-value scale.
        let lambda_max = eig.eigenvalues.max().max(0.0);
        let cut = rel_tol * lambda_max.max(1.0);
        let keep: Vec<usize> = (0..eig.eigenvalues.len())
            .filter(|&i| eig.eigenvalues[i] <= cut)
            .collect();
        let mut vectors = CMatrix::zeros(n, keep.len());
        for (k, &i) in keep.iter().enumerate() {
            vectors.set_column(k, &eig.eigenvectors.column(i));
        }
        Ok(vectors)
    }
}

fn commutant_of(generators: &[CMatrix], dim: usize, tol: &Tolerances) -> Result<Vec<CMatrix>> {
    let eye = identity(dim);
    let mut constraints = Vec::with_capacity(2 * generators.len());
    for g in generators {
        constraints.push(kron(&eye, g) - kron(&g.transpose(), &eye));
        let gd = g.adjoint();
        constraints.push(kron(&eye, &gd) - kron(&gd.transpose(), &eye));
    }
    let vectors = commutation_nullspace(&constraints, tol.nullspace, tol)?;
    // vec is an isometry for the HS inner product, so orthonormal nullspace
    // vectors unvec to an HS-orthonormal matrix basis.
    let mut basis = Vec::with_capacity(vectors.ncols());
    for j in 0..vectors.ncols() {
        let col: DVector<Complex64> = vectors.column(j).into();
        basis.push(unvec(&col, dim, dim)?);
    }
    Ok(basis)
}

/// Basis of {B : [A, B] = [A†, B] = 0 for every generator A}.
pub fn commutant_basis(gens: &GeneratorSet, tol: &Tolerances) -> Result<OperatorAlgebraBasis> {
    if gens.generators.is_empty() {
        return Err(SsmError::Numerical("empty generator set".into()));
    }
    Ok(OperatorAlgebraBasis {
        dim: gens.dim,
        kind: AlgebraKind::Commutant,
        basis: commutant_of(&gens.generators, gens.dim, tol)?,
    })
}

/// Basis of the unital *-algebra generated by the set, computed as the
/// double commutant. The identity is appended to the generators first so
/// the double commutant is exactly the unital closure.
pub fn algebra_basis(gens: &GeneratorSet, tol: &Tolerances) -> Result<OperatorAlgebraBasis> {
    if gens.generators.is_empty() {
        return Err(SsmError::Numerical("empty generator set".into()));
    }
    let mut with_identity = gens.generators.clone();
    with_identity.push(identity(gens.dim));
    let commutant = commutant_of(&with_identity, gens.dim, tol)?;
    Ok(OperatorAlgebraBasis {
        dim: gens.dim,
        kind: AlgebraKind::NoiseAlgebra,
        basis: commutant_of(&commutant, gens.dim, tol)?,
    })
}

/// Seeded random Hermitian element of the span. The span is closed under
/// dagger, so the Hermitian and anti-Hermitian parts of each basis element
/// stay inside it.
pub fn random_hermitian_element(basis: &OperatorAlgebraBasis, seed: u64) -> CMatrix {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut h = CMatrix::zeros(basis.dim, basis.dim);
    for b in &basis.basis {
        let c: f64 = StandardNormal.sample(&mut rng);
        let c_prime: f64 = StandardNormal.sample(&mut rng);
        let herm = (b + b.adjoint()) * Complex64::new(0.5, 0.0);
        let skew = (b - b.adjoint()) * Complex64::new(0.0, 0.5);
        h += herm * Complex64::new(c, 0.0) + skew * Complex64::new(c_prime, 0.0);
    }
    h
}

/// Twirl of ρ̃₀ over the unitaries of the commutant, computed exactly as
/// the Hilbert–Schmidt projection onto the algebra span.
pub fn twirl(
    rho0_restricted: &CMatrix,
    algebra: &OperatorAlgebraBasis,
    tol: &Tolerances,
) -> Result<CMatrix> {
    debug_assert_eq!(algebra.kind, AlgebraKind::NoiseAlgebra);
    let projected = algebra.project(rho0_restricted);
    let twirled = (&projected + projected.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = num::hermitian_eig(&twirled, tol)?;
    let min = eig.eigenvalues.min();
    if min < -tol.psd * twirled.norm().max(1.0) {
        return Err(SsmError::NotPositive {
            min_eigenvalue: min,
        });
    }
    Ok(twirled)
}
