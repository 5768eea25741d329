//! Dense complex-matrix primitives: vectorization, Kronecker products,
//! Hermitian eigendecomposition, SVD nullspaces, and PSD square roots.
//!
//! Conventions fixed project-wide:
//! - vec is column-stacking, vec(X)[i + rows·j] = X[i,j], so that
//!   vec(A·X·B) = (Bᵀ ⊗ A) vec(X);
//! - eigenvalues are returned in nondecreasing order;
//! - the Hilbert–Schmidt inner product is ⟨X, Y⟩ = Tr(X†Y), which equals
//!   the plain inner product of vec(X) and vec(Y).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::config::Tolerances;
use crate::error::{Result, SsmError};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Hilbert–Schmidt inner product Tr(X†Y).
pub fn hs_inner(x: &CMatrix, y: &CMatrix) -> Complex64 {
    x.iter().zip(y.iter()).map(|(a, b)| a.conj() * b).sum()
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// Column-stacking vectorization.
pub fn vec_of(x: &CMatrix) -> CVector {
    CVector::from_column_slice(x.as_slice())
}

/// Inverse of [`vec_of`].
pub fn unvec(v: &CVector, rows: usize, cols: usize) -> Result<CMatrix> {
    if v.len() != rows * cols {
        return Err(SsmError::Dimension(format!(
            "unvec: vector length {} does not equal {}x{}",
            v.len(),
            rows,
            cols
        )));
    }
    Ok(CMatrix::from_column_slice(rows, cols, v.as_slice()))
}

/// Kronecker product with the index convention matching [`vec_of`].
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

#[derive(Debug, Clone)]
pub struct HermitianEigensystem {
    /// Nondecreasing.
    pub eigenvalues: DVector<f64>,
    /// Columns are the eigenvectors, unitary as a matrix.
    pub eigenvectors: CMatrix,
}

/// Eigendecomposition of a Hermitian matrix. The input is symmetrized as
/// (A + A†)/2 after the Hermiticity residual is checked.
pub fn hermitian_eig(a: &CMatrix, tol: &Tolerances) -> Result<HermitianEigensystem> {
    if a.nrows() != a.ncols() {
        return Err(SsmError::Dimension(format!(
            "hermitian_eig: matrix is {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let scale = a.norm().max(1.0);
    let residual = (a - a.adjoint()).norm();
    if residual > tol.herm * scale {
        return Err(SsmError::NotHermitian {
            residual,
            tolerance: tol.herm * scale,
        });
    }
    let sym = (a + a.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = nalgebra::SymmetricEigen::new(sym.clone());
    let n = eig.eigenvalues.len();

    // nalgebra's QL iteration can silently return a wrong factorisation for
    // some complex Hermitian inputs with (near-)degenerate spectra, so the
    // result is verified by reconstruction and replaced by a Jacobi sweep
    // when it fails.
    let recon = {
        let d = CMatrix::from_diagonal(&CVector::from_iterator(
            n,
            eig.eigenvalues.iter().map(|&x| Complex64::new(x, 0.0)),
        ));
        &eig.eigenvectors * d * eig.eigenvectors.adjoint()
    };
    let (raw_values, raw_vectors) = if (recon - &sym).norm() <= 1e-12 * scale {
        (eig.eigenvalues, eig.eigenvectors)
    } else {
        jacobi_hermitian(&sym)
    };

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| raw_values[i].total_cmp(&raw_values[j]));

    let eigenvalues = DVector::from_iterator(n, order.iter().map(|&i| raw_values[i]));
    let mut eigenvectors = CMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        eigenvectors.set_column(k, &raw_vectors.column(i));
    }
    Ok(HermitianEigensystem {
        eigenvalues,
        eigenvectors,
    })
}

/// Cyclic Jacobi eigensolver for a Hermitian matrix. Slower than the QL
/// path but backward stable, used as a fallback when QL misconverges.
fn jacobi_hermitian(a: &CMatrix) -> (DVector<f64>, CMatrix) {
    let n = a.nrows();
    let mut a = a.clone();
    let mut v = identity(n);
    let scale = a.norm().max(f64::MIN_POSITIVE);
    for _sweep in 0..60 {
        let off: f64 = (0..n)
            .flat_map(|p| (0..n).filter(move |&q| q != p).map(move |q| (p, q)))
            .map(|(p, q)| a[(p, q)].norm_sqr())
            .sum();
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r <= 1e-18 * scale {
                    continue;
                }
                let phase = apq / r;
                let tau = (a[(q, q)].re - a[(p, p)].re) / (2.0 * r);
                // Smaller-magnitude root of t² − 2τt − 1 = 0 in its
                // cancellation-free form.
                let t = if tau >= 0.0 {
                    -1.0 / (tau + (tau * tau + 1.0).sqrt())
                } else {
                    1.0 / (-tau + (tau * tau + 1.0).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let sp = phase * s;
                // A ← U†AU with U acting in the (p,q) plane: columns first.
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c + akq * sp.conj();
                    a[(k, q)] = -akp * sp + akq * c;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c + aqk * sp;
                    a[(q, k)] = -apk * sp.conj() + aqk * c;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c + vkq * sp.conj();
                    v[(k, q)] = -vkp * sp + vkq * c;
                }
            }
        }
    }
    let values = DVector::from_iterator(n, (0..n).map(|i| a[(i, i)].re));
    (values, v)
}

#[derive(Debug, Clone)]
pub struct NullspaceBasis {
    /// Orthonormal columns spanning the numerical nullspace.
    pub vectors: CMatrix,
    pub rank_threshold_used: f64,
}

/// Right-nullspace basis of M: right-singular vectors whose singular values
/// are at most rel_tol·max(σ_max, 1). The floor keeps a numerically
/// vanishing matrix from being treated as full rank; in particular a zero
/// matrix yields the whole space.
pub fn svd_nullspace(m: &CMatrix, rel_tol: f64) -> NullspaceBasis {
    let cols = m.ncols();
    // A wide matrix is padded with zero rows so the SVD exposes the full
    // right-singular basis.
    let work = if m.nrows() < cols {
        let mut padded = CMatrix::zeros(cols, cols);
        padded.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
        padded
    } else {
        m.clone()
    };
    let svd = work.svd(false, true);
    let v_t = svd.v_t.expect("svd requested v_t");
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let threshold = rel_tol * sigma_max.max(1.0);

    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] <= threshold)
        .collect();
    let mut vectors = CMatrix::zeros(cols, keep.len());
    for (k, &i) in keep.iter().enumerate() {
        vectors.set_column(k, &v_t.row(i).adjoint().column(0));
    }
    NullspaceBasis {
        vectors,
        rank_threshold_used: threshold,
    }
}

fn psd_eig(a: &CMatrix, tol: &Tolerances) -> Result<HermitianEigensystem> {
    let eig = hermitian_eig(a, tol)?;
    let scale = a.norm().max(1.0);
    let min = eig.eigenvalues.min();
    if min < -tol.psd * scale {
        return Err(SsmError::NotPositive {
            min_eigenvalue: min,
        });
    }
    Ok(eig)
}

/// Hermitian PSD square root. Eigenvalues negative within tolerance are
/// clamped to zero.
pub fn psd_sqrt(a: &CMatrix, tol: &Tolerances) -> Result<CMatrix> {
    let eig = psd_eig(a, tol)?;
    Ok(rebuild(&eig, |x| x.max(0.0).sqrt()))
}

/// Hermitian PSD pseudo-inverse square root: eigenvalues above
/// rank_tol·λ_max are inverted under the square root, the rest are dropped.
pub fn psd_pinv_sqrt(a: &CMatrix, rank_tol: f64, tol: &Tolerances) -> Result<CMatrix> {
    let eig = psd_eig(a, tol)?;
    let lambda_max = eig.eigenvalues.max().max(0.0);
    let cut = rank_tol * lambda_max;
    Ok(rebuild(&eig, |x| {
        if x > cut {
            1.0 / x.sqrt()
        } else {
            0.0
        }
    }))
}

fn rebuild(eig: &HermitianEigensystem, f: impl Fn(f64) -> f64) -> CMatrix {
    let v = &eig.eigenvectors;
    let d = CMatrix::from_diagonal(&CVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|&x| Complex64::new(f(x), 0.0)),
    ));
    v * d * v.adjoint()
}

/// Modified Gram–Schmidt on the columns, dropping columns whose residual
/// norm falls below drop_tol relative to the largest input column norm.
pub fn orthonormalize_columns(m: &CMatrix, drop_tol: f64) -> CMatrix {
    let mut kept: Vec<CVector> = Vec::new();
    let scale = (0..m.ncols())
        .map(|j| m.column(j).norm())
        .fold(0.0f64, f64::max)
        .max(1.0);
    for j in 0..m.ncols() {
        let mut v: CVector = m.column(j).into();
        for _ in 0..2 {
            for q in &kept {
                let c = q.dotc(&v);
                v -= q * c;
            }
        }
        let norm = v.norm();
        if norm > drop_tol * scale {
            kept.push(v / Complex64::new(norm, 0.0));
        }
    }
    let mut out = CMatrix::zeros(m.nrows(), kept.len());
    for (k, v) in kept.iter().enumerate() {
        out.set_column(k, v);
    }
    out
}

/// Orthonormal basis of the span of a set of operators, as columns of
/// vectorized matrices.
pub fn operator_span(ops: &[CMatrix], drop_tol: f64) -> CMatrix {
    if ops.is_empty() {
        return CMatrix::zeros(0, 0);
    }
    let n = ops[0].nrows() * ops[0].ncols();
    let mut cols = CMatrix::zeros(n, ops.len());
    for (k, op) in ops.iter().enumerate() {
        cols.set_column(k, &vec_of(op));
    }
    orthonormalize_columns(&cols, drop_tol)
}

/// Sine of the largest principal angle between the column spans of two
/// matrices with orthonormal columns. Returns 1 for mismatched ranks.
pub fn subspace_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    if a.ncols() != b.ncols() {
        return 1.0;
    }
    if a.ncols() == 0 {
        return 0.0;
    }
    // sin of the largest angle as ‖(I − BB†)A‖₂; unlike √(1−σ_min²) this
    // stays accurate for nearly coincident subspaces.
    let residual = a - b * (b.adjoint() * a);
    let svd = residual.svd(false, false);
    svd.singular_values
        .iter()
        .cloned()
        .fold(0.0f64, f64::max)
        .min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    pub(crate) fn random_cmatrix(rng: &mut impl Rng, rows: usize, cols: usize) -> CMatrix {
        CMatrix::from_fn(rows, cols, |_, _| {
            c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        })
    }

    fn random_hermitian(rng: &mut impl Rng, n: usize) -> CMatrix {
        let g = random_cmatrix(rng, n, n);
        (&g + g.adjoint()) * c(0.5, 0.0)
    }

    fn random_psd(rng: &mut impl Rng, n: usize) -> CMatrix {
        let g = random_cmatrix(rng, n, n);
        &g * g.adjoint()
    }

    #[test]
    fn vec_follows_column_stacking() {
        let x = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(3.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)]);
        // [[a, c], [b, d]] -> [a, b, c, d]
        let v = vec_of(&x);
        assert_eq!(v[0], c(1.0, 0.0));
        assert_eq!(v[1], c(2.0, 0.0));
        assert_eq!(v[2], c(3.0, 0.0));
        assert_eq!(v[3], c(4.0, 0.0));
    }

    #[test]
    fn vec_of_identity() {
        let v = vec_of(&identity(2));
        assert_eq!(v.as_slice(), &[ONE, ZERO, ZERO, ONE]);
    }

    #[test]
    fn unvec_restores_identity() {
        let v = CVector::from_vec(vec![ONE, ZERO, ZERO, ONE]);
        assert_eq!(unvec(&v, 2, 2).unwrap(), identity(2));
        assert!(unvec(&v, 3, 2).is_err());
    }

    #[test]
    fn vec_kron_identity_on_random_matrices() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let a = random_cmatrix(&mut rng, 3, 3);
        let x = random_cmatrix(&mut rng, 3, 3);
        let b = random_cmatrix(&mut rng, 3, 3);
        let lhs = vec_of(&(&a * &x * &b));
        let rhs = kron(&b.transpose(), &a) * vec_of(&x);
        assert!((lhs - rhs).norm() < 1e-12 * (a.norm() * x.norm() * b.norm()).max(1.0));
    }

    #[test]
    fn hermitian_eig_sorts_and_reconstructs() {
        let tol = Tolerances::default();
        let d = CMatrix::from_diagonal(&CVector::from_vec(vec![c(3.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]));
        let eig = hermitian_eig(&d, &tol).unwrap();
        assert_eq!(eig.eigenvalues.as_slice(), &[1.0, 2.0, 3.0]);

        let sx = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
        let eig = hermitian_eig(&sx, &tol).unwrap();
        assert!((eig.eigenvalues[0] + 1.0).abs() < 1e-12);
        assert!((eig.eigenvalues[1] - 1.0).abs() < 1e-12);

        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let h = random_hermitian(&mut rng, 16);
        let eig = hermitian_eig(&h, &tol).unwrap();
        let rebuilt = rebuild(&eig, |x| x);
        assert!((&rebuilt - &h).norm() <= 1e-10 * h.norm());
        let v = &eig.eigenvectors;
        assert!((v.adjoint() * v - identity(16)).norm() < 1e-10);
    }

    #[test]
    fn jacobi_fallback_handles_degenerate_spectra() {
        let tol = Tolerances::default();
        // Degenerate eigenvalue pairs with machine-eps off-diagonal noise:
        // the shape that makes the QL path misconverge.
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        for _ in 0..20 {
            let vals = [0.029, 0.029, 0.471, 0.471];
            let mut h = CMatrix::from_fn(4, 4, |i, j| {
                if i == j {
                    c(vals[i], 0.0)
                } else {
                    ZERO
                }
            });
            for i in 0..4 {
                for j in (i + 1)..4 {
                    let z = c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5) * 1e-16;
                    h[(i, j)] = z;
                    h[(j, i)] = z.conj();
                }
            }
            let eig = hermitian_eig(&h, &tol).unwrap();
            let rebuilt = rebuild(&eig, |x| x);
            assert!((&rebuilt - &h).norm() < 1e-13);
            let v = &eig.eigenvectors;
            assert!((v.adjoint() * v - identity(4)).norm() < 1e-13);
        }
        // The Jacobi kernel itself on a generic dense Hermitian matrix.
        let h = random_hermitian(&mut rng, 12);
        let (values, vectors) = jacobi_hermitian(&h);
        let d = CMatrix::from_diagonal(&CVector::from_iterator(
            12,
            values.iter().map(|&x| c(x, 0.0)),
        ));
        assert!((&vectors * d * vectors.adjoint() - &h).norm() < 1e-12 * h.norm());
        assert!((vectors.adjoint() * &vectors - identity(12)).norm() < 1e-12);
    }

    #[test]
    fn hermitian_eig_rejects_non_hermitian() {
        let tol = Tolerances::default();
        let m = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]);
        assert!(matches!(
            hermitian_eig(&m, &tol),
            Err(SsmError::NotHermitian { .. })
        ));
    }

    #[test]
    fn nullspace_of_zero_and_identity() {
        let z = CMatrix::zeros(2, 2);
        assert_eq!(svd_nullspace(&z, 1e-10).vectors.ncols(), 2);
        // Vanishing 2x2 operator acting on vectorized 2x2 matrices.
        let z4 = CMatrix::zeros(4, 4);
        assert_eq!(svd_nullspace(&z4, 1e-10).vectors.ncols(), 4);
        assert_eq!(svd_nullspace(&identity(4), 1e-10).vectors.ncols(), 0);
    }

    #[test]
    fn nullspace_of_rank_two_product() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let a = random_cmatrix(&mut rng, 4, 2);
        let b = random_cmatrix(&mut rng, 2, 4);
        let m = &a * &b;
        let ns = svd_nullspace(&m, 1e-10);
        assert_eq!(ns.vectors.ncols(), 2);
        for j in 0..2 {
            let v: CVector = ns.vectors.column(j).into();
            assert!((&m * &v).norm() <= ns.rank_threshold_used * 10.0);
        }
    }

    #[test]
    fn nullspace_of_wide_matrix_includes_complement() {
        let m = CMatrix::from_row_slice(1, 3, &[ONE, ZERO, ZERO]);
        let ns = svd_nullspace(&m, 1e-10);
        assert_eq!(ns.vectors.ncols(), 2);
    }

    #[test]
    fn psd_sqrt_of_diagonal() {
        let tol = Tolerances::default();
        let a = CMatrix::from_diagonal(&CVector::from_vec(vec![c(4.0, 0.0), c(9.0, 0.0)]));
        let s = psd_sqrt(&a, &tol).unwrap();
        let expected = CMatrix::from_diagonal(&CVector::from_vec(vec![c(2.0, 0.0), c(3.0, 0.0)]));
        assert!((s - expected).norm() < 1e-12);
        assert!((psd_sqrt(&identity(3), &tol).unwrap() - identity(3)).norm() < 1e-12);
    }

    #[test]
    fn psd_sqrt_squares_back() {
        let tol = Tolerances::default();
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let a = random_psd(&mut rng, 8);
        let s = psd_sqrt(&a, &tol).unwrap();
        assert!((&s * &s - &a).norm() <= 1e-10 * a.norm());
    }

    #[test]
    fn psd_sqrt_rejects_negative() {
        let tol = Tolerances::default();
        let a = CMatrix::from_diagonal(&CVector::from_vec(vec![c(-1.0, 0.0), c(1.0, 0.0)]));
        assert!(matches!(
            psd_sqrt(&a, &tol),
            Err(SsmError::NotPositive { .. })
        ));
    }

    #[test]
    fn pinv_sqrt_diagonal_and_uniform() {
        let tol = Tolerances::default();
        let a = CMatrix::from_diagonal(&CVector::from_vec(vec![c(4.0, 0.0), ZERO]));
        let t = psd_pinv_sqrt(&a, 1e-12, &tol).unwrap();
        let expected = CMatrix::from_diagonal(&CVector::from_vec(vec![c(0.5, 0.0), ZERO]));
        assert!((t - expected).norm() < 1e-12);

        // (1/4)·I_4 -> 2·I_4
        let quarter = identity(4) * c(0.25, 0.0);
        let t = psd_pinv_sqrt(&quarter, 1e-12, &tol).unwrap();
        assert!((t - identity(4) * c(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn pinv_sqrt_yields_eigenprojector() {
        let tol = Tolerances::default();
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let g = random_cmatrix(&mut rng, 5, 3);
        let a = &g * g.adjoint(); // rank 3 PSD, 5x5
        let t = psd_pinv_sqrt(&a, 1e-10, &tol).unwrap();
        let pi = &t * &a * &t;
        // Projector onto the retained rank-3 eigenspace.
        assert!((&pi * &pi - &pi).norm() < 1e-10);
        let rank: f64 = pi.trace().re;
        assert!((rank - 3.0).abs() < 1e-8);
    }

    #[test]
    fn kron_basics() {
        assert_eq!(kron(&identity(2), &identity(2)), identity(4));
        let sz = CMatrix::from_diagonal(&CVector::from_vec(vec![ONE, -ONE]));
        let zz = kron(&sz, &sz);
        let expected =
            CMatrix::from_diagonal(&CVector::from_vec(vec![ONE, -ONE, -ONE, ONE]));
        assert_eq!(zz, expected);
    }

    #[test]
    fn orthonormalize_drops_dependent_columns() {
        let mut m = CMatrix::zeros(3, 3);
        m.set_column(0, &CVector::from_vec(vec![ONE, ZERO, ZERO]));
        m.set_column(1, &CVector::from_vec(vec![c(2.0, 0.0), ZERO, ZERO]));
        m.set_column(2, &CVector::from_vec(vec![ZERO, ONE, ZERO]));
        let q = orthonormalize_columns(&m, 1e-10);
        assert_eq!(q.ncols(), 2);
        assert!((q.adjoint() * &q - identity(2)).norm() < 1e-12);
    }

    #[test]
    fn subspace_distance_detects_equality_and_difference() {
        let mut a = CMatrix::zeros(3, 1);
        a[(0, 0)] = ONE;
        let mut b = CMatrix::zeros(3, 1);
        b[(1, 0)] = ONE;
        assert!(subspace_distance(&a, &a) < 1e-14);
        assert!((subspace_distance(&a, &b) - 1.0).abs() < 1e-14);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn vec_unvec_round_trip(seed in 0u64..1000, rows in 1usize..6, cols in 1usize..6) {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let x = random_cmatrix(&mut rng, rows, cols);
            let back = unvec(&vec_of(&x), rows, cols).unwrap();
            prop_assert_eq!(back, x);
        }

        #[test]
        fn vec_kron_identity_property(seed in 0u64..1000) {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let a = random_cmatrix(&mut rng, 3, 2);
            let x = random_cmatrix(&mut rng, 2, 4);
            let b = random_cmatrix(&mut rng, 4, 3);
            let lhs = vec_of(&(&a * &x * &b));
            let rhs = kron(&b.transpose(), &a) * vec_of(&x);
            let scale = (a.norm() * x.norm() * b.norm()).max(1.0);
            prop_assert!((lhs - rhs).norm() < 1e-12 * scale);
        }

        #[test]
        fn psd_sqrt_square_property(seed in 0u64..1000, n in 1usize..8) {
            let tol = Tolerances::default();
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let a = random_psd(&mut rng, n);
            let s = psd_sqrt(&a, &tol).unwrap();
            prop_assert!((&s * &s - &a).norm() <= 1e-10 * a.norm().max(1.0));
        }
    }
}
