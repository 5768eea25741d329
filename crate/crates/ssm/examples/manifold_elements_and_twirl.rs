//! Working with the manifold itself: build steady states from block
//! factors, twirl an arbitrary state onto the commutant, and conjugate
//! the dynamics by a symmetry unitary.

use nalgebra::DVector;
use num_complex::Complex64;
use ssm::algebra::{random_hermitian_element, twirl};
use ssm::num::{self, CMatrix};
use ssm::structure::ssm_element;
use ssm::verify::{check_covariance, steady_residual, unitary_exp};
use ssm::{builtin_example, run_analysis, Tolerances};

fn main() -> ssm::Result<()> {
    let tol = Tolerances::default();
    let request = builtin_example(1, &[])?;
    let outcome = run_analysis(&request)?;
    let analysis = &outcome.analysis;
    let structure = &analysis.structure;

    // 1. Any positive factor per block gives a steady state: ⊕ X_α⊗ρ_α.
    let factors: Vec<CMatrix> = structure
        .blocks
        .iter()
        .enumerate()
        .map(|(k, b)| {
            // A deliberately lopsided diagonal factor for block k.
            CMatrix::from_diagonal(&DVector::from_iterator(
                b.n,
                (0..b.n).map(|i| Complex64::new((k + 1) as f64 + i as f64, 0.0)),
            ))
        })
        .collect();
    let mut element = ssm_element(structure, &factors)?;
    element /= element.trace();
    let residual = steady_residual(&request.channel, &element)?;
    println!("custom manifold element: steadiness residual {residual:.2e}");

    // 2. Twirling projects onto the manifold: the twirl of ρ̃₀ over the
    // commutant unitaries is again steady and commutes with every element
    // of the commutant.
    let twirled = twirl(&analysis.support.rho0_restricted, &analysis.algebra, &tol)?;
    let embedded = analysis.support.embed(&twirled);
    println!(
        "twirl of the steady state: steadiness residual {:.2e}",
        steady_residual(&request.channel, &embedded)?
    );
    let worst_commutation = analysis
        .commutant
        .basis
        .iter()
        .map(|b| num::commutator(&twirled, b).norm())
        .fold(0.0f64, f64::max);
    println!("worst commutation with the commutant: {worst_commutation:.2e}");

    // 3. Symmetries of the dynamics: exponentiating a Hermitian element
    // of the commutant gives a unitary that commutes with the channel.
    let h = random_hermitian_element(&analysis.commutant, 3);
    let u = analysis.support.embed(&unitary_exp(&h, &tol)?);
    // Complete U by the identity on the complement of the support.
    let u = u + num::identity(analysis.support.full_dim) - &analysis.support.projector;
    let entry = check_covariance(&request.channel, &u, outcome.steady_state.matrix(), &tol)?;
    println!(
        "covariance U Φ(ρ) U† = Φ(U ρ U†): residual {:.2e} -> {}",
        entry.residual,
        if entry.pass { "pass" } else { "FAIL" }
    );
    Ok(())
}
