//! A non-unital channel on three qubits: the first qubit drains toward
//! |0⟩ while correlated noise acts on the other two. The steady state is
//! not full rank, so the whole analysis happens on its support — the
//! four-dimensional |0⟩⊗(qubit ⊗ qubit) corner.

use ssm::verify::steady_residual;
use ssm::{builtin_example, run_analysis};

fn main() -> ssm::Result<()> {
    let request = builtin_example(3, &[("p".into(), 0.25)])?;
    let outcome = run_analysis(&request)?;
    let report = &outcome.report;

    println!("model: {} ({} dim {})", report.label, report.kind, report.dim);
    println!(
        "support rank {} out of full dimension {}",
        report.support_rank, report.dim
    );
    for (k, b) in report.blocks.iter().enumerate() {
        println!(
            "block {k}: n = {}, d = {}, weight {:.4}",
            b.multiplicity, b.irrep_dim, b.weight
        );
    }

    // The channel is trace preserving but NOT unital: Φ(I) ≠ I because
    // population flows into the support. The report carries both checks.
    for entry in &report.checks {
        if entry.name.starts_with("trace_preserving") || entry.name.starts_with("unital") {
            println!(
                "check {:24} residual {:.3e} (tolerance {:.1e}) -> {}",
                entry.name,
                entry.residual,
                entry.tolerance,
                if entry.pass { "pass" } else { "FAIL" }
            );
        }
    }

    // Manifold elements embedded back into the full space are still
    // steady for the full (non-unital) dynamics.
    let basis = ssm::structure::ssm_operator_basis(&outcome.analysis.structure);
    let worst = basis
        .iter()
        .map(|op| steady_residual(&request.channel, op).unwrap())
        .fold(0.0f64, f64::max);
    println!("worst steadiness residual over the manifold basis: {worst:.2e}");
    Ok(())
}
