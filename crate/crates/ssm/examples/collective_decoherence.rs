//! Three qubits under collective dephasing and decay: the jump operators
//! are the total-spin components S_x, S_y, S_z, so any state supported on
//! a fixed total-spin multiplet is protected.
//!
//! The analysis finds the block structure of the steady-state manifold:
//! the spin-1/2 sector appears twice (a protected qubit in the
//! multiplicity label), and the spin-3/2 sector contributes a single
//! fixed state.

use ssm::verify::steady_residual;
use ssm::{builtin_example, run_analysis, ReportFormat};

fn main() -> ssm::Result<()> {
    let request = builtin_example(1, &[])?;
    let outcome = run_analysis(&request)?;
    let report = &outcome.report;

    println!("model: {} ({} dim {})", report.label, report.kind, report.dim);
    println!("support rank:        {}", report.support_rank);
    println!("noise algebra dim:   {}", report.algebra_dimension);
    println!("commutant dim:       {}", report.commutant_dimension);
    println!("manifold dimension:  {}", report.ssm_dimension);
    for (k, b) in report.blocks.iter().enumerate() {
        println!(
            "block {k}: multiplicity n = {}, irrep dim d = {}, weight {:.4}",
            b.multiplicity, b.irrep_dim, b.weight
        );
    }

    // Every element of the manifold is steady. Exercise that on the
    // basis of the manifold as an operator space.
    let basis = ssm::structure::ssm_operator_basis(&outcome.analysis.structure);
    let worst = basis
        .iter()
        .map(|op| steady_residual(&request.channel, op).unwrap())
        .fold(0.0f64, f64::max);
    println!("worst steadiness residual over the manifold basis: {worst:.2e}");

    println!("\nfull report:\n{}", ssm::cli::emit_report(report, ReportFormat::Text));
    Ok(())
}
