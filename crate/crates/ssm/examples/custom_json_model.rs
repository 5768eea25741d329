//! Describe a model in JSON, parse it, and analyze it. The same schema is
//! what `ssm analyze <file>` reads; here the document is built inline — a
//! single qubit dephasing in the σ_z basis, written as a Lindblad model.

use ssm::cli::{emit_report, parse_model_str};
use ssm::{run_analysis, ReportFormat};

fn main() -> ssm::Result<()> {
    // Matrices are row-major arrays of rows, entries are [re, im] pairs.
    let text = r#"{
        "dim": 2,
        "kind": "lindblad",
        "label": "single-qubit dephasing",
        "hamiltonian": [
            [[0.5, 0.0], [0.0, 0.0]],
            [[0.0, 0.0], [-0.5, 0.0]]
        ],
        "lindblad": [
            [
                [[0.7, 0.0], [0.0, 0.0]],
                [[0.0, 0.0], [-0.7, 0.0]]
            ]
        ],
        "steady_state": [
            [[0.5, 0.0], [0.0, 0.0]],
            [[0.0, 0.0], [0.5, 0.0]]
        ],
        "seed": 1
    }"#;

    let request = parse_model_str(text)?;
    let outcome = run_analysis(&request)?;

    // Dephasing kills coherences and preserves populations: the manifold
    // is the diagonal algebra, two 1x1 blocks.
    println!("{}", emit_report(&outcome.report, ReportFormat::Text));
    assert_eq!(outcome.report.ssm_dimension, 2);
    assert_eq!(outcome.report.blocks.len(), 2);

    // The JSON report is the machine-readable form the CLI emits.
    println!("{}", emit_report(&outcome.report, ReportFormat::Json));
    Ok(())
}
