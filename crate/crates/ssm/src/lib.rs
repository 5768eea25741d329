//! Steady-state manifolds of quantum channels and Lindblad generators.
//!
//! Given the dynamics (a Kraus family, a Lindblad generator, or a
//! time-sampled family of Kraus maps) and one known steady state ρ₀, this
//! crate computes every steady state supported on the support of ρ₀. The
//! manifold is ρ₀^{1/2}·A'·ρ₀^{1/2}, where A' is the commutant of the
//! algebra generated by the ρ₀-modified noise operators; its block
//! decomposition ⊕_α Mat_{n_α}⊗ρ_{α,2} is recovered explicitly, together
//! with an orthonormal basis adapted to the blocks.
//!
//! Start with [`cli::AnalysisRequest`] and [`cli::run_analysis`], or the
//! runnable programs in `examples/`.

pub mod algebra;
pub mod cli;
pub mod config;
pub mod error;
pub mod model;
pub mod num;
pub mod structure;
pub mod verify;

pub use cli::{
    builtin_example, run_analysis, AnalysisOutcome, AnalysisReport, AnalysisRequest,
    ReportFormat,
};
pub use config::Tolerances;
pub use error::{Result, SsmError};
pub use model::{ChannelSpec, DensityMatrix};
pub use structure::{analyze_steady_structure, SsmStructure};
pub use verify::{random_model, RandomModel, RandomModelRequest, VerificationReport};
