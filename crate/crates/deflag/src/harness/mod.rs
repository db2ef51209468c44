//! Case configuration, driver, error norms, convergence studies and CSV
//! output.

pub mod config;
pub mod output;
pub mod run;
pub mod study;

pub use config::CaseConfig;
pub use run::{run_case, Diagnostics, RunOutput, Solver};
pub use study::{convergence_study, l1_error, ConvergenceReport};
