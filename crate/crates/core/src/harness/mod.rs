//! Operator catalog, verification suites and the experiment runner.

pub mod catalog;
pub mod config;
pub mod report;
pub mod suites;

pub use catalog::{catalog, resolve_operators, Construction, TestOperator, DEFAULT_SEED};
pub use config::ExperimentConfig;
pub use report::{Case, Constant, ExperimentReport, VerificationReport};
pub use suites::{
    exit_code, k_emp, run_experiment, run_suites, verify_area_equivalence, verify_hinfty_characterization,
    verify_truncation_comparison, verify_square_equivalence, SuiteContext, Workbench,
};
