//! Experiment orchestration for correlation-guided cluster Monte Carlo:
//! instance suites, reference optima, correlation precomputation, lambda
//! tuning, benchmark tables, correlation histograms and acceptance logs.

pub mod bench;
pub mod config;
pub mod hist;
pub mod reference;
pub mod sources;

pub use bench::{run_suite, tune_lambda_scale, write_outputs, ResultRow, SuiteOutput, ACCEPTANCE_HEADER, RESULTS_HEADER};
pub use config::ExperimentConfig;
pub use hist::{correlation_histogram, EdgeFilter, Histogram};
pub use reference::{register_reference, ReferenceStore};
