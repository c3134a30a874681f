//! Correlation-guided cluster Monte Carlo for Ising spin glasses and Max-Cut.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the aliases at
//! the bottom of this file fix the scalar for the common cases.

pub mod anneal;
pub mod classical;
pub mod cluster;
pub mod correlation;
pub mod error;
pub mod exact;
pub mod instance;
pub mod quantum;
pub mod rng;
pub mod scalar;

pub use anneal::{
    acceptance_statistics, acceptance_statistics_from_events, delta_energy, quantile, run_ca, run_sa,
    AcceptanceEvent, AcceptanceSummary, AnnealOptions, RunRecord, ScheduleState, DEFAULT_RECORD_WINDOW,
};
pub use classical::{
    cc_correlations, default_sdp_rank, gw_round, mc_correlations, mh_sample, random_cluster_policy,
    sdp_correlations, sdp_solve, GwRounding, MhOptions, SampleSet, SdpOptions, SdpSolution,
};
pub use cluster::{
    create_cluster, link_probability, percolation_lambda, Cluster, ClusterBuilder, LinkPolicy, LinkSign,
    PercolationEstimate,
};
pub use correlation::{CorrelationMatrix, CorrelationSource};
pub use error::{Error, Result};
pub use exact::{brute_force, exact_boltzmann_correlations, ExactResult, BOLTZMANN_MAX_N, BRUTE_FORCE_MAX_N};
pub use instance::{
    energy, format_instance, generate_regular, magnetization, max_cut_value, misfit, parse_instance,
    read_instance, write_instance, Edge, Instance, SpinConfig, WeightSet,
};
pub use quantum::{
    p1_term_ratio, qaoa_correlations, qaoa_optimize, qaoa_optimize_depths, qaoa_optimize_from,
    qaoa_p1_correlations, qaoa_p1_energy, qaoa_p1_optimize, qaoa_prepare, qaoa_sample, QaoaOptimizeOptions, QaoaOptimum, QaoaParams,
    QaoaSimulator, QaoaState, TermRatio,
};
pub use rng::{derive_seed, seeded, SolverRng};
pub use scalar::Real;

pub type Instance64 = Instance<f64>;
pub type Instance32 = Instance<f32>;
pub type SpinConfig64 = SpinConfig<f64>;
pub type SpinConfig32 = SpinConfig<f32>;
pub type CorrelationMatrix64 = CorrelationMatrix<f64>;
pub type CorrelationMatrix32 = CorrelationMatrix<f32>;
pub type LinkPolicy64 = LinkPolicy<f64>;
pub type LinkPolicy32 = LinkPolicy<f32>;
pub type RunRecord64 = RunRecord<f64>;
pub type RunRecord32 = RunRecord<f32>;
pub type SampleSet64 = SampleSet<f64>;
pub type QaoaParams64 = QaoaParams<f64>;
pub type QaoaState64 = QaoaState<f64>;
pub type ExactResult64 = ExactResult<f64>;
