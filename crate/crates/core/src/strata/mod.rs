//! Parameter charts for commuting tuples, point sweeps, Jordan-type strata
//! and their determinantal descriptions.

mod chart;
mod curves;
mod loci;
mod random;
mod sweep;

pub use chart::{builtin_chart, upper_name, Chart, ChartKind, ChartParams, CHART_NAMES};
pub use curves::{semicontinuity_check, Curve, SemicontinuityReport};
pub use loci::{
    constant_rank_on_strata, rank_locus_minors, symbolic_theta, verify_closed_stratum, ClosedReport,
    ConstantRankReport, HomotopyViolation, StratumRanks, SYMBOLIC_DIM_CAP,
};
pub use random::{random_commuting_tuple, random_invertible, random_jordan_type};
pub use sweep::{
    enumerate_points, evaluate_points, orbit_reduce, tabulate_jt, tabulate_sweep, Stratum, StrataTable, Sweep,
    SweepConfig, SweepMode, DEFAULT_BUDGET, DEFAULT_SAMPLES, MAX_REPRESENTATIVES,
};
