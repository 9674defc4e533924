//! Solver toolkit for set partitioning under packing constraints: matching
//! relaxations for dual bounds, probing-based variable reduction, a ranking
//! matheuristic, an exact branch-and-bound, and application adapters for
//! machine scheduling, berth allocation and crew recovery.

pub mod apps;
pub mod error;
pub mod exact;
pub mod fileformat;
pub mod fixtures;
pub mod instance;
pub mod matching;
pub mod matheuristic;
pub mod reduction;
pub mod relaxation;

pub use error::GsppError;
pub use exact::{branch_and_bound, export_lp, SolveOptions, SolveResult, SolveStatus};
pub use instance::{
    brute_force_optima, evaluate, validate_instance, Assignment, AssignmentId,
    CapacitatedResource, CompatOracle, Cost, DefaultCompat, Instance, Solution, TaskId,
    INF_COST,
};
pub use matching::{brute_force_matching, max_weight_matching, Matching, WeightedGraph};
pub use matheuristic::{
    matheuristic_solve, rank_variables, select_variables, MatheuristicResult, RankingParams,
};
pub use reduction::{probe_all, reduce, reduce_with_mode, ReductionResult};
pub use relaxation::{
    compute_bounds, format_cost, lb1, lb2, probe_bound, trivial_bound, BoundReport,
    ProbeContext,
};
