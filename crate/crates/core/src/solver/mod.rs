//! End-to-end drivers: the load DPs, the height search, the exact oracle and the
//! moldable variant.

pub mod dp;
pub mod dual;
pub mod moldable;
pub mod oracle;
pub mod rotations;
pub mod structured;

pub use dp::{dp_place_tall_vertical, dp_place_tall_vertical_with, CapExceeded, DpOptions, DpStats, TvAssignment, TvBox, TvItem};
pub use dual::{dual_approx_search, probe_budget, DualOutcome};
pub use moldable::{dp_moldable, moldable_estimate, psi, Job, MoldAssignment, MoldChoice, MoldEstimate, MoldError, MoldProblem, MoldSlot, MoldThresholds};
pub use oracle::{exact_oracle, moldable_oracle, oracle_lower_bound, MoldOptimum, OracleError, OracleLimits};
pub use rotations::{dp_rotations, medium_cap, rounded_class_height, RotAssignment, RotChoice, RotationProblem, Slot};
pub use structured::{
    fill_boxes, normalize_epsilon, solve_structured, structure_height, ExhaustiveCaps, HintSpec, Mode, Provenance, SolveError, Source,
    StructuredResult,
};
