//! Independent checks for the closed forms: exact polytope volumes,
//! Monte-Carlo volumes over feasibility predicates, randomized monotonicity
//! trials and the strong-monotonicity / convexity counterexamples.

mod counter;
mod mc;
mod polytope;
mod suite;

pub use counter::{
    b3_b4_counterexamples, b3_b4_counterexamples_with, convexity_gap, eigenvalues, strong_monotonicity_gap, unnormalized_eigenvectors, Condition,
    CounterexampleReport, GridPoint, GridResult, QubitMonotone, ReferenceInstance, SearchResult, GRID, SEARCH_TRIALS, VIOLATION_MARGIN,
};
pub use mc::{coordinate_plane_mc, mc_volume, mc_volume_with, qubit_accessible_mc, qubit_source_mc, sorted_accessible_mc, sorted_source_mc, Region, VolumeEstimate, MC_SHARDS};
pub use polytope::{exact_polytope_volume, polytope_vertices, MAX_EXACT_DIM};
pub use suite::{monotonicity_suite, monotonicity_suite_with, MonotonicityReport, SuiteMonotone, IU_TOL, MONOTONICITY_TOL};
