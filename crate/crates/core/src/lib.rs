//! Risk-robust DEA benchmarking on full-dimensional efficient facets.
//!
//! The pipeline runs in four stages:
//!
//! 1. [`measures::extreme_set`] finds (or pins) the extreme efficient units;
//! 2. [`facets::enumerate_facets`] identifies every full-dimensional
//!    efficient facet they span;
//! 3. [`partition::partition_robust`] selects the units lying on the largest
//!    number of facets and groups them by the facets they share;
//! 4. [`robust::robust_efficiency`] scores each unit against its closest
//!    robust target with the signed-slack program.
//!
//! [`scenario`] holds the revenue calculus used to check robustness against
//! price shocks, and [`report`] ties the stages into a reproducible run.

pub mod dataset;
pub mod error;
pub mod facets;
pub mod measures;
pub mod partition;
pub mod report;
pub mod robust;
pub mod scenario;
pub mod solver;

pub use dataset::{load_dataset, read_dataset, validate_dataset, Dataset};
pub use error::{Error, Result};
pub use facets::{
    enumerate_facets, facet_contains, facet_normal, Facet, FacetConfig, FacetSet, SupportScope,
};
pub use measures::{closest_on_efpps, extreme_efficiency_test, extreme_set, russell_farthest};
pub use partition::{membership_map, partition_robust, RobustPartition};
pub use robust::{batch_evaluate, evaluate_group, robust_efficiency, Aggregation};
pub use solver::{solve_lp, solve_sign_pattern_milp, LpProblem, SolverConfig};
