//! Numeric verification harness: samples, Jacobians, ranks and property suites.

pub mod check;
pub mod gen;
pub mod numeric;
pub mod props;
pub mod sample;

pub use check::{CheckResult, Status, Witness};
pub use numeric::{jacobian_at, jacobian_fd, jacobian_symbolic, matrix_rank, rank_at, smallest_singular_value};
pub use props::{property_ids, run_property, run_suite, SuiteReport};
pub use sample::{box_points, SamplePlan};
