//! Scenario files, the bundled corpus, and the job runner behind the `cutkit` binary.

pub mod corpus;
pub mod ops;
pub mod run;
pub mod scenario;

pub use run::{run_scenario, ScenarioReport, Status};
pub use scenario::{Object, Scenario};
