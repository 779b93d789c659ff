//! Random diagrams and the property suites that check the token machines
//! against the dense interpretation and their own invariants.

pub mod bench;
pub mod checks;
pub mod gen;
pub mod report;
pub mod seeds;
pub mod suites;

pub use bench::{sparse_report, BenchReport, Family};
pub use checks::{check_rewinds, check_run, InvariantStats};
pub use gen::{random_diagram, random_diagram_with, GenConfig};
pub use report::{Outcome, Suite, SuiteReport, TrialReport};
pub use seeds::{random_ground_seed, random_seed, unbalanced_seed, wire_pair};
pub use suites::{
    confluence_trial, invariants_trial, oracle_trial, run_suite, run_trials, simulation_trial,
    suite_confluence, suite_invariants, suite_oracle, suite_simulation, suite_termination,
    termination_trial, unbalanced_case, Source, FORCED_FUSE, FORCED_MAX_TERMS,
};
