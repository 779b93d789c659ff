//! The asynchronous token machines.
//!
//! A token state is a polynomial over tokens. A step rewrites one token of one
//! term by the rule of the generator it points into, then collides every
//! head-on pair in that term. The pure machine carries one bit per token; the
//! ground machine carries two and adds the Trace-Out rule.

pub mod engine;
pub mod ground;
pub mod invariants;
pub mod pure;
pub mod rules;
pub mod scheduler;
pub mod state;
pub mod token;

pub use engine::{
    collide_all, collide_term, default_fuse, is_collision_free, state_digest, Engine, Observer,
    Run, RunConfig, StepRecord, Stepped, Trace,
};
pub use ground::{
    check_simulation, check_simulation_run, cpm_map, g_extract_superoperator, g_normalize, SimStep,
    SimulationReport,
};
pub use invariants::{
    cycle_balance_witness, drive_to_duplicate, is_cycle_balanced, is_well_formed, polarity,
    rewind_witness, term_violation, well_formedness_witness, CycleMode, Duplicate, WellFormedCache,
    Witness, CYCLE_CAP,
};
pub use pure::{
    extract_matrix, extract_matrix_general, extract_state, normalize, output_ket, run_multi_token,
    run_single_token, state_to_matrix,
};
pub use rules::{GroundRules, PureRules, Rule, Rules};
pub use scheduler::{Candidate, Scheduler, SchedulerKind, Site};
pub use state::{GroundTokenState, State, TermKey, TokenState, PRUNE};
pub use token::{GroundToken, Token, TokenLike};
