//! Physics-based session synthesis: electrostatic body model, activity
//! scripts, and a randomised scenario builder.

pub mod config;
pub mod physics;
pub mod scenario;
pub mod script;
pub mod synth;

pub use config::SimConfig;
pub use physics::{capacitance_jump, charge_share, relax, BodyState};
pub use scenario::group_day_script;
pub use script::{ActivityScript, AgentSpec, Primitive, Segment};
pub use synth::{synth_session, AMBIENT_STATIC_POTENTIAL_V, STEP_RATE_HZ};
