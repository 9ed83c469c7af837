//! Recognising cooperative manual work from wearable sensors.
//!
//! Workers wear a body-surface potential sensor and two accelerometers
//! (wrist, calf). Because two people hauling one load become a single
//! conductor, the potential channel carries information the motion sensors
//! cannot see: whether a carry is shared. This crate covers the full
//! pipeline around that idea:
//!
//! * [`sim`] — physics-based synthesis of labelled multi-agent sessions,
//! * [`ingest`] — the session/label file format and its validation,
//! * [`preprocess`] — channel derivation, sliding windows, task label maps,
//! * [`features`] — window statistics, standardisation, pair fusion,
//! * [`classify`] — weighted one-vs-all logistic regression plus temporal
//!   smoothing,
//! * [`evaluate`] — leave-one-group-out experiments and reports.
//!
//! Everything downstream of a fixed input is deterministic: synthesis under
//! a fixed seed, training, and evaluation all reproduce byte-identical
//! artefacts.

pub mod classify;
pub mod error;
pub mod evaluate;
pub mod features;
pub mod ingest;
pub mod preprocess;
pub mod sim;

pub use error::{Error, Result};
