//! From raw sessions to labelled, task-mapped windows.

pub mod channel;
pub mod task;
pub mod window;

pub use channel::{accel_norm, clip_delta, potential_delta, SessionChannels, Source};
pub use task::{
    pair_task_label, single_task_label, task_classes, Mode, TargetClass, TaskMode, Variant,
};
pub use window::{make_windows, DiscardReason, LabeledWindow, WindowLabel, WindowParams};
