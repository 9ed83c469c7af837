//! Session files: label taxonomy, in-memory sessions, and the text format
//! they are stored in.

pub mod format;
pub mod label;
pub mod session;

pub use format::{
    dataset_bases, labels_file, load_dataset, load_session, session_file, write_dataset,
    write_session, DatasetManifest, ManifestEntry,
};
pub use label::{label_at, validate_intervals, LabelClass, LabelInterval};
pub use session::SessionData;
