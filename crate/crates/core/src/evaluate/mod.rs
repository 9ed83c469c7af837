//! Leave-one-group-out evaluation: folds, metrics, the experiment grid, and
//! report files.

pub mod experiment;
pub mod folds;
pub mod metrics;
pub mod report;

pub use experiment::{
    cell_key, run_experiment, train_cell_fold_model, CellReport, DatasetStats, ExperimentConfig,
    ExperimentReport, ScoreBlock, SensorConfig, REPORT_VERSION,
};
pub use folds::{logo_folds, Fold};
pub use metrics::{confusion, macro_f, per_class_scores, ClassScores};
pub use report::{load_report, write_report};
