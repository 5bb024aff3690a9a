//! Named models, file formats and reports for the command-line tool.

pub mod dag;
pub mod format;
pub mod presets;
pub mod report;
pub mod snapshot;

pub use dag::{compile_dag, DagEdge, DagModel, DEFAULT_PATH_CAP};
pub use format::ModelSpec;
pub use report::{
    format_residual, method_from_id, mix_effects_demo, parse_order_weights, run_report, MixEffectsReport, Report,
};
pub use snapshot::{parse_snapshots, ValueSnapshot};
