//! Evaluation harness: datasets, condition runs, result logs and metrics.

mod dataset;
mod grade;
mod metrics;
mod report;
mod run;

pub use dataset::{load_dataset, parse_dataset, DatasetError, QAItem};
pub use grade::grade_answer;
pub use metrics::{abstention_appropriate, compute_metrics, EvalMetrics, Fraction, MetricsError};
pub use report::render_report;
pub use run::{
    parse_records, run_condition, run_item, write_records, Condition, RecordError, Responded, ResultRecord,
    UnknownCondition,
};
