//! Recession detection from labor-market data.
//!
//! The pipeline builds a large family of recession indicators from monthly
//! unemployment and vacancy rates, pairs each with a detection threshold,
//! keeps the classifiers that detect every historical recession exactly once,
//! and summarizes each survivor by the mean and spread of its detection
//! timing. The Pareto frontier of those two numbers trades anticipation
//! against precision; the high-precision end of the frontier becomes an
//! ensemble that turns live detections into recession-start probabilities.
//!
//! Modules follow the data flow:
//!
//! * [`month`], [`series`]: month arithmetic and gap-free monthly series.
//! * [`ingest`]: CSV loading, rate construction, splicing, dataset storage.
//! * [`indicator`]: smoothing, trailing extrema, gap transforms, combination,
//!   and the indicator grid.
//! * [`classifier`]: the detection state machine and the threshold sweep.
//! * [`frontier`]: detection-error statistics and frontier extraction.
//! * [`probability`]: the normal error model and ensemble probabilities.
//! * [`harness`]: training, backtest, placebo, and single-series runs.
//! * [`report`]: file formats for every artifact.

pub mod classifier;
pub mod error;
pub mod frontier;
pub mod harness;
pub mod indicator;
pub mod ingest;
pub mod month;
pub mod probability;
pub mod report;
pub mod series;

pub use error::{Error, Result};
pub use month::MonthIndex;
pub use series::{MonthlySeries, RecessionCalendar};
