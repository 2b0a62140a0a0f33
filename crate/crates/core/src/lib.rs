//! Automated binary-classification pipeline: typed tables, replayable data
//! preparation, informative-missingness detection, six native learners,
//! random-search tuning and evaluation primitives.
//!
//! The crate is `no_std` (it needs `alloc`). Enable the `parallel` feature to
//! fan out forest trees, tuning candidates and missingness scans with rayon;
//! every random stream is derived from the run seed and the work item's
//! identity, so results do not depend on the schedule.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod date;
pub mod error;
pub mod exec;
pub mod explain;
pub mod learners;
pub mod mar;
pub mod math;
pub mod matrix;
pub mod metrics;
pub mod prep;
pub mod rng;
pub mod stats;
pub mod summary;
pub mod table;
pub mod tuning;

pub use error::{Error, Result};
pub use learners::{ModelId, ModelSpec, TrainedModel};
pub use matrix::{Dataset, Matrix};
pub use prep::{PrepConfig, PrepPipeline};
pub use table::{Column, ColumnData, ColumnKind, Schema, Table};

/// Source of elapsed time for fit and score timings.
///
/// The core has no clock of its own; callers that want wall-clock timings
/// supply one. [`NoClock`] reports zero for everything.
pub trait Clock: Sync {
    /// Seconds since an arbitrary fixed origin.
    fn now(&self) -> f64;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct NoClock;

impl Clock for NoClock {
    fn now(&self) -> f64 {
        0.0
    }
}
