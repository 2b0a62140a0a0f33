//! File formats, reporting and the command-line runner around
//! [`driveml_core`].

pub mod artifacts;
pub mod config;
pub mod io;
pub mod report;
pub mod run;
pub mod svg;

pub use driveml_core as core;

use std::time::{Instant, SystemTime, UNIX_EPOCH};

/// Wall-clock [`driveml_core::Clock`] measured from its creation.
#[derive(Debug, Clone, Copy)]
pub struct WallClock(Instant);

impl WallClock {
    pub fn new() -> Self {
        WallClock(Instant::now())
    }
}

impl Default for WallClock {
    fn default() -> Self {
        WallClock::new()
    }
}

impl driveml_core::Clock for WallClock {
    fn now(&self) -> f64 {
        self.0.elapsed().as_secs_f64()
    }
}

/// Current UTC time as `YYYY-MM-DDTHH:MM:SSZ`.
pub fn utc_timestamp() -> String {
    let secs = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let days = (secs / 86_400) as i32;
    let rem = secs % 86_400;
    format!(
        "{}T{:02}:{:02}:{:02}Z",
        driveml_core::date::format_iso(days),
        rem / 3600,
        rem % 3600 / 60,
        rem % 60
    )
}
