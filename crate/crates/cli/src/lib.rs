//! Command-line verbs and the HTTP service for pk-forge.

pub mod args;
pub mod commands;
pub mod elicitation;
pub mod service;
pub mod store;

use chrono::{Timelike, Utc};

use pk_forge::model::Timestamp;

/// Wall-clock time at second precision. Only this crate reads the clock;
/// the library takes every timestamp as an argument.
pub fn now() -> Timestamp {
    Utc::now().with_nanosecond(0).expect("zero nanoseconds is valid")
}
