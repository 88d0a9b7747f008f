//! Live experiment sessions over HTTP, with one JSON file per session.
//!
//! [`SessionRecord`] wraps the library state of a univariate or
//! multivariate search together with its mode, lifecycle status, step log
//! and the current [`Recommendation`]. The [`http`] module exposes it as a
//! JSON API and [`cli`] backs the `bsa` binary.

pub mod api;
pub mod cli;
pub mod engine;
pub mod error;
pub mod http;
pub mod store;

pub use api::{
    CreateSession, Mode, OutcomeRequest, PosteriorSample, Recommendation, SessionDoc, SessionRecord, Status,
    Transcript, API_SCHEMA_VERSION,
};
pub use engine::{replay, ReplayReport};
pub use error::ServiceError;
pub use store::Store;
