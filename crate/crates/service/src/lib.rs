//! HTTP API and command line front end for the factor-forge engine.

pub mod api;
pub mod cli;

pub use api::{router, ApiError, AppState};
pub use cli::run;
