//! Library surface of the experiment driver, so integration and
//! acceptance tests can call the commands directly.

pub mod commands;
pub mod error;
pub mod io;
