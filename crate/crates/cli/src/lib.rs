//! Library surface of the command-line front end: document schema,
//! report rendering, and command implementations, shared by the binary
//! and the integration tests.

pub mod commands;
pub mod report;
pub mod schema;
