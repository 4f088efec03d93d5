//! Library surface behind the `stratal` binary: the JSON document schema
//! and the command implementations, exposed so integration tests can call
//! the serialization layer directly.

pub mod commands;
pub mod schema;
