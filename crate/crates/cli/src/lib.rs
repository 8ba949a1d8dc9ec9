//! Library side of the `volcano` command-line tool: curve-spec parsing,
//! the query commands, the cross-check sweep, the result cache and the
//! table renderer.

pub mod cache;
pub mod commands;
pub mod crosscheck;
pub mod spec;
pub mod table;
