//! Isogeny volcanoes of ordinary elliptic curves over small finite fields,
//! and the Tate-Shafarevich and Selmer invariants of constant curves
//! E/k(F) they determine.

pub mod arith;
pub mod descent;
pub mod ec;
pub mod error;
mod fnv;
pub mod gf;
pub mod isog;
pub mod orders;
pub mod volcano;

pub use error::{Error, Result};
