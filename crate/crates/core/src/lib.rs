//! Exact computation with finite minions: construction, combination,
//! diagnostics, and decision procedures.

pub mod analysis;
pub mod catalog;
pub mod construct;
pub mod error;
pub mod funmin;
pub mod homsearch;
pub mod minion;
pub mod minor;
pub mod omega;
pub mod presented;
pub mod specfile;

pub use error::{Error, Result};
