//! Desk-scale simulation of verification protocols with unentangled,
//! non-negative quantum proofs.

pub mod adversary;
pub mod complexity;
pub mod error;
pub mod graphs;
pub mod linalg;
pub mod pcp;
pub mod property;
pub mod protocols;
pub mod qstate;
pub mod rng;

pub use error::{Error, Result};
