//! Inner PCP machinery over small prime fields and GF(2).

pub mod adjacency;
pub mod bits;
pub mod field;
pub mod hadamard;
pub mod primes;
pub mod quad;
