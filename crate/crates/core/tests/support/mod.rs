//! Shared test helpers: brute-force and independently coded reference
//! implementations, plus synthetic dataset writers.
#![allow(dead_code)]

pub mod oracles;
pub mod synth;
