//! Dynamical Markov and Lagrange spectra for symbolically presented
//! hyperbolic horseshoes: subshifts of finite type, Cantor set geometry,
//! threshold pruning, dimension curves, suspension flows and perturbation
//! diagnostics.

pub mod artifacts;
pub mod cantor;
pub mod config;
pub mod error;
pub mod perturb;
pub mod runner;
pub mod spectra;
pub mod suspension;
pub mod symbolic;

pub use error::{Error, Result};
