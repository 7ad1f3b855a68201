//! Simulation and consistency checking of universal live sequence charts
//! against languages of external event sequences.

pub mod cli;
pub mod eesl;
pub mod engine;
pub mod justify;
pub mod model;
pub mod play;
