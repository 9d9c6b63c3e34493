//! Resonances and analytic continuation of the Jost function for half-line
//! Sturm–Liouville problems `-y'' + q y = z^2 y` with analytic, power-decaying `q`.

pub mod error;
pub mod export;
pub mod jost;
pub mod ode;
pub mod potentials;
pub mod quadrature;
pub mod regions;
pub mod resonances;
pub mod spectral;

pub use error::{Error, Result};
pub use potentials::{AnalyticPotential, ComplexPoint};
