//! Numerical evaluation of heat-kernel functionals of Schrodinger
//! potentials: kernels, potentials, deterministic quadrature, the derived
//! quantities and a Brownian-bridge Monte Carlo cross-check.

pub mod bessel;
pub mod bridge_mc;
pub mod error;
pub mod kernels;
pub mod point;
pub mod potential;
pub mod quadrature;
pub mod quantities;
pub mod region;

pub use bridge_mc::{BridgeConfig, MCEstimate};
pub use error::{Error, Result};
pub use point::SpacePoint;
pub use potential::{parse, Potential};
pub use quadrature::{Estimate, QuadConfig, SingularityMode};
pub use region::{Convex, Region};
