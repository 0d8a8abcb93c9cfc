//! Uplink interference and outage analysis for two-tier macro/femtocell
//! networks.
//!
//! Macrocell base stations sit on an infinite hexagonal lattice, macro UEs
//! and femtocell base stations are Poisson point processes, and every UE is
//! power-controlled to a fixed received target at its server. The crate
//! evaluates the outage probability of a macro UE (macro level) and of a
//! femto UE (femto level) under open and closed femtocell access in three
//! independent ways:
//!
//! * [`analytic`] — Laplace transforms of the aggregate interference by
//!   numerical quadrature,
//! * [`bounds`] — closed-form sufficient conditions and the resulting
//!   brackets on the break-even power-enhancement factor,
//! * [`simulator`] — seeded Monte Carlo with common random numbers.

pub mod analytic;
pub mod bounds;
pub mod error;
pub mod geometry;
pub mod model;
pub mod quadrature;
pub mod simulator;

pub use error::{Error, Result};
pub use geometry::{DiskRegion, HexGrid, IntensityProfile, Point};
pub use model::{NetworkConfig, NormalizedConfig};
