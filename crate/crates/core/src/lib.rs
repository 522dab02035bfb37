//! Unruh–DeWitt detector response for uniformly accelerated trajectories in
//! (1+1) dimensions.
//!
//! The crate computes leading-order transition probabilities of a two-level
//! detector coupled to a massless scalar field, either in a periodic cavity
//! ([`cavity`]) or in free space with an infrared cutoff ([`continuum`]), and
//! extracts KMS temperatures from the detailed-balance ratio ([`kms`]).
//! [`asymptotics`] holds the small-σ model used as a qualitative cross-check.
//!
//! All probabilities are reported in units of λ², the squared coupling.

pub mod asymptotics;
pub mod cavity;
pub mod continuum;
mod contour;
pub mod error;
pub mod kms;
pub mod model;
pub mod quadrature;
pub mod specfun;

pub use cavity::ProbabilityResult;
pub use error::{Error, Result};
pub use kms::{DerivativeGrid, KmsFit};
pub use model::{DetectorConfig, FieldSpace, Switching, Trajectory};
pub use num_complex::Complex64;
pub use quadrature::{QuadOptions, QuadResult, SingularitySpec};
pub use specfun::ComplexValue;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
