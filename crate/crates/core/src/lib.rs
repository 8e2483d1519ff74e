//! Solitary waves of the one-dimensional Euler–Poisson system with
//! temperature parameter `K`, their Evans function, the KdV limit and
//! the `Q` integrals that decide instability.
//!
//! The modules build on each other: [`profile`] constructs the wave,
//! [`spectral`] handles the constant-coefficient far field, [`evans`] and
//! [`kdv`] compute Evans functions, [`contour`] counts their zeros and
//! [`criteria`] evaluates the stability integrals.

pub mod contour;
pub mod criteria;
pub mod error;
pub mod evans;
pub mod export;
pub mod kdv;
pub mod numerics;
pub mod params;
pub mod profile;
pub mod spectral;

pub use error::{EpError, Result};
pub use params::PlasmaParams;
