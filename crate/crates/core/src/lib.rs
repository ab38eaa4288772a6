//! Green-function potential theory for the porous medium equation on
//! nonnegatively curved model manifolds.
//!
//! The crate evaluates the geometric quantities behind L¹ → L^∞ smoothing
//! estimates for `∂ₜu = Δ(uᵐ)`: ball-volume profiles and their growth
//! assumptions ([`geometry`]), the pole-centered Green function and its bounds
//! ([`green`]), the Green-weighted L¹ space ([`weighted`]), the smoothing bounds
//! themselves ([`smoothing`]), and a radial finite-volume solver with the
//! Barenblatt family for checking them on actual solutions ([`pme`]).
//! [`scenario`] runs declarative JSON experiments on top of all of it.

pub mod error;
pub mod geometry;
pub mod green;
pub mod pme;
pub mod quadrature;
pub mod roots;
pub mod scenario;
pub mod smoothing;
pub mod weighted;

pub use error::{Error, Result};
