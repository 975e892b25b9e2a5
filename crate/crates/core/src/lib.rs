//! Exact asymptotic expansions for the number of k-regular and connected
//! k-regular labeled graphs.
//!
//! The crate is organised bottom-up:
//!
//! * [`rational`], [`series`] and [`poly`] provide exact truncated power
//!   series and sparse multivariate polynomials over arbitrary-precision
//!   rationals, together with the Gaussian-moment evaluation.
//! * [`laplace`] is a formal Laplace-method coefficient engine.
//! * [`counts`] computes exact counts of regular graphs by several
//!   independent routes and reads/writes b-files.
//! * [`regular`] produces the expansion coefficients for k-regular graphs,
//!   [`connected`] transfers them to connected k-regular graphs.
//! * [`validation`] evaluates residual tables in high precision against the
//!   shipped count tables in [`data`].

#![allow(clippy::needless_range_loop)]

pub mod connected;
pub mod counts;
pub mod data;
mod error;
pub mod float;
pub mod laplace;
pub mod par;
pub mod poly;
pub mod rational;
pub mod regular;
pub mod series;
pub mod validation;

pub use error::{Error, Result};
pub use par::Exec;
pub use poly::{Monomial, PolySeries, SparsePoly};
pub use rational::{GaussianRational, Rational};
pub use series::Series;
