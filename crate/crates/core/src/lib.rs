//! Instability criterion for four unit charges `(m1+, m2-, m3+, m4-)`.
//!
//! The crate is organised bottom-up:
//!
//! * [`system`] builds the ordered Jacobi frame (reduced masses, mass
//!   parameters, dissociation threshold).
//! * [`criterion`] classifies a system with the exact critical ratio
//!   `mu_R / mu_x <= (13 - 2 sqrt 22) / 54`.
//! * [`chain`] checks each scalar inequality the criterion rests on, plus the
//!   hydrogen spectrum, Hardy and projector inputs.
//! * [`effpot`] evaluates the inter-pair interaction in Jacobi coordinates and
//!   the effective potentials obtained by averaging over the tight pair.
//! * [`twocenter`] solves the two-center Coulomb problem variationally.
//! * [`ecg`] is a correlated-Gaussian stochastic variational solver used as an
//!   empirical cross-check of the criterion.
//!
//! All energies use `hbar = 1`, `|q| = 1`, with the mass unit of the input.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chain;
pub mod criterion;
pub mod ecg;
pub mod effpot;
pub mod error;
pub mod linalg;
pub mod quadrature;
pub mod report;
pub mod system;
pub mod twocenter;

pub use criterion::{classify, critical_ratio, Classification, Verdict};
pub use error::{Error, Result};
pub use system::{FourBodySystem, JacobiFrame, Pairing};
