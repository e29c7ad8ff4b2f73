//! Monte Carlo and deterministic numerics for the nodal statistics of random
//! plane waves.
//!
//! The field under study is the isotropic centered Gaussian field on the plane
//! whose covariance at separation `z` is `J0(2 pi sqrt(E) |z|)`. The crate
//! provides:
//!
//! * [`specfun`] — Bessel functions `J0, J1, J2`, every covariance kernel of
//!   the model (plain, first and second derivatives, normalized), and their
//!   large- and small-argument leading forms;
//! * [`sampler`] — exact realizations of the real and complex wave (spectral
//!   superposition, random-phase superposition, Bessel series) with analytic
//!   gradients and fast grid evaluation;
//! * [`geometry`] — planar domain algebra (area, diameter, erosion,
//!   intersection) and nodal-set extraction (marching-squares length, vortex
//!   counting by common zeros);
//! * [`chaos`] — Hermite polynomials, the projection coefficients of the
//!   nodal functionals, diagram-formula moments, and the second/fourth
//!   chaotic components evaluated on realizations;
//! * [`asymptotics`] — deterministic verification of the radial covariance
//!   reductions and every leading-order rate constant;
//! * [`experiments`] — the replicated Monte Carlo harness, statistics,
//!   persistence and the `berry` CLI entry points.

pub mod asymptotics;
pub mod chaos;
mod error;
pub mod experiments;
pub mod geometry;
pub mod grid;
pub mod sampler;
pub mod specfun;

pub use error::{BerryError, Result};
