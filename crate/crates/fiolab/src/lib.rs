//! Numerical laboratory for Hörmander-type Fourier integral operators acting
//! on discretized Fourier-Lebesgue spaces.
//!
//! The crate provides:
//!
//! * [`spectral`] — centered grids, discrete Fourier transforms, FL^p_s norms;
//! * [`phase`] — phase/symbol families with analytic derivatives and the
//!   structural hypothesis checks (homogeneity, nondegeneracy, Hessian rank,
//!   affine fibrations, symbol-class estimates);
//! * [`fio`] — direct oscillatory-quadrature application of the operator, its
//!   dyadic pieces, and the conjugated kernel;
//! * [`decomp`] — the Littlewood-Paley system, the second (transverse-ball)
//!   decomposition, kernel pieces and their Schur integrals, Taylor
//!   remainders, and the small-scale probes;
//! * [`experiment`] — threshold arithmetic, norm-ratio sweeps over modulated
//!   bump families, slope fitting, and the band-commutation probe.
//!
//! Heavy inner loops parallelize with rayon when the default `parallel`
//! feature is enabled; order-sensitive reductions take an explicit
//! [`exec::ReductionMode`] so results stay reproducible either way.

pub mod decomp;
mod error;
pub mod exec;
pub mod experiment;
pub mod fio;
pub mod phase;
pub mod spectral;

pub use error::Error;
