//! Numerical verification of nuclear operators and their trace formulas on
//! weighted mixed-norm, variable-exponent and modulation spaces.
//!
//! Everything lives on finite product grids: a function is its samples, an
//! integral is a quadrature sum, and an operator is a finite expansion
//! `Σ g_n ⊗ h_n`. Infinite objects are approached by truncation, and every
//! truncated quantity that is compared against a series carries an explicit
//! tail bound.
//!
//! Two Fourier conventions are in use and are never mixed:
//!
//! * on `ℝ^d` ([`timefreq`], [`hermite`]) the angular one,
//!   `f̂(ξ) = ∫ f(t) e^{-itξ} dt`;
//! * on the torus `𝕋^n = ℝ^n/ℤ^n` ([`torus`]) characters are
//!   `e^{2πi x·ξ}`, so `I - Δ` has symbol `1 + 4π²|ξ|²`.
//!
//! The `nuctrace` binary runs the same checks from JSON configs; see
//! [`experiment`].

pub mod eigen;
pub mod error;
pub mod experiment;
mod fft;
pub mod grid;
pub mod hermite;
pub mod io;
pub mod mixed_norm;
pub mod nuclear;
pub mod report;
pub mod timefreq;
pub mod torus;
pub mod variable_exponent;

pub use error::{Error, Result};
pub use grid::{Axis, ProductGrid, SampledFunction, WeightFunction};
pub use nuclear::{NormDescriptor, NuclearRepresentation};
pub use report::SpectralReport;
