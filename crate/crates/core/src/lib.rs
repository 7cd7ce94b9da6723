//! Coupled quantum-harmonic-oscillator model of a quantum communication link.
//!
//! The crate covers the full chain from the transverse field of a graded-index
//! medium down to capacity numbers:
//!
//! - [`special_fn`] and [`quadrature`]: Hermite polynomials, normalized
//!   oscillator eigenfunctions, Gauss-Hermite rules.
//! - [`field`]: Hermite-Gauss beams, the rotated normal-mode field of a
//!   quadratic-index medium, photon-cluster superpositions and finite-difference
//!   residual checks against the paraxial equations.
//! - [`ck`]: the Caldirola-Kanai diagonalization, its spectrum and eigenfunctions.
//! - [`envelope`]: received energy, two-window moving-average decomposition and
//!   empirical envelope densities.
//! - [`noise`]: Gaussian + Poisson hybrid noise.
//! - [`capacity`]: Shannon, Fock, Holevo, entanglement-assisted and
//!   fading-averaged capacities.
//!
//! Numerical code is generic over [`Real`] (`f32` or `f64`); the `*F64` aliases
//! below name the double-precision instantiations used by the CLI.

// `!(x > 0)` style guards are deliberate: they reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod capacity;
pub mod ck;
pub mod envelope;
mod error;
pub mod field;
pub mod noise;
pub mod quadrature;
pub mod special_fn;

pub use error::{Error, Result};

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

/// Floating-point scalar used throughout the crate.
pub trait Real:
    num_traits::Float
    + num_traits::FloatConst
    + num_traits::FromPrimitive
    + num_traits::ToPrimitive
    + std::ops::AddAssign
    + std::ops::SubAssign
    + std::ops::MulAssign
    + std::ops::DivAssign
    + Sum
    + Debug
    + Display
    + LowerExp
    + Default
    + rustfft::FftNum
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal. Panics only for types that cannot represent
    /// finite `f64` values at all, which excludes `f32` and `f64`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub type Complex<T> = num_complex::Complex<T>;

pub type MediumParamsF64 = field::MediumParams<f64>;
pub type NormalModesF64 = field::NormalModes<f64>;
pub type BeamGeometryF64 = field::BeamGeometry<f64>;
pub type ClusterConfigF64 = field::ClusterConfig<f64>;
pub type FieldGridF64 = field::FieldGrid<f64>;
pub type CkInputsF64 = ck::CkInputs<f64>;
pub type CkParamsF64 = ck::CkParams<f64>;
pub type EnvelopeSeriesF64 = envelope::EnvelopeSeries<f64>;
pub type EmpiricalDensityF64 = envelope::EmpiricalDensity<f64>;
pub type HybridNoiseSpecF64 = noise::HybridNoiseSpec<f64>;
pub type CapacityInputsF64 = capacity::CapacityInputs<f64>;
