//! Driven three-level cascade quantum dot coupled to an acoustic-phonon
//! reservoir.
//!
//! The crate builds the master-equation generator of the effective model in
//! the bare, superposition, dressed and bright/dark bases, solves for steady
//! states and transients, and evaluates the optical observables (populations,
//! two-photon coherence, normally ordered quadrature variance, g², radiation
//! intensity). Closed-form results for the special drive configurations live
//! in [`oracles`] and are used to cross-check the numerical engine.
//!
//! All numerics are generic over a real scalar type implementing [`Real`]
//! (`f64` and `f32`). Rates and frequencies are in units of a reference rate
//! γ₀ = 1. The `f64` aliases at the crate root cover the common case.

// `!(x > y)` is used so that NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod generator;
pub mod linalg;
pub mod model;
pub mod observables;
pub mod oracles;
pub mod presets;

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

pub use error::{Error, Result};

/// Real scalar the model is generic over.
pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive {
    /// Converts an `f64` literal into the scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        nalgebra::convert(x)
    }

    /// A tolerance of `x` (stated for `f64`), floored at a small multiple of
    /// this type's machine epsilon so single precision stays usable.
    #[inline]
    fn tol(x: f64) -> Self {
        let floor = Self::default_epsilon() * Self::lit(1.0e3);
        Self::lit(x).max(floor)
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Real for T where T: RealField + Copy + FromPrimitive + ToPrimitive {}

pub use dynamics::{IntegratorConfig, SteadyStateResult, TimeSeries};
pub use generator::Superoperator;
pub use model::{BasisKind, BasisTransform, DensityMatrix, DriveCase, InitialState, SystemParams};
pub use observables::ObservableRecord;

/// Double-precision model parameters.
pub type Params = model::SystemParams<f64>;
/// Double-precision density matrix.
pub type Rho = model::DensityMatrix<f64>;
/// Double-precision 9×9 Liouvillian.
pub type Liouvillian = generator::Superoperator<f64>;
/// Double-precision sampled trajectory.
pub type Series = dynamics::TimeSeries<f64>;
/// Double-precision observable record.
pub type Record = observables::ObservableRecord<f64>;

/// Single-precision model parameters.
pub type Params32 = model::SystemParams<f32>;
/// Single-precision density matrix.
pub type Rho32 = model::DensityMatrix<f32>;
