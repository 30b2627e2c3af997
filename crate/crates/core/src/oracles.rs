//! Closed-form results for the special drive configurations. These are
//! independent of the numerical engine and serve as its reference values.

use nalgebra::Complex;

use crate::dynamics::steady_state;
use crate::error::{Error, Result};
use crate::generator::full_generator;
use crate::linalg::{c, ci, Op3};
use crate::model::{BasisKind, SystemParams};
use crate::Real;

/// Steady state for Ω_w = 0, Γ₂ = Γ₃ = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormSteadyState<T> {
    pub pop_w: T,
    pub pop_u: T,
    pub pop_2: T,
    pub pop_1: T,
    /// ρ₂₂ as part of the bare triple (equal to `pop_2`).
    pub pop_2b: T,
    pub pop_3: T,
    /// ρ₁₃ (real).
    pub coherence13: T,
    pub purity: T,
}

impl<T: Real> ClosedFormSteadyState<T> {
    /// Full matrix in the bare basis.
    pub fn bare_matrix(&self) -> Op3<T> {
        let mut m = Op3::zeros();
        m[(0, 0)] = c(self.pop_1);
        m[(1, 1)] = c(self.pop_2b);
        m[(2, 2)] = c(self.pop_3);
        m[(0, 2)] = c(self.coherence13);
        m[(2, 0)] = c(self.coherence13);
        m
    }

    /// Full matrix in the superposition basis (diagonal).
    pub fn superposition_matrix(&self) -> Op3<T> {
        let mut m = Op3::zeros();
        m[(0, 0)] = c(self.pop_2);
        m[(1, 1)] = c(self.pop_w);
        m[(2, 2)] = c(self.pop_u);
        m
    }
}

fn require_ow_zero_no_radiation<T: Real>(params: &SystemParams<T>) -> Result<()> {
    params.validate()?;
    if !params.omega_w_vanishes()? || !params.radiation_free() {
        return Err(Error::InvalidRegime(
            "closed forms hold for Omega_w = 0 and Gamma2 = Gamma3 = 0".into(),
        ));
    }
    Ok(())
}

pub fn steady_closed_form<T: Real>(params: &SystemParams<T>) -> Result<ClosedFormSteadyState<T>> {
    require_ow_zero_no_radiation(params)?;
    let s = params.coeffs()?;
    let n = params.nbar;
    let one = T::one();
    let d = T::lit(3.0) * n + one;
    Ok(ClosedFormSteadyState {
        pop_w: (n + one) / d,
        pop_u: n / d,
        pop_2: n / d,
        pop_1: (n + s.alpha * s.alpha) / d,
        pop_2b: n / d,
        pop_3: (n + s.beta * s.beta) / d,
        coherence13: -s.alpha * s.beta / d,
        purity: (T::lit(3.0) * n * n + T::lit(2.0) * n + one) / (d * d),
    })
}

/// `(2n̄ + β[β − α cos 2φ])/(3n̄ + 1)`.
pub fn variance_closed_form<T: Real>(params: &SystemParams<T>, phi: T) -> Result<T> {
    require_ow_zero_no_radiation(params)?;
    let s = params.coeffs()?;
    let n = params.nbar;
    let two = T::lit(2.0);
    Ok((two * n + s.beta * (s.beta - s.alpha * (two * phi).cos())) / (T::lit(3.0) * n + T::one()))
}

/// `(3n̄ + 1)(n̄ + β²)/(2n̄ + β²)²`, or 0 when nothing is excited.
pub fn g2_closed_form<T: Real>(params: &SystemParams<T>) -> Result<T> {
    require_ow_zero_no_radiation(params)?;
    let b2 = params.coeffs()?.beta.powi(2);
    let n = params.nbar;
    let den = T::lit(2.0) * n + b2;
    if den <= T::zero() {
        return Ok(T::zero());
    }
    Ok((T::lit(3.0) * n + T::one()) * (n + b2) / (den * den))
}

/// Best squeezing of the Ω_w = 0 steady state at n̄ = 0 and φ = 0:
/// `(β/α, variance) = (√2 − 1, −(√2 − 1)/2)`.
pub fn squeezing_optimum<T: Real>() -> (T, T) {
    let r = T::lit(2.0).sqrt() - T::one();
    (r, -r / T::lit(2.0))
}

/// First-order transient solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransientValues<T> {
    pub rho_ww: T,
    pub rho_uu: T,
    pub rho_2u: Complex<T>,
}

impl<T: Real> TransientValues<T> {
    pub fn rho_22(&self) -> T {
        T::one() - self.rho_ww - self.rho_uu
    }
}

/// Populations and the `2–u` coherence to first order in γ/Ω_u, starting
/// from a state diagonal in `(|2⟩, |w⟩, |u⟩)` with populations
/// `rho0_diag = (ρ₂₂(0), ρ_ww(0), ρ_uu(0))`. Δ is ignored.
///
/// The coherence is the first-order solution of the block equations:
/// `ρ₂u = (i/2)[ρ₂₂(0) − ρ_uu(0)]e^{−(n̄+1)γt} sin 2Ω_u t
///  − i(γ/4Ω_u)[(n̄+1) − (3n̄+1)ρ_ww(0)][e^{−(3n̄+1)γt} − e^{−(n̄+1)γt} cos 2Ω_u t]`.
pub fn transient_closed_form<T: Real>(
    params: &SystemParams<T>,
    rho0_diag: [T; 3],
    t: T,
) -> Result<TransientValues<T>> {
    require_ow_zero_no_radiation(params)?;
    let (_, ou) = params.rabi_pair()?;
    if !(ou > T::zero()) {
        return Err(Error::InvalidRegime("transient forms need Omega_u > 0".into()));
    }
    let [p22, pww, puu] = rho0_diag;
    let (n, g) = (params.nbar, params.total_rate());
    let (one, two) = (T::one(), T::lit(2.0));
    let n1 = n + one;
    let n3 = T::lit(3.0) * n + one;
    let slow = (-n3 * g * t).exp();
    let fast = (-n1 * g * t).exp();
    let (sin, cos) = ((two * ou * t).sin(), (two * ou * t).cos());
    let w_inf = n1 / n3;
    let diff = p22 - puu;

    let rho_ww = w_inf - (w_inf - pww) * slow + n1 * g / (two * ou) * diff * fast * sin;
    let rho_uu = n / n3 + (w_inf - pww) * slow / two - diff * fast * cos / two
        - n * g / (two * ou) * (pww - two * puu) * fast * sin;
    let oscillating = diff * fast * sin / two;
    let drift = g / (T::lit(4.0) * ou) * (n1 - n3 * pww) * (slow - fast * cos);
    Ok(TransientValues {
        rho_ww,
        rho_uu,
        rho_2u: ci(T::zero(), oscillating - drift),
    })
}

fn require_balanced_no_radiation<T: Real>(params: &SystemParams<T>) -> Result<()> {
    params.validate()?;
    let (ow, ou) = params.rabi_pair()?;
    if !params.omega_w_equals_omega_u()? || !params.radiation_free() || ow == T::zero() && ou == T::zero() {
        return Err(Error::InvalidRegime(
            "dark-state relations hold for Omega_w = Omega_u != 0 and Gamma2 = Gamma3 = 0".into(),
        ));
    }
    Ok(())
}

/// `dρ_dd/dt = −n̄γρ_dd + (n̄+1)γρ₂₂ − ½n̄γ(ρ_bd + ρ_db)` for a matrix in the
/// bright/dark basis.
pub fn dark_state_rate<T: Real>(params: &SystemParams<T>, rho_bd: &Op3<T>) -> Result<T> {
    require_balanced_no_radiation(params)?;
    let (n, g) = (params.nbar, params.total_rate());
    Ok(-n * g * rho_bd[(2, 2)].re + (n + T::one()) * g * rho_bd[(0, 0)].re
        - n * g * rho_bd[(1, 2)].re)
}

/// Steady-state population of `|d⟩` for Ω_w = Ω_u, Γ₂ = Γ₃ = 0.
pub fn dark_state_rate_check<T: Real>(params: &SystemParams<T>) -> Result<T> {
    require_balanced_no_radiation(params)?;
    let ss = steady_state(&full_generator(params, BasisKind::Superposition)?)?;
    Ok(ss.state.to_basis(BasisKind::BrightDark, params)?.population(2))
}
