//! Model parameters, basis constructions and the density-matrix type.
//!
//! Index orders are fixed per basis:
//!
//! | basis           | 0     | 1     | 2     |
//! |-----------------|-------|-------|-------|
//! | `Bare`          | `|1⟩` | `|2⟩` | `|3⟩` |
//! | `Superposition` | `|2⟩` | `|w⟩` | `|u⟩` |
//! | `Dressed`       | `|w⟩` | `|m⟩` | `|n⟩` |
//! | `BrightDark`    | `|2⟩` | `|b⟩` | `|d⟩` |
//!
//! with `|u⟩ = α|3⟩ + β|1⟩`, `|w⟩ = β|3⟩ − α|1⟩`, `|m⟩ = sinθ|2⟩ + cosθ|u⟩`,
//! `|n⟩ = cosθ|2⟩ − sinθ|u⟩`, `|b⟩ ∝ Ω_w|w⟩ + Ω_u|u⟩`, `|d⟩ ∝ Ω_u|w⟩ − Ω_w|u⟩`.

use std::fmt;

use nalgebra::Complex;

use crate::error::{Error, Result};
use crate::linalg::{self, c, Ket, Op3};
use crate::Real;

/// Rates and drives of the effective model, in units of γ₀.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams<T> {
    /// Phonon-induced damping rate of the lower transition (γ₁).
    pub gamma1: T,
    /// Phonon-induced damping rate of the upper transition (γ₃).
    pub gamma3: T,
    /// Radiative decay rate of `|2⟩` (Γ₂).
    pub big_gamma2: T,
    /// Radiative decay rate of `|3⟩` (Γ₃).
    pub big_gamma3: T,
    /// Effective Rabi frequency on `|1⟩ ↔ |2⟩` (Ω₁, signed).
    pub omega1: T,
    /// Effective Rabi frequency on `|2⟩ ↔ |3⟩` (Ω₃, signed).
    pub omega3: T,
    /// One-photon detuning Δ.
    pub delta: T,
    /// Mean phonon occupation n̄.
    pub nbar: T,
}

impl<T: Real> Default for SystemParams<T> {
    fn default() -> Self {
        Self {
            gamma1: T::one(),
            gamma3: T::one(),
            big_gamma2: T::zero(),
            big_gamma3: T::zero(),
            omega1: T::zero(),
            omega3: T::zero(),
            delta: T::zero(),
            nbar: T::zero(),
        }
    }
}

impl<T: Real> SystemParams<T> {
    pub fn validate(&self) -> Result<()> {
        let named = [
            ("gamma1", self.gamma1),
            ("gamma3", self.gamma3),
            ("big_gamma2", self.big_gamma2),
            ("big_gamma3", self.big_gamma3),
            ("omega1", self.omega1),
            ("omega3", self.omega3),
            ("delta", self.delta),
            ("nbar", self.nbar),
        ];
        if let Some((name, _)) = named.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidParameters(format!("{name} is not finite")));
        }
        for (name, v) in &named[..4] {
            if *v < T::zero() {
                return Err(Error::InvalidParameters(format!("{name} must be non-negative")));
            }
        }
        if self.nbar < T::zero() {
            return Err(Error::InvalidParameters("nbar must be non-negative".into()));
        }
        if self.gamma1 + self.gamma3 <= T::zero() {
            return Err(Error::DegenerateParameters(
                "gamma1 + gamma3 must be positive".into(),
            ));
        }
        Ok(())
    }

    /// γ = γ₁ + γ₃.
    pub fn total_rate(&self) -> T {
        self.gamma1 + self.gamma3
    }

    /// γ₁₃ = √(γ₁γ₃).
    pub fn cross_rate(&self) -> T {
        (self.gamma1 * self.gamma3).sqrt()
    }

    pub fn coeffs(&self) -> Result<SuperpositionCoeffs<T>> {
        superposition_coeffs(self.gamma1, self.gamma3)
    }

    /// `(Ω_w, Ω_u)`.
    pub fn rabi_pair(&self) -> Result<(T, T)> {
        effective_rabi_pair(self)
    }

    fn drive_scale(&self) -> T {
        self.omega1.abs().max(self.omega3.abs())
    }

    /// Whether Ω_w vanishes to within 1e-9 of the drive scale.
    pub fn omega_w_vanishes(&self) -> Result<bool> {
        let (ow, _) = self.rabi_pair()?;
        Ok(ow.abs() <= T::tol(1e-9) * self.drive_scale())
    }

    /// Whether Ω_w = Ω_u to within 1e-9 of the drive scale.
    pub fn omega_w_equals_omega_u(&self) -> Result<bool> {
        let (ow, ou) = self.rabi_pair()?;
        Ok((ow - ou).abs() <= T::tol(1e-9) * self.drive_scale())
    }

    /// Γ₂ = Γ₃ = 0.
    pub fn radiation_free(&self) -> bool {
        self.big_gamma2 == T::zero() && self.big_gamma3 == T::zero()
    }
}

/// Amplitudes α, β of the phonon-adapted superpositions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperpositionCoeffs<T> {
    pub alpha: T,
    pub beta: T,
}

/// α = √(γ₁/(γ₁+γ₃)), β = √(γ₃/(γ₁+γ₃)).
pub fn superposition_coeffs<T: Real>(gamma1: T, gamma3: T) -> Result<SuperpositionCoeffs<T>> {
    if !(gamma1 >= T::zero() && gamma3 >= T::zero()) {
        return Err(Error::InvalidParameters("phonon rates must be non-negative".into()));
    }
    let total = gamma1 + gamma3;
    if total <= T::zero() {
        return Err(Error::DegenerateParameters("gamma1 = gamma3 = 0".into()));
    }
    Ok(SuperpositionCoeffs {
        alpha: (gamma1 / total).sqrt(),
        beta: (gamma3 / total).sqrt(),
    })
}

/// One phonon mode entering the renormalization of a Rabi frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhononMode<T> {
    /// g_p/ω_p.
    pub coupling_over_freq: T,
    /// n̄_p ≥ 0.
    pub occupation: T,
}

/// Phonon-dressed Rabi frequency `χ·exp[−½ Σ (g_p/ω_p)²(2n̄_p+1)]`.
pub fn effective_rabi<T: Real>(chi: T, modes: &[PhononMode<T>]) -> Result<T> {
    let mut exponent = T::zero();
    for mode in modes {
        if mode.occupation < T::zero() {
            return Err(Error::InvalidParameters("mode occupation must be non-negative".into()));
        }
        let r = mode.coupling_over_freq;
        exponent += r * r * (T::lit(2.0) * mode.occupation + T::one());
    }
    Ok(chi * (-exponent / T::lit(2.0)).exp())
}

/// Effective phonon coupling `g·Ω/Δ`.
pub fn effective_coupling<T: Real>(g: T, omega_eff: T, delta: T) -> Result<T> {
    if delta == T::zero() {
        return Err(Error::DivisionByZero("effective coupling requires a finite detuning"));
    }
    Ok(g * omega_eff / delta)
}

/// Thermal occupation `1/(e^x − 1)` with `x = ħω/k_BT`.
pub fn bose_occupation<T: Real>(freq_over_temp: T) -> Result<T> {
    if !(freq_over_temp > T::zero()) {
        return Err(Error::Domain("bose occupation needs a positive frequency/temperature ratio".into()));
    }
    Ok(T::one() / freq_over_temp.exp_m1())
}

/// `Ω_w = βΩ₃ − αΩ₁`, `Ω_u = αΩ₃ + βΩ₁`.
pub fn effective_rabi_pair<T: Real>(params: &SystemParams<T>) -> Result<(T, T)> {
    let SuperpositionCoeffs { alpha, beta } = params.coeffs()?;
    Ok((
        beta * params.omega3 - alpha * params.omega1,
        alpha * params.omega3 + beta * params.omega1,
    ))
}

/// Mixing angle, generalized Rabi frequency and dressed decay rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedParameters<T> {
    /// θ ∈ [0, π/2], from the non-negative roots of cos²θ and sin²θ.
    pub theta: T,
    pub cos2_theta: T,
    /// √(sin²θ).
    pub sin_theta: T,
    /// √(cos²θ) carrying the sign of Ω_u, so `|m⟩` stays the upper eigenstate.
    pub cos_theta: T,
    /// Ω = √(Δ² + 4Ω_u²).
    pub big_omega: T,
    /// γ_m = 2(n̄+1)γ sin²θ.
    pub gamma_m: T,
    /// γ_n = 2(n̄+1)γ cos²θ.
    pub gamma_n: T,
}

pub fn dressed_parameters<T: Real>(params: &SystemParams<T>) -> Result<DressedParameters<T>> {
    let (_, omega_u) = params.rabi_pair()?;
    let delta = params.delta;
    if omega_u == T::zero() && delta == T::zero() {
        return Err(Error::DegenerateParameters(
            "dressed states need Omega_u != 0 or Delta != 0".into(),
        ));
    }
    let two = T::lit(2.0);
    let big_omega = (delta * delta + T::lit(4.0) * omega_u * omega_u).sqrt();
    let cos2 = (T::lit(0.5) - delta / (two * big_omega)).clamp(T::zero(), T::one());
    let sin2 = T::one() - cos2;
    let sin_theta = sin2.sqrt();
    let cos_abs = cos2.sqrt();
    let cos_theta = if omega_u < T::zero() { -cos_abs } else { cos_abs };
    let scale = two * (params.nbar + T::one()) * params.total_rate();
    Ok(DressedParameters {
        theta: sin_theta.atan2(cos_abs),
        cos2_theta: cos2,
        sin_theta,
        cos_theta,
        big_omega,
        gamma_m: scale * sin2,
        gamma_n: scale * cos2,
    })
}

/// Basis of the three-level state space, each with a canonical index order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisKind {
    /// `{|1⟩, |2⟩, |3⟩}`
    Bare,
    /// `{|2⟩, |w⟩, |u⟩}`
    Superposition,
    /// `{|w⟩, |m⟩, |n⟩}`
    Dressed,
    /// `{|2⟩, |b⟩, |d⟩}`
    BrightDark,
}

impl BasisKind {
    pub const ALL: [BasisKind; 4] = [
        BasisKind::Bare,
        BasisKind::Superposition,
        BasisKind::Dressed,
        BasisKind::BrightDark,
    ];

    pub fn state_labels(self) -> [&'static str; 3] {
        match self {
            BasisKind::Bare => ["1", "2", "3"],
            BasisKind::Superposition => ["2", "w", "u"],
            BasisKind::Dressed => ["w", "m", "n"],
            BasisKind::BrightDark => ["2", "b", "d"],
        }
    }
}

impl fmt::Display for BasisKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            BasisKind::Bare => "bare",
            BasisKind::Superposition => "superposition",
            BasisKind::Dressed => "dressed",
            BasisKind::BrightDark => "bright/dark",
        };
        f.write_str(name)
    }
}

/// Columns are the basis states of `kind` written in bare coordinates.
pub fn basis_vectors<T: Real>(kind: BasisKind, params: &SystemParams<T>) -> Result<Op3<T>> {
    let z = T::zero();
    let one = T::one();
    match kind {
        BasisKind::Bare => Ok(Op3::identity()),
        BasisKind::Superposition => {
            let SuperpositionCoeffs { alpha, beta } = params.coeffs()?;
            #[rustfmt::skip]
            let v = Op3::new(
                c(z), c(-alpha), c(beta),
                c(one), c(z), c(z),
                c(z), c(beta), c(alpha),
            );
            Ok(v)
        }
        BasisKind::Dressed => {
            if !params.omega_w_vanishes()? {
                return Err(Error::InvalidRegime(
                    "dressed states are defined only for Omega_w = 0".into(),
                ));
            }
            let d = dressed_parameters(params)?;
            let (s, co) = (d.sin_theta, d.cos_theta);
            // columns |w⟩, |m⟩, |n⟩ in superposition coordinates
            #[rustfmt::skip]
            let in_super = Op3::new(
                c(z), c(s), c(co),
                c(one), c(z), c(z),
                c(z), c(co), c(-s),
            );
            Ok(basis_vectors(BasisKind::Superposition, params)? * in_super)
        }
        BasisKind::BrightDark => {
            let (ow, ou) = params.rabi_pair()?;
            let norm = (ow * ow + ou * ou).sqrt();
            if norm == T::zero() {
                return Err(Error::DegenerateParameters(
                    "bright/dark states need Omega_w or Omega_u non-zero".into(),
                ));
            }
            let (bw, bu) = (ow / norm, ou / norm);
            #[rustfmt::skip]
            let in_super = Op3::new(
                c(one), c(z), c(z),
                c(z), c(bw), c(bu),
                c(z), c(bu), c(-bw),
            );
            Ok(basis_vectors(BasisKind::Superposition, params)? * in_super)
        }
    }
}

/// Unitary change of coordinates between two bases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisTransform<T: Real> {
    pub matrix: Op3<T>,
    pub from: BasisKind,
    pub to: BasisKind,
}

/// `U = V_to† V_from`, so that `ψ_to = U ψ_from` and `ρ_to = U ρ_from U†`.
pub fn basis_transform<T: Real>(
    from: BasisKind,
    to: BasisKind,
    params: &SystemParams<T>,
) -> Result<BasisTransform<T>> {
    let matrix = if from == to {
        Op3::identity()
    } else {
        basis_vectors(to, params)?.adjoint() * basis_vectors(from, params)?
    };
    Ok(BasisTransform { matrix, from, to })
}

impl<T: Real> BasisTransform<T> {
    pub fn inverse(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
            from: self.to,
            to: self.from,
        }
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &Self) -> Result<Self> {
        if self.to != next.from {
            return Err(Error::BasisMismatch {
                expected: self.to,
                found: next.from,
            });
        }
        Ok(Self {
            matrix: next.matrix * self.matrix,
            from: self.from,
            to: next.to,
        })
    }

    pub fn apply_ket(&self, psi: &Ket<T>) -> Ket<T> {
        self.matrix * psi
    }

    pub fn apply(&self, rho: &DensityMatrix<T>) -> Result<DensityMatrix<T>> {
        if rho.basis != self.from {
            return Err(Error::BasisMismatch {
                expected: self.from,
                found: rho.basis,
            });
        }
        let entries = self.matrix * rho.entries * self.matrix.adjoint();
        Ok(DensityMatrix::from_hermitian_part(entries, self.to))
    }

    /// Largest entry of `U U† − I`.
    pub fn unitarity_defect(&self) -> T {
        linalg::max_abs(&(self.matrix * self.matrix.adjoint() - Op3::identity()))
    }
}

/// A 3×3 density matrix tagged with the basis its indices refer to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix<T: Real> {
    pub entries: Op3<T>,
    pub basis: BasisKind,
}

impl<T: Real> DensityMatrix<T> {
    /// Checked constructor: Hermitian to 1e-12, unit trace to 1e-10,
    /// eigenvalues ≥ −1e-9.
    pub fn new(entries: Op3<T>, basis: BasisKind) -> Result<Self> {
        let rho = Self { entries, basis };
        rho.validate()?;
        Ok(rho)
    }

    /// Keeps only the Hermitian part of `entries`; no other checks.
    pub fn from_hermitian_part(entries: Op3<T>, basis: BasisKind) -> Self {
        Self {
            entries: linalg::hermitian_part(&entries),
            basis,
        }
    }

    pub fn from_pure(psi: &Ket<T>, basis: BasisKind) -> Result<Self> {
        let norm = psi.norm();
        if norm == T::zero() {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let psi = psi.unscale(norm);
        Ok(Self::from_hermitian_part(psi * psi.adjoint(), basis))
    }

    /// Projector onto basis state `index`.
    pub fn basis_state(index: usize, basis: BasisKind) -> Self {
        Self {
            entries: linalg::transition(index, index),
            basis,
        }
    }

    /// Diagonal state; weights are normalized to unit sum.
    pub fn from_diagonal(weights: [T; 3], basis: BasisKind) -> Result<Self> {
        if weights.iter().any(|w| *w < T::zero() || !w.is_finite()) {
            return Err(Error::InvalidState("diagonal weights must be non-negative".into()));
        }
        let sum = weights[0] + weights[1] + weights[2];
        if sum <= T::zero() {
            return Err(Error::InvalidState("diagonal weights sum to zero".into()));
        }
        let mut entries = Op3::zeros();
        for (i, w) in weights.iter().enumerate() {
            entries[(i, i)] = c(*w / sum);
        }
        Ok(Self { entries, basis })
    }

    pub fn maximally_mixed(basis: BasisKind) -> Self {
        Self {
            entries: Op3::identity() * c(T::one() / T::lit(3.0)),
            basis,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let herm = linalg::hermiticity_defect(&self.entries);
        if herm > T::tol(1e-12) {
            return Err(Error::InvalidState(format!(
                "not Hermitian (defect {:e})",
                herm.as_f64()
            )));
        }
        let tr = self.trace();
        if (tr - T::one()).abs() > T::tol(1e-10) {
            return Err(Error::TraceNotUnity { trace: tr.as_f64() });
        }
        let min = self.min_eigenvalue();
        if min < -T::tol(1e-9) {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {:e}",
                min.as_f64()
            )));
        }
        Ok(())
    }

    pub fn element(&self, i: usize, j: usize) -> Complex<T> {
        self.entries[(i, j)]
    }

    pub fn population(&self, i: usize) -> T {
        self.entries[(i, i)].re
    }

    pub fn trace(&self) -> T {
        self.entries.trace().re
    }

    /// Tr(ρ²).
    pub fn purity(&self) -> T {
        self.entries.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr())
    }

    pub fn eigenvalues(&self) -> [T; 3] {
        linalg::hermitian_eigenvalues(&self.entries)
    }

    pub fn min_eigenvalue(&self) -> T {
        self.eigenvalues()[0]
    }

    pub fn to_basis(&self, target: BasisKind, params: &SystemParams<T>) -> Result<Self> {
        if target == self.basis {
            return Ok(*self);
        }
        basis_transform(self.basis, target, params)?.apply(self)
    }
}

/// How Ω₁ is tied to the other parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DriveCase<T> {
    /// Ω₁ and Ω₃ used as given.
    Custom,
    /// Ω₁ = Ω₃·β/α, which makes Ω_w = 0.
    OmegaWZero,
    /// Ω₁ = Ω₃·(β−α)/(α+β), which makes Ω_w = Ω_u.
    OmegaWEqualsOmegaU,
    /// Ω₁ = βΩ_u, Ω₃ = αΩ_u: Ω_w = 0 at a fixed Ω_u, defined for every α.
    OmegaWZeroAt(T),
}

impl<T: Real> DriveCase<T> {
    /// Returns `params` with the drive fields rewritten for this case.
    pub fn apply(&self, params: &SystemParams<T>) -> Result<SystemParams<T>> {
        let mut out = *params;
        match *self {
            DriveCase::Custom => {}
            DriveCase::OmegaWZero => {
                let SuperpositionCoeffs { alpha, beta } = params.coeffs()?;
                if alpha == T::zero() {
                    return Err(Error::DegenerateParameters(
                        "Omega_w = 0 at fixed Omega_3 needs gamma1 > 0".into(),
                    ));
                }
                out.omega1 = params.omega3 * beta / alpha;
            }
            DriveCase::OmegaWEqualsOmegaU => {
                let SuperpositionCoeffs { alpha, beta } = params.coeffs()?;
                out.omega1 = params.omega3 * (beta - alpha) / (alpha + beta);
            }
            DriveCase::OmegaWZeroAt(omega_u) => {
                let SuperpositionCoeffs { alpha, beta } = params.coeffs()?;
                out.omega1 = beta * omega_u;
                out.omega3 = alpha * omega_u;
            }
        }
        Ok(out)
    }
}

/// Named initial states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialState<T> {
    State1,
    State2,
    State3,
    StateW,
    StateU,
    StateB,
    StateD,
    MaximallyMixed,
    /// Weights on `(|1⟩, |2⟩, |3⟩)`.
    BareDiagonal([T; 3]),
    /// Weights on `(|2⟩, |w⟩, |u⟩)`.
    SuperpositionDiagonal([T; 3]),
}

impl<T: Real> InitialState<T> {
    /// The state expressed in `basis`.
    pub fn density(&self, params: &SystemParams<T>, basis: BasisKind) -> Result<DensityMatrix<T>> {
        let (rho, native) = match *self {
            InitialState::State1 => (DensityMatrix::basis_state(0, BasisKind::Bare), BasisKind::Bare),
            InitialState::State2 => (DensityMatrix::basis_state(1, BasisKind::Bare), BasisKind::Bare),
            InitialState::State3 => (DensityMatrix::basis_state(2, BasisKind::Bare), BasisKind::Bare),
            InitialState::StateW => (
                DensityMatrix::basis_state(1, BasisKind::Superposition),
                BasisKind::Superposition,
            ),
            InitialState::StateU => (
                DensityMatrix::basis_state(2, BasisKind::Superposition),
                BasisKind::Superposition,
            ),
            InitialState::StateB => (
                DensityMatrix::basis_state(1, BasisKind::BrightDark),
                BasisKind::BrightDark,
            ),
            InitialState::StateD => (
                DensityMatrix::basis_state(2, BasisKind::BrightDark),
                BasisKind::BrightDark,
            ),
            InitialState::MaximallyMixed => (DensityMatrix::maximally_mixed(basis), basis),
            InitialState::BareDiagonal(w) => (DensityMatrix::from_diagonal(w, BasisKind::Bare)?, BasisKind::Bare),
            InitialState::SuperpositionDiagonal(w) => (
                DensityMatrix::from_diagonal(w, BasisKind::Superposition)?,
                BasisKind::Superposition,
            ),
        };
        debug_assert_eq!(rho.basis, native);
        rho.to_basis(basis, params)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(g1: f64, g3: f64, o1: f64, o3: f64, delta: f64, nbar: f64) -> SystemParams<f64> {
        SystemParams {
            gamma1: g1,
            gamma3: g3,
            omega1: o1,
            omega3: o3,
            delta,
            nbar,
            ..Default::default()
        }
    }

    #[test]
    fn coeffs_examples() {
        let s = superposition_coeffs(1.0, 1.0).unwrap();
        assert!((s.alpha - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((s.beta - 0.5f64.sqrt()).abs() < 1e-15);

        let s = superposition_coeffs(1.0, 10.0).unwrap();
        assert!((s.alpha - (1.0f64 / 11.0).sqrt()).abs() < 1e-15);
        assert!((s.alpha - 0.30151).abs() < 5e-6);
        assert!((s.beta - 0.95346).abs() < 5e-6);

        let s = superposition_coeffs(5.0f64, 1.0).unwrap();
        assert!((s.alpha - 0.9129).abs() < 5e-5);

        assert!(matches!(
            superposition_coeffs(0.0, 0.0),
            Err(Error::DegenerateParameters(_))
        ));
    }

    #[test]
    fn effective_rabi_examples() {
        assert_eq!(effective_rabi(1.0, &[]).unwrap(), 1.0);
        let m = PhononMode { coupling_over_freq: 0.1, occupation: 0.0 };
        let v = effective_rabi(1.0, &[m]).unwrap();
        assert!((v - (-0.005f64).exp()).abs() < 1e-15);
        assert!((v - 0.995012).abs() < 5e-7);
        let v = effective_rabi(2.0, &[m, m]).unwrap();
        assert!((v - 1.980100).abs() < 5e-7);
    }

    #[test]
    fn effective_rabi_decreases_with_occupation_and_coupling() {
        let mut last = f64::INFINITY;
        for k in 0..20 {
            let m = PhononMode { coupling_over_freq: 0.3, occupation: k as f64 * 0.5 };
            let v = effective_rabi(1.5, &[m]).unwrap();
            assert!(v < last && v.abs() <= 1.5);
            last = v;
        }
        let mut last = f64::INFINITY;
        for k in 0..20 {
            let m = PhononMode { coupling_over_freq: -(k as f64) * 0.05, occupation: 1.0 };
            let v = effective_rabi(1.0, &[m]).unwrap();
            assert!(v <= last);
            last = v;
        }
    }

    #[test]
    fn effective_coupling_examples() {
        assert_eq!(effective_coupling(1.0, 1.0, 1.0).unwrap(), 1.0);
        assert!((effective_coupling(0.2f64, 5.0, 5.0).unwrap() - 0.2).abs() < 1e-15);
        assert!(matches!(effective_coupling(1.0, 1.0, 0.0), Err(Error::DivisionByZero(_))));
    }

    #[test]
    fn bose_examples() {
        assert!((bose_occupation(2f64.ln()).unwrap() - 1.0).abs() < 1e-14);
        assert!(bose_occupation(50.0).unwrap() < 1e-21);
        assert!((bose_occupation(1.0f64).unwrap() - 0.581977).abs() < 5e-7);
        assert!(bose_occupation(0.0).is_err());
        assert!(bose_occupation(-1.0).is_err());
    }

    #[test]
    fn rabi_pair_examples() {
        let (ow, ou) = params(1.0, 1.0, 1.0, 1.0, 0.0, 0.0).rabi_pair().unwrap();
        assert!(ow.abs() < 1e-15);
        assert!((ou - 2f64.sqrt()).abs() < 1e-15);

        let o1 = 1.0;
        let o3 = o1 * (1.0f64 / 10.0).sqrt();
        let (ow, _) = params(1.0, 10.0, o1, o3, 0.0, 0.0).rabi_pair().unwrap();
        assert!(ow.abs() < 1e-15);

        let s = superposition_coeffs(5.0f64, 1.0).unwrap();
        let o1 = (s.beta - s.alpha) / (s.alpha + s.beta);
        assert!((o1 + 0.38196).abs() < 1e-5);
        let (ow, ou) = params(5.0, 1.0, o1, 1.0, 0.0, 0.0).rabi_pair().unwrap();
        assert!((ow - ou).abs() < 1e-14);
    }

    #[test]
    fn dressed_parameter_examples() {
        let d = dressed_parameters(&params(1.0, 1.0, 1.0, 1.0, 0.0, 0.0)).unwrap();
        assert!((d.cos2_theta - 0.5).abs() < 1e-15);
        assert!((d.gamma_m - 2.0).abs() < 1e-14 && (d.gamma_n - 2.0).abs() < 1e-14);

        // Omega_u = 2 with Omega_w = 0 and gamma = 2
        let s = superposition_coeffs(1.0, 1.0).unwrap();
        let p = params(1.0, 1.0, 2.0 * s.beta, 2.0 * s.alpha, 3.0, 0.0);
        let d = dressed_parameters(&p).unwrap();
        assert!((d.big_omega - 5.0).abs() < 1e-14);
        assert!((d.cos2_theta - 0.2).abs() < 1e-14);
        assert!((d.gamma_m - 3.2).abs() < 1e-13);
        assert!((d.gamma_n - 0.8).abs() < 1e-13);

        assert!(dressed_parameters(&params(1.0, 1.0, 0.0, 0.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn dressed_rate_identities() {
        for k in 0..30 {
            let x = k as f64 * 0.37 - 4.0;
            let p = params(0.7, 1.9, 1.3 * x.sin(), 0.4 * x, x, 0.1 * k as f64);
            let Ok(d) = dressed_parameters(&p) else { continue };
            let total = 2.0 * (p.nbar + 1.0) * p.total_rate();
            assert!((d.gamma_m + d.gamma_n - total).abs() < 1e-12 * total);
            let s2c2 = d.cos2_theta * (1.0 - d.cos2_theta);
            assert!((d.gamma_m * d.gamma_n - total * total * s2c2).abs() < 1e-12 * total * total);
        }
    }

    #[test]
    fn transforms_are_unitary_and_round_trip() {
        let s = superposition_coeffs(2.0, 0.5).unwrap();
        let p = params(2.0, 0.5, 1.7 * s.beta, 1.7 * s.alpha, -0.8, 0.3);
        for from in BasisKind::ALL {
            for to in BasisKind::ALL {
                let u = basis_transform(from, to, &p).unwrap();
                assert!(u.unitarity_defect() < 1e-12, "{from} -> {to}");
                let back = u.then(&basis_transform(to, from, &p).unwrap()).unwrap();
                assert!(crate::linalg::max_abs(&(back.matrix - Op3::identity())) < 1e-12);
                // associativity through the bare basis
                let via = basis_transform(from, BasisKind::Bare, &p)
                    .unwrap()
                    .then(&basis_transform(BasisKind::Bare, to, &p).unwrap())
                    .unwrap();
                assert!(crate::linalg::max_abs(&(via.matrix - u.matrix)) < 1e-12);
            }
        }
    }

    #[test]
    fn superposition_vectors_for_equal_rates() {
        let p = params(1.0, 1.0, 0.0, 0.0, 0.0, 0.0);
        let v = basis_vectors(BasisKind::Superposition, &p).unwrap();
        let h = 0.5f64.sqrt();
        // |w⟩ = (|3⟩ − |1⟩)/√2, |u⟩ = (|3⟩ + |1⟩)/√2
        assert!((v[(0, 1)].re + h).abs() < 1e-15 && (v[(2, 1)].re - h).abs() < 1e-15);
        assert!((v[(0, 2)].re - h).abs() < 1e-15 && (v[(2, 2)].re - h).abs() < 1e-15);
    }

    #[test]
    fn dressed_vectors_at_resonance() {
        let s = superposition_coeffs(1.0, 3.0).unwrap();
        let p = params(1.0, 3.0, s.beta, s.alpha, 0.0, 0.0);
        let u = basis_transform(BasisKind::Superposition, BasisKind::Dressed, &p).unwrap();
        let h = 0.5f64.sqrt();
        // rows of U are ⟨w|, ⟨m|, ⟨n| in superposition coordinates (|2⟩, |w⟩, |u⟩)
        let expect = [[0.0, 1.0, 0.0], [h, 0.0, h], [h, 0.0, -h]];
        for (i, row) in expect.iter().enumerate() {
            for (j, want) in row.iter().enumerate() {
                assert!((u.matrix[(i, j)].re - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn dressed_basis_requires_omega_w_zero() {
        let p = params(1.0, 1.0, 1.0, 0.0, 1.0, 0.0);
        assert!(matches!(
            basis_transform(BasisKind::Bare, BasisKind::Dressed, &p),
            Err(Error::InvalidRegime(_))
        ));
    }

    #[test]
    fn bright_dark_for_balanced_drive() {
        let (g1, g3) = (5.0, 1.0);
        let s = superposition_coeffs(g1, g3).unwrap();
        let p = DriveCase::OmegaWEqualsOmegaU
            .apply(&params(g1, g3, 0.0, 1.0, 0.0, 0.0))
            .unwrap();
        let v = basis_vectors(BasisKind::BrightDark, &p).unwrap();
        let h = 0.5f64.sqrt();
        // |b⟩ = [(α+β)|3⟩ − (α−β)|1⟩]/√2 and |d⟩ ∝ (α−β)|3⟩ + (α+β)|1⟩
        assert!((v[(2, 1)].re - h * (s.alpha + s.beta)).abs() < 1e-14);
        assert!((v[(0, 1)].re + h * (s.alpha - s.beta)).abs() < 1e-14);
        let sign = v[(0, 2)].re.signum();
        assert!((sign * v[(2, 2)].re - h * (s.alpha - s.beta)).abs() < 1e-14);
        assert!((sign * v[(0, 2)].re - h * (s.alpha + s.beta)).abs() < 1e-14);
    }

    #[test]
    fn density_validation() {
        let mut m = Op3::<f64>::identity() * c(0.5);
        assert!(matches!(
            DensityMatrix::new(m, BasisKind::Bare),
            Err(Error::TraceNotUnity { .. })
        ));
        m[(0, 0)] = c(1.5);
        m[(1, 1)] = c(-0.5);
        m[(2, 2)] = c(0.0);
        assert!(matches!(DensityMatrix::new(m, BasisKind::Bare), Err(Error::InvalidState(_))));
        let rho = DensityMatrix::<f64>::maximally_mixed(BasisKind::Bare);
        assert!((rho.purity() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn drive_cases() {
        let p = DriveCase::OmegaWZero.apply(&params(1.0, 10.0, 0.0, 5.0, 0.0, 0.0)).unwrap();
        assert!((p.omega1 - 5.0 * 10f64.sqrt()).abs() < 1e-12);
        assert!(p.omega_w_vanishes().unwrap());
        let p = DriveCase::OmegaWZeroAt(5.0).apply(&params(0.0, 1.0, 0.0, 0.0, 0.0, 0.0)).unwrap();
        let (ow, ou) = p.rabi_pair().unwrap();
        assert!(ow.abs() < 1e-15 && (ou - 5.0).abs() < 1e-15);
        assert!(DriveCase::OmegaWZero.apply(&params(0.0, 1.0, 0.0, 1.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn single_precision_transform() {
        let p = SystemParams::<f32> { gamma1: 1.0, gamma3: 4.0, ..Default::default() };
        let u = basis_transform(BasisKind::Bare, BasisKind::Superposition, &p).unwrap();
        assert!(u.unitarity_defect() < 1e-6);
    }
}
