//! Optical observables of a density matrix. Everything is evaluated on the
//! bare-basis matrix; bare indices `|1⟩, |2⟩, |3⟩` are `0, 1, 2`.

use nalgebra::Complex;

use crate::dynamics::TimeSeries;
use crate::error::Result;
use crate::linalg::{ci, Op3};
use crate::model::{BasisKind, DensityMatrix, SystemParams};
use crate::Real;

/// Unit the intensity of a record is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntensityUnit {
    /// Γ, used when Γ₂ = Γ₃ = Γ (also when both vanish).
    Gamma,
    /// γ₀.
    Gamma0,
}

/// g² together with the flag set when there is no excited population.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct G2<T> {
    pub value: T,
    pub no_excited_population: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservableRecord<T: Real> {
    /// `(ρ₁₁, ρ₂₂, ρ₃₃)`
    pub populations_bare: [T; 3],
    /// `(ρ_ww, ρ_uu, ρ₂₂)`
    pub populations_super: [T; 3],
    /// `(ρ_bb, ρ_dd)`, absent when both drives vanish.
    pub populations_brightdark: Option<[T; 2]>,
    pub coherence13: Complex<T>,
    pub purity: T,
    pub phi: T,
    /// Normally ordered variance at `phi`, in units of ψ².
    pub variance_phi: T,
    pub g2: G2<T>,
    pub intensity: T,
    pub intensity_unit: IntensityUnit,
    /// `ρ₃₃ − ρ₂₂`
    pub inversion_one: T,
    /// `ρ₃₃ − ρ₁₁`
    pub inversion_two: T,
}

/// `ρ₂₂ + ρ₃₃ − Re[(ρ₃₂ + ρ₂₁)e^{iφ}] + Re[ρ₃₁e^{2iφ}]` on a bare-basis matrix.
pub fn variance_bare<T: Real>(rho: &Op3<T>, phi: T) -> T {
    let e1 = ci(phi.cos(), phi.sin());
    let two_phi = phi + phi;
    let e2 = ci(two_phi.cos(), two_phi.sin());
    rho[(1, 1)].re + rho[(2, 2)].re - ((rho[(2, 1)] + rho[(1, 0)]) * e1).re
        + (rho[(2, 0)] * e2).re
}

pub fn variance_normally_ordered<T: Real>(
    rho: &DensityMatrix<T>,
    params: &SystemParams<T>,
    phi: T,
) -> Result<T> {
    let bare = rho.to_basis(BasisKind::Bare, params)?;
    Ok(variance_bare(&bare.entries, phi))
}

/// `ρ₃₃/(ρ₃₃ + ρ₂₂)²` on a bare-basis matrix.
pub fn g2_bare<T: Real>(rho: &Op3<T>) -> G2<T> {
    let (p2, p3) = (rho[(1, 1)].re, rho[(2, 2)].re);
    let excited = p2 + p3;
    if excited <= T::zero() {
        return G2 {
            value: T::zero(),
            no_excited_population: true,
        };
    }
    G2 {
        value: p3 / (excited * excited),
        no_excited_population: false,
    }
}

pub fn g2<T: Real>(rho: &DensityMatrix<T>, params: &SystemParams<T>) -> Result<G2<T>> {
    Ok(g2_bare(&rho.to_basis(BasisKind::Bare, params)?.entries))
}

/// `Γ₃ρ₃₃ + Γ₂ρ₂₂` in units of γ₀.
pub fn intensity<T: Real>(
    rho: &DensityMatrix<T>,
    params: &SystemParams<T>,
    big_gamma2: T,
    big_gamma3: T,
) -> Result<T> {
    let bare = rho.to_basis(BasisKind::Bare, params)?;
    Ok(big_gamma3 * bare.population(2) + big_gamma2 * bare.population(1))
}

/// Intensity in the unit used for records: `ρ₂₂ + ρ₃₃` (units of Γ) when the
/// two radiative rates coincide, `Γ₃ρ₃₃ + Γ₂ρ₂₂` (units of γ₀) otherwise.
pub fn reported_intensity<T: Real>(rho_bare: &Op3<T>, params: &SystemParams<T>) -> (T, IntensityUnit) {
    let (p2, p3) = (rho_bare[(1, 1)].re, rho_bare[(2, 2)].re);
    if params.big_gamma2 == params.big_gamma3 {
        (p2 + p3, IntensityUnit::Gamma)
    } else {
        (
            params.big_gamma3 * p3 + params.big_gamma2 * p2,
            IntensityUnit::Gamma0,
        )
    }
}

pub fn observables_of<T: Real>(
    rho: &DensityMatrix<T>,
    params: &SystemParams<T>,
    phi: T,
) -> Result<ObservableRecord<T>> {
    let bare = rho.to_basis(BasisKind::Bare, params)?;
    let sup = rho.to_basis(BasisKind::Superposition, params)?;
    let (ow, ou) = params.rabi_pair()?;
    let populations_brightdark = if ow == T::zero() && ou == T::zero() {
        None
    } else {
        let bd = rho.to_basis(BasisKind::BrightDark, params)?;
        Some([bd.population(1), bd.population(2)])
    };
    let m = &bare.entries;
    let (p1, p2, p3) = (m[(0, 0)].re, m[(1, 1)].re, m[(2, 2)].re);
    let (intensity, intensity_unit) = reported_intensity(m, params);
    Ok(ObservableRecord {
        populations_bare: [p1, p2, p3],
        populations_super: [sup.population(1), sup.population(2), sup.population(0)],
        populations_brightdark,
        coherence13: m[(0, 2)],
        purity: bare.purity(),
        phi,
        variance_phi: variance_bare(m, phi),
        g2: g2_bare(m),
        intensity,
        intensity_unit,
        inversion_one: p3 - p2,
        inversion_two: p3 - p1,
    })
}

pub fn series_observables<T: Real>(
    series: &TimeSeries<T>,
    params: &SystemParams<T>,
    phi: T,
) -> Result<Vec<(T, ObservableRecord<T>)>> {
    series
        .times
        .iter()
        .zip(&series.states)
        .map(|(t, rho)| Ok((*t, observables_of(rho, params, phi)?)))
        .collect()
}
