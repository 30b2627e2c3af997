//! Master-equation generator of the effective model.
//!
//! `dρ/dt = −i[H, ρ] + L_phonon ρ + L_rad ρ` with `D[L]ρ = 2LρL† − L†Lρ − ρL†L`
//! (no ½). Every piece is available in all four bases. Forms written out
//! directly: Hamiltonian in bare/superposition/dressed, phonon part in
//! bare/superposition/dressed, radiative part in bare/superposition.
//! Anything else is obtained by conjugating the superposition form.

use std::ops::Add;

use nalgebra::Complex;

use crate::error::{Error, Result};
use crate::linalg::{
    self, c, commutator, cross_dissipator, dissipator, i_unit, transition, Op3, Op9,
};
use crate::model::{basis_transform, dressed_parameters, BasisKind, DensityMatrix, SystemParams};
use crate::Real;

// index of each state inside its basis
const S2: usize = 0;
const SW: usize = 1;
const SU: usize = 2;
const DW: usize = 0;
const DM: usize = 1;
const DN: usize = 2;

/// A 9×9 generator acting on row-major vectorized density matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Superoperator<T: Real> {
    pub entries: Op9<T>,
    pub basis: BasisKind,
}

impl<T: Real> Superoperator<T> {
    pub fn zero(basis: BasisKind) -> Self {
        Self {
            entries: Op9::zeros(),
            basis,
        }
    }

    pub fn apply_matrix(&self, rho: &Op3<T>) -> Op3<T> {
        linalg::unvectorize(&(self.entries * linalg::vectorize(rho)))
    }

    pub fn apply(&self, rho: &DensityMatrix<T>) -> Result<Op3<T>> {
        if rho.basis != self.basis {
            return Err(Error::BasisMismatch {
                expected: self.basis,
                found: rho.basis,
            });
        }
        Ok(self.apply_matrix(&rho.entries))
    }

    /// The same generator written in `target`: `C L C⁻¹` with `C` the
    /// conjugation by the basis transform.
    pub fn in_basis(&self, target: BasisKind, params: &SystemParams<T>) -> Result<Self> {
        if target == self.basis {
            return Ok(*self);
        }
        let u = basis_transform(self.basis, target, params)?.matrix;
        Ok(Self {
            entries: linalg::conjugation(&u) * self.entries * linalg::conjugation(&u.adjoint()),
            basis: target,
        })
    }

    /// Largest coefficient of `Tr(L vec ρ)` as a linear form in `vec ρ`.
    pub fn trace_defect(&self) -> T {
        let row = self.entries.row(0) + self.entries.row(4) + self.entries.row(8);
        linalg::max_abs(&row)
    }

    /// Largest anti-Hermitian part produced from a Hermitian input, over a
    /// basis of Hermitian matrices.
    pub fn hermiticity_defect(&self) -> T {
        let mut worst = T::zero();
        for i in 0..3 {
            for j in i..3 {
                let mut re = Op3::zeros();
                re[(i, j)] = c(T::one());
                re[(j, i)] = c(T::one());
                let mut im = Op3::zeros();
                if i != j {
                    im[(i, j)] = i_unit();
                    im[(j, i)] = -i_unit::<T>();
                }
                for h in [re, im] {
                    worst = worst.max(linalg::hermiticity_defect(&self.apply_matrix(&h)));
                }
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        linalg::max_abs(&(self.entries - other.entries))
    }
}

impl<T: Real> Add for Superoperator<T> {
    type Output = Result<Self>;

    fn add(self, rhs: Self) -> Result<Self> {
        if self.basis != rhs.basis {
            return Err(Error::BasisMismatch {
                expected: self.basis,
                found: rhs.basis,
            });
        }
        Ok(Self {
            entries: self.entries + rhs.entries,
            basis: self.basis,
        })
    }
}

/// One Lindblad channel `rate · D[jump]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LindbladTerm<T: Real> {
    pub jump: Op3<T>,
    pub rate: T,
}

impl<T: Real> LindbladTerm<T> {
    pub fn new(jump: Op3<T>, rate: T) -> Result<Self> {
        if !(rate >= T::zero()) {
            return Err(Error::InvalidParameters("Lindblad rate must be non-negative".into()));
        }
        Ok(Self { jump, rate })
    }

    pub fn superoperator(&self) -> Op9<T> {
        dissipator(&self.jump) * c(self.rate)
    }
}

/// Sum of Lindblad channels as a superoperator in `basis`.
pub fn lindblad_sum<T: Real>(terms: &[LindbladTerm<T>], basis: BasisKind) -> Superoperator<T> {
    let entries = terms
        .iter()
        .fold(Op9::zeros(), |acc, term| acc + term.superoperator());
    Superoperator { entries, basis }
}

/// The phonon reservoir as two rank-one channels: decay `|2⟩ → |w⟩` at
/// `(n̄+1)γ` and pumping `|w⟩ → |2⟩` at `n̄γ`, with jumps expressed in `basis`.
pub fn phonon_channels<T: Real>(
    params: &SystemParams<T>,
    basis: BasisKind,
) -> Result<[LindbladTerm<T>; 2]> {
    params.validate()?;
    let u = basis_transform(BasisKind::Superposition, basis, params)?.matrix;
    let to_basis = |m: Op3<T>| u * m * u.adjoint();
    let g = params.total_rate();
    Ok([
        LindbladTerm::new(to_basis(transition(SW, S2)), (params.nbar + T::one()) * g)?,
        LindbladTerm::new(to_basis(transition(S2, SW)), params.nbar * g)?,
    ])
}

fn check_dressed<T: Real>(params: &SystemParams<T>) -> Result<()> {
    if !params.omega_w_vanishes()? {
        return Err(Error::InvalidRegime(
            "the dressed basis requires Omega_w = 0".into(),
        ));
    }
    Ok(())
}

pub fn hamiltonian<T: Real>(params: &SystemParams<T>, basis: BasisKind) -> Result<Op3<T>> {
    params.validate()?;
    let h = match basis {
        BasisKind::Bare => {
            let mut h = transition(1, 1) * c(params.delta);
            h += (transition(1, 0) + transition(0, 1)) * c(params.omega1);
            h += (transition(2, 1) + transition(1, 2)) * c(params.omega3);
            h
        }
        BasisKind::Superposition => {
            let (ow, ou) = params.rabi_pair()?;
            let mut h = transition(S2, S2) * c(params.delta);
            h += (transition(S2, SW) + transition(SW, S2)) * c(ow);
            h += (transition(S2, SU) + transition(SU, S2)) * c(ou);
            h
        }
        BasisKind::Dressed => {
            check_dressed(params)?;
            let d = dressed_parameters(params)?;
            let half = T::lit(0.5);
            transition(DM, DM) * c(half * (params.delta + d.big_omega))
                + transition(DN, DN) * c(half * (params.delta - d.big_omega))
        }
        BasisKind::BrightDark => {
            let u = basis_transform(BasisKind::Superposition, basis, params)?.matrix;
            u * hamiltonian(params, BasisKind::Superposition)? * u.adjoint()
        }
    };
    Ok(h)
}

/// `−i[H, ·]`.
pub fn coherent_part<T: Real>(params: &SystemParams<T>, basis: BasisKind) -> Result<Superoperator<T>> {
    Ok(Superoperator {
        entries: commutator(&hamiltonian(params, basis)?),
        basis,
    })
}

pub fn phonon_liouvillian<T: Real>(
    params: &SystemParams<T>,
    basis: BasisKind,
) -> Result<Superoperator<T>> {
    params.validate()?;
    let n = params.nbar;
    let n1 = n + T::one();
    let g = params.total_rate();
    let entries = match basis {
        BasisKind::Bare => {
            let (g1, g3, g13) = (params.gamma1, params.gamma3, params.cross_rate());
            let (a12, a32) = (transition::<T>(0, 1), transition::<T>(2, 1));
            let (a21, a23) = (transition::<T>(1, 0), transition::<T>(1, 2));
            dissipator(&a12) * c(n1 * g1)
                + dissipator(&a32) * c(n1 * g3)
                + dissipator(&a21) * c(n * g1)
                + dissipator(&a23) * c(n * g3)
                - (cross_dissipator(&a32, &a12) + cross_dissipator(&a12, &a32)) * c(n1 * g13)
                - (cross_dissipator(&a21, &a23) + cross_dissipator(&a23, &a21)) * c(n * g13)
        }
        BasisKind::Superposition => {
            dissipator(&transition(SW, S2)) * c(n1 * g) + dissipator(&transition(S2, SW)) * c(n * g)
        }
        BasisKind::Dressed => {
            check_dressed(params)?;
            let d = dressed_parameters(params)?;
            let (s, co) = (d.sin_theta, d.cos_theta);
            let (a_wm, a_wn) = (transition::<T>(DW, DM), transition::<T>(DW, DN));
            let (a_mw, a_nw) = (transition::<T>(DM, DW), transition::<T>(DN, DW));
            // |2⟩ = sinθ|m⟩ + cosθ|n⟩, so A_w2 = sinθ A_wm + cosθ A_wn
            let decay = dissipator(&a_wm) * c(s * s)
                + dissipator(&a_wn) * c(co * co)
                + (cross_dissipator(&a_wm, &a_wn) + cross_dissipator(&a_wn, &a_wm)) * c(s * co);
            let pump = dissipator(&a_mw) * c(s * s)
                + dissipator(&a_nw) * c(co * co)
                + (cross_dissipator(&a_mw, &a_nw) + cross_dissipator(&a_nw, &a_mw)) * c(s * co);
            decay * c(n1 * g) + pump * c(n * g)
        }
        BasisKind::BrightDark => {
            return phonon_liouvillian(params, BasisKind::Superposition)?.in_basis(basis, params)
        }
    };
    Ok(Superoperator { entries, basis })
}

pub fn radiative_liouvillian<T: Real>(
    params: &SystemParams<T>,
    basis: BasisKind,
) -> Result<Superoperator<T>> {
    params.validate()?;
    let (r2, r3) = (params.big_gamma2, params.big_gamma3);
    let entries = match basis {
        BasisKind::Bare => {
            dissipator(&transition(0, 1)) * c(r2) + dissipator(&transition(1, 2)) * c(r3)
        }
        BasisKind::Superposition => {
            let s = params.coeffs()?;
            let (a, b) = (s.alpha, s.beta);
            let (a_w2, a_u2) = (transition::<T>(SW, S2), transition::<T>(SU, S2));
            let (a_2w, a_2u) = (transition::<T>(S2, SW), transition::<T>(S2, SU));
            // |2⟩ → |1⟩ = β|u⟩ − α|w⟩
            let lower = dissipator(&a_w2) * c(a * a * r2) + dissipator(&a_u2) * c(b * b * r2)
                - (cross_dissipator(&a_w2, &a_u2) + cross_dissipator(&a_u2, &a_w2)) * c(a * b * r2);
            // |3⟩ = α|u⟩ + β|w⟩ → |2⟩
            let upper = dissipator(&a_2w) * c(b * b * r3) + dissipator(&a_2u) * c(a * a * r3)
                + (cross_dissipator(&a_2w, &a_2u) + cross_dissipator(&a_2u, &a_2w)) * c(a * b * r3);
            lower + upper
        }
        BasisKind::Dressed | BasisKind::BrightDark => {
            if basis == BasisKind::Dressed {
                check_dressed(params)?;
            }
            return radiative_liouvillian(params, BasisKind::Superposition)?.in_basis(basis, params);
        }
    };
    Ok(Superoperator { entries, basis })
}

pub fn full_generator<T: Real>(
    params: &SystemParams<T>,
    basis: BasisKind,
) -> Result<Superoperator<T>> {
    (coherent_part(params, basis)? + phonon_liouvillian(params, basis)?)?
        + radiative_liouvillian(params, basis)?
}

/// Component equations for `ρ` in the superposition basis, written element by
/// element. The `ρ_wu` equation carries a constant `−αβΓ₃` that stands for
/// `−αβΓ₃(ρ_ww + ρ_uu)` with `ρ₂₂` absorbed into the next term; it is only
/// valid at unit trace, which is checked.
pub fn rhs_components<T: Real>(params: &SystemParams<T>, rho: &Op3<T>) -> Result<Op3<T>> {
    params.validate()?;
    let tr = rho.trace();
    if linalg::modulus(tr - c(T::one())) > T::tol(1e-10) {
        return Err(Error::TraceNotUnity { trace: tr.re.as_f64() });
    }
    let s = params.coeffs()?;
    let (a, b) = (s.alpha, s.beta);
    let (ow, ou) = params.rabi_pair()?;
    let (n, g, delta) = (params.nbar, params.total_rate(), params.delta);
    let (r2, r3) = (params.big_gamma2, params.big_gamma3);
    let two = T::lit(2.0);
    let i = i_unit::<T>();
    let n1 = n + T::one();

    let r22 = rho[(S2, S2)];
    let rww = rho[(SW, SW)];
    let ruu = rho[(SU, SU)];
    let r2w = rho[(S2, SW)];
    let rw2 = rho[(SW, S2)];
    let r2u = rho[(S2, SU)];
    let ru2 = rho[(SU, S2)];
    let rwu = rho[(SW, SU)];
    let ruw = rho[(SU, SW)];

    let ab3 = c(a * b * r3);
    let d22 = r22 * c(-two * (r2 + n1 * g))
        + rww * c(two * (b * b * r3 + n * g))
        + ruu * c(two * a * a * r3)
        + (rwu + ruw) * c(two * a * b * r3)
        + (r2u - ru2) * i * c(ou)
        + (r2w - rw2) * i * c(ow);
    let dww = rww * c(-two * (b * b * r3 + n * g)) + r22 * c(two * (a * a * r2 + n1 * g))
        - (rwu + ruw) * ab3
        - (r2w - rw2) * i * c(ow);
    let duu = ruu * c(-two * a * a * r3) + r22 * c(two * b * b * r2)
        - (rwu + ruw) * ab3
        - (r2u - ru2) * i * c(ou);
    let d2w = -r2w * Complex::new(r2 + b * b * r3 + (two * n + T::one()) * g, delta)
        - r2u * ab3
        - ruw * i * c(ou)
        + (r22 - rww) * i * c(ow);
    let d2u = -r2u * Complex::new(r2 + a * a * r3 + n1 * g, delta)
        - r2w * ab3
        - rwu * i * c(ow)
        + (r22 - ruu) * i * c(ou);
    let dwu = -ab3 - rwu * c(r3 + n * g) - r22 * c(a * b * (two * r2 - r3)) + rw2 * i * c(ou)
        - r2u * i * c(ow);

    let mut out = Op3::zeros();
    out[(S2, S2)] = d22;
    out[(SW, SW)] = dww;
    out[(SU, SU)] = duu;
    out[(S2, SW)] = d2w;
    out[(SW, S2)] = d2w.conj();
    out[(S2, SU)] = d2u;
    out[(SU, S2)] = d2u.conj();
    out[(SW, SU)] = dwu;
    out[(SU, SW)] = dwu.conj();
    Ok(out)
}

/// Populations and the `2–u` coherence, `(ρ₂₂, ρ_ww, ρ_uu, ρ₂u)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PopulationBlock<T: Real> {
    pub rho_22: T,
    pub rho_ww: T,
    pub rho_uu: T,
    pub rho_2u: Complex<T>,
}

/// The remaining coherences, `(ρ₂w, ρ_wu)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceBlock<T: Real> {
    pub rho_2w: Complex<T>,
    pub rho_wu: Complex<T>,
}

impl<T: Real> PopulationBlock<T> {
    pub fn of(rho: &Op3<T>) -> Self {
        Self {
            rho_22: rho[(S2, S2)].re,
            rho_ww: rho[(SW, SW)].re,
            rho_uu: rho[(SU, SU)].re,
            rho_2u: rho[(S2, SU)],
        }
    }
}

impl<T: Real> CoherenceBlock<T> {
    pub fn of(rho: &Op3<T>) -> Self {
        Self {
            rho_2w: rho[(S2, SW)],
            rho_wu: rho[(SW, SU)],
        }
    }
}

/// Superposition-basis matrix assembled from the two blocks.
pub fn embed_blocks<T: Real>(p: &PopulationBlock<T>, q: &CoherenceBlock<T>) -> Op3<T> {
    let mut m = Op3::zeros();
    m[(S2, S2)] = c(p.rho_22);
    m[(SW, SW)] = c(p.rho_ww);
    m[(SU, SU)] = c(p.rho_uu);
    m[(S2, SU)] = p.rho_2u;
    m[(SU, S2)] = p.rho_2u.conj();
    m[(S2, SW)] = q.rho_2w;
    m[(SW, S2)] = q.rho_2w.conj();
    m[(SW, SU)] = q.rho_wu;
    m[(SU, SW)] = q.rho_wu.conj();
    m
}

/// Checks the regime where the equations split into two blocks.
pub fn check_reduced_regime<T: Real>(params: &SystemParams<T>) -> Result<()> {
    params.validate()?;
    if !params.omega_w_vanishes()? || !params.radiation_free() {
        return Err(Error::InvalidRegime(
            "the block equations need Omega_w = 0 and Gamma2 = Gamma3 = 0".into(),
        ));
    }
    Ok(())
}

/// Right-hand sides of the two independent blocks (Ω_w = 0, Γ₂ = Γ₃ = 0).
pub fn rhs_reduced<T: Real>(
    params: &SystemParams<T>,
    pops: &PopulationBlock<T>,
    coh: &CoherenceBlock<T>,
) -> Result<(PopulationBlock<T>, CoherenceBlock<T>)> {
    check_reduced_regime(params)?;
    let (_, ou) = params.rabi_pair()?;
    let (n, g, delta) = (params.nbar, params.total_rate(), params.delta);
    let two = T::lit(2.0);
    let n1 = n + T::one();
    let i = i_unit::<T>();
    // iΩ_u(ρ₂u − ρ_u2) = −2Ω_u Im ρ₂u
    let pump = -two * ou * pops.rho_2u.im;
    let dp = PopulationBlock {
        rho_22: -two * n1 * g * pops.rho_22 + two * n * g * pops.rho_ww + pump,
        rho_ww: -two * n * g * pops.rho_ww + two * n1 * g * pops.rho_22,
        rho_uu: -pump,
        rho_2u: -pops.rho_2u * Complex::new(n1 * g, delta)
            + i * c(ou * (pops.rho_22 - pops.rho_uu)),
    };
    let dq = CoherenceBlock {
        rho_2w: -coh.rho_2w * Complex::new((two * n + T::one()) * g, delta)
            - i * c(ou) * coh.rho_wu.conj(),
        rho_wu: -coh.rho_wu * c(n * g) + i * c(ou) * coh.rho_2w.conj(),
    };
    Ok((dp, dq))
}
