#![allow(dead_code)]

use nalgebra::Complex;
use qd_cascade::linalg::{c, Op3};
use qd_cascade::model::{DensityMatrix, DriveCase, SystemParams};
use qd_cascade::{BasisKind, Params};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_params(rng: &mut impl Rng) -> Params {
    SystemParams {
        gamma1: rng.random_range(0.1..5.0),
        gamma3: rng.random_range(0.1..5.0),
        big_gamma2: rng.random_range(0.0..2.0),
        big_gamma3: rng.random_range(0.0..2.0),
        omega1: rng.random_range(-5.0..5.0),
        omega3: rng.random_range(-5.0..5.0),
        delta: rng.random_range(-5.0..5.0),
        nbar: rng.random_range(0.0..2.0),
    }
}

/// Random parameters with Ω_w = 0.
pub fn random_ow_zero(rng: &mut impl Rng, radiative: bool) -> Params {
    let mut p = random_params(rng);
    if !radiative {
        p.big_gamma2 = 0.0;
        p.big_gamma3 = 0.0;
    }
    DriveCase::OmegaWZero.apply(&p).unwrap()
}

pub fn random_complex(rng: &mut impl Rng) -> Complex<f64> {
    Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// Hermitian with unit trace, not necessarily positive.
pub fn random_unit_trace_hermitian(rng: &mut impl Rng) -> Op3<f64> {
    let a = Op3::from_fn(|_, _| random_complex(rng));
    let h = (a + a.adjoint()) * c(0.5);
    let shift = (1.0 - h.trace().re) / 3.0;
    h + Op3::identity() * c(shift)
}

pub fn random_density(rng: &mut impl Rng, basis: BasisKind) -> DensityMatrix<f64> {
    let a = Op3::from_fn(|_, _| random_complex(rng));
    let m = a * a.adjoint();
    let tr = m.trace().re;
    DensityMatrix::new(m / c(tr), basis).unwrap()
}

pub fn max_abs(m: &Op3<f64>) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}
