//! Steady states by a constrained linear solve and transients by adaptive
//! RK4 on the vectorized master equation.

use nalgebra::{Complex, ComplexField, SVector};

use crate::error::{Error, Result};
use crate::generator::{
    check_reduced_regime, rhs_reduced, CoherenceBlock, PopulationBlock, Superoperator,
};
use crate::linalg::{self, c, Vec9};
use crate::model::{DensityMatrix, SystemParams};
use crate::Real;

/// Step control for [`evolve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig<T> {
    pub dt_initial: T,
    pub rel_tol: T,
    pub abs_tol: T,
    /// Upper bound on attempted steps (accepted or rejected).
    pub max_steps: usize,
}

impl<T: Real> Default for IntegratorConfig<T> {
    fn default() -> Self {
        Self {
            dt_initial: T::lit(1e-3),
            rel_tol: T::lit(1e-8),
            abs_tol: T::lit(1e-10),
            max_steps: 5_000_000,
        }
    }
}

impl<T: Real> IntegratorConfig<T> {
    /// Default tolerances with a first step that resolves both the decay
    /// and the beat time scales of `params`.
    pub fn for_params(params: &SystemParams<T>) -> Result<Self> {
        params.validate()?;
        let (ow, ou) = params.rabi_pair()?;
        let two = T::lit(2.0);
        let decay = params.big_gamma2
            + params.big_gamma3
            + (two * params.nbar + T::one()) * params.total_rate();
        let fastest = ow.abs().max(ou.abs()).max(params.delta.abs()).max(T::one());
        let dt = T::lit(0.5) * (T::one() / decay).min(T::one() / (T::lit(4.0) * fastest));
        Ok(Self {
            dt_initial: dt,
            ..Self::default()
        })
    }

    pub fn with_tolerances(mut self, rel_tol: T, abs_tol: T) -> Self {
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |x: T| x > T::zero() && x.is_finite();
        if !(ok(self.dt_initial) && ok(self.rel_tol) && ok(self.abs_tol)) || self.max_steps == 0 {
            return Err(Error::InvalidParameters(
                "integrator settings must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyStateResult<T: Real> {
    pub state: DensityMatrix<T>,
    /// `‖L vec ρ‖₂` of the returned state.
    pub residual: T,
}

/// Solves `L vec ρ = 0` with `Tr ρ = 1` by replacing the `(0,0)` row of `L`
/// with the trace row.
pub fn steady_state<T: Real>(generator: &Superoperator<T>) -> Result<SteadyStateResult<T>> {
    let l = generator.entries;
    let mut a = l;
    for k in 0..9 {
        a[(0, k)] = if k % 4 == 0 { c(T::one()) } else { c(T::zero()) };
    }
    let sv = a.singular_values();
    let (smax, smin) = sv.iter().fold((T::zero(), T::max_value().unwrap_or(T::one())), |(hi, lo), s| {
        (hi.max(*s), lo.min(*s))
    });
    if !(smin > T::tol(1e-13) * smax) {
        let lsv = l.singular_values();
        let lmax = lsv.iter().fold(T::zero(), |m, s| m.max(*s));
        let null_dim = lsv.iter().filter(|s| **s <= T::tol(1e-13) * lmax).count();
        return Err(Error::DegenerateSteadyState {
            null_dim: null_dim.max(2),
        });
    }
    let mut rhs = Vec9::zeros();
    rhs[0] = c(T::one());
    let x = a.lu().solve(&rhs).ok_or(Error::DegenerateSteadyState { null_dim: 2 })?;
    let state = DensityMatrix::from_hermitian_part(linalg::unvectorize(&x), generator.basis);
    let residual = (l * linalg::vectorize(&state.entries)).norm();
    let scale = T::one().max(linalg::max_abs(&l));
    let tolerance = T::tol(1e-9) * scale;
    if !(residual <= tolerance) {
        return Err(Error::SteadyStateResidual {
            residual: residual.as_f64(),
            tolerance: tolerance.as_f64(),
        });
    }
    state.validate()?;
    Ok(SteadyStateResult { state, residual })
}

/// Sampled trajectory of density matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries<T: Real> {
    pub times: Vec<T>,
    pub states: Vec<DensityMatrix<T>>,
    pub basis: crate::model::BasisKind,
    /// Sum of the accepted local error estimates (max-norm on the state vector).
    pub error_estimate: T,
}

/// Sample times `0, Δs, 2Δs, …` plus `t_max` if it is not on the grid.
pub fn sample_times<T: Real>(t_max: T, sample_every: T) -> Result<Vec<T>> {
    if !(t_max > T::zero() && t_max.is_finite()) {
        return Err(Error::InvalidParameters("t_max must be positive".into()));
    }
    if !(sample_every > T::zero() && sample_every.is_finite()) {
        return Err(Error::InvalidParameters("sample_every must be positive".into()));
    }
    let slack = T::lit(1e-9) * sample_every;
    let mut times = Vec::new();
    let mut k = 0usize;
    loop {
        let t = sample_every * T::from_usize(k).unwrap_or_else(T::zero);
        if t > t_max - slack {
            break;
        }
        times.push(t);
        k += 1;
    }
    times.push(t_max);
    Ok(times)
}

fn max_norm<T: Real, S: ComplexField<RealField = T>, const N: usize>(v: &SVector<S, N>) -> T {
    v.iter().fold(T::zero(), |acc, z| acc.max(z.clone().modulus()))
}

fn rk4<T, S, const N: usize, F>(f: &F, y: &SVector<S, N>, h: T) -> SVector<S, N>
where
    T: Real,
    S: ComplexField<RealField = T> + Copy,
    F: Fn(&SVector<S, N>) -> SVector<S, N>,
{
    let h = S::from_real(h);
    let half = S::from_real(T::lit(0.5));
    let k1 = f(y);
    let k2 = f(&(y + k1 * (h * half)));
    let k3 = f(&(y + k2 * (h * half)));
    let k4 = f(&(y + k3 * h));
    let sixth = S::from_real(T::lit(1.0 / 6.0));
    y + (k1 + (k2 + k3) * S::from_real(T::lit(2.0)) + k4) * (h * sixth)
}

/// Integrates the autonomous system `y' = f(y)` with RK4 and step doubling,
/// calling `on_sample` at every entry of `times` (which must start at 0 and
/// increase strictly). Returns the accumulated error estimate.
pub(crate) fn integrate<T, S, const N: usize, F, G>(
    f: F,
    y0: SVector<S, N>,
    times: &[T],
    config: &IntegratorConfig<T>,
    mut on_sample: G,
) -> Result<T>
where
    T: Real,
    S: ComplexField<RealField = T> + Copy,
    F: Fn(&SVector<S, N>) -> SVector<S, N>,
    G: FnMut(T, &SVector<S, N>) -> Result<()>,
{
    config.validate()?;
    let lit = T::lit;
    let fifteen = S::from_real(lit(15.0));
    let mut y = y0;
    let mut t = T::zero();
    let mut h = config.dt_initial;
    let mut attempts = 0usize;
    let mut total_error = T::zero();
    let span = times.last().copied().unwrap_or_else(T::zero);
    let h_min = lit(1e-14) * span.max(T::one());

    for &target in times {
        while t < target {
            let remaining = target - t;
            let clamped = h >= remaining;
            let step = if clamped { remaining } else { h };
            attempts += 1;
            if attempts > config.max_steps {
                return Err(Error::IntegrationFailure {
                    last_time: t.as_f64(),
                    reason: format!("exceeded {} steps", config.max_steps),
                });
            }
            let full = rk4(&f, &y, step);
            let mid = rk4(&f, &y, step * lit(0.5));
            let half = rk4(&f, &mid, step * lit(0.5));
            let diff = half - full;
            let err = max_norm(&diff) / lit(15.0);
            let scale = config.abs_tol + config.rel_tol * max_norm(&y);
            if !err.is_finite() {
                return Err(Error::IntegrationFailure {
                    last_time: t.as_f64(),
                    reason: "non-finite state".into(),
                });
            }
            let factor = if err > T::zero() {
                (lit(0.9) * (scale / err).powf(lit(0.2))).clamp(lit(0.1), lit(5.0))
            } else {
                lit(5.0)
            };
            if err <= scale {
                y = half + diff / fifteen;
                total_error += err;
                t = if clamped { target } else { t + step };
                let proposal = step * factor;
                h = if clamped { h.max(proposal) } else { proposal };
            } else {
                h = step * factor;
                if h < h_min {
                    return Err(Error::IntegrationFailure {
                        last_time: t.as_f64(),
                        reason: "step size underflow".into(),
                    });
                }
            }
        }
        on_sample(target, &y)?;
    }
    Ok(total_error)
}

fn checked_sample<T: Real>(
    t: T,
    y: &Vec9<T>,
    basis: crate::model::BasisKind,
) -> Result<DensityMatrix<T>> {
    let rho = DensityMatrix::from_hermitian_part(linalg::unvectorize(y), basis);
    let trace = rho.trace();
    if (trace - T::one()).abs() > T::tol(1e-9) {
        return Err(Error::IntegrationFailure {
            last_time: t.as_f64(),
            reason: format!("trace drifted to {}", trace.as_f64()),
        });
    }
    let min = rho.min_eigenvalue();
    if min < -T::tol(1e-9) {
        return Err(Error::NegativeEigenvalue {
            time: t.as_f64(),
            value: min.as_f64(),
            trace: trace.as_f64(),
            populations: [0, 1, 2].map(|i| rho.population(i).as_f64()),
        });
    }
    Ok(rho)
}

/// Like [`evolve`] but hands each checked sample to `on_sample` as soon as it
/// is reached, so partial results survive a later failure.
pub fn evolve_streaming<T: Real, G>(
    generator: &Superoperator<T>,
    rho0: &DensityMatrix<T>,
    t_max: T,
    config: &IntegratorConfig<T>,
    sample_every: T,
    mut on_sample: G,
) -> Result<T>
where
    G: FnMut(T, &DensityMatrix<T>) -> Result<()>,
{
    if rho0.basis != generator.basis {
        return Err(Error::BasisMismatch {
            expected: generator.basis,
            found: rho0.basis,
        });
    }
    rho0.validate()?;
    let times = sample_times(t_max, sample_every)?;
    let l = generator.entries;
    let basis = generator.basis;
    integrate::<T, Complex<T>, 9, _, _>(
        |y| l * y,
        linalg::vectorize(&rho0.entries),
        &times,
        config,
        |t, y| on_sample(t, &checked_sample(t, y, basis)?),
    )
}

pub fn evolve<T: Real>(
    generator: &Superoperator<T>,
    rho0: &DensityMatrix<T>,
    t_max: T,
    config: &IntegratorConfig<T>,
    sample_every: T,
) -> Result<TimeSeries<T>> {
    let mut times = Vec::new();
    let mut states = Vec::new();
    let error_estimate = evolve_streaming(generator, rho0, t_max, config, sample_every, |t, rho| {
        times.push(t);
        states.push(*rho);
        Ok(())
    })?;
    Ok(TimeSeries {
        times,
        states,
        basis: generator.basis,
        error_estimate,
    })
}

/// Sampled solutions of the two decoupled blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedTrajectory<T: Real> {
    pub times: Vec<T>,
    pub populations: Vec<PopulationBlock<T>>,
    pub coherences: Vec<CoherenceBlock<T>>,
}

/// Integrates the population block and the coherence block separately
/// (Ω_w = 0, Γ₂ = Γ₃ = 0 only).
pub fn evolve_reduced<T: Real>(
    params: &SystemParams<T>,
    init4: &PopulationBlock<T>,
    init2: &CoherenceBlock<T>,
    t_max: T,
    config: &IntegratorConfig<T>,
    sample_every: T,
) -> Result<ReducedTrajectory<T>> {
    check_reduced_regime(params)?;
    let times = sample_times(t_max, sample_every)?;
    let zero_p = PopulationBlock {
        rho_22: T::zero(),
        rho_ww: T::zero(),
        rho_uu: T::zero(),
        rho_2u: c(T::zero()),
    };
    let zero_q = CoherenceBlock {
        rho_2w: c(T::zero()),
        rho_wu: c(T::zero()),
    };

    let pack_p = |p: &PopulationBlock<T>| {
        SVector::<T, 5>::new(p.rho_22, p.rho_ww, p.rho_uu, p.rho_2u.re, p.rho_2u.im)
    };
    let unpack_p = |v: &SVector<T, 5>| PopulationBlock {
        rho_22: v[0],
        rho_ww: v[1],
        rho_uu: v[2],
        rho_2u: Complex::new(v[3], v[4]),
    };
    let pack_q = |q: &CoherenceBlock<T>| {
        SVector::<T, 4>::new(q.rho_2w.re, q.rho_2w.im, q.rho_wu.re, q.rho_wu.im)
    };
    let unpack_q = |v: &SVector<T, 4>| CoherenceBlock {
        rho_2w: Complex::new(v[0], v[1]),
        rho_wu: Complex::new(v[2], v[3]),
    };

    // the regime was checked above, so the block right-hand sides cannot fail
    let mut populations = Vec::with_capacity(times.len());
    integrate::<T, T, 5, _, _>(
        |v| {
            let (dp, _) = rhs_reduced(params, &unpack_p(v), &zero_q).expect("regime checked");
            pack_p(&dp)
        },
        pack_p(init4),
        &times,
        config,
        |_, v| {
            populations.push(unpack_p(v));
            Ok(())
        },
    )?;
    let mut coherences = Vec::with_capacity(times.len());
    integrate::<T, T, 4, _, _>(
        |v| {
            let (_, dq) = rhs_reduced(params, &zero_p, &unpack_q(v)).expect("regime checked");
            pack_q(&dq)
        },
        pack_q(init2),
        &times,
        config,
        |_, v| {
            coherences.push(unpack_q(v));
            Ok(())
        },
    )?;
    Ok(ReducedTrajectory {
        times,
        populations,
        coherences,
    })
}
