//! Fixed-size complex matrices for a three-level system and the row-major
//! vectorization used by every superoperator in the crate:
//! `vec(ρ)[3i + j] = ρ[(i, j)]`.

use nalgebra::{Complex, SMatrix, SVector};

use crate::Real;

/// 3×3 complex operator on the system Hilbert space.
pub type Op3<T> = SMatrix<Complex<T>, 3, 3>;
/// 9×9 complex matrix acting on vectorized density matrices.
pub type Op9<T> = SMatrix<Complex<T>, 9, 9>;
/// Row-major vectorization of a 3×3 matrix.
pub type Vec9<T> = SVector<Complex<T>, 9>;
/// Complex 3-vector (state amplitudes).
pub type Ket<T> = SVector<Complex<T>, 3>;

#[inline]
pub fn c<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

#[inline]
pub fn ci<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

/// Imaginary unit.
#[inline]
pub fn i_unit<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::one())
}

/// `|z|` without requiring `num_traits::Float`.
#[inline]
pub fn modulus<T: Real>(z: Complex<T>) -> T {
    z.norm_sqr().sqrt()
}

/// Transition operator `|i⟩⟨j|` in whatever basis the indices refer to.
pub fn transition<T: Real>(i: usize, j: usize) -> Op3<T> {
    let mut m = Op3::zeros();
    m[(i, j)] = Complex::new(T::one(), T::zero());
    m
}

pub fn vectorize<T: Real>(m: &Op3<T>) -> Vec9<T> {
    Vec9::from_fn(|k, _| m[(k / 3, k % 3)])
}

pub fn unvectorize<T: Real>(v: &Vec9<T>) -> Op3<T> {
    Op3::from_fn(|i, j| v[3 * i + j])
}

/// Kronecker product of two 3×3 matrices.
pub fn kron<T: Real>(a: &Op3<T>, b: &Op3<T>) -> Op9<T> {
    Op9::from_fn(|r, s| a[(r / 3, s / 3)] * b[(r % 3, s % 3)])
}

/// Superoperator of `ρ ↦ Xρ`.
pub fn left_mul<T: Real>(x: &Op3<T>) -> Op9<T> {
    kron(x, &Op3::identity())
}

/// Superoperator of `ρ ↦ ρX`.
pub fn right_mul<T: Real>(x: &Op3<T>) -> Op9<T> {
    kron(&Op3::identity(), &x.transpose())
}

/// Superoperator of `ρ ↦ UρU†`.
pub fn conjugation<T: Real>(u: &Op3<T>) -> Op9<T> {
    left_mul(u) * right_mul(&u.adjoint())
}

/// Superoperator of `ρ ↦ −i[H, ρ]`.
pub fn commutator<T: Real>(h: &Op3<T>) -> Op9<T> {
    (left_mul(h) - right_mul(h)) * -i_unit::<T>()
}

/// Generalized dissipator `ρ ↦ [Lρ, M†] + [L, ρM†] = 2LρM† − M†Lρ − ρM†L`.
///
/// `cross_dissipator(L, L)` is the ordinary `D[L]` without a ½ prefactor.
pub fn cross_dissipator<T: Real>(l: &Op3<T>, m: &Op3<T>) -> Op9<T> {
    let m_dag = m.adjoint();
    let md_l = m_dag * l;
    left_mul(l) * right_mul(&m_dag) * c(T::lit(2.0)) - left_mul(&md_l) - right_mul(&md_l)
}

/// `D[L]ρ = 2LρL† − L†Lρ − ρL†L`.
pub fn dissipator<T: Real>(l: &Op3<T>) -> Op9<T> {
    cross_dissipator(l, l)
}

/// `(ρ + ρ†)/2`.
pub fn hermitian_part<T: Real>(m: &Op3<T>) -> Op3<T> {
    (m + m.adjoint()) * c(T::lit(0.5))
}

/// Largest entry modulus of `m − m†`.
pub fn hermiticity_defect<T: Real>(m: &Op3<T>) -> T {
    (m - m.adjoint()).iter().fold(T::zero(), |acc, z| acc.max(modulus(*z)))
}

/// Largest entry modulus.
pub fn max_abs<const R: usize, const C: usize, T: Real>(m: &SMatrix<Complex<T>, R, C>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc.max(modulus(*z)))
}

/// Eigenvalues of a Hermitian 3×3 matrix in ascending order. Only the
/// Hermitian part of `m` is used.
pub fn hermitian_eigenvalues<T: Real>(m: &Op3<T>) -> [T; 3] {
    let vals = hermitian_part(m).symmetric_eigenvalues();
    let mut out = [vals[0], vals[1], vals[2]];
    out.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Op3<f64> {
        Op3::from_fn(|i, j| Complex::new((i * 3 + j) as f64 * 0.1 + 0.05, (i as f64) - (j as f64) * 0.3))
    }

    #[test]
    fn vectorization_is_row_major() {
        let m = sample();
        let v = vectorize(&m);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(v[3 * i + j], m[(i, j)]);
            }
        }
        assert_eq!(unvectorize(&v), m);
    }

    #[test]
    fn multiplication_maps_match_matrix_products() {
        let x = sample();
        let rho = sample().adjoint() * c(0.7);
        let lhs = unvectorize(&(left_mul(&x) * vectorize(&rho)));
        let rhs = unvectorize(&(right_mul(&x) * vectorize(&rho)));
        assert!(max_abs(&(lhs - x * rho)) < 1e-14);
        assert!(max_abs(&(rhs - rho * x)) < 1e-14);
    }

    #[test]
    fn dissipator_matches_direct_formula() {
        let l = sample();
        let rho = sample() * sample().adjoint();
        let direct = l * rho * l.adjoint() * c(2.0) - l.adjoint() * l * rho - rho * l.adjoint() * l;
        let via = unvectorize(&(dissipator(&l) * vectorize(&rho)));
        assert!(max_abs(&(direct - via)) < 1e-12);
    }

    #[test]
    fn eigenvalues_of_diagonal() {
        let mut m = Op3::<f64>::zeros();
        m[(0, 0)] = c(0.5);
        m[(1, 1)] = c(-0.25);
        m[(2, 2)] = c(0.75);
        let ev = hermitian_eigenvalues(&m);
        assert!((ev[0] + 0.25).abs() < 1e-14);
        assert!((ev[1] - 0.5).abs() < 1e-14);
        assert!((ev[2] - 0.75).abs() < 1e-14);
    }
}
