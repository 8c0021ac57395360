//! Genus-zero Gromov–Witten invariants of the projective plane and the
//! derivatives of the quantum potential.
//!
//! The degree-d invariant N_d counts rational plane curves of degree d
//! through 3d−1 general points. The whole tower is forced by associativity
//! of the quantum product (the WDVV equations) starting from N_1 = 1, and
//! the quantum part of the potential is
//!
//! ```text
//! Φ_q(t₂, t₃) = Σ_{d≥1} N_d e^{d t₂} t₃^{3d−1} / (3d−1)!
//! ```
//!
//! Throughout the crate the fiber coordinates are abbreviated Q = e^{t₂}
//! and t = t₃, so a mixed derivative ∂₂^a ∂₃^b Φ_q restricted to the locus
//! t₁ = 0 is the series Σ_d d^a N_d Q^d t^{3d−1−b}/(3d−1−b)!, a power
//! series in t with polynomial coefficients in Q. The classical (cubic)
//! part of the potential contributes nothing to these derivatives on that
//! locus, so the quantum part is the whole story here.

use crate::scalar::{Rat, Ring};
use crate::series::TruncatedSeries;
use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Polynomial in Q = e^{t₂} with rational coefficients.
pub type QPoly = TruncatedSeries<Rat>;

/// Power series in t = t₃ with polynomial-in-Q coefficients.
pub type TQSeries = TruncatedSeries<QPoly>;

/// Binomial coefficient C(n, k) as a big integer.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for j in 0..k {
        acc = acc * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    acc
}

/// The invariants N_1, …, N_{d_max} by the associativity recursion
///
/// ```text
/// N_d = Σ_{m=1}^{d−1} [ C(3d−4, 3m−2)·m²(d−m)² − C(3d−4, 3m−3)·m(d−m)³ ] N_m N_{d−m}.
/// ```
///
/// Index 0 of the returned vector is unused (zero); entry d is N_d.
pub fn kontsevich_numbers(d_max: usize) -> Vec<BigInt> {
    let mut n = vec![BigInt::zero(); d_max + 1];
    if d_max >= 1 {
        n[1] = BigInt::one();
    }
    for d in 2..=d_max {
        let mut acc = BigInt::zero();
        for m in 1..d {
            let k = d - m;
            let c1 = binomial(3 * d as u64 - 4, 3 * m as u64 - 2);
            let c2 = binomial(3 * d as u64 - 4, 3 * m as u64 - 3);
            let mb = BigInt::from(m);
            let kb = BigInt::from(k);
            let weight = c1 * (&mb * &mb) * (&kb * &kb) - c2 * &mb * (&kb * &kb * &kb);
            acc += weight * &n[m] * &n[k];
        }
        n[d] = acc;
    }
    n
}

/// Largest degree whose term t^{3d−1−threes} can appear below `t_order`.
pub fn degree_bound(t_order: i64, threes: u32) -> usize {
    if t_order <= 0 {
        return 0;
    }
    ((t_order + threes as i64) / 3).max(0) as usize
}

/// The derivative ∂₂^twos ∂₃^threes of the quantum potential, restricted to
/// t₁ = 0 and expanded modulo t^t_order.
///
/// At least two derivatives must be taken: with fewer, the classical cubic
/// term of the potential would also contribute on this locus.
pub fn potential_derivative(twos: u32, threes: u32, t_order: i64) -> TQSeries {
    assert!(
        twos + threes >= 2,
        "need at least a second derivative for the classical part to drop out"
    );
    assert!(t_order >= 1, "truncation order must be positive");
    let d_max = degree_bound(t_order, threes);
    let nd = kontsevich_numbers(d_max);
    let mut out = TQSeries::new(Some("t"), 0, Vec::new(), t_order);
    for d in 1..=d_max {
        let e = 3 * d as i64 - 1 - threes as i64;
        if e < 0 || e >= t_order {
            continue;
        }
        // d^twos · N_d / e!
        let mut num = nd[d].clone();
        for _ in 0..twos {
            num *= BigInt::from(d);
        }
        let mut fact = BigInt::one();
        for j in 2..=e {
            fact *= BigInt::from(j);
        }
        let c = Rat::new(num, fact);
        let coeff = QPoly::monomial(Some("Q"), d as i64, c);
        out = out.add_ref(&TQSeries::monomial(Some("t"), e, coeff).truncate(t_order));
    }
    out
}

/// Residual of the associativity (WDVV) identity for the plane,
///
/// ```text
/// Φ₃₃₃ = Φ₂₂₃² − Φ₂₂₂ Φ₂₃₃,
/// ```
///
/// as a series in t modulo t^t_order. Associativity of the quantum product
/// makes this identically zero; it is the identity whose degree-by-degree
/// expansion is the recursion in [`kontsevich_numbers`].
pub fn wdvv_residual(t_order: i64) -> TQSeries {
    let f333 = potential_derivative(0, 3, t_order);
    let f223 = potential_derivative(2, 1, t_order);
    let f222 = potential_derivative(3, 0, t_order);
    let f233 = potential_derivative(1, 2, t_order);
    let rhs = f223.mul_ref(&f223).sub_ref(&f222.mul_ref(&f233));
    f333.sub_ref(&rhs).truncate(t_order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rat_int};

    #[test]
    fn binomials() {
        assert_eq!(binomial(10, 3), BigInt::from(120));
        assert_eq!(binomial(2, 0), BigInt::from(1));
        assert_eq!(binomial(3, 5), BigInt::from(0));
        assert_eq!(binomial(20, 10), BigInt::from(184756));
    }

    #[test]
    fn curve_counts_through_degree_six() {
        let n = kontsevich_numbers(6);
        let expect: [i64; 7] = [0, 1, 1, 12, 620, 87304, 26312976];
        for (d, &e) in expect.iter().enumerate() {
            assert_eq!(n[d], BigInt::from(e), "N_{d}");
        }
    }

    #[test]
    fn derivative_values_on_the_small_locus() {
        // Φ₃₃ = Q + O(t), Φ₂₃₃ = Q + O(t), Φ₂₃ and Φ₂₂ vanish at t = 0,
        // Φ₃₃₃ = O(t²).
        let f33 = potential_derivative(0, 2, 8);
        assert_eq!(f33.coeff(0), QPoly::monomial(Some("Q"), 1, rat_int(1)));
        let f233 = potential_derivative(1, 2, 8);
        assert_eq!(f233.coeff(0), QPoly::monomial(Some("Q"), 1, rat_int(1)));
        let f23 = potential_derivative(1, 1, 8);
        assert!(f23.coeff(0).is_zero());
        let f22 = potential_derivative(2, 0, 8);
        assert!(f22.coeff(0).is_zero());
        let f333 = potential_derivative(0, 3, 8);
        assert!(f333.coeff(0).is_zero());
        assert!(f333.coeff(1).is_zero());
    }

    #[test]
    fn sample_coefficient_of_f233() {
        // [Q³ t⁶] Φ₂₃₃ = 3·N₃/6! = 36/720 = 1/20.
        let f233 = potential_derivative(1, 2, 8);
        assert_eq!(f233.coeff(6).coeff(3), rat(1, 20));
        // [Q³ t⁵] of ∂₂∂₃³Φ is 3·N₃/5! = 3/10 for comparison.
        let f2333 = potential_derivative(1, 3, 8);
        assert_eq!(f2333.coeff(5).coeff(3), rat(3, 10));
    }

    #[test]
    fn associativity_residual_vanishes_to_high_order() {
        let r = wdvv_residual(20);
        assert!(r.is_zero(), "associativity residual should vanish: {r:?}");
    }

    #[test]
    fn discriminating_form_of_the_identity() {
        // The same identity with Φ₂₃₃² in place of Φ₂₂₃² is false already at
        // t = 0 (left side 0, right side Q²): a guard that the quadratic
        // term really is the doubly-∂₂ one.
        let t_order = 8;
        let f333 = potential_derivative(0, 3, t_order);
        let f233 = potential_derivative(1, 2, t_order);
        let f222 = potential_derivative(3, 0, t_order);
        let wrong = f233
            .mul_ref(&f233)
            .sub_ref(&f222.mul_ref(&f233));
        let residual = f333.sub_ref(&wrong).truncate(t_order);
        assert!(!residual.is_zero());
        let c0 = residual.coeff(0);
        assert_eq!(c0, QPoly::monomial(Some("Q"), 2, rat_int(-1)));
    }
}
