//! Polynomials and fractions in the two base coordinates Q and λ of the
//! small quantum cohomology frame.
//!
//! The discriminant of the quantum multiplication by the hyperplane class
//! at t = 0 is λ³ − 27Q, and every matrix the second-structure-connection
//! calculus inverts has determinant a unit multiple of a power of λ times a
//! power of that discriminant. [`Frac2`] therefore restricts denominators
//! to the lattice λ^a·(λ³−27Q)^b — poles anywhere else would signal a bug,
//! and the representation makes that a type-level impossibility.
//!
//! Weights: Q carries weight 3, λ weight 1 (so λ³ − 27Q is homogeneous of
//! weight 3). The Euler field acts accordingly and homogeneity is used as
//! a cross-check throughout.

use crate::scalar::{rat_int, Field, Rat, Ring};
use std::collections::BTreeMap;
use std::fmt;

/// Exponents (q_pow, lam_pow) of a monomial Q^i λ^j.
pub type Exp2 = (u32, u32);

/// Polynomial in Q and λ over the rationals.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Poly2 {
    terms: BTreeMap<Exp2, Rat>,
}

impl Poly2 {
    pub fn monomial(exp: Exp2, c: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        Poly2 { terms }
    }

    pub fn constant(c: Rat) -> Self {
        Self::monomial((0, 0), c)
    }

    /// The coordinate Q.
    pub fn q() -> Self {
        Self::monomial((1, 0), Rat::one())
    }

    /// The coordinate λ.
    pub fn lam() -> Self {
        Self::monomial((0, 1), Rat::one())
    }

    /// The discriminant λ³ − 27Q.
    pub fn disc() -> Self {
        Self::monomial((0, 3), Rat::one()).add_ref(&Self::monomial((1, 0), rat_int(-27)))
    }

    pub fn coeff(&self, exp: Exp2) -> Rat {
        self.terms.get(&exp).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exp2, &Rat)> {
        self.terms.iter()
    }

    pub fn mul_monomial(&self, (i, j): Exp2) -> Self {
        Poly2 {
            terms: self
                .terms
                .iter()
                .map(|(&(a, b), c)| ((a + i, b + j), c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Poly2 {
            terms: self.terms.iter().map(|(e, v)| (*e, v * c)).collect(),
        }
    }

    /// Largest λ-exponent, or `None` for the zero polynomial.
    pub fn deg_lam(&self) -> Option<u32> {
        self.terms.keys().map(|&(_, j)| j).max()
    }

    /// Smallest λ-exponent appearing, or `None` for zero.
    pub fn min_lam(&self) -> Option<u32> {
        self.terms.keys().map(|&(_, j)| j).min()
    }

    /// ∂/∂Q.
    pub fn deriv_q(&self) -> Self {
        let mut terms = BTreeMap::new();
        for (&(i, j), c) in &self.terms {
            if i > 0 {
                terms.insert((i - 1, j), c * rat_int(i as i64));
            }
        }
        Poly2 { terms }
    }

    /// ∂/∂λ.
    pub fn deriv_lam(&self) -> Self {
        let mut terms = BTreeMap::new();
        for (&(i, j), c) in &self.terms {
            if j > 0 {
                terms.insert((i, j - 1), c * rat_int(j as i64));
            }
        }
        Poly2 { terms }
    }

    /// Weight of a homogeneous polynomial under wt(Q) = 3, wt(λ) = 1;
    /// `None` when inhomogeneous or zero.
    pub fn weight(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(|&(i, j)| 3 * i + j);
        let first = it.next()?;
        it.all(|w| w == first).then_some(first)
    }

    /// Exact division by the discriminant λ³ − 27Q, if possible.
    pub fn div_disc_exact(&self) -> Option<Poly2> {
        let mut rem = self.clone();
        let mut quo = Poly2::zero();
        // λ³ − 27Q is monic in λ, so divide as polynomials in λ.
        while let Some(deg) = rem.deg_lam() {
            if deg < 3 {
                return None;
            }
            // All top-degree terms at once.
            let tops: Vec<(Exp2, Rat)> = rem
                .terms
                .iter()
                .filter(|(&(_, j), _)| j == deg)
                .map(|(&e, c)| (e, c.clone()))
                .collect();
            let mut step = Poly2::zero();
            for ((i, _), c) in tops {
                step = step.add_ref(&Poly2::monomial((i, deg - 3), c));
            }
            quo = quo.add_ref(&step);
            rem = rem.sub_ref(&step.mul_ref(&Poly2::disc()));
        }
        rem.is_zero().then_some(quo)
    }
}

impl Ring for Poly2 {
    fn zero() -> Self {
        Self::default()
    }
    fn one() -> Self {
        Self::constant(Rat::one())
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add_ref(&self, rhs: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (e, c) in &rhs.terms {
            let slot = terms.entry(*e).or_insert_with(Rat::zero);
            *slot = &*slot + c;
            if slot.is_zero() {
                terms.remove(e);
            }
        }
        Poly2 { terms }
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        self.add_ref(&rhs.neg_ref())
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        let mut terms: BTreeMap<Exp2, Rat> = BTreeMap::new();
        for (&(a1, b1), u) in &self.terms {
            for (&(a2, b2), v) in &rhs.terms {
                let e = (a1 + a2, b1 + b2);
                let slot = terms.entry(e).or_insert_with(Rat::zero);
                *slot = &*slot + u * v;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Poly2 { terms }
    }
    fn neg_ref(&self) -> Self {
        Poly2 {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
    fn from_i64(n: i64) -> Self {
        Self::constant(rat_int(n))
    }
}

impl fmt::Display for Poly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(i, j), c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            for (sym, e) in [("Q", i), ("lam", j)] {
                match e {
                    0 => {}
                    1 => write!(f, "*{sym}")?,
                    _ => write!(f, "*{sym}^{e}")?,
                }
            }
        }
        Ok(())
    }
}

/// Rational function in Q and λ whose denominator is λ^a·(λ³−27Q)^b.
/// Common factors of λ and the discriminant are cancelled eagerly, so
/// equality is structural.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Frac2 {
    num: Poly2,
    lam_pow: u32,
    disc_pow: u32,
}

impl Frac2 {
    pub fn new(num: Poly2, lam_pow: u32, disc_pow: u32) -> Self {
        Frac2 {
            num,
            lam_pow,
            disc_pow,
        }
        .normalized()
    }

    pub fn from_poly(num: Poly2) -> Self {
        Frac2 {
            num,
            lam_pow: 0,
            disc_pow: 0,
        }
    }

    pub fn num(&self) -> &Poly2 {
        &self.num
    }

    /// Denominator exponents (power of λ, power of λ³−27Q).
    pub fn den_powers(&self) -> (u32, u32) {
        (self.lam_pow, self.disc_pow)
    }

    /// The denominator multiplied out as a polynomial.
    pub fn den_poly(&self) -> Poly2 {
        let mut d = Poly2::one().mul_monomial((0, self.lam_pow));
        for _ in 0..self.disc_pow {
            d = d.mul_ref(&Poly2::disc());
        }
        d
    }

    pub fn is_polynomial(&self) -> bool {
        self.lam_pow == 0 && self.disc_pow == 0
    }

    pub fn expect_polynomial(&self) -> &Poly2 {
        assert!(
            self.is_polynomial(),
            "value still has a lam^{}·disc^{} denominator",
            self.lam_pow,
            self.disc_pow
        );
        &self.num
    }

    fn normalized(mut self) -> Self {
        if self.num.is_zero() {
            self.lam_pow = 0;
            self.disc_pow = 0;
            return self;
        }
        let cancel = self.num.min_lam().unwrap().min(self.lam_pow);
        if cancel > 0 {
            self.num = Poly2 {
                terms: self
                    .num
                    .terms
                    .iter()
                    .map(|(&(i, j), c)| ((i, j - cancel), c.clone()))
                    .collect(),
            };
            self.lam_pow -= cancel;
        }
        while self.disc_pow > 0 {
            match self.num.div_disc_exact() {
                Some(q) => {
                    self.num = q;
                    self.disc_pow -= 1;
                }
                None => break,
            }
        }
        self
    }

    pub fn scale(&self, c: &Rat) -> Self {
        Frac2 {
            num: self.num.scale(c),
            lam_pow: self.lam_pow,
            disc_pow: self.disc_pow,
        }
        .normalized()
    }

    /// ∂/∂λ by the quotient rule (∂λ(λ³−27Q) = 3λ²).
    pub fn deriv_lam(&self) -> Self {
        let a = rat_int(self.lam_pow as i64);
        let b = rat_int(self.disc_pow as i64);
        // [∂n·λ·Δ − a·n·Δ − 3b·n·λ³] / λ^{a+1} Δ^{b+1}
        let t1 = self
            .num
            .deriv_lam()
            .mul_monomial((0, 1))
            .mul_ref(&Poly2::disc());
        let t2 = self.num.mul_ref(&Poly2::disc()).scale(&a);
        let t3 = self.num.mul_monomial((0, 3)).scale(&(rat_int(3) * b));
        Frac2::new(
            t1.sub_ref(&t2).sub_ref(&t3),
            self.lam_pow + 1,
            self.disc_pow + 1,
        )
    }

    /// ∂/∂Q by the quotient rule (∂_Q(λ³−27Q) = −27).
    pub fn deriv_q(&self) -> Self {
        let b = rat_int(self.disc_pow as i64);
        // [∂_Q n·Δ + 27b·n] / λ^a Δ^{b+1}
        let t1 = self.num.deriv_q().mul_ref(&Poly2::disc());
        let t2 = self.num.scale(&(rat_int(27) * b));
        Frac2::new(t1.add_ref(&t2), self.lam_pow, self.disc_pow + 1)
    }

    /// Q·∂/∂Q.
    pub fn euler_q(&self) -> Self {
        self.deriv_q().mul_ref(&Frac2::from_poly(Poly2::q()))
    }

    /// Weight under wt(Q) = 3, wt(λ) = 1 (the discriminant has weight 3);
    /// `None` when the numerator is inhomogeneous or zero.
    pub fn weight(&self) -> Option<i64> {
        let w = self.num.weight()?;
        Some(w as i64 - self.lam_pow as i64 - 3 * self.disc_pow as i64)
    }
}

impl Ring for Frac2 {
    fn zero() -> Self {
        Self::from_poly(Poly2::zero())
    }
    fn one() -> Self {
        Self::from_poly(Poly2::one())
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    fn add_ref(&self, rhs: &Self) -> Self {
        let lam = self.lam_pow.max(rhs.lam_pow);
        let disc = self.disc_pow.max(rhs.disc_pow);
        let lift = |f: &Frac2| {
            let mut n = f.num.mul_monomial((0, lam - f.lam_pow));
            for _ in 0..disc - f.disc_pow {
                n = n.mul_ref(&Poly2::disc());
            }
            n
        };
        Frac2::new(lift(self).add_ref(&lift(rhs)), lam, disc)
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        self.add_ref(&rhs.neg_ref())
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        Frac2::new(
            self.num.mul_ref(&rhs.num),
            self.lam_pow + rhs.lam_pow,
            self.disc_pow + rhs.disc_pow,
        )
    }
    fn neg_ref(&self) -> Self {
        Frac2 {
            num: self.num.neg_ref(),
            lam_pow: self.lam_pow,
            disc_pow: self.disc_pow,
        }
    }
    fn from_i64(n: i64) -> Self {
        Self::from_poly(Poly2::from_i64(n))
    }
}

impl Field for Frac2 {
    /// Invertible exactly when the numerator is itself of the lattice form
    /// c·λ^i·(λ³−27Q)^j — which is all the connection calculus ever inverts.
    fn try_inv(&self) -> Option<Self> {
        if self.num.is_zero() {
            return None;
        }
        let mut core = self.num.clone();
        let mut disc_in_num = 0u32;
        while let Some(q) = core.div_disc_exact() {
            core = q;
            disc_in_num += 1;
        }
        if core.terms.len() != 1 {
            return None;
        }
        let (&(i, j), c) = core.terms.iter().next().unwrap();
        if i != 0 {
            return None; // a bare Q-power in a denominator is outside the lattice
        }
        let mut num = Poly2::monomial((0, self.lam_pow), c.recip());
        for _ in 0..self.disc_pow {
            num = num.mul_ref(&Poly2::disc());
        }
        Some(Frac2::new(num, j, disc_in_num))
    }
}

impl fmt::Display for Frac2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_polynomial() {
            return write!(f, "{}", self.num);
        }
        write!(f, "({}) / (", self.num)?;
        match self.lam_pow {
            0 => {}
            1 => write!(f, "lam")?,
            e => write!(f, "lam^{e}")?,
        }
        if self.lam_pow > 0 && self.disc_pow > 0 {
            write!(f, "*")?;
        }
        match self.disc_pow {
            0 => {}
            1 => write!(f, "(lam^3-27Q)")?,
            e => write!(f, "(lam^3-27Q)^{e}")?,
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn discriminant_division() {
        let d2 = Poly2::disc().mul_ref(&Poly2::disc());
        assert_eq!(d2.div_disc_exact(), Some(Poly2::disc()));
        let with_factor = Poly2::q().mul_ref(&Poly2::lam()).mul_ref(&Poly2::disc());
        assert_eq!(
            with_factor.div_disc_exact(),
            Some(Poly2::q().mul_ref(&Poly2::lam()))
        );
        assert_eq!(Poly2::lam().div_disc_exact(), None);
        assert_eq!(
            Poly2::disc().add_ref(&Poly2::one()).div_disc_exact(),
            None
        );
    }

    #[test]
    fn fraction_normalization() {
        // (λ³ − 27Q)/λ² stays put; λ·(λ³−27Q)/λ² cancels one λ.
        let f = Frac2::new(Poly2::disc(), 2, 0);
        assert_eq!(f.den_powers(), (2, 0));
        let g = Frac2::new(Poly2::disc().mul_ref(&Poly2::lam()), 2, 0);
        assert_eq!(g.den_powers(), (1, 0));
        // (λ³−27Q)²/(λ³−27Q) reduces to a polynomial.
        let h = Frac2::new(Poly2::disc().mul_ref(&Poly2::disc()), 0, 1);
        assert!(h.is_polynomial());
        assert_eq!(*h.num(), Poly2::disc());
    }

    #[test]
    fn field_operations() {
        // 1/λ + 1/(λ³−27Q) = (λ³−27Q+λ)/(λ(λ³−27Q)).
        let a = Frac2::new(Poly2::one(), 1, 0);
        let b = Frac2::new(Poly2::one(), 0, 1);
        let s = a.add_ref(&b);
        assert_eq!(s.den_powers(), (1, 1));
        assert_eq!(*s.num(), Poly2::disc().add_ref(&Poly2::lam()));
        // Inverse of (λ³−27Q)/λ² is λ²/(λ³−27Q).
        let f = Frac2::new(Poly2::disc(), 2, 0);
        let inv = f.try_inv().unwrap();
        assert_eq!(inv.den_powers(), (0, 1));
        assert_eq!(*inv.num(), Poly2::monomial((0, 2), Rat::one()));
        assert_eq!(f.mul_ref(&inv), Frac2::one());
        // A numerator with mixed terms outside the lattice is not a unit.
        let bad = Frac2::from_poly(Poly2::lam().add_ref(&Poly2::one()));
        assert!(bad.try_inv().is_none());
        // A bare Q-power cannot move to the denominator.
        assert!(Frac2::from_poly(Poly2::q()).try_inv().is_none());
    }

    #[test]
    fn derivatives() {
        // ∂_λ (1/(λ³−27Q)) = −3λ²/(λ³−27Q)².
        let f = Frac2::new(Poly2::one(), 0, 1);
        let d = f.deriv_lam();
        assert_eq!(d.den_powers(), (0, 2));
        assert_eq!(*d.num(), Poly2::monomial((0, 2), rat(-3, 1)));
        // ∂_Q (1/(λ³−27Q)) = 27/(λ³−27Q)².
        let d = f.deriv_q();
        assert_eq!(d.den_powers(), (0, 2));
        assert_eq!(*d.num(), Poly2::constant(rat(27, 1)));
        // Mixed partials commute on a nontrivial sample.
        let g = Frac2::new(
            Poly2::q().mul_ref(&Poly2::lam()).add_ref(&Poly2::one()),
            2,
            2,
        );
        assert_eq!(g.deriv_lam().deriv_q(), g.deriv_q().deriv_lam());
    }

    #[test]
    fn weights_are_graded() {
        // Q·λ³/(λ³−27Q): 3 + 3 − 3 = 3.
        let f = Frac2::new(Poly2::q().mul_monomial((0, 3)), 0, 1);
        assert_eq!(f.weight(), Some(3));
        assert_eq!(Frac2::from_poly(Poly2::disc()).weight(), Some(3));
        // Derivatives shift weight as expected: ∂_λ lowers by 1, ∂_Q by 3.
        assert_eq!(f.deriv_lam().weight(), Some(2));
        assert_eq!(f.deriv_q().weight(), Some(0));
        // Products add weights.
        let g = Frac2::new(Poly2::one(), 1, 0);
        assert_eq!(g.weight(), Some(-1));
        assert_eq!(f.mul_ref(&g).weight(), Some(2));
    }
}
