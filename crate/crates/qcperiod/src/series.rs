//! Truncated Laurent series over an arbitrary coefficient ring.
//!
//! A [`TruncatedSeries`] represents an element known modulo `x^trunc`:
//! coefficients for exponents `< trunc` are exact, everything from `trunc`
//! on is unknown. The sentinel `trunc == i64::MAX` means the value is an
//! exact (Laurent) polynomial. Every arithmetic operation computes the
//! truncation order of its result from the orders and valuations of its
//! inputs, so precision is tracked instead of assumed, and requesting a
//! coefficient at or beyond the truncation order fails loudly rather than
//! returning a silent zero.
//!
//! Coefficients live in any [`Ring`]; series over series give multivariate
//! expansions with the same bookkeeping at every level.

use crate::scalar::{Field, Ring};
use std::fmt;

/// Truncation order meaning "exact polynomial, no unknown tail".
pub const EXACT: i64 = i64::MAX;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries<R: Ring> {
    /// Display/sanity name of the variable; `None` acts as a wildcard that
    /// unifies with anything (used by constants).
    var: Option<&'static str>,
    /// Exponent of `coeffs[0]`; may be negative (Laurent series).
    min_pow: i64,
    /// Exclusive truncation order: coefficients at exponents `>= trunc`
    /// are unknown. `EXACT` for polynomials.
    trunc: i64,
    coeffs: Vec<R>,
}

impl<R: Ring> TruncatedSeries<R> {
    /// Series with the given coefficients starting at exponent `min_pow`,
    /// known modulo `x^trunc`.
    pub fn new(var: Option<&'static str>, min_pow: i64, coeffs: Vec<R>, trunc: i64) -> Self {
        if trunc != EXACT {
            assert!(
                min_pow + coeffs.len() as i64 <= trunc,
                "coefficients extend to exponent {} but truncation order is {}",
                min_pow + coeffs.len() as i64 - 1,
                trunc
            );
        }
        TruncatedSeries {
            var,
            min_pow,
            trunc,
            coeffs,
        }
        .normalized()
    }

    /// Exact polynomial with coefficients for `x^0, x^1, ...`.
    pub fn poly(var: Option<&'static str>, coeffs: Vec<R>) -> Self {
        Self::new(var, 0, coeffs, EXACT)
    }

    /// The constant `c` as an exact series.
    pub fn constant(c: R) -> Self {
        Self::new(None, 0, vec![c], EXACT)
    }

    /// `c · x^k`, exact.
    pub fn monomial(var: Option<&'static str>, k: i64, c: R) -> Self {
        Self::new(var, k, vec![c], EXACT)
    }

    /// The identity series `x`, known exactly.
    pub fn identity(var: Option<&'static str>) -> Self {
        Self::monomial(var, 1, R::one())
    }

    /// Build from a coefficient function on `min_pow..trunc`.
    pub fn from_fn(
        var: Option<&'static str>,
        min_pow: i64,
        trunc: i64,
        mut f: impl FnMut(i64) -> R,
    ) -> Self {
        assert!(trunc != EXACT, "from_fn needs a finite truncation order");
        let coeffs = (min_pow..trunc).map(|e| f(e)).collect();
        Self::new(var, min_pow, coeffs, trunc)
    }

    /// Drop leading/trailing zero coefficients without changing the value.
    fn normalized(mut self) -> Self {
        let lead_zeros = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead_zeros > 0 {
            self.coeffs.drain(..lead_zeros);
            self.min_pow += lead_zeros as i64;
        }
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.min_pow = 0;
        }
        self
    }

    pub fn var(&self) -> Option<&'static str> {
        self.var
    }

    /// Same series under a different variable name — for constructions that
    /// change the natural variable, e.g. reading a reversion `q(w)` as a
    /// series in `w`.
    pub fn with_var(&self, var: Option<&'static str>) -> Self {
        let mut s = self.clone();
        s.var = var;
        s
    }

    pub fn trunc(&self) -> i64 {
        self.trunc
    }

    pub fn min_pow(&self) -> i64 {
        self.min_pow
    }

    pub fn is_exact(&self) -> bool {
        self.trunc == EXACT
    }

    /// Exponent of the lowest nonzero stored coefficient, or `None` when the
    /// series is zero as far as it is known.
    pub fn valuation(&self) -> Option<i64> {
        self.coeffs
            .iter()
            .position(|c| !c.is_zero())
            .map(|j| self.min_pow + j as i64)
    }

    /// Valuation for truncation bookkeeping: a series with no visible terms
    /// counts as having valuation `trunc` (it could be anything ≥ that).
    fn val_known(&self) -> i64 {
        self.valuation().unwrap_or(self.trunc)
    }

    /// Coefficient of `x^e`. Panics when `e` is at or beyond the truncation
    /// order — that coefficient genuinely is not known.
    pub fn coeff(&self, e: i64) -> R {
        assert!(
            e < self.trunc,
            "coefficient of exponent {e} requested but series is only known modulo x^{}",
            self.trunc
        );
        let idx = e - self.min_pow;
        if idx < 0 || idx >= self.coeffs.len() as i64 {
            R::zero()
        } else {
            self.coeffs[idx as usize].clone()
        }
    }

    /// Iterate stored `(exponent, coefficient)` pairs in increasing order.
    pub fn iter_terms(&self) -> impl Iterator<Item = (i64, &R)> {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(j, c)| (self.min_pow + j as i64, c))
            .filter(|(_, c)| !c.is_zero())
    }

    fn unify_vars(&self, rhs: &Self) -> Option<&'static str> {
        match (self.var, rhs.var) {
            (Some(a), Some(b)) => {
                assert!(a == b, "series variable mismatch: {a} vs {b}");
                Some(a)
            }
            (Some(a), None) => Some(a),
            (None, b) => b,
        }
    }

    /// Reduce the truncation order to `min(trunc, t)`, discarding any
    /// stored coefficients at `t` or beyond.
    pub fn truncate(&self, t: i64) -> Self {
        if t >= self.trunc {
            return self.clone();
        }
        let keep = (t - self.min_pow).clamp(0, self.coeffs.len() as i64) as usize;
        TruncatedSeries {
            var: self.var,
            min_pow: self.min_pow,
            trunc: t,
            coeffs: self.coeffs[..keep].to_vec(),
        }
        .normalized()
    }

    /// Multiply by `x^k`.
    pub fn shift(&self, k: i64) -> Self {
        TruncatedSeries {
            var: self.var,
            min_pow: self.min_pow + k,
            trunc: sat_add(self.trunc, k),
            coeffs: self.coeffs.clone(),
        }
        .normalized()
    }

    /// Apply `f` to every coefficient (must send zero to zero).
    pub fn map<S: Ring>(&self, mut f: impl FnMut(&R) -> S) -> TruncatedSeries<S> {
        TruncatedSeries {
            var: self.var,
            min_pow: self.min_pow,
            trunc: self.trunc,
            coeffs: self.coeffs.iter().map(|c| f(c)).collect(),
        }
        .normalized()
    }

    /// Multiply every coefficient by `c`.
    pub fn scale(&self, c: &R) -> Self {
        self.map(|a| a.mul_ref(c))
    }

    /// Derivative d/dx: trunc drops by one (the unknown tail starts one
    /// exponent earlier after differentiating).
    pub fn deriv(&self) -> Self {
        let coeffs: Vec<R> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| c.scale_i64(self.min_pow + j as i64))
            .collect();
        TruncatedSeries {
            var: self.var,
            min_pow: self.min_pow - 1,
            trunc: if self.trunc == EXACT {
                EXACT
            } else {
                self.trunc - 1
            },
            coeffs,
        }
        .normalized()
    }

    /// Euler derivative x·d/dx, which preserves the truncation order.
    pub fn euler_deriv(&self) -> Self {
        let coeffs: Vec<R> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| c.scale_i64(self.min_pow + j as i64))
            .collect();
        TruncatedSeries {
            var: self.var,
            min_pow: self.min_pow,
            trunc: self.trunc,
            coeffs,
        }
        .normalized()
    }

    /// Evaluate the stored jet at `x` by Horner's rule. Requires a plain
    /// power series (no negative exponents); the unknown tail is ignored,
    /// so this is evaluation of the known part only.
    pub fn eval_ref(&self, x: &R) -> R {
        assert!(
            self.min_pow >= 0 || self.coeffs.is_empty(),
            "evaluation of a Laurent series with negative exponents"
        );
        let mut acc = R::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul_ref(x).add_ref(c);
        }
        for _ in 0..self.min_pow {
            acc = acc.mul_ref(x);
        }
        acc
    }

    /// Substitute `g` for the variable of `self`. Requires `self` to have no
    /// negative exponents and `g` to have valuation ≥ 1. The result is known
    /// modulo `x^min(vg·Tf, Tg)`.
    pub fn compose(&self, g: &Self) -> Self {
        assert!(
            self.min_pow >= 0 || self.coeffs.is_empty(),
            "composition requires a power series (no negative exponents)"
        );
        let vg = g.val_known();
        assert!(
            vg >= 1,
            "composition requires the inner series to vanish at the origin (valuation {vg})"
        );
        let t = sat_min(sat_mul(vg, self.trunc), g.trunc);
        let mut acc: Self = TruncatedSeries {
            var: g.var,
            min_pow: 0,
            trunc: t,
            coeffs: Vec::new(),
        };
        // Horner from the top stored coefficient down; stepwise truncation at
        // t is sound because g has valuation ≥ 1.
        for c in self.coeffs.iter().rev() {
            acc = acc.mul_ref(g).add_ref(&Self::constant(c.clone()));
            acc = acc.truncate(t);
        }
        // Account for x^min_pow (min_pow ≥ 0).
        for _ in 0..self.min_pow {
            acc = acc.mul_ref(g).truncate(t);
        }
        TruncatedSeries {
            var: g.var,
            min_pow: acc.min_pow,
            trunc: t,
            coeffs: acc.coeffs,
        }
        .normalized()
    }
}

impl<F: Field> TruncatedSeries<F> {
    /// Compositional inverse of a series with valuation exactly 1: returns
    /// `g` with `self(g) = x`, known to the same truncation order.
    pub fn revert(&self) -> Self {
        assert!(
            self.trunc != EXACT,
            "reversion needs a finite truncation order; truncate first"
        );
        assert_eq!(
            self.valuation(),
            Some(1),
            "reversion requires valuation exactly 1"
        );
        let t = self.trunc;
        let f1 = self.coeff(1);
        let f1_inv = f1
            .try_inv()
            .unwrap_or_else(|| panic!("leading coefficient is not invertible"));
        let mut g = TruncatedSeries::new(self.var, 1, vec![f1_inv.clone()], t);
        for n in 2..t {
            // With g correct through x^{n-1}, the coefficient of x^n in
            // f(g) - x is f1·g_n plus terms already determined; solve for g_n.
            let h = self.truncate(n + 1).compose(&g.truncate(n + 1));
            let gn = h.coeff(n).neg_ref().mul_ref(&f1_inv);
            if !gn.is_zero() {
                let mut coeffs = g.coeffs.clone();
                coeffs.resize((n - g.min_pow) as usize, F::zero());
                coeffs.push(gn);
                g = TruncatedSeries {
                    var: self.var,
                    min_pow: g.min_pow,
                    trunc: t,
                    coeffs,
                }
                .normalized();
            }
        }
        g
    }
}

/// Saturating helpers treating `EXACT` as infinity.
fn sat_add(a: i64, b: i64) -> i64 {
    if a == EXACT || b == EXACT {
        EXACT
    } else {
        a.checked_add(b).unwrap_or(EXACT)
    }
}

fn sat_mul(a: i64, b: i64) -> i64 {
    if a == EXACT || b == EXACT {
        EXACT
    } else {
        a.checked_mul(b).unwrap_or(EXACT)
    }
}

fn sat_min(a: i64, b: i64) -> i64 {
    a.min(b)
}

impl<R: Ring> Ring for TruncatedSeries<R> {
    fn zero() -> Self {
        TruncatedSeries {
            var: None,
            min_pow: 0,
            trunc: EXACT,
            coeffs: Vec::new(),
        }
    }

    fn one() -> Self {
        Self::constant(R::one())
    }

    /// Zero as far as the series is known (no visible nonzero coefficient).
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn add_ref(&self, rhs: &Self) -> Self {
        let var = self.unify_vars(rhs);
        let trunc = sat_min(self.trunc, rhs.trunc);
        if self.coeffs.is_empty() && rhs.coeffs.is_empty() {
            return TruncatedSeries {
                var,
                min_pow: 0,
                trunc,
                coeffs: Vec::new(),
            };
        }
        let lo = match (self.coeffs.is_empty(), rhs.coeffs.is_empty()) {
            (false, false) => self.min_pow.min(rhs.min_pow),
            (false, true) => self.min_pow,
            (true, false) => rhs.min_pow,
            (true, true) => unreachable!(),
        };
        let hi_a = self.min_pow + self.coeffs.len() as i64;
        let hi_b = rhs.min_pow + rhs.coeffs.len() as i64;
        let hi = hi_a.max(hi_b).min(trunc);
        let mut coeffs = Vec::with_capacity((hi - lo).max(0) as usize);
        for e in lo..hi {
            let a = self.stored(e);
            let b = rhs.stored(e);
            coeffs.push(match (a, b) {
                (Some(a), Some(b)) => a.add_ref(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => R::zero(),
            });
        }
        TruncatedSeries {
            var,
            min_pow: lo,
            trunc,
            coeffs,
        }
        .normalized()
    }

    fn sub_ref(&self, rhs: &Self) -> Self {
        self.add_ref(&rhs.neg_ref())
    }

    fn mul_ref(&self, rhs: &Self) -> Self {
        let var = self.unify_vars(rhs);
        let trunc = sat_min(
            sat_add(self.trunc, rhs.val_known()),
            sat_add(rhs.trunc, self.val_known()),
        );
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return TruncatedSeries {
                var,
                min_pow: 0,
                trunc,
                coeffs: Vec::new(),
            };
        }
        let lo = self.min_pow + rhs.min_pow;
        let hi_full = lo + self.coeffs.len() as i64 + rhs.coeffs.len() as i64 - 1;
        let hi = hi_full.min(trunc);
        if hi <= lo {
            return TruncatedSeries {
                var,
                min_pow: 0,
                trunc,
                coeffs: Vec::new(),
            };
        }
        let mut coeffs = vec![R::zero(); (hi - lo) as usize];
        for (ja, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (jb, b) in rhs.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let e = ja as i64 + jb as i64;
                if e >= hi - lo {
                    continue;
                }
                let slot = &mut coeffs[e as usize];
                *slot = slot.add_ref(&a.mul_ref(b));
            }
        }
        TruncatedSeries {
            var,
            min_pow: lo,
            trunc,
            coeffs,
        }
        .normalized()
    }

    fn neg_ref(&self) -> Self {
        TruncatedSeries {
            var: self.var,
            min_pow: self.min_pow,
            trunc: self.trunc,
            coeffs: self.coeffs.iter().map(|c| c.neg_ref()).collect(),
        }
    }

    fn from_i64(n: i64) -> Self {
        Self::constant(R::from_i64(n))
    }
}

impl<R: Ring> TruncatedSeries<R> {
    /// Stored coefficient at exponent `e`, if inside the stored window.
    fn stored(&self, e: i64) -> Option<&R> {
        let idx = e - self.min_pow;
        if idx < 0 || idx >= self.coeffs.len() as i64 {
            None
        } else {
            Some(&self.coeffs[idx as usize])
        }
    }
}

impl<F: Field> Field for TruncatedSeries<F> {
    /// Inverse of a series with invertible leading coefficient. For a series
    /// of valuation m known modulo x^T, the inverse is known modulo
    /// x^{T − 2m} (relative precision is preserved, absolute shifts by 2m).
    fn try_inv(&self) -> Option<Self> {
        let v = self.valuation()?;
        let lead = self.coeff(v);
        let lead_inv = lead.try_inv()?;
        if self.trunc == EXACT {
            // Only monomials have exact (Laurent-polynomial) inverses.
            let monomial = self.iter_terms().count() == 1;
            assert!(
                monomial,
                "inverse of an exact non-monomial polynomial is an infinite series; truncate first"
            );
            return Some(TruncatedSeries::monomial(self.var, -v, lead_inv));
        }
        // Write self = lead·x^v·(1 + u) with u of valuation ≥ 1, known
        // modulo x^{T−v}; invert the unit part by the linear recurrence
        // b_0 = 1, b_n = −Σ_{j≥1} a_j b_{n−j}.
        let rel = self.trunc - v; // number of known unit-part coefficients
        let a: Vec<F> = (0..rel)
            .map(|j| self.coeff(v + j).mul_ref(&lead_inv))
            .collect();
        let mut b = vec![F::zero(); rel as usize];
        b[0] = F::one();
        for n in 1..rel as usize {
            let mut s = F::zero();
            for j in 1..=n {
                if !a[j].is_zero() {
                    s = s.add_ref(&a[j].mul_ref(&b[n - j]));
                }
            }
            b[n] = s.neg_ref();
        }
        let coeffs: Vec<F> = b.iter().map(|c| c.mul_ref(&lead_inv)).collect();
        Some(
            TruncatedSeries {
                var: self.var,
                min_pow: -v,
                trunc: self.trunc - 2 * v,
                coeffs,
            }
            .normalized(),
        )
    }
}

impl<R: Ring + fmt::Display> fmt::Display for TruncatedSeries<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let x = self.var.unwrap_or("x");
        let mut wrote = false;
        for (e, c) in self.iter_terms() {
            if wrote {
                write!(f, " + ")?;
            }
            wrote = true;
            match e {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})*{x}")?,
                _ => write!(f, "({c})*{x}^{e}")?,
            }
        }
        if !wrote {
            write!(f, "0")?;
        }
        if self.trunc != EXACT {
            write!(f, " + O({x}^{})", self.trunc)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rat_int, Rat};
    use proptest::prelude::*;

    type TS = TruncatedSeries<Rat>;

    fn ts(coeffs: &[(i64, i64, i64)], trunc: i64) -> TS {
        // coeffs: (exponent, num, den)
        let mut out = TS::new(Some("x"), 0, Vec::new(), trunc);
        for &(e, n, d) in coeffs {
            out = out.add_ref(&TS::monomial(Some("x"), e, rat(n, d)).truncate(trunc));
        }
        out
    }

    #[test]
    fn geometric_series_inverse() {
        // 1/(1 - x) = 1 + x + x^2 + ... modulo x^10
        let one_minus_x = ts(&[(0, 1, 1), (1, -1, 1)], 10);
        let inv = one_minus_x.try_inv().unwrap();
        assert_eq!(inv.trunc(), 10);
        for e in 0..10 {
            assert_eq!(inv.coeff(e), rat_int(1));
        }
        // and the product is 1 modulo x^10
        let p = one_minus_x.mul_ref(&inv);
        assert_eq!(p.coeff(0), rat_int(1));
        for e in 1..10 {
            assert_eq!(p.coeff(e), rat_int(0));
        }
    }

    #[test]
    fn square_of_linear_jet() {
        // (1 + (5/72)u)^2 = 1 + (5/36)u + O(u^2) when the factor is only
        // known modulo u^2.
        let f = TS::new(Some("u"), 0, vec![rat_int(1), rat(5, 72)], 2);
        let sq = f.mul_ref(&f);
        assert_eq!(sq.trunc(), 2);
        assert_eq!(sq.coeff(0), rat_int(1));
        assert_eq!(sq.coeff(1), rat(5, 36));
    }

    #[test]
    fn laurent_inverse_precision() {
        // f = x^2(1 - x) modulo x^7 has valuation 2; 1/f is known modulo x^3.
        let f = ts(&[(2, 1, 1), (3, -1, 1)], 7);
        let inv = f.try_inv().unwrap();
        assert_eq!(inv.min_pow(), -2);
        assert_eq!(inv.trunc(), 3);
        assert_eq!(inv.coeff(-2), rat_int(1));
        assert_eq!(inv.coeff(-1), rat_int(1));
        assert_eq!(inv.coeff(2), rat_int(1));
    }

    #[test]
    fn exact_monomial_inverse() {
        let m = TS::monomial(Some("q"), -3, rat(2, 5));
        let inv = m.try_inv().unwrap();
        assert_eq!(inv, TS::monomial(Some("q"), 3, rat(5, 2)));
        assert!(inv.is_exact());
    }

    #[test]
    #[should_panic(expected = "known modulo")]
    fn coeff_beyond_truncation_panics() {
        let f = ts(&[(0, 1, 1)], 5);
        let _ = f.coeff(5);
    }

    #[test]
    #[should_panic(expected = "variable mismatch")]
    fn variable_mismatch_panics() {
        let a = TS::identity(Some("x"));
        let b = TS::identity(Some("q"));
        let _ = a.add_ref(&b);
    }

    #[test]
    fn constants_unify_with_anything() {
        let a = TS::identity(Some("x"));
        let c = TS::constant(rat_int(7));
        let s = a.add_ref(&c);
        assert_eq!(s.var(), Some("x"));
        assert_eq!(s.coeff(0), rat_int(7));
        assert_eq!(s.coeff(1), rat_int(1));
    }

    #[test]
    fn compose_geometric_with_double() {
        // f = 1/(1-x) mod x^6, g = 2x exact: f(g) = sum 2^k x^k mod x^6.
        let f = ts(&[(0, 1, 1), (1, -1, 1)], 6).try_inv().unwrap();
        let g = TS::monomial(Some("y"), 1, rat_int(2));
        let h = f.compose(&g);
        assert_eq!(h.trunc(), 6);
        assert_eq!(h.var(), Some("y"));
        for e in 0..6 {
            assert_eq!(h.coeff(e), rat_int(1 << e));
        }
    }

    #[test]
    fn compose_precision_from_inner_valuation() {
        // f known mod x^3, g = y^2 exact: result known mod y^6.
        let f = ts(&[(0, 1, 1), (1, 1, 1), (2, 1, 1)], 3);
        let g = TS::monomial(Some("y"), 2, rat_int(1));
        let h = f.compose(&g);
        assert_eq!(h.trunc(), 6);
        assert_eq!(h.coeff(0), rat_int(1));
        assert_eq!(h.coeff(2), rat_int(1));
        assert_eq!(h.coeff(4), rat_int(1));
        assert_eq!(h.coeff(5), rat_int(0));
    }

    #[test]
    fn revert_catalan_numbers() {
        // g = revert(x - x^2) has coefficients the Catalan numbers:
        // g = x + x^2 + 2x^3 + 5x^4 + 14x^5 + ...
        let f = ts(&[(1, 1, 1), (2, -1, 1)], 8);
        let g = f.revert();
        assert_eq!(g.trunc(), 8);
        let catalan = [0, 1, 1, 2, 5, 14, 42, 132];
        for (e, &c) in catalan.iter().enumerate() {
            assert_eq!(g.coeff(e as i64), rat_int(c), "catalan at x^{e}");
        }
        // f(g) = x within the window
        let check = f.compose(&g);
        assert_eq!(check.coeff(1), rat_int(1));
        for e in 2..8 {
            assert_eq!(check.coeff(e), rat_int(0));
        }
    }

    #[test]
    fn derivative_bookkeeping() {
        let f = ts(&[(0, 3, 1), (2, 1, 2), (5, -1, 1)], 8);
        let d = f.deriv();
        assert_eq!(d.trunc(), 7);
        assert_eq!(d.coeff(1), rat_int(1));
        assert_eq!(d.coeff(4), rat_int(-5));
        let e = f.euler_deriv();
        assert_eq!(e.trunc(), 8);
        assert_eq!(e.coeff(2), rat_int(1));
        assert_eq!(e.coeff(5), rat_int(-5));
        // Laurent term: d/dx (x^{-1}) = -x^{-2}
        let g = TS::monomial(Some("x"), -1, rat_int(1));
        assert_eq!(g.deriv(), TS::monomial(Some("x"), -2, rat_int(-1)));
    }

    #[test]
    fn eval_horner() {
        // f = 2 + 3x + x^3 at x = 1/2: 2 + 3/2 + 1/8 = 29/8.
        let f = ts(&[(0, 2, 1), (1, 3, 1), (3, 1, 1)], EXACT);
        assert_eq!(f.eval_ref(&rat(1, 2)), rat(29, 8));
    }

    proptest! {
        #[test]
        fn ring_axioms_on_random_series(
            a in small_series(), b in small_series(), c in small_series()
        ) {
            let lhs = a.add_ref(&b).add_ref(&c);
            let rhs = a.add_ref(&b.add_ref(&c));
            prop_assert_eq!(lhs, rhs);
            let lhs = a.mul_ref(&b.add_ref(&c));
            let rhs = a.mul_ref(&b).add_ref(&a.mul_ref(&c));
            prop_assert_eq!(lhs.truncate(rhs.trunc()), rhs.truncate(lhs.trunc()));
            let lhs = a.mul_ref(&b);
            let rhs = b.mul_ref(&a);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn revert_is_an_involution(f in invertible_series()) {
            let g = f.revert();
            let back = g.revert();
            prop_assert_eq!(back, f);
        }
    }

    fn small_series() -> impl Strategy<Value = TS> {
        (
            proptest::collection::vec(-6i64..=6, 0..5),
            4i64..=8,
        )
            .prop_map(|(cs, trunc)| {
                let coeffs: Vec<Rat> = cs.iter().map(|&n| rat_int(n)).collect();
                let len = coeffs.len() as i64;
                TS::new(Some("x"), 0, coeffs, trunc.max(len))
            })
    }

    fn invertible_series() -> impl Strategy<Value = TS> {
        (
            prop_oneof![Just(1i64), Just(-1i64), Just(2i64), Just(3i64)],
            proptest::collection::vec((-5i64..=5, 1i64..=4), 0..5),
        )
            .prop_map(|(lead, tail)| {
                let mut coeffs = vec![Rat::zero(), rat_int(lead)];
                for (n, d) in tail {
                    coeffs.push(rat(n, d));
                }
                let len = coeffs.len() as i64;
                TS::new(Some("x"), 0, coeffs, len.max(7))
            })
    }
}
