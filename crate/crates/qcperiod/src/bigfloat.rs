//! Arbitrary-precision real and complex arithmetic for the numeric
//! verification layer (evaluating q-expansions at points of the upper half
//! plane and checking analytic identities to hundreds of bits).
//!
//! This is a thin ergonomic shim over `astro_float`: a [`Ctx`] fixes the
//! working precision (requested bits plus guard bits) and owns the
//! constants cache, so call sites read like ordinary arithmetic. The one
//! piece of real numerics implemented here is the Euler–Mascheroni
//! constant, obtained from the harmonic-number asymptotic
//! H_N = ln N + γ + 1/(2N) − Σ_{k≥1} B_{2k}/(2k N^{2k})
//! with exact Bernoulli numbers and N a power of two (so ln N is a cheap
//! multiple of ln 2).

use crate::gw::binomial;
use crate::scalar::{rat_int, Rat};
use astro_float::{Consts, RoundingMode};
pub use astro_float::BigFloat;
use num_bigint::{BigInt, Sign};

/// Guard bits added on top of the requested precision for all internal
/// operations.
const GUARD: usize = 64;

/// Exact Bernoulli numbers B_0..B_n (convention B_1 = −1/2), via the
/// recurrence Σ_{j≤m} C(m+1,j) B_j = 0.
pub fn bernoulli_numbers(n: usize) -> Vec<Rat> {
    let mut b: Vec<Rat> = Vec::with_capacity(n + 1);
    b.push(Rat::from_integer(1.into()));
    for m in 1..=n {
        if m > 1 && m % 2 == 1 {
            b.push(Rat::from_integer(0.into()));
            continue;
        }
        let mut acc = Rat::from_integer(0.into());
        for (j, bj) in b.iter().enumerate() {
            acc += Rat::from_integer(binomial((m + 1) as u64, j as u64)) * bj;
        }
        b.push(-acc / rat_int((m + 1) as i64));
    }
    b
}

/// Fixed-precision evaluation context.
pub struct Ctx {
    /// Requested precision in bits; internal work uses `prec + GUARD`.
    pub prec: usize,
    rm: RoundingMode,
    cc: Consts,
    gamma: Option<BigFloat>,
}

impl Ctx {
    pub fn new(prec: usize) -> Self {
        Ctx {
            prec,
            rm: RoundingMode::None,
            cc: Consts::new().expect("constants cache"),
            gamma: None,
        }
    }

    fn p(&self) -> usize {
        self.prec + GUARD
    }

    // --- constructors ---

    pub fn int(&self, n: i64) -> BigFloat {
        BigFloat::from_i64(n, self.p())
    }

    /// Exact power of two 2^e.
    pub fn pow2(&self, e: i64) -> BigFloat {
        let mut x = BigFloat::from_word(1, self.p());
        let e32 = i32::try_from(e + 1).expect("exponent range");
        x.set_exponent(e32);
        x
    }

    pub fn from_bigint(&self, n: &BigInt) -> BigFloat {
        let (sign, digits) = n.to_u64_digits();
        let shift = self.pow2(64);
        let mut acc = self.int(0);
        for d in digits.iter().rev() {
            acc = acc
                .mul(&shift, self.p(), self.rm)
                .add(&BigFloat::from_u64(*d, self.p()), self.p(), self.rm);
        }
        if sign == Sign::Minus {
            acc = acc.neg();
        }
        acc
    }

    pub fn from_rat(&self, r: &Rat) -> BigFloat {
        let num = self.from_bigint(r.numer());
        let den = self.from_bigint(r.denom());
        num.div(&den, self.p(), self.rm)
    }

    // --- real arithmetic ---

    pub fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.p(), self.rm)
    }
    pub fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.p(), self.rm)
    }
    pub fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.p(), self.rm)
    }
    pub fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, self.p(), self.rm)
    }
    pub fn recip(&self, a: &BigFloat) -> BigFloat {
        a.reciprocal(self.p(), self.rm)
    }
    pub fn sqrt(&self, a: &BigFloat) -> BigFloat {
        a.sqrt(self.p(), self.rm)
    }
    pub fn powi(&self, a: &BigFloat, n: usize) -> BigFloat {
        a.powi(n, self.p(), self.rm)
    }

    // --- transcendental functions (need the constants cache) ---

    pub fn pi(&mut self) -> BigFloat {
        let p = self.p();
        self.cc.pi(p, self.rm)
    }
    pub fn two_pi(&mut self) -> BigFloat {
        let two = self.int(2);
        let pi = self.pi();
        self.mul(&two, &pi)
    }
    pub fn ln2(&mut self) -> BigFloat {
        let p = self.p();
        self.cc.ln_2(p, self.rm)
    }
    pub fn exp(&mut self, a: &BigFloat) -> BigFloat {
        let p = self.p();
        a.exp(p, self.rm, &mut self.cc)
    }
    pub fn ln(&mut self, a: &BigFloat) -> BigFloat {
        let p = self.p();
        a.ln(p, self.rm, &mut self.cc)
    }
    pub fn sin(&mut self, a: &BigFloat) -> BigFloat {
        let p = self.p();
        a.sin(p, self.rm, &mut self.cc)
    }
    pub fn cos(&mut self, a: &BigFloat) -> BigFloat {
        let p = self.p();
        a.cos(p, self.rm, &mut self.cc)
    }
    pub fn atan(&mut self, a: &BigFloat) -> BigFloat {
        let p = self.p();
        a.atan(p, self.rm, &mut self.cc)
    }
    /// Principal-value angle of the point (x, y), in (−π, π].
    pub fn atan2(&mut self, y: &BigFloat, x: &BigFloat) -> BigFloat {
        let pi = self.pi();
        if x.is_zero() {
            assert!(!y.is_zero(), "atan2 undefined at the origin");
            let half_pi = self.div(&pi, &self.int(2));
            return if y.is_negative() {
                half_pi.neg()
            } else {
                half_pi
            };
        }
        let base = self.div(y, x);
        let base = self.atan(&base);
        if x.is_negative() {
            if y.is_negative() {
                self.sub(&base, &pi)
            } else {
                self.add(&base, &pi)
            }
        } else {
            base
        }
    }
    pub fn parse_dec(&mut self, s: &str) -> BigFloat {
        let p = self.p();
        BigFloat::parse(s, astro_float::Radix::Dec, p, self.rm, &mut self.cc)
    }

    /// Euler–Mascheroni constant γ, cached per context.
    pub fn euler_gamma(&mut self) -> BigFloat {
        if let Some(g) = &self.gamma {
            return g.clone();
        }
        let work = self.p();
        // With N = 2^m the truncation error after K correction terms is
        // roughly ((2K+2)/(2πeN))^{2K+2}; pick m, K so it is beyond the
        // working precision.
        let (m, n_terms): (i64, usize) = if work <= 900 {
            (12, 56)
        } else {
            assert!(work <= 2900, "gamma: precision beyond configured bounds");
            (16, 120)
        };
        let n = 1u64 << m;
        // Harmonic number H_N by direct summation.
        let mut h = self.int(0);
        for k in 1..=n {
            let term = self.recip(&BigFloat::from_u64(k, work));
            h = self.add(&h, &term);
        }
        // H_N − m·ln2 − 1/(2N)
        let ln2 = self.ln2();
        let m_ln2 = self.mul(&self.int(m), &ln2);
        let mut g = self.sub(&h, &m_ln2);
        let half_n = self.recip(&BigFloat::from_u64(2 * n, work));
        g = self.sub(&g, &half_n);
        // + Σ_{k=1}^{K} B_{2k}/(2k N^{2k}), summed exactly in ℚ first.
        let bern = bernoulli_numbers(2 * n_terms);
        let n_rat = Rat::from_integer(BigInt::from(n));
        let mut n_pow = Rat::from_integer(1.into());
        let mut sum = Rat::from_integer(0.into());
        for k in 1..=n_terms {
            n_pow = &n_pow * &n_rat * &n_rat;
            sum += &bern[2 * k] / (rat_int(2 * k as i64) * &n_pow);
        }
        let corr = self.from_rat(&sum);
        g = self.add(&g, &corr);
        self.gamma = Some(g.clone());
        g
    }

    // --- comparisons ---

    /// |x| ≤ 2^e.
    pub fn abs_le_pow2(&self, x: &BigFloat, e: i64) -> bool {
        if x.is_zero() {
            return true;
        }
        let bound = self.pow2(e);
        matches!(x.abs().cmp(&bound), Some(c) if c <= 0)
    }

    // --- complex arithmetic ---

    pub fn c_int(&self, re: i64, im: i64) -> Complex {
        Complex {
            re: self.int(re),
            im: self.int(im),
        }
    }

    pub fn c_from_real(&self, re: BigFloat) -> Complex {
        Complex {
            re,
            im: self.int(0),
        }
    }

    pub fn cadd(&self, a: &Complex, b: &Complex) -> Complex {
        Complex {
            re: self.add(&a.re, &b.re),
            im: self.add(&a.im, &b.im),
        }
    }
    pub fn csub(&self, a: &Complex, b: &Complex) -> Complex {
        Complex {
            re: self.sub(&a.re, &b.re),
            im: self.sub(&a.im, &b.im),
        }
    }
    pub fn cmul(&self, a: &Complex, b: &Complex) -> Complex {
        let ac = self.mul(&a.re, &b.re);
        let bd = self.mul(&a.im, &b.im);
        let ad = self.mul(&a.re, &b.im);
        let bc = self.mul(&a.im, &b.re);
        Complex {
            re: self.sub(&ac, &bd),
            im: self.add(&ad, &bc),
        }
    }
    pub fn cdiv(&self, a: &Complex, b: &Complex) -> Complex {
        let den = self.add(
            &self.mul(&b.re, &b.re),
            &self.mul(&b.im, &b.im),
        );
        let conj = Complex {
            re: b.re.clone(),
            im: b.im.neg(),
        };
        let num = self.cmul(a, &conj);
        Complex {
            re: self.div(&num.re, &den),
            im: self.div(&num.im, &den),
        }
    }
    pub fn cneg(&self, a: &Complex) -> Complex {
        Complex {
            re: a.re.neg(),
            im: a.im.neg(),
        }
    }
    pub fn cscale(&self, a: &Complex, s: &BigFloat) -> Complex {
        Complex {
            re: self.mul(&a.re, s),
            im: self.mul(&a.im, s),
        }
    }
    pub fn cabs(&self, a: &Complex) -> BigFloat {
        let s = self.add(
            &self.mul(&a.re, &a.re),
            &self.mul(&a.im, &a.im),
        );
        self.sqrt(&s)
    }
    /// e^{a} = e^{Re a}(cos Im a + i sin Im a).
    pub fn cexp(&mut self, a: &Complex) -> Complex {
        let r = self.exp(&a.re);
        let c = self.cos(&a.im);
        let s = self.sin(&a.im);
        Complex {
            re: self.mul(&r, &c),
            im: self.mul(&r, &s),
        }
    }
    pub fn cpowi(&self, a: &Complex, n: usize) -> Complex {
        let mut acc = self.c_int(1, 0);
        let mut base = a.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.cmul(&acc, &base);
            }
            base = self.cmul(&base, &base);
            k >>= 1;
        }
        acc
    }
    /// Principal branch of log: ln|a| + i·arg(a), arg ∈ (−π, π].
    pub fn c_ln(&mut self, a: &Complex) -> Complex {
        let norm2 = self.add(
            &self.mul(&a.re, &a.re),
            &self.mul(&a.im, &a.im),
        );
        let half = self.div(&self.int(1), &self.int(2));
        let ln_norm2 = self.ln(&norm2);
        Complex {
            re: self.mul(&half, &ln_norm2),
            im: self.atan2(&a.im, &a.re),
        }
    }
}

/// Complex number with `BigFloat` components.
#[derive(Clone, Debug)]
pub struct Complex {
    pub re: BigFloat,
    pub im: BigFloat,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn bernoulli_values() {
        let b = bernoulli_numbers(12);
        assert_eq!(b[0], rat_int(1));
        assert_eq!(b[1], rat(-1, 2));
        assert_eq!(b[2], rat(1, 6));
        assert_eq!(b[3], rat_int(0));
        assert_eq!(b[4], rat(-1, 30));
        assert_eq!(b[6], rat(1, 42));
        assert_eq!(b[8], rat(-1, 30));
        assert_eq!(b[10], rat(5, 66));
        assert_eq!(b[12], rat(-691, 2730));
    }

    #[test]
    fn rational_conversion_is_faithful() {
        let ctx = Ctx::new(256);
        // (2^200 + 1)/3 round-trips against an independent construction.
        let big = BigInt::from(1u8) << 200;
        let r = Rat::new(&big + 1, 3.into());
        let x = ctx.from_rat(&r);
        let y = ctx.div(
            &ctx.add(&ctx.pow2(200), &ctx.int(1)),
            &ctx.int(3),
        );
        assert!(ctx.abs_le_pow2(&ctx.sub(&x, &y), 200 - 250));
    }

    #[test]
    fn euler_gamma_matches_reference() {
        let mut ctx = Ctx::new(384);
        let g = ctx.euler_gamma();
        let reference = ctx.parse_dec(
            "0.5772156649015328606065120900824024310421593359399235988057672348848677267776646709369470632917467495",
        );
        let err = ctx.sub(&g, &reference);
        // The reference literal has 100 digits ≈ 332 bits.
        assert!(ctx.abs_le_pow2(&err, -320));
    }

    #[test]
    fn complex_arithmetic() {
        let mut ctx = Ctx::new(128);
        // (1+2i)(3−i) = 5+5i
        let p = ctx.cmul(&ctx.c_int(1, 2), &ctx.c_int(3, -1));
        assert!(ctx.abs_le_pow2(&ctx.sub(&p.re, &ctx.int(5)), -120));
        assert!(ctx.abs_le_pow2(&ctx.sub(&p.im, &ctx.int(5)), -120));
        // division inverts multiplication
        let q = ctx.cdiv(&p, &ctx.c_int(3, -1));
        assert!(ctx.abs_le_pow2(&ctx.sub(&q.re, &ctx.int(1)), -120));
        assert!(ctx.abs_le_pow2(&ctx.sub(&q.im, &ctx.int(2)), -120));
        // e^{iπ} = −1
        let pi = ctx.pi();
        let ipi = Complex { re: ctx.int(0), im: pi };
        let e = ctx.cexp(&ipi);
        assert!(ctx.abs_le_pow2(&ctx.sub(&e.re, &ctx.int(-1)), -120));
        assert!(ctx.abs_le_pow2(&e.im, -120));
        // (1+i)^4 = −4
        let z = ctx.cpowi(&ctx.c_int(1, 1), 4);
        assert!(ctx.abs_le_pow2(&ctx.sub(&z.re, &ctx.int(-4)), -120));
        assert!(ctx.abs_le_pow2(&z.im, -120));
    }
}
