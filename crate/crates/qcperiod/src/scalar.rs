//! Exact scalar tower: rationals, Gaussian rationals, ι-Laurent polynomials,
//! and polynomials in π².
//!
//! The symbol ι stands for 2πi and is carried formally through every exact
//! computation; the relation π² = −ι²/4 is applied only at projection time by
//! [`IotaScalar::project_pi2`]. This keeps transcendental bookkeeping out of
//! the series arithmetic while still allowing final results to be presented
//! as polynomials in π² with rational coefficients.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// Exact rational scalar used throughout the crate.
pub type Rat = BigRational;

/// Build a rational from a numerator/denominator pair.
pub fn rat(num: i64, den: i64) -> Rat {
    assert!(den != 0, "zero denominator");
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Build a rational from an integer.
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum ScalarError {
    #[error("division by zero scalar")]
    DivisionByZero,
    #[error("scalar is not invertible: {0}")]
    NotInvertible(String),
    #[error("mixed gaussian and iota-laurent arithmetic is not defined")]
    GaussianIotaMix,
    #[error("odd power of iota cannot be projected to a polynomial in pi^2: exponent {0}")]
    OddIotaPower(i64),
}

/// Commutative ring with explicit reference-based operations.
///
/// Implemented by every exact coefficient type in the crate, including
/// truncated series themselves, which is what makes nested (multivariate)
/// series work without special cases.
pub trait Ring: Clone + PartialEq + fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add_ref(&self, rhs: &Self) -> Self;
    fn sub_ref(&self, rhs: &Self) -> Self;
    fn mul_ref(&self, rhs: &Self) -> Self;
    fn neg_ref(&self) -> Self;
    /// Canonical image of a small integer.
    fn from_i64(n: i64) -> Self;
    /// Multiply by a small integer (default: go through `from_i64`).
    fn scale_i64(&self, n: i64) -> Self {
        self.mul_ref(&Self::from_i64(n))
    }
}

/// Ring in which division is total away from zero.
pub trait Field: Ring {
    /// Multiplicative inverse; `None` exactly for zero.
    fn try_inv(&self) -> Option<Self>;

    fn div_ref(&self, rhs: &Self) -> Self {
        let inv = rhs
            .try_inv()
            .unwrap_or_else(|| panic!("division by zero in field"));
        self.mul_ref(&inv)
    }
}

impl Ring for Rat {
    fn zero() -> Self {
        num_traits::Zero::zero()
    }
    fn one() -> Self {
        num_traits::One::one()
    }
    fn is_zero(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
    fn add_ref(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn from_i64(n: i64) -> Self {
        rat_int(n)
    }
}

impl Field for Rat {
    fn try_inv(&self) -> Option<Self> {
        if Ring::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
}

/// Gaussian rational a + b·i with exact rational components.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QGauss {
    pub re: Rat,
    pub im: Rat,
}

impl QGauss {
    pub fn new(re: Rat, im: Rat) -> Self {
        QGauss { re, im }
    }

    pub fn from_rat(re: Rat) -> Self {
        QGauss {
            re,
            im: Rat::zero(),
        }
    }

    pub fn i() -> Self {
        QGauss {
            re: Rat::zero(),
            im: Rat::one(),
        }
    }

    pub fn conj(&self) -> Self {
        QGauss {
            re: self.re.clone(),
            im: -&self.im,
        }
    }

    /// Squared modulus a² + b² as a rational.
    pub fn norm(&self) -> Rat {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn is_rational(&self) -> bool {
        Ring::is_zero(&self.im)
    }
}

impl fmt::Display for QGauss {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if Ring::is_zero(&self.im) {
            write!(f, "{}", self.re)
        } else if Ring::is_zero(&self.re) {
            write!(f, "{}*i", self.im)
        } else if self.im.is_negative() {
            write!(f, "{}{}*i", self.re, self.im)
        } else {
            write!(f, "{}+{}*i", self.re, self.im)
        }
    }
}

impl Ring for QGauss {
    fn zero() -> Self {
        QGauss::from_rat(Rat::zero())
    }
    fn one() -> Self {
        QGauss::from_rat(Rat::one())
    }
    fn is_zero(&self) -> bool {
        Ring::is_zero(&self.re) && Ring::is_zero(&self.im)
    }
    fn add_ref(&self, rhs: &Self) -> Self {
        QGauss {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        QGauss {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        QGauss {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
    fn neg_ref(&self) -> Self {
        QGauss {
            re: -&self.re,
            im: -&self.im,
        }
    }
    fn from_i64(n: i64) -> Self {
        QGauss::from_rat(rat_int(n))
    }
}

impl Field for QGauss {
    fn try_inv(&self) -> Option<Self> {
        if Ring::is_zero(self) {
            return None;
        }
        let n = self.norm();
        Some(QGauss {
            re: &self.re / &n,
            im: -&self.im / &n,
        })
    }
}

/// Laurent polynomial in the formal symbol ι = 2πi with rational
/// coefficients.
///
/// Nonzero coefficients are stored sparsely by exponent; the zero polynomial
/// has an empty map. Division is defined exactly when the divisor is a
/// monomial (the units of the Laurent ring), which is all the period-map
/// pipeline ever needs.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct IotaScalar {
    coeffs: BTreeMap<i64, Rat>,
}

impl IotaScalar {
    pub fn from_rat(r: Rat) -> Self {
        Self::monomial(0, r)
    }

    /// c·ι^k.
    pub fn monomial(k: i64, c: Rat) -> Self {
        let mut coeffs = BTreeMap::new();
        if !Ring::is_zero(&c) {
            coeffs.insert(k, c);
        }
        IotaScalar { coeffs }
    }

    /// ι itself.
    pub fn iota() -> Self {
        Self::monomial(1, Rat::one())
    }

    pub fn iota_pow(k: i64) -> Self {
        Self::monomial(k, Rat::one())
    }

    pub fn coeff(&self, k: i64) -> Rat {
        self.coeffs.get(&k).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i64, &Rat)> {
        self.coeffs.iter()
    }

    /// True when the value is c·ι^k for a single exponent (or zero).
    pub fn is_monomial(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn as_rational(&self) -> Option<Rat> {
        if self.coeffs.is_empty() {
            return Some(Rat::zero());
        }
        if self.coeffs.len() == 1 {
            if let Some(c) = self.coeffs.get(&0) {
                return Some(c.clone());
            }
        }
        None
    }

    /// Rewrite as a polynomial in π² using π² = −ι²/4, i.e. ι^{2k} ↦ (−4)^k π^{2k}.
    ///
    /// Fails on any odd ι-power: those are genuinely imaginary and have no
    /// image in ℚ[π², π⁻²].
    pub fn project_pi2(&self) -> Result<Pi2Poly, ScalarError> {
        let mut out = BTreeMap::new();
        for (&k, c) in &self.coeffs {
            if k.rem_euclid(2) != 0 {
                return Err(ScalarError::OddIotaPower(k));
            }
            let half = k.div_euclid(2);
            // ι^{2h} = (−4)^h π^{2h}, valid for negative h as well.
            let factor = pow_rat(&rat_int(-4), half);
            let v = c * &factor;
            if !Ring::is_zero(&v) {
                out.insert(half, v);
            }
        }
        Ok(Pi2Poly { coeffs: out })
    }
}

/// r^k for possibly negative k (r must be nonzero when k < 0).
pub fn pow_rat(r: &Rat, k: i64) -> Rat {
    if k == 0 {
        return Rat::one();
    }
    let base = if k < 0 { r.recip() } else { r.clone() };
    let mut acc = Rat::one();
    for _ in 0..k.unsigned_abs() {
        acc *= &base;
    }
    acc
}

impl fmt::Display for IotaScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*I")?,
                _ => write!(f, "{c}*I^{k}")?,
            }
        }
        Ok(())
    }
}

impl Ring for IotaScalar {
    fn zero() -> Self {
        IotaScalar::default()
    }
    fn one() -> Self {
        IotaScalar::from_rat(Rat::one())
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn add_ref(&self, rhs: &Self) -> Self {
        let mut coeffs = self.coeffs.clone();
        for (k, c) in &rhs.coeffs {
            let entry = coeffs.entry(*k).or_insert_with(Rat::zero);
            *entry += c;
            if Ring::is_zero(entry) {
                coeffs.remove(k);
            }
        }
        IotaScalar { coeffs }
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        self.add_ref(&rhs.neg_ref())
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        let mut coeffs: BTreeMap<i64, Rat> = BTreeMap::new();
        for (ka, ca) in &self.coeffs {
            for (kb, cb) in &rhs.coeffs {
                let k = ka + kb;
                let entry = coeffs.entry(k).or_insert_with(Rat::zero);
                *entry += ca * cb;
            }
        }
        coeffs.retain(|_, c| !Ring::is_zero(c));
        IotaScalar { coeffs }
    }
    fn neg_ref(&self) -> Self {
        IotaScalar {
            coeffs: self.coeffs.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }
    fn from_i64(n: i64) -> Self {
        IotaScalar::from_rat(rat_int(n))
    }
}

impl Field for IotaScalar {
    /// Inverse of a monomial c·ι^k; composite elements are not units.
    fn try_inv(&self) -> Option<Self> {
        if self.coeffs.len() != 1 {
            return None;
        }
        let (k, c) = self.coeffs.iter().next().unwrap();
        Some(IotaScalar::monomial(-k, c.recip()))
    }
}

/// Polynomial (Laurent, in general) in π² with rational coefficients; the
/// exponent k indexes π^{2k}.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Pi2Poly {
    coeffs: BTreeMap<i64, Rat>,
}

impl Pi2Poly {
    pub fn from_rat(r: Rat) -> Self {
        Self::monomial(0, r)
    }

    /// c·π^{2k}.
    pub fn monomial(k: i64, c: Rat) -> Self {
        let mut coeffs = BTreeMap::new();
        if !Ring::is_zero(&c) {
            coeffs.insert(k, c);
        }
        Pi2Poly { coeffs }
    }

    pub fn coeff(&self, k: i64) -> Rat {
        self.coeffs.get(&k).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i64, &Rat)> {
        self.coeffs.iter()
    }
}

impl fmt::Display for Pi2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*pi^2")?,
                _ => write!(f, "{c}*pi^{}", 2 * k)?,
            }
        }
        Ok(())
    }
}

impl Ring for Pi2Poly {
    fn zero() -> Self {
        Pi2Poly::default()
    }
    fn one() -> Self {
        Pi2Poly::from_rat(Rat::one())
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn add_ref(&self, rhs: &Self) -> Self {
        let mut coeffs = self.coeffs.clone();
        for (k, c) in &rhs.coeffs {
            let entry = coeffs.entry(*k).or_insert_with(Rat::zero);
            *entry += c;
            if Ring::is_zero(entry) {
                coeffs.remove(k);
            }
        }
        Pi2Poly { coeffs }
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        self.add_ref(&rhs.neg_ref())
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        let mut coeffs: BTreeMap<i64, Rat> = BTreeMap::new();
        for (ka, ca) in &self.coeffs {
            for (kb, cb) in &rhs.coeffs {
                let entry = coeffs.entry(ka + kb).or_insert_with(Rat::zero);
                *entry += ca * cb;
            }
        }
        coeffs.retain(|_, c| !Ring::is_zero(c));
        Pi2Poly { coeffs }
    }
    fn neg_ref(&self) -> Self {
        Pi2Poly {
            coeffs: self.coeffs.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }
    fn from_i64(n: i64) -> Self {
        Pi2Poly::from_rat(rat_int(n))
    }
}

/// Tagged scalar for heterogeneous boundaries (CLI payloads, FFI).
///
/// Arithmetic promotes rationals into either extension; mixing the Gaussian
/// and ι-Laurent variants is an error because i and ι are related by the
/// transcendental factor 2π and neither embeds in the other.
#[derive(Clone, PartialEq, Debug)]
pub enum Scalar {
    Rational(Rat),
    Gaussian(QGauss),
    Iota(IotaScalar),
}

impl Scalar {
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => Ring::is_zero(r),
            Scalar::Gaussian(g) => Ring::is_zero(g),
            Scalar::Iota(s) => Ring::is_zero(s),
        }
    }

    fn binop(
        &self,
        rhs: &Scalar,
        fr: impl Fn(&Rat, &Rat) -> Rat,
        fg: impl Fn(&QGauss, &QGauss) -> QGauss,
        fi: impl Fn(&IotaScalar, &IotaScalar) -> IotaScalar,
    ) -> Result<Scalar, ScalarError> {
        use Scalar::*;
        Ok(match (self, rhs) {
            (Rational(a), Rational(b)) => Rational(fr(a, b)),
            (Gaussian(a), Gaussian(b)) => Gaussian(fg(a, b)),
            (Iota(a), Iota(b)) => Iota(fi(a, b)),
            (Rational(a), Gaussian(b)) => Gaussian(fg(&QGauss::from_rat(a.clone()), b)),
            (Gaussian(a), Rational(b)) => Gaussian(fg(a, &QGauss::from_rat(b.clone()))),
            (Rational(a), Iota(b)) => Iota(fi(&IotaScalar::from_rat(a.clone()), b)),
            (Iota(a), Rational(b)) => Iota(fi(a, &IotaScalar::from_rat(b.clone()))),
            (Gaussian(_), Iota(_)) | (Iota(_), Gaussian(_)) => {
                return Err(ScalarError::GaussianIotaMix)
            }
        })
    }

    pub fn add(&self, rhs: &Scalar) -> Result<Scalar, ScalarError> {
        self.binop(rhs, |a, b| a + b, |a, b| a.add_ref(b), |a, b| a.add_ref(b))
    }

    pub fn mul(&self, rhs: &Scalar) -> Result<Scalar, ScalarError> {
        self.binop(rhs, |a, b| a * b, |a, b| a.mul_ref(b), |a, b| a.mul_ref(b))
    }

    /// Rewrite an even ι-Laurent (or plain rational) value as a polynomial in π².
    pub fn project_pi2(&self) -> Result<Pi2Poly, ScalarError> {
        match self {
            Scalar::Rational(r) => Ok(Pi2Poly::from_rat(r.clone())),
            Scalar::Iota(s) => s.project_pi2(),
            Scalar::Gaussian(g) => {
                if g.is_rational() {
                    Ok(Pi2Poly::from_rat(g.re.clone()))
                } else {
                    Err(ScalarError::NotInvertible(
                        "imaginary gaussian value has no pi^2 form".into(),
                    ))
                }
            }
        }
    }
}

/// Scalars adjoined √6: values a + b√6 with Gaussian-rational a, b.
///
/// This is the exact home of the Wronskian and Jacobian constants such as
/// −16/(3√6) and 8√(−2) = 8√2·i.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Q6 {
    /// Rational-in-i part.
    pub a: QGauss,
    /// Coefficient of √6.
    pub b: QGauss,
}

impl Q6 {
    pub fn new(a: QGauss, b: QGauss) -> Self {
        Q6 { a, b }
    }

    pub fn from_gauss(a: QGauss) -> Self {
        Q6 {
            a,
            b: Ring::zero(),
        }
    }

    pub fn sqrt6() -> Self {
        Q6 {
            a: Ring::zero(),
            b: Ring::one(),
        }
    }
}

impl fmt::Display for Q6 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if Ring::is_zero(&self.b) {
            write!(f, "{}", self.a)
        } else if Ring::is_zero(&self.a) {
            write!(f, "({})*sqrt6", self.b)
        } else {
            write!(f, "({}) + ({})*sqrt6", self.a, self.b)
        }
    }
}

impl Ring for Q6 {
    fn zero() -> Self {
        Q6::from_gauss(Ring::zero())
    }
    fn one() -> Self {
        Q6::from_gauss(Ring::one())
    }
    fn is_zero(&self) -> bool {
        Ring::is_zero(&self.a) && Ring::is_zero(&self.b)
    }
    fn add_ref(&self, rhs: &Self) -> Self {
        Q6 {
            a: self.a.add_ref(&rhs.a),
            b: self.b.add_ref(&rhs.b),
        }
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        Q6 {
            a: self.a.sub_ref(&rhs.a),
            b: self.b.sub_ref(&rhs.b),
        }
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        // (a + b√6)(c + d√6) = (ac + 6bd) + (ad + bc)√6
        let six = QGauss::from_i64(6);
        Q6 {
            a: self
                .a
                .mul_ref(&rhs.a)
                .add_ref(&six.mul_ref(&self.b.mul_ref(&rhs.b))),
            b: self.a.mul_ref(&rhs.b).add_ref(&self.b.mul_ref(&rhs.a)),
        }
    }
    fn neg_ref(&self) -> Self {
        Q6 {
            a: self.a.neg_ref(),
            b: self.b.neg_ref(),
        }
    }
    fn from_i64(n: i64) -> Self {
        Q6::from_gauss(QGauss::from_i64(n))
    }
}

impl Field for Q6 {
    fn try_inv(&self) -> Option<Self> {
        if Ring::is_zero(self) {
            return None;
        }
        // 1/(a + b√6) = (a − b√6)/(a² − 6b²); a² − 6b² ≠ 0 since √6 ∉ ℚ(i).
        let six = QGauss::from_i64(6);
        let denom = self
            .a
            .mul_ref(&self.a)
            .sub_ref(&six.mul_ref(&self.b.mul_ref(&self.b)));
        let denom_inv = denom.try_inv()?;
        Some(Q6 {
            a: self.a.mul_ref(&denom_inv),
            b: self.b.neg_ref().mul_ref(&denom_inv),
        })
    }
}
