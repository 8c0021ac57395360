//! q-expansions of the classical modular objects: Eisenstein series, the
//! discriminant Δ = E₄³ − E₆², the normalized j-invariant J = E₄³/Δ and its
//! functional inverse, and the Jacobi theta constants.
//!
//! Conventions: q = e^{2πiτ}; Δ has leading term 1728·q, so J = E₄³/Δ is
//! the classical j divided by 1728 (J(i) = 1, J(e^{2πi/3}) = 0). Theta
//! constants are expanded in the eighth root v = e^{πiτ/4}, the smallest
//! variable in which all three are plain integer power series; q = v⁸.

use crate::bigfloat::{Complex, Ctx};
use crate::scalar::{rat, rat_int, Field, Rat, Ring};
use crate::series::TruncatedSeries;
use num_bigint::BigInt;
use thiserror::Error;

/// σ_k(n) = Σ_{d|n} d^k.
fn divisor_power_sum(n: i64, k: u32) -> BigInt {
    let mut s = BigInt::from(0);
    for d in 1..=n {
        if n % d == 0 {
            let mut p = BigInt::from(1);
            for _ in 0..k {
                p *= BigInt::from(d);
            }
            s += p;
        }
    }
    s
}

/// Eisenstein series E₂, E₄ or E₆ modulo q^order:
/// E_k = 1 + c_k Σ_{n≥1} σ_{k−1}(n) qⁿ with c₂ = −24, c₄ = 240, c₆ = −504.
pub fn eisenstein_q(weight: u32, order: i64) -> TruncatedSeries<Rat> {
    let c = match weight {
        2 => -24,
        4 => 240,
        6 => -504,
        _ => panic!("eisenstein weight must be 2, 4 or 6, not {weight}"),
    };
    TruncatedSeries::from_fn(Some("q"), 0, order, |n| {
        if n == 0 {
            Rat::one()
        } else {
            Rat::from_integer(BigInt::from(c) * divisor_power_sum(n, weight - 1))
        }
    })
}

/// Δ = E₄³ − E₆² modulo q^order; the expansion starts 1728·q.
pub fn delta_q(order: i64) -> TruncatedSeries<Rat> {
    let e4 = eisenstein_q(4, order);
    let e6 = eisenstein_q(6, order);
    e4.mul_ref(&e4)
        .mul_ref(&e4)
        .sub_ref(&e6.mul_ref(&e6))
        .truncate(order)
}

/// η²⁴ = q·∏_{n≥1}(1 − qⁿ)²⁴ modulo q^order — the cusp form Δ/1728.
pub fn eta24_q(order: i64) -> TruncatedSeries<Rat> {
    let one = TruncatedSeries::one().truncate(order);
    let mut euler = one.clone();
    for n in 1..order {
        let f = one.sub_ref(&TruncatedSeries::monomial(Some("q"), n, Rat::one()).truncate(order));
        euler = euler.mul_ref(&f);
    }
    let mut p = one;
    for _ in 0..24 {
        p = p.mul_ref(&euler);
    }
    p.shift(1).truncate(order)
}

/// The normalized j-invariant J = E₄³/Δ = j/1728 as a Laurent series,
/// J = (1/1728)q⁻¹ + 31/72 + …, known modulo q^order.
pub fn j_normalized_q(order: i64) -> TruncatedSeries<Rat> {
    let n = order + 2;
    let e4 = eisenstein_q(4, n);
    let num = e4.mul_ref(&e4).mul_ref(&e4);
    let den = delta_q(n);
    num.mul_ref(&den.try_inv().expect("discriminant has valuation 1"))
        .truncate(order)
}

/// Functional inverse of J: the expansion of q in the local coordinate
/// w = 1/J at the cusp, q(w) = w/1728 + …, modulo w^order.
pub fn q_of_inverse_j(order: i64) -> TruncatedSeries<Rat> {
    let j = j_normalized_q(order);
    let w = j.try_inv().expect("J has valuation -1").truncate(order);
    w.revert().with_var(Some("w"))
}

/// The three Jacobi theta constants as integer series in v = e^{πiτ/4}
/// (so q = v⁸), modulo v^order:
/// θ₀₀ = Σ v^{4n²}, θ₀₁ = Σ (−1)ⁿ v^{4n²}, θ₁₀ = 2Σ_{n≥0} v^{(2n+1)²}.
pub fn theta_constants(order: i64) -> [TruncatedSeries<Rat>; 3] {
    assert!(order > 0, "theta expansion needs a positive order");
    let len = order as usize;
    let mut t00 = vec![Rat::zero(); len];
    let mut t01 = vec![Rat::zero(); len];
    let mut t10 = vec![Rat::zero(); len];
    let mut n: i64 = 0;
    loop {
        let e = 4 * n * n;
        if e >= order {
            break;
        }
        let mult = if n == 0 { 1 } else { 2 };
        t00[e as usize] += rat_int(mult);
        t01[e as usize] += rat_int(if n % 2 == 0 { mult } else { -mult });
        n += 1;
    }
    let mut n: i64 = 0;
    loop {
        let e = (2 * n + 1) * (2 * n + 1);
        if e >= order {
            break;
        }
        t10[e as usize] += rat_int(2);
        n += 1;
    }
    [
        TruncatedSeries::new(Some("v"), 0, t00, order),
        TruncatedSeries::new(Some("v"), 0, t01, order),
        TruncatedSeries::new(Some("v"), 0, t10, order),
    ]
}

/// Substitute q = v⁸ into a q-series.
pub fn to_v_variable(s: &TruncatedSeries<Rat>) -> TruncatedSeries<Rat> {
    s.compose(&TruncatedSeries::monomial(Some("v"), 8, Rat::one()))
}

/// Two-variable series: outer variable v₁, inner variable v₂.
pub type TwoVar = TruncatedSeries<TruncatedSeries<Rat>>;

/// View a v-series as a function of the first point only.
fn lift_first(s: &TruncatedSeries<Rat>) -> TwoVar {
    s.map(|c| TruncatedSeries::constant(c.clone()))
        .with_var(Some("v1"))
}

/// View a v-series as a function of the second point only, carrying the
/// first point's truncation order on the outer layer.
fn lift_second(s: &TruncatedSeries<Rat>) -> TwoVar {
    let inner = s.with_var(Some("v2"));
    TruncatedSeries::new(Some("v1"), 0, vec![inner], s.trunc())
}

fn pow4(t: &TruncatedSeries<Rat>) -> TruncatedSeries<Rat> {
    let sq = t.mul_ref(t);
    sq.mul_ref(&sq)
}

/// A symmetric two-variable combination of theta constants together with
/// its prefactor: the value is `rational_factor · (2π/x)^{x_pow} · series`.
pub struct TwoVarForm {
    pub x_pow: u32,
    pub rational_factor: Rat,
    pub series: TwoVar,
}

/// Two-variable extension of E₄:
/// E₄⁽²⁾ = (2π/x)² Σ_{ab} θ_ab(τ₁)⁴ θ_ab(τ₂)⁴,
/// which restricts on the diagonal τ₁ = τ₂ = τ to 2(2π/x)²E₄(τ).
pub fn two_var_e4(order: i64) -> TwoVarForm {
    let thetas = theta_constants(order);
    let mut sum = TwoVar::zero().truncate(order);
    for t in &thetas {
        let f4 = pow4(t);
        sum = sum.add_ref(&lift_first(&f4).mul_ref(&lift_second(&f4)));
    }
    TwoVarForm {
        x_pow: 2,
        rational_factor: Rat::one(),
        series: sum,
    }
}

/// Two-variable extension of Δ:
/// Δ⁽²⁾ = 2(2π/x)⁶ Π_{ab} θ_ab(τ₁)⁴ θ_ab(τ₂)⁴,
/// which restricts on the diagonal to (8/27)(2π/x)⁶Δ(τ).
pub fn two_var_delta(order: i64) -> TwoVarForm {
    let thetas = theta_constants(order);
    let mut prod = TwoVar::one().truncate(order);
    for t in &thetas {
        let f4 = pow4(t);
        prod = prod
            .mul_ref(&lift_first(&f4).mul_ref(&lift_second(&f4)))
            .truncate(order);
    }
    TwoVarForm {
        x_pow: 6,
        rational_factor: rat(2, 1),
        series: prod,
    }
}

/// Restrict a two-variable series to the diagonal v₁ = v₂ = v.
pub fn diagonal(s: &TwoVar) -> TruncatedSeries<Rat> {
    let t = s.trunc();
    assert!(
        t != crate::series::EXACT,
        "diagonal restriction expects a finitely truncated series"
    );
    let mut acc = vec![Rat::zero(); t.max(0) as usize];
    for (e1, inner) in s.iter_terms() {
        for (e2, c) in inner.iter_terms() {
            let e = e1 + e2;
            if (0..t).contains(&e) {
                acc[e as usize] = acc[e as usize].add_ref(c);
            }
        }
    }
    TruncatedSeries::new(Some("v"), 0, acc, t)
}

// ---------------------------------------------------------------------------
// Numeric evaluation
// ---------------------------------------------------------------------------

/// Failure of a numeric theta summation.
#[derive(Debug, Error)]
pub enum ThetaNumericError {
    /// The lattice sum did not fall below the precision threshold within
    /// the term budget (the imaginary part is too small for the requested
    /// precision).
    #[error("theta summation did not converge within {terms} terms")]
    Divergence { terms: usize },
}

/// Numeric values of the three theta constants at one point of ℍ.
#[derive(Clone, Debug)]
pub struct ThetaValues {
    pub t00: Complex,
    pub t01: Complex,
    pub t10: Complex,
}

/// Evaluate θ₀₀, θ₀₁, θ₁₀ at τ with Im τ > 0 by direct lattice summation:
/// with p = e^{πiτ},
/// θ₀₀ = 1 + 2Σ_{n≥1} p^{n²}, θ₀₁ = 1 + 2Σ_{n≥1} (−1)ⁿ p^{n²},
/// θ₁₀ = 2 p^{1/4} Σ_{n≥0} p^{n(n+1)}.
pub fn theta_numeric(tau: &Complex, precision: u32) -> Result<ThetaValues, ThetaNumericError> {
    assert!(
        tau.im.is_positive(),
        "theta constants need a point of the upper half-plane"
    );
    let mut ctx = Ctx::new(precision as usize);
    let budget = 10 * precision as usize + 64;
    let tail_exp = -(precision as i64 + 16);

    let pi = ctx.pi();
    // p = e^{iπτ}: iπτ has real part −π·Im τ and imaginary part π·Re τ.
    let p = {
        let arg = Complex {
            re: ctx.sub(&ctx.int(0), &ctx.mul(&pi, &tau.im)),
            im: ctx.mul(&pi, &tau.re),
        };
        ctx.cexp(&arg)
    };
    let quarter_root = {
        let four = ctx.int(4);
        let arg = Complex {
            re: ctx.div(&ctx.sub(&ctx.int(0), &ctx.mul(&pi, &tau.im)), &four),
            im: ctx.div(&ctx.mul(&pi, &tau.re), &four),
        };
        ctx.cexp(&arg)
    };

    let p2 = ctx.cmul(&p, &p);
    let mut even_acc = ctx.c_int(0, 0); // Σ_{n≥1} p^{n²}
    let mut alt_acc = ctx.c_int(0, 0); // Σ_{n≥1} (−1)ⁿ p^{n²}
    let mut odd_acc = ctx.c_int(1, 0); // Σ_{n≥0} p^{n(n+1)}, n = 0 term done
    let mut pn2 = p.clone(); // p^{n²}, n = 1
    let mut podd = ctx.cmul(&p2, &p); // p^{2n+1}, n = 1
    let mut pnn = p2.clone(); // p^{n(n+1)}, n = 1
    let mut peven = ctx.cmul(&p2, &p2); // p^{2n+2}, n = 1
    let mut converged = false;
    for n in 1..budget {
        even_acc = ctx.cadd(&even_acc, &pn2);
        if n % 2 == 0 {
            alt_acc = ctx.cadd(&alt_acc, &pn2);
        } else {
            alt_acc = ctx.csub(&alt_acc, &pn2);
        }
        odd_acc = ctx.cadd(&odd_acc, &pnn);
        if ctx.abs_le_pow2(&ctx.cabs(&pn2), tail_exp) && ctx.abs_le_pow2(&ctx.cabs(&pnn), tail_exp)
        {
            converged = true;
            break;
        }
        pn2 = ctx.cmul(&pn2, &podd);
        podd = ctx.cmul(&podd, &p2);
        pnn = ctx.cmul(&pnn, &peven);
        peven = ctx.cmul(&peven, &p2);
    }
    if !converged {
        return Err(ThetaNumericError::Divergence { terms: budget });
    }

    let one = ctx.c_int(1, 0);
    let two = ctx.int(2);
    let t00 = ctx.cadd(&one, &ctx.cscale(&even_acc, &two));
    let t01 = ctx.cadd(&one, &ctx.cscale(&alt_acc, &two));
    let t10 = ctx.cscale(&ctx.cmul(&quarter_root, &odd_acc), &two);
    Ok(ThetaValues { t00, t01, t10 })
}

/// Numeric values of the two-variable invariants at one point.
#[derive(Clone, Debug)]
pub struct TwoVarValues {
    /// (2π/x)² Σ_ab θ_ab(τ₁)⁴ θ_ab(τ₂)⁴.
    pub e4_2: Complex,
    /// 2(2π/x)⁶ Π_ab θ_ab(τ₁)⁴ θ_ab(τ₂)⁴.
    pub delta_2: Complex,
}

/// Evaluate the symmetric two-variable extensions of E₄ and Δ at
/// (τ₁, τ₂, x) ∈ ℍ²×ℂ*. Swapping τ₁ ↔ τ₂ leaves both values unchanged,
/// and both are invariant under the twisted diagonal modular action.
pub fn two_var_invariants(
    tau1: &Complex,
    tau2: &Complex,
    x: &Complex,
    precision: u32,
) -> Result<TwoVarValues, ThetaNumericError> {
    assert!(
        !(x.re.is_zero() && x.im.is_zero()),
        "the scaling coordinate must be nonzero"
    );
    let th1 = theta_numeric(tau1, precision)?;
    let th2 = theta_numeric(tau2, precision)?;
    let mut ctx = Ctx::new(precision as usize);
    let two_pi = ctx.two_pi();
    let w = ctx.cdiv(&ctx.c_from_real(two_pi), x);
    let w2 = ctx.cmul(&w, &w);
    let w6 = ctx.cpowi(&w, 6);

    let pairs = [
        (&th1.t00, &th2.t00),
        (&th1.t01, &th2.t01),
        (&th1.t10, &th2.t10),
    ];
    let mut sum = ctx.c_int(0, 0);
    let mut prod = ctx.c_int(1, 0);
    for (a, b) in pairs {
        let f = ctx.cmul(&ctx.cpowi(a, 4), &ctx.cpowi(b, 4));
        sum = ctx.cadd(&sum, &f);
        prod = ctx.cmul(&prod, &f);
    }
    let e4_2 = ctx.cmul(&w2, &sum);
    let delta_2 = ctx.cscale(&ctx.cmul(&w6, &prod), &ctx.int(2));
    Ok(TwoVarValues { e4_2, delta_2 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eisenstein_low_coefficients() {
        let e2 = eisenstein_q(2, 4);
        assert_eq!(e2.coeff(0), rat_int(1));
        assert_eq!(e2.coeff(1), rat_int(-24));
        assert_eq!(e2.coeff(2), rat_int(-72));
        assert_eq!(e2.coeff(3), rat_int(-96));
        let e4 = eisenstein_q(4, 3);
        assert_eq!(e4.coeff(1), rat_int(240));
        assert_eq!(e4.coeff(2), rat_int(2160));
        let e6 = eisenstein_q(6, 3);
        assert_eq!(e6.coeff(1), rat_int(-504));
        assert_eq!(e6.coeff(2), rat_int(-16632));
    }

    #[test]
    fn discriminant_is_a_multiple_of_the_eta_product() {
        let order = 12;
        let d = delta_q(order);
        let eta = eta24_q(order);
        assert_eq!(d, eta.scale(&rat_int(1728)), "Δ = 1728·η²⁴");
        // Classical Ramanujan tau coefficients: q − 24q² + 252q³ − 1472q⁴.
        assert_eq!(eta.coeff(1), rat_int(1));
        assert_eq!(eta.coeff(2), rat_int(-24));
        assert_eq!(eta.coeff(3), rat_int(252));
        assert_eq!(eta.coeff(4), rat_int(-1472));
    }

    #[test]
    fn j_invariant_coefficients() {
        // 1728·J = q⁻¹ + 744 + 196884q + 21493760q² + 864299970q³ + …
        let j = j_normalized_q(4).scale(&rat_int(1728));
        assert_eq!(j.min_pow(), -1);
        assert_eq!(j.coeff(-1), rat_int(1));
        assert_eq!(j.coeff(0), rat_int(744));
        assert_eq!(j.coeff(1), rat_int(196884));
        assert_eq!(j.coeff(2), rat_int(21493760));
        assert_eq!(j.coeff(3), rat_int(864299970));
    }

    #[test]
    fn inverse_j_reversion_against_lagrange() {
        // Lagrange inversion: with w(q) = 1/J(q) of valuation 1,
        // [wⁿ] q(w) = (1/n)·[q^{n−1}] (q/w(q))ⁿ.
        let order = 10;
        let qw = q_of_inverse_j(order);
        assert_eq!(qw.coeff(1), rat(1, 1728));
        let w = j_normalized_q(order + 2)
            .try_inv()
            .unwrap()
            .truncate(order + 1);
        let unit_inv = w.shift(-1).try_inv().unwrap(); // q/w, valuation 0
        for n in 1..order {
            let mut p = TruncatedSeries::one().truncate(order);
            for _ in 0..n {
                p = p.mul_ref(&unit_inv);
            }
            let lagrange = p.coeff(n - 1) / rat_int(n);
            assert_eq!(qw.coeff(n), lagrange, "coefficient of w^{n}");
        }
    }

    #[test]
    fn functional_inverse_roundtrip() {
        // Substituting q(w) back into w(q) = 1/J returns w identically.
        let order = 9;
        let qw = q_of_inverse_j(order);
        let w_of_q = j_normalized_q(order + 2).try_inv().unwrap().truncate(order);
        let round = w_of_q.compose(&qw);
        assert_eq!(round.var(), Some("w"));
        assert_eq!(round.coeff(1), Rat::one());
        for e in 2..round.trunc() {
            assert!(round.coeff(e).is_zero(), "w∘q at w^{e}");
        }
    }

    #[test]
    fn theta_series_shapes() {
        let [t00, t01, t10] = theta_constants(30);
        // θ₀₀ = 1 + 2v⁴ + 2v¹⁶ + …, θ₀₁ = 1 − 2v⁴ + 2v¹⁶ − …,
        // θ₁₀ = 2v + 2v⁹ + 2v²⁵ + …
        assert_eq!(t00.coeff(0), rat_int(1));
        assert_eq!(t00.coeff(4), rat_int(2));
        assert_eq!(t00.coeff(16), rat_int(2));
        assert_eq!(t01.coeff(0), rat_int(1));
        assert_eq!(t01.coeff(4), rat_int(-2));
        assert_eq!(t01.coeff(16), rat_int(2));
        assert_eq!(t10.coeff(1), rat_int(2));
        assert_eq!(t10.coeff(9), rat_int(2));
        assert_eq!(t10.coeff(25), rat_int(2));
        assert!(t00.coeff(2).is_zero());
    }

    #[test]
    fn jacobi_quartic_identity() {
        let [t00, t01, t10] = theta_constants(64);
        let lhs = pow4(&t00);
        let rhs = pow4(&t01).add_ref(&pow4(&t10));
        assert_eq!(lhs, rhs, "θ₀₀⁴ = θ₀₁⁴ + θ₁₀⁴");
    }

    fn pow8(t: &TruncatedSeries<Rat>) -> TruncatedSeries<Rat> {
        let f = pow4(t);
        f.mul_ref(&f)
    }

    #[test]
    fn eisenstein_and_discriminant_from_thetas() {
        let v_order = 64;
        let [t00, t01, t10] = theta_constants(v_order);
        let sum8 = pow8(&t00).add_ref(&pow8(&t01)).add_ref(&pow8(&t10));
        let e4_v = to_v_variable(&eisenstein_q(4, v_order / 8));
        assert_eq!(
            sum8.truncate(e4_v.trunc()).scale(&rat(1, 2)),
            e4_v,
            "E₄ = (θ₀₀⁸+θ₀₁⁸+θ₁₀⁸)/2"
        );
        let prod8 = pow8(&t00).mul_ref(&pow8(&t01)).mul_ref(&pow8(&t10));
        let delta_v = to_v_variable(&delta_q(v_order / 8));
        assert_eq!(
            prod8.truncate(delta_v.trunc()).scale(&rat(27, 4)),
            delta_v,
            "Δ = (27/4)(θ₀₀θ₀₁θ₁₀)⁸"
        );
    }

    #[test]
    fn two_variable_forms_restrict_to_the_diagonal_values() {
        let order = 48;
        let e4_2 = two_var_e4(order);
        let diag = diagonal(&e4_2.series);
        let expect = to_v_variable(&eisenstein_q(4, order / 8)).scale(&rat_int(2));
        assert_eq!(
            diag.truncate(expect.trunc()),
            expect,
            "Σθ⁴⊗θ⁴ on the diagonal is 2E₄"
        );
        assert_eq!(e4_2.x_pow, 2);

        let d2 = two_var_delta(order);
        let diag = diagonal(&d2.series);
        // With the documented factor 2, the diagonal is (8/27)Δ; the bare
        // product is (4/27)Δ.
        let expect = to_v_variable(&delta_q(order / 8)).scale(&rat(4, 27));
        assert_eq!(
            diag.truncate(expect.trunc()),
            expect,
            "Πθ⁴⊗θ⁴ on the diagonal is (4/27)Δ"
        );
        assert_eq!(d2.x_pow, 6);
        assert_eq!(d2.rational_factor, rat(2, 1));
    }

    #[test]
    fn two_variable_form_is_symmetric() {
        let order = 24;
        let s = two_var_e4(order).series;
        for e1 in 0..12 {
            for e2 in 0..12 {
                let a = s.coeff(e1).coeff(e2);
                let b = s.coeff(e2).coeff(e1);
                assert_eq!(a, b, "symmetry at ({e1},{e2})");
            }
        }
    }

    /// Evaluate a v-series (v = e^{πiτ/4}) numerically at τ = it on the
    /// imaginary axis.
    fn eval_v_series(
        ctx: &mut crate::bigfloat::Ctx,
        s: &TruncatedSeries<Rat>,
        t_im: i64,
    ) -> crate::bigfloat::BigFloat {
        // v = e^{−πt/4} is real.
        let pi = ctx.pi();
        let v = {
            let four = ctx.int(4);
            let t = ctx.int(t_im);
            let arg = ctx.div(&ctx.sub(&ctx.int(0), &ctx.mul(&pi, &t)), &four);
            ctx.exp(&arg)
        };
        let mut acc = ctx.int(0);
        let mut power = ctx.int(1);
        let mut e_prev = 0i64;
        for (e, c) in s.iter_terms() {
            for _ in e_prev..e {
                power = ctx.mul(&power, &v);
            }
            e_prev = e;
            acc = ctx.add(&acc, &ctx.mul(&ctx.from_rat(c), &power));
        }
        acc
    }

    fn cdist(ctx: &crate::bigfloat::Ctx, a: &Complex, b: &Complex) -> crate::bigfloat::BigFloat {
        ctx.cabs(&Complex {
            re: ctx.sub(&a.re, &b.re),
            im: ctx.sub(&a.im, &b.im),
        })
    }

    #[test]
    fn numeric_thetas_match_the_exact_expansions() {
        let prec = 192u32;
        let order = 320; // v-order: v = e^{−π/2} at τ = 2i, v^320 ≈ 2^{−724}
        let [t00, t01, t10] = theta_constants(order);
        let mut ctx = Ctx::new(prec as usize);
        let tau = ctx.c_int(0, 2);
        let th = theta_numeric(&tau, prec).expect("θ(2i) converges");
        let tol = -150i64;
        for (name, series, value) in [
            ("θ00", &t00, &th.t00),
            ("θ01", &t01, &th.t01),
            ("θ10", &t10, &th.t10),
        ] {
            let exact = eval_v_series(&mut ctx, series, 2);
            let err = ctx.sub(&exact, &value.re);
            assert!(
                ctx.abs_le_pow2(&err, tol),
                "{name}(2i) series vs lattice sum"
            );
            assert!(ctx.abs_le_pow2(&value.im, tol), "{name}(2i) is real");
        }
    }

    #[test]
    fn numeric_thetas_obey_the_transformation_rules() {
        let prec = 192u32;
        let tol = -100i64; // ≈ 30 decimal digits
        let mut ctx = Ctx::new(prec as usize);
        let pi = ctx.pi();
        let half = ctx.div(&ctx.int(1), &ctx.int(2));
        let third = ctx.div(&ctx.int(1), &ctx.int(3));
        let samples = [
            ctx.c_int(0, 2),
            Complex {
                re: third,
                im: ctx.int(1),
            },
        ];
        for tau in &samples {
            let th = theta_numeric(tau, prec).expect("convergent sample");

            // τ ↦ τ + 1 swaps θ00 ↔ θ01 and multiplies θ10 by e^{iπ/4}.
            let shifted = Complex {
                re: ctx.add(&tau.re, &ctx.int(1)),
                im: tau.im.clone(),
            };
            let th_shift = theta_numeric(&shifted, prec).expect("convergent shift");
            let eighth_root = {
                let arg = Complex {
                    re: ctx.int(0),
                    im: ctx.div(&pi, &ctx.int(4)),
                };
                ctx.cexp(&arg)
            };
            assert!(
                ctx.abs_le_pow2(&cdist(&ctx, &th_shift.t00, &th.t01), tol),
                "θ00(τ+1) = θ01(τ)"
            );
            assert!(
                ctx.abs_le_pow2(&cdist(&ctx, &th_shift.t01, &th.t00), tol),
                "θ01(τ+1) = θ00(τ)"
            );
            let twisted = ctx.cmul(&eighth_root, &th.t10);
            assert!(
                ctx.abs_le_pow2(&cdist(&ctx, &th_shift.t10, &twisted), tol),
                "θ10(τ+1) = e^{{iπ/4}}θ10(τ)"
            );

            // τ ↦ −1/τ multiplies by (−iτ)^{1/2} and swaps θ01 ↔ θ10.
            let inverted = {
                let norm = ctx.add(&ctx.mul(&tau.re, &tau.re), &ctx.mul(&tau.im, &tau.im));
                Complex {
                    re: ctx.div(&ctx.sub(&ctx.int(0), &tau.re), &norm),
                    im: ctx.div(&tau.im, &norm),
                }
            };
            let th_inv = theta_numeric(&inverted, prec).expect("convergent inversion");
            let factor = {
                // (−iτ)^{1/2} via the principal logarithm; −iτ has positive
                // real part for τ ∈ ℍ, so the principal branch is correct.
                let minus_i_tau = Complex {
                    re: tau.im.clone(),
                    im: ctx.sub(&ctx.int(0), &tau.re),
                };
                let log = ctx.c_ln(&minus_i_tau);
                ctx.cexp(&ctx.cscale(&log, &half))
            };
            for (name, transformed, original) in [
                ("θ00(−1/τ) = (−iτ)^{1/2}θ00(τ)", &th_inv.t00, &th.t00),
                ("θ01(−1/τ) = (−iτ)^{1/2}θ10(τ)", &th_inv.t01, &th.t10),
                ("θ10(−1/τ) = (−iτ)^{1/2}θ01(τ)", &th_inv.t10, &th.t01),
            ] {
                let expect = ctx.cmul(&factor, original);
                assert!(ctx.abs_le_pow2(&cdist(&ctx, transformed, &expect), tol), "{name}");
            }
        }
    }

    /// Sum a q-expansion at q = e^{2πiτ} for τ = it on the imaginary axis.
    fn eval_q_series(
        ctx: &mut crate::bigfloat::Ctx,
        s: &TruncatedSeries<Rat>,
        t_im: i64,
    ) -> crate::bigfloat::BigFloat {
        let two_pi = ctx.two_pi();
        let q = {
            let t = ctx.int(t_im);
            let arg = ctx.sub(&ctx.int(0), &ctx.mul(&two_pi, &t));
            ctx.exp(&arg)
        };
        let mut acc = ctx.int(0);
        let mut power = ctx.int(1);
        let mut e_prev = 0i64;
        for (e, c) in s.iter_terms() {
            for _ in e_prev..e {
                power = ctx.mul(&power, &q);
            }
            e_prev = e;
            acc = ctx.add(&acc, &ctx.mul(&ctx.from_rat(c), &power));
        }
        acc
    }

    #[test]
    fn two_variable_invariants_restrict_and_transform() {
        let prec = 192u32;
        let tol = -100i64;
        let mut ctx = Ctx::new(prec as usize);

        let tau = ctx.c_int(0, 2);
        let x = ctx.c_int(3, 1);

        // Diagonal restriction against the classical Eisenstein values at 2i.
        let e4_val = eval_q_series(&mut ctx, &eisenstein_q(4, 40), 2);
        let e6_val = eval_q_series(&mut ctx, &eisenstein_q(6, 40), 2);
        let delta_val = {
            let e4_cubed = ctx.mul(&ctx.mul(&e4_val, &e4_val), &e4_val);
            ctx.sub(&e4_cubed, &ctx.mul(&e6_val, &e6_val))
        };
        let diag = two_var_invariants(&tau, &tau, &x, prec).expect("diagonal point");
        let two_pi = ctx.two_pi();
        let w = ctx.cdiv(&ctx.c_from_real(two_pi), &x);
        let w2 = ctx.cmul(&w, &w);
        let w6 = ctx.cpowi(&w, 6);
        let expect_e4 = ctx.cscale(&ctx.cscale(&w2, &e4_val), &ctx.int(2));
        let expect_delta = {
            let scaled = ctx.cscale(&w6, &delta_val);
            ctx.cscale(&scaled, &ctx.div(&ctx.int(8), &ctx.int(27)))
        };
        assert!(
            ctx.abs_le_pow2(&cdist(&ctx, &diag.e4_2, &expect_e4), tol),
            "diagonal value of the two-variable E₄ extension"
        );
        assert!(
            ctx.abs_le_pow2(&cdist(&ctx, &diag.delta_2, &expect_delta), tol),
            "diagonal value of the two-variable Δ extension"
        );

        // Swap symmetry at an off-diagonal point.
        let tau2 = Complex {
            re: ctx.div(&ctx.int(1), &ctx.int(5)),
            im: ctx.div(&ctx.int(3), &ctx.int(2)),
        };
        let ab = two_var_invariants(&tau, &tau2, &x, prec).expect("off-diagonal");
        let ba = two_var_invariants(&tau2, &tau, &x, prec).expect("swapped");
        assert!(
            ctx.abs_le_pow2(&cdist(&ctx, &ab.e4_2, &ba.e4_2), tol),
            "E₄ extension symmetric under swap"
        );
        assert!(
            ctx.abs_le_pow2(&cdist(&ctx, &ab.delta_2, &ba.delta_2), tol),
            "Δ extension symmetric under swap"
        );

        // Invariance under the twisted diagonal action of the modular group.
        // For T: (τ₁, τ₂, y) ↦ (τ₁+1, τ₂+1, χ₂(T)y) with χ₂(T) = −1.
        // For S: (τ₁, τ₂, y) ↦ (−1/τ₁, −1/τ₂, χ₂(S)τ₁τ₂y) with χ₂(S) = −1.
        // (x transforms like 1/y.)
        let chi_t = crate::monodromy::characters(&crate::monodromy::mat_t())
            .expect("character of the translation generator")
            .chi2;
        let chi_s = crate::monodromy::characters(&crate::monodromy::mat_s())
            .expect("character of the inversion generator")
            .chi2;
        assert_eq!(chi_t, -1);
        assert_eq!(chi_s, -1);

        let shift = |ctx: &crate::bigfloat::Ctx, t: &Complex| Complex {
            re: ctx.add(&t.re, &ctx.int(1)),
            im: t.im.clone(),
        };
        let t1s = shift(&ctx, &tau);
        let t2s = shift(&ctx, &tau2);
        let xs = ctx.cscale(&x, &ctx.int(chi_t));
        let under_t = two_var_invariants(&t1s, &t2s, &xs, prec).expect("T image");
        assert!(
            ctx.abs_le_pow2(&cdist(&ctx, &under_t.e4_2, &ab.e4_2), tol),
            "E₄ extension invariant under the translation action"
        );
        assert!(
            ctx.abs_le_pow2(&cdist(&ctx, &under_t.delta_2, &ab.delta_2), tol),
            "Δ extension invariant under the translation action"
        );

        let invert = |ctx: &crate::bigfloat::Ctx, t: &Complex| {
            let norm = ctx.add(&ctx.mul(&t.re, &t.re), &ctx.mul(&t.im, &t.im));
            Complex {
                re: ctx.div(&ctx.sub(&ctx.int(0), &t.re), &norm),
                im: ctx.div(&t.im, &norm),
            }
        };
        let t1i = invert(&ctx, &tau);
        let t2i = invert(&ctx, &tau2);
        let xi = {
            let prod = ctx.cmul(&tau, &tau2);
            let scaled = ctx.cmul(&prod, &x);
            ctx.cscale(&scaled, &ctx.int(chi_s))
        };
        let under_s = two_var_invariants(&t1i, &t2i, &xi, prec).expect("S image");
        assert!(
            ctx.abs_le_pow2(&cdist(&ctx, &under_s.e4_2, &ab.e4_2), tol),
            "E₄ extension invariant under the inversion action"
        );
        assert!(
            ctx.abs_le_pow2(&cdist(&ctx, &under_s.delta_2, &ab.delta_2), tol),
            "Δ extension invariant under the inversion action"
        );
    }

    #[test]
    fn theta_divergence_guard_reports() {
        let ctx = Ctx::new(64);
        // Imaginary part 2^{-40}: p = e^{−π·2^{−40}} is far too close to 1.
        let tiny = Complex {
            re: ctx.int(0),
            im: ctx.pow2(-40),
        };
        match theta_numeric(&tiny, 64) {
            Err(ThetaNumericError::Divergence { terms }) => assert!(terms > 0),
            other => panic!("expected a divergence report, got {other:?}"),
        }
    }
}
