//! Integral monodromy structure: the rank-3 lattice with pairing
//! (L^m|L^n) = 2+(m−n)², its reflections, the symmetric-square embedding of
//! the modular group, the order-2/order-3 characters, the resulting
//! monodromy homomorphism PSL₂(ℤ)×{±1} → GL₃, and the induced group actions
//! on ℍ×ℂ* and ℍ²×ℂ*.
//!
//! Row-vector convention throughout: a basis row E transforms as E·R, and the
//! symmetric-square matrices act on row vectors from the right.

use crate::bigfloat::{Complex, Ctx};
use crate::mat::{Mat3, Vec3};
use crate::scalar::{rat_int, Field, QGauss, Rat, Ring};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Signed;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MonodromyError {
    #[error("2x2 matrix must have determinant 1, got {0}")]
    NotUnimodular(BigInt),
    #[error("reflection vector must have self-pairing 2, got {0}")]
    NotNormalized(Rat),
}

// ---------------------------------------------------------------------------
// 2×2 integer matrices
// ---------------------------------------------------------------------------

/// 2×2 integer matrix [[a,b],[c,d]] with exact entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mat2 {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl Mat2 {
    pub fn new(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Self {
        Mat2 { a, b, c, d }
    }
    pub fn from_i64(a: i64, b: i64, c: i64, d: i64) -> Self {
        Mat2::new(a.into(), b.into(), c.into(), d.into())
    }
    pub fn identity() -> Self {
        Mat2::from_i64(1, 0, 0, 1)
    }
    pub fn det(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }
    pub fn mul(&self, rhs: &Self) -> Self {
        Mat2::new(
            &self.a * &rhs.a + &self.b * &rhs.c,
            &self.a * &rhs.b + &self.b * &rhs.d,
            &self.c * &rhs.a + &self.d * &rhs.c,
            &self.c * &rhs.b + &self.d * &rhs.d,
        )
    }
    pub fn neg(&self) -> Self {
        Mat2::new(-&self.a, -&self.b, -&self.c, -&self.d)
    }
    /// Inverse of a determinant-1 matrix: [[d,−b],[−c,a]].
    pub fn inverse_unimodular(&self) -> Self {
        assert_eq!(self.det(), BigInt::from(1), "inverse requires det 1");
        Mat2::new(self.d.clone(), -&self.b, -&self.c, self.a.clone())
    }
    /// Equality as elements of PSL₂(ℤ): equal up to an overall sign.
    pub fn same_psl2(&self, rhs: &Self) -> bool {
        *self == *rhs || *self == rhs.neg()
    }
    /// s·g⁻¹·s⁻¹ with s = [[0,1],[1,0]]; for g = [[a,b],[c,d]] this is
    /// [[a,−c],[−b,d]].
    pub fn conj_s_inverse(&self) -> Self {
        Mat2::new(self.a.clone(), -&self.c, -&self.b, self.d.clone())
    }
}

/// Order-2 generator [[0,1],[−1,0]].
pub fn mat_s() -> Mat2 {
    Mat2::from_i64(0, 1, -1, 0)
}
/// Translation [[1,1],[0,1]].
pub fn mat_t() -> Mat2 {
    Mat2::from_i64(1, 1, 0, 1)
}
/// [[1,k],[0,1]].
pub fn mat_t_pow(k: &BigInt) -> Mat2 {
    Mat2::new(1.into(), k.clone(), 0.into(), 1.into())
}
/// Lower-triangular unipotent [[1,0],[1,1]], the loop around the origin of
/// the Q-plane.
pub fn mat_kappa() -> Mat2 {
    Mat2::from_i64(1, 0, 1, 1)
}

// ---------------------------------------------------------------------------
// Lattice and pairing
// ---------------------------------------------------------------------------

/// Columns are the integral basis vectors E₁ = 1+2L−L², E₂ = −3+4L−L²,
/// E₃ = 1−2L+L² expressed in the power basis (1, L, L²).
pub fn basis_change() -> Mat3<Rat> {
    Mat3::from_rows([
        [rat_int(1), rat_int(-3), rat_int(1)],
        [rat_int(2), rat_int(4), rat_int(-2)],
        [rat_int(-1), rat_int(-1), rat_int(1)],
    ])
}

/// Lattice element carrying coordinates in both the power basis (1, L, L²)
/// and the E-basis; the two are related by the fixed invertible basis-change
/// matrix and round-trip exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeVector {
    l: Vec3<Rat>,
    e: Vec3<Rat>,
}

impl LatticeVector {
    pub fn from_l(l: Vec3<Rat>) -> Self {
        let p_inv = basis_change().try_inverse().expect("basis change invertible");
        let e = p_inv.mul_vec(&l);
        LatticeVector { l, e }
    }
    pub fn from_e(e: Vec3<Rat>) -> Self {
        let l = basis_change().mul_vec(&e);
        LatticeVector { l, e }
    }
    /// L^m for m = 0, 1, 2.
    pub fn power_basis(m: usize) -> Self {
        assert!(m < 3);
        let mut l = [rat_int(0), rat_int(0), rat_int(0)];
        l[m] = rat_int(1);
        LatticeVector::from_l(l)
    }
    pub fn l_coords(&self) -> &Vec3<Rat> {
        &self.l
    }
    pub fn e_coords(&self) -> &Vec3<Rat> {
        &self.e
    }
}

/// Symmetric bilinear form given by a Gram matrix in a fixed basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairingForm {
    pub gram: Mat3<Rat>,
}

impl PairingForm {
    /// Gram matrix in the power basis: entry (m,n) is 2+(m−n)².
    pub fn power_basis() -> Self {
        let f = |m: i64, n: i64| rat_int(2 + (m - n) * (m - n));
        PairingForm {
            gram: Mat3::from_rows([
                [f(0, 0), f(0, 1), f(0, 2)],
                [f(1, 0), f(1, 1), f(1, 2)],
                [f(2, 0), f(2, 1), f(2, 2)],
            ]),
        }
    }
    /// Gram matrix in the E-basis: only (E₁|E₃) = 4 and (E₂|E₂) = −8 are
    /// nonzero.
    pub fn e_basis() -> Self {
        PairingForm {
            gram: Mat3::from_rows([
                [rat_int(0), rat_int(0), rat_int(4)],
                [rat_int(0), rat_int(-8), rat_int(0)],
                [rat_int(4), rat_int(0), rat_int(0)],
            ]),
        }
    }
    /// vᵀ·G·w on coordinate vectors in this form's basis.
    pub fn pair(&self, v: &Vec3<Rat>, w: &Vec3<Rat>) -> Rat {
        let gw = self.gram.mul_vec(w);
        let mut acc = Rat::zero();
        for i in 0..3 {
            acc = acc.add_ref(&v[i].mul_ref(&gw[i]));
        }
        acc
    }
    /// Transport of the Gram matrix under the column basis change P:
    /// G ↦ PᵀGP.
    pub fn conjugate_by(&self, p: &Mat3<Rat>) -> Self {
        PairingForm {
            gram: p.transpose().mul(&self.gram).mul(p),
        }
    }
}

// ---------------------------------------------------------------------------
// Symmetric-square representation and printed generators
// ---------------------------------------------------------------------------

/// Symmetric-square matrix of a determinant-1 matrix [[a,b],[c,d]]:
/// [[a²,2ab,b²],[ac,ad+bc,bd],[c²,2cd,d²]], acting on row vectors from the
/// right. Satisfies ρ(g)ρ(h) = ρ(gh) and ρ(−g) = ρ(g).
pub fn rho(g: &Mat2) -> Result<Mat3<Rat>, MonodromyError> {
    let det = g.det();
    if det != BigInt::from(1) {
        return Err(MonodromyError::NotUnimodular(det));
    }
    let r = |x: BigInt| Rat::from_integer(x);
    let (a, b, c, d) = (&g.a, &g.b, &g.c, &g.d);
    Ok(Mat3::from_rows([
        [r(a * a), r(2 * (a * b)), r(b * b)],
        [r(a * c), r(a * d + b * c), r(b * d)],
        [r(c * c), r(2 * (c * d)), r(d * d)],
    ]))
}

/// The four printed 3×3 generators of the monodromy group.
pub struct Generators {
    pub r1: Mat3<Rat>,
    pub r2: Mat3<Rat>,
    pub r3: Mat3<Rat>,
    pub k: Mat3<Rat>,
}

/// Reflection generators R₁, R₂, R₃ and the unipotent K, with the relations
/// R₂ = KR₁K⁻¹ and R₃ = K²R₁K⁻² checked on construction.
pub fn generator_matrices() -> Generators {
    let row = |a: i64, b: i64, c: i64| [rat_int(a), rat_int(b), rat_int(c)];
    let r1 = Mat3::from_rows([row(0, 0, -1), row(0, 1, 0), row(-1, 0, 0)]);
    let r2 = Mat3::from_rows([row(-1, 2, -1), row(-2, 3, -1), row(-4, 4, -1)]);
    let r3 = Mat3::from_rows([row(-4, 4, -1), row(-10, 9, -2), row(-25, 20, -4)]);
    let k = Mat3::from_rows([row(1, 0, 0), row(1, 1, 0), row(1, 2, 1)]);
    let k_inv = k.try_inverse().expect("K invertible");
    assert_eq!(r2, k.mul(&r1).mul(&k_inv), "R2 = K R1 K^-1");
    assert_eq!(
        r3,
        k.mul(&k).mul(&r1).mul(&k_inv).mul(&k_inv),
        "R3 = K^2 R1 K^-2"
    );
    Generators { r1, r2, r3, k }
}

/// Matrix of the reflection w_a(x) = x − (a|x)·a in the E-basis under the
/// row convention (the basis row E transforms as E·R). Requires (a|a) = 2.
pub fn reflection(a: &LatticeVector) -> Result<Mat3<Rat>, MonodromyError> {
    let form = PairingForm::power_basis();
    let norm = form.pair(a.l_coords(), a.l_coords());
    if norm != rat_int(2) {
        return Err(MonodromyError::NotNormalized(norm));
    }
    // Column-action matrix in the power basis: I − a·(aᵀG).
    let a_l = a.l_coords();
    let cov = form.gram.transpose().mul_vec(a_l); // aᵀG as a vector (G symmetric)
    let mut w = Mat3::<Rat>::identity();
    for i in 0..3 {
        for j in 0..3 {
            let delta = a_l[i].mul_ref(&cov[j]);
            w.0[i][j] = w.0[i][j].sub_ref(&delta);
        }
    }
    // Transport to the E-basis: R = P⁻¹ W P; the column action on E-basis
    // coordinates is exactly the matrix multiplying the basis row from the
    // right.
    let p = basis_change();
    let p_inv = p.try_inverse().expect("basis change invertible");
    Ok(p_inv.mul(&w).mul(&p))
}

// ---------------------------------------------------------------------------
// Characters
// ---------------------------------------------------------------------------

/// Values of the order-2 and order-3 characters: χ₂ = ±1 and χ₃ = ζ^e with
/// ζ = e^{2πi/3}, e ∈ {0,1,2}.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CharacterValues {
    pub chi2: i64,
    pub chi3_exponent: u8,
}

/// Characters of PSL₂(ℤ) = ⟨A⟩₃ * ⟨B⟩₂ with A = g₁κ (order 3), B = g₁
/// (order 2), normalized by χ₂(A) = χ₃(B) = 1, χ₂(B) = −1, χ₃(A) = ζ.
///
/// Algorithm: decompose g in the standard pair S = g₁, T by the Euclidean /
/// continued-fraction method, then substitute S = B and T = BA² (valid in
/// PSL₂ since BA² = −T); the characters evaluate multiplicatively on the
/// rewritten word, so only the number of S-factors and the total T-exponent
/// matter.
pub fn characters(g: &Mat2) -> Result<CharacterValues, MonodromyError> {
    let det = g.det();
    if det != BigInt::from(1) {
        return Err(MonodromyError::NotUnimodular(det));
    }
    let s = mat_s();
    let mut m = g.clone();
    let mut s_count: i64 = 0;
    let mut t_sum = BigInt::from(0);
    // Invariant: g ≡ T^{q₁}·S⁻¹·T^{q₂}·S⁻¹·…·m in PSL₂(ℤ).
    let mut rebuilt = Mat2::identity();
    while m.c != BigInt::from(0) {
        // Pick q so that r = a − q·c lies in [0, |c|).
        let (mut q, mut r) = m.a.div_mod_floor(&m.c);
        if r.is_negative() {
            q += 1;
            r -= &m.c;
        }
        debug_assert!(!r.is_negative() && r < m.c.abs());
        rebuilt = rebuilt.mul(&mat_t_pow(&q)).mul(&s.inverse_unimodular());
        t_sum += &q;
        s_count += 1;
        // m ← S · T^{−q} · m = [[c, d], [−r, −(b − q·d)]].
        let new_b = &m.b - &q * &m.d;
        m = Mat2::new(m.c.clone(), m.d.clone(), -r, -new_b);
    }
    // Now m = ±T^k: [[1,b],[0,1]] = T^b, [[−1,b],[0,−1]] = −T^{−b}.
    let tail = if m.a == BigInt::from(1) {
        m.b.clone()
    } else {
        -&m.b
    };
    rebuilt = rebuilt.mul(&mat_t_pow(&tail));
    t_sum += &tail;
    debug_assert!(rebuilt.same_psl2(g), "decomposition reconstructs input");
    // Each S contributes one B; each T contributes one B and two A's.
    let total_b = BigInt::from(s_count) + &t_sum;
    let chi2 = if total_b.is_even() { 1 } else { -1 };
    let chi3_exponent = {
        let e = (BigInt::from(2) * &t_sum).mod_floor(&BigInt::from(3));
        u8::try_from(e).expect("residue in 0..3")
    };
    Ok(CharacterValues {
        chi2,
        chi3_exponent,
    })
}

// ---------------------------------------------------------------------------
// Monodromy homomorphism
// ---------------------------------------------------------------------------

/// Element of PSL₂(ℤ)×{±1}: a determinant-1 matrix modulo sign plus σ = ±1.
#[derive(Clone, Debug)]
pub struct GroupElement {
    pub g: Mat2,
    pub sigma: i64,
}

impl GroupElement {
    pub fn new(g: Mat2, sigma: i64) -> Result<Self, MonodromyError> {
        let det = g.det();
        if det != BigInt::from(1) {
            return Err(MonodromyError::NotUnimodular(det));
        }
        assert!(sigma == 1 || sigma == -1, "sigma must be ±1");
        Ok(GroupElement { g, sigma })
    }
}

/// Image of (g,σ) under the injective homomorphism (g,σ) ↦ σ·χ₂(g)·ρ(g).
pub fn monodromy_of(el: &GroupElement) -> Result<Mat3<Rat>, MonodromyError> {
    let chi = characters(&el.g)?;
    let r = rho(&el.g)?;
    let sign = el.sigma * chi.chi2;
    Ok(r.map(|x| x.scale_i64(sign)))
}

// ---------------------------------------------------------------------------
// Group actions on the period domains
// ---------------------------------------------------------------------------

fn qg_int(b: &BigInt) -> QGauss {
    QGauss::from_rat(Rat::from_integer(b.clone()))
}

/// Moebius numerator/denominator pair (aτ+b, cτ+d) over ℚ(i).
fn moebius_parts(g: &Mat2, tau: &QGauss) -> (QGauss, QGauss) {
    let num = qg_int(&g.a).mul_ref(tau).add_ref(&qg_int(&g.b));
    let den = qg_int(&g.c).mul_ref(tau).add_ref(&qg_int(&g.d));
    (num, den)
}

/// Left action on ℍ×ℂ*: (g,σ)·(τ,z) = ((aτ+b)/(cτ+d), σχ₂(g)(cτ+d)²z),
/// computed exactly over ℚ(i).
pub fn w_action_small(
    el: &GroupElement,
    tau: &QGauss,
    z: &QGauss,
) -> Result<(QGauss, QGauss), MonodromyError> {
    let chi = characters(&el.g)?;
    let (num, den) = moebius_parts(&el.g, tau);
    let tau_new = num.div_ref(&den);
    let z_new = den
        .mul_ref(&den)
        .mul_ref(z)
        .scale_i64(el.sigma * chi.chi2);
    Ok((tau_new, z_new))
}

/// Row vector (τ²x, −2τx, x) identifying ℍ×ℂ* with the small period domain.
pub fn phi_small(tau: &QGauss, x: &QGauss) -> Vec3<QGauss> {
    let t2x = tau.mul_ref(tau).mul_ref(x);
    let m2tx = tau.mul_ref(x).scale_i64(-2);
    [t2x, m2tx, x.clone()]
}

/// Left action on ℍ²×ℂ*:
/// (g,σ)·(τ₁,τ₂,y) = ((aτ₁+b)/(cτ₁+d), (aτ₂+b)/(cτ₂+d),
///                    σχ₂(g)(cτ₁+d)(cτ₂+d)y),
/// each half-plane coordinate paired with its own denominator.
pub fn w_action_big(
    el: &GroupElement,
    tau1: &QGauss,
    tau2: &QGauss,
    y: &QGauss,
) -> Result<(QGauss, QGauss, QGauss), MonodromyError> {
    let chi = characters(&el.g)?;
    let (num1, den1) = moebius_parts(&el.g, tau1);
    let (num2, den2) = moebius_parts(&el.g, tau2);
    let y_new = den1
        .mul_ref(&den2)
        .mul_ref(y)
        .scale_i64(el.sigma * chi.chi2);
    Ok((num1.div_ref(&den1), num2.div_ref(&den2), y_new))
}

/// Row vector (τ₁τ₂y, −(τ₁+τ₂)y, y): the quadratic form
/// y(v−uτ₁)(v−uτ₂) in coordinates, extending the small-domain chart.
pub fn phi_big(tau1: &QGauss, tau2: &QGauss, y: &QGauss) -> Vec3<QGauss> {
    let z1 = tau1.mul_ref(tau2).mul_ref(y);
    let z2 = tau1.add_ref(tau2).mul_ref(y).neg_ref();
    [z1, z2, y.clone()]
}

/// Row-vector times matrix: (v·M)_j = Σ_i v_i M_{ij}.
pub fn row_times<R: Ring>(v: &Vec3<R>, m: &Mat3<R>) -> Vec3<R> {
    m.transpose().mul_vec(v)
}

/// Exact equivariance of the small-domain chart:
/// Φ(τ,x)·w = Φ((sg⁻¹s⁻¹, σ)·(τ,x)) with w the monodromy image of (g,σ) and
/// s = [[0,1],[1,0]].
pub fn equivariance_small(
    el: &GroupElement,
    tau: &QGauss,
    x: &QGauss,
) -> Result<bool, MonodromyError> {
    let w = monodromy_of(el)?.map(|r| QGauss::from_rat(r.clone()));
    let lhs = row_times(&phi_small(tau, x), &w);
    let conj = GroupElement::new(el.g.conj_s_inverse(), el.sigma)?;
    let (tau_new, x_new) = w_action_small(&conj, tau, x)?;
    Ok(lhs == phi_small(&tau_new, &x_new))
}

/// Exact equivariance of the big-domain chart:
/// Φ(τ₁,τ₂,y)·w = Φ((sg⁻¹s⁻¹, σ)·(τ₁,τ₂,y)).
pub fn equivariance_big(
    el: &GroupElement,
    tau1: &QGauss,
    tau2: &QGauss,
    y: &QGauss,
) -> Result<bool, MonodromyError> {
    let w = monodromy_of(el)?.map(|r| QGauss::from_rat(r.clone()));
    let lhs = row_times(&phi_big(tau1, tau2, y), &w);
    let conj = GroupElement::new(el.g.conj_s_inverse(), el.sigma)?;
    let (t1, t2, y_new) = w_action_big(&conj, tau1, tau2, y)?;
    Ok(lhs == phi_big(&t1, &t2, &y_new))
}

// ---------------------------------------------------------------------------
// Γ-class lattice vectors
// ---------------------------------------------------------------------------

/// Coefficients of (1/√(2π))·Γ(1+p)³·e^{−p·log Q}·e^{2πimp} in the basis
/// (1, p, p²) with p³ = 0, using Γ(1+p) = 1 − γp + ½(γ²+π²/6)p².
pub fn psi_gamma_class(m: i64, q_point: &Complex, ctx: &mut Ctx) -> [Complex; 3] {
    assert!(
        !(q_point.re.is_zero() && q_point.im.is_zero()),
        "Q must be nonzero"
    );
    let gamma = ctx.euler_gamma();
    let pi = ctx.pi();
    // Γ(1+p)³ = 1 − 3γ·p + ((9/2)γ² + π²/4)·p².
    let g2 = {
        let gg = ctx.mul(&gamma, &gamma);
        let nine_half = ctx.div(&ctx.int(9), &ctx.int(2));
        let pipi = ctx.mul(&pi, &pi);
        let quarter = ctx.div(&ctx.int(1), &ctx.int(4));
        ctx.add(&ctx.mul(&nine_half, &gg), &ctx.mul(&quarter, &pipi))
    };
    let gamma_cubed = [
        ctx.c_int(1, 0),
        ctx.c_from_real(ctx.mul(&ctx.int(-3), &gamma)),
        ctx.c_from_real(g2),
    ];
    // e^{−p log Q} = 1 − (log Q)p + ½(log Q)²p².
    let lq = ctx.c_ln(q_point);
    let half = ctx.div(&ctx.int(1), &ctx.int(2));
    let log_factor = [
        ctx.c_int(1, 0),
        ctx.cneg(&lq),
        ctx.cscale(&ctx.cmul(&lq, &lq), &half),
    ];
    // e^{2πimp} = 1 + (2πim)p + ½(2πim)²p².
    let two_pi_m = ctx.mul(&ctx.int(2 * m), &pi);
    let w = Complex {
        re: ctx.int(0),
        im: two_pi_m,
    };
    let exp_factor = [
        ctx.c_int(1, 0),
        w.clone(),
        ctx.cscale(&ctx.cmul(&w, &w), &half),
    ];
    let prod = mul_trunc3(ctx, &gamma_cubed, &log_factor);
    let prod = mul_trunc3(ctx, &prod, &exp_factor);
    // Scale by 1/√(2π).
    let two_pi = ctx.two_pi();
    let scale = ctx.recip(&ctx.sqrt(&two_pi));
    [
        ctx.cscale(&prod[0], &scale),
        ctx.cscale(&prod[1], &scale),
        ctx.cscale(&prod[2], &scale),
    ]
}

/// Product of two quadratic truncations modulo p³.
fn mul_trunc3(ctx: &Ctx, a: &[Complex; 3], b: &[Complex; 3]) -> [Complex; 3] {
    let c0 = ctx.cmul(&a[0], &b[0]);
    let c1 = ctx.cadd(&ctx.cmul(&a[0], &b[1]), &ctx.cmul(&a[1], &b[0]));
    let c2 = ctx.cadd(
        &ctx.cadd(&ctx.cmul(&a[0], &b[2]), &ctx.cmul(&a[1], &b[1])),
        &ctx.cmul(&a[2], &b[0]),
    );
    [c0, c1, c2]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_unimodular(rng: &mut StdRng) -> Mat2 {
        let n = rng.gen_range(3..=6);
        let mut m = Mat2::identity();
        for _ in 0..n {
            if rng.gen_bool(0.5) {
                m = m.mul(&mat_s());
            } else {
                let k: i64 = rng.gen_range(-4..=4);
                m = m.mul(&mat_t_pow(&BigInt::from(k)));
            }
        }
        m
    }

    #[test]
    fn basis_and_pairing() {
        // Power-basis Gram from the closed form 2+(m−n)².
        let g = PairingForm::power_basis();
        let expect = Mat3::from_rows([
            [rat_int(2), rat_int(3), rat_int(6)],
            [rat_int(3), rat_int(2), rat_int(3)],
            [rat_int(6), rat_int(3), rat_int(2)],
        ]);
        assert_eq!(g.gram, expect);
        // Conjugating by the basis change yields the sparse E-basis form.
        let p = basis_change();
        assert_eq!(g.conjugate_by(&p), PairingForm::e_basis());
        // E-basis definitions in power coordinates.
        let e1 = LatticeVector::from_e([rat_int(1), rat_int(0), rat_int(0)]);
        assert_eq!(e1.l_coords(), &[rat_int(1), rat_int(2), rat_int(-1)]);
        let e2 = LatticeVector::from_e([rat_int(0), rat_int(1), rat_int(0)]);
        assert_eq!(e2.l_coords(), &[rat_int(-3), rat_int(4), rat_int(-1)]);
        let e3 = LatticeVector::from_e([rat_int(0), rat_int(0), rat_int(1)]);
        assert_eq!(e3.l_coords(), &[rat_int(1), rat_int(-2), rat_int(1)]);
        // Nonzero pairings.
        assert_eq!(g.pair(e1.l_coords(), e3.l_coords()), rat_int(4));
        assert_eq!(g.pair(e2.l_coords(), e2.l_coords()), rat_int(-8));
        assert_eq!(g.pair(e1.l_coords(), e2.l_coords()), rat_int(0));
        assert_eq!(g.pair(e1.l_coords(), e1.l_coords()), rat_int(0));
        // Exact round trips, including non-integral vectors.
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..20 {
            let v = [
                rat(rng.gen_range(-9..=9), rng.gen_range(1..=5)),
                rat(rng.gen_range(-9..=9), rng.gen_range(1..=5)),
                rat(rng.gen_range(-9..=9), rng.gen_range(1..=5)),
            ];
            let lv = LatticeVector::from_l(v.clone());
            let back = LatticeVector::from_e(lv.e_coords().clone());
            assert_eq!(back.l_coords(), &v);
        }
    }

    #[test]
    fn symmetric_square_representation() {
        assert_eq!(rho(&Mat2::identity()).unwrap(), Mat3::identity());
        let gens = generator_matrices();
        assert_eq!(rho(&mat_kappa()).unwrap(), gens.k);
        // R_i = −ρ(g_i) for the printed unimodular representatives.
        let g1 = mat_s();
        let g2 = Mat2::from_i64(1, -1, 2, -1);
        let g3 = Mat2::from_i64(2, -1, 5, -2);
        assert_eq!(rho(&g1).unwrap().neg(), gens.r1);
        assert_eq!(rho(&g2).unwrap().neg(), gens.r2);
        assert_eq!(rho(&g3).unwrap().neg(), gens.r3);
        // Sign-insensitivity and homomorphism property on random pairs.
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..200 {
            let a = random_unimodular(&mut rng);
            let b = random_unimodular(&mut rng);
            assert_eq!(rho(&a.neg()).unwrap(), rho(&a).unwrap());
            assert_eq!(
                rho(&a.mul(&b)).unwrap(),
                rho(&a).unwrap().mul(&rho(&b).unwrap())
            );
        }
        // Non-unimodular inputs rejected.
        assert!(matches!(
            rho(&Mat2::from_i64(1, 0, 0, 2)),
            Err(MonodromyError::NotUnimodular(_))
        ));
        assert!(matches!(
            rho(&Mat2::from_i64(0, 1, 1, 0)),
            Err(MonodromyError::NotUnimodular(_))
        ));
    }

    #[test]
    fn printed_generators() {
        let gens = generator_matrices();
        assert_eq!(
            gens.r3.row(2),
            [rat_int(-25), rat_int(20), rat_int(-4)]
        );
        assert_eq!(gens.r1.mul(&gens.r1), Mat3::identity());
        // All four preserve the sparse pairing: RᵀηR = η.
        let eta = PairingForm::e_basis().gram;
        for m in [&gens.r1, &gens.r2, &gens.r3, &gens.k] {
            assert_eq!(m.transpose().mul(&eta).mul(m), eta);
        }
    }

    #[test]
    fn reflections_match_printed_generators() {
        let gens = generator_matrices();
        let computed = [
            reflection(&LatticeVector::power_basis(0)).unwrap(),
            reflection(&LatticeVector::power_basis(1)).unwrap(),
            reflection(&LatticeVector::power_basis(2)).unwrap(),
        ];
        // Independently transcribed printed matrices vs. the Gram-matrix
        // construction w_a(x) = x − (a|x)a transported to the E-basis.
        assert_eq!(computed[0], gens.r1);
        assert_eq!(computed[1], gens.r2);
        assert_eq!(computed[2], gens.r3);
        for w in &computed {
            assert_eq!(w.mul(w), Mat3::identity());
        }
        // Vectors of self-pairing ≠ 2 are rejected.
        let bad = LatticeVector::from_l([rat_int(1), rat_int(1), rat_int(0)]);
        assert!(matches!(
            reflection(&bad),
            Err(MonodromyError::NotNormalized(n)) if n == rat_int(10)
        ));
    }

    #[test]
    fn characters_defining_values() {
        let g1 = mat_s();
        let a = g1.mul(&mat_kappa()); // order 3 in PSL₂
        assert_eq!(
            characters(&g1).unwrap(),
            CharacterValues {
                chi2: -1,
                chi3_exponent: 0
            }
        );
        assert_eq!(
            characters(&a).unwrap(),
            CharacterValues {
                chi2: 1,
                chi3_exponent: 1
            }
        );
        assert_eq!(
            characters(&Mat2::identity()).unwrap(),
            CharacterValues {
                chi2: 1,
                chi3_exponent: 0
            }
        );
        // Group relations map to the trivial value.
        assert_eq!(
            characters(&g1.mul(&g1)).unwrap(),
            CharacterValues {
                chi2: 1,
                chi3_exponent: 0
            }
        );
        assert_eq!(
            characters(&a.mul(&a).mul(&a)).unwrap(),
            CharacterValues {
                chi2: 1,
                chi3_exponent: 0
            }
        );
        // κ = g₁·(g₁κ) picks up χ₂ = −1, χ₃ = ζ.
        assert_eq!(
            characters(&mat_kappa()).unwrap(),
            CharacterValues {
                chi2: -1,
                chi3_exponent: 1
            }
        );
    }

    #[test]
    fn characters_are_multiplicative() {
        // Well-definedness oracle: the value of a random word equals the
        // product of the letter values, independently of how the Euclidean
        // decomposition re-associates it.
        let mut rng = StdRng::seed_from_u64(23);
        for _ in 0..100 {
            let n = rng.gen_range(1..=7);
            let mut m = Mat2::identity();
            let mut chi2 = 1i64;
            let mut chi3: i64 = 0;
            for _ in 0..n {
                if rng.gen_bool(0.5) {
                    m = m.mul(&mat_s());
                    chi2 = -chi2;
                } else {
                    let k: i64 = rng.gen_range(-4..=4);
                    m = m.mul(&mat_t_pow(&BigInt::from(k)));
                    if k % 2 != 0 {
                        chi2 = -chi2;
                    }
                    chi3 = (chi3 + 2 * k).rem_euclid(3);
                }
            }
            let got = characters(&m).unwrap();
            assert_eq!(got.chi2, chi2);
            assert_eq!(got.chi3_exponent as i64, chi3);
            // Conjugation by the off-diagonal involution preserves χ₂.
            let conj = characters(&m.conj_s_inverse()).unwrap();
            assert_eq!(conj.chi2, chi2);
        }
    }

    #[test]
    fn monodromy_map() {
        let gens = generator_matrices();
        let g1 = GroupElement::new(mat_s(), 1).unwrap();
        assert_eq!(monodromy_of(&g1).unwrap(), gens.r1);
        let minus_id = GroupElement::new(Mat2::identity(), -1).unwrap();
        assert_eq!(monodromy_of(&minus_id).unwrap(), Mat3::identity().neg());
        // χ₂(κ) = −1, so (κ,+1) ↦ −K and (κ,−1) ↦ K: the unipotent K itself
        // lies in the image.
        let kp = GroupElement::new(mat_kappa(), 1).unwrap();
        assert_eq!(monodromy_of(&kp).unwrap(), gens.k.neg());
        let km = GroupElement::new(mat_kappa(), -1).unwrap();
        assert_eq!(monodromy_of(&km).unwrap(), gens.k);
        // Homomorphism spot-check.
        let mut rng = StdRng::seed_from_u64(31);
        for _ in 0..50 {
            let a = random_unimodular(&mut rng);
            let b = random_unimodular(&mut rng);
            let (sa, sb) = (
                if rng.gen_bool(0.5) { 1 } else { -1 },
                if rng.gen_bool(0.5) { 1 } else { -1 },
            );
            let lhs = monodromy_of(
                &GroupElement::new(a.mul(&b), sa * sb).unwrap(),
            )
            .unwrap();
            let rhs = monodromy_of(&GroupElement::new(a, sa).unwrap())
                .unwrap()
                .mul(&monodromy_of(&GroupElement::new(b, sb).unwrap()).unwrap());
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn monodromy_injective_to_radius_eight() {
        // Enumerate reduced words in the free product ⟨A⟩₃ * ⟨B⟩₂ with at
        // most 8 syllables; only the empty word with σ = +1 maps to the
        // identity matrix.
        let b = mat_s();
        let a = mat_s().mul(&mat_kappa());
        let a2 = a.mul(&a);
        let mut words: Vec<(Mat2, usize)> = vec![(Mat2::identity(), 0)];
        // state encodes the last syllable type: 0 none, 1 A-type, 2 B.
        fn extend(
            acc: &mut Vec<(Mat2, usize)>,
            cur: Mat2,
            last: usize,
            depth: usize,
            a: &Mat2,
            a2: &Mat2,
            b: &Mat2,
        ) {
            if depth == 8 {
                return;
            }
            if last != 1 {
                for syl in [a, a2] {
                    let next = cur.mul(syl);
                    acc.push((next.clone(), 1));
                    extend(acc, next, 1, depth + 1, a, a2, b);
                }
            }
            if last != 2 {
                let next = cur.mul(b);
                acc.push((next.clone(), 2));
                extend(acc, next, 2, depth + 1, a, a2, b);
            }
        }
        extend(&mut words, Mat2::identity(), 0, 0, &a, &a2, &b);
        let id = Mat3::<Rat>::identity();
        let mut hits = 0usize;
        for (m, last) in &words {
            for sigma in [1i64, -1] {
                let el = GroupElement::new(m.clone(), sigma).unwrap();
                if monodromy_of(&el).unwrap() == id {
                    assert!(m.same_psl2(&Mat2::identity()) && sigma == 1);
                    assert_eq!(*last, 0, "only the empty word hits the identity");
                    hits += 1;
                }
            }
        }
        assert_eq!(hits, 1);
        // 3+4+6+8+12+16+24+32 reduced words of syllable length 1..=8, plus
        // the empty word.
        assert_eq!(words.len(), 106);
    }

    fn qg(re_n: i64, re_d: i64, im_n: i64, im_d: i64) -> QGauss {
        QGauss::new(rat(re_n, re_d), rat(im_n, im_d))
    }

    #[test]
    fn small_action_equivariance() {
        let tau_i = qg(0, 1, 1, 1);
        let one = QGauss::one();
        // Identity acts trivially.
        let id = GroupElement::new(Mat2::identity(), 1).unwrap();
        let (t, z) = w_action_small(&id, &tau_i, &one).unwrap();
        assert_eq!((t, z), (tau_i.clone(), one.clone()));
        // Defining example g = g₁, τ = i, z = 1, both signs.
        for sigma in [1, -1] {
            let el = GroupElement::new(mat_s(), sigma).unwrap();
            assert!(equivariance_small(&el, &tau_i, &one).unwrap());
        }
        // Random words, τ = (1+3i)/2, z = 2+i.
        let tau = qg(1, 2, 3, 2);
        let z = qg(2, 1, 1, 1);
        let mut rng = StdRng::seed_from_u64(41);
        for _ in 0..40 {
            let g = random_unimodular(&mut rng);
            let sigma = if rng.gen_bool(0.5) { 1 } else { -1 };
            let el = GroupElement::new(g, sigma).unwrap();
            assert!(equivariance_small(&el, &tau, &z).unwrap());
        }
    }

    #[test]
    fn big_action_equivariance() {
        let tau_i = qg(0, 1, 1, 1);
        let tau_2i = qg(0, 1, 2, 1);
        let three = QGauss::from_rat(rat_int(3));
        // Diagonal consistency with the small action.
        let mut rng = StdRng::seed_from_u64(43);
        for _ in 0..20 {
            let g = random_unimodular(&mut rng);
            let sigma = if rng.gen_bool(0.5) { 1 } else { -1 };
            let el = GroupElement::new(g, sigma).unwrap();
            let (t1, t2, y) = w_action_big(&el, &tau_i, &tau_i, &three).unwrap();
            let (ts, zs) = w_action_small(&el, &tau_i, &three).unwrap();
            assert_eq!(t1, ts);
            assert_eq!(t2, ts);
            assert_eq!(y, zs);
            assert_eq!(phi_big(&tau_i, &tau_i, &three), phi_small(&tau_i, &three));
        }
        // Swap symmetry of the chart.
        assert_eq!(
            phi_big(&tau_i, &tau_2i, &three),
            phi_big(&tau_2i, &tau_i, &three)
        );
        // Lemma identity at (i, 2i, 3) and random inputs.
        for _ in 0..40 {
            let g = random_unimodular(&mut rng);
            let sigma = if rng.gen_bool(0.5) { 1 } else { -1 };
            let el = GroupElement::new(g, sigma).unwrap();
            assert!(equivariance_big(&el, &tau_i, &tau_2i, &three).unwrap());
            let t1 = qg(rng.gen_range(-3..=3), 2, rng.gen_range(1..=4), 1);
            let t2 = qg(rng.gen_range(-3..=3), 3, rng.gen_range(1..=4), 1);
            let y = qg(rng.gen_range(1..=5), 1, rng.gen_range(-2..=2), 1);
            assert!(equivariance_big(&el, &t1, &t2, &y).unwrap());
        }
    }

    fn cdet3(ctx: &Ctx, m: &[[Complex; 3]; 3]) -> Complex {
        let mut acc = ctx.c_int(0, 0);
        for (j, sign) in [(0usize, 1i64), (1, -1), (2, 1)] {
            let (j1, j2) = match j {
                0 => (1, 2),
                1 => (0, 2),
                _ => (0, 1),
            };
            let minor = ctx.csub(
                &ctx.cmul(&m[1][j1], &m[2][j2]),
                &ctx.cmul(&m[1][j2], &m[2][j1]),
            );
            let term = ctx.cmul(&m[0][j], &minor);
            let term = ctx.cscale(&term, &ctx.int(sign));
            acc = ctx.cadd(&acc, &term);
        }
        acc
    }

    #[test]
    fn gamma_class_vectors() {
        let mut ctx = Ctx::new(192);
        // Complex log sanity on all quadrant branches: exp(log q) = q.
        for (re, im) in [(-2i64, 1i64), (-1, -1), (0, 3), (3, 4), (1, 0)] {
            let q = ctx.c_int(re, im);
            let l = ctx.c_ln(&q);
            let back = ctx.cexp(&l);
            let dr = ctx.sub(&back.re, &q.re);
            let di = ctx.sub(&back.im, &q.im);
            assert!(ctx.abs_le_pow2(&dr, -180) && ctx.abs_le_pow2(&di, -180));
        }
        let one = ctx.c_int(1, 0);
        // Constant coefficient is 1/√(2π) for every m.
        let psi0 = psi_gamma_class(0, &one, &mut ctx);
        let two_pi = ctx.two_pi();
        let inv_sqrt = ctx.recip(&ctx.sqrt(&two_pi));
        let d = ctx.sub(&psi0[0].re, &inv_sqrt);
        assert!(ctx.abs_le_pow2(&d, -180));
        assert!(ctx.abs_le_pow2(&psi0[0].im, -180));
        // Ψ(L) − Ψ(1) has p-coefficient (1/√(2π))·2πi at Q = 1: only the
        // final exponential differs between the two vectors.
        let psi1 = psi_gamma_class(1, &one, &mut ctx);
        let diff_re = ctx.sub(&psi1[1].re, &psi0[1].re);
        let diff_im = ctx.sub(&psi1[1].im, &psi0[1].im);
        let expect_im = ctx.mul(&inv_sqrt, &two_pi);
        let d_im = ctx.sub(&diff_im, &expect_im);
        assert!(ctx.abs_le_pow2(&diff_re, -170));
        assert!(ctx.abs_le_pow2(&d_im, -170));
        // Lattice integrality: Ψ(L³) = 3Ψ(L²) − 3Ψ(L) + Ψ(1), the image of
        // the rank-3 relation (L−1)³ = 0. Checked at Q = 1 and at a complex
        // Q to exercise the log branch.
        for q in [ctx.c_int(1, 0), ctx.c_int(3, 4)] {
            let cols = [
                psi_gamma_class(0, &q, &mut ctx),
                psi_gamma_class(1, &q, &mut ctx),
                psi_gamma_class(2, &q, &mut ctx),
            ];
            let rhs = psi_gamma_class(3, &q, &mut ctx);
            let m = [
                [cols[0][0].clone(), cols[1][0].clone(), cols[2][0].clone()],
                [cols[0][1].clone(), cols[1][1].clone(), cols[2][1].clone()],
                [cols[0][2].clone(), cols[1][2].clone(), cols[2][2].clone()],
            ];
            let det = cdet3(&ctx, &m);
            // Cramer's rule column replacements.
            let expected = [1i64, -3, 3];
            for k in 0..3 {
                let mut mk = m.clone();
                for row in 0..3 {
                    mk[row][k] = rhs[row].clone();
                }
                let num = cdet3(&ctx, &mk);
                let coord = ctx.cdiv(&num, &det);
                let dr = ctx.sub(&coord.re, &ctx.int(expected[k]));
                assert!(ctx.abs_le_pow2(&dr, -140));
                assert!(ctx.abs_le_pow2(&coord.im, -140));
            }
        }
    }
}
