//! Four-dimensional Hermite polynomials at the origin for the matrix
//!
//! ```text
//! Θ = -[[0, e, f, 0], [e, 0, 0, g], [f, 0, 0, e], [0, g, e, 0]]
//! ```
//!
//! and their relation to Fock elements of two-mode squeezed thermal states.

use nalgebra::Matrix4;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::FockIndex;
use crate::gaussian::{tmst_covariance, StandardForm, TmstParams, DEFAULT_PHYSICALITY_TOL};
use crate::special::{ln_binomial, ln_factorial};

/// Largest total degree accepted by [`hermite_taylor_oracle`].
pub const MAX_ORACLE_DEGREE: usize = 12;
/// Relative tolerance on `d = -c` for the Hermite correspondence.
const TMST_SHAPE_TOL: f64 = 1e-12;
/// Slack on the feasibility of the TMST preimage.
const PREIMAGE_TOL: f64 = 1e-10;

pub type HermiteIndex = FockIndex;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThetaParams {
    pub e: f64,
    pub f: f64,
    pub g: f64,
}

impl ThetaParams {
    pub fn matrix(&self) -> Matrix4<f64> {
        let (e, f, g) = (self.e, self.f, self.g);
        -Matrix4::new(
            0.0, e, f, 0.0, //
            e, 0.0, 0.0, g, //
            f, 0.0, 0.0, e, //
            0.0, g, e, 0.0,
        )
    }
}

/// `e = 2c/D`, `f = ((a-1)(b+1) - c²)/D`, `g = ((a+1)(b-1) - c²)/D` with
/// `D = (a+1)(b+1) - c²`.
pub fn theta_from_standard_form(a: f64, b: f64, c: f64) -> Result<ThetaParams> {
    let den = (a + 1.0) * (b + 1.0) - c * c;
    if !den.is_finite() || den.abs() < f64::MIN_POSITIVE {
        return Err(Error::Degenerate(format!(
            "(a+1)(b+1) - c² = {den:e} for a = {a}, b = {b}, c = {c}"
        )));
    }
    Ok(ThetaParams {
        e: 2.0 * c / den,
        f: ((a - 1.0) * (b + 1.0) - c * c) / den,
        g: ((a + 1.0) * (b - 1.0) - c * c) / den,
    })
}

/// Signed `ln|x|`.
fn signed_ln(x: f64) -> (f64, f64) {
    (x.abs().ln(), if x < 0.0 { -1.0 } else { 1.0 })
}

/// `Σ_k √(C(m2,k) C(n2,k) C(m1,m2-k) C(n1,n2-k)) e^{m2+n2-2k} f^{m1-m2+k} g^k`,
/// i.e. the Hermite value without the `√(m1! m2! n1! n2!)` factor.
fn reduced_sum(idx: FockIndex, th: &ThetaParams) -> f64 {
    let FockIndex { m1, m2, n1, n2 } = idx;
    if !idx.conserves_difference() {
        return 0.0;
    }
    let k_lo = m2.saturating_sub(m1);
    let k_hi = m2.min(n2);
    if k_lo > k_hi {
        return 0.0;
    }
    let (le, se) = signed_ln(th.e);
    let (lf, sf) = signed_ln(th.f);
    let (lg, sg) = signed_ln(th.g);
    let pow = |l: f64, s: f64, n: usize| -> (f64, f64) {
        if n == 0 {
            (0.0, 1.0)
        } else {
            (n as f64 * l, if n % 2 == 1 { s } else { 1.0 })
        }
    };
    let terms: Vec<(f64, f64)> = (k_lo..=k_hi)
        .map(|k| {
            let (pe, s1) = pow(le, se, m2 + n2 - 2 * k);
            let (pf, s2) = pow(lf, sf, m1 + k - m2);
            let (pg, s3) = pow(lg, sg, k);
            let binom = 0.5
                * (ln_binomial(m2, k)
                    + ln_binomial(n2, k)
                    + ln_binomial(m1, m2 - k)
                    + ln_binomial(n1, n2 - k));
            (binom + pe + pf + pg, s1 * s2 * s3)
        })
        .collect();
    let max = terms
        .iter()
        .map(|t| t.0)
        .fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return 0.0;
    }
    let scaled: f64 = terms.iter().map(|&(l, s)| s * (l - max).exp()).sum();
    scaled * max.exp()
}

fn ln_sqrt_factorials(idx: FockIndex) -> f64 {
    0.5 * (ln_factorial(idx.m1)
        + ln_factorial(idx.m2)
        + ln_factorial(idx.n1)
        + ln_factorial(idx.n2))
}

/// `H_{m1,m2,n1,n2}(0)` as a single finite sum. Powers are grouped as
/// `e^{m2+n2-2k} f^{m1-m2+k} g^k`, all with nonnegative exponents, so zero
/// entries of `Θ` need no special handling.
pub fn hermite_at_origin(idx: HermiteIndex, th: &ThetaParams) -> f64 {
    let sum = reduced_sum(idx, th);
    if sum == 0.0 {
        return 0.0;
    }
    sum.signum() * (sum.abs().ln() + ln_sqrt_factorials(idx)).exp()
}

/// Dense polynomial in four variables, degree at most `MAX_ORACLE_DEGREE` per
/// variable.
struct Poly4 {
    side: usize,
    coef: Vec<f64>,
}

impl Poly4 {
    fn one(side: usize) -> Self {
        let mut coef = vec![0.0; side.pow(4)];
        coef[0] = 1.0;
        Self { side, coef }
    }

    fn at(&self, e: [usize; 4]) -> usize {
        ((e[0] * self.side + e[1]) * self.side + e[2]) * self.side + e[3]
    }

    fn exps(&self, i: usize) -> [usize; 4] {
        let s = self.side;
        [i / (s * s * s), (i / (s * s)) % s, (i / s) % s, i % s]
    }

    /// Multiply by a sum of `coef · x_i x_j` terms, dropping overflowing exponents.
    fn mul_quadratic(&self, terms: &[(usize, usize, f64)]) -> Self {
        let mut out = Self {
            side: self.side,
            coef: vec![0.0; self.coef.len()],
        };
        for (i, &c) in self.coef.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let e = self.exps(i);
            for &(a, b, q) in terms {
                let mut e2 = e;
                e2[a] += 1;
                e2[b] += 1;
                if e2.iter().all(|&x| x < self.side) {
                    let j = out.at(e2);
                    out.coef[j] += c * q;
                }
            }
        }
        out
    }
}

/// `H(0)` read off the Taylor expansion of `exp(-½ xᵀΘx)`:
/// `(-1)^{|α|} α! [x^α] exp(e x1x2 + f x1x3 + g x2x4 + e x3x4)`.
pub fn hermite_taylor_oracle(idx: HermiteIndex, th: &ThetaParams) -> Result<f64> {
    let degree = idx.total();
    if degree > MAX_ORACLE_DEGREE {
        return Err(Error::DegreeTooHigh {
            degree,
            max: MAX_ORACLE_DEGREE,
        });
    }
    if degree % 2 == 1 {
        return Ok(0.0);
    }
    let quad = [(0, 1, th.e), (0, 2, th.f), (1, 3, th.g), (2, 3, th.e)];
    let side = idx.max() + 1;
    // only Q^j / j! with 2j = degree contributes to a monomial of this degree
    let mut power = Poly4::one(side);
    for _ in 0..degree / 2 {
        power = power.mul_quadratic(&quad);
    }
    let j_fact: f64 = (1..=degree / 2).map(|x| x as f64).product();
    let alpha = [idx.m1, idx.m2, idx.n1, idx.n2];
    let alpha_fact: f64 = alpha
        .iter()
        .map(|&n| (1..=n).map(|x| x as f64).product::<f64>())
        .product();
    Ok(power.coef[power.at(alpha)] / j_fact * alpha_fact)
}

/// Recover `(s, η, r)` from a standard form with `d = -c`, `c ≥ 0`.
///
/// `b = cosh 2s` fixes `s`; with `κ = c / sinh 2s = √η cosh r` the remaining
/// relation becomes `cosh 2r = a - κ²(b - 1)` and `η = κ² / cosh² r`. When
/// `b = 1` the attenuator is unobservable and `η = 1` is returned.
pub fn tmst_params_from_standard_form(sf: &StandardForm) -> Result<TmstParams> {
    let (a, b, c) = (sf.a(), sf.b(), sf.c());
    let fail = |reason: &'static str| Error::NoTmstPreimage { a, b, c, reason };
    if (sf.d() + c).abs() > TMST_SHAPE_TOL * (1.0 + c.abs()) {
        return Err(fail("d differs from -c"));
    }
    if c < 0.0 {
        return Err(fail("c < 0"));
    }
    let s = 0.5 * b.acosh();
    if b == 1.0 {
        if c != 0.0 {
            return Err(fail("correlations without squeezing"));
        }
        return TmstParams::new(0.0, 1.0, 0.5 * a.acosh());
    }
    let kappa = c / (2.0 * s).sinh();
    let cosh_2r = a - kappa * kappa * (b - 1.0);
    if cosh_2r < 1.0 - PREIMAGE_TOL {
        return Err(fail("a below the reachable floor"));
    }
    let cosh_2r = cosh_2r.max(1.0);
    let eta = 2.0 * kappa * kappa / (cosh_2r + 1.0);
    if eta > 1.0 + PREIMAGE_TOL {
        return Err(fail("required transmissivity exceeds 1"));
    }
    TmstParams::new(s, eta.min(1.0), 0.5 * cosh_2r.acosh())
}

fn det_v_plus_identity(sf: &StandardForm) -> f64 {
    (sf.matrix() + Matrix4::identity()).determinant()
}

/// `4 H(0) / (√det(V + 𝟙) √(m1! m2! n1! n2!))` for a bona fide standard form
/// with `d = -c` that has a TMST preimage.
pub fn fock_from_hermite(sf: &StandardForm, idx: FockIndex) -> Result<f64> {
    sf.check_physical(DEFAULT_PHYSICALITY_TOL)?;
    tmst_params_from_standard_form(sf)?;
    let th = theta_from_standard_form(sf.a(), sf.b(), sf.c())?;
    // the factorials cancel against those inside H
    Ok(4.0 * reduced_sum(idx, &th) / det_v_plus_identity(sf).sqrt())
}

/// `|(1 - tanh² s)/cosh² r - 4/√det(V + 𝟙)|`.
pub fn det_relation_check(p: &TmstParams) -> f64 {
    let lhs = (1.0 - p.varsigma().powi(2)) / p.r().cosh().powi(2);
    let rhs = 4.0 / det_v_plus_identity(&tmst_covariance(p)).sqrt();
    (lhs - rhs).abs()
}
