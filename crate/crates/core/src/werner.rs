//! Continuous-variable Werner states: a mixture of a two-mode squeezed vacuum
//! with a product of thermal states, and their steering thresholds in `p`.

use std::f64::consts::{FRAC_2_PI, PI};

use serde::Serialize;

use crate::error::{check_nonnegative, check_range, Result};
use crate::gaussian::StandardForm;
use crate::pseudospin::CorrelatorTriple;
use crate::special::gudermannian;

/// Raw thresholds at or above `1 - NEVER_MARGIN` mean no `p ≤ 1` steers.
pub const NEVER_MARGIN: f64 = 1e-12;

/// `ρ = p ρ_EPR(s) + (1-p) ρ_th(u) ⊗ ρ_th(u)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WernerParams {
    p: f64,
    s: f64,
    u: f64,
}

impl WernerParams {
    pub fn new(p: f64, s: f64, u: f64) -> Result<Self> {
        check_range("p", p, 0.0, 1.0, "[0, 1]")?;
        check_nonnegative("s", s)?;
        check_nonnegative("u", u)?;
        Ok(Self { p, s, u })
    }

    /// Thermal noise matched to the squeezing, `u = s`.
    pub fn diagonal(p: f64, s: f64) -> Result<Self> {
        Self::new(p, s, s)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn with_p(&self, p: f64) -> Result<Self> {
        Self::new(p, self.s, self.u)
    }
}

/// A threshold probability. `value` is clamped to `[0, 1]`; `raw` is the
/// unclamped closed form, absent when the family is separable for every `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WernerThreshold {
    pub value: f64,
    pub raw: Option<f64>,
    pub never_steerable: bool,
}

impl WernerThreshold {
    fn from_raw(raw: f64) -> Self {
        Self {
            value: raw.clamp(0.0, 1.0),
            raw: Some(raw),
            never_steerable: raw >= 1.0 - NEVER_MARGIN,
        }
    }

    fn never() -> Self {
        Self {
            value: 1.0,
            raw: None,
            never_steerable: true,
        }
    }

    /// Strict test `p > threshold`.
    pub fn is_exceeded_by(&self, p: f64) -> bool {
        !self.never_steerable && p > self.value
    }
}

fn v_of(s: f64) -> f64 {
    (2.0 * s).tanh()
}

fn w_of(u: f64) -> f64 {
    (2.0 * u).tanh().powi(2)
}

pub fn werner_type_i_correlators(wp: &WernerParams) -> CorrelatorTriple {
    let (v, w) = (v_of(wp.s), w_of(wp.u));
    let p = wp.p;
    CorrelatorTriple::from_parts(p * v, -p * v, p * w + 1.0 - w)
}

pub fn werner_type_ii_correlators(wp: &WernerParams) -> CorrelatorTriple {
    let p = wp.p;
    let xy = p * FRAC_2_PI * gudermannian(2.0 * wp.s);
    let sech2 = 1.0 / (2.0 * wp.u).cosh().powi(2);
    CorrelatorTriple::from_parts(xy, xy, p + (1.0 - p) * sech2)
}

/// Positive root of `q p² + (p w + 1 - w)² = 1`, where `q` collects the squared
/// transverse correlators at `p = 1`. Written without the subtraction in the
/// numerator so small `w` keeps full precision.
fn moment_root(q: f64, w: f64) -> Option<f64> {
    if q == 0.0 && w == 0.0 {
        return None;
    }
    let b = w * (1.0 - w);
    let lin = w * (2.0 - w);
    let disc = b * b + (q + w * w) * lin;
    let denom = b + disc.sqrt();
    if denom == 0.0 {
        // w = 0: the thermal part is vacuum and any p > 0 steers
        return Some(0.0);
    }
    Some(lin / denom)
}

/// Smallest `p` above which the type-i moment exceeds 1:
/// `[√(w(w - 2v²w + 4v²)) - w(1-w)] / (2v² + w²)`.
pub fn p_steer_type_i(s: f64, u: f64) -> Result<WernerThreshold> {
    check_nonnegative("s", s)?;
    check_nonnegative("u", u)?;
    let v = v_of(s);
    Ok(moment_root(2.0 * v * v, w_of(u)).map_or_else(WernerThreshold::never, WernerThreshold::from_raw))
}

/// Type-ii analogue, with `gd(2s)` replacing `tanh 2s`.
pub fn p_steer_type_ii(s: f64, u: f64) -> Result<WernerThreshold> {
    check_nonnegative("s", s)?;
    check_nonnegative("u", u)?;
    let g = gudermannian(2.0 * s);
    let q = 8.0 * g * g / (PI * PI);
    Ok(moment_root(q, w_of(u)).map_or_else(WernerThreshold::never, WernerThreshold::from_raw))
}

/// Standard form `a = b = p cosh 2s + (1-p) cosh 2u`, `c = -d = p sinh 2s`.
pub fn werner_covariance(wp: &WernerParams) -> StandardForm {
    let a = wp.p * (2.0 * wp.s).cosh() + (1.0 - wp.p) * (2.0 * wp.u).cosh();
    let c = wp.p * (2.0 * wp.s).sinh();
    StandardForm::from_parts(a, a, c, -c)
}

/// Smallest `p` above which the Gaussian criterion holds for the covariance
/// matrix of the mixture. It is the root of
/// `(c_u² - 2c_s c_u + 1) p² + (c_s - c_u)(2c_u - 1) p + c_u(c_u - 1) = 0`
/// lying in `[0, 1]`.
pub fn p_steer_gaussian(s: f64, u: f64) -> Result<WernerThreshold> {
    check_nonnegative("s", s)?;
    check_nonnegative("u", u)?;
    if s == 0.0 && u == 0.0 {
        return Ok(WernerThreshold::never());
    }
    let (cs, cu) = ((2.0 * s).cosh(), (2.0 * u).cosh());
    let qa = cu * cu - 2.0 * cs * cu + 1.0;
    let qb = (cs - cu) * (2.0 * cu - 1.0);
    let qc = cu * (cu - 1.0);
    let sqrt_d = (qb * qb - 4.0 * qa * qc).max(0.0).sqrt();
    let raw = if qb < 0.0 {
        2.0 * qc / (-qb + sqrt_d)
    } else {
        (-qb - sqrt_d) / (2.0 * qa)
    };
    Ok(WernerThreshold::from_raw(raw))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn printed_type_i(s: f64, u: f64) -> f64 {
        let (v, w) = (v_of(s), w_of(u));
        ((w * (w - 2.0 * v * v * w + 4.0 * v * v)).sqrt() - w * (1.0 - w)) / (2.0 * v * v + w * w)
    }

    fn printed_type_ii(s: f64, u: f64) -> f64 {
        let w = w_of(u);
        let g2 = gudermannian(2.0 * s).powi(2);
        ((w * (PI * PI * w + 8.0 * (2.0 - w) * g2)).sqrt() - PI * w * (1.0 - w))
            / (8.0 / PI * g2 + PI * w * w)
    }

    fn printed_gaussian(s: f64, u: f64) -> f64 {
        let (cs, cu) = ((2.0 * s).cosh(), (2.0 * u).cosh());
        ((cs * cs * (1.0 - 2.0 * cu).powi(2) - 2.0 * cs * cu + cu * (4.0 - 3.0 * cu)).sqrt()
            + cs * (2.0 * cu - 1.0)
            - 2.0 * cu * cu
            + cu)
            / (4.0 * cs * cu - 2.0 * (cu * cu + 1.0))
    }

    #[test]
    fn correlator_examples() {
        let epr = werner_type_i_correlators(&WernerParams::new(1.0, 0.4, 0.9).unwrap());
        assert_abs_diff_eq!(epr.xx(), 0.8f64.tanh(), epsilon = 1e-15);
        assert_abs_diff_eq!(epr.zz(), 1.0, epsilon = 1e-15);
        let vac = werner_type_i_correlators(&WernerParams::new(0.0, 0.4, 0.0).unwrap());
        assert_eq!((vac.xx(), vac.yy(), vac.zz()), (0.0, 0.0, 1.0));
        let half = werner_type_i_correlators(&WernerParams::new(0.5, 0.5, 0.5).unwrap());
        let t = 1f64.tanh();
        assert_abs_diff_eq!(half.xx(), 0.5 * t, epsilon = 1e-15);
        assert_abs_diff_eq!(half.zz(), 0.5 * t * t + 1.0 - t * t, epsilon = 1e-15);

        let th = werner_type_ii_correlators(&WernerParams::new(0.0, 0.4, 0.3).unwrap());
        assert_eq!(th.xx(), 0.0);
        assert_abs_diff_eq!(th.zz(), 1.0 / 0.6f64.cosh().powi(2), epsilon = 1e-15);
    }

    #[test]
    fn type_i_threshold_matches_printed_form() {
        for &(s, u) in &[(0.1, 0.1), (0.8, 0.8), (0.3, 1.5), (2.0, 0.4), (0.05, 3.0)] {
            let t = p_steer_type_i(s, u).unwrap();
            assert_abs_diff_eq!(t.raw.unwrap(), printed_type_i(s, u), epsilon = 1e-12);
        }
        assert_eq!(p_steer_type_i(0.0, 0.7).unwrap().raw, Some(1.0));
        assert!(p_steer_type_i(0.0, 0.7).unwrap().never_steerable);
        assert_eq!(p_steer_type_i(0.5, 0.0).unwrap().value, 0.0);
        let sep = p_steer_type_i(0.0, 0.0).unwrap();
        assert!(sep.never_steerable && sep.raw.is_none());
    }

    #[test]
    fn type_ii_threshold_matches_printed_form() {
        for &(s, u) in &[(0.1, 0.1), (1.0, 1.0), (0.3, 1.5), (2.0, 0.4)] {
            let t = p_steer_type_ii(s, u).unwrap();
            assert_abs_diff_eq!(t.raw.unwrap(), printed_type_ii(s, u), epsilon = 1e-12);
        }
        assert_abs_diff_eq!(p_steer_type_ii(0.0, 1.0).unwrap().value, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn gaussian_threshold_matches_printed_form() {
        for &(s, u) in &[(0.7, 0.7), (0.3, 1.5), (2.0, 0.4), (1.0, 0.2)] {
            let t = p_steer_gaussian(s, u).unwrap();
            assert_abs_diff_eq!(t.raw.unwrap(), printed_gaussian(s, u), epsilon = 1e-10);
        }
        assert_abs_diff_eq!(p_steer_gaussian(0.0, 0.8).unwrap().value, 1.0, epsilon = 1e-12);
        // vacuum noise: below p = 1/2 the mixture's variances still hide the correlations
        assert_abs_diff_eq!(p_steer_gaussian(0.8, 0.0).unwrap().value, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn diagonal_limits() {
        let inv_sqrt3 = 1.0 / 3f64.sqrt();
        assert_abs_diff_eq!(p_steer_type_i(12.0, 12.0).unwrap().value, inv_sqrt3, epsilon = 1e-9);
        assert_abs_diff_eq!(p_steer_type_ii(12.0, 12.0).unwrap().value, inv_sqrt3, epsilon = 1e-9);
        assert_abs_diff_eq!(p_steer_gaussian(12.0, 12.0).unwrap().value, 1.0, epsilon = 1e-9);
        for s in [0.1f64, 0.5, 2.0] {
            let want = 1.0 / (1.0 + 1.0 / (2.0 * s).cosh()).sqrt();
            assert_abs_diff_eq!(p_steer_gaussian(s, s).unwrap().value, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn thresholds_reject_negative_inputs() {
        assert!(p_steer_type_i(-0.1, 0.2).is_err());
        assert!(p_steer_gaussian(0.1, -0.2).is_err());
        assert!(WernerParams::new(1.2, 0.1, 0.1).is_err());
    }

    #[test]
    fn covariance_examples() {
        let epr = werner_covariance(&WernerParams::new(1.0, 0.5, 0.9).unwrap());
        assert_abs_diff_eq!(epr.a(), 1f64.cosh(), epsilon = 1e-15);
        assert_abs_diff_eq!(epr.c(), 1f64.sinh(), epsilon = 1e-15);
        let th = werner_covariance(&WernerParams::new(0.0, 0.5, 0.9).unwrap());
        assert_eq!(th.c(), 0.0);
        let mix = werner_covariance(&WernerParams::new(0.5, 0.5, 0.5).unwrap());
        assert!(mix.is_physical(1e-9));
    }

    #[test]
    fn threshold_exceeded_is_strict() {
        let t = p_steer_type_i(1.0, 1.0).unwrap();
        assert!(!t.is_exceeded_by(t.value));
        assert!(t.is_exceeded_by(t.value + 1e-9));
    }
}
