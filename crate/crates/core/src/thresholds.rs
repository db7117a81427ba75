//! Threshold location by bisection and one-dimensional parameter sweeps.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{gaussian_steering_gap, tmst_covariance, TmstParams};
use crate::pseudospin::{type_i_correlators, type_ii_tmst};
use crate::werner::{p_steer_gaussian, p_steer_type_i, p_steer_type_ii, WernerThreshold};

pub const DEFAULT_BISECTION_TOL: f64 = 1e-6;
/// Inner series tolerance relative to the bisection tolerance.
pub const INNER_TOL_RATIO: f64 = 1e-2;
/// Samples used to probe monotonicity in `η` before bisecting.
pub const MONOTONICITY_PROBES: usize = 5;
/// Grid used when the probe finds non-monotone behaviour.
pub const FALLBACK_GRID: usize = 2001;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Criterion {
    Gaussian,
    TypeI,
    TypeIi,
}

impl Criterion {
    pub fn name(&self) -> &'static str {
        match self {
            Criterion::Gaussian => "gaussian",
            Criterion::TypeI => "type-i",
            Criterion::TypeIi => "type-ii",
        }
    }
}

impl std::str::FromStr for Criterion {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "gaussian" => Ok(Criterion::Gaussian),
            "type-i" => Ok(Criterion::TypeI),
            "type-ii" => Ok(Criterion::TypeIi),
            other => Err(format!("unknown criterion `{other}`")),
        }
    }
}

/// Signed steering margin: positive exactly when the criterion certifies
/// steering. `M - 1` for the moment criteria, `det α - det V` otherwise.
pub fn steering_margin(p: &TmstParams, criterion: Criterion, inner_tol: f64) -> Result<f64> {
    Ok(match criterion {
        Criterion::Gaussian => gaussian_steering_gap(&tmst_covariance(p)),
        Criterion::TypeI => type_i_correlators(p, inner_tol)?.correlators.moment().value - 1.0,
        Criterion::TypeIi => type_ii_tmst(p).moment().value - 1.0,
    })
}

/// Result of a threshold search on `η ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EtaThreshold {
    /// `None` when the criterion fails on all of `(0, 1]`.
    pub value: Option<f64>,
    /// Last bracket `[not steerable, steerable]`.
    pub bracket: (f64, f64),
    pub converged: bool,
    /// `false` when the probe saw the margin decrease and the grid fallback ran.
    pub monotone: bool,
    pub error_bound: f64,
}

/// Bisect a margin that is `≤ 0` at `lo` and `> 0` at `hi`.
fn bisect(
    mut lo: f64,
    mut hi: f64,
    tol: f64,
    mut margin: impl FnMut(f64) -> Result<f64>,
) -> Result<(f64, f64)> {
    while hi - lo >= tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if margin(mid)? > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((lo, hi))
}

/// Smallest transmissivity above which the criterion holds, for fixed `s, r`.
///
/// The reported value `η*` satisfies `margin(η* + tol) > 0 ≥ margin(η* - tol)`
/// whenever the margin is monotone.
pub fn eta_threshold(s: f64, r: f64, criterion: Criterion, tol: f64) -> Result<EtaThreshold> {
    if !(tol > 0.0) {
        return Err(Error::Domain {
            name: "tol",
            value: tol,
            domain: "(0, ∞)",
        });
    }
    let base = TmstParams::new(s, 1.0, r)?;
    let inner = tol * INNER_TOL_RATIO;
    let margin = |eta: f64| steering_margin(&base.with_eta(eta)?, criterion, inner);

    if margin(1.0)? <= 0.0 {
        return Ok(EtaThreshold {
            value: None,
            bracket: (1.0, 1.0),
            converged: true,
            monotone: true,
            error_bound: 0.0,
        });
    }
    if margin(0.0)? > 0.0 {
        return Ok(EtaThreshold {
            value: Some(0.0),
            bracket: (0.0, 0.0),
            converged: true,
            monotone: true,
            error_bound: 0.0,
        });
    }

    let probes: Vec<f64> = (1..=MONOTONICITY_PROBES)
        .map(|i| margin(i as f64 / MONOTONICITY_PROBES as f64))
        .collect::<Result<_>>()?;
    let monotone = probes.windows(2).all(|w| w[0] <= w[1]);

    let (lo, hi) = if monotone {
        (0.0, 1.0)
    } else {
        // the last non-steerable grid point followed only by steerable ones
        let n = FALLBACK_GRID - 1;
        let mut lo_idx = 0;
        for i in 0..=n {
            if margin(i as f64 / n as f64)? <= 0.0 {
                lo_idx = i;
            }
        }
        (lo_idx as f64 / n as f64, (lo_idx + 1) as f64 / n as f64)
    };
    let (lo, hi) = bisect(lo, hi, tol, margin)?;
    Ok(EtaThreshold {
        value: Some(0.5 * (lo + hi)),
        bracket: (lo, hi),
        converged: hi - lo < tol || hi - lo <= f64::EPSILON,
        monotone,
        error_bound: 0.5 * (hi - lo),
    })
}

/// Value at `s → 0` of a function sampled at small `s`, assuming an expansion
/// in powers of `s²`: Lagrange extrapolation in `s²` to zero.
pub fn extrapolate_to_zero(samples: &[(f64, f64)]) -> f64 {
    let x: Vec<f64> = samples.iter().map(|p| p.0 * p.0).collect();
    samples
        .iter()
        .enumerate()
        .map(|(i, &(_, y))| {
            let w: f64 = (0..x.len())
                .filter(|&j| j != i)
                .map(|j| x[j] / (x[j] - x[i]))
                .product();
            y * w
        })
        .sum()
}

/// Extrapolated `η*(s → 0)` for a criterion at fixed `r`.
pub fn small_squeezing_limit(
    r: f64,
    criterion: Criterion,
    s_samples: &[f64],
    tol: f64,
) -> Result<f64> {
    let mut pts = Vec::with_capacity(s_samples.len());
    for &s in s_samples {
        let t = eta_threshold(s, r, criterion, tol)?;
        let v = t.value.ok_or_else(|| {
            Error::Degenerate(format!("no threshold at s = {s}, r = {r}"))
        })?;
        pts.push((s, v));
    }
    Ok(extrapolate_to_zero(&pts))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Crossover {
    /// `None` when the two curves do not cross inside the bracket.
    pub s: Option<f64>,
    pub bracket: (f64, f64),
    /// `(s, η*_i - η*_G)` at the coarse scan points.
    pub scan: Vec<(f64, f64)>,
}

/// Squeezing at which the type-i and Gaussian `η` thresholds meet for fixed
/// `r`, searched in `[s_lo, s_hi]` by a coarse scan and bisection.
pub fn crossover_s(r: f64, s_lo: f64, s_hi: f64, scan_points: usize, tol: f64) -> Result<Crossover> {
    if !(s_lo > 0.0 && s_hi > s_lo) || scan_points < 2 || !(tol > 0.0) {
        return Err(Error::InvalidSweep(format!(
            "crossover bracket [{s_lo}, {s_hi}] with {scan_points} points and tol {tol}"
        )));
    }
    let eta_tol = tol * INNER_TOL_RATIO;
    let diff = |s: f64| -> Result<f64> {
        let ti = eta_threshold(s, r, Criterion::TypeI, eta_tol)?.value.unwrap_or(1.0);
        let tg = eta_threshold(s, r, Criterion::Gaussian, eta_tol)?.value.unwrap_or(1.0);
        Ok(ti - tg)
    };
    let grid: Vec<f64> = (0..scan_points)
        .map(|i| s_lo + (s_hi - s_lo) * i as f64 / (scan_points - 1) as f64)
        .collect();
    let scan: Vec<(f64, f64)> = grid
        .par_iter()
        .map(|&s| diff(s).map(|d| (s, d)))
        .collect::<Result<_>>()?;
    let Some(cell) = scan.windows(2).find(|w| (w[0].1 <= 0.0) != (w[1].1 <= 0.0)) else {
        return Ok(Crossover {
            s: None,
            bracket: (s_lo, s_hi),
            scan,
        });
    };
    let (mut lo, mut hi) = (cell[0].0, cell[1].0);
    let lo_sign = cell[0].1 <= 0.0;
    while hi - lo >= tol {
        let mid = 0.5 * (lo + hi);
        if (diff(mid)? <= 0.0) == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Crossover {
        s: Some(0.5 * (lo + hi)),
        bracket: (lo, hi),
        scan,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// Threshold in `η` for a TMST.
    Tmst,
    /// Threshold in `p` for a Werner state.
    Werner,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variable {
    S,
    R,
    U,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub variable: Variable,
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        let n = self.points - 1;
        (0..self.points)
            .map(|i| {
                if i == n {
                    self.max
                } else {
                    self.min + (self.max - self.min) * i as f64 / n as f64
                }
            })
            .collect()
    }
}

/// A one-dimensional sweep. Fixed values are read for every variable that is
/// not on the axis; `u = None` ties the Werner thermal parameter to `s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub family: Family,
    pub criterion: Criterion,
    pub axis: Axis,
    pub s: f64,
    pub r: f64,
    pub u: Option<f64>,
    pub bisection_tol: f64,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        let a = &self.axis;
        let bad = |msg: String| Err(Error::InvalidSweep(msg));
        if !(a.min < a.max) {
            return bad(format!("axis min {} must be below max {}", a.min, a.max));
        }
        if a.points < 2 {
            return bad(format!("axis needs at least 2 points, got {}", a.points));
        }
        if !(a.min >= 0.0) || !a.max.is_finite() {
            return bad(format!("axis range [{}, {}] must lie in [0, ∞)", a.min, a.max));
        }
        if !(self.bisection_tol > 0.0) {
            return bad(format!("bisection tolerance {} must be positive", self.bisection_tol));
        }
        match (self.family, a.variable) {
            (Family::Tmst, Variable::U) => bad("TMST sweeps run over s or r".into()),
            (Family::Werner, Variable::R) => bad("Werner sweeps run over s or u".into()),
            _ => Ok(()),
        }
    }
}

/// One row of a threshold curve. `threshold = None` means no steering is
/// detected anywhere in the searched interval.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdRow {
    pub abscissa: f64,
    pub threshold: Option<f64>,
    pub converged: bool,
    pub error_bound: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdCurve {
    pub spec: SweepSpec,
    pub rows: Vec<ThresholdRow>,
}

pub const CSV_HEADER: &str = "abscissa,threshold,converged,error_bound";

impl ThresholdCurve {
    /// CSV with shortest round-trip floats; a missing threshold is written as
    /// `NaN`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            let _ = writeln!(
                out,
                "{:?},{:?},{},{:?}",
                row.abscissa,
                row.threshold.unwrap_or(f64::NAN),
                row.converged,
                row.error_bound
            );
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("threshold curves serialize")
    }
}

fn werner_row(x: f64, t: Result<WernerThreshold>) -> ThresholdRow {
    match t {
        Ok(t) => ThresholdRow {
            abscissa: x,
            threshold: (!t.never_steerable).then_some(t.value),
            converged: true,
            error_bound: 0.0,
            note: None,
        },
        Err(e) => failed_row(x, e),
    }
}

fn failed_row(x: f64, e: Error) -> ThresholdRow {
    ThresholdRow {
        abscissa: x,
        threshold: None,
        converged: false,
        error_bound: f64::NAN,
        note: Some(e.to_string()),
    }
}

fn sweep_point(spec: &SweepSpec, x: f64) -> ThresholdRow {
    let (s, r, u) = match spec.axis.variable {
        Variable::S => (x, spec.r, spec.u.unwrap_or(x)),
        Variable::R => (spec.s, x, spec.u.unwrap_or(spec.s)),
        Variable::U => (spec.s, spec.r, x),
    };
    match spec.family {
        Family::Tmst => match eta_threshold(s, r, spec.criterion, spec.bisection_tol) {
            Ok(t) => ThresholdRow {
                abscissa: x,
                threshold: t.value,
                converged: t.converged,
                error_bound: t.error_bound,
                note: (!t.monotone).then(|| "non-monotone margin; grid fallback".to_string()),
            },
            Err(e) => failed_row(x, e),
        },
        Family::Werner => {
            let t = match spec.criterion {
                Criterion::Gaussian => p_steer_gaussian(s, u),
                Criterion::TypeI => p_steer_type_i(s, u),
                Criterion::TypeIi => p_steer_type_ii(s, u),
            };
            werner_row(x, t)
        }
    }
}

/// Evaluate every axis point, in parallel, keeping the axis order. Failures
/// at single points are recorded in their row.
pub fn run_sweep(spec: &SweepSpec) -> Result<ThresholdCurve> {
    spec.validate()?;
    let rows = spec
        .axis
        .values()
        .par_iter()
        .map(|&x| sweep_point(spec, x))
        .collect();
    Ok(ThresholdCurve { spec: *spec, rows })
}
