//! Pseudospin correlators of two-mode states and the moment steering criterion.

use std::f64::consts::FRAC_2_PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::TruncatedDensityMatrix;
use crate::gaussian::{tmst_covariance, StandardForm, TmstParams, DEFAULT_PHYSICALITY_TOL};
use crate::special::{ln_binomial, ln_sum_exp};

/// Slack allowed on `|correlator| ≤ 1` for rounding.
const BOUND_SLACK: f64 = 1e-9;
/// Ceiling on the outer photon-pair sum of the type-i series.
pub const MAX_OUTER_TERMS: usize = 50_000;
/// Ceiling on the inner amplifier sum of the type-i series.
pub const MAX_INNER_TERMS: usize = 2_000_000;

/// Diagonal correlators `⟨s^x⊗t^x⟩, ⟨s^y⊗t^y⟩, ⟨s^z⊗t^z⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelatorTriple {
    xx: f64,
    yy: f64,
    zz: f64,
}

impl CorrelatorTriple {
    pub fn new(xx: f64, yy: f64, zz: f64) -> Result<Self> {
        for (name, v) in [("xx", xx), ("yy", yy), ("zz", zz)] {
            if !(v.abs() <= 1.0 + BOUND_SLACK) {
                return Err(Error::Domain {
                    name,
                    value: v,
                    domain: "[-1, 1]",
                });
            }
        }
        Ok(Self { xx, yy, zz })
    }

    pub(crate) const fn from_parts(xx: f64, yy: f64, zz: f64) -> Self {
        Self { xx, yy, zz }
    }

    pub fn xx(&self) -> f64 {
        self.xx
    }

    pub fn yy(&self) -> f64 {
        self.yy
    }

    pub fn zz(&self) -> f64 {
        self.zz
    }

    pub fn moment(&self) -> MomentValue {
        moment_value(self)
    }
}

/// Sum of squared correlators and the strict verdict `value > 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentValue {
    pub value: f64,
    pub steerable: bool,
}

pub fn moment_value(c: &CorrelatorTriple) -> MomentValue {
    let value = c.xx * c.xx + c.yy * c.yy + c.zz * c.zz;
    MomentValue {
        value,
        steerable: value > 1.0,
    }
}

/// Type-i correlators together with the truncation that produced them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TypeICorrelators {
    pub correlators: CorrelatorTriple,
    /// Upper bound on `|xx - xx_exact|`.
    pub tail_bound: f64,
    /// Number of photon-pair terms kept in the outer sum.
    pub outer_terms: usize,
}

/// Type-i (parity-ladder) correlators of a TMST.
///
/// `xx` is the double series over photon pairs `n` and amplifier quanta `l`;
/// `yy = -xx` and `zz = 1/√det V`. The outer sum is cut where the bound
/// `Σ_l (Γ_nl + Υ_nl) ≤ cosh r` makes the remainder smaller than `tol/2`,
/// and each inner `l` series is summed until its ratio-test tail leaves the
/// other half of the budget.
pub fn type_i_correlators(p: &TmstParams, tol: f64) -> Result<TypeICorrelators> {
    if !(tol > 0.0) {
        return Err(Error::Domain {
            name: "tol",
            value: tol,
            domain: "(0, ∞)",
        });
    }
    let sf = tmst_covariance(p);
    let zz = 1.0 / sf.det_v().sqrt();
    let (s, eta, r) = (p.s(), p.eta(), p.r());
    let vs = s.tanh();
    if vs == 0.0 || eta == 0.0 {
        return Ok(TypeICorrelators {
            correlators: CorrelatorTriple::from_parts(0.0, 0.0, zz),
            tail_bound: 0.0,
            outer_terms: 0,
        });
    }

    let ln_prefactor = std::f64::consts::LN_2 - 2.0 * s.cosh().ln();
    let vs4 = vs.powi(4);
    let outer_tail = |n_max: usize| {
        2.0 * r.cosh() / s.cosh().powi(2) * vs.powi(4 * n_max as i32 + 5) / (1.0 - vs4)
    };
    let mut n_max = 0;
    while outer_tail(n_max) >= tol / 2.0 {
        n_max += 1;
        if n_max >= MAX_OUTER_TERMS {
            return Err(Error::NotConverged {
                tolerance: tol,
                max_terms: MAX_OUTER_TERMS,
            });
        }
    }

    // Regrouped by k: xx = Σ_k W_k g_k + U_k h_k, where W_k, U_k collect the
    // n-dependent factors and g_k, h_k are the amplifier sums over l. Both
    // g_k ≤ 1 and h_k ≤ 1, so a weight below its budget can be dropped whole.
    let budget = tol / (8 * (n_max + 1)) as f64;
    let ln_vs = vs.ln();
    let (ln_eta, ln_loss) = (eta.ln(), (1.0 - eta).ln());
    let pow = |ln_x: f64, e: usize| if e == 0 { 0.0 } else { e as f64 * ln_x };
    let loss2_vs4 = (1.0 - eta).powi(2) * vs4;
    let weights: Vec<((f64, f64), (f64, f64))> = (0..=n_max)
        .into_par_iter()
        .map(|k| {
            let kf = k as f64;
            let gamma = ratio_bounded_sum(
                (k..=n_max).map(|n| {
                    ln_prefactor
                        + (4 * n + 1) as f64 * ln_vs
                        + (2.0 * kf + 0.5) * ln_eta
                        + pow(ln_loss, 2 * n - 2 * k)
                        + 0.5 * (ln_binomial(2 * n, 2 * k) + ln_binomial(2 * n + 1, 2 * k + 1))
                }),
                |i| {
                    let n = (k + i) as f64;
                    loss2_vs4
                        * ((2.0 * n + 2.0) * (2.0 * n + 1.0) * (2.0 * n + 3.0) * (2.0 * n + 2.0)
                            / ((2.0 * n + 2.0 - 2.0 * kf)
                                * (2.0 * n + 1.0 - 2.0 * kf)
                                * (2.0 * n + 2.0 - 2.0 * kf)
                                * (2.0 * n + 3.0 - 2.0 * kf)))
                            .sqrt()
                },
                budget,
            );
            let upsilon = ratio_bounded_sum(
                (k + 1..=n_max).map(|n| {
                    ln_prefactor
                        + (4 * n + 1) as f64 * ln_vs
                        + (2.0 * kf + 1.5) * ln_eta
                        + pow(ln_loss, 2 * n - 2 * k - 1)
                        + 0.5
                            * (ln_binomial(2 * n, 2 * k + 1) + ln_binomial(2 * n + 1, 2 * k + 2))
                }),
                |i| {
                    let n = (k + 1 + i) as f64;
                    loss2_vs4
                        * ((2.0 * n + 2.0) * (2.0 * n + 1.0) * (2.0 * n + 3.0) * (2.0 * n + 2.0)
                            / ((2.0 * n + 1.0 - 2.0 * kf)
                                * (2.0 * n - 2.0 * kf)
                                * (2.0 * n + 2.0 - 2.0 * kf)
                                * (2.0 * n + 1.0 - 2.0 * kf)))
                            .sqrt()
                },
                budget,
            );
            (gamma, upsilon)
        })
        .collect();

    let ln_cosh = r.cosh().ln();
    let t4 = r.tanh().powi(4);
    let ln_t2 = 2.0 * r.tanh().ln();
    let parts: Result<Vec<(f64, f64)>> = weights
        .into_par_iter()
        .enumerate()
        .map(|(k, ((gw, gw_tail), (uw, uw_tail)))| {
            let kf = k as f64;
            let mut value = 0.0;
            let mut tail = gw_tail + uw_tail;
            if gw <= budget {
                tail += gw;
            } else {
                let (sum, bound) = ratio_series(
                    -(4.0 * kf + 3.0) * ln_cosh,
                    |l| {
                        let l = l as f64;
                        t4 * ((2.0 * kf + 2.0 * l + 2.0)
                            * (2.0 * kf + 2.0 * l + 1.0)
                            * (2.0 * kf + 2.0 * l + 3.0)
                            * (2.0 * kf + 2.0 * l + 2.0))
                            .sqrt()
                            / ((2.0 * l + 2.0) * (2.0 * l + 1.0))
                    },
                    budget / gw,
                    tol,
                )?;
                value += gw * sum;
                tail += gw * bound;
            }
            if t4 == 0.0 {
                // h_k vanishes without amplification
            } else if uw <= budget {
                tail += uw;
            } else {
                let ln_first = -(4.0 * kf + 5.0) * ln_cosh
                    + ln_t2
                    + 0.5 * ((2.0 * kf + 2.0) * (2.0 * kf + 3.0)).ln();
                let (sum, bound) = ratio_series(
                    ln_first,
                    |l| {
                        let l = l as f64;
                        t4 * ((2.0 * kf + 2.0 * l + 4.0)
                            * (2.0 * kf + 2.0 * l + 3.0)
                            * (2.0 * kf + 2.0 * l + 5.0)
                            * (2.0 * kf + 2.0 * l + 4.0))
                            .sqrt()
                            / ((2.0 * l + 3.0) * (2.0 * l + 2.0))
                    },
                    budget / uw,
                    tol,
                )?;
                value += uw * sum;
                tail += uw * bound;
            }
            Ok((value, tail))
        })
        .collect();
    let parts = parts?;
    // fixed summation order keeps results independent of the thread schedule
    let xx: f64 = parts.iter().map(|p| p.0).sum();
    let inner_tail: f64 = parts.iter().map(|p| p.1).sum();
    Ok(TypeICorrelators {
        correlators: CorrelatorTriple::from_parts(xx, -xx, zz),
        tail_bound: outer_tail(n_max) + inner_tail,
        outer_terms: n_max + 1,
    })
}

/// Sum a finite positive sequence given by log-terms, stopping early once the
/// ratio bound `term · ρ / (1 - ρ)` on the rest falls below `target`. `ratio(i)`
/// bounds `term(i+1) / term(i)` and must be nonincreasing. Returns the sum and
/// the bound on what was skipped.
fn ratio_bounded_sum(
    ln_terms: impl Iterator<Item = f64>,
    ratio: impl Fn(usize) -> f64,
    target: f64,
) -> (f64, f64) {
    let mut logs = Vec::new();
    let mut skipped = 0.0;
    for (i, ln_term) in ln_terms.enumerate() {
        logs.push(ln_term);
        let rho = ratio(i);
        let term = ln_term.exp();
        if rho == 0.0 || ln_term == f64::NEG_INFINITY {
            break;
        }
        if rho < 1.0 {
            let tail = term * rho / (1.0 - rho);
            if tail < target {
                skipped = tail;
                break;
            }
        }
    }
    (ln_sum_exp(&logs).exp(), skipped)
}

/// Sum a positive series from its first log-term and the ratio of consecutive
/// terms, which must be nonincreasing in `l`. Returns the partial sum and a
/// bound on the remainder.
fn ratio_series(
    ln_first: f64,
    ratio: impl Fn(usize) -> f64,
    target: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    let mut ln_term = ln_first;
    let mut sum = 0.0;
    for l in 0..MAX_INNER_TERMS {
        let term = ln_term.exp();
        sum += term;
        let rho = ratio(l);
        if rho == 0.0 || term == 0.0 {
            return Ok((sum, 0.0));
        }
        if rho < 1.0 {
            let tail = term * rho / (1.0 - rho);
            if tail < target {
                return Ok((sum, tail));
            }
        }
        ln_term += rho.ln();
    }
    Err(Error::NotConverged {
        tolerance: tol,
        max_terms: MAX_INNER_TERMS,
    })
}

/// Type-i correlators read off a truncated density matrix: `S^x`, `S^y`
/// couple the Fock pairs `{2j, 2j+1}` and `S^z` is minus the parity.
pub fn type_i_from_density(rho: &TruncatedDensityMatrix) -> CorrelatorTriple {
    let partner = |m: usize| if m % 2 == 0 { m + 1 } else { m - 1 };
    let n = rho.cutoff();
    let (mut xx, mut yy) = (0.0, 0.0);
    for m1 in 0..n {
        for m2 in 0..n {
            let (p1, p2) = (partner(m1), partner(m2));
            if let Some(v) = rho.get(crate::fock::FockIndex::new(m1, m2, p1, p2)) {
                xx += v;
                // ⟨p|S^y|m⟩ = +i when p > m, -i when p < m
                yy += if (p1 < m1) == (p2 < m2) { -v } else { v };
            }
        }
    }
    CorrelatorTriple::from_parts(xx, yy, rho.parity_sum())
}

/// Type-ii (position-sign) correlators of a standard-form Gaussian state.
///
/// For the canonical signs `c ≥ 0`, `d ≤ 0` both `xx` and `yy` are
/// nonnegative; other signs flip the corresponding correlator, leaving the
/// moment value unchanged.
pub fn type_ii_correlators(sf: &StandardForm) -> Result<CorrelatorTriple> {
    sf.check_physical(DEFAULT_PHYSICALITY_TOL)?;
    Ok(type_ii_unchecked(sf.a(), sf.b(), sf.c(), sf.d()))
}

fn type_ii_unchecked(a: f64, b: f64, c: f64, d: f64) -> CorrelatorTriple {
    let det_v = (a * b - c * c) * (a * b - d * d);
    let inv_sqrt_det = 1.0 / det_v.sqrt();
    let xx = FRAC_2_PI * (c / (a * b - c * c).sqrt()).atan();
    let yy = -FRAC_2_PI * inv_sqrt_det * (d / (a * b - d * d).sqrt()).atan();
    CorrelatorTriple::from_parts(xx, yy, inv_sqrt_det)
}

/// Grid for the search over Gaussian-unsteerable standard forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NogoGrid {
    /// Points per axis; odd counts put `c = d = 0` on the grid.
    pub points: usize,
    /// `a, b ∈ [1, a_max]`.
    pub a_max: f64,
    /// `c, d ∈ [-c_max, c_max]`; zero restricts to the uncorrelated slice.
    pub c_max: f64,
    /// Stop the local refinement once the step falls below this.
    pub refine_step: f64,
}

impl Default for NogoGrid {
    fn default() -> Self {
        Self {
            points: 15,
            a_max: 4.0,
            c_max: 3.0,
            refine_step: 1e-9,
        }
    }
}

/// Largest type-ii moment found over the admissible region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NogoResult {
    pub max_moment: f64,
    /// `(a, b, c, d)` at the maximum.
    pub argmax: [f64; 4],
    pub feasible_points: usize,
    pub grid_max_moment: f64,
}

fn nogo_admissible(x: [f64; 4]) -> bool {
    let [a, b, c, d] = x;
    if !(a >= 1.0 && b >= 1.0) {
        return false;
    }
    let sf = StandardForm::from_parts(a, b, c, d);
    sf.is_physical(DEFAULT_PHYSICALITY_TOL) && a * a <= sf.det_v()
}

fn nogo_moment(x: [f64; 4]) -> f64 {
    moment_value(&type_ii_unchecked(x[0], x[1], x[2], x[3])).value
}

/// Maximise the type-ii moment over bona fide standard forms with
/// `det α ≤ det V` by a grid scan followed by compass search.
pub fn type_ii_nogo_scan(grid: &NogoGrid) -> Result<NogoResult> {
    if grid.points < 2 || !(grid.a_max > 1.0) || !(grid.c_max >= 0.0) || !(grid.refine_step > 0.0) {
        return Err(Error::InfeasibleScan(format!(
            "need points ≥ 2, a_max > 1, c_max ≥ 0, refine_step > 0; got {grid:?}"
        )));
    }
    let n = grid.points;
    let axis = |lo: f64, hi: f64, i: usize| lo + (hi - lo) * i as f64 / (n - 1) as f64;
    let corr_axis = |i: usize| {
        if grid.c_max == 0.0 {
            0.0
        } else {
            axis(-grid.c_max, grid.c_max, i)
        }
    };
    let corr_points = if grid.c_max == 0.0 { 1 } else { n };
    let total = n * n * corr_points * corr_points;
    let best = (0..total)
        .into_par_iter()
        .filter_map(|flat| {
            let (ia, rest) = (flat % n, flat / n);
            let (ib, rest) = (rest % n, rest / n);
            let (ic, id) = (rest % corr_points, rest / corr_points);
            let x = [
                axis(1.0, grid.a_max, ia),
                axis(1.0, grid.a_max, ib),
                corr_axis(ic),
                corr_axis(id),
            ];
            nogo_admissible(x).then(|| (nogo_moment(x), flat, x, 1usize))
        })
        .reduce_with(|l, r| {
            let count = l.3 + r.3;
            // ties resolved towards the lower grid index for determinism
            let pick = if r.0 > l.0 || (r.0 == l.0 && r.1 < l.1) { r } else { l };
            (pick.0, pick.1, pick.2, count)
        });
    let Some((grid_max, _, start, feasible)) = best else {
        return Err(Error::InfeasibleScan("no admissible grid point".into()));
    };

    let (mut x, mut fx) = (start, grid_max);
    let mut step = (grid.a_max - 1.0) / (n - 1) as f64;
    while step >= grid.refine_step {
        let mut improved = false;
        for axis in 0..4 {
            if grid.c_max == 0.0 && axis >= 2 {
                continue;
            }
            for sign in [1.0, -1.0] {
                let mut y = x;
                y[axis] += sign * step;
                if nogo_admissible(y) {
                    let fy = nogo_moment(y);
                    if fy > fx {
                        x = y;
                        fx = fy;
                        improved = true;
                    }
                }
            }
        }
        if !improved {
            step /= 2.0;
        }
    }
    Ok(NogoResult {
        max_moment: fx,
        argmax: x,
        feasible_points: feasible,
        grid_max_moment: grid_max,
    })
}

/// Type-ii moment of a TMST.
pub fn type_ii_tmst(p: &TmstParams) -> CorrelatorTriple {
    let sf = tmst_covariance(p);
    type_ii_unchecked(sf.a(), sf.b(), sf.c(), sf.d())
}
