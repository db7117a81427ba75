//! Fock-basis density-matrix elements of two-mode squeezed thermal states.
//!
//! The closed form is a single finite sum per element. Two independent routes
//! reproduce it: composing the pure-loss and amplifier maps on dyads, and
//! tracing the ancillas out of the purified four-mode state vector.

use std::collections::HashMap;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_range, Error, Result};
use crate::gaussian::{tmst_covariance, TmstParams};
use crate::special::{ln_binomial, ln_pow, ln_sum_exp};

/// Default bound on the discarded probability mass when picking a cutoff.
pub const DEFAULT_TAIL_TARGET: f64 = 1e-14;
/// Largest discarded norm accepted for a purified state vector.
pub const PURIFIED_TAIL_LIMIT: f64 = 1e-12;
/// Truncation of the amplifier's `l` sum.
pub const AMPLIFIER_TAIL: f64 = 1e-14;

/// Indices of `⟨m1 m2| ρ |n1 n2⟩`, mode A first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct FockIndex {
    pub m1: usize,
    pub m2: usize,
    pub n1: usize,
    pub n2: usize,
}

impl FockIndex {
    pub const fn new(m1: usize, m2: usize, n1: usize, n2: usize) -> Self {
        Self { m1, m2, n1, n2 }
    }

    pub fn max(&self) -> usize {
        self.m1.max(self.m2).max(self.n1).max(self.n2)
    }

    pub fn total(&self) -> usize {
        self.m1 + self.m2 + self.n1 + self.n2
    }

    /// The selection rule `m1 + n2 = n1 + m2`.
    pub fn conserves_difference(&self) -> bool {
        self.m1 + self.n2 == self.n1 + self.m2
    }

    /// `(m1, m2) ↔ (n1, n2)`.
    pub fn swapped(&self) -> Self {
        Self::new(self.n1, self.n2, self.m1, self.m2)
    }
}

impl From<[usize; 4]> for FockIndex {
    fn from(v: [usize; 4]) -> Self {
        Self::new(v[0], v[1], v[2], v[3])
    }
}

/// `⟨m1 m2| ρ_TMST(s, η, r) |n1 n2⟩` in closed form.
///
/// The powers of `η` and `r` are regrouped before evaluation as
/// `η^{(m2+n2)/2 - k} (1-η)^k` and `sinh(r)^{2(m1-m2+k)} / cosh(r)^{2+m1+n1}`;
/// both exponents are nonnegative over the summation range, so `η ∈ {0, 1}` and
/// `r = 0` evaluate exactly. All magnitudes are accumulated in log space.
///
/// The element and its transpose are evaluated from the same index order, so
/// the result is exactly symmetric under `(m1, m2) ↔ (n1, n2)`.
pub fn tmst_fock_element(p: &TmstParams, idx: FockIndex) -> f64 {
    let sw = idx.swapped();
    let idx = if (sw.m1, sw.m2) < (idx.m1, idx.m2) { sw } else { idx };
    let FockIndex { m1, m2, n1, n2 } = idx;
    if !idx.conserves_difference() {
        return 0.0;
    }
    let (s, eta, r) = (p.s(), p.eta(), p.r());
    let vs = s.tanh();
    let k_lo = m2.saturating_sub(m1);
    let k_hi = m2.min(n2);
    if k_lo > k_hi {
        return 0.0;
    }
    // (1 - ς²) ς^{m2+n2} / cosh(r)^{2+m1+n1}
    let ln_prefactor =
        -2.0 * s.cosh().ln() + ln_pow(vs, m2 + n2) - (2 + m1 + n1) as f64 * r.cosh().ln();
    let (ln_sqrt_eta, ln_loss, ln_sinh) = ((eta.sqrt()).ln(), (1.0 - eta).ln(), r.sinh().ln());
    let logs: Vec<f64> = (k_lo..=k_hi)
        .map(|k| {
            let binom = 0.5
                * (ln_binomial(m2, k)
                    + ln_binomial(n2, k)
                    + ln_binomial(m1, m2 - k)
                    + ln_binomial(n1, n2 - k));
            binom
                + pow_from_ln(ln_sqrt_eta, m2 + n2 - 2 * k)
                + pow_from_ln(ln_loss, k)
                + pow_from_ln(ln_sinh, 2 * (m1 + k - m2))
        })
        .collect();
    (ln_prefactor + ln_sum_exp(&logs)).exp()
}

fn pow_from_ln(ln_x: f64, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        n as f64 * ln_x
    }
}

/// A finite linear combination of dyads `|row⟩⟨col|`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OperatorBlock {
    pub terms: Vec<(usize, usize, f64)>,
    /// Upper bound on the trace-norm weight dropped by truncation.
    pub tail_bound: f64,
}

impl OperatorBlock {
    pub fn coefficient(&self, row: usize, col: usize) -> f64 {
        self.terms
            .iter()
            .filter(|&&(r, c, _)| r == row && c == col)
            .map(|&(_, _, v)| v)
            .sum()
    }
}

/// Pure-loss channel on `|m⟩⟨n|`: coefficient of `|m-k⟩⟨n-k|` is
/// `√(C(m,k) C(n,k)) η^{(m+n)/2-k} (1-η)^k`.
pub fn loss_map_on_dyad(m: usize, n: usize, eta: f64) -> Result<OperatorBlock> {
    check_range("eta", eta, 0.0, 1.0, "[0, 1]")?;
    let (ln_sqrt_eta, ln_loss) = (eta.sqrt().ln(), (1.0 - eta).ln());
    let terms = (0..=m.min(n))
        .map(|k| {
            let ln = 0.5 * (ln_binomial(m, k) + ln_binomial(n, k))
                + pow_from_ln(ln_sqrt_eta, m + n - 2 * k)
                + pow_from_ln(ln_loss, k);
            (m - k, n - k, ln.exp())
        })
        .filter(|&(_, _, v)| v != 0.0)
        .collect();
    Ok(OperatorBlock {
        terms,
        tail_bound: 0.0,
    })
}

/// Quantum-limited amplifier on `|m⟩⟨n|`: coefficient of `|m+l⟩⟨n+l|` is
/// `cosh(r)^{-(m+n+2)} √(C(m+l,m) C(n+l,n)) tanh(r)^{2l}`.
///
/// The `l` sum stops once the geometric bound on the remaining terms drops
/// below [`AMPLIFIER_TAIL`] or the output index reaches `cutoff`.
pub fn amplifier_map_on_dyad(m: usize, n: usize, r: f64, cutoff: usize) -> Result<OperatorBlock> {
    check_range("r", r, 0.0, f64::INFINITY, "[0, ∞)")?;
    let t2 = r.tanh().powi(2);
    let ln_t2 = t2.ln();
    let ln_norm = -((m + n + 2) as f64) * r.cosh().ln();
    let mut terms = Vec::new();
    let mut tail_bound = 0.0;
    let mut l = 0;
    while m.max(n) + l < cutoff {
        let ln = ln_norm
            + 0.5 * (ln_binomial(m + l, m) + ln_binomial(n + l, n))
            + pow_from_ln(ln_t2, l);
        let coeff = ln.exp();
        terms.push((m + l, n + l, coeff));
        // ratio of consecutive terms, decreasing in l
        let ratio =
            t2 * (((m + l + 1) * (n + l + 1)) as f64).sqrt() / (l + 1) as f64;
        let next = coeff * ratio;
        if ratio < 1.0 {
            tail_bound = next / (1.0 - ratio);
            if tail_bound < AMPLIFIER_TAIL {
                break;
            }
        } else {
            tail_bound = f64::INFINITY;
        }
        l += 1;
    }
    Ok(OperatorBlock { terms, tail_bound })
}

/// The same element assembled from the dyad maps:
/// `(1-ς²) ς^{m2+n2} ⟨m1| A_r(L_η(|m2⟩⟨n2|)) |n1⟩`.
pub fn fock_element_via_channels(p: &TmstParams, idx: FockIndex) -> Result<f64> {
    let FockIndex { m1, m2, n1, n2 } = idx;
    let vs = p.varsigma();
    let weight = (1.0 - vs * vs) * vs.powi((m2 + n2) as i32);
    if weight == 0.0 {
        return Ok(0.0);
    }
    let cutoff = m1.max(n1) + 1;
    let mut total = 0.0;
    for &(row, col, c_loss) in &loss_map_on_dyad(m2, n2, p.eta())?.terms {
        if row > m1 || col > n1 {
            continue;
        }
        let amp = amplifier_map_on_dyad(row, col, p.r(), cutoff)?;
        total += c_loss * amp.coefficient(m1, n1);
    }
    Ok(weight * total)
}

/// Smallest cutoff `N` whose discarded probability mass, bounded by
/// `ς^{2N} + ((a-1)/(a+1))^N` from the thermal marginals, is below `target`.
pub fn default_cutoff(p: &TmstParams, target: f64) -> usize {
    let mut n = 1;
    while marginal_tail_bound(p, n) >= target && n < 100_000 {
        n += 1;
    }
    n
}

/// Probability that either mode holds at least `cutoff` photons, bounded by
/// the sum of the two thermal marginal tails.
pub fn marginal_tail_bound(p: &TmstParams, cutoff: usize) -> f64 {
    let vs2 = p.varsigma().powi(2);
    let a = tmst_covariance(p).a();
    let xa = (a - 1.0) / (a + 1.0);
    vs2.powi(cutoff as i32) + xa.powi(cutoff as i32)
}

/// One amplitude of the purified state on modes `A, B, A', A''`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PurifiedAmplitude {
    pub a: usize,
    pub b: usize,
    pub ancilla_loss: usize,
    pub ancilla_gain: usize,
    pub amplitude: f64,
}

/// Truncated amplitudes of `|Ψ_{s,η,r}⟩` on `A B A' A''`.
#[derive(Debug, Clone)]
pub struct PurifiedState {
    pub cutoff: usize,
    pub amplitudes: Vec<PurifiedAmplitude>,
    /// `1 - Σ|ψ|²` over the retained amplitudes.
    pub discarded_norm: f64,
}

/// Purified state vector
///
/// ```text
/// √(1-ς²) Σ_m ς^m Σ_k √(C(m,k) η^k (1-η)^{m-k}) cosh(r)^{-(k+1)}
///     Σ_l √C(k+l,k) tanh(r)^l |k+l, m, m-k, l⟩
/// ```
///
/// keeping `m < cutoff` and `k + l < cutoff`.
pub fn purified_state_vector(p: &TmstParams, cutoff: usize) -> Result<PurifiedState> {
    let (eta, r) = (p.eta(), p.r());
    let vs = p.varsigma();
    let ln_norm = 0.5 * (1.0 - vs * vs).ln();
    let (ln_vs, ln_eta, ln_loss, ln_t, ln_ch) =
        (vs.ln(), eta.ln(), (1.0 - eta).ln(), r.tanh().ln(), r.cosh().ln());
    let mut amplitudes = Vec::new();
    let mut norm = 0.0;
    for m in 0..cutoff {
        let ln_m = ln_norm + pow_from_ln(ln_vs, m);
        for k in 0..=m {
            let ln_k = ln_m
                + 0.5 * (ln_binomial(m, k) + pow_from_ln(ln_eta, k) + pow_from_ln(ln_loss, m - k))
                - (k + 1) as f64 * ln_ch;
            if ln_k == f64::NEG_INFINITY {
                continue;
            }
            for l in 0..cutoff - k {
                let ln_amp = ln_k + 0.5 * ln_binomial(k + l, k) + pow_from_ln(ln_t, l);
                let amplitude = ln_amp.exp();
                if amplitude == 0.0 {
                    break;
                }
                norm += amplitude * amplitude;
                amplitudes.push(PurifiedAmplitude {
                    a: k + l,
                    b: m,
                    ancilla_loss: m - k,
                    ancilla_gain: l,
                    amplitude,
                });
            }
        }
    }
    let discarded_norm = (1.0 - norm).max(0.0);
    if discarded_norm > PURIFIED_TAIL_LIMIT {
        return Err(Error::CutoffTooSmall {
            cutoff,
            tail_mass: discarded_norm.max(marginal_tail_bound(p, cutoff)),
            limit: PURIFIED_TAIL_LIMIT,
        });
    }
    Ok(PurifiedState {
        cutoff,
        amplitudes,
        discarded_norm,
    })
}

impl PurifiedState {
    /// Trace out `A'` and `A''`, keeping system indices `< dim`.
    pub fn reduce(&self, dim: usize) -> TruncatedDensityMatrix {
        let mut by_ancilla: HashMap<(usize, usize), Vec<(usize, usize, f64)>> = HashMap::new();
        for amp in &self.amplitudes {
            if amp.a < dim && amp.b < dim {
                by_ancilla
                    .entry((amp.ancilla_loss, amp.ancilla_gain))
                    .or_default()
                    .push((amp.a, amp.b, amp.amplitude));
            }
        }
        let mut rho = TruncatedDensityMatrix::zeros(dim);
        for group in by_ancilla.values() {
            for &(a, b, x) in group {
                for &(a2, b2, y) in group {
                    *rho.get_mut(FockIndex::new(a, b, a2, b2)) += x * y;
                }
            }
        }
        rho.tail_bound = self.discarded_norm;
        rho
    }
}

/// Dense real density matrix on `{0..N} ⊗ {0..N}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedDensityMatrix {
    cutoff: usize,
    elements: Vec<f64>,
    /// Upper bound on the probability mass outside the truncation.
    pub tail_bound: f64,
}

impl TruncatedDensityMatrix {
    pub fn zeros(cutoff: usize) -> Self {
        Self {
            cutoff,
            elements: vec![0.0; cutoff.pow(4)],
            tail_bound: 0.0,
        }
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    fn offset(&self, idx: FockIndex) -> usize {
        let n = self.cutoff;
        ((idx.m1 * n + idx.m2) * n + idx.n1) * n + idx.n2
    }

    /// Element at `idx`, or `None` when any index reaches the cutoff.
    pub fn get(&self, idx: FockIndex) -> Option<f64> {
        (idx.max() < self.cutoff).then(|| self.elements[self.offset(idx)])
    }

    fn get_mut(&mut self, idx: FockIndex) -> &mut f64 {
        let o = self.offset(idx);
        &mut self.elements[o]
    }

    pub fn trace(&self) -> f64 {
        let n = self.cutoff;
        let mut t = 0.0;
        for m1 in 0..n {
            for m2 in 0..n {
                t += self.elements[self.offset(FockIndex::new(m1, m2, m1, m2))];
            }
        }
        t
    }

    /// `Σ (-1)^{m1+m2} ⟨m1 m2|ρ|m1 m2⟩ = ⟨P_A ⊗ P_B⟩`.
    pub fn parity_sum(&self) -> f64 {
        let n = self.cutoff;
        let mut t = 0.0;
        for m1 in 0..n {
            for m2 in 0..n {
                let v = self.elements[self.offset(FockIndex::new(m1, m2, m1, m2))];
                t += if (m1 + m2) % 2 == 0 { v } else { -v };
            }
        }
        t
    }

    /// Iterate over all stored `(index, value)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (FockIndex, f64)> + '_ {
        let n = self.cutoff;
        self.elements.iter().enumerate().map(move |(o, &v)| {
            let n2 = o % n;
            let n1 = (o / n) % n;
            let m2 = (o / (n * n)) % n;
            let m1 = o / (n * n * n);
            (FockIndex::new(m1, m2, n1, n2), v)
        })
    }

    /// Sub-block with fixed photon-number difference `m1 - m2 = delta`. The
    /// TMST density matrix is block diagonal in this quantity.
    pub fn difference_block(&self, delta: i64) -> DMatrix<f64> {
        let n = self.cutoff as i64;
        let pairs: Vec<(usize, usize)> = (0..n)
            .filter_map(|m1| {
                let m2 = m1 - delta;
                (0..n).contains(&m2).then_some((m1 as usize, m2 as usize))
            })
            .collect();
        DMatrix::from_fn(pairs.len(), pairs.len(), |i, j| {
            let (m1, m2) = pairs[i];
            let (n1, n2) = pairs[j];
            self.elements[self.offset(FockIndex::new(m1, m2, n1, n2))]
        })
    }

    /// Sparse CSV dump `m1,m2,n1,n2,value` of the nonzero elements.
    pub fn to_sparse_csv(&self) -> String {
        let mut out = String::from("m1,m2,n1,n2,value\n");
        for (idx, v) in self.iter().filter(|&(_, v)| v != 0.0) {
            let _ = writeln!(out, "{},{},{},{},{:?}", idx.m1, idx.m2, idx.n1, idx.n2, v);
        }
        out
    }

    /// Sparse JSON dump of the nonzero elements.
    pub fn to_sparse_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Entry {
            m1: usize,
            m2: usize,
            n1: usize,
            n2: usize,
            value: f64,
        }
        let entries: Vec<Entry> = self
            .iter()
            .filter(|&(_, v)| v != 0.0)
            .map(|(i, value)| Entry {
                m1: i.m1,
                m2: i.m2,
                n1: i.n1,
                n2: i.n2,
                value,
            })
            .collect();
        serde_json::json!({
            "cutoff": self.cutoff,
            "tail_bound": self.tail_bound,
            "elements": entries,
        })
    }
}

/// All elements with indices below `cutoff`, evaluated in parallel over `m1`.
pub fn truncated_tmst_density(p: &TmstParams, cutoff: usize) -> Result<TruncatedDensityMatrix> {
    if cutoff == 0 {
        return Err(Error::Domain {
            name: "cutoff",
            value: 0.0,
            domain: "≥ 1",
        });
    }
    let mut rho = TruncatedDensityMatrix::zeros(cutoff);
    let n = cutoff;
    rho.elements
        .par_chunks_mut(n * n * n)
        .enumerate()
        .for_each(|(m1, chunk)| {
            for m2 in 0..n {
                for n1 in 0..n {
                    for n2 in 0..n {
                        chunk[(m2 * n + n1) * n + n2] =
                            tmst_fock_element(p, FockIndex::new(m1, m2, n1, n2));
                    }
                }
            }
        });
    rho.tail_bound = marginal_tail_bound(p, cutoff);
    Ok(rho)
}
