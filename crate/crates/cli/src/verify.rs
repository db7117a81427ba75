use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use cvsteer::fock::{
    default_cutoff, purified_state_vector, tmst_fock_element, truncated_tmst_density, FockIndex,
};
use cvsteer::gaussian::tmst_covariance;
use cvsteer::hermite::{
    fock_from_hermite, hermite_at_origin, hermite_taylor_oracle, theta_from_standard_form,
    MAX_ORACLE_DEGREE,
};
use cvsteer::pseudospin::{type_i_correlators, type_i_from_density};
use cvsteer::TmstParams;

use crate::args::{VerifyArgs, VerifyScope};
use crate::error::{CliError, CliResult};
use crate::output::{Report, Table};

const FOCK_TOL: f64 = 1e-10;
const HERMITE_TOL: f64 = 1e-10;
const CORRELATOR_TOL: f64 = 1e-8;
const FOCK_MAX_INDEX: usize = 5;
const CORRELATOR_CUTOFF_TAIL: f64 = 1e-13;

struct Outcome {
    check: &'static str,
    cases: usize,
    max_deviation: f64,
    tolerance: f64,
}

impl Outcome {
    fn passed(&self) -> bool {
        self.max_deviation <= self.tolerance
    }
}

struct Budget {
    cases: usize,
    limit: Option<Duration>,
}

impl Budget {
    /// Runs `case` until the count or time budget is spent; returns cases run.
    fn run(&self, mut case: impl FnMut() -> CliResult<()>) -> CliResult<usize> {
        let start = Instant::now();
        for done in 0..self.cases {
            if self.limit.is_some_and(|l| done > 0 && start.elapsed() >= l) {
                return Ok(done);
            }
            case()?;
        }
        Ok(self.cases)
    }
}

fn draw(rng: &mut ChaCha8Rng, s_max: f64, eta_min: f64, r_max: f64) -> CliResult<TmstParams> {
    Ok(TmstParams::new(
        rng.random_range(0.0..=s_max),
        rng.random_range(eta_min..=1.0),
        rng.random_range(0.0..=r_max),
    )?)
}

/// Closed-form elements against the partial trace of the purified state.
fn fock(rng: &mut ChaCha8Rng, budget: &Budget) -> CliResult<Outcome> {
    let mut worst: f64 = 0.0;
    let cases = budget.run(|| {
        let p = draw(rng, 1.0, 0.05, 0.8)?;
        let rho = purified_state_vector(&p, default_cutoff(&p, 1e-13))?.reduce(FOCK_MAX_INDEX + 1);
        for (idx, oracle) in rho.iter() {
            let closed = tmst_fock_element(&p, idx);
            let selection_zero = !idx.conserves_difference() || idx.total() % 2 == 1;
            if selection_zero && closed != 0.0 {
                worst = f64::INFINITY;
            }
            worst = worst.max((closed - oracle).abs());
        }
        Ok(())
    })?;
    Ok(Outcome {
        check: "fock closed form vs ancilla trace",
        cases,
        max_deviation: worst,
        tolerance: FOCK_TOL,
    })
}

/// Closed-form Hermite values against Taylor coefficients, and the Fock
/// correspondence through them.
fn hermite(rng: &mut ChaCha8Rng, budget: &Budget, max_degree: usize) -> CliResult<[Outcome; 2]> {
    let mut worst_rel: f64 = 0.0;
    let mut worst_fock: f64 = 0.0;
    let cases = budget.run(|| {
        let p = draw(rng, 1.0, 0.05, 0.8)?;
        let sf = tmst_covariance(&p);
        let th = theta_from_standard_form(sf.a(), sf.b(), sf.c())?;
        for m1 in 0..=max_degree {
            for m2 in 0..=max_degree - m1 {
                for n1 in 0..=max_degree - m1 - m2 {
                    for n2 in 0..=max_degree - m1 - m2 - n1 {
                        let idx = FockIndex::new(m1, m2, n1, n2);
                        let a = hermite_at_origin(idx, &th);
                        let b = hermite_taylor_oracle(idx, &th)?;
                        let scale = a.abs().max(b.abs());
                        if scale > 0.0 {
                            worst_rel = worst_rel.max((a - b).abs() / scale);
                        }
                        let f = fock_from_hermite(&sf, idx)?;
                        worst_fock = worst_fock.max((f - tmst_fock_element(&p, idx)).abs());
                    }
                }
            }
        }
        Ok(())
    })?;
    Ok([
        Outcome {
            check: "hermite closed form vs taylor (relative)",
            cases,
            max_deviation: worst_rel,
            tolerance: HERMITE_TOL,
        },
        Outcome {
            check: "fock via hermite vs closed form",
            cases,
            max_deviation: worst_fock,
            tolerance: HERMITE_TOL,
        },
    ])
}

/// Type-i series against the operator expectation on the truncated density.
fn correlators(rng: &mut ChaCha8Rng, budget: &Budget) -> CliResult<[Outcome; 2]> {
    let mut worst_xx: f64 = 0.0;
    let mut worst_zz_ratio: f64 = 0.0;
    let cases = budget.run(|| {
        let p = draw(rng, 0.8, 0.05, 0.6)?;
        let series = type_i_correlators(&p, 1e-12)?;
        let rho = truncated_tmst_density(&p, default_cutoff(&p, CORRELATOR_CUTOFF_TAIL))?;
        let fock = type_i_from_density(&rho);
        let xx = series.correlators.xx();
        worst_xx = worst_xx.max((xx - fock.xx()).abs());
        if series.correlators.yy() != -xx {
            worst_xx = f64::INFINITY;
        }
        let dz = (series.correlators.zz() - rho.parity_sum()).abs();
        worst_zz_ratio = worst_zz_ratio.max(dz / rho.tail_bound.max(f64::MIN_POSITIVE));
        Ok(())
    })?;
    Ok([
        Outcome {
            check: "type-i xx series vs fock expectation",
            cases,
            max_deviation: worst_xx,
            tolerance: CORRELATOR_TOL,
        },
        Outcome {
            check: "type-i zz vs parity sum (relative to tail bound)",
            cases,
            max_deviation: worst_zz_ratio,
            tolerance: 1.0,
        },
    ])
}

/// Returns the report and whether every check passed.
pub fn verify(a: &VerifyArgs) -> CliResult<(Report, bool)> {
    if a.max_degree > MAX_ORACLE_DEGREE {
        return Err(CliError::Usage(format!(
            "--max-degree {} exceeds the Taylor oracle limit {MAX_ORACLE_DEGREE}",
            a.max_degree
        )));
    }
    let limit = match a.time_limit {
        None => None,
        Some(t) if t > 0.0 && t.is_finite() => Some(Duration::from_secs_f64(t)),
        Some(t) => return Err(CliError::Usage(format!("--time-limit must be positive, got {t}"))),
    };
    let budget = |default: usize| Budget {
        cases: a.cases.unwrap_or(default),
        limit,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut outcomes = Vec::new();
    let all = a.scope == VerifyScope::All;
    if all || a.scope == VerifyScope::Fock {
        outcomes.push(fock(&mut rng, &budget(50))?);
    }
    if all || a.scope == VerifyScope::Hermite {
        outcomes.extend(hermite(&mut rng, &budget(20), a.max_degree)?);
    }
    if all || a.scope == VerifyScope::Correlators {
        outcomes.extend(correlators(&mut rng, &budget(20))?);
    }
    let mut t = Table::new(["check", "cases", "max_deviation", "tolerance", "passed"]);
    for o in &outcomes {
        t.push(vec![
            o.check.into(),
            o.cases.into(),
            o.max_deviation.into(),
            o.tolerance.into(),
            o.passed().into(),
        ]);
    }
    let ok = outcomes.iter().all(Outcome::passed);
    let report = Report::new(t).with(
        "verification",
        json!({"seed": a.seed, "max_degree": a.max_degree, "rng": "chacha8", "passed": ok}),
    );
    Ok((report, ok))
}
