use serde_json::json;

use cvsteer::fock::{tmst_fock_element, truncated_tmst_density, FockIndex};
use cvsteer::gaussian::{gaussian_steering_gap, is_gaussian_steerable_a_to_b, tmst_covariance};
use cvsteer::hermite::{
    fock_from_hermite, hermite_at_origin, hermite_taylor_oracle, theta_from_standard_form,
    tmst_params_from_standard_form, MAX_ORACLE_DEGREE,
};
use cvsteer::pseudospin::{type_i_correlators, type_ii_correlators, type_ii_tmst};
use cvsteer::thresholds::{
    eta_threshold, run_sweep, Axis, Criterion, Family, SweepSpec, Variable, DEFAULT_BISECTION_TOL,
    INNER_TOL_RATIO,
};
use cvsteer::werner::{
    p_steer_gaussian, p_steer_type_i, p_steer_type_ii, werner_covariance,
    werner_type_i_correlators, werner_type_ii_correlators, WernerThreshold,
};
use cvsteer::{CorrelatorTriple, StandardForm, TmstParams, WernerParams};

use crate::args::{
    CorrelatorArgs, FockArgs, HermiteArgs, SteerArgs, StateArgs, ThresholdArgs, TmstArgs,
    WernerArgs,
};
use crate::error::{CliError, CliResult};
use crate::output::{Cell, Report, Table};

/// Default truncation tolerance for type-i correlator series.
pub const DEFAULT_SERIES_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy)]
pub enum State {
    Tmst(TmstParams),
    Standard { sf: StandardForm, flipped: bool },
    Werner(WernerParams),
}

impl State {
    pub fn from_args(a: &StateArgs) -> CliResult<Self> {
        if let Some(s) = a.epr_s {
            return Ok(State::Tmst(TmstParams::epr(s)?));
        }
        if let Some([s, eta, r]) = a.tmst {
            return Ok(State::Tmst(TmstParams::new(s, eta, r)?));
        }
        if let Some([a, b, c, d]) = a.sf {
            let (sf, flipped) = StandardForm::new(a, b, c, d)?.canonicalized();
            return Ok(State::Standard { sf, flipped });
        }
        if let Some([p, s, u]) = a.werner {
            return Ok(State::Werner(WernerParams::new(p, s, u)?));
        }
        Err(CliError::Usage("no state given".into()))
    }

    fn describe(&self) -> serde_json::Value {
        match self {
            State::Tmst(p) => json!({"family": "tmst", "s": p.s(), "eta": p.eta(), "r": p.r()}),
            State::Standard { sf, flipped } => json!({
                "family": "standard-form",
                "a": sf.a(), "b": sf.b(), "c": sf.c(), "d": sf.d(),
                "phase_flipped": flipped,
            }),
            State::Werner(w) => json!({"family": "werner", "p": w.p(), "s": w.s(), "u": w.u()}),
        }
    }

    fn notes(&self) -> Vec<String> {
        match self {
            State::Standard { flipped: true, .. } => vec![
                "c < 0 on input: mode B rotated by π, flipping the signs of c and d".to_string(),
            ],
            _ => Vec::new(),
        }
    }
}

fn tmst(a: &TmstArgs) -> CliResult<TmstParams> {
    Ok(TmstParams::new(a.s, a.eta, a.r)?)
}

fn positive_tol(tol: Option<f64>, default: f64) -> CliResult<f64> {
    match tol {
        None => Ok(default),
        Some(t) if t > 0.0 && t.is_finite() => Ok(t),
        Some(t) => Err(CliError::Usage(format!("--tol must be positive, got {t}"))),
    }
}

pub fn fock(a: &FockArgs) -> CliResult<Report> {
    let p = tmst(&a.tmst)?;
    let mut t = Table::new(["m1", "m2", "n1", "n2", "value", "tail_bound"]);
    let params = json!({"s": p.s(), "eta": p.eta(), "r": p.r()});
    if let Some(cutoff) = a.cutoff {
        if cutoff == 0 {
            return Err(CliError::Usage("--cutoff must be at least 1".into()));
        }
        let rho = truncated_tmst_density(&p, cutoff)?;
        for (idx, v) in rho.iter().filter(|&(_, v)| v != 0.0) {
            t.push(vec![
                idx.m1.into(),
                idx.m2.into(),
                idx.n1.into(),
                idx.n2.into(),
                v.into(),
                rho.tail_bound.into(),
            ]);
        }
        return Ok(Report::new(t)
            .with("parameters", params)
            .with("truncation", json!({"cutoff": cutoff, "trace_tail_bound": rho.tail_bound})));
    }
    for &[m1, m2, n1, n2] in &a.idx {
        let v = tmst_fock_element(&p, FockIndex::new(m1, m2, n1, n2));
        t.push(vec![m1.into(), m2.into(), n1.into(), n2.into(), v.into(), 0.0.into()]);
    }
    Ok(Report::new(t)
        .with("parameters", params)
        .with("truncation", json!("none: closed form is a finite sum")))
}

struct Evaluation {
    quantity: &'static str,
    value: f64,
    steerable: bool,
    error_bound: f64,
}

fn correlators_of(state: &State, criterion: Criterion, tol: f64) -> CliResult<(CorrelatorTriple, f64)> {
    match (criterion, state) {
        (Criterion::TypeI, State::Tmst(p)) => {
            let c = type_i_correlators(p, tol)?;
            Ok((c.correlators, c.tail_bound))
        }
        (Criterion::TypeI, State::Standard { sf, .. }) => {
            let p = tmst_params_from_standard_form(sf)?;
            let c = type_i_correlators(&p, tol)?;
            Ok((c.correlators, c.tail_bound))
        }
        (Criterion::TypeI, State::Werner(w)) => Ok((werner_type_i_correlators(w), 0.0)),
        (Criterion::TypeIi, State::Tmst(p)) => Ok((type_ii_tmst(p), 0.0)),
        (Criterion::TypeIi, State::Standard { sf, .. }) => Ok((type_ii_correlators(sf)?, 0.0)),
        (Criterion::TypeIi, State::Werner(w)) => Ok((werner_type_ii_correlators(w), 0.0)),
        (Criterion::Gaussian, _) => Err(CliError::Usage(
            "pseudospin correlators need --criterion type-i or type-ii".into(),
        )),
    }
}

fn evaluate(state: &State, criterion: Criterion, tol: f64) -> CliResult<Evaluation> {
    if criterion == Criterion::Gaussian {
        let sf = match state {
            State::Tmst(p) => tmst_covariance(p),
            State::Standard { sf, .. } => *sf,
            State::Werner(w) => werner_covariance(w),
        };
        let steerable = is_gaussian_steerable_a_to_b(&sf)?;
        return Ok(Evaluation {
            quantity: "det-gap",
            value: gaussian_steering_gap(&sf),
            steerable,
            error_bound: 0.0,
        });
    }
    let (c, delta) = correlators_of(state, criterion, tol)?;
    let m = c.moment();
    // |xx| and |yy| each carry at most `delta`; zz is exact
    let err = 2.0 * (2.0 * c.xx().abs() * delta + delta * delta);
    Ok(Evaluation {
        quantity: "moment",
        value: m.value,
        steerable: m.steerable,
        error_bound: err,
    })
}

pub fn steer(a: &SteerArgs, tol: Option<f64>) -> CliResult<Report> {
    let state = State::from_args(&a.state)?;
    let criterion: Criterion = a.criterion.into();
    let tol = positive_tol(tol, DEFAULT_SERIES_TOL)?;
    let e = evaluate(&state, criterion, tol)?;
    let mut notes = state.notes();
    if e.quantity == "moment" && (e.value - 1.0).abs() <= e.error_bound {
        notes.push("moment within its error bound of 1: verdict not certified".into());
    }
    let mut t = Table::new(["criterion", "quantity", "value", "steerable", "error_bound"]);
    t.push(vec![
        criterion.name().into(),
        e.quantity.into(),
        e.value.into(),
        e.steerable.into(),
        e.error_bound.into(),
    ]);
    Ok(Report::new(t)
        .with("state", state.describe())
        .with("tolerances", json!({"series": tol}))
        .with("notes", json!(notes)))
}

pub fn correlators(a: &CorrelatorArgs, tol: Option<f64>) -> CliResult<Report> {
    let state = State::from_args(&a.state)?;
    let criterion: Criterion = a.criterion.into();
    let tol = positive_tol(tol, DEFAULT_SERIES_TOL)?;
    let (c, bound) = correlators_of(&state, criterion, tol)?;
    let mut t = Table::new(["criterion", "xx", "yy", "zz", "moment", "tail_bound"]);
    t.push(vec![
        criterion.name().into(),
        c.xx().into(),
        c.yy().into(),
        c.zz().into(),
        c.moment().value.into(),
        bound.into(),
    ]);
    Ok(Report::new(t)
        .with("state", state.describe())
        .with("tolerances", json!({"series": tol}))
        .with("notes", json!(state.notes())))
}

fn werner_threshold(criterion: Criterion, s: f64, u: f64) -> CliResult<WernerThreshold> {
    Ok(match criterion {
        Criterion::Gaussian => p_steer_gaussian(s, u)?,
        Criterion::TypeI => p_steer_type_i(s, u)?,
        Criterion::TypeIi => p_steer_type_ii(s, u)?,
    })
}

pub fn threshold(a: &ThresholdArgs, tol: Option<f64>) -> CliResult<Report> {
    let criterion: Criterion = a.criterion.into();
    let family: Family = a.family.into();
    let tol = positive_tol(tol, DEFAULT_BISECTION_TOL)?;
    let tolerances = json!({"bisection": tol, "inner_series": tol * INNER_TOL_RATIO});
    let Some(axis) = a.axis else {
        let s = a.s.ok_or_else(|| CliError::Usage("--s is required without --axis".into()))?;
        return Ok(match family {
            Family::Tmst => {
                let th = eta_threshold(s, a.r, criterion, tol)?;
                let mut t = Table::new(["s", "r", "threshold", "converged", "error_bound"]);
                t.push(vec![s.into(), a.r.into(), th.value.into(), th.converged.into(), th.error_bound.into()]);
                let mut notes = Vec::new();
                if !th.monotone {
                    notes.push("non-monotone margin; grid fallback used".to_string());
                }
                Report::new(t).with("tolerances", tolerances).with("notes", json!(notes))
            }
            Family::Werner => {
                let u = a.u.unwrap_or(s);
                let th = werner_threshold(criterion, s, u)?;
                let mut t = Table::new(["s", "u", "threshold", "never_steerable"]);
                t.push(vec![s.into(), u.into(), th.value.into(), th.never_steerable.into()]);
                Report::new(t).with("tolerances", json!("closed form"))
            }
        }
        .with("criterion", json!(criterion.name())));
    };
    let (Some(min), Some(max)) = (a.min, a.max) else {
        return Err(CliError::Usage("--axis needs --min and --max".into()));
    };
    let variable: Variable = axis.into();
    if variable != Variable::S && a.s.is_none() {
        return Err(CliError::Usage("--s is required unless sweeping s".into()));
    }
    let spec = SweepSpec {
        family,
        criterion,
        axis: Axis {
            variable,
            min,
            max,
            points: a.points,
        },
        s: a.s.unwrap_or(0.0),
        r: a.r,
        u: a.u,
        bisection_tol: tol,
    };
    let curve = run_sweep(&spec)?;
    let mut t = Table::new(cvsteer::thresholds::CSV_HEADER.split(','));
    let mut notes = Vec::new();
    for row in &curve.rows {
        t.push(vec![
            row.abscissa.into(),
            row.threshold.into(),
            row.converged.into(),
            row.error_bound.into(),
        ]);
        if let Some(n) = &row.note {
            notes.push(json!({"abscissa": row.abscissa, "note": n}));
        }
    }
    Ok(Report::new(t)
        .with("sweep", serde_json::to_value(spec).expect("spec serializes"))
        .with("tolerances", tolerances)
        .with("row_notes", json!(notes)))
}

pub fn werner(a: &WernerArgs) -> CliResult<Report> {
    let u = a.u.unwrap_or(a.s);
    let state = match a.p {
        Some(p) => Some(WernerParams::new(p, a.s, u)?),
        None => {
            WernerParams::new(0.0, a.s, u)?;
            None
        }
    };
    let mut t = Table::new(["criterion", "threshold", "never_steerable", "value", "steerable"]);
    for criterion in [Criterion::TypeI, Criterion::TypeIi, Criterion::Gaussian] {
        let th = werner_threshold(criterion, a.s, u)?;
        let (value, steerable) = match &state {
            Some(w) => {
                let e = evaluate(&State::Werner(*w), criterion, DEFAULT_SERIES_TOL)?;
                (Cell::Float(e.value), Cell::Bool(e.steerable))
            }
            None => (Cell::Null, Cell::Null),
        };
        t.push(vec![
            criterion.name().into(),
            th.value.into(),
            th.never_steerable.into(),
            value,
            steerable,
        ]);
    }
    Ok(Report::new(t).with("parameters", json!({"s": a.s, "u": u, "p": a.p})))
}

pub fn hermite(a: &HermiteArgs) -> CliResult<Report> {
    let sf = match (a.state.tmst, a.state.sf) {
        (Some([s, eta, r]), _) => tmst_covariance(&TmstParams::new(s, eta, r)?),
        (_, Some([a, b, c, d])) => StandardForm::new(a, b, c, d)?,
        _ => return Err(CliError::Usage("no state given".into())),
    };
    let th = theta_from_standard_form(sf.a(), sf.b(), sf.c())?;
    let preimage = tmst_params_from_standard_form(&sf)?;
    let mut t = Table::new(["m1", "m2", "n1", "n2", "hermite", "taylor", "fock", "fock_closed_form"]);
    for &[m1, m2, n1, n2] in &a.idx {
        let idx = FockIndex::new(m1, m2, n1, n2);
        let taylor = if idx.total() <= MAX_ORACLE_DEGREE {
            Cell::Float(hermite_taylor_oracle(idx, &th)?)
        } else {
            Cell::Null
        };
        t.push(vec![
            m1.into(),
            m2.into(),
            n1.into(),
            n2.into(),
            hermite_at_origin(idx, &th).into(),
            taylor,
            fock_from_hermite(&sf, idx)?.into(),
            tmst_fock_element(&preimage, idx).into(),
        ]);
    }
    Ok(Report::new(t)
        .with("standard_form", json!({"a": sf.a(), "b": sf.b(), "c": sf.c(), "d": sf.d()}))
        .with("theta", json!({"e": th.e, "f": th.f, "g": th.g}))
        .with(
            "tmst_preimage",
            json!({"s": preimage.s(), "eta": preimage.eta(), "r": preimage.r()}),
        )
        .with("taylor_max_degree", json!(MAX_ORACLE_DEGREE)))
}
