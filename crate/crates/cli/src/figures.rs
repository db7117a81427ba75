use std::path::PathBuf;

use rayon::prelude::*;
use serde_json::json;

use cvsteer::pseudospin::{type_i_correlators, type_ii_tmst};
use cvsteer::thresholds::{
    run_sweep, Axis, Criterion, Family, SweepSpec, ThresholdCurve, Variable, DEFAULT_BISECTION_TOL,
    INNER_TOL_RATIO,
};
use cvsteer::werner::{p_steer_gaussian, p_steer_type_i, p_steer_type_ii};
use cvsteer::TmstParams;

use crate::args::{FigureArgs, FigureId, Format};
use crate::commands::DEFAULT_SERIES_TOL;
use crate::error::{CliError, CliResult};
use crate::output::{Cell, Report, Table};

const FIG4A_SQUEEZING: [f64; 3] = [0.5, 1.0, 1.5];
const FIG4B_AMPLIFIER: [f64; 3] = [0.0, 0.25, 0.5];

impl FigureId {
    pub fn name(self) -> &'static str {
        match self {
            FigureId::Fig2 => "fig2",
            FigureId::Fig3 => "fig3",
            FigureId::Fig4a => "fig4a",
            FigureId::Fig4b => "fig4b",
            FigureId::Fig5 => "fig5",
            FigureId::Fig6 => "fig6",
        }
    }

    fn default_points(self) -> usize {
        match self {
            FigureId::Fig2 => 61,
            FigureId::Fig3 => 30,
            FigureId::Fig4a => 21,
            FigureId::Fig4b => 30,
            FigureId::Fig5 => 31,
            FigureId::Fig6 => 100,
        }
    }
}

pub fn default_path(id: FigureId, format: Format) -> PathBuf {
    PathBuf::from(format!("{}.{}", id.name(), format.extension()))
}

fn grid(min: f64, max: f64, points: usize) -> Vec<f64> {
    Axis {
        variable: Variable::S,
        min,
        max,
        points,
    }
    .values()
}

struct Sweeper {
    tol: f64,
    notes: Vec<serde_json::Value>,
}

impl Sweeper {
    fn curve(
        &mut self,
        criterion: Criterion,
        variable: Variable,
        (min, max, points): (f64, f64, usize),
        s: f64,
        r: f64,
        label: &str,
    ) -> CliResult<ThresholdCurve> {
        let spec = SweepSpec {
            family: Family::Tmst,
            criterion,
            axis: Axis {
                variable,
                min,
                max,
                points,
            },
            s,
            r,
            u: None,
            bisection_tol: self.tol,
        };
        let curve = run_sweep(&spec)?;
        for row in &curve.rows {
            if let Some(n) = &row.note {
                self.notes.push(json!({"column": label, "abscissa": row.abscissa, "note": n}));
            }
        }
        Ok(curve)
    }
}

fn thresholds_table(axis_name: &str, xs: &[f64], columns: &[(String, ThresholdCurve)]) -> Table {
    let mut names = vec![axis_name.to_string()];
    names.extend(columns.iter().map(|(n, _)| n.clone()));
    names.push("converged".into());
    let mut t = Table::new(names);
    for (i, &x) in xs.iter().enumerate() {
        let mut row = vec![Cell::Float(x)];
        row.extend(columns.iter().map(|(_, c)| Cell::from(c.rows[i].threshold)));
        row.push(columns.iter().all(|(_, c)| c.rows[i].converged).into());
        t.push(row);
    }
    t
}

fn fig2(points: usize) -> CliResult<Report> {
    let xs = grid(0.0, 3.0, points);
    let rows: Vec<CliResult<Vec<Cell>>> = xs
        .par_iter()
        .map(|&s| {
            let p = TmstParams::epr(s)?;
            let ti = type_i_correlators(&p, DEFAULT_SERIES_TOL)?;
            let m_ii = type_ii_tmst(&p).moment().value;
            Ok(vec![
                s.into(),
                ti.correlators.moment().value.into(),
                m_ii.into(),
                ti.tail_bound.into(),
            ])
        })
        .collect();
    let mut t = Table::new(["s", "moment_type_i", "moment_type_ii", "type_i_tail_bound"]);
    for r in rows {
        t.push(r?);
    }
    Ok(Report::new(t)
        .with("description", json!("moment values of the two-mode squeezed vacuum versus s"))
        .with("tolerances", json!({"series": DEFAULT_SERIES_TOL})))
}

fn fig3(points: usize, sw: &mut Sweeper) -> CliResult<Report> {
    let range = (0.05, 1.5, points);
    let mut cols = Vec::new();
    for c in [Criterion::Gaussian, Criterion::TypeI, Criterion::TypeIi] {
        let name = c.name().replace('-', "_");
        cols.push((name.clone(), sw.curve(c, Variable::S, range, 0.0, 0.0, &name)?));
    }
    let xs = grid(range.0, range.1, points);
    Ok(Report::new(thresholds_table("s", &xs, &cols))
        .with("description", json!("η thresholds versus s for the pure-loss TMST (r = 0)")))
}

fn fig4a(points: usize, sw: &mut Sweeper) -> CliResult<Report> {
    let range = (0.0, 1.0, points);
    let mut cols = Vec::new();
    for s in FIG4A_SQUEEZING {
        for c in [Criterion::TypeI, Criterion::Gaussian] {
            let name = format!("{}_s{s:?}", c.name().replace('-', "_"));
            cols.push((name.clone(), sw.curve(c, Variable::R, range, s, 0.0, &name)?));
        }
    }
    let xs = grid(range.0, range.1, points);
    Ok(Report::new(thresholds_table("r", &xs, &cols))
        .with("description", json!("η thresholds versus r at fixed s"))
        .with("fixed_s", json!(FIG4A_SQUEEZING)))
}

fn fig4b(points: usize, sw: &mut Sweeper) -> CliResult<Report> {
    let range = (0.05, 2.0, points);
    let mut cols = Vec::new();
    for r in FIG4B_AMPLIFIER {
        for c in [Criterion::TypeI, Criterion::Gaussian] {
            let name = format!("{}_r{r:?}", c.name().replace('-', "_"));
            cols.push((name.clone(), sw.curve(c, Variable::S, range, 0.0, r, &name)?));
        }
    }
    let xs = grid(range.0, range.1, points);
    Ok(Report::new(thresholds_table("s", &xs, &cols))
        .with("description", json!("η thresholds versus s at fixed r"))
        .with("fixed_r", json!(FIG4B_AMPLIFIER)))
}

fn fig5(points: usize) -> CliResult<Report> {
    let xs = grid(0.0, 3.0, points);
    let mut t = Table::new(["s", "u", "p_type_i", "never_steerable"]);
    for &s in &xs {
        for &u in &xs {
            let th = p_steer_type_i(s, u)?;
            let value = (!th.never_steerable).then_some(th.value);
            t.push(vec![s.into(), u.into(), value.into(), th.never_steerable.into()]);
        }
    }
    Ok(Report::new(t)
        .with("description", json!("type-i threshold probability over (s, u)"))
        .with("tolerances", json!("closed form")))
}

fn fig6(points: usize) -> CliResult<Report> {
    let xs = grid(0.05, 5.0, points);
    let mut t = Table::new(["s", "p_type_i", "p_type_ii", "p_gaussian"]);
    for &s in &xs {
        let mut row = vec![Cell::Float(s)];
        for th in [p_steer_type_i(s, s)?, p_steer_type_ii(s, s)?, p_steer_gaussian(s, s)?] {
            row.push((!th.never_steerable).then_some(th.value).into());
        }
        t.push(row);
    }
    Ok(Report::new(t)
        .with("description", json!("Werner threshold probabilities with u = s"))
        .with("tolerances", json!("closed form")))
}

pub fn figure(a: &FigureArgs, tol: Option<f64>) -> CliResult<Report> {
    let points = a.points.unwrap_or_else(|| a.id.default_points());
    if points < 2 {
        return Err(CliError::Usage("--points must be at least 2".into()));
    }
    let tol = match tol {
        None => DEFAULT_BISECTION_TOL,
        Some(t) if t > 0.0 && t.is_finite() => t,
        Some(t) => return Err(CliError::Usage(format!("--tol must be positive, got {t}"))),
    };
    let mut sw = Sweeper { tol, notes: Vec::new() };
    let report = match a.id {
        FigureId::Fig2 => fig2(points)?,
        FigureId::Fig3 => fig3(points, &mut sw)?,
        FigureId::Fig4a => fig4a(points, &mut sw)?,
        FigureId::Fig4b => fig4b(points, &mut sw)?,
        FigureId::Fig5 => fig5(points)?,
        FigureId::Fig6 => fig6(points)?,
    };
    let report = report.with("figure", json!(a.id.name())).with("points", json!(points));
    Ok(match a.id {
        FigureId::Fig3 | FigureId::Fig4a | FigureId::Fig4b => report
            .with(
                "tolerances",
                json!({"bisection": tol, "inner_series": tol * INNER_TOL_RATIO}),
            )
            .with("row_notes", json!(sw.notes)),
        _ => report,
    })
}
