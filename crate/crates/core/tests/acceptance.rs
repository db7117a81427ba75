//! End-to-end acceptance checks. Runs as a plain binary so each criterion
//! prints one PASS/FAIL line regardless of output capture.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use cvsteer::fock::{
    default_cutoff, purified_state_vector, tmst_fock_element, truncated_tmst_density, FockIndex,
};
use cvsteer::gaussian::tmst_covariance;
use cvsteer::hermite::{
    det_relation_check, fock_from_hermite, hermite_at_origin, hermite_taylor_oracle,
    theta_from_standard_form,
};
use cvsteer::pseudospin::{type_i_correlators, type_ii_nogo_scan, type_ii_tmst, NogoGrid};
use cvsteer::special::gudermannian;
use cvsteer::thresholds::{crossover_s, eta_threshold, small_squeezing_limit, Criterion};
use cvsteer::werner::{p_steer_gaussian, p_steer_type_i, p_steer_type_ii};
use cvsteer::TmstParams;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: String) -> Check {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn random_tmst(rng: &mut StdRng, s_max: f64, eta_min: f64, r_max: f64) -> TmstParams {
    TmstParams::new(
        rng.random_range(0.0..=s_max),
        rng.random_range(eta_min..=1.0),
        rng.random_range(0.0..=r_max),
    )
    .unwrap()
}

fn epr_moments() -> Check {
    let mut worst_i: f64 = 0.0;
    let mut worst_ii: f64 = 0.0;
    for s in [0.1f64, 0.5, 1.0, 1.5] {
        let p = TmstParams::new(s, 1.0, 0.0).unwrap();
        let m_i = type_i_correlators(&p, 1e-12).map_err(|e| e.to_string())?;
        let want_i = 1.0 + 2.0 * (2.0 * s).tanh().powi(2);
        worst_i = worst_i.max((m_i.correlators.moment().value - want_i).abs());
        let want_ii = 1.0 + 8.0 / (PI * PI) * gudermannian(2.0 * s).powi(2);
        worst_ii = worst_ii.max((type_ii_tmst(&p).moment().value - want_ii).abs());
    }
    ensure(
        worst_i < 1e-8 && worst_ii < 1e-12,
        format!("max |ΔM_i| = {worst_i:.2e} (< 1e-8), max |ΔM_ii| = {worst_ii:.2e} (< 1e-12)"),
    )
}

fn gaussian_threshold() -> Check {
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let s = 0.1 + 1.9 * i as f64 / 19.0;
        let t = eta_threshold(s, 0.0, Criterion::Gaussian, 1e-10).map_err(|e| e.to_string())?;
        let v = t.value.ok_or("no threshold")?;
        worst = worst.max((v - 0.5).abs());
    }
    ensure(worst <= 1e-9, format!("max |η*_G - 1/2| = {worst:.2e} over 20 s values (≤ 1e-9)"))
}

fn type_i_small_s() -> Check {
    let lim = small_squeezing_limit(0.0, Criterion::TypeI, &[0.02, 0.05, 0.1], 1e-9)
        .map_err(|e| e.to_string())?;
    ensure(
        (lim - 1.0 / 3.0).abs() <= 0.01,
        format!("extrapolated η*_i(s→0) = {lim:.6} (1/3 ± 0.01)"),
    )
}

fn crossover() -> Check {
    let c = crossover_s(0.0, 0.3, 1.5, 13, 1e-5).map_err(|e| e.to_string())?;
    let s = c.s.ok_or("no crossing in [0.3, 1.5]")?;
    ensure((0.8..=1.0).contains(&s), format!("η*_i = 1/2 at s = {s:.5} (in [0.8, 1.0])"))
}

fn nogo() -> Check {
    let res = type_ii_nogo_scan(&NogoGrid::default()).map_err(|e| e.to_string())?;
    let vac = [1.0, 1.0, 0.0, 0.0];
    let dist = res
        .argmax
        .iter()
        .zip(vac)
        .map(|(x, v)| (x - v).powi(2))
        .sum::<f64>()
        .sqrt();
    ensure(
        res.max_moment <= 1.0 + 1e-9 && dist <= 1e-3,
        format!(
            "max M_ii = {:.12} over {} admissible grid points, |argmax - vacuum| = {dist:.2e}",
            res.max_moment, res.feasible_points
        ),
    )
}

fn fock_oracle() -> Check {
    let mut rng = StdRng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    let mut selection_ok = true;
    for _ in 0..50 {
        let p = random_tmst(&mut rng, 1.0, 0.05, 0.8);
        let cutoff = default_cutoff(&p, 1e-13);
        let rho = purified_state_vector(&p, cutoff).map_err(|e| e.to_string())?.reduce(6);
        for (idx, oracle) in rho.iter() {
            let closed = tmst_fock_element(&p, idx);
            worst = worst.max((closed - oracle).abs());
            if !idx.conserves_difference() || idx.total() % 2 == 1 {
                selection_ok &= closed == 0.0;
            }
        }
    }
    ensure(
        worst < 1e-10 && selection_ok,
        format!("max |closed - ancilla trace| = {worst:.2e} (< 1e-10), selection zeros exact: {selection_ok}"),
    )
}

fn hermite() -> Check {
    let mut rng = StdRng::seed_from_u64(7);
    let mut worst_rel: f64 = 0.0;
    for _ in 0..20 {
        let p = random_tmst(&mut rng, 1.0, 0.0, 0.8);
        let sf = tmst_covariance(&p);
        let th = theta_from_standard_form(sf.a(), sf.b(), sf.c()).map_err(|e| e.to_string())?;
        for m1 in 0..=8 {
            for m2 in 0..=8 - m1 {
                for n1 in 0..=8 - m1 - m2 {
                    for n2 in 0..=8 - m1 - m2 - n1 {
                        let idx = FockIndex::new(m1, m2, n1, n2);
                        let a = hermite_at_origin(idx, &th);
                        let b = hermite_taylor_oracle(idx, &th).map_err(|e| e.to_string())?;
                        let scale = a.abs().max(b.abs());
                        if scale > 0.0 {
                            worst_rel = worst_rel.max((a - b).abs() / scale);
                        }
                    }
                }
            }
        }
    }
    let mut worst_corr: f64 = 0.0;
    for _ in 0..10 {
        let p = random_tmst(&mut rng, 1.0, 0.05, 0.8);
        let sf = tmst_covariance(&p);
        for m1 in 0..=4 {
            for m2 in 0..=4 {
                for n1 in 0..=4 {
                    for n2 in 0..=4 {
                        let idx = FockIndex::new(m1, m2, n1, n2);
                        let h = fock_from_hermite(&sf, idx).map_err(|e| e.to_string())?;
                        worst_corr = worst_corr.max((h - tmst_fock_element(&p, idx)).abs());
                    }
                }
            }
        }
    }
    let mut worst_det: f64 = 0.0;
    for _ in 0..100 {
        let p = random_tmst(&mut rng, 1.5, 0.0, 1.0);
        worst_det = worst_det.max(det_relation_check(&p));
    }
    ensure(
        worst_rel <= 1e-10 && worst_corr <= 1e-10 && worst_det < 1e-12,
        format!(
            "Taylor rel. dev. {worst_rel:.2e}, Fock correspondence {worst_corr:.2e}, det identity {worst_det:.2e}"
        ),
    )
}

fn werner() -> Check {
    let inv_sqrt3 = 1.0 / 3f64.sqrt();
    let pi = p_steer_type_i(5.0, 5.0).map_err(|e| e.to_string())?.value;
    let pii = p_steer_type_ii(5.0, 5.0).map_err(|e| e.to_string())?.value;
    let mut worst_g: f64 = 0.0;
    let mut hierarchy = true;
    for i in 0..20 {
        let s = 0.1 + 2.9 * i as f64 / 19.0;
        let g = p_steer_gaussian(s, s).map_err(|e| e.to_string())?.value;
        worst_g = worst_g.max((g - 1.0 / (1.0 + 1.0 / (2.0 * s).cosh()).sqrt()).abs());
        for j in 0..20 {
            let u = 0.1 + 2.9 * j as f64 / 19.0;
            let g = p_steer_gaussian(s, u).map_err(|e| e.to_string())?;
            let t = p_steer_type_i(s, u).map_err(|e| e.to_string())?;
            hierarchy &= g.raw.unwrap() > t.raw.unwrap();
        }
    }
    ensure(
        (pi - inv_sqrt3).abs() <= 1e-3 && (pii - inv_sqrt3).abs() <= 1e-3 && worst_g <= 1e-12 && hierarchy,
        format!(
            "p_i(5,5) = {pi:.6}, p_ii(5,5) = {pii:.6} (1/√3 ± 1e-3), p_G diagonal dev. {worst_g:.2e}, p_G > p_i on grid: {hierarchy}"
        ),
    )
}

fn type_i_consistency() -> Check {
    let mut rng = StdRng::seed_from_u64(9);
    let mut antisym = true;
    let mut worst_ratio: f64 = 0.0;
    for _ in 0..20 {
        let p = random_tmst(&mut rng, 1.0, 0.0, 0.8);
        let c = type_i_correlators(&p, 1e-10).map_err(|e| e.to_string())?;
        antisym &= c.correlators.yy() == -c.correlators.xx();
        let rho = truncated_tmst_density(&p, default_cutoff(&p, 1e-10)).map_err(|e| e.to_string())?;
        let dev = (c.correlators.zz() - rho.parity_sum()).abs();
        if dev > rho.tail_bound {
            return Err(format!("|zz - parity sum| = {dev:.2e} exceeds bound {:.2e}", rho.tail_bound));
        }
        worst_ratio = worst_ratio.max(dev / rho.tail_bound);
    }
    ensure(
        antisym,
        format!("yy = -xx exactly: {antisym}; max |zz - parity sum| / bound = {worst_ratio:.3}"),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check, Duration); 9] = [
        ("1 EPR moment values", epr_moments, Duration::from_secs(10)),
        ("2 Gaussian threshold", gaussian_threshold, Duration::from_secs(1)),
        ("3 type-i small-s limit", type_i_small_s, Duration::from_secs(120)),
        ("4 type-i crossover", crossover, Duration::from_secs(120)),
        ("5 type-ii no-go", nogo, Duration::from_secs(60)),
        ("6 Fock closed form vs oracle", fock_oracle, Duration::from_secs(120)),
        ("7 Hermite correspondence", hermite, Duration::from_secs(120)),
        ("8 Werner thresholds", werner, Duration::from_secs(1)),
        ("9 type-i symmetry and parity", type_i_consistency, Duration::from_secs(60)),
    ];
    let mut failed = 0;
    for (name, check, limit) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let (ok, msg) = match outcome {
            Ok(m) => (elapsed <= limit, m),
            Err(m) => (false, m),
        };
        let status = if ok { "PASS" } else { "FAIL" };
        println!(
            "criterion {name}: {status} [{:.3} s / {} s] {msg}",
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
        if !ok {
            failed += 1;
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
