//! One function per subcommand, each producing a [`Report`].

use std::f64::consts::PI;

use num_complex::Complex64;
use pbessel::asymptotics::fit_decay_slope;
use pbessel::fractional::{default_spec, verify_ek_int_j, verify_fractional_ode, verify_order_lower, verify_theorem12};
use pbessel::lattice::{
    LatticeBudget, count_lattice_points, hardy_partial_sum_p2, hardy_running_general,
};
use pbessel::pbessel_series::CutComplex;
use pbessel::router::{Route, evaluate, evaluate_complex};
use pbessel::{DistortedAngle, PExponent, Result as PResult, ValueWithError};
use rayon::prelude::*;
use serde_json::{Value, json};

use crate::config::{Command, RunConfig, Suite};
use crate::output::{Curve, Report, num};

pub fn run(cfg: &RunConfig) -> Result<Report, String> {
    match cfg.command {
        Command::Eval => Ok(eval(cfg)),
        Command::Compare => Ok(compare(cfg)),
        Command::Verify => Ok(verify(cfg)),
        Command::Asy => asy(cfg),
        Command::Lattice => Ok(lattice(cfg)),
        Command::Hardy => Ok(hardy(cfg)),
    }
}

fn or_default(v: &[f64], d: &[f64]) -> Vec<f64> {
    if v.is_empty() { d.to_vec() } else { v.to_vec() }
}

fn radii(cfg: &RunConfig, d: impl FnOnce() -> Vec<f64>) -> Vec<f64> {
    cfg.r_values.clone().unwrap_or_else(d)
}

#[derive(Clone, Copy)]
struct Point {
    p: PExponent,
    omega: f64,
    phi: f64,
    r: f64,
}

impl Point {
    fn label(&self) -> String {
        format!("p={} omega={} phi={} r={}", self.p, self.omega, self.phi, self.r)
    }
}

fn grid(cfg: &RunConfig, rs: &[f64]) -> Vec<Point> {
    let omegas = or_default(&cfg.omega_list, &[0.0]);
    let phis = or_default(&cfg.phi_list, &[0.0]);
    let mut out = Vec::new();
    for &p in &cfg.p_list {
        for &omega in &omegas {
            for &phi in &phis {
                for &r in rs {
                    out.push(Point { p, omega, phi, r });
                }
            }
        }
    }
    out
}

fn on_axis(a: &DistortedAngle) -> bool {
    a.cos_q == 0.0 || a.sin_q == 0.0
}

fn eval_point(pt: Point, route: Route, r_im: f64, tol: f64) -> PResult<ValueWithError<Complex64>> {
    let a = DistortedAngle::new(pt.p, pt.phi)?;
    if r_im != 0.0 {
        let z = CutComplex::new(Complex64::new(pt.r, r_im))?;
        return evaluate_complex(pt.p, pt.omega, &a, z, tol);
    }
    Ok(evaluate(route, pt.p, pt.omega, &a, pt.r, tol)?.map(|v| Complex64::new(v, 0.0)))
}

fn value_row(pt: Point, r_im: f64, v: &PResult<ValueWithError<Complex64>>, method_override: Option<&str>) -> Vec<String> {
    let (n, d) = pt.p.as_fraction();
    let (val, err, method) = match v {
        Ok(v) => (v.value, v.err_estimate, method_override.unwrap_or(v.method.as_str()).to_string()),
        Err(_) => (Complex64::new(f64::NAN, f64::NAN), f64::NAN, "error".to_string()),
    };
    vec![
        n.to_string(),
        d.to_string(),
        num(pt.omega),
        num(pt.phi),
        num(pt.r),
        num(r_im),
        num(val.re),
        num(val.im),
        num(err),
        method,
    ]
}

const VALUE_HEADER: [&str; 10] = ["p_num", "p_den", "omega", "phi", "r_re", "r_im", "value_re", "value_im", "err", "method"];

fn value_json(pt: Point, r_im: f64, v: &PResult<ValueWithError<Complex64>>, method: &str) -> Value {
    let (n, d) = pt.p.as_fraction();
    match v {
        Ok(v) => json!({
            "p_num": n, "p_den": d, "omega": pt.omega, "phi": pt.phi, "r_re": pt.r, "r_im": r_im,
            "value_re": v.value.re, "value_im": v.value.im, "err": v.err_estimate, "method": method,
            "reliable": v.reliable,
        }),
        Err(e) => json!({
            "p_num": n, "p_den": d, "omega": pt.omega, "phi": pt.phi, "r_re": pt.r, "r_im": r_im,
            "error": e.to_string(),
        }),
    }
}

/// Groups value rows into one curve per `(p, omega, phi)` and, for compare,
/// per method.
fn curves(points: &[(Point, String, f64)]) -> Vec<Curve> {
    let mut out: Vec<Curve> = Vec::new();
    for (pt, method, y) in points {
        let label = format!("p={} omega={} phi={:.4} {}", pt.p, pt.omega, pt.phi, method);
        match out.iter_mut().find(|c| c.label == label) {
            Some(c) => c.points.push((pt.r, *y)),
            None => out.push(Curve { label, points: vec![(pt.r, *y)] }),
        }
    }
    out
}

fn eval(cfg: &RunConfig) -> Report {
    let tol = cfg.tol.unwrap_or(1e-10);
    let pts = grid(cfg, &radii(cfg, || (0..=10).map(f64::from).collect()));
    let results: Vec<_> = pts.par_iter().map(|&pt| eval_point(pt, cfg.method, cfg.r_im, tol)).collect();
    let mut rep = Report { header: VALUE_HEADER.to_vec(), ..Default::default() };
    let mut js = Vec::new();
    let mut plotted = Vec::new();
    for (pt, v) in pts.iter().zip(&results) {
        rep.rows.push(value_row(*pt, cfg.r_im, v, None));
        match v {
            Ok(x) => {
                js.push(value_json(*pt, cfg.r_im, v, x.method.as_str()));
                plotted.push((*pt, x.method.as_str().to_string(), x.value.re));
                if !x.reliable {
                    rep.failures.push(format!("{}: flagged ({} err {:e})", pt.label(), x.method, x.err_estimate));
                }
            }
            Err(e) => {
                js.push(value_json(*pt, cfg.r_im, v, "error"));
                rep.failures.push(format!("{}: {e}", pt.label()));
            }
        }
    }
    for c in curves(&plotted) {
        let label = c.label.rsplit_once(' ').map_or(c.label.clone(), |x| x.0.to_string());
        rep.curves.push(Curve { label, ..c });
    }
    rep.json = Value::Array(js);
    rep
}

fn compare(cfg: &RunConfig) -> Report {
    let tol = cfg.tol.unwrap_or(1e-8);
    let pts = grid(cfg, &radii(cfg, || (0..=10).map(f64::from).collect()));
    let per_point: Vec<Vec<(Route, PResult<ValueWithError<Complex64>>)>> = pts
        .par_iter()
        .map(|&pt| {
            let axis = DistortedAngle::new(pt.p, pt.phi).map(|a| on_axis(&a)).unwrap_or(false);
            let mut routes = vec![Route::Series, Route::Thm13];
            if pt.p.q_odd() {
                routes.push(Route::Poisson);
            }
            if axis {
                routes.push(Route::Axis);
            }
            routes.into_iter().map(|route| (route, eval_point(pt, route, 0.0, tol))).collect()
        })
        .collect();
    let mut rep = Report { header: VALUE_HEADER.to_vec(), ..Default::default() };
    let mut js = Vec::new();
    let mut plotted = Vec::new();
    let mut worst = 0.0f64;
    for (pt, results) in pts.iter().zip(&per_point) {
        for (route, v) in results {
            let name = route.to_string();
            rep.rows.push(value_row(*pt, 0.0, v, Some(&name)));
            js.push(value_json(*pt, 0.0, v, &name));
            if let Ok(x) = v {
                plotted.push((*pt, name.clone(), x.value.re));
            }
        }
        let ok: Vec<_> = results.iter().filter_map(|(route, v)| v.as_ref().ok().filter(|x| x.reliable).map(|x| (route, x))).collect();
        for (i, (ra, a)) in ok.iter().enumerate() {
            for (rb, b) in &ok[i + 1..] {
                let d = (a.value - b.value).norm();
                worst = worst.max(d);
                if d > a.err_estimate + b.err_estimate + tol {
                    rep.failures.push(format!("{}: {ra} and {rb} differ by {d:e}", pt.label()));
                }
            }
        }
    }
    rep.curves = curves(&plotted);
    rep.json = Value::Array(js);
    rep.summary = Some(json!({ "command": "compare", "max_difference": worst, "tol": tol, "disagreements": rep.failures.len() }));
    rep
}

struct CheckRow {
    suite: Suite,
    pt: Point,
    gamma: Option<f64>,
    outcome: PResult<(f64, f64, f64, f64, bool, bool)>,
}

fn verify(cfg: &RunConfig) -> Report {
    let rs = radii(cfg, || vec![1.0, 3.0, 7.0]);
    let omegas = or_default(&cfg.omega_list, &[0.0, 1.0]);
    let phis = or_default(&cfg.phi_list, &[PI / 4.0]);
    let gammas = or_default(&cfg.gamma_list, &[0.25, 0.5, 0.75]);
    let spec = default_spec();
    let mut jobs = Vec::new();
    for &suite in cfg.suite.members() {
        for &p in &cfg.p_list {
            for &omega in &omegas {
                for &phi in &phis {
                    for &r in &rs {
                        let pt = Point { p, omega, phi, r };
                        match suite {
                            Suite::Theorem12 | Suite::EkInt => jobs.extend(gammas.iter().map(|&g| (suite, pt, Some(g)))),
                            _ => jobs.push((suite, pt, None)),
                        }
                    }
                }
            }
        }
    }
    let rows: Vec<CheckRow> = jobs
        .par_iter()
        .map(|&(suite, pt, gamma)| {
            let tol = cfg.tol.unwrap_or(suite.default_tol());
            let outcome = DistortedAngle::new(pt.p, pt.phi).and_then(|a| match suite {
                Suite::Theorem12 | Suite::EkInt | Suite::OrderLower => {
                    let c = match suite {
                        Suite::Theorem12 => verify_theorem12(pt.p, pt.omega, gamma.unwrap_or(0.5), &a, pt.r, &spec)?,
                        Suite::EkInt => verify_ek_int_j(pt.p, pt.omega, gamma.unwrap_or(0.5), &a, pt.r, &spec)?,
                        _ => verify_order_lower(pt.p, pt.omega, &a, pt.r, 1e-3)?,
                    };
                    Ok((c.lhs, c.rhs, c.residual, c.scale, c.reliable, c.passes(tol)))
                }
                _ => {
                    let c = verify_fractional_ode(pt.p, pt.omega, &a, pt.r, &spec)?;
                    Ok((c.derivative_term, -(c.drift_term + c.potential_term), c.residual.abs(), c.scale, c.reliable, c.passes(tol)))
                }
            });
            CheckRow { suite, pt, gamma, outcome }
        })
        .collect();
    let mut rep = Report {
        header: vec!["suite", "p_num", "p_den", "omega", "gamma", "phi", "r", "lhs", "rhs", "residual", "scale", "reliable", "pass"],
        ..Default::default()
    };
    let mut js = Vec::new();
    let mut tallies: Vec<(Suite, usize, usize)> = cfg.suite.members().iter().map(|&s| (s, 0, 0)).collect();
    for row in &rows {
        let (n, d) = row.pt.p.as_fraction();
        let g = row.gamma.map_or(String::new(), num);
        let (lhs, rhs, res, scale, reliable, pass) = match &row.outcome {
            Ok(t) => *t,
            Err(_) => (f64::NAN, f64::NAN, f64::NAN, f64::NAN, false, false),
        };
        rep.rows.push(vec![
            row.suite.name().to_string(),
            n.to_string(),
            d.to_string(),
            num(row.pt.omega),
            g,
            num(row.pt.phi),
            num(row.pt.r),
            num(lhs),
            num(rhs),
            num(res),
            num(scale),
            reliable.to_string(),
            pass.to_string(),
        ]);
        let mut obj = json!({
            "suite": row.suite.name(), "p_num": n, "p_den": d, "omega": row.pt.omega, "gamma": row.gamma,
            "phi": row.pt.phi, "r": row.pt.r, "lhs": lhs, "rhs": rhs, "residual": res, "scale": scale,
            "reliable": reliable, "pass": pass,
        });
        if let Err(e) = &row.outcome {
            obj["error"] = json!(e.to_string());
        }
        js.push(obj);
        let t = tallies.iter_mut().find(|t| t.0 == row.suite).expect("suite was tallied");
        t.1 += 1;
        if !pass {
            t.2 += 1;
            let why = match &row.outcome {
                Err(e) => e.to_string(),
                Ok(_) => format!("relative residual {:e}", res / scale),
            };
            rep.failures.push(format!("{} gamma={:?} {}: {why}", row.suite.name(), row.gamma, row.pt.label()));
        }
    }
    rep.json = Value::Array(js);
    let suites: Vec<Value> = tallies
        .iter()
        .map(|&(s, n, f)| json!({ "suite": s.name(), "tol": cfg.tol.unwrap_or(s.default_tol()), "checks": n, "failed": f, "pass": f == 0 }))
        .collect();
    rep.summary = Some(json!({ "command": "verify", "suites": suites, "pass": rep.failures.is_empty() }));
    rep
}

fn asy(cfg: &RunConfig) -> Result<Report, String> {
    let tol = cfg.tol.unwrap_or(1e-10);
    let rs = radii(cfg, || (0..=1920).map(|i| 20.0 + 0.25 * f64::from(i)).collect());
    let omegas = or_default(&cfg.omega_list, &[0.0]);
    let phis = or_default(&cfg.phi_list, &[0.0]);
    let mut rep = Report {
        header: vec!["p_num", "p_den", "omega", "phi", "slope", "intercept", "r_min", "r_max", "n_samples", "residual_rms"],
        ..Default::default()
    };
    let mut js = Vec::new();
    for &p in &cfg.p_list {
        for &omega in &omegas {
            for &phi in &phis {
                let a = DistortedAngle::new(p, phi).map_err(|e| e.to_string())?;
                let samples: Vec<PResult<(f64, f64)>> =
                    rs.par_iter().map(|&r| evaluate(cfg.method, p, omega, &a, r, tol).map(|v| (r, v.value))).collect();
                let pt = Point { p, omega, phi, r: f64::NAN };
                let (n, d) = p.as_fraction();
                let fit = samples.into_iter().collect::<PResult<Vec<_>>>().and_then(|s| fit_decay_slope(&s, cfg.fit_mode));
                match fit {
                    Ok(f) => {
                        rep.rows.push(vec![
                            n.to_string(),
                            d.to_string(),
                            num(omega),
                            num(phi),
                            num(f.slope),
                            num(f.intercept),
                            num(f.r_window.0),
                            num(f.r_window.1),
                            f.n_samples.to_string(),
                            num(f.residual_rms),
                        ]);
                        js.push(json!({
                            "p_num": n, "p_den": d, "omega": omega, "phi": phi, "slope": f.slope,
                            "intercept": f.intercept, "r_min": f.r_window.0, "r_max": f.r_window.1,
                            "n_samples": f.n_samples, "residual_rms": f.residual_rms,
                        }));
                    }
                    Err(e) => {
                        rep.failures.push(format!("p={} omega={} phi={}: {e}", pt.p, pt.omega, pt.phi));
                        js.push(json!({ "p_num": n, "p_den": d, "omega": omega, "phi": phi, "error": e.to_string() }));
                    }
                }
            }
        }
    }
    rep.json = Value::Array(js);
    Ok(rep)
}

fn lattice(cfg: &RunConfig) -> Report {
    let rs = radii(cfg, || vec![1.0]);
    let mut rep = Report {
        header: vec!["p_num", "p_den", "r", "count", "area_term", "discrepancy", "boundary_points"],
        ..Default::default()
    };
    let mut js = Vec::new();
    for &p in &cfg.p_list {
        let (n, d) = p.as_fraction();
        for &r in &rs {
            match count_lattice_points(p, r) {
                Ok(rp) => {
                    let pts: Vec<String> = rp.boundary_points.iter().map(|(a, b)| format!("{a}:{b}")).collect();
                    rep.rows.push(vec![
                        n.to_string(),
                        d.to_string(),
                        num(r),
                        rp.count.to_string(),
                        num(rp.area_term),
                        num(rp.discrepancy),
                        pts.join(";"),
                    ]);
                    js.push(json!({
                        "p_num": n, "p_den": d, "r": r, "count": rp.count, "area_term": rp.area_term,
                        "discrepancy": rp.discrepancy, "boundary_points": rp.boundary_points,
                    }));
                }
                Err(e) => {
                    rep.failures.push(format!("p={p} r={r}: {e}"));
                    js.push(json!({ "p_num": n, "p_den": d, "r": r, "error": e.to_string() }));
                }
            }
        }
    }
    rep.json = Value::Array(js);
    rep
}

fn hardy(cfg: &RunConfig) -> Report {
    let rs = radii(cfg, || vec![2.5]);
    let mut rep = Report {
        header: vec!["p_num", "p_den", "r", "cutoff", "partial_sum", "discrepancy", "deviation"],
        ..Default::default()
    };
    let mut js = Vec::new();
    for &p in &cfg.p_list {
        let (n, d) = p.as_fraction();
        let cutoff = cfg.cutoff.unwrap_or(if p.q() == 1 { 1e4 } else { 100.0 });
        for &r in &rs {
            let out = count_lattice_points(p, r).and_then(|c| {
                let s = if p.q() == 1 {
                    hardy_partial_sum_p2(r, cutoff.floor() as usize)?
                } else {
                    hardy_running_general(p, r, cutoff, &LatticeBudget::default())?.last().map_or(0.0, |x| x.1)
                };
                Ok((s, c.discrepancy))
            });
            match out {
                Ok((s, pd)) => {
                    rep.rows.push(vec![n.to_string(), d.to_string(), num(r), num(cutoff), num(s), num(pd), num(s - pd)]);
                    js.push(json!({
                        "p_num": n, "p_den": d, "r": r, "cutoff": cutoff, "partial_sum": s,
                        "discrepancy": pd, "deviation": s - pd,
                    }));
                }
                Err(e) => {
                    rep.failures.push(format!("p={p} r={r} cutoff={cutoff}: {e}"));
                    js.push(json!({ "p_num": n, "p_den": d, "r": r, "cutoff": cutoff, "error": e.to_string() }));
                }
            }
        }
    }
    rep.json = Value::Array(js);
    rep
}
