//! Acceptance gate. Each test prints one `criterion N: PASS|FAIL` line to
//! stderr (bypassing the harness capture) and then asserts.

use std::f64::consts::PI;
use std::io::Write;
use std::time::Instant;

use num_complex::Complex64;
use pbessel::asymptotics::{FitMode, axis_asymptotic, fit_decay_slope, linear_grid};
use pbessel::fractional::{
    EKParams, default_spec, derivative_dual_path, eta_raise, eta_theorem12, integral_dual_path, verify_ek_int_j,
    verify_fractional_ode, verify_order_lower, verify_theorem12,
};
use pbessel::lattice::{
    LatticeBudget, SpotCheckConfig, angles_on_circle, area_term, count_lattice_points, decade_max_deviation,
    discrepancy_lhs, generalized_discrepancy_spotcheck, hardy_partial_sum_general, hardy_partial_sum_p2,
    hardy_running_general, hardy_running_p2, non_increasing, r_function,
};
use pbessel::pbessel_series::{
    CutComplex, Order, p_cosine, p_sine, pbessel_complex, pbessel_inv_p, pbessel_neg_inv_p, pbessel_series,
};
use pbessel::router::{Route, evaluate, method_router};
use pbessel::special_core::classical_bessel_j;
use pbessel::{DistortedAngle, PExponent};

fn pe(q: u32) -> PExponent {
    PExponent::from_q(q).unwrap()
}

fn ang(p: PExponent, phi: f64) -> DistortedAngle {
    DistortedAngle::new(p, phi).unwrap()
}

fn report(n: u32, pass: bool, detail: &str) {
    let line = format!("criterion {n}: {} {detail}\n", if pass { "PASS" } else { "FAIL" });
    let _ = std::io::stderr().write_all(line.as_bytes());
}

/// Collects named sub-checks and reports them as one line.
struct Gate {
    n: u32,
    start: Instant,
    notes: Vec<String>,
    failed: Vec<String>,
}

impl Gate {
    fn new(n: u32) -> Self {
        Self { n, start: Instant::now(), notes: Vec::new(), failed: Vec::new() }
    }

    fn check(&mut self, name: &str, ok: bool, detail: String) {
        let note = format!("{name} [{detail}]");
        if !ok {
            self.failed.push(note.clone());
        }
        self.notes.push(note);
    }

    fn finish(self) {
        let secs = self.start.elapsed().as_secs_f64();
        let pass = self.failed.is_empty();
        let shown = if pass { &self.notes } else { &self.failed };
        report(self.n, pass, &format!("({secs:.1}s) {}", shown.join("; ")));
        assert!(pass, "criterion {} failed: {:?}", self.n, self.failed);
    }
}

const PHIS: [f64; 4] = [0.0, PI / 6.0, PI / 4.0, PI / 2.0];

#[test]
fn criterion_1_p2_reduction() {
    let mut g = Gate::new(1);
    let p = pe(1);
    let mut worst = 0.0f64;
    for omega in [0.0, 0.5, 1.0, 2.0, 3.0] {
        for phi in PHIS {
            for r in linear_grid(0.0, 30.0, 0.25) {
                let v = method_router(p, omega, &ang(p, phi), r, 1e-12).unwrap();
                worst = worst.max((v.value - classical_bessel_j(omega, r)).abs());
            }
        }
    }
    g.check("max |J^[2] - J|", worst <= 1e-10, format!("{worst:.2e} <= 1e-10"));
    let t = g.start.elapsed().as_secs_f64();
    g.check("runtime", t < 10.0, format!("{t:.1}s < 10s"));
    g.finish();
}

#[test]
fn criterion_2_three_representations() {
    let mut g = Gate::new(2);
    let mut worst = [0.0f64; 3];
    let mut bad = Vec::new();
    for q in [3, 4] {
        let p = pe(q);
        for omega in [0.0, 1.0, 2.0] {
            for phi in PHIS {
                let a = ang(p, phi);
                for r in [0.5, 1.0, 2.0, 5.0, 10.0, 20.0] {
                    let s = pbessel_series(p, omega, &a, r, 1e-12).unwrap();
                    let t = evaluate(Route::Thm13, p, omega, &a, r, 1e-11).unwrap();
                    if !s.reliable || !t.reliable {
                        bad.push(format!("q={q} w={omega} phi={phi:.3} r={r} flagged"));
                    }
                    worst[0] = worst[0].max((s.value - t.value).abs());
                    if p.q_odd() {
                        let m = evaluate(Route::Poisson, p, omega, &a, r, 1e-11).unwrap();
                        if !m.reliable {
                            bad.push(format!("q={q} w={omega} phi={phi:.3} r={r} poisson flagged"));
                        }
                        worst[1] = worst[1].max((s.value - m.value).abs());
                        worst[2] = worst[2].max((t.value - m.value).abs());
                    }
                }
            }
        }
    }
    g.check("series vs double integral", worst[0] <= 1e-7, format!("{:.2e}", worst[0]));
    g.check("series vs Poisson", worst[1] <= 1e-7, format!("{:.2e}", worst[1]));
    g.check("double integral vs Poisson", worst[2] <= 1e-7, format!("{:.2e}", worst[2]));
    g.check("no flagged values", bad.is_empty(), format!("{bad:?}"));
    let t = g.start.elapsed().as_secs_f64();
    g.check("runtime", t < 120.0, format!("{t:.1}s < 120s"));
    g.finish();
}

#[test]
fn criterion_3_operator_identities() {
    let mut g = Gate::new(3);
    let spec = default_spec();
    let ps = [pe(1), pe(2), pe(3)];
    let (mut w12, mut wint, mut wlow) = (0.0f64, 0.0f64, 0.0f64);
    for p in ps {
        for omega in [0.0, 1.0] {
            let a = ang(p, PI / 4.0);
            for r in [1.0, 3.0, 7.0] {
                for gamma in [0.25, 0.5, 0.75] {
                    w12 = w12.max(verify_theorem12(p, omega, gamma, &a, r, &spec).unwrap().relative());
                    wint = wint.max(verify_ek_int_j(p, omega, gamma, &a, r, &spec).unwrap().relative());
                }
                wlow = wlow.max(verify_order_lower(p, omega, &a, r, 1e-3).unwrap().relative());
            }
        }
    }
    g.check("fractional derivative identity", w12 <= 1e-6, format!("{w12:.2e} <= 1e-6"));
    g.check("fractional integral identity", wint <= 1e-7, format!("{wint:.2e} <= 1e-7"));
    g.check("order-lowering derivative", wlow <= 1e-7, format!("{wlow:.2e} <= 1e-7"));
    let samples = [(1, 0.0, 0.3, 1.0), (2, 1.0, 0.7, 2.0), (3, 0.0, PI / 4.0, 1.5), (3, 1.0, 0.2, 3.0), (4, 2.0, 1.1, 2.5), (2, 0.5, PI / 2.0, 4.0)];
    let mut wode = 0.0f64;
    for (q, omega, phi, r) in samples {
        let c = verify_fractional_ode(pe(q), omega, &ang(pe(q), phi), r, &spec).unwrap();
        wode = wode.max(c.residual.abs() / c.scale);
    }
    g.check("fractional ODE", wode <= 1e-4, format!("{wode:.2e} <= 1e-4 of term scale"));
    g.finish();
}

#[test]
fn criterion_4_operator_dual_paths() {
    let mut g = Gate::new(4);
    let spec = default_spec();
    let mut worst = 0.0f64;
    let mut n = 0;
    let configs = [
        (1, 0.0, 0.5, 0.3, 1.0),
        (1, 1.0, 0.25, 1.0, 2.5),
        (2, 0.0, 0.75, 0.0, 1.5),
        (2, 2.0, 0.5, 0.8, 3.0),
        (3, 0.0, 0.5, PI / 4.0, 2.0),
        (3, 1.0, 0.3, PI / 2.0, 4.0),
        (3, 0.5, 0.9, 0.4, 1.2),
        (4, 1.0, 0.6, 1.2, 2.0),
        (4, 0.0, 0.2, PI / 6.0, 5.0),
        (5, 1.5, 0.4, 0.7, 1.8),
    ];
    for (q, omega, gamma, phi, r) in configs {
        let p = pe(q);
        let a = ang(p, phi);
        let ip = EKParams::new(p, gamma, eta_raise(p, omega)).unwrap();
        let (x, y) = integral_dual_path(p, omega, ip, &a, r, &spec).unwrap();
        worst = worst.max((x - y).abs() / y.abs().max(1.0));
        let dp = EKParams::new(p, gamma, eta_theorem12(p, omega, gamma)).unwrap();
        let (x, y) = derivative_dual_path(p, omega + gamma, dp, &a, r, &spec).unwrap();
        worst = worst.max((x - y).abs() / y.abs().max(1.0));
        n += 2;
    }
    g.check("quadrature vs term-wise", worst <= 1e-8, format!("{n} configurations, worst {worst:.2e} <= 1e-8"));
    g.finish();
}

fn decay(p: PExponent, omega: f64, phi: f64) -> f64 {
    let a = ang(p, phi);
    let samples: Vec<(f64, f64)> = linear_grid(20.0, 500.0, 0.25)
        .into_iter()
        .map(|r| (r, method_router(p, omega, &a, r, 1e-10).unwrap().value))
        .collect();
    fit_decay_slope(&samples, FitMode::Envelope).unwrap().slope
}

#[test]
fn criterion_5_asymptotic_exponents() {
    let mut g = Gate::new(5);
    let p = pe(3);
    let off = decay(p, 0.0, PI / 4.0);
    g.check("off-axis slope", (off + 0.5).abs() <= 0.05, format!("{off:.3} vs -0.5 +- 0.05"));
    for omega in [0.0, 1.0] {
        let axis = decay(p, omega, PI / 2.0);
        g.check(&format!("axis slope omega={omega}"), (axis + 1.0 / 3.0).abs() <= 0.05, format!("{axis:.3} vs -1/3 +- 0.05"));
        g.check(&format!("slope gap omega={omega}"), axis - off >= 0.1, format!("{:.3} >= 0.1", axis - off));
        let v = method_router(p, omega, &ang(p, PI / 2.0), 500.0, 1e-10).unwrap().value;
        let lead = axis_asymptotic(p, omega, 500.0).unwrap();
        let rel = (v - lead).abs() / lead.abs();
        g.check(&format!("axis constant omega={omega}"), rel <= 0.1, format!("J = {v:.4e}, leading term {lead:.4e}, rel {rel:.2}"));
    }
    let t = g.start.elapsed().as_secs_f64();
    g.check("runtime", t < 300.0, format!("{t:.1}s < 300s"));
    g.finish();
}

#[test]
fn criterion_6_lattice_oracles() {
    let mut g = Gate::new(6);
    let counts = [
        count_lattice_points(pe(1), 2.0).unwrap().count,
        count_lattice_points(pe(2), 1.0).unwrap().count,
        count_lattice_points(pe(3), 1.0).unwrap().count,
    ];
    g.check("counts", counts == [13, 5, 5], format!("{counts:?}"));
    let areas = [area_term(pe(1), 1.0).unwrap(), area_term(pe(2), 1.0).unwrap(), area_term(pe(3), 1.0).unwrap()];
    let want = [PI, 2.0, 3.0 * PI / 8.0];
    let aerr = areas.iter().zip(want).map(|(a, w)| (a - w).abs()).fold(0.0, f64::max);
    g.check("areas", aerr <= 1e-12, format!("{aerr:.1e}"));
    let set = |s: f64| angles_on_circle(pe(1), s).unwrap().entries.iter().map(|e| (e.phi, e.point)).collect::<Vec<_>>();
    let s1 = set(1.0);
    let s2 = set(2.0);
    let ok1 = s1.iter().map(|e| e.1).collect::<Vec<_>>() == [(1, 0), (0, 1), (-1, 0), (0, -1)]
        && s1.iter().zip([0.0, 0.5, 1.0, 1.5]).all(|(e, k)| (e.0 - k * PI).abs() < 1e-15);
    let ok2 = s2.iter().map(|e| e.1).collect::<Vec<_>>() == [(1, 1), (-1, 1), (-1, -1), (1, -1)]
        && s2.iter().zip([1.0, 3.0, 5.0, 7.0]).all(|(e, k)| (e.0 - k * PI / 4.0).abs() < 1e-15);
    let ok3 = set(3.0).is_empty();
    g.check("angle sets", ok1 && ok2 && ok3, format!("s=1 {ok1}, s=2 {ok2}, s=3 empty {ok3}"));
    let table = r_function(10_000);
    let brute = |k: usize| -> u32 {
        let mut c = 0;
        let m = (k as f64).sqrt() as i64 + 1;
        for a in -m..=m {
            let rest = k as i64 - a * a;
            if rest < 0 {
                continue;
            }
            let b = (rest as f64).sqrt().round() as i64;
            if b * b == rest {
                c += if b == 0 { 1 } else { 2 };
            }
        }
        c
    };
    let mismatches = (0..=10_000).filter(|&k| table.get(k) != Some(brute(k))).count();
    g.check("R(k) table to 1e4", mismatches == 0, format!("{mismatches} mismatches"));
    g.finish();
}

#[test]
fn criterion_7_hardy_partial_sums() {
    let mut g = Gate::new(7);
    let p2 = pe(1);
    for r in [0.5, 2.5] {
        let target = count_lattice_points(p2, r).unwrap().discrepancy;
        let dev = (hardy_partial_sum_p2(r, 10_000).unwrap() - target).abs();
        g.check(&format!("p=2 r={r} K=1e4"), dev <= 0.15, format!("{dev:.3e} <= 0.15"));
        let run: Vec<(f64, f64)> =
            hardy_running_p2(r, 100_000).unwrap().into_iter().enumerate().map(|(i, v)| ((i + 1) as f64, v)).collect();
        let bins = decade_max_deviation(&run, target, 1e5);
        g.check(&format!("p=2 r={r} decades"), non_increasing(&bins), format!("{}", fmt_bins(&bins)));
    }
    let mut collapse = 0.0f64;
    for r in [0.5, 1.3, 2.5] {
        let a = hardy_partial_sum_general(p2, r, 1000.0).unwrap();
        let b = hardy_partial_sum_p2(r, 1000).unwrap();
        collapse = collapse.max((a - b).abs());
    }
    g.check("p=2 collapse", collapse <= 1e-9, format!("{collapse:.1e} <= 1e-9"));
    for q in [2, 3] {
        let p = pe(q);
        for r in [1.3, 2.7] {
            let target = count_lattice_points(p, r).unwrap().discrepancy;
            match hardy_running_general(p, r, 1000.0, &LatticeBudget::default()) {
                Ok(run) => {
                    let bins = decade_max_deviation(&run, target, 1e3);
                    g.check(&format!("p={p} r={r} decades"), non_increasing(&bins), fmt_bins(&bins));
                }
                Err(e) => g.check(&format!("p={p} r={r} decades"), false, e.to_string()),
            }
        }
    }
    let t = g.start.elapsed().as_secs_f64();
    g.check("runtime", t < 600.0, format!("{t:.1}s < 600s"));
    g.finish();
}

fn fmt_bins(b: &[f64]) -> String {
    b.iter().map(|x| format!("{x:.3}")).collect::<Vec<_>>().join(" ")
}

#[test]
fn criterion_8_complex_extension() {
    let mut g = Gate::new(8);
    let mut worst = 0.0f64;
    for q in [3, 4] {
        let p = pe(q);
        for omega in [0.0, 1.0, 2.5] {
            for phi in [0.3, PI / 4.0] {
                let a = ang(p, phi);
                for r in linear_grid(0.5, 30.0, 0.5) {
                    let real = pbessel_series(p, omega, &a, r, 1e-15).unwrap().value;
                    let z = CutComplex::new(Complex64::new(r, 0.0)).unwrap();
                    let cx = pbessel_complex(p, Order::new(omega).unwrap(), &a, z, 1e-15).unwrap().value;
                    worst = worst.max((cx - real).norm() / real.abs().max(1.0));
                }
            }
        }
    }
    g.check("restriction", worst <= 1e-12, format!("{worst:.1e} <= 1e-12"));
    let p = pe(3);
    let a = ang(p, 0.6);
    let mut cauchy = 0.0f64;
    for (z0, omega) in [
        (Complex64::new(2.0, 2.0), 0.0),
        (Complex64::new(2.0, 2.0), 0.5),
        (Complex64::new(-1.0, 1.5), 1.0),
        (Complex64::new(0.5, -1.0), 0.5),
        (Complex64::new(-2.0, -1.0), 1.5),
    ] {
        let f = |z: Complex64| pbessel_complex(p, Order::new(omega).unwrap(), &a, CutComplex::new(z).unwrap(), 1e-15).unwrap().value;
        let mean = (0..32).map(|j| f(z0 + Complex64::from_polar(0.5, 2.0 * PI * j as f64 / 32.0))).sum::<Complex64>() / 32.0;
        let c = f(z0);
        cauchy = cauchy.max((mean - c).norm() / c.norm().max(1.0));
    }
    g.check("mean value", cauchy <= 1e-8, format!("{cauchy:.1e} <= 1e-8"));
    let p2 = pe(1);
    let a2 = ang(p2, 0.9);
    let mut trig = 0.0f64;
    for re in linear_grid(-5.0, 5.0, 0.5) {
        for im in linear_grid(-5.0, 5.0, 0.5) {
            let z = Complex64::new(re, im);
            if z.norm() > 5.0 {
                continue;
            }
            let c = p_cosine(p2, &a2, z, 1e-15).unwrap().value;
            let s = p_sine(p2, &a2, z, 1e-15).unwrap().value;
            trig = trig.max((c - z.cos()).norm() / z.cos().norm().max(1.0));
            trig = trig.max((s - z.sin()).norm() / z.sin().norm().max(1.0));
        }
    }
    g.check("p=2 cosine/sine", trig <= 1e-12, format!("{trig:.1e} <= 1e-12"));
    let mut red = 0.0f64;
    for q in [1, 3, 5] {
        let p = pe(q);
        let a = ang(p, PI / 3.0);
        for z in [Complex64::new(1.7, 0.0), Complex64::new(0.8, 1.1), Complex64::new(-2.0, 0.6), Complex64::new(3.0, -1.0)] {
            let z = CutComplex::new(z).unwrap();
            let d = pbessel_complex(p, Order::neg_inv_p(p), &a, z, 1e-15).unwrap().value;
            let v = pbessel_neg_inv_p(p, &a, z, 1e-15).unwrap().value;
            red = red.max((d - v).norm() / v.norm().max(1.0));
            let d = pbessel_complex(p, Order::new(0.5 * p.qf()).unwrap(), &a, z, 1e-15).unwrap().value;
            let v = pbessel_inv_p(p, &a, z, 1e-15).unwrap().value;
            red = red.max((d - v).norm() / v.norm().max(1.0));
        }
    }
    g.check("order +-1/p reductions", red <= 1e-10, format!("{red:.1e} <= 1e-10"));
    g.finish();
}

#[test]
fn criterion_9_generalized_discrepancy() {
    let mut g = Gate::new(9);
    let p = pe(1);
    let cfg = SpotCheckConfig::default();
    let (lhs, rhs) = generalized_discrepancy_spotcheck(p, 1.0, 2.5, (0.0, 0.0), 40.0, &cfg).unwrap();
    let rel = (lhs - rhs).norm() / lhs.norm();
    g.check("beta=1 spot check", rel <= 0.05, format!("lhs {:.6}, rhs {:.6}, rel {rel:.1e}", lhs.re, rhs.re));
    let l0 = discrepancy_lhs(p, 0.0, 2.5, (0.0, 0.0), &cfg.quad).unwrap();
    let p2 = count_lattice_points(p, 2.5f64.sqrt()).unwrap().discrepancy;
    let d = (l0 - Complex64::new(p2, 0.0)).norm();
    g.check("beta=0 equals P_2", d <= 1e-12, format!("|diff| {d:.1e}"));
    g.finish();
}
