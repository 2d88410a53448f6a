//! Invariant suites behind `t4flow verify`.
//!
//! Each check produces one machine-readable line
//! `check,<suite>,<name>,PASS|FAIL,<detail>`. Lines starting with `info`
//! carry context and never affect the exit status.

use std::f64::consts::PI;

use t4flow_core::dynamics::{
    duffing_energy, field_x_eps, hypothesis_check, oscillator_field, separatrix_duffing, Branch, PhasePoint4,
    Potential, SechSquared, SeparatrixCoords, VariationalSolution,
};
use t4flow_core::integrators::{locate_zeros, rk4_integrate, StepperConfig};
use t4flow_core::lie_poisson::{
    casimirs, chart_from_canonical, chart_to_canonical, euler_field, lie_bracket, poisson_bracket, reduce_params,
    AlgebraVector, Basis, ChartPoint, CoadjointPoint, DiagonalMetric, OrbitId,
};
use t4flow_core::melnikov::{
    melnikov_full_line, melnikov_legendre_substitution, melnikov_limit, melnikov_m, melnikov_quadrature,
    phase_angle, verify_splitting, Diagnostics, PhaseConfig,
};
use t4flow_core::{Error as CoreError, Result as CoreResult};

use crate::args::Suite;
use crate::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub enum Line {
    Check { suite: &'static str, name: &'static str, passed: bool, detail: String },
    Info { suite: &'static str, name: &'static str, detail: String },
}

impl Line {
    fn render(&self) -> String {
        match self {
            Line::Check { suite, name, passed, detail } => {
                format!("check,{suite},{name},{},{detail}", if *passed { "PASS" } else { "FAIL" })
            }
            Line::Info { suite, name, detail } => format!("info,{suite},{name},,{detail}"),
        }
    }
}

struct Recorder {
    suite: &'static str,
    lines: Vec<Line>,
}

impl Recorder {
    fn new(suite: &'static str) -> Self {
        Recorder { suite, lines: Vec::new() }
    }

    fn check(&mut self, name: &'static str, passed: bool, detail: impl Into<String>) {
        self.lines.push(Line::Check { suite: self.suite, name, passed, detail: detail.into() });
    }

    // Numerical errors inside a check count as a failure of that check.
    fn check_with(&mut self, name: &'static str, f: impl FnOnce() -> CoreResult<(bool, String)>) {
        match f() {
            Ok((passed, detail)) => self.check(name, passed, detail),
            Err(e) => self.check(name, false, format!("error: {e}")),
        }
    }

    fn info(&mut self, name: &'static str, detail: impl Into<String>) {
        self.lines.push(Line::Info { suite: self.suite, name, detail: detail.into() });
    }
}

pub fn run_suite(suite: Suite) -> Vec<Line> {
    match suite {
        Suite::Poisson => poisson(),
        Suite::Separatrix => separatrix(),
        Suite::Variational => variational(),
        Suite::Melnikov => melnikov(),
        Suite::Splitting => splitting(),
        Suite::All => [poisson(), separatrix(), variational(), melnikov(), splitting()].concat(),
    }
}

/// Render the lines plus a summary; `Err(Verification)` if any check failed.
pub fn report(lines: &[Line]) -> (String, CliResult<()>) {
    let mut out = String::new();
    let (mut total, mut failed) = (0, 0);
    for l in lines {
        out.push_str(&l.render());
        out.push('\n');
        if let Line::Check { passed, .. } = l {
            total += 1;
            failed += usize::from(!passed);
        }
    }
    out.push_str(&format!("summary,{},{},{}\n", total - failed, failed, total));
    let status = if failed == 0 { Ok(()) } else { Err(CliError::Verification { failed, total }) };
    (out, status)
}

pub const EULER_START: [f64; 6] = [0.3, -0.7, 1.0, 0.5, 0.8, -0.4];

/// Max |ΔK1|, |ΔK2|, |ΔH| along an RK4 Euler flow.
pub fn euler_drift(metric: &DiagonalMetric, p0: [f64; 6], h: f64, horizon: f64) -> CoreResult<[f64; 3]> {
    let field = |_t: f64, y: &[f64; 6]| euler_field(metric, &CoadjointPoint::from_array(*y));
    let traj = rk4_integrate(0.0, p0, field, |_, _| 0.0, &StepperConfig::rk4(h, horizon))?;
    let inv = |y: &[f64; 6]| {
        let p = CoadjointPoint::from_array(*y);
        let k = casimirs(&p);
        [k.k1, k.k2, metric.energy(&p)]
    };
    let start = inv(&p0);
    let mut d = [0.0f64; 3];
    for y in &traj.states {
        let v = inv(y);
        for i in 0..3 {
            d[i] = d[i].max((v[i] - start[i]).abs());
        }
    }
    Ok(d)
}

fn poisson() -> Vec<Line> {
    let mut r = Recorder::new("poisson");

    let mut worst = 0.0f64;
    for a in Basis::ALL {
        for b in Basis::ALL {
            let (ua, ub) = (a.unit(), b.unit());
            let (ab, ba) = (lie_bracket(&ua, &ub), lie_bracket(&ub, &ua));
            worst = ab.iter().zip(ba).fold(worst, |w, (x, y)| w.max((x + y).abs()));
            for c in Basis::ALL {
                let uc = c.unit();
                let j1 = lie_bracket(&ua, &lie_bracket(&ub, &uc));
                let j2 = lie_bracket(&ub, &lie_bracket(&uc, &ua));
                let j3 = lie_bracket(&uc, &lie_bracket(&ua, &ub));
                for i in 0..6 {
                    worst = worst.max((j1[i] + j2[i] + j3[i]).abs());
                }
            }
        }
    }
    r.check("jacobi_basis_triples", worst == 0.0, format!("216 triples max residual {worst}"));

    for (name, metric) in [
        ("euler_drift_riemannian", DiagonalMetric::riemannian()),
        ("euler_drift_general", DiagonalMetric::new(1.5, 0.8, 0.3, 2.0, 0.6, 1.125).expect("compatible")),
    ] {
        r.check_with(name, || {
            let d = euler_drift(&metric, EULER_START, 1e-3, 100.0)?;
            let ok = d.iter().all(|v| *v <= 1e-8);
            Ok((ok, format!("T=100 h=1e-3 K1 {:e} K2 {:e} H {:e}", d[0], d[1], d[2])))
        });
    }

    r.check_with("chart_roundtrip", || {
        let mut worst = 0.0f64;
        for (i, k) in [OrbitId::new(1.0, 1.0), OrbitId::new(-0.7, 2.5), OrbitId::new(3.0, -0.2)].into_iter().enumerate() {
            for s in [[0.1, -0.3, 0.7, 1.9], [-2.0, 0.5, 0.0, -1.1], [4.0, 3.0, -2.5, 0.25]] {
                let (l, m) = (1.0 + 0.3 * i as f64, 0.8 + 0.5 * i as f64);
                let q = ChartPoint::from_rotated(s, l, m);
                let back = chart_to_canonical(&chart_from_canonical(&q, k)?, k, l, m)?.rotated();
                for j in 0..4 {
                    worst = worst.max((back[j] - s[j]).abs() / (1.0 + s[j].abs()));
                }
            }
        }
        Ok((worst <= 1e-12, format!("max relative error {worst:e}")))
    });

    r.check_with("chart_canonical_brackets", || {
        let (k, l, m) = (OrbitId::new(1.7, -0.6), 1.3, 0.8);
        let p = chart_from_canonical(&ChartPoint { q1: 0.2, p1: -1.1, q2: 0.7, p2: 0.4, lambda: l, mu: m }, k)?;
        let coord = |i: usize, p: &CoadjointPoint| {
            let c = [-l * p.px, p.pu / (k.k1 * l), m * p.pv, p.pz / (k.k1 * m)];
            c[i]
        };
        let grads: Vec<AlgebraVector> = (0..4)
            .map(|i| {
                std::array::from_fn(|j| {
                    let (mut up, mut dn) = (p.to_array(), p.to_array());
                    up[j] += 1e-6;
                    dn[j] -= 1e-6;
                    (coord(i, &CoadjointPoint::from_array(up)) - coord(i, &CoadjointPoint::from_array(dn))) / 2e-6
                })
            })
            .collect();
        let expected = [[0.0, 1.0, 0.0, 0.0], [-1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 1.0], [0.0, 0.0, -1.0, 0.0]];
        let mut worst = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((poisson_bracket(&grads[i], &grads[j], &p) - expected[i][j]).abs());
            }
        }
        Ok((worst <= 1e-6, format!("max bracket error {worst:e}")))
    });

    r.check_with("reduce_subriemannian_alpha", || {
        let a = reduce_params(&DiagonalMetric::subriemannian(), OrbitId::new(1.0, 1.0))?.alpha;
        Ok((a == 1.0, format!("alpha {a}")))
    });
    r.check_with("reduce_riemannian_alpha", || {
        let a = reduce_params(&DiagonalMetric::riemannian(), OrbitId::new(1.0, 1.0))?.alpha;
        Ok(((a - 3f64.sqrt()).abs() <= 1e-12, format!("alpha {a}")))
    });
    let incompatible = DiagonalMetric::new(1.0, 1.0, 1.0, 1.0, 2.0, 1.0);
    r.check(
        "reduce_incompatible_metric",
        matches!(incompatible, Err(CoreError::IncompatibleMetric { .. })),
        "a13 a34 = 1 vs a12 a24 = 2",
    );
    r.lines
}

fn separatrix() -> Vec<Line> {
    let mut r = Recorder::new("separatrix");
    let mut worst = 0.0f64;
    for branch in [Branch::Positive, Branch::Negative] {
        for i in -400..=400 {
            let (bx, x) = separatrix_duffing(branch, i as f64 * 0.05);
            worst = worst.max((duffing_energy(&PhasePoint4::new(bx, x, 0.0, 0.0)) - 0.25).abs());
        }
    }
    r.check("energy_quarter_analytic", worst <= 1e-10, format!("t in [-20 20] max |h - 1/4| {worst:e}"));

    r.check_with("energy_quarter_flow", || {
        let (bx, x) = separatrix_duffing(Branch::Positive, -10.0);
        let field = |_t: f64, y: &[f64; 4]| field_x_eps(&PhasePoint4::from_array(*y), 1.0, 0.0).to_array();
        let traj = rk4_integrate(
            -10.0,
            [bx, x, 0.3, -0.2],
            field,
            |_, y| duffing_energy(&PhasePoint4::from_array(*y)),
            &StepperConfig::rk4(1e-3, 20.0),
        )?;
        let dev = (traj.drift.max - 0.25).abs().max((traj.drift.min - 0.25).abs());
        Ok((dev <= 1e-6, format!("RK4 h=1e-3 t in [-10 10] max |h - 1/4| {dev:e}")))
    });

    r.check_with("invariant_plane", || {
        let field = |_t: f64, y: &[f64; 4]| field_x_eps(&PhasePoint4::from_array(*y), 1.0, 0.05).to_array();
        let traj = rk4_integrate(0.0, [0.0, 0.0, 0.4, -0.1], field, |_, y| y[0].abs() + y[1].abs(), &StepperConfig::rk4(1e-3, 30.0))?;
        Ok((traj.drift.max == 0.0, format!("max |X| + |x| {}", traj.drift.max)))
    });
    r.lines
}

fn variational() -> Vec<Line> {
    let mut r = Recorder::new("variational");
    r.check_with("parity_and_wronskian", || {
        let v = VariationalSolution::new(1.0, SechSquared::CANONICAL, 1e-3, 35.0)?;
        let (mut parity, mut wr) = (0.0f64, 0.0f64);
        let samples: Vec<_> = v.grid().collect();
        let n = samples.len();
        for i in 0..n {
            let (_, a) = samples[i];
            let (_, b) = samples[n - 1 - i];
            parity = parity.max((a.y0 - b.y0).abs()).max((a.y1 + b.y1).abs());
            wr = wr.max((a.wronskian() - 1.0).abs());
        }
        Ok((parity <= 1e-8 && wr <= 1e-8, format!("parity {parity:e} wronskian {wr:e}")))
    });

    for (name, alpha) in [("sturm_spacing_alpha_1", 1.0), ("sturm_spacing_alpha_2", 2.0)] {
        r.check_with(name, || {
            let q = SechSquared::CANONICAL;
            let f = oscillator_field(alpha, q);
            let traj = rk4_integrate(0.0, [1.0, 0.0], &f, |_, _| 0.0, &StepperConfig::rk4(1e-3, 35.0))?;
            let zeros = locate_zeros(&traj, 0, &f)?;
            let late: Vec<_> = zeros.iter().filter(|z| z.time >= 2.0).collect();
            let mut bad = 0;
            for w in late.windows(2) {
                let gap = w[1].time - w[0].time;
                let upper = PI / alpha * (1.0 + q.value(w[0].time) / (alpha * alpha));
                if !(gap > PI / alpha - 1e-9 && gap < upper + 1e-9) {
                    bad += 1;
                }
            }
            Ok((bad == 0 && late.len() >= 5, format!("{} late zeros {bad} outside bounds", late.len())))
        });
    }

    r.check_with("bounded_solutions", || {
        let f = oscillator_field(1.0, SechSquared::CANONICAL);
        let traj = rk4_integrate(0.0, [0.0, 1.0], &f, |_, y| y[0].abs(), &StepperConfig::rk4(1e-3, 200.0).with_stride(100))?;
        let early = traj
            .times
            .iter()
            .zip(&traj.states)
            .filter(|(t, _)| **t <= 20.0)
            .map(|(_, y)| y[0].abs())
            .fold(0.0, f64::max);
        Ok((traj.drift.max <= 2.0 * early, format!("max |Y1| on [0 200] {} vs [0 20] {early}", traj.drift.max)))
    });

    let h = hypothesis_check(&SechSquared::CANONICAL);
    r.check(
        "profile_hypotheses",
        h.even && h.monotone && h.decays,
        format!("even {} monotone {} decays {} rate {:?}", h.even, h.monotone, h.decays, h.exponential_bound.map(|b| b.1)),
    );
    r.lines
}

pub const TABLE1_STEPS: [f64; 7] = [0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625, 0.0078125];
const TABLE1_I: [f64; 7] = [-2.76812630, -2.76366763, -2.76340793, -2.76339200, -2.76339101, -2.76339095, -2.76339094];

fn melnikov() -> Vec<Line> {
    let mut r = Recorder::new("melnikov");
    let q = SechSquared::CANONICAL;
    r.check_with("table1_values", || {
        let mut worst = 0.0f64;
        for (h, i) in TABLE1_STEPS.iter().zip(TABLE1_I) {
            worst = worst.max((melnikov_quadrature(1.0, &q, *h, 35.0)?.value - i).abs());
        }
        Ok((worst <= 1e-6, format!("max |I - table| {worst:e}")))
    });
    r.check_with("convergence_order", || {
        let v: Vec<f64> = [0.25, 0.125, 0.0625]
            .iter()
            .map(|h| melnikov_quadrature(1.0, &q, *h, 35.0).map(|r| r.value))
            .collect::<CoreResult<_>>()?;
        let order = ((v[0] - v[1]) / (v[1] - v[2])).log2();
        Ok(((3.5..=4.5).contains(&order), format!("order at h=0.125 {order}")))
    });
    for alpha in [0.5, 1.0, 2.0, 5.0] {
        let name = match alpha {
            a if a == 0.5 => "methods_agree_alpha_0.5",
            a if a == 1.0 => "methods_agree_alpha_1",
            a if a == 2.0 => "methods_agree_alpha_2",
            _ => "methods_agree_alpha_5",
        };
        r.check_with(name, || {
            let a = melnikov_quadrature(alpha, &q, 0.0078125, 35.0)?.value;
            let b = melnikov_limit(alpha, &q, &PhaseConfig::default())?.value;
            Ok(((a - b).abs() <= 5e-3, format!("quadrature {a} phase {b}")))
        });
    }
    r.check_with("limit_diagnostic", || {
        let l = melnikov_limit(1.0, &q, &PhaseConfig::default())?;
        let Diagnostics::Phase { limit_mean, limit_spread, .. } = l.diagnostics else {
            return Ok((false, "missing diagnostics".into()));
        };
        let off = (limit_mean - l.value).abs();
        Ok((off <= 1e-2 && limit_spread <= 1e-2, format!("mean offset {off:e} spread {limit_spread:e}")))
    });
    r.check_with("phase_angle_large_alpha", || {
        let p = phase_angle(10.0, &q, &PhaseConfig::default())?;
        Ok(((p.b - PI / 2.0).abs() <= 0.05, format!("B(10) {}", p.b)))
    });
    r.check_with("legendre_substitution", || {
        let a = melnikov_quadrature(1.0, &q, 0.0078125, 35.0)?.value;
        let b = melnikov_legendre_substitution(1.0, &q, 1e-3, 35.0)?.value;
        Ok(((a - b).abs() <= 1e-4, format!("quadrature {a} legendre {b}")))
    });
    r.check_with("full_line_shift_invariance", || {
        let sc = |t0| SeparatrixCoords { t0, branch: Branch::Positive, c0: 1.0, c1: 1.0 };
        let a = melnikov_full_line(&sc(0.0), 1.0, 1e-3, 35.0)?;
        let b = melnikov_full_line(&sc(1.3), 1.0, 1e-3, 35.0)?;
        Ok(((a - b).abs() <= 1e-6, format!("t0=0 {a} t0=1.3 {b}")))
    });
    let i = TABLE1_I[6];
    let axes = [-3.0, -0.5, 0.0, 0.5, 3.0].iter().all(|&c| melnikov_m(0.0, c, i) == 0.0 && melnikov_m(c, 0.0, i) == 0.0);
    let transversal = [-3.0, -0.5, 0.5, 3.0].iter().all(|&c1| {
        let d = melnikov_m(1.0, c1, i) - melnikov_m(0.0, c1, i);
        d == 2.0 * c1 * i && d != 0.0
    });
    r.check("m_zero_set", axes && transversal, "m = 0 exactly on the axes with nonzero transversal slope");
    r.lines
}

fn splitting() -> Vec<Line> {
    let mut r = Recorder::new("splitting");
    let sc = |c0, c1| SeparatrixCoords { t0: 0.0, branch: Branch::Positive, c0, c1 };
    r.check_with("unperturbed_conservation", || {
        let rep = verify_splitting(1.0, &[0.0], &sc(1.0, 1.0), 2.5, 1e-4)?;
        let d = rep.samples[0].delta_h.abs();
        Ok((d <= 1e-10, format!("|dh| at eps=0 {d:e}")))
    });
    match verify_splitting(1.0, &[1e-3, 5e-4, 2.5e-4], &sc(1.0, 1.0), 2.5, 1e-4) {
        Ok(rep) => {
            let errs: Vec<f64> = rep.samples.iter().map(|s| (s.ratio.unwrap_or(f64::NAN) - rep.full_line).abs()).collect();
            let rel = errs[0] / rep.full_line.abs();
            let monotone = errs.windows(2).all(|w| w[1] < w[0]);
            r.check(
                "first_order_vs_full_line",
                rel <= 0.1 && monotone,
                format!("full line {} ratios {:?} errors {:?}", rep.full_line, ratios(&rep.samples), errs),
            );
            r.info(
                "ratio_vs_m",
                format!(
                    "m = 2 c0 c1 I = {} ; dh/eps at eps=1e-3 is {} ; full line integral equals 2m",
                    rep.m,
                    rep.samples[0].ratio.unwrap_or(f64::NAN)
                ),
            );
        }
        Err(e) => r.check("first_order_vs_full_line", false, format!("error: {e}")),
    }
    r.check_with("vanishes_off_cross_term", || {
        let rep = verify_splitting(1.0, &[1e-3, 5e-4, 2.5e-4], &sc(0.0, 1.0), 2.5, 1e-4)?;
        let rs = ratios(&rep.samples);
        let ok = rs.windows(2).all(|w| (w[0] / w[1] - 2.0).abs() < 0.1) && rep.full_line.abs() < 1e-10;
        Ok((ok, format!("ratios {rs:?} shrink like eps")))
    });
    r.lines
}

fn ratios(s: &[t4flow_core::melnikov::SplittingSample]) -> Vec<f64> {
    s.iter().filter_map(|s| s.ratio).collect()
}
