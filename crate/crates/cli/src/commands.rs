use rayon::prelude::*;
use t4flow_core::dynamics::SechSquared;
use t4flow_core::integrators::{rk4_integrate, StepperConfig};
use t4flow_core::lie_poisson::{casimirs, euler_field, reduce_params, CoadjointPoint, DiagonalMetric, OrbitId};
use t4flow_core::melnikov::{melnikov_limit, melnikov_quadrature, Diagnostics, PhaseConfig};
use t4flow_core::Error as CoreError;

use crate::args::{EulerArgs, Format, MetricArgs, Preset, ReduceArgs, ScanArgs, Table1Args};
use crate::format::{float, Table};
use crate::{CliError, CliResult};

pub const TABLE1_HEADER: [&str; 8] = ["h", "I", "H0_min", "H0_max", "H1_min", "H1_max", "H0_drift", "H1_drift"];
pub const SCAN_HEADER: [&str; 5] = ["alpha", "B", "I_phase", "I_quad", "delta"];
pub const REDUCE_HEADER: [&str; 10] =
    ["lambda", "mu", "xi", "omega", "nu", "c", "alpha_squared", "alpha", "time_scale", "normalization"];
pub const EULER_HEADER: [&str; 10] = ["t", "pu", "pv", "pw", "px", "py", "pz", "K1", "K2", "H"];

pub fn table1(args: &Table1Args) -> CliResult<String> {
    if args.steps.is_empty() {
        return Err(CliError::Usage("at least one step is required".into()));
    }
    let mut out = Table::with_header(&TABLE1_HEADER);
    for &h in &args.steps {
        let r = melnikov_quadrature(args.alpha, &SechSquared::CANONICAL, h, args.horizon)?;
        let Diagnostics::Drift { h0, h1 } = r.diagnostics else {
            unreachable!("quadrature reports drift")
        };
        out.floats(&[h, r.value, h0.min, h0.max, h1.min, h1.max, h0.width(), h1.width()]);
    }
    Ok(out.finish())
}

pub fn scan(args: &ScanArgs) -> CliResult<String> {
    let (lo, hi) = (args.alpha_min, args.alpha_max);
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(CliError::Usage(format!("need 0 < alpha-min < alpha-max, got {lo} and {hi}")));
    }
    if args.steps < 2 {
        return Err(CliError::Usage(format!("steps must be at least 2, got {}", args.steps)));
    }
    let n = args.steps - 1;
    let phase_cfg = PhaseConfig { step: args.phase_step, ..PhaseConfig::default() };
    let rows: Vec<CliResult<[String; 5]>> = (0..=n)
        .into_par_iter()
        .map(|i| {
            let alpha = if i == n { hi } else { lo + (hi - lo) * i as f64 / n as f64 };
            let quad = melnikov_quadrature(alpha, &SechSquared::CANONICAL, args.quad_step, 35.0)?.value;
            let (b, phase) = match melnikov_limit(alpha, &SechSquared::CANONICAL, &phase_cfg) {
                Ok(r) => match r.diagnostics {
                    Diagnostics::Phase { phase, .. } => (phase.b, Some(r.value)),
                    _ => unreachable!("phase-angle result carries phase diagnostics"),
                },
                Err(CoreError::PhaseNearSingular { angle }) => (angle, None),
                Err(e) => return Err(e.into()),
            };
            Ok([
                float(alpha),
                float(b),
                phase.map(float).unwrap_or_default(),
                float(quad),
                phase.map(|p| float((p - quad).abs())).unwrap_or_default(),
            ])
        })
        .collect();
    let mut out = Table::with_header(&SCAN_HEADER);
    for row in rows {
        out.line(row?);
    }
    Ok(out.finish())
}

pub fn metric(m: &MetricArgs) -> CliResult<DiagonalMetric> {
    Ok(match m.preset {
        Some(Preset::Riemannian) => DiagonalMetric::riemannian(),
        Some(Preset::Subriemannian) => DiagonalMetric::subriemannian(),
        None => DiagonalMetric::new(m.a12, m.a13, m.a14, m.a23, m.a24, m.a34)?,
    })
}

pub fn reduce(args: &ReduceArgs) -> CliResult<String> {
    let r = reduce_params(&metric(&args.metric)?, OrbitId::new(args.k1, args.k2))?;
    let values = [
        r.lambda,
        r.mu,
        r.xi,
        r.omega,
        r.nu,
        r.c,
        r.alpha_squared,
        r.alpha,
        r.time_scale,
        r.normalization,
    ];
    Ok(match args.format {
        Format::Csv => {
            let mut t = Table::with_header(&REDUCE_HEADER);
            t.floats(&values);
            t.finish()
        }
        Format::Pretty => REDUCE_HEADER
            .iter()
            .zip(values)
            .map(|(k, v)| format!("{k:>14} = {}\n", float(v)))
            .collect(),
    })
}

pub fn euler(args: &EulerArgs) -> CliResult<String> {
    let metric = metric(&args.metric)?;
    let p0: [f64; 6] = args
        .initial
        .as_slice()
        .try_into()
        .map_err(|_| CliError::Usage("--p takes six values".into()))?;
    if args.stride == 0 {
        return Err(CliError::Usage("stride must be positive".into()));
    }
    // every step is kept so the drift covers the whole run, not just the
    // emitted rows
    let cfg = StepperConfig::rk4(args.step, args.horizon);
    let field = |_t: f64, y: &[f64; 6]| euler_field(&metric, &CoadjointPoint::from_array(*y));
    let traj = rk4_integrate(0.0, p0, field, |_, _| 0.0, &cfg)?;

    let invariants = |y: &[f64; 6]| {
        let p = CoadjointPoint::from_array(*y);
        let k = casimirs(&p);
        [k.k1, k.k2, metric.energy(&p)]
    };
    let start = invariants(&p0);
    let mut drift = [0.0f64; 3];
    let mut out = Table::with_header(&EULER_HEADER);
    let last = traj.len() - 1;
    for (i, (t, y)) in traj.times.iter().zip(&traj.states).enumerate() {
        let inv = invariants(y);
        for j in 0..3 {
            drift[j] = drift[j].max((inv[j] - start[j]).abs());
        }
        if i % args.stride != 0 && i != last {
            continue;
        }
        let mut row = vec![*t];
        row.extend_from_slice(y);
        row.extend_from_slice(&inv);
        out.floats(&row);
    }
    out.comment(&format!(
        "max_abs_drift K1={} K2={} H={}",
        float(drift[0]),
        float(drift[1]),
        float(drift[2])
    ));
    Ok(out.finish())
}
