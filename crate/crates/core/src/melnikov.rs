//! The Melnikov integral
//!
//! ```text
//! I = ∫₀^∞ q̇(t) Y0(t) Y1(t) dt,   q = 2 sech²,
//! ```
//!
//! by three routes: a Riemann sum over Forest–Ruth solutions, the late-time
//! phase offset `B` of the two solutions (`I = W α cot B`), and RK4 in the
//! variable `z = tanh t`. Also the Melnikov function and a direct check of
//! first-order splitting.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::dynamics::{
    field_x_eps, duffing_energy, hypothesis_check, melnikov_density, paired_oscillator_field, separatrix_state,
    ExtendedState, PhasePoint4, Potential, SechSquared, SeparatrixCoords, VariationalSolution,
};
use crate::error::{Error, Result};
use crate::integrators::{
    forest_ruth_integrate, locate_zeros, rk4_integrate, rk4_step, Drift, StepperConfig, ZeroRecord,
};
use crate::math::{atan2, cos, exp, rem_euclid, sin};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodTag {
    Quadrature,
    PhaseAngle,
    LegendreSubstitution,
}

impl MethodTag {
    pub fn name(self) -> &'static str {
        match self {
            MethodTag::Quadrature => "quadrature",
            MethodTag::PhaseAngle => "phase_angle",
            MethodTag::LegendreSubstitution => "legendre_substitution",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Diagnostics {
    /// Range of `𝖧` along the two Forest–Ruth solutions; `h0` belongs to the
    /// solution with `z(0) = 1`.
    Drift { h0: Drift, h1: Drift },
    Phase {
        phase: PhaseAngle,
        /// Mean and spread (max - min) of `-[ż0 ż1 + α² z0 z1]` over the
        /// zero window.
        limit_mean: f64,
        limit_spread: f64,
    },
    /// Bound on the neglected piece `z ∈ [tanh T, 1)`.
    Endpoint { tail_bound: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MelnikovResult {
    pub alpha: f64,
    pub value: f64,
    pub method: MethodTag,
    pub step: f64,
    pub horizon: f64,
    /// `z0 ż1 - z1 ż0` from the initial data.
    pub wronskian: f64,
    pub diagnostics: Diagnostics,
}

/// `I^h = h Σ_{i=0}^{N} q̇(t_i) z0(t_i) z1(t_i)`, `N = T/h`, with `z0, z1` from
/// Forest–Ruth on the extended system started at `(z, ż) = (1, 0)` and
/// `(0, 1)`.
pub fn melnikov_quadrature<P: Potential + ?Sized>(alpha: f64, profile: &P, h: f64, horizon: f64) -> Result<MelnikovResult> {
    let cfg = StepperConfig::forest_ruth(h, horizon);
    let s0 = forest_ruth_integrate(ExtendedState::new(1.0, 0.0), alpha, profile, &cfg)?;
    let s1 = forest_ruth_integrate(ExtendedState::new(0.0, 1.0), alpha, profile, &cfg)?;
    let sum: f64 = s0
        .times
        .iter()
        .zip(s0.states.iter().zip(&s1.states))
        .map(|(&t, (a, b))| profile.derivative(t) * a.z * b.z)
        .sum();
    Ok(MelnikovResult {
        alpha,
        value: h * sum,
        method: MethodTag::Quadrature,
        step: h,
        horizon,
        wronskian: 1.0,
        diagnostics: Diagnostics::Drift { h0: s0.drift, h1: s1.drift },
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseConfig {
    pub step: f64,
    /// Zeros are taken from `[window.0, window.1]`; the right end is pushed
    /// out when the window is too short to hold `min_pairs` pairs.
    pub window: (f64, f64),
    pub min_pairs: usize,
    /// `z0(0)`; `ż0(0) = 0`.
    pub z0_initial: f64,
    /// `ż1(0)`; `z1(0) = 0`.
    pub z1_slope: f64,
}

impl Default for PhaseConfig {
    fn default() -> Self {
        PhaseConfig { step: 1e-3, window: (20.0, 35.0), min_pairs: 5, z0_initial: 1.0, z1_slope: 1.0 }
    }
}

impl PhaseConfig {
    /// Right end of the integration, on the step grid.
    pub fn end_time(&self, alpha: f64) -> f64 {
        let need = self.window.0 + (self.min_pairs as f64 + 2.0) * PI / alpha;
        let t = self.window.1.max(need);
        libm::ceil(t / self.step - 1e-9) * self.step
    }
}

/// Asymptotic phase offset of the two fundamental solutions.
///
/// Late zeros give the phases `φ_j` with `z_j ≈ A_j sin(α t - φ_j)`; `B` is
/// `φ0 - φ1` reduced mod π into `[0, π)`. With this orientation
/// `I = W α cot B` and `-[ż0 ż1 + α² z0 z1] → I` carry the same sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseAngle {
    pub b: f64,
    pub alpha: f64,
    pub n_zeros_used: usize,
    pub phi0: f64,
    pub phi1: f64,
    /// Max - min of the per-pair offsets around `b`.
    pub spread: f64,
}

fn zero_phase(alpha: f64, z: &ZeroRecord) -> f64 {
    let shift = if z.slope > 0.0 { 0.0 } else { PI };
    rem_euclid(alpha * z.time - shift, 2.0 * PI)
}

fn circular_mean(angles: impl Iterator<Item = f64>, period: f64) -> f64 {
    let k = 2.0 * PI / period;
    let (s, c) = angles.fold((0.0, 0.0), |(s, c), a| (s + sin(k * a), c + cos(k * a)));
    rem_euclid(atan2(s, c) / k, period)
}

// Solutions on [0, end] plus their zeros inside the window.
struct Late {
    traj_times: Vec<f64>,
    traj_states: Vec<[f64; 4]>,
    zeros0: Vec<ZeroRecord>,
    zeros1: Vec<ZeroRecord>,
}

fn late_solutions<P: Potential + Clone>(alpha: f64, profile: &P, cfg: &PhaseConfig) -> Result<Late> {
    let report = hypothesis_check(profile);
    if !report.decays || profile.decay_time() > cfg.window.0 {
        return Err(Error::NonDecayingProfile);
    }
    let end = cfg.end_time(alpha);
    let field = paired_oscillator_field(alpha, profile.clone());
    let stepper = StepperConfig::rk4(cfg.step, end);
    let traj = rk4_integrate(0.0, [cfg.z0_initial, 0.0, 0.0, cfg.z1_slope], &field, |_, _| 0.0, &stepper)?;
    let in_window = |z: &ZeroRecord| z.time >= cfg.window.0;
    let zeros0: Vec<_> = locate_zeros(&traj, 0, &field)?.into_iter().filter(in_window).collect();
    let zeros1: Vec<_> = locate_zeros(&traj, 2, &field)?.into_iter().filter(in_window).collect();
    Ok(Late { traj_times: traj.times, traj_states: traj.states, zeros0, zeros1 })
}

fn phase_from(alpha: f64, late: &Late, min_pairs: usize) -> Result<PhaseAngle> {
    let n = late.zeros0.len().min(late.zeros1.len());
    if n < min_pairs {
        return Err(Error::InsufficientZeros { found: n, required: min_pairs });
    }
    let p0: Vec<f64> = late.zeros0[..n].iter().map(|z| zero_phase(alpha, z)).collect();
    let p1: Vec<f64> = late.zeros1[..n].iter().map(|z| zero_phase(alpha, z)).collect();
    let offsets: Vec<f64> = p0.iter().zip(&p1).map(|(a, b)| rem_euclid(a - b, PI)).collect();
    let b = circular_mean(offsets.iter().copied(), PI);
    let dev = |d: f64| rem_euclid(d - b + 0.5 * PI, PI) - 0.5 * PI;
    let (lo, hi) = offsets.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &d| {
        let e = dev(d);
        (lo.min(e), hi.max(e))
    });
    Ok(PhaseAngle {
        b,
        alpha,
        n_zeros_used: n,
        phi0: circular_mean(p0.into_iter(), 2.0 * PI),
        phi1: circular_mean(p1.into_iter(), 2.0 * PI),
        spread: hi - lo,
    })
}

pub fn phase_angle<P: Potential + Clone>(alpha: f64, profile: &P, cfg: &PhaseConfig) -> Result<PhaseAngle> {
    let late = late_solutions(alpha, profile, cfg)?;
    phase_from(alpha, &late, cfg.min_pairs)
}

const SINGULAR_SIN: f64 = 1e-6;

/// `I = W α cot B`, with `W = z0(0) ż1(0)`.
pub fn melnikov_limit<P: Potential + Clone>(alpha: f64, profile: &P, cfg: &PhaseConfig) -> Result<MelnikovResult> {
    let late = late_solutions(alpha, profile, cfg)?;
    let phase = phase_from(alpha, &late, cfg.min_pairs)?;
    let s = sin(phase.b);
    if s.abs() < SINGULAR_SIN {
        return Err(Error::PhaseNearSingular { angle: phase.b });
    }
    let w = cfg.z0_initial * cfg.z1_slope;
    let a2 = alpha * alpha;
    let (mut n, mut sum, mut lo, mut hi) = (0usize, 0.0, f64::INFINITY, f64::NEG_INFINITY);
    for (t, y) in late.traj_times.iter().zip(&late.traj_states) {
        if *t < cfg.window.0 {
            continue;
        }
        let l = -(y[1] * y[3] + a2 * y[0] * y[2]);
        n += 1;
        sum += l;
        lo = lo.min(l);
        hi = hi.max(l);
    }
    Ok(MelnikovResult {
        alpha,
        value: w * alpha * cos(phase.b) / s,
        method: MethodTag::PhaseAngle,
        step: cfg.step,
        horizon: cfg.end_time(alpha),
        wronskian: w,
        diagnostics: Diagnostics::Phase { phase, limit_mean: sum / n as f64, limit_spread: hi - lo },
    })
}

/// The Melnikov function `m = 2 c0 c1 I` on the stable/unstable manifold of
/// `S`, with `I` the half-line integral.
///
/// The full-line integral of `4xXY²` along the same separatrix
/// ([`melnikov_full_line`]) equals `4 c0 c1 I`, i.e. twice this value.
pub fn melnikov_m(c0: f64, c1: f64, i: f64) -> f64 {
    2.0 * c0 * c1 * i
}

/// Trapezoid rule for `∫_{-T}^{T} 4xXY² dt` along the separatrix solution with
/// coordinates `sc`. The transverse solutions are RK4 with step `h`; the
/// potential is `2 sech²`, forced by `X = ±sech`.
pub fn melnikov_full_line(sc: &SeparatrixCoords, alpha: f64, h: f64, horizon: f64) -> Result<f64> {
    let n = StepperConfig::rk4(h, horizon).grid_steps()?;
    let reach = libm::ceil((horizon + sc.t0.abs()) / h) * h;
    let v = VariationalSolution::new(alpha, SechSquared::CANONICAL, h, reach)?;
    let f = |i: usize| {
        let t = -horizon + i as f64 * h;
        melnikov_density(&separatrix_state(sc, t, &v))
    };
    let inner: f64 = (1..2 * n).map(f).sum();
    Ok(h * (inner + 0.5 * (f(0) + f(2 * n))))
}

/// `I` through `z = tanh t`. With `U_j(z) = Y_j(t)` the variational equation
/// becomes
///
/// ```text
/// (1 - z²) U'' - 2z U' + [α²/(1 - z²) - A] U = 0
/// ```
///
/// for `q = A sech²`, and `q̇ dt = -2A z dz`, so `I = ∫₀¹ -2A z U0 U1 dz`.
/// The independent variable is `w = 1 - z`, stepped by RK4 along
/// `w_i = 1 - tanh(i h)`; the integral rides along as a fifth state
/// component.
pub fn melnikov_legendre_substitution(alpha: f64, profile: &SechSquared, h: f64, horizon: f64) -> Result<MelnikovResult> {
    let n = StepperConfig::rk4(h, horizon).grid_steps()?;
    let a = profile.amplitude;
    let a2 = alpha * alpha;
    // state: U0, U0', U1, U1', J; derivatives in w (dz = -dw)
    let field = |w: f64, s: &[f64; 5]| -> [f64; 5] {
        let z = 1.0 - w;
        let g = w * (2.0 - w);
        let k = a2 / g - a;
        let u0zz = (2.0 * z * s[1] - k * s[0]) / g;
        let u1zz = (2.0 * z * s[3] - k * s[2]) / g;
        [-s[1], -u0zz, -s[3], -u1zz, 2.0 * a * z * s[0] * s[2]]
    };
    let w_at = |t: f64| {
        let e = exp(-2.0 * t);
        2.0 * e / (1.0 + e)
    };
    let mut s = [1.0, 0.0, 0.0, 1.0, 0.0];
    let mut w = 1.0;
    let mut peak: f64 = 0.0;
    for i in 1..=n {
        let w_next = w_at(i as f64 * h);
        s = rk4_step(&field, w, &s, w_next - w);
        w = w_next;
        if s.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonfiniteState { time: i as f64 * h });
        }
        peak = peak.max((s[0] * s[2]).abs());
    }
    Ok(MelnikovResult {
        alpha,
        value: s[4],
        method: MethodTag::LegendreSubstitution,
        step: h,
        horizon,
        wronskian: 1.0,
        diagnostics: Diagnostics::Endpoint { tail_bound: 2.0 * a.abs() * peak * w },
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplittingSample {
    pub eps: f64,
    /// `h(end) - h(start)` along the perturbed flow.
    pub delta_h: f64,
    /// `Δh / ε`; `None` at `ε = 0`.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplittingReport {
    pub alpha: f64,
    pub coords: SeparatrixCoords,
    pub horizon: f64,
    pub step: f64,
    pub samples: Vec<SplittingSample>,
    /// `∫_{-T}^{T} 4xXY²` along the unperturbed separatrix.
    pub full_line: f64,
    /// Half-line integral `I` (quadrature, `h = 1/128`, `T = 35`).
    pub integral: f64,
    /// `melnikov_m(c0, c1, I)`.
    pub m: f64,
    /// Least-squares slope of `Δh` against `ε` (with intercept); `None` with
    /// fewer than two distinct `ε`.
    pub slope: Option<f64>,
}

const ESCAPE_NORM: f64 = 1e3;

/// Integrate `X_ε` with RK4 (step `h`) from the separatrix point at `t = -T`
/// to `t = T` and record the change of the Duffing energy.
pub fn verify_splitting(
    alpha: f64,
    eps: &[f64],
    sc: &SeparatrixCoords,
    horizon: f64,
    h: f64,
) -> Result<SplittingReport> {
    if let Some(&bad) = eps.iter().find(|e| !(0.0..=0.1).contains(*e)) {
        return Err(Error::InvalidPerturbation(bad));
    }
    let n = 2 * StepperConfig::rk4(h, horizon).grid_steps()?;
    let reach = libm::ceil((horizon + sc.t0.abs()) / h) * h;
    let v = VariationalSolution::new(alpha, SechSquared::CANONICAL, h, reach)?;
    let start = separatrix_state(sc, -horizon, &v);
    let h_start = duffing_energy(&start);

    let mut samples = Vec::with_capacity(eps.len());
    for &e in eps {
        let field = move |_t: f64, y: &[f64; 4]| field_x_eps(&PhasePoint4::from_array(*y), alpha, e).to_array();
        let mut y = start.to_array();
        for i in 0..n {
            let t = -horizon + i as f64 * h;
            y = rk4_step(&field, t, &y, h);
            let p = PhasePoint4::from_array(y);
            let norm = p.max_abs();
            if !(norm <= ESCAPE_NORM) {
                return Err(Error::TrajectoryEscape { time: t + h, norm });
            }
        }
        let delta_h = duffing_energy(&PhasePoint4::from_array(y)) - h_start;
        samples.push(SplittingSample { eps: e, delta_h, ratio: (e > 0.0).then(|| delta_h / e) });
    }

    let full_line = melnikov_full_line(sc, alpha, h, horizon)?;
    let integral = melnikov_quadrature(alpha, &SechSquared::CANONICAL, 0.0078125, 35.0)?.value;
    Ok(SplittingReport {
        alpha,
        coords: *sc,
        horizon,
        step: h,
        slope: least_squares_slope(&samples),
        samples,
        full_line,
        integral,
        m: melnikov_m(sc.c0, sc.c1, integral),
    })
}

fn least_squares_slope(samples: &[SplittingSample]) -> Option<f64> {
    let n = samples.len() as f64;
    let mx = samples.iter().map(|s| s.eps).sum::<f64>() / n;
    let my = samples.iter().map(|s| s.delta_h).sum::<f64>() / n;
    let sxx: f64 = samples.iter().map(|s| (s.eps - mx) * (s.eps - mx)).sum();
    let sxy: f64 = samples.iter().map(|s| (s.eps - mx) * (s.delta_h - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
