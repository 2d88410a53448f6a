//! Fixed-step time stepping.
//!
//! Two engines share one [`Trajectory`] contract: a fourth-order Forest–Ruth
//! composition for the extended Hamiltonian of the variational equation and
//! the classical RK4 scheme for arbitrary vector fields. Both step on the
//! exact grid `t_i = t0 + i h`; there is no adaptive stepping.

use alloc::vec::Vec;

use crate::dynamics::{extended_hamiltonian, ExtendedState, Potential};
use crate::error::{Error, Result};
use crate::math::cbrt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ForestRuth,
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepperConfig {
    pub step: f64,
    pub horizon: f64,
    pub method: Method,
    /// Keep every `record_stride`-th sample (the last one is always kept).
    /// The monitored invariant is still evaluated at every step.
    pub record_stride: usize,
    /// Integrate towards `t0 - horizon` instead of `t0 + horizon`.
    pub backward: bool,
}

impl StepperConfig {
    pub fn forest_ruth(step: f64, horizon: f64) -> Self {
        StepperConfig { step, horizon, method: Method::ForestRuth, record_stride: 1, backward: false }
    }

    pub fn rk4(step: f64, horizon: f64) -> Self {
        StepperConfig { step, horizon, method: Method::Rk4, record_stride: 1, backward: false }
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.record_stride = stride.max(1);
        self
    }

    pub fn reversed(mut self) -> Self {
        self.backward = !self.backward;
        self
    }

    /// Number of steps `N = horizon / step`; the horizon must be an integer
    /// multiple of the step up to a few ulps.
    pub fn grid_steps(&self) -> Result<usize> {
        let (h, t) = (self.step, self.horizon);
        if !(h > 0.0 && h.is_finite() && t >= 0.0 && t.is_finite()) {
            return Err(Error::InvalidStep { step: h, horizon: t });
        }
        let n = libm::round(t / h);
        if (n * h - t).abs() > 4.0 * f64::EPSILON * t.max(h) {
            return Err(Error::GridMismatch { step: h, horizon: t });
        }
        Ok(n as usize)
    }

    fn signed_step(&self) -> f64 {
        if self.backward {
            -self.step
        } else {
            self.step
        }
    }
}

/// Range of the monitored invariant along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Drift {
    pub min: f64,
    pub max: f64,
}

impl Drift {
    fn start(v: f64) -> Self {
        Drift { min: v, max: v }
    }

    fn include(&mut self, v: f64) {
        self.min = self.min.min(v);
        self.max = self.max.max(v);
    }

    pub fn width(&self) -> f64 {
        self.max - self.min
    }
}

/// Time-stamped samples with the designated invariant at each sample.
/// `times` is strictly increasing regardless of integration direction.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<S> {
    pub times: Vec<f64>,
    pub states: Vec<S>,
    pub conserved: Vec<f64>,
    pub drift: Drift,
    /// Integration step used to produce the samples.
    pub step: f64,
}

impl<S> Trajectory<S> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    fn reverse(&mut self) {
        self.times.reverse();
        self.states.reverse();
        self.conserved.reverse();
    }
}

/// Forest–Ruth parameter `θ = 1 / (2 - 2^{1/3})`.
pub fn forest_ruth_theta() -> f64 {
    1.0 / (2.0 - cbrt(2.0))
}

/// Drift weights (on `A = p²/2 + u`) and kick weights (on
/// `B = [α² - q(τ)] z²/2`) of the Forest–Ruth composition, drift first.
pub fn forest_ruth_weights() -> ([f64; 4], [f64; 4]) {
    let th = forest_ruth_theta();
    (
        [th / 2.0, (1.0 - th) / 2.0, (1.0 - th) / 2.0, th / 2.0],
        [th, 1.0 - 2.0 * th, th, 0.0],
    )
}

/// One Forest–Ruth step of size `h` for the extended Hamiltonian
/// `𝖧 = p²/2 + [α² - q(τ)] z²/2 + u`.
pub fn forest_ruth_step<P: Potential + ?Sized>(
    s: ExtendedState,
    alpha: f64,
    profile: &P,
    h: f64,
) -> ExtendedState {
    let (drift, kick) = forest_ruth_weights();
    let a2 = alpha * alpha;
    let ExtendedState { mut z, mut p, mut tau, mut u } = s;
    for (&cd, &ck) in drift.iter().zip(&kick) {
        let d = cd * h;
        z += d * p;
        tau += d;
        if ck != 0.0 {
            let k = ck * h;
            p -= k * (a2 - profile.value(tau)) * z;
            u += k * 0.5 * profile.derivative(tau) * z * z;
        }
    }
    ExtendedState { z, p, tau, u }
}

fn finite_extended(s: &ExtendedState) -> bool {
    s.z.is_finite() && s.p.is_finite() && s.tau.is_finite() && s.u.is_finite()
}

/// Integrate the extended system with Forest–Ruth, recording `𝖧` at every
/// step. Sample times are `τ(0) ± i h`.
pub fn forest_ruth_integrate<P: Potential + ?Sized>(
    initial: ExtendedState,
    alpha: f64,
    profile: &P,
    cfg: &StepperConfig,
) -> Result<Trajectory<ExtendedState>> {
    let n = cfg.grid_steps()?;
    let h = cfg.signed_step();
    let t0 = initial.tau;
    let stride = cfg.record_stride.max(1);
    let cap = n / stride + 2;
    let mut times = Vec::with_capacity(cap);
    let mut states = Vec::with_capacity(cap);
    let mut conserved = Vec::with_capacity(cap);

    let mut s = initial;
    let e0 = extended_hamiltonian(&s, alpha, profile);
    let mut drift = Drift::start(e0);
    times.push(t0);
    states.push(s);
    conserved.push(e0);
    for i in 1..=n {
        s = forest_ruth_step(s, alpha, profile, h);
        let t = t0 + i as f64 * h;
        if !finite_extended(&s) {
            return Err(Error::NonfiniteState { time: t });
        }
        let e = extended_hamiltonian(&s, alpha, profile);
        drift.include(e);
        if i % stride == 0 || i == n {
            times.push(t);
            states.push(s);
            conserved.push(e);
        }
    }
    let mut traj = Trajectory { times, states, conserved, drift, step: cfg.step };
    if cfg.backward {
        traj.reverse();
    }
    Ok(traj)
}

/// One classical RK4 step of (signed) size `h`.
pub fn rk4_step<const N: usize, F>(field: &F, t: f64, y: &[f64; N], h: f64) -> [f64; N]
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let add = |a: &[f64; N], b: &[f64; N], s: f64| -> [f64; N] {
        core::array::from_fn(|i| a[i] + s * b[i])
    };
    let k1 = field(t, y);
    let k2 = field(t + 0.5 * h, &add(y, &k1, 0.5 * h));
    let k3 = field(t + 0.5 * h, &add(y, &k2, 0.5 * h));
    let k4 = field(t + h, &add(y, &k3, h));
    core::array::from_fn(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
}

/// Advance from `(t, y)` to `target` with RK4 substeps no longer than
/// `max_step`.
pub fn rk4_advance<const N: usize, F>(field: &F, t: f64, y: &[f64; N], target: f64, max_step: f64) -> [f64; N]
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let span = target - t;
    if span == 0.0 {
        return *y;
    }
    let m = libm::ceil(span.abs() / max_step).max(1.0);
    let h = span / m;
    let mut state = *y;
    for i in 0..m as usize {
        state = rk4_step(field, t + i as f64 * h, &state, h);
    }
    state
}

/// Fixed-step RK4 from `(t0, y0)`, monitoring `invariant(t, y)`.
pub fn rk4_integrate<const N: usize, F, G>(
    t0: f64,
    y0: [f64; N],
    field: F,
    invariant: G,
    cfg: &StepperConfig,
) -> Result<Trajectory<[f64; N]>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    G: Fn(f64, &[f64; N]) -> f64,
{
    let n = cfg.grid_steps()?;
    let h = cfg.signed_step();
    let stride = cfg.record_stride.max(1);
    let cap = n / stride + 2;
    let mut times = Vec::with_capacity(cap);
    let mut states = Vec::with_capacity(cap);
    let mut conserved = Vec::with_capacity(cap);

    let mut y = y0;
    let e0 = invariant(t0, &y);
    let mut drift = Drift::start(e0);
    times.push(t0);
    states.push(y);
    conserved.push(e0);
    let mut t = t0;
    for i in 1..=n {
        y = rk4_step(&field, t, &y, h);
        t = t0 + i as f64 * h;
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonfiniteState { time: t });
        }
        let e = invariant(t, &y);
        drift.include(e);
        if i % stride == 0 || i == n {
            times.push(t);
            states.push(y);
            conserved.push(e);
        }
    }
    let mut traj = Trajectory { times, states, conserved, drift, step: cfg.step };
    if cfg.backward {
        traj.reverse();
    }
    Ok(traj)
}

/// A located zero of one component of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroRecord {
    /// Position in the sequence of zeros, starting at 0.
    pub index: usize,
    pub time: f64,
    /// Time derivative of the component at the zero.
    pub slope: f64,
    /// Final halving interval.
    pub bracket: (f64, f64),
}

const ZERO_BRACKET_WIDTH: f64 = 1e-12;
const DOUBLE_ZERO_SLOPE: f64 = 1e-10;

/// Locate the zeros of `component` along `traj` by interval halving.
///
/// Each sign change between consecutive samples is bracketed and halved to
/// width at most `1e-12`; every trial point is obtained by re-integrating
/// `field` from the left end of the sample interval, never by
/// interpolation. The slope is the `component` entry of `field` at the
/// zero, so for a first-order system `(z, ż)` pass the position index.
pub fn locate_zeros<const N: usize, F>(
    traj: &Trajectory<[f64; N]>,
    component: usize,
    field: F,
) -> Result<Vec<ZeroRecord>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let mut out = Vec::new();
    let push = |out: &mut Vec<ZeroRecord>, t: f64, y: &[f64; N], bracket: (f64, f64)| -> Result<()> {
        let slope = field(t, y)[component];
        if slope.abs() < DOUBLE_ZERO_SLOPE {
            return Err(Error::SuspectedDoubleZero { time: t, slope });
        }
        out.push(ZeroRecord { index: out.len(), time: t, slope, bracket });
        Ok(())
    };
    for i in 0..traj.len() {
        let (t_lo, y_lo) = (traj.times[i], &traj.states[i]);
        let g_lo = y_lo[component];
        if g_lo == 0.0 {
            push(&mut out, t_lo, y_lo, (t_lo, t_lo))?;
            continue;
        }
        let Some(&g_hi) = traj.states.get(i + 1).map(|s| &s[component]) else {
            break;
        };
        if g_lo * g_hi >= 0.0 {
            continue;
        }
        let mut lo = t_lo;
        let mut hi = traj.times[i + 1];
        let mut sign_lo = g_lo.signum();
        let eval = |t: f64| rk4_advance(&field, t_lo, y_lo, t, traj.step);
        while hi - lo > ZERO_BRACKET_WIDTH {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let g = eval(mid)[component];
            if g == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if g.signum() == sign_lo {
                lo = mid;
                sign_lo = g.signum();
            } else {
                hi = mid;
            }
        }
        let t = 0.5 * (lo + hi);
        push(&mut out, t, &eval(t), (lo, hi))?;
    }
    Ok(out)
}
