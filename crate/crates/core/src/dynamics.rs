//! The perturbed Duffing family, its separatrix and the variational
//! equation along it.
//!
//! Phase points are `(X, x, Y, y)` with `Ẋ = x`, `Ẏ = y`: the `(X, x)` pair is
//! the Duffing factor, `(Y, y)` the transverse factor. The plane
//! `S = {x = X = 0}` is invariant for every `ε`.

use alloc::vec::Vec;

use crate::error::Result;
use crate::integrators::{rk4_advance, rk4_integrate, StepperConfig};
use crate::math::{exp, ln, sech, tanh};

/// A point of the four-dimensional phase space of the reduced system.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PhasePoint4 {
    /// `X`
    pub x_pos: f64,
    /// `x = Ẋ`
    pub x_vel: f64,
    /// `Y`
    pub y_pos: f64,
    /// `y = Ẏ`
    pub y_vel: f64,
}

impl PhasePoint4 {
    pub const fn new(x_pos: f64, x_vel: f64, y_pos: f64, y_vel: f64) -> Self {
        PhasePoint4 { x_pos, x_vel, y_pos, y_vel }
    }

    pub const fn to_array(&self) -> [f64; 4] {
        [self.x_pos, self.x_vel, self.y_pos, self.y_vel]
    }

    pub const fn from_array(a: [f64; 4]) -> Self {
        PhasePoint4::new(a[0], a[1], a[2], a[3])
    }

    pub fn max_abs(&self) -> f64 {
        self.to_array().iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// The vector field `X_ε`:
///
/// ```text
/// Ẋ = x,  ẋ = X - 2X³ + 2εXY²,
/// Ẏ = y,  ẏ = [-α² + 2X²] Y + 2εY³.
/// ```
pub fn field_x_eps(s: &PhasePoint4, alpha: f64, eps: f64) -> PhasePoint4 {
    let (bx, by) = (s.x_pos, s.y_pos);
    PhasePoint4 {
        x_pos: s.x_vel,
        x_vel: bx - 2.0 * bx * bx * bx + 2.0 * eps * bx * by * by,
        y_pos: s.y_vel,
        y_vel: (-alpha * alpha + 2.0 * bx * bx) * by + 2.0 * eps * by * by * by,
    }
}

/// `∂/∂ε X_ε`, i.e. `(0, 2XY², 0, 2Y³)`.
pub fn perturbation_field(s: &PhasePoint4) -> PhasePoint4 {
    let y2 = s.y_pos * s.y_pos;
    PhasePoint4::new(0.0, 2.0 * s.x_pos * y2, 0.0, 2.0 * s.y_pos * y2)
}

/// First integral of the unperturbed Duffing factor,
/// `h = x² + (X² - 1/2)²`. Equals `1/4` on the separatrix.
pub fn duffing_energy(s: &PhasePoint4) -> f64 {
    let w = s.x_pos * s.x_pos - 0.5;
    s.x_vel * s.x_vel + w * w
}

/// `<dh, ∂X_ε/∂ε> = 4xXY²`, the Melnikov integrand.
pub fn melnikov_density(s: &PhasePoint4) -> f64 {
    4.0 * s.x_vel * s.x_pos * s.y_pos * s.y_pos
}

/// A time-dependent potential `q(t)` with `q(t) -> 0` as `t -> ∞` and a
/// closed-form derivative.
pub trait Potential {
    fn value(&self, t: f64) -> f64;

    fn derivative(&self, t: f64) -> f64;

    /// Claimed shape of the profile; [`hypothesis_check`] verifies it.
    fn flags(&self) -> ProfileFlags {
        ProfileFlags::default()
    }

    /// A time beyond which `|q|` stays below 1% of its peak.
    fn decay_time(&self) -> f64;
}

impl<P: Potential + ?Sized> Potential for &P {
    fn value(&self, t: f64) -> f64 {
        (**self).value(t)
    }
    fn derivative(&self, t: f64) -> f64 {
        (**self).derivative(t)
    }
    fn flags(&self) -> ProfileFlags {
        (**self).flags()
    }
    fn decay_time(&self) -> f64 {
        (**self).decay_time()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ProfileFlags {
    pub even: bool,
    pub monotone: bool,
}

/// `q(t) = A sech²(t)`, `q̇(t) = -2A sech²(t) tanh(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SechSquared {
    pub amplitude: f64,
}

impl SechSquared {
    /// `q = 2 sech²`, the potential of the variational equation along the
    /// separatrix `X = ±sech t`.
    pub const CANONICAL: SechSquared = SechSquared { amplitude: 2.0 };
}

impl Potential for SechSquared {
    fn value(&self, t: f64) -> f64 {
        let s = sech(t);
        self.amplitude * s * s
    }

    fn derivative(&self, t: f64) -> f64 {
        let s = sech(t);
        -2.0 * self.amplitude * s * s * tanh(t)
    }

    fn flags(&self) -> ProfileFlags {
        ProfileFlags { even: true, monotone: true }
    }

    fn decay_time(&self) -> f64 {
        // sech(t) < 0.1 for t > acosh(10) ≈ 2.993
        3.0
    }
}

/// `q ≡ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ZeroPotential;

impl Potential for ZeroPotential {
    fn value(&self, _t: f64) -> f64 {
        0.0
    }
    fn derivative(&self, _t: f64) -> f64 {
        0.0
    }
    fn flags(&self) -> ProfileFlags {
        ProfileFlags { even: true, monotone: true }
    }
    fn decay_time(&self) -> f64 {
        0.0
    }
}

/// `q(t) = t e^{-|t|}`; decays but is neither even nor monotone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RampExponential;

impl Potential for RampExponential {
    fn value(&self, t: f64) -> f64 {
        t * exp(-t.abs())
    }
    fn derivative(&self, t: f64) -> f64 {
        (1.0 - t.abs()) * exp(-t.abs())
    }
    fn decay_time(&self) -> f64 {
        // t e^{-t} < 0.01/e for t > 8.2
        8.5
    }
}

/// State of the extended autonomous system whose Hamiltonian is
/// `𝖧 = p²/2 + [α² - q(τ)] z²/2 + u`; `(z, p)` and `(τ, u)` are conjugate.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ExtendedState {
    pub z: f64,
    pub p: f64,
    pub tau: f64,
    pub u: f64,
}

impl ExtendedState {
    /// `(z, ż)` at `τ = 0`, `u = 0`.
    pub const fn new(z: f64, p: f64) -> Self {
        ExtendedState { z, p, tau: 0.0, u: 0.0 }
    }
}

pub fn extended_hamiltonian<P: Potential + ?Sized>(s: &ExtendedState, alpha: f64, profile: &P) -> f64 {
    0.5 * s.p * s.p + 0.5 * (alpha * alpha - profile.value(s.tau)) * s.z * s.z + s.u
}

/// Field of `z̈ + [α² - q(t)] z = 0` for the state `(z, ż)`.
pub fn oscillator_field<P: Potential>(alpha: f64, profile: P) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] {
    let a2 = alpha * alpha;
    move |t, y| [y[1], -(a2 - profile.value(t)) * y[0]]
}

/// Two copies of [`oscillator_field`] side by side, state
/// `(z0, ż0, z1, ż1)`.
pub fn paired_oscillator_field<P: Potential>(alpha: f64, profile: P) -> impl Fn(f64, &[f64; 4]) -> [f64; 4] {
    let a2 = alpha * alpha;
    move |t, y| {
        let k = a2 - profile.value(t);
        [y[1], -k * y[0], y[3], -k * y[2]]
    }
}

/// Values of the two fundamental solutions at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariationalSample {
    pub y0: f64,
    pub dy0: f64,
    pub y1: f64,
    pub dy1: f64,
}

impl VariationalSample {
    fn from_array(a: [f64; 4]) -> Self {
        VariationalSample { y0: a[0], dy0: a[1], y1: a[2], dy1: a[3] }
    }

    pub fn wronskian(&self) -> f64 {
        self.y0 * self.dy1 - self.y1 * self.dy0
    }
}

/// Fundamental solutions of `Ÿ + [α² - q(t)] Y = 0` with
/// `Y0(0) = 1, Ẏ0(0) = 0` and `Y1(0) = 0, Ẏ1(0) = 1`, tabulated by RK4 on
/// the grid `t_i = i h`, `|t_i| <= T`. Both halves of the grid are
/// integrated independently from `t = 0`.
#[derive(Debug, Clone)]
pub struct VariationalSolution<P> {
    alpha: f64,
    profile: P,
    step: f64,
    steps: usize,
    // index i <-> t = (i - steps) h
    samples: Vec<[f64; 4]>,
}

impl<P: Potential + Clone> VariationalSolution<P> {
    pub fn new(alpha: f64, profile: P, step: f64, horizon: f64) -> Result<Self> {
        let cfg = StepperConfig::rk4(step, horizon);
        let steps = cfg.grid_steps()?;
        let field = paired_oscillator_field(alpha, profile.clone());
        let start = [1.0, 0.0, 0.0, 1.0];
        let fwd = rk4_integrate(0.0, start, &field, |_, _| 0.0, &cfg)?;
        let back = rk4_integrate(0.0, start, &field, |_, _| 0.0, &cfg.reversed())?;
        let mut samples = back.states;
        samples.extend_from_slice(&fwd.states[1..]);
        Ok(VariationalSolution { alpha, profile, step, steps, samples })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn horizon(&self) -> f64 {
        self.steps as f64 * self.step
    }

    pub fn profile(&self) -> &P {
        &self.profile
    }

    /// Grid times and samples in increasing time order.
    pub fn grid(&self) -> impl Iterator<Item = (f64, VariationalSample)> + '_ {
        let n = self.steps as f64;
        self.samples
            .iter()
            .enumerate()
            .map(move |(i, s)| ((i as f64 - n) * self.step, VariationalSample::from_array(*s)))
    }

    /// Solutions at an arbitrary time: from the nearest grid point, advance
    /// with RK4 substeps. Times beyond the horizon are reached by
    /// integrating on from the end of the table.
    pub fn at(&self, t: f64) -> VariationalSample {
        let n = self.steps as isize;
        let i = (libm::round(t / self.step) as isize).clamp(-n, n);
        let t_i = i as f64 * self.step;
        let base = &self.samples[(i + n) as usize];
        let field = paired_oscillator_field(self.alpha, &self.profile);
        VariationalSample::from_array(rk4_advance(&field, t_i, base, t, self.step))
    }
}

/// Branch of the separatrix: `X = +sech` or `X = -sech`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Positive,
    Negative,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Positive => 1.0,
            Branch::Negative => -1.0,
        }
    }
}

/// Coordinates on the unperturbed stable/unstable manifold of `S`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparatrixCoords {
    pub t0: f64,
    pub branch: Branch,
    pub c0: f64,
    pub c1: f64,
}

/// Point at time `t` on the separatrix solution with coordinates `sc`:
/// `X = ±sech(t + t0)`, `x = ∓sech(t + t0) tanh(t + t0)`,
/// `Y = c0 Y0(t + t0) + c1 Y1(t + t0)`, `y = Ẏ`.
///
/// The Duffing velocity carries a single power of `sech`; that is the only
/// choice with `x = Ẋ` and `h = 1/4`.
pub fn separatrix_state<P: Potential + Clone>(
    sc: &SeparatrixCoords,
    t: f64,
    variational: &VariationalSolution<P>,
) -> PhasePoint4 {
    let s = t + sc.t0;
    let sign = sc.branch.sign();
    let (sech_s, tanh_s) = (sech(s), tanh(s));
    let v = variational.at(s);
    PhasePoint4 {
        x_pos: sign * sech_s,
        x_vel: -sign * sech_s * tanh_s,
        y_pos: sc.c0 * v.y0 + sc.c1 * v.y1,
        y_vel: sc.c0 * v.dy0 + sc.c1 * v.dy1,
    }
}

/// Closed-form Duffing factor `(X, x)` of the separatrix at time `s`.
pub fn separatrix_duffing(branch: Branch, s: f64) -> (f64, f64) {
    let sign = branch.sign();
    let sech_s = sech(s);
    (sign * sech_s, -sign * sech_s * tanh(s))
}

/// Result of sampling a potential profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypothesisReport {
    pub even: bool,
    /// Weakly decreasing on `[0, ∞)` (sampled on `[0, 40]`).
    pub monotone: bool,
    /// `|q|` beyond `decay_time` stays under 1% of its peak on `[0, decay_time]`.
    pub decays: bool,
    /// Fitted `|q(t)| ≈ C e^{-λt}` on `t ∈ [5, 20]`: `(C, λ)`. `None` when
    /// `q` vanishes on the fit window.
    pub exponential_bound: Option<(f64, f64)>,
}

const EVEN_TOL: f64 = 1e-12;

/// Check the shape hypotheses on a profile by sampling.
pub fn hypothesis_check<P: Potential + ?Sized>(profile: &P) -> HypothesisReport {
    let dt = 0.01;
    let even = (0..=2000).all(|i| {
        let t = i as f64 * dt;
        (profile.value(t) - profile.value(-t)).abs() <= EVEN_TOL
    });
    let monotone = (0..4000).all(|i| {
        let t = i as f64 * dt;
        profile.value(t + dt) <= profile.value(t) + 1e-15
    });

    let td = profile.decay_time();
    let sup = |a: f64, b: f64| {
        let m = libm::ceil((b - a) / dt) as usize;
        (0..=m).map(|i| profile.value(a + i as f64 * dt).abs()).fold(0.0, f64::max)
    };
    let (head, tail) = (sup(0.0, td), sup(td, 40.0));
    let decays = tail <= 0.01 * head || (head == 0.0 && tail == 0.0);

    // least squares for ln|q| = ln C - λ t
    let (mut n, mut st, mut sy, mut stt, mut sty) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for i in 0..=150 {
        let t = 5.0 + i as f64 * 0.1;
        let q = profile.value(t).abs();
        if q > 0.0 && q.is_finite() {
            let y = ln(q);
            n += 1.0;
            st += t;
            sy += y;
            stt += t * t;
            sty += t * y;
        }
    }
    let exponential_bound = (n >= 2.0).then(|| {
        let slope = (n * sty - st * sy) / (n * stt - st * st);
        let intercept = (sy - slope * st) / n;
        (exp(intercept), -slope)
    });
    HypothesisReport { even, monotone, decays, exponential_bound }
}
