use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// `a13 * a34 != a12 * a24`.
    IncompatibleMetric { a13_a34: f64, a12_a24: f64 },
    /// A metric coefficient is negative, non-finite, or a coefficient the
    /// reduction divides by is zero.
    InvalidMetric(&'static str),
    /// The orbit has `k1 * k2 == 0`.
    SingularOrbit { k1: f64, k2: f64 },
    /// The point does not lie on the requested coadjoint orbit.
    ChartMismatch { expected: (f64, f64), found: (f64, f64) },
    NonpositiveAlphaSquared(f64),
    InvalidStep { step: f64, horizon: f64 },
    /// The horizon is not an integer multiple of the step.
    GridMismatch { step: f64, horizon: f64 },
    NonfiniteState { time: f64 },
    SuspectedDoubleZero { time: f64, slope: f64 },
    InsufficientZeros { found: usize, required: usize },
    NonDecayingProfile,
    PhaseNearSingular { angle: f64 },
    TrajectoryEscape { time: f64, norm: f64 },
    /// Perturbation parameter outside `[0, 0.1]`.
    InvalidPerturbation(f64),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::IncompatibleMetric { a13_a34, a12_a24 } => write!(
                f,
                "incompatible metric: a13*a34 = {a13_a34} but a12*a24 = {a12_a24}"
            ),
            Error::InvalidMetric(what) => write!(f, "invalid metric: {what}"),
            Error::SingularOrbit { k1, k2 } => write!(
                f,
                "regular coadjoint orbit requires k1·k2 ≠ 0 (k1 = {k1}, k2 = {k2})"
            ),
            Error::ChartMismatch { expected, found } => write!(
                f,
                "point has Casimirs ({}, {}) but the chart is for orbit ({}, {})",
                found.0, found.1, expected.0, expected.1
            ),
            Error::NonpositiveAlphaSquared(a2) => {
                write!(f, "alpha^2 = 1 + 2c nu^(1/3) = {a2} is not positive")
            }
            Error::InvalidStep { step, horizon } => {
                write!(f, "invalid step {step} for horizon {horizon}")
            }
            Error::GridMismatch { step, horizon } => write!(
                f,
                "horizon {horizon} is not an integer multiple of step {step} ({horizon}/h must be integral)"
            ),
            Error::NonfiniteState { time } => write!(f, "state became non-finite at t = {time}"),
            Error::SuspectedDoubleZero { time, slope } => write!(
                f,
                "sign change near t = {time} with slope {slope}: suspected double zero"
            ),
            Error::InsufficientZeros { found, required } => write!(
                f,
                "found {found} usable zero pairs, need at least {required}"
            ),
            Error::NonDecayingProfile => write!(f, "potential profile does not decay on the window"),
            Error::PhaseNearSingular { angle } => {
                write!(f, "phase angle {angle} is too close to 0 or pi")
            }
            Error::TrajectoryEscape { time, norm } => {
                write!(f, "trajectory escaped (|state| = {norm}) at t = {time}")
            }
            Error::InvalidPerturbation(eps) => write!(f, "epsilon = {eps} is outside [0, 0.1]"),
        }
    }
}

impl core::error::Error for Error {}
