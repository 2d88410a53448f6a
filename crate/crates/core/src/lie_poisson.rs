//! Lie–Poisson geometry of `t4*`.
//!
//! Coordinates on `t4*` are the momenta `p_a = <p, A>` for the basis
//! `{U, V, W, X, Y, Z}` of `t4`, where `X, Y, V` sit on the first
//! superdiagonal, `Z, U` on the second and `W` in the corner. Every bracket
//! computation goes through [`STRUCTURE_CONSTANTS`].

use crate::error::{Error, Result};
use crate::math::{cbrt, sqrt};

/// Basis of `t4`, in the fixed order used for every coefficient vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Basis {
    U = 0,
    V = 1,
    W = 2,
    X = 3,
    Y = 4,
    Z = 5,
}

impl Basis {
    pub const ALL: [Basis; 6] = [Basis::U, Basis::V, Basis::W, Basis::X, Basis::Y, Basis::Z];

    #[inline]
    pub const fn index(self) -> usize {
        self as usize
    }

    /// Unit coefficient vector of this basis element.
    pub fn unit(self) -> AlgebraVector {
        let mut v = [0.0; 6];
        v[self.index()] = 1.0;
        v
    }
}

/// Coefficients over [`Basis`]; used both for elements of `t4` and for
/// differentials of functions on `t4*`.
pub type AlgebraVector = [f64; 6];

/// The nonzero commutators `[left, right] = out` of `t4`. All other
/// brackets of basis elements vanish or follow by skew-symmetry.
pub const STRUCTURE_CONSTANTS: [(Basis, Basis, Basis); 4] = [
    (Basis::X, Basis::Y, Basis::Z),
    (Basis::Y, Basis::V, Basis::U),
    (Basis::X, Basis::U, Basis::W),
    (Basis::Z, Basis::V, Basis::W),
];

/// `[a, b]` for two basis elements, as `(sign, element)`, or `None` if the
/// bracket vanishes.
pub fn basis_commutator(a: Basis, b: Basis) -> Option<(i8, Basis)> {
    STRUCTURE_CONSTANTS.iter().find_map(|&(l, r, out)| {
        if (a, b) == (l, r) {
            Some((1, out))
        } else if (a, b) == (r, l) {
            Some((-1, out))
        } else {
            None
        }
    })
}

/// Lie bracket of two elements of `t4`.
pub fn lie_bracket(xi: &AlgebraVector, eta: &AlgebraVector) -> AlgebraVector {
    let mut out = [0.0; 6];
    for &(l, r, o) in &STRUCTURE_CONSTANTS {
        let (l, r) = (l.index(), r.index());
        out[o.index()] += xi[l] * eta[r] - xi[r] * eta[l];
    }
    out
}

/// `{f, g}(p) = -<p, [df_p, dg_p]>`, with the differentials given as
/// coefficient vectors over [`Basis`].
pub fn poisson_bracket(df: &AlgebraVector, dg: &AlgebraVector, p: &CoadjointPoint) -> f64 {
    -p.pair(&lie_bracket(df, dg))
}

/// A point of `t4*`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CoadjointPoint {
    pub pu: f64,
    pub pv: f64,
    pub pw: f64,
    pub px: f64,
    pub py: f64,
    pub pz: f64,
}

impl CoadjointPoint {
    pub const fn new(pu: f64, pv: f64, pw: f64, px: f64, py: f64, pz: f64) -> Self {
        CoadjointPoint { pu, pv, pw, px, py, pz }
    }

    pub const fn to_array(&self) -> [f64; 6] {
        [self.pu, self.pv, self.pw, self.px, self.py, self.pz]
    }

    pub const fn from_array(a: [f64; 6]) -> Self {
        CoadjointPoint::new(a[0], a[1], a[2], a[3], a[4], a[5])
    }

    pub fn component(&self, b: Basis) -> f64 {
        self.to_array()[b.index()]
    }

    /// Natural pairing with an element of `t4`.
    pub fn pair(&self, xi: &AlgebraVector) -> f64 {
        self.to_array().iter().zip(xi).map(|(p, x)| p * x).sum()
    }
}

/// Casimir values labelling a coadjoint orbit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitId {
    pub k1: f64,
    pub k2: f64,
}

impl OrbitId {
    pub const fn new(k1: f64, k2: f64) -> Self {
        OrbitId { k1, k2 }
    }

    pub fn is_regular(&self) -> bool {
        self.k1 * self.k2 != 0.0
    }

    fn require_regular(&self) -> Result<()> {
        if self.is_regular() {
            Ok(())
        } else {
            Err(Error::SingularOrbit { k1: self.k1, k2: self.k2 })
        }
    }
}

/// `K1 = pw`, `K2 = pw py - pz pu`.
pub fn casimirs(p: &CoadjointPoint) -> OrbitId {
    OrbitId::new(p.pw, p.pw * p.py - p.pz * p.pu)
}

/// Differentials of `K1` and `K2` at `p`.
pub fn casimir_differentials(p: &CoadjointPoint) -> (AlgebraVector, AlgebraVector) {
    let dk1 = Basis::W.unit();
    let mut dk2 = [0.0; 6];
    dk2[Basis::W.index()] = p.py;
    dk2[Basis::Y.index()] = p.pw;
    dk2[Basis::Z.index()] = -p.pu;
    dk2[Basis::U.index()] = -p.pz;
    (dk1, dk2)
}

const COMPATIBILITY_RTOL: f64 = 1e-12;
const ORBIT_MEMBERSHIP_TOL: f64 = 1e-10;

/// Coefficients of a diagonal quadratic Hamiltonian
/// `4H = a12 px² + a23 py² + a13 pz² + a24 pu² + a34 pv² + a14 pw²`
/// satisfying `a13 a34 = a12 a24`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagonalMetric {
    a12: f64,
    a13: f64,
    a14: f64,
    a23: f64,
    a24: f64,
    a34: f64,
}

impl DiagonalMetric {
    pub fn new(a12: f64, a13: f64, a14: f64, a23: f64, a24: f64, a34: f64) -> Result<Self> {
        let all = [a12, a13, a14, a23, a24, a34];
        if all.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidMetric("coefficients must be finite"));
        }
        if all.iter().any(|&a| a < 0.0) {
            return Err(Error::InvalidMetric("coefficients must be nonnegative"));
        }
        let lhs = a13 * a34;
        let rhs = a12 * a24;
        let scale = lhs.abs().max(rhs.abs());
        if (lhs - rhs).abs() > COMPATIBILITY_RTOL * scale {
            return Err(Error::IncompatibleMetric { a13_a34: lhs, a12_a24: rhs });
        }
        Ok(DiagonalMetric { a12, a13, a14, a23, a24, a34 })
    }

    /// All `a_ij = 1`.
    pub fn riemannian() -> Self {
        DiagonalMetric { a12: 1.0, a13: 1.0, a14: 1.0, a23: 1.0, a24: 1.0, a34: 1.0 }
    }

    /// `a12 = a23 = a34 = 1`, all others zero.
    pub fn subriemannian() -> Self {
        DiagonalMetric { a12: 1.0, a13: 0.0, a14: 0.0, a23: 1.0, a24: 0.0, a34: 1.0 }
    }

    pub fn a12(&self) -> f64 {
        self.a12
    }
    pub fn a13(&self) -> f64 {
        self.a13
    }
    pub fn a14(&self) -> f64 {
        self.a14
    }
    pub fn a23(&self) -> f64 {
        self.a23
    }
    pub fn a24(&self) -> f64 {
        self.a24
    }
    pub fn a34(&self) -> f64 {
        self.a34
    }

    /// Coefficient multiplying `p_b²` in `4H`.
    pub fn coefficients(&self) -> AlgebraVector {
        // (U, V, W, X, Y, Z) <-> (a24, a34, a14, a12, a23, a13)
        [self.a24, self.a34, self.a14, self.a12, self.a23, self.a13]
    }

    /// `H(p)`, including the factor 1/4.
    pub fn energy(&self, p: &CoadjointPoint) -> f64 {
        0.25 * self
            .coefficients()
            .iter()
            .zip(p.to_array())
            .map(|(a, x)| a * x * x)
            .sum::<f64>()
    }

    /// `dH_p` as an element of `t4`.
    pub fn differential(&self, p: &CoadjointPoint) -> AlgebraVector {
        let c = self.coefficients();
        let p = p.to_array();
        core::array::from_fn(|i| 0.5 * c[i] * p[i])
    }
}

/// Euler vector field `ṗ_a = {p_a, H}` of a diagonal Hamiltonian, in the
/// [`Basis`] order.
pub fn euler_field(metric: &DiagonalMetric, p: &CoadjointPoint) -> [f64; 6] {
    let dh = metric.differential(p);
    Basis::ALL.map(|b| poisson_bracket(&b.unit(), &dh, p))
}

/// Canonical coordinates on a regular coadjoint orbit, `[q1, p1] = 1` and
/// `[q2, p2] = 1`, together with the chart scales that produced them.
///
/// `q1 = -λ px`, `p1 = pu / (k1 λ)`, `q2 = μ pv`, `p2 = pz / (k1 μ)`.
///
/// `q2` has the sign opposite to `q1`: since `{pv, pz} = pw` while
/// `{px, pu} = -pw`, this is the orientation with `[q2, p2] = +1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartPoint {
    pub q1: f64,
    pub p1: f64,
    pub q2: f64,
    pub p2: f64,
    pub lambda: f64,
    pub mu: f64,
}

impl ChartPoint {
    /// The 45° symplectic rotation to `(x, X, y, Y)`, in which the reduced
    /// Hamiltonian separates into a Duffing factor and a transverse factor:
    /// `q1 = (x - y)/√2`, `p1 = (X - Y)/√2`, `q2 = (x + y)/√2`,
    /// `p2 = (X + Y)/√2`. Returned in the order `[x, X, y, Y]`.
    pub fn rotated(&self) -> [f64; 4] {
        let s = core::f64::consts::FRAC_1_SQRT_2;
        [
            s * (self.q1 + self.q2),
            s * (self.p1 + self.p2),
            s * (self.q2 - self.q1),
            s * (self.p2 - self.p1),
        ]
    }

    pub fn from_rotated(r: [f64; 4], lambda: f64, mu: f64) -> Self {
        let s = core::f64::consts::FRAC_1_SQRT_2;
        let [x, big_x, y, big_y] = r;
        ChartPoint {
            q1: s * (x - y),
            p1: s * (big_x - big_y),
            q2: s * (x + y),
            p2: s * (big_x + big_y),
            lambda,
            mu,
        }
    }
}

fn check_scales(lambda: f64, mu: f64) -> Result<()> {
    if lambda > 0.0 && mu > 0.0 && lambda.is_finite() && mu.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidMetric("chart scales must be positive"))
    }
}

/// Chart `f_k` from the orbit `k` to canonical coordinates.
pub fn chart_to_canonical(
    p: &CoadjointPoint,
    k: OrbitId,
    lambda: f64,
    mu: f64,
) -> Result<ChartPoint> {
    if k.k1 == 0.0 {
        return Err(Error::SingularOrbit { k1: k.k1, k2: k.k2 });
    }
    check_scales(lambda, mu)?;
    let found = casimirs(p);
    let off1 = (found.k1 - k.k1).abs() / k.k1.abs().max(1.0);
    let off2 = (found.k2 - k.k2).abs() / k.k2.abs().max(1.0);
    if off1 > ORBIT_MEMBERSHIP_TOL || off2 > ORBIT_MEMBERSHIP_TOL {
        return Err(Error::ChartMismatch {
            expected: (k.k1, k.k2),
            found: (found.k1, found.k2),
        });
    }
    Ok(ChartPoint {
        q1: -lambda * p.px,
        p1: p.pu / (k.k1 * lambda),
        q2: mu * p.pv,
        p2: p.pz / (k.k1 * mu),
        lambda,
        mu,
    })
}

/// Inverse chart `g_k`; the result lies on the orbit `k` by construction.
pub fn chart_from_canonical(q: &ChartPoint, k: OrbitId) -> Result<CoadjointPoint> {
    if k.k1 == 0.0 {
        return Err(Error::SingularOrbit { k1: k.k1, k2: k.k2 });
    }
    check_scales(q.lambda, q.mu)?;
    let (l, m, k1) = (q.lambda, q.mu, k.k1);
    Ok(CoadjointPoint {
        pu: k1 * l * q.p1,
        pv: q.q2 / m,
        pw: k1,
        px: -q.q1 / l,
        py: (k.k2 + k1 * k1 * l * m * q.p1 * q.p2) / k1,
        pz: k1 * m * q.p2,
    })
}

/// Orbit-level constants of the reduced Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedParams {
    /// Chart scale, `λ² = 2 a12`.
    pub lambda: f64,
    /// Chart scale, `μ² = 2 a34`.
    pub mu: f64,
    /// `-(a13 a34 k1² + a23 k2 √(a12 a34))`
    pub xi: f64,
    /// `a13 a34 k1² - a23 k2 √(a12 a34)`, equal to `xi + 2 c nu`.
    pub omega: f64,
    /// `a12 a23 a34 k1²`
    pub nu: f64,
    /// `a13 / (a12 a23)`
    pub c: f64,
    /// `1 + 2 c nu^(1/3)`
    pub alpha_squared: f64,
    pub alpha: f64,
    /// Factor `nu^(1/3)` relating the reduced Hamiltonian to the normalized
    /// one under the scaling `(x, X) -> (nu^(1/6) x, nu^(-1/6) X)`; the flows
    /// differ by this time change.
    pub time_scale: f64,
    /// `xi nu^(-2/3)`. The normalized form `(X² - 1/2)²` of the Duffing
    /// factor presumes this equals 1; it is reported, not enforced.
    pub normalization: f64,
}

/// Reduce a diagonal Hamiltonian on the orbit `k` to the parameters of the
/// normalized system.
pub fn reduce_params(metric: &DiagonalMetric, k: OrbitId) -> Result<ReducedParams> {
    k.require_regular()?;
    let (a12, a13, a23, a34) = (metric.a12, metric.a13, metric.a23, metric.a34);
    if !(a12 > 0.0 && a23 > 0.0 && a34 > 0.0) {
        return Err(Error::InvalidMetric("reduction requires a12, a23, a34 > 0"));
    }
    let k1_sq = k.k1 * k.k1;
    let root = sqrt(a12 * a34);
    let xi = -(a13 * a34 * k1_sq + a23 * k.k2 * root);
    let omega = a13 * a34 * k1_sq - a23 * k.k2 * root;
    let nu = a12 * a23 * a34 * k1_sq;
    let c = a13 / (a12 * a23);
    let nu_third = cbrt(nu);
    let alpha_squared = 1.0 + 2.0 * c * nu_third;
    if alpha_squared <= 0.0 {
        return Err(Error::NonpositiveAlphaSquared(alpha_squared));
    }
    Ok(ReducedParams {
        lambda: sqrt(2.0 * a12),
        mu: sqrt(2.0 * a34),
        xi,
        omega,
        nu,
        c,
        alpha_squared,
        alpha: sqrt(alpha_squared),
        time_scale: nu_third,
        normalization: xi / (nu_third * nu_third),
    })
}

impl ReducedParams {
    /// The pulled-back Hamiltonian `H ∘ g_k` in rotated chart coordinates
    /// `[x, X, y, Y]`, up to an additive constant:
    ///
    /// `(x² + y²)/8 - ξX²/2 + ωY²/2 + ν(X² - Y²)²/4`.
    ///
    /// Valid for the default scales `λ² = 2a12`, `μ² = 2a34`.
    pub fn chart_energy(&self, r: [f64; 4]) -> f64 {
        let [x, big_x, y, big_y] = r;
        let (xx, yy) = (big_x * big_x, big_y * big_y);
        0.125 * (x * x + y * y) - 0.5 * self.xi * xx
            + 0.5 * self.omega * yy
            + 0.25 * self.nu * (xx - yy) * (xx - yy)
    }

    /// Hamiltonian vector field of [`chart_energy`](Self::chart_energy) for
    /// the canonical pairs `[x, X] = [y, Y] = 1`, i.e. `ẋ = ∂H/∂X`,
    /// `Ẋ = -∂H/∂x`.
    pub fn chart_field(&self, r: [f64; 4]) -> [f64; 4] {
        let [x, big_x, y, big_y] = r;
        let diff = big_x * big_x - big_y * big_y;
        let dh_dbig_x = -self.xi * big_x + self.nu * diff * big_x;
        let dh_dbig_y = self.omega * big_y - self.nu * diff * big_y;
        [dh_dbig_x, -0.25 * x, dh_dbig_y, -0.25 * y]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn coord(b: Basis) -> AlgebraVector {
        b.unit()
    }

    #[test]
    fn coordinate_brackets_match_table() {
        let p = CoadjointPoint::new(0.0, 0.0, 0.0, 0.0, 0.0, 1.0);
        assert_eq!(poisson_bracket(&coord(Basis::X), &coord(Basis::Y), &p), -1.0);
        let p = CoadjointPoint::new(0.0, 0.0, 2.0, 0.0, 0.0, 0.0);
        assert_eq!(poisson_bracket(&coord(Basis::Z), &coord(Basis::V), &p), -2.0);
        let p = CoadjointPoint::new(3.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        assert_eq!(poisson_bracket(&coord(Basis::Y), &coord(Basis::V), &p), -3.0);
        for b in Basis::ALL {
            let p = CoadjointPoint::new(1.0, 2.0, 3.0, 4.0, 5.0, 6.0);
            assert_eq!(poisson_bracket(&coord(b), &coord(b), &p), 0.0);
        }
    }

    fn int_bracket(a: &[i64; 6], b: &[i64; 6]) -> [i64; 6] {
        let mut out = [0i64; 6];
        for i in Basis::ALL {
            for j in Basis::ALL {
                if let Some((s, k)) = basis_commutator(i, j) {
                    out[k.index()] += i64::from(s) * a[i.index()] * b[j.index()];
                }
            }
        }
        out
    }

    fn int_unit(b: Basis) -> [i64; 6] {
        let mut v = [0; 6];
        v[b.index()] = 1;
        v
    }

    #[test]
    fn skew_symmetry_and_jacobi_on_basis_triples() {
        for a in Basis::ALL {
            for b in Basis::ALL {
                let ab = int_bracket(&int_unit(a), &int_unit(b));
                let ba = int_bracket(&int_unit(b), &int_unit(a));
                assert!(ab.iter().zip(&ba).all(|(x, y)| x == &-y));
                for c in Basis::ALL {
                    let (ea, eb, ec) = (int_unit(a), int_unit(b), int_unit(c));
                    let t1 = int_bracket(&int_bracket(&ea, &eb), &ec);
                    let t2 = int_bracket(&int_bracket(&eb, &ec), &ea);
                    let t3 = int_bracket(&int_bracket(&ec, &ea), &eb);
                    for i in 0..6 {
                        assert_eq!(t1[i] + t2[i] + t3[i], 0, "Jacobi fails for {a:?},{b:?},{c:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn casimir_values() {
        let c = casimirs(&CoadjointPoint::new(0.0, 0.0, 1.0, 0.0, 1.0, 0.0));
        assert_eq!((c.k1, c.k2), (1.0, 1.0));
        let c = casimirs(&CoadjointPoint::default());
        assert_eq!((c.k1, c.k2), (0.0, 0.0));
        let c = casimirs(&CoadjointPoint::new(2.0, 0.0, 3.0, 0.0, 1.0, 1.0));
        assert_eq!((c.k1, c.k2), (3.0, 1.0));
    }

    /// `{p_a, p_b}` written out from the coordinate-function relations
    /// `{px,py} = -pz`, `{py,pv} = -pu`, `{px,pu} = -pw`, `{pz,pv} = -pw`.
    fn coordinate_bracket(a: Basis, b: Basis, p: &CoadjointPoint) -> f64 {
        use Basis::*;
        let table = [(X, Y, -p.pz), (Y, V, -p.pu), (X, U, -p.pw), (Z, V, -p.pw)];
        for (l, r, v) in table {
            if (a, b) == (l, r) {
                return v;
            }
            if (a, b) == (r, l) {
                return -v;
            }
        }
        0.0
    }

    #[test]
    fn euler_field_matches_leibniz_expansion() {
        let metric = DiagonalMetric::riemannian();
        let p = CoadjointPoint::new(0.0, 0.0, 0.0, 0.0, 1.0, 1.0);
        let e = euler_field(&metric, &p);
        assert!((e[Basis::X.index()] + 0.5).abs() < 1e-15);

        let p = CoadjointPoint::new(0.3, -1.2, 0.7, 2.0, -0.4, 1.1);
        let metric = DiagonalMetric::new(1.5, 0.8, 0.3, 2.0, 0.6, 1.125).unwrap();
        let c = metric.coefficients();
        let e = euler_field(&metric, &p);
        for a in Basis::ALL {
            // {p_a, H} = sum_b (1/2) c_b p_b {p_a, p_b}
            let expected: f64 = Basis::ALL
                .iter()
                .map(|&b| 0.5 * c[b.index()] * p.component(b) * coordinate_bracket(a, b, &p))
                .sum();
            assert!((e[a.index()] - expected).abs() < 1e-14, "{a:?}");
        }
        assert_eq!(euler_field(&metric, &CoadjointPoint::default()), [0.0; 6]);
    }

    #[test]
    fn metric_validation() {
        assert!(matches!(
            DiagonalMetric::new(1.0, 1.0, 0.0, 1.0, 1.0, 2.0),
            Err(Error::IncompatibleMetric { .. })
        ));
        assert!(DiagonalMetric::new(1.0, 0.0, 0.0, 1.0, 0.0, 1.0).is_ok());
        assert!(matches!(
            DiagonalMetric::new(-1.0, 0.0, 0.0, 1.0, 0.0, 1.0),
            Err(Error::InvalidMetric(_))
        ));
    }

    #[test]
    fn reduction_examples() {
        let r = reduce_params(&DiagonalMetric::subriemannian(), OrbitId::new(1.3, -0.7)).unwrap();
        assert_eq!(r.alpha, 1.0);
        let r = reduce_params(&DiagonalMetric::riemannian(), OrbitId::new(1.0, 0.4)).unwrap();
        assert_eq!(r.c, 1.0);
        assert_eq!(r.nu, 1.0);
        assert!((r.alpha_squared - 3.0).abs() < 1e-15);
        assert!((r.alpha - 3f64.sqrt()).abs() < 1e-12);
        assert!((r.omega - (r.xi + 2.0 * r.c * r.nu)).abs() < 1e-14);
        assert!(matches!(
            reduce_params(&DiagonalMetric::riemannian(), OrbitId::new(0.0, 1.0)),
            Err(Error::SingularOrbit { .. })
        ));
        assert!(matches!(
            reduce_params(&DiagonalMetric::riemannian(), OrbitId::new(1.0, 0.0)),
            Err(Error::SingularOrbit { .. })
        ));
        // even in k1
        let a = reduce_params(&DiagonalMetric::riemannian(), OrbitId::new(-2.0, 0.4)).unwrap();
        let b = reduce_params(&DiagonalMetric::riemannian(), OrbitId::new(2.0, 0.4)).unwrap();
        assert_eq!(a, b);
    }

    /// Printed normalized form `2H_k = x² - ξX² + νX⁴ + y² + ωY² + νY⁴ - 2νX²Y²`.
    fn printed_2hk(r: &ReducedParams, s: [f64; 4]) -> f64 {
        let [x, bx, y, by] = s;
        x * x - r.xi * bx * bx + r.nu * bx.powi(4) + y * y + r.omega * by * by + r.nu * by.powi(4)
            - 2.0 * r.nu * bx * bx * by * by
    }

    /// `2H = x² + (X² - 1/2)² + y² + α²Y² + Y⁴ - 2X²Y²`.
    fn normalized_2h(alpha_sq: f64, s: [f64; 4]) -> f64 {
        let [x, bx, y, by] = s;
        x * x + (bx * bx - 0.5).powi(2) + y * y + alpha_sq * by * by + by.powi(4)
            - 2.0 * bx * bx * by * by
    }

    #[test]
    fn alpha_from_scaling_identity() {
        // All-ones metric with k = (1, -2) has xi nu^(-2/3) = 1, where the
        // scaling g(x,X,y,Y) = (ax, X/a, ay, Y/a), a = nu^(1/6), satisfies
        // H_k ∘ g = a² H + const.
        let r = reduce_params(&DiagonalMetric::riemannian(), OrbitId::new(1.0, -2.0)).unwrap();
        assert!((r.normalization - 1.0).abs() < 1e-15);
        let a = r.nu.powf(1.0 / 6.0);
        let pts = [[0.3, -0.8, 1.2, 0.4], [-1.0, 0.1, 0.0, 2.0], [0.5, 0.5, -0.5, -0.25]];
        let offset = printed_2hk(&r, [0.0; 4]) - a * a * normalized_2h(r.alpha_squared, [0.0; 4]);
        for s in pts {
            let g = [a * s[0], s[1] / a, a * s[2], s[3] / a];
            let lhs = printed_2hk(&r, g);
            let rhs = a * a * normalized_2h(r.alpha_squared, s) + offset;
            assert!((lhs - rhs).abs() < 1e-12, "{lhs} vs {rhs}");
        }
        assert!((r.alpha_squared - 3.0).abs() < 1e-15);
    }

    #[test]
    fn chart_origin_maps_to_reference_point() {
        let k = OrbitId::new(1.0, 1.0);
        let q = ChartPoint { q1: 0.0, p1: 0.0, q2: 0.0, p2: 0.0, lambda: 1.0, mu: 1.0 };
        let p = chart_from_canonical(&q, k).unwrap();
        assert_eq!(p, CoadjointPoint::new(0.0, 0.0, 1.0, 0.0, 1.0, 0.0));
        let back = casimirs(&p);
        assert_eq!((back.k1, back.k2), (1.0, 1.0));
    }

    #[test]
    fn chart_errors() {
        let p = CoadjointPoint::new(0.0, 0.0, 1.0, 0.0, 1.0, 0.0);
        assert!(matches!(
            chart_to_canonical(&p, OrbitId::new(0.0, 1.0), 1.0, 1.0),
            Err(Error::SingularOrbit { .. })
        ));
        assert!(matches!(
            chart_to_canonical(&p, OrbitId::new(1.0, 2.0), 1.0, 1.0),
            Err(Error::ChartMismatch { .. })
        ));
    }

    fn fd_gradient(f: impl Fn(&CoadjointPoint) -> f64, p: &CoadjointPoint, step: f64) -> AlgebraVector {
        let base = p.to_array();
        core::array::from_fn(|i| {
            let mut up = base;
            let mut dn = base;
            up[i] += step;
            dn[i] -= step;
            (f(&CoadjointPoint::from_array(up)) - f(&CoadjointPoint::from_array(dn))) / (2.0 * step)
        })
    }

    #[test]
    fn chart_functions_are_canonical() {
        let k = OrbitId::new(1.7, -0.6);
        let (l, m) = (1.3, 0.8);
        let coords: [fn(&ChartPoint) -> f64; 4] = [|c| c.q1, |c| c.p1, |c| c.q2, |c| c.p2];
        let pts = [
            ChartPoint { q1: 0.2, p1: -1.1, q2: 0.7, p2: 0.4, lambda: l, mu: m },
            ChartPoint { q1: -2.0, p1: 0.3, q2: 1.5, p2: -0.9, lambda: l, mu: m },
        ];
        for q in pts {
            let p = chart_from_canonical(&q, k).unwrap();
            let grads: [AlgebraVector; 4] = core::array::from_fn(|i| {
                let f = coords[i];
                fd_gradient(
                    // pullback f ∘ f_k, evaluated off-orbit with the same formulas
                    |p| {
                        f(&ChartPoint {
                            q1: -l * p.px,
                            p1: p.pu / (k.k1 * l),
                            q2: m * p.pv,
                            p2: p.pz / (k.k1 * m),
                            lambda: l,
                            mu: m,
                        })
                    },
                    &p,
                    1e-6,
                )
            });
            let expected = [[0.0, 1.0, 0.0, 0.0], [-1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 1.0], [0.0, 0.0, -1.0, 0.0]];
            for i in 0..4 {
                for j in 0..4 {
                    let b = poisson_bracket(&grads[i], &grads[j], &p);
                    assert!((b - expected[i][j]).abs() < 1e-6, "[{i},{j}] = {b}");
                }
            }
        }
    }

    #[test]
    fn pulled_back_hamiltonian_matches_closed_form() {
        let metric = DiagonalMetric::new(1.5, 0.8, 0.3, 2.0, 0.6, 1.125).unwrap();
        let k = OrbitId::new(0.9, 1.4);
        let r = reduce_params(&metric, k).unwrap();
        let energy_at = |s: [f64; 4]| {
            let q = ChartPoint::from_rotated(s, r.lambda, r.mu);
            metric.energy(&chart_from_canonical(&q, k).unwrap())
        };
        let offset = energy_at([0.0; 4]) - r.chart_energy([0.0; 4]);
        for s in [[0.3, -0.8, 1.2, 0.4], [-1.0, 0.1, 0.0, 2.0], [0.5, 0.5, -0.5, -0.25]] {
            assert!((energy_at(s) - r.chart_energy(s) - offset).abs() < 1e-12);
        }
    }

    fn small() -> impl Strategy<Value = f64> {
        -10.0..10.0f64
    }

    fn nonzero() -> impl Strategy<Value = f64> {
        prop_oneof![-10.0..-0.1f64, 0.1..10.0f64]
    }

    proptest! {
        #[test]
        fn casimirs_annihilate_euler_field(
            pu in small(), pv in small(), pw in small(), px in small(), py in small(), pz in small(),
            a12 in 0.1..3.0f64, a23 in 0.1..3.0f64, a34 in 0.1..3.0f64, a13 in 0.0..3.0f64, a14 in 0.0..3.0f64,
        ) {
            let metric = DiagonalMetric::new(a12, a13, a14, a23, a13 * a34 / a12, a34).unwrap();
            let p = CoadjointPoint::new(pu, pv, pw, px, py, pz);
            let e = euler_field(&metric, &p);
            let (dk1, dk2) = casimir_differentials(&p);
            let scale = 1.0 + p.to_array().iter().map(|x| x * x).sum::<f64>();
            let d1: f64 = dk1.iter().zip(&e).map(|(a, b)| a * b).sum();
            let d2: f64 = dk2.iter().zip(&e).map(|(a, b)| a * b).sum();
            prop_assert!(d1.abs() <= 1e-12 * scale);
            prop_assert!(d2.abs() <= 1e-12 * scale * scale);
        }

        #[test]
        fn chart_roundtrip(
            q1 in small(), p1 in small(), q2 in small(), p2 in small(),
            k1 in nonzero(), k2 in nonzero(), l in 0.2..3.0f64, m in 0.2..3.0f64,
        ) {
            let k = OrbitId::new(k1, k2);
            let q = ChartPoint { q1, p1, q2, p2, lambda: l, mu: m };
            let p = chart_from_canonical(&q, k).unwrap();
            let c = casimirs(&p);
            prop_assert_eq!(c.k1, k1);
            prop_assert!((c.k2 - k2).abs() <= 1e-12 * (1.0 + k2.abs()) * (1.0 + p.py.abs() * k1.abs()));
            let back = chart_to_canonical(&p, k, l, m).unwrap();
            for (a, b) in [(back.q1, q1), (back.p1, p1), (back.q2, q2), (back.p2, p2)] {
                prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
            }
        }

        #[test]
        fn euler_field_conjugate_to_chart_field(
            x in -2.0..2.0f64, bx in -2.0..2.0f64, y in -2.0..2.0f64, by in -2.0..2.0f64,
            k1 in nonzero(), k2 in nonzero(),
        ) {
            let metric = DiagonalMetric::new(1.5, 0.8, 0.3, 2.0, 0.6, 1.125).unwrap();
            let k = OrbitId::new(k1, k2);
            let r = reduce_params(&metric, k).unwrap();
            let s = [x, bx, y, by];
            let q = ChartPoint::from_rotated(s, r.lambda, r.mu);
            let p = chart_from_canonical(&q, k).unwrap();
            // f_k and the rotation are linear, so the pushforward is exact.
            let e = CoadjointPoint::from_array(euler_field(&metric, &p));
            let pushed = ChartPoint {
                q1: -r.lambda * e.px,
                p1: e.pu / (k1 * r.lambda),
                q2: r.mu * e.pv,
                p2: e.pz / (k1 * r.mu),
                lambda: r.lambda,
                mu: r.mu,
            }
            .rotated();
            // canonical field of H ∘ g_k by central differences
            let h = 1e-5;
            let energy_at = |s: [f64; 4]| {
                let q = ChartPoint::from_rotated(s, r.lambda, r.mu);
                metric.energy(&chart_from_canonical(&q, k).unwrap())
            };
            let d = |i: usize| {
                let mut up = s;
                let mut dn = s;
                up[i] += h;
                dn[i] -= h;
                (energy_at(up) - energy_at(dn)) / (2.0 * h)
            };
            let fd = [d(1), -d(0), d(3), -d(2)];
            let closed = r.chart_field(s);
            let norm = 1.0 + fd.iter().map(|v| v.abs()).fold(0.0, f64::max);
            for i in 0..4 {
                prop_assert!((pushed[i] - fd[i]).abs() <= 1e-5 * norm, "fd {i}: {} vs {}", pushed[i], fd[i]);
                prop_assert!((pushed[i] - closed[i]).abs() <= 1e-10 * norm, "closed {i}: {} vs {}", pushed[i], closed[i]);
            }
        }
    }
}
