//! Group law, left-invariant frame, Levi-Civita connection, J and the
//! curvature tensor of H¹.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::tol::MIN_STEP;

/// A point (x, y, t) of H¹ in Cartesian coordinates.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
    pub t: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0, t: 0.0 };

    pub const fn new(x: f64, y: f64, t: f64) -> Self {
        Point { x, y, t }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.t]
    }

    /// Cartesian translation by `v` (not a group operation).
    pub fn offset(self, v: [f64; 3], k: f64) -> Point {
        Point::new(self.x + k * v[0], self.y + k * v[1], self.t + k * v[2])
    }

    /// Euclidean distance between coordinate triples.
    pub fn coord_distance(self, q: Point) -> f64 {
        ((self.x - q.x).powi(2) + (self.y - q.y).powi(2) + (self.t - q.t).powi(2)).sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.t.is_finite()
    }
}

pub fn group_mul(p: Point, q: Point) -> Point {
    Point::new(p.x + q.x, p.y + q.y, p.t + q.t + (p.y * q.x - p.x * q.y))
}

pub fn group_inv(p: Point) -> Point {
    Point::new(-p.x, -p.y, -p.t)
}

pub fn left_translate(p: Point, q: Point) -> Point {
    group_mul(p, q)
}

/// Cartesian components of X, Y, T at `p`.
pub fn frame_at(p: Point) -> [[f64; 3]; 3] {
    [[1.0, 0.0, p.y], [0.0, 1.0, -p.x], [0.0, 0.0, 1.0]]
}

/// Coefficients (a, b, c) of a vector aX + bY + cT.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FrameVector {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl FrameVector {
    pub const ZERO: FrameVector = FrameVector::new(0.0, 0.0, 0.0);
    pub const X: FrameVector = FrameVector::new(1.0, 0.0, 0.0);
    pub const Y: FrameVector = FrameVector::new(0.0, 1.0, 0.0);
    pub const T: FrameVector = FrameVector::new(0.0, 0.0, 1.0);

    pub const fn new(a: f64, b: f64, c: f64) -> Self {
        FrameVector { a, b, c }
    }

    pub fn from_array(v: [f64; 3]) -> Self {
        FrameVector::new(v[0], v[1], v[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.a, self.b, self.c]
    }

    pub fn dot(self, o: FrameVector) -> f64 {
        self.a * o.a + self.b * o.b + self.c * o.c
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Cross product; the frame is orthonormal and positively oriented.
    pub fn cross(self, o: FrameVector) -> FrameVector {
        FrameVector::new(
            self.b * o.c - self.c * o.b,
            self.c * o.a - self.a * o.c,
            self.a * o.b - self.b * o.a,
        )
    }

    /// Horizontal projection aX + bY.
    pub fn horizontal(self) -> FrameVector {
        FrameVector::new(self.a, self.b, 0.0)
    }

    pub fn horizontal_norm(self) -> f64 {
        self.a.hypot(self.b)
    }

    pub fn is_horizontal(self, tol: f64) -> bool {
        self.c.abs() <= tol
    }

    pub fn normalized(self) -> FrameVector {
        self * (1.0 / self.norm())
    }
}

impl Add for FrameVector {
    type Output = FrameVector;
    fn add(self, o: FrameVector) -> FrameVector {
        FrameVector::new(self.a + o.a, self.b + o.b, self.c + o.c)
    }
}

impl AddAssign for FrameVector {
    fn add_assign(&mut self, o: FrameVector) {
        *self = *self + o;
    }
}

impl Sub for FrameVector {
    type Output = FrameVector;
    fn sub(self, o: FrameVector) -> FrameVector {
        FrameVector::new(self.a - o.a, self.b - o.b, self.c - o.c)
    }
}

impl Neg for FrameVector {
    type Output = FrameVector;
    fn neg(self) -> FrameVector {
        FrameVector::new(-self.a, -self.b, -self.c)
    }
}

impl Mul<f64> for FrameVector {
    type Output = FrameVector;
    fn mul(self, k: f64) -> FrameVector {
        FrameVector::new(k * self.a, k * self.b, k * self.c)
    }
}

impl Mul<FrameVector> for f64 {
    type Output = FrameVector;
    fn mul(self, v: FrameVector) -> FrameVector {
        v * self
    }
}

/// A frame vector attached to a base point.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TangentVector {
    pub base: Point,
    pub v: FrameVector,
}

impl TangentVector {
    pub fn new(base: Point, v: FrameVector) -> Self {
        TangentVector { base, v }
    }

    pub fn from_cartesian(base: Point, v: [f64; 3]) -> Self {
        TangentVector::new(base, cartesian_to_frame(base, v))
    }

    pub fn to_cartesian(self) -> [f64; 3] {
        frame_to_cartesian(self.base, self.v)
    }

    /// Left translation by `p` keeps frame coefficients.
    pub fn left_translated(self, p: Point) -> Self {
        TangentVector::new(group_mul(p, self.base), self.v)
    }
}

pub fn cartesian_to_frame(p: Point, v: [f64; 3]) -> FrameVector {
    FrameVector::new(v[0], v[1], v[2] - p.y * v[0] + p.x * v[1])
}

pub fn frame_to_cartesian(p: Point, v: FrameVector) -> [f64; 3] {
    [v.a, v.b, v.c + p.y * v.a - p.x * v.b]
}

/// The rotation J(X) = Y, J(Y) = -X, J(T) = 0.
pub fn j(v: FrameVector) -> FrameVector {
    FrameVector::new(-v.b, v.a, 0.0)
}

/// Index of a frame field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Basis {
    X,
    Y,
    T,
}

impl Basis {
    pub const ALL: [Basis; 3] = [Basis::X, Basis::Y, Basis::T];

    pub fn vector(self) -> FrameVector {
        match self {
            Basis::X => FrameVector::X,
            Basis::Y => FrameVector::Y,
            Basis::T => FrameVector::T,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

/// D_{E_i} E_j for the frame fields, as constant coefficient triples.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConnectionTable {
    pub d: [[FrameVector; 3]; 3],
}

pub const CONNECTION: ConnectionTable = {
    let z = FrameVector::ZERO;
    let (y, t) = (FrameVector::Y, FrameVector::T);
    let mx = FrameVector::new(-1.0, 0.0, 0.0);
    let mt = FrameVector::new(0.0, 0.0, -1.0);
    ConnectionTable {
        d: [[z, mt, y], [t, z, mx], [y, mx, z]],
    }
};

impl ConnectionTable {
    pub fn get(&self, i: Basis, j: Basis) -> FrameVector {
        self.d[i.index()][j.index()]
    }

    /// Bilinear extension: D_u v for constant-coefficient u, v.
    pub fn apply(&self, u: FrameVector, v: FrameVector) -> FrameVector {
        let (u, v) = (u.to_array(), v.to_array());
        let mut out = FrameVector::ZERO;
        for i in 0..3 {
            for k in 0..3 {
                let w = u[i] * v[k];
                if w != 0.0 {
                    out += self.d[i][k] * w;
                }
            }
        }
        out
    }
}

/// Lie bracket of constant-coefficient fields: [X, Y] = -2T.
pub fn bracket(u: FrameVector, v: FrameVector) -> FrameVector {
    FrameVector::new(0.0, 0.0, -2.0 * (u.a * v.b - u.b * v.a))
}

/// D_γ̇ V given the velocity, the field and the derivative of its coefficients.
pub fn cov_deriv(velocity: FrameVector, field: FrameVector, field_rate: FrameVector) -> FrameVector {
    field_rate + CONNECTION.apply(velocity, field)
}

/// D_γ̇ V at `s`, differentiating the field's coefficients by central differences.
pub fn cov_deriv_along(
    velocity: &dyn Fn(f64) -> FrameVector,
    field: &dyn Fn(f64) -> FrameVector,
    s: f64,
    h: f64,
) -> Result<FrameVector> {
    if h.abs() < MIN_STEP {
        return Err(Error::StepUnderflow(h));
    }
    let rate = (field(s + h) - field(s - h)) * (0.5 / h);
    Ok(cov_deriv(velocity(s), field(s), rate))
}

fn curvature_table() -> &'static [[[FrameVector; 3]; 3]; 3] {
    static TABLE: OnceLock<[[[FrameVector; 3]; 3]; 3]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut r = [[[FrameVector::ZERO; 3]; 3]; 3];
        for u in Basis::ALL {
            for v in Basis::ALL {
                for w in Basis::ALL {
                    let (eu, ev, ew) = (u.vector(), v.vector(), w.vector());
                    let dvw = CONNECTION.apply(ev, ew);
                    let duw = CONNECTION.apply(eu, ew);
                    r[u.index()][v.index()][w.index()] = CONNECTION.apply(eu, dvw)
                        - CONNECTION.apply(ev, duw)
                        - CONNECTION.apply(bracket(eu, ev), ew);
                }
            }
        }
        r
    })
}

/// R(E_u, E_v) E_w = D_u D_v E_w - D_v D_u E_w - D_[u,v] E_w.
pub fn curvature_tensor(u: Basis, v: Basis, w: Basis) -> FrameVector {
    curvature_table()[u.index()][v.index()][w.index()]
}

/// Multilinear extension of the curvature tensor at a single point.
pub fn riemann(u: FrameVector, v: FrameVector, w: FrameVector) -> FrameVector {
    let table = curvature_table();
    let (u, v, w) = (u.to_array(), v.to_array(), w.to_array());
    let mut out = FrameVector::ZERO;
    for i in 0..3 {
        for k in 0..3 {
            for l in 0..3 {
                let c = u[i] * v[k] * w[l];
                if c != 0.0 {
                    out += table[i][k][l] * c;
                }
            }
        }
    }
    out
}

/// The dilation φ_s.
pub fn dilate(s: f64, p: Point) -> Point {
    let e = s.exp();
    Point::new(e * p.x, e * p.y, e * e * p.t)
}

/// Differential of φ_s acting on frame coefficients.
pub fn dilate_vector(s: f64, v: FrameVector) -> FrameVector {
    let e = s.exp();
    FrameVector::new(e * v.a, e * v.b, e * e * v.c)
}

/// The dilation generator W = xX + yY + 2tT.
pub fn w_field(p: Point) -> FrameVector {
    FrameVector::new(p.x, p.y, 2.0 * p.t)
}

/// Riemannian divergence Σ ⟨D_{E_i} U, E_i⟩ by central differences along the frame.
pub fn divergence(field: &dyn Fn(Point) -> FrameVector, p: Point, h: f64) -> Result<f64> {
    if h.abs() < MIN_STEP {
        return Err(Error::StepUnderflow(h));
    }
    let frame = frame_at(p);
    let here = field(p);
    let mut div = 0.0;
    for (i, e) in Basis::ALL.into_iter().enumerate() {
        let fwd = field(p.offset(frame[i], h)).to_array()[i];
        let bwd = field(p.offset(frame[i], -h)).to_array()[i];
        div += (fwd - bwd) / (2.0 * h) + CONNECTION.apply(e.vector(), here).to_array()[i];
    }
    Ok(div)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(u: FrameVector, v: FrameVector, tol: f64) -> bool {
        (u - v).norm() <= tol
    }

    #[test]
    fn identity_and_inverse() {
        let p = Point::new(3.0, -1.0, 2.0);
        assert_eq!(group_mul(Point::ORIGIN, p), p);
        let q = Point::new(2.0, 3.0, 5.0);
        assert_eq!(group_mul(q, group_inv(q)), Point::ORIGIN);
        assert_eq!(group_inv(Point::ORIGIN), Point::ORIGIN);
        assert_eq!(group_inv(group_inv(q)), q);
    }

    #[test]
    fn product_of_unit_points() {
        let r = group_mul(Point::new(1.0, 0.0, 0.0), Point::new(0.0, 1.0, 0.0));
        assert_eq!(r, Point::new(1.0, 1.0, -1.0));
    }

    #[test]
    fn frame_at_sample_point() {
        let f = frame_at(Point::new(2.0, -1.0, 7.0));
        assert_eq!(f, [[1.0, 0.0, -1.0], [0.0, 1.0, -2.0], [0.0, 0.0, 1.0]]);
    }

    #[test]
    fn frame_round_trip() {
        let p = Point::new(0.3, -2.0, 1.1);
        let x = frame_to_cartesian(p, FrameVector::X);
        assert_eq!(x, [1.0, 0.0, -2.0]);
        assert_eq!(cartesian_to_frame(p, x), FrameVector::X);
        assert_eq!(cartesian_to_frame(p, [0.0, 0.0, 1.0]), FrameVector::T);
    }

    #[test]
    fn j_examples() {
        assert_eq!(j(FrameVector::X), FrameVector::Y);
        assert_eq!(j(FrameVector::new(0.0, 0.0, 5.0)), FrameVector::ZERO);
    }

    #[test]
    fn torsion_free_table() {
        let c = CONNECTION;
        let d = |a: Basis, b: Basis| c.get(a, b) - c.get(b, a);
        assert_eq!(d(Basis::X, Basis::Y), FrameVector::new(0.0, 0.0, -2.0));
        assert_eq!(d(Basis::X, Basis::T), FrameVector::ZERO);
        assert_eq!(d(Basis::Y, Basis::T), FrameVector::ZERO);
    }

    #[test]
    fn metric_compatible_table() {
        for e1 in Basis::ALL {
            for e2 in Basis::ALL {
                for e3 in Basis::ALL {
                    let s = CONNECTION.get(e1, e2).dot(e3.vector())
                        + e2.vector().dot(CONNECTION.get(e1, e3));
                    assert_eq!(s, 0.0);
                }
            }
        }
    }

    #[test]
    fn cov_deriv_examples() {
        let vel = |_: f64| FrameVector::new(0.6, 0.8, 0.0);
        let t = cov_deriv_along(&vel, &|_| FrameVector::T, 0.0, 1e-5).unwrap();
        assert!(close(t, j(vel(0.0)), 1e-15));
        let z = cov_deriv_along(&vel, &|_| FrameVector::ZERO, 0.0, 1e-5).unwrap();
        assert_eq!(z, FrameVector::ZERO);
        let xy = cov_deriv_along(&|_| FrameVector::X, &|_| FrameVector::Y, 0.0, 1e-5).unwrap();
        assert_eq!(xy, FrameVector::new(0.0, 0.0, -1.0));
        assert_eq!(
            cov_deriv_along(&vel, &|_| FrameVector::T, 0.0, 1e-13),
            Err(Error::StepUnderflow(1e-13))
        );
    }

    #[test]
    fn curvature_examples() {
        assert_eq!(curvature_tensor(Basis::X, Basis::Y, Basis::Y), FrameVector::new(-3.0, 0.0, 0.0));
        assert_eq!(curvature_tensor(Basis::X, Basis::T, Basis::T), FrameVector::X);
        assert_eq!(curvature_tensor(Basis::X, Basis::X, Basis::Y), FrameVector::ZERO);
    }

    #[test]
    fn curvature_symmetries() {
        for u in Basis::ALL {
            for v in Basis::ALL {
                for w in Basis::ALL {
                    let r = curvature_tensor(u, v, w);
                    assert_eq!(r, -curvature_tensor(v, u, w));
                    for z in Basis::ALL {
                        let lhs = r.dot(z.vector());
                        let rhs = curvature_tensor(u, v, z).dot(w.vector());
                        assert_eq!(lhs, -rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn dilation_examples() {
        let p = Point::new(1.0, 1.0, 1.0);
        assert_eq!(dilate(0.0, p), p);
        let q = dilate(2f64.ln(), p);
        assert!(q.coord_distance(Point::new(2.0, 2.0, 4.0)) < 1e-14);
    }

    #[test]
    fn w_field_examples() {
        assert_eq!(w_field(Point::ORIGIN), FrameVector::ZERO);
        assert_eq!(w_field(Point::new(1.0, 2.0, 3.0)), FrameVector::new(1.0, 2.0, 6.0));
        let d = divergence(&w_field, Point::new(0.4, -1.2, 2.5), 1e-5).unwrap();
        assert!((d - 4.0).abs() < 1e-8);
    }
}
