//! Geodesics of curvature λ: closed forms, residual checks, Jacobi fields
//! and the cut time of orthogonal families.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::hgroup::{cov_deriv, j, riemann, FrameVector, Point, CONNECTION};
use crate::tol::{MIN_STEP, SERIES_SWITCH};

/// A geodesic through `base` with initial velocity cosθ X + sinθ Y.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeodesicSpec {
    pub base: Point,
    pub theta: f64,
    pub lambda: f64,
}

/// Position with Cartesian first and second derivatives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CartesianJet {
    pub point: Point,
    pub vel: [f64; 3],
    pub acc: [f64; 3],
}

/// The functions sin(2λs)/(2λ), (1-cos(2λs))/(2λ) and (s - sin(2λs)/(2λ))/(2λ).
#[derive(Clone, Copy, Debug)]
struct Kernels {
    s: f64,
    c: f64,
    q: f64,
    cos: f64,
    sin: f64,
}

fn kernels(lambda: f64, s: f64) -> Kernels {
    let u = 2.0 * lambda * s;
    let (sin, cos) = u.sin_cos();
    if u.abs() < SERIES_SWITCH {
        let u2 = u * u;
        Kernels {
            s: s * (1.0 - u2 / 6.0 + u2 * u2 / 120.0 - u2 * u2 * u2 / 5040.0),
            c: s * u * (0.5 - u2 / 24.0 + u2 * u2 / 720.0 - u2 * u2 * u2 / 40320.0),
            q: s * s * u * (1.0 / 6.0 - u2 / 120.0 + u2 * u2 / 5040.0 - u2 * u2 * u2 / 362880.0),
            cos,
            sin,
        }
    } else {
        let half = (0.5 * u).sin();
        let sk = sin / (2.0 * lambda);
        Kernels {
            s: sk,
            c: half * half / lambda,
            q: (s - sk) / (2.0 * lambda),
            cos,
            sin,
        }
    }
}

impl GeodesicSpec {
    pub fn new(base: Point, theta: f64, lambda: f64) -> Self {
        GeodesicSpec { base, theta, lambda }
    }

    /// The geodesic with initial velocity aX + bY (normalized).
    pub fn from_direction(base: Point, a: f64, b: f64, lambda: f64) -> Self {
        GeodesicSpec::new(base, b.atan2(a), lambda)
    }

    fn ab(&self) -> (f64, f64) {
        let (b, a) = self.theta.sin_cos();
        (a, b)
    }

    pub fn jet(&self, s: f64) -> CartesianJet {
        let (a, b) = self.ab();
        let l = self.lambda;
        let Point { x: x0, y: y0, t: t0 } = self.base;
        let k = kernels(l, s);
        let (p, q) = (a * x0 + b * y0, b * x0 - a * y0);
        let point = Point::new(
            x0 + a * k.s + b * k.c,
            y0 - a * k.c + b * k.s,
            t0 + k.q + p * k.c - q * k.s,
        );
        let xd = a * k.cos + b * k.sin;
        let yd = -a * k.sin + b * k.cos;
        let td = k.c + p * k.sin - q * k.cos;
        let tdd = k.sin + 2.0 * l * (p * k.cos + q * k.sin);
        CartesianJet {
            point,
            vel: [xd, yd, td],
            acc: [2.0 * l * yd, -2.0 * l * xd, tdd],
        }
    }
}

pub fn geodesic_point(g: &GeodesicSpec, s: f64) -> Point {
    g.jet(s).point
}

/// Unit horizontal velocity in frame coefficients.
pub fn geodesic_velocity(g: &GeodesicSpec, s: f64) -> FrameVector {
    let (a, b) = g.ab();
    let (sin, cos) = (2.0 * g.lambda * s).sin_cos();
    FrameVector::new(a * cos + b * sin, -a * sin + b * cos, 0.0)
}

/// Derivative of the velocity coefficients along the geodesic.
fn velocity_rate(g: &GeodesicSpec, s: f64) -> FrameVector {
    let v = geodesic_velocity(g, s);
    FrameVector::new(2.0 * g.lambda * v.b, -2.0 * g.lambda * v.a, 0.0)
}

/// ‖D_γ̇γ̇ + 2λJ(γ̇)‖ for a curve given by Cartesian derivatives.
pub fn curve_residual(jet: &CartesianJet, lambda: f64) -> f64 {
    let Point { x, y, .. } = jet.point;
    let [xd, yd, td] = jet.vel;
    let [xdd, ydd, tdd] = jet.acc;
    let v = FrameVector::new(xd, yd, td - xd * y + x * yd);
    let rate = FrameVector::new(xdd, ydd, tdd - xdd * y + x * ydd);
    (cov_deriv(v, v, rate) + 2.0 * lambda * j(v)).norm()
}

pub fn geodesic_residual(g: &GeodesicSpec, s: f64) -> f64 {
    curve_residual(&g.jet(s), g.lambda)
}

/// λ⟨V,T⟩ + ⟨V,γ̇⟩ at `s`.
pub fn conserved_quantity(g: &GeodesicSpec, v: FrameVector, s: f64) -> f64 {
    g.lambda * v.c + v.dot(geodesic_velocity(g, s))
}

/// A vector field along a geodesic, with an optional analytic derivative
/// of its frame coefficients.
pub struct FieldAlong<'a> {
    pub value: &'a dyn Fn(f64) -> FrameVector,
    pub rate: Option<&'a dyn Fn(f64) -> FrameVector>,
}

/// Norm of V̈ + R(V,γ̇)γ̇ + 2λ(J(V̇) - ⟨V,γ̇⟩T).
pub fn jacobi_residual(g: &GeodesicSpec, field: &FieldAlong, s: f64, h: f64) -> Result<f64> {
    if h.abs() < MIN_STEP {
        return Err(Error::StepUnderflow(h));
    }
    let v = (field.value)(s);
    let (dv, ddv) = match field.rate {
        Some(rate) => (rate(s), (rate(s + h) - rate(s - h)) * (0.5 / h)),
        None => {
            let (vp, vm) = ((field.value)(s + h), (field.value)(s - h));
            ((vp - vm) * (0.5 / h), (vp - v * 2.0 + vm) * (1.0 / (h * h)))
        }
    };
    let vel = geodesic_velocity(g, s);
    let acc = velocity_rate(g, s);
    let vdot = dv + CONNECTION.apply(vel, v);
    let vdot_rate = ddv + CONNECTION.apply(acc, v) + CONNECTION.apply(vel, dv);
    let vddot = vdot_rate + CONNECTION.apply(vel, vdot);
    let res = vddot
        + riemann(v, vel, vel)
        + 2.0 * g.lambda * (j(vdot) - FrameVector::T * v.dot(vel));
    Ok(res.norm())
}

/// First s > 0 where the orthogonal family from a curve of planar curvature
/// `h` becomes horizontal again: the root of h = 2λ sin(2λs)/(1 - cos(2λs))
/// in (0, π/|λ|).
pub fn cut_time(h: f64, lambda: f64) -> Result<f64> {
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(Error::ZeroCurvature);
    }
    let l = lambda.abs();
    Ok((FRAC_PI_2 - (h / (2.0 * l)).atan()) / l)
}

/// One-parameter family of geodesics F(ε, s) with base point p(ε) and
/// initial direction A(ε)X + B(ε)Y, frozen at a given ε.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeodesicVariation {
    pub base: Point,
    /// Cartesian dp/dε.
    pub base_rate: [f64; 3],
    /// (A, B), unit.
    pub dir: [f64; 2],
    /// (dA/dε, dB/dε).
    pub dir_rate: [f64; 2],
    pub lambda: f64,
}

/// Values of a geodesic variation at (ε, s).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VariationJet {
    pub point: Point,
    /// ∂F/∂s in frame coefficients.
    pub velocity: FrameVector,
    /// ∂F/∂ε in Cartesian components.
    pub variation_cartesian: [f64; 3],
    /// ∂F/∂ε in frame coefficients.
    pub variation: FrameVector,
    /// d/ds of the frame coefficients of ∂F/∂ε.
    pub variation_rate: FrameVector,
}

impl GeodesicVariation {
    pub fn spec(&self) -> GeodesicSpec {
        GeodesicSpec::from_direction(self.base, self.dir[0], self.dir[1], self.lambda)
    }

    pub fn eval(&self, s: f64) -> VariationJet {
        let [a, b] = self.dir;
        let [da, db] = self.dir_rate;
        let Point { x: x0, y: y0, t: t0 } = self.base;
        let [dx0, dy0, dt0] = self.base_rate;
        let k = kernels(self.lambda, s);
        let (p, q) = (a * x0 + b * y0, b * x0 - a * y0);
        let dp = da * x0 + a * dx0 + db * y0 + b * dy0;
        let dq = db * x0 + b * dx0 - da * y0 - a * dy0;

        let point = Point::new(
            x0 + a * k.s + b * k.c,
            y0 - a * k.c + b * k.s,
            t0 + k.q + p * k.c - q * k.s,
        );
        let (xd, yd) = (a * k.cos + b * k.sin, -a * k.sin + b * k.cos);

        let vx = dx0 + da * k.s + db * k.c;
        let vy = dy0 - da * k.c + db * k.s;
        let vt = dt0 + dp * k.c - dq * k.s;
        let vx_s = da * k.cos + db * k.sin;
        let vy_s = -da * k.sin + db * k.cos;
        let vt_s = dp * k.sin - dq * k.cos;

        VariationJet {
            point,
            velocity: FrameVector::new(xd, yd, 0.0),
            variation_cartesian: [vx, vy, vt],
            variation: FrameVector::new(vx, vy, vt - point.y * vx + point.x * vy),
            variation_rate: FrameVector::new(
                vx_s,
                vy_s,
                vt_s - yd * vx - point.y * vx_s + xd * vy + point.x * vy_s,
            ),
        }
    }
}
