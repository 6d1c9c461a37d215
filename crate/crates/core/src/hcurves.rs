//! Planar curves, their horizontal lifts and the generator curves used by
//! the surface builders.

use std::io::Read;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geodesics::GeodesicSpec;
use crate::hgroup::{group_mul, FrameVector, Point};
use crate::quad::{adaptive_simpson, gl8_integrate};
use crate::tol::{ARCLENGTH_GRID, LIFT_TOL, TOL_ARCLENGTH};

/// Position, velocity and acceleration of a plane curve.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PlanarJet {
    pub pos: [f64; 2],
    pub vel: [f64; 2],
    pub acc: [f64; 2],
}

impl PlanarJet {
    pub fn speed(&self) -> f64 {
        self.vel[0].hypot(self.vel[1])
    }

    pub fn curvature(&self) -> f64 {
        self.vel[0] * self.acc[1] - self.acc[0] * self.vel[1]
    }
}

pub trait PlanarCurve: Send + Sync {
    fn domain(&self) -> (f64, f64);
    fn jet(&self, eps: f64) -> PlanarJet;
}

/// A plane curve given by a closure returning its jet.
#[derive(Clone)]
pub struct PlanarFn {
    domain: (f64, f64),
    f: Arc<dyn Fn(f64) -> PlanarJet + Send + Sync>,
}

impl PlanarFn {
    pub fn new(domain: (f64, f64), f: impl Fn(f64) -> PlanarJet + Send + Sync + 'static) -> Self {
        PlanarFn { domain, f: Arc::new(f) }
    }

    /// p0 + ε·dir.
    pub fn line(p0: [f64; 2], dir: [f64; 2], domain: (f64, f64)) -> Self {
        PlanarFn::new(domain, move |e| PlanarJet {
            pos: [p0[0] + e * dir[0], p0[1] + e * dir[1]],
            vel: dir,
            acc: [0.0, 0.0],
        })
    }

    /// Projection of the helix: (sin(2rε)/(2r), (cos(2rε)-1)/(2r)).
    pub fn helix_projection(r: f64, domain: (f64, f64)) -> Self {
        PlanarFn::new(domain, move |e| {
            let (s, c) = (2.0 * r * e).sin_cos();
            PlanarJet {
                pos: [s / (2.0 * r), (c - 1.0) / (2.0 * r)],
                vel: [c, -s],
                acc: [-2.0 * r * s, -2.0 * r * c],
            }
        })
    }

    /// Circle of radius `rho` about `center`, counterclockwise at unit speed.
    pub fn circle(center: [f64; 2], rho: f64, domain: (f64, f64)) -> Self {
        PlanarFn::new(domain, move |e| {
            let (s, c) = (e / rho).sin_cos();
            PlanarJet {
                pos: [center[0] + rho * c, center[1] + rho * s],
                vel: [-s, c],
                acc: [-c / rho, -s / rho],
            }
        })
    }

    /// Ellipse (a cos ε, b sin ε); not arclength.
    pub fn ellipse(a: f64, b: f64, domain: (f64, f64)) -> Self {
        PlanarFn::new(domain, move |e| {
            let (s, c) = e.sin_cos();
            PlanarJet {
                pos: [a * c, b * s],
                vel: [-a * s, b * c],
                acc: [-a * c, -b * s],
            }
        })
    }
}

impl PlanarCurve for PlanarFn {
    fn domain(&self) -> (f64, f64) {
        self.domain
    }
    fn jet(&self, eps: f64) -> PlanarJet {
        (self.f)(eps)
    }
}

/// Natural cubic spline through (x_i, y_i).
#[derive(Clone, Debug)]
struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl CubicSpline {
    fn new(x: Vec<f64>, y: Vec<f64>) -> Self {
        let n = x.len();
        let mut m = vec![0.0; n];
        if n > 2 {
            let (mut diag, mut rhs) = (vec![0.0; n], vec![0.0; n]);
            let mut sup = vec![0.0; n];
            for i in 1..n - 1 {
                let (h0, h1) = (x[i] - x[i - 1], x[i + 1] - x[i]);
                diag[i] = 2.0 * (h0 + h1);
                sup[i] = h1;
                rhs[i] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
                if i > 1 {
                    let w = h0 / diag[i - 1];
                    diag[i] -= w * sup[i - 1];
                    rhs[i] -= w * rhs[i - 1];
                }
            }
            for i in (1..n - 1).rev() {
                m[i] = (rhs[i] - sup[i] * m[i + 1]) / diag[i];
            }
        }
        CubicSpline { x, y, m }
    }

    fn eval(&self, t: f64) -> [f64; 3] {
        let n = self.x.len();
        let i = match self.x.partition_point(|&v| v <= t) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        };
        let h = self.x[i + 1] - self.x[i];
        let (a, b) = ((self.x[i + 1] - t) / h, (t - self.x[i]) / h);
        let (m0, m1) = (self.m[i], self.m[i + 1]);
        let (y0, y1) = (self.y[i], self.y[i + 1]);
        let v = a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let d = (y1 - y0) / h + (-(3.0 * a * a - 1.0) * m0 + (3.0 * b * b - 1.0) * m1) * h / 6.0;
        let dd = a * m0 + b * m1;
        [v, d, dd]
    }
}

/// A plane curve interpolating samples (ε_i, x_i, y_i) by natural splines.
#[derive(Clone, Debug)]
pub struct SampledPlanar {
    sx: CubicSpline,
    sy: CubicSpline,
}

impl SampledPlanar {
    pub fn new(eps: Vec<f64>, x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if eps.len() < 4 || eps.len() != x.len() || eps.len() != y.len() {
            return Err(Error::InvalidCurveData("need at least 4 samples of eps,x,y".into()));
        }
        if eps.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidCurveData("eps must be strictly increasing".into()));
        }
        if eps.iter().chain(&x).chain(&y).any(|v| !v.is_finite()) {
            return Err(Error::InvalidCurveData("non-finite sample".into()));
        }
        Ok(SampledPlanar {
            sx: CubicSpline::new(eps.clone(), x),
            sy: CubicSpline::new(eps, y),
        })
    }
}

impl PlanarCurve for SampledPlanar {
    fn domain(&self) -> (f64, f64) {
        (self.sx.x[0], *self.sx.x.last().unwrap())
    }
    fn jet(&self, eps: f64) -> PlanarJet {
        let [x, dx, ddx] = self.sx.eval(eps);
        let [y, dy, ddy] = self.sy.eval(eps);
        PlanarJet { pos: [x, y], vel: [dx, dy], acc: [ddx, ddy] }
    }
}

/// Reads a curve from CSV with header `eps,x,y`.
pub fn read_curve_csv<R: Read>(reader: R) -> Result<SampledPlanar> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header = rdr
        .headers()
        .map_err(|e| Error::InvalidCurveData(e.to_string()))?
        .clone();
    if header.iter().collect::<Vec<_>>() != ["eps", "x", "y"] {
        return Err(Error::InvalidCurveData("header must be eps,x,y".into()));
    }
    let (mut e, mut x, mut y) = (Vec::new(), Vec::new(), Vec::new());
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|err| Error::InvalidCurveData(err.to_string()))?;
        let parse = |i: usize| -> Result<f64> {
            rec.get(i)
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| Error::InvalidCurveData(format!("bad number in row {}", row + 1)))
        };
        e.push(parse(0)?);
        x.push(parse(1)?);
        y.push(parse(2)?);
    }
    SampledPlanar::new(e, x, y)
}

/// Monotone cubic Hermite interpolant (Fritsch-Carlson).
#[derive(Clone, Debug)]
struct Pchip {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl Pchip {
    fn new(x: Vec<f64>, y: Vec<f64>) -> Self {
        let n = x.len();
        let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / (x[i + 1] - x[i])).collect();
        let mut d = vec![0.0; n];
        d[0] = delta[0];
        d[n - 1] = delta[n - 2];
        for i in 1..n - 1 {
            if delta[i - 1] * delta[i] > 0.0 {
                let (h0, h1) = (x[i] - x[i - 1], x[i + 1] - x[i]);
                let (w1, w2) = (2.0 * h1 + h0, h1 + 2.0 * h0);
                d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
        Pchip { x, y, d }
    }

    fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        let i = self.x.partition_point(|&v| v <= t).clamp(1, n - 1) - 1;
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let (h00, h10) = ((1.0 + 2.0 * s) * (1.0 - s).powi(2), s * (1.0 - s).powi(2));
        let (h01, h11) = (s * s * (3.0 - 2.0 * s), s * s * (s - 1.0));
        h00 * self.y[i] + h10 * h * self.d[i] + h01 * self.y[i + 1] + h11 * h * self.d[i + 1]
    }
}

/// A regular plane curve re-parameterized by arclength from its start.
#[derive(Clone)]
pub struct ArclengthCurve {
    inner: Arc<dyn PlanarCurve>,
    knots: Vec<f64>,
    lengths: Vec<f64>,
    inverse: Pchip,
}

const REPARAM_SEGMENTS: usize = 2048;

pub fn reparameterize_arclength(planar: Arc<dyn PlanarCurve>) -> Result<ArclengthCurve> {
    let (a, b) = planar.domain();
    let n = REPARAM_SEGMENTS;
    let knots: Vec<f64> = (0..=n).map(|k| a + (b - a) * k as f64 / n as f64).collect();
    let max_speed = knots.iter().map(|&e| planar.jet(e).speed()).fold(0.0, f64::max);
    for &e in &knots {
        let sp = planar.jet(e).speed();
        if !(sp > 1e-10 * max_speed.max(1e-300)) {
            return Err(Error::DegenerateCurve(e));
        }
    }
    let speed = |e: f64| planar.jet(e).speed();
    let mut lengths = vec![0.0; n + 1];
    for k in 0..n {
        lengths[k + 1] = lengths[k] + gl8_integrate(speed, knots[k], knots[k + 1]);
    }
    let inverse = Pchip::new(lengths.clone(), knots.clone());
    Ok(ArclengthCurve { inner: planar, knots, lengths, inverse })
}

impl ArclengthCurve {
    pub fn length(&self) -> f64 {
        *self.lengths.last().unwrap()
    }

    /// Original parameter at arclength σ.
    pub fn parameter_at(&self, sigma: f64) -> f64 {
        let total = self.length();
        let n = self.knots.len() - 1;
        let k = self.lengths.partition_point(|&l| l <= sigma).clamp(1, n) - 1;
        let mut e = self.inverse.eval(sigma);
        let speed = |x: f64| self.inner.jet(x).speed();
        for _ in 0..12 {
            let f = self.lengths[k] + gl8_integrate(speed, self.knots[k], e) - sigma;
            let step = f / speed(e);
            e -= step;
            if step.abs() <= 1e-15 * (1.0 + e.abs()) || f.abs() <= 1e-15 * total.max(1.0) {
                break;
            }
        }
        e
    }
}

impl PlanarCurve for ArclengthCurve {
    fn domain(&self) -> (f64, f64) {
        (0.0, self.length())
    }
    fn jet(&self, sigma: f64) -> PlanarJet {
        let inner = self.inner.jet(self.parameter_at(sigma));
        let sp = inner.speed();
        let u = [inner.vel[0] / sp, inner.vel[1] / sp];
        let along = u[0] * inner.acc[0] + u[1] * inner.acc[1];
        let k = 1.0 / (sp * sp);
        PlanarJet {
            pos: inner.pos,
            vel: u,
            acc: [(inner.acc[0] - along * u[0]) * k, (inner.acc[1] - along * u[1]) * k],
        }
    }
}

/// Largest |speed - 1| on the validation grid.
pub fn arclength_deviation(planar: &dyn PlanarCurve) -> f64 {
    let (a, b) = planar.domain();
    let n = ARCLENGTH_GRID - 1;
    (0..=n)
        .map(|k| (planar.jet(a + (b - a) * k as f64 / n as f64).speed() - 1.0).abs())
        .fold(0.0, f64::max)
}

/// Point, ṫ and planar derivatives of a horizontal curve.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CurveJet {
    pub point: Point,
    pub tdot: f64,
    pub vel: [f64; 2],
    pub acc: [f64; 2],
}

impl CurveJet {
    pub fn velocity(&self) -> FrameVector {
        let Point { x, y, .. } = self.point;
        FrameVector::new(self.vel[0], self.vel[1], self.tdot - self.vel[0] * y + x * self.vel[1])
    }

    pub fn cartesian_velocity(&self) -> [f64; 3] {
        [self.vel[0], self.vel[1], self.tdot]
    }

    /// Cartesian second derivative, using ṫ = ẋy - xẏ.
    pub fn cartesian_acceleration(&self) -> [f64; 3] {
        let Point { x, y, .. } = self.point;
        [self.acc[0], self.acc[1], self.acc[0] * y - x * self.acc[1]]
    }

    pub fn planar_curvature(&self) -> f64 {
        self.vel[0] * self.acc[1] - self.acc[0] * self.vel[1]
    }

    /// ṫ - (ẋy - xẏ).
    pub fn horizontality_defect(&self) -> f64 {
        -self.velocity().c
    }
}

pub trait HorizontalCurve: Send + Sync {
    fn domain(&self) -> (f64, f64);
    fn jet(&self, eps: f64) -> CurveJet;

    fn position(&self, eps: f64) -> Point {
        self.jet(eps).point
    }

    fn velocity(&self, eps: f64) -> FrameVector {
        self.jet(eps).velocity()
    }
}

pub fn planar_curvature(c: &dyn HorizontalCurve, eps: f64) -> f64 {
    c.jet(eps).planar_curvature()
}

const LIFT_KNOTS: usize = 1024;

/// Horizontal lift of an arclength plane curve.
#[derive(Clone)]
pub struct LiftedCurve {
    planar: Arc<dyn PlanarCurve>,
    t0: f64,
    knots: Vec<f64>,
    cumulative: Vec<f64>,
}

fn lift_integrand(planar: &dyn PlanarCurve, e: f64) -> f64 {
    let j = planar.jet(e);
    j.vel[0] * j.pos[1] - j.pos[0] * j.vel[1]
}

pub fn horizontal_lift(planar: Arc<dyn PlanarCurve>, t0: f64) -> Result<LiftedCurve> {
    let dev = arclength_deviation(planar.as_ref());
    if !(dev <= TOL_ARCLENGTH) {
        return Err(Error::NotArclength(dev));
    }
    let (a, b) = planar.domain();
    let n = LIFT_KNOTS;
    let knots: Vec<f64> = (0..=n).map(|k| a + (b - a) * k as f64 / n as f64).collect();
    let f = |e: f64| lift_integrand(planar.as_ref(), e);
    let mut cumulative = vec![0.0; n + 1];
    for k in 0..n {
        cumulative[k + 1] =
            cumulative[k] + adaptive_simpson(&f, knots[k], knots[k + 1], LIFT_TOL / n as f64);
    }
    Ok(LiftedCurve { planar, t0, knots, cumulative })
}

impl HorizontalCurve for LiftedCurve {
    fn domain(&self) -> (f64, f64) {
        self.planar.domain()
    }

    fn jet(&self, eps: f64) -> CurveJet {
        let n = self.knots.len() - 1;
        let k = self.knots.partition_point(|&v| v <= eps).clamp(1, n) - 1;
        let f = |e: f64| lift_integrand(self.planar.as_ref(), e);
        let t = self.t0
            + self.cumulative[k]
            + adaptive_simpson(&f, self.knots[k], eps, LIFT_TOL / n as f64);
        let pj = self.planar.jet(eps);
        CurveJet {
            point: Point::new(pj.pos[0], pj.pos[1], t),
            tdot: pj.vel[0] * pj.pos[1] - pj.pos[0] * pj.vel[1],
            vel: pj.vel,
            acc: pj.acc,
        }
    }
}

/// A geodesic viewed as a horizontal curve on an interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeodesicCurve {
    pub spec: GeodesicSpec,
    pub interval: (f64, f64),
}

pub fn geodesic_as_curve(g: GeodesicSpec, interval: (f64, f64)) -> GeodesicCurve {
    GeodesicCurve { spec: g, interval }
}

impl HorizontalCurve for GeodesicCurve {
    fn domain(&self) -> (f64, f64) {
        self.interval
    }

    fn jet(&self, eps: f64) -> CurveJet {
        let j = self.spec.jet(eps);
        CurveJet {
            point: j.point,
            tdot: j.vel[2],
            vel: [j.vel[0], j.vel[1]],
            acc: [j.acc[0], j.acc[1]],
        }
    }
}

/// The x-axis (ε, 0, 0).
pub fn x_axis(interval: (f64, f64)) -> GeodesicCurve {
    geodesic_as_curve(GeodesicSpec::new(Point::ORIGIN, 0.0, 0.0), interval)
}

/// The helix (sin(2rε)/(2r), (cos(2rε)-1)/(2r), (ε - sin(2rε)/(2r))/(2r)).
pub fn helix(r: f64, interval: (f64, f64)) -> GeodesicCurve {
    geodesic_as_curve(GeodesicSpec::new(Point::ORIGIN, 0.0, r), interval)
}

/// Left translate L_p of a horizontal curve.
#[derive(Clone)]
pub struct LeftTranslatedCurve {
    pub p: Point,
    pub inner: Arc<dyn HorizontalCurve>,
}

impl HorizontalCurve for LeftTranslatedCurve {
    fn domain(&self) -> (f64, f64) {
        self.inner.domain()
    }

    fn jet(&self, eps: f64) -> CurveJet {
        let j = self.inner.jet(eps);
        let q = group_mul(self.p, j.point);
        // d/dε of p*γ: the t-rate picks up p.y·ẋ - p.x·ẏ.
        let tdot = j.tdot + self.p.y * j.vel[0] - self.p.x * j.vel[1];
        CurveJet { point: q, tdot, vel: j.vel, acc: j.acc }
    }
}
