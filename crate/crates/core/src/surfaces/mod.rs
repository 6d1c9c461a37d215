//! Parametric immersions into H¹, their normals and characteristic fields.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::hgroup::{
    cartesian_to_frame, dilate, dilate_vector, frame_to_cartesian, group_mul, j, FrameVector,
    Point,
};
use crate::tol::{H_FD, MIN_CROSS, TOL_SINGULAR};

pub mod catalog;
pub mod mesh;
pub mod sigma;

pub use catalog::*;
pub use mesh::*;
pub use sigma::*;

/// A real function g with its first two derivatives: [g, g', g''].
pub type Profile = Arc<dyn Fn(f64) -> [f64; 3] + Send + Sync>;

/// Rectangular parameter domain. `open` flags edges where the immersion
/// degenerates or blows up: [u_min, u_max, v_min, v_max].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParamDomain {
    pub u: (f64, f64),
    pub v: (f64, f64),
    pub open: [bool; 4],
}

impl ParamDomain {
    pub fn closed(u: (f64, f64), v: (f64, f64)) -> Self {
        ParamDomain { u, v, open: [false; 4] }
    }

    pub fn contains(&self, u: f64, v: f64) -> bool {
        let inside = |x: f64, (a, b): (f64, f64), lo: bool, hi: bool| {
            (if lo { x > a } else { x >= a }) && (if hi { x < b } else { x <= b })
        };
        inside(u, self.u, self.open[0], self.open[1]) && inside(v, self.v, self.open[2], self.open[3])
    }

    /// Point at fractions (fu, fv) of the rectangle.
    pub fn at(&self, fu: f64, fv: f64) -> (f64, f64) {
        (self.u.0 + fu * (self.u.1 - self.u.0), self.v.0 + fv * (self.v.1 - self.v.0))
    }
}

/// Second-order data of a graph t = u(x, y).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct GraphJet {
    pub u: f64,
    pub ux: f64,
    pub uy: f64,
    pub uxx: f64,
    pub uxy: f64,
    pub uyy: f64,
}

pub trait GraphFunction: Send + Sync {
    fn value(&self, x: f64, y: f64) -> f64;

    /// Derivatives; fourth-order central differences unless overridden.
    fn jet(&self, x: f64, y: f64) -> GraphJet {
        let h = 1e-3;
        let f = |dx: f64, dy: f64| self.value(x + dx, y + dy);
        let d1 = |g: &dyn Fn(f64) -> f64| (-g(2.0 * h) + 8.0 * g(h) - 8.0 * g(-h) + g(-2.0 * h)) / (12.0 * h);
        let d2 = |g: &dyn Fn(f64) -> f64| {
            (-g(2.0 * h) + 16.0 * g(h) - 30.0 * g(0.0) + 16.0 * g(-h) - g(-2.0 * h)) / (12.0 * h * h)
        };
        let uxy = {
            let gx = |dy: f64| d1(&|dx| f(dx, dy));
            d1(&gx)
        };
        GraphJet {
            u: f(0.0, 0.0),
            ux: d1(&|d| f(d, 0.0)),
            uy: d1(&|d| f(0.0, d)),
            uxx: d2(&|d| f(d, 0.0)),
            uxy,
            uyy: d2(&|d| f(0.0, d)),
        }
    }
}

pub trait Immersion: Send + Sync {
    fn domain(&self) -> ParamDomain;
    fn point(&self, u: f64, v: f64) -> Point;

    /// (F_u, F_v) in frame coefficients at F(u, v).
    fn partials(&self, u: f64, v: f64) -> (FrameVector, FrameVector) {
        numeric_partials(|a, b| self.point(a, b), u, v, H_FD)
    }

    /// The height function when the immersion is a graph over the xy-plane.
    fn graph(&self) -> Option<Arc<dyn GraphFunction>> {
        None
    }
}

/// Central-difference partials of `f`, converted to frame coefficients.
pub fn numeric_partials(f: impl Fn(f64, f64) -> Point, u: f64, v: f64, h: f64) -> (FrameVector, FrameVector) {
    let p = f(u, v);
    let diff = |a: Point, b: Point| [(a.x - b.x) / (2.0 * h), (a.y - b.y) / (2.0 * h), (a.t - b.t) / (2.0 * h)];
    let fu = diff(f(u + h, v), f(u - h, v));
    let fv = diff(f(u, v + h), f(u, v - h));
    (cartesian_to_frame(p, fu), cartesian_to_frame(p, fv))
}

/// Choice of unit normal: ±(F_u × F_v)/‖F_u × F_v‖.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Positive,
    Negative,
    Unset,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Negative => -1.0,
            _ => 1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Orientation::Positive => Orientation::Negative,
            Orientation::Negative => Orientation::Positive,
            Orientation::Unset => Orientation::Unset,
        }
    }

    pub fn from_sign(s: f64) -> Self {
        if s < 0.0 {
            Orientation::Negative
        } else {
            Orientation::Positive
        }
    }
}

#[derive(Clone)]
pub struct ImmersedPatch {
    pub immersion: Arc<dyn Immersion>,
    pub orientation: Orientation,
}

/// Normal decomposition at a point of a patch.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormalData {
    pub point: Point,
    pub fu: FrameVector,
    pub fv: FrameVector,
    /// Oriented F_u × F_v.
    pub cross: FrameVector,
    pub n: FrameVector,
    pub n_h: FrameVector,
    pub nh_norm: f64,
    pub nu_h: Option<FrameVector>,
    pub z: Option<FrameVector>,
    pub s: Option<FrameVector>,
}

impl NormalData {
    pub fn is_singular(&self) -> bool {
        self.nu_h.is_none()
    }
}

impl ImmersedPatch {
    pub fn new(immersion: Arc<dyn Immersion>, orientation: Orientation) -> Self {
        ImmersedPatch { immersion, orientation }
    }

    pub fn from_immersion(imm: impl Immersion + 'static, orientation: Orientation) -> Self {
        ImmersedPatch::new(Arc::new(imm), orientation)
    }

    pub fn domain(&self) -> ParamDomain {
        self.immersion.domain()
    }

    pub fn point(&self, u: f64, v: f64) -> Point {
        self.immersion.point(u, v)
    }

    pub fn partials(&self, u: f64, v: f64) -> (FrameVector, FrameVector) {
        self.immersion.partials(u, v)
    }

    pub fn flipped(&self) -> Self {
        ImmersedPatch::new(self.immersion.clone(), self.orientation.flipped())
    }

    pub fn normal_data(&self, u: f64, v: f64) -> Result<NormalData> {
        self.normal_data_tol(u, v, TOL_SINGULAR)
    }

    pub fn normal_data_tol(&self, u: f64, v: f64, tol_singular: f64) -> Result<NormalData> {
        let point = self.point(u, v);
        let (fu, fv) = self.partials(u, v);
        let cross = fu.cross(fv) * self.orientation.sign();
        let len = cross.norm();
        if !(len >= MIN_CROSS) {
            return Err(Error::DegeneratePoint(u, v));
        }
        let n = cross * (1.0 / len);
        let n_h = n.horizontal();
        let nh_norm = n_h.norm();
        let (nu_h, z, s) = if nh_norm < tol_singular {
            (None, None, None)
        } else {
            let nu = n_h * (1.0 / nh_norm);
            (Some(nu), Some(j(nu)), Some(nu * n.c - FrameVector::T * nh_norm))
        };
        Ok(NormalData { point, fu, fv, cross, n, n_h, nh_norm, nu_h, z, s })
    }

    /// Characteristic field Z written as α ∂_u + β ∂_v.
    pub fn characteristic_direction(&self, u: f64, v: f64) -> Result<(f64, f64)> {
        let nd = self.normal_data(u, v)?;
        let z = nd.z.ok_or(Error::SingularPoint(u, v))?;
        Ok(solve_tangent(nd.fu, nd.fv, z))
    }
}

/// Coefficients (α, β) with α·fu + β·fv closest to w.
pub fn solve_tangent(fu: FrameVector, fv: FrameVector, w: FrameVector) -> (f64, f64) {
    let (g11, g12, g22) = (fu.dot(fu), fu.dot(fv), fv.dot(fv));
    let (r1, r2) = (fu.dot(w), fv.dot(w));
    let det = g11 * g22 - g12 * g12;
    ((g22 * r1 - g12 * r2) / det, (g11 * r2 - g12 * r1) / det)
}

/// A surface assembled from patches.
#[derive(Clone)]
pub struct Surface {
    pub name: String,
    pub patches: Vec<ImmersedPatch>,
    /// Compact without boundary, so that the enclosed volume is defined.
    pub closed: bool,
    /// Designed mean curvature with respect to the stored orientation.
    pub mean_curvature: Option<f64>,
}

impl Surface {
    pub fn single(name: &str, patch: ImmersedPatch, closed: bool, h: Option<f64>) -> Self {
        Surface { name: name.to_string(), patches: vec![patch], closed, mean_curvature: h }
    }

    pub fn flipped(&self) -> Self {
        Surface {
            name: self.name.clone(),
            patches: self.patches.iter().map(ImmersedPatch::flipped).collect(),
            closed: self.closed,
            mean_curvature: self.mean_curvature.map(|h| -h),
        }
    }

    pub fn map_patches(&self, name: &str, h: Option<f64>, f: impl Fn(&ImmersedPatch) -> ImmersedPatch) -> Self {
        Surface {
            name: name.to_string(),
            patches: self.patches.iter().map(f).collect(),
            closed: self.closed,
            mean_curvature: h,
        }
    }

    pub fn dilated(&self, s: f64) -> Self {
        self.map_patches(&self.name, self.mean_curvature.map(|h| (-s).exp() * h), |p| p.dilated(s))
    }

    pub fn left_translated(&self, q: Point) -> Self {
        self.map_patches(&self.name, self.mean_curvature, |p| p.left_translated(q))
    }
}

/// φ_s ∘ F.
pub struct Dilated {
    pub inner: Arc<dyn Immersion>,
    pub s: f64,
}

impl Immersion for Dilated {
    fn domain(&self) -> ParamDomain {
        self.inner.domain()
    }
    fn point(&self, u: f64, v: f64) -> Point {
        dilate(self.s, self.inner.point(u, v))
    }
    fn partials(&self, u: f64, v: f64) -> (FrameVector, FrameVector) {
        let (fu, fv) = self.inner.partials(u, v);
        (dilate_vector(self.s, fu), dilate_vector(self.s, fv))
    }
}

/// L_q ∘ F.
pub struct LeftTranslated {
    pub inner: Arc<dyn Immersion>,
    pub q: Point,
}

impl Immersion for LeftTranslated {
    fn domain(&self) -> ParamDomain {
        self.inner.domain()
    }
    fn point(&self, u: f64, v: f64) -> Point {
        group_mul(self.q, self.inner.point(u, v))
    }
    fn partials(&self, u: f64, v: f64) -> (FrameVector, FrameVector) {
        self.inner.partials(u, v)
    }
}

/// F + t·w(u,v)·N, with N re-expressed in Cartesian components at F.
pub struct Displaced {
    pub base: ImmersedPatch,
    pub amplitude: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    pub t: f64,
}

impl Immersion for Displaced {
    fn domain(&self) -> ParamDomain {
        self.base.domain()
    }
    fn point(&self, u: f64, v: f64) -> Point {
        let p = self.base.point(u, v);
        if self.t == 0.0 {
            return p;
        }
        let (fu, fv) = self.base.partials(u, v);
        let n = fu.cross(fv).normalized() * self.base.orientation.sign();
        p.offset(frame_to_cartesian(p, n), self.t * (self.amplitude)(u, v))
    }
}

impl ImmersedPatch {
    pub fn dilated(&self, s: f64) -> Self {
        ImmersedPatch::from_immersion(Dilated { inner: self.immersion.clone(), s }, self.orientation)
    }

    pub fn left_translated(&self, q: Point) -> Self {
        ImmersedPatch::from_immersion(LeftTranslated { inner: self.immersion.clone(), q }, self.orientation)
    }

    pub fn displaced(&self, amplitude: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>, t: f64) -> Self {
        ImmersedPatch::from_immersion(Displaced { base: self.clone(), amplitude, t }, self.orientation)
    }
}
