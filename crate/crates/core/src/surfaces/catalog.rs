//! Named surfaces.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geodesics::GeodesicVariation;
use crate::hcurves::{x_axis, HorizontalCurve};
use crate::hgroup::{cartesian_to_frame, FrameVector, Point};

use super::sigma::{build_sigma_lambda, build_sigma_zero, helicoid_l, Side};
use super::{GraphFunction, GraphJet, ImmersedPatch, Immersion, Orientation, ParamDomain, Profile, Surface};

/// Graph immersion (x, y) ↦ (x, y, u(x, y)) over a rectangle.
pub struct GraphPatch {
    pub f: Arc<dyn GraphFunction>,
    pub domain: ParamDomain,
}

impl Immersion for GraphPatch {
    fn domain(&self) -> ParamDomain {
        self.domain
    }
    fn point(&self, x: f64, y: f64) -> Point {
        Point::new(x, y, self.f.value(x, y))
    }
    fn partials(&self, x: f64, y: f64) -> (FrameVector, FrameVector) {
        let g = self.f.jet(x, y);
        (FrameVector::new(1.0, 0.0, g.ux - y), FrameVector::new(0.0, 1.0, g.uy + x))
    }
    fn graph(&self) -> Option<Arc<dyn GraphFunction>> {
        Some(self.f.clone())
    }
}

/// A graph function given by closures for the value and the full jet.
pub struct GraphFn<F: Fn(f64, f64) -> GraphJet + Send + Sync>(pub F);

impl<F: Fn(f64, f64) -> GraphJet + Send + Sync> GraphFunction for GraphFn<F> {
    fn value(&self, x: f64, y: f64) -> f64 {
        (self.0)(x, y).u
    }
    fn jet(&self, x: f64, y: f64) -> GraphJet {
        (self.0)(x, y)
    }
}

/// Affine plane n·p = d, parameterized over [-2, 2]² in an orthonormal
/// Euclidean basis of the plane.
pub struct Plane {
    origin: [f64; 3],
    e1: [f64; 3],
    e2: [f64; 3],
}

impl Immersion for Plane {
    fn domain(&self) -> ParamDomain {
        ParamDomain::closed((-2.0, 2.0), (-2.0, 2.0))
    }
    fn point(&self, u: f64, v: f64) -> Point {
        let c = |i: usize| self.origin[i] + u * self.e1[i] + v * self.e2[i];
        Point::new(c(0), c(1), c(2))
    }
    fn partials(&self, u: f64, v: f64) -> (FrameVector, FrameVector) {
        let p = self.point(u, v);
        (cartesian_to_frame(p, self.e1), cartesian_to_frame(p, self.e2))
    }
}

fn unit(v: [f64; 3]) -> [f64; 3] {
    let l = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / l, v[1] / l, v[2] / l]
}

fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub fn plane(n: [f64; 3], d: f64) -> Result<Surface> {
    let len2 = n[0] * n[0] + n[1] * n[1] + n[2] * n[2];
    if !(len2 > 0.0) {
        return Err(Error::InvalidParameter("plane normal must be non-zero".into()));
    }
    let nu = unit(n);
    let helper = if nu[2].abs() < 0.9 { [0.0, 0.0, 1.0] } else { [1.0, 0.0, 0.0] };
    let e1 = unit(cross3(helper, nu));
    let e2 = cross3(nu, e1);
    let origin = [d * n[0] / len2, d * n[1] / len2, d * n[2] / len2];
    let patch = ImmersedPatch::from_immersion(Plane { origin, e1, e2 }, Orientation::Positive);
    Ok(Surface::single("plane", patch, false, Some(0.0)))
}

/// Right circular cylinder x² + y² = ρ², t ∈ [-1, 1].
pub struct VerticalCylinder {
    pub rho: f64,
}

impl Immersion for VerticalCylinder {
    fn domain(&self) -> ParamDomain {
        ParamDomain::closed((0.0, 2.0 * PI), (-1.0, 1.0))
    }
    fn point(&self, phi: f64, t: f64) -> Point {
        Point::new(self.rho * phi.cos(), self.rho * phi.sin(), t)
    }
    fn partials(&self, phi: f64, t: f64) -> (FrameVector, FrameVector) {
        let p = self.point(phi, t);
        let (s, c) = phi.sin_cos();
        (cartesian_to_frame(p, [-self.rho * s, self.rho * c, 0.0]), FrameVector::T)
    }
}

pub fn vertical_cylinder(rho: f64) -> Result<Surface> {
    if !(rho > 0.0) {
        return Err(Error::InvalidParameter("cylinder radius must be positive".into()));
    }
    let patch = ImmersedPatch::from_immersion(VerticalCylinder { rho }, Orientation::Positive);
    Ok(Surface::single("vertical_cylinder", patch, false, None))
}

/// Union of the geodesics of curvature λ from the origin, (θ, s) ∈ [0, 2π] × (0, π/λ).
pub struct GeodesicSphere {
    pub lambda: f64,
}

impl GeodesicSphere {
    fn variation(&self, theta: f64) -> GeodesicVariation {
        let (s, c) = theta.sin_cos();
        GeodesicVariation {
            base: Point::ORIGIN,
            base_rate: [0.0; 3],
            dir: [c, s],
            dir_rate: [-s, c],
            lambda: self.lambda,
        }
    }
}

impl Immersion for GeodesicSphere {
    fn domain(&self) -> ParamDomain {
        ParamDomain { u: (0.0, 2.0 * PI), v: (0.0, PI / self.lambda), open: [false, false, true, true] }
    }
    fn point(&self, theta: f64, s: f64) -> Point {
        self.variation(theta).eval(s).point
    }
    fn partials(&self, theta: f64, s: f64) -> (FrameVector, FrameVector) {
        let jet = self.variation(theta).eval(s);
        (jet.variation, jet.velocity)
    }
}

/// The sphere 𝕊_λ with its inner normal.
pub fn sphere_geodesic(lambda: f64) -> Result<Surface> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter("sphere curvature must be positive".into()));
    }
    let patch = ImmersedPatch::from_immersion(GeodesicSphere { lambda }, Orientation::Negative);
    Ok(Surface::single("sphere", patch, true, Some(lambda)))
}

/// One sheet t = π/(4λ²) ± (λρ√(1-λ²ρ²) + arccos(λρ))/(2λ²) of 𝕊_λ.
#[derive(Clone, Copy, Debug)]
pub struct SphereSheet {
    pub lambda: f64,
    /// +1 for the upper sheet, -1 for the lower one.
    pub sign: f64,
}

impl SphereSheet {
    /// g(ρ), g'(ρ), g''(ρ).
    pub fn radial(&self, rho: f64) -> [f64; 3] {
        let l = self.lambda;
        let q = 1.0 - l * l * rho * rho;
        let root = q.sqrt();
        let g = PI / (4.0 * l * l) + self.sign * (l * rho * root + (l * rho).acos()) / (2.0 * l * l);
        let g1 = -self.sign * l * rho * rho / root;
        let g2 = -self.sign * l * rho * (2.0 - l * l * rho * rho) / (q * root);
        [g, g1, g2]
    }
}

impl GraphFunction for SphereSheet {
    fn value(&self, x: f64, y: f64) -> f64 {
        self.radial(x.hypot(y))[0]
    }
    fn jet(&self, x: f64, y: f64) -> GraphJet {
        let rho = x.hypot(y);
        let [g, g1, g2] = self.radial(rho);
        let (r2, r3) = (rho * rho, rho * rho * rho);
        GraphJet {
            u: g,
            ux: g1 * x / rho,
            uy: g1 * y / rho,
            uxx: g2 * x * x / r2 + g1 * y * y / r3,
            uxy: g2 * x * y / r2 - g1 * x * y / r3,
            uyy: g2 * y * y / r2 + g1 * x * x / r3,
        }
    }
}

/// A sphere sheet in parameters (φ, α) ∈ [0, 2π] × (0, π/2], ρ = sin(α)/λ.
pub struct PolarSheet {
    pub sheet: SphereSheet,
}

impl Immersion for PolarSheet {
    fn domain(&self) -> ParamDomain {
        ParamDomain { u: (0.0, 2.0 * PI), v: (0.0, FRAC_PI_2), open: [false, false, true, false] }
    }
    fn point(&self, phi: f64, alpha: f64) -> Point {
        let (s, c) = phi.sin_cos();
        let rho = alpha.sin() / self.sheet.lambda;
        Point::new(rho * c, rho * s, self.sheet.radial(rho)[0])
    }
    fn partials(&self, phi: f64, alpha: f64) -> (FrameVector, FrameVector) {
        let (s, c) = phi.sin_cos();
        let l = self.sheet.lambda;
        let (sa, ca) = alpha.sin_cos();
        let rho = sa / l;
        let p = self.point(phi, alpha);
        (
            cartesian_to_frame(p, [-rho * s, rho * c, 0.0]),
            cartesian_to_frame(p, [c * ca / l, s * ca / l, -self.sheet.sign * rho * rho]),
        )
    }
    fn graph(&self) -> Option<Arc<dyn GraphFunction>> {
        Some(Arc::new(self.sheet))
    }
}

/// 𝕊_λ as two radial graphs (lower sheet first), inner normal.
pub fn sphere_graph(lambda: f64) -> Result<Surface> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter("sphere curvature must be positive".into()));
    }
    let lower = PolarSheet { sheet: SphereSheet { lambda, sign: -1.0 } };
    let upper = PolarSheet { sheet: SphereSheet { lambda, sign: 1.0 } };
    Ok(Surface {
        name: "sphere_graph".into(),
        patches: vec![
            ImmersedPatch::from_immersion(lower, Orientation::Negative),
            ImmersedPatch::from_immersion(upper, Orientation::Positive),
        ],
        closed: true,
        mean_curvature: Some(lambda),
    })
}

/// Sheets of the cylinder S_λ over the strip |y| < 1/(2|λ|).
#[derive(Clone, Copy, Debug)]
pub struct CylinderSheet {
    pub lambda: f64,
    /// false: the sheet f containing the x-axis; true: the sheet g.
    pub upper: bool,
}

impl CylinderSheet {
    /// The y-dependent part and its first two derivatives.
    fn profile(&self, y: f64) -> [f64; 3] {
        let l = self.lambda;
        let sy = if y < 0.0 { -1.0 } else { 1.0 };
        let q = 1.0 - 4.0 * l * l * y * y;
        let root = q.sqrt();
        let asn = (2.0 * l * y).asin();
        let d1 = sy * 4.0 * l * y * y / root;
        let d2 = sy * 4.0 * l * y * (2.0 - 4.0 * l * l * y * y) / (q * root);
        if self.upper {
            let v = ((l.signum() * PI - sy * asn) / (2.0 * l) + sy * y * root) / (2.0 * l);
            [v, -d1, -d2]
        } else {
            let v = sy * (asn / (2.0 * l) - y * root) / (2.0 * l);
            [v, d1, d2]
        }
    }
}

impl GraphFunction for CylinderSheet {
    fn value(&self, x: f64, y: f64) -> f64 {
        self.profile(y)[0] - x * y
    }
    fn jet(&self, x: f64, y: f64) -> GraphJet {
        let [v, d1, d2] = self.profile(y);
        GraphJet { u: v - x * y, ux: -y, uy: d1 - x, uxx: 0.0, uxy: -1.0, uyy: d2 }
    }
}

/// S_λ as the graphs f (containing the x-axis) and g over x ∈ `x_range`,
/// oriented so that the mean curvature is λ.
pub fn cylinder_s(lambda: f64, x_range: (f64, f64)) -> Result<Surface> {
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(Error::ZeroCurvature);
    }
    let w = 1.0 / (2.0 * lambda.abs());
    let domain = ParamDomain { u: x_range, v: (-w, w), open: [false, false, true, true] };
    let f = GraphPatch { f: Arc::new(CylinderSheet { lambda, upper: false }), domain };
    let g = GraphPatch { f: Arc::new(CylinderSheet { lambda, upper: true }), domain };
    Ok(Surface {
        name: "cylinder_S".into(),
        patches: vec![
            ImmersedPatch::from_immersion(f, Orientation::Positive),
            ImmersedPatch::from_immersion(g, Orientation::Negative),
        ],
        closed: false,
        mean_curvature: Some(lambda),
    })
}

/// The graph t = xy + g(y).
pub struct BernsteinGraph {
    pub g: Profile,
}

impl GraphFunction for BernsteinGraph {
    fn value(&self, x: f64, y: f64) -> f64 {
        x * y + (self.g)(y)[0]
    }
    fn jet(&self, x: f64, y: f64) -> GraphJet {
        let [g, g1, g2] = (self.g)(y);
        GraphJet { u: x * y + g, ux: y, uy: x + g1, uxx: 0.0, uxy: 1.0, uyy: g2 }
    }
}

pub fn bernstein_graph(g: Profile, x_range: (f64, f64), y_range: (f64, f64)) -> Surface {
    let patch = GraphPatch {
        f: Arc::new(BernsteinGraph { g }),
        domain: ParamDomain::closed(x_range, y_range),
    };
    Surface::single("bernstein", ImmersedPatch::from_immersion(patch, Orientation::Positive), false, Some(0.0))
}

/// Polynomial profile g(y) = Σ c_k y^k.
pub fn polynomial_profile(coeffs: Vec<f64>) -> Profile {
    Arc::new(move |y: f64| {
        let (mut g, mut g1, mut g2) = (0.0, 0.0, 0.0);
        for &c in coeffs.iter().rev() {
            g2 = g2 * y + 2.0 * g1;
            g1 = g1 * y + g;
            g = g * y + c;
        }
        [g, g1, g2]
    })
}

/// Round Euclidean sphere of radius R about the origin, inner normal.
pub struct EuclideanSphere {
    pub radius: f64,
}

impl Immersion for EuclideanSphere {
    fn domain(&self) -> ParamDomain {
        ParamDomain { u: (0.0, 2.0 * PI), v: (0.0, PI), open: [false, false, true, true] }
    }
    fn point(&self, b: f64, a: f64) -> Point {
        let r = self.radius;
        Point::new(r * a.sin() * b.cos(), r * a.sin() * b.sin(), r * a.cos())
    }
    fn partials(&self, b: f64, a: f64) -> (FrameVector, FrameVector) {
        let r = self.radius;
        let p = self.point(b, a);
        let (sa, ca) = a.sin_cos();
        let (sb, cb) = b.sin_cos();
        (
            cartesian_to_frame(p, [-r * sa * sb, r * sa * cb, 0.0]),
            cartesian_to_frame(p, [r * ca * cb, r * ca * sb, -r * sa]),
        )
    }
}

pub fn euclidean_sphere(radius: f64) -> Result<Surface> {
    if !(radius > 0.0) {
        return Err(Error::InvalidParameter("radius must be positive".into()));
    }
    let patch = ImmersedPatch::from_immersion(EuclideanSphere { radius }, Orientation::Positive);
    Ok(Surface::single("euclidean_sphere", patch, true, None))
}

/// Parameters understood by [`build`]; unused fields are ignored.
#[derive(Clone)]
pub struct SurfaceParams {
    pub lambda: f64,
    pub r: f64,
    pub rho: f64,
    pub normal: [f64; 3],
    pub offset: f64,
    pub g: Option<Profile>,
    pub curve: Option<Arc<dyn HorizontalCurve>>,
    pub k_max: usize,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub s_range: (f64, f64),
}

impl Default for SurfaceParams {
    fn default() -> Self {
        SurfaceParams {
            lambda: 1.0,
            r: 1.0,
            rho: 1.0,
            normal: [0.0, 0.0, 1.0],
            offset: 0.0,
            g: None,
            curve: None,
            k_max: 2,
            x_range: (-1.0, 1.0),
            y_range: (-1.0, 1.0),
            s_range: (-1.0, 1.0),
        }
    }
}

pub const CATALOG: &[&str] = &[
    "plane",
    "vertical_plane",
    "vertical_cylinder",
    "sphere",
    "sphere_graph",
    "cylinder_S",
    "helicoid_L",
    "bernstein",
    "sigma-lambda",
    "sigma-zero",
    "euclidean_sphere",
];

fn canonical(name: &str) -> Option<&'static str> {
    let alias = match name {
        "cylinder" | "cylinder_s" => "cylinder_S",
        "helicoid" | "helicoid_l" => "helicoid_L",
        "sigma_lambda" => "sigma-lambda",
        "sigma_zero" => "sigma-zero",
        other => other,
    };
    CATALOG.iter().copied().find(|n| *n == alias)
}

pub fn catalog() -> &'static [&'static str] {
    CATALOG
}

/// Builds a named surface.
pub fn build(name: &str, p: &SurfaceParams) -> Result<Surface> {
    let name = canonical(name).ok_or_else(|| Error::UnknownSurface(name.to_string()))?;
    let curve = || -> Arc<dyn HorizontalCurve> {
        p.curve.clone().unwrap_or_else(|| Arc::new(x_axis(p.x_range)))
    };
    match name {
        "plane" => plane(p.normal, p.offset),
        "vertical_plane" => plane([0.0, 1.0, 0.0], 0.0),
        "vertical_cylinder" => vertical_cylinder(p.rho),
        "sphere" => sphere_geodesic(p.lambda),
        "sphere_graph" => sphere_graph(p.lambda),
        "cylinder_S" => cylinder_s(p.lambda, p.x_range),
        "helicoid_L" => {
            let h = helicoid_l(p.lambda, p.r, p.k_max.max(1))?;
            Ok(Surface {
                name: name.into(),
                patches: h.pieces.into_iter().map(|piece| piece.patch).collect(),
                closed: false,
                mean_curvature: Some(p.lambda),
            })
        }
        "bernstein" => {
            let g = p.g.clone().unwrap_or_else(|| polynomial_profile(vec![]));
            Ok(bernstein_graph(g, p.x_range, p.y_range))
        }
        "sigma-lambda" => {
            let gamma = curve();
            let (plus, _) = build_sigma_lambda(gamma.clone(), p.lambda, Side::PlusJ)?;
            Ok(Surface::single(name, plus, false, Some(p.lambda)))
        }
        "sigma-zero" => {
            let (patch, _) = build_sigma_zero(curve(), p.s_range);
            Ok(Surface::single(name, patch, false, Some(0.0)))
        }
        "euclidean_sphere" => euclidean_sphere(p.rho),
        _ => Err(Error::UnknownSurface(name.to_string())),
    }
}
