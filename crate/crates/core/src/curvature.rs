//! Mean curvature, stationarity at singular curves and calibration fields.

use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geodesics::{geodesic_point, GeodesicSpec};
use crate::hgroup::{cov_deriv, divergence, FrameVector, Point};
use crate::surfaces::{solve_tangent, GraphFunction, ImmersedPatch, Profile};
use crate::tol::{H_CHAR, H_FD, TOL_SINGULAR};

/// Regular-point guard on |N_H|.
pub const REGULAR_GUARD: f64 = 10.0 * TOL_SINGULAR;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Characteristic,
    GraphPde,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Characteristic => "characteristic",
            Method::GraphPde => "graph_pde",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvatureReport {
    pub eps: f64,
    pub s: f64,
    pub h_est: f64,
    pub method: Method,
    pub residual: f64,
}

/// Parameter-space velocity of the characteristic field Z at (u, v).
fn z_param(p: &ImmersedPatch, u: f64, v: f64) -> Result<(f64, f64)> {
    let nd = p.normal_data(u, v)?;
    let z = nd.z.ok_or(Error::SingularPoint(u, v))?;
    Ok(solve_tangent(nd.fu, nd.fv, z))
}

/// One classical RK4 step of arclength `h` along Z in parameter space.
pub fn rk4_step(p: &ImmersedPatch, (u, v): (f64, f64), h: f64) -> Result<(f64, f64)> {
    let k1 = z_param(p, u, v)?;
    let k2 = z_param(p, u + 0.5 * h * k1.0, v + 0.5 * h * k1.1)?;
    let k3 = z_param(p, u + 0.5 * h * k2.0, v + 0.5 * h * k2.1)?;
    let k4 = z_param(p, u + h * k3.0, v + h * k3.1)?;
    Ok((
        u + h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
        v + h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
    ))
}

/// H = -½⟨D_Z ν_H, Z⟩, differentiating ν_H along an RK4 trace of Z.
pub fn mean_curvature_char(p: &ImmersedPatch, u: f64, v: f64, h_fd: f64) -> Result<f64> {
    let nd = p.normal_data(u, v)?;
    if nd.nh_norm < REGULAR_GUARD {
        return Err(Error::SingularPoint(u, v));
    }
    let (z, nu) = (nd.z.expect("regular"), nd.nu_h.expect("regular"));
    let nu_at = |q: (f64, f64)| -> Result<FrameVector> {
        p.normal_data(q.0, q.1)?.nu_h.ok_or(Error::SingularPoint(q.0, q.1))
    };
    let fwd = nu_at(rk4_step(p, (u, v), h_fd)?)?;
    let bwd = nu_at(rk4_step(p, (u, v), -h_fd)?)?;
    let d = cov_deriv(z, nu, (fwd - bwd) * (0.5 / h_fd));
    Ok(-0.5 * d.dot(z))
}

/// Sample of a characteristic curve: arclength, parameters and point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceSample {
    pub arclength: f64,
    pub param: (f64, f64),
    pub point: Point,
}

/// Fixed-step RK4 integral curve of Z from (u, v) over signed arclength `length`.
pub fn characteristic_trace(p: &ImmersedPatch, u: f64, v: f64, length: f64, steps: usize) -> Result<Vec<TraceSample>> {
    let h = length / steps as f64;
    let mut q = (u, v);
    let mut out = Vec::with_capacity(steps + 1);
    out.push(TraceSample { arclength: 0.0, param: q, point: p.point(u, v) });
    for k in 1..=steps {
        q = rk4_step(p, q, h)?;
        if !p.domain().contains(q.0, q.1) {
            return Err(Error::InvalidParameter(format!(
                "characteristic trace left the domain after arclength {}",
                (k - 1) as f64 * h
            )));
        }
        if p.normal_data(q.0, q.1)?.nh_norm < REGULAR_GUARD {
            return Err(Error::SingularPoint(q.0, q.1));
        }
        out.push(TraceSample { arclength: k as f64 * h, param: q, point: p.point(q.0, q.1) });
    }
    Ok(out)
}

/// Largest coordinate distance between the characteristic trace through
/// (u, v) over arclength [-length/2, length/2] and the geodesic of curvature
/// `h` launched from the same point along Z.
pub fn ruling_deviation(p: &ImmersedPatch, u: f64, v: f64, h: f64, length: f64, steps: usize) -> Result<f64> {
    let nd = p.normal_data(u, v)?;
    if nd.nh_norm < REGULAR_GUARD {
        return Err(Error::SingularPoint(u, v));
    }
    let z = nd.z.expect("regular");
    let g = GeodesicSpec::from_direction(nd.point, z.a, z.b, h);
    let mut worst: f64 = 0.0;
    for dir in [1.0, -1.0] {
        for sample in characteristic_trace(p, u, v, dir * 0.5 * length, steps / 2)? {
            worst = worst.max(sample.point.coord_distance(geodesic_point(&g, sample.arclength)));
        }
    }
    Ok(worst)
}

/// LHS - RHS of the graph equation for mean curvature `h`, with respect to the
/// normal whose horizontal part points along (u_x - y, u_y + x).
pub fn graph_pde_residual(u: &dyn GraphFunction, x: f64, y: f64, h: f64) -> Result<f64> {
    let (lhs, w) = graph_pde_terms(u, x, y)?;
    Ok(lhs + 2.0 * h * w.powf(1.5))
}

/// The H solving the graph equation at (x, y).
pub fn graph_mean_curvature(u: &dyn GraphFunction, x: f64, y: f64) -> Result<f64> {
    let (lhs, w) = graph_pde_terms(u, x, y)?;
    Ok(-lhs / (2.0 * w.powf(1.5)))
}

fn graph_pde_terms(u: &dyn GraphFunction, x: f64, y: f64) -> Result<(f64, f64)> {
    let g = u.jet(x, y);
    let (p, q) = (g.ux - y, g.uy + x);
    let w = p * p + q * q;
    if w < TOL_SINGULAR * TOL_SINGULAR {
        return Err(Error::SingularPoint(x, y));
    }
    Ok((q * q * g.uxx - 2.0 * p * q * g.uxy + p * p * g.uyy, w))
}

/// Graph-equation mean curvature at (u, v) of a graph patch, with respect to
/// the patch's own orientation.
pub fn patch_graph_mean_curvature(p: &ImmersedPatch, u: f64, v: f64) -> Result<f64> {
    let graph = p
        .immersion
        .graph()
        .ok_or_else(|| Error::InvalidParameter("patch is not a graph".into()))?;
    let nd = p.normal_data(u, v)?;
    let h = graph_mean_curvature(graph.as_ref(), nd.point.x, nd.point.y)?;
    Ok(if nd.n.c < 0.0 { h } else { -h })
}

/// Characteristic mean curvature on an interior grid of regular points.
/// For graph patches each sample is followed by its graph-equation value.
pub fn curvature_report(p: &ImmersedPatch, n_eps: usize, n_s: usize, h_ref: Option<f64>) -> Vec<CurvatureReport> {
    let d = p.domain();
    let points: Vec<(f64, f64)> = (0..n_eps)
        .flat_map(|i| (0..n_s).map(move |k| (i, k)))
        .map(|(i, k)| d.at((i as f64 + 0.5) / n_eps as f64, (k as f64 + 0.5) / n_s as f64))
        .collect();
    let is_graph = p.immersion.graph().is_some();
    let rows: Vec<Vec<CurvatureReport>> = points
        .par_iter()
        .map(|&(u, v)| {
            let mut rows = Vec::new();
            if let Ok(h) = mean_curvature_char(p, u, v, H_CHAR) {
                let residual = h_ref.map_or(f64::NAN, |r| h - r);
                rows.push(CurvatureReport { eps: u, s: v, h_est: h, method: Method::Characteristic, residual });
                if is_graph {
                    if let Ok(hp) = patch_graph_mean_curvature(p, u, v) {
                        rows.push(CurvatureReport { eps: u, s: v, h_est: hp, method: Method::GraphPde, residual: hp - h });
                    }
                }
            }
            rows
        })
        .collect();
    rows.into_iter().flatten().collect()
}

/// CSV with header `eps,s,H_est,residual,method`.
pub fn write_curvature_csv<W: Write>(rows: &[CurvatureReport], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let io = |e: csv::Error| Error::InvalidParameter(format!("csv output failed: {e}"));
    out.write_record(["eps", "s", "H_est", "residual", "method"]).map_err(io)?;
    for r in rows {
        let residual = if r.residual.is_nan() { String::new() } else { r.residual.to_string() };
        out.write_record([r.eps.to_string(), r.s.to_string(), r.h_est.to_string(), residual, r.method.as_str().into()])
            .map_err(io)?;
    }
    out.flush().map_err(|e| Error::InvalidParameter(format!("csv output failed: {e}")))?;
    Ok(())
}

/// A curve of singular points on a patch, in parameter space, with the
/// parameter direction pointing into the regular side to be probed.
#[derive(Clone)]
pub struct SingularCurve {
    pub param: Arc<dyn Fn(f64) -> (f64, f64) + Send + Sync>,
    pub into_regular: (f64, f64),
}

impl SingularCurve {
    pub fn new(param: impl Fn(f64) -> (f64, f64) + Send + Sync + 'static, into_regular: (f64, f64)) -> Self {
        SingularCurve { param: Arc::new(param), into_regular }
    }

    /// The row v = v0, parameterized by u.
    pub fn row(v0: f64, into_regular: f64) -> Self {
        SingularCurve::new(move |u| (u, v0), (0.0, into_regular))
    }

    /// The column u = u0, parameterized by v.
    pub fn column(u0: f64, into_regular: f64) -> Self {
        SingularCurve::new(move |v| (u0, v), (into_regular, 0.0))
    }
}

/// ⟨Z, Γ'⟩ at parameter `eps` of a singular curve, with Z the one-sided limit
/// of the characteristic field (Richardson extrapolation of probes at
/// 10·tol_singular and twice that) and Γ' the curve's own derivative.
pub fn orthogonality_defect(p: &ImmersedPatch, curve: &SingularCurve, eps: f64) -> Result<f64> {
    let (u0, v0) = (curve.param)(eps);
    let nd = p.normal_data_tol(u0, v0, 0.0)?;
    if nd.nh_norm > REGULAR_GUARD {
        return Err(Error::NoSingularCurve(eps));
    }
    let probe = |delta: f64| -> Result<FrameVector> {
        let (du, dv) = curve.into_regular;
        let (u, v) = (u0 + delta * du, v0 + delta * dv);
        p.normal_data_tol(u, v, 0.0)?.z.ok_or(Error::SingularPoint(u, v))
    };
    let delta = REGULAR_GUARD;
    let z = probe(delta)? * 2.0 - probe(2.0 * delta)?;
    let at = |e: f64| {
        let (u, v) = (curve.param)(e);
        p.point(u, v)
    };
    let (a, b) = (at(eps + H_FD), at(eps - H_FD));
    let tangent = crate::hgroup::cartesian_to_frame(
        nd.point,
        [(a.x - b.x) / (2.0 * H_FD), (a.y - b.y) / (2.0 * H_FD), (a.t - b.t) / (2.0 * H_FD)],
    );
    Ok(z.dot(tangent))
}

/// Foliations of H¹ by vertical translates of a surface t = u(x, y) + c.
#[derive(Clone)]
pub enum Foliation {
    /// Horizontal planes t = c; singular along the t-axis.
    Plane,
    /// t = xy + g(y) + c; singular where 2x + g'(y) = 0.
    Bernstein(Profile),
}

impl Foliation {
    pub fn affine(a: f64, b: f64) -> Self {
        Foliation::Bernstein(Arc::new(move |y| [a * y + b, a, 0.0]))
    }

    /// Signed quantity vanishing exactly on the singular locus.
    pub fn locus_function(&self, q: Point) -> f64 {
        match self {
            Foliation::Plane => q.x.hypot(q.y),
            Foliation::Bernstein(g) => 2.0 * q.x + g(q.y)[1],
        }
    }

    /// The horizontal unit normal of the leaf through q, for the upward normal.
    pub fn nu_h(&self, q: Point) -> Result<FrameVector> {
        match self {
            Foliation::Plane => {
                let r = q.x.hypot(q.y);
                if r == 0.0 {
                    return Err(Error::OnSingularLocus);
                }
                Ok(FrameVector::new(q.y / r, -q.x / r, 0.0))
            }
            Foliation::Bernstein(_) => {
                let c = self.locus_function(q);
                if c == 0.0 {
                    return Err(Error::OnSingularLocus);
                }
                Ok(FrameVector::new(0.0, -c.signum(), 0.0))
            }
        }
    }
}

/// Riemannian divergence of the foliation's ν_H at q by frame differences.
pub fn calibration_divergence(f: &Foliation, q: Point) -> Result<f64> {
    f.nu_h(q)?;
    let field = |p: Point| f.nu_h(p).unwrap_or(FrameVector::ZERO);
    divergence(&field, q, H_FD)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surfaces::catalog::{plane, sphere_geodesic, BernsteinGraph, SphereSheet};
    use crate::surfaces::polynomial_profile;

    #[test]
    fn plane_is_minimal() {
        let s = plane([0.0, 0.0, 1.0], 0.0).unwrap();
        let h = mean_curvature_char(&s.patches[0], 0.3, -0.4, H_CHAR).unwrap();
        assert!(h.abs() < 1e-8, "{h}");
    }

    #[test]
    fn sphere_has_curvature_lambda() {
        for lambda in [0.5, 1.0, 2.0] {
            let s = sphere_geodesic(lambda).unwrap();
            let h = mean_curvature_char(&s.patches[0], 0.7, 1.1 / lambda, H_CHAR).unwrap();
            assert!((h - lambda).abs() < 1e-6, "lambda {lambda}: {h}");
        }
    }

    #[test]
    fn flipping_negates_curvature() {
        let s = sphere_geodesic(1.0).unwrap();
        let a = mean_curvature_char(&s.patches[0], 2.0, 0.9, H_CHAR).unwrap();
        let b = mean_curvature_char(&s.patches[0].flipped(), 2.0, 0.9, H_CHAR).unwrap();
        assert!((a + b).abs() < 1e-9);
    }

    #[test]
    fn singular_point_rejected() {
        let s = plane([0.0, 0.0, 1.0], 0.0).unwrap();
        assert!(matches!(mean_curvature_char(&s.patches[0], 0.0, 0.0, H_CHAR), Err(Error::SingularPoint(..))));
    }

    #[test]
    fn graph_pde_vanishes_on_bernstein_graphs() {
        let g = BernsteinGraph { g: polynomial_profile(vec![7.0, 3.0]) };
        assert_eq!(graph_pde_residual(&g, 0.4, -1.3, 0.0).unwrap(), 0.0);
        let zero = BernsteinGraph { g: polynomial_profile(vec![]) };
        assert_eq!(graph_pde_residual(&zero, 0.4, 0.2, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn sphere_sheets_solve_graph_pde() {
        for sign in [1.0, -1.0] {
            let sheet = SphereSheet { lambda: 1.0, sign };
            let r = graph_pde_residual(&sheet, 0.3, 0.5, sign).unwrap();
            assert!(r.abs() < 1e-12, "{r}");
        }
    }

    #[test]
    fn numeric_jet_matches_analytic() {
        struct Numeric(SphereSheet);
        impl GraphFunction for Numeric {
            fn value(&self, x: f64, y: f64) -> f64 {
                self.0.value(x, y)
            }
        }
        let sheet = SphereSheet { lambda: 1.0, sign: 1.0 };
        let (a, b) = (sheet.jet(0.2, 0.3), Numeric(sheet).jet(0.2, 0.3));
        assert!((a.uxx - b.uxx).abs() < 1e-6 && (a.uxy - b.uxy).abs() < 1e-6);
    }

    #[test]
    fn plane_foliation_is_divergence_free() {
        let d = calibration_divergence(&Foliation::Plane, Point::new(0.3, -0.7, 1.2)).unwrap();
        assert!(d.abs() < 1e-8, "{d}");
        assert_eq!(calibration_divergence(&Foliation::Plane, Point::new(0.0, 0.0, 1.0)), Err(Error::OnSingularLocus));
    }
}
