//! Sub-Riemannian area, enclosed volume and the identities relating them.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::curvature::mean_curvature_char;
use crate::error::{Error, Result};
use crate::hgroup::w_field;
use crate::quad::{gl8, pairwise_sum};
use crate::surfaces::{ImmersedPatch, NormalData, Orientation, Surface};
use crate::tol::H_CHAR;

/// (8/3)³π², the isoperimetric ratio of the spheres.
pub const ISO_CONSTANT: f64 = 512.0 * PI * PI / 27.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub cells: usize,
}

impl QuadratureResult {
    fn combine(parts: &[QuadratureResult]) -> QuadratureResult {
        QuadratureResult {
            value: pairwise_sum(&parts.iter().map(|q| q.value).collect::<Vec<_>>()),
            error_estimate: parts.iter().map(|q| q.error_estimate).sum(),
            cells: parts.iter().map(|q| q.cells).sum(),
        }
    }
}

/// Tensor 8-point Gauss-Legendre rule on an n × n cell grid of a rectangle.
fn gl8_grid(p: &ImmersedPatch, u: (f64, f64), v: (f64, f64), n: usize, f: &(dyn Fn(&NormalData) -> f64 + Sync)) -> Result<f64> {
    let (nodes, weights) = gl8();
    let (du, dv) = ((u.1 - u.0) / n as f64, (v.1 - v.0) / n as f64);
    if du == 0.0 || dv == 0.0 {
        return Ok(0.0);
    }
    let rows: Vec<Result<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut cells = Vec::with_capacity(n);
            for k in 0..n {
                let mut acc = 0.0;
                for (a, wa) in nodes.iter().zip(weights) {
                    let uu = u.0 + du * (i as f64 + 0.5 + 0.5 * a);
                    for (b, wb) in nodes.iter().zip(weights) {
                        let vv = v.0 + dv * (k as f64 + 0.5 + 0.5 * b);
                        let val = match p.normal_data_tol(uu, vv, 0.0) {
                            Ok(nd) => f(&nd),
                            Err(Error::DegeneratePoint(..)) => 0.0,
                            Err(e) => return Err(e),
                        };
                        if !val.is_finite() {
                            return Err(Error::NonFinite);
                        }
                        acc += wa * wb * val;
                    }
                }
                cells.push(acc * 0.25 * du * dv);
            }
            Ok(pairwise_sum(&cells))
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<f64>>>()?;
    Ok(pairwise_sum(&rows))
}

/// Integral over the patch domain at resolution n, error from comparison with n/2.
pub fn integrate(p: &ImmersedPatch, n: usize, f: &(dyn Fn(&NormalData) -> f64 + Sync)) -> Result<QuadratureResult> {
    let d = p.domain();
    integrate_rect(p, d.u, d.v, n, f)
}

pub fn integrate_rect(
    p: &ImmersedPatch,
    u: (f64, f64),
    v: (f64, f64),
    n: usize,
    f: &(dyn Fn(&NormalData) -> f64 + Sync),
) -> Result<QuadratureResult> {
    let n = n.max(2);
    let fine = gl8_grid(p, u, v, n, f)?;
    let coarse = gl8_grid(p, u, v, n / 2, f)?;
    let floor = 64.0 * f64::EPSILON * fine.abs();
    Ok(QuadratureResult { value: fine, error_estimate: (fine - coarse).abs().max(floor), cells: n * n })
}

fn area_integrand(nd: &NormalData) -> f64 {
    nd.cross.horizontal_norm()
}

fn volume_integrand(nd: &NormalData) -> f64 {
    -0.25 * w_field(nd.point).dot(nd.cross)
}

/// A(Σ) = ∫|N_H| dΣ.
pub fn area(p: &ImmersedPatch, n: usize) -> Result<QuadratureResult> {
    integrate(p, n, &area_integrand)
}

/// -¼∫⟨W, N⟩ dΣ over an oriented patch; the enclosed volume when the patch
/// closes up and N is the inner normal.
pub fn volume_flux(p: &ImmersedPatch, n: usize) -> Result<QuadratureResult> {
    if p.orientation == Orientation::Unset {
        return Err(Error::OrientationUnset);
    }
    integrate(p, n, &volume_integrand)
}

/// Riemannian area ∫ dΣ.
pub fn riemannian_area(p: &ImmersedPatch, n: usize) -> Result<QuadratureResult> {
    integrate(p, n, &|nd| nd.cross.norm())
}

pub fn surface_area(s: &Surface, n: usize) -> Result<QuadratureResult> {
    let parts = s.patches.iter().map(|p| area(p, n)).collect::<Result<Vec<_>>>()?;
    Ok(QuadratureResult::combine(&parts))
}

pub fn surface_volume_flux(s: &Surface, n: usize) -> Result<QuadratureResult> {
    let parts = s.patches.iter().map(|p| volume_flux(p, n)).collect::<Result<Vec<_>>>()?;
    Ok(QuadratureResult::combine(&parts))
}

/// Volume enclosed by a closed surface with inner orientation.
pub fn volume_enclosed(s: &Surface, n: usize) -> Result<QuadratureResult> {
    if !s.closed {
        return Err(Error::NotClosed);
    }
    surface_volume_flux(s, n)
}

/// |3A - 8HV| / (3A).
pub fn minkowski_check(s: &Surface, h: f64, n: usize) -> Result<f64> {
    if !s.closed {
        return Err(Error::NotClosed);
    }
    let a = surface_area(s, n)?.value;
    let v = volume_enclosed(s, n)?.value;
    Ok((3.0 * a - 8.0 * h * v).abs() / (3.0 * a))
}

/// (A(φ_s Σ)/A(Σ), V(φ_s Σ)/V(Σ)); the volume is the flux of W for open surfaces.
pub fn dilation_homogeneity(s: &Surface, t: f64, n: usize) -> Result<(f64, f64)> {
    let d = s.dilated(t);
    let ratio_a = surface_area(&d, n)?.value / surface_area(s, n)?.value;
    let ratio_v = surface_volume_flux(&d, n)?.value / surface_volume_flux(s, n)?.value;
    Ok((ratio_a, ratio_v))
}

/// A⁴/V³.
pub fn iso_ratio(s: &Surface, n: usize) -> Result<f64> {
    let a = surface_area(s, n)?.value;
    let v = volume_enclosed(s, n)?.value;
    Ok(a.powi(4) / v.powi(3))
}

pub type Amplitude = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FirstVariation {
    pub a_prime: f64,
    pub v_prime: f64,
    /// |A'(0) - 2H·V'(0)|.
    pub defect: f64,
    /// -∫u dΣ.
    pub v_prime_direct: f64,
}

/// Derivatives of area and volume under the normal displacement t·u·N,
/// by central differences in t over all patches.
pub fn first_variation_check(s: &Surface, u: Amplitude, h: f64, dt: f64, n: usize) -> Result<FirstVariation> {
    if !(dt >= 1e-7) {
        return Err(Error::StepTooSmall(dt));
    }
    let displaced = |t: f64| s.map_patches(&s.name, None, |p| p.displaced(u.clone(), t));
    let (plus, minus) = (displaced(dt), displaced(-dt));
    let a_prime = (surface_area(&plus, n)?.value - surface_area(&minus, n)?.value) / (2.0 * dt);
    let v_prime = (surface_volume_flux(&plus, n)?.value - surface_volume_flux(&minus, n)?.value) / (2.0 * dt);
    let direct = -s
        .patches
        .iter()
        .map(|p| {
            let d = p.domain();
            integrate_weighted(p, d.u, d.v, n, &u)
        })
        .collect::<Result<Vec<f64>>>()?
        .iter()
        .sum::<f64>();
    Ok(FirstVariation { a_prime, v_prime, defect: (a_prime - 2.0 * h * v_prime).abs(), v_prime_direct: direct })
}

/// ∫u dΣ over a patch.
fn integrate_weighted(p: &ImmersedPatch, u: (f64, f64), v: (f64, f64), n: usize, amp: &Amplitude) -> Result<f64> {
    let (nodes, weights) = gl8();
    let (du, dv) = ((u.1 - u.0) / n as f64, (v.1 - v.0) / n as f64);
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let mut acc = 0.0;
        for k in 0..n {
            for (a, wa) in nodes.iter().zip(weights) {
                let uu = u.0 + du * (i as f64 + 0.5 + 0.5 * a);
                for (b, wb) in nodes.iter().zip(weights) {
                    let vv = v.0 + dv * (k as f64 + 0.5 + 0.5 * b);
                    let (fu, fv) = p.partials(uu, vv);
                    acc += wa * wb * amp(uu, vv) * fu.cross(fv).norm();
                }
            }
        }
        rows.push(acc * 0.25 * du * dv);
    }
    Ok(pairwise_sum(&rows))
}

/// Mean of the characteristic mean curvature over an interior grid.
pub fn average_mean_curvature(s: &Surface, n: usize) -> Option<f64> {
    let mut values = Vec::new();
    for p in &s.patches {
        let d = p.domain();
        for i in 0..n {
            for k in 0..n {
                let (u, v) = d.at((i as f64 + 0.5) / n as f64, (k as f64 + 0.5) / n as f64);
                if let Ok(h) = mean_curvature_char(p, u, v, H_CHAR) {
                    values.push(h);
                }
            }
        }
    }
    if values.is_empty() {
        None
    } else {
        Some(pairwise_sum(&values) / values.len() as f64)
    }
}

/// Structured measures report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeasuresReport {
    pub surface: String,
    pub lambda: Option<f64>,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "A_err")]
    pub a_err: f64,
    #[serde(rename = "V")]
    pub v: Option<f64>,
    #[serde(rename = "V_err")]
    pub v_err: Option<f64>,
    #[serde(rename = "H")]
    pub h: Option<f64>,
    pub minkowski_defect: Option<f64>,
    pub iso_ratio: Option<f64>,
}

pub fn measures_report(s: &Surface, lambda: Option<f64>, n: usize) -> Result<MeasuresReport> {
    let a = surface_area(s, n)?;
    let h = average_mean_curvature(s, 8);
    let (v, v_err, mink, iso) = if s.closed {
        let v = volume_enclosed(s, n)?;
        let mink = h.map(|h| (3.0 * a.value - 8.0 * h * v.value).abs() / (3.0 * a.value));
        (Some(v.value), Some(v.error_estimate), mink, Some(a.value.powi(4) / v.value.powi(3)))
    } else {
        (None, None, None, None)
    };
    Ok(MeasuresReport {
        surface: s.name.clone(),
        lambda,
        a: a.value,
        a_err: a.error_estimate,
        v,
        v_err,
        h,
        minkowski_defect: mink,
        iso_ratio: iso,
    })
}
