//! Tensor-grid sampling of patches, singular-set detection and export.

use std::io::Write;

use rayon::prelude::*;

use crate::curvature::mean_curvature_char;
use crate::error::{Error, Result};
use crate::hgroup::Point;
use crate::tol::{H_CHAR, TOL_SINGULAR};

use super::{ImmersedPatch, Surface};

/// Open edges are sampled this fraction of the side length inside the domain.
pub const OPEN_EDGE_INSET: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeshVertex {
    pub eps: f64,
    pub s: f64,
    pub point: Point,
    pub nh_norm: f64,
    pub h_est: Option<f64>,
}

/// Vertices on an `n_eps × n_s` grid, stored row-major: index = i·n_s + j.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceMesh {
    pub n_eps: usize,
    pub n_s: usize,
    pub vertices: Vec<MeshVertex>,
}

fn grid(range: (f64, f64), open: (bool, bool), n: usize) -> Vec<f64> {
    let width = range.1 - range.0;
    let lo = range.0 + if open.0 { OPEN_EDGE_INSET * width } else { 0.0 };
    let hi = range.1 - if open.1 { OPEN_EDGE_INSET * width } else { 0.0 };
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

pub fn mesh(p: &ImmersedPatch, n_eps: usize, n_s: usize) -> Result<SurfaceMesh> {
    build_mesh(p, n_eps, n_s, false)
}

/// Like [`mesh`], with the characteristic mean curvature at regular vertices.
pub fn mesh_with_curvature(p: &ImmersedPatch, n_eps: usize, n_s: usize) -> Result<SurfaceMesh> {
    build_mesh(p, n_eps, n_s, true)
}

fn build_mesh(p: &ImmersedPatch, n_eps: usize, n_s: usize, with_h: bool) -> Result<SurfaceMesh> {
    if n_eps < 2 || n_s < 2 {
        return Err(Error::InvalidParameter("mesh resolution must be at least 2 in each direction".into()));
    }
    let d = p.domain();
    let us = grid(d.u, (d.open[0], d.open[1]), n_eps);
    let vs = grid(d.v, (d.open[2], d.open[3]), n_s);
    let rows: Vec<Result<Vec<MeshVertex>>> = us
        .par_iter()
        .map(|&u| {
            vs.iter()
                .map(|&v| {
                    let nd = p.normal_data_tol(u, v, 0.0)?;
                    let h_est = if with_h { mean_curvature_char(p, u, v, H_CHAR).ok() } else { None };
                    Ok(MeshVertex { eps: u, s: v, point: nd.point, nh_norm: nd.nh_norm, h_est })
                })
                .collect()
        })
        .collect();
    let mut vertices = Vec::with_capacity(n_eps * n_s);
    for row in rows {
        vertices.extend(row?);
    }
    Ok(SurfaceMesh { n_eps, n_s, vertices })
}

/// Meshes every patch of a surface.
pub fn mesh_surface(s: &Surface, n_eps: usize, n_s: usize, with_h: bool) -> Result<Vec<SurfaceMesh>> {
    s.patches.iter().map(|p| build_mesh(p, n_eps, n_s, with_h)).collect()
}

impl SurfaceMesh {
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n_s + j
    }

    /// Two triangles per grid cell, as 0-based vertex indices.
    pub fn triangles(&self) -> Vec<[usize; 3]> {
        let mut out = Vec::with_capacity(2 * (self.n_eps - 1) * (self.n_s - 1));
        for i in 0..self.n_eps - 1 {
            for j in 0..self.n_s - 1 {
                let (a, b) = (self.index(i, j), self.index(i + 1, j));
                let (c, d) = (self.index(i + 1, j + 1), self.index(i, j + 1));
                out.push([a, b, c]);
                out.push([a, c, d]);
            }
        }
        out
    }
}

/// Indices of vertices with |N_H| below `tol_singular`.
pub fn detect_singular(m: &SurfaceMesh, tol_singular: f64) -> Vec<usize> {
    (0..m.vertices.len()).filter(|&k| m.vertices[k].nh_norm < tol_singular).collect()
}

pub fn detect_singular_default(m: &SurfaceMesh) -> Vec<usize> {
    detect_singular(m, TOL_SINGULAR)
}

/// Connected components (8-neighbourhood on the grid) of a vertex set,
/// each sorted, ordered by smallest index.
pub fn singular_components(m: &SurfaceMesh, flagged: &[usize]) -> Vec<Vec<usize>> {
    let mut mark = vec![false; m.vertices.len()];
    for &k in flagged {
        mark[k] = true;
    }
    let mut seen = vec![false; m.vertices.len()];
    let mut comps = Vec::new();
    for &start in flagged {
        if seen[start] {
            continue;
        }
        let mut comp = Vec::new();
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(k) = stack.pop() {
            comp.push(k);
            let (i, j) = ((k / m.n_s) as isize, (k % m.n_s) as isize);
            for di in -1..=1 {
                for dj in -1..=1 {
                    let (a, b) = (i + di, j + dj);
                    if a < 0 || b < 0 || a >= m.n_eps as isize || b >= m.n_s as isize {
                        continue;
                    }
                    let q = m.index(a as usize, b as usize);
                    if mark[q] && !seen[q] {
                        seen[q] = true;
                        stack.push(q);
                    }
                }
            }
        }
        comp.sort_unstable();
        comps.push(comp);
    }
    comps.sort_by_key(|c| c[0]);
    comps
}

/// Wavefront OBJ with the meshes concatenated.
pub fn write_obj<W: Write>(meshes: &[SurfaceMesh], mut w: W) -> std::io::Result<()> {
    for m in meshes {
        for v in &m.vertices {
            writeln!(w, "v {} {} {}", v.point.x, v.point.y, v.point.t)?;
        }
    }
    let mut offset = 1;
    for m in meshes {
        for [a, b, c] in m.triangles() {
            writeln!(w, "f {} {} {}", a + offset, b + offset, c + offset)?;
        }
        offset += m.vertices.len();
    }
    Ok(())
}

/// CSV with header `eps,s,x,y,t,nh_norm,h_est`; missing estimates are empty.
pub fn write_mesh_csv<W: Write>(meshes: &[SurfaceMesh], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let io = |e: csv::Error| Error::InvalidParameter(format!("csv output failed: {e}"));
    out.write_record(["eps", "s", "x", "y", "t", "nh_norm", "h_est"]).map_err(io)?;
    for m in meshes {
        for v in &m.vertices {
            let h = v.h_est.map(|h| h.to_string()).unwrap_or_default();
            out.write_record([
                v.eps.to_string(),
                v.s.to_string(),
                v.point.x.to_string(),
                v.point.y.to_string(),
                v.point.t.to_string(),
                v.nh_norm.to_string(),
                h,
            ])
            .map_err(io)?;
        }
    }
    out.flush().map_err(|e| Error::InvalidParameter(format!("csv output failed: {e}")))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surfaces::catalog::{plane, sphere_geodesic};

    #[test]
    fn grid_is_row_major() {
        let s = sphere_geodesic(1.0).unwrap();
        let m = mesh(&s.patches[0], 4, 3).unwrap();
        assert_eq!(m.vertices.len(), 12);
        assert_eq!(m.vertices[m.index(1, 0)].eps, m.vertices[3].eps);
        assert!(m.vertices[1].s > m.vertices[0].s);
        assert_eq!(m.triangles().len(), 2 * 3 * 2);
    }

    #[test]
    fn horizontal_plane_has_one_singular_point() {
        let s = plane([0.0, 0.0, 1.0], 0.0).unwrap();
        let m = mesh(&s.patches[0], 65, 65).unwrap();
        let flagged = detect_singular(&m, TOL_SINGULAR);
        assert_eq!(flagged.len(), 1);
        let v = m.vertices[flagged[0]];
        assert!(v.point.coord_distance(Point::ORIGIN) < 1e-12);
    }

    #[test]
    fn vertical_plane_has_no_singular_points() {
        let s = plane([0.0, 1.0, 0.0], 0.0).unwrap();
        let m = mesh(&s.patches[0], 33, 33).unwrap();
        assert!(detect_singular(&m, TOL_SINGULAR).is_empty());
    }

    #[test]
    fn components_split_separate_rows() {
        let s = sphere_geodesic(1.0).unwrap();
        let m = mesh(&s.patches[0], 16, 16).unwrap();
        let flagged = detect_singular(&m, TOL_SINGULAR);
        let comps = singular_components(&m, &flagged);
        assert_eq!(comps.len(), 2);
        assert!(comps.iter().all(|c| c.len() == 16));
    }

    #[test]
    fn obj_and_csv_shapes() {
        let s = sphere_geodesic(1.0).unwrap();
        let m = mesh(&s.patches[0], 5, 4).unwrap();
        let mut obj = Vec::new();
        write_obj(std::slice::from_ref(&m), &mut obj).unwrap();
        let text = String::from_utf8(obj).unwrap();
        assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 20);
        assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), 24);
        assert!(text.contains("f 1 5 6"));
        let mut csv = Vec::new();
        write_mesh_csv(std::slice::from_ref(&m), &mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert_eq!(text.lines().next().unwrap(), "eps,s,x,y,t,nh_norm,h_est");
        assert_eq!(text.lines().count(), 21);
    }
}
