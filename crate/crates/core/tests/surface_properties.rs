//! Invariants of the surface catalog, mean curvature and the measures.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use proptest::prelude::*;

use heisenberg::curvature::{mean_curvature_char, patch_graph_mean_curvature};
use heisenberg::geodesics::{geodesic_point, GeodesicSpec};
use heisenberg::hcurves::{helix, x_axis, HorizontalCurve};
use heisenberg::hgroup::j;
use heisenberg::measures::{area, integrate_rect, iso_ratio, surface_area, volume_flux, ISO_CONSTANT};
use heisenberg::surfaces::{
    bernstein_graph, build, build_sigma_lambda, cylinder_s, detect_singular_default, euclidean_sphere, helicoid_l,
    mesh, polynomial_profile, sphere_geodesic, sphere_graph, ImmersedPatch, OrthogonalFamily, Side, SurfaceParams,
};
use heisenberg::tol::H_CHAR;
use heisenberg::Point;

fn curves() -> Vec<Arc<dyn HorizontalCurve>> {
    vec![Arc::new(x_axis((-1.0, 1.0))), Arc::new(helix(0.8, (0.0, 3.0)))]
}

/// Minimum over a parameter interval: coarse scan then golden section.
fn minimize(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let n = 400;
    let step = (b - a) / n as f64;
    let k = (0..=n).min_by(|&i, &j| f(a + step * i as f64).total_cmp(&f(a + step * j as f64))).unwrap();
    let (mut lo, mut hi) = ((a + step * (k as f64 - 1.0)).max(a), (a + step * (k as f64 + 1.0)).min(b));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..100 {
        let (c, d) = (hi - g * (hi - lo), lo + g * (hi - lo));
        if f(c) < f(d) {
            hi = d;
        } else {
            lo = c;
        }
    }
    f(0.5 * (lo + hi))
}

fn meridian(p: Point) -> (f64, f64) {
    (p.x.hypot(p.y), p.t)
}

/// Two-sided distance between the meridian profiles of the two sphere models.
fn sphere_models_distance(l: f64) -> f64 {
    let geo = |s: f64| meridian(geodesic_point(&GeodesicSpec::new(Point::ORIGIN, 0.0, l), s));
    let graph = sphere_graph(l).unwrap();
    let sheets: Vec<ImmersedPatch> = graph.patches.clone();
    let sheet = |k: usize, a: f64| meridian(sheets[k].point(0.0, a));
    let dist = |a: (f64, f64), b: (f64, f64)| (a.0 - b.0).hypot(a.1 - b.1);
    let mut worst: f64 = 0.0;
    for i in 1..200 {
        let q = geo(PI / l * i as f64 / 200.0);
        let d = (0..2).map(|k| minimize(|a| dist(q, sheet(k, a)), 1e-9, FRAC_PI_2)).fold(f64::INFINITY, f64::min);
        worst = worst.max(d);
    }
    for k in 0..2 {
        for i in 1..=100 {
            let q = sheet(k, FRAC_PI_2 * i as f64 / 100.0);
            worst = worst.max(minimize(|s| dist(q, geo(s)), 0.0, PI / l));
        }
    }
    worst
}

#[test]
fn sphere_models_agree() {
    for l in [0.5, 1.0, 2.0] {
        let d = sphere_models_distance(l);
        assert!(d < 1e-8, "λ = {l}: {d:e}");
    }
}

fn sigma_patches() -> Vec<(ImmersedPatch, f64)> {
    let mut out = Vec::new();
    for c in curves() {
        for l in [1.0, -1.5] {
            for side in [Side::PlusJ, Side::MinusJ] {
                out.push((build_sigma_lambda(c.clone(), l, side).unwrap().0, l));
            }
        }
    }
    out
}

/// Catalog CMC patches with their mean curvature.
fn cmc_patches() -> Vec<(&'static str, ImmersedPatch, f64)> {
    let mut out = Vec::new();
    for l in [0.5, 1.0, 2.0] {
        out.extend(sphere_geodesic(l).unwrap().patches.into_iter().map(|p| ("sphere", p, l)));
        out.extend(sphere_graph(l).unwrap().patches.into_iter().map(|p| ("sphere_graph", p, l)));
        out.extend(cylinder_s(l, (-1.0, 1.0)).unwrap().patches.into_iter().map(|p| ("cylinder_S", p, l)));
    }
    out.extend(sigma_patches().into_iter().map(|(p, l)| ("sigma", p, l)));
    out.extend(helicoid_l(1.0, 1.0, 2).unwrap().pieces.into_iter().map(|p| ("helicoid", p.patch, 1.0)));
    for g in [vec![], vec![0.0, 0.0, 1.0], vec![7.0, 3.0]] {
        out.extend(bernstein_graph(polynomial_profile(g), (-1.0, 1.0), (-1.0, 1.0)).patches.into_iter().map(|p| ("bernstein", p, 0.0)));
    }
    out
}

#[test]
fn mean_curvature_is_constant() {
    for (name, p, h) in cmc_patches() {
        let d = p.domain();
        let mut values = Vec::new();
        for i in 0..20 {
            for k in 0..10 {
                let (u, v) = d.at((i as f64 + 0.5) / 20.0, (k as f64 + 0.5) / 10.0);
                if let Ok(x) = mean_curvature_char(&p, u, v, H_CHAR) {
                    values.push(x);
                }
            }
        }
        assert!(values.len() > 150, "{name}");
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let sd = (values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / values.len() as f64).sqrt();
        assert!(sd < 1e-4, "{name}: std {sd:e}");
        assert!((mean - h).abs() < 1e-5, "{name}: mean {mean} vs {h}");
    }
}

#[test]
fn graph_methods_agree() {
    let mut graphs: Vec<ImmersedPatch> = Vec::new();
    graphs.extend(cylinder_s(1.0, (-1.0, 1.0)).unwrap().patches);
    graphs.extend(bernstein_graph(polynomial_profile(vec![0.0, 0.0, 0.0, 1.0]), (-1.0, 1.0), (-1.0, 1.0)).patches);
    graphs.extend(bernstein_graph(polynomial_profile(vec![1.0, 2.0]), (-1.0, 1.0), (-1.0, 1.0)).patches);
    for p in &graphs {
        let d = p.domain();
        for i in 1..10 {
            for k in 1..10 {
                let (u, v) = d.at(i as f64 / 10.0, k as f64 / 10.0);
                if let (Ok(a), Ok(b)) = (mean_curvature_char(p, u, v, H_CHAR), patch_graph_mean_curvature(p, u, v)) {
                    assert!((a - b).abs() < 1e-4, "{a} vs {b} at ({u}, {v})");
                }
            }
        }
    }
}

#[test]
fn sphere_mesh_is_singular_only_near_poles() {
    let s = sphere_geodesic(1.0).unwrap();
    let m = mesh(&s.patches[0], 128, 128).unwrap();
    let flagged = detect_singular_default(&m);
    assert!(!flagged.is_empty());
    for i in flagged {
        let s = m.vertices[i].s;
        assert!(s.min(PI - s) < 1e-3, "s = {s}");
    }
}

#[test]
fn sigma_mesh_is_singular_on_boundary_rows() {
    for (p, _) in sigma_patches() {
        let m = mesh(&p, 33, 33).unwrap();
        let flagged = detect_singular_default(&m);
        assert_eq!(flagged.len(), 2 * 33);
        for i in flagged {
            let j = i % m.n_s;
            assert!(j == 0 || j == m.n_s - 1);
        }
    }
}

#[test]
fn vertical_plane_has_no_singular_points() {
    let s = build("vertical_plane", &SurfaceParams::default()).unwrap();
    let m = mesh(&s.patches[0], 64, 64).unwrap();
    assert!(detect_singular_default(&m).is_empty());
}

#[test]
fn euclidean_sphere_beats_no_sphere() {
    let e = euclidean_sphere(1.0).unwrap();
    assert!(iso_ratio(&e, 128).unwrap() > ISO_CONSTANT);
}

#[test]
fn iso_ratio_is_dilation_invariant() {
    let s = sphere_geodesic(1.0).unwrap();
    let base = iso_ratio(&s, 128).unwrap();
    for t in [-0.7, 0.4, 1.3] {
        let r = iso_ratio(&s.dilated(t), 128).unwrap();
        assert!((r / base - 1.0).abs() < 1e-6);
    }
}

#[test]
fn quadrature_converges() {
    let (sig, _) = build_sigma_lambda(curves()[1].clone(), 1.0, Side::PlusJ).unwrap();
    for p in [sphere_geodesic(1.0).unwrap().patches[0].clone(), sig] {
        let coarse = area(&p, 32).unwrap();
        let fine = area(&p, 64).unwrap();
        assert!(coarse.error_estimate >= 0.0);
        assert!((fine.value - coarse.value).abs() <= coarse.error_estimate.max(1e-14 * coarse.value));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn flipping_orientation(k in 0usize..8, fu in 0.05..0.95f64, fv in 0.05..0.95f64) {
        let (p, _) = sigma_patches()[k].clone();
        let (u, v) = p.domain().at(fu, fv);
        let (a, b) = (p.normal_data(u, v).unwrap(), p.flipped().normal_data(u, v).unwrap());
        prop_assert_eq!(b.n, -a.n);
        prop_assert_eq!(b.nh_norm, a.nh_norm);
        prop_assert_eq!(b.is_singular(), a.is_singular());
        if let (Some(x), Some(y)) = (a.nu_h, b.nu_h) {
            prop_assert_eq!(y, -x);
            prop_assert_eq!(b.z.unwrap(), -a.z.unwrap());
        }
        let ha = mean_curvature_char(&p, u, v, H_CHAR).unwrap();
        let hb = mean_curvature_char(&p.flipped(), u, v, H_CHAR).unwrap();
        prop_assert!((ha + hb).abs() < 1e-7);
    }

    #[test]
    fn normal_data_is_consistent(k in 0usize..8, fu in 0.0..1.0f64, fv in 0.0..1.0f64) {
        let (p, _) = sigma_patches()[k].clone();
        let (u, v) = p.domain().at(fu, fv);
        let nd = p.normal_data(u, v).unwrap();
        prop_assert!((nd.n.norm() - 1.0).abs() < 1e-12);
        prop_assert!((nd.nh_norm.powi(2) + nd.n.c.powi(2) - 1.0).abs() < 1e-12);
        if let (Some(nu), Some(z)) = (nd.nu_h, nd.z) {
            prop_assert_eq!(z, j(nu));
            prop_assert!(z.dot(nd.n).abs() < 1e-12);
        }
    }

    #[test]
    fn variation_height_changes_sign_at_cut(k in 0usize..2, l in prop_oneof![0.5..3.0f64, -3.0..-0.5f64],
                                            plus in any::<bool>(), fe in 0.05..0.95f64, fs in 0.02..0.98f64) {
        let side = if plus { Side::PlusJ } else { Side::MinusJ };
        let fam = OrthogonalFamily::new(curves()[k].clone(), l, side);
        let (a, b) = fam.curve.domain();
        let e = a + (b - a) * fe;
        let cut = fam.cut(e).unwrap();
        let k = side.sign();
        let before = k * fam.eval(e, fs * cut).variation.c;
        let after = k * fam.eval(e, cut + fs * (PI / l.abs() - cut)).variation.c;
        prop_assert!(before < 0.0, "before {}", before);
        prop_assert!(after > 0.0, "after {}", after);
    }

    #[test]
    fn variation_rotation_component(k in 0usize..2, l in prop_oneof![0.5..3.0f64, -3.0..-0.5f64],
                                    plus in any::<bool>(), fe in 0.05..0.95f64, s in 0.0..3.0f64) {
        let side = if plus { Side::PlusJ } else { Side::MinusJ };
        let fam = OrthogonalFamily::new(curves()[k].clone(), l, side);
        let (a, b) = fam.curve.domain();
        let e = a + (b - a) * fe;
        let h = side.sign() * fam.curve.jet(e).planar_curvature();
        let value = |s: f64| {
            let jet = fam.eval(e, s);
            side.sign() * jet.variation.dot(j(jet.velocity))
        };
        let u = 2.0 * l * s;
        prop_assert!((value(s) - (u.sin() / (2.0 * l) * h - u.cos())).abs() < 1e-10);
        prop_assert!((value(fam.cut(e).unwrap()) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn mean_curvature_scales_under_dilation(k in 0usize..8, t in -1.0..1.0f64, fu in 0.1..0.9f64, fv in 0.1..0.9f64) {
        let (p, l) = sigma_patches()[k].clone();
        let (u, v) = p.domain().at(fu, fv);
        let h = mean_curvature_char(&p.dilated(t), u, v, H_CHAR).unwrap();
        prop_assert!((h - (-t).exp() * l).abs() < 1e-5);
    }

    #[test]
    fn area_ignores_orientation_and_volume_flips(k in 0usize..8) {
        let (p, _) = sigma_patches()[k].clone();
        prop_assert_eq!(area(&p, 16).unwrap().value, area(&p.flipped(), 16).unwrap().value);
        prop_assert_eq!(volume_flux(&p, 16).unwrap().value, -volume_flux(&p.flipped(), 16).unwrap().value);
    }

    #[test]
    fn measures_are_left_invariant(x in -2.0..2.0f64, y in -2.0..2.0f64, t in -2.0..2.0f64) {
        let s = sphere_geodesic(1.0).unwrap();
        let moved = s.left_translated(Point::new(x, y, t));
        let (a0, a1) = (surface_area(&s, 32).unwrap().value, surface_area(&moved, 32).unwrap().value);
        prop_assert!((a1 / a0 - 1.0).abs() < 1e-10);
        let (v0, v1) = (volume_flux(&s.patches[0], 32).unwrap().value, volume_flux(&moved.patches[0], 32).unwrap().value);
        prop_assert!((v1.abs() / v0.abs() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn integrals_are_additive(k in 0usize..8, split in 0.2..0.8f64) {
        let (p, _) = sigma_patches()[k].clone();
        let d = p.domain();
        let f = |nd: &heisenberg::surfaces::NormalData| nd.cross.horizontal_norm();
        let m = d.u.0 + split * (d.u.1 - d.u.0);
        let whole = integrate_rect(&p, d.u, d.v, 32, &f).unwrap().value;
        let parts = integrate_rect(&p, (d.u.0, m), d.v, 32, &f).unwrap().value
            + integrate_rect(&p, (m, d.u.1), d.v, 32, &f).unwrap().value;
        prop_assert!((parts / whole - 1.0).abs() < 1e-12);
    }
}
