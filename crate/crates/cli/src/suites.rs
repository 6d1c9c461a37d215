//! Verification suites. Each check records what was measured, what was
//! expected, the tolerance, and the basis of the expected value.

use std::f64::consts::{LN_2, PI};
use std::io::{self, Write};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use heisenberg::curvature::{
    calibration_divergence, graph_pde_residual, mean_curvature_char, orthogonality_defect, ruling_deviation,
    Foliation, SingularCurve,
};
use heisenberg::geodesics::{
    conserved_quantity, cut_time, geodesic_point, geodesic_residual, geodesic_velocity, jacobi_residual, FieldAlong,
    GeodesicSpec, GeodesicVariation,
};
use heisenberg::hcurves::{helix, x_axis, HorizontalCurve};
use heisenberg::measures::{
    average_mean_curvature, dilation_homogeneity, first_variation_check, iso_ratio, surface_area, volume_enclosed,
    ISO_CONSTANT,
};
use heisenberg::surfaces::{
    bernstein_graph, build_sigma_lambda, cylinder_s, euclidean_sphere, helicoid_l, polynomial_profile,
    sphere_geodesic, ImmersedPatch, OrthogonalFamily, Side, SphereSheet, Surface,
};
use heisenberg::tol::{H_CHAR, H_FD};
use heisenberg::Point;

use crate::config::{RunConfig, Suite, Tolerances};
use crate::error::CliError;
use crate::poly::Polynomial;

const SEED: u64 = 0x4831;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    ClosedForm,
    Derived,
    Identity,
}

impl Basis {
    pub fn as_str(self) -> &'static str {
        match self {
            Basis::ClosedForm => "closed form",
            Basis::Derived => "derived",
            Basis::Identity => "identity",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    /// |measured - expected| ≤ tolerance.
    Within,
    /// |measured - expected| ≤ tolerance·|expected|.
    Relative,
    /// measured ≤ tolerance.
    Below,
    /// measured > tolerance.
    Above,
}

impl Relation {
    fn as_str(self) -> &'static str {
        match self {
            Relation::Within => "abs",
            Relation::Relative => "rel",
            Relation::Below => "max",
            Relation::Above => "min",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// Expected-negative outcome: the surface is correctly identified as not area-stationary.
    NotStationary,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::NotStationary => "NOT-stationary",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub measured: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub relation: Relation,
    pub basis: Basis,
    pub status: Status,
}

impl Check {
    fn new(
        suite: &'static str,
        name: impl Into<String>,
        measured: f64,
        expected: f64,
        tolerance: f64,
        relation: Relation,
        basis: Basis,
    ) -> Self {
        let ok = match relation {
            Relation::Within => (measured - expected).abs() <= tolerance,
            Relation::Relative => (measured - expected).abs() <= tolerance * expected.abs(),
            Relation::Below => measured <= tolerance,
            Relation::Above => measured > tolerance,
        };
        let status = if ok { Status::Pass } else { Status::Fail };
        Check { suite, name: name.into(), measured, expected, tolerance, relation, basis, status }
    }
}

pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| c.status == Status::Fail).count()
    }

    pub fn write_csv(&self, w: &mut dyn Write) -> io::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["suite", "check", "measured", "expected", "tolerance", "relation", "basis", "status"])?;
        for c in &self.checks {
            out.write_record([
                c.suite.to_string(),
                c.name.clone(),
                format!("{:e}", c.measured),
                format!("{:e}", c.expected),
                format!("{:e}", c.tolerance),
                c.relation.as_str().to_string(),
                c.basis.as_str().to_string(),
                c.status.as_str().to_string(),
            ])?;
        }
        out.flush()
    }
}

type SuiteResult = Result<Vec<Check>, CliError>;

pub fn run(cfg: &RunConfig) -> Result<Report, CliError> {
    let suites: Vec<Suite> = if cfg.suite == Suite::All { Suite::EACH.to_vec() } else { vec![cfg.suite] };
    let mut checks = Vec::new();
    for s in suites {
        checks.extend(match s {
            Suite::Geodesics => geodesics(&cfg.tolerances)?,
            Suite::Jacobi => jacobi(&cfg.tolerances, cfg.curve.clone())?,
            Suite::Curvature => curvature(cfg)?,
            Suite::Minkowski => minkowski(cfg)?,
            Suite::Bernstein => bernstein(cfg)?,
            Suite::Iso => iso(cfg)?,
            Suite::All => unreachable!("expanded above"),
        });
    }
    Ok(Report { checks })
}

fn spheres(cfg: &RunConfig) -> Vec<f64> {
    if cfg.lambda_given {
        vec![cfg.lambda]
    } else {
        vec![0.5, 1.0, 2.0]
    }
}

fn quad_res(cfg: &RunConfig, default: usize) -> usize {
    cfg.res.map(|(n, _)| n).unwrap_or(default)
}

fn bisect_cut(h: f64, l: f64) -> f64 {
    let f = |s: f64| {
        let u = 2.0 * l * s;
        h * (1.0 - u.cos()) - 2.0 * l * u.sin()
    };
    let (mut a, mut b) = (1e-12, PI / l.abs() - 1e-12);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (f(a) > 0.0) == (f(m) > 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

fn signed(r: &mut ChaCha8Rng, mag: f64) -> f64 {
    if r.gen_bool(0.5) {
        mag
    } else {
        -mag
    }
}

fn geodesics(t: &Tolerances) -> SuiteResult {
    const S: &str = "geodesics";
    let mut r = ChaCha8Rng::seed_from_u64(SEED);
    let mut residual: f64 = 0.0;
    for _ in 0..10_000 {
        let mag = 10f64.powf(r.gen_range(-9.0..1.0));
        let l = signed(&mut r, mag);
        let base = Point::new(r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0));
        let g = GeodesicSpec::new(base, r.gen_range(0.0..2.0 * PI), l);
        residual = residual.max(geodesic_residual(&g, r.gen_range(-5.0..5.0)));
    }
    let mut pole: f64 = 0.0;
    for l in [0.5, 1.0, 2.0] {
        for k in 0..64 {
            let g = GeodesicSpec::new(Point::ORIGIN, 2.0 * PI * k as f64 / 64.0, l);
            pole = pole.max(geodesic_point(&g, PI / l).coord_distance(Point::new(0.0, 0.0, PI / (2.0 * l * l))));
        }
    }
    let mut conserved: f64 = 0.0;
    for _ in 0..100 {
        let th: f64 = r.gen_range(0.0..2.0 * PI);
        let w: f64 = r.gen_range(-2.0..2.0);
        let var = GeodesicVariation {
            base: Point::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)),
            base_rate: [r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)],
            dir: [th.cos(), th.sin()],
            dir_rate: [-w * th.sin(), w * th.cos()],
            lambda: r.gen_range(-3.0..3.0),
        };
        let g = var.spec();
        let vals: Vec<f64> = (0..100).map(|k| conserved_quantity(&g, var.eval(0.05 * k as f64).variation, 0.05 * k as f64)).collect();
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        let sd = (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / vals.len() as f64).sqrt();
        conserved = conserved.max(sd);
    }
    let exact = [0.5, 1.0, 3.0].iter().map(|&l| cut_time(0.0, l).map(|c| c - PI / (2.0 * l))).collect::<Result<Vec<_>, _>>()?;
    let exact = exact.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    let (mut sym, mut bis): (f64, f64) = (0.0, 0.0);
    for _ in 0..1000 {
        let h = r.gen_range(-20.0..20.0);
        let mag = r.gen_range(0.1..5.0);
        let l = signed(&mut r, mag);
        let c = cut_time(h, l)?;
        sym = sym.max((c + cut_time(-h, l)? - PI / l.abs()).abs());
        bis = bis.max((c - bisect_cut(h, l)).abs());
    }
    Ok(vec![
        Check::new(S, "geodesic equation residual, 1e4 samples", residual, 0.0, t.geodesic, Relation::Below, Basis::Identity),
        Check::new(S, "pole concurrence over 64 directions", pole, 0.0, t.pole, Relation::Below, Basis::ClosedForm),
        Check::new(S, "conserved quantity std along 100 geodesics", conserved, 0.0, t.conserved, Relation::Below, Basis::Identity),
        Check::new(S, "cut_time(0, λ) - π/(2λ)", exact, 0.0, 0.0, Relation::Below, Basis::ClosedForm),
        Check::new(S, "cut_time(h, λ) + cut_time(-h, λ) - π/|λ|", sym, 0.0, t.cut, Relation::Below, Basis::ClosedForm),
        Check::new(S, "cut_time vs bisection", bis, 0.0, t.bisection, Relation::Below, Basis::Derived),
    ])
}

fn jacobi(t: &Tolerances, user_curve: Option<Arc<dyn HorizontalCurve>>) -> SuiteResult {
    const S: &str = "jacobi";
    let mut r = ChaCha8Rng::seed_from_u64(SEED + 1);
    let mut curves: Vec<Arc<dyn HorizontalCurve>> = vec![Arc::new(x_axis((-1.0, 1.0))), Arc::new(helix(1.0, (0.0, 3.0)))];
    curves.extend(user_curve);
    let (mut worst, mut ortho): (f64, f64) = (0.0, 0.0);
    for _ in 0..1000 {
        let curve = curves[r.gen_range(0..curves.len())].clone();
        let mag: f64 = r.gen_range(0.2..5.0);
        let l = signed(&mut r, mag);
        let side = if r.gen_bool(0.5) { Side::PlusJ } else { Side::MinusJ };
        let (a, b) = curve.domain();
        let fam = OrthogonalFamily::new(curve, l, side);
        let e = r.gen_range(a..b);
        let s = r.gen_range(0.0..PI / mag);
        let g = fam.geodesic(e);
        let value = |s: f64| fam.eval(e, s).variation;
        let rate = |s: f64| fam.eval(e, s).variation_rate;
        worst = worst.max(jacobi_residual(&g, &FieldAlong { value: &value, rate: Some(&rate) }, s, 1e-6)?);
        ortho = ortho.max(conserved_quantity(&g, value(s), s).abs());
    }
    let tangent = |g: GeodesicSpec, a: f64| -> Result<f64, CliError> {
        let value = move |s: f64| geodesic_velocity(&g, s) * (a * s + 2.0);
        Ok(jacobi_residual(&g, &FieldAlong { value: &value, rate: None }, 0.8, 1e-4)?)
    };
    let curved = GeodesicSpec::new(Point::new(0.1, 0.2, 0.3), 0.7, 1.3);
    let line = GeodesicSpec { lambda: 0.0, ..curved };
    Ok(vec![
        Check::new(S, "orthogonal-family field residual, 1e3 samples", worst, 0.0, t.jacobi, Relation::Below, Basis::Derived),
        Check::new(S, "orthogonal-family conserved quantity", ortho, 0.0, t.conserved, Relation::Below, Basis::Identity),
        Check::new(S, "tangent field 2γ̇, λ = 1.3", tangent(curved, 0.0)?, 0.0, t.jacobi, Relation::Below, Basis::Identity),
        Check::new(S, "tangent field (s+2)γ̇, λ = 0", tangent(line, 1.0)?, 0.0, t.jacobi, Relation::Below, Basis::Identity),
        Check::new(S, "tangent field (s+2)γ̇, λ = 1.3 is not Jacobi", tangent(curved, 1.0)?, 0.0, 1e-2, Relation::Above, Basis::Derived),
    ])
}

/// Largest |H - expected| over an interior grid of regular points, and their count.
fn h_stats(patches: &[ImmersedPatch], expected: f64, n: usize) -> Result<(f64, usize), CliError> {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for p in patches {
        let d = p.domain();
        for i in 0..n {
            for k in 0..n {
                let (u, v) = d.at((i as f64 + 0.5) / n as f64, (k as f64 + 0.5) / n as f64);
                match mean_curvature_char(p, u, v, H_CHAR) {
                    Ok(h) => {
                        worst = worst.max((h - expected).abs());
                        count += 1;
                    }
                    Err(heisenberg::Error::SingularPoint(..)) => {}
                    Err(e) => return Err(e.into()),
                }
            }
        }
    }
    if count == 0 {
        return Err(CliError::Numerical(heisenberg::Error::InvalidParameter("no regular sample points".into())));
    }
    Ok((worst, count))
}

fn curvature(cfg: &RunConfig) -> SuiteResult {
    const S: &str = "curvature";
    let t = &cfg.tolerances;
    let l = cfg.lambda;
    let curve: Arc<dyn HorizontalCurve> = cfg.curve.clone().unwrap_or_else(|| Arc::new(x_axis((-1.0, 1.0))));
    let (sigma, _) = build_sigma_lambda(curve.clone(), l, Side::PlusJ)?;
    let mut surfaces: Vec<(String, Vec<ImmersedPatch>, f64)> = vec![
        (format!("sphere λ={l}"), sphere_geodesic(l)?.patches, l),
        (format!("sigma-lambda λ={l}"), vec![sigma.clone()], l),
        (format!("cylinder_S λ={l}"), cylinder_s(l, (-1.0, 1.0))?.patches, l),
        (format!("helicoid_L λ={l} r={}", cfg.r), helicoid_l(l, cfg.r, cfg.k_max.max(1))?.pieces.into_iter().map(|p| p.patch).collect(), l),
    ];
    let profiles: Vec<(String, Vec<f64>)> = match &cfg.g {
        Some((src, p)) => vec![(src.clone(), p.coefficients().to_vec())],
        None => vec![("0".into(), vec![]), ("3*y+7".into(), vec![7.0, 3.0]), ("y^2".into(), vec![0.0, 0.0, 1.0])],
    };
    for (src, c) in profiles {
        surfaces.push((format!("bernstein g={src}"), bernstein_graph(polynomial_profile(c), (-1.0, 1.0), (-1.0, 1.0)).patches, 0.0));
    }
    let mut checks = Vec::new();
    for (name, patches, h) in &surfaces {
        let (dev, _) = h_stats(patches, *h, 12)?;
        checks.push(Check::new(S, format!("mean curvature on {name}"), dev, 0.0, t.curvature, Relation::Below, Basis::ClosedForm));
    }
    let mut pde: f64 = 0.0;
    let mut r = ChaCha8Rng::seed_from_u64(SEED + 2);
    for sign in [1.0, -1.0] {
        let sheet = SphereSheet { lambda: l.abs(), sign };
        for _ in 0..100 {
            let rho = r.gen_range(0.01..0.99) / l.abs();
            let phi: f64 = r.gen_range(0.0..2.0 * PI);
            pde = pde.max(graph_pde_residual(&sheet, rho * phi.cos(), rho * phi.sin(), sign * l.abs())?.abs());
        }
    }
    checks.push(Check::new(S, "graph equation residual on sphere sheets", pde, 0.0, t.pde, Relation::Below, Basis::Derived));
    let (a, b) = curve.domain();
    let mut ortho: f64 = 0.0;
    for k in 1..8 {
        let e = a + (b - a) * k as f64 / 8.0;
        ortho = ortho.max(orthogonality_defect(&sigma, &SingularCurve::row(0.0, 1.0), e)?.abs());
        ortho = ortho.max(orthogonality_defect(&sigma, &SingularCurve::row(1.0, -1.0), e)?.abs());
    }
    checks.push(Check::new(S, "orthogonality defect on sigma-lambda boundaries", ortho, 0.0, t.orthogonality, Relation::Below, Basis::ClosedForm));
    let sphere = sphere_geodesic(l.abs())?;
    let mut ruling: f64 = 0.0;
    for i in 0..5 {
        for k in 0..4 {
            let (u, v) = sphere.patches[0].domain().at(0.1 + 0.2 * i as f64, 0.3 + 0.13 * k as f64);
            ruling = ruling.max(ruling_deviation(&sphere.patches[0], u, v, l.abs(), 1.0, 1000)?);
        }
    }
    checks.push(Check::new(S, "characteristic traces vs geodesics on the sphere", ruling, 0.0, t.ruling, Relation::Below, Basis::ClosedForm));
    Ok(checks)
}

fn minkowski(cfg: &RunConfig) -> SuiteResult {
    const S: &str = "minkowski";
    let t = &cfg.tolerances;
    let n = quad_res(cfg, 256);
    let mut checks = Vec::new();
    for l in spheres(cfg) {
        let s = sphere_geodesic(l.abs())?;
        let h = average_mean_curvature(&s, 16).ok_or(heisenberg::Error::SingularPoint(0.0, 0.0))?;
        let a = surface_area(&s, n)?.value;
        let v = volume_enclosed(&s, n)?.value;
        let defect = (3.0 * a - 8.0 * h * v).abs() / (3.0 * a);
        checks.push(Check::new(S, format!("|3A-8HV|/3A on sphere λ={}", l.abs()), defect, 0.0, t.minkowski, Relation::Below, Basis::ClosedForm));
    }
    let s1 = sphere_geodesic(1.0)?;
    let a = surface_area(&s1, 64)?.value;
    let one = first_variation_check(&s1, Arc::new(|_, _| 1.0), 1.0, 1e-4, 64)?;
    let zero = first_variation_check(&s1, Arc::new(|th: f64, _| th.cos()), 1.0, 1e-4, 64)?;
    checks.push(Check::new(S, "first variation |A'-2HV'|/|A'|, u = 1", one.defect / one.a_prime.abs(), 0.0, t.first_variation, Relation::Below, Basis::ClosedForm));
    checks.push(Check::new(S, "first variation |A'|/A, u = cos θ", zero.a_prime.abs() / a, 0.0, t.first_variation, Relation::Below, Basis::ClosedForm));
    Ok(checks)
}

/// Orthogonality defect of t = xy + g(y) at the singular curve x = -g'(y)/2.
fn bernstein_defect(coeffs: &[f64], y: f64) -> Result<f64, CliError> {
    let g = polynomial_profile(coeffs.to_vec());
    let gl = g.clone();
    let x0 = -gl(y)[1] / 2.0;
    let s = bernstein_graph(g, (x0 - 3.0, x0 + 3.0), (y - 1.0, y + 1.0));
    let curve = SingularCurve::new(move |y| (-gl(y)[1] / 2.0, y), (1.0, 0.0));
    Ok(orthogonality_defect(&s.patches[0], &curve, y)?)
}

fn bernstein(cfg: &RunConfig) -> SuiteResult {
    const S: &str = "bernstein";
    let t = &cfg.tolerances;
    let (src, poly) = match &cfg.g {
        Some((src, p)) => (src.clone(), p.clone()),
        None => ("3*y+7".to_string(), Polynomial(vec![7.0, 3.0])),
    };
    let coeffs = poly.coefficients().to_vec();
    let ys = [-0.5, 0.1, 0.6];
    let mut checks = Vec::new();
    let mut worst: f64 = 0.0;
    for y in ys {
        let d = bernstein_defect(&coeffs, y)?;
        let expected = -poly.second_derivative(y) / 2.0;
        worst = worst.max(d.abs());
        checks.push(Check::new(S, format!("orthogonality defect of g={src} at y={y}"), d, expected, t.orthogonality, Relation::Within, Basis::ClosedForm));
    }
    let mut verdict = Check::new(S, format!("stationarity of g={src}"), worst, 0.0, t.orthogonality, Relation::Below, Basis::ClosedForm);
    if verdict.status == Status::Fail {
        verdict.status = Status::NotStationary;
    }
    checks.push(verdict);

    let mut r = ChaCha8Rng::seed_from_u64(SEED + 3);
    for (name, fol) in [("plane", Foliation::Plane), ("t = xy", Foliation::affine(0.0, 0.0))] {
        let mut worst: f64 = 0.0;
        let mut n = 0;
        while n < 100 {
            let q = Point::new(r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0));
            if fol.locus_function(q).abs() < 1e-3 {
                continue;
            }
            worst = worst.max(calibration_divergence(&fol, q)?.abs());
            n += 1;
        }
        checks.push(Check::new(S, format!("calibration divergence, {name} family"), worst, 0.0, t.calibration, Relation::Below, Basis::ClosedForm));
    }
    let cube = Foliation::Bernstein(polynomial_profile(vec![0.0, 0.0, 0.0, 1.0]));
    let mut control: f64 = 0.0;
    for k in 0..20 {
        let y = 0.2 + 0.05 * k as f64;
        let q = Point::new(-1.5 * y * y + 1.5 * y * H_FD, y, 0.0);
        control = control.max(calibration_divergence(&cube, q)?.abs());
    }
    checks.push(Check::new(S, "calibration divergence, t = xy + y³ control", control, 0.0, 1e-2, Relation::Above, Basis::Derived));
    Ok(checks)
}

fn iso(cfg: &RunConfig) -> SuiteResult {
    const S: &str = "iso";
    let t = &cfg.tolerances;
    let n = quad_res(cfg, 256);
    let mut checks = Vec::new();
    for l in spheres(cfg) {
        let l = l.abs();
        let s = sphere_geodesic(l)?;
        let a = surface_area(&s, n)?.value;
        let v = volume_enclosed(&s, n)?.value;
        checks.push(Check::new(S, format!("area of sphere λ={l}"), a, PI * PI / l.powi(3), t.area, Relation::Relative, Basis::ClosedForm));
        checks.push(Check::new(S, format!("volume of sphere λ={l}"), v, 3.0 * PI * PI / (8.0 * l.powi(4)), t.volume, Relation::Relative, Basis::ClosedForm));
        checks.push(Check::new(S, format!("A⁴/V³ of sphere λ={l}"), a.powi(4) / v.powi(3), ISO_CONSTANT, t.iso, Relation::Relative, Basis::ClosedForm));
    }
    let (sig, _) = build_sigma_lambda(Arc::new(x_axis((-1.0, 1.0))), 1.0, Side::PlusJ)?;
    let pieces = [("sphere λ=1", sphere_geodesic(1.0)?), ("sigma-lambda λ=1", Surface::single("sigma", sig, false, Some(1.0)))];
    for (name, s) in &pieces {
        for st in [-0.5, LN_2] {
            let (ra, rv) = dilation_homogeneity(s, st, 128)?;
            checks.push(Check::new(S, format!("area ratio under dilation s={st:.4} on {name}"), ra, (3.0 * st).exp(), t.dilation, Relation::Relative, Basis::ClosedForm));
            checks.push(Check::new(S, format!("volume ratio under dilation s={st:.4} on {name}"), rv, (4.0 * st).exp(), t.dilation, Relation::Relative, Basis::ClosedForm));
        }
    }
    let e = iso_ratio(&euclidean_sphere(1.0)?, 128)?;
    checks.push(Check::new(S, "A⁴/V³ of the Euclidean unit sphere exceeds the sphere constant", e, ISO_CONSTANT, ISO_CONSTANT, Relation::Above, Basis::Derived));
    Ok(checks)
}
