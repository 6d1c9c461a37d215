//! Surfaces swept by geodesics leaving a horizontal curve orthogonally.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geodesics::{
    cut_time, geodesic_point, geodesic_velocity, GeodesicSpec, GeodesicVariation, VariationJet,
};
use crate::hcurves::{geodesic_as_curve, helix, GeodesicCurve, HorizontalCurve};
use crate::hgroup::{j, FrameVector, Point};
use crate::tol::H_FD;

use super::{ImmersedPatch, Immersion, Orientation, ParamDomain};

/// Which rotation of Γ̇ launches the geodesics: J(Γ̇) or -J(Γ̇).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    PlusJ,
    MinusJ,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::PlusJ => 1.0,
            Side::MinusJ => -1.0,
        }
    }

    pub fn opposite(self) -> Self {
        match self {
            Side::PlusJ => Side::MinusJ,
            Side::MinusJ => Side::PlusJ,
        }
    }

    /// N = T along the starting curve.
    pub fn orientation(self) -> Orientation {
        match self {
            Side::PlusJ => Orientation::Positive,
            Side::MinusJ => Orientation::Negative,
        }
    }
}

/// Geodesics of curvature λ leaving Γ(ε) with velocity ±J(Γ̇(ε)).
#[derive(Clone)]
pub struct OrthogonalFamily {
    pub curve: Arc<dyn HorizontalCurve>,
    pub lambda: f64,
    pub side: Side,
}

impl OrthogonalFamily {
    pub fn new(curve: Arc<dyn HorizontalCurve>, lambda: f64, side: Side) -> Self {
        OrthogonalFamily { curve, lambda, side }
    }

    pub fn variation(&self, eps: f64) -> GeodesicVariation {
        let c = self.curve.jet(eps);
        let k = self.side.sign();
        GeodesicVariation {
            base: c.point,
            base_rate: c.cartesian_velocity(),
            dir: [-k * c.vel[1], k * c.vel[0]],
            dir_rate: [-k * c.acc[1], k * c.acc[0]],
            lambda: self.lambda,
        }
    }

    pub fn geodesic(&self, eps: f64) -> GeodesicSpec {
        self.variation(eps).spec()
    }

    pub fn eval(&self, eps: f64, s: f64) -> VariationJet {
        self.variation(eps).eval(s)
    }

    /// Cut time s_ε; requires λ ≠ 0.
    pub fn cut(&self, eps: f64) -> Result<f64> {
        let h = self.curve.jet(eps).planar_curvature();
        cut_time(self.side.sign() * h, self.lambda)
    }

    fn cut_rate(&self, eps: f64) -> f64 {
        match (self.cut(eps + H_FD), self.cut(eps - H_FD)) {
            (Ok(a), Ok(b)) => (a - b) / (2.0 * H_FD),
            _ => 0.0,
        }
    }
}

/// Σ_λ(Γ) on the rectified domain (ε, σ) ∈ I × [0, 1], s = σ·s_ε.
#[derive(Clone)]
pub struct SigmaLambda {
    pub family: OrthogonalFamily,
    pub eps_range: (f64, f64),
}

impl SigmaLambda {
    pub fn s_cut(&self, eps: f64) -> f64 {
        self.family.cut(eps).expect("lambda checked at construction")
    }

    /// V_ε(s) and its s-derivative at the unrectified parameter s.
    pub fn variation_field(&self, eps: f64, s: f64) -> (FrameVector, FrameVector) {
        let jet = self.family.eval(eps, s);
        (jet.variation, jet.variation_rate)
    }
}

impl Immersion for SigmaLambda {
    fn domain(&self) -> ParamDomain {
        ParamDomain::closed(self.eps_range, (0.0, 1.0))
    }

    fn point(&self, u: f64, v: f64) -> Point {
        self.family.eval(u, v * self.s_cut(u)).point
    }

    fn partials(&self, u: f64, v: f64) -> (FrameVector, FrameVector) {
        let s_cut = self.s_cut(u);
        let jet = self.family.eval(u, v * s_cut);
        let fu = jet.variation + jet.velocity * (v * self.family.cut_rate(u));
        (fu, jet.velocity * s_cut)
    }
}

pub fn build_sigma_lambda(
    gamma: Arc<dyn HorizontalCurve>,
    lambda: f64,
    side: Side,
) -> Result<(ImmersedPatch, Arc<SigmaLambda>)> {
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(Error::ZeroCurvature);
    }
    let eps_range = gamma.domain();
    let sigma = Arc::new(SigmaLambda { family: OrthogonalFamily::new(gamma, lambda, side), eps_range });
    Ok((ImmersedPatch::new(sigma.clone(), side.orientation()), sigma))
}

/// Σ₀(Γ): horizontal lines orthogonal to Γ, on I × [s_min, s_max].
#[derive(Clone)]
pub struct SigmaZero {
    pub family: OrthogonalFamily,
    pub eps_range: (f64, f64),
    pub s_range: (f64, f64),
}

impl Immersion for SigmaZero {
    fn domain(&self) -> ParamDomain {
        ParamDomain::closed(self.eps_range, self.s_range)
    }

    fn point(&self, u: f64, v: f64) -> Point {
        self.family.eval(u, v).point
    }

    fn partials(&self, u: f64, v: f64) -> (FrameVector, FrameVector) {
        let jet = self.family.eval(u, v);
        (jet.variation, jet.velocity)
    }
}

pub fn build_sigma_zero(gamma: Arc<dyn HorizontalCurve>, s_range: (f64, f64)) -> (ImmersedPatch, Arc<SigmaZero>) {
    let eps_range = gamma.domain();
    let sz = Arc::new(SigmaZero {
        family: OrthogonalFamily::new(gamma, 0.0, Side::PlusJ),
        eps_range,
        s_range,
    });
    (ImmersedPatch::new(sz.clone(), Orientation::Positive), sz)
}

/// Vertical offsets c₁(λ), c₂(λ) of the singular helices bounding the two
/// first pieces over the helix of radius r.
pub fn helicoid_offsets(lambda: f64, r: f64) -> Result<(f64, f64)> {
    let s = cut_time(-2.0 * r, lambda)?;
    let (l2, r2) = (lambda * lambda, r * r);
    let sg = lambda.signum();
    let c1 = s / (2.0 * lambda) + (sg * PI - 2.0 * lambda * s) / (4.0 * r2)
        - (r2 + l2) * (2.0 * lambda * s).sin() / (4.0 * l2 * r2);
    Ok((c1, sg * PI / (2.0 * l2) - c1))
}

/// Predicted offsets (c_{1k}, c_{2k}).
pub fn helicoid_offsets_k(lambda: f64, r: f64, k: usize) -> Result<(f64, f64)> {
    let (c1, _) = helicoid_offsets(lambda, r)?;
    let sg = lambda.signum();
    let c1k = k as f64 * c1 - sg * (k / 2) as f64 * PI / (2.0 * lambda * lambda);
    Ok((c1k, sg * PI / (2.0 * lambda * lambda) - c1k))
}

/// Wraps x into [-p/2, p/2).
pub fn wrap_periodic(x: f64, p: f64) -> f64 {
    x - p * (x / p + 0.5).floor()
}

/// One piece of the helicoid-type surface.
#[derive(Clone)]
pub struct HelicoidPiece {
    /// 1 or 2: which of the two first pieces this chain started from.
    pub branch: usize,
    pub level: usize,
    /// Curvature of the ruling geodesics.
    pub lambda: f64,
    pub side: Side,
    pub patch: ImmersedPatch,
    pub sigma: Arc<SigmaLambda>,
}

/// Measured and predicted vertical offset of a singular helix Γ_{ik}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SingularOffset {
    pub branch: usize,
    pub level: usize,
    /// Offset reduced to [0, pitch).
    pub measured: f64,
    pub predicted: f64,
    /// |measured - predicted| modulo the pitch.
    pub mismatch: f64,
    /// Largest distance between the boundary of the piece and the
    /// translated helix.
    pub fit_error: f64,
}

#[derive(Clone)]
pub struct HelicoidL {
    pub lambda: f64,
    pub r: f64,
    /// Vertical period π/(2r²) of the helix.
    pub pitch: f64,
    pub pieces: Vec<HelicoidPiece>,
    pub offsets: Vec<SingularOffset>,
}

/// Singular curve Γ_k(ε) = F(ε, s_ε) of a piece, written exactly as the helix
/// of radius r vertically translated and possibly reversed: Γ(τε + δ) + cT.
/// Returns the curve, the raw offset c and the largest fit residual.
fn fit_singular_helix(sigma: &SigmaLambda, r: f64) -> (GeodesicCurve, f64, f64) {
    let rho = 1.0 / (2.0 * r);
    let (a, b) = sigma.eps_range;
    let e0 = a + 0.25 * (b - a);
    let p0 = sigma.point(e0, 1.0);
    let (fu, _) = sigma.partials(e0, 1.0);
    let tau = if (p0.y + rho) * fu.a - p0.x * fu.b > 0.0 { 1.0 } else { -1.0 };
    let delta = p0.x.atan2(p0.y + rho) / (2.0 * r) - tau * e0;
    let base_helix = helix(r, (0.0, 1.0)).spec;
    let start = geodesic_point(&base_helix, delta);
    let c = p0.t - geodesic_point(&base_helix, tau * e0 + delta).t;
    let v = geodesic_velocity(&base_helix, delta) * tau;
    let spec = GeodesicSpec::from_direction(Point::new(start.x, start.y, start.t + c), v.a, v.b, tau * r);
    let curve = geodesic_as_curve(spec, sigma.eps_range);
    let fit = (0..=8)
        .map(|k| {
            let e = a + (b - a) * k as f64 / 8.0;
            sigma.point(e, 1.0).coord_distance(curve.position(e))
        })
        .fold(0.0, f64::max);
    (curve, c, fit)
}

/// Builds the pieces over the helix of radius r for levels 1..=k_max on both
/// branches, leaving each singular helix by geodesics of alternating curvature.
/// Every piece is oriented so that its mean curvature is λ.
pub fn helicoid_l(lambda: f64, r: f64, k_max: usize) -> Result<HelicoidL> {
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(Error::ZeroCurvature);
    }
    if !(r > 0.0) {
        return Err(Error::InvalidParameter("helix radius must be positive".into()));
    }
    let pitch = PI / (2.0 * r * r);
    let base: Arc<dyn HorizontalCurve> = Arc::new(helix(r, (0.0, PI / r)));
    let mut pieces = Vec::new();
    let mut offsets = Vec::new();
    for (branch, first_side) in [(1, Side::PlusJ), (2, Side::MinusJ)] {
        let (mut curve, mut side, mut mu) = (base.clone(), first_side, lambda);
        for level in 1..=k_max {
            let (patch, sigma) = build_sigma_lambda(curve.clone(), mu, side)?;
            let parity = if level % 2 == 1 { 1.0 } else { -1.0 };
            let orientation = Orientation::from_sign(side.sign() * parity);
            pieces.push(HelicoidPiece {
                branch,
                level,
                lambda: mu,
                side,
                patch: ImmersedPatch::new(patch.immersion, orientation),
                sigma: sigma.clone(),
            });
            let (next, c, fit_error) = fit_singular_helix(&sigma, r);
            let (c1k, c2k) = helicoid_offsets_k(lambda, r, level)?;
            let predicted = if branch == 1 { c1k } else { c2k };
            offsets.push(SingularOffset {
                branch,
                level,
                measured: c.rem_euclid(pitch),
                predicted,
                mismatch: wrap_periodic(c - predicted, pitch).abs(),
                fit_error,
            });

            // Continue past the singular curve along the arriving direction.
            let (a, b) = next.domain();
            let e = 0.5 * (a + b);
            let arriving = sigma.family.eval(e, sigma.s_cut(e)).velocity;
            let tangent = next.jet(e).velocity();
            side = if arriving.dot(j(tangent)) > 0.0 { Side::PlusJ } else { Side::MinusJ };
            curve = Arc::new(next);
            mu = -mu;
        }
    }
    Ok(HelicoidL { lambda, r, pitch, pieces, offsets })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hcurves::x_axis;

    #[test]
    fn sigma_zero_over_x_axis_is_a_graph() {
        let (p, sz) = build_sigma_zero(Arc::new(x_axis((-1.0, 1.0))), (-1.0, 1.0));
        let q = p.point(0.3, 0.4);
        assert!(q.coord_distance(Point::new(0.3, 0.4, -0.12)) < 1e-15);
        for s in [-0.7, 0.2, 0.9] {
            let v = sz.family.eval(0.5, s).variation;
            assert!((v.c + 2.0 * s).abs() < 1e-14);
        }
    }

    #[test]
    fn sigma_zero_vertical_component_over_helix() {
        let r = 0.8;
        let (_, sz) = build_sigma_zero(Arc::new(helix(r, (0.0, 2.0))), (-1.0, 1.0));
        let h = sz.family.curve.jet(0.4).planar_curvature();
        for s in [-0.6, 0.3, 1.1] {
            let v = sz.family.eval(0.4, s).variation;
            assert!((v.c - (-2.0 * s + h * s * s)).abs() < 1e-13);
        }
    }

    #[test]
    fn sigma_lambda_rows_are_horizontal() {
        let (p, sigma) = build_sigma_lambda(Arc::new(x_axis((-1.0, 1.0))), 1.0, Side::PlusJ).unwrap();
        assert!((sigma.s_cut(0.2) - PI / 2.0).abs() < 1e-15);
        for v in [0.0, 1.0] {
            assert!(p.normal_data_tol(0.2, v, 0.0).unwrap().nh_norm < 1e-12);
        }
        assert!(p.normal_data(0.2, 0.5).unwrap().nh_norm > 0.5);
    }

    #[test]
    fn sigma_lambda_rejects_zero_curvature() {
        assert!(matches!(build_sigma_lambda(Arc::new(x_axis((0.0, 1.0))), 0.0, Side::PlusJ), Err(Error::ZeroCurvature)));
    }

    #[test]
    fn helicoid_offset_identity() {
        for (lambda, r) in [(1.0f64, 1.0), (-0.7, 2.0), (3.0, 0.5)] {
            let (c1, c2) = helicoid_offsets(lambda, r).unwrap();
            let want = lambda.signum() * PI / (2.0 * lambda * lambda) - c1;
            assert!((c2 - want).abs() < 1e-12);
        }
        let (c1, _) = helicoid_offsets(1.0, 1.0).unwrap();
        assert!((c1 - (PI / 4.0 + 0.5)).abs() < 1e-14);
    }

    #[test]
    fn wrap_is_centered() {
        assert!((wrap_periodic(3.5, 2.0) + 0.5).abs() < 1e-15);
        assert!((wrap_periodic(-0.2, 2.0) + 0.2).abs() < 1e-15);
    }
}
