//! Command-line flags, the optional TOML config file, and their merge.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use heisenberg::hcurves::{horizontal_lift, read_curve_csv, reparameterize_arclength, HorizontalCurve, PlanarCurve};
use heisenberg::surfaces::{polynomial_profile, SurfaceParams};

use crate::error::CliError;
use crate::poly::{parse_polynomial, Polynomial};

#[derive(Debug, Parser)]
#[command(name = "h1", version, about = "Surfaces, geodesics and measures in the first Heisenberg group")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Export a surface as OBJ plus a per-vertex CSV.
    Mesh {
        #[command(flatten)]
        common: CommonArgs,
        /// Per-vertex CSV path; defaults to the OBJ path with a .csv extension.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Run a verification suite and write its report.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum)]
        suite: Option<Suite>,
        #[command(flatten)]
        tolerances: TolOverrides,
    },
    /// Area, volume, mean curvature and isoperimetric ratio of one surface, as JSON.
    Report {
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Debug, Default, Args)]
pub struct CommonArgs {
    /// TOML file with the same keys as the flags; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub surface: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    /// Helix radius for helicoid surfaces.
    #[arg(long)]
    pub r: Option<f64>,
    /// Radius for vertical cylinders and Euclidean spheres.
    #[arg(long)]
    pub rho: Option<f64>,
    /// Profile g(y) of t = xy + g(y), a polynomial in y.
    #[arg(long, allow_hyphen_values = true)]
    pub g: Option<String>,
    /// Plane curve samples with header eps,x,y.
    #[arg(long)]
    pub curve: Option<PathBuf>,
    /// Number of helicoid continuations.
    #[arg(long)]
    pub k_max: Option<usize>,
    /// Grid resolution NxM.
    #[arg(long)]
    pub res: Option<String>,
    /// Output path; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Geodesics,
    Jacobi,
    Curvature,
    Minkowski,
    Bernstein,
    Iso,
    All,
}

impl Suite {
    pub const EACH: [Suite; 6] =
        [Suite::Geodesics, Suite::Jacobi, Suite::Curvature, Suite::Minkowski, Suite::Bernstein, Suite::Iso];
}

macro_rules! tolerances {
    ($($field:ident = $flag:literal : $default:expr),* $(,)?) => {
        /// Per-check tolerance overrides.
        #[derive(Clone, Debug, Default, Args, Deserialize)]
        #[serde(deny_unknown_fields, rename_all = "kebab-case")]
        pub struct TolOverrides {
            $(
                #[arg(long = $flag)]
                pub $field: Option<f64>,
            )*
        }

        #[derive(Clone, Copy, Debug, PartialEq)]
        pub struct Tolerances {
            $(pub $field: f64,)*
        }

        impl Default for Tolerances {
            fn default() -> Self {
                Tolerances { $($field: $default,)* }
            }
        }

        impl Tolerances {
            pub fn resolve(flags: &TolOverrides, file: &TolOverrides) -> Result<Self, CliError> {
                let mut t = Tolerances::default();
                $(
                    if let Some(v) = flags.$field.or(file.$field) {
                        if !(v > 0.0 && v.is_finite()) {
                            return Err(CliError::Config(format!("tolerance {} must be positive, got {v}", $flag)));
                        }
                        t.$field = v;
                    }
                )*
                Ok(t)
            }
        }
    };
}

tolerances! {
    geodesic = "tol-geodesic": 1e-8,
    pole = "tol-pole": 1e-12,
    conserved = "tol-conserved": 1e-10,
    jacobi = "tol-jacobi": 1e-6,
    cut = "tol-cut": 1e-12,
    bisection = "tol-bisection": 1e-10,
    curvature = "tol-curvature": 1e-4,
    pde = "tol-pde": 1e-6,
    orthogonality = "tol-orthogonality": 1e-6,
    calibration = "tol-calibration": 1e-6,
    ruling = "tol-ruling": 1e-5,
    area = "tol-area": 1e-4,
    volume = "tol-volume": 1e-4,
    minkowski = "tol-minkowski": 1e-4,
    first_variation = "tol-first-variation": 1e-3,
    iso = "tol-iso": 1e-3,
    dilation = "tol-dilation": 1e-4,
}

/// Contents of a `--config` file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub surface: Option<String>,
    pub lambda: Option<f64>,
    pub r: Option<f64>,
    pub rho: Option<f64>,
    pub g: Option<String>,
    pub curve: Option<PathBuf>,
    pub k_max: Option<usize>,
    pub res: Option<String>,
    pub out: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub suite: Option<Suite>,
    #[serde(default)]
    pub tolerances: TolOverrides,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path.display().to_string(), e))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))
    }
}

/// Fully resolved settings for one run.
#[derive(Clone)]
pub struct RunConfig {
    pub surface: String,
    pub lambda: f64,
    pub lambda_given: bool,
    pub r: f64,
    pub rho: f64,
    pub g: Option<(String, Polynomial)>,
    pub curve: Option<Arc<dyn HorizontalCurve>>,
    pub k_max: usize,
    pub res: Option<(usize, usize)>,
    pub out: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub suite: Suite,
    pub tolerances: Tolerances,
}

pub fn parse_res(s: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Config(format!("resolution must look like 128x128, got '{s}'"));
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    let (n, m): (usize, usize) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
    if n < 2 || m < 2 || n > 8192 || m > 8192 {
        return Err(bad());
    }
    Ok((n, m))
}

/// Reads a curve CSV and lifts it horizontally from height 0, reparameterizing by arclength if needed.
pub fn load_curve(path: &Path) -> Result<Arc<dyn HorizontalCurve>, CliError> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path.display().to_string(), e))?;
    let planar: Arc<dyn PlanarCurve> = Arc::new(read_curve_csv(file)?);
    let lifted = match horizontal_lift(planar.clone(), 0.0) {
        Ok(c) => c,
        Err(heisenberg::Error::NotArclength(_)) => horizontal_lift(Arc::new(reparameterize_arclength(planar)?), 0.0)?,
        Err(e) => return Err(e.into()),
    };
    Ok(Arc::new(lifted))
}

impl RunConfig {
    pub fn resolve(
        common: &CommonArgs,
        csv: Option<&PathBuf>,
        suite: Option<Suite>,
        tolerances: Option<&TolOverrides>,
    ) -> Result<Self, CliError> {
        let file = match &common.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let lambda = common.lambda.or(file.lambda);
        let g = match common.g.clone().or(file.g) {
            Some(src) => {
                let p = parse_polynomial(&src)?;
                Some((src, p))
            }
            None => None,
        };
        let curve = match common.curve.clone().or(file.curve) {
            Some(p) => Some(load_curve(&p)?),
            None => None,
        };
        let res = common.res.clone().or(file.res).map(|s| parse_res(&s)).transpose()?;
        let finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(v)
            } else {
                Err(CliError::Config(format!("{name} must be finite")))
            }
        };
        Ok(RunConfig {
            surface: common.surface.clone().or(file.surface).unwrap_or_else(|| "sphere".into()),
            lambda: finite("lambda", lambda.unwrap_or(1.0))?,
            lambda_given: lambda.is_some(),
            r: finite("r", common.r.or(file.r).unwrap_or(1.0))?,
            rho: finite("rho", common.rho.or(file.rho).unwrap_or(1.0))?,
            g,
            curve,
            k_max: common.k_max.or(file.k_max).unwrap_or(4),
            res,
            out: common.out.clone().or(file.out),
            csv: csv.cloned().or(file.csv),
            suite: suite.or(file.suite).unwrap_or(Suite::All),
            tolerances: Tolerances::resolve(tolerances.unwrap_or(&TolOverrides::default()), &file.tolerances)?,
        })
    }

    pub fn surface_params(&self) -> SurfaceParams {
        SurfaceParams {
            lambda: self.lambda,
            r: self.r,
            rho: self.rho,
            g: self.g.as_ref().map(|(_, p)| polynomial_profile(p.coefficients().to_vec())),
            curve: self.curve.clone(),
            k_max: self.k_max,
            ..SurfaceParams::default()
        }
    }
}
