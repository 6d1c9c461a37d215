mod config;
mod error;
mod output;
mod poly;
mod suites;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use heisenberg::measures::measures_report;
use heisenberg::surfaces::{build, detect_singular_default, mesh_surface, singular_components, write_mesh_csv, write_obj};

use config::{Cli, Command, RunConfig};
use error::CliError;
use output::{emit, write_atomic};

const LAMBDA_SURFACES: [&str; 5] = ["sphere", "sphere_graph", "cylinder_S", "helicoid_L", "sigma-lambda"];

fn mesh(cfg: &RunConfig) -> Result<ExitCode, CliError> {
    let surface = build(&cfg.surface, &cfg.surface_params())?;
    let (n, m) = cfg.res.unwrap_or((64, 64));
    let meshes = mesh_surface(&surface, n, m, true)?;
    for (k, mesh) in meshes.iter().enumerate() {
        let flagged = detect_singular_default(mesh);
        let sizes: Vec<usize> = singular_components(mesh, &flagged).iter().map(Vec::len).collect();
        eprintln!("patch {k}: {} vertices, {} singular in {} component(s) {:?}", mesh.vertices.len(), flagged.len(), sizes.len(), sizes);
    }
    emit(cfg.out.as_deref(), |w| write_obj(&meshes, w))?;
    let csv_path: Option<PathBuf> = cfg.csv.clone().or_else(|| cfg.out.as_ref().map(|p| p.with_extension("csv")));
    if let Some(path) = csv_path {
        write_atomic(&path, |w| write_mesh_csv(&meshes, w).map_err(std::io::Error::other))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn verify(cfg: &RunConfig) -> Result<ExitCode, CliError> {
    let report = suites::run(cfg)?;
    emit(cfg.out.as_deref(), |w| report.write_csv(w))?;
    let failed = report.failures();
    eprintln!("{} checks, {} failed", report.checks.len(), failed);
    Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn report(cfg: &RunConfig) -> Result<ExitCode, CliError> {
    let surface = build(&cfg.surface, &cfg.surface_params())?;
    let n = cfg.res.map(|(n, _)| n).unwrap_or(128);
    let lambda = LAMBDA_SURFACES.contains(&surface.name.as_str()).then_some(cfg.lambda);
    let r = measures_report(&surface, lambda, n)?;
    emit(cfg.out.as_deref(), |w| {
        serde_json::to_writer_pretty(&mut *w, &r).map_err(std::io::Error::other)?;
        writeln!(w)
    })?;
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Mesh { common, csv } => mesh(&RunConfig::resolve(&common, csv.as_ref(), None, None)?),
        Command::Verify { common, suite, tolerances } => verify(&RunConfig::resolve(&common, None, suite, Some(&tolerances))?),
        Command::Report { common } => report(&RunConfig::resolve(&common, None, None, None)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("h1: {e}");
            e.exit_code()
        }
    }
}
