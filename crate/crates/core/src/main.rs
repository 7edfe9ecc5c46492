use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use cornerreg::fields::field_from_spec;
use cornerreg::geometry::bundled::{bundled_document, BUNDLED};
use cornerreg::geometry::{load_geometry, Geometry};
use cornerreg::mesher::{graded_mesh, MeshOptions};
use cornerreg::norms::{analytic_fit, shift_constant_check, FitOptions, NormDomain, NormEvaluator, NormKind};
use cornerreg::report::{AnalysisReport, GeometrySummary};
use cornerreg::spectra2d::{corner_spectrum_laplace, ProblemSpec};
use cornerreg::spherical::{corner_exponent_pipeline, ExponentKind, PipelineOptions};
use cornerreg::weights::{
    admissible_2d, admissible_3d, kappa, polygon_corner_spectra, polyhedron_edge_spectra, shift_condition_aniso,
    ProblemKind, WeightMultiExponent,
};
use cornerreg::{Error, Result};

/// Environment variable holding the worker thread count.
const THREADS_ENV: &str = "CORNERREG_THREADS";

#[derive(Parser, Debug)]
#[command(name = "cornerreg", version, about = "Corner and edge regularity analysis for the Laplacian")]
struct Cli {
    /// Write the JSON report here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Singular exponents and b-thresholds at every corner (2D) or edge (3D).
    Spectra(SpectraArgs),
    /// Limiting corner exponent of a polyhedron vertex from spherical caps.
    Exponents(ExponentsArgs),
    /// Admissibility of a weight multi-exponent.
    Admissible(AdmissibleArgs),
    /// Weighted semi-norms of a closed-form field for orders 0..=M.
    Norms(NormsArgs),
    /// Shift-constant plateau check for a field and its Laplacian.
    VerifyShift(ShiftArgs),
    /// Geometrically graded mesh, written as JSON and legacy VTK.
    Mesh(MeshArgs),
    /// List the bundled geometries, or print one of them.
    Geometries { name: Option<String> },
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Bc {
    Geometry,
    Dirichlet,
    Neumann,
    Mixed,
}

#[derive(Args, Debug, Serialize)]
struct SpectraArgs {
    /// Geometry file, or the name of a bundled geometry.
    geometry: String,
    #[arg(long, value_enum, default_value = "geometry")]
    bc: Bc,
    /// Exponents are listed in [-window, window].
    #[arg(long, default_value_t = 10.0)]
    window: f64,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Kind {
    Dirichlet,
    Neumann,
}

#[derive(Args, Debug, Serialize)]
struct ExponentsArgs {
    geometry: String,
    #[arg(long)]
    corner: usize,
    #[arg(long, value_enum, default_value = "dirichlet")]
    kind: Kind,
    /// Coarsest spherical mesh size.
    #[arg(long, default_value_t = 0.2)]
    mesh_size: f64,
    #[arg(long, default_value_t = 3)]
    levels: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Problem {
    Dirichlet,
    Neumann,
    Mixed,
}

#[derive(Args, Debug, Serialize)]
struct WeightArgs {
    /// JSON file `{"corners": [...], "edges": [...]}`.
    #[arg(long, conflicts_with_all = ["beta", "beta_edge"])]
    weights: Option<PathBuf>,
    /// Uniform corner weight.
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    /// Uniform edge weight (defaults to the corner weight).
    #[arg(long, allow_hyphen_values = true)]
    beta_edge: Option<f64>,
}

impl WeightArgs {
    fn resolve(&self, geom: &Geometry) -> Result<WeightMultiExponent> {
        let beta = match (&self.weights, self.beta) {
            (Some(path), _) => WeightMultiExponent::from_json(&fs::read_to_string(path)?)?,
            (None, Some(b)) => WeightMultiExponent::uniform(geom, b, self.beta_edge.unwrap_or(b))?,
            (None, None) => return Err(Error::MissingData("pass --weights or --beta".into())),
        };
        beta.check_bound(geom)?;
        Ok(beta)
    }
}

#[derive(Args, Debug, Serialize)]
struct AdmissibleArgs {
    geometry: String,
    #[command(flatten)]
    weights: WeightArgs,
    #[arg(long, value_enum, default_value = "dirichlet")]
    problem: Problem,
    #[arg(long, default_value_t = 10.0)]
    window: f64,
    /// Limiting corner exponents (3D), one per corner; computed when omitted.
    #[arg(long, value_delimiter = ',')]
    corner_exponents: Option<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Space {
    K,
    J,
    Step,
    M,
    N,
}

#[derive(Args, Debug, Serialize)]
struct NormsArgs {
    geometry: String,
    /// Field specification, e.g. "corner_singular k=1".
    #[arg(long)]
    field: String,
    #[arg(long, value_enum, default_value = "k")]
    space: Space,
    #[command(flatten)]
    weights: WeightArgs,
    #[arg(long, default_value_t = 8)]
    max_order: usize,
    /// Also write the sequence as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct ShiftArgs {
    geometry: String,
    #[arg(long)]
    field: String,
    #[command(flatten)]
    weights: WeightArgs,
    #[arg(long, default_value_t = 12)]
    max_order: usize,
}

#[derive(Args, Debug, Serialize)]
struct MeshArgs {
    geometry: String,
    #[arg(long, default_value_t = 0.5)]
    sigma: f64,
    #[arg(long, default_value_t = 4)]
    layers: usize,
    /// Transverse-only grading along edges (the only mode for polyhedra).
    #[arg(long)]
    aniso: bool,
    /// Size of the graded zone.
    #[arg(long)]
    eps: Option<f64>,
    /// Target size of ungraded cells.
    #[arg(long)]
    size: Option<f64>,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    #[arg(long, default_value = "mesh")]
    name: String,
}

fn load(source: &str) -> Result<Geometry> {
    let path = Path::new(source);
    if path.exists() {
        return load_geometry(&fs::read_to_string(path)?);
    }
    match bundled_document(source) {
        Ok(doc) => load_geometry(doc),
        Err(_) => Err(Error::MissingData(format!("no geometry file or bundled geometry named {source:?}"))),
    }
}

fn problem_spec(bc: Bc) -> Option<ProblemSpec> {
    match bc {
        Bc::Geometry => None,
        Bc::Dirichlet => Some(ProblemSpec::dirichlet()),
        Bc::Neumann => Some(ProblemSpec::neumann()),
        Bc::Mixed => Some(ProblemSpec::mixed()),
    }
}

fn spectra(args: &SpectraArgs, geom: &Geometry) -> Result<Value> {
    let bc = problem_spec(args.bc);
    match geom {
        Geometry::Polygon(poly) => {
            let mut out = Vec::new();
            for c in polygon_corner_spectra(poly, args.window)? {
                let sectors = match bc {
                    None => c.sectors.clone(),
                    Some(bc) => poly.corners()[c.corner]
                        .sectors
                        .iter()
                        .map(|s| corner_spectrum_laplace(s.opening, bc, args.window))
                        .collect::<Result<_>>()?,
                };
                let c = cornerreg::weights::CornerSpectra { corner: c.corner, sectors };
                out.push(json!({ "corner": c.corner, "b_threshold": c.b_threshold()?, "sectors": c.sectors }));
            }
            Ok(json!({ "corners": out }))
        }
        Geometry::Polyhedron(poly) => {
            let spectra = match bc {
                None => polyhedron_edge_spectra(poly, args.window)?,
                Some(bc) => poly
                    .edges()
                    .iter()
                    .map(|e| corner_spectrum_laplace(e.opening, bc, args.window))
                    .collect::<Result<_>>()?,
            };
            let mut out = Vec::new();
            for (e, s) in spectra.iter().enumerate() {
                out.push(json!({ "edge": e, "b_threshold": s.b_threshold()?, "spectrum": s }));
            }
            Ok(json!({ "edges": out }))
        }
    }
}

fn exponents(args: &ExponentsArgs, geom: &Geometry) -> Result<Value> {
    let opts = PipelineOptions { h0: args.mesh_size, levels: args.levels, ..PipelineOptions::default() };
    let kind = match args.kind {
        Kind::Dirichlet => ExponentKind::Dirichlet,
        Kind::Neumann => ExponentKind::Neumann,
    };
    Ok(serde_json::to_value(corner_exponent_pipeline(geom, args.corner, kind, &opts)?)?)
}

fn admissible(args: &AdmissibleArgs, geom: &Geometry) -> Result<Value> {
    let beta = args.weights.resolve(geom)?;
    let kind = match args.problem {
        Problem::Dirichlet => ProblemKind::Dirichlet,
        Problem::Neumann => ProblemKind::Neumann,
        Problem::Mixed => ProblemKind::Mixed,
    };
    match geom {
        Geometry::Polygon(poly) => {
            let spectra = polygon_corner_spectra(poly, args.window)?;
            let report = admissible_2d(geom, &beta, &spectra)?;
            Ok(json!({ "kappa": kappa(&beta), "report": report }))
        }
        Geometry::Polyhedron(poly) => {
            let edge_spectra = polyhedron_edge_spectra(poly, args.window)?;
            let lambdas = match &args.corner_exponents {
                Some(l) => l.clone(),
                None => {
                    let kind = match args.problem {
                        Problem::Neumann => ExponentKind::Neumann,
                        _ => ExponentKind::Dirichlet,
                    };
                    (0..geom.num_corners())
                        .map(|c| Ok(corner_exponent_pipeline(geom, c, kind, &PipelineOptions::default())?.lambda))
                        .collect::<Result<Vec<_>>>()?
                }
            };
            let report = admissible_3d(geom, &beta, &edge_spectra, &lambdas, kind)?;
            let shift = shift_condition_aniso(geom, &beta, &edge_spectra)?;
            Ok(json!({ "kappa": kappa(&beta), "corner_exponents": lambdas, "report": report, "edge_shift": shift }))
        }
    }
}

fn norm_kind(space: Space) -> NormKind {
    match space {
        Space::K => NormKind::K,
        Space::J => NormKind::J,
        Space::Step => NormKind::Step,
        Space::M => NormKind::M,
        Space::N => NormKind::N,
    }
}

fn norms(args: &NormsArgs, geom: &Geometry) -> Result<Value> {
    let u = field_from_spec(&args.field, geom)?;
    let eval = NormEvaluator::new(NormDomain::from_geometry(geom)?, args.weights.resolve(geom)?)?;
    let seq = eval.sequence(u.as_ref(), &norm_kind(args.space), args.max_order)?;
    if let Some(path) = &args.csv {
        fs::write(path, seq.to_csv())?;
    }
    let fit = if seq.values.len() >= 6 { Some(analytic_fit(&seq, &FitOptions::default())?) } else { None };
    Ok(json!({ "field": u.describe(), "sequence": seq, "fit": fit }))
}

fn verify_shift(args: &ShiftArgs, geom: &Geometry) -> Result<Value> {
    let u = field_from_spec(&args.field, geom)?;
    let f = cornerreg::fields::Laplacian(u.clone());
    let eval = NormEvaluator::new(NormDomain::from_geometry(geom)?, args.weights.resolve(geom)?)?;
    let report = shift_constant_check(u.as_ref(), &f, &eval, args.max_order)?;
    Ok(json!({ "field": u.describe(), "shift": report }))
}

fn mesh(args: &MeshArgs, geom: &Geometry) -> Result<Value> {
    if args.aniso && geom.dimension() == 2 {
        return Err(Error::Unsupported("anisotropic grading applies to polyhedra".into()));
    }
    let opts = MeshOptions { sigma: args.sigma, layers: args.layers, eps: args.eps, size: args.size };
    let m = graded_mesh(geom, &opts)?;
    let audit = m.check(geom)?;
    fs::create_dir_all(&args.out_dir)?;
    let json_path = args.out_dir.join(format!("{}.json", args.name));
    let vtk_path = args.out_dir.join(format!("{}.vtk", args.name));
    fs::write(&json_path, m.to_json()?)?;
    fs::write(&vtk_path, m.to_vtk())?;
    Ok(json!({
        "files": [json_path, vtk_path],
        "eps": m.eps,
        "layer_counts": m.layer_counts(),
        "audit": audit,
    }))
}

fn run(cli: &Cli) -> Result<String> {
    let (name, source) = match &cli.command {
        Command::Spectra(a) => ("spectra", &a.geometry),
        Command::Exponents(a) => ("exponents", &a.geometry),
        Command::Admissible(a) => ("admissible", &a.geometry),
        Command::Norms(a) => ("norms", &a.geometry),
        Command::VerifyShift(a) => ("verify-shift", &a.geometry),
        Command::Mesh(a) => ("mesh", &a.geometry),
        Command::Geometries { name } => {
            return match name {
                Some(n) => Ok(bundled_document(n)?.to_string()),
                None => Ok(BUNDLED.iter().map(|(n, _)| format!("{n}\n")).collect()),
            }
        }
    };
    let geom = load(source)?;
    let result = match &cli.command {
        Command::Spectra(a) => spectra(a, &geom)?,
        Command::Exponents(a) => exponents(a, &geom)?,
        Command::Admissible(a) => admissible(a, &geom)?,
        Command::Norms(a) => norms(a, &geom)?,
        Command::VerifyShift(a) => verify_shift(a, &geom)?,
        Command::Mesh(a) => mesh(a, &geom)?,
        Command::Geometries { .. } => unreachable!(),
    };
    let params = serde_json::to_value(&cli.command)?;
    let report = AnalysisReport::new(name, params, GeometrySummary::new(source, &geom), result);
    report.to_json()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(n) = std::env::var(THREADS_ENV) {
        match n.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => eprintln!("ignoring {THREADS_ENV}={n:?}: expected a positive integer"),
        }
    }
    let out = run(&cli).and_then(|text| {
        match &cli.output {
            Some(path) => fs::write(path, text + "\n")?,
            None => {
                // A closed pipe (e.g. `| head`) is not an error of the analysis.
                let _ = writeln!(std::io::stdout(), "{text}");
            }
        }
        Ok(())
    });
    match out {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let err = json!({ "error": { "kind": e.kind(), "code": e.code(), "message": e.to_string() } });
            eprintln!("{err}");
            ExitCode::from(e.code() as u8)
        }
    }
}
