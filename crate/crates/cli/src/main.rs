//! `sqpers`: persistent Steenrod-square barcodes from the command line.
//!
//! Exit codes: 0 success, 1 a verification suite failed, 2 invalid input or
//! usage, 3 internal invariant violation.

mod diagram;

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use sqpers::cohomology::{persistent_barcode, round_significant, Barcode, BarcodeJson};
use sqpers::complex::{rp2_complex, FilteredComplex};
use sqpers::distances::{bottleneck, gh_lower_bound, InvariantSpec};
use sqpers::metric::{
    circle_grid, geodesic_metric, gluing_wedge, linf_product, parse_points_csv, quotient_metric, sphere_grid_points,
    sphere_sample, vr_filtration, FiniteMetricSpace, GroupAction, PointMetric,
};
use sqpers::thetamod::{homological_radius, theta_module, theta_radius, Operation, RadiusRule};
use sqpers::verify::{run_suite, SuiteOptions, SUITES};
use sqpers::Error;

#[derive(Parser)]
#[command(name = "sqpers", version, about = "Persistent cohomology operations of Vietoris-Rips filtrations over F2")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a finite metric space (or the projective-plane triangulation).
    Make(MakeArgs),
    /// Build the Vietoris-Rips filtration of a metric space as a complex file.
    Vr(VrArgs),
    /// Persistent cohomology barcode.
    Barcode(BarcodeArgs),
    /// Barcode of the image of a cohomology operation.
    ImageBarcode(OpBarcodeArgs),
    /// Barcode of the kernel of a cohomology operation.
    KernelBarcode(OpBarcodeArgs),
    /// Bottleneck distance between two barcode JSON files.
    Bottleneck(BottleneckArgs),
    /// Gromov-Hausdorff lower bound from barcode stability.
    GhBound(GhArgs),
    /// Run a property suite.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct OutputArgs {
    /// Output file; standard output when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Overwrite existing output files.
    #[arg(long)]
    force: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum MakeKind {
    Circle,
    Sphere,
    Rp,
    Wedge,
    Product,
    /// The 6-vertex triangulation of the projective plane, as a complex file.
    Rp2Complex,
}

#[derive(Args)]
struct MakeArgs {
    kind: MakeKind,
    /// Number of points; for `rp` and antipodal spheres, the number of orbits.
    #[arg(long)]
    count: Option<usize>,
    #[arg(long)]
    dim: Option<usize>,
    /// Radius of the sampled sphere (default 1, or 2 for `rp`).
    #[arg(long)]
    radius: Option<f64>,
    /// Deterministic evenly spaced points instead of a random sample.
    #[arg(long)]
    grid: bool,
    /// Close a sphere sample under the antipodal map.
    #[arg(long)]
    antipodal: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// First factor (distance-matrix file) for `wedge` and `product`.
    #[arg(long)]
    a: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    a_base: usize,
    /// Second factor (distance-matrix file) for `wedge` and `product`.
    #[arg(long)]
    b: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    b_base: usize,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct InputArgs {
    /// Distance matrix (`.dmat`), point cloud (`.csv`) or filtered complex file.
    input: PathBuf,
    /// Top simplex dimension of the Vietoris-Rips expansion (required for metric input).
    #[arg(long)]
    max_dim: Option<usize>,
    /// Largest filtration value to expand to; `inf` for the full filtration.
    #[arg(long)]
    max_scale: Option<f64>,
    /// Metric for point clouds: `euclidean` or `sphere:<radius>`.
    #[arg(long, default_value = "euclidean")]
    metric: String,
}

#[derive(Args)]
struct VrArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleArg {
    /// Death of the longest finite bar.
    Dominant,
    /// Smallest death among bars born by `--birth-tol`.
    FirstBorn,
}

#[derive(Args)]
struct ReportArgs {
    /// Also write the diagram as SVG.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Also write the diagram as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Report a critical radius read off the barcode.
    #[arg(long, value_enum)]
    radius: Option<RuleArg>,
    /// Birth tolerance of the first-born radius rule.
    #[arg(long, default_value_t = 0.0)]
    birth_tol: f64,
    /// Bars no longer than this are ignored by the first-born radius rule.
    #[arg(long, default_value_t = 0.0)]
    min_length: f64,
}

#[derive(Args)]
struct BarcodeArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Degrees to report (repeatable); defaults to every degree the caps allow.
    #[arg(long = "degree")]
    degrees: Vec<usize>,
    /// Drop one essential degree-0 bar (reduced cohomology).
    #[arg(long)]
    reduced: bool,
    #[command(flatten)]
    report: ReportArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct OpBarcodeArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Operation: `id`, `zero` or `sq:k`.
    #[arg(long)]
    op: String,
    #[arg(long)]
    source_degree: usize,
    #[command(flatten)]
    report: ReportArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct BottleneckArgs {
    a: PathBuf,
    b: PathBuf,
    /// Degrees to compare (repeatable); defaults to every degree present.
    #[arg(long = "degree")]
    degrees: Vec<usize>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct GhArgs {
    x: PathBuf,
    y: PathBuf,
    #[arg(long)]
    max_dim: usize,
    #[arg(long)]
    max_scale: f64,
    /// Homology degrees compared (repeatable); defaults to 0, 1 and 2.
    #[arg(long = "degree")]
    degrees: Vec<usize>,
    /// Operations compared through their image barcodes (repeatable).
    #[arg(long = "op")]
    ops: Vec<String>,
    /// Source degree of the operations.
    #[arg(long, default_value_t = 1)]
    source_degree: usize,
    #[arg(long, default_value = "euclidean")]
    metric: String,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name, or `all`.
    suite: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of random instances (suite default when absent).
    #[arg(long)]
    trials: Option<usize>,
    #[command(flatten)]
    out: OutputArgs,
}

/// Failure of a command, carrying its exit code.
enum Failure {
    Usage(String),
    Library(Error),
    Verify,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Library(e)
    }
}

type CmdResult = Result<(), Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = std::panic::catch_unwind(|| run(cli));
    match result {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(Failure::Verify)) => ExitCode::from(1),
        Ok(Err(Failure::Usage(msg))) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Ok(Err(Failure::Library(e))) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_internal() { 3 } else { 2 })
        }
        Err(_) => ExitCode::from(3),
    }
}

fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Make(a) => cmd_make(a),
        Command::Vr(a) => cmd_vr(a),
        Command::Barcode(a) => cmd_barcode(a),
        Command::ImageBarcode(a) => cmd_op_barcode(a, true),
        Command::KernelBarcode(a) => cmd_op_barcode(a, false),
        Command::Bottleneck(a) => cmd_bottleneck(a),
        Command::GhBound(a) => cmd_gh_bound(a),
        Command::Verify(a) => cmd_verify(a),
    }
}

/// Refuses to clobber an existing file unless `--force` was given.
fn check_writable(path: &Path, force: bool) -> CmdResult {
    if path.exists() && !force {
        return Err(usage(format!("{} exists; pass --force to overwrite", path.display())));
    }
    Ok(())
}

fn emit(out: &OutputArgs, text: &str) -> CmdResult {
    match &out.output {
        Some(path) => {
            check_writable(path, out.force)?;
            fs::write(path, text).map_err(Error::from)?;
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(Error::from)?;
        }
    }
    Ok(())
}

fn emit_json(out: &OutputArgs, value: &impl Serialize) -> CmdResult {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Invariant(format!("JSON encoding: {e}")))?;
    text.push('\n');
    emit(out, &text)
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn read_metric(path: &Path, metric: &str) -> Result<FiniteMetricSpace, Failure> {
    let text = read(path)?;
    if path.extension().is_some_and(|e| e == "csv") {
        let points = parse_points_csv(&text)?;
        let metric: PointMetric = metric.parse()?;
        Ok(FiniteMetricSpace::from_points(&points, metric)?)
    } else {
        Ok(FiniteMetricSpace::parse_dmat(&text)?)
    }
}

fn is_metric_file(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "dmat" || e == "csv")
}

/// Metric inputs are expanded under the mandatory caps; complex files are
/// used as they are.
fn load_complex(input: &InputArgs) -> Result<FilteredComplex, Failure> {
    if is_metric_file(&input.input) {
        let (Some(max_dim), Some(max_scale)) = (input.max_dim, input.max_scale) else {
            return Err(usage("metric input needs both --max-dim and --max-scale"));
        };
        if max_scale.is_nan() || max_scale < 0.0 {
            return Err(usage(format!("--max-scale must be >= 0, got {max_scale}")));
        }
        let x = read_metric(&input.input, &input.metric)?;
        Ok(vr_filtration(&x, max_dim, max_scale))
    } else {
        Ok(FilteredComplex::parse_text(&read(&input.input)?)?)
    }
}

fn cmd_make(a: MakeArgs) -> CmdResult {
    let need = |v: Option<usize>, name: &str| v.ok_or_else(|| usage(format!("make needs --{name}")));
    let radius = a.radius.unwrap_or(match a.kind {
        MakeKind::Rp => 2.0,
        _ => 1.0,
    });
    let x = match a.kind {
        MakeKind::Rp2Complex => return emit(&a.out, &rp2_complex().to_text()),
        MakeKind::Circle => {
            let count = need(a.count, "count")?;
            if a.grid {
                circle_grid(count, radius)?
            } else {
                sphere_sample(1, radius, count, a.seed, false)?
            }
        }
        MakeKind::Sphere => sphere(a.dim.unwrap_or(2), need(a.count, "count")?, radius, a.grid, a.antipodal, a.seed)?,
        MakeKind::Rp => {
            let s = sphere(a.dim.unwrap_or(2), need(a.count, "count")?, radius, a.grid, true, a.seed)?;
            quotient_metric(&s, &GroupAction::antipodal(s.len())?)?
        }
        MakeKind::Wedge | MakeKind::Product => {
            let (Some(pa), Some(pb)) = (&a.a, &a.b) else {
                return Err(usage("wedge and product need --a and --b"));
            };
            let (x, y) = (read_metric(pa, "euclidean")?, read_metric(pb, "euclidean")?);
            if matches!(a.kind, MakeKind::Wedge) {
                gluing_wedge(&x, a.a_base, &y, a.b_base)?
            } else {
                linf_product(&x, &y)
            }
        }
    };
    emit(&a.out, &x.to_dmat())
}

/// Sphere sample; with `antipodal`, `count` is the number of antipodal pairs.
fn sphere(dim: usize, count: usize, radius: f64, grid: bool, antipodal: bool, seed: u64) -> Result<FiniteMetricSpace, Failure> {
    if !grid {
        return Ok(sphere_sample(dim, radius, count, seed, antipodal)?);
    }
    match dim {
        1 if antipodal => Ok(circle_grid(2 * count, radius)?),
        1 => Ok(circle_grid(count, radius)?),
        2 => Ok(geodesic_metric(&sphere_grid_points(count, antipodal), radius)?),
        _ => Err(usage(format!("--grid supports dimensions 1 and 2, not {dim}"))),
    }
}

fn cmd_vr(a: VrArgs) -> CmdResult {
    if !is_metric_file(&a.input.input) {
        return Err(usage("vr needs a distance-matrix (.dmat) or point-cloud (.csv) input"));
    }
    let k = load_complex(&a.input)?;
    emit(&a.out, &k.to_text())
}

#[derive(Serialize)]
struct RadiusJson {
    rule: &'static str,
    vr_scale: f64,
    u_scale: f64,
}

#[derive(Serialize)]
struct BarcodeReport {
    #[serde(flatten)]
    barcode: BarcodeJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    radius: Option<RadiusJson>,
}

fn radius_rule(r: &ReportArgs) -> Option<(&'static str, RadiusRule)> {
    r.radius.map(|rule| match rule {
        RuleArg::Dominant => ("dominant", RadiusRule::Dominant),
        RuleArg::FirstBorn => (
            "first-born",
            RadiusRule::FirstBorn {
                birth_tolerance: r.birth_tol,
                min_length: r.min_length,
            },
        ),
    })
}

fn radius_json(name: &'static str, vr_scale: f64) -> RadiusJson {
    RadiusJson {
        rule: name,
        vr_scale: round_significant(vr_scale),
        u_scale: round_significant(vr_scale / 2.0),
    }
}

fn write_report(b: &Barcode, label: &str, with_u_scale: bool, radius: Option<RadiusJson>, r: &ReportArgs, out: &OutputArgs) -> CmdResult {
    for path in [&r.svg, &r.csv].into_iter().flatten() {
        check_writable(path, out.force)?;
    }
    if let Some(path) = &out.output {
        check_writable(path, out.force)?;
    }
    if let Some(path) = &r.svg {
        fs::write(path, diagram::to_svg(b, label)).map_err(Error::from)?;
    }
    if let Some(path) = &r.csv {
        fs::write(path, diagram::to_csv(b)).map_err(Error::from)?;
    }
    emit_json(
        out,
        &BarcodeReport {
            barcode: b.to_json(label, with_u_scale),
            radius,
        },
    )
}

fn cmd_barcode(a: BarcodeArgs) -> CmdResult {
    let k = load_complex(&a.input)?;
    let top = k.top_dim().unwrap_or(0);
    let degrees = if a.degrees.is_empty() {
        // Degree top_dim cohomology is only complete when nothing was cut off.
        let limit = match a.input.max_dim {
            Some(d) if is_metric_file(&a.input.input) => d.saturating_sub(1),
            _ => top,
        };
        (0..=limit).collect()
    } else {
        a.degrees.clone()
    };
    let full = persistent_barcode(&k, degrees.iter().copied().max().unwrap_or(0));
    let mut b = degrees.iter().fold(Barcode::new(), |acc, &d| acc.union(&full.in_degree(d)));
    if a.reduced {
        b = b.to_reduced();
    }
    let radius = match radius_rule(&a.report) {
        Some((name, rule)) => {
            let degree = if degrees.contains(&1) { 1 } else { degrees[0] };
            Some(radius_json(name, homological_radius(&b, degree, rule)))
        }
        None => None,
    };
    write_report(&b, "id", radius.is_some(), radius, &a.report, &a.out)
}

fn cmd_op_barcode(a: OpBarcodeArgs, image: bool) -> CmdResult {
    let op = Operation::parse(&a.op, a.source_degree)?;
    let k = load_complex(&a.input)?;
    let module = theta_module(&k, op)?;
    let b = if image { module.image_barcode()? } else { module.kernel_barcode()? };
    let radius = radius_rule(&a.report).map(|(name, rule)| radius_json(name, theta_radius(&b, rule)));
    write_report(&b, &op.label(), true, radius, &a.report, &a.out)
}

#[derive(Serialize)]
struct DegreeDistance {
    degree: usize,
    #[serde(rename = "d_B")]
    d_b: Option<f64>,
}

fn read_barcode(path: &Path) -> Result<Barcode, Failure> {
    let json: BarcodeJson =
        serde_json::from_str(&read(path)?).map_err(|e| usage(format!("{} is not barcode JSON: {e}", path.display())))?;
    Ok(Barcode::from_json(&json)?)
}

fn cmd_bottleneck(a: BottleneckArgs) -> CmdResult {
    let (x, y) = (read_barcode(&a.a)?, read_barcode(&a.b)?);
    let mut degrees = a.degrees.clone();
    if degrees.is_empty() {
        degrees = x.bars().iter().chain(y.bars()).map(|bar| bar.degree).collect();
        degrees.sort_unstable();
        degrees.dedup();
    }
    let per_degree: Vec<DegreeDistance> = degrees
        .into_iter()
        .map(|degree| {
            let d = bottleneck(&x, &y, degree);
            DegreeDistance {
                degree,
                d_b: d.is_finite().then(|| round_significant(d)),
            }
        })
        .collect();
    emit_json(&a.out, &serde_json::json!({ "per_degree": per_degree }))
}

fn cmd_gh_bound(a: GhArgs) -> CmdResult {
    if a.max_scale.is_nan() || a.max_scale < 0.0 {
        return Err(usage(format!("--max-scale must be >= 0, got {}", a.max_scale)));
    }
    let x = read_metric(&a.x, &a.metric)?;
    let y = read_metric(&a.y, &a.metric)?;
    let ops = a
        .ops
        .iter()
        .map(|s| Operation::parse(s, a.source_degree))
        .collect::<Result<Vec<_>, _>>()?;
    let spec = InvariantSpec {
        degrees: if a.degrees.is_empty() { vec![0, 1, 2] } else { a.degrees.clone() },
        ops,
        max_dim: a.max_dim,
        max_scale: a.max_scale,
    };
    let report = gh_lower_bound(&x, &y, &spec)?;
    let json = report.to_json();
    for d in &json.per_invariant {
        eprintln!("{:<16} d_B = {}", d.invariant, d.d_b.map_or("inf".into(), |v| v.to_string()));
    }
    eprintln!(
        "GH lower bound {} (from {})",
        json.gh_lower_bound.map_or("inf".into(), |v| v.to_string()),
        json.argmax.as_deref().unwrap_or("-")
    );
    emit_json(&a.out, &json)
}

fn cmd_verify(a: VerifyArgs) -> CmdResult {
    let names: Vec<&str> = if a.suite == "all" {
        SUITES.to_vec()
    } else if SUITES.contains(&a.suite.as_str()) {
        vec![a.suite.as_str()]
    } else {
        return Err(usage(format!("unknown suite '{}' (available: all, {})", a.suite, SUITES.join(", "))));
    };
    let mut reports = Vec::new();
    for name in names {
        let r = run_suite(
            name,
            SuiteOptions {
                seed: a.seed,
                trials: a.trials,
            },
        )?;
        eprintln!("{}: {}", r.suite, if r.passed { "pass" } else { "FAIL" });
        reports.push(r);
    }
    let passed = reports.iter().all(|r| r.passed);
    if reports.len() == 1 {
        emit_json(&a.out, &reports[0])?;
    } else {
        emit_json(&a.out, &reports)?;
    }
    if passed {
        Ok(())
    } else {
        Err(Failure::Verify)
    }
}
