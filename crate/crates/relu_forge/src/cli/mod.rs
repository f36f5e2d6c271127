//! The `relu-forge` command line.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::approximator::{
    build_approximant_with, certify, rate_sweep, write_sweep_csv, Approximant, BuildOptions, Norm,
    SamplePlan, SweepRow,
};
use crate::domain_ext::{approximate_on_domain, certify_on_domain, ModulusOfContinuity, SampledDomain};
use crate::error::{ForgeError, Result};
use crate::fixtures::{helix_cloud, zoo_with_dim, HelixSpec};
use crate::fnn_core::{deserialize, serialize, ReluNetwork};
use crate::manifold::{
    build_manifold_approximant, select_projector, ConfidencePolicy, ManifoldOptions, PointCloud,
    Selection,
};
use crate::planner::{plan_with_threshold, write_plan_csv, CostQuery, DEFAULT_FEW_CORES};

/// Exit code when a certificate fails its bound.
pub const EXIT_CERTIFICATION: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "relu-forge", version, about = "Build and certify explicit ReLU approximants")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build an approximant of a zoo target and write the network document.
    Build(BuildArgs),
    /// Measure a saved approximant against its target.
    Certify(CertifyArgs),
    /// Build and certify over a grid of (N, L).
    Sweep(SweepArgs),
    /// Approximate a function sampled on a finite domain.
    Extend(ExtendArgs),
    /// Approximate a target near a point cloud through a random projection.
    Manifold(ManifoldArgs),
    /// Choose (N, L) for a target accuracy and core count.
    Plan(PlanArgs),
    /// Print the structure and metadata of a network document.
    Inspect(InspectArgs),
}

#[derive(Debug, Args)]
pub struct Budget {
    #[arg(long = "N")]
    pub n: usize,
    #[arg(long = "L")]
    pub l: usize,
}

#[derive(Debug, Args)]
pub struct TargetArgs {
    /// Zoo fixture name (abs, holder_sqrt, const, linear, sin_sum, cpwl:<seed>, sign_patch:<seed>).
    #[arg(long)]
    pub target: String,
    #[arg(long)]
    pub d: Option<usize>,
}

#[derive(Debug, Args)]
pub struct NormArgs {
    /// `p ≥ 1` or `inf`; `inf` requires `--uniform`.
    #[arg(long, default_value = "2")]
    pub norm: String,
    /// Apply the uniform lift for a sup-norm guarantee on the whole cube.
    #[arg(long)]
    pub uniform: bool,
    /// Override the automatic δ.
    #[arg(long)]
    pub delta: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    /// Sample count (grid points per axis for d = 1, Monte-Carlo points otherwise).
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[command(flatten)]
    pub target: TargetArgs,
    #[command(flatten)]
    pub budget: Budget,
    #[command(flatten)]
    pub norm: NormArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    /// Network document written by `build`.
    #[arg(long)]
    pub network: PathBuf,
    /// Target fixture; defaults to the one recorded in the document.
    #[arg(long)]
    pub target: Option<String>,
    #[command(flatten)]
    pub samples: SampleArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub target: TargetArgs,
    /// Comma-separated widths.
    #[arg(long = "N", value_delimiter = ',', default_value = "1,2,3")]
    pub n: Vec<usize>,
    /// Comma-separated depths.
    #[arg(long = "L", value_delimiter = ',', default_value = "1,2,3")]
    pub l: Vec<usize>,
    #[command(flatten)]
    pub norm: NormArgs,
    #[command(flatten)]
    pub samples: SampleArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExtendArgs {
    /// CSV with rows `x1,…,xd,value`.
    #[arg(long)]
    pub domain: PathBuf,
    /// `holder:λ,α`, `lipschitz:λ` or `zero`.
    #[arg(long)]
    pub modulus: String,
    /// Half-width R of the box holding the domain; inferred when omitted.
    #[arg(long = "R")]
    pub r: Option<f64>,
    #[command(flatten)]
    pub budget: Budget,
    /// Write the network document here.
    #[arg(long)]
    pub network_out: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SelectionArg {
    Neighborhood,
    Base,
}

#[derive(Debug, Args)]
pub struct ManifoldArgs {
    /// CSV with rows `x1,…,xd[,tag]`, or `helix` for the built-in fixture.
    #[arg(long)]
    pub cloud: String,
    #[arg(long, default_value_t = 0.01)]
    pub epsilon: f64,
    #[arg(long, default_value = "sin_sum")]
    pub target: String,
    /// Reduced dimension d_δ.
    #[arg(long = "d-delta")]
    pub d_delta: usize,
    /// Distortion δ of the projection.
    #[arg(long, default_value_t = 0.5)]
    pub distortion: f64,
    #[command(flatten)]
    pub budget: Budget,
    #[arg(long, value_enum, default_value = "neighborhood")]
    pub selection: SelectionArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub network_out: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub p: f64,
    /// Largest core count treated as the few-cores regime.
    #[arg(long, default_value_t = DEFAULT_FEW_CORES)]
    pub few_cores: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InspectArgs {
    #[arg(long)]
    pub network: PathBuf,
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Build(a) => cmd_build(a),
        Command::Certify(a) => cmd_certify(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Extend(a) => cmd_extend(a),
        Command::Manifold(a) => cmd_manifold(a),
        Command::Plan(a) => cmd_plan(a),
        Command::Inspect(a) => cmd_inspect(a),
    }
}

/// Writes through a temporary file in the destination directory, then renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| ForgeError::Io(e.error))?;
    Ok(())
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(p) => write_atomic(p, bytes),
        None => {
            io::stdout().write_all(bytes)?;
            Ok(())
        }
    }
}

fn read_input(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| ForgeError::Parse {
        location: path.display().to_string(),
        message: e.to_string(),
    })
}

fn parse_norm(a: &NormArgs) -> Result<Norm> {
    let norm: Norm = a.norm.parse()?;
    if norm.is_inf() && !a.uniform {
        return Err(ForgeError::Argument("--norm inf needs --uniform".into()));
    }
    Ok(norm)
}

fn build_options(delta: Option<f64>) -> Result<BuildOptions> {
    let mut o = BuildOptions::from_env()?;
    o.delta = delta;
    Ok(o)
}

fn sample_plan(s: &SampleArgs, d: usize) -> SamplePlan {
    match (s.samples, d) {
        (None, _) => SamplePlan::default_for(d, s.seed),
        (Some(n), 1) => SamplePlan::Grid { per_dim: n },
        (Some(n), _) => SamplePlan::MonteCarlo { count: n, seed: s.seed },
    }
}

fn summary(a: &Approximant) -> String {
    format!(
        "N={} L={} d={} K={} delta={} width={} depth={} bound_outside={} bound_global={}",
        a.n,
        a.l,
        a.d,
        a.k,
        a.delta,
        a.network.width(),
        a.network.depth(),
        a.bound_outside_trifling,
        a.bound_global
    )
}

fn cmd_build(a: BuildArgs) -> Result<i32> {
    let f = zoo_with_dim(&a.target.target, a.target.d)?;
    let norm = parse_norm(&a.norm)?;
    let opts = build_options(a.norm.delta)?;
    let approx = build_approximant_with(&f, a.budget.n, a.budget.l, norm, a.norm.uniform, &opts)?;
    emit(a.out.as_deref(), &serialize(&approx.network))?;
    eprintln!("{}", summary(&approx));
    Ok(0)
}

fn report_row(a: &Approximant, report: crate::approximator::ErrorReport) -> SweepRow {
    SweepRow { n: a.n, l: a.l, k: a.k, delta: a.delta, report: Ok(report) }
}

fn cmd_certify(a: CertifyArgs) -> Result<i32> {
    let net = deserialize(&read_input(&a.network)?)?;
    let approx = Approximant::from_annotated(net)?;
    if approx.domain_half_width.is_some() {
        return Err(ForgeError::Argument(
            "this document acts on a sampled domain; certify it with `extend`".into(),
        ));
    }
    let name = match &a.target {
        Some(t) => t.clone(),
        None => approx.network.metadata().get("target").cloned().ok_or_else(|| {
            ForgeError::Argument("the document names no target; pass --target".into())
        })?,
    };
    let f = zoo_with_dim(&name, Some(approx.d))?;
    let report = certify(&approx, &f, sample_plan(&a.samples, approx.d))?;
    let pass = report.pass;
    let mut buf = Vec::new();
    write_sweep_csv(&[report_row(&approx, report)], approx.norm, &mut buf)?;
    emit(a.out.as_deref(), &buf)?;
    Ok(if pass { 0 } else { EXIT_CERTIFICATION })
}

fn cmd_sweep(a: SweepArgs) -> Result<i32> {
    let f = zoo_with_dim(&a.target.target, a.target.d)?;
    let norm = parse_norm(&a.norm)?;
    let opts = build_options(a.norm.delta)?;
    let params: Vec<(usize, usize)> =
        a.n.iter().flat_map(|&n| a.l.iter().map(move |&l| (n, l))).collect();
    let rows = rate_sweep(&f, &params, norm, a.norm.uniform, sample_plan(&a.samples, f.dim()), &opts);
    for r in &rows {
        if let Err(e) = &r.report {
            eprintln!("N={} L={}: {e}", r.n, r.l);
        }
    }
    let mut buf = Vec::new();
    write_sweep_csv(&rows, norm, &mut buf)?;
    emit(a.out.as_deref(), &buf)?;
    Ok(if rows.iter().all(SweepRow::pass) { 0 } else { EXIT_CERTIFICATION })
}

fn cmd_extend(a: ExtendArgs) -> Result<i32> {
    let dom = SampledDomain::from_csv(&read_input(&a.domain)?[..], a.r)?;
    let modulus = ModulusOfContinuity::parse(&a.modulus)?;
    let opts = build_options(None)?;
    let approx = approximate_on_domain(&dom, &modulus, a.budget.n, a.budget.l, &opts)?;
    let rep = certify_on_domain(&approx, &dom)?;
    if let Some(p) = &a.network_out {
        write_atomic(p, &serialize(&approx.network))?;
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["N", "L", "d", "R", "samples", "measured_sup", "bound", "pass"])
        .map_err(crate::approximator::csv_err)?;
    w.write_record([
        a.budget.n.to_string(),
        a.budget.l.to_string(),
        dom.dim().to_string(),
        dom.half_width().to_string(),
        rep.points.to_string(),
        rep.measured_sup.to_string(),
        rep.bound.to_string(),
        rep.pass.to_string(),
    ])
    .map_err(crate::approximator::csv_err)?;
    emit(a.out.as_deref(), &w.into_inner().map_err(|e| ForgeError::Io(e.into_error()))?)?;
    Ok(if rep.pass { 0 } else { EXIT_CERTIFICATION })
}

fn cmd_manifold(a: ManifoldArgs) -> Result<i32> {
    let cloud = if a.cloud == "helix" {
        helix_cloud(&HelixSpec { epsilon: a.epsilon, ..HelixSpec::default() })?
    } else {
        PointCloud::from_csv(&read_input(Path::new(&a.cloud))?[..], a.epsilon)?
    };
    let d = cloud.dim();
    let f = zoo_with_dim(&a.target, Some(d))?;
    let (proj, stats, accepted) =
        select_projector(d, a.d_delta, a.distortion, a.seed, &cloud, &ConfidencePolicy::default())?;
    if !accepted {
        eprintln!(
            "warning: no projector met the distortion policy; using seed {} (fraction {})",
            proj.seed(),
            stats.fraction_within
        );
    }
    let opts = ManifoldOptions {
        selection: match a.selection {
            SelectionArg::Neighborhood => Selection::Neighborhood,
            SelectionArg::Base => Selection::BaseTagged,
        },
        tolerance: None,
        build: build_options(None)?,
    };
    let m = build_manifold_approximant(&f, &cloud, &proj, a.budget.n, a.budget.l, &opts)?;
    if let Some(p) = &a.network_out {
        write_atomic(p, &serialize(&m.approximant.network))?;
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["d", "d_delta", "delta", "epsilon", "N", "L", "seed", "measured_sup", "bound", "pass"])
        .map_err(crate::approximator::csv_err)?;
    w.write_record([
        d.to_string(),
        a.d_delta.to_string(),
        a.distortion.to_string(),
        a.epsilon.to_string(),
        a.budget.n.to_string(),
        a.budget.l.to_string(),
        proj.seed().to_string(),
        m.report.measured_sup.to_string(),
        m.report.bound.to_string(),
        m.report.pass.to_string(),
    ])
    .map_err(crate::approximator::csv_err)?;
    emit(a.out.as_deref(), &w.into_inner().map_err(|e| ForgeError::Io(e.into_error()))?)?;
    Ok(if m.report.pass { 0 } else { EXIT_CERTIFICATION })
}

fn cmd_plan(a: PlanArgs) -> Result<i32> {
    let q = CostQuery::new(a.epsilon, a.alpha, a.d, a.p)?;
    let plan = plan_with_threshold(&q, a.few_cores)?;
    let mut buf = Vec::new();
    write_plan_csv(&q, &plan, &mut buf)?;
    emit(a.out.as_deref(), &buf)?;
    Ok(0)
}

fn describe(net: &ReluNetwork) -> String {
    let mut s = format!(
        "input_dim: {}\noutput_dim: {}\ndepth: {}\nwidth: {}\nhidden_widths: {:?}\nnonzeros: {}\n",
        net.input_dim(),
        net.output_dim(),
        net.depth(),
        net.width(),
        net.hidden_widths(),
        net.nonzeros()
    );
    for (k, v) in net.metadata() {
        s.push_str(&format!("meta.{k}: {v}\n"));
    }
    s
}

fn cmd_inspect(a: InspectArgs) -> Result<i32> {
    let net = deserialize(&read_input(&a.network)?)?;
    io::stdout().write_all(describe(&net).as_bytes())?;
    Ok(0)
}
