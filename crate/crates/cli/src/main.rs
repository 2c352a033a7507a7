//! `minpath`: trace paths between a BS and one or more UEs in a scene file.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, ValueEnum};
use serde::Deserialize;

use minpath::em::{RadioConfig, Transition};
use minpath::mpt::SolverConfig;
use minpath::output::emit_outputs;
use minpath::pipeline::{run_pipeline, PipelineError, RunConfig, SolverKind};
use minpath::scene::{load_scene, Point3, SceneError, Vec3};
use minpath::visibility::VisibilityMode;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SolverArg {
    MptParametric,
    MptCartesian,
    ImageMethod,
    Hybrid,
}

impl From<SolverArg> for SolverKind {
    fn from(s: SolverArg) -> Self {
        match s {
            SolverArg::MptParametric => SolverKind::MptParametric,
            SolverArg::MptCartesian => SolverKind::MptCartesian,
            SolverArg::ImageMethod => SolverKind::ImageMethod,
            SolverArg::Hybrid => SolverKind::Hybrid,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum VisibilityArg {
    Sampled,
    Full,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TransitionArg {
    Uniform,
    Unity,
}

#[derive(Debug, Parser)]
#[command(name = "minpath", version, about = "Deterministic radio ray tracing between a BS and UEs")]
struct Cli {
    /// Scene file (JSON).
    #[arg(long)]
    scene: PathBuf,
    /// Base station position `x,y,z`.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    bs: Point3,
    /// Receiver position `x,y,z`; repeat for several receivers.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true, required = true)]
    ue: Vec<Point3>,
    #[arg(long, default_value_t = 2)]
    max_interactions: usize,
    #[arg(long)]
    max_diffractions: Option<usize>,
    #[arg(long, value_enum, default_value = "hybrid")]
    solver: SolverArg,
    /// Multistart count; defaults to 5, or 25 for scenes with curved facets.
    #[arg(long)]
    restarts: Option<usize>,
    /// Cost below which a minimization counts as a solution.
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    freq_hz: Option<f64>,
    /// Transmit field times distance at 1 m, V.
    #[arg(long)]
    e0: Option<f64>,
    /// Polar axis of the transmit antenna `x,y,z`.
    #[arg(long, value_parser = parse_vec, allow_hyphen_values = true)]
    polarization: Option<Vec3>,
    #[arg(long, value_enum)]
    transition: Option<TransitionArg>,
    #[arg(long, value_enum, default_value = "sampled")]
    visibility: VisibilityArg,
    /// Enumerate walks that may revisit an element (never back-to-back).
    #[arg(long)]
    allow_revisits: bool,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// Also write the BS/UE-augmented adjacency matrix.
    #[arg(long)]
    dump_adjacency: bool,
    /// TOML file with `[solver]` and `[radio]` tables; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default)]
    solver: SolverSection,
    #[serde(default)]
    radio: RadioSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolverSection {
    restarts: Option<usize>,
    max_iters: Option<usize>,
    threshold: Option<f64>,
    step_tol: Option<f64>,
    dedupe_tol: Option<f64>,
    seed: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RadioSection {
    freq_hz: Option<f64>,
    e0: Option<f64>,
    polarization: Option<[f64; 3]>,
    transition: Option<String>,
}

fn parse_triple(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected x,y,z, got `{s}`"));
    }
    let mut out = [0.0; 3];
    for (o, p) in out.iter_mut().zip(&parts) {
        *o = p.parse::<f64>().map_err(|e| format!("`{p}`: {e}"))?;
        if !o.is_finite() {
            return Err(format!("`{p}` is not finite"));
        }
    }
    Ok(out)
}

fn parse_point(s: &str) -> Result<Point3, String> {
    parse_triple(s).map(Point3::from)
}

fn parse_vec(s: &str) -> Result<Vec3, String> {
    parse_triple(s).map(Vec3::from)
}

/// Failure classes with distinct exit codes.
enum Failure {
    Config(anyhow::Error),
    Scene(SceneError),
    Other(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Scene(_) => 3,
            Failure::Other(_) => 1,
        }
    }
}

fn read_config(path: &Path) -> Result<ConfigFile> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn run_config(cli: &Cli, file: &ConfigFile, default_solver: SolverConfig) -> Result<RunConfig> {
    let s = &file.solver;
    let solver_cfg = SolverConfig {
        restarts: cli.restarts.or(s.restarts).unwrap_or(default_solver.restarts),
        max_iters: s.max_iters.unwrap_or(default_solver.max_iters),
        cost_threshold: cli.threshold.or(s.threshold).unwrap_or(default_solver.cost_threshold),
        step_tol: s.step_tol.unwrap_or(default_solver.step_tol),
        dedupe_tol: s.dedupe_tol.unwrap_or(default_solver.dedupe_tol),
        rng_seed: cli.seed.or(s.seed).unwrap_or(default_solver.rng_seed),
    };
    let r = &file.radio;
    let defaults = RadioConfig::default();
    let transition = match (cli.transition, r.transition.as_deref()) {
        (Some(TransitionArg::Uniform), _) | (None, Some("uniform")) => Transition::Uniform,
        (Some(TransitionArg::Unity), _) | (None, Some("unity")) => Transition::Unity,
        (None, None) => defaults.transition,
        (None, Some(other)) => bail!("unknown transition `{other}` (expected uniform or unity)"),
    };
    let radio = RadioConfig {
        frequency: cli.freq_hz.or(r.freq_hz).unwrap_or(defaults.frequency),
        e0: cli.e0.or(r.e0).unwrap_or(defaults.e0),
        polarization: cli.polarization.or(r.polarization.map(Vec3::from)).unwrap_or(defaults.polarization),
        transition,
    };
    let mut cfg = RunConfig::new(cli.bs, cli.ue.clone(), cli.max_interactions);
    cfg.max_diffractions = cli.max_diffractions;
    cfg.solver = cli.solver.into();
    cfg.solver_cfg = solver_cfg;
    cfg.radio = radio;
    cfg.visibility = match cli.visibility {
        VisibilityArg::Sampled => VisibilityMode::Sampled,
        VisibilityArg::Full => VisibilityMode::Full,
    };
    cfg.allow_revisits = cli.allow_revisits;
    cfg.workers = cli.workers;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let file = match &cli.config {
        Some(p) => read_config(p).map_err(Failure::Config)?,
        None => ConfigFile::default(),
    };
    let scene = load_scene(&cli.scene).map_err(Failure::Scene)?;
    let cfg = run_config(&cli, &file, SolverConfig::for_scene(&scene)).map_err(Failure::Config)?;
    let report = run_pipeline(&scene, &cfg).map_err(|e| match e {
        PipelineError::Pool(_) => Failure::Other(e.into()),
        _ => Failure::Config(e.into()),
    })?;
    emit_outputs(&report, &cli.out_dir, cli.dump_adjacency)
        .with_context(|| format!("writing outputs to {}", cli.out_dir.display()))
        .map_err(Failure::Other)?;

    for (name, d) in &report.timings {
        eprintln!("{name:>16}: {:.3} ms", d.as_secs_f64() * 1e3);
    }
    for (i, ue) in report.per_ue.iter().enumerate() {
        let c = &ue.counters;
        eprintln!(
            "ue {i}: {} candidates, {} solved, {} valid, {} paths ({} valid)",
            c.enumerated, c.solved, c.valid, c.paths, c.valid_paths
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let code = f.code();
            match f {
                Failure::Config(e) => eprintln!("config error: {e:#}"),
                Failure::Scene(e) => eprintln!("scene error: {e}"),
                Failure::Other(e) => eprintln!("error: {e:#}"),
            }
            ExitCode::from(code)
        }
    }
}
