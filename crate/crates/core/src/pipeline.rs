//! End-to-end tracing: visibility, candidates, solving, validation, fields.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use thiserror::Error;

use crate::em::{self, CVec3, ClassRow, EmError, FieldContribution, RadioConfig};
use crate::image_method;
use crate::mpt::{self, ConfigError, SolveMode, SolverConfig};
use crate::scene::{ElementId, Point3, Scene};
use crate::validation::{validate_path, PathStatus, RayPath};
use crate::visibility::{self, BinaryMatrix, InteractionList, VisibilityGraph, VisibilityMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolverKind {
    MptParametric,
    MptCartesian,
    ImageMethod,
    #[default]
    Hybrid,
}

impl SolverKind {
    pub fn name(self) -> &'static str {
        match self {
            SolverKind::MptParametric => "mpt-parametric",
            SolverKind::MptCartesian => "mpt-cartesian",
            SolverKind::ImageMethod => "image-method",
            SolverKind::Hybrid => "hybrid",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub bs: Point3,
    pub ues: Vec<Point3>,
    pub max_interactions: usize,
    /// Candidates with more diffractions are dropped; `None` keeps all.
    pub max_diffractions: Option<usize>,
    pub solver: SolverKind,
    pub solver_cfg: SolverConfig,
    pub radio: RadioConfig,
    pub visibility: VisibilityMode,
    pub allow_revisits: bool,
    /// Worker threads; 0 lets the pool decide.
    pub workers: usize,
}

impl RunConfig {
    pub fn new(bs: Point3, ues: Vec<Point3>, max_interactions: usize) -> Self {
        Self {
            bs,
            ues,
            max_interactions,
            max_diffractions: None,
            solver: SolverKind::Hybrid,
            solver_cfg: SolverConfig::default(),
            radio: RadioConfig::default(),
            visibility: VisibilityMode::Sampled,
            allow_revisits: false,
            workers: 0,
        }
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        self.solver_cfg.validate()?;
        self.radio.validate()?;
        if self.ues.is_empty() {
            return Err(PipelineError::Config("at least one UE is required".into()));
        }
        if let Some(d) = self.max_diffractions {
            if d > self.max_interactions {
                return Err(PipelineError::Config(format!(
                    "max diffractions ({d}) exceeds max interactions ({})",
                    self.max_interactions
                )));
            }
        }
        let finite = |p: &Point3| p.iter().all(|c| c.is_finite());
        if !finite(&self.bs) || !self.ues.iter().all(finite) {
            return Err(PipelineError::Config("BS and UE coordinates must be finite".into()));
        }
        if self.ues.iter().any(|u| (u - self.bs).norm() == 0.0) {
            return Err(PipelineError::Config("UE coincides with BS".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Solver(#[from] ConfigError),
    #[error(transparent)]
    Radio(#[from] EmError),
    #[error("{0}")]
    Config(String),
    #[error("failed to build worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

/// Per-UE bookkeeping, at candidate granularity unless stated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Counters {
    pub enumerated: usize,
    /// Dropped for exceeding the diffraction limit.
    pub filtered: usize,
    /// Candidates handed to a solver.
    pub attempted: usize,
    /// Candidates with at least one solution below the threshold.
    pub solved: usize,
    /// Candidates the chosen solver cannot handle or that are degenerate
    /// for it (a ray parallel to a mirror).
    pub unsolvable: usize,
    /// Candidates with at least one valid path.
    pub valid: usize,
    /// Path-level counts.
    pub paths: usize,
    pub valid_paths: usize,
    pub rejected_containment: usize,
    pub rejected_obstruction: usize,
    pub rejected_degenerate: usize,
    /// Valid paths whose field could not be evaluated.
    pub field_errors: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UeReport {
    pub ue: Point3,
    pub graph: VisibilityGraph,
    /// Every solved path, valid or not, in candidate order.
    pub paths: Vec<RayPath>,
    /// Field of each valid path, in the same order.
    pub contributions: Vec<FieldContribution>,
    pub field_failures: Vec<(InteractionList, EmError)>,
    pub total: CVec3,
    pub los_reference: f64,
    pub classes: Vec<ClassRow>,
    pub counters: Counters,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub per_ue: Vec<UeReport>,
    pub timings: Vec<(&'static str, Duration)>,
}

enum Outcome {
    Paths(Vec<RayPath>),
    Unsolvable,
}

/// Solves one candidate with the configured solver.
fn solve(scene: &Scene, cfg: &RunConfig, ue: &Point3, candidate: &InteractionList) -> Outcome {
    let mpt_mode = match cfg.solver {
        SolverKind::MptCartesian => Some(SolveMode::Cartesian),
        SolverKind::MptParametric => Some(SolveMode::Parametric),
        SolverKind::ImageMethod => None,
        SolverKind::Hybrid => {
            let im_ok = candidate.elements().iter().all(|id| match id {
                ElementId::Facet(f) => scene.facet(*f).is_planar(),
                ElementId::Edge(_) => false,
            });
            (!im_ok).then_some(SolveMode::Parametric)
        }
    };
    match mpt_mode {
        Some(mode) => Outcome::Paths(
            mpt::solve_candidate(candidate, scene, &cfg.bs, ue, &cfg.solver_cfg, mode)
                .into_iter()
                .map(|(p, _)| p)
                .collect(),
        ),
        None => match image_method::trace_image_path(scene, &cfg.bs, ue, candidate) {
            Ok(p) if p.cost < cfg.solver_cfg.cost_threshold => Outcome::Paths(vec![p]),
            Ok(_) => Outcome::Paths(vec![]),
            Err(_) => Outcome::Unsolvable,
        },
    }
}

pub fn run_pipeline(scene: &Scene, cfg: &RunConfig) -> Result<RunReport, PipelineError> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build()?;
    pool.install(|| run_in_pool(scene, cfg))
}

fn run_in_pool(scene: &Scene, cfg: &RunConfig) -> Result<RunReport, PipelineError> {
    let mut timings = Vec::new();
    let t = Instant::now();
    let vis = visibility::build_visibility(scene, cfg.visibility);
    timings.push(("visibility", t.elapsed()));

    let mut per_ue = Vec::with_capacity(cfg.ues.len());
    let (mut t_enum, mut t_solve, mut t_field) = (Duration::ZERO, Duration::ZERO, Duration::ZERO);
    for ue in &cfg.ues {
        let (report, te, ts, tf) = trace_ue(scene, cfg, &vis, ue);
        t_enum += te;
        t_solve += ts;
        t_field += tf;
        per_ue.push(report);
    }
    timings.push(("candidates", t_enum));
    timings.push(("solve+validate", t_solve));
    timings.push(("fields", t_field));
    Ok(RunReport { per_ue, timings })
}

fn trace_ue(
    scene: &Scene,
    cfg: &RunConfig,
    vis: &BinaryMatrix,
    ue: &Point3,
) -> (UeReport, Duration, Duration, Duration) {
    let t = Instant::now();
    let graph = visibility::build_adjacency(vis, scene, &cfg.bs, ue, cfg.visibility);
    let all = if cfg.allow_revisits {
        visibility::enumerate_walks(&graph, cfg.max_interactions)
    } else {
        visibility::enumerate_candidates(&graph, cfg.max_interactions)
    };
    let mut counters = Counters {
        enumerated: all.len(),
        ..Counters::default()
    };
    let candidates: Vec<InteractionList> = all
        .into_iter()
        .filter(|c| cfg.max_diffractions.is_none_or(|m| c.n_d() <= m))
        .collect();
    counters.filtered = counters.enumerated - candidates.len();
    counters.attempted = candidates.len();
    let t_enum = t.elapsed();

    let t = Instant::now();
    let outcomes: Vec<Outcome> = candidates
        .par_iter()
        .map(|c| match solve(scene, cfg, ue, c) {
            Outcome::Paths(ps) => Outcome::Paths(ps.into_iter().map(|p| validate_path(scene, p)).collect()),
            u => u,
        })
        .collect();
    let mut paths = Vec::new();
    for o in outcomes {
        match o {
            Outcome::Unsolvable => counters.unsolvable += 1,
            Outcome::Paths(ps) => {
                if !ps.is_empty() {
                    counters.solved += 1;
                }
                if ps.iter().any(RayPath::is_valid) {
                    counters.valid += 1;
                }
                for p in &ps {
                    match p.status {
                        PathStatus::Valid => counters.valid_paths += 1,
                        PathStatus::RejectedContainment => counters.rejected_containment += 1,
                        PathStatus::RejectedObstruction => counters.rejected_obstruction += 1,
                        PathStatus::RejectedDegenerate => counters.rejected_degenerate += 1,
                        PathStatus::Unvalidated => {}
                    }
                }
                counters.paths += ps.len();
                paths.extend(ps);
            }
        }
    }
    let t_solve = t.elapsed();

    let t = Instant::now();
    let fields: Vec<Result<FieldContribution, EmError>> = paths
        .par_iter()
        .filter(|p| p.is_valid())
        .map(|p| em::propagate_path(scene, p, &cfg.radio))
        .collect();
    let valid: Vec<&RayPath> = paths.iter().filter(|p| p.is_valid()).collect();
    let mut contributions = Vec::with_capacity(fields.len());
    let mut field_failures = Vec::new();
    for (f, p) in fields.into_iter().zip(valid) {
        match f {
            Ok(c) => contributions.push(c),
            Err(e) => field_failures.push((p.candidate.clone(), e)),
        }
    }
    counters.field_errors = field_failures.len();
    let los_reference = em::los_reference(&cfg.radio, &cfg.bs, ue);
    let (total, classes) = em::total_field(&contributions, cfg.max_interactions, los_reference);
    let t_field = t.elapsed();

    (
        UeReport {
            ue: *ue,
            graph,
            paths,
            contributions,
            field_failures,
            total,
            los_reference,
            classes,
            counters,
        },
        t_enum,
        t_solve,
        t_field,
    )
}
