//! Path finding as residual minimization over interaction points.
//!
//! A candidate with `n_t` interactions becomes a nonlinear least-squares
//! problem. In Cartesian mode the unknowns are the `3·n_t` coordinates of
//! the interaction points and the residual carries, besides the reflection
//! and Keller-cone laws, membership constraints: one per facet point and two
//! per edge point. In
//! parametric mode the unknowns are the elements' surface parameters
//! (two per facet, one per edge), so membership holds by construction.

pub mod lm;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::scene::{ElementId, Point3, Scene, Vec3};
use crate::validation::RayPath;
use crate::visibility::InteractionList;

pub use lm::{LmOptions, LmResult};

/// Norm clamp for degenerate segments.
pub const EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolveMode {
    Cartesian,
    #[default]
    Parametric,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MptError {
    #[error("unknown vector has length {got}, candidate needs {expected}")]
    LengthMismatch { expected: usize, got: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("restarts must be at least 1")]
    NoRestarts,
    #[error("{name} must be a positive finite number (got {value})")]
    NonPositive { name: &'static str, value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub cost_threshold: f64,
    pub step_tol: f64,
    pub dedupe_tol: f64,
    pub rng_seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            restarts: 5,
            max_iters: 200,
            cost_threshold: 1e-12,
            step_tol: 1e-12,
            dedupe_tol: 1e-6,
            rng_seed: 0,
        }
    }
}

impl SolverConfig {
    /// Defaults, with more restarts when the scene has curved facets.
    pub fn for_scene(scene: &Scene) -> Self {
        Self {
            restarts: if scene.has_quadrics() { 25 } else { 5 },
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.restarts == 0 {
            return Err(ConfigError::NoRestarts);
        }
        for (name, value) in [
            ("cost_threshold", self.cost_threshold),
            ("step_tol", self.step_tol),
            ("dedupe_tol", self.dedupe_tol),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(ConfigError::NonPositive { name, value });
            }
        }
        Ok(())
    }

    fn lm_options(&self) -> LmOptions {
        LmOptions {
            max_iters: self.max_iters,
            cost_threshold: self.cost_threshold,
            step_tol: self.step_tol,
            ..LmOptions::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnknownVector {
    pub mode: SolveMode,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResidualVector {
    pub interaction: Vec<f64>,
    pub constraint: Vec<f64>,
}

impl ResidualVector {
    pub fn cost(&self) -> f64 {
        cost(self)
    }
}

pub fn cost(r: &ResidualVector) -> f64 {
    r.interaction.iter().chain(&r.constraint).map(|v| v * v).sum()
}

/// Reflection-law residual at `x`, scaled by the incident length.
pub fn reflection_residual(prev: &Point3, x: &Point3, next: &Point3, n: &Vec3) -> Vec3 {
    let i = x - prev;
    let r = next - x;
    let li = i.norm().max(EPS);
    let lr = r.norm().max(EPS);
    let gamma = li / lr;
    let mirrored = i - n * (2.0 * i.dot(n));
    (r * gamma - mirrored) / (i.norm() + EPS)
}

/// Keller-cone residual: difference of the incident and diffracted cosines
/// with the edge direction.
pub fn diffraction_residual(prev: &Point3, x: &Point3, next: &Point3, e: &Vec3) -> f64 {
    let i = x - prev;
    let d = next - x;
    i.dot(e) / i.norm().max(EPS) - d.dot(e) / d.norm().max(EPS)
}

fn facet_normal(scene: &Scene, facet: usize, p: &Point3) -> Vec3 {
    let f = scene.facet(facet);
    f.normal_at(p).unwrap_or_else(|_| f.plane_normal())
}

fn edge_direction(scene: &Scene, edge: usize, p: &Point3) -> Vec3 {
    let e = scene.edge(edge);
    e.direction_at(p).unwrap_or_else(|_| {
        let (a, b) = e.endpoints();
        (b - a).normalize()
    })
}

/// Membership constraints of `p` on an element, scaled by its
/// characteristic length. Edges use two transverse offsets rather than the
/// distance, which has a kink on the curve.
fn push_membership(scene: &Scene, id: ElementId, p: &Point3, out: &mut Vec<f64>) {
    let scale = scene.char_len(id);
    match id {
        ElementId::Facet(i) => out.push(scene.facet(i).implicit_distance(p) / scale),
        ElementId::Edge(i) => out.extend(scene.edge(i).transverse_offsets(p).map(|v| v / scale)),
    }
}

/// Interaction-law residuals for a full point list `[bs, X₁.., ue]`.
pub fn interaction_residual(scene: &Scene, candidate: &InteractionList, points: &[Point3], out: &mut Vec<f64>) {
    for (k, &id) in candidate.elements().iter().enumerate() {
        let (prev, x, next) = (&points[k], &points[k + 1], &points[k + 2]);
        match id {
            ElementId::Facet(f) => {
                let r = reflection_residual(prev, x, next, &facet_normal(scene, f, x));
                out.extend_from_slice(r.as_slice());
            }
            ElementId::Edge(e) => out.push(diffraction_residual(prev, x, next, &edge_direction(scene, e, x))),
        }
    }
}

/// Cartesian residual cost of a full point list.
pub fn path_cost(scene: &Scene, candidate: &InteractionList, points: &[Point3]) -> f64 {
    let mut r = Vec::new();
    interaction_residual(scene, candidate, points, &mut r);
    for (k, &id) in candidate.elements().iter().enumerate() {
        push_membership(scene, id, &points[k + 1], &mut r);
    }
    r.iter().map(|v| v * v).sum()
}

/// A candidate bound to its scene and endpoints.
#[derive(Debug, Clone, Copy)]
pub struct Problem<'a> {
    pub scene: &'a Scene,
    pub candidate: &'a InteractionList,
    pub bs: Point3,
    pub ue: Point3,
    pub mode: SolveMode,
}

impl<'a> Problem<'a> {
    pub fn new(scene: &'a Scene, candidate: &'a InteractionList, bs: Point3, ue: Point3, mode: SolveMode) -> Self {
        Self {
            scene,
            candidate,
            bs,
            ue,
            mode,
        }
    }

    pub fn dim(&self) -> usize {
        match self.mode {
            SolveMode::Cartesian => 3 * self.candidate.len(),
            SolveMode::Parametric => self.candidate.elements().iter().map(|&id| Scene::param_dim(id)).sum(),
        }
    }

    /// Full point list `[bs, X₁.., ue]` for an unknown vector.
    pub fn points(&self, u: &[f64]) -> Vec<Point3> {
        let mut pts = Vec::with_capacity(self.candidate.len() + 2);
        pts.push(self.bs);
        match self.mode {
            SolveMode::Cartesian => pts.extend(u.chunks_exact(3).map(|c| Point3::new(c[0], c[1], c[2]))),
            SolveMode::Parametric => {
                let mut off = 0;
                for &id in self.candidate.elements() {
                    let k = Scene::param_dim(id);
                    pts.push(self.scene.param_to_point(id, &u[off..off + k]));
                    off += k;
                }
            }
        }
        pts.push(self.ue);
        pts
    }

    pub fn residual(&self, u: &[f64]) -> ResidualVector {
        let pts = self.points(u);
        let mut interaction = Vec::with_capacity(3 * self.candidate.len());
        interaction_residual(self.scene, self.candidate, &pts, &mut interaction);
        let mut constraint = Vec::new();
        if self.mode == SolveMode::Cartesian {
            for (k, &id) in self.candidate.elements().iter().enumerate() {
                push_membership(self.scene, id, &pts[k + 1], &mut constraint);
            }
        }
        ResidualVector { interaction, constraint }
    }

    pub fn cost(&self, u: &[f64]) -> f64 {
        cost(&self.residual(u))
    }

    /// Cost gradient `2·Jᵀr` with the solver's forward-difference Jacobian.
    pub fn cost_gradient(&self, u: &[f64]) -> Vec<f64> {
        lm::cost_gradient(self, u)
    }

    /// Random starting point: uniform over `[0,1]^dim` in parametric mode,
    /// uniform over the scene bounds (grown to include BS and UE) otherwise.
    pub fn random_start(&self, rng: &mut impl Rng) -> Vec<f64> {
        match self.mode {
            SolveMode::Parametric => (0..self.dim()).map(|_| rng.random::<f64>()).collect(),
            SolveMode::Cartesian => {
                let mut pts = vec![self.bs, self.ue];
                if let Some(b) = self.scene.aabb() {
                    pts.push(b.min);
                    pts.push(b.max);
                }
                let (lo, hi) = bounds(&pts);
                (0..self.candidate.len())
                    .flat_map(|_| [0, 1, 2])
                    .map(|k| lo[k] + (hi[k] - lo[k]) * rng.random::<f64>())
                    .collect()
            }
        }
    }
}

fn bounds(pts: &[Point3]) -> (Point3, Point3) {
    let mut lo = pts[0];
    let mut hi = pts[0];
    for p in pts {
        for k in 0..3 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    (lo, hi)
}

impl lm::Residual for Problem<'_> {
    fn eval(&self, x: &[f64], out: &mut Vec<f64>) {
        out.clear();
        let pts = self.points(x);
        interaction_residual(self.scene, self.candidate, &pts, out);
        if self.mode == SolveMode::Cartesian {
            for (k, &id) in self.candidate.elements().iter().enumerate() {
                push_membership(self.scene, id, &pts[k + 1], out);
            }
        }
    }
}

pub fn assemble_residual(
    candidate: &InteractionList,
    u: &UnknownVector,
    scene: &Scene,
    bs: &Point3,
    ue: &Point3,
) -> Result<ResidualVector, MptError> {
    let problem = Problem::new(scene, candidate, *bs, *ue, u.mode);
    let expected = problem.dim();
    if u.values.len() != expected {
        return Err(MptError::LengthMismatch {
            expected,
            got: u.values.len(),
        });
    }
    Ok(problem.residual(&u.values))
}

/// Seed for a candidate's private RNG, so results do not depend on the
/// order in which candidates are solved.
pub fn candidate_seed(seed: u64, candidate: &InteractionList) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    let mut h = mix(seed);
    for &id in candidate.elements() {
        let tag = match id {
            ElementId::Facet(i) => (i as u64) << 1,
            ElementId::Edge(i) => ((i as u64) << 1) | 1,
        };
        h = mix(h ^ tag);
    }
    mix(h ^ candidate.len() as u64)
}

/// Multistart solve of one candidate. Returns the distinct solutions whose
/// cost falls below the threshold, in the order they were found.
pub fn solve_candidate(
    candidate: &InteractionList,
    scene: &Scene,
    bs: &Point3,
    ue: &Point3,
    cfg: &SolverConfig,
    mode: SolveMode,
) -> Vec<(RayPath, f64)> {
    debug_assert!(cfg.validate().is_ok());
    if candidate.is_empty() {
        return vec![(RayPath::los(*bs, *ue), 0.0)];
    }
    let problem = Problem::new(scene, candidate, *bs, *ue, mode);
    let mut rng = ChaCha8Rng::seed_from_u64(candidate_seed(cfg.rng_seed, candidate));
    let opts = cfg.lm_options();
    let mut found: Vec<(RayPath, f64)> = Vec::new();
    for _ in 0..cfg.restarts {
        let x0 = problem.random_start(&mut rng);
        let res = lm::minimize(&problem, &x0, &opts);
        if !(res.cost < cfg.cost_threshold) {
            continue;
        }
        let points = problem.points(&res.x);
        let duplicate = found.iter().any(|(p, _)| {
            p.points
                .iter()
                .zip(&points)
                .all(|(a, b)| (a - b).norm() <= cfg.dedupe_tol)
        });
        if !duplicate {
            found.push((RayPath::new(points, candidate.clone(), res.cost), res.cost));
        }
    }
    found
}
