//! A-posteriori path checks: degeneracy, containment and obstruction.

use crate::scene::{ElementId, Facet, Point3, Scene, Surface, Vec3, SOLUTION_TOL};
use crate::visibility::InteractionList;

/// End shrink applied to every tested segment.
pub const END_SHRINK: f64 = 1e-6;
/// Distance below which consecutive path points count as coincident.
pub const DEGENERATE_TOL: f64 = 1e-9;
/// Intersections this close to a polygon side count as hits.
pub const GRAZING_TOL: f64 = 1e-9;
/// Angular slack for the wedge-exterior test on diffracted directions.
const WEDGE_ANGLE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PathStatus {
    Unvalidated,
    Valid,
    RejectedContainment,
    RejectedObstruction,
    RejectedDegenerate,
}

impl PathStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            PathStatus::Unvalidated => "unvalidated",
            PathStatus::Valid => "valid",
            PathStatus::RejectedContainment => "rejected_containment",
            PathStatus::RejectedObstruction => "rejected_obstruction",
            PathStatus::RejectedDegenerate => "rejected_degenerate",
        }
    }
}

/// A candidate path: `points[0]` is the BS, the last point the UE.
#[derive(Debug, Clone, PartialEq)]
pub struct RayPath {
    pub points: Vec<Point3>,
    pub candidate: InteractionList,
    pub cost: f64,
    pub status: PathStatus,
}

impl RayPath {
    pub fn new(points: Vec<Point3>, candidate: InteractionList, cost: f64) -> Self {
        debug_assert_eq!(points.len(), candidate.len() + 2);
        Self {
            points,
            candidate,
            cost,
            status: PathStatus::Unvalidated,
        }
    }

    pub fn los(bs: Point3, ue: Point3) -> Self {
        Self::new(vec![bs, ue], InteractionList::default(), 0.0)
    }

    /// Interaction points `X₁..X_{n_t}`.
    pub fn interaction_points(&self) -> &[Point3] {
        &self.points[1..self.points.len() - 1]
    }

    pub fn length(&self) -> f64 {
        self.points.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
    }

    pub fn is_valid(&self) -> bool {
        self.status == PathStatus::Valid
    }
}

/// True when the segment `a→b`, shrunk by [`END_SHRINK`] at both ends,
/// meets any facet not excluded. Excluding an edge excludes its parents.
pub fn segment_obstructed(scene: &Scene, a: &Point3, b: &Point3, exclude: &[ElementId]) -> bool {
    let d = b - a;
    let len = d.norm();
    if len <= 2.0 * END_SHRINK {
        return false;
    }
    let u = d / len;
    let p0 = a + u * END_SHRINK;
    let p1 = b - u * END_SHRINK;
    let excluded = |id: usize| {
        exclude.iter().any(|e| match *e {
            ElementId::Facet(f) => f == id,
            ElementId::Edge(e) => {
                let (x, y) = scene.edge(e).parents;
                x == id || y == id
            }
        })
    };
    scene
        .facets()
        .iter()
        .filter(|f| !excluded(f.id))
        .any(|f| facet_hit(f, &p0, &p1))
}

fn facet_hit(f: &Facet, p0: &Point3, p1: &Point3) -> bool {
    match &f.surface {
        Surface::Plane => plane_hit(f, p0, p1),
        Surface::Quadric(q) => {
            let d = p1 - p0;
            let (qa, qb, qc) = q.along_line(p0, &d);
            roots_in_unit(qa, qb, qc)
                .into_iter()
                .any(|t| f.footprint_contains(&(p0 + d * t), GRAZING_TOL))
        }
    }
}

fn plane_hit(f: &Facet, p0: &Point3, p1: &Point3) -> bool {
    let n = f.plane_normal();
    let o = f.plane_point();
    let d0 = n.dot(&(p0 - o));
    let d1 = n.dot(&(p1 - o));
    if d0.abs() <= GRAZING_TOL && d1.abs() <= GRAZING_TOL {
        return coplanar_overlap(f, p0, p1);
    }
    if (d0 > 0.0 && d1 > 0.0) || (d0 < 0.0 && d1 < 0.0) {
        return false;
    }
    let t = d0 / (d0 - d1);
    let q = p0 + (p1 - p0) * t;
    f.footprint_contains(&q, GRAZING_TOL)
}

/// Cyrus–Beck clip of a segment lying in the facet plane.
fn coplanar_overlap(f: &Facet, p0: &Point3, p1: &Point3) -> bool {
    let d = p1 - p0;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for (v, m) in f.vertices.iter().zip(f.inward_normals()) {
        // Inside when m·(p0 + t d − v) ≥ −tol.
        let num = m.dot(&(p0 - v)) + GRAZING_TOL;
        let den = m.dot(&d);
        if den.abs() < 1e-300 {
            if num < 0.0 {
                return false;
            }
            continue;
        }
        let t = -num / den;
        if den > 0.0 {
            lo = lo.max(t);
        } else {
            hi = hi.min(t);
        }
        if lo > hi {
            return false;
        }
    }
    true
}

/// Real roots of `a t² + b t + c` in `[0, 1]`; a double root counts.
fn roots_in_unit(a: f64, b: f64, c: f64) -> Vec<f64> {
    let scale = a.abs().max(b.abs()).max(c.abs());
    if scale == 0.0 {
        return vec![0.0];
    }
    let mut roots = Vec::with_capacity(2);
    if a.abs() <= 1e-14 * scale {
        if b.abs() > 1e-14 * scale {
            roots.push(-c / b);
        }
    } else {
        let disc = b * b - 4.0 * a * c;
        if disc >= -1e-14 * scale * scale {
            let sq = disc.max(0.0).sqrt();
            let qq = -0.5 * (b + if b >= 0.0 { sq } else { -sq });
            roots.push(qq / a);
            if qq != 0.0 {
                roots.push(c / qq);
            }
        }
    }
    roots.retain(|t| (0.0..=1.0).contains(t));
    roots
}

/// Runs the checks in order (degenerate, containment, obstruction) and
/// returns the path with its status set.
pub fn validate_path(scene: &Scene, mut path: RayPath) -> RayPath {
    path.status = status_of(scene, &path);
    path
}

fn status_of(scene: &Scene, path: &RayPath) -> PathStatus {
    let pts = &path.points;
    if pts.windows(2).any(|w| (w[1] - w[0]).norm() <= DEGENERATE_TOL) {
        return PathStatus::RejectedDegenerate;
    }

    let ids = path.candidate.elements();
    for (k, id) in ids.iter().enumerate() {
        let x = &pts[k + 1];
        if !scene.contains(*id, x, SOLUTION_TOL) {
            return PathStatus::RejectedContainment;
        }
        if let ElementId::Edge(e) = id {
            // Diffraction at an edge endpoint is not a valid wedge interaction.
            let (s, t) = scene.edge(*e).endpoints();
            if (x - s).norm() <= SOLUTION_TOL || (x - t).norm() <= SOLUTION_TOL {
                return PathStatus::RejectedContainment;
            }
        }
    }

    for k in 0..pts.len() - 1 {
        let mut exclude = Vec::with_capacity(2);
        if k >= 1 {
            exclude.push(ids[k - 1]);
        }
        if k < ids.len() {
            exclude.push(ids[k]);
        }
        if segment_obstructed(scene, &pts[k], &pts[k + 1], &exclude) {
            return PathStatus::RejectedObstruction;
        }
    }

    // Parent facets are excluded above, so a ray cutting through the wedge
    // itself has to be caught here.
    for (k, id) in ids.iter().enumerate() {
        if let ElementId::Edge(e) = id {
            if let Some(w) = scene.edge(*e).wedge {
                let x = pts[k + 1];
                let back: Vec3 = pts[k] - x;
                let fwd: Vec3 = pts[k + 2] - x;
                if w.exterior_angle_of(&back, WEDGE_ANGLE_TOL).is_none()
                    || w.exterior_angle_of(&fwd, WEDGE_ANGLE_TOL).is_none()
                {
                    return PathStatus::RejectedObstruction;
                }
            }
        }
    }
    PathStatus::Valid
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::Facet;

    fn unit_square_z0() -> Facet {
        Facet::planar(
            0,
            vec![
                Point3::new(0.0, 0.0, 0.0),
                Point3::new(1.0, 0.0, 0.0),
                Point3::new(1.0, 1.0, 0.0),
                Point3::new(0.0, 1.0, 0.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn empty_scene_never_obstructs() {
        let s = Scene::empty();
        assert!(!segment_obstructed(&s, &Point3::origin(), &Point3::new(1.0, 2.0, 3.0), &[]));
    }

    #[test]
    fn piercing_and_exclusion() {
        let s = Scene::new(vec![unit_square_z0()], vec![]).unwrap();
        let a = Point3::new(0.5, 0.5, -1.0);
        let b = Point3::new(0.5, 0.5, 1.0);
        assert!(segment_obstructed(&s, &a, &b, &[]));
        assert!(!segment_obstructed(&s, &a, &b, &[ElementId::Facet(0)]));
        // Ending on the facet: the end shrink keeps it clear.
        assert!(!segment_obstructed(&s, &Point3::new(0.5, 0.5, 0.0), &b, &[]));
        // Passing beside it.
        assert!(!segment_obstructed(&s, &Point3::new(1.5, 0.5, -1.0), &Point3::new(1.5, 0.5, 1.0), &[]));
        // Grazing the boundary counts as a hit.
        assert!(segment_obstructed(&s, &Point3::new(1.0, 0.5, -1.0), &Point3::new(1.0, 0.5, 1.0), &[]));
        // Lying in the plane across the polygon.
        assert!(segment_obstructed(&s, &Point3::new(-1.0, 0.5, 0.0), &Point3::new(2.0, 0.5, 0.0), &[]));
        assert!(!segment_obstructed(&s, &Point3::new(-1.0, 2.5, 0.0), &Point3::new(2.0, 2.5, 0.0), &[]));
    }

    #[test]
    fn reflection_statuses() {
        let s = Scene::new(vec![unit_square_z0()], vec![]).unwrap();
        let cand = InteractionList::new(vec![ElementId::Facet(0)]);
        let ok = RayPath::new(
            vec![Point3::new(0.0, 0.5, 1.0), Point3::new(0.5, 0.5, 0.0), Point3::new(1.0, 0.5, 1.0)],
            cand.clone(),
            0.0,
        );
        assert_eq!(validate_path(&s, ok).status, PathStatus::Valid);
        let off = RayPath::new(
            vec![Point3::new(2.0, 0.5, 1.0), Point3::new(3.0, 0.5, 0.0), Point3::new(4.0, 0.5, 1.0)],
            cand.clone(),
            0.0,
        );
        assert_eq!(validate_path(&s, off).status, PathStatus::RejectedContainment);
        let degenerate = RayPath::new(
            vec![Point3::new(0.5, 0.5, 0.0), Point3::new(0.5, 0.5, 0.0), Point3::new(1.0, 0.5, 1.0)],
            cand,
            0.0,
        );
        assert_eq!(validate_path(&s, degenerate).status, PathStatus::RejectedDegenerate);
    }

    #[test]
    fn los_through_wall() {
        let wall = Facet::planar(
            0,
            vec![
                Point3::new(0.0, -1.0, -1.0),
                Point3::new(0.0, 1.0, -1.0),
                Point3::new(0.0, 1.0, 1.0),
                Point3::new(0.0, -1.0, 1.0),
            ],
        )
        .unwrap();
        let s = Scene::new(vec![wall], vec![]).unwrap();
        let p = RayPath::los(Point3::new(-1.0, 0.0, 0.0), Point3::new(1.0, 0.0, 0.0));
        assert_eq!(validate_path(&s, p).status, PathStatus::RejectedObstruction);
    }

    #[test]
    fn quadric_roots() {
        // t² − 0.25 → root 0.5 in range, −0.5 out.
        assert_eq!(roots_in_unit(1.0, 0.0, -0.25), vec![0.5]);
        assert!(roots_in_unit(1.0, 0.0, 0.25).is_empty());
        assert_eq!(roots_in_unit(0.0, 2.0, -1.0), vec![0.5]);
    }
}
