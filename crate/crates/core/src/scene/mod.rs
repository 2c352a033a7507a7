//! Scene geometry and the differential-geometry queries the solvers use.
//!
//! A [`Scene`] is an immutable set of convex facets (planar, or a quadric
//! patch over a planar footprint) and the edges between them. Every element
//! carries both an implicit description (`f(p) = 0` on the supporting
//! surface or curve) and a parametric map, so path points can be found either
//! in Cartesian space or in parameter space.

mod edge;
mod facet;
mod io;

use std::fmt;

use thiserror::Error;

pub use edge::{Edge, EdgeCurve, Wedge};
pub use facet::{Facet, Material, Quadric, Surface};
pub use io::{load_scene, EdgeSpec, FacetSpec, SceneFile};

pub type Point3 = nalgebra::Point3<f64>;
pub type Vec3 = nalgebra::Vector3<f64>;

/// Tolerance for construction-time checks (coplanarity, vertex sharing).
pub const CONSTRUCTION_TOL: f64 = 1e-9;
/// Tolerance for containment of solver solutions.
pub const SOLUTION_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("failed to read scene file {path}: {source}")]
    Io {
        path: std::path::PathBuf,
        source: std::io::Error,
    },
    #[error("invalid scene JSON: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("non-finite coordinate in scene")]
    NonFinite,
    #[error("facet {id} has fewer than three vertices")]
    TooFewVertices { id: usize },
    #[error("facet {id}: degenerate polygon (area {area:.3e} m²)")]
    Degenerate { id: usize, area: f64 },
    #[error("facet {id}: vertices are not coplanar (deviation {deviation:.3e} m)")]
    NonPlanar { id: usize, deviation: f64 },
    #[error("facet {id}: polygon is not convex")]
    NonConvex { id: usize },
    #[error("facet {id}: vertex off the quadric surface by {deviation:.3e} m")]
    OffSurface { id: usize, deviation: f64 },
    #[error("duplicate {kind} id {id}")]
    DuplicateId { kind: &'static str, id: usize },
    #[error("{kind} ids must be contiguous from 0 (missing {missing})")]
    NonContiguousIds { kind: &'static str, missing: usize },
    #[error("edge {id}: unknown parent facet {parent}")]
    UnknownParent { id: usize, parent: usize },
    #[error("edge {id}: endpoints coincide")]
    DegenerateEdge { id: usize },
    #[error("edge {id}: endpoint off parent facet {parent} by {deviation:.3e} m")]
    EdgeOffParent {
        id: usize,
        parent: usize,
        deviation: f64,
    },
    #[error("edge {id}: interior angle {angle} outside (0, 2π)")]
    InvalidInteriorAngle { id: usize, angle: f64 },
    #[error("edge {id}: parent facets do not form a wedge")]
    NoWedge { id: usize },
    #[error("singular normal at {point:?}")]
    SingularNormal { point: [f64; 3] },
    #[error("edge {id}: zero-length tangent")]
    DegenerateTangent { id: usize },
}

/// Identifies a scene element. Facet and edge ids live in separate spaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ElementId {
    Facet(usize),
    Edge(usize),
}

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ElementId::Facet(i) => write!(f, "s{i}"),
            ElementId::Edge(i) => write!(f, "e{i}"),
        }
    }
}

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: Point3,
    pub max: Point3,
}

impl Aabb {
    pub fn from_points<'a>(points: impl IntoIterator<Item = &'a Point3>) -> Option<Self> {
        let pts: Vec<Point3> = points.into_iter().copied().collect();
        if pts.is_empty() {
            return None;
        }
        let (min, max) = facet::bounds(&pts);
        Some(Self { min, max })
    }

    pub fn diagonal(&self) -> f64 {
        (self.max - self.min).norm()
    }

    pub fn contains(&self, p: &Point3, tol: f64) -> bool {
        (0..3).all(|k| p[k] >= self.min[k] - tol && p[k] <= self.max[k] + tol)
    }

    pub fn grow(&self, p: &Point3) -> Self {
        let mut out = *self;
        for k in 0..3 {
            out.min[k] = out.min[k].min(p[k]);
            out.max[k] = out.max[k].max(p[k]);
        }
        out
    }
}

/// Immutable scene: facets, edges (explicit then derived) and bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    facets: Vec<Facet>,
    edges: Vec<Edge>,
    aabb: Option<Aabb>,
}

impl Scene {
    pub fn empty() -> Self {
        Self {
            facets: Vec::new(),
            edges: Vec::new(),
            aabb: None,
        }
    }

    /// Assembles a scene from facets and explicit edges and appends the
    /// derived edges (facet pairs sharing exactly two vertices) ordered by
    /// `(min parent, max parent)`. Facet ids must equal their positions.
    pub fn new(facets: Vec<Facet>, explicit_edges: Vec<Edge>) -> Result<Self, SceneError> {
        Self::with_edge_angles(facets, explicit_edges.into_iter().map(|e| (e, None)).collect())
    }

    /// Like [`Scene::new`], but explicit edges may override the interior
    /// angle computed from their parent facets.
    pub fn with_edge_angles(facets: Vec<Facet>, explicit_edges: Vec<(Edge, Option<f64>)>) -> Result<Self, SceneError> {
        for (i, f) in facets.iter().enumerate() {
            if f.id != i {
                return Err(SceneError::NonContiguousIds {
                    kind: "facet",
                    missing: i,
                });
            }
        }
        let mut edges = Vec::with_capacity(explicit_edges.len());
        for (i, (e, angle)) in explicit_edges.into_iter().enumerate() {
            if e.id != i {
                return Err(SceneError::NonContiguousIds {
                    kind: "edge",
                    missing: i,
                });
            }
            edges.push(attach_wedge(e, &facets, angle)?);
        }

        for i in 0..facets.len() {
            for j in (i + 1)..facets.len() {
                let Some((a, b)) = shared_pair(&facets[i], &facets[j]) else {
                    continue;
                };
                let duplicate = edges.iter().any(|e| {
                    let (p, q) = e.parents;
                    let same_parents = (p.min(q), p.max(q)) == (i, j);
                    let (s, t) = e.endpoints();
                    let same_ends = ((s - a).norm() <= CONSTRUCTION_TOL && (t - b).norm() <= CONSTRUCTION_TOL)
                        || ((s - b).norm() <= CONSTRUCTION_TOL && (t - a).norm() <= CONSTRUCTION_TOL);
                    same_parents && same_ends
                });
                if duplicate {
                    continue;
                }
                let edge = Edge::segment(edges.len(), a, b, (i, j))?;
                edges.push(attach_wedge(edge, &facets, None)?);
            }
        }

        let mut pts: Vec<Point3> = facets.iter().flat_map(|f| f.vertices.iter().copied()).collect();
        for e in &edges {
            let (s, t) = e.endpoints();
            pts.push(s);
            pts.push(t);
        }
        let aabb = Aabb::from_points(&pts);
        Ok(Self { facets, edges, aabb })
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn facet(&self, id: usize) -> &Facet {
        &self.facets[id]
    }

    pub fn edge(&self, id: usize) -> &Edge {
        &self.edges[id]
    }

    pub fn aabb(&self) -> Option<Aabb> {
        self.aabb
    }

    pub fn has_quadrics(&self) -> bool {
        self.facets.iter().any(|f| !f.is_planar())
    }

    /// Number of facets plus edges.
    pub fn element_count(&self) -> usize {
        self.facets.len() + self.edges.len()
    }

    /// All elements in matrix order: facets by id, then edges by id.
    pub fn elements(&self) -> impl Iterator<Item = ElementId> + '_ {
        (0..self.facets.len())
            .map(ElementId::Facet)
            .chain((0..self.edges.len()).map(ElementId::Edge))
    }

    /// Position of an element in [`Scene::elements`] order.
    pub fn element_index(&self, id: ElementId) -> usize {
        match id {
            ElementId::Facet(i) => i,
            ElementId::Edge(i) => self.facets.len() + i,
        }
    }

    pub fn element_at(&self, index: usize) -> ElementId {
        if index < self.facets.len() {
            ElementId::Facet(index)
        } else {
            ElementId::Edge(index - self.facets.len())
        }
    }

    /// True when `edge` is one of `facet`'s boundary edges.
    pub fn is_boundary_edge(&self, facet: usize, edge: usize) -> bool {
        let (a, b) = self.edges[edge].parents;
        a == facet || b == facet
    }

    /// Facets that must not count as obstacles for a ray segment touching
    /// `id`: the element itself, or an edge's two parents.
    pub fn incident_facets(&self, id: ElementId) -> [Option<usize>; 2] {
        match id {
            ElementId::Facet(i) => [Some(i), None],
            ElementId::Edge(i) => {
                let (a, b) = self.edges[i].parents;
                [Some(a), Some(b)]
            }
        }
    }

    pub fn char_len(&self, id: ElementId) -> f64 {
        match id {
            ElementId::Facet(i) => self.facets[i].char_len(),
            ElementId::Edge(i) => self.edges[i].char_len(),
        }
    }

    /// Parametric map of an element: two parameters for facets, one for edges.
    pub fn param_to_point(&self, id: ElementId, params: &[f64]) -> Point3 {
        match id {
            ElementId::Facet(i) => self.facets[i].param_to_point(params[0], params[1]),
            ElementId::Edge(i) => self.edges[i].param_to_point(params[0]),
        }
    }

    pub fn param_dim(id: ElementId) -> usize {
        match id {
            ElementId::Facet(_) => 2,
            ElementId::Edge(_) => 1,
        }
    }

    pub fn contains(&self, id: ElementId, p: &Point3, tol: f64) -> bool {
        match id {
            ElementId::Facet(i) => self.facets[i].contains(p, tol),
            ElementId::Edge(i) => self.edges[i].contains(p, tol),
        }
    }

    /// Canonical file form of the scene (derived edges made explicit).
    pub fn to_file(&self) -> SceneFile {
        io::to_file(self)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("scene serializes")
    }
}

/// Two vertices shared by both facets, in `a`'s order; `None` unless exactly two.
fn shared_pair(a: &Facet, b: &Facet) -> Option<(Point3, Point3)> {
    let shared: Vec<Point3> = a
        .vertices
        .iter()
        .filter(|v| b.vertices.iter().any(|w| (*v - w).norm() <= CONSTRUCTION_TOL))
        .copied()
        .collect();
    (shared.len() == 2).then(|| (shared[0], shared[1]))
}

/// Checks parent membership and computes the wedge frame for a straight
/// edge. An explicit interior angle overrides the geometric one.
fn attach_wedge(mut edge: Edge, facets: &[Facet], explicit: Option<f64>) -> Result<Edge, SceneError> {
    let (p0, p1) = edge.parents;
    for parent in [p0, p1] {
        let Some(f) = facets.get(parent) else {
            return Err(SceneError::UnknownParent { id: edge.id, parent });
        };
        let (s, t) = edge.endpoints();
        for p in [s, t] {
            let deviation = f.implicit_distance(&p).abs();
            if deviation > CONSTRUCTION_TOL {
                return Err(SceneError::EdgeOffParent {
                    id: edge.id,
                    parent,
                    deviation,
                });
            }
        }
    }
    if let EdgeCurve::Segment { start, end } = edge.curve {
        let (wedge, interior) = Wedge::from_faces(&start, &end, &facets[p0], &facets[p1])
            .ok_or(SceneError::NoWedge { id: edge.id })?;
        let interior = explicit.unwrap_or(interior);
        if !(interior > 0.0 && interior < std::f64::consts::TAU) {
            return Err(SceneError::InvalidInteriorAngle {
                id: edge.id,
                angle: interior,
            });
        }
        edge.interior_angle = interior;
        edge.wedge = Some(Wedge {
            exterior_angle: std::f64::consts::TAU - interior,
            ..wedge
        });
    }
    Ok(edge)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(id: usize, verts: [[f64; 3]; 4]) -> Facet {
        Facet::planar(id, verts.iter().map(|v| Point3::new(v[0], v[1], v[2])).collect()).unwrap()
    }

    #[test]
    fn single_facet_has_no_edges() {
        let s = Scene::new(
            vec![square(0, [[0., 0., 0.], [1., 0., 0.], [1., 1., 0.], [0., 1., 0.]])],
            vec![],
        )
        .unwrap();
        assert_eq!(s.facets().len(), 1);
        assert!(s.edges().is_empty());
    }

    #[test]
    fn shared_side_becomes_an_edge() {
        // Floor x ≥ 0 and wall x = 0 share the side from (0,0,0) to (0,1,0).
        let floor = square(0, [[0., 0., 0.], [1., 0., 0.], [1., 1., 0.], [0., 1., 0.]]);
        let wall = square(1, [[0., 0., 0.], [0., 1., 0.], [0., 1., 1.], [0., 0., 1.]]);
        let s = Scene::new(vec![floor, wall], vec![]).unwrap();
        assert_eq!(s.edges().len(), 1);
        let e = &s.edges()[0];
        let (a, b) = e.endpoints();
        assert_eq!(a, Point3::new(0.0, 0.0, 0.0));
        assert_eq!(b, Point3::new(0.0, 1.0, 0.0));
        assert_eq!(e.parents, (0, 1));
        for p in [a, b] {
            assert!(s.contains(ElementId::Facet(0), &p, 1e-9));
            assert!(s.contains(ElementId::Facet(1), &p, 1e-9));
        }
        // Free space is the x > 0, z > 0 quadrant; material fills the rest.
        assert!((e.interior_angle - 1.5 * std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn element_ordering() {
        let floor = square(0, [[0., 0., 0.], [1., 0., 0.], [1., 1., 0.], [0., 1., 0.]]);
        let wall = square(1, [[0., 0., 0.], [0., 1., 0.], [0., 1., 1.], [0., 0., 1.]]);
        let s = Scene::new(vec![floor, wall], vec![]).unwrap();
        let ids: Vec<ElementId> = s.elements().collect();
        assert_eq!(ids, vec![ElementId::Facet(0), ElementId::Facet(1), ElementId::Edge(0)]);
        assert_eq!(s.element_index(ElementId::Edge(0)), 2);
        assert_eq!(s.element_at(2), ElementId::Edge(0));
        assert!(s.is_boundary_edge(1, 0));
    }
}
