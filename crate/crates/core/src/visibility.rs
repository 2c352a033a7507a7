//! Visibility matrix, adjacency graph and candidate enumeration.
//!
//! Matrix layout of the adjacency graph: index 0 is the BS, indices
//! `1..=n` are the scene elements (facets by id, then edges by id), index
//! `n + 1` is the UE.

use std::fmt::{self, Write as _};

use rayon::prelude::*;

use crate::scene::{ElementId, Point3, Scene, Vec3};
use crate::validation::segment_obstructed;

/// Maximum number of sample-point pairs tried per element pair.
pub const SAMPLE_PAIRS: usize = 16;
/// Strict front-side margin.
const FRONT_TOL: f64 = 1e-12;
const WEDGE_ANGLE_TOL: f64 = 1e-9;
/// Sample points are pulled this fraction of the way towards the center.
const SAMPLE_INSET: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InteractionKind {
    Reflection,
    Diffraction,
}

impl InteractionKind {
    pub fn of(id: ElementId) -> Self {
        match id {
            ElementId::Facet(_) => InteractionKind::Reflection,
            ElementId::Edge(_) => InteractionKind::Diffraction,
        }
    }

    pub fn letter(self) -> char {
        match self {
            InteractionKind::Reflection => 'R',
            InteractionKind::Diffraction => 'D',
        }
    }
}

/// Ordered list of elements a candidate path interacts with. The kind of
/// each interaction follows from the element: facets reflect, edges diffract.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct InteractionList {
    items: Vec<ElementId>,
}

impl InteractionList {
    pub fn new(items: Vec<ElementId>) -> Self {
        Self { items }
    }

    pub fn elements(&self) -> &[ElementId] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn kinds(&self) -> impl Iterator<Item = InteractionKind> + '_ {
        self.items.iter().map(|&id| InteractionKind::of(id))
    }

    pub fn n_r(&self) -> usize {
        self.kinds().filter(|k| *k == InteractionKind::Reflection).count()
    }

    pub fn n_d(&self) -> usize {
        self.len() - self.n_r()
    }

    /// Interaction class such as `RD`; `LOS` for the empty list.
    pub fn class(&self) -> String {
        if self.is_empty() {
            "LOS".to_string()
        } else {
            self.kinds().map(InteractionKind::letter).collect()
        }
    }
}

impl fmt::Display for InteractionList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, id) in self.items.iter().enumerate() {
            if i > 0 {
                f.write_char(' ')?;
            }
            write!(f, "{id}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VisibilityMode {
    #[default]
    Sampled,
    Full,
}

/// Dense square 0/1 matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMatrix {
    n: usize,
    bits: Vec<bool>,
}

impl BinaryMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            bits: vec![false; n * n],
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        self.bits[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[bool] {
        &self.bits[i * self.n..(i + 1) * self.n]
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }
}

/// Adjacency digraph over BS, scene elements and UE.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VisibilityGraph {
    pub n_elements: usize,
    pub matrix: BinaryMatrix,
    n_facets: usize,
}

impl VisibilityGraph {
    /// Builds a graph directly from an element matrix and BS/UE rows.
    pub fn from_parts(vis: &BinaryMatrix, n_facets: usize, bs_row: &[bool], ue_col: &[bool], los: bool) -> Self {
        let n = vis.size();
        let mut m = BinaryMatrix::zeros(n + 2);
        for i in 0..n {
            for j in 0..n {
                m.set(i + 1, j + 1, vis.get(i, j));
            }
            m.set(0, i + 1, bs_row[i]);
            m.set(i + 1, n + 1, ue_col[i]);
        }
        m.set(0, n + 1, los);
        Self {
            n_elements: n,
            matrix: m,
            n_facets,
        }
    }

    pub fn bs(&self) -> usize {
        0
    }

    pub fn ue(&self) -> usize {
        self.n_elements + 1
    }

    /// Matrix index of a scene element.
    pub fn element_index(&self, id: ElementId) -> usize {
        match id {
            ElementId::Facet(i) => 1 + i,
            ElementId::Edge(i) => 1 + self.n_facets + i,
        }
    }

    pub fn element_at(&self, index: usize) -> ElementId {
        debug_assert!(index >= 1 && index <= self.n_elements);
        if index - 1 < self.n_facets {
            ElementId::Facet(index - 1)
        } else {
            ElementId::Edge(index - 1 - self.n_facets)
        }
    }

    pub fn labels(&self) -> Vec<String> {
        let mut out = Vec::with_capacity(self.n_elements + 2);
        out.push("BS".to_string());
        out.extend((1..=self.n_elements).map(|i| self.element_at(i).to_string()));
        out.push("UE".to_string());
        out
    }

    /// CSV dump: a header of labels, then one labelled row per node.
    pub fn to_csv(&self) -> String {
        let labels = self.labels();
        let mut s = String::new();
        s.push_str("node");
        for l in &labels {
            s.push(',');
            s.push_str(l);
        }
        s.push('\n');
        for (i, l) in labels.iter().enumerate() {
            s.push_str(l);
            for &b in self.matrix.row(i) {
                s.push_str(if b { ",1" } else { ",0" });
            }
            s.push('\n');
        }
        s
    }
}

/// Points used to probe an element's visibility: its center, then its
/// corners pulled slightly inwards so they are not shared with neighbours.
pub fn sample_points(scene: &Scene, id: ElementId) -> Vec<Point3> {
    match id {
        ElementId::Facet(i) => {
            let f = scene.facet(i);
            let c = f.centroid();
            let mut pts = vec![f.lift(&c)];
            pts.extend(f.vertices.iter().map(|v| f.lift(&(v + (c - v) * SAMPLE_INSET))));
            pts
        }
        ElementId::Edge(i) => {
            let e = scene.edge(i);
            vec![
                e.param_to_point(0.5),
                e.param_to_point(SAMPLE_INSET * 0.5),
                e.param_to_point(1.0 - SAMPLE_INSET * 0.5),
            ]
        }
    }
}

/// Whether the direction from sample `p` of `id` towards `q` leaves the
/// element on its open side: the front of a facet, the exterior of a wedge.
fn faces(scene: &Scene, id: ElementId, p: &Point3, q: &Point3) -> bool {
    let d: Vec3 = q - p;
    match id {
        ElementId::Facet(i) => match scene.facet(i).normal_at(p) {
            Ok(n) => n.dot(&d) > FRONT_TOL,
            Err(_) => false,
        },
        ElementId::Edge(i) => match scene.edge(i).wedge {
            Some(w) => w.exterior_angle_of(&d, WEDGE_ANGLE_TOL).is_some(),
            None => true,
        },
    }
}

fn pair_visible(scene: &Scene, a: ElementId, pa: &[Point3], b: ElementId, pb: &[Point3]) -> bool {
    let pairs = SAMPLE_PAIRS.min(pa.len() * pb.len());
    (0..pairs).any(|k| {
        let p = &pa[k % pa.len()];
        let q = &pb[(k + k / pa.len()) % pb.len()];
        faces(scene, a, p, q) && faces(scene, b, q, p) && !segment_obstructed(scene, p, q, &[a, b])
    })
}

fn point_sees(scene: &Scene, id: ElementId, samples: &[Point3], x: &Point3) -> bool {
    samples
        .iter()
        .any(|p| faces(scene, id, p, x) && !segment_obstructed(scene, p, x, &[id]))
}

/// Element-to-element visibility matrix, in [`Scene::elements`] order.
pub fn build_visibility(scene: &Scene, mode: VisibilityMode) -> BinaryMatrix {
    let n = scene.element_count();
    let mut m = BinaryMatrix::zeros(n);
    let ids: Vec<ElementId> = scene.elements().collect();
    let boundary = |a: ElementId, b: ElementId| match (a, b) {
        (ElementId::Facet(f), ElementId::Edge(e)) | (ElementId::Edge(e), ElementId::Facet(f)) => {
            scene.is_boundary_edge(f, e)
        }
        _ => false,
    };
    match mode {
        VisibilityMode::Full => {
            for i in 0..n {
                for j in 0..n {
                    m.set(i, j, i != j);
                }
            }
        }
        VisibilityMode::Sampled => {
            let samples: Vec<Vec<Point3>> = ids.iter().map(|&id| sample_points(scene, id)).collect();
            let rows: Vec<Vec<bool>> = (0..n)
                .into_par_iter()
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            i != j
                                && !boundary(ids[i], ids[j])
                                && pair_visible(scene, ids[i], &samples[i], ids[j], &samples[j])
                        })
                        .collect()
                })
                .collect();
            for i in 0..n {
                for j in 0..n {
                    m.set(i, j, rows[i][j] || rows[j][i]);
                }
            }
        }
    }
    m
}

/// Embeds the element matrix between a BS source row and a UE sink column.
pub fn build_adjacency(vis: &BinaryMatrix, scene: &Scene, bs: &Point3, ue: &Point3, mode: VisibilityMode) -> VisibilityGraph {
    let ids: Vec<ElementId> = scene.elements().collect();
    let (bs_row, ue_col): (Vec<bool>, Vec<bool>) = match mode {
        VisibilityMode::Full => (vec![true; ids.len()], vec![true; ids.len()]),
        VisibilityMode::Sampled => ids
            .par_iter()
            .map(|&id| {
                let s = sample_points(scene, id);
                (point_sees(scene, id, &s, bs), point_sees(scene, id, &s, ue))
            })
            .unzip(),
    };
    let los = !segment_obstructed(scene, bs, ue, &[]);
    VisibilityGraph::from_parts(vis, scene.facets().len(), &bs_row, &ue_col, los)
}

/// All simple BS→UE paths with at most `max_interactions` intermediate
/// nodes, depth-first by ascending index, then stably sorted by length.
pub fn enumerate_candidates(g: &VisibilityGraph, max_interactions: usize) -> Vec<InteractionList> {
    enumerate(g, max_interactions, false)
}

/// Like [`enumerate_candidates`] but allows revisiting an element as long
/// as it is not visited twice in a row.
pub fn enumerate_walks(g: &VisibilityGraph, max_interactions: usize) -> Vec<InteractionList> {
    enumerate(g, max_interactions, true)
}

fn enumerate(g: &VisibilityGraph, max_interactions: usize, revisits: bool) -> Vec<InteractionList> {
    let mut out = Vec::new();
    let mut stack = Vec::with_capacity(max_interactions);
    let mut visited = vec![false; g.matrix.size()];
    visited[g.bs()] = true;
    dfs(g, g.bs(), max_interactions, revisits, &mut stack, &mut visited, &mut out);
    out.sort_by_key(|c| c.len());
    out
}

fn dfs(
    g: &VisibilityGraph,
    node: usize,
    budget: usize,
    revisits: bool,
    stack: &mut Vec<usize>,
    visited: &mut [bool],
    out: &mut Vec<InteractionList>,
) {
    let ue = g.ue();
    for (next, &edge) in g.matrix.row(node).iter().enumerate() {
        if !edge {
            continue;
        }
        if next == ue {
            out.push(InteractionList::new(stack.iter().map(|&k| g.element_at(k)).collect()));
            continue;
        }
        if next == g.bs() || budget == 0 {
            continue;
        }
        let blocked = if revisits { next == node } else { visited[next] };
        if blocked {
            continue;
        }
        visited[next] = true;
        stack.push(next);
        dfs(g, next, budget - 1, revisits, stack, visited, out);
        stack.pop();
        visited[next] = false;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::Facet;

    fn square(id: usize, corners: [[f64; 3]; 4]) -> Facet {
        Facet::planar(id, corners.iter().map(|c| Point3::new(c[0], c[1], c[2])).collect()).unwrap()
    }

    fn complete(n: usize) -> VisibilityGraph {
        let mut vis = BinaryMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                vis.set(i, j, i != j);
            }
        }
        VisibilityGraph::from_parts(&vis, n, &vec![true; n], &vec![true; n], true)
    }

    #[test]
    fn empty_scene_graph() {
        let s = Scene::empty();
        let vis = build_visibility(&s, VisibilityMode::Sampled);
        let g = build_adjacency(&vis, &s, &Point3::origin(), &Point3::new(1.0, 0.0, 0.0), VisibilityMode::Sampled);
        assert_eq!(g.matrix.size(), 2);
        assert!(g.matrix.get(0, 1));
        assert_eq!(g.matrix.count_ones(), 1);
        assert_eq!(enumerate_candidates(&g, 2), vec![InteractionList::default()]);
    }

    #[test]
    fn complete_pair_gives_five_candidates() {
        let g = complete(2);
        let c = enumerate_candidates(&g, 2);
        let a = ElementId::Facet(0);
        let b = ElementId::Facet(1);
        let expect: Vec<InteractionList> = vec![
            vec![],
            vec![a],
            vec![b],
            vec![a, b],
            vec![b, a],
        ]
        .into_iter()
        .map(InteractionList::new)
        .collect();
        assert_eq!(c, expect);
    }

    #[test]
    fn walks_allow_returns() {
        let g = complete(2);
        let w = enumerate_walks(&g, 3);
        let a = ElementId::Facet(0);
        let b = ElementId::Facet(1);
        assert!(w.contains(&InteractionList::new(vec![a, b, a])));
        assert!(!w.iter().any(|c| c.elements().windows(2).any(|p| p[0] == p[1])));
        assert!(enumerate_candidates(&g, 3).iter().all(|c| c.len() <= 2));
    }

    #[test]
    fn facing_squares_see_each_other() {
        let lower = square(0, [[0., 0., 0.], [1., 0., 0.], [1., 1., 0.], [0., 1., 0.]]);
        // Winding reversed so the normal points down, towards the lower square.
        let upper = square(1, [[0., 0., 1.], [0., 1., 1.], [1., 1., 1.], [1., 0., 1.]]);
        let s = Scene::new(vec![lower.clone(), upper.clone()], vec![]).unwrap();
        let v = build_visibility(&s, VisibilityMode::Sampled);
        assert!(v.get(0, 1) && v.get(1, 0));

        let wall = square(2, [[-1., -1., 0.5], [2., -1., 0.5], [2., 2., 0.5], [-1., 2., 0.5]]);
        let s = Scene::new(vec![lower, upper, wall], vec![]).unwrap();
        let v = build_visibility(&s, VisibilityMode::Sampled);
        assert!(!v.get(0, 1) && !v.get(1, 0));
    }

    #[test]
    fn coplanar_facets_are_hidden() {
        let a = square(0, [[0., 0., 0.], [1., 0., 0.], [1., 1., 0.], [0., 1., 0.]]);
        let b = square(1, [[2., 0., 0.], [3., 0., 0.], [3., 1., 0.], [2., 1., 0.]]);
        let s = Scene::new(vec![a, b], vec![]).unwrap();
        let v = build_visibility(&s, VisibilityMode::Sampled);
        assert!(!v.get(0, 1) && !v.get(1, 0));
        let full = build_visibility(&s, VisibilityMode::Full);
        assert!(full.get(0, 1) && !full.get(0, 0));
    }

    #[test]
    fn own_boundary_edge_is_hidden() {
        let floor = square(0, [[0., 0., 0.], [1., 0., 0.], [1., 1., 0.], [0., 1., 0.]]);
        let wall = square(1, [[0., 0., 0.], [0., 1., 0.], [0., 1., 1.], [0., 0., 1.]]);
        let s = Scene::new(vec![floor, wall], vec![]).unwrap();
        let v = build_visibility(&s, VisibilityMode::Sampled);
        assert!(!v.get(0, 2) && !v.get(2, 0) && !v.get(1, 2));
        // Floor and wall of a concave corner face each other.
        assert!(v.get(0, 1));
    }

    #[test]
    fn class_labels() {
        let l = InteractionList::new(vec![ElementId::Facet(3), ElementId::Edge(0)]);
        assert_eq!(l.class(), "RD");
        assert_eq!(l.to_string(), "s3 e0");
        assert_eq!((l.n_r(), l.n_d()), (1, 1));
        assert_eq!(InteractionList::default().class(), "LOS");
    }
}
