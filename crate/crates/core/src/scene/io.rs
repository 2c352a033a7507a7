use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Edge, EdgeCurve, Facet, Material, Point3, Quadric, Scene, SceneError, Surface, Vec3};

/// On-disk scene description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    pub facets: Vec<FacetSpec>,
    #[serde(default)]
    pub edges: Vec<EdgeSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FacetSpec {
    pub id: usize,
    pub vertices: Vec<[f64; 3]>,
    #[serde(default)]
    pub material: Material,
    /// Coefficients `a..j` of the supporting quadric; absent for planes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadric: Option<[f64; 10]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub id: usize,
    pub endpoints: [[f64; 3]; 2],
    pub parents: [usize; 2],
    /// Overrides the interior angle computed from the parent facets.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interior_angle: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arc: Option<ArcSpec>,
}

/// Circular-arc edge; `endpoints` must match the arc's ends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArcSpec {
    pub center: [f64; 3],
    pub radius: f64,
    pub axis_u: [f64; 3],
    pub axis_v: [f64; 3],
    pub start_angle: f64,
    pub sweep: f64,
}

fn point(p: [f64; 3]) -> Point3 {
    Point3::new(p[0], p[1], p[2])
}

fn array(p: &Point3) -> [f64; 3] {
    [p.x, p.y, p.z]
}

pub fn load_scene(path: impl AsRef<Path>) -> Result<Scene, SceneError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| SceneError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let file: SceneFile = serde_json::from_str(&text)?;
    file.build()
}

/// Sorts specs by id and checks uniqueness and contiguity.
fn ordered<T>(mut items: Vec<T>, id: impl Fn(&T) -> usize, kind: &'static str) -> Result<Vec<T>, SceneError> {
    items.sort_by_key(&id);
    for (i, w) in items.iter().enumerate() {
        if i > 0 && id(&items[i - 1]) == id(w) {
            return Err(SceneError::DuplicateId { kind, id: id(w) });
        }
        if id(w) != i {
            return Err(SceneError::NonContiguousIds { kind, missing: i });
        }
    }
    Ok(items)
}

impl SceneFile {
    pub fn build(self) -> Result<Scene, SceneError> {
        let facet_specs = ordered(self.facets, |f| f.id, "facet")?;
        let edge_specs = ordered(self.edges, |e| e.id, "edge")?;

        let facets = facet_specs
            .into_iter()
            .map(|f| {
                let surface = match f.quadric {
                    Some(c) => Surface::Quadric(Quadric::new(c)),
                    None => Surface::Plane,
                };
                Facet::new(f.id, f.vertices.into_iter().map(point).collect(), f.material, surface)
            })
            .collect::<Result<Vec<_>, _>>()?;

        let edges = edge_specs
            .into_iter()
            .map(|e| {
                for &p in &e.endpoints {
                    if !p.iter().all(|c| c.is_finite()) {
                        return Err(SceneError::NonFinite);
                    }
                }
                let parents = (e.parents[0], e.parents[1]);
                let curve = match e.arc {
                    None => EdgeCurve::Segment {
                        start: point(e.endpoints[0]),
                        end: point(e.endpoints[1]),
                    },
                    Some(a) => EdgeCurve::Arc {
                        center: point(a.center),
                        radius: a.radius,
                        axis_u: Vec3::from(a.axis_u).normalize(),
                        axis_v: Vec3::from(a.axis_v).normalize(),
                        start_angle: a.start_angle,
                        sweep: a.sweep,
                    },
                };
                let default_angle = e.interior_angle.unwrap_or(std::f64::consts::FRAC_PI_2);
                Ok((Edge::new(e.id, curve, parents, default_angle)?, e.interior_angle))
            })
            .collect::<Result<Vec<_>, _>>()?;

        Scene::with_edge_angles(facets, edges)
    }
}

pub(super) fn to_file(scene: &Scene) -> SceneFile {
    let facets = scene
        .facets()
        .iter()
        .map(|f| FacetSpec {
            id: f.id,
            vertices: f.vertices.iter().map(array).collect(),
            material: f.material,
            quadric: match f.surface {
                Surface::Plane => None,
                Surface::Quadric(q) => Some(q.coeffs),
            },
        })
        .collect();
    let edges = scene
        .edges()
        .iter()
        .map(|e| {
            let (s, t) = e.endpoints();
            let arc = match e.curve {
                EdgeCurve::Segment { .. } => None,
                EdgeCurve::Arc {
                    center,
                    radius,
                    axis_u,
                    axis_v,
                    start_angle,
                    sweep,
                } => Some(ArcSpec {
                    center: array(&center),
                    radius,
                    axis_u: axis_u.into(),
                    axis_v: axis_v.into(),
                    start_angle,
                    sweep,
                }),
            };
            EdgeSpec {
                id: e.id,
                endpoints: [array(&s), array(&t)],
                parents: [e.parents.0, e.parents.1],
                interior_angle: Some(e.interior_angle),
                arc,
            }
        })
        .collect();
    SceneFile { facets, edges }
}
