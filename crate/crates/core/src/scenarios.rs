//! Reference scenes used by the tests and the bundled scene files.

use crate::scene::{Facet, Point3, Scene};

/// Two vertical mirrors: the plane y = x for `x ∈ [0, 3.5]` and the plane
/// x = 5 for `y ∈ [0.5, 4]`, both spanning `z ∈ [−1, 1]`.
pub fn two_mirrors() -> Scene {
    let m1 = Facet::planar(
        0,
        vec![
            Point3::new(0.0, 0.0, -1.0),
            Point3::new(3.5, 3.5, -1.0),
            Point3::new(3.5, 3.5, 1.0),
            Point3::new(0.0, 0.0, 1.0),
        ],
    )
    .expect("valid mirror");
    let m2 = Facet::planar(
        1,
        vec![
            Point3::new(5.0, 0.5, -1.0),
            Point3::new(5.0, 0.5, 1.0),
            Point3::new(5.0, 4.0, 1.0),
            Point3::new(5.0, 4.0, -1.0),
        ],
    )
    .expect("valid mirror");
    Scene::new(vec![m1, m2], vec![]).expect("valid scene")
}

pub const TWO_MIRRORS_BS: [f64; 3] = [2.0, -1.0, 0.0];
pub const TWO_MIRRORS_UE: [f64; 3] = [2.0, 4.0, 0.0];

/// A box building `[x0, x1] × [y0, y1] × [0, h]`: roof then the walls at
/// x = x1, y = y1, x = x0, y = y0, all wound for outward normals.
pub fn box_facets(first_id: usize, x0: f64, x1: f64, y0: f64, y1: f64, h: f64) -> Vec<Facet> {
    let p = Point3::new;
    let quads = [
        [p(x0, y0, h), p(x1, y0, h), p(x1, y1, h), p(x0, y1, h)],
        [p(x1, y0, 0.0), p(x1, y1, 0.0), p(x1, y1, h), p(x1, y0, h)],
        [p(x0, y1, 0.0), p(x0, y1, h), p(x1, y1, h), p(x1, y1, 0.0)],
        [p(x0, y0, 0.0), p(x0, y0, h), p(x0, y1, h), p(x0, y1, 0.0)],
        [p(x0, y0, 0.0), p(x1, y0, 0.0), p(x1, y0, h), p(x0, y0, h)],
    ];
    quads
        .into_iter()
        .enumerate()
        .map(|(i, q)| Facet::planar(first_id + i, q.to_vec()).expect("valid box face"))
        .collect()
}

/// Street canyon: ground z = 0 and three 10 m wide buildings centred at
/// x = 0, 15 and 27 m with heights 20, 10 and 40 m, extruded 200 m along y.
pub fn urban() -> Scene {
    let ground = Facet::planar(
        0,
        vec![
            Point3::new(-60.0, -120.0, 0.0),
            Point3::new(90.0, -120.0, 0.0),
            Point3::new(90.0, 120.0, 0.0),
            Point3::new(-60.0, 120.0, 0.0),
        ],
    )
    .expect("valid ground");
    let mut facets = vec![ground];
    for (center, height) in URBAN_BUILDINGS {
        let id = facets.len();
        facets.extend(box_facets(id, center - 5.0, center + 5.0, -100.0, 100.0, height));
    }
    Scene::new(facets, vec![]).expect("valid scene")
}

/// `(center x, height)` of each building.
pub const URBAN_BUILDINGS: [(f64, f64); 3] = [(0.0, 20.0), (15.0, 10.0), (27.0, 40.0)];
pub const URBAN_BS: [f64; 3] = [0.0, 0.0, 22.0];
pub const URBAN_UE: [f64; 3] = [8.0, 0.0, 2.0];
pub const URBAN_FREQUENCY: f64 = 1e9;
