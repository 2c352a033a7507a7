mod common;

use std::path::Path;

use common::*;
use minpath::scenarios;
use minpath::scene::{load_scene, ElementId, Point3, Scene, Vec3, CONSTRUCTION_TOL, SOLUTION_TOL};
use proptest::prelude::*;
use rand::Rng;

fn bundled(name: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenes").join(name)
}

#[test]
fn bundled_scenes_match_builders() {
    assert_eq!(load_scene(bundled("urban.json")).unwrap(), scenarios::urban());
    assert_eq!(load_scene(bundled("two_mirrors.json")).unwrap(), scenarios::two_mirrors());
}

#[test]
fn loading_is_deterministic() {
    for name in ["urban.json", "two_mirrors.json"] {
        let a = load_scene(bundled(name)).unwrap();
        let b = load_scene(bundled(name)).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        let ids: Vec<ElementId> = a.elements().collect();
        assert_eq!(ids, b.elements().collect::<Vec<_>>());
    }
}

#[test]
fn serialized_scene_reloads_identically() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("urban.json");
    let scene = scenarios::urban();
    std::fs::write(&path, scene.to_json()).unwrap();
    let back = load_scene(&path).unwrap();
    assert_eq!(back.to_json(), scene.to_json());
}

#[test]
fn derived_edges_lie_on_both_parents() {
    let mut rng = rng(11);
    let mut scenes = vec![scenarios::urban()];
    scenes.extend((0..20).map(|_| random_wedge(&mut rng)));
    for scene in &scenes {
        for e in scene.edges() {
            let (a, b) = e.endpoints();
            for f in scene.incident_facets(ElementId::Edge(e.id)).into_iter().flatten() {
                let facet = scene.facet(f);
                assert!(facet.contains(&a, CONSTRUCTION_TOL) && facet.contains(&b, CONSTRUCTION_TOL));
                assert!(facet.implicit_distance(&a).abs() < CONSTRUCTION_TOL);
            }
        }
    }
}

#[test]
fn urban_wedges_are_right_angled_and_open_outward() {
    let scene = scenarios::urban();
    for e in scene.edges() {
        let w = e.wedge.expect("derived edges carry a wedge");
        assert!((w.n() - 1.5).abs() < 1e-12);
        // Both face normals point into the exterior sector.
        assert!(w.exterior_angle_of(&w.face0_normal, 1e-9).is_some());
        assert!(w.exterior_angle_of(&w.facen_normal, 1e-9).is_some());
    }
}

#[test]
fn wedge_generator_produces_requested_angle() {
    let mut rng = rng(12);
    for _ in 0..50 {
        let a = point_in(&mut rng, 3.0);
        let b = a + unit(&mut rng) * 4.0;
        let interior = uniform(&mut rng, 0.3, 3.0);
        let s = wedge_scene(a, b, unit(&mut rng), interior, 2.0);
        assert_eq!(s.edges().len(), 1);
        let n = s.edge(0).wedge.unwrap().n();
        assert!((n * std::f64::consts::PI - (2.0 * std::f64::consts::PI - interior)).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn planar_normal_is_constant_and_unit(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let f = square(0, point_in(&mut rng, 10.0), unit(&mut rng), uniform(&mut rng, 0.5, 5.0));
        let n0 = f.normal_at(&f.centroid()).unwrap();
        prop_assert!((n0.norm() - 1.0).abs() < 1e-12);
        for _ in 0..10 {
            let p = f.param_to_point(rng.random(), rng.random());
            let n = f.normal_at(&p).unwrap();
            prop_assert!(n0.cross(&n).norm().atan2(n0.dot(&n)) < 1e-12);
        }
    }

    #[test]
    fn parametric_points_lie_on_the_surface(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let f = square(0, point_in(&mut rng, 10.0), unit(&mut rng), uniform(&mut rng, 0.5, 5.0));
        for _ in 0..100 {
            let p = f.param_to_point(rng.random(), rng.random());
            prop_assert!(f.implicit_distance(&p).abs() < CONSTRUCTION_TOL);
            prop_assert!(f.contains(&p, SOLUTION_TOL));
        }
    }

    #[test]
    fn edge_offsets_match_distance(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let scene = random_wedge(&mut rng);
        let e = scene.edge(0);
        for _ in 0..20 {
            let p = point_in(&mut rng, 10.0);
            let [u, v] = e.transverse_offsets(&p);
            prop_assert!((u.hypot(v) - e.implicit(&p)).abs() < 1e-12 * (1.0 + e.implicit(&p)));
            let on = e.param_to_point(uniform(&mut rng, -2.0, 3.0));
            let [u, v] = e.transverse_offsets(&on);
            prop_assert!(u.abs() < 1e-12 && v.abs() < 1e-12 * (1.0 + on.coords.norm()));
        }
    }

    #[test]
    fn straight_edge_direction_is_constant(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let scene = random_wedge(&mut rng);
        let e = scene.edge(0);
        let (a, b) = e.endpoints();
        let d0: Vec3 = (b - a).normalize();
        for _ in 0..10 {
            let p = e.param_to_point(rng.random());
            prop_assert!((e.direction_at(&p).unwrap() - d0).norm() < 1e-12);
        }
    }
}

#[test]
fn aabb_contains_every_vertex() {
    let scene: Scene = scenarios::urban();
    let b = scene.aabb().unwrap();
    for f in scene.facets() {
        for v in &f.vertices {
            assert!(b.contains(v, 0.0));
        }
    }
    assert!(!b.contains(&Point3::new(0.0, 0.0, 41.0), 0.0));
}
