//! Scene generators and geometric oracles shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use minpath::scene::{ElementId, Facet, Point3, Scene, Vec3};
use minpath::validation::RayPath;
use minpath::visibility::InteractionList;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

pub fn point_in(rng: &mut impl Rng, half: f64) -> Point3 {
    Point3::new(uniform(rng, -half, half), uniform(rng, -half, half), uniform(rng, -half, half))
}

pub fn unit(rng: &mut impl Rng) -> Vec3 {
    loop {
        let v = point_in(rng, 1.0).coords;
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return v / n;
        }
    }
}

/// Orthonormal `(u, v)` with `u × v = n`.
pub fn basis(n: &Vec3) -> (Vec3, Vec3) {
    let helper = if n.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    let u = n.cross(&helper).normalize();
    (u, n.cross(&u))
}

/// Square facet with the given centre, unit normal and half side.
pub fn square(id: usize, c: Point3, n: Vec3, half: f64) -> Facet {
    let (u, v) = basis(&n);
    let verts = vec![
        c - u * half - v * half,
        c + u * half - v * half,
        c + u * half + v * half,
        c - u * half + v * half,
    ];
    Facet::planar(id, verts).expect("square facet")
}

/// `n` disjoint random square mirrors.
pub fn random_mirrors(rng: &mut impl Rng, n: usize) -> Scene {
    let facets = (0..n)
        .map(|i| {
            let c = point_in(rng, 5.0);
            let nrm = unit(rng);
            square(i, c, nrm, uniform(rng, 1.5, 3.0))
        })
        .collect();
    Scene::new(facets, vec![]).expect("mirror scene")
}

/// Wedge of two rectangular faces sharing the straight edge `a–b`, with
/// the given interior angle. The derived edge is element `e0`.
pub fn wedge_scene(a: Point3, b: Point3, bisector_hint: Vec3, interior: f64, width: f64) -> Scene {
    let axis = (b - a).normalize();
    let w = (bisector_hint - axis * bisector_hint.dot(&axis)).normalize();
    let rot = |v: Vec3, ang: f64| v * ang.cos() + axis.cross(&v) * ang.sin();
    let mut facets = Vec::new();
    for (id, ang) in [(0, interior / 2.0), (1, -interior / 2.0)] {
        let d = rot(w, ang);
        let mut verts = vec![a, b, b + d * width, a + d * width];
        // Outward normals point away from the interior bisector.
        if axis.cross(&d).dot(&w) > 0.0 {
            verts.reverse();
        }
        facets.push(Facet::planar(id, verts).expect("wedge face"));
    }
    Scene::new(facets, vec![]).expect("wedge scene")
}

/// Random straight wedge with its edge inside `[-4, 4]³`.
pub fn random_wedge(rng: &mut impl Rng) -> Scene {
    loop {
        let a = point_in(rng, 4.0);
        let b = point_in(rng, 4.0);
        if (b - a).norm() < 2.0 {
            continue;
        }
        let interior = uniform(rng, 0.2 * PI, 0.9 * PI);
        return wedge_scene(a, b, unit(rng), interior, uniform(rng, 2.0, 5.0));
    }
}

/// All injective sequences of `0..n` of length `1..=max_len`.
pub fn injective_sequences(n: usize, max_len: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, max_len: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        if cur.len() == max_len {
            return;
        }
        for i in 0..n {
            if !cur.contains(&i) {
                cur.push(i);
                rec(n, max_len, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(n, max_len, &mut Vec::new(), &mut out);
    out
}

pub fn facets(ids: &[usize]) -> InteractionList {
    InteractionList::new(ids.iter().map(|&i| ElementId::Facet(i)).collect())
}

/// Angle between a ray and a surface normal, folded into `[0, π/2]`.
pub fn normal_angle(d: &Vec3, n: &Vec3) -> f64 {
    d.cross(n).norm().atan2(d.dot(n).abs())
}

/// Worst violation of the reflection and Keller-cone laws along a path:
/// `(max |θ_in − θ_out|, max |cos β_in − cos β_out|)`.
pub fn law_errors(scene: &Scene, path: &RayPath) -> (f64, f64) {
    let mut refl: f64 = 0.0;
    let mut cone: f64 = 0.0;
    for (k, &id) in path.candidate.elements().iter().enumerate() {
        let (p, x, q) = (path.points[k], path.points[k + 1], path.points[k + 2]);
        let i = (x - p).normalize();
        let r = (q - x).normalize();
        match id {
            ElementId::Facet(f) => {
                let n = scene.facet(f).normal_at(&x).expect("normal");
                refl = refl.max((normal_angle(&i, &n) - normal_angle(&r, &n)).abs());
            }
            ElementId::Edge(e) => {
                let t = scene.edge(e).direction_at(&x).expect("tangent");
                cone = cone.max((i.dot(&t) - r.dot(&t)).abs());
            }
        }
    }
    (refl, cone)
}

pub fn max_point_distance(a: &[Point3], b: &[Point3]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max)
}
