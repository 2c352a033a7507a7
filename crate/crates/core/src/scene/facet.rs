use serde::{Deserialize, Serialize};

use super::{Point3, SceneError, Vec3, CONSTRUCTION_TOL};

/// Surface material. Only perfect electric conductors are modeled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Material {
    #[default]
    #[serde(rename = "PEC")]
    Pec,
}

/// General quadric `a x² + b y² + c z² + d xy + e yz + f xz + g x + h y + i z + j = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadric {
    pub coeffs: [f64; 10],
}

impl Quadric {
    pub fn new(coeffs: [f64; 10]) -> Self {
        Self { coeffs }
    }

    pub fn value(&self, p: &Point3) -> f64 {
        let [a, b, c, d, e, f, g, h, i, j] = self.coeffs;
        let (x, y, z) = (p.x, p.y, p.z);
        a * x * x + b * y * y + c * z * z + d * x * y + e * y * z + f * x * z + g * x + h * y + i * z + j
    }

    pub fn gradient(&self, p: &Point3) -> Vec3 {
        let [a, b, c, d, e, f, g, h, i, _] = self.coeffs;
        let (x, y, z) = (p.x, p.y, p.z);
        Vec3::new(
            2.0 * a * x + d * y + f * z + g,
            2.0 * b * y + d * x + e * z + h,
            2.0 * c * z + e * y + f * x + i,
        )
    }

    fn quadratic_form(&self, w: &Vec3) -> f64 {
        let [a, b, c, d, e, f, ..] = self.coeffs;
        a * w.x * w.x + b * w.y * w.y + c * w.z * w.z + d * w.x * w.y + e * w.y * w.z + f * w.x * w.z
    }

    /// Coefficients `(A, B, C)` of `q(origin + λ·dir) = Aλ² + Bλ + C`.
    pub fn along_line(&self, origin: &Point3, dir: &Vec3) -> (f64, f64, f64) {
        (
            self.quadratic_form(dir),
            self.gradient(origin).dot(dir),
            self.value(origin),
        )
    }
}

/// Supporting surface of a facet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Surface {
    Plane,
    Quadric(Quadric),
}

/// A bounded convex facet.
///
/// For planar facets the polygon lies on the surface. For quadric facets the
/// polygon is a planar footprint whose vertices sit on the quadric; the facet
/// is the part of the quadric that projects (along the footprint normal)
/// inside the polygon.
#[derive(Debug, Clone, PartialEq)]
pub struct Facet {
    pub id: usize,
    pub vertices: Vec<Point3>,
    pub material: Material,
    pub surface: Surface,
    normal: Vec3,
    origin: Point3,
    axis_s: Vec3,
    axis_t: Vec3,
    inward: Vec<Vec3>,
    centroid: Point3,
    char_len: f64,
}

impl Facet {
    pub fn planar(id: usize, vertices: Vec<Point3>) -> Result<Self, SceneError> {
        Self::new(id, vertices, Material::Pec, Surface::Plane)
    }

    pub fn new(
        id: usize,
        vertices: Vec<Point3>,
        material: Material,
        surface: Surface,
    ) -> Result<Self, SceneError> {
        if vertices.len() < 3 {
            return Err(SceneError::TooFewVertices { id });
        }
        if vertices.iter().any(|v| !v.coords.iter().all(|c| c.is_finite())) {
            return Err(SceneError::NonFinite);
        }

        // Newell's method: robust normal for (nearly) planar polygons.
        let mut newell = Vec3::zeros();
        for (i, a) in vertices.iter().enumerate() {
            let b = &vertices[(i + 1) % vertices.len()];
            newell.x += (a.y - b.y) * (a.z + b.z);
            newell.y += (a.z - b.z) * (a.x + b.x);
            newell.z += (a.x - b.x) * (a.y + b.y);
        }
        let area = 0.5 * newell.norm();
        if area < 1e-12 {
            return Err(SceneError::Degenerate { id, area });
        }
        let normal = newell / newell.norm();
        let origin = vertices[0];

        let deviation = vertices
            .iter()
            .map(|v| normal.dot(&(v - origin)).abs())
            .fold(0.0, f64::max);
        if deviation > CONSTRUCTION_TOL {
            return Err(SceneError::NonPlanar { id, deviation });
        }

        let n = vertices.len();
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let c = vertices[(i + 2) % n];
            let turn = (b - a).cross(&(c - b)).dot(&normal);
            let scale = (b - a).norm() * (c - b).norm();
            if turn < -CONSTRUCTION_TOL * scale.max(1.0) {
                return Err(SceneError::NonConvex { id });
            }
        }

        let inward = (0..n)
            .map(|i| {
                let side = vertices[(i + 1) % n] - vertices[i];
                let m = normal.cross(&side);
                let len = m.norm();
                if len > 0.0 {
                    m / len
                } else {
                    Vec3::zeros()
                }
            })
            .collect();

        let centroid = Point3::from(
            vertices.iter().fold(Vec3::zeros(), |acc, v| acc + v.coords) / n as f64,
        );

        let (lo, hi) = bounds(&vertices);
        let char_len = (hi - lo).norm();

        if let Surface::Quadric(q) = &surface {
            for v in &vertices {
                let g = q.gradient(v).norm();
                let deviation = if g > 0.0 { q.value(v).abs() / g } else { q.value(v).abs() };
                if deviation > CONSTRUCTION_TOL {
                    return Err(SceneError::OffSurface { id, deviation });
                }
            }
        }

        Ok(Self {
            id,
            axis_s: vertices[1] - origin,
            axis_t: vertices[n - 1] - origin,
            vertices,
            material,
            surface,
            normal,
            origin,
            inward,
            centroid,
            char_len,
        })
    }

    pub fn is_planar(&self) -> bool {
        matches!(self.surface, Surface::Plane)
    }

    /// Unit normal of the polygon plane, oriented by the vertex winding.
    pub fn plane_normal(&self) -> Vec3 {
        self.normal
    }

    /// A point on the polygon plane (the first vertex).
    pub fn plane_point(&self) -> Point3 {
        self.origin
    }

    pub fn centroid(&self) -> Point3 {
        self.centroid
    }

    /// Diagonal of the facet's axis-aligned bounding box.
    pub fn char_len(&self) -> f64 {
        self.char_len
    }

    /// Raw implicit function `f(p)`; zero on the supporting surface.
    pub fn implicit(&self, p: &Point3) -> f64 {
        match &self.surface {
            Surface::Plane => self.normal.dot(&(p - self.origin)),
            Surface::Quadric(q) => q.value(p),
        }
    }

    pub fn gradient(&self, p: &Point3) -> Vec3 {
        match &self.surface {
            Surface::Plane => self.normal,
            Surface::Quadric(q) => q.gradient(p),
        }
    }

    /// First-order distance `f / ‖∇f‖` to the supporting surface, in meters.
    pub fn implicit_distance(&self, p: &Point3) -> f64 {
        match &self.surface {
            Surface::Plane => self.implicit(p),
            Surface::Quadric(q) => {
                let g = q.gradient(p).norm();
                if g < 1e-12 {
                    q.value(p)
                } else {
                    q.value(p) / g
                }
            }
        }
    }

    /// `∇f / ‖∇f‖` at `p`.
    pub fn normal_at(&self, p: &Point3) -> Result<Vec3, SceneError> {
        let g = self.gradient(p);
        let len = g.norm();
        if len < 1e-12 {
            return Err(SceneError::SingularNormal {
                point: [p.x, p.y, p.z],
            });
        }
        Ok(g / len)
    }

    /// Affine map from `(s, t)` onto the polygon plane: first vertex plus
    /// `s·(v₁ − v₀) + t·(v_last − v₀)`. Defined for all real parameters.
    pub fn footprint_point(&self, s: f64, t: f64) -> Point3 {
        self.origin + self.axis_s * s + self.axis_t * t
    }

    /// Parametric map onto the supporting surface. Quadric facets lift the
    /// footprint point along the footprint normal to the nearest root; when
    /// the line misses the quadric the closest approach (in `|f|`) is used.
    pub fn param_to_point(&self, s: f64, t: f64) -> Point3 {
        let base = self.footprint_point(s, t);
        match &self.surface {
            Surface::Plane => base,
            Surface::Quadric(q) => base + self.normal * nearest_root(q, &base, &self.normal),
        }
    }

    /// Moves `p` along the footprint normal onto the supporting surface.
    pub fn lift(&self, p: &Point3) -> Point3 {
        let base = self.project_to_plane(p);
        match &self.surface {
            Surface::Plane => base,
            Surface::Quadric(q) => base + self.normal * nearest_root(q, &base, &self.normal),
        }
    }

    /// Orthogonal projection onto the polygon plane.
    pub fn project_to_plane(&self, p: &Point3) -> Point3 {
        p - self.normal * self.normal.dot(&(p - self.origin))
    }

    /// Half-plane test of the projection of `p` against the polygon, with
    /// every boundary pushed outwards by `tol`.
    pub fn footprint_contains(&self, p: &Point3, tol: f64) -> bool {
        let n = self.vertices.len();
        (0..n).all(|i| self.inward[i].dot(&(p - self.vertices[i])) >= -tol)
    }

    /// Smallest in-plane distance from the projection of `p` to the polygon
    /// boundary, negative outside.
    pub fn boundary_margin(&self, p: &Point3) -> f64 {
        let n = self.vertices.len();
        (0..n)
            .map(|i| self.inward[i].dot(&(p - self.vertices[i])))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, p: &Point3, tol: f64) -> bool {
        self.implicit_distance(p).abs() <= tol && self.footprint_contains(p, tol)
    }

    /// Inward in-plane normals of the polygon sides (side `i` runs from
    /// vertex `i` to vertex `i+1`).
    pub(crate) fn inward_normals(&self) -> &[Vec3] {
        &self.inward
    }
}

fn nearest_root(q: &Quadric, origin: &Point3, dir: &Vec3) -> f64 {
    let (a, b, c) = q.along_line(origin, dir);
    let scale = a.abs().max(b.abs()).max(c.abs());
    if scale == 0.0 {
        return 0.0;
    }
    if a.abs() <= 1e-14 * scale {
        return if b.abs() > 1e-14 * scale { -c / b } else { 0.0 };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return -b / (2.0 * a);
    }
    // Numerically stable pair of roots.
    let sq = disc.sqrt();
    let qq = -0.5 * (b + b.signum() * sq);
    let r1 = qq / a;
    let r2 = if qq != 0.0 { c / qq } else { r1 };
    if r1.abs() <= r2.abs() {
        r1
    } else {
        r2
    }
}

pub(crate) fn bounds(points: &[Point3]) -> (Point3, Point3) {
    let mut lo = Point3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
    let mut hi = Point3::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in points {
        for k in 0..3 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    (lo, hi)
}
