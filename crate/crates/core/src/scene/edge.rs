use std::f64::consts::{PI, TAU};

use super::{Facet, Point3, SceneError, Vec3};

/// Supporting curve of an edge, parametrized over `t ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EdgeCurve {
    Segment {
        start: Point3,
        end: Point3,
    },
    /// `center + radius·(cos θ·u + sin θ·v)` with `θ = start_angle + sweep·t`;
    /// `u` and `v` orthonormal.
    Arc {
        center: Point3,
        radius: f64,
        axis_u: Vec3,
        axis_v: Vec3,
        start_angle: f64,
        sweep: f64,
    },
}

/// Local wedge frame of a straight edge between two facets.
///
/// Angles around the edge are measured from face 0 towards face n through
/// the exterior (non-material) region, which spans `[0, n·π]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wedge {
    /// In-plane direction from the edge into face 0, perpendicular to the edge.
    pub face0_dir: Vec3,
    /// Outward unit normal of face 0.
    pub face0_normal: Vec3,
    /// In-plane direction from the edge into face n.
    pub facen_dir: Vec3,
    /// Outward unit normal of face n.
    pub facen_normal: Vec3,
    /// Unit vector along the edge; rotating `face0_dir` positively about it
    /// sweeps the exterior.
    pub axis: Vec3,
    /// Exterior angle `n·π = 2π − interior`.
    pub exterior_angle: f64,
}

impl Wedge {
    /// Builds the wedge frame from the two parent facets of a straight edge.
    /// Returns the frame and the interior (material) angle.
    pub fn from_faces(
        start: &Point3,
        end: &Point3,
        face0: &Facet,
        facen: &Facet,
    ) -> Option<(Self, f64)> {
        let e = (end - start).normalize();
        let mid = Point3::from((start.coords + end.coords) * 0.5);
        let into = |f: &Facet| -> Option<Vec3> {
            let mut t = f.plane_normal().cross(&e);
            let len = t.norm();
            if len < 1e-12 {
                return None;
            }
            t /= len;
            let towards = f.centroid() - mid;
            if t.dot(&towards) < 0.0 {
                t = -t;
            }
            Some(t)
        };
        let t0 = into(face0)?;
        let tn = into(facen)?;
        let n0 = face0.plane_normal();
        let opening = t0.dot(&tn).clamp(-1.0, 1.0).acos();
        // Face n bending behind face 0 means the material sits between them.
        let interior = if tn.dot(&n0) < 0.0 { opening } else { TAU - opening };
        let axis = t0.cross(&n0).normalize();
        Some((
            Self {
                face0_dir: t0,
                face0_normal: n0,
                facen_dir: tn,
                facen_normal: facen.plane_normal(),
                axis,
                exterior_angle: TAU - interior,
            },
            interior,
        ))
    }

    /// Wedge parameter `n` (exterior angle over π).
    pub fn n(&self) -> f64 {
        self.exterior_angle / PI
    }

    /// Angle of `d` around the edge, measured from face 0, in `[0, 2π)`.
    pub fn angle_of(&self, d: &Vec3) -> f64 {
        let perp = d - self.axis * self.axis.dot(d);
        let y = self.axis.cross(&self.face0_dir).dot(&perp);
        let x = self.face0_dir.dot(&perp);
        let a = y.atan2(x);
        if a < 0.0 {
            a + TAU
        } else {
            a
        }
    }

    /// Angle of `d` folded into `[0, n·π]` when `d` points into the
    /// exterior (within `tol` radians), `None` when it points into the
    /// material.
    pub fn exterior_angle_of(&self, d: &Vec3, tol: f64) -> Option<f64> {
        let a = self.angle_of(d);
        if a <= self.exterior_angle + tol {
            Some(a.min(self.exterior_angle))
        } else if a >= TAU - tol {
            Some(0.0)
        } else {
            None
        }
    }
}

/// An edge: a straight segment or circular arc shared by two facets.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub id: usize,
    pub curve: EdgeCurve,
    pub parents: (usize, usize),
    /// Wedge angle between the parent facets, through the material.
    pub interior_angle: f64,
    pub wedge: Option<Wedge>,
}

impl Edge {
    pub fn new(
        id: usize,
        curve: EdgeCurve,
        parents: (usize, usize),
        interior_angle: f64,
    ) -> Result<Self, SceneError> {
        match curve {
            EdgeCurve::Segment { start, end } => {
                if (end - start).norm() <= 1e-9 {
                    return Err(SceneError::DegenerateEdge { id });
                }
            }
            EdgeCurve::Arc { radius, sweep, .. } => {
                if radius * sweep.abs() <= 1e-9 {
                    return Err(SceneError::DegenerateEdge { id });
                }
            }
        }
        if !(interior_angle > 0.0 && interior_angle < TAU) {
            return Err(SceneError::InvalidInteriorAngle {
                id,
                angle: interior_angle,
            });
        }
        Ok(Self {
            id,
            curve,
            parents,
            interior_angle,
            wedge: None,
        })
    }

    pub fn segment(id: usize, start: Point3, end: Point3, parents: (usize, usize)) -> Result<Self, SceneError> {
        Self::new(id, EdgeCurve::Segment { start, end }, parents, PI / 2.0)
    }

    pub fn is_straight(&self) -> bool {
        matches!(self.curve, EdgeCurve::Segment { .. })
    }

    pub fn endpoints(&self) -> (Point3, Point3) {
        (self.param_to_point(0.0), self.param_to_point(1.0))
    }

    pub fn length(&self) -> f64 {
        match self.curve {
            EdgeCurve::Segment { start, end } => (end - start).norm(),
            EdgeCurve::Arc { radius, sweep, .. } => radius * sweep.abs(),
        }
    }

    /// Diagonal of the edge's axis-aligned bounding box.
    pub fn char_len(&self) -> f64 {
        match self.curve {
            EdgeCurve::Segment { start, end } => (end - start).norm(),
            EdgeCurve::Arc { .. } => {
                let pts: Vec<Point3> = (0..=64).map(|i| self.param_to_point(i as f64 / 64.0)).collect();
                let (lo, hi) = super::facet::bounds(&pts);
                (hi - lo).norm()
            }
        }
    }

    /// Point on the supporting curve. Straight edges extrapolate linearly,
    /// arcs continue around the full circle.
    pub fn param_to_point(&self, t: f64) -> Point3 {
        match self.curve {
            EdgeCurve::Segment { start, end } => start + (end - start) * t,
            EdgeCurve::Arc {
                center,
                radius,
                axis_u,
                axis_v,
                start_angle,
                sweep,
            } => {
                let th = start_angle + sweep * t;
                center + (axis_u * th.cos() + axis_v * th.sin()) * radius
            }
        }
    }

    /// Parameter of the curve point nearest `p` (unclamped).
    pub fn nearest_param(&self, p: &Point3) -> f64 {
        match self.curve {
            EdgeCurve::Segment { start, end } => {
                let d = end - start;
                (p - start).dot(&d) / d.norm_squared()
            }
            EdgeCurve::Arc {
                center,
                axis_u,
                axis_v,
                start_angle,
                sweep,
                ..
            } => {
                let r = p - center;
                let th = r.dot(&axis_v).atan2(r.dot(&axis_u));
                // Choose the angle representative closest to the arc's span.
                let mid = start_angle + 0.5 * sweep;
                let th = th + TAU * ((mid - th) / TAU).round();
                (th - start_angle) / sweep
            }
        }
    }

    /// Unit tangent `r'(t)/‖r'(t)‖` at the parameter nearest `p`.
    pub fn direction_at(&self, p: &Point3) -> Result<Vec3, SceneError> {
        let d = match self.curve {
            EdgeCurve::Segment { start, end } => end - start,
            EdgeCurve::Arc {
                radius,
                axis_u,
                axis_v,
                start_angle,
                sweep,
                ..
            } => {
                let th = start_angle + sweep * self.nearest_param(p);
                (-axis_u * th.sin() + axis_v * th.cos()) * (radius * sweep)
            }
        };
        let len = d.norm();
        if len < 1e-12 {
            return Err(SceneError::DegenerateTangent { id: self.id });
        }
        Ok(d / len)
    }

    /// Distance from `p` to the supporting line or circle.
    pub fn implicit(&self, p: &Point3) -> f64 {
        match self.curve {
            EdgeCurve::Segment { start, end } => {
                let e = (end - start).normalize();
                (p - start).cross(&e).norm()
            }
            EdgeCurve::Arc {
                center,
                radius,
                axis_u,
                axis_v,
                ..
            } => {
                let r = p - center;
                let w = axis_u.cross(&axis_v);
                let h = r.dot(&w);
                let rho = (r - w * h).norm();
                (h * h + (rho - radius).powi(2)).sqrt()
            }
        }
    }

    /// Two smooth coordinates of `p` transverse to the supporting curve,
    /// both zero exactly on it. Their norm equals [`Edge::implicit`].
    pub fn transverse_offsets(&self, p: &Point3) -> [f64; 2] {
        match self.curve {
            EdgeCurve::Segment { start, end } => {
                let e = (end - start).normalize();
                let helper = if e.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
                let u = e.cross(&helper).normalize();
                let v = e.cross(&u);
                let r = p - start;
                [r.dot(&u), r.dot(&v)]
            }
            EdgeCurve::Arc {
                center,
                radius,
                axis_u,
                axis_v,
                ..
            } => {
                let r = p - center;
                let w = axis_u.cross(&axis_v);
                let h = r.dot(&w);
                [h, (r - w * h).norm() - radius]
            }
        }
    }

    /// True when `p` lies within `tol` of the bounded edge.
    pub fn contains(&self, p: &Point3, tol: f64) -> bool {
        let t = self.nearest_param(p);
        let slack = tol / self.length();
        self.implicit(p) <= tol && t >= -slack && t <= 1.0 + slack
    }
}
