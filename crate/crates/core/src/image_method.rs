//! Exact reflection paths on planar facets by successive mirror images.

use thiserror::Error;

use crate::mpt;
use crate::scene::{ElementId, Point3, Scene, Vec3};
use crate::validation::RayPath;
use crate::visibility::InteractionList;

/// Denominators smaller than this mean the ray runs parallel to a mirror.
const PARALLEL_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ImageError {
    #[error("image method cannot handle diffraction (element {0})")]
    Diffraction(ElementId),
    #[error("image method requires planar facets (facet {0} is curved)")]
    NonPlanar(usize),
    #[error("ray parallel to mirror {index} of the chain")]
    Parallel { index: usize },
}

/// A mirror plane: unit normal and a point on it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plane {
    pub normal: Vec3,
    pub point: Point3,
}

/// Successive images of the BS, `images[0]` being the BS itself.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageChain {
    pub images: Vec<Point3>,
    pub planes: Vec<Plane>,
}

pub fn mirror_point(p: &Point3, plane: &Plane) -> Point3 {
    p - plane.normal * (2.0 * (p - plane.point).dot(&plane.normal))
}

impl ImageChain {
    /// Forward pass: mirror the source across each plane in turn.
    pub fn new(source: Point3, planes: Vec<Plane>) -> Self {
        let mut images = Vec::with_capacity(planes.len() + 1);
        images.push(source);
        for plane in &planes {
            let last = *images.last().expect("non-empty");
            images.push(mirror_point(&last, plane));
        }
        Self { images, planes }
    }
}

/// Backward pass: intersects the line from each image towards the next
/// point with its plane, last to first. Returns `X₁..X_{n_r}`.
pub fn backward_intersections(chain: &ImageChain, ue: &Point3) -> Result<Vec<Point3>, ImageError> {
    let n = chain.planes.len();
    let mut out = vec![Point3::origin(); n];
    let mut next = *ue;
    for k in (0..n).rev() {
        let plane = &chain.planes[k];
        let image = &chain.images[k + 1];
        let d = next - image;
        let den = d.dot(&plane.normal);
        if den.abs() <= PARALLEL_TOL {
            return Err(ImageError::Parallel { index: k });
        }
        let x = next + d * ((plane.point - next).dot(&plane.normal) / den);
        out[k] = x;
        next = x;
    }
    Ok(out)
}

/// Image chain for a reflection-only candidate on planar facets.
pub fn chain_for(scene: &Scene, bs: &Point3, candidate: &InteractionList) -> Result<ImageChain, ImageError> {
    let mut planes = Vec::with_capacity(candidate.len());
    for &id in candidate.elements() {
        match id {
            ElementId::Edge(_) => return Err(ImageError::Diffraction(id)),
            ElementId::Facet(i) => {
                let f = scene.facet(i);
                if !f.is_planar() {
                    return Err(ImageError::NonPlanar(i));
                }
                planes.push(Plane {
                    normal: f.plane_normal(),
                    point: f.plane_point(),
                });
            }
        }
    }
    Ok(ImageChain::new(*bs, planes))
}

/// Solves a reflection-only candidate. The returned path carries the
/// parametric-free residual cost of its points but is not yet validated.
pub fn trace_image_path(
    scene: &Scene,
    bs: &Point3,
    ue: &Point3,
    candidate: &InteractionList,
) -> Result<RayPath, ImageError> {
    let chain = chain_for(scene, bs, candidate)?;
    let xs = backward_intersections(&chain, ue)?;
    let mut points = Vec::with_capacity(xs.len() + 2);
    points.push(*bs);
    points.extend(xs);
    points.push(*ue);
    let cost = mpt::path_cost(scene, candidate, &points);
    Ok(RayPath::new(points, candidate.clone(), cost))
}
