//! GO/UTD field evaluation along validated paths.
//!
//! Fields are complex 3-vectors (phasors, `e^{+jωt}` convention). A path's
//! field starts as the transmitter field at the first interaction point and
//! is carried through each interaction by its dyadic coefficient, a
//! spreading factor and the phase of the next segment.

pub mod fresnel;
pub mod utd;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use thiserror::Error;

use crate::scene::{ElementId, Point3, Scene, Vec3};
use crate::validation::{PathStatus, RayPath};
use crate::visibility::InteractionKind;

pub use utd::{diffraction_dyadic, wedge_coefficients, Transition, WedgeCoefficients};

pub type CVec3 = Vector3<Complex64>;

/// Speed of light in vacuum, m/s.
pub const C0: f64 = 299_792_458.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EmError {
    #[error("field point coincides with the transmitter")]
    ZeroDistance,
    #[error("grazing incidence on a reflecting facet")]
    GrazingReflection,
    #[error("observation direction lies on a shadow or reflection boundary")]
    ShadowBoundary,
    #[error("edge {edge} has no wedge frame")]
    NoWedge { edge: usize },
    #[error("ray nearly parallel to edge {edge}")]
    SkewDegenerate { edge: usize },
    #[error("ray enters the material of edge {edge}")]
    InsideWedge { edge: usize },
    #[error("path is not valid ({0:?})")]
    NotValid(PathStatus),
    #[error("invalid radio configuration: {0}")]
    Config(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioConfig {
    /// Carrier frequency, Hz.
    pub frequency: f64,
    /// Field times distance at 1 m, V.
    pub e0: f64,
    /// Polar axis of the transmit antenna; the field is along θ̂ about it.
    pub polarization: Vec3,
    pub transition: Transition,
}

impl Default for RadioConfig {
    fn default() -> Self {
        Self {
            frequency: 1e9,
            e0: 1.0,
            polarization: Vec3::z(),
            transition: Transition::Uniform,
        }
    }
}

impl RadioConfig {
    pub fn wavenumber(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.frequency / C0
    }

    pub fn validate(&self) -> Result<(), EmError> {
        if !(self.frequency > 0.0 && self.frequency.is_finite()) {
            return Err(EmError::Config("frequency must be positive"));
        }
        if !(self.e0 > 0.0 && self.e0.is_finite()) {
            return Err(EmError::Config("e0 must be positive"));
        }
        if !(self.polarization.norm() > 0.0 && self.polarization.iter().all(|c| c.is_finite())) {
            return Err(EmError::Config("polarization axis must be a nonzero vector"));
        }
        Ok(())
    }
}

pub(crate) fn outer(a: &Vec3, b: &Vec3) -> Matrix3<Complex64> {
    (a * b.transpose()).map(|v| Complex64::new(v, 0.0))
}

fn cscale(v: &CVec3, s: Complex64) -> CVec3 {
    v.map(|c| c * s)
}

/// θ̂ about `axis` for unit direction `d`; any unit normal to `d` on the axis.
pub fn theta_hat(d: &Vec3, axis: &Vec3) -> Vec3 {
    let a = axis.normalize();
    let t = d * d.dot(&a) - a;
    if t.norm() > 1e-12 {
        t.normalize()
    } else {
        let helper = if d.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
        d.cross(&helper).normalize()
    }
}

/// Field of the isotropic transmitter at `p`.
pub fn tx_field(cfg: &RadioConfig, p: &Point3, bs: &Point3) -> Result<CVec3, EmError> {
    let d = p - bs;
    let r = d.norm();
    if r == 0.0 {
        return Err(EmError::ZeroDistance);
    }
    let amp = Complex64::from_polar(cfg.e0 / r, -cfg.wavenumber() * r);
    let th = theta_hat(&(d / r), &cfg.polarization);
    Ok(th.map(|c| amp * c))
}

/// PEC reflection dyadic for unit incident direction `s_in` on a surface
/// with unit normal `n`. Soft (perpendicular) coefficient −1, hard +1.
pub fn reflection_dyadic(s_in: &Vec3, n: &Vec3) -> Result<Matrix3<Complex64>, EmError> {
    let cos = s_in.dot(n);
    if cos.abs() <= 1e-9 {
        return Err(EmError::GrazingReflection);
    }
    let s_out = s_in - n * (2.0 * cos);
    let perp = s_in.cross(n);
    let e_perp = if perp.norm() > 1e-12 {
        perp.normalize()
    } else {
        let helper = if n.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
        n.cross(&helper).normalize()
    };
    let par_in = e_perp.cross(s_in);
    let par_out = e_perp.cross(&s_out);
    Ok(outer(&e_perp, &e_perp) * Complex64::new(-1.0, 0.0) + outer(&par_out, &par_in))
}

/// Field carried by one path to the receiver.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldContribution {
    pub path: RayPath,
    pub e_field: CVec3,
    pub magnitude_db_rel_los: f64,
    /// Transition-function values evaluated along the path.
    pub transitions: Vec<Complex64>,
}

/// Free-space field magnitude at the BS–UE distance.
pub fn los_reference(cfg: &RadioConfig, bs: &Point3, ue: &Point3) -> f64 {
    cfg.e0 / (ue - bs).norm()
}

pub fn norm(e: &CVec3) -> f64 {
    e.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

pub fn db_rel(e: &CVec3, reference: f64) -> f64 {
    20.0 * (norm(e) / reference).log10()
}

/// Propagates the transmitter field along a valid path.
pub fn propagate_path(scene: &Scene, path: &RayPath, cfg: &RadioConfig) -> Result<FieldContribution, EmError> {
    if path.status != PathStatus::Valid {
        return Err(EmError::NotValid(path.status));
    }
    let k = cfg.wavenumber();
    let pts = &path.points;
    let bs = pts[0];
    let ue = *pts.last().expect("path has endpoints");
    // Propagate a unit-amplitude field so relative levels do not depend on e0.
    let unit = RadioConfig { e0: 1.0, ..*cfg };
    let mut e = tx_field(&unit, &pts[1], &bs)?;
    let mut rho = (pts[1] - bs).norm();
    let mut transitions = Vec::new();

    for (idx, &id) in path.candidate.elements().iter().enumerate() {
        let x = pts[idx + 1];
        let next = pts[idx + 2];
        let s_in = (x - pts[idx]).normalize();
        let seg = next - x;
        let s = seg.norm();
        let s_out = seg / s;
        let phase = Complex64::from_polar(1.0, -k * s);
        match (InteractionKind::of(id), id) {
            (InteractionKind::Reflection, ElementId::Facet(f)) => {
                let n = scene.facet(f).normal_at(&x).map_err(|_| EmError::GrazingReflection)?;
                let r = reflection_dyadic(&s_in, &n)?;
                e = cscale(&(r * e), phase * (rho / (rho + s)));
                rho += s;
            }
            (_, ElementId::Edge(ed)) => {
                let (d, coeffs) = diffraction_dyadic(&s_in, &s_out, scene.edge(ed), k, rho, s, cfg.transition)?;
                transitions.extend_from_slice(&coeffs.transitions);
                e = cscale(&(d * e), phase * (rho / (s * (rho + s))).sqrt());
                rho = s;
            }
            _ => unreachable!("kind follows element"),
        }
    }

    let reference = los_reference(&unit, &bs, &ue);
    Ok(FieldContribution {
        magnitude_db_rel_los: db_rel(&e, reference),
        e_field: e.map(|c| c * cfg.e0),
        path: path.clone(),
        transitions,
    })
}

/// Neumaier-compensated complex vector sum.
pub fn compensated_sum<'a>(fields: impl IntoIterator<Item = &'a CVec3>) -> CVec3 {
    let mut acc = [(0.0f64, 0.0f64); 6];
    for f in fields {
        for (i, c) in f.iter().enumerate() {
            for (slot, v) in [(2 * i, c.re), (2 * i + 1, c.im)] {
                let (sum, comp) = &mut acc[slot];
                let t = *sum + v;
                if sum.abs() >= v.abs() {
                    *comp += (*sum - t) + v;
                } else {
                    *comp += (v - t) + *sum;
                }
                *sum = t;
            }
        }
    }
    CVec3::from_fn(|i, _| Complex64::new(acc[2 * i].0 + acc[2 * i].1, acc[2 * i + 1].0 + acc[2 * i + 1].1))
}

/// One row of the per-class summary.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassRow {
    pub class: String,
    pub n_paths: usize,
    pub e_over_elos_db: f64,
}

/// `LOS` then every R/D string of length `1..=max_interactions`, by length
/// and then alphabetically with R before D.
pub fn class_labels(max_interactions: usize) -> Vec<String> {
    let mut out = vec!["LOS".to_string()];
    let mut layer = vec![String::new()];
    for _ in 0..max_interactions {
        layer = layer
            .iter()
            .flat_map(|p| [format!("{p}R"), format!("{p}D")])
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// Coherent total field and per-class table. Classes without paths report
/// `-inf` dB.
pub fn total_field(contributions: &[FieldContribution], max_interactions: usize, reference: f64) -> (CVec3, Vec<ClassRow>) {
    let total = compensated_sum(contributions.iter().map(|c| &c.e_field));
    let rows = class_labels(max_interactions)
        .into_iter()
        .map(|class| {
            let members: Vec<&CVec3> = contributions
                .iter()
                .filter(|c| c.path.candidate.class() == class)
                .map(|c| &c.e_field)
                .collect();
            let n_paths = members.len();
            let e_over_elos_db = if n_paths == 0 {
                f64::NEG_INFINITY
            } else {
                db_rel(&compensated_sum(members), reference)
            };
            ClassRow {
                class,
                n_paths,
                e_over_elos_db,
            }
        })
        .collect();
    (total, rows)
}
