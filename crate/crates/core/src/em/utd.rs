//! Kouyoumjian–Pathak wedge diffraction for perfectly conducting wedges.

use std::f64::consts::{PI, TAU};

use nalgebra::Matrix3;
use num_complex::Complex64;

use super::{fresnel, outer, EmError};
use crate::scene::{Edge, Vec3};

/// Incidence within this angle of a wedge face counts as grazing.
const GRAZING_ANGLE: f64 = 1e-9;
/// Directions this far outside the exterior sector are rejected.
const SECTOR_TOL: f64 = 1e-9;

/// How the transition function is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Transition {
    #[default]
    Uniform,
    /// `F ≡ 1`: the non-uniform (Keller) limit.
    Unity,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WedgeCoefficients {
    pub soft: Complex64,
    pub hard: Complex64,
    /// Transition-function values of the four cotangent terms, in the
    /// order `(φ−φ′)⁺, (φ−φ′)⁻, (φ+φ′)⁺, (φ+φ′)⁻`.
    pub transitions: [Complex64; 4],
}

/// `a±(β) = 2cos²((2nπN± − β)/2)`.
fn a_pm(n: f64, beta: f64, plus: bool) -> f64 {
    let sign = if plus { 1.0 } else { -1.0 };
    let big_n = ((beta + sign * PI) / (TAU * n)).round();
    2.0 * ((2.0 * n * PI * big_n - beta) / 2.0).cos().powi(2)
}

/// Soft and hard wedge coefficients.
///
/// `n` is the exterior angle over π, `phi`/`phi_p` the observation and
/// source angles measured from face 0, `beta0` the skew angle, `k` the
/// wavenumber and `l` the distance parameter.
pub fn wedge_coefficients(
    n: f64,
    phi: f64,
    phi_p: f64,
    beta0: f64,
    k: f64,
    l: f64,
    mode: Transition,
) -> Result<WedgeCoefficients, EmError> {
    let sin_b0 = beta0.sin();
    let prefactor = -Complex64::from_polar(1.0, -PI / 4.0) / (2.0 * n * (TAU * k).sqrt() * sin_b0);

    let mut terms = [Complex64::new(0.0, 0.0); 4];
    let mut transitions = [Complex64::new(1.0, 0.0); 4];
    let betas = [phi - phi_p, phi - phi_p, phi + phi_p, phi + phi_p];
    for (idx, &beta) in betas.iter().enumerate() {
        let plus = idx % 2 == 0;
        let arg = if plus { (PI + beta) / (2.0 * n) } else { (PI - beta) / (2.0 * n) };
        let s = arg.sin();
        if s.abs() < 1e-12 {
            return Err(EmError::ShadowBoundary);
        }
        let cot = arg.cos() / s;
        let f = match mode {
            Transition::Uniform => fresnel::transition(k * l * a_pm(n, beta, plus)),
            Transition::Unity => Complex64::new(1.0, 0.0),
        };
        transitions[idx] = f;
        terms[idx] = f * cot;
    }
    let incident = terms[0] + terms[1];
    let reflected = terms[2] + terms[3];
    let mut soft = prefactor * (incident - reflected);
    let mut hard = prefactor * (incident + reflected);
    // At grazing incidence the incident and face-reflected fields merge.
    if phi_p.abs() < GRAZING_ANGLE || (phi_p - n * PI).abs() < GRAZING_ANGLE {
        soft *= 0.5;
        hard *= 0.5;
    }
    Ok(WedgeCoefficients {
        soft,
        hard,
        transitions,
    })
}

/// Keller's non-uniform wedge coefficients, for reference.
pub fn keller_coefficients(n: f64, phi: f64, phi_p: f64, beta0: f64, k: f64) -> (Complex64, Complex64) {
    let pre = Complex64::from_polar(1.0, -PI / 4.0) * (PI / n).sin() / (n * (TAU * k).sqrt() * beta0.sin());
    let c = (PI / n).cos();
    let i = 1.0 / (c - ((phi - phi_p) / n).cos());
    let r = 1.0 / (c - ((phi + phi_p) / n).cos());
    (pre * (i - r), pre * (i + r))
}

/// Edge-fixed unit vectors: `(β̂₀′, φ̂′)` for the incident ray and
/// `(β̂₀, φ̂)` for the diffracted ray.
pub fn edge_fixed_basis(e: &Vec3, s_in: &Vec3, s_out: &Vec3) -> Option<[Vec3; 4]> {
    let a = e.cross(s_in);
    let b = e.cross(s_out);
    if a.norm() < 1e-12 || b.norm() < 1e-12 {
        return None;
    }
    let phi_p = -a / a.norm();
    let beta_p = phi_p.cross(s_in);
    let phi = b / b.norm();
    let beta = phi.cross(s_out);
    Some([beta_p, phi_p, beta, phi])
}

/// Diffraction at `edge` for a ray arriving along `s_in` and leaving along
/// `s_out` (both unit). `rho` is the distance from the (image) source to the
/// edge and `s` the distance from the edge to the next point.
#[allow(clippy::too_many_arguments)]
pub fn diffraction_dyadic(
    s_in: &Vec3,
    s_out: &Vec3,
    edge: &Edge,
    k: f64,
    rho: f64,
    s: f64,
    mode: Transition,
) -> Result<(Matrix3<Complex64>, WedgeCoefficients), EmError> {
    let wedge = edge.wedge.ok_or(EmError::NoWedge { edge: edge.id })?;
    let e = wedge.axis;
    let cos_b0 = s_in.dot(&e).clamp(-1.0, 1.0);
    let beta0 = cos_b0.acos();
    if beta0 < 1e-6 || PI - beta0 < 1e-6 {
        return Err(EmError::SkewDegenerate { edge: edge.id });
    }
    let phi_p = wedge.exterior_angle_of(&-s_in, SECTOR_TOL).ok_or(EmError::InsideWedge { edge: edge.id })?;
    let phi = wedge.exterior_angle_of(s_out, SECTOR_TOL).ok_or(EmError::InsideWedge { edge: edge.id })?;
    let l = rho * s * beta0.sin().powi(2) / (rho + s);
    let coeffs = wedge_coefficients(wedge.n(), phi, phi_p, beta0, k, l, mode)?;
    let [beta_p, phi_hat_p, beta_hat, phi_hat] =
        edge_fixed_basis(&e, s_in, s_out).ok_or(EmError::SkewDegenerate { edge: edge.id })?;
    let dyad = outer(&beta_hat, &beta_p) * (-coeffs.soft) + outer(&phi_hat, &phi_hat_p) * (-coeffs.hard);
    Ok((dyad, coeffs))
}
