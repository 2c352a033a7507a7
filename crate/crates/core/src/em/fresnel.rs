//! Fresnel integrals and the UTD transition function.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

const EPS: f64 = 1e-16;
const MAX_ITERS: usize = 200;
/// Switch from the power series to the continued fraction.
const SERIES_LIMIT: f64 = 1.5;

/// `C(x) + i·S(x)` with `C = ∫₀ˣ cos(πt²/2) dt`, `S = ∫₀ˣ sin(πt²/2) dt`.
pub fn fresnel(x: f64) -> Complex64 {
    let ax = x.abs();
    let cs = if ax <= SERIES_LIMIT {
        series(ax)
    } else {
        let h = tail_factor(ax);
        let phase = Complex64::from_polar(1.0, FRAC_PI_2 * ax * ax);
        Complex64::new(0.5, 0.5) * (Complex64::new(1.0, 0.0) - phase * h)
    };
    if x < 0.0 {
        -cs
    } else {
        cs
    }
}

fn series(ax: f64) -> Complex64 {
    if ax < 1e-150 {
        return Complex64::new(ax, 0.0);
    }
    let fact = FRAC_PI_2 * ax * ax;
    let (mut sum_c, mut sum_s) = (ax, 0.0);
    let mut term = ax;
    let mut sign = 1.0;
    let mut odd = true;
    let mut n = 3.0;
    let mut sum = 0.0;
    for k in 1..=MAX_ITERS {
        term *= fact / k as f64;
        sum += sign * term / n;
        let test = sum.abs() * EPS;
        if odd {
            sign = -sign;
            sum_s = sum;
            sum = sum_c;
        } else {
            sum_c = sum;
            sum = sum_s;
        }
        if term < test {
            break;
        }
        odd = !odd;
        n += 2.0;
    }
    Complex64::new(sum_c, sum_s)
}

/// Continued-fraction factor `h` with
/// `C + iS = (1+i)/2 · (1 − e^{iπx²/2}·h)`.
fn tail_factor(ax: f64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let tiny = 1e-300;
    let mut b = Complex64::new(1.0, -PI * ax * ax);
    let mut cc = Complex64::new(1.0 / tiny, 0.0);
    let mut d = one / b;
    let mut h = d;
    let mut n = -1.0;
    for _ in 2..=MAX_ITERS {
        n += 2.0;
        let a = -n * (n + 1.0);
        b += Complex64::new(4.0, 0.0);
        d = one / (d * a + b);
        cc = b + Complex64::new(a, 0.0) / cc;
        let del = cc * d;
        h *= del;
        if (del.re - 1.0).abs() + del.im.abs() < EPS {
            break;
        }
    }
    Complex64::new(ax, -ax) * h
}

/// UTD transition function `F(X) = 2j√X·e^{jX}·∫_{√X}^∞ e^{−jτ²} dτ`
/// for `X ≥ 0`. Tends to 1 for large `X` and to 0 at `X = 0`.
pub fn transition(x: f64) -> Complex64 {
    let x = x.max(0.0);
    if x == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let j = Complex64::new(0.0, 1.0);
    let u = (2.0 * x / PI).sqrt();
    if u > SERIES_LIMIT {
        // The tail integral equals √(π/2)·(1−j)/2·e^{−jX}·conj(h).
        let h = tail_factor(u);
        Complex64::new(1.0, 1.0) * (PI * x / 2.0).sqrt() * h.conj()
    } else {
        let cs = series(u);
        let tail = Complex64::new(0.5 - cs.re, -(0.5 - cs.im));
        j * 2.0 * x.sqrt() * Complex64::from_polar(1.0, x) * (PI / 2.0).sqrt() * tail
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Composite Simpson quadrature of the Fresnel integrands.
    fn quad(x: f64) -> Complex64 {
        let n = 200_000;
        let h = x / n as f64;
        let f = |t: f64| Complex64::from_polar(1.0, FRAC_PI_2 * t * t);
        let mut s = f(0.0) + f(x);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += f(i as f64 * h) * w;
        }
        s * (h / 3.0)
    }

    #[test]
    fn fresnel_matches_quadrature() {
        for &x in &[0.1, 0.5, 1.0, 1.4, 1.6, 2.0, 3.5, 5.0] {
            let a = fresnel(x);
            let b = quad(x);
            assert!((a - b).norm() < 1e-9, "x={x}: {a} vs {b}");
        }
        assert!((fresnel(-1.0) + fresnel(1.0)).norm() < 1e-15);
    }

    #[test]
    fn fresnel_limits() {
        let far = fresnel(1e4);
        assert!((far - Complex64::new(0.5, 0.5)).norm() < 1e-4);
        assert_eq!(fresnel(0.0), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn transition_asymptotics() {
        // Large X: F ≈ 1 + j/(2X) − 3/(4X²).
        for &x in &[50.0, 200.0, 1e4] {
            let f = transition(x);
            let asym = Complex64::new(1.0 - 3.0 / (4.0 * x * x), 1.0 / (2.0 * x));
            assert!((f - asym).norm() < 5.0 / (x * x * x), "X={x}: {f}");
        }
        // Small X: F ≈ √(πX)·e^{jπ/4}, next correction of relative order √X.
        let x = 1e-8;
        let f = transition(x);
        let small = Complex64::from_polar((PI * x).sqrt(), PI / 4.0);
        assert!((f - small).norm() < 3.0 * x.sqrt() * small.norm());
    }

    #[test]
    fn transition_is_continuous_across_branches() {
        let x0 = PI / 2.0 * SERIES_LIMIT * SERIES_LIMIT;
        let a = transition(x0 * (1.0 - 1e-12));
        let b = transition(x0 * (1.0 + 1e-12));
        assert!((a - b).norm() < 1e-9);
    }
}
