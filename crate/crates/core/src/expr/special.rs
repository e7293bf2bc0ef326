//! Error function on the complex plane.

use num_complex::Complex64;
use std::f64::consts::PI;

const TWO_OVER_SQRT_PI: f64 = 1.128_379_167_095_512_6;

/// `erf(z)` for complex `z`.
///
/// Maclaurin series for `|z| <= 3`; otherwise the continued fraction for
/// `erfc` in the right half plane (reflected for `re z < 0`). The continued
/// fraction converges poorly near the imaginary axis, where the series is
/// used instead.
pub fn erf(z: Complex64) -> Complex64 {
    if z.re < 0.0 {
        return -erf(-z);
    }
    if z.norm() <= 3.0 || z.re < 0.5 * z.im.abs() {
        return series(z);
    }
    match erfc_continued_fraction(z) {
        Some(c) => Complex64::new(1.0, 0.0) - c,
        None => series(z),
    }
}

pub fn erf_real(x: f64) -> f64 {
    erf(Complex64::new(x, 0.0)).re
}

fn series(z: Complex64) -> Complex64 {
    // erf z = 2/sqrt(pi) * sum_n (-1)^n z^(2n+1) / (n! (2n+1))
    let z2 = z * z;
    let mut term = z;
    let mut sum = z;
    for n in 1..400 {
        term = -term * z2 / n as f64;
        let add = term / (2 * n + 1) as f64;
        sum += add;
        if add.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    sum * TWO_OVER_SQRT_PI
}

/// Modified Lentz evaluation of
/// `erfc z = exp(-z^2)/sqrt(pi) * 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + ...))))`.
fn erfc_continued_fraction(z: Complex64) -> Option<Complex64> {
    let tiny = 1e-300;
    let mut f = z;
    if f.norm() < tiny {
        f = Complex64::new(tiny, 0.0);
    }
    let mut c = f;
    let mut d = Complex64::new(0.0, 0.0);
    for n in 1..2000 {
        let a = n as f64 / 2.0;
        d = z + d * a;
        if d.norm() < tiny {
            d = Complex64::new(tiny, 0.0);
        }
        c = z + c.inv() * a;
        if c.norm() < tiny {
            c = Complex64::new(tiny, 0.0);
        }
        d = d.inv();
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).norm() < 1e-16 {
            return Some((-z * z).exp() / (PI.sqrt() * f));
        }
    }
    None
}
