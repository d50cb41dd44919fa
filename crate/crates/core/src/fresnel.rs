//! Fresnel integrals `C(x) = ∫₀ˣ cos(πt²/2) dt` and `S(x) = ∫₀ˣ sin(πt²/2) dt`.
//!
//! Power series below `SERIES_LIMIT`, modified-Lentz continued fraction for the
//! complementary error function above it. Both branches reach ~1e-15 absolute.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{invalid, Result};

const SERIES_LIMIT: f64 = 1.5;
const EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;
const MAX_ITER: usize = 200;

/// Values of the two Fresnel integrals at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FresnelPair {
    pub c: f64,
    pub s: f64,
}

pub fn fresnel(x: f64) -> Result<FresnelPair> {
    if !x.is_finite() {
        return Err(invalid("fresnel argument", format!("must be finite, got {x}")));
    }
    let ax = x.abs();
    let (c, s) = if ax < 1e-150 {
        (ax, 0.0)
    } else if ax <= SERIES_LIMIT {
        series(ax)
    } else {
        continued_fraction(ax)
    };
    let sign = if x < 0.0 { -1.0 } else { 1.0 };
    Ok(FresnelPair { c: sign * c, s: sign * s })
}

// Alternating series; odd powers feed S, even powers feed C.
fn series(ax: f64) -> (f64, f64) {
    let fact = FRAC_PI_2 * ax * ax;
    let mut sum_c = ax;
    let mut sum_s = 0.0;
    let mut term = ax;
    let mut sign = 1.0;
    let mut odd = true;
    let mut n = 3.0;
    let mut sum = 0.0;
    for k in 1..MAX_ITER {
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
    (sum_c, sum_s)
}

fn continued_fraction(ax: f64) -> (f64, f64) {
    let pix2 = PI * ax * ax;
    let mut b = Complex64::new(1.0, -pix2);
    let mut cc = Complex64::new(1.0 / TINY, 0.0);
    let mut d = b.inv();
    let mut h = d;
    let mut n = -1.0;
    for _ in 1..MAX_ITER {
        n += 2.0;
        let a = -n * (n + 1.0);
        b += 4.0;
        d = (a * d + b).inv();
        cc = b + a / cc;
        let del = cc * d;
        h *= del;
        if (del.re - 1.0).abs() + del.im.abs() < EPS {
            break;
        }
    }
    h *= Complex64::new(ax, -ax);
    let cs = Complex64::new(0.5, 0.5) * (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, 0.5 * pix2) * h);
    (cs.re, cs.im)
}
