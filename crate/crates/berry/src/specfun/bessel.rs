//! Bessel functions of the first kind, orders 0..2, plus the fixed-argument
//! order sweep needed by the Bessel-series sampler.
//!
//! Evaluation strategy (absolute error <= 1e-10 on |u| <= 1e4, in practice
//! ~1e-13):
//!
//! * `|u| <= 12` — power series in f64. The largest term is ~e^12, so the
//!   cancellation floor sits near 4e-12.
//! * `12 < |u| <= 35` — the same series in double-double arithmetic. The
//!   cancellation floor of the 32-digit accumulator is ~1e-17 at u = 35.
//! * `|u| > 35` — Hankel asymptotic expansion with 12 correction terms; the
//!   first omitted term at u = 35 is below 1e-15 for orders 0..2.

use crate::{BerryError, Result};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

const SERIES_CUTOFF: f64 = 12.0;
const DD_CUTOFF: f64 = 35.0;

/// J_order(u) for order in {0, 1, 2}.
pub fn bessel_j(order: u32, u: f64) -> Result<f64> {
    if order > 2 {
        return Err(BerryError::invalid(format!(
            "bessel_j supports orders 0..2, got {order}"
        )));
    }
    if !u.is_finite() {
        return Err(BerryError::invalid(format!("non-finite argument {u}")));
    }
    // J_n(-u) = (-1)^n J_n(u)
    let sign = if u < 0.0 && order % 2 == 1 { -1.0 } else { 1.0 };
    let au = u.abs();
    let value = if au <= SERIES_CUTOFF {
        series_f64(order, au)
    } else if au <= DD_CUTOFF {
        series_dd(order, au)
    } else {
        hankel(order, au)
    };
    Ok(sign * value)
}

/// J0, J1, J2 at once; the kernel assembly needs all three.
pub fn bessel_j012(u: f64) -> Result<[f64; 3]> {
    Ok([bessel_j(0, u)?, bessel_j(1, u)?, bessel_j(2, u)?])
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn series_f64(n: u32, u: f64) -> f64 {
    let half = 0.5 * u;
    let x2 = half * half;
    let mut term = half.powi(n as i32) / factorial(n);
    let mut sum = term;
    for m in 1..200u32 {
        term *= -x2 / (m as f64 * (m + n) as f64);
        sum += term;
        if term.abs() < 1e-20 * sum.abs().max(1e-30) {
            break;
        }
    }
    sum
}

fn series_dd(n: u32, u: f64) -> f64 {
    let half = Dd::from(0.5 * u);
    let x2 = half.mul(half);
    let mut term = match n {
        0 => Dd::from(1.0),
        1 => half,
        _ => half.mul(half).div_f64(2.0),
    };
    let mut sum = term;
    for m in 1..300u32 {
        term = term.mul(x2).div_f64(-(m as f64) * (m + n) as f64);
        sum = sum.add(term);
        if term.hi.abs() < 1e-34 * sum.hi.abs().max(1e-30) {
            break;
        }
    }
    sum.hi + sum.lo
}

/// Hankel expansion J_n(u) ~ sqrt(2/(pi u)) (P cos(chi) - Q sin(chi)).
fn hankel(n: u32, u: f64) -> f64 {
    let mu = 4.0 * (n as f64) * (n as f64);
    let mut p = 1.0;
    let mut q = 0.0;
    let mut ak = 1.0;
    for k in 1..=12u32 {
        let odd = (2 * k - 1) as f64;
        ak *= (mu - odd * odd) / (k as f64 * 8.0 * u);
        match k % 4 {
            1 => q += ak,
            2 => p -= ak,
            3 => q -= ak,
            _ => p += ak,
        }
    }
    let chi = u - n as f64 * FRAC_PI_2 - FRAC_PI_4;
    (2.0 / (PI * u)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// J_0(u), ..., J_nmax(u) by Miller's downward recurrence, normalized with
/// J0 + 2 sum_k J_{2k} = 1. Used by the Bessel-series sampler, which needs
/// arbitrary orders at one argument.
pub(crate) fn bessel_j_sequence(nmax: usize, u: f64) -> Vec<f64> {
    let mut out = vec![0.0; nmax + 1];
    if u.abs() < 1e-300 {
        out[0] = 1.0;
        return out;
    }
    let au = u.abs();
    let start = {
        let base = (au.max(nmax as f64)).ceil() as usize;
        let pad = 40 + (au.cbrt() * 6.0) as usize;
        base + pad
    };
    let mut jp = 0.0_f64; // J_{m+1}
    let mut j = 1e-300_f64; // J_m (arbitrary scale)
    let mut norm = 0.0_f64; // accumulates J0 + 2 sum J_{2k}
    for m in (0..=start).rev() {
        let jm = (2.0 * (m as f64 + 1.0) / au) * j - jp;
        jp = j;
        j = jm;
        // rescale to dodge overflow
        if j.abs() > 1e250 {
            j *= 1e-250;
            jp *= 1e-250;
            norm *= 1e-250;
            for v in out.iter_mut() {
                *v *= 1e-250;
            }
        }
        if m <= nmax {
            out[m] = j;
        }
        if m % 2 == 0 {
            norm += if m == 0 { j } else { 2.0 * j };
        }
    }
    for v in out.iter_mut() {
        *v /= norm;
    }
    if u < 0.0 {
        for (m, v) in out.iter_mut().enumerate() {
            if m % 2 == 1 {
                *v = -*v;
            }
        }
    }
    out
}

// Minimal double-double arithmetic for the mid-range series. Error-free
// transforms based on two-sum and fma two-prod.
#[derive(Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, f64::mul_add(a, b, -p))
}

impl Dd {
    fn from(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (hi, lo) = quick_two_sum(s, e + self.lo + o.lo);
        Dd { hi, lo }
    }

    fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let (hi, lo) = quick_two_sum(p, e + self.hi * o.lo + self.lo * o.hi);
        Dd { hi, lo }
    }

    fn div_f64(self, x: f64) -> Dd {
        let q1 = self.hi / x;
        let (p, e) = two_prod(q1, x);
        let (d, de) = two_sum(self.hi, -p);
        let q2 = (d + (de + self.lo - e)) / x;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }
    }
}
