//! Hermite polynomials, the projection coefficients of the nodal
//! functionals, and diagram-formula moments of Hermite products.
//!
//! Coefficient conventions (probabilists' Hermite `H_n`, standard Gaussian
//! density `gamma`):
//!
//! * `beta_l(z) = gamma(z) H_l(z) / l!` — expansion of the level-`z` Dirac
//!   mass; odd orders vanish at `z = 0`.
//! * `alpha_{n,m}` — expansion of the Euclidean norm of a standard Gaussian
//!   pair; vanishes for odd `n` or `m`.
//! * `zeta_{a,b,c,d}` — expansion of `|XY - ZW|` for an i.i.d. standard
//!   quadruple; vanishes unless all four indices share parity.

mod functionals;

pub use functionals::{
    fourth_chaos_count, fourth_chaos_length, length_fourth_combination, length_integrand_fields,
    second_chaos_length, ChaosComponent, Constituents, COUNT_B_WEIGHTS,
};

use crate::{BerryError, Result};
use statrs::distribution::{ContinuousCDF, Normal};
use std::f64::consts::PI;

/// Probabilists' Hermite polynomial by the three-term recurrence
/// `H_{n+1} = x H_n - n H_{n-1}`.
pub fn hermite(n: u32, x: f64) -> f64 {
    match n {
        0 => 1.0,
        1 => x,
        _ => {
            let mut hm1 = 1.0;
            let mut h = x;
            for k in 1..n {
                let next = x * h - k as f64 * hm1;
                hm1 = h;
                h = next;
            }
            h
        }
    }
}

/// Standard Gaussian density.
pub fn gaussian_density(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `beta_l(z) = gamma(z) H_l(z) / l!`.
pub fn beta_coeff(l: u32, z: f64) -> f64 {
    gaussian_density(z) * hermite(l, z) / factorial(l)
}

/// Gauss-Hermite nodes and weights for the weight `exp(-x^2)` (Golub-Welsch
/// on the Jacobi matrix).
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut jac = nalgebra::DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let b = (k as f64 / 2.0).sqrt();
        jac[(k - 1, k)] = b;
        jac[(k, k - 1)] = b;
    }
    let eig = nalgebra::SymmetricEigen::new(jac);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let node = eig.eigenvalues[i];
            let v0 = eig.eigenvectors[(0, i)];
            (node, PI.sqrt() * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    pairs.into_iter().unzip()
}

/// Closed-form `alpha_{n,m}` for the orders the fourth chaos uses, zero for
/// odd indices, and `None` beyond the analytic table.
pub fn alpha_coeff(n: u32, m: u32) -> Option<f64> {
    if n % 2 == 1 || m % 2 == 1 {
        return Some(0.0);
    }
    let s = (2.0 * PI).sqrt();
    match (n, m) {
        (0, 0) => Some(s / 2.0),
        (2, 0) | (0, 2) => Some(s / 8.0),
        (4, 0) | (0, 4) => Some(-s / 128.0),
        (2, 2) => Some(-s / 64.0),
        _ => None,
    }
}

/// `alpha_{n,m}` by independent 2D quadrature.
///
/// The integrand carries the conical `|y|` factor, which defeats tensor
/// Gauss-Hermite (the kink at the origin caps it at ~1e-4 with 64 nodes per
/// axis). In polar form the radial integrand is `r^2 P(r^2) exp(-r^2/2)`
/// with `P` a polynomial, so generalized Gauss-Laguerre (`alpha = 1/2`)
/// in `t = r^2/2` is exact, and the angular factor is a trigonometric
/// polynomial handled exactly by the trapezoid rule.
pub fn alpha_coeff_quadrature(n: u32, m: u32) -> f64 {
    let (nodes, weights) = gauss_laguerre_half(64);
    let angular_nodes = 256usize;
    let dth = 2.0 * PI / angular_nodes as f64;
    let mut total = 0.0;
    for (i, &t) in nodes.iter().enumerate() {
        let r = (2.0 * t).sqrt();
        let mut ang = 0.0;
        for k in 0..angular_nodes {
            let th = k as f64 * dth;
            ang += hermite(n, r * th.cos()) * hermite(m, r * th.sin());
        }
        // int r^2 g e^{-r^2/2} dr = sqrt(2) int t^{1/2} g e^{-t} dt
        total += weights[i] * std::f64::consts::SQRT_2 * ang * dth;
    }
    total / (2.0 * PI * factorial(n) * factorial(m))
}

/// Gauss-Laguerre nodes and weights for the weight `t^{1/2} exp(-t)`.
fn gauss_laguerre_half(n: usize) -> (Vec<f64>, Vec<f64>) {
    let alpha = 0.5;
    let mut jac = nalgebra::DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        jac[(k, k)] = 2.0 * k as f64 + alpha + 1.0;
        if k + 1 < n {
            let b = ((k as f64 + 1.0) * (k as f64 + 1.0 + alpha)).sqrt();
            jac[(k, k + 1)] = b;
            jac[(k + 1, k)] = b;
        }
    }
    let eig = nalgebra::SymmetricEigen::new(jac);
    // Gamma(3/2) = sqrt(pi)/2
    let gamma_a1 = PI.sqrt() / 2.0;
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], gamma_a1 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    pairs.into_iter().unzip()
}

/// Closed-form `zeta_{a,b,c,d}` where tabulated; zero whenever the indices
/// mix parities.
pub fn zeta_coeff(a: u32, b: u32, c: u32, d: u32) -> Option<f64> {
    let parity = a % 2;
    if b % 2 != parity || c % 2 != parity || d % 2 != parity {
        return Some(0.0);
    }
    match (a, b, c, d) {
        (0, 0, 0, 0) => Some(1.0),
        (2, 0, 0, 0) | (0, 2, 0, 0) | (0, 0, 2, 0) | (0, 0, 0, 2) => Some(0.25),
        (1, 1, 1, 1) => Some(-3.0 / 8.0),
        (2, 2, 0, 0) | (0, 0, 2, 2) => Some(-1.0 / 32.0),
        (2, 0, 2, 0) | (0, 2, 0, 2) => Some(-1.0 / 32.0),
        (2, 0, 0, 2) | (0, 2, 2, 0) => Some(5.0 / 32.0),
        (4, 0, 0, 0) | (0, 4, 0, 0) | (0, 0, 4, 0) | (0, 0, 0, 4) => Some(-3.0 / 192.0),
        _ => None,
    }
}

/// Quasi Monte Carlo estimate of `zeta_{a,b,c,d}` over the standard 4D
/// Gaussian (Halton points through the inverse normal CDF, randomized by
/// Cranley-Patterson shifts). Returns `(value, standard_error)`.
///
/// The kernel is the vortex Jacobian `|X W - Y Z|`, matching the index
/// order `(d1 B, d2 B, d1 Bhat, d2 Bhat)` of the chaos expansion; the
/// tabulated closed values live in this convention (the mixed entries are
/// not invariant under reordering the quadruple).
pub fn zeta_coeff_qmc(a: u32, b: u32, c: u32, d: u32, points: usize, seed: u64) -> (f64, f64) {
    const BASES: [u64; 4] = [2, 3, 5, 7];
    const REPLICAS: usize = 8;
    let normal = Normal::new(0.0, 1.0).unwrap();
    let per = (points / REPLICAS).max(1);
    let norm = factorial(a) * factorial(b) * factorial(c) * factorial(d);
    // deterministic shifts from a small LCG over the seed
    let mut state = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(1);
    let mut next_shift = || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    let mut estimates = Vec::with_capacity(REPLICAS);
    for _ in 0..REPLICAS {
        let shifts: [f64; 4] = [next_shift(), next_shift(), next_shift(), next_shift()];
        let mut sum = 0.0;
        for i in 0..per {
            let mut g = [0.0f64; 4];
            for (k, &base) in BASES.iter().enumerate() {
                let mut u = halton(i as u64 + 1, base) + shifts[k];
                if u >= 1.0 {
                    u -= 1.0;
                }
                // keep the inverse CDF off the exact endpoints
                let u = u.clamp(1e-15, 1.0 - 1e-15);
                g[k] = normal.inverse_cdf(u);
            }
            let (x, y, z, w) = (g[0], g[1], g[2], g[3]);
            sum += (x * w - y * z).abs()
                * hermite(a, x)
                * hermite(b, y)
                * hermite(c, z)
                * hermite(d, w);
        }
        estimates.push(sum / per as f64 / norm);
    }
    let mean = estimates.iter().sum::<f64>() / REPLICAS as f64;
    let var = estimates
        .iter()
        .map(|e| (e - mean) * (e - mean))
        .sum::<f64>()
        / (REPLICAS as f64 - 1.0);
    (mean, (var / REPLICAS as f64).sqrt())
}

fn halton(mut index: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while index > 0 {
        f /= base as f64;
        r += f * (index % base) as f64;
        index /= base;
    }
    r
}

/// One side of a Hermite product moment: Hermite degrees applied to the
/// components of an independent standard Gaussian vector observed at one
/// spatial point.
#[derive(Clone, Debug)]
pub struct HermiteMonomial {
    pub degrees: Vec<u32>,
}

impl HermiteMonomial {
    pub fn new(degrees: Vec<u32>) -> Self {
        HermiteMonomial { degrees }
    }

    pub fn total_degree(&self) -> u32 {
        self.degrees.iter().sum()
    }

    /// Variable index per leg, degrees expanded.
    pub(crate) fn legs(&self) -> Vec<usize> {
        let mut legs = Vec::new();
        for (var, &deg) in self.degrees.iter().enumerate() {
            for _ in 0..deg {
                legs.push(var);
            }
        }
        legs
    }
}

/// `E[prod_i H_{n_i}(X_i) * prod_j H_{m_j}(Y_j)]` for two independent
/// standard Gaussian vectors `X` (point x) and `Y` (point y) with
/// cross-covariances `cross[i][j] = Cov(X_i, Y_j)`.
///
/// Within each side the components must be independent (true for the field
/// and its normalized gradient at a single point); the diagram formula then
/// reduces to the permanent of the leg covariance matrix. Total degree is
/// capped at 4 per side, which covers every moment the proofs use.
pub fn hermite_product_moment(
    side_x: &HermiteMonomial,
    side_y: &HermiteMonomial,
    cross: &[Vec<f64>],
) -> Result<f64> {
    if side_x.total_degree() > 4 || side_y.total_degree() > 4 {
        return Err(BerryError::Unsupported(
            "hermite_product_moment caps total degree at 4 per side".into(),
        ));
    }
    if cross.len() != side_x.degrees.len()
        || cross.iter().any(|row| row.len() != side_y.degrees.len())
    {
        return Err(BerryError::invalid("cross-covariance shape mismatch"));
    }
    let legs_x = side_x.legs();
    let legs_y = side_y.legs();
    if legs_x.len() != legs_y.len() {
        // all matchings must pair across sides; a degree mismatch means the
        // moment vanishes
        return Ok(0.0);
    }
    Ok(permanent_sum(&legs_x, &legs_y, &mut |i, j| cross[i][j]))
}

/// Sum over bijections of `prod cov(legs_x[i], legs_y[sigma(i)])`.
pub(crate) fn permanent_sum(
    legs_x: &[usize],
    legs_y: &[usize],
    cov: &mut impl FnMut(usize, usize) -> f64,
) -> f64 {
    fn rec(
        i: usize,
        n: usize,
        used: &mut [bool],
        legs_x: &[usize],
        legs_y: &[usize],
        cov: &mut impl FnMut(usize, usize) -> f64,
    ) -> f64 {
        if i == n {
            return 1.0;
        }
        let mut total = 0.0;
        for j in 0..n {
            if used[j] {
                continue;
            }
            let c = cov(legs_x[i], legs_y[j]);
            if c == 0.0 {
                continue;
            }
            used[j] = true;
            total += c * rec(i + 1, n, used, legs_x, legs_y, cov);
            used[j] = false;
        }
        total
    }
    let n = legs_x.len();
    if n == 0 {
        return 1.0;
    }
    let mut used = vec![false; n];
    rec(0, n, &mut used, legs_x, legs_y, cov)
}
