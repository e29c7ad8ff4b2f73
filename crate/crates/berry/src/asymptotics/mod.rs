//! Deterministic verification of the covariance-integral reductions and the
//! leading-order rate constants.
//!
//! Every covariance of the fourth-chaos functionals is a double-domain
//! integral of a polynomial in the six normalized kernels. This module
//! derives those polynomials symbolically from the diagram formula, reduces
//! the double integral to a radial one (erosion-weighted, then the
//! substitution `psi = sqrt(E) phi`), and compares against the tabulated
//! leading constants in units of `area(D1 cap D2) log(E) / (pi^3 E)`.
//!
//! The table stores the mixed-functional constants as the integers `n_{i,j}`
//! with predicted covariance `n_{i,j}/64` for the half-normalized mixed
//! functionals (the Monte Carlo side uses the unhalved ones with the
//! `pi E / 8` prefactor; both conventions reproduce the same total variance
//! `(11/32 pi) E log E` per unit area).

use crate::chaos::permanent_sum;
use crate::geometry::{self, Domain};
use crate::specfun::normalized_kernels;
use crate::{BerryError, Result};
use std::collections::HashMap;
use std::f64::consts::PI;

/// Radial quadrature density: points per unit of `psi` (the base oscillation
/// `cos(2 pi psi)` has period 1; products carry up to the 4th harmonic).
const RADIAL_POINTS_PER_UNIT: usize = 128;
/// Angular nodes for the exact (non-leading) path.
const ANGULAR_NODES: usize = 256;

// ---------------------------------------------------------------------------
// kernel polynomials
// ---------------------------------------------------------------------------

/// Symbol order: `r, r01, r02, r11, r12, r22`.
pub const KERNEL_SYMBOLS: [&str; 6] = ["r", "r01", "r02", "r11", "r12", "r22"];

/// Polynomial in the six normalized kernels with collected terms.
#[derive(Clone, Debug, Default)]
pub struct KernelPoly {
    terms: Vec<(f64, [u8; 6])>,
}

impl KernelPoly {
    fn from_map(map: HashMap<[u8; 6], f64>) -> Self {
        let mut terms: Vec<(f64, [u8; 6])> = map
            .into_iter()
            .filter(|(_, c)| *c != 0.0)
            .map(|(e, c)| (c, e))
            .collect();
        terms.sort_by(|a, b| a.1.cmp(&b.1));
        KernelPoly { terms }
    }

    pub fn terms(&self) -> &[(f64, [u8; 6])] {
        &self.terms
    }

    pub fn scale(mut self, factor: f64) -> Self {
        for t in self.terms.iter_mut() {
            t.0 *= factor;
        }
        self
    }

    pub fn add(mut self, other: &KernelPoly) -> Self {
        let mut map: HashMap<[u8; 6], f64> = self.terms.drain(..).map(|(c, e)| (e, c)).collect();
        for (c, e) in &other.terms {
            *map.entry(*e).or_insert(0.0) += c;
        }
        KernelPoly::from_map(map)
    }

    pub fn mul(&self, other: &KernelPoly) -> Self {
        let mut map: HashMap<[u8; 6], f64> = HashMap::new();
        for (c1, e1) in &self.terms {
            for (c2, e2) in &other.terms {
                let mut e = *e1;
                for k in 0..6 {
                    e[k] += e2[k];
                }
                *map.entry(e).or_insert(0.0) += c1 * c2;
            }
        }
        KernelPoly::from_map(map)
    }

    /// Evaluate at a kernel set.
    pub fn eval(&self, k: &crate::specfun::NormalizedKernels) -> f64 {
        let vals = [k.r, k.r01, k.r02, k.r11, k.r12, k.r22];
        let mut total = 0.0;
        for (c, e) in &self.terms {
            let mut t = *c;
            for (v, &p) in vals.iter().zip(e.iter()) {
                for _ in 0..p {
                    t *= v;
                }
            }
            total += t;
        }
        total
    }

    /// Evaluate from precomputed Bessel values at radial distance `psi`
    /// (energy 1) and angle `theta`; avoids re-evaluating `J0..J2` per angle.
    fn eval_polar(&self, j: [f64; 3], theta: f64) -> f64 {
        let (s, c) = theta.sin_cos();
        let s2 = std::f64::consts::SQRT_2;
        let k = crate::specfun::NormalizedKernels {
            r: j[0],
            r01: s2 * c * j[1],
            r02: s2 * s * j[1],
            r11: j[0] + (1.0 - 2.0 * c * c) * j[2],
            r22: j[0] + (1.0 - 2.0 * s * s) * j[2],
            r12: -2.0 * c * s * j[2],
        };
        self.eval(&k)
    }
}

/// Cross-covariance of the triples `(B, t1, t2)` at two points, as a signed
/// kernel symbol: `Cov(t_i(x), B(y)) = -r0i` while `Cov(B(x), t_i(y)) = +r0i`.
fn cov_symbol(i: usize, j: usize) -> (f64, usize) {
    match (i, j) {
        (0, 0) => (1.0, 0),
        (0, 1) => (1.0, 1),
        (0, 2) => (1.0, 2),
        (1, 0) => (-1.0, 1),
        (2, 0) => (-1.0, 2),
        (1, 1) => (1.0, 3),
        (1, 2) | (2, 1) => (1.0, 4),
        (2, 2) => (1.0, 5),
        _ => unreachable!(),
    }
}

/// Diagram-formula expansion of `E[P(x) Q(y)]` for Hermite monomials over
/// `(B, t1, t2)`, as a polynomial in the kernel symbols.
fn symbolic_pair_poly(deg_x: [u32; 3], deg_y: [u32; 3]) -> KernelPoly {
    let legs = |d: [u32; 3]| {
        let mut v = Vec::new();
        for (var, &n) in d.iter().enumerate() {
            for _ in 0..n {
                v.push(var);
            }
        }
        v
    };
    let lx = legs(deg_x);
    let ly = legs(deg_y);
    let mut map: HashMap<[u8; 6], f64> = HashMap::new();
    if lx.len() != ly.len() {
        return KernelPoly::from_map(map);
    }
    fn rec(
        i: usize,
        used: &mut [bool],
        lx: &[usize],
        ly: &[usize],
        sign: f64,
        exps: [u8; 6],
        map: &mut HashMap<[u8; 6], f64>,
    ) {
        if i == lx.len() {
            *map.entry(exps).or_insert(0.0) += sign;
            return;
        }
        for j in 0..ly.len() {
            if used[j] {
                continue;
            }
            let (s, sym) = cov_symbol(lx[i], ly[j]);
            used[j] = true;
            let mut e = exps;
            e[sym] += 1;
            rec(i + 1, used, lx, ly, sign * s, e, map);
            used[j] = false;
        }
    }
    let mut used = vec![false; ly.len()];
    rec(0, &mut used, &lx, &ly, 1.0, [0; 6], &mut map);
    KernelPoly::from_map(map)
}

// ---------------------------------------------------------------------------
// functional identifiers
// ---------------------------------------------------------------------------

/// Hermite degrees over `(B, t1, t2)` of the six length functionals.
const LENGTH_DEGREES: [[u32; 3]; 6] = [
    [4, 0, 0],
    [0, 4, 0],
    [0, 0, 4],
    [0, 2, 2],
    [2, 2, 0],
    [2, 0, 2],
];

/// Degrees of the ten mixed count functionals: (component part, hat part).
const COUNT_DEGREES: [([u32; 3], [u32; 3]); 10] = [
    ([2, 0, 0], [2, 0, 0]),
    ([2, 0, 0], [0, 2, 0]),
    ([2, 0, 0], [0, 0, 2]),
    ([0, 2, 0], [2, 0, 0]),
    ([0, 0, 2], [2, 0, 0]),
    ([0, 2, 0], [0, 2, 0]),
    ([0, 0, 2], [0, 0, 2]),
    ([0, 2, 0], [0, 0, 2]),
    ([0, 0, 2], [0, 2, 0]),
    ([0, 1, 1], [0, 1, 1]),
];

/// A covariance pair: two length functionals (`a1..a6`) or two mixed count
/// functionals (`b1..b10`), 1-based as in the rate tables.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RatePair {
    A(usize, usize),
    B(usize, usize),
}

impl RatePair {
    pub fn parse(s: &str) -> Result<RatePair> {
        let parts: Vec<&str> = s.split([':', ',', '-']).collect();
        if parts.len() != 2 {
            return Err(BerryError::invalid(format!("cannot parse pair {s:?}")));
        }
        let ids: Vec<(char, usize)> = parts
            .iter()
            .map(|p| {
                let p = p.trim();
                let kind = p.chars().next().unwrap_or('?');
                let idx: usize = p[1..].parse().unwrap_or(0);
                (kind, idx)
            })
            .collect();
        match (ids[0], ids[1]) {
            (('a', i), ('a', j)) if (1..=6).contains(&i) && (1..=6).contains(&j) => {
                Ok(RatePair::A(i, j))
            }
            (('b', i), ('b', j)) if (1..=10).contains(&i) && (1..=10).contains(&j) => {
                Ok(RatePair::B(i, j))
            }
            _ => Err(BerryError::invalid(format!("unknown pair {s:?}"))),
        }
    }

    pub fn all_a() -> Vec<RatePair> {
        let mut v = Vec::new();
        for i in 1..=6 {
            for j in i..=6 {
                v.push(RatePair::A(i, j));
            }
        }
        v
    }

    pub fn all_b() -> Vec<RatePair> {
        let mut v = Vec::new();
        for i in 1..=10 {
            for j in i..=10 {
                v.push(RatePair::B(i, j));
            }
        }
        v
    }
}

impl std::fmt::Display for RatePair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RatePair::A(i, j) => write!(f, "a{i}:a{j}"),
            RatePair::B(i, j) => write!(f, "b{i}:b{j}"),
        }
    }
}

/// Covariance integrand of a pair, as fed to the radial reduction.
///
/// Length pairs carry the full diagram expansion. Mixed pairs factor into a
/// product of component expansions and are half-normalized (factor 1/4) to
/// match the `n_{i,j}/64` table units.
pub fn pair_integrand(pair: RatePair) -> KernelPoly {
    match pair {
        RatePair::A(i, j) => symbolic_pair_poly(LENGTH_DEGREES[i - 1], LENGTH_DEGREES[j - 1]),
        RatePair::B(i, j) => {
            let (xi_b, xi_h) = COUNT_DEGREES[i - 1];
            let (yj_b, yj_h) = COUNT_DEGREES[j - 1];
            symbolic_pair_poly(xi_b, yj_b)
                .mul(&symbolic_pair_poly(xi_h, yj_h))
                .scale(0.25)
        }
    }
}

/// Unhalved variant of the mixed-pair integrand (used for variance
/// assembly with the `pi E / 8` convention).
pub fn pair_integrand_unhalved(pair: RatePair) -> KernelPoly {
    match pair {
        RatePair::B(_, _) => pair_integrand(pair).scale(4.0),
        a => pair_integrand(a),
    }
}

/// The full integrand of `Var(8a1 - a2 - a3 - 2a4 - 8a5 - 8a6)`.
pub fn length_combo_poly() -> KernelPoly {
    let weights = [8.0, -1.0, -1.0, -2.0, -8.0, -8.0];
    let mut poly = KernelPoly::default();
    for i in 1..=6 {
        for j in 1..=6 {
            poly = poly.add(
                &pair_integrand(RatePair::A(i, j)).scale(weights[i - 1] * weights[j - 1]),
            );
        }
    }
    poly
}

/// The full integrand of `Var(2b1 - ... - 3b10)` with unhalved functionals.
pub fn count_b_combo_poly() -> KernelPoly {
    let weights = crate::chaos::COUNT_B_WEIGHTS;
    let mut poly = KernelPoly::default();
    for i in 1..=10 {
        for j in 1..=10 {
            poly = poly.add(
                &pair_integrand_unhalved(RatePair::B(i, j))
                    .scale(weights[i - 1] * weights[j - 1]),
            );
        }
    }
    poly
}

// ---------------------------------------------------------------------------
// rate table and closed-form leading constants
// ---------------------------------------------------------------------------

/// Tabulated leading constants in units `area(D1 cap D2) log(E)/(pi^3 E)`.
#[derive(Clone, Debug)]
pub struct RateTable {
    /// Constants for the 6x6 length-functional covariances.
    pub a_rates: [[f64; 6]; 6],
    /// Integer table for the mixed-functional covariances; the constant is
    /// `n_table[i][j] / 64`.
    pub n_table: [[f64; 10]; 10],
}

impl RateTable {
    pub fn paper() -> Self {
        let a_rates = [
            [9.0, 13.5, 13.5, 4.5, 3.0, 3.0],
            [13.5, 39.375, 3.375, 5.625, 7.5, 1.5],
            [13.5, 3.375, 39.375, 5.625, 1.5, 7.5],
            [4.5, 5.625, 5.625, 3.375, 1.5, 1.5],
            [3.0, 7.5, 1.5, 1.5, 1.5, 0.5],
            [3.0, 1.5, 7.5, 1.5, 0.5, 1.5],
        ];
        let n = [
            [24.0, 8.0, 8.0, 8.0, 8.0, 36.0, 36.0, 12.0, 12.0, 12.0],
            [8.0, 36.0, 12.0, 36.0, 12.0, 20.0, 4.0, 4.0, 4.0, 4.0],
            [8.0, 12.0, 36.0, 12.0, 36.0, 4.0, 20.0, 4.0, 4.0, 4.0],
            [8.0, 36.0, 12.0, 36.0, 12.0, 20.0, 4.0, 4.0, 4.0, 4.0],
            [8.0, 12.0, 36.0, 12.0, 36.0, 4.0, 20.0, 4.0, 4.0, 4.0],
            [36.0, 20.0, 4.0, 20.0, 4.0, 105.0, 9.0, 15.0, 15.0, 15.0],
            [36.0, 4.0, 20.0, 4.0, 20.0, 9.0, 105.0, 15.0, 15.0, 15.0],
            [12.0, 4.0, 4.0, 4.0, 4.0, 15.0, 15.0, 9.0, 9.0, 9.0],
            [12.0, 4.0, 4.0, 4.0, 4.0, 15.0, 15.0, 9.0, 9.0, 9.0],
            [12.0, 4.0, 4.0, 4.0, 4.0, 15.0, 15.0, 9.0, 9.0, 9.0],
        ];
        RateTable { a_rates, n_table: n }
    }

    pub fn constant(&self, pair: RatePair) -> f64 {
        match pair {
            RatePair::A(i, j) => self.a_rates[i - 1][j - 1],
            RatePair::B(i, j) => self.n_table[i - 1][j - 1] / 64.0,
        }
    }
}

fn double_factorial(n: i64) -> f64 {
    let mut v = 1.0;
    let mut k = n;
    while k > 1 {
        v *= k as f64;
        k -= 2;
    }
    v
}

/// `int_0^{2pi} cos^a sin^b = 2 pi (a-1)!!(b-1)!!/(a+b)!!` for even powers.
fn angular_closed_form(a: u32, b: u32) -> f64 {
    if a % 2 == 1 || b % 2 == 1 {
        return 0.0;
    }
    2.0 * PI * double_factorial(a as i64 - 1) * double_factorial(b as i64 - 1)
        / double_factorial((a + b) as i64)
}

/// Mean of `cos^nc(x) sin^ns(x)` over a period, for `nc + ns = 4`.
fn oscillation_average(nc: u32, ns: u32) -> f64 {
    match (nc, ns) {
        (4, 0) | (0, 4) => 3.0 / 8.0,
        (2, 2) => 1.0 / 8.0,
        _ => 0.0,
    }
}

/// Angular amplitude and monomial of a kernel-exponent vector under the
/// leading forms: returns `(amp, cos power, sin power, cos-type count,
/// sin-type count)`.
fn leading_structure(e: &[u8; 6]) -> (f64, u32, u32, u32, u32) {
    let q = e.map(|v| v as u32);
    let amp = 2f64.powi((q[1] + q[2]) as i32 / 2)
        * if (q[1] + q[2]) % 2 == 1 { std::f64::consts::SQRT_2 } else { 1.0 }
        * 2f64.powi((q[3] + q[4] + q[5]) as i32);
    let a = q[1] + 2 * q[3] + q[4];
    let b = q[2] + 2 * q[5] + q[4];
    let nc = q[0] + q[3] + q[4] + q[5];
    let ns = q[1] + q[2];
    (amp, a, b, nc, ns)
}

/// Closed-form leading constant of a kernel polynomial, in the table units.
pub fn leading_constant_of(poly: &KernelPoly) -> f64 {
    let mut total = 0.0;
    for (coeff, e) in poly.terms() {
        let (amp, a, b, nc, ns) = leading_structure(e);
        total += coeff * amp * angular_closed_form(a, b) * oscillation_average(nc, ns);
    }
    total / (2.0 * PI)
}

/// Closed-form leading constant of a covariance pair (diagram formula +
/// Beta-function angular integrals + exact oscillation averages).
pub fn leading_constant(pair: RatePair) -> f64 {
    leading_constant_of(&pair_integrand(pair))
}

// ---------------------------------------------------------------------------
// radial reduction
// ---------------------------------------------------------------------------

/// `area(D1 cap D2^{-phi})`, exact for rectangle and disk pairs and for
/// identical domains.
pub fn overlap_after_erosion(d1: &Domain, d2: &Domain, phi: f64) -> Result<f64> {
    if phi == 0.0 {
        return Ok(geometry::intersection_area(d1, d2));
    }
    if d1 == d2 {
        return geometry::erosion_area(d2, phi);
    }
    match (d1, d2) {
        (Domain::Rectangle { .. }, Domain::Rectangle { .. })
        | (Domain::Disk { .. }, Domain::Disk { .. })
        | (Domain::Rectangle { .. }, Domain::Disk { .. })
        | (Domain::Disk { .. }, Domain::Rectangle { .. }) => {
            Ok(match geometry::eroded(d2, phi)? {
                Some(e) => geometry::intersection_area(d1, &e),
                None => 0.0,
            })
        }
        _ => Err(BerryError::Unsupported(
            "erosion overlap needs rectangle/disk pairs or identical domains".into(),
        )),
    }
}

fn intersection_diam(d1: &Domain, d2: &Domain) -> f64 {
    if d1 == d2 {
        return d1.diam();
    }
    match (d1, d2) {
        (
            Domain::Rectangle { corner: c1, widths: w1 },
            Domain::Rectangle { corner: c2, widths: w2 },
        ) => {
            let ox = (c1[0] + w1[0]).min(c2[0] + w2[0]) - c1[0].max(c2[0]);
            let oy = (c1[1] + w1[1]).min(c2[1] + w2[1]) - c1[1].max(c2[1]);
            if ox <= 0.0 || oy <= 0.0 {
                0.0
            } else {
                ox.hypot(oy)
            }
        }
        _ => {
            if geometry::intersection_area(d1, d2) <= 0.0 {
                0.0
            } else {
                d1.diam().min(d2.diam())
            }
        }
    }
}

fn check_energy_above_one(energy: f64) -> Result<()> {
    if !(energy > 1.0) {
        return Err(BerryError::invalid(format!("need E > 1, got {energy}")));
    }
    Ok(())
}

/// Shared radial integrals `I[nc][ns] = (1/E) int_1^X A(psi/sqrt(E))
/// cos^nc sin^ns (2 pi psi - pi/4) / psi dpsi` for all oscillation mixes
/// with `nc + ns = 4`, over the erosion-weighted overlap `A`.
struct RadialOscIntegrals {
    table: [[f64; 5]; 5],
}

impl RadialOscIntegrals {
    fn compute(d1: &Domain, d2: &Domain, energy: f64) -> Result<Self> {
        let se = energy.sqrt();
        let x_max = se * intersection_diam(d1, d2);
        let mut table = [[0.0; 5]; 5];
        if x_max <= 1.0 {
            return Ok(RadialOscIntegrals { table });
        }
        let n = ((x_max - 1.0) * RADIAL_POINTS_PER_UNIT as f64).ceil() as usize;
        let n = if n % 2 == 0 { n } else { n + 1 };
        let h = (x_max - 1.0) / n as f64;
        for i in 0..=n {
            let psi = 1.0 + i as f64 * h;
            let w = simpson_weight(i, n) * h;
            let a = overlap_after_erosion(d1, d2, psi / se)?;
            if a == 0.0 {
                continue;
            }
            let (s, c) = (2.0 * PI * psi - PI / 4.0).sin_cos();
            let base = w * a / psi;
            let mut cp = [1.0; 5];
            let mut sp = [1.0; 5];
            for k in 1..5 {
                cp[k] = cp[k - 1] * c;
                sp[k] = sp[k - 1] * s;
            }
            for nc in 0..=4usize {
                let ns = 4 - nc;
                table[nc][ns] += base * cp[nc] * sp[ns];
            }
        }
        for row in table.iter_mut() {
            for v in row.iter_mut() {
                *v /= energy;
            }
        }
        Ok(RadialOscIntegrals { table })
    }
}

fn simpson_weight(i: usize, n: usize) -> f64 {
    if i == 0 || i == n {
        1.0 / 3.0
    } else if i % 2 == 1 {
        4.0 / 3.0
    } else {
        2.0 / 3.0
    }
}

/// Leading-order value of a kernel polynomial's reduced double integral.
fn leading_value(poly: &KernelPoly, osc: &RadialOscIntegrals) -> f64 {
    let mut total = 0.0;
    for (coeff, e) in poly.terms() {
        let (amp, a, b, nc, ns) = leading_structure(e);
        let ang = angular_closed_form(a, b);
        if ang == 0.0 {
            continue;
        }
        total += coeff * amp * ang * osc.table[nc as usize][ns as usize];
    }
    total / PI.powi(4)
}

/// Exact reduced double integral of a kernel polynomial:
/// `(1/E) int_0^X A(psi/sqrt(E)) [int_0^{2pi} P(psi, theta) dtheta] psi dpsi`.
fn exact_reduced_value(poly: &KernelPoly, d1: &Domain, d2: &Domain, energy: f64) -> Result<f64> {
    let se = energy.sqrt();
    let x_max = se * intersection_diam(d1, d2);
    if x_max <= 0.0 {
        return Ok(0.0);
    }
    let n = (x_max * RADIAL_POINTS_PER_UNIT as f64).ceil() as usize;
    let n = if n % 2 == 0 { n } else { n + 1 };
    let h = x_max / n as f64;
    let isotropic = poly.terms().iter().all(|(_, e)| e[1..].iter().all(|&q| q == 0));
    let dth = 2.0 * PI / ANGULAR_NODES as f64;
    let mut total = 0.0;
    for i in 0..=n {
        let psi = i as f64 * h;
        let w = simpson_weight(i, n) * h;
        let a = overlap_after_erosion(d1, d2, psi / se)?;
        if a == 0.0 {
            continue;
        }
        let nk = normalized_kernels(1.0, [psi, 0.0])?;
        let ang = if isotropic {
            2.0 * PI * poly.eval(&nk)
        } else {
            // reuse the Bessel values across the angular sweep
            let u = 2.0 * PI * psi;
            let j = crate::specfun::bessel_j012(u)?;
            let j = if psi < 1e-14 { [1.0, 0.0, 0.0] } else { j };
            let mut s = 0.0;
            for t in 0..ANGULAR_NODES {
                let theta = t as f64 * dth;
                s += poly.eval_polar(j, theta);
            }
            s * dth
        };
        total += w * a * ang * psi;
    }
    Ok(total / energy)
}

/// Reduced covariance integral for one kernel monomial `q_{i,j}` (exponents
/// over `rtilde_{i,j}`, `i, j in {0,1,2}`, summing to 4).
///
/// With `leading_order` the angular factor is the closed Beta-form of the
/// leading monomials and the radial factor keeps the exact oscillation;
/// otherwise both factors are exact (angular by 256-point trapezoid).
pub fn radial_reduction(
    q: [[u32; 3]; 3],
    d1: &Domain,
    d2: &Domain,
    energy: f64,
    leading_order: bool,
) -> Result<f64> {
    check_energy_above_one(energy)?;
    let total: u32 = q.iter().flatten().sum();
    if total != 4 {
        return Err(BerryError::invalid(format!(
            "exponent matrix must sum to 4, got {total}"
        )));
    }
    // map the 3x3 exponents onto the six symbols with the sign convention
    // rtilde_{i,0} = -rtilde_{0,i}
    let mut exps = [0u8; 6];
    let mut sign = 1.0f64;
    for i in 0..3 {
        for j in 0..3 {
            if q[i][j] == 0 {
                continue;
            }
            let (s, sym) = cov_symbol(i, j);
            if s < 0.0 && q[i][j] % 2 == 1 {
                sign = -sign;
            }
            exps[sym] += q[i][j] as u8;
        }
    }
    let poly = KernelPoly { terms: vec![(sign, exps)] };
    if leading_order {
        let osc = RadialOscIntegrals::compute(d1, d2, energy)?;
        Ok(leading_value(&poly, &osc))
    } else {
        exact_reduced_value(&poly, d1, d2, energy)
    }
}

/// Numeric-vs-predicted comparison for one covariance pair.
#[derive(Clone, Debug)]
pub struct RateCheck {
    pub pair: RatePair,
    pub energy: f64,
    pub numeric: f64,
    pub predicted: f64,
    pub ratio: f64,
}

/// Evaluate the pair's covariance by diagram integrand + radial reduction
/// (production leading-order path) and compare with the tabulated constant.
pub fn covariance_rate_check(
    pair: RatePair,
    energy: f64,
    d1: &Domain,
    d2: &Domain,
) -> Result<RateCheck> {
    check_energy_above_one(energy)?;
    let poly = pair_integrand(pair);
    let osc = RadialOscIntegrals::compute(d1, d2, energy)?;
    let numeric = leading_value(&poly, &osc);
    let table = RateTable::paper();
    let predicted = table.constant(pair) * geometry::intersection_area(d1, d2) * energy.ln()
        / (PI.powi(3) * energy);
    let ratio = if predicted != 0.0 { numeric / predicted } else { f64::NAN };
    Ok(RateCheck { pair, energy, numeric, predicted, ratio })
}

/// Magnitudes of the two oscillation-modulated radial integrals left over
/// after the `cos^4` decomposition, together with the constant channel and
/// the full unsplit integral (for the linearity check).
#[derive(Clone, Debug)]
pub struct OscillatoryRemainder {
    /// `6/(pi^3 E) |int A(psi/sqrt E) cos(8 pi psi - pi)/psi dpsi|`.
    pub fast: f64,
    /// `24/(pi^3 E) |int A(psi/sqrt E) cos(4 pi psi - pi/2)/psi dpsi|`.
    pub slow: f64,
    /// The 3/8 channel: `18/(pi^3 E) int A/psi dpsi`.
    pub constant_channel: f64,
    /// Full modulated integral `48/(pi^3 E) int A cos^4(2 pi psi - pi/4)/psi`.
    pub full: f64,
    /// Unmodulated integral `48/(pi^3 E) int A/psi dpsi`.
    pub unmodulated: f64,
}

pub fn oscillatory_remainder_check(energy: f64, d: &Domain) -> Result<OscillatoryRemainder> {
    check_energy_above_one(energy)?;
    let se = energy.sqrt();
    let x_max = se * d.diam();
    let mut fast = 0.0;
    let mut slow = 0.0;
    let mut flat = 0.0;
    let mut full = 0.0;
    if x_max > 1.0 {
        let n = ((x_max - 1.0) * RADIAL_POINTS_PER_UNIT as f64).ceil() as usize;
        let n = if n % 2 == 0 { n } else { n + 1 };
        let h = (x_max - 1.0) / n as f64;
        for i in 0..=n {
            let psi = 1.0 + i as f64 * h;
            let w = simpson_weight(i, n) * h;
            let a = overlap_after_erosion(d, d, psi / se)?;
            if a == 0.0 {
                continue;
            }
            let base = w * a / psi;
            fast += base * (8.0 * PI * psi - PI).cos();
            slow += base * (4.0 * PI * psi - PI / 2.0).cos();
            flat += base;
            full += base * (2.0 * PI * psi - PI / 4.0).cos().powi(4);
        }
    }
    let unit = 1.0 / (PI.powi(3) * energy);
    Ok(OscillatoryRemainder {
        fast: (6.0 * fast).abs() * unit,
        slow: (24.0 * slow).abs() * unit,
        constant_channel: 18.0 * flat * unit,
        full: 48.0 * full * unit,
        unmodulated: 48.0 * flat * unit,
    })
}

/// Closed-form predictions of the means, variances and the limiting
/// correlation matrix for a family of domains.
#[derive(Clone, Debug)]
pub struct Predictions {
    pub mean_length: Vec<f64>,
    pub mean_count: Vec<f64>,
    pub var_length: Vec<f64>,
    pub var_count: Vec<f64>,
    /// `C_{ij} = area(D_i cap D_j) / sqrt(area(D_i) area(D_j))`.
    pub c_matrix: Vec<Vec<f64>>,
}

pub fn predictions(energy: f64, domains: &[Domain]) -> Result<Predictions> {
    check_energy_above_one(energy)?;
    let m = domains.len();
    let mut p = Predictions {
        mean_length: Vec::with_capacity(m),
        mean_count: Vec::with_capacity(m),
        var_length: Vec::with_capacity(m),
        var_count: Vec::with_capacity(m),
        c_matrix: vec![vec![0.0; m]; m],
    };
    for d in domains {
        let area = d.area();
        p.mean_length.push(area * PI * (energy / 2.0).sqrt());
        p.mean_count.push(area * PI * energy);
        p.var_length.push(area * energy.ln() / (512.0 * PI));
        p.var_count.push(11.0 * area * energy * energy.ln() / (32.0 * PI));
    }
    for i in 0..m {
        for j in 0..m {
            p.c_matrix[i][j] = geometry::intersection_area(&domains[i], &domains[j])
                / (domains[i].area() * domains[j].area()).sqrt();
        }
    }
    Ok(p)
}

/// Exact mean formula `area * pi sqrt(E/2)` (valid at every `E > 0`).
pub fn mean_length(energy: f64, area: f64) -> f64 {
    area * PI * (energy / 2.0).sqrt()
}

pub fn mean_count(energy: f64, area: f64) -> f64 {
    area * PI * energy
}

/// Exact finite-E variance of a combination functional on a rectangle via
/// the set covariance `rho(z) = prod (w_i - |z_i|)_+`:
/// `Var = (1/E) int rho(psi/sqrt E) W(psi, theta) psi dpsi dtheta`.
pub fn variance_of_combination(poly: &KernelPoly, d: &Domain, energy: f64) -> Result<f64> {
    let Domain::Rectangle { widths, .. } = d else {
        return Err(BerryError::Unsupported(
            "exact variance quadrature is implemented for rectangles".into(),
        ));
    };
    let se = energy.sqrt();
    let x_max = se * d.diam();
    let n = (x_max * RADIAL_POINTS_PER_UNIT as f64).ceil() as usize;
    let n = if n % 2 == 0 { n } else { n + 1 };
    let h = x_max / n as f64;
    let dth = 0.5 * PI / ANGULAR_NODES as f64;
    let mut total = 0.0;
    for i in 0..=n {
        let psi = i as f64 * h;
        let w = simpson_weight(i, n) * h;
        let u = 2.0 * PI * psi;
        let j = if psi < 1e-14 {
            [1.0, 0.0, 0.0]
        } else {
            crate::specfun::bessel_j012(u)?
        };
        // the set covariance of a rectangle and the kernel polynomial are
        // both symmetric under quadrant reflections: integrate a quarter
        let mut ang = 0.0;
        for t in 0..ANGULAR_NODES {
            let theta = (t as f64 + 0.5) * dth;
            let z = [psi / se * theta.cos(), psi / se * theta.sin()];
            let rho = (widths[0] - z[0].abs()).max(0.0) * (widths[1] - z[1].abs()).max(0.0);
            if rho == 0.0 {
                continue;
            }
            ang += rho * poly.eval_polar(j, theta);
        }
        total += w * ang * 4.0 * dth * psi;
    }
    Ok(total / energy)
}
