//! Realizations of the random plane wave with energy parameter `E`
//! (wavenumber `k = 2 pi sqrt(E)`).
//!
//! Three samplers are provided:
//!
//! * `gaussian-spectral` — `B(x) = J^{-1/2} sum_j (xi_j cos(k<x,w_j>) +
//!   eta_j sin(k<x,w_j>))` with standard Gaussian pairs and directions on the
//!   half-circle. Exactly Gaussian for every `J`, pointwise variance exactly
//!   1, covariance a trapezoid approximation of `J0` that is spectrally
//!   accurate while `k |x-y|` stays below `2J`.
//! * `berry-phase` — the non-Gaussian superposition
//!   `sqrt(2/J) sum_j cos(k<x,w_j> + phi_j)` with i.i.d. uniform directions
//!   and phases.
//! * `bessel-series` — the polar expansion
//!   `Re sum_m a_m J_|m|(kr) e^{im theta}` truncated at `|m| <= M`, valid on
//!   a disk around the origin where the discarded orders are negligible.
//!
//! Realizations are immutable; evaluation is pure. All randomness is drawn
//! from a ChaCha12 stream seeded by the spec, so identical specs produce
//! bit-identical realizations.

use crate::grid::{Grid, GridField};
use crate::specfun::bessel_j_sequence;
use crate::{BerryError, Result};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Seed offset separating the imaginary component of the complex wave.
pub const COMPLEX_SEED_XOR: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WaveModel {
    GaussianSpectral,
    BerryPhase,
    BesselSeries,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DirectionRule {
    Equispaced,
    UniformRandom,
}

/// Everything needed to draw one realization.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WaveSpec {
    pub energy: f64,
    /// Number of plane-wave directions `J` (ignored by `bessel-series`).
    pub directions: usize,
    pub model: WaveModel,
    pub direction_rule: DirectionRule,
    /// Truncation order `M` for `bessel-series`.
    pub series_truncation: usize,
    pub seed: u64,
}

impl WaveSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.energy > 0.0) || !self.energy.is_finite() {
            return Err(BerryError::invalid(format!(
                "energy must be > 0, got {}",
                self.energy
            )));
        }
        if self.directions == 0 {
            return Err(BerryError::invalid("need at least one direction"));
        }
        if self.series_truncation == 0 {
            return Err(BerryError::invalid("series truncation must be >= 1"));
        }
        Ok(())
    }

    pub fn wavenumber(&self) -> f64 {
        2.0 * PI * self.energy.sqrt()
    }

    pub fn with_seed(&self, seed: u64) -> WaveSpec {
        WaveSpec { seed, ..self.clone() }
    }
}

impl Default for WaveSpec {
    fn default() -> Self {
        WaveSpec {
            energy: 1.0,
            directions: 256,
            model: WaveModel::GaussianSpectral,
            direction_rule: DirectionRule::Equispaced,
            series_truncation: 64,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
enum Realization {
    PlaneWaves {
        /// Unit direction vectors.
        dirs: Vec<[f64; 2]>,
        amp_cos: Vec<f64>,
        amp_sin: Vec<f64>,
    },
    BesselSeries {
        /// Cosine/sine coefficients per order `m = 0..=M`.
        coef_cos: Vec<f64>,
        coef_sin: Vec<f64>,
        validity_radius: f64,
    },
}

/// A frozen sample of the wave, evaluable anywhere (plane-wave models) or on
/// its validity disk (series model).
#[derive(Clone, Debug)]
pub struct WaveRealization {
    energy: f64,
    k: f64,
    inner: Realization,
}

impl WaveRealization {
    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn wavenumber(&self) -> f64 {
        self.k
    }

    /// Validity radius of the series model; plane waves are global.
    pub fn validity_radius(&self) -> f64 {
        match &self.inner {
            Realization::PlaneWaves { .. } => f64::INFINITY,
            Realization::BesselSeries { validity_radius, .. } => *validity_radius,
        }
    }

    pub fn value(&self, x: [f64; 2]) -> Result<f64> {
        Ok(self.value_and_gradient(x)?.0)
    }

    pub fn gradient(&self, x: [f64; 2]) -> Result<[f64; 2]> {
        Ok(self.value_and_gradient(x)?.1)
    }

    pub fn value_and_gradient(&self, x: [f64; 2]) -> Result<(f64, [f64; 2])> {
        match &self.inner {
            Realization::PlaneWaves { dirs, amp_cos, amp_sin } => {
                let mut v = 0.0;
                let mut gx = 0.0;
                let mut gy = 0.0;
                for (j, w) in dirs.iter().enumerate() {
                    let phase = self.k * (w[0] * x[0] + w[1] * x[1]);
                    let (s, c) = phase.sin_cos();
                    v += amp_cos[j] * c + amp_sin[j] * s;
                    let t = self.k * (amp_sin[j] * c - amp_cos[j] * s);
                    gx += t * w[0];
                    gy += t * w[1];
                }
                Ok((v, [gx, gy]))
            }
            Realization::BesselSeries { coef_cos, coef_sin, validity_radius } => {
                let r = x[0].hypot(x[1]);
                if r > *validity_radius {
                    return Err(BerryError::OutOfDomain(format!(
                        "point at radius {r} outside series validity radius {validity_radius}"
                    )));
                }
                Ok(self.series_value_grad(x, coef_cos, coef_sin))
            }
        }
    }

    /// Laplacian from per-direction analytic second derivatives. Each plane
    /// wave solves the Helmholtz equation, so this must equal `-k^2 value`.
    pub fn laplacian(&self, x: [f64; 2]) -> Result<f64> {
        match &self.inner {
            Realization::PlaneWaves { dirs, amp_cos, amp_sin } => {
                let mut lap = 0.0;
                for (j, w) in dirs.iter().enumerate() {
                    let phase = self.k * (w[0] * x[0] + w[1] * x[1]);
                    let (s, c) = phase.sin_cos();
                    let wsq = w[0] * w[0] + w[1] * w[1];
                    lap -= self.k * self.k * wsq * (amp_cos[j] * c + amp_sin[j] * s);
                }
                Ok(lap)
            }
            Realization::BesselSeries { .. } => Err(BerryError::Unsupported(
                "laplacian is provided for plane-wave models only".into(),
            )),
        }
    }

    fn series_value_grad(
        &self,
        x: [f64; 2],
        coef_cos: &[f64],
        coef_sin: &[f64],
    ) -> (f64, [f64; 2]) {
        let m_max = coef_cos.len() - 1;
        let r = x[0].hypot(x[1]);
        let k = self.k;
        if r < 1e-12 / k.max(1.0) {
            // only m = 0 contributes to the value, m = 1 to the gradient
            let v = coef_cos[0];
            let g = if m_max >= 1 {
                [0.5 * k * coef_cos[1], 0.5 * k * coef_sin[1]]
            } else {
                [0.0, 0.0]
            };
            return (v, g);
        }
        let theta = x[1].atan2(x[0]);
        let js = bessel_j_sequence(m_max + 1, k * r);
        let mut v = 0.0;
        let mut dvdr = 0.0;
        let mut dvdth = 0.0;
        for m in 0..=m_max {
            let (smt, cmt) = (m as f64 * theta).sin_cos();
            let ang = coef_cos[m] * cmt + coef_sin[m] * smt;
            let dang = m as f64 * (coef_sin[m] * cmt - coef_cos[m] * smt);
            let jm = js[m];
            // J_m'(u) = (J_{m-1}(u) - J_{m+1}(u)) / 2, with J_{-1} = -J_1
            let jprev = if m == 0 { -js[1] } else { js[m - 1] };
            let jd = 0.5 * (jprev - js[m + 1]);
            v += jm * ang;
            dvdr += k * jd * ang;
            dvdth += jm * dang;
        }
        let (st, ct) = theta.sin_cos();
        let gx = ct * dvdr - st * dvdth / r;
        let gy = st * dvdr + ct * dvdth / r;
        (v, [gx, gy])
    }
}

/// Draw one realization per the spec (seeded internally).
pub fn sample_wave(spec: &WaveSpec) -> Result<WaveRealization> {
    spec.validate()?;
    let mut rng = ChaCha12Rng::seed_from_u64(spec.seed);
    let k = spec.wavenumber();
    let inner = match spec.model {
        WaveModel::GaussianSpectral => {
            let j = spec.directions;
            let norm = 1.0 / (j as f64).sqrt();
            let mut dirs = Vec::with_capacity(j);
            let mut amp_cos = Vec::with_capacity(j);
            let mut amp_sin = Vec::with_capacity(j);
            for idx in 0..j {
                let theta = match spec.direction_rule {
                    // cos is even in the direction, so the half-circle carries
                    // the full spectral measure
                    DirectionRule::Equispaced => PI * (idx as f64 + 0.5) / j as f64,
                    DirectionRule::UniformRandom => rng.gen::<f64>() * PI,
                };
                dirs.push([theta.cos(), theta.sin()]);
                let xi: f64 = rng.sample(StandardNormal);
                let eta: f64 = rng.sample(StandardNormal);
                amp_cos.push(norm * xi);
                amp_sin.push(norm * eta);
            }
            Realization::PlaneWaves { dirs, amp_cos, amp_sin }
        }
        WaveModel::BerryPhase => {
            let j = spec.directions;
            let norm = (2.0 / j as f64).sqrt();
            let mut dirs = Vec::with_capacity(j);
            let mut amp_cos = Vec::with_capacity(j);
            let mut amp_sin = Vec::with_capacity(j);
            for _ in 0..j {
                let theta = rng.gen::<f64>() * 2.0 * PI;
                let phi = rng.gen::<f64>() * 2.0 * PI;
                dirs.push([theta.cos(), theta.sin()]);
                // cos(P + phi) = cos(phi) cos(P) - sin(phi) sin(P)
                amp_cos.push(norm * phi.cos());
                amp_sin.push(-norm * phi.sin());
            }
            Realization::PlaneWaves { dirs, amp_cos, amp_sin }
        }
        WaveModel::BesselSeries => {
            let radius = default_series_radius(spec.energy, spec.series_truncation);
            return sample_bessel_series(spec.energy, spec.series_truncation, spec.seed, radius);
        }
    };
    Ok(WaveRealization { energy: spec.energy, k, inner })
}

/// Real and imaginary parts of the complex wave: independent copies drawn
/// from `seed` and `seed ^ COMPLEX_SEED_XOR`.
#[derive(Clone, Debug)]
pub struct ComplexWave {
    pub re: WaveRealization,
    pub im: WaveRealization,
}

pub fn sample_complex(spec: &WaveSpec) -> Result<ComplexWave> {
    let re = sample_wave(spec)?;
    let im = sample_wave(&spec.with_seed(spec.seed ^ COMPLEX_SEED_XOR))?;
    Ok(ComplexWave { re, im })
}

/// Largest disk radius on which an order-`M` truncation is accurate.
pub fn default_series_radius(energy: f64, truncation: usize) -> f64 {
    let k = 2.0 * PI * energy.sqrt();
    let m = truncation as f64;
    // discarded orders need J_M(k r) ~ 0: stay below the turning point
    let u = (m - 3.2 * m.cbrt() - 4.0).max(0.0);
    u / k
}

/// Truncated polar series realization, valid on the disk of the given radius
/// around the origin.
///
/// Requires `J_M(k * disk_radius) < 1e-12`: the first discarded order must be
/// negligible on the whole disk.
pub fn sample_bessel_series(
    energy: f64,
    truncation: usize,
    seed: u64,
    disk_radius: f64,
) -> Result<WaveRealization> {
    if !(energy > 0.0) || truncation == 0 || !(disk_radius > 0.0) {
        return Err(BerryError::invalid(
            "series sampler needs energy > 0, truncation >= 1, radius > 0",
        ));
    }
    let k = 2.0 * PI * energy.sqrt();
    let edge = bessel_j_sequence(truncation, k * disk_radius)[truncation].abs();
    if edge >= 1e-12 {
        return Err(BerryError::invalid(format!(
            "truncation {truncation} too small for radius {disk_radius}: |J_M(kR)| = {edge:.3e}"
        )));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let m = truncation;
    let mut coef_cos = Vec::with_capacity(m + 1);
    let mut coef_sin = Vec::with_capacity(m + 1);
    // a_m complex Gaussian with E|a_m|^2 = 2; collapsing +-m onto cos/sin
    // gives N(0,1) at m = 0 and N(0,2) pairs for m >= 1
    coef_cos.push(rng.sample::<f64, _>(StandardNormal));
    coef_sin.push(0.0);
    for _ in 1..=m {
        let g1: f64 = rng.sample(StandardNormal);
        let g2: f64 = rng.sample(StandardNormal);
        coef_cos.push(std::f64::consts::SQRT_2 * g1);
        coef_sin.push(std::f64::consts::SQRT_2 * g2);
    }
    Ok(WaveRealization {
        energy,
        k,
        inner: Realization::BesselSeries { coef_cos, coef_sin, validity_radius: disk_radius },
    })
}

/// Evaluate a realization on a grid; bit-reproducible for a fixed
/// (realization, grid) pair.
///
/// Plane-wave sums are evaluated with per-row angle recurrences: one
/// `sin_cos` per (direction, row), then a complex rotation per cell.
pub fn eval_grid(w: &WaveRealization, grid: &Grid, with_gradients: bool) -> Result<GridField> {
    if grid.len() == 0 {
        return Err(BerryError::invalid("empty grid"));
    }
    match &w.inner {
        Realization::PlaneWaves { dirs, amp_cos, amp_sin } => {
            let n = grid.len();
            let mut values = vec![0.0f64; n];
            let mut grad = if with_gradients {
                Some((vec![0.0f64; n], vec![0.0f64; n]))
            } else {
                None
            };
            let k = w.k;
            let step = grid.step;
            let mut row_v = vec![0.0f64; grid.nx];
            let mut row_gx = vec![0.0f64; grid.nx];
            let mut row_gy = vec![0.0f64; grid.nx];
            for iy in 0..grid.ny {
                row_v.iter_mut().for_each(|v| *v = 0.0);
                if with_gradients {
                    row_gx.iter_mut().for_each(|v| *v = 0.0);
                    row_gy.iter_mut().for_each(|v| *v = 0.0);
                }
                let y = grid.origin[1] + iy as f64 * step;
                for (j, dir) in dirs.iter().enumerate() {
                    let (ac, asn) = (amp_cos[j], amp_sin[j]);
                    let phase0 = k * (dir[0] * grid.origin[0] + dir[1] * y);
                    let (mut s, mut c) = phase0.sin_cos();
                    let (ds, dc) = (k * dir[0] * step).sin_cos();
                    let (kw0, kw1) = (k * dir[0], k * dir[1]);
                    if with_gradients {
                        for ix in 0..grid.nx {
                            row_v[ix] += ac * c + asn * s;
                            let t = asn * c - ac * s;
                            row_gx[ix] += kw0 * t;
                            row_gy[ix] += kw1 * t;
                            let c2 = c * dc - s * ds;
                            s = s * dc + c * ds;
                            c = c2;
                        }
                    } else {
                        for ix in 0..grid.nx {
                            row_v[ix] += ac * c + asn * s;
                            let c2 = c * dc - s * ds;
                            s = s * dc + c * ds;
                            c = c2;
                        }
                    }
                }
                let base = grid.index(0, iy);
                values[base..base + grid.nx].copy_from_slice(&row_v);
                if let Some((gx, gy)) = grad.as_mut() {
                    gx[base..base + grid.nx].copy_from_slice(&row_gx);
                    gy[base..base + grid.nx].copy_from_slice(&row_gy);
                }
            }
            Ok(GridField { grid: grid.clone(), values, grad, energy: Some(w.energy) })
        }
        Realization::BesselSeries { validity_radius, .. } => {
            // reject grids poking outside the validity disk
            let corners = [
                grid.point(0, 0),
                grid.point(grid.nx - 1, 0),
                grid.point(0, grid.ny - 1),
                grid.point(grid.nx - 1, grid.ny - 1),
            ];
            for cpt in corners {
                if cpt[0].hypot(cpt[1]) > *validity_radius {
                    return Err(BerryError::OutOfDomain(format!(
                        "grid corner at radius {} outside validity radius {validity_radius}",
                        cpt[0].hypot(cpt[1])
                    )));
                }
            }
            let n = grid.len();
            let mut values = vec![0.0f64; n];
            let mut grad = if with_gradients {
                Some((vec![0.0f64; n], vec![0.0f64; n]))
            } else {
                None
            };
            for iy in 0..grid.ny {
                for ix in 0..grid.nx {
                    let p = grid.point(ix, iy);
                    let (v, g) = w.value_and_gradient(p)?;
                    let idx = grid.index(ix, iy);
                    values[idx] = v;
                    if let Some((gx, gy)) = grad.as_mut() {
                        gx[idx] = g[0];
                        gy[idx] = g[1];
                    }
                }
            }
            Ok(GridField { grid: grid.clone(), values, grad, energy: Some(w.energy) })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mean_and_var(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let m = xs.iter().sum::<f64>() / n;
        let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
        (m, v)
    }

    #[test]
    fn spec_validation() {
        let mut spec = WaveSpec::default();
        spec.directions = 0;
        assert!(sample_wave(&spec).is_err());
        let mut spec = WaveSpec::default();
        spec.energy = -1.0;
        assert!(sample_wave(&spec).is_err());
    }

    #[test]
    fn determinism_same_seed_same_bytes() {
        let spec = WaveSpec { seed: 1234, ..WaveSpec::default() };
        let w1 = sample_wave(&spec).unwrap();
        let w2 = sample_wave(&spec).unwrap();
        let grid = Grid::new([0.0, 0.0], 0.05, 21, 21).unwrap();
        let f1 = eval_grid(&w1, &grid, true).unwrap();
        let f2 = eval_grid(&w2, &grid, true).unwrap();
        assert_eq!(f1.values, f2.values);
        assert_eq!(f1.grad.unwrap().0, f2.grad.unwrap().0);
    }

    #[test]
    fn gaussian_spectral_pointwise_variance_is_one() {
        let x = [0.37, -0.81];
        let mut vals = Vec::new();
        for seed in 0..20_000u64 {
            let spec = WaveSpec { seed, energy: 2.0, directions: 32, ..WaveSpec::default() };
            vals.push(sample_wave(&spec).unwrap().value(x).unwrap());
        }
        let (m, v) = mean_and_var(&vals);
        let n = vals.len() as f64;
        // SE(mean) = 1/sqrt(n), SE(var) ~ sqrt(2/n)
        assert!(m.abs() < 3.0 / n.sqrt(), "mean {m}");
        assert!((v - 1.0).abs() < 3.0 * (2.0 / n).sqrt(), "var {v}");
    }

    #[test]
    fn berry_phase_mean_is_zero() {
        let x = [0.2, 0.9];
        let mut vals = Vec::new();
        for seed in 0..20_000u64 {
            let spec = WaveSpec {
                seed,
                energy: 1.0,
                directions: 16,
                model: WaveModel::BerryPhase,
                ..WaveSpec::default()
            };
            vals.push(sample_wave(&spec).unwrap().value(x).unwrap());
        }
        let (m, v) = mean_and_var(&vals);
        assert!(m.abs() < 3.0 * (v / vals.len() as f64).sqrt(), "mean {m}");
        assert!((v - 1.0).abs() < 0.05, "var {v}");
    }

    #[test]
    fn spectral_covariance_matches_bessel_kernel() {
        // Cov(B(x), B(y)) at |x - y| = 0.3, E = 1 should be J0(0.6 pi)
        let x = [0.1, 0.4];
        let y = [0.4, 0.4];
        let mut prods = Vec::new();
        for seed in 0..40_000u64 {
            let spec = WaveSpec { seed, energy: 1.0, directions: 64, ..WaveSpec::default() };
            let w = sample_wave(&spec).unwrap();
            prods.push(w.value(x).unwrap() * w.value(y).unwrap());
        }
        let (m, v) = mean_and_var(&prods);
        let expected = crate::specfun::bessel_j(0, 0.6 * PI).unwrap();
        let se = (v / prods.len() as f64).sqrt();
        assert!(
            (m - expected).abs() < 3.0 * se,
            "cov {m} vs {expected} (se {se})"
        );
    }

    #[test]
    fn complex_parts_are_uncorrelated() {
        let x = [0.7, 0.2];
        let mut prods = Vec::new();
        for seed in 0..10_000u64 {
            let spec = WaveSpec { seed, energy: 1.0, directions: 32, ..WaveSpec::default() };
            let c = sample_complex(&spec).unwrap();
            prods.push(c.re.value(x).unwrap() * c.im.value(x).unwrap());
        }
        let (m, v) = mean_and_var(&prods);
        assert!(m.abs() < 3.0 * (v / prods.len() as f64).sqrt(), "corr {m}");
    }

    #[test]
    fn gradient_matches_central_differences() {
        for model in [WaveModel::GaussianSpectral, WaveModel::BerryPhase] {
            let spec = WaveSpec { seed: 7, energy: 25.0, directions: 64, model, ..WaveSpec::default() };
            let w = sample_wave(&spec).unwrap();
            let h = 1e-6 / spec.energy.sqrt();
            for &x in &[[0.3, 0.4], [-0.2, 0.8], [1.1, -0.6]] {
                let g = w.gradient(x).unwrap();
                let fd0 = (w.value([x[0] + h, x[1]]).unwrap()
                    - w.value([x[0] - h, x[1]]).unwrap())
                    / (2.0 * h);
                let fd1 = (w.value([x[0], x[1] + h]).unwrap()
                    - w.value([x[0], x[1] - h]).unwrap())
                    / (2.0 * h);
                let scale = (g[0].hypot(g[1])).max(1.0);
                assert!((g[0] - fd0).abs() / scale < 1e-6, "{} vs {fd0}", g[0]);
                assert!((g[1] - fd1).abs() / scale < 1e-6, "{} vs {fd1}", g[1]);
            }
        }
    }

    #[test]
    fn helmholtz_identity() {
        let spec = WaveSpec { seed: 3, energy: 4.0, directions: 48, ..WaveSpec::default() };
        let w = sample_wave(&spec).unwrap();
        let ksq = w.wavenumber() * w.wavenumber();
        for &x in &[[0.0, 0.0], [0.3, -0.7], [2.0, 1.5]] {
            let v = w.value(x).unwrap();
            let lap = w.laplacian(x).unwrap();
            assert!(
                (lap + ksq * v).abs() <= 1e-8 * (ksq * v.abs()).max(1e-8),
                "laplacian {lap} vs {}",
                -ksq * v
            );
        }
    }

    #[test]
    fn eval_grid_matches_direct_sum() {
        let spec = WaveSpec { seed: 11, energy: 100.0, directions: 64, ..WaveSpec::default() };
        let w = sample_wave(&spec).unwrap();
        let grid = Grid::new([-0.2, 0.1], 1.0 / 256.0, 257, 257).unwrap();
        let field = eval_grid(&w, &grid, true).unwrap();
        let (gx, gy) = field.grad.as_ref().unwrap();
        let mut max_dev = 0.0f64;
        for &(ix, iy) in &[(0usize, 0usize), (256, 0), (128, 197), (3, 255), (255, 255)] {
            let p = grid.point(ix, iy);
            let (v, g) = w.value_and_gradient(p).unwrap();
            let idx = grid.index(ix, iy);
            max_dev = max_dev.max((field.values[idx] - v).abs());
            max_dev = max_dev.max((gx[idx] - g[0]).abs() / w.wavenumber());
            max_dev = max_dev.max((gy[idx] - g[1]).abs() / w.wavenumber());
        }
        assert!(max_dev < 1e-10, "max deviation {max_dev}");
    }

    #[test]
    fn single_point_grid_equals_value() {
        let spec = WaveSpec { seed: 5, ..WaveSpec::default() };
        let w = sample_wave(&spec).unwrap();
        let grid = Grid::new([0.33, -0.7], 1.0, 1, 1).unwrap();
        let f = eval_grid(&w, &grid, false).unwrap();
        assert_eq!(f.values[0], w.value([0.33, -0.7]).unwrap());
    }

    #[test]
    fn series_variance_at_origin_is_one() {
        let mut vals = Vec::new();
        for seed in 0..20_000u64 {
            let w = sample_bessel_series(1.0, 24, seed, 1.0).unwrap();
            vals.push(w.value([0.0, 0.0]).unwrap());
        }
        let (_, v) = mean_and_var(&vals);
        assert!((v - 1.0).abs() < 3.0 * (2.0 / vals.len() as f64).sqrt(), "var {v}");
    }

    #[test]
    fn series_covariance_matches_kernel() {
        let x = [0.25, 0.1];
        let y = [-0.1, -0.2];
        let mut prods = Vec::new();
        for seed in 0..20_000u64 {
            let w = sample_bessel_series(1.0, 24, seed, 0.8).unwrap();
            prods.push(w.value(x).unwrap() * w.value(y).unwrap());
        }
        let (m, v) = mean_and_var(&prods);
        let d = (x[0] - y[0]).hypot(x[1] - y[1]);
        let expected = crate::specfun::kernel_r(1.0, [d, 0.0]).unwrap();
        let se = (v / prods.len() as f64).sqrt();
        assert!((m - expected).abs() < 3.0 * se, "cov {m} vs {expected}");
    }

    #[test]
    fn series_rejects_outside_validity() {
        let w = sample_bessel_series(1.0, 24, 1, 0.8).unwrap();
        assert!(w.value([0.9, 0.0]).is_err());
        assert!(w.value([0.5, 0.0]).is_ok());
    }

    #[test]
    fn series_truncation_precondition() {
        // M = 8 is far too small for a disk of radius 2 at E = 1 (kR ~ 12.6)
        assert!(sample_bessel_series(1.0, 8, 1, 2.0).is_err());
    }

    #[test]
    fn series_gradient_matches_central_differences() {
        let w = sample_bessel_series(4.0, 40, 9, 0.6).unwrap();
        let h = 1e-6 / 2.0;
        for &x in &[[0.2, 0.1], [-0.3, 0.25], [0.0, 0.0]] {
            let g = w.gradient(x).unwrap();
            let fd0 =
                (w.value([x[0] + h, x[1]]).unwrap() - w.value([x[0] - h, x[1]]).unwrap()) / (2.0 * h);
            let fd1 =
                (w.value([x[0], x[1] + h]).unwrap() - w.value([x[0], x[1] - h]).unwrap()) / (2.0 * h);
            let scale = g[0].hypot(g[1]).max(1.0);
            assert!((g[0] - fd0).abs() / scale < 1e-5, "{} vs {fd0}", g[0]);
            assert!((g[1] - fd1).abs() / scale < 1e-5, "{} vs {fd1}", g[1]);
        }
    }

    #[test]
    fn isotropy_with_random_directions() {
        // covariance depends only on |x - y| for uniform-random directions
        let d = 0.4;
        let pairs = [
            ([0.0, 0.0], [d, 0.0]),
            ([0.0, 0.0], [d / 2.0f64.sqrt(), d / 2.0f64.sqrt()]),
        ];
        let mut means = Vec::new();
        let mut ses = Vec::new();
        for (x, y) in pairs {
            let mut prods = Vec::new();
            for seed in 0..20_000u64 {
                let spec = WaveSpec {
                    seed,
                    energy: 1.0,
                    directions: 32,
                    direction_rule: DirectionRule::UniformRandom,
                    ..WaveSpec::default()
                };
                let w = sample_wave(&spec).unwrap();
                prods.push(w.value(x).unwrap() * w.value(y).unwrap());
            }
            let (m, v) = mean_and_var(&prods);
            means.push(m);
            ses.push((v / prods.len() as f64).sqrt());
        }
        let diff = (means[0] - means[1]).abs();
        let se = (ses[0] * ses[0] + ses[1] * ses[1]).sqrt();
        assert!(diff < 3.0 * se, "anisotropy {diff} vs se {se}");
    }
}
