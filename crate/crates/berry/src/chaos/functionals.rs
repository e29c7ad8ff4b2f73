//! Second and fourth chaotic components of the nodal length and vortex
//! count, evaluated on sampled realizations.

use super::hermite;
use crate::geometry::Domain;
use crate::grid::GridField;
use crate::sampler::WaveRealization;
use crate::specfun::gradient_variance;
use crate::{BerryError, Result};
use std::f64::consts::PI;

/// Combination weights of the six length functionals inside the fourth
/// chaos: `8 a1 - a2 - a3 - 2 a4 - 8 a5 - 8 a6`.
pub const LENGTH_A_WEIGHTS: [f64; 6] = [8.0, -1.0, -1.0, -2.0, -8.0, -8.0];

/// Combination weights of the ten mixed count functionals:
/// `2 b1 - b2 - b3 - b4 - b5 - b6/4 - b7/4 + 5 b8/4 + 5 b9/4 - 3 b10`.
pub const COUNT_B_WEIGHTS: [f64; 10] =
    [2.0, -1.0, -1.0, -1.0, -1.0, -0.25, -0.25, 1.25, 1.25, -3.0];

pub fn length_fourth_combination(a: &[f64; 6]) -> f64 {
    LENGTH_A_WEIGHTS.iter().zip(a).map(|(w, v)| w * v).sum()
}

/// One chaotic component together with its constituent functionals.
#[derive(Clone, Debug)]
pub struct ChaosComponent {
    /// Chaos order (2 or 4).
    pub order: u32,
    pub value: f64,
    pub constituents: Constituents,
}

#[derive(Clone, Debug)]
pub enum Constituents {
    /// `a1..a6` of the length projection.
    Length { a: [f64; 6] },
    /// `a`-vectors of both components plus the mixed `b1..b10`.
    Count { a: [f64; 6], a_hat: [f64; 6], b: [f64; 10] },
}

fn require_resolution(field: &GridField) -> Result<f64> {
    let energy = field.energy.ok_or_else(|| {
        BerryError::invalid("field carries no energy metadata; cannot check resolution")
    })?;
    let max_step = 1.0 / (8.0 * energy.sqrt());
    if field.grid.step > max_step * (1.0 + 1e-9) {
        return Err(BerryError::Resolution(format!(
            "grid step {} exceeds 1/(8 sqrt(E)) = {max_step} at E = {energy}",
            field.grid.step
        )));
    }
    Ok(energy)
}

/// Per-node values of the six length integrands: `H4(B)`, `H4(t1)`,
/// `H4(t2)`, `H2(t1)H2(t2)`, `H2(B)H2(t1)`, `H2(B)H2(t2)` with `t_i` the
/// normalized gradient components.
pub fn length_integrand_fields(field: &GridField) -> Result<[Vec<f64>; 6]> {
    let energy = field.energy.ok_or_else(|| BerryError::invalid("field has no energy"))?;
    let (gx, gy) = field
        .grad
        .as_ref()
        .ok_or_else(|| BerryError::invalid("chaos functionals need gradients"))?;
    let inv_sd = 1.0 / gradient_variance(energy).sqrt();
    let n = field.values.len();
    let mut out = [
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
    ];
    for i in 0..n {
        let b = field.values[i];
        let t1 = gx[i] * inv_sd;
        let t2 = gy[i] * inv_sd;
        let h2b = b * b - 1.0;
        let h2t1 = t1 * t1 - 1.0;
        let h2t2 = t2 * t2 - 1.0;
        out[0].push(hermite(4, b));
        out[1].push(hermite(4, t1));
        out[2].push(hermite(4, t2));
        out[3].push(h2t1 * h2t2);
        out[4].push(h2b * h2t1);
        out[5].push(h2b * h2t2);
    }
    Ok(out)
}

fn masked_sums<const N: usize>(
    fields: &[Vec<f64>; N],
    grid_field: &GridField,
    d: &Domain,
) -> [f64; N] {
    let grid = &grid_field.grid;
    let weight = grid.step * grid.step;
    let mut sums = [0.0f64; N];
    for iy in 0..grid.ny {
        for ix in 0..grid.nx {
            let p = grid.point(ix, iy);
            if !d.contains(p) {
                continue;
            }
            let idx = grid.index(ix, iy);
            for k in 0..N {
                sums[k] += fields[k][idx];
            }
        }
    }
    for s in sums.iter_mut() {
        *s *= weight;
    }
    sums
}

/// Fourth chaotic component of the nodal length on `d`.
///
/// The grid nodes are treated as midpoint quadrature samples with weight
/// `step^2`; the domain enters through the point-in-domain indicator.
pub fn fourth_chaos_length(field: &GridField, d: &Domain) -> Result<ChaosComponent> {
    let energy = require_resolution(field)?;
    let fields = length_integrand_fields(field)?;
    let a = masked_sums(&fields, field, d);
    let value = (gradient_variance(energy)).sqrt() / 128.0 * length_fourth_combination(&a);
    Ok(ChaosComponent { order: 4, value, constituents: Constituents::Length { a } })
}

/// Fourth chaotic component of the vortex count on `d`.
///
/// `a` and `a_hat` are the pure-component parts (prefactor `pi E / 64`), `b`
/// the mixed part (prefactor `pi E / 8`).
pub fn fourth_chaos_count(
    re: &GridField,
    im: &GridField,
    d: &Domain,
) -> Result<ChaosComponent> {
    let energy = require_resolution(re)?;
    require_resolution(im)?;
    if re.grid != im.grid {
        return Err(BerryError::invalid("component grids do not match"));
    }
    let fields_re = length_integrand_fields(re)?;
    let fields_im = length_integrand_fields(im)?;
    let a = masked_sums(&fields_re, re, d);
    let a_hat = masked_sums(&fields_im, im, d);

    let (gx, gy) = re.grad.as_ref().unwrap();
    let (hx, hy) = im.grad.as_ref().unwrap();
    let inv_sd = 1.0 / gradient_variance(energy).sqrt();
    let grid = &re.grid;
    let weight = grid.step * grid.step;
    let mut b = [0.0f64; 10];
    for iy in 0..grid.ny {
        for ix in 0..grid.nx {
            let p = grid.point(ix, iy);
            if !d.contains(p) {
                continue;
            }
            let idx = grid.index(ix, iy);
            let bb = re.values[idx];
            let bh = im.values[idx];
            let t1 = gx[idx] * inv_sd;
            let t2 = gy[idx] * inv_sd;
            let s1 = hx[idx] * inv_sd;
            let s2 = hy[idx] * inv_sd;
            let h2b = bb * bb - 1.0;
            let h2bh = bh * bh - 1.0;
            let h2t1 = t1 * t1 - 1.0;
            let h2t2 = t2 * t2 - 1.0;
            let h2s1 = s1 * s1 - 1.0;
            let h2s2 = s2 * s2 - 1.0;
            b[0] += h2b * h2bh;
            b[1] += h2b * h2s1;
            b[2] += h2b * h2s2;
            b[3] += h2t1 * h2bh;
            b[4] += h2t2 * h2bh;
            b[5] += h2t1 * h2s1;
            b[6] += h2t2 * h2s2;
            b[7] += h2t1 * h2s2;
            b[8] += h2t2 * h2s1;
            b[9] += t1 * t2 * s1 * s2;
        }
    }
    for v in b.iter_mut() {
        *v *= weight;
    }

    let pure = PI * energy / 64.0;
    let mixed = PI * energy / 8.0;
    let b_combo: f64 = COUNT_B_WEIGHTS.iter().zip(&b).map(|(w, v)| w * v).sum();
    let value = pure * (length_fourth_combination(&a) + length_fourth_combination(&a_hat))
        + mixed * b_combo;
    Ok(ChaosComponent { order: 4, value, constituents: Constituents::Count { a, a_hat, b } })
}

/// Second chaotic component of the nodal length: the boundary line integral
/// `(8 pi sqrt(2E))^{-1} \oint B <grad B, n> ds`, discretized at arclength
/// steps of at most `1/(16 sqrt(E))`.
pub fn second_chaos_length(w: &WaveRealization, d: &Domain) -> Result<f64> {
    let energy = w.energy();
    let step = 1.0 / (16.0 * energy.sqrt());
    second_chaos_boundary_integral(
        |p| {
            let (v, g) = w.value_and_gradient(p)?;
            Ok((v, g))
        },
        energy,
        d,
        step,
    )
}

/// The raw boundary quadrature backing [`second_chaos_length`]; exposed so
/// deterministic test fields can drive it directly.
pub fn second_chaos_boundary_integral(
    mut value_grad: impl FnMut([f64; 2]) -> Result<(f64, [f64; 2])>,
    energy: f64,
    d: &Domain,
    max_step: f64,
) -> Result<f64> {
    let mut total = 0.0;
    for (p, n, ds) in d.boundary_samples(max_step) {
        let (v, g) = value_grad(p)?;
        total += v * (g[0] * n[0] + g[1] * n[1]) * ds;
    }
    Ok(total / (8.0 * PI * (2.0 * energy).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::sampler::{sample_complex, sample_wave, WaveSpec};

    fn constant_field(value: f64, energy: f64, n: usize) -> GridField {
        let grid = Grid::new([0.0, 0.0], 1.0 / (n as f64 - 1.0), n, n).unwrap();
        let len = grid.len();
        GridField {
            grid,
            values: vec![value; len],
            grad: Some((vec![0.0; len], vec![0.0; len])),
            energy: Some(energy),
        }
    }

    #[test]
    fn constant_field_first_functional() {
        // B = 0.5, zero gradients: a1 = H4(0.5) * area = 1.5625 * area
        let field = constant_field(0.5, 1.0, 65);
        let d = Domain::unit_square();
        let c = fourth_chaos_length(&field, &d).unwrap();
        let Constituents::Length { a } = c.constituents else { unreachable!() };
        // midpoint-by-nodes quadrature counts boundary nodes fully; the grid
        // spans slightly more than the unit square, so compare loosely
        let area_quad = (65.0f64 / 64.0).powi(2);
        assert!(
            (a[0] - hermite(4, 0.5) * area_quad).abs() < 0.05,
            "a1 = {}",
            a[0]
        );
        // zero gradient maps to H4(-... ) wait: t = 0, H4(0) = 3, H2(0) = -1
        assert!((a[1] - 3.0 * area_quad).abs() < 0.05);
        assert!((a[3] - area_quad).abs() < 0.05);
    }

    #[test]
    fn reconstruction_identity_is_exact() {
        let spec = WaveSpec { seed: 21, energy: 16.0, directions: 64, ..WaveSpec::default() };
        let w = sample_wave(&spec).unwrap();
        let grid = Grid::new([0.0, 0.0], 1.0 / 64.0, 65, 65).unwrap();
        let field = crate::sampler::eval_grid(&w, &grid, true).unwrap();
        let d = Domain::unit_square();
        let c = fourth_chaos_length(&field, &d).unwrap();
        let Constituents::Length { a } = &c.constituents else { unreachable!() };
        let recombined =
            gradient_variance(16.0).sqrt() / 128.0 * length_fourth_combination(a);
        assert_eq!(c.value, recombined);
    }

    #[test]
    fn count_reconstruction_identity() {
        let spec = WaveSpec { seed: 4, energy: 16.0, directions: 64, ..WaveSpec::default() };
        let c = sample_complex(&spec).unwrap();
        let grid = Grid::new([0.0, 0.0], 1.0 / 64.0, 65, 65).unwrap();
        let re = crate::sampler::eval_grid(&c.re, &grid, true).unwrap();
        let im = crate::sampler::eval_grid(&c.im, &grid, true).unwrap();
        let d = Domain::unit_square();
        let comp = fourth_chaos_count(&re, &im, &d).unwrap();
        let Constituents::Count { a, a_hat, b } = &comp.constituents else { unreachable!() };
        let e = 16.0;
        let expected = PI * e / 64.0
            * (length_fourth_combination(a) + length_fourth_combination(a_hat))
            + PI * e / 8.0
                * COUNT_B_WEIGHTS.iter().zip(b).map(|(w, v)| w * v).sum::<f64>();
        assert_eq!(comp.value, expected);
    }

    #[test]
    fn pure_parts_ignore_other_component() {
        let spec = WaveSpec { seed: 9, energy: 16.0, directions: 32, ..WaveSpec::default() };
        let cw = sample_complex(&spec).unwrap();
        let grid = Grid::new([0.0, 0.0], 1.0 / 64.0, 65, 65).unwrap();
        let re = crate::sampler::eval_grid(&cw.re, &grid, true).unwrap();
        let im = crate::sampler::eval_grid(&cw.im, &grid, true).unwrap();
        let d = Domain::unit_square();
        let c1 = fourth_chaos_count(&re, &im, &d).unwrap();
        // swap the imaginary component for a fresh one: `a` must not move
        let spec2 = WaveSpec { seed: 777, ..spec };
        let other = sample_wave(&spec2).unwrap();
        let im2 = crate::sampler::eval_grid(&other, &grid, true).unwrap();
        let c2 = fourth_chaos_count(&re, &im2, &d).unwrap();
        let Constituents::Count { a: a1, .. } = c1.constituents else { unreachable!() };
        let Constituents::Count { a: a2, b: b2, .. } = c2.constituents else { unreachable!() };
        assert_eq!(a1, a2);
        assert!(b2.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn resolution_violation_detected() {
        let field = constant_field(0.1, 10_000.0, 65); // step 1/64 >> 1/800
        assert!(matches!(
            fourth_chaos_length(&field, &Domain::unit_square()),
            Err(BerryError::Resolution(_))
        ));
    }

    #[test]
    fn second_chaos_of_constant_field_vanishes() {
        let d = Domain::disk([0.0, 0.0], 1.0).unwrap();
        let v = second_chaos_boundary_integral(|_| Ok((0.7, [0.0, 0.0])), 4.0, &d, 0.01).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn second_chaos_divergence_identity() {
        // boundary route equals (16 pi sqrt(2E))^{-1} \int_D Laplacian(B^2)
        // with Laplacian(B^2) = 2|grad B|^2 - 8 pi^2 E B^2
        let e = 9.0;
        let spec = WaveSpec { seed: 31, energy: e, directions: 64, ..WaveSpec::default() };
        let w = sample_wave(&spec).unwrap();
        let d = Domain::disk([0.2, -0.1], 0.8).unwrap();
        let boundary = second_chaos_length(&w, &d).unwrap();

        // area quadrature of the Laplacian of B^2 over the disk
        let step = 1.0 / (32.0 * e.sqrt());
        let (lo, hi) = d.bbox();
        let Domain::Disk { center, radius } = d else { unreachable!() };
        let nx = ((hi[0] - lo[0]) / step).ceil() as usize;
        let ny = ((hi[1] - lo[1]) / step).ceil() as usize;
        let mut total = 0.0;
        for iy in 0..ny {
            for ix in 0..nx {
                let p = [
                    lo[0] + (ix as f64 + 0.5) * step,
                    lo[1] + (iy as f64 + 0.5) * step,
                ];
                // antialiased cell coverage near the circle: the bulk of the
                // integrand cancels, so plain counting is too coarse
                let signed = radius - (p[0] - center[0]).hypot(p[1] - center[1]);
                let coverage = (0.5 + signed / step).clamp(0.0, 1.0);
                if coverage == 0.0 {
                    continue;
                }
                let (v, g) = w.value_and_gradient(p).unwrap();
                let lap_b2 = 2.0 * (g[0] * g[0] + g[1] * g[1])
                    - 8.0 * PI * PI * e * v * v;
                total += coverage * lap_b2 * step * step;
            }
        }
        let area_route = total / (16.0 * PI * (2.0 * e).sqrt());
        let rel = (boundary - area_route).abs() / boundary.abs().max(1e-6);
        assert!(rel < 0.01, "boundary {boundary} vs area {area_route} (rel {rel})");
    }
}
