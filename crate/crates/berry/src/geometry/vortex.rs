//! Phase-singularity counting: common zeros of the real and imaginary parts,
//! located by Newton refinement on the bilinear interpolant and accepted by
//! the winding number of `(Re, Im)` around the cell boundary.

use super::clip::dist;
use super::Domain;
use crate::grid::GridField;
use crate::{BerryError, Result};
use std::f64::consts::PI;

#[derive(Clone, Debug)]
pub struct VortexResult {
    pub count: usize,
    pub locations: Vec<[f64; 2]>,
    /// `|(Re, Im)|` of the interpolant at each refined location.
    pub residuals: Vec<f64>,
}

const MAX_NEWTON_ITER: usize = 30;

/// Count common zeros of the two sampled components inside `d`.
pub fn vortex_count(re: &GridField, im: &GridField, d: &Domain) -> Result<VortexResult> {
    let grid = &re.grid;
    if im.grid != *grid {
        return Err(BerryError::invalid("component grids do not match"));
    }
    if re.values.len() != grid.len() || im.values.len() != grid.len() {
        return Err(BerryError::invalid("value arrays do not match grid"));
    }
    let (lo, hi) = d.bbox();
    if !grid.covers(lo, hi) {
        return Err(BerryError::invalid("grid does not cover the domain"));
    }
    for f in [re, im] {
        if let Some(e) = f.energy {
            let max_step = 1.0 / (8.0 * e.sqrt());
            if grid.step > max_step * (1.0 + 1e-9) {
                return Err(BerryError::Resolution(format!(
                    "grid step {} exceeds 1/(8 sqrt(E)) at E = {e}",
                    grid.step
                )));
            }
        }
    }

    let step = grid.step;
    let mut roots: Vec<([f64; 2], f64)> = Vec::new();

    for iy in 0..grid.ny - 1 {
        for ix in 0..grid.nx - 1 {
            let i00 = grid.index(ix, iy);
            let i10 = i00 + 1;
            let i01 = grid.index(ix, iy + 1);
            let i11 = i01 + 1;
            // corner order c0 (0,0), c1 (1,0), c2 (1,1), c3 (0,1)
            let f = [
                re.values[i00],
                re.values[i10],
                re.values[i11],
                re.values[i01],
            ];
            let g = [
                im.values[i00],
                im.values[i10],
                im.values[i11],
                im.values[i01],
            ];
            if !mixed_signs(&f) || !mixed_signs(&g) {
                continue;
            }
            let w = winding(&f, &g);
            if w.abs() != 1 {
                continue;
            }
            let (xi, eta, residual) = newton_bilinear(&f, &g);
            let p0 = grid.point(ix, iy);
            let root = [p0[0] + xi * step, p0[1] + eta * step];
            roots.push((root, residual));
        }
    }

    // merge duplicates within half a cell
    let mut kept: Vec<([f64; 2], f64)> = Vec::new();
    'outer: for (p, r) in roots {
        for (q, _) in &kept {
            if dist(p, *q) < 0.5 * step {
                continue 'outer;
            }
        }
        kept.push((p, r));
    }

    let mut locations = Vec::new();
    let mut residuals = Vec::new();
    for (p, r) in kept {
        if d.contains(p) {
            locations.push(p);
            residuals.push(r);
        }
    }

    Ok(VortexResult { count: locations.len(), locations, residuals })
}

fn mixed_signs(v: &[f64; 4]) -> bool {
    let mut pos = false;
    let mut neg = false;
    for &x in v {
        if x > 0.0 {
            pos = true;
        } else {
            neg = true;
        }
    }
    pos && neg
}

/// Winding number of `(f, g)` around the cell boundary; exact for the
/// bilinear interpolant because both components are linear along each edge.
fn winding(f: &[f64; 4], g: &[f64; 4]) -> i32 {
    let mut total = 0.0;
    for i in 0..4 {
        let j = (i + 1) % 4;
        let a0 = g[i].atan2(f[i]);
        let a1 = g[j].atan2(f[j]);
        let mut d = a1 - a0;
        if d > PI {
            d -= 2.0 * PI;
        } else if d < -PI {
            d += 2.0 * PI;
        }
        total += d;
    }
    (total / (2.0 * PI)).round() as i32
}

fn bilinear(v: &[f64; 4], xi: f64, eta: f64) -> f64 {
    v[0] * (1.0 - xi) * (1.0 - eta) + v[1] * xi * (1.0 - eta) + v[2] * xi * eta
        + v[3] * (1.0 - xi) * eta
}

fn bilinear_grad(v: &[f64; 4], xi: f64, eta: f64) -> (f64, f64) {
    let dxi = (v[1] - v[0]) * (1.0 - eta) + (v[2] - v[3]) * eta;
    let deta = (v[3] - v[0]) * (1.0 - xi) + (v[2] - v[1]) * xi;
    (dxi, deta)
}

/// 2D Newton iteration for the common zero of the two bilinear interpolants
/// inside the unit cell. Returns cell coordinates and the residual norm.
fn newton_bilinear(f: &[f64; 4], g: &[f64; 4]) -> (f64, f64, f64) {
    let mut xi = 0.5;
    let mut eta = 0.5;
    for _ in 0..MAX_NEWTON_ITER {
        let fv = bilinear(f, xi, eta);
        let gv = bilinear(g, xi, eta);
        let (fx, fy) = bilinear_grad(f, xi, eta);
        let (gx, gy) = bilinear_grad(g, xi, eta);
        let det = fx * gy - fy * gx;
        if det.abs() < 1e-300 {
            break;
        }
        let dxi = (fv * gy - gv * fy) / det;
        let deta = (gv * fx - fv * gx) / det;
        xi -= dxi;
        eta -= deta;
        if dxi.hypot(deta) < 1e-10 {
            break;
        }
    }
    if !((-0.25..=1.25).contains(&xi) && (-0.25..=1.25).contains(&eta)) {
        // Newton escaped; the winding number still certifies a zero in the
        // cell, so fall back to the center.
        xi = 0.5;
        eta = 0.5;
    }
    let residual = bilinear(f, xi, eta).hypot(bilinear(g, xi, eta));
    (xi.clamp(0.0, 1.0), eta.clamp(0.0, 1.0), residual)
}
