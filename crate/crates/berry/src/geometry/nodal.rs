//! Nodal length by marching squares with linear edge interpolation.

use super::clip::{dist, lerp};
use super::Domain;
use crate::grid::GridField;
use crate::{BerryError, Result};
use std::collections::HashSet;

/// Extracted zero-set summary for one domain.
#[derive(Clone, Debug, PartialEq)]
pub struct NodalResult {
    pub length: f64,
    pub segment_count: usize,
    pub grid_spacing: f64,
}

/// Total length of the zero-level marching-squares segments clipped to `d`.
///
/// Ambiguous saddle cells (four sign alternations) are resolved by the sign
/// of `center_resolver` at the cell center when provided (the field is
/// analytically evaluable), otherwise by the mean of the corner values.
///
/// When the field carries its energy, the spacing contract
/// `step <= 1/(8 sqrt(E))` is enforced.
pub fn nodal_length(
    field: &GridField,
    d: &Domain,
    center_resolver: Option<&dyn Fn([f64; 2]) -> f64>,
) -> Result<NodalResult> {
    let grid = &field.grid;
    if field.values.len() != grid.len() {
        return Err(BerryError::invalid("value array does not match grid"));
    }
    let (lo, hi) = d.bbox();
    if !grid.covers(lo, hi) {
        return Err(BerryError::invalid("grid does not cover the domain"));
    }
    if let Some(e) = field.energy {
        let max_step = 1.0 / (8.0 * e.sqrt());
        if grid.step > max_step * (1.0 + 1e-9) {
            return Err(BerryError::Resolution(format!(
                "grid step {} exceeds 1/(8 sqrt(E)) = {max_step} at E = {e}",
                grid.step
            )));
        }
    }

    let boundary = boundary_cells(d, grid);
    let convex = d.is_convex_shape();
    let inside: Vec<bool> = (0..grid.ny)
        .flat_map(|iy| (0..grid.nx).map(move |ix| (ix, iy)))
        .map(|(ix, iy)| d.contains(grid.point(ix, iy)))
        .collect();

    let mut length = 0.0;
    let mut segment_count = 0usize;
    let step = grid.step;

    for iy in 0..grid.ny - 1 {
        for ix in 0..grid.nx - 1 {
            let i00 = grid.index(ix, iy);
            let i10 = i00 + 1;
            let i01 = grid.index(ix, iy + 1);
            let i11 = i01 + 1;
            let v = [
                field.values[i00],
                field.values[i10],
                field.values[i11],
                field.values[i01],
            ];
            let mut mask = 0usize;
            for (bit, val) in v.iter().enumerate() {
                if *val > 0.0 {
                    mask |= 1 << bit;
                }
            }
            if mask == 0 || mask == 15 {
                continue;
            }

            let p0 = grid.point(ix, iy);
            let corners = [
                p0,
                [p0[0] + step, p0[1]],
                [p0[0] + step, p0[1] + step],
                [p0[0], p0[1] + step],
            ];
            // edge crossings: 0 bottom (c0-c1), 1 right (c1-c2), 2 top
            // (c3-c2), 3 left (c0-c3)
            let edge_point = |e: usize| -> [f64; 2] {
                let (a, b, va, vb) = match e {
                    0 => (corners[0], corners[1], v[0], v[1]),
                    1 => (corners[1], corners[2], v[1], v[2]),
                    2 => (corners[3], corners[2], v[3], v[2]),
                    _ => (corners[0], corners[3], v[0], v[3]),
                };
                let t = va / (va - vb);
                lerp(a, b, t.clamp(0.0, 1.0))
            };

            let segs: &[(usize, usize)] = match mask {
                1 => &[(3, 0)],
                2 => &[(0, 1)],
                3 => &[(3, 1)],
                4 => &[(1, 2)],
                6 => &[(0, 2)],
                7 => &[(3, 2)],
                8 => &[(2, 3)],
                9 => &[(0, 2)],
                11 => &[(1, 2)],
                12 => &[(3, 1)],
                13 => &[(0, 1)],
                14 => &[(3, 0)],
                5 | 10 => {
                    let center = [p0[0] + 0.5 * step, p0[1] + 0.5 * step];
                    let cval = match center_resolver {
                        Some(f) => f(center),
                        None => 0.25 * (v[0] + v[1] + v[2] + v[3]),
                    };
                    let positive_center = cval > 0.0;
                    match (mask, positive_center) {
                        (5, true) => &[(0, 1), (2, 3)],
                        (5, false) => &[(3, 0), (1, 2)],
                        (10, true) => &[(3, 0), (1, 2)],
                        _ => &[(0, 1), (2, 3)],
                    }
                }
                _ => unreachable!(),
            };

            let fully_inside = convex
                && inside[i00]
                && inside[i10]
                && inside[i01]
                && inside[i11]
                || (!convex
                    && inside[i00]
                    && inside[i10]
                    && inside[i01]
                    && inside[i11]
                    && !boundary.contains(&(ix, iy)));

            for &(ea, eb) in segs {
                let a = edge_point(ea);
                let b = edge_point(eb);
                if fully_inside {
                    let l = dist(a, b);
                    if l > 0.0 {
                        length += l;
                        segment_count += 1;
                    }
                } else {
                    for (ca, cb) in d.clip_segment(a, b) {
                        let l = dist(ca, cb);
                        if l > 0.0 {
                            length += l;
                            segment_count += 1;
                        }
                    }
                }
            }
        }
    }

    Ok(NodalResult { length, segment_count, grid_spacing: step })
}

/// Cells a non-convex polygon boundary passes through (3x3 inflated), so the
/// all-corners-inside shortcut stays sound for reflex geometry.
fn boundary_cells(d: &Domain, grid: &crate::grid::Grid) -> HashSet<(usize, usize)> {
    let mut cells = HashSet::new();
    if d.is_convex_shape() {
        return cells;
    }
    let vs = d.as_polygon();
    let n = vs.len();
    let step = grid.step;
    for i in 0..n {
        let a = vs[i];
        let b = vs[(i + 1) % n];
        let len = dist(a, b);
        let m = ((len / (0.5 * step)).ceil() as usize).max(1);
        for j in 0..=m {
            let t = j as f64 / m as f64;
            let p = lerp(a, b, t);
            let cx = ((p[0] - grid.origin[0]) / step).floor() as i64;
            let cy = ((p[1] - grid.origin[1]) / step).floor() as i64;
            for dy in -1..=1i64 {
                for dx in -1..=1i64 {
                    let (x, y) = (cx + dx, cy + dy);
                    if x >= 0 && y >= 0 {
                        cells.insert((x as usize, y as usize));
                    }
                }
            }
        }
    }
    cells
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    fn sample(
        f: impl Fn([f64; 2]) -> f64,
        grid: &Grid,
    ) -> GridField {
        let mut values = Vec::with_capacity(grid.len());
        for iy in 0..grid.ny {
            for ix in 0..grid.nx {
                values.push(f(grid.point(ix, iy)));
            }
        }
        GridField { grid: grid.clone(), values, grad: None, energy: None }
    }

    #[test]
    fn cosine_stripes_have_length_two() {
        // f = cos(2 pi x): vertical zero lines at x = 0.25, 0.75
        let f = |p: [f64; 2]| (2.0 * std::f64::consts::PI * p[0]).cos();
        let grid = Grid::new([0.0, 0.0], 1.0 / 256.0, 257, 257).unwrap();
        let field = sample(f, &grid);
        let d = Domain::unit_square();
        let res = nodal_length(&field, &d, Some(&f)).unwrap();
        assert!((res.length - 2.0).abs() < 1e-3, "length {}", res.length);
    }

    #[test]
    fn circle_has_length_pi() {
        // f = x^2 + y^2 - 0.25 on [-1, 1]^2: circle of radius 0.5
        let f = |p: [f64; 2]| p[0] * p[0] + p[1] * p[1] - 0.25;
        let grid = Grid::new([-1.0, -1.0], 1.0 / 256.0, 513, 513).unwrap();
        let field = sample(f, &grid);
        let d = Domain::rectangle([-1.0, -1.0], [2.0, 2.0]).unwrap();
        let res = nodal_length(&field, &d, Some(&f)).unwrap();
        assert!(
            (res.length - std::f64::consts::PI).abs() < 2e-3,
            "length {}",
            res.length
        );
    }

    #[test]
    fn constant_sign_field_is_empty() {
        let f = |_: [f64; 2]| 1.0;
        let grid = Grid::new([0.0, 0.0], 0.01, 101, 101).unwrap();
        let field = sample(f, &grid);
        let res = nodal_length(&field, &Domain::unit_square(), None).unwrap();
        assert_eq!(res.length, 0.0);
        assert_eq!(res.segment_count, 0);
    }

    #[test]
    fn grid_must_cover_domain() {
        let f = |_: [f64; 2]| 1.0;
        let grid = Grid::new([0.0, 0.0], 0.01, 51, 51).unwrap();
        let field = sample(f, &grid);
        assert!(nodal_length(&field, &Domain::unit_square(), None).is_err());
    }

    #[test]
    fn resolution_contract_enforced() {
        let f = |_: [f64; 2]| 1.0;
        let grid = Grid::new([0.0, 0.0], 0.01, 101, 101).unwrap();
        let mut field = sample(f, &grid);
        field.energy = Some(10_000.0); // requires step <= 1/800
        assert!(matches!(
            nodal_length(&field, &Domain::unit_square(), None),
            Err(BerryError::Resolution(_))
        ));
    }

    #[test]
    fn refinement_error_shrinks_quadratically() {
        let f = |p: [f64; 2]| p[0] * p[0] + p[1] * p[1] - 0.25;
        let d = Domain::rectangle([-1.0, -1.0], [2.0, 2.0]).unwrap();
        let mut errs = Vec::new();
        for n in [64usize, 128, 256] {
            let grid = Grid::new([-1.0, -1.0], 2.0 / n as f64, n + 1, n + 1).unwrap();
            let field = sample(f, &grid);
            let res = nodal_length(&field, &d, Some(&f)).unwrap();
            errs.push((res.length - std::f64::consts::PI).abs());
        }
        // halving the spacing should cut the error by roughly 4
        assert!(errs[2] < errs[0] / 8.0, "errors {errs:?}");
    }

    #[test]
    fn additive_over_grid_aligned_split() {
        let f = |p: [f64; 2]| (2.0 * std::f64::consts::PI * p[0]).cos()
            + 0.3 * (2.0 * std::f64::consts::PI * p[1]).sin();
        let grid = Grid::new([0.0, 0.0], 1.0 / 128.0, 129, 129).unwrap();
        let field = sample(f, &grid);
        let whole = Domain::unit_square();
        let left = Domain::rectangle([0.0, 0.0], [0.5, 1.0]).unwrap();
        let right = Domain::rectangle([0.5, 0.0], [0.5, 1.0]).unwrap();
        let lw = nodal_length(&field, &whole, Some(&f)).unwrap().length;
        let ll = nodal_length(&field, &left, Some(&f)).unwrap().length;
        let lr = nodal_length(&field, &right, Some(&f)).unwrap().length;
        assert!((lw - ll - lr).abs() < 1e-9, "{lw} vs {}", ll + lr);
    }

    #[test]
    fn nested_domains_monotone() {
        let f = |p: [f64; 2]| (7.0 * p[0]).sin() * (5.0 * p[1]).cos() - 0.1;
        let grid = Grid::new([0.0, 0.0], 1.0 / 128.0, 129, 129).unwrap();
        let field = sample(f, &grid);
        let small = Domain::rectangle([0.25, 0.25], [0.5, 0.5]).unwrap();
        let big = Domain::unit_square();
        let ls = nodal_length(&field, &small, Some(&f)).unwrap().length;
        let lb = nodal_length(&field, &big, Some(&f)).unwrap().length;
        assert!(ls <= lb + 1e-12);
    }

    #[test]
    fn clipping_to_disk_domain() {
        // straight vertical lines clipped by a disk: each chord is shorter
        // than the square cut
        let f = |p: [f64; 2]| (2.0 * std::f64::consts::PI * p[0]).cos();
        let grid = Grid::new([0.0, 0.0], 1.0 / 256.0, 257, 257).unwrap();
        let field = sample(f, &grid);
        let disk = Domain::disk([0.5, 0.5], 0.5).unwrap();
        let res = nodal_length(&field, &disk, Some(&f)).unwrap();
        // chords at x = 0.25, 0.75: each has half-length sqrt(0.25 - 0.0625)
        let expected = 4.0 * (0.25f64 - 0.0625).sqrt();
        assert!((res.length - expected).abs() < 2e-3, "{}", res.length);
    }
}
