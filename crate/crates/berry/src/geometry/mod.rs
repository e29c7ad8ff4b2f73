//! Planar compact domains (rectangle, disk, simple polygon) with the area,
//! diameter, erosion and intersection operations the covariance reductions
//! need, plus nodal-set extraction.

mod clip;
mod nodal;
mod vortex;

pub use nodal::{nodal_length, NodalResult};
pub use vortex::{vortex_count, VortexResult};

use crate::{BerryError, Result};
use clip::P2;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Vertex count used when a disk enters a polygon-only operation.
const DISK_POLYGON_VERTICES: usize = 1024;
/// Raster resolution for offset fallbacks.
const RASTER_RESOLUTION: usize = 2048;

/// A planar compact region.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Domain {
    Rectangle { corner: [f64; 2], widths: [f64; 2] },
    Disk { center: [f64; 2], radius: f64 },
    Polygon { vertices: Vec<[f64; 2]> },
}

impl Domain {
    pub fn rectangle(corner: [f64; 2], widths: [f64; 2]) -> Result<Self> {
        if !(widths[0] > 0.0 && widths[1] > 0.0)
            || !corner.iter().chain(widths.iter()).all(|v| v.is_finite())
        {
            return Err(BerryError::invalid("rectangle needs finite corner and positive widths"));
        }
        Ok(Domain::Rectangle { corner, widths })
    }

    pub fn unit_square() -> Self {
        Domain::Rectangle { corner: [0.0, 0.0], widths: [1.0, 1.0] }
    }

    pub fn disk(center: [f64; 2], radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !center.iter().all(|v| v.is_finite()) || !radius.is_finite() {
            return Err(BerryError::invalid("disk needs finite center and positive radius"));
        }
        Ok(Domain::Disk { center, radius })
    }

    /// Simple polygon; vertices are normalized to counterclockwise order.
    pub fn polygon(vertices: Vec<[f64; 2]>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(BerryError::invalid("polygon needs at least 3 vertices"));
        }
        if vertices.iter().any(|v| !v[0].is_finite() || !v[1].is_finite()) {
            return Err(BerryError::invalid("polygon has non-finite vertices"));
        }
        let mut vs = vertices;
        let area = clip::signed_area(&vs);
        if area.abs() < 1e-300 {
            return Err(BerryError::invalid("polygon has zero area"));
        }
        if area < 0.0 {
            vs.reverse();
        }
        let n = vs.len();
        for i in 0..n {
            for j in i + 1..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if adjacent {
                    continue;
                }
                if clip::segments_properly_intersect(vs[i], vs[(i + 1) % n], vs[j], vs[(j + 1) % n])
                {
                    return Err(BerryError::invalid("polygon is self-intersecting"));
                }
            }
        }
        Ok(Domain::Polygon { vertices: vs })
    }

    /// Validate a deserialized domain.
    pub fn validated(self) -> Result<Self> {
        match self {
            Domain::Rectangle { corner, widths } => Domain::rectangle(corner, widths),
            Domain::Disk { center, radius } => Domain::disk(center, radius),
            Domain::Polygon { vertices } => Domain::polygon(vertices),
        }
    }

    pub fn area(&self) -> f64 {
        match self {
            Domain::Rectangle { widths, .. } => widths[0] * widths[1],
            Domain::Disk { radius, .. } => PI * radius * radius,
            Domain::Polygon { vertices } => clip::signed_area(vertices),
        }
    }

    pub fn diam(&self) -> f64 {
        match self {
            Domain::Rectangle { widths, .. } => widths[0].hypot(widths[1]),
            Domain::Disk { radius, .. } => 2.0 * radius,
            Domain::Polygon { vertices } => {
                let mut best = 0.0f64;
                for (i, a) in vertices.iter().enumerate() {
                    for b in &vertices[i + 1..] {
                        best = best.max(clip::dist(*a, *b));
                    }
                }
                best
            }
        }
    }

    pub fn perimeter(&self) -> f64 {
        match self {
            Domain::Rectangle { widths, .. } => 2.0 * (widths[0] + widths[1]),
            Domain::Disk { radius, .. } => 2.0 * PI * radius,
            Domain::Polygon { vertices } => clip::perimeter(vertices),
        }
    }

    pub fn bbox(&self) -> ([f64; 2], [f64; 2]) {
        match self {
            Domain::Rectangle { corner, widths } => {
                (*corner, [corner[0] + widths[0], corner[1] + widths[1]])
            }
            Domain::Disk { center, radius } => (
                [center[0] - radius, center[1] - radius],
                [center[0] + radius, center[1] + radius],
            ),
            Domain::Polygon { vertices } => {
                let mut lo = [f64::INFINITY; 2];
                let mut hi = [f64::NEG_INFINITY; 2];
                for v in vertices {
                    for k in 0..2 {
                        lo[k] = lo[k].min(v[k]);
                        hi[k] = hi[k].max(v[k]);
                    }
                }
                (lo, hi)
            }
        }
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        match self {
            Domain::Rectangle { corner, widths } => {
                p[0] >= corner[0]
                    && p[0] <= corner[0] + widths[0]
                    && p[1] >= corner[1]
                    && p[1] <= corner[1] + widths[1]
            }
            Domain::Disk { center, radius } => clip::dist(p, *center) <= *radius,
            Domain::Polygon { vertices } => clip::point_in_polygon(p, vertices),
        }
    }

    pub(crate) fn as_polygon(&self) -> Vec<P2> {
        match self {
            Domain::Rectangle { corner, widths } => vec![
                *corner,
                [corner[0] + widths[0], corner[1]],
                [corner[0] + widths[0], corner[1] + widths[1]],
                [corner[0], corner[1] + widths[1]],
            ],
            Domain::Disk { center, radius } => (0..DISK_POLYGON_VERTICES)
                .map(|i| {
                    let th = 2.0 * PI * i as f64 / DISK_POLYGON_VERTICES as f64;
                    [center[0] + radius * th.cos(), center[1] + radius * th.sin()]
                })
                .collect(),
            Domain::Polygon { vertices } => vertices.clone(),
        }
    }

    /// Midpoint samples of the boundary: `(point, outward normal, ds)`,
    /// with arclength step at most `max_step`.
    pub fn boundary_samples(&self, max_step: f64) -> Vec<([f64; 2], [f64; 2], f64)> {
        let mut out = Vec::new();
        match self {
            Domain::Disk { center, radius } => {
                let n = ((2.0 * PI * radius / max_step).ceil() as usize).max(8);
                let dth = 2.0 * PI / n as f64;
                for i in 0..n {
                    let th = (i as f64 + 0.5) * dth;
                    let nrm = [th.cos(), th.sin()];
                    out.push((
                        [center[0] + radius * nrm[0], center[1] + radius * nrm[1]],
                        nrm,
                        radius * dth,
                    ));
                }
            }
            _ => {
                let vs = self.as_polygon();
                let n = vs.len();
                for i in 0..n {
                    let a = vs[i];
                    let b = vs[(i + 1) % n];
                    let len = clip::dist(a, b);
                    if len < 1e-300 {
                        continue;
                    }
                    let d = [(b[0] - a[0]) / len, (b[1] - a[1]) / len];
                    // CCW boundary: exterior is to the right of the direction
                    let nrm = [d[1], -d[0]];
                    let m = ((len / max_step).ceil() as usize).max(1);
                    let ds = len / m as f64;
                    for j in 0..m {
                        let t = (j as f64 + 0.5) * ds;
                        out.push(([a[0] + t * d[0], a[1] + t * d[1]], nrm, ds));
                    }
                }
            }
        }
        out
    }

    /// Clip the segment `a -> b` to the domain, returning the kept pieces.
    pub(crate) fn clip_segment(&self, a: P2, b: P2) -> Vec<(P2, P2)> {
        match self {
            Domain::Rectangle { corner, widths } => {
                let lo = *corner;
                let hi = [corner[0] + widths[0], corner[1] + widths[1]];
                let d = clip::sub(b, a);
                let mut t0 = 0.0f64;
                let mut t1 = 1.0f64;
                for k in 0..2 {
                    if d[k].abs() < 1e-300 {
                        if a[k] < lo[k] || a[k] > hi[k] {
                            return vec![];
                        }
                    } else {
                        let ta = (lo[k] - a[k]) / d[k];
                        let tb = (hi[k] - a[k]) / d[k];
                        let (ta, tb) = if ta <= tb { (ta, tb) } else { (tb, ta) };
                        t0 = t0.max(ta);
                        t1 = t1.min(tb);
                    }
                }
                if t0 < t1 {
                    vec![(clip::lerp(a, b, t0), clip::lerp(a, b, t1))]
                } else {
                    vec![]
                }
            }
            Domain::Disk { center, radius } => {
                let d = clip::sub(b, a);
                let f = clip::sub(a, *center);
                let aa = d[0] * d[0] + d[1] * d[1];
                if aa < 1e-300 {
                    return vec![];
                }
                let bb = 2.0 * (f[0] * d[0] + f[1] * d[1]);
                let cc = f[0] * f[0] + f[1] * f[1] - radius * radius;
                let disc = bb * bb - 4.0 * aa * cc;
                if disc <= 0.0 {
                    return if cc <= 0.0 { vec![(a, b)] } else { vec![] };
                }
                let sq = disc.sqrt();
                let t0 = ((-bb - sq) / (2.0 * aa)).max(0.0);
                let t1 = ((-bb + sq) / (2.0 * aa)).min(1.0);
                if t0 < t1 {
                    vec![(clip::lerp(a, b, t0), clip::lerp(a, b, t1))]
                } else {
                    vec![]
                }
            }
            Domain::Polygon { vertices } => clip::segment_params_inside_polygon(a, b, vertices)
                .into_iter()
                .map(|(t0, t1)| (clip::lerp(a, b, t0), clip::lerp(a, b, t1)))
                .collect(),
        }
    }

    /// Boundary cells of the domain on a grid with the given cell size,
    /// marked so the nodal extractor knows where clipping is required.
    pub(crate) fn is_convex_shape(&self) -> bool {
        match self {
            Domain::Rectangle { .. } | Domain::Disk { .. } => true,
            Domain::Polygon { vertices } => clip::is_convex(vertices),
        }
    }
}

pub fn area(d: &Domain) -> f64 {
    d.area()
}

pub fn diam(d: &Domain) -> f64 {
    d.diam()
}

/// Exact intersection area. Rectangle and disk pairs use closed forms;
/// anything involving a polygon goes through exact boundary-fragment
/// integration (disks are approximated by 1024-gons first).
pub fn intersection_area(d1: &Domain, d2: &Domain) -> f64 {
    match (d1, d2) {
        (
            Domain::Rectangle { corner: c1, widths: w1 },
            Domain::Rectangle { corner: c2, widths: w2 },
        ) => {
            let ox = overlap_1d(c1[0], c1[0] + w1[0], c2[0], c2[0] + w2[0]);
            let oy = overlap_1d(c1[1], c1[1] + w1[1], c2[1], c2[1] + w2[1]);
            ox * oy
        }
        (Domain::Disk { center: c1, radius: r1 }, Domain::Disk { center: c2, radius: r2 }) => {
            disk_disk_area(*c1, *r1, *c2, *r2)
        }
        _ => {
            if d1 == d2 {
                return d1.area();
            }
            clip::polygon_intersection_area(&d1.as_polygon(), &d2.as_polygon())
        }
    }
}

fn overlap_1d(a0: f64, a1: f64, b0: f64, b1: f64) -> f64 {
    (a1.min(b1) - a0.max(b0)).max(0.0)
}

fn disk_disk_area(c1: [f64; 2], r1: f64, c2: [f64; 2], r2: f64) -> f64 {
    let d = clip::dist(c1, c2);
    if d >= r1 + r2 {
        return 0.0;
    }
    let rmin = r1.min(r2);
    let rmax = r1.max(r2);
    if d <= rmax - rmin {
        return PI * rmin * rmin;
    }
    // standard lens formula
    let a1 = ((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1)).clamp(-1.0, 1.0);
    let a2 = ((d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2)).clamp(-1.0, 1.0);
    let t1 = a1.acos();
    let t2 = a2.acos();
    r1 * r1 * (t1 - t1.sin() * t1.cos()) + r2 * r2 * (t2 - t2.sin() * t2.cos())
}

/// Area of the inward parallel set `D^{-eta}`.
pub fn erosion_area(d: &Domain, eta: f64) -> Result<f64> {
    if !(eta >= 0.0) || !eta.is_finite() {
        return Err(BerryError::invalid(format!("erosion distance must be >= 0, got {eta}")));
    }
    Ok(match d {
        Domain::Rectangle { widths, .. } => {
            (widths[0] - 2.0 * eta).max(0.0) * (widths[1] - 2.0 * eta).max(0.0)
        }
        Domain::Disk { radius, .. } => {
            let r = (radius - eta).max(0.0);
            PI * r * r
        }
        Domain::Polygon { vertices } => {
            if eta == 0.0 {
                clip::signed_area(vertices)
            } else if let Some(off) = clip::inward_offset(vertices, eta) {
                clip::signed_area(&off)
            } else {
                raster_erosion_area(vertices, eta)
            }
        }
    })
}

/// The eroded domain itself where it stays within the family (rectangles and
/// disks erode to rectangles and disks; polygons only when the miter offset
/// stays simple).
pub fn eroded(d: &Domain, eta: f64) -> Result<Option<Domain>> {
    if !(eta >= 0.0) || !eta.is_finite() {
        return Err(BerryError::invalid("erosion distance must be >= 0"));
    }
    if eta == 0.0 {
        return Ok(Some(d.clone()));
    }
    Ok(match d {
        Domain::Rectangle { corner, widths } => {
            let w = [widths[0] - 2.0 * eta, widths[1] - 2.0 * eta];
            if w[0] > 0.0 && w[1] > 0.0 {
                Some(Domain::Rectangle { corner: [corner[0] + eta, corner[1] + eta], widths: w })
            } else {
                None
            }
        }
        Domain::Disk { center, radius } => {
            let r = radius - eta;
            if r > 0.0 {
                Some(Domain::Disk { center: *center, radius: r })
            } else {
                None
            }
        }
        Domain::Polygon { vertices } => {
            clip::inward_offset(vertices, eta).map(|vs| Domain::Polygon { vertices: vs })
        }
    })
}

/// Area of the outward parallel set `D^{+eta}`.
pub fn dilation_area(d: &Domain, eta: f64) -> Result<f64> {
    if !(eta >= 0.0) || !eta.is_finite() {
        return Err(BerryError::invalid(format!("dilation distance must be >= 0, got {eta}")));
    }
    Ok(match d {
        Domain::Rectangle { widths, .. } => {
            widths[0] * widths[1] + 2.0 * (widths[0] + widths[1]) * eta + PI * eta * eta
        }
        Domain::Disk { radius, .. } => PI * (radius + eta) * (radius + eta),
        Domain::Polygon { vertices } => {
            if eta == 0.0 {
                clip::signed_area(vertices)
            } else if clip::is_convex(vertices) {
                // Steiner formula for convex bodies
                clip::signed_area(vertices) + clip::perimeter(vertices) * eta + PI * eta * eta
            } else {
                raster_dilation_area(vertices, eta)
            }
        }
    })
}

fn raster_erosion_area(vs: &[P2], eta: f64) -> f64 {
    let (lo, hi) = polygon_bbox(vs);
    // signed distance to the eroded set boundary: positive inside
    raster_area(lo, hi, |p| {
        let d = clip::distance_to_polygon_boundary(p, vs);
        let s = if clip::point_in_polygon(p, vs) { d } else { -d };
        s - eta
    })
}

fn raster_dilation_area(vs: &[P2], eta: f64) -> f64 {
    let (lo, hi) = polygon_bbox(vs);
    let lo = [lo[0] - eta, lo[1] - eta];
    let hi = [hi[0] + eta, hi[1] + eta];
    raster_area(lo, hi, |p| {
        let d = clip::distance_to_polygon_boundary(p, vs);
        let s = if clip::point_in_polygon(p, vs) { d } else { -d };
        s + eta
    })
}

fn polygon_bbox(vs: &[P2]) -> (P2, P2) {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for v in vs {
        for k in 0..2 {
            lo[k] = lo[k].min(v[k]);
            hi[k] = hi[k].max(v[k]);
        }
    }
    (lo, hi)
}

/// Antialiased raster integration of `{signed >= 0}`: pixels near the zero
/// level contribute fractional coverage from the signed distance, which
/// removes the half-pixel boundary bias of plain counting.
fn raster_area(lo: P2, hi: P2, signed: impl Fn(P2) -> f64) -> f64 {
    let n = RASTER_RESOLUTION;
    let dx = (hi[0] - lo[0]) / n as f64;
    let dy = (hi[1] - lo[1]) / n as f64;
    let px = dx.max(dy);
    let mut total = 0.0f64;
    for iy in 0..n {
        let y = lo[1] + (iy as f64 + 0.5) * dy;
        for ix in 0..n {
            let x = lo[0] + (ix as f64 + 0.5) * dx;
            let s = signed([x, y]);
            total += (0.5 + s / px).clamp(0.0, 1.0);
        }
    }
    total * dx * dy
}
