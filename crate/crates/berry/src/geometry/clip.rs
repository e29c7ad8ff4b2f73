//! Segment clipping and simple-polygon primitives shared by the domain
//! algebra and the nodal extractor.

pub(crate) type P2 = [f64; 2];

#[inline]
pub(crate) fn sub(a: P2, b: P2) -> P2 {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub(crate) fn cross(a: P2, b: P2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

#[inline]
pub(crate) fn dist(a: P2, b: P2) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

#[inline]
pub(crate) fn lerp(a: P2, b: P2, t: f64) -> P2 {
    [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
}

/// Shoelace signed area; positive for counterclockwise orientation.
pub(crate) fn signed_area(vs: &[P2]) -> f64 {
    let n = vs.len();
    let mut s = 0.0;
    for i in 0..n {
        let j = (i + 1) % n;
        s += cross(vs[i], vs[j]);
    }
    0.5 * s
}

pub(crate) fn perimeter(vs: &[P2]) -> f64 {
    let n = vs.len();
    (0..n).map(|i| dist(vs[i], vs[(i + 1) % n])).sum()
}

/// Even-odd point-in-polygon test. Points on the boundary may land on
/// either side; callers that care use distance checks.
pub(crate) fn point_in_polygon(p: P2, vs: &[P2]) -> bool {
    let n = vs.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (vi, vj) = (vs[i], vs[j]);
        if (vi[1] > p[1]) != (vj[1] > p[1]) {
            let x = vi[0] + (p[1] - vi[1]) / (vj[1] - vi[1]) * (vj[0] - vi[0]);
            if p[0] < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Parameters `t` in (0, 1) where segment `a + t (b - a)` crosses segment
/// `c..d` (interior crossings; touching endpoints included).
fn segment_crossing_params(a: P2, b: P2, c: P2, d: P2) -> Option<f64> {
    let r = sub(b, a);
    let s = sub(d, c);
    let denom = cross(r, s);
    if denom.abs() < 1e-300 {
        return None; // parallel; coincident overlaps handled by midpoint tests
    }
    let qp = sub(c, a);
    let t = cross(qp, s) / denom;
    let u = cross(qp, r) / denom;
    if (-1e-12..=1.0 + 1e-12).contains(&t) && (-1e-12..=1.0 + 1e-12).contains(&u) {
        Some(t.clamp(0.0, 1.0))
    } else {
        None
    }
}

/// Whether two segments intersect at an interior point of both (used for the
/// polygon simplicity check).
pub(crate) fn segments_properly_intersect(a: P2, b: P2, c: P2, d: P2) -> bool {
    let d1 = cross(sub(b, a), sub(c, a));
    let d2 = cross(sub(b, a), sub(d, a));
    let d3 = cross(sub(d, c), sub(a, c));
    let d4 = cross(sub(d, c), sub(b, c));
    (d1 * d2 < 0.0) && (d3 * d4 < 0.0)
}

/// Sub-intervals of `[0, 1]` along `a -> b` whose midpoints lie inside the
/// polygon.
pub(crate) fn segment_params_inside_polygon(a: P2, b: P2, vs: &[P2]) -> Vec<(f64, f64)> {
    let n = vs.len();
    let mut ts = vec![0.0, 1.0];
    for i in 0..n {
        let j = (i + 1) % n;
        if let Some(t) = segment_crossing_params(a, b, vs[i], vs[j]) {
            ts.push(t);
        }
    }
    ts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    ts.dedup_by(|x, y| (*x - *y).abs() < 1e-12);
    let mut kept = Vec::new();
    for w in ts.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        if t1 - t0 < 1e-12 {
            continue;
        }
        let mid = lerp(a, b, 0.5 * (t0 + t1));
        if point_in_polygon(mid, vs) {
            kept.push((t0, t1));
        }
    }
    kept
}

/// Exact intersection area of two simple polygons by integrating
/// `(x dy - y dx) / 2` over the boundary fragments of each polygon that lie
/// inside the other.
///
/// Fragments lying *on* the other polygon's boundary are counted with weight
/// 1/2: a shared boundary stretch appears in both sweeps with equal
/// orientation when the interiors overlap (halves sum to one) and with
/// opposite orientation when the polygons only touch (halves cancel).
pub(crate) fn polygon_intersection_area(p: &[P2], q: &[P2]) -> f64 {
    let mut area = 0.0;
    for (outer, other) in [(p, q), (q, p)] {
        let n = outer.len();
        for i in 0..n {
            let a = outer[i];
            let b = outer[(i + 1) % n];
            for (t0, t1) in segment_fragments_weighted(a, b, other) {
                let s = lerp(a, b, t0.0);
                let e = lerp(a, b, t0.1);
                area += t1 * 0.5 * cross(s, e);
            }
        }
    }
    area
}

/// Kept `((t0, t1), weight)` fragments of `a -> b` against a polygon:
/// weight 1 strictly inside, 1/2 on the boundary.
fn segment_fragments_weighted(a: P2, b: P2, vs: &[P2]) -> Vec<((f64, f64), f64)> {
    let n = vs.len();
    let mut ts = vec![0.0, 1.0];
    for i in 0..n {
        let j = (i + 1) % n;
        if let Some(t) = segment_crossing_params(a, b, vs[i], vs[j]) {
            ts.push(t);
        }
    }
    ts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    ts.dedup_by(|x, y| (*x - *y).abs() < 1e-12);
    let mut kept = Vec::new();
    for w in ts.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        if t1 - t0 < 1e-12 {
            continue;
        }
        let mid = lerp(a, b, 0.5 * (t0 + t1));
        let tol = 1e-9 * (1.0 + mid[0].abs() + mid[1].abs());
        if distance_to_polygon_boundary(mid, vs) < tol {
            kept.push(((t0, t1), 0.5));
        } else if point_in_polygon(mid, vs) {
            kept.push(((t0, t1), 1.0));
        }
    }
    kept
}

pub(crate) fn point_segment_distance(p: P2, a: P2, b: P2) -> f64 {
    let ab = sub(b, a);
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    if len2 < 1e-300 {
        return dist(p, a);
    }
    let t = ((p[0] - a[0]) * ab[0] + (p[1] - a[1]) * ab[1]) / len2;
    let t = t.clamp(0.0, 1.0);
    dist(p, [a[0] + t * ab[0], a[1] + t * ab[1]])
}

pub(crate) fn distance_to_polygon_boundary(p: P2, vs: &[P2]) -> f64 {
    let n = vs.len();
    (0..n)
        .map(|i| point_segment_distance(p, vs[i], vs[(i + 1) % n]))
        .fold(f64::INFINITY, f64::min)
}

/// Inward miter offset of a counterclockwise simple polygon. Returns `None`
/// when adjacent offset lines are close to parallel or the offset polygon
/// degenerates (callers fall back to rasterization).
pub(crate) fn inward_offset(vs: &[P2], eta: f64) -> Option<Vec<P2>> {
    let n = vs.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let prev = vs[(i + n - 1) % n];
        let cur = vs[i];
        let next = vs[(i + 1) % n];
        let d0 = sub(cur, prev);
        let d1 = sub(next, cur);
        let l0 = d0[0].hypot(d0[1]);
        let l1 = d1[0].hypot(d1[1]);
        if l0 < 1e-300 || l1 < 1e-300 {
            return None;
        }
        let d0 = [d0[0] / l0, d0[1] / l0];
        let d1 = [d1[0] / l1, d1[1] / l1];
        // interior on the left of CCW edges
        let n0 = [-d0[1], d0[0]];
        let n1 = [-d1[1], d1[0]];
        let denom = cross(d0, d1);
        if denom.abs() < 1e-9 {
            // nearly straight corner: shared normal
            out.push([cur[0] + eta * n0[0], cur[1] + eta * n0[1]]);
            continue;
        }
        // intersection of the two offset lines
        let p0 = [prev[0] + eta * n0[0], prev[1] + eta * n0[1]];
        let p1 = [cur[0] + eta * n1[0], cur[1] + eta * n1[1]];
        let t = cross(sub(p1, p0), d1) / denom;
        out.push([p0[0] + t * d0[0], p0[1] + t * d0[1]]);
    }
    // reject degenerate results
    let area = signed_area(&out);
    if !(area > 0.0) || area >= signed_area(vs) {
        return None;
    }
    let m = out.len();
    for i in 0..m {
        for j in i + 1..m {
            let adjacent = j == i + 1 || (i == 0 && j == m - 1);
            if adjacent {
                continue;
            }
            if segments_properly_intersect(out[i], out[(i + 1) % m], out[j], out[(j + 1) % m]) {
                return None;
            }
        }
    }
    Some(out)
}

pub(crate) fn is_convex(vs: &[P2]) -> bool {
    let n = vs.len();
    let mut sign = 0.0f64;
    for i in 0..n {
        let a = vs[i];
        let b = vs[(i + 1) % n];
        let c = vs[(i + 2) % n];
        let t = cross(sub(b, a), sub(c, b));
        if t.abs() < 1e-14 {
            continue;
        }
        if sign == 0.0 {
            sign = t.signum();
        } else if t.signum() != sign {
            return false;
        }
    }
    true
}
