//! Polyline curves with cumulative arclength tables.
//!
//! Every curve in this crate is a dense polyline: an ordered list of distinct
//! points plus the running arclength at each vertex. Curves are open or
//! closed; for closed curves the segment from the last point back to the
//! first belongs to the curve and `total_len` includes it.
//!
//! All suprema computed downstream (curvature, pair ratios) are grid suprema
//! over these samples; nothing here claims continuity beyond the polyline.

use crate::error::{Error, Result};
use crate::point::Point;

/// Relative tolerance for accepting arclength arguments that fall a hair
/// outside `[0, total_len]` due to roundoff.
const RANGE_SLACK: f64 = 1e-9;

/// Reference to a subarc `[s_start, s_end]` of a curve, in arclength units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubarcRef {
    pub s_start: f64,
    pub s_end: f64,
}

impl SubarcRef {
    pub fn new(s_start: f64, s_end: f64) -> Result<Self> {
        if !(s_start.is_finite() && s_end.is_finite() && s_start < s_end) {
            return Err(Error::BadParameter {
                name: "subarc",
                value: s_end - s_start,
                expected: "finite endpoints with s_start < s_end",
            });
        }
        Ok(SubarcRef { s_start, s_end })
    }

    pub fn length(&self) -> f64 {
        self.s_end - self.s_start
    }
}

/// A planar polyline with its arclength table.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledCurve {
    points: Vec<Point>,
    arclen: Vec<f64>,
    closed: bool,
}

impl SampledCurve {
    /// Builds a curve from an ordered point list, computing the arclength
    /// table. Rejects curves with fewer than two points (three if closed),
    /// non-finite coordinates, or coincident consecutive points.
    pub fn from_points(points: Vec<Point>, closed: bool) -> Result<Self> {
        let required = if closed { 3 } else { 2 };
        if points.len() < required {
            return Err(Error::InsufficientData {
                points: points.len(),
                required,
            });
        }
        let mut arclen = Vec::with_capacity(points.len());
        arclen.push(0.0);
        let mut acc = 0.0;
        for i in 1..points.len() {
            if !points[i].is_finite() {
                return Err(Error::BadCurve {
                    expected: "made of finite coordinates",
                });
            }
            let d = points[i].dist(points[i - 1]);
            if !(d > 0.0) {
                return Err(Error::BadCurve {
                    expected: "free of coincident consecutive points",
                });
            }
            acc += d;
            arclen.push(acc);
        }
        if !points[0].is_finite() {
            return Err(Error::BadCurve {
                expected: "made of finite coordinates",
            });
        }
        if closed {
            let d = points[points.len() - 1].dist(points[0]);
            if !(d > 0.0) {
                return Err(Error::BadCurve {
                    expected: "closed without duplicating the start point",
                });
            }
        }
        Ok(SampledCurve {
            points,
            arclen,
            closed,
        })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn arclens(&self) -> &[f64] {
        &self.arclen
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn sample_count(&self) -> usize {
        self.points.len()
    }

    /// Arclength of the last vertex (excludes the closing segment).
    pub fn vertex_span(&self) -> f64 {
        *self.arclen.last().unwrap()
    }

    /// Total length including the closing segment for closed curves.
    pub fn total_len(&self) -> f64 {
        let span = self.vertex_span();
        if self.closed {
            span + self.points[self.points.len() - 1].dist(self.points[0])
        } else {
            span
        }
    }

    /// Number of polyline segments (includes the closing one when closed).
    pub fn segment_count(&self) -> usize {
        if self.closed {
            self.points.len()
        } else {
            self.points.len() - 1
        }
    }

    pub fn segment(&self, i: usize) -> (Point, Point) {
        if i + 1 < self.points.len() {
            (self.points[i], self.points[i + 1])
        } else {
            debug_assert!(self.closed && i + 1 == self.points.len());
            (self.points[i], self.points[0])
        }
    }

    /// Point at arclength `s`. Exact (bitwise) at vertex positions.
    pub fn point_at(&self, s: f64) -> Result<Point> {
        let total = self.total_len();
        let tol = total * RANGE_SLACK;
        if !s.is_finite() || s < -tol || s > total + tol {
            return Err(Error::OutOfRange {
                s,
                lo: 0.0,
                hi: total,
            });
        }
        Ok(self.point_at_clamped(s.clamp(0.0, total)))
    }

    /// `s` must already lie in `[0, total_len]`.
    fn point_at_clamped(&self, s: f64) -> Point {
        let span = self.vertex_span();
        if s <= span {
            let idx = self.arclen.partition_point(|&a| a < s);
            if idx < self.arclen.len() && self.arclen[idx] == s {
                return self.points[idx];
            }
            debug_assert!(idx >= 1);
            let j = idx - 1;
            let t = (s - self.arclen[j]) / (self.arclen[idx] - self.arclen[j]);
            Point::lerp(self.points[j], self.points[idx], t)
        } else {
            // Closing segment of a closed curve.
            let total = self.total_len();
            if s >= total {
                return self.points[0];
            }
            let t = (s - span) / (total - span);
            Point::lerp(self.points[self.points.len() - 1], self.points[0], t)
        }
    }

    /// Point at a "linear" coordinate that may run past the seam of a closed
    /// curve (up to one extra wrap).
    fn point_at_linear(&self, s: f64) -> Point {
        let total = self.total_len();
        let s = if self.closed && s > total { s - total } else { s };
        self.point_at_clamped(s.clamp(0.0, total))
    }

    /// Arclength of the referenced subarc, validated against the table range.
    pub fn arc_length(&self, sub: SubarcRef) -> Result<f64> {
        let total = self.total_len();
        let tol = total * RANGE_SLACK;
        if sub.s_start < -tol || sub.s_end > total + tol {
            return Err(Error::OutOfRange {
                s: if sub.s_start < -tol {
                    sub.s_start
                } else {
                    sub.s_end
                },
                lo: 0.0,
                hi: total,
            });
        }
        Ok(sub.s_end - sub.s_start)
    }

    /// Resamples at uniform arclength spacing. Output points sit at
    /// positions `0, step, 2*step, ...`; for open curves the final point
    /// (position `total_len`) is always included. Endpoints are preserved
    /// exactly. A curve already sampled at exactly `step` round-trips to an
    /// identical point set.
    pub fn resample_by_arclength(&self, step: f64) -> Result<SampledCurve> {
        let total = self.total_len();
        if !(step.is_finite() && step > 0.0 && step < total) {
            return Err(Error::InvalidStep { step, len: total });
        }
        let n_est = (total / step) as usize + 2;
        let mut pts: Vec<Point> = Vec::with_capacity(n_est);
        let end_tol = total * 1e-12;
        let mut k: u64 = 0;
        loop {
            let s = k as f64 * step;
            if s >= total - end_tol {
                break;
            }
            pts.push(self.point_at_clamped(s));
            k += 1;
        }
        if !self.closed {
            pts.push(self.points[self.points.len() - 1]);
        }
        SampledCurve::from_points(pts, self.closed)
    }

    /// Extracts the polyline over the linear range `[lo, hi]`; for closed
    /// curves `hi` may extend past the seam (`hi <= lo + total_len`). The cut
    /// endpoints are interpolated; interior vertices are kept as-is.
    fn extract_linear(&self, lo: f64, hi: f64) -> Result<SampledCurve> {
        debug_assert!(lo < hi);
        let total = self.total_len();
        debug_assert!(hi <= total * (1.0 + RANGE_SLACK) || self.closed);
        let mut out: Vec<Point> = Vec::new();
        out.push(self.point_at_linear(lo));
        let m = self.points.len();
        let mut i = self.arclen.partition_point(|&a| a <= lo);
        let mut offset = 0.0;
        loop {
            if i == m {
                if !self.closed {
                    break;
                }
                i = 0;
                offset += total;
            }
            let pos = self.arclen[i] + offset;
            if pos >= hi {
                break;
            }
            let p = self.points[i];
            if *out.last().unwrap() != p {
                out.push(p);
            }
            i += 1;
        }
        let end = self.point_at_linear(hi);
        if *out.last().unwrap() != end {
            out.push(end);
        }
        SampledCurve::from_points(out, false)
    }

    /// The subarc between arclength positions `a` and `b` as an open curve.
    /// On closed curves the side with the smaller diameter is returned
    /// (smaller length breaks near-ties). On open curves it is the ordered
    /// range between the two positions.
    pub fn subarc(&self, a: f64, b: f64) -> Result<SampledCurve> {
        let (lo, hi) = self.select_side(a, b, None)?;
        self.extract_linear(lo, hi)
    }

    /// Chooses the subarc side for an endpoint pair. Returns a linear range
    /// `(lo, hi)` suitable for `extract_linear`. `curve_diam` avoids
    /// recomputing the hull diameter in scan loops.
    pub(crate) fn select_side(
        &self,
        a: f64,
        b: f64,
        curve_diam: Option<f64>,
    ) -> Result<(f64, f64)> {
        let total = self.total_len();
        let tol = total * RANGE_SLACK;
        for &s in &[a, b] {
            if !s.is_finite() || s < -tol || s > total + tol {
                return Err(Error::OutOfRange {
                    s,
                    lo: 0.0,
                    hi: total,
                });
            }
        }
        if a == b {
            return Err(Error::DegenerateSubarc { a, b });
        }
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        if !self.closed {
            return Ok((lo, hi));
        }
        let len_in = hi - lo;
        let len_out = total - len_in;
        // A side shorter than half the curve diameter necessarily has the
        // smaller diameter: diam(short) <= len(short) and diam(long) >=
        // diam(curve) - len(short).
        let diam = match curve_diam {
            Some(d) => d,
            None => self.diameter(),
        };
        let (short_range, short_len, long_range, long_len) = if len_in <= len_out {
            ((lo, hi), len_in, (hi, lo + total), len_out)
        } else {
            ((hi, lo + total), len_out, (lo, hi), len_in)
        };
        if short_len < diam / 2.0 {
            return Ok(short_range);
        }
        let d_short = self.extract_linear(short_range.0, short_range.1)?.diameter();
        let d_long = self.extract_linear(long_range.0, long_range.1)?.diameter();
        let tie = (d_short - d_long).abs() <= 1e-12 * diam;
        if tie {
            Ok(if short_len <= long_len {
                short_range
            } else {
                long_range
            })
        } else if d_short < d_long {
            Ok(short_range)
        } else {
            Ok(long_range)
        }
    }

    /// Supremum over the samples of `self` of the distance to the polyline
    /// `other` (exact point-segment distances).
    pub fn max_deviation(&self, other: &SampledCurve) -> f64 {
        let grid = SegmentGrid::build(other);
        let mut sup = 0.0f64;
        for &p in &self.points {
            let d = grid.distance(p);
            if d > sup {
                sup = d;
            }
        }
        sup
    }

    pub fn bounding_box(&self) -> (Point, Point) {
        let mut min = self.points[0];
        let mut max = self.points[0];
        for p in &self.points {
            min.x = min.x.min(p.x);
            min.y = min.y.min(p.y);
            max.x = max.x.max(p.x);
            max.y = max.y.max(p.y);
        }
        (min, max)
    }

    /// Diameter of the sample set (max pairwise distance), via convex hull.
    pub fn diameter(&self) -> f64 {
        let hull = convex_hull(&self.points);
        let mut best = 0.0f64;
        for i in 0..hull.len() {
            for j in i + 1..hull.len() {
                let d = hull[i].dist(hull[j]);
                if d > best {
                    best = d;
                }
            }
        }
        best
    }
}

/// Convex hull (monotone chain). Returns hull vertices; collinear inputs may
/// collapse to two points, which is fine for diameter queries.
pub(crate) fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut hull: Vec<Point> = Vec::with_capacity(pts.len().min(64) * 2);
    // Lower then upper.
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Point>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2 {
                let q = hull[hull.len() - 1];
                let r = hull[hull.len() - 2];
                if (q - r).cross(p - r) <= 0.0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        hull.pop(); // endpoint repeats as the start of the next pass
    }
    hull
}

pub(crate) fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let t = ((p - a).dot(ab) / ab.norm_sq()).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

/// Uniform grid over the segments of a curve for nearest-distance queries.
/// Exact: candidate cells are searched in expanding rings until no closer
/// cell remains.
pub(crate) struct SegmentGrid<'a> {
    curve: &'a SampledCurve,
    min: Point,
    cell: f64,
    nx: usize,
    ny: usize,
    starts: Vec<u32>,
    items: Vec<u32>,
}

impl<'a> SegmentGrid<'a> {
    pub fn build(curve: &'a SampledCurve) -> Self {
        let (bmin, bmax) = curve.bounding_box();
        let nseg = curve.segment_count();
        let diag = (bmax - bmin).norm().max(f64::MIN_POSITIVE);
        let avg_seg = curve.total_len() / nseg as f64;
        // Cell around 4x the average segment keeps occupancy low while
        // bounding the number of cells a segment straddles.
        let mut cell = (avg_seg * 4.0).max(diag / 2048.0);
        if !(cell > 0.0) {
            cell = diag;
        }
        let nx = (((bmax.x - bmin.x) / cell).ceil() as usize + 1).max(1);
        let ny = (((bmax.y - bmin.y) / cell).ceil() as usize + 1).max(1);

        let cell_of = |p: Point| -> (usize, usize) {
            let cx = (((p.x - bmin.x) / cell) as isize).clamp(0, nx as isize - 1) as usize;
            let cy = (((p.y - bmin.y) / cell) as isize).clamp(0, ny as isize - 1) as usize;
            (cx, cy)
        };

        let mut counts = vec![0u32; nx * ny + 1];
        let visit = |i: usize, f: &mut dyn FnMut(usize)| {
            let (a, b) = curve.segment(i);
            let (ax, ay) = cell_of(a);
            let (bx, by) = cell_of(b);
            for cy in ay.min(by)..=ay.max(by) {
                for cx in ax.min(bx)..=ax.max(bx) {
                    f(cy * nx + cx);
                }
            }
        };
        for i in 0..nseg {
            visit(i, &mut |c| counts[c + 1] += 1);
        }
        for i in 1..counts.len() {
            counts[i] += counts[i - 1];
        }
        let mut items = vec![0u32; counts[counts.len() - 1] as usize];
        let mut cursor = counts.clone();
        for i in 0..nseg {
            visit(i, &mut |c| {
                items[cursor[c] as usize] = i as u32;
                cursor[c] += 1;
            });
        }
        SegmentGrid {
            curve,
            min: bmin,
            cell,
            nx,
            ny,
            starts: counts,
            items,
        }
    }

    fn cell_distance_floor(&self, p: Point) -> f64 {
        // Distance from p to the grid bounding region (0 when inside).
        let dx = (self.min.x - p.x)
            .max(p.x - (self.min.x + self.cell * self.nx as f64))
            .max(0.0);
        let dy = (self.min.y - p.y)
            .max(p.y - (self.min.y + self.cell * self.ny as f64))
            .max(0.0);
        (dx * dx + dy * dy).sqrt()
    }

    pub fn distance(&self, p: Point) -> f64 {
        let cx = (((p.x - self.min.x) / self.cell) as isize).clamp(0, self.nx as isize - 1);
        let cy = (((p.y - self.min.y) / self.cell) as isize).clamp(0, self.ny as isize - 1);
        let outside = self.cell_distance_floor(p);
        let mut best = f64::INFINITY;
        let max_ring = self.nx.max(self.ny) as isize;
        let scan_cell = |x: isize, y: isize, best: &mut f64| {
            if x < 0 || y < 0 || x >= self.nx as isize || y >= self.ny as isize {
                return;
            }
            let c = y as usize * self.nx + x as usize;
            for &si in &self.items[self.starts[c] as usize..self.starts[c + 1] as usize] {
                let (a, b) = self.curve.segment(si as usize);
                let d = point_segment_distance(p, a, b);
                if d < *best {
                    *best = d;
                }
            }
        };
        for r in 0..=max_ring {
            if best.is_finite() && best <= outside + (r as f64 - 1.0).max(0.0) * self.cell {
                break;
            }
            if r == 0 {
                scan_cell(cx, cy, &mut best);
            } else {
                for x in (cx - r)..=(cx + r) {
                    scan_cell(x, cy - r, &mut best);
                    scan_cell(x, cy + r, &mut best);
                }
                for y in (cy - r + 1)..=(cy + r - 1) {
                    scan_cell(cx - r, y, &mut best);
                    scan_cell(cx + r, y, &mut best);
                }
            }
        }
        debug_assert!(best.is_finite());
        best
    }
}
