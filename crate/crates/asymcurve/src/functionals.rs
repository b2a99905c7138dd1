//! Numeric estimators of the curve-regularity functionals.
//!
//! Four quantities drive the analysis:
//!
//! * chord-arc ratio of a point pair: subarc length over chord length;
//! * conformality ratio: `max_w (|a-w| + |w-b|) / |a-b|` over the subarc,
//!   which bounds how far the subarc is from an ellipse degenerating to the
//!   chord (it never exceeds the chord-arc ratio);
//! * smoothness modulus: the chord-arc sup restricted to chords of length at
//!   most `delta`, reported on a ladder of deltas;
//! * uniform approximability: the minimal piece count of an inscribed
//!   polygon whose per-piece chord-arc ratio is at most `1 + eps`.
//!
//! On a closed curve, the subarc between two points is the side with the
//! smaller diameter (falling back to the shorter side on ties).
//!
//! Pair functionals are estimated by scanning a strided endpoint grid; a
//! scan never evaluates more than `pair_budget` pairs, subsampling the
//! candidate set with a seeded generator beyond that. Results carry the
//! realized pair counts so the sampling is visible in reports.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::curve::SampledCurve;
use crate::error::{Error, Result};
use crate::point::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairMetric {
    ChordArc,
    Conformality,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairScanConfig {
    /// Chord-length filter; `None` scans all pairs.
    pub delta: Option<f64>,
    /// Endpoint grid: every `stride`-th sample plus the final one.
    pub stride: usize,
    /// Maximum number of pairs evaluated; beyond it the candidate set is
    /// subsampled deterministically.
    pub pair_budget: u64,
    pub seed: u64,
}

impl Default for PairScanConfig {
    fn default() -> Self {
        PairScanConfig {
            delta: None,
            stride: 1,
            pair_budget: 2_000_000,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanResult {
    pub metric: PairMetric,
    pub sup_value: f64,
    /// Arclength positions of the pair realizing the sup.
    pub argmax_pair: (f64, f64),
    /// Pairs passing the chord filter (before any budget subsampling).
    pub pairs_candidate: u64,
    pub pairs_evaluated: u64,
    pub delta: Option<f64>,
    pub stride: usize,
}

/// Chord-arc ratio of the subarc between arclengths `sa` and `sb`.
pub fn chordarc_ratio(curve: &SampledCurve, sa: f64, sb: f64) -> Result<f64> {
    let pa = curve.point_at(sa)?;
    let pb = curve.point_at(sb)?;
    let chord = pa.dist(pb);
    if chord == 0.0 {
        return Err(Error::DegenerateSubarc { a: sa, b: sb });
    }
    let sub = curve.subarc(sa, sb)?;
    Ok(sub.total_len() / chord)
}

/// Conformality ratio of the subarc between `sa` and `sb`: the maximum over
/// subarc points `w` of `(|a-w| + |w-b|) / |a-b|`. The maximand is convex in
/// `w`, so the maximum over the polyline is attained at a vertex and the
/// vertex sweep is exact.
pub fn conformality_ratio(curve: &SampledCurve, sa: f64, sb: f64) -> Result<f64> {
    let pa = curve.point_at(sa)?;
    let pb = curve.point_at(sb)?;
    let chord = pa.dist(pb);
    if chord == 0.0 {
        return Err(Error::DegenerateSubarc { a: sa, b: sb });
    }
    let sub = curve.subarc(sa, sb)?;
    let mut best = 1.0f64;
    for &w in sub.points() {
        let v = (pa.dist(w) + w.dist(pb)) / chord;
        if v > best {
            best = v;
        }
    }
    Ok(best)
}

// ---------------------------------------------------------------------------
// Ball tree: exact range maxima of w -> |a-w| + |w-b| over vertex index
// ranges. Nodes cover contiguous index ranges; a node is pruned when
// |a-c| + |c-b| + 2r cannot beat the current best.
// ---------------------------------------------------------------------------

const BALL_LEAF: usize = 8;
const NO_CHILD: u32 = u32::MAX;

struct BallNode {
    lo: u32,
    hi: u32,
    center: Point,
    radius: f64,
    left: u32,
    right: u32,
}

struct BallTree {
    nodes: Vec<BallNode>,
    root: u32,
}

impl BallTree {
    fn build(pts: &[Point]) -> BallTree {
        let mut nodes = Vec::with_capacity(2 * pts.len() / BALL_LEAF + 2);
        let root = Self::build_rec(pts, 0, pts.len() as u32, &mut nodes);
        BallTree { nodes, root }
    }

    fn build_rec(pts: &[Point], lo: u32, hi: u32, nodes: &mut Vec<BallNode>) -> u32 {
        let (mut min, mut max) = (pts[lo as usize], pts[lo as usize]);
        for p in &pts[lo as usize..hi as usize] {
            min.x = min.x.min(p.x);
            min.y = min.y.min(p.y);
            max.x = max.x.max(p.x);
            max.y = max.y.max(p.y);
        }
        let center = Point::new(0.5 * (min.x + max.x), 0.5 * (min.y + max.y));
        let radius = pts[lo as usize..hi as usize]
            .iter()
            .map(|p| p.dist(center))
            .fold(0.0f64, f64::max);
        let (left, right) = if hi - lo <= BALL_LEAF as u32 {
            (NO_CHILD, NO_CHILD)
        } else {
            let mid = lo + (hi - lo) / 2;
            (
                Self::build_rec(pts, lo, mid, nodes),
                Self::build_rec(pts, mid, hi, nodes),
            )
        };
        nodes.push(BallNode {
            lo,
            hi,
            center,
            radius,
            left,
            right,
        });
        (nodes.len() - 1) as u32
    }

    /// Max of |a-w| + |w-b| over vertices with index in [qlo, qhi).
    fn max_sum(&self, pts: &[Point], a: Point, b: Point, qlo: u32, qhi: u32, best: &mut f64) {
        self.query(self.root, pts, a, b, qlo, qhi, best);
    }

    fn query(&self, id: u32, pts: &[Point], a: Point, b: Point, qlo: u32, qhi: u32, best: &mut f64) {
        let nd = &self.nodes[id as usize];
        if nd.hi <= qlo || nd.lo >= qhi {
            return;
        }
        if qlo <= nd.lo && nd.hi <= qhi {
            let bound = a.dist(nd.center) + nd.center.dist(b) + 2.0 * nd.radius;
            if bound <= *best {
                return;
            }
        }
        if nd.left == NO_CHILD {
            for i in nd.lo.max(qlo)..nd.hi.min(qhi) {
                let w = pts[i as usize];
                let v = a.dist(w) + w.dist(b);
                if v > *best {
                    *best = v;
                }
            }
        } else {
            self.query(nd.left, pts, a, b, qlo, qhi, best);
            self.query(nd.right, pts, a, b, qlo, qhi, best);
        }
    }
}

// ---------------------------------------------------------------------------
// Scanner: shared state for bulk pair evaluation.
// ---------------------------------------------------------------------------

const CHUNK_SHIFT: u32 = 9;
const CHUNK: usize = 1 << CHUNK_SHIFT;
const NDIR: usize = 16;
/// Extent in the best of NDIR directions underestimates a diameter by at
/// most sec(pi / (2 NDIR)).
const DIR_SLACK: f64 = 1.004_838_572_376_311_4;

/// Running min/max of projections onto the NDIR sample directions.
struct ExtentAcc {
    min: [f64; NDIR],
    max: [f64; NDIR],
}

impl ExtentAcc {
    fn new() -> ExtentAcc {
        ExtentAcc {
            min: [f64::INFINITY; NDIR],
            max: [f64::NEG_INFINITY; NDIR],
        }
    }

    fn add_point(&mut self, p: Point, dirs: &[Point; NDIR]) {
        for k in 0..NDIR {
            let d = p.dot(dirs[k]);
            self.min[k] = self.min[k].min(d);
            self.max[k] = self.max[k].max(d);
        }
    }

    fn max_extent(&self) -> f64 {
        let mut e = 0.0f64;
        for k in 0..NDIR {
            if self.max[k] > self.min[k] {
                e = e.max(self.max[k] - self.min[k]);
            }
        }
        e
    }
}

/// Sparse tables of per-chunk directional extents: O(1) min/max of the
/// projections onto NDIR fixed directions over any chunk range.
struct DirTable {
    dirs: [Point; NDIR],
    /// min_t[level][c][k] = min projection onto dir k over chunks
    /// c .. c + 2^level.
    min_t: Vec<Vec<[f64; NDIR]>>,
    max_t: Vec<Vec<[f64; NDIR]>>,
}

impl DirTable {
    fn build(pts: &[Point]) -> DirTable {
        let mut dirs = [Point::ZERO; NDIR];
        for (k, d) in dirs.iter_mut().enumerate() {
            let th = std::f64::consts::PI * k as f64 / NDIR as f64;
            *d = Point::new(th.cos(), th.sin());
        }
        let n_chunks = pts.len().div_ceil(CHUNK);
        let mut base: Vec<[f64; NDIR]> = Vec::with_capacity(n_chunks);
        let mut base_max: Vec<[f64; NDIR]> = Vec::with_capacity(n_chunks);
        for block in pts.chunks(CHUNK) {
            let mut acc = ExtentAcc::new();
            for &p in block {
                acc.add_point(p, &dirs);
            }
            base.push(acc.min);
            base_max.push(acc.max);
        }
        let mut min_t = vec![base];
        let mut max_t = vec![base_max];
        let mut len = 1usize;
        while 2 * len <= n_chunks {
            let prev_min = min_t.last().unwrap();
            let prev_max = max_t.last().unwrap();
            let m = n_chunks - 2 * len + 1;
            let mut nmin = Vec::with_capacity(m);
            let mut nmax = Vec::with_capacity(m);
            for c in 0..m {
                let mut lo = prev_min[c];
                let mut hi = prev_max[c];
                for k in 0..NDIR {
                    lo[k] = lo[k].min(prev_min[c + len][k]);
                    hi[k] = hi[k].max(prev_max[c + len][k]);
                }
                nmin.push(lo);
                nmax.push(hi);
            }
            min_t.push(nmin);
            max_t.push(nmax);
            len *= 2;
        }
        DirTable { dirs, min_t, max_t }
    }

    /// Folds the extents of chunks [c0, c1) into `acc`.
    fn merge_chunk_range(&self, c0: usize, c1: usize, acc: &mut ExtentAcc) {
        let c1 = c1.min(self.min_t[0].len());
        if c0 >= c1 {
            return;
        }
        let span = c1 - c0;
        let level = (usize::BITS - 1 - span.leading_zeros()) as usize;
        let level = level.min(self.min_t.len() - 1);
        let len = 1usize << level;
        for c in [c0, c1 - len] {
            let lo = &self.min_t[level][c];
            let hi = &self.max_t[level][c];
            for k in 0..NDIR {
                acc.min[k] = acc.min[k].min(lo[k]);
                acc.max[k] = acc.max[k].max(hi[k]);
            }
        }
    }
}

/// Which side of a closed curve forms the subarc of a pair.
enum SideRange {
    /// Vertex indices [ia, ib].
    Inner,
    /// Vertex indices [ib, n-1] followed by [0, ia].
    Outer,
}

struct Scanner<'a> {
    curve: &'a SampledCurve,
    pts: &'a [Point],
    arclen: &'a [f64],
    total: f64,
    diam: f64,
    tree: Option<BallTree>,
    /// Directional-extent tables, built only for closed curves.
    dir: Option<DirTable>,
}

impl<'a> Scanner<'a> {
    fn new(curve: &'a SampledCurve, with_tree: bool) -> Scanner<'a> {
        let pts = curve.points();
        Scanner {
            curve,
            pts,
            arclen: curve.arclens(),
            total: curve.total_len(),
            diam: curve.diameter(),
            tree: if with_tree {
                Some(BallTree::build(pts))
            } else {
                None
            },
            dir: if curve.is_closed() {
                Some(DirTable::build(pts))
            } else {
                None
            },
        }
    }

    /// (lower, upper) bounds on the diameter of the union of the given
    /// vertex index ranges (inclusive). The lower bound uses only chunks
    /// fully inside a range plus the range endpoints; the upper bound uses
    /// every chunk a range touches, inflated by the direction quantization.
    fn diam_bounds(&self, ranges: &[(usize, usize)]) -> (f64, f64) {
        let dt = self.dir.as_ref().unwrap();
        let mut inner = ExtentAcc::new();
        let mut outer = ExtentAcc::new();
        for &(lo, hi) in ranges {
            dt.merge_chunk_range(lo >> CHUNK_SHIFT, (hi >> CHUNK_SHIFT) + 1, &mut outer);
            let ic0 = (lo + CHUNK - 1) >> CHUNK_SHIFT;
            let ic1 = (hi + 1) >> CHUNK_SHIFT;
            if ic0 < ic1 {
                dt.merge_chunk_range(ic0, ic1, &mut inner);
            }
            inner.add_point(self.pts[lo], &dt.dirs);
            inner.add_point(self.pts[hi], &dt.dirs);
        }
        (inner.max_extent(), outer.max_extent() * DIR_SLACK)
    }

    /// Side selection for a closed-curve pair: the smaller-diameter side.
    /// When the shorter side's length is below half the curve diameter it
    /// is automatically the smaller-diameter side and no geometry is
    /// examined; otherwise directional extents decide. In the narrow band
    /// where the two sides' diameter bounds overlap (within ~1% plus chunk
    /// granularity) the shorter side is used.
    fn choose_side(&self, ia: usize, ib: usize) -> (SideRange, f64) {
        let inner_len = self.arclen[ib] - self.arclen[ia];
        let outer_len = self.total - inner_len;
        let (short_inner, short_len) = if inner_len <= outer_len {
            (true, inner_len)
        } else {
            (false, outer_len)
        };
        if short_len < 0.5 * self.diam {
            return if short_inner {
                (SideRange::Inner, inner_len)
            } else {
                (SideRange::Outer, outer_len)
            };
        }
        let (lo_in, up_in) = self.diam_bounds(&[(ia, ib)]);
        let (lo_out, up_out) = self.diam_bounds(&[(ib, self.pts.len() - 1), (0, ia)]);
        if up_in < lo_out {
            (SideRange::Inner, inner_len)
        } else if up_out < lo_in {
            (SideRange::Outer, outer_len)
        } else if short_inner {
            (SideRange::Inner, inner_len)
        } else {
            (SideRange::Outer, outer_len)
        }
    }

    /// Evaluates one metric for the vertex pair (ia < ib). Returns the value
    /// or `None` for a degenerate chord.
    fn eval(&self, ia: usize, ib: usize, metric: PairMetric) -> Option<f64> {
        let pa = self.pts[ia];
        let pb = self.pts[ib];
        let chord = pa.dist(pb);
        if chord == 0.0 {
            return None;
        }
        if !self.curve.is_closed() {
            let len = self.arclen[ib] - self.arclen[ia];
            return Some(match metric {
                PairMetric::ChordArc => len / chord,
                PairMetric::Conformality => {
                    let mut best = chord;
                    self.tree.as_ref().unwrap().max_sum(
                        self.pts,
                        pa,
                        pb,
                        ia as u32,
                        ib as u32 + 1,
                        &mut best,
                    );
                    best / chord
                }
            });
        }
        let (side, len) = self.choose_side(ia, ib);
        Some(match metric {
            PairMetric::ChordArc => len / chord,
            PairMetric::Conformality => {
                let tree = self.tree.as_ref().unwrap();
                let mut best = chord;
                match side {
                    SideRange::Inner => {
                        tree.max_sum(self.pts, pa, pb, ia as u32, ib as u32 + 1, &mut best)
                    }
                    SideRange::Outer => {
                        tree.max_sum(self.pts, pa, pb, ib as u32, self.pts.len() as u32, &mut best);
                        tree.max_sum(self.pts, pa, pb, 0, ia as u32 + 1, &mut best);
                    }
                }
                best / chord
            }
        })
    }
}

fn candidate_indices(count: usize, stride: usize) -> Vec<u32> {
    let stride = stride.max(1);
    let mut v: Vec<u32> = (0..count).step_by(stride).map(|i| i as u32).collect();
    if *v.last().unwrap() != (count - 1) as u32 {
        v.push((count - 1) as u32);
    }
    v
}

/// Draws up to `k` distinct ranks from `[0, total)`, sorted ascending;
/// deterministic in `seed`. Sampling is with replacement followed by
/// deduplication, so the count can fall slightly short of `k` (the budget is
/// an upper bound).
fn sample_ranks(total: u64, k: u64, seed: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<u64> = (0..k).map(|_| rng.next_u64() % total).collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Inverse of the lexicographic pair enumeration: rank `t` in `[0, c(c-1)/2)`
/// maps to indices `(i, j)` with `i < j < c`.
fn unrank_pair(t: u64, c: u64) -> (u64, u64) {
    let row_start = |i: u64| i * c - i * (i + 1) / 2;
    let tf = t as f64;
    let cf = c as f64;
    let disc = ((cf - 0.5) * (cf - 0.5) - 2.0 * tf).max(0.0);
    let mut i = (cf - 0.5 - disc.sqrt()).floor().max(0.0) as u64;
    i = i.min(c - 2);
    while row_start(i) > t {
        i -= 1;
    }
    while i + 1 <= c - 2 && row_start(i + 1) <= t {
        i += 1;
    }
    let j = i + 1 + (t - row_start(i));
    (i, j)
}

/// Sup of a pair metric over the endpoint grid, honoring the chord filter
/// and the pair budget. The scan is deterministic: identical input and
/// config reproduce the result bit for bit.
pub fn scan_sup(
    curve: &SampledCurve,
    metric: PairMetric,
    cfg: &PairScanConfig,
) -> Result<ScanResult> {
    let scanner = Scanner::new(curve, metric == PairMetric::Conformality);
    let cands = candidate_indices(curve.sample_count(), cfg.stride);
    let c = cands.len() as u64;
    if c < 2 {
        return Err(Error::EmptyScan {
            delta: cfg.delta.unwrap_or(f64::INFINITY),
        });
    }
    let t_total = c * (c - 1) / 2;
    let budget = cfg.pair_budget.max(1);

    let mut sup = f64::NEG_INFINITY;
    let mut arg = (0u32, 0u32);
    let mut evaluated = 0u64;
    let mut consider = |scanner: &Scanner, ia: u32, ib: u32| {
        if let Some(v) = scanner.eval(ia as usize, ib as usize, metric) {
            evaluated += 1;
            if v > sup {
                sup = v;
                arg = (ia, ib);
            }
        }
    };

    let pairs_candidate;
    match cfg.delta {
        None => {
            pairs_candidate = t_total;
            if t_total <= budget {
                for x in 0..cands.len() {
                    for y in (x + 1)..cands.len() {
                        consider(&scanner, cands[x], cands[y]);
                    }
                }
            } else {
                for t in sample_ranks(t_total, budget, cfg.seed) {
                    let (x, y) = unrank_pair(t, c);
                    consider(&scanner, cands[x as usize], cands[y as usize]);
                }
            }
        }
        Some(delta) => {
            if !(delta > 0.0) {
                return Err(Error::BadParameter {
                    name: "delta",
                    value: delta,
                    expected: "positive",
                });
            }
            let d2 = delta * delta;
            let mut passing = 0u64;
            for x in 0..cands.len() {
                let p = scanner.pts[cands[x] as usize];
                for y in (x + 1)..cands.len() {
                    if (p - scanner.pts[cands[y] as usize]).norm_sq() <= d2 {
                        passing += 1;
                    }
                }
            }
            if passing == 0 {
                return Err(Error::EmptyScan { delta });
            }
            pairs_candidate = passing;
            let ranks = if passing > budget {
                Some(sample_ranks(passing, budget, cfg.seed))
            } else {
                None
            };
            let mut next = 0usize;
            let mut rank = 0u64;
            'outer: for x in 0..cands.len() {
                let p = scanner.pts[cands[x] as usize];
                for y in (x + 1)..cands.len() {
                    if (p - scanner.pts[cands[y] as usize]).norm_sq() <= d2 {
                        match &ranks {
                            None => consider(&scanner, cands[x], cands[y]),
                            Some(r) => {
                                if next >= r.len() {
                                    break 'outer;
                                }
                                if r[next] == rank {
                                    consider(&scanner, cands[x], cands[y]);
                                    next += 1;
                                }
                            }
                        }
                        rank += 1;
                    }
                }
            }
        }
    }

    if !sup.is_finite() {
        return Err(Error::EmptyScan {
            delta: cfg.delta.unwrap_or(f64::INFINITY),
        });
    }
    Ok(ScanResult {
        metric,
        sup_value: sup,
        argmax_pair: (
            scanner.arclen[arg.0 as usize],
            scanner.arclen[arg.1 as usize],
        ),
        pairs_candidate,
        pairs_evaluated: evaluated,
        delta: cfg.delta,
        stride: cfg.stride.max(1),
    })
}

/// One evaluated pair retained by `scan_collect`.
#[derive(Debug, Clone, Copy)]
pub struct PairSample {
    pub chord: f64,
    pub chordarc: f64,
    pub conformality: f64,
    pub sa: f64,
    pub sb: f64,
}

/// Evaluates both pair metrics for every grid pair with chord at most
/// `delta` (subsampled beyond the budget) and returns the samples, so caller
/// code can take nested sups at smaller deltas without rescanning.
pub fn scan_collect(
    curve: &SampledCurve,
    delta: f64,
    cfg: &PairScanConfig,
) -> Result<Vec<PairSample>> {
    if !(delta > 0.0) {
        return Err(Error::BadParameter {
            name: "delta",
            value: delta,
            expected: "positive",
        });
    }
    let scanner = Scanner::new(curve, true);
    let cands = candidate_indices(curve.sample_count(), cfg.stride);
    if cands.len() < 2 {
        return Err(Error::EmptyScan { delta });
    }
    let budget = cfg.pair_budget.max(1);
    let d2 = delta * delta;
    let mut passing = 0u64;
    for x in 0..cands.len() {
        let p = scanner.pts[cands[x] as usize];
        for y in (x + 1)..cands.len() {
            if (p - scanner.pts[cands[y] as usize]).norm_sq() <= d2 {
                passing += 1;
            }
        }
    }
    if passing == 0 {
        return Err(Error::EmptyScan { delta });
    }
    let ranks = if passing > budget {
        Some(sample_ranks(passing, budget, cfg.seed))
    } else {
        None
    };
    let mut out = Vec::with_capacity(passing.min(budget) as usize);
    let mut next = 0usize;
    let mut rank = 0u64;
    'outer: for x in 0..cands.len() {
        let ia = cands[x] as usize;
        let pa = scanner.pts[ia];
        for y in (x + 1)..cands.len() {
            let ib = cands[y] as usize;
            let c2 = (pa - scanner.pts[ib]).norm_sq();
            if c2 <= d2 {
                let take = match &ranks {
                    None => true,
                    Some(r) => {
                        if next >= r.len() {
                            break 'outer;
                        }
                        let t = r[next] == rank;
                        if t {
                            next += 1;
                        }
                        t
                    }
                };
                if take {
                    if let (Some(ca), Some(co)) = (
                        scanner.eval(ia, ib, PairMetric::ChordArc),
                        scanner.eval(ia, ib, PairMetric::Conformality),
                    ) {
                        out.push(PairSample {
                            chord: c2.sqrt(),
                            chordarc: ca,
                            conformality: co,
                            sa: scanner.arclen[ia],
                            sb: scanner.arclen[ib],
                        });
                    }
                }
                rank += 1;
            }
        }
    }
    Ok(out)
}

/// Smoothness modulus ladder: for each delta (descending), the chord-arc sup
/// over pairs with chord at most delta. A single scan at the largest delta
/// is reused for the smaller ones, so the ladder is monotone by
/// construction.
pub fn smoothness_ladder(
    curve: &SampledCurve,
    deltas: &[f64],
    cfg: &PairScanConfig,
) -> Result<Vec<LadderRow>> {
    let samples = scan_collect(curve, deltas.iter().cloned().fold(0.0, f64::max), cfg)?;
    Ok(ladder_from_samples(&samples, deltas, |s| s.chordarc))
}

/// Ladder row: the sup of a metric over pairs with chord <= delta.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LadderRow {
    pub delta: f64,
    pub sup: f64,
    pub arg_s: (f64, f64),
    pub pairs: u64,
}

fn ladder_from_samples(
    samples: &[PairSample],
    deltas: &[f64],
    value: impl Fn(&PairSample) -> f64,
) -> Vec<LadderRow> {
    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.sort_by(|&a, &b| samples[a].chord.total_cmp(&samples[b].chord));
    let mut rows: Vec<LadderRow> = Vec::with_capacity(deltas.len());
    let mut sorted_deltas: Vec<f64> = deltas.to_vec();
    sorted_deltas.sort_by(f64::total_cmp);
    let mut best = f64::NEG_INFINITY;
    let mut arg = (0.0, 0.0);
    let mut i = 0usize;
    for &d in &sorted_deltas {
        while i < order.len() && samples[order[i]].chord <= d {
            let s = &samples[order[i]];
            let v = value(s);
            if v > best {
                best = v;
                arg = (s.sa, s.sb);
            }
            i += 1;
        }
        rows.push(LadderRow {
            delta: d,
            sup: if best.is_finite() { best } else { f64::NAN },
            arg_s: arg,
            pairs: i as u64,
        });
    }
    // Report in the caller's order.
    let mut out = Vec::with_capacity(deltas.len());
    for &d in deltas {
        let row = rows
            .iter()
            .find(|r| r.delta == d)
            .expect("delta present")
            .clone();
        out.push(row);
    }
    out
}

// ---------------------------------------------------------------------------
// Uniform approximability.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UaMode {
    /// Equal-arclength partition into n pieces.
    Equal,
    /// Free partition over a candidate point set, minimized exactly by
    /// dynamic programming.
    Dp,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum UaOutcome {
    Found { n: u64 },
    NotFound { n_cap: u64, achieved_ratio: f64 },
}

/// Worst per-piece chord-arc ratio of the equal-arclength partition of the
/// whole curve into `n` pieces (anchored at s = 0 on closed curves).
pub fn equal_partition_ratio(curve: &SampledCurve, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::BadParameter {
            name: "n",
            value: 0.0,
            expected: "at least 1",
        });
    }
    let total = curve.total_len();
    let piece = total / n as f64;
    let mut worst = 0.0f64;
    let mut prev = curve.point_at(0.0)?;
    for k in 1..=n {
        let s = if k == n { total } else { piece * k as f64 };
        let p = curve.point_at(s)?;
        let chord = prev.dist(p);
        if chord == 0.0 {
            return Ok(f64::INFINITY);
        }
        worst = worst.max(piece / chord);
        prev = p;
    }
    Ok(worst)
}

/// Minimal `n` such that the equal-arclength n-piece inscribed polygon has
/// every piece ratio at most `1 + eps`. Doubling plus binary search, then a
/// downward walk so the result carries a local certificate: `n` passes and
/// `n - 1` fails.
pub fn ua_equal(curve: &SampledCurve, eps: f64, n_cap: u64) -> Result<UaOutcome> {
    if !(eps > 0.0) {
        return Err(Error::BadParameter {
            name: "eps",
            value: eps,
            expected: "positive",
        });
    }
    let bound = 1.0 + eps;
    let mut n = 1u64;
    let mut last_fail = 0u64;
    loop {
        let r = equal_partition_ratio(curve, n)?;
        if r <= bound {
            break;
        }
        last_fail = n;
        if n >= n_cap {
            return Ok(UaOutcome::NotFound {
                n_cap,
                achieved_ratio: r,
            });
        }
        n = (n * 2).min(n_cap);
    }
    let (mut lo, mut hi) = (last_fail, n);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if equal_partition_ratio(curve, mid)? <= bound {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    while hi > 1 && equal_partition_ratio(curve, hi - 1)? <= bound {
        hi -= 1;
    }
    Ok(UaOutcome::Found { n: hi })
}

/// Minimal piece count over a free partition drawn from a candidate set
/// (every `stride`-th vertex, plus the equal-mode solution's partition
/// points so the free answer can never exceed the equal one). Exact dynamic
/// program over the candidates; per-piece feasibility is the chord-arc
/// ratio test, O(1) per edge.
pub fn ua_dp(curve: &SampledCurve, eps: f64, n_cap: u64, stride: usize) -> Result<UaOutcome> {
    if !(eps > 0.0) {
        return Err(Error::BadParameter {
            name: "eps",
            value: eps,
            expected: "positive",
        });
    }
    let bound = 1.0 + eps;
    let total = curve.total_len();
    let equal = ua_equal(curve, eps, n_cap)?;

    let mut svals: Vec<f64> = curve
        .arclens()
        .iter()
        .step_by(stride.max(1))
        .cloned()
        .collect();
    if let UaOutcome::Found { n } = equal {
        let piece = total / n as f64;
        for k in 1..n {
            svals.push(piece * k as f64);
        }
    }
    svals.push(total);
    svals.sort_by(f64::total_cmp);
    svals.dedup();
    let c = svals.len();
    let pts: Vec<Point> = svals
        .iter()
        .map(|&s| curve.point_at(s))
        .collect::<Result<_>>()?;

    // links[j]: minimal pieces covering [0, s_j]; u64::MAX = unreachable.
    let diam = curve.diameter();
    let mut links = vec![u64::MAX; c];
    links[0] = 0;
    for j in 1..c {
        let mut best = u64::MAX;
        for i in (0..j).rev() {
            let arc = svals[j] - svals[i];
            if arc > bound * diam {
                // Chords never exceed the diameter, so every earlier
                // candidate fails too.
                break;
            }
            if links[i] == u64::MAX {
                continue;
            }
            let chord = pts[i].dist(pts[j]);
            if chord > 0.0 && arc / chord <= bound {
                best = best.min(links[i] + 1);
            }
        }
        links[j] = best;
    }
    let dp = links[c - 1];
    let result = match (dp, equal) {
        (u64::MAX, eq) => eq,
        (n, UaOutcome::Found { n: ne }) => UaOutcome::Found { n: n.min(ne) },
        (n, UaOutcome::NotFound { .. }) => {
            if n <= n_cap {
                UaOutcome::Found { n }
            } else {
                equal
            }
        }
    };
    Ok(result)
}

// ---------------------------------------------------------------------------
// Classification.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassifyConfig {
    /// Delta ladder as fractions of the curve diameter, descending.
    pub delta_fracs: Vec<f64>,
    /// Endpoint grid stride; 0 picks one aiming at about 3000 candidates.
    pub stride: usize,
    pub pair_budget: u64,
    pub seed: u64,
    /// Tolerance for UA, as a fraction: pieces must satisfy ratio <= 1 + eps.
    pub ua_eps: f64,
    pub ua_n_cap: u64,
    /// A ladder that has descended to within this of 1 at the smallest
    /// delta counts as asymptotically trivial.
    pub trend_tol: f64,
    /// Chord-arc constants above this flag the curve as not chord-arc.
    pub chord_arc_max: f64,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            delta_fracs: (3..=12).map(|i| 0.5f64.powi(i)).collect(),
            stride: 0,
            pair_budget: 2_000_000,
            seed: 7,
            ua_eps: 0.01,
            ua_n_cap: 1 << 20,
            trend_tol: 0.02,
            chord_arc_max: 1e12,
        }
    }
}

/// One uniform-approximability query inside a classification report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UaEntry {
    /// Arclength window on the curve; (0, total) is the whole curve.
    pub subarc: (f64, f64),
    pub epsilon: f64,
    pub mode: UaMode,
    pub n_cap: u64,
    /// Minimal piece count, or None when n_cap was reached first.
    pub n_min: Option<u64>,
    /// Worst piece ratio at n_cap, reported when n_min is None.
    pub achieved_ratio: Option<f64>,
}

impl UaEntry {
    fn from_outcome(
        subarc: (f64, f64),
        epsilon: f64,
        mode: UaMode,
        n_cap: u64,
        outcome: UaOutcome,
    ) -> UaEntry {
        let (n_min, achieved_ratio) = match outcome {
            UaOutcome::Found { n } => (Some(n), None),
            UaOutcome::NotFound {
                achieved_ratio, ..
            } => (None, Some(achieved_ratio)),
        };
        UaEntry {
            subarc,
            epsilon,
            mode,
            n_cap,
            n_min,
            achieved_ratio,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChordArcSummary {
    pub sup: f64,
    /// Arclength positions of the pair realizing the sup.
    pub argmax: (f64, f64),
    pub pairs: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConsistencyFlags {
    /// Chord-arc constant is finite and below the configured ceiling.
    pub chord_arc: bool,
    /// Conformality ladder has descended to 1 + trend_tol at the smallest
    /// delta.
    pub asymptotically_conformal: bool,
    /// Smoothness ladder has descended likewise.
    pub asymptotically_smooth: bool,
    /// Every tested subarc reached its minimal n within the cap.
    pub ua_all_found: bool,
    /// Free-partition UA found no more pieces than the equal partition.
    pub dp_not_worse: bool,
    /// Both ladders are nondecreasing in delta (sanity of the estimator).
    pub ladders_monotone: bool,
    /// Smooth implies conformal and approximable; vacuous when the
    /// smoothness trend stays away from 1. The converse is not decidable
    /// from finite scans and is not asserted.
    pub forward_consistency: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub samples: u64,
    pub closed: bool,
    pub total_len: f64,
    pub diameter: f64,
    pub chordarc: ChordArcSummary,
    pub conformality: Vec<LadderRow>,
    pub smoothness: Vec<LadderRow>,
    pub ua: Vec<UaEntry>,
    pub consistency_flags: ConsistencyFlags,
    pub stride: usize,
    pub pair_budget: u64,
    pub seed: u64,
}

/// Chord-arc sup over scanned pairs with chord at most `delta`. Errors with
/// `EmptyScan` when no candidate pair is that close.
pub fn smoothness_modulus(
    curve: &SampledCurve,
    delta: f64,
    cfg: &PairScanConfig,
) -> Result<f64> {
    let cfg = PairScanConfig {
        delta: Some(delta),
        ..cfg.clone()
    };
    Ok(scan_sup(curve, PairMetric::ChordArc, &cfg)?.sup_value)
}

/// Minimal piece count for the subarc `(a, b)` of the curve (the whole curve
/// when `sub` is None) at tolerance `eps`. Closed-curve subarcs follow the
/// smaller-diameter selection rule. `dp_stride` thins the candidate vertex
/// grid in dp mode and is ignored in equal mode.
pub fn uniform_approx_n(
    curve: &SampledCurve,
    sub: Option<(f64, f64)>,
    eps: f64,
    n_cap: u64,
    mode: UaMode,
    dp_stride: usize,
) -> Result<UaOutcome> {
    let run = |c: &SampledCurve| match mode {
        UaMode::Equal => ua_equal(c, eps, n_cap),
        UaMode::Dp => ua_dp(c, eps, n_cap, dp_stride),
    };
    match sub {
        None => run(curve),
        Some((a, b)) => run(&curve.subarc(a, b)?),
    }
}

/// Runs the full battery: global chord-arc constant, conformality and
/// smoothness ladders on a shared delta scan, and UA over a stratified
/// subarc set (the whole curve in both modes, plus the four arclength
/// quarters in equal mode).
pub fn classify(curve: &SampledCurve, cfg: &ClassifyConfig) -> Result<ClassificationReport> {
    if cfg.delta_fracs.is_empty() {
        return Err(Error::BadParameter {
            name: "delta_fracs",
            value: 0.0,
            expected: "a nonempty ladder",
        });
    }
    let diam = curve.diameter();
    let stride = if cfg.stride == 0 {
        // The endpoint grid must be finer than the smallest ladder rung or
        // its bucket would be empty; keep at least ~1000 candidates for
        // coverage and cap the total so the pair walk stays tractable.
        let delta_min =
            cfg.delta_fracs.iter().cloned().fold(f64::INFINITY, f64::min) * diam;
        let count = curve.sample_count();
        let spacing = curve.total_len() / count as f64;
        let covers_delta = (delta_min / (2.0 * spacing)) as usize;
        let keeps_1000 = (count / 1_000).max(1);
        let caps_150_000 = (count / 150_000).max(1);
        covers_delta.clamp(1, keeps_1000).max(caps_150_000)
    } else {
        cfg.stride
    };
    let scan_cfg = PairScanConfig {
        delta: None,
        stride,
        pair_budget: cfg.pair_budget,
        seed: cfg.seed,
    };
    let global = scan_sup(curve, PairMetric::ChordArc, &scan_cfg)?;

    let deltas: Vec<f64> = cfg.delta_fracs.iter().map(|f| f * diam).collect();
    let delta_max = deltas.iter().cloned().fold(0.0, f64::max);
    let samples = scan_collect(curve, delta_max, &scan_cfg)?;
    let conformality = ladder_from_samples(&samples, &deltas, |s| s.conformality);
    let smoothness = ladder_from_samples(&samples, &deltas, |s| s.chordarc);

    let ua_stride = (curve.sample_count() / 20_000).max(1);
    let total = curve.total_len();
    let full = (0.0, total);
    let equal_full = ua_equal(curve, cfg.ua_eps, cfg.ua_n_cap)?;
    let dp_full = ua_dp(curve, cfg.ua_eps, cfg.ua_n_cap, ua_stride)?;
    let mut ua = vec![
        UaEntry::from_outcome(full, cfg.ua_eps, UaMode::Equal, cfg.ua_n_cap, equal_full),
        UaEntry::from_outcome(full, cfg.ua_eps, UaMode::Dp, cfg.ua_n_cap, dp_full),
    ];
    for q in 0..4 {
        let win = (total * q as f64 / 4.0, total * (q + 1) as f64 / 4.0);
        let outcome =
            uniform_approx_n(curve, Some(win), cfg.ua_eps, cfg.ua_n_cap, UaMode::Equal, 1)?;
        ua.push(UaEntry::from_outcome(
            win,
            cfg.ua_eps,
            UaMode::Equal,
            cfg.ua_n_cap,
            outcome,
        ));
    }

    let last_conf = conformality.last().unwrap();
    let last_smooth = smoothness.last().unwrap();
    let monotone = |rows: &[LadderRow]| {
        let mut sorted = rows.to_vec();
        sorted.sort_by(|a, b| a.delta.total_cmp(&b.delta));
        sorted.windows(2).all(|w| w[0].sup <= w[1].sup)
    };
    let dp_not_worse = match (dp_full, equal_full) {
        (UaOutcome::Found { n: nd }, UaOutcome::Found { n: ne }) => nd <= ne,
        (UaOutcome::Found { .. }, UaOutcome::NotFound { .. }) => true,
        (UaOutcome::NotFound { .. }, UaOutcome::NotFound { .. }) => true,
        (UaOutcome::NotFound { .. }, UaOutcome::Found { .. }) => false,
    };
    let asymptotically_conformal = last_conf.sup <= 1.0 + cfg.trend_tol;
    let asymptotically_smooth = last_smooth.sup <= 1.0 + cfg.trend_tol;
    let ua_all_found = ua.iter().all(|e| e.n_min.is_some());
    let consistency_flags = ConsistencyFlags {
        chord_arc: global.sup_value.is_finite() && global.sup_value <= cfg.chord_arc_max,
        asymptotically_conformal,
        asymptotically_smooth,
        ua_all_found,
        dp_not_worse,
        ladders_monotone: monotone(&conformality) && monotone(&smoothness),
        forward_consistency: !asymptotically_smooth
            || (asymptotically_conformal && ua_all_found),
    };
    Ok(ClassificationReport {
        samples: curve.sample_count() as u64,
        closed: curve.is_closed(),
        total_len: total,
        diameter: diam,
        chordarc: ChordArcSummary {
            sup: global.sup_value,
            argmax: global.argmax_pair,
            pairs: global.pairs_evaluated,
        },
        conformality,
        smoothness,
        ua,
        consistency_flags,
        stride,
        pair_budget: cfg.pair_budget,
        seed: cfg.seed,
    })
}
