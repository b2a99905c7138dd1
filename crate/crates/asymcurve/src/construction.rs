//! Iterated bump refinement.
//!
//! Level 1 over the dyadic block `[2^-n, 2^-(n-1)]` is the graph of a single
//! sin^2 bump of height `1/(n 2^n)`. Each further level splits the previous
//! curve at its inflection points, partitions every convex subarc into
//! near-equal pieces of length `alpha * eps` (alpha in [1, 2)), and embeds a
//! bump of relative height `sqrt(beta)` on each piece, pointing to the convex
//! side. `beta` grows as `(k-1)/n^2` per level while `eps` shrinks with the
//! measured curvature, so wiggles pile up at ever finer scales.
//!
//! A full curve is assembled by placing the block for every `n` side by side
//! on the x-axis and closing the figure with two semicircular caps and a
//! bottom segment.

use serde::{Deserialize, Serialize};

use crate::bump::{partition_equal, PartitionSpec, Side};
use crate::curve::SampledCurve;
use crate::error::{Error, Result};
use crate::frenet::{
    curvature_profile, default_kappa_tol, inflection_points, CurvatureProfile,
};
use crate::point::Point;

pub const DEFAULT_SAMPLES_PER_BUMP: u32 = 16;
pub const DEFAULT_LEVEL1_SAMPLES: usize = 4096;
/// Default cap on total stored samples per build; keeps deep builds in
/// low-GB memory. Override per call or via ASYMCURVE_BUDGET in the CLI.
pub const DEFAULT_SAMPLE_BUDGET: u64 = 200_000_000;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BuildOptions {
    pub samples_per_bump: u32,
    pub level1_samples: usize,
    pub budget: u64,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            samples_per_bump: DEFAULT_SAMPLES_PER_BUMP,
            level1_samples: DEFAULT_LEVEL1_SAMPLES,
            budget: DEFAULT_SAMPLE_BUDGET,
        }
    }
}

/// Plan for one maximal constant-sign subarc of the previous level.
#[derive(Debug, Clone)]
pub struct SubarcPlan {
    pub s_start: f64,
    pub s_end: f64,
    pub mean_kappa: f64,
    pub side: Side,
    /// None when the subarc is shorter than eps: it is passed through
    /// unembellished (counted as a warning by the caller).
    pub partition: Option<PartitionSpec>,
}

/// Everything needed to refine level k-1 into level k.
#[derive(Debug, Clone)]
pub struct LevelParams {
    pub n: u32,
    pub k: u32,
    /// beta_n^(k-1) = (k-1)/n^2; the embedded bump height is sqrt(beta).
    pub beta: f64,
    /// Measured sup |kappa| of the previous level.
    pub k_prev: f64,
    /// eps_n^(k-2); eps_n^(0) = 2^-(n+1).
    pub eps_prev_prev: f64,
    /// eps_n^(k-1) = min(sqrt(beta)/k_prev, eps_prev_prev/2).
    pub eps: f64,
    pub subarcs: Vec<SubarcPlan>,
    /// Vertex-resolution curvature of the previous level; the embedding
    /// fold check reads it instead of re-measuring below that resolution.
    pub profile: CurvatureProfile,
}

/// Monotone piecewise-affine correspondence between a refined curve's
/// arclength and its parent's, recorded sample by sample.
#[derive(Debug, Clone)]
pub struct ParamMap {
    child_s: Vec<f64>,
    parent_s: Vec<f64>,
}

impl ParamMap {
    fn new(child_s: Vec<f64>, parent_s: Vec<f64>) -> Self {
        debug_assert_eq!(child_s.len(), parent_s.len());
        debug_assert!(child_s.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(parent_s.windows(2).all(|w| w[0] < w[1]));
        ParamMap { child_s, parent_s }
    }

    pub fn child_s(&self) -> &[f64] {
        &self.child_s
    }

    pub fn parent_s(&self) -> &[f64] {
        &self.parent_s
    }

    /// Parent arclength corresponding to child arclength `s` (clamped).
    pub fn to_parent(&self, s: f64) -> f64 {
        let n = self.child_s.len();
        let s = s.clamp(self.child_s[0], self.child_s[n - 1]);
        let idx = self.child_s.partition_point(|&c| c < s);
        if idx < n && self.child_s[idx] == s {
            return self.parent_s[idx];
        }
        let j = idx - 1;
        let t = (s - self.child_s[j]) / (self.child_s[idx] - self.child_s[j]);
        self.parent_s[j] + (self.parent_s[idx] - self.parent_s[j]) * t
    }
}

/// Child-sample index range of one partition piece.
#[derive(Debug, Clone, Copy)]
pub struct PieceRecord {
    pub child_i0: usize,
    pub child_i1: usize,
    pub parent_s0: f64,
    pub parent_s1: f64,
    pub side: Side,
    /// Absolute bump amplitude (piece length times sqrt(beta)); 0 for
    /// pass-through pieces.
    pub amplitude: f64,
    pub embedded: bool,
}

/// Result of one refinement step, kept alongside the refined curve.
#[derive(Debug, Clone)]
pub struct RefineRecord {
    pub beta: f64,
    pub eps: f64,
    pub eps_prev_prev: f64,
    pub k_prev: f64,
    pub samples_per_bump: u32,
    pub piece_count: u64,
    pub passthrough_count: u64,
    /// Length of the parent polyline re-chorded on the embedding grid.
    pub base_len_chords: f64,
    pub base_len: f64,
    pub map: ParamMap,
    pub pieces: Vec<PieceRecord>,
}

/// The tower gamma^(1), ..., gamma^(depth) for one block exponent n.
#[derive(Debug)]
pub struct CurveStack {
    n: u32,
    levels: Vec<SampledCurve>,
    records: Vec<RefineRecord>,
}

impl CurveStack {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn depth(&self) -> u32 {
        self.levels.len() as u32
    }

    /// Level curves are 1-based: `level(1)` is the plain bump graph.
    pub fn level(&self, k: u32) -> &SampledCurve {
        &self.levels[(k - 1) as usize]
    }

    pub fn top(&self) -> &SampledCurve {
        self.levels.last().unwrap()
    }

    /// `records()[i]` produced `level(i + 2)` from `level(i + 1)`.
    pub fn records(&self) -> &[RefineRecord] {
        &self.records
    }

    /// Maps arclength on `level(from)` to the corresponding arclength on
    /// `level(to)`, `to <= from`, by composing the per-level maps.
    pub fn project_to_level(&self, s: f64, from: u32, to: u32) -> Result<f64> {
        if to < 1 || from > self.depth() || to > from {
            return Err(Error::BadParameter {
                name: "level",
                value: to as f64,
                expected: "1 <= to <= from <= depth",
            });
        }
        let mut s = s;
        let mut k = from;
        while k > to {
            s = self.records[(k - 2) as usize].map.to_parent(s);
            k -= 1;
        }
        Ok(s)
    }

    pub fn manifest(&self, opts: &BuildOptions) -> BuildManifest {
        let depth = self.depth() as usize;
        let mut k_sup: Vec<f64> = self.records.iter().map(|r| r.k_prev).collect();
        // The top level's curvature is not needed during the build; measure
        // it here so the manifest covers every level.
        let top_k = curvature_profile(self.top())
            .map(|p| p.sup_abs())
            .unwrap_or(0.0);
        k_sup.push(top_k);
        BuildManifest {
            n: self.n,
            depth: depth as u32,
            beta: self.records.iter().map(|r| r.beta).collect(),
            eps: self.records.iter().map(|r| r.eps).collect(),
            k_sup,
            piece_counts: self.records.iter().map(|r| r.piece_count).collect(),
            lengths: self.levels.iter().map(|c| c.total_len()).collect(),
            samples_per_bump: opts.samples_per_bump,
            budget: opts.budget,
        }
    }
}

/// Per-build summary written next to exported curves.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BuildManifest {
    pub n: u32,
    pub depth: u32,
    pub beta: Vec<f64>,
    pub eps: Vec<f64>,
    #[serde(rename = "K")]
    pub k_sup: Vec<f64>,
    pub piece_counts: Vec<u64>,
    pub lengths: Vec<f64>,
    pub samples_per_bump: u32,
    pub budget: u64,
}

/// The level-1 curve for block `n`: the graph of
/// `f(t) = sin^2(pi * 2^n (t - 2^-n)) / (n 2^n)` over `[2^-n, 2^-(n-1)]`,
/// sampled at `samples` uniform parameter steps. Endpoints are exactly
/// `(2^-n, 0)` and `(2^-(n-1), 0)`.
pub fn build_level1(n: u32, samples: usize) -> Result<SampledCurve> {
    if n < 1 || n > 60 {
        return Err(Error::BadParameter {
            name: "n",
            value: n as f64,
            expected: "between 1 and 60",
        });
    }
    if samples < 16 {
        return Err(Error::BadParameter {
            name: "samples",
            value: samples as f64,
            expected: "at least 16",
        });
    }
    let base = 0.5f64.powi(n as i32);
    let h = 1.0 / (n as f64 * 2.0f64.powi(n as i32));
    let mut pts = Vec::with_capacity(samples + 1);
    for j in 0..=samples {
        let u = j as f64 / samples as f64;
        let y = if j == 0 || j == samples {
            0.0
        } else {
            let s = (std::f64::consts::PI * u).sin();
            h * s * s
        };
        pts.push(Point::new(base * (1.0 + u), y));
    }
    SampledCurve::from_points(pts, false)
}

/// Computes the refinement parameters for level `k` from the built level
/// `k - 1`: measures sup |kappa|, derives eps, splits at inflections, and
/// partitions each maximal constant-sign subarc.
pub fn level_params(
    prev: &SampledCurve,
    n: u32,
    k: u32,
    eps_prev_prev: f64,
) -> Result<LevelParams> {
    if k < 2 || k > n {
        return Err(Error::BadParameter {
            name: "k",
            value: k as f64,
            expected: "2 <= k <= n",
        });
    }
    let profile = curvature_profile(prev)?;
    let k_prev = profile.sup_abs();
    let beta = (k - 1) as f64 / (n as f64 * n as f64);
    // sqrt(beta)/0 = +inf on a straight parent, leaving the halving branch.
    let eps = (beta.sqrt() / k_prev).min(eps_prev_prev / 2.0);
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::BadParameter {
            name: "eps",
            value: eps,
            expected: "finite and positive (degenerate curvature profile)",
        });
    }
    let span = prev.total_len();
    let mut bounds = vec![0.0];
    bounds.extend(inflection_points(&profile, default_kappa_tol(&profile)));
    bounds.push(span);
    let mut subarcs = Vec::with_capacity(bounds.len() - 1);
    for w in bounds.windows(2) {
        let (a, b) = (w[0], w[1]);
        if !(b > a) {
            continue;
        }
        let mean = profile.mean_in(a, b);
        let partition = match partition_equal(b - a, eps) {
            Ok(p) => Some(p),
            Err(Error::TooShortSubarc { .. }) => None,
            Err(e) => return Err(e),
        };
        subarcs.push(SubarcPlan {
            s_start: a,
            s_end: b,
            mean_kappa: mean,
            side: Side::from_mean_kappa(mean),
            partition,
        });
    }
    Ok(LevelParams {
        n,
        k,
        beta,
        k_prev,
        eps_prev_prev,
        eps,
        subarcs,
        profile,
    })
}

/// Embeds one level: every partition piece of every planned subarc gets a
/// bump of height `sqrt(beta) * piece_len`, offset along the parent's
/// discrete normal and sampled on the parent's arclength grid for the piece.
/// Piece endpoints are shared exactly with the parent.
pub fn refine_level(
    prev: &SampledCurve,
    params: &LevelParams,
    samples_per_bump: u32,
    samples_used: &mut u64,
    budget: u64,
) -> Result<(SampledCurve, RefineRecord)> {
    let spb = samples_per_bump.max(4) as f64;
    let prev_step = prev.total_len() / (prev.sample_count() - 1) as f64;

    // Projected output size, checked against the budget before allocating.
    let mut projected: u64 = 1;
    for plan in &params.subarcs {
        match &plan.partition {
            Some(p) => {
                let msteps = (p.alpha * spb).ceil() as u64;
                projected += p.count as u64 * msteps;
            }
            None => {
                projected += ((plan.s_end - plan.s_start) / prev_step) as u64 + 2;
            }
        }
    }
    if *samples_used + projected > budget {
        return Err(Error::BudgetExceeded {
            projected: *samples_used + projected,
            budget,
        });
    }

    let h_rel = params.beta.sqrt();
    let mut pts: Vec<Point> = Vec::with_capacity(projected as usize);
    let mut parent_s: Vec<f64> = Vec::with_capacity(projected as usize);
    let mut pieces: Vec<PieceRecord> = Vec::new();
    let mut base_len_chords = 0.0f64;
    let mut passthrough_count = 0u64;

    pts.push(prev.point_at(0.0)?);
    parent_s.push(0.0);

    fn push_sample(pts: &mut Vec<Point>, parent_s: &mut Vec<f64>, p: Point, s: f64) {
        if *pts.last().unwrap() != p {
            pts.push(p);
            parent_s.push(s);
        }
    }

    for plan in &params.subarcs {
        match &plan.partition {
            None => {
                // Pass through the parent's own vertices.
                passthrough_count += 1;
                let i0 = pts.len() - 1;
                let sub = prev.subarc(plan.s_start, plan.s_end)?;
                let offs: Vec<f64> = sub.arclens().iter().map(|a| plan.s_start + a).collect();
                for (p, s) in sub.points().iter().zip(offs).skip(1) {
                    base_len_chords += p.dist(pts[pts.len() - 1]);
                    push_sample(&mut pts, &mut parent_s, *p, s);
                }
                pieces.push(PieceRecord {
                    child_i0: i0,
                    child_i1: pts.len() - 1,
                    parent_s0: plan.s_start,
                    parent_s1: plan.s_end,
                    side: plan.side,
                    amplitude: 0.0,
                    embedded: false,
                });
            }
            Some(part) => {
                let msteps = (part.alpha * spb).ceil() as usize;
                let amplitude = part.piece_len * h_rel;
                for m in 0..part.count {
                    let a = plan.s_start + m as f64 * part.piece_len;
                    let b = if m + 1 == part.count {
                        plan.s_end
                    } else {
                        plan.s_start + (m + 1) as f64 * part.piece_len
                    };
                    let i0 = pts.len() - 1;
                    // Base samples on the parent, uniform in parent arclength.
                    let mut bp = Vec::with_capacity(msteps + 1);
                    for j in 0..=msteps {
                        let s = if j == 0 {
                            a
                        } else if j == msteps {
                            b
                        } else {
                            a + (b - a) * (j as f64 / msteps as f64)
                        };
                        bp.push((s, prev.point_at(s)?));
                    }
                    for j in 1..=msteps {
                        base_len_chords += bp[j].1.dist(bp[j - 1].1);
                        let (s, p) = bp[j];
                        let child = if j == msteps {
                            p
                        } else {
                            let u = j as f64 / msteps as f64;
                            let sinu = (std::f64::consts::PI * u).sin();
                            let f = amplitude * sinu * sinu;
                            let offset = plan.side.sign() * f;
                            let tangent = (bp[j + 1].1 - bp[j - 1].1).normalized().ok_or(
                                Error::BadCurve {
                                    expected: "free of coincident consecutive points",
                                },
                            )?;
                            // Fold guard: the normal offset map is injective
                            // while |kappa| * offset < 1 on the parent.
                            let kappa = params.profile.kappa_at(s);
                            let radial = 1.0 - kappa * offset;
                            if radial <= 0.0 {
                                return Err(Error::OffsetFold { s, value: radial });
                            }
                            p + tangent.perp() * offset
                        };
                        push_sample(&mut pts, &mut parent_s, child, s);
                    }
                    pieces.push(PieceRecord {
                        child_i0: i0,
                        child_i1: pts.len() - 1,
                        parent_s0: a,
                        parent_s1: b,
                        side: plan.side,
                        amplitude,
                        embedded: true,
                    });
                }
            }
        }
    }

    *samples_used += pts.len() as u64;
    let piece_count = pieces.iter().filter(|p| p.embedded).count() as u64;
    let curve = SampledCurve::from_points(pts, false)?;
    let map = ParamMap::new(curve.arclens().to_vec(), parent_s);
    let record = RefineRecord {
        beta: params.beta,
        eps: params.eps,
        eps_prev_prev: params.eps_prev_prev,
        k_prev: params.k_prev,
        samples_per_bump,
        piece_count,
        passthrough_count,
        base_len_chords,
        base_len: prev.total_len(),
        map,
        pieces,
    };
    Ok((curve, record))
}

/// Builds the tower for block `n` up to `depth` levels (depth <= n).
pub fn build_gamma_n(n: u32, depth: u32, opts: &BuildOptions) -> Result<CurveStack> {
    if depth < 1 || depth > n {
        return Err(Error::BadParameter {
            name: "depth",
            value: depth as f64,
            expected: "1 <= depth <= n",
        });
    }
    let level1 = build_level1(n, opts.level1_samples)?;
    let mut samples_used = level1.sample_count() as u64;
    if samples_used > opts.budget {
        return Err(Error::BudgetExceeded {
            projected: samples_used,
            budget: opts.budget,
        });
    }
    let mut levels = vec![level1];
    let mut records = Vec::new();
    let mut eps_prev_prev = 0.5f64.powi(n as i32 + 1);
    for k in 2..=depth {
        let params = level_params(levels.last().unwrap(), n, k, eps_prev_prev)?;
        let (curve, record) = refine_level(
            levels.last().unwrap(),
            &params,
            opts.samples_per_bump,
            &mut samples_used,
            opts.budget,
        )?;
        eps_prev_prev = params.eps;
        levels.push(curve);
        records.push(record);
    }
    Ok(CurveStack { n, levels, records })
}

/// Arclength span of one block (or cap) inside the assembled curve.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlockSpan {
    pub n: u32,
    pub depth: u32,
    pub s_start: f64,
    pub s_end: f64,
}

/// An on-axis junction point `(2^-n, 0)` of the assembled curve.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Junction {
    /// Exponent: the junction sits at x = 2^-n (n = 0 is the point (1, 0)).
    pub n: u32,
    pub s: f64,
    pub x: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AssembleRecord {
    pub n_max: u32,
    pub depth_cap: u32,
    pub blocks: Vec<BlockSpan>,
    pub junctions: Vec<Junction>,
    /// Arclength where the right cap begins (the junction at (1, 0)).
    pub caps_start_s: f64,
    pub total_len: f64,
}

const TAIL_SAMPLES: usize = 32;
const CAP_SAMPLES: usize = 256;
const BOTTOM_SAMPLES: usize = 1024;
const CAP_RADIUS: f64 = 0.125;

/// Assembles the closed curve: a straight tail from the origin to
/// `(2^-n_max, 0)`, the blocks for `n = n_max` down to `1` (each built to
/// depth `min(n, depth_cap)`), and the closing caps: a right semicircle down
/// to `(1, -1/4)`, the bottom segment, and a left semicircle back to the
/// origin.
pub fn assemble_gamma(
    n_max: u32,
    depth_cap: u32,
    opts: &BuildOptions,
) -> Result<(SampledCurve, AssembleRecord)> {
    if n_max < 1 || n_max > 30 {
        return Err(Error::BadParameter {
            name: "n_max",
            value: n_max as f64,
            expected: "between 1 and 30",
        });
    }
    if depth_cap < 1 {
        return Err(Error::BadParameter {
            name: "depth_cap",
            value: depth_cap as f64,
            expected: "at least 1",
        });
    }
    let mut pts: Vec<Point> = Vec::new();
    let mut junction_idx: Vec<(u32, usize)> = Vec::new();
    let mut block_idx: Vec<(u32, u32, usize, usize)> = Vec::new();

    pts.push(Point::new(0.0, 0.0));
    let x0 = 0.5f64.powi(n_max as i32);
    for j in 1..=TAIL_SAMPLES {
        pts.push(Point::new(x0 * (j as f64 / TAIL_SAMPLES as f64), 0.0));
    }
    junction_idx.push((n_max, pts.len() - 1));

    for n in (1..=n_max).rev() {
        let depth = n.min(depth_cap);
        let stack = build_gamma_n(n, depth, opts)?;
        let top = stack.top();
        let i0 = pts.len() - 1;
        debug_assert_eq!(*pts.last().unwrap(), top.points()[0]);
        pts.extend_from_slice(&top.points()[1..]);
        block_idx.push((n, depth, i0, pts.len() - 1));
        junction_idx.push((n - 1, pts.len() - 1));
    }
    let caps_start_idx = pts.len() - 1;
    debug_assert_eq!(*pts.last().unwrap(), Point::new(1.0, 0.0));

    // Right cap: center (1, -1/8), from (1, 0) through (1 + 1/8, -1/8) down
    // to (1, -1/4).
    for j in 1..CAP_SAMPLES {
        let theta = std::f64::consts::FRAC_PI_2
            - std::f64::consts::PI * (j as f64 / CAP_SAMPLES as f64);
        pts.push(Point::new(
            1.0 + CAP_RADIUS * theta.cos(),
            -CAP_RADIUS + CAP_RADIUS * theta.sin(),
        ));
    }
    pts.push(Point::new(1.0, -0.25));

    // Bottom segment to (0, -1/4).
    for j in 1..BOTTOM_SAMPLES {
        pts.push(Point::new(1.0 - j as f64 / BOTTOM_SAMPLES as f64, -0.25));
    }
    pts.push(Point::new(0.0, -0.25));

    // Left cap: center (0, -1/8), from (0, -1/4) through (-1/8, -1/8) back
    // toward the origin (the origin itself closes the loop).
    for j in 1..CAP_SAMPLES {
        let theta = 1.5 * std::f64::consts::PI
            - std::f64::consts::PI * (j as f64 / CAP_SAMPLES as f64);
        pts.push(Point::new(
            CAP_RADIUS * theta.cos(),
            -CAP_RADIUS + CAP_RADIUS * theta.sin(),
        ));
    }

    let curve = SampledCurve::from_points(pts, true)?;
    let arclen = curve.arclens();
    let blocks = block_idx
        .into_iter()
        .map(|(n, depth, i0, i1)| BlockSpan {
            n,
            depth,
            s_start: arclen[i0],
            s_end: arclen[i1],
        })
        .collect();
    let junctions = junction_idx
        .into_iter()
        .map(|(n, idx)| Junction {
            n,
            s: arclen[idx],
            x: 0.5f64.powi(n as i32),
        })
        .collect();
    let record = AssembleRecord {
        n_max,
        depth_cap,
        blocks,
        junctions,
        caps_start_s: arclen[caps_start_idx],
        total_len: curve.total_len(),
    };
    Ok((curve, record))
}
