//! The verification suite: twelve check groups (L1-L12) measuring the built
//! curves against the claimed bounds.
//!
//! Every check reports the *stated* bound (the inequality as claimed), the
//! *effective* bound (the stated bound after the recorded slack factor),
//! the measured value, and the raw margin against the stated bound. `pass`
//! is always "measured satisfies the effective bound". The asymptotic
//! checks L3-L9 claim constants that hold for large n; at the suite's desk
//! scale they run with `asym_slack` recorded and gate the suite only at the
//! reference size n = 5. L1, L2, L10, L12 and the chord-arc part of L11
//! gate unconditionally with slack 1.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::rc::Rc;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use asymcurve::{
    assemble_gamma, build_gamma_n, build_level1, conformality_ratio, embed_bump, embedded_speed,
    scan_collect, scan_sup, ua_equal, AssembleRecord, ClassificationReport, ClassifyConfig,
    CurveStack, PairMetric, PairScanConfig, Point, SampledCurve, Side, UaOutcome,
};

use crate::config::RunConfig;

/// Tolerance of the block-wise uniform-approximability growth check
/// (L12.ua_growth). Coarser than the classification epsilon so the minimal
/// piece counts stay within the cap at every tested block size.
const UA_GROWTH_EPS: f64 = 0.05;

// ---------------------------------------------------------------------------
// Report types.
// ---------------------------------------------------------------------------

/// A one-sided or two-sided real bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Bound {
    AtMost { max: f64 },
    AtLeast { min: f64 },
    Interval { min: f64, max: f64 },
}

impl Bound {
    /// Signed distance from `measured` to the bound: nonnegative iff the
    /// bound is satisfied, and the tightest violated side for intervals.
    pub fn margin(&self, measured: f64) -> f64 {
        match *self {
            Bound::AtMost { max } => max - measured,
            Bound::AtLeast { min } => measured - min,
            Bound::Interval { min, max } => (measured - min).min(max - measured),
        }
    }

    pub fn satisfied(&self, measured: f64) -> bool {
        measured.is_finite() && self.margin(measured) >= 0.0
    }
}

impl std::fmt::Display for Bound {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            Bound::AtMost { max } => write!(f, "<= {max:.9}"),
            Bound::AtLeast { min } => write!(f, ">= {min:.9}"),
            Bound::Interval { min, max } => write!(f, "in [{min:.9}, {max:.9}]"),
        }
    }
}

/// Scales a ratio bound's excess over 1 by `slack` (>= 1 loosens).
fn relax_ratio(b: Bound, slack: f64) -> Bound {
    match b {
        Bound::AtMost { max } => Bound::AtMost {
            max: 1.0 + slack * (max - 1.0),
        },
        Bound::AtLeast { min } => Bound::AtLeast {
            min: 1.0 + (min - 1.0) / slack,
        },
        Bound::Interval { min, max } => Bound::Interval {
            min: 1.0 + (min - 1.0) / slack,
            max: 1.0 + slack * (max - 1.0),
        },
    }
}

/// Scales an absolute bound by `slack` (>= 1 loosens).
fn relax_scale(b: Bound, slack: f64) -> Bound {
    match b {
        Bound::AtMost { max } => Bound::AtMost { max: max * slack },
        Bound::AtLeast { min } => Bound::AtLeast { min: min / slack },
        Bound::Interval { min, max } => Bound::Interval {
            min: min / slack,
            max: max * slack,
        },
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_id: String,
    /// The lemma or theorem the check tests, or "invented" for guards
    /// that only police the numerics.
    pub paper_ref: String,
    /// The inequality under test, in plain text.
    pub claim: String,
    /// The bound as claimed.
    pub stated: Bound,
    /// The effective bound after `slack`; this is what `pass` tests.
    pub bound: Bound,
    /// Slack factor turning `stated` into `bound` (1 = none).
    pub slack: f64,
    pub measured: f64,
    /// Raw margin of `measured` against the *stated* bound.
    pub margin: f64,
    pub pass: bool,
    /// Whether a failure of this check fails the suite.
    pub gating: bool,
    pub config_digest: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Wall time of the whole check group; informational only, excluded
    /// from the serialized report so identical runs stay bit-identical.
    #[serde(skip)]
    pub runtime_ms: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Summary {
    pub total: u64,
    pub passed: u64,
    pub failed: u64,
    pub errored: u64,
    pub gating_failed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteReport {
    pub config: RunConfig,
    pub config_digest: String,
    pub checks: Vec<CheckReport>,
    pub summary: Summary,
    /// Build and group wall times; excluded from the serialized report.
    #[serde(skip)]
    pub timings_ms: BTreeMap<String, f64>,
}

/// Process exit code: 0 all gating checks pass, 1 a gating check failed,
/// 2 a check could not be evaluated.
pub fn exit_code(report: &SuiteReport) -> u8 {
    if report.summary.errored > 0 {
        2
    } else if report.summary.gating_failed > 0 {
        1
    } else {
        0
    }
}

pub fn format_check_line(c: &CheckReport) -> String {
    let status = if c.error.is_some() {
        "ERR "
    } else if c.pass {
        "PASS"
    } else {
        "FAIL"
    };
    let role = if c.gating { "gating" } else { "advisory" };
    let mut line = format!(
        "[{status}] {:<28} measured={:<15.9} {:<32} margin={:+.3e} slack={:.2} {role}",
        c.check_id, c.measured, c.stated.to_string(), c.margin, c.slack
    );
    if let Some(n) = &c.note {
        line.push_str(&format!("  ({n})"));
    }
    if let Some(e) = &c.error {
        line.push_str(&format!("  error: {e}"));
    }
    line
}

// ---------------------------------------------------------------------------
// Suite context: config plus caches for the expensive artifacts.
// ---------------------------------------------------------------------------

pub struct SuiteContext {
    pub cfg: RunConfig,
    digest: String,
    stacks: RefCell<BTreeMap<(u32, u32), Rc<CurveStack>>>,
    gammas: RefCell<BTreeMap<(u32, u32), Rc<(SampledCurve, AssembleRecord)>>>,
    timings: RefCell<BTreeMap<String, f64>>,
}

fn ms(t0: Instant) -> f64 {
    t0.elapsed().as_secs_f64() * 1e3
}

impl SuiteContext {
    pub fn new(cfg: RunConfig) -> SuiteContext {
        let digest = cfg.digest();
        SuiteContext {
            cfg,
            digest,
            stacks: RefCell::new(BTreeMap::new()),
            gammas: RefCell::new(BTreeMap::new()),
            timings: RefCell::new(BTreeMap::new()),
        }
    }

    pub fn stack(&self, n: u32, depth: u32) -> Result<Rc<CurveStack>> {
        if let Some(s) = self.stacks.borrow().get(&(n, depth)) {
            return Ok(s.clone());
        }
        let t0 = Instant::now();
        let s = Rc::new(
            build_gamma_n(n, depth, &self.cfg.build_options())
                .with_context(|| format!("building the block tower n={n} depth={depth}"))?,
        );
        self.timings
            .borrow_mut()
            .insert(format!("build.stack.n{n}.d{depth}"), ms(t0));
        self.stacks.borrow_mut().insert((n, depth), s.clone());
        Ok(s)
    }

    pub fn gamma(&self) -> Result<Rc<(SampledCurve, AssembleRecord)>> {
        let key = (self.cfg.n_max, self.cfg.depth_cap);
        if let Some(g) = self.gammas.borrow().get(&key) {
            return Ok(g.clone());
        }
        let t0 = Instant::now();
        let g = Rc::new(
            assemble_gamma(key.0, key.1, &self.cfg.build_options())
                .with_context(|| format!("assembling gamma n_max={} depth_cap={}", key.0, key.1))?,
        );
        self.timings
            .borrow_mut()
            .insert(format!("build.gamma.n{}.d{}", key.0, key.1), ms(t0));
        self.gammas.borrow_mut().insert(key, g.clone());
        Ok(g)
    }

    /// Slack factor and gating flag for the asymptotic-constant checks.
    fn asym(&self) -> (f64, bool) {
        (self.cfg.asym_slack, self.cfg.n == 5)
    }

    #[allow(clippy::too_many_arguments)]
    fn mk(
        &self,
        id: impl Into<String>,
        claim: impl Into<String>,
        stated: Bound,
        bound: Bound,
        slack: f64,
        gating: bool,
        measured: f64,
    ) -> CheckReport {
        CheckReport {
            check_id: id.into(),
            paper_ref: String::new(),
            claim: claim.into(),
            margin: stated.margin(measured),
            pass: bound.satisfied(measured),
            stated,
            bound,
            slack,
            measured,
            gating,
            config_digest: self.digest.clone(),
            note: None,
            error: None,
            runtime_ms: 0.0,
        }
    }

    fn errored(&self, group: &str, gating: bool, err: &anyhow::Error) -> CheckReport {
        CheckReport {
            check_id: group.to_string(),
            paper_ref: String::new(),
            claim: "(check group could not be evaluated)".to_string(),
            stated: Bound::AtMost { max: f64::NAN },
            bound: Bound::AtMost { max: f64::NAN },
            slack: 1.0,
            measured: f64::NAN,
            margin: f64::NAN,
            pass: false,
            gating,
            config_digest: self.digest.clone(),
            note: None,
            error: Some(format!("{err:#}")),
            runtime_ms: 0.0,
        }
    }
}

fn with_note(mut c: CheckReport, note: String) -> CheckReport {
    c.note = Some(note);
    c
}

// ---------------------------------------------------------------------------
// Shared fixtures and quadrature.
// ---------------------------------------------------------------------------

fn segment_fixture(samples: usize) -> Result<SampledCurve> {
    let m = samples - 1;
    let pts: Vec<Point> = (0..samples)
        .map(|i| Point::new(i as f64 / m as f64, 0.0))
        .collect();
    Ok(SampledCurve::from_points(pts, false)?)
}

/// Constant-curvature arc of the given length starting at the origin with
/// horizontal tangent; `kappa = 0` degenerates to a segment.
fn arc_fixture(kappa: f64, len: f64, samples: usize) -> Result<SampledCurve> {
    if kappa == 0.0 {
        return segment_fixture(samples);
    }
    let r = 1.0 / kappa.abs();
    let sgn = kappa.signum();
    let m = (samples - 1) as f64;
    let pts: Vec<Point> = (0..samples)
        .map(|i| {
            let theta = (i as f64 / m) * len * kappa.abs();
            Point::new(r * theta.sin(), sgn * r * (1.0 - theta.cos()))
        })
        .collect();
    Ok(SampledCurve::from_points(pts, false)?)
}

fn circle_fixture(samples: usize) -> Result<SampledCurve> {
    let pts: Vec<Point> = (0..samples)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / samples as f64;
            Point::new(t.cos(), t.sin())
        })
        .collect();
    Ok(SampledCurve::from_points(pts, true)?)
}

fn ellipse_fixture(a: f64, b: f64, samples: usize) -> Result<SampledCurve> {
    let pts: Vec<Point> = (0..samples)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / samples as f64;
            Point::new(a * t.cos(), b * t.sin())
        })
        .collect();
    Ok(SampledCurve::from_points(pts, true)?)
}

fn composite_simpson(f: &dyn Fn(f64) -> Result<f64>, panels: usize) -> Result<f64> {
    let h = 1.0 / panels as f64;
    let mut acc = f(0.0)? + f(1.0)?;
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(i as f64 * h)?;
    }
    Ok(acc * h / 3.0)
}

/// Composite Simpson on [0, 1], doubling panels until two successive
/// refinements agree to `tol`. Returns the value and the final difference.
fn simpson_converged(f: &dyn Fn(f64) -> Result<f64>, tol: f64) -> Result<(f64, f64)> {
    let mut panels = 16usize;
    let mut prev = composite_simpson(f, panels)?;
    loop {
        panels *= 2;
        let cur = composite_simpson(f, panels)?;
        let err = (cur - prev).abs();
        if err < tol {
            return Ok((cur, err));
        }
        if panels >= 1 << 22 {
            bail!("quadrature failed to converge below {tol:e} at {panels} panels");
        }
        prev = cur;
    }
}

/// Stride putting roughly `target` endpoints on the scan grid.
fn stride_for(count: usize, target: usize) -> usize {
    (count / target.max(1)).max(1)
}

// Conformality evaluation walks every vertex between the pair, so its scans
// get a coarser grid and a tighter pair budget than the O(1) chord-arc scans.
const CONF_GRID: usize = 600;
const CONF_PAIRS: u64 = 200_000;
const LADDER_GRID: usize = 1500;
const LADDER_PAIRS: u64 = 150_000;

// ---------------------------------------------------------------------------
// L1: length sandwich of the embedded bump over a constant-curvature base.
// ---------------------------------------------------------------------------

fn check_l1(ctx: &SuiteContext) -> Result<Vec<CheckReport>> {
    let tol = ctx.cfg.tolerances.quadrature;
    let mut out = Vec::new();
    let mut worst_err = 0.0f64;
    for &kappa in &[0.0, -0.5] {
        for &h in &[0.01, 0.02, 0.05] {
            let f = move |t: f64| Ok(embedded_speed(kappa, h, t)?);
            let (len, err) = simpson_converged(&f, tol / 10.0)?;
            worst_err = worst_err.max(err);
            let stated = Bound::Interval {
                min: 1.0 + h * h,
                max: 1.0 + 4.0 * h * h + kappa.abs() * h,
            };
            out.push(ctx.mk(
                format!("L1.kappa{kappa}.h{h}"),
                format!(
                    "1 + h^2 <= length of the h-bump embedded at curvature {kappa} \
                     <= 1 + 4h^2 + |kappa| h, h = {h}"
                ),
                stated,
                stated,
                1.0,
                true,
                len,
            ));
        }
    }
    let mut quad = ctx.mk(
        "L1.quadrature",
        "successive quadrature refinements agree below the tolerance",
        Bound::AtMost { max: tol },
        Bound::AtMost { max: tol },
        1.0,
        true,
        worst_err,
    );
    quad.paper_ref = "invented: quadrature guard".to_string();
    out.push(quad);
    Ok(out)
}

// ---------------------------------------------------------------------------
// L2: the embedded bump deviates from its base by at most h.
// ---------------------------------------------------------------------------

/// Exact distance from `q` to the unit segment on the x axis.
fn segment_distance(q: Point) -> f64 {
    let x = q.x.clamp(0.0, 1.0);
    (Point::new(x, 0.0) - q).norm()
}

/// Exact distance from `q` to the arc produced by `arc_fixture(kappa, len, _)`.
fn arc_distance(kappa: f64, len: f64, q: Point) -> f64 {
    let r = 1.0 / kappa.abs();
    let sgn = kappa.signum();
    let center = Point::new(0.0, sgn * r);
    let v = q - center;
    // The arc is center + r (sin phi, -sgn cos phi) for phi in [0, len/r].
    let phi = v.x.atan2(-sgn * v.y).clamp(0.0, len * kappa.abs());
    let nearest = Point::new(
        center.x + r * phi.sin(),
        center.y - sgn * r * phi.cos(),
    );
    (nearest - q).norm()
}

fn check_l2(ctx: &SuiteContext) -> Result<Vec<CheckReport>> {
    let tol = ctx.cfg.tolerances.deviation;
    let seg = segment_fixture(8192)?;
    let arc = arc_fixture(-0.5, 1.0, 8192)?;
    let mut out = Vec::new();
    for (base_id, base) in [("seg", &seg), ("arc", &arc)] {
        for &h in &[0.01, 0.02, 0.05] {
            for side in [Side::Plus, Side::Minus] {
                let tag = match side {
                    Side::Plus => "plus",
                    Side::Minus => "minus",
                };
                let embedded = embed_bump(base, h, side)
                    .with_context(|| format!("embedding h={h} over {base_id}"))?;
                // Distance is taken to the analytic base, not its polyline,
                // so the tolerance is not eaten by chord sagitta.
                let dev = embedded
                    .points()
                    .iter()
                    .map(|&q| match base_id {
                        "seg" => segment_distance(q),
                        _ => arc_distance(-0.5, 1.0, q),
                    })
                    .fold(0.0f64, f64::max);
                out.push(ctx.mk(
                    format!("L2.{base_id}.h{h}.{tag}"),
                    format!("sup distance from the embedded bump to its base <= h = {h}"),
                    Bound::AtMost { max: h },
                    Bound::AtMost { max: h + tol },
                    1.0,
                    true,
                    dev,
                ));
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// L3: deviation between refinement levels, per-step sum and closed form.
// ---------------------------------------------------------------------------

fn check_l3(ctx: &SuiteContext) -> Result<Vec<CheckReport>> {
    let n = ctx.cfg.n;
    let stack = ctx.stack(n, n)?;
    let depth = stack.depth();
    let records = stack.records();
    let (slack, gating) = ctx.asym();
    let top = stack.top();
    let mut out = Vec::new();
    for k in 1..depth {
        let dev = top.max_deviation(stack.level(k));
        let sum_bound: f64 = (k..depth)
            .map(|j| {
                let r = &records[(j - 1) as usize];
                2.0 * r.eps * r.beta.sqrt()
            })
            .sum();
        let eps_k = records[(k - 1) as usize].eps;
        let closed_form = 4.0 * eps_k / (n as f64).sqrt();
        let stated_sum = Bound::AtMost { max: sum_bound };
        out.push(ctx.mk(
            format!("L3.sum.k{k}"),
            format!(
                "deviation(level {depth}, level {k}) <= 2 sum over j of eps_j sqrt(beta_j)"
            ),
            stated_sum,
            relax_scale(stated_sum, slack),
            slack,
            gating,
            dev,
        ));
        let stated_eps = Bound::AtMost { max: closed_form };
        out.push(ctx.mk(
            format!("L3.eps.k{k}"),
            format!("deviation(level {depth}, level {k}) <= 4 eps_{k} / sqrt(n)"),
            stated_eps,
            relax_scale(stated_eps, slack),
            slack,
            gating,
            dev,
        ));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// L4: within-piece arclength ratio between a level and its parent.
// ---------------------------------------------------------------------------

fn check_l4(ctx: &SuiteContext) -> Result<Vec<CheckReport>> {
    let n = ctx.cfg.n;
    let stack = ctx.stack(n, n)?;
    let (slack, gating) = ctx.asym();
    let mut out = Vec::new();
    for (i, rec) in stack.records().iter().enumerate() {
        let child = rec.map.child_s();
        let parent = rec.map.parent_s();
        let mut worst = 1.0f64;
        for j in 1..child.len() {
            let dc = child[j] - child[j - 1];
            let dp = parent[j] - parent[j - 1];
            worst = worst.max(dc / dp);
        }
        let stated = Bound::AtMost {
            max: 1.0 + 8.0 * rec.beta,
        };
        out.push(ctx.mk(
            format!("L4.level{}", i + 2),
            format!(
                "arclength of level {} between two points of one piece <= \
                 (1 + 8 beta) times the projected arclength on level {}",
                i + 2,
                i + 1
            ),
            stated,
            relax_ratio(stated, slack),
            slack,
            gating,
            worst,
        ));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// L5: conformality across first-level bumps of different block sizes.
// ---------------------------------------------------------------------------

fn check_l5(ctx: &SuiteContext) -> Result<Vec<CheckReport>> {
    let anchors_per_block = 24usize;
    // First-level bumps of blocks n = 8..12, shallow builds: the claimed
    // constant concerns only level-1 geometry, so depth stays at 1.
    // Left to right: the block for n spans x in [2^-n, 2^-(n-1)], so the
    // largest n comes first and consecutive blocks share a junction.
    let ns: Vec<u32> = (8..=12u32).rev().collect();
    let mut pts: Vec<Point> = Vec::new();
    let mut idx_ranges: Vec<(u32, usize, usize)> = Vec::new();
    for (i, &n) in ns.iter().enumerate() {
        let block = build_level1(n, 2048)?;
        let bpts = block.points();
        let from = if i == 0 {
            0
        } else {
            let junction = *pts.last().unwrap();
            if bpts[0] != junction {
                bail!("blocks n={} and n={} do not share a junction", ns[i - 1], n);
            }
            1
        };
        let start = pts.len().saturating_sub(if i == 0 { 0 } else { 1 });
        pts.extend_from_slice(&bpts[from..]);
        idx_ranges.push((n, start, pts.len() - 1));
    }
    let chained = SampledCurve::from_points(pts, false)?;
    let al = chained.arclens();
    let anchors: Vec<(u32, Vec<f64>)> = idx_ranges
        .iter()
        .map(|&(n, i0, i1)| {
            let (s0, s1) = (al[i0], al[i1]);
            let list = (0..anchors_per_block)
                .map(|j| s0 + (j as f64 + 0.5) / anchors_per_block as f64 * (s1 - s0))
                .collect();
            (n, list)
        })
        .collect();

    let mut per_min: BTreeMap<u32, f64> = BTreeMap::new();
    for a in 0..anchors.len() {
        for b in (a + 1)..anchors.len() {
            let m = anchors[a].0.min(anchors[b].0);
            let slot = per_min.entry(m).or_insert(1.0);
            for &sa in &anchors[a].1 {
                for &sb in &anchors[b].1 {
                    let v = conformality_ratio(&chained, sa, sb)?;
                    if v > *slot {
                        *slot = v;
                    }
                }
            }
        }
    }

    let (slack, gating) = ctx.asym();
    let mut out = Vec::new();
    for (m, worst) in per_min {
        let stated = Bound::AtMost {
            max: 1.0 + PI / m as f64,
        };
        out.push(ctx.mk(
            format!("L5.min{m}"),
            format!(
                "conformality across first-level bumps of blocks n1 != n2 \
                 <= 1 + pi / min(n1, n2), min = {m}"
            ),
            stated,
            relax_ratio(stated, slack),
            slack,
            gating,
            worst,
        ));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// L6: embedded bumps stay inside the sqrt(beta) cone at piece endpoints.
// ---------------------------------------------------------------------------

fn check_l6(ctx: &SuiteContext) -> Result<Vec<CheckReport>> {
    let n = ctx.cfg.n;
    let stack = ctx.stack(n, n)?;
    let (slack, gating) = ctx.asym();
    let mut out = Vec::new();
    for (i, rec) in stack.records().iter().enumerate() {
        let pts = stack.level(i as u32 + 2).points();
        let mut worst = 0.0f64;
        for piece in rec.pieces.iter().filter(|p| p.embedded) {
            let q0 = pts[piece.child_i0];
            let q1 = pts[piece.child_i1];
            let chord = q1 - q0;
            let len = chord.norm();
            let u = match chord.normalized() {
                Some(u) => u,
                None => continue,
            };
            let w = u.perp();
            let guard = 1e-9 * len;
            for &p in &pts[piece.child_i0 + 1..piece.child_i1] {
                let d = p - q0;
                let t = d.dot(u).min(len - d.dot(u));
                let y = piece.side.sign() * d.dot(w);
                if t > guard && y > 0.0 {
                    worst = worst.max(y / t);
                }
            }
        }
        let stated = Bound::AtMost {
            max: 8.0 * rec.beta.sqrt(),
        };
        out.push(ctx.mk(
            format!("L6.level{}", i + 2),
            format!(
                "bump height over the piece chord <= 8 sqrt(beta) times the \
                 distance to the nearer piece endpoint, level {}",
                i + 2
            ),
            stated,
            relax_scale(stated, slack),
            slack,
            gating,
            worst,
        ));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// L7: chord-arc ratio over same and adjacent pieces within one level.
// ---------------------------------------------------------------------------

fn check_l7(ctx: &SuiteContext) -> Result<Vec<CheckReport>> {
    let n = ctx.cfg.n;
    let stack = ctx.stack(n, n)?;
    let (slack, gating) = ctx.asym();
    let fracs = [0.15, 0.4, 0.65, 0.9];
    let mut out = Vec::new();
    for k in 2..=stack.depth() {
        let rec = &stack.records()[(k - 2) as usize];
        let curve = stack.level(k);
        let al = curve.arclens();
        let pieces = &rec.pieces;
        if pieces.len() < 2 {
            continue;
        }
        let window_stride = (pieces.len() / 160).max(1);
        let mut worst = 1.0f64;
        let mut positions: Vec<f64> = Vec::with_capacity(2 * fracs.len());
        for w in (0..pieces.len() - 1).step_by(window_stride) {
            positions.clear();
            for piece in &pieces[w..=w + 1] {
                let (s0, s1) = (al[piece.child_i0], al[piece.child_i1]);
                positions.extend(fracs.iter().map(|f| s0 + f * (s1 - s0)));
            }
            for a in 0..positions.len() {
                for b in (a + 1)..positions.len() {
                    if let Ok(v) = asymcurve::chordarc_ratio(curve, positions[a], positions[b]) {
                        worst = worst.max(v);
                    }
                }
            }
        }
        let stated = Bound::AtMost {
            max: 1.0 + 32.0 / (n as f64).sqrt(),
        };
        out.push(ctx.mk(
            format!("L7.level{k}"),
            format!(
                "chord-arc ratio over points of the same or adjacent pieces \
                 of level {k} <= 1 + 32/sqrt(n)"
            ),
            stated,
            relax_ratio(stated, slack),
            slack,
            gating,
            worst,
        ));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// L8: conformality within one block tower.
// ---------------------------------------------------------------------------

fn check_l8(ctx: &SuiteContext) -> Result<Vec<CheckReport>> {
    let n = ctx.cfg.n;
    let (slack, gating) = ctx.asym();
    let mut out = Vec::new();
    for m in [n - 1, n] {
        if m < 1 {
            continue;
        }
        let stack = ctx.stack(m, m)?;
        let top = stack.top();
        let cfg = PairScanConfig {
            delta: None,
            stride: stride_for(top.sample_count(), CONF_GRID),
            pair_budget: ctx.cfg.pair_budget.min(CONF_PAIRS),
            seed: ctx.cfg.seed,
        };
        let scan = scan_sup(top, PairMetric::Conformality, &cfg)?;
        let stated = Bound::AtMost {
            max: 1.0 + 45.0 / (m as f64).sqrt(),
        };
        out.push(with_note(
            ctx.mk(
                format!("L8.n{m}"),
                format!("conformality within the block tower for n = {m} <= 1 + 45/sqrt(n)"),
                stated,
                relax_ratio(stated, slack),
                slack,
                gating,
                scan.sup_value,
            ),
            format!(
                "argmax s = ({:.6}, {:.6}), pairs = {}",
                scan.argmax_pair.0, scan.argmax_pair.1, scan.pairs_evaluated
            ),
        ));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// L9: conformality over the union of the two largest assembled blocks.
// ---------------------------------------------------------------------------

fn check_l9(ctx: &SuiteContext) -> Result<Vec<CheckReport>> {
    let n_max = ctx.cfg.n_max;
    if n_max < 2 {
        bail!("the union check needs n_max >= 2");
    }
    let big_n = n_max - 1;
    let gamma = ctx.gamma()?;
    let (curve, record) = (&gamma.0, &gamma.1);
    let hi = record
        .blocks
        .iter()
        .find(|b| b.n == n_max)
        .ok_or_else(|| anyhow!("no block for n = {n_max}"))?;
    let lo = record
        .blocks
        .iter()
        .find(|b| b.n == big_n)
        .ok_or_else(|| anyhow!("no block for n = {big_n}"))?;
    let sub = curve.subarc(hi.s_start, lo.s_end)?;
    let cfg = PairScanConfig {
        delta: None,
        stride: stride_for(sub.sample_count(), CONF_GRID),
        pair_budget: ctx.cfg.pair_budget.min(CONF_PAIRS),
        seed: ctx.cfg.seed,
    };
    let scan = scan_sup(&sub, PairMetric::Conformality, &cfg)?;
    let stated = Bound::AtMost {
        max: 1.0 + 78.0 / (big_n as f64).sqrt(),
    };
    let (slack, gating) = ctx.asym();
    Ok(vec![with_note(
        ctx.mk(
            format!("L9.minblock{big_n}"),
            format!(
                "conformality over the union of the blocks for n >= {big_n} \
                 <= 1 + 78/sqrt({big_n})"
            ),
            stated,
            relax_ratio(stated, slack),
            slack,
            gating,
            scan.sup_value,
        ),
        format!("pairs = {}", scan.pairs_evaluated),
    )])
}

// ---------------------------------------------------------------------------
// L10: length growth: witness chord-arc ratio and per-level length ratios.
// ---------------------------------------------------------------------------

fn check_l10(ctx: &SuiteContext) -> Result<Vec<CheckReport>> {
    let n = ctx.cfg.n;
    let ratio_slack = ctx.cfg.tolerances.ratio_slack;
    let mut out = Vec::new();
    for m in [n - 1, n] {
        if m < 2 {
            continue;
        }
        let stack = ctx.stack(m, m)?;
        let top = stack.top();
        let pts = top.points();
        let chord = pts[0].dist(*pts.last().unwrap());
        let witness = top.total_len() / chord;
        let stated = Bound::Interval {
            min: (0.2f64).exp(),
            max: 2.0 * (3.0f64).exp(),
        };
        out.push(with_note(
            ctx.mk(
                format!("L10.n{m}.witness"),
                format!(
                    "chord-arc ratio of the whole block for n = {m} over its \
                     endpoint chord is in [e^(1/5), 2 e^3]"
                ),
                stated,
                stated,
                1.0,
                true,
                witness,
            ),
            format!("arc = {:.9e}, chord = {:.9e}", top.total_len(), chord),
        ));
        let product: f64 = (1..m)
            .map(|k| 1.0 + k as f64 / (m * m) as f64)
            .product();
        let stated = Bound::AtLeast { min: product };
        out.push(ctx.mk(
            format!("L10.n{m}.product"),
            format!(
                "2^n length of the full tower for n = {m} is at least the product \
                 of the per-level growth factors (1 + beta_k), 5% slack"
            ),
            stated,
            Bound::AtLeast {
                min: (1.0 - ratio_slack) * product,
            },
            1.0 - ratio_slack,
            true,
            witness,
        ));
        for k in 2..=stack.depth() {
            let beta = stack.records()[(k - 2) as usize].beta;
            let ratio = stack.level(k).total_len() / stack.level(k - 1).total_len();
            let stated = Bound::Interval {
                min: 1.0 + beta,
                max: 1.0 + 6.0 * beta,
            };
            let bound = Bound::Interval {
                min: 1.0 + (1.0 - ratio_slack) * beta,
                max: 1.0 + 6.0 * beta,
            };
            out.push(ctx.mk(
                format!("L10.n{m}.ratio.k{k}"),
                format!(
                    "length(level {k}) / length(level {}) is in [1 + beta, 1 + 6 beta]; \
                     the lower excess is relaxed by the ratio tolerance for the \
                     pieces too short to carry a bump",
                    k - 1
                ),
                stated,
                bound,
                1.0 - ratio_slack,
                true,
                ratio,
            ));
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// L11: global chord-arc constant and the conformality ladder trend.
// ---------------------------------------------------------------------------

/// Nested sups of a pair-sample metric at each delta: rows come back in the
/// caller's delta order.
fn nested_ladder(
    samples: &[(f64, f64)],
    deltas: &[f64],
) -> Vec<(f64, f64)> {
    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.sort_by(|&a, &b| samples[a].0.total_cmp(&samples[b].0));
    let mut ascending: Vec<f64> = deltas.to_vec();
    ascending.sort_by(f64::total_cmp);
    let mut rows: BTreeMap<u64, f64> = BTreeMap::new();
    let mut best = f64::NAN;
    let mut i = 0usize;
    for &d in &ascending {
        while i < order.len() && samples[order[i]].0 <= d {
            let v = samples[order[i]].1;
            if !(v <= best) {
                best = v;
            }
            i += 1;
        }
        rows.insert(d.to_bits(), best);
    }
    deltas.iter().map(|d| (*d, rows[&d.to_bits()])).collect()
}

fn check_l11(ctx: &SuiteContext) -> Result<Vec<CheckReport>> {
    let gamma = ctx.gamma()?;
    let curve = &gamma.0;
    let mut out = Vec::new();

    let scan_cfg = PairScanConfig {
        delta: None,
        stride: stride_for(curve.sample_count(), 2500),
        pair_budget: ctx.cfg.pair_budget,
        seed: ctx.cfg.seed,
    };
    let global = scan_sup(curve, PairMetric::ChordArc, &scan_cfg)?;
    let hard = Bound::AtMost {
        max: 8.0 * (8.0f64).exp(),
    };
    out.push(with_note(
        ctx.mk(
            "L11.chordarc",
            "global chord-arc constant of the assembled curve <= 8 e^8",
            hard,
            hard,
            1.0,
            true,
            global.sup_value,
        ),
        format!(
            "argmax s = ({:.6}, {:.6}), pairs = {}",
            global.argmax_pair.0, global.argmax_pair.1, global.pairs_evaluated
        ),
    ));
    let empirical = Bound::AtMost { max: 10.0 };
    out.push(ctx.mk(
        "L11.chordarc_empirical",
        "global chord-arc constant <= 10 (empirical headroom, informational)",
        empirical,
        empirical,
        1.0,
        false,
        global.sup_value,
    ));

    let diam = curve.diameter();
    let deltas: Vec<f64> = ctx.cfg.deltas.iter().map(|f| f * diam).collect();
    let delta_max = deltas.iter().cloned().fold(0.0f64, f64::max);
    // Grid endpoints stride by vertex index, so they concentrate where the
    // curve is densely sampled: the blocks, which carry all the small-delta
    // structure. The sparse caps only reach the coarse rungs, which is also
    // where their sups live.
    let ladder_cfg = PairScanConfig {
        delta: None,
        stride: stride_for(curve.sample_count(), LADDER_GRID),
        pair_budget: ctx.cfg.pair_budget.min(LADDER_PAIRS),
        seed: ctx.cfg.seed,
    };
    let samples = scan_collect(curve, delta_max, &ladder_cfg)?;
    let pairs: Vec<(f64, f64)> = samples.iter().map(|s| (s.chord, s.conformality)).collect();
    let mut sorted = deltas.clone();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let rows = nested_ladder(&pairs, &sorted);
    let worst_step = rows
        .windows(2)
        .map(|w| w[1].1 - w[0].1)
        .fold(f64::NEG_INFINITY, f64::max);
    let zero = Bound::AtMost { max: 0.0 };
    let ladder_note = rows
        .iter()
        .map(|(d, s)| format!("{d:.6}:{s:.6}"))
        .collect::<Vec<_>>()
        .join(" ");
    out.push(with_note(
        ctx.mk(
            "L11.conf_trend",
            "conformality ladder sup never increases as delta shrinks",
            zero,
            zero,
            1.0,
            false,
            worst_step,
        ),
        ladder_note,
    ));
    let descent = rows.last().unwrap().1 - rows.first().unwrap().1;
    out.push(ctx.mk(
        "L11.conf_descent",
        "conformality sup at the smallest delta does not exceed the sup at the largest",
        zero,
        zero,
        1.0,
        false,
        descent,
    ));
    Ok(out)
}

// ---------------------------------------------------------------------------
// L12: end-to-end classification of reference fixtures and the curve.
// ---------------------------------------------------------------------------

fn classify_cfg(ctx: &SuiteContext) -> ClassifyConfig {
    ClassifyConfig {
        delta_fracs: ctx.cfg.deltas.clone(),
        stride: ctx.cfg.stride,
        pair_budget: ctx.cfg.pair_budget,
        seed: ctx.cfg.seed,
        ua_eps: ctx.cfg.epsilon,
        ua_n_cap: ctx.cfg.ua_n_cap,
        ..ClassifyConfig::default()
    }
}

/// Number of flags differing from the expectation, plus the differing names.
fn flag_mismatches(expect: &[(&str, bool, bool)]) -> (f64, String) {
    let mut names = Vec::new();
    for &(name, got, want) in expect {
        if got != want {
            names.push(format!("{name}={got} (expected {want})"));
        }
    }
    let note = if names.is_empty() {
        format!(
            "flags as expected: {}",
            expect
                .iter()
                .map(|(n, _, w)| format!("{n}={w}"))
                .collect::<Vec<_>>()
                .join(" ")
        )
    } else {
        names.join(", ")
    };
    (names.len() as f64, note)
}

fn ua_n_of(report: &ClassificationReport) -> f64 {
    match report.ua.first().and_then(|e| e.n_min) {
        Some(n) => n as f64,
        None => f64::NAN,
    }
}

fn check_l12(ctx: &SuiteContext) -> Result<Vec<CheckReport>> {
    let ccfg = classify_cfg(ctx);
    let zero = Bound::AtMost { max: 0.0 };
    let mut out = Vec::new();

    // Circle: smooth in every sense; the minimal equal partition at
    // eps = 0.01 is exactly 13, from (pi/n)/sin(pi/n) <= 1.01.
    let circle = asymcurve::classify(&circle_fixture(8192)?, &ccfg)?;
    let thirteen = Bound::Interval {
        min: 13.0,
        max: 13.0,
    };
    out.push(ctx.mk(
        "L12.circle.ua",
        "minimal equal-partition piece count of the unit circle at eps = 0.01 is 13",
        thirteen,
        thirteen,
        1.0,
        true,
        ua_n_of(&circle),
    ));
    let f = &circle.consistency_flags;
    let (miss, note) = flag_mismatches(
        &[
            ("chord_arc", f.chord_arc, true),
            ("asymptotically_conformal", f.asymptotically_conformal, true),
            ("asymptotically_smooth", f.asymptotically_smooth, true),
            ("ua_all_found", f.ua_all_found, true),
            ("dp_not_worse", f.dp_not_worse, true),
            ("ladders_monotone", f.ladders_monotone, true),
            ("forward_consistency", f.forward_consistency, true),
        ],
    );
    out.push(with_note(
        ctx.mk(
            "L12.circle.flags",
            "the circle classifies as chord-arc, asymptotically smooth and conformal",
            zero,
            zero,
            1.0,
            true,
            miss,
        ),
        note,
    ));

    // Ellipse 2:1: likewise smooth.
    let ellipse = asymcurve::classify(&ellipse_fixture(1.0, 0.5, 8192)?, &ccfg)?;
    let f = &ellipse.consistency_flags;
    let (miss, note) = flag_mismatches(
        &[
            ("chord_arc", f.chord_arc, true),
            ("asymptotically_conformal", f.asymptotically_conformal, true),
            ("asymptotically_smooth", f.asymptotically_smooth, true),
            ("ua_all_found", f.ua_all_found, true),
            ("dp_not_worse", f.dp_not_worse, true),
            ("ladders_monotone", f.ladders_monotone, true),
            ("forward_consistency", f.forward_consistency, true),
        ],
    );
    out.push(with_note(
        ctx.mk(
            "L12.ellipse.flags",
            "the 2:1 ellipse classifies as chord-arc, asymptotically smooth and conformal",
            zero,
            zero,
            1.0,
            true,
            miss,
        ),
        note,
    ));

    // Segment: every functional is exactly 1 up to roundoff.
    let segment = asymcurve::classify(&segment_fixture(4097)?, &ccfg)?;
    let mut sups_excess = segment.chordarc.sup - 1.0;
    for row in segment.conformality.iter().chain(segment.smoothness.iter()) {
        sups_excess = sups_excess.max(row.sup - 1.0);
    }
    let exact = Bound::AtMost {
        max: ctx.cfg.tolerances.exact,
    };
    out.push(ctx.mk(
        "L12.segment.exact",
        "chord-arc and conformality sups of a straight segment are 1 up to roundoff",
        exact,
        exact,
        1.0,
        true,
        sups_excess,
    ));
    let one = Bound::Interval { min: 1.0, max: 1.0 };
    out.push(ctx.mk(
        "L12.segment.ua",
        "a straight segment is one piece at any tolerance",
        one,
        one,
        1.0,
        true,
        ua_n_of(&segment),
    ));
    let f = &segment.consistency_flags;
    let (miss, note) = flag_mismatches(
        &[
            ("chord_arc", f.chord_arc, true),
            ("asymptotically_conformal", f.asymptotically_conformal, true),
            ("asymptotically_smooth", f.asymptotically_smooth, true),
            ("ua_all_found", f.ua_all_found, true),
            ("dp_not_worse", f.dp_not_worse, true),
            ("ladders_monotone", f.ladders_monotone, true),
            ("forward_consistency", f.forward_consistency, true),
        ],
    );
    out.push(with_note(
        ctx.mk(
            "L12.segment.flags",
            "the segment classifies as smooth in every sense",
            zero,
            zero,
            1.0,
            true,
            miss,
        ),
        note,
    ));

    // The assembled curve. Decidable at this resolution: it is chord-arc
    // and visibly not asymptotically smooth (fresh wiggles at every scale
    // the scan reaches), while the estimators stay self-consistent.
    let gamma = ctx.gamma()?;
    // Two million vertices: cap the pair budget and coarsen the grid, as
    // the conformality ladder walks subarcs, unlike the O(1) fixture scans
    // above.
    let gcfg = ClassifyConfig {
        stride: stride_for(gamma.0.sample_count(), LADDER_GRID),
        pair_budget: ccfg.pair_budget.min(LADDER_PAIRS),
        ..ccfg.clone()
    };
    let greport = asymcurve::classify(&gamma.0, &gcfg)?;
    let f = &greport.consistency_flags;
    let (miss, note) = flag_mismatches(
        &[
            ("chord_arc", f.chord_arc, true),
            ("asymptotically_smooth", f.asymptotically_smooth, false),
            ("dp_not_worse", f.dp_not_worse, true),
            ("ladders_monotone", f.ladders_monotone, true),
            ("forward_consistency", f.forward_consistency, true),
        ],
    );
    out.push(with_note(
        ctx.mk(
            "L12.gamma.flags",
            "the assembled curve classifies as chord-arc and not asymptotically smooth",
            zero,
            zero,
            1.0,
            true,
            miss,
        ),
        note,
    ));
    // At the sampled depth the conformality ladder has not yet descended
    // to 1 and the finest pieces still wiggle, so these two flags are
    // expected to read false even though both properties hold in the
    // limit. Informational.
    let (miss, note) = flag_mismatches(
        &[
            (
                "asymptotically_conformal",
                f.asymptotically_conformal,
                false,
            ),
            ("ua_all_found", f.ua_all_found, false),
        ],
    );
    out.push(with_note(
        ctx.mk(
            "L12.gamma.flags_scale",
            "finite-depth scans have not yet converged for the limit-only flags",
            zero,
            zero,
            1.0,
            false,
            miss,
        ),
        note,
    ));

    // The non-smoothness witness survives assembly: each of the two
    // largest blocks keeps its whole-block chord-arc ratio.
    for m in [ctx.cfg.n_max, ctx.cfg.n_max.saturating_sub(1)] {
        if m < 2 {
            continue;
        }
        let block = gamma
            .1
            .blocks
            .iter()
            .find(|b| b.n == m)
            .ok_or_else(|| anyhow!("no block for n = {m}"))?;
        let pa = gamma.0.point_at(block.s_start)?;
        let pb = gamma.0.point_at(block.s_end)?;
        let ratio = (block.s_end - block.s_start) / pa.dist(pb);
        let stated = Bound::AtLeast {
            min: (0.2f64).exp(),
        };
        out.push(ctx.mk(
            format!("L12.gamma.witness.n{m}"),
            format!(
                "the assembled block for n = {m} keeps chord-arc ratio >= e^(1/5) \
                 over its junction chord"
            ),
            stated,
            stated,
            1.0,
            true,
            ratio,
        ));
    }

    // Minimal piece counts grow strictly with the block size: deeper
    // towers are harder to approximate.
    let m_lo = ctx.cfg.n.saturating_sub(2).max(2);
    let mut counts: Vec<(u32, u64)> = Vec::new();
    let mut capped: Option<String> = None;
    for m in m_lo..=ctx.cfg.n {
        let stack = ctx.stack(m, m)?;
        match ua_equal(stack.top(), UA_GROWTH_EPS, ctx.cfg.ua_n_cap)? {
            UaOutcome::Found { n } => counts.push((m, n)),
            UaOutcome::NotFound {
                n_cap,
                achieved_ratio,
            } => {
                capped = Some(format!(
                    "m = {m} hit the cap {n_cap} at worst ratio {achieved_ratio:.6}"
                ));
                break;
            }
        }
    }
    let growth = Bound::AtLeast { min: 1.0 };
    let counts_note = counts
        .iter()
        .map(|(m, n)| format!("n_min({m})={n}"))
        .collect::<Vec<_>>()
        .join(" ");
    let report = if let Some(msg) = capped {
        let mut r = ctx.mk(
            "L12.ua_growth",
            "minimal piece counts at eps = 0.05 grow strictly with the block size",
            growth,
            growth,
            1.0,
            true,
            f64::NAN,
        );
        r.error = Some(msg);
        r
    } else if counts.len() < 2 {
        with_note(
            ctx.mk(
                "L12.ua_growth",
                "minimal piece counts at eps = 0.05 grow strictly with the block size",
                growth,
                growth,
                1.0,
                true,
                1.0,
            ),
            format!("single block only; {counts_note}"),
        )
    } else {
        let min_step = counts
            .windows(2)
            .map(|w| w[1].1 as f64 - w[0].1 as f64)
            .fold(f64::INFINITY, f64::min);
        with_note(
            ctx.mk(
                "L12.ua_growth",
                "minimal piece counts at eps = 0.05 grow strictly with the block size",
                growth,
                growth,
                1.0,
                true,
                min_step,
            ),
            counts_note,
        )
    };
    out.push(report);

    Ok(out)
}

// ---------------------------------------------------------------------------
// The runner.
// ---------------------------------------------------------------------------

type CheckFn = fn(&SuiteContext) -> Result<Vec<CheckReport>>;

const GROUPS: [(&str, &str, CheckFn); 12] = [
    ("L1", "Lemma 3.1", check_l1),
    ("L2", "Lemma 3.2", check_l2),
    ("L3", "Claim 3.3", check_l3),
    ("L4", "Claim 3.4", check_l4),
    ("L5", "Claim 3.5", check_l5),
    ("L6", "Claim 3.6", check_l6),
    ("L7", "Lemma 3.7", check_l7),
    ("L8", "Lemma 3.8", check_l8),
    ("L9", "Lemma 3.9", check_l9),
    ("L10", "Theorem 3.10 / Theorem 3.12", check_l10),
    ("L11", "Theorem 3.11 / Theorem 3.12", check_l11),
    ("L12", "Theorem 4.1", check_l12),
];

pub fn group_ids() -> Vec<&'static str> {
    GROUPS.iter().map(|(id, _, _)| *id).collect()
}

/// Parses a suite selection: "all", one id like "L7", or a comma list.
pub fn parse_suite(spec: &str) -> Result<Vec<usize>> {
    let spec = spec.trim();
    if spec.eq_ignore_ascii_case("all") {
        return Ok((1..=GROUPS.len()).collect());
    }
    let mut picked = Vec::new();
    for part in spec.split(',') {
        let part = part.trim();
        let idx = GROUPS
            .iter()
            .position(|(id, _, _)| id.eq_ignore_ascii_case(part))
            .ok_or_else(|| anyhow!("unknown check '{part}'; expected all or L1..L12"))?;
        picked.push(idx + 1);
    }
    picked.sort_unstable();
    picked.dedup();
    if picked.is_empty() {
        bail!("empty suite selection");
    }
    Ok(picked)
}

/// Whether a whole-group failure gates the suite (used when a group cannot
/// even be evaluated; healthy reports carry their own flag).
fn group_gates(cfg: &RunConfig, group: &str) -> bool {
    matches!(group, "L1" | "L2" | "L10" | "L11" | "L12") || cfg.n == 5
}

pub fn run_suite(cfg: &RunConfig, groups: &[usize]) -> SuiteReport {
    let ctx = SuiteContext::new(cfg.clone());
    let mut checks: Vec<CheckReport> = Vec::new();
    let mut timings: BTreeMap<String, f64> = BTreeMap::new();
    for &g in groups {
        let (name, paper_ref, f) = GROUPS[g - 1];
        let t0 = Instant::now();
        match f(&ctx) {
            Ok(mut reports) => {
                let dt = ms(t0);
                for r in &mut reports {
                    r.runtime_ms = dt;
                    if r.paper_ref.is_empty() {
                        r.paper_ref = paper_ref.to_string();
                    }
                }
                checks.extend(reports);
            }
            Err(e) => {
                let mut r = ctx.errored(name, group_gates(cfg, name), &e);
                r.paper_ref = paper_ref.to_string();
                checks.push(r);
            }
        }
        timings.insert(name.to_string(), ms(t0));
    }
    timings.extend(ctx.timings.borrow().iter().map(|(k, v)| (k.clone(), *v)));

    let total = checks.len() as u64;
    let errored = checks.iter().filter(|c| c.error.is_some()).count() as u64;
    let passed = checks.iter().filter(|c| c.pass).count() as u64;
    let failed = checks
        .iter()
        .filter(|c| !c.pass && c.error.is_none())
        .count() as u64;
    let gating_failed = checks.iter().filter(|c| c.gating && !c.pass).count() as u64;
    SuiteReport {
        config: cfg.clone(),
        config_digest: ctx.digest.clone(),
        checks,
        summary: Summary {
            total,
            passed,
            failed,
            errored,
            gating_failed,
        },
        timings_ms: timings,
    }
}
