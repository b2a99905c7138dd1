//! Discrete Frenet frames, curvature profiles, and inflection detection.
//!
//! Curvature is the signed Menger (circumcircle) curvature of three
//! consecutive samples; on a locally uniform grid this is accurate to
//! O(step^2). The normal is the tangent rotated by +90 degrees, so positive
//! curvature means the curve bends toward the normal.

use crate::curve::SampledCurve;
use crate::error::{Error, Result};
use crate::point::Point;

/// Frame of a curve at (approximately) arclength `s`: the frame is evaluated
/// at the nearest sample of the curve.
#[derive(Debug, Clone, Copy)]
pub struct FrenetSample {
    pub s: f64,
    pub position: Point,
    pub tangent: Point,
    pub normal: Point,
    pub kappa: f64,
    /// True when an endpoint forced a one-sided difference.
    pub one_sided: bool,
}

/// Signed Menger curvature of the circle through three points: positive when
/// the triple turns left. Equals 1/R exactly for points on a circle of
/// radius R.
pub fn menger_curvature(a: Point, b: Point, c: Point) -> f64 {
    let ab = b - a;
    let bc = c - b;
    let ac = c - a;
    let denom = ab.norm() * bc.norm() * ac.norm();
    if denom == 0.0 {
        return 0.0;
    }
    2.0 * ab.cross(ac) / denom
}

fn nearest_sample_index(curve: &SampledCurve, s: f64) -> usize {
    let arclen = curve.arclens();
    let idx = arclen.partition_point(|&a| a < s);
    if idx == 0 {
        return 0;
    }
    if idx >= arclen.len() {
        return arclen.len() - 1;
    }
    if s - arclen[idx - 1] <= arclen[idx] - s {
        idx - 1
    } else {
        idx
    }
}

/// Frenet frame at the sample nearest to `s`.
///
/// The curve should be (locally) uniformly sampled around `s`; the tangent is
/// the normalized central difference of position with respect to arclength
/// and `kappa` the Menger curvature of the neighboring triple. On closed
/// curves the stencil wraps; on open curves the endpoints fall back to
/// one-sided differences and are flagged.
pub fn frenet_frame(curve: &SampledCurve, s: f64) -> Result<FrenetSample> {
    let total = curve.total_len();
    if !s.is_finite() || s < -total * 1e-9 || s > total * (1.0 + 1e-9) {
        return Err(Error::OutOfRange {
            s,
            lo: 0.0,
            hi: total,
        });
    }
    if curve.sample_count() < 3 {
        return Err(Error::InsufficientData {
            points: curve.sample_count(),
            required: 3,
        });
    }
    let pts = curve.points();
    let n = pts.len();
    let i = nearest_sample_index(curve, s.clamp(0.0, total));
    let (prev, next, one_sided) = if curve.is_closed() {
        ((i + n - 1) % n, (i + 1) % n, false)
    } else if i == 0 {
        (0, 1, true)
    } else if i == n - 1 {
        (n - 2, n - 1, true)
    } else {
        (i - 1, i + 1, false)
    };
    let tangent = (pts[next] - pts[prev])
        .normalized()
        .ok_or(Error::BadCurve {
            expected: "free of coincident consecutive points",
        })?;
    let kappa = if one_sided {
        // Use the adjacent interior triple so endpoints still report a value.
        if i == 0 {
            menger_curvature(pts[0], pts[1], pts[2])
        } else {
            menger_curvature(pts[n - 3], pts[n - 2], pts[n - 1])
        }
    } else {
        menger_curvature(pts[prev], pts[i], pts[next])
    };
    Ok(FrenetSample {
        s: curve.arclens()[i],
        position: pts[i],
        tangent,
        normal: tangent.perp(),
        kappa,
        one_sided,
    })
}

/// Signed curvature at every vertex of a sampled curve.
#[derive(Debug, Clone)]
pub struct CurvatureProfile {
    /// (arclength, signed curvature) per vertex, in arclength order.
    samples: Vec<(f64, f64)>,
    sup_abs: f64,
    step: f64,
}

impl CurvatureProfile {
    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    /// Max of |kappa| over the samples, exactly.
    pub fn sup_abs(&self) -> f64 {
        self.sup_abs
    }

    /// Longest gap between consecutive profile samples.
    pub fn step(&self) -> f64 {
        self.step
    }

    /// Signed curvature at the sample nearest to `s` (clamped to the ends).
    pub fn kappa_at(&self, s: f64) -> f64 {
        let n = self.samples.len();
        let i = self.samples.partition_point(|&(a, _)| a < s);
        if i == 0 {
            return self.samples[0].1;
        }
        if i >= n {
            return self.samples[n - 1].1;
        }
        let (s0, k0) = self.samples[i - 1];
        let (s1, k1) = self.samples[i];
        if s - s0 <= s1 - s {
            k0
        } else {
            k1
        }
    }

    /// Mean of the signed curvature over samples with arclength in
    /// `[s_lo, s_hi]`; 0.0 when the window contains no sample.
    pub fn mean_in(&self, s_lo: f64, s_hi: f64) -> f64 {
        let mut acc = 0.0;
        let mut count = 0u64;
        for &(s, k) in &self.samples {
            if s >= s_lo && s <= s_hi {
                acc += k;
                count += 1;
            }
        }
        if count == 0 {
            0.0
        } else {
            acc / count as f64
        }
    }
}

/// Signed Menger curvature at every vertex of the curve. Open-curve
/// endpoints reuse the adjacent interior triple.
///
/// The profile never resamples: interpolated points sit off the underlying
/// curve by up to the edge sagitta, and Menger curvature amplifies such
/// displacements by ~4/spacing^2, so any fixed-step resampled profile is
/// noise-bound at (edge/step)^2 relative error. Vertex triples carry no such
/// penalty.
pub fn curvature_profile(curve: &SampledCurve) -> Result<CurvatureProfile> {
    let pts = curve.points();
    let arclen = curve.arclens();
    let n = pts.len();
    if n < 3 {
        return Err(Error::InsufficientData {
            points: n,
            required: 3,
        });
    }
    let mut samples = Vec::with_capacity(n);
    let mut sup_abs = 0.0f64;
    for i in 0..n {
        let k = if curve.is_closed() {
            menger_curvature(pts[(i + n - 1) % n], pts[i], pts[(i + 1) % n])
        } else if i == 0 {
            menger_curvature(pts[0], pts[1], pts[2])
        } else if i == n - 1 {
            menger_curvature(pts[n - 3], pts[n - 2], pts[n - 1])
        } else {
            menger_curvature(pts[i - 1], pts[i], pts[i + 1])
        };
        if k.abs() > sup_abs {
            sup_abs = k.abs();
        }
        samples.push((arclen[i], k));
    }
    let mut step = 0.0f64;
    for w in arclen.windows(2) {
        step = step.max(w[1] - w[0]);
    }
    if curve.is_closed() {
        step = step.max(curve.total_len() - arclen[n - 1]);
    }
    Ok(CurvatureProfile {
        samples,
        sup_abs,
        step,
    })
}

/// Default dead-band for inflection detection: relative to the curvature
/// scale, with an absolute floor.
pub fn default_kappa_tol(profile: &CurvatureProfile) -> f64 {
    (1e-9 * profile.sup_abs()).max(1e-14)
}

/// Arclength positions where the signed curvature crosses zero.
///
/// Samples with |kappa| < kappa_tol adopt the sign of the nearest sample
/// above the tolerance (left wins ties), which suppresses chatter on flat
/// stretches. Crossing positions are linearly interpolated; consecutive
/// crossings closer than one grid step are merged to their midpoint.
pub fn inflection_points(profile: &CurvatureProfile, kappa_tol: f64) -> Vec<f64> {
    let samples = profile.samples();
    let n = samples.len();
    // Effective sign per sample.
    let mut signs = vec![0i8; n];
    for (i, &(_, k)) in samples.iter().enumerate() {
        if k.abs() >= kappa_tol {
            signs[i] = if k > 0.0 { 1 } else { -1 };
        }
    }
    // Fill dead-band samples from the nearest decided neighbor.
    let decided: Vec<usize> = (0..n).filter(|&i| signs[i] != 0).collect();
    if decided.is_empty() {
        return Vec::new();
    }
    for i in 0..n {
        if signs[i] == 0 {
            // Nearest decided index; left wins ties.
            let pos = decided.partition_point(|&d| d < i);
            let cand_left = if pos > 0 { Some(decided[pos - 1]) } else { None };
            let cand_right = decided.get(pos).copied();
            signs[i] = match (cand_left, cand_right) {
                (Some(l), Some(r)) => {
                    if i - l <= r - i {
                        signs[l]
                    } else {
                        signs[r]
                    }
                }
                (Some(l), None) => signs[l],
                (None, Some(r)) => signs[r],
                (None, None) => unreachable!(),
            };
        }
    }
    let mut crossings: Vec<f64> = Vec::new();
    for i in 0..n - 1 {
        if signs[i] != signs[i + 1] {
            let (s0, k0) = samples[i];
            let (s1, k1) = samples[i + 1];
            let s = if (k1 - k0).abs() > 0.0 && (k0 < 0.0) != (k1 < 0.0) {
                s0 + (s1 - s0) * (k0 / (k0 - k1))
            } else {
                0.5 * (s0 + s1)
            };
            crossings.push(s);
        }
    }
    // Merge crossings closer than one grid step.
    let mut merged: Vec<f64> = Vec::with_capacity(crossings.len());
    for s in crossings {
        match merged.last_mut() {
            Some(last) if s - *last < profile.step() => {
                *last = 0.5 * (*last + s);
            }
            _ => merged.push(s),
        }
    }
    merged
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle(r: f64, n: usize) -> SampledCurve {
        let pts: Vec<Point> = (0..n)
            .map(|i| {
                let t = i as f64 / n as f64 * std::f64::consts::TAU;
                Point::new(r * t.cos(), r * t.sin())
            })
            .collect();
        SampledCurve::from_points(pts, true).unwrap()
    }

    #[test]
    fn menger_on_circle_is_inverse_radius() {
        let r = 2.5;
        let f = |t: f64| Point::new(r * t.cos(), r * t.sin());
        let k = menger_curvature(f(0.1), f(0.2), f(0.35));
        assert!((k - 1.0 / r).abs() < 1e-9 * (1.0 / r));
    }

    #[test]
    fn menger_sign_flips_with_orientation() {
        let a = Point::new(0.0, 0.0);
        let b = Point::new(1.0, 0.1);
        let c = Point::new(2.0, 0.0);
        assert!(menger_curvature(a, b, c) < 0.0);
        assert!(menger_curvature(c, b, a) > 0.0);
    }

    #[test]
    fn frame_on_segment() {
        let pts = (0..=10)
            .map(|i| Point::new(i as f64 / 10.0, 0.0))
            .collect();
        let c = SampledCurve::from_points(pts, false).unwrap();
        let f = frenet_frame(&c, 0.5).unwrap();
        assert_eq!(f.tangent, Point::new(1.0, 0.0));
        assert_eq!(f.normal, Point::new(0.0, 1.0));
        assert_eq!(f.kappa, 0.0);
        assert!(!f.one_sided);
    }

    #[test]
    fn frame_orthonormal_on_circle() {
        let c = circle(1.0, 256);
        for s in [0.3, 1.7, 4.1] {
            let f = frenet_frame(&c, s).unwrap();
            assert!((f.tangent.norm() - 1.0).abs() < 1e-12);
            assert!(f.tangent.dot(f.normal).abs() < 1e-12);
            // Counterclockwise circle: curvature +1/r, normal points inward.
            assert!((f.kappa - 1.0).abs() < 1e-3);
        }
    }

    #[test]
    fn profile_sup_on_circle() {
        // Menger curvature of points on a circle is exactly 1/r, so the
        // profile is flat at 0.5 up to rounding.
        let c = circle(2.0, 4096);
        let prof = curvature_profile(&c).unwrap();
        assert!((prof.sup_abs() - 0.5).abs() < 1e-9);
        assert!((prof.kappa_at(1.7) - 0.5).abs() < 1e-9);
    }

    #[test]
    fn inflections_of_cubic_like_wave() {
        // y = sin(x) on [0, 2pi] has one interior inflection at x = pi.
        let n = 2000;
        let pts: Vec<Point> = (0..=n)
            .map(|i| {
                let x = i as f64 / n as f64 * std::f64::consts::TAU;
                Point::new(x, x.sin())
            })
            .collect();
        let c = SampledCurve::from_points(pts, false).unwrap();
        let prof = curvature_profile(&c).unwrap();
        let infl = inflection_points(&prof, default_kappa_tol(&prof));
        assert_eq!(infl.len(), 1);
        let p = c.point_at(infl[0]).unwrap();
        assert!((p.x - std::f64::consts::PI).abs() < 1e-2);
    }
}
