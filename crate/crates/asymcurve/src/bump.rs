//! The sin^2 bump family, its normal-offset embedding, and equal-length
//! partitions.
//!
//! The bump of height h over the unit interval is f_h(t) = h sin^2(pi t),
//! with derivative f_h'(t) = h pi sin(2 pi t). It vanishes to first order at
//! both ends, so embedding it along a curve's normal keeps the endpoints
//! fixed and the tangents matched there.

use serde::{Deserialize, Serialize};

use crate::curve::SampledCurve;
use crate::error::{Error, Result};
use crate::frenet::menger_curvature;


/// Which side of the curve an embedded bump points to, relative to the
/// +90-degree normal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        }
    }

    /// Convex-side convention: bumps point away from the center of
    /// curvature, so the side is the opposite of the mean curvature sign.
    /// Flat pieces (mean 0) default to Plus.
    pub fn from_mean_kappa(mean: f64) -> Side {
        if mean > 0.0 {
            Side::Minus
        } else {
            Side::Plus
        }
    }
}

/// The bump profile of height `h` on the unit parameter interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BumpProfile {
    pub h: f64,
}

impl BumpProfile {
    pub fn new(h: f64) -> Result<Self> {
        if !(h.is_finite() && h >= 0.0) {
            return Err(Error::BadParameter {
                name: "h",
                value: h,
                expected: "finite and non-negative",
            });
        }
        Ok(BumpProfile { h })
    }

    /// Value and derivative at `t` in [0, 1]. sup |f| = h at t = 1/2 and
    /// sup |f'| = pi h at t = 1/4, 3/4.
    pub fn eval(&self, t: f64) -> Result<(f64, f64)> {
        if !(t.is_finite() && (0.0..=1.0).contains(&t)) {
            return Err(Error::BadParameter {
                name: "t",
                value: t,
                expected: "in [0, 1]",
            });
        }
        let s = (std::f64::consts::PI * t).sin();
        let value = self.h * s * s;
        let deriv = self.h * std::f64::consts::PI * (2.0 * std::f64::consts::PI * t).sin();
        Ok((value, deriv))
    }
}

/// Speed of the normal-offset curve Gamma(s) + f_h(s) N(s) over a base of
/// constant curvature `kappa`, at parameter `t`:
/// sqrt((1 - kappa f)^2 + f'^2). Errors when the offset folds
/// (1 - kappa f <= 0).
pub fn embedded_speed(kappa: f64, h: f64, t: f64) -> Result<f64> {
    let (f, fd) = BumpProfile::new(h)?.eval(t)?;
    let radial = 1.0 - kappa * f;
    if radial <= 0.0 {
        return Err(Error::OffsetFold {
            s: t,
            value: radial,
        });
    }
    Ok((radial * radial + fd * fd).sqrt())
}

/// Embeds the bump along the normal of an open, unit-length base curve:
/// output sample i is base_i + side * f_h(s_i) * N(s_i). Endpoints coincide
/// with the base exactly. Errors if the base is closed, not unit length (to
/// 1e-9 relative), or if the offset folds anywhere (1 - kappa * offset <= 0,
/// reported at the first offending arclength).
pub fn embed_bump(base: &SampledCurve, h: f64, side: Side) -> Result<SampledCurve> {
    BumpProfile::new(h)?;
    if base.is_closed() {
        return Err(Error::BadCurve { expected: "open" });
    }
    let total = base.total_len();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::BadCurve {
            expected: "unit length (normalize the base first)",
        });
    }
    if base.sample_count() < 3 {
        return Err(Error::InsufficientData {
            points: base.sample_count(),
            required: 3,
        });
    }
    let pts = base.points();
    let arclen = base.arclens();
    let n = pts.len();
    let profile = BumpProfile { h };
    let mut out = Vec::with_capacity(n);
    out.push(pts[0]);
    for i in 1..n - 1 {
        let t = arclen[i] / total;
        let (f, _) = profile.eval(t.clamp(0.0, 1.0))?;
        let offset = side.sign() * f;
        let tangent = (pts[i + 1] - pts[i - 1]).normalized().ok_or(Error::BadCurve {
            expected: "free of coincident consecutive points",
        })?;
        let kappa = menger_curvature(pts[i - 1], pts[i], pts[i + 1]);
        let radial = 1.0 - kappa * offset;
        if radial <= 0.0 {
            return Err(Error::OffsetFold {
                s: arclen[i],
                value: radial,
            });
        }
        out.push(pts[i] + tangent.perp() * offset);
    }
    out.push(pts[n - 1]);
    SampledCurve::from_points(out, false)
}

/// An equal-length partition of a subarc: `count` pieces of length
/// `alpha * epsilon` with alpha in [1, 2).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartitionSpec {
    pub count: u32,
    pub alpha: f64,
    pub piece_len: f64,
}

/// Partitions a length into floor(length/epsilon) equal pieces. Errors when
/// the length is shorter than epsilon (no piece fits).
pub fn partition_equal(length: f64, epsilon: f64) -> Result<PartitionSpec> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::BadParameter {
            name: "epsilon",
            value: epsilon,
            expected: "finite and positive",
        });
    }
    if !(length.is_finite() && length > 0.0) {
        return Err(Error::BadParameter {
            name: "length",
            value: length,
            expected: "finite and positive",
        });
    }
    let n = (length / epsilon).floor();
    if n < 1.0 {
        return Err(Error::TooShortSubarc {
            len: length,
            epsilon,
        });
    }
    let count = n as u32;
    let alpha = length / (n * epsilon);
    Ok(PartitionSpec {
        count,
        alpha,
        piece_len: alpha * epsilon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::Point;

    #[test]
    fn bump_peak_and_slope() {
        let b = BumpProfile::new(0.1).unwrap();
        let (f, fd) = b.eval(0.5).unwrap();
        assert!((f - 0.1).abs() < 1e-15);
        assert!(fd.abs() < 1e-15);
        let (_, fd) = b.eval(0.25).unwrap();
        assert!((fd - 0.1 * std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn bump_vanishes_at_ends() {
        let b = BumpProfile::new(0.3).unwrap();
        assert_eq!(b.eval(0.0).unwrap().0, 0.0);
        // sin(pi) is not exactly zero in floats but the square is negligible.
        assert!(b.eval(1.0).unwrap().0 < 1e-30);
    }

    #[test]
    fn speed_folds_on_tight_circle() {
        // kappa = 3, h = 0.5: at the crest 1 - 3*0.5 < 0.
        let err = embedded_speed(3.0, 0.5, 0.5);
        assert!(matches!(err, Err(Error::OffsetFold { .. })));
    }

    #[test]
    fn embed_on_unit_segment_matches_graph() {
        let n = 1000;
        let pts: Vec<Point> = (0..=n)
            .map(|i| Point::new(i as f64 / n as f64, 0.0))
            .collect();
        let base = SampledCurve::from_points(pts, false).unwrap();
        let curve = embed_bump(&base, 0.1, Side::Plus).unwrap();
        // Endpoints exact.
        assert_eq!(curve.points()[0], Point::new(0.0, 0.0));
        assert_eq!(curve.points()[n], Point::new(1.0, 0.0));
        // Midpoint: the graph of f at t = 1/2.
        let mid = curve.points()[n / 2];
        assert!((mid.y - 0.1).abs() < 1e-12);
        // Reflected embedding mirrors across the base.
        let mirrored = embed_bump(&base, 0.1, Side::Minus).unwrap();
        for (p, q) in curve.points().iter().zip(mirrored.points()) {
            assert_eq!(p.x, q.x);
            assert_eq!(p.y, -q.y);
        }
    }

    #[test]
    fn partition_examples() {
        let p = partition_equal(1.0, 0.3).unwrap();
        assert_eq!(p.count, 3);
        assert!((p.alpha - 1.0 / 0.9).abs() < 1e-12);
        assert!((p.count as f64 * p.piece_len - 1.0).abs() < 1e-12);

        let exact = partition_equal(1.0, 0.25).unwrap();
        assert_eq!(exact.count, 4);
        assert_eq!(exact.alpha, 1.0);

        assert!(matches!(
            partition_equal(0.2, 0.3),
            Err(Error::TooShortSubarc { .. })
        ));
    }

    #[test]
    fn partition_alpha_range() {
        for &(len, eps) in &[(1.0, 0.3), (2.7, 0.11), (0.5, 0.499), (10.0, 1.0)] {
            let p = partition_equal(len, eps).unwrap();
            assert!(p.alpha >= 1.0 && p.alpha < 2.0, "alpha = {}", p.alpha);
        }
    }
}
