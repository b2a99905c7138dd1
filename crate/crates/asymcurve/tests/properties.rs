//! Property tests for the geometric invariants that every module promises.

use proptest::prelude::*;

use asymcurve::{
    chordarc_ratio, conformality_ratio, embed_bump, frenet_frame, partition_equal, ua_equal,
    Point, SampledCurve, Side, UaOutcome,
};

/// A mildly wiggly open graph curve; parameters keep slopes below ~1 so the
/// curve stays far from self-intersection and degenerate chords.
fn wiggly(amp: f64, freq: f64, phase: f64, samples: usize) -> SampledCurve {
    let pts: Vec<Point> = (0..=samples)
        .map(|i| {
            let x = i as f64 / samples as f64;
            Point::new(x, amp * (freq * x + phase).sin())
        })
        .collect();
    SampledCurve::from_points(pts, false).unwrap()
}

fn circle(n: usize, r: f64) -> SampledCurve {
    let pts: Vec<Point> = (0..n)
        .map(|i| {
            let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            Point::new(r * t.cos(), r * t.sin())
        })
        .collect();
    SampledCurve::from_points(pts, true).unwrap()
}

proptest! {
    #[test]
    fn frenet_frames_orthonormal(
        amp in 0.05f64..0.4,
        freq in 1.0f64..12.0,
        phase in 0.0f64..6.28,
        u in 0.02f64..0.98,
    ) {
        let c = wiggly(amp, freq, phase, 600);
        let f = frenet_frame(&c, u * c.total_len()).unwrap();
        prop_assert!((f.tangent.norm() - 1.0).abs() < 1e-12);
        prop_assert!((f.normal.norm() - 1.0).abs() < 1e-12);
        prop_assert!(f.tangent.dot(f.normal).abs() < 1e-12);
        prop_assert!(f.kappa.is_finite());
    }

    #[test]
    fn ratios_at_least_one_and_ordered(
        amp in 0.05f64..0.4,
        freq in 1.0f64..12.0,
        a in 0.0f64..0.45,
        span in 0.1f64..0.5,
    ) {
        let c = wiggly(amp, freq, 0.3, 800);
        let total = c.total_len();
        let (sa, sb) = (a * total, (a + span) * total);
        let ca = chordarc_ratio(&c, sa, sb).unwrap();
        let co = conformality_ratio(&c, sa, sb).unwrap();
        // w = a gives |a-w| + |w-b| = |a-b| exactly, so co >= 1; the path
        // along the subarc dominates the detour through any w, so co <= ca.
        prop_assert!(ca >= 1.0);
        prop_assert!(co >= 1.0);
        prop_assert!(co <= ca + 1e-12);
    }

    #[test]
    fn ratios_similarity_invariant(
        scale in 0.01f64..100.0,
        angle in 0.0f64..6.28,
        dx in -5.0f64..5.0,
        dy in -5.0f64..5.0,
        a in 0.05f64..0.40,
        span in 0.2f64..0.5,
    ) {
        let c = wiggly(0.25, 7.0, 1.0, 700);
        let (sin, cos) = angle.sin_cos();
        let pts: Vec<Point> = c
            .points()
            .iter()
            .map(|p| {
                Point::new(
                    scale * (p.x * cos - p.y * sin) + dx,
                    scale * (p.x * sin + p.y * cos) + dy,
                )
            })
            .collect();
        let t = SampledCurve::from_points(pts, false).unwrap();
        let total = c.total_len();
        let (sa, sb) = (a * total, (a + span) * total);
        let ca0 = chordarc_ratio(&c, sa, sb).unwrap();
        let ca1 = chordarc_ratio(&t, scale * sa, scale * sb).unwrap();
        prop_assert!((ca0 - ca1).abs() <= 1e-10 * ca0);
        let co0 = conformality_ratio(&c, sa, sb).unwrap();
        let co1 = conformality_ratio(&t, scale * sa, scale * sb).unwrap();
        prop_assert!((co0 - co1).abs() <= 1e-10 * co0);
    }

    #[test]
    fn partition_spec_exact(length in 1e-6f64..1e3, ratio in 1.0f64..50.0) {
        // epsilon <= length, so N >= 1 and alpha lands in [1, 2).
        let epsilon = length / ratio;
        let p = partition_equal(length, epsilon).unwrap();
        prop_assert!(p.alpha >= 1.0 && p.alpha < 2.0);
        let rebuilt = p.count as f64 * p.piece_len;
        prop_assert!((rebuilt - length).abs() <= 1e-12 * length);
    }

    #[test]
    fn ua_monotone_in_epsilon(
        amp in 0.05f64..0.3,
        freq in 2.0f64..10.0,
        eps_lo in 0.005f64..0.05,
        factor in 1.1f64..4.0,
    ) {
        let c = wiggly(amp, freq, 0.0, 400);
        let eps_hi = eps_lo * factor;
        let lo = ua_equal(&c, eps_lo, 1 << 16).unwrap();
        let hi = ua_equal(&c, eps_hi, 1 << 16).unwrap();
        // A larger tolerance never needs more pieces.
        match (lo, hi) {
            (UaOutcome::Found { n: nl }, UaOutcome::Found { n: nh }) => {
                prop_assert!(nh <= nl)
            }
            (UaOutcome::NotFound { .. }, _) => {}
            (UaOutcome::Found { .. }, UaOutcome::NotFound { .. }) => {
                prop_assert!(false, "tighter eps found, looser did not")
            }
        }
    }

    #[test]
    fn embed_bump_endpoints_and_mirror(h in 0.0f64..0.2) {
        let base: Vec<Point> = (0..=256)
            .map(|i| Point::new(i as f64 / 256.0, 0.0))
            .collect();
        let base = SampledCurve::from_points(base, false).unwrap();
        let up = embed_bump(&base, h, Side::Plus).unwrap();
        let down = embed_bump(&base, h, Side::Minus).unwrap();
        let n = base.sample_count();
        prop_assert_eq!(up.points()[0], base.points()[0]);
        prop_assert_eq!(up.points()[n - 1], base.points()[n - 1]);
        // On a straight base the two sides are exact mirror images.
        for (u, d) in up.points().iter().zip(down.points()) {
            prop_assert_eq!(u.x, d.x);
            prop_assert_eq!(u.y, -d.y);
        }
        prop_assert!((up.total_len() - down.total_len()).abs() <= 1e-12);
    }

    #[test]
    fn closed_subarc_picks_smaller_diameter_side(
        a in 0.02f64..0.98,
        b in 0.02f64..0.98,
    ) {
        prop_assume!((a - b).abs() > 0.02);
        let c = circle(512, 1.0);
        let total = c.total_len();
        let (sa, sb) = (a.min(b) * total, a.max(b) * total);
        let inner = sb - sa;
        let sub = c.subarc(sa, sb).unwrap();
        let got = sub.total_len();
        // On a circle the smaller-diameter side is the shorter arc (an arc
        // longer than half contains antipodal pairs). Stay off the tie.
        prop_assume!((inner - total / 2.0).abs() > 0.01 * total);
        let expect = inner.min(total - inner);
        prop_assert!(
            (got - expect).abs() <= 1e-9 * total,
            "got {}, expected {}",
            got,
            expect
        );
    }

    #[test]
    fn deviation_zero_on_self(amp in 0.05f64..0.4, freq in 1.0f64..10.0) {
        let c = wiggly(amp, freq, 0.7, 300);
        prop_assert_eq!(c.max_deviation(&c), 0.0);
    }
}
