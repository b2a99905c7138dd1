//! Oracle tests: every expected value below is computed by an independent
//! route (closed form, quadrature, or brute force) before being compared to
//! the library.

use asymcurve::{
    build_level1, embed_bump, embedded_speed, frenet_frame, inflection_points,
    smoothness_modulus, ua_equal, PairScanConfig, Point, SampledCurve, Side, UaOutcome,
};
use asymcurve::{curvature_profile, default_kappa_tol};

/// Circular arc of signed curvature `kappa` (nonzero) and the given length,
/// starting at the origin heading +x, sampled uniformly.
fn arc(kappa: f64, len: f64, samples: usize) -> SampledCurve {
    let r = 1.0 / kappa.abs();
    let sgn = kappa.signum();
    let pts: Vec<Point> = (0..=samples)
        .map(|i| {
            let s = len * i as f64 / samples as f64;
            let t = s / r;
            // Unit-speed arc with curvature sgn/r through (0,0) tangent +x.
            Point::new(r * t.sin(), sgn * r * (1.0 - t.cos()))
        })
        .collect();
    SampledCurve::from_points(pts, false).unwrap()
}

/// Simpson quadrature of `f` over [0,1] with `n` (even) intervals.
fn simpson(f: impl Fn(f64) -> f64, n: usize) -> f64 {
    assert!(n % 2 == 0);
    let h = 1.0 / n as f64;
    let mut acc = f(0.0) + f(1.0);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(i as f64 * h);
    }
    acc * h / 3.0
}

#[test]
fn embedded_length_matches_speed_quadrature() {
    // Oracle: the arclength of the embedded bump is the integral of
    // sqrt((1 - kappa f)^2 + f'^2). Base: curvature -1 arc of unit length,
    // brute-force embedded polyline at step 1e-5 vs Simpson at 2^14 panels.
    let kappa = -1.0;
    let h = 0.05;
    let base = arc(kappa, 1.0, 100_000);
    let embedded = embed_bump(&base, h, Side::Plus).unwrap();
    let quad = simpson(|t| embedded_speed(kappa, h, t).unwrap(), 1 << 14);
    assert!(
        (embedded.total_len() - quad).abs() < 1e-8,
        "polyline {} vs quadrature {}",
        embedded.total_len(),
        quad
    );
}

#[test]
fn resample_preserves_circle_length() {
    // Inscribed 4096-gon of the unit circle, length 2*4096*sin(pi/4096).
    let n = 4096;
    let pts: Vec<Point> = (0..n)
        .map(|i| {
            let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            Point::new(t.cos(), t.sin())
        })
        .collect();
    let c = SampledCurve::from_points(pts, true).unwrap();
    let expected = 2.0 * n as f64 * (std::f64::consts::PI / n as f64).sin();
    assert!((c.total_len() - expected).abs() < 1e-12);
    let r = c.resample_by_arclength(0.01).unwrap();
    // Resampling chords the polyline: the deficit is about step^2/24 per
    // unit length (kappa = 1), i.e. ~2.6e-6 relative here.
    assert!((r.total_len() - c.total_len()).abs() < 1e-5 * c.total_len());
    assert!(r.total_len() <= c.total_len());
}

#[test]
fn level1_length_bounds_n6() {
    // 2^-6 (1 + 1/36) <= len <= 2^-6 (1 + 4/36).
    let c = build_level1(6, 4096).unwrap();
    let s = 64.0 * c.total_len();
    assert!(s >= 1.0 + 1.0 / 36.0, "scaled length {s}");
    assert!(s <= 1.0 + 4.0 / 36.0, "scaled length {s}");
}

#[test]
fn bump_graph_inflections_at_quarters() {
    // y = 0.1 sin^2(pi x): y'' ~ cos(2 pi x) flips sign at x = 1/4, 3/4.
    let n = 4000;
    let pts: Vec<Point> = (0..=n)
        .map(|i| {
            let x = i as f64 / n as f64;
            let s = (std::f64::consts::PI * x).sin();
            Point::new(x, 0.1 * s * s)
        })
        .collect();
    let c = SampledCurve::from_points(pts, false).unwrap();
    let prof = curvature_profile(&c).unwrap();
    let infl = inflection_points(&prof, default_kappa_tol(&prof));
    assert_eq!(infl.len(), 2, "crossings: {infl:?}");
    let x0 = c.point_at(infl[0]).unwrap().x;
    let x1 = c.point_at(infl[1]).unwrap().x;
    assert!((x0 - 0.25).abs() < 1e-3, "x0 = {x0}");
    assert!((x1 - 0.75).abs() < 1e-3, "x1 = {x1}");
}

#[test]
fn bump_graph_crest_curvature() {
    // Analytic: y = 0.1 sin^2(pi x) has y'' = -2 pi^2 * 0.1 at the crest,
    // where y' = 0, so kappa = -2 pi^2 * 0.1.
    let n = 4000;
    let pts: Vec<Point> = (0..=n)
        .map(|i| {
            let x = i as f64 / n as f64;
            let s = (std::f64::consts::PI * x).sin();
            Point::new(x, 0.1 * s * s)
        })
        .collect();
    let c = SampledCurve::from_points(pts, false).unwrap();
    // Arclength of the half graph is a hair over 0.5; locate the crest by x.
    let mut s_crest = 0.0;
    for (i, p) in c.points().iter().enumerate() {
        if (p.x - 0.5).abs() < 1e-12 {
            s_crest = c.arclens()[i];
            break;
        }
    }
    let f = frenet_frame(&c, s_crest).unwrap();
    let expected = -2.0 * std::f64::consts::PI.powi(2) * 0.1;
    assert!(
        (f.kappa - expected).abs() < 1e-3 * expected.abs(),
        "kappa = {}, expected = {}",
        f.kappa,
        expected
    );
}

#[test]
fn circle_smoothness_modulus_small_delta() {
    // arc/chord = (d/2R) / sin(d/2R) ~ 1 + (d/2R)^2/6 for chord-scale d;
    // at R = 1, delta = 0.01 the sup is ~1 + 4.2e-6, far below 1 + 1e-4.
    let n = 16384;
    let pts: Vec<Point> = (0..n)
        .map(|i| {
            let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            Point::new(t.cos(), t.sin())
        })
        .collect();
    let c = SampledCurve::from_points(pts, true).unwrap();
    let m = smoothness_modulus(&c, 0.01, &PairScanConfig::default()).unwrap();
    assert!(m >= 1.0);
    assert!(m <= 1.0 + 1e-4, "modulus = {m}");
}

#[test]
fn segment_ua_is_one() {
    let pts = vec![Point::new(0.0, 0.0), Point::new(3.0, 4.0)];
    let c = SampledCurve::from_points(pts, false).unwrap();
    assert_eq!(
        ua_equal(&c, 1e-9, 16).unwrap(),
        UaOutcome::Found { n: 1 }
    );
}
