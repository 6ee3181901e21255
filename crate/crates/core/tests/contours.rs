mod common;

use std::f64::consts::PI;

use common::{c, ellipse_area_integral};
use num_complex::Complex64;
use proptest::prelude::*;
use vpatch::contours::*;

fn ellipse(center: Complex64, a: f64, b: f64, tilt: f64) -> EllipseSpec {
    EllipseSpec::new(center, a, b, tilt).unwrap()
}

#[test]
fn sample_ellipse_examples() {
    let circle = sample_ellipse(&ellipse(c(0.0, 0.0), 1.0, 1.0, 0.0), 64).unwrap();
    assert!(circle.samples().iter().all(|z| (z.norm() - 1.0).abs() < 1e-15));

    let e = sample_ellipse(&ellipse(c(0.0, 0.0), 2.0, 1.0, 0.0), 64).unwrap();
    assert!((e.samples()[0] - c(2.0, 0.0)).norm() < 1e-15);
    assert!((e.derivs()[0] - c(0.0, 1.0)).norm() < 1e-15);

    let r = sample_ellipse(&ellipse(c(0.0, 0.0), 2.0, 1.0, PI / 2.0), 64).unwrap();
    assert!((r.samples()[0] - c(0.0, 2.0)).norm() < 1e-15);
}

#[test]
fn contour_invariants_are_enforced() {
    let e = ellipse(c(0.0, 0.0), 1.0, 1.0, 0.0);
    assert!(sample_ellipse(&e, 8).is_err());
    assert!(sample_ellipse(&e, 33).is_err());
    let mut pts: Vec<Complex64> = sample_ellipse(&e, 32).unwrap().samples().to_vec();
    pts[3] = pts[2];
    assert!(Contour::from_samples(pts).is_err());
    assert!(EllipseSpec::centered(1.0, 0.0).is_err());
    assert!(EllipseSpec::centered(f64::NAN, 1.0).is_err());
}

#[test]
fn clockwise_input_is_normalized() {
    let ccw = sample_ellipse(&ellipse(c(0.0, 0.0), 1.0, 1.0, 0.0), 64).unwrap();
    let cw_pts: Vec<Complex64> = ccw.samples().iter().map(|z| z.conj()).collect();
    let normalized = Contour::from_samples(cw_pts.clone()).unwrap();
    assert_eq!(normalized.orientation(), Orientation::CounterClockwise);
    assert!((area(&normalized) - PI).abs() < 1e-12);

    let raw = Contour::new_preserving_orientation(cw_pts.clone(), vpatch::contours::spectral_derivative(&cw_pts))
        .unwrap();
    assert_eq!(raw.orientation(), Orientation::Clockwise);
    assert!((area(&raw) + PI).abs() < 1e-12);
}

#[test]
fn area_examples() {
    let circle = sample_ellipse(&ellipse(c(0.0, 0.0), 1.0, 1.0, 0.0), 64).unwrap();
    assert!((area(&circle) - PI).abs() < 1e-12);
    let e = sample_ellipse(&ellipse(c(0.0, 0.0), 2.0, 1.0, 0.0), 64).unwrap();
    assert!((area(&e) - 2.0 * PI).abs() < 1e-12);
}

#[test]
fn centroid_examples() {
    let cases = [
        (ellipse(c(0.0, 0.0), 2.0, 1.0, 0.3), c(0.0, 0.0)),
        (ellipse(c(1.0, 2.0), 1.0, 1.0, 0.0), c(1.0, 2.0)),
        (ellipse(c(3.0, 0.0), 2.0, 1.0, 0.0), c(3.0, 0.0)),
    ];
    for (e, expected) in cases {
        let k = sample_ellipse(&e, 64).unwrap();
        assert!((centroid(&k).unwrap() - expected).norm() < 1e-12);
    }
}

#[test]
fn moments_match_area_quadrature() {
    let disc = sample_ellipse(&ellipse(c(0.0, 0.0), 1.0, 1.0, 0.0), 64).unwrap();
    assert!((moment(&disc, 0) - 1.0).norm() < 1e-12);
    let e = ellipse(c(0.0, 0.0), 2.0, 1.0, 0.0);
    let k = sample_ellipse(&e, 64).unwrap();
    assert!(moment(&k, 1).norm() < 1e-12);
    for (spec, n) in [(e, 2), (ellipse(c(0.4, -0.2), 1.5, 0.7, 0.9), 2), (ellipse(c(0.4, -0.2), 1.5, 0.7, 0.9), 3)] {
        let k = sample_ellipse(&spec, 128).unwrap();
        let oracle = ellipse_area_integral(&spec, 32, 128, |z| z.powu(n)) / PI;
        assert!((moment(&k, n) - oracle).norm() < 1e-11, "n={n}: {} vs {oracle}", moment(&k, n));
    }
}

#[test]
fn classify_examples() {
    let circle = sample_ellipse(&ellipse(c(0.0, 0.0), 1.0, 1.0, 0.0), 64).unwrap();
    assert_eq!(classify(c(0.0, 0.0), &circle), Side::Inside);
    assert_eq!(classify(c(3.0, 0.0), &circle), Side::Outside);
    assert_eq!(classify(c(1.0, 0.0), &circle), Side::Boundary);
    // off-node boundary point
    let z = Complex64::from_polar(1.0, 0.01);
    assert_eq!(classify(z, &circle), Side::Boundary);
    assert_eq!(classify(z * 1.001, &circle), Side::Outside);
    assert_eq!(classify(z * 0.999, &circle), Side::Inside);
}

#[test]
fn hausdorff_of_offset_circles() {
    let a = sample_ellipse(&ellipse(c(0.0, 0.0), 1.0, 1.0, 0.0), 64).unwrap();
    let b = sample_ellipse(&ellipse(c(0.25, 0.0), 1.0, 1.0, 0.0), 64).unwrap();
    assert!((hausdorff(&a, &b) - 0.25).abs() < 1e-10);
    let rotated = sample_ellipse(&ellipse(c(0.0, 0.0), 2.0, 1.0, 0.0), 64).unwrap();
    let shifted = Contour::from_samples(
        (0..64).map(|k| ellipse(c(0.0, 0.0), 2.0, 1.0, 0.0).point(2.0 * PI * (k as f64 + 0.5) / 64.0)).collect(),
    )
    .unwrap();
    assert!(hausdorff(&rotated, &shifted) < 1e-12);
}

#[test]
fn spectral_derivative_of_ellipse() {
    let e = ellipse(c(0.5, 0.0), 2.0, 1.0, 0.4);
    let k = sample_ellipse(&e, 64).unwrap();
    let d = spectral_derivative(k.samples());
    for (x, y) in d.iter().zip(k.derivs()) {
        assert!((x - y).norm() < 1e-12);
    }
}

fn arb_ellipse() -> impl Strategy<Value = EllipseSpec> {
    (-3.0..3.0f64, -3.0..3.0f64, 0.3..3.0f64, 0.3..3.0f64, 0.0..PI)
        .prop_map(|(x, y, a, b, t)| EllipseSpec::new(c(x, y), a, b, t).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn area_converges_spectrally(e in arb_ellipse()) {
        let k = sample_ellipse(&e, 128).unwrap();
        prop_assert!((area(&k) - PI * e.a * e.b).abs() < 1e-10 * e.a * e.b);
    }

    #[test]
    fn centroid_is_translation_equivariant(e in arb_ellipse(), wx in -5.0..5.0f64, wy in -5.0..5.0f64) {
        let k = sample_ellipse(&e, 64).unwrap();
        let w = c(wx, wy);
        let moved = k.translated(w);
        prop_assert!((centroid(&moved).unwrap() - centroid(&k).unwrap() - w).norm() < 1e-12 * (1.0 + w.norm()));
    }

    #[test]
    fn zeroth_moment_is_area_over_pi(e in arb_ellipse()) {
        let k = sample_ellipse(&e, 64).unwrap();
        prop_assert!((moment(&k, 0) - area(&k) / PI).norm() < 1e-12 * (1.0 + area(&k)));
    }

    #[test]
    fn classify_is_resampling_invariant(e in arb_ellipse(), r in 0.0..2.0f64, t in 0.0..(2.0 * PI)) {
        let z = e.from_local(c(e.a * r * t.cos(), e.b * r * t.sin()));
        // keep probes at least 1e-3 away from the boundary
        let boundary = e.from_local(c(e.a * t.cos(), e.b * t.sin()));
        prop_assume!((z - boundary).norm() > 1e-3 * (1.0 + e.a.max(e.b)) && (r - 1.0).abs() > 1e-3);
        let sides: Vec<Side> = [32, 64, 128, 256]
            .iter()
            .map(|&n| classify(z, &sample_ellipse(&e, n).unwrap()))
            .collect();
        let expected = if r < 1.0 { Side::Inside } else { Side::Outside };
        prop_assert!(sides.iter().all(|s| *s == expected), "{sides:?} for r={r}");
    }
}
