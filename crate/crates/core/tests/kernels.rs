mod common;

use std::f64::consts::PI;

use proptest::prelude::*;
use spectral_cesaro::kernels::{
    cylinder_kernel, heat_kernel, kernel, schrodinger_kernel, small_t_coefficients, wightman_interval, wightman_p,
    Case, KernelKind, Locality, Method,
};
use spectral_cesaro::Error;

fn interior() -> impl Strategy<Value = f64> {
    0.05..PI - 0.05
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn heat_routes_agree(t in 0.05..1.0f64, x in interior(), y in interior()) {
        let s = heat_kernel(Case::Interval, t, x, y, Method::SpectralSum).unwrap().value;
        let m = heat_kernel(Case::Interval, t, x, y, Method::ImageSum).unwrap().value;
        let reference = common::heat_series(t, x, y);
        prop_assert!((s.re - reference).abs() < 1e-8 && (m.re - reference).abs() < 1e-8);
        prop_assert!(s.im.abs() <= 1e-12 * s.re.abs() && m.im.abs() <= 1e-12 * m.re.abs());
    }

    #[test]
    fn cylinder_routes_agree(t in 0.05..1.0f64, x in interior(), y in interior()) {
        let c = cylinder_kernel(Case::Interval, t, x, y, Method::ClosedForm).unwrap().value;
        let s = cylinder_kernel(Case::Interval, t, x, y, Method::SpectralSum).unwrap().value;
        let m = cylinder_kernel(Case::Interval, t, x, y, Method::ImageSum).unwrap().value;
        let reference = common::cylinder_interval(t, x, y);
        for v in [c, s, m] {
            prop_assert!((v.re - reference).abs() < 1e-8);
        }
    }

    #[test]
    fn line_routes_agree(kind in prop::sample::select(vec![KernelKind::Heat, KernelKind::Cylinder]), t in 0.05..1.0f64, x in -2.0..2.0f64, y in -2.0..2.0f64) {
        let c = kernel(kind, Case::Line, t, x, y, Method::ClosedForm).unwrap().value;
        let s = kernel(kind, Case::Line, t, x, y, Method::SpectralSum).unwrap().value;
        let r2 = (x - y) * (x - y);
        let reference = match kind {
            KernelKind::Heat => (-r2 / (4.0 * t)).exp() / (4.0 * PI * t).sqrt(),
            _ => t / (PI * (t * t + r2)),
        };
        prop_assert!((c.re - reference).abs() < 1e-12 * reference.max(1.0));
        prop_assert!((s.re - reference).abs() < 1e-8);
    }

    #[test]
    fn kernels_are_symmetric(t in 0.05..1.0f64, x in interior(), y in interior()) {
        for (kind, case, method) in [
            (KernelKind::Heat, Case::Interval, Method::SpectralSum),
            (KernelKind::Heat, Case::Interval, Method::ImageSum),
            (KernelKind::Heat, Case::Line, Method::ClosedForm),
            (KernelKind::Cylinder, Case::Interval, Method::ClosedForm),
            (KernelKind::Cylinder, Case::Interval, Method::SpectralSum),
            (KernelKind::Schrodinger, Case::Line, Method::ClosedForm),
        ] {
            let a = kernel(kind, case, t, x, y, method).unwrap().value;
            let b = kernel(kind, case, t, y, x, method).unwrap().value;
            prop_assert!((a - b).norm() <= 1e-12 * a.norm().max(1.0), "{kind:?} {case:?} {method:?}");
        }
        if let (Ok(a), Ok(b)) = (
            wightman_interval(t, x, y, Method::ClosedForm),
            wightman_interval(t, y, x, Method::ClosedForm),
        ) {
            prop_assert!((a.value - b.value).norm() <= 1e-12 * a.value.norm().max(1.0));
        }
    }

    #[test]
    fn wightman_imaginary_part_is_quarter_p(t in -6.0..6.0f64, x in interior(), y in interior()) {
        match (wightman_interval(t, x, y, Method::ClosedForm), wightman_p(t, x, y)) {
            (Ok(w), Ok(p)) => {
                prop_assert!(p == -1 || p == 0 || p == 1);
                prop_assert_eq!(w.value.im, 0.25 * f64::from(p));
            }
            (Err(Error::Singularity(_)), _) | (_, Err(Error::Boundary(_))) => {}
            (w, p) => prop_assert!(false, "{w:?} {p:?}"),
        }
    }

    #[test]
    fn wightman_p_is_odd(t in -10.0..10.0f64, x in 0.01..PI - 0.01, y in 0.01..PI - 0.01) {
        if let (Ok(p), Ok(q)) = (wightman_p(t, x, y), wightman_p(-t, x, y)) {
            prop_assert_eq!(p, -q);
        }
    }
}

#[test]
fn dirichlet_boundary() {
    let t = 0.1;
    for y in [0.7, 1.6, 2.5] {
        for kind in [KernelKind::Heat, KernelKind::Cylinder] {
            let inner = kernel(kind, Case::Interval, t, PI / 2.0, y, Method::ClosedForm)
                .or_else(|_| kernel(kind, Case::Interval, t, PI / 2.0, y, Method::SpectralSum))
                .unwrap()
                .value
                .norm();
            for x in [1e-4, PI - 1e-4] {
                for method in [Method::SpectralSum, Method::ImageSum] {
                    let v = kernel(kind, Case::Interval, t, x, y, method).unwrap().value.norm();
                    assert!(v < 1e-2 * inner, "{kind:?} {method:?} at x = {x}: {v} vs {inner}");
                }
            }
        }
    }
}

/// `∫ K(t, x, y) φ(y) dy` on panels refined geometrically around `y = x`.
fn smear_in_y<K: Fn(f64) -> f64>(k: K, x: f64, a: f64, b: f64) -> f64 {
    let mut cuts = vec![a, b, x];
    let mut h = 1e-7;
    while h < b - a {
        for c in [x - h, x + h] {
            if c > a && c < b {
                cuts.push(c);
            }
        }
        h *= 2.0;
    }
    cuts.sort_by(f64::total_cmp);
    cuts.windows(2)
        .map(|w| common::integrate(|y| k(y) * common::bump(a, b, y), w[0], w[1], 2))
        .sum()
}

#[test]
fn initial_condition() {
    let t = 1e-4;
    // The smoothing error is about t·φ'', so the bump is kept wide.
    let (a, b) = (0.1, 3.0);
    for x in [0.8, 1.55, 2.3] {
        let want = common::bump(a, b, x);
        let heat = smear_in_y(|y| heat_kernel(Case::Interval, t, x, y, Method::ImageSum).unwrap().value.re, x, a, b);
        let cyl = smear_in_y(|y| cylinder_kernel(Case::Interval, t, x, y, Method::ClosedForm).unwrap().value.re, x, a, b);
        assert!((heat - want).abs() < 1e-4, "heat at x = {x}: {heat} vs {want}");
        assert!((cyl - want).abs() < 1e-4, "cylinder at x = {x}: {cyl} vs {want}");
    }
}

#[test]
fn schrodinger_pointwise_interval_is_unsupported() {
    assert!(matches!(
        schrodinger_kernel(Case::Interval, 0.3, 1.0, 2.0, Method::SpectralSum),
        Err(Error::Unsupported(_))
    ));
    let v = schrodinger_kernel(Case::Line, 0.3, 1.0, 2.0, Method::ClosedForm).unwrap().value;
    assert!((v.norm() - (4.0 * PI * 0.3f64).powf(-0.5)).abs() < 1e-14);
}

#[test]
fn expansion_classes() {
    let x = 1.0;
    for (kind, case) in [
        (KernelKind::Heat, Case::Line),
        (KernelKind::Heat, Case::Interval),
        (KernelKind::Schrodinger, Case::Line),
        (KernelKind::Cylinder, Case::Line),
        (KernelKind::Cylinder, Case::Interval),
    ] {
        let e = small_t_coefficients(kind, case, x, x, 4).unwrap();
        assert!(e.terms.windows(2).all(|w| w[0].exponent < w[1].exponent), "{kind:?} {case:?}");
        if kind != KernelKind::Cylinder {
            assert!(e.terms.iter().all(|t| t.exponent.fract() == 0.0));
            assert_eq!(e.locality, Locality::Local);
        }
    }
    let cyl = small_t_coefficients(KernelKind::Cylinder, Case::Interval, x, x, 4).unwrap();
    assert_eq!(cyl.locality, Locality::Global);
    assert!(cyl.coefficient(1.0).re.abs() > 1e-3);
    assert!(matches!(
        small_t_coefficients(KernelKind::Wightman, Case::Interval, x, x, 3),
        Err(Error::Parameter(_))
    ));
}

#[test]
fn off_diagonal_cylinder_line_coefficients() {
    // t/(π(t²+r²)) = (1/π)(t/r² − t³/r⁴ + …)
    let (x, y) = (0.2, 1.0);
    let r2: f64 = (x - y) * (x - y);
    let e = small_t_coefficients(KernelKind::Cylinder, Case::Line, x, y, 6).unwrap();
    assert!((e.coefficient(1.0).re - 1.0 / (PI * r2)).abs() < 1e-8);
    assert!((e.coefficient(3.0).re + 1.0 / (PI * r2 * r2)).abs() < 1e-6);
}
