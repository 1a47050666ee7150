mod common;

use common::XYZ;
use qgeom::brackets::PhasePoint;
use qgeom::conversion::{
    angular_identity_gap, angular_identity_sides, conversion_constraints,
    conversion_residual_strict, conversion_residual_weak, max_norm, ConversionError,
    ExtendedPhasePoint,
};
use qgeom::{FieldExpr, SurfaceSpec};
use rand::Rng;

fn sphere_point(rng: &mut rand_chacha::ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v = common::uniform(rng, n, -1.0, 1.0);
        let r = common::norm(&v);
        if r > 0.1 {
            return v.iter().map(|c| c / r).collect();
        }
    }
}

#[test]
fn strict_residual_vanishes_on_the_distance_sphere() {
    let s = SurfaceSpec::parse(&["sqrt(x^2+y^2+z^2)-1"], &XYZ).unwrap();
    let g = FieldExpr::parse("x^2+y^2+z^2", &XYZ).unwrap();
    let mut rng = common::rng(51);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let x = sphere_point(&mut rng, 3);
        worst = worst.max(max_norm(&conversion_residual_strict(&s, &g, &x).unwrap()));
    }
    assert!(worst <= 1e-10, "{worst:e}");
}

#[test]
fn weak_residual_reduces_to_strict_for_distance_fields() {
    let s = SurfaceSpec::parse(&["sqrt(x^2+y^2+z^2)-2"], &XYZ).unwrap();
    let g = FieldExpr::parse("x*y+z^3", &XYZ).unwrap();
    let mut rng = common::rng(52);
    for _ in 0..50 {
        let x: Vec<f64> = sphere_point(&mut rng, 3).iter().map(|c| 2.0 * c).collect();
        let a = conversion_residual_strict(&s, &g, &x).unwrap();
        let b = conversion_residual_weak(&s, &g, &x).unwrap();
        for (ra, rb) in a.iter().zip(&b) {
            for (u, v) in ra.iter().zip(rb) {
                assert!((u - v).abs() <= 1e-12 * u.abs().max(1.0));
            }
        }
    }
}

#[test]
fn ellipse_has_no_solution_with_the_sphere_ansatz() {
    let s = SurfaceSpec::parse(&["x^2/4+y^2-1"], &["x", "y"]).unwrap();
    let g = FieldExpr::parse("x^2+y^2", &["x", "y"]).unwrap();
    let m = conversion_residual_strict(&s, &g, &[2.0, 0.0]).unwrap();
    assert!(max_norm(&m) >= 0.01);
    // n = (1, 0), ∂ᵧnᵧ = 2 (the curvature a/b²), g = 4, n·∇g = 4
    assert!(m[0][0].abs() < 1e-12 && m[0][1].abs() < 1e-12 && m[1][0].abs() < 1e-12);
    assert!((m[1][1] - (4.0 - 2.0 * 4.0 * 2.0)).abs() < 1e-12);
}

#[test]
fn strict_residual_requires_unit_gradient() {
    let s = SurfaceSpec::parse(&["x^2+y^2+z^2-1"], &XYZ).unwrap();
    let g = FieldExpr::parse("x^2+y^2+z^2", &XYZ).unwrap();
    let err = conversion_residual_strict(&s, &g, &[0.0, 0.0, 1.0]).unwrap_err();
    assert!(matches!(err, ConversionError::NotDistanceNormalized { .. }));
    assert!(conversion_residual_weak(&s, &g, &[0.0, 0.0, 1.0]).is_ok());
}

#[test]
fn angular_identity_holds_in_five_dimensions() {
    let mut rng = common::rng(53);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let x = common::uniform(&mut rng, 5, -2.0, 2.0);
        let p = common::uniform(&mut rng, 5, -2.0, 2.0);
        let z = PhasePoint::new(x, p);
        let (lhs, _) = angular_identity_sides(&z).unwrap();
        worst = worst.max(angular_identity_gap(&z).unwrap() / lhs.abs().max(1.0));
    }
    assert!(worst <= 1e-10, "{worst:e}");
}

#[test]
fn converted_constraints_vanish_on_the_extended_surface() {
    let s = SurfaceSpec::parse(&["x^2/4+y^2+z^2/2.25-1"], &XYZ).unwrap();
    let mut rng = common::rng(54);
    for _ in 0..20 {
        let (t, u): (f64, f64) = (rng.random_range(0.0..6.28), rng.random_range(-1.4..1.4));
        let x = vec![2.0 * t.cos() * u.cos(), t.sin() * u.cos(), 1.5 * u.sin()];
        let grad = s.gradient(0, &x);
        let p = common::uniform(&mut rng, 3, -1.0, 1.0);
        let c = common::dot(&p, &grad) / common::dot(&grad, &grad);
        let tangent: Vec<f64> = p.iter().zip(&grad).map(|(a, b)| a - c * b).collect();
        let z = ExtendedPhasePoint {
            base: PhasePoint::new(x, tangent),
            q: 0.0,
            k: 0.0,
        };
        let (s1, s2) = conversion_constraints(&s, &z).unwrap();
        assert!(s1.abs() < 1e-12 && s2.abs() < 1e-12);
    }
}
