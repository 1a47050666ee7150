mod common;

use common::{dot, XYZ};
use qgeom::brackets::{constraints_from_surface, ConstraintSet, Observable, PhasePoint};
use qgeom::SurfaceSpec;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn tangent_momentum(rng: &mut ChaCha8Rng, normal: &[f64]) -> Vec<f64> {
    let p = common::uniform(rng, normal.len(), -1.0, 1.0);
    let c = dot(&p, normal) / dot(normal, normal);
    p.iter().zip(normal).map(|(a, b)| a - c * b).collect()
}

fn sphere_point(rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let v = common::uniform(rng, 3, -1.0, 1.0);
        let r = common::norm(&v);
        if r > 0.1 {
            return v.iter().map(|c| c / r).collect();
        }
    }
}

fn ellipsoid_point(rng: &mut ChaCha8Rng) -> Vec<f64> {
    let (t, u): (f64, f64) = (rng.random_range(0.0..6.28), rng.random_range(-1.4..1.4));
    vec![2.0 * t.cos() * u.cos(), t.sin() * u.cos(), 1.5 * u.sin()]
}

fn random_observable(set: &ConstraintSet, rng: &mut ChaCha8Rng) -> Observable {
    let names = set.space.names().to_vec();
    let mut terms = Vec::new();
    for _ in 0..5 {
        let a = &names[rng.random_range(0..names.len())];
        let b = &names[rng.random_range(0..names.len())];
        let c: f64 = rng.random_range(-2.0..2.0);
        match rng.random_range(0..3) {
            0 => terms.push(format!("({c})*{a}")),
            1 => terms.push(format!("({c})*{a}*{b}")),
            _ => terms.push(format!("({c})*{a}^2*{b}")),
        }
    }
    set.space.parse(&terms.join("+")).unwrap()
}

#[test]
fn sphere_dirac_brackets() {
    let s = SurfaceSpec::parse(&["x^2+y^2+z^2-1"], &XYZ).unwrap();
    let set = constraints_from_surface(&s).unwrap();
    let mut rng = common::rng(31);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let x = sphere_point(&mut rng);
        let p = common::uniform(&mut rng, 3, -2.0, 2.0);
        let t = set
            .dirac_tables(&PhasePoint::new(x.clone(), p.clone()))
            .unwrap();
        let x2 = dot(&x, &x);
        for i in 0..3 {
            for j in 0..3 {
                let d = if i == j { 1.0 } else { 0.0 };
                worst = worst.max(t.xx[i][j].abs());
                worst = worst.max((t.xp[i][j] - (d - x[i] * x[j] / x2)).abs());
                worst = worst.max((t.pp[i][j] - (p[i] * x[j] - p[j] * x[i]) / x2).abs());
            }
        }
    }
    assert!(worst <= 1e-9, "max error {worst:e}");
}

#[test]
fn general_surface_dirac_brackets() {
    let mut rng = common::rng(32);
    let mut worst = 0.0f64;
    for k in 0..100 {
        let (s, x) = if k % 2 == 0 {
            (
                SurfaceSpec::parse(&["x^2/4+y^2+z^2/2.25-1"], &XYZ).unwrap(),
                ellipsoid_point(&mut rng),
            )
        } else {
            common::random_quartic(&mut rng)
        };
        let set = constraints_from_surface(&s).unwrap();
        let p = common::uniform(&mut rng, 3, -2.0, 2.0);
        let t = set
            .dirac_tables(&PhasePoint::new(x.clone(), p.clone()))
            .unwrap();
        let g = s.gradient(0, &x);
        let h = s.hessian(0, &x);
        let q = dot(&g, &g);
        let n: Vec<f64> = g.iter().map(|v| v / q.sqrt()).collect();
        for i in 0..3 {
            for j in 0..3 {
                let d = if i == j { 1.0 } else { 0.0 };
                let pp: f64 = (0..3)
                    .map(|k| (g[j] * h[i * 3 + k] - g[i] * h[j * 3 + k]) * p[k])
                    .sum::<f64>()
                    / q;
                worst = worst.max(t.xx[i][j].abs());
                worst = worst.max((t.xp[i][j] - (d - n[i] * n[j])).abs());
                worst = worst.max((t.pp[i][j] - pp).abs());
            }
        }
    }
    assert!(worst <= 1e-9, "max error {worst:e}");
}

#[test]
fn dirac_bracket_algebra() {
    let s = SurfaceSpec::parse(&["x^2/4+y^2+z^2/2.25-1"], &XYZ).unwrap();
    let set = constraints_from_surface(&s).unwrap();
    let mut rng = common::rng(33);
    for _ in 0..20 {
        let x = ellipsoid_point(&mut rng);
        let p = tangent_momentum(&mut rng, &s.gradient(0, &x));
        let z = PhasePoint::new(x, p);
        let a = random_observable(&set, &mut rng);
        let b = random_observable(&set, &mut rng);
        let c = random_observable(&set, &mut rng);
        let d = |u: &Observable, v: &Observable| set.dirac_bracket(u, v, &z).unwrap();

        let ab = d(&a, &b);
        assert!((ab + d(&b, &a)).abs() <= 1e-12 * ab.abs().max(1.0));

        for phi in &set.constraints {
            assert!(d(phi, &a).abs() <= 1e-10);
        }

        let lhs = d(&a.mul(&b), &c);
        let rhs = a.eval(&z) * d(&b, &c) + b.eval(&z) * d(&a, &c);
        assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1.0));

        let bc = set.dirac_bracket_expr(&b, &c).unwrap();
        let ca = set.dirac_bracket_expr(&c, &a).unwrap();
        let ab_e = set.dirac_bracket_expr(&a, &b).unwrap();
        let jacobi = d(&a, &bc) + d(&b, &ca) + d(&c, &ab_e);
        let scale = d(&a, &bc).abs().max(d(&b, &ca).abs()).max(1.0);
        assert!(jacobi.abs() <= 1e-8 * scale, "Jacobi defect {jacobi:e}");
    }
}

#[test]
fn symbolic_and_numeric_dirac_brackets_agree() {
    let s = SurfaceSpec::parse(&["y-x^2/2+1"], &["x", "y"]).unwrap();
    let set = constraints_from_surface(&s).unwrap();
    let mut rng = common::rng(34);
    for _ in 0..20 {
        let a = random_observable(&set, &mut rng);
        let b = random_observable(&set, &mut rng);
        let e = set.dirac_bracket_expr(&a, &b).unwrap();
        let xv: f64 = rng.random_range(-1.5..1.5);
        let z = PhasePoint::new(
            vec![xv, xv * xv / 2.0 - 1.0],
            common::uniform(&mut rng, 2, -1.0, 1.0),
        );
        let num = set.dirac_bracket(&a, &b, &z).unwrap();
        assert!((e.eval(&z) - num).abs() <= 1e-10 * num.abs().max(1.0));
    }
}
