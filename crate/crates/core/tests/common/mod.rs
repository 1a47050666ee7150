#![allow(dead_code)]

use nalgebra::DMatrix;
use qgeom::{FieldExpr, SurfaceSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const XYZ: [&str; 3] = ["x", "y", "z"];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
}

/// Random quartic `q(x) − q(x₀)` in three variables through a random point
/// `x₀` with `|∇f(x₀)| ≥ 0.2`.
pub fn random_quartic(rng: &mut ChaCha8Rng) -> (SurfaceSpec, Vec<f64>) {
    loop {
        let mut terms = Vec::new();
        for a in 0..=4u32 {
            for b in 0..=(4 - a) {
                for c in 0..=(4 - a - b) {
                    if a + b + c == 0 {
                        continue;
                    }
                    let coef: f64 = rng.random_range(-1.0..1.0);
                    terms.push(format!("({coef})*x^{a}*y^{b}*z^{c}"));
                }
            }
        }
        let q = FieldExpr::parse(&terms.join("+"), &XYZ).unwrap();
        let x0 = uniform(rng, 3, -0.8, 0.8);
        let f = &q - q.eval(&x0);
        let s = SurfaceSpec::hypersurface(f).unwrap();
        let g = s.gradient(0, &x0);
        if g.iter().map(|v| v * v).sum::<f64>().sqrt() >= 0.2 {
            return (s, x0);
        }
    }
}

/// Random orthogonal matrix (QR of a uniform random matrix), row-major.
pub fn random_rotation(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<f64>> {
    let m = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    let q = m.qr().q();
    (0..n)
        .map(|i| (0..n).map(|j| q[(i, j)]).collect())
        .collect()
}

pub fn matvec(q: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    q.iter()
        .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
        .collect()
}

/// `f(Qᵀx)`: the surface carried along by `x ↦ Qx`.
pub fn rotate_field(f: &FieldExpr, q: &[Vec<f64>]) -> FieldExpr {
    let n = f.dim();
    let subs: Vec<FieldExpr> = (0..n)
        .map(|i| FieldExpr::sum(&(0..n).map(|j| q[j][i] * &f.var(j)).collect::<Vec<_>>()).unwrap())
        .collect();
    f.compose(&subs).unwrap()
}

/// `f(x/λ)`
pub fn scale_field(f: &FieldExpr, lambda: f64) -> FieldExpr {
    let subs: Vec<FieldExpr> = (0..f.dim()).map(|i| &f.var(i) / lambda).collect();
    f.compose(&subs).unwrap()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}
