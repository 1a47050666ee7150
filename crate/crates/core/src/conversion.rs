//! Diagnostics for abelian conversion of the surface constraints.
//!
//! The phase space is extended by a canonical pair `(Q, K)` and the second
//! class pair `(φ₁, φ₂)` is replaced by
//!
//! ```text
//! σ₁ = f(x) + K,   σ₂ = n·p + |∇f| Q
//! ```
//!
//! The residual matrices below vanish exactly where the ansatz
//! `H = ½ g(x) (p² − (n·p)²)/…` with a scalar `g` closes at a point.

use thiserror::Error;

use crate::brackets::PhasePoint;
use crate::fieldexpr::{FieldError, FieldExpr};
use crate::geometry::{norm, GeometryError, SurfaceSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConversionError {
    #[error("surface is not distance-normalized at the point (||∇f| − 1| = {residual:e})")]
    NotDistanceNormalized { residual: f64 },
    #[error("position vector vanishes")]
    ZeroPosition,
    #[error("phase point has dimension ({x}, {p}), surface has n = {n}")]
    DimensionMismatch { n: usize, x: usize, p: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Phase point extended by the conversion pair `(Q, K)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedPhasePoint {
    pub base: PhasePoint,
    pub q: f64,
    pub k: f64,
}

/// Gate on `||∇f| − 1|` for [`conversion_residual_strict`].
pub const DISTANCE_TOLERANCE: f64 = 1e-8;

/// `(σ₁, σ₂) = (f + K, n·p + |∇f| Q)`.
pub fn conversion_constraints(
    s: &SurfaceSpec,
    z: &ExtendedPhasePoint,
) -> Result<(f64, f64), ConversionError> {
    s.require_hypersurface()?;
    let n = s.dim();
    if z.base.x.len() != n || z.base.p.len() != n {
        return Err(ConversionError::DimensionMismatch {
            n,
            x: z.base.x.len(),
            p: z.base.p.len(),
        });
    }
    let (g, len) = s.checked_gradient(0, &z.base.x)?;
    let np: f64 = g.iter().zip(&z.base.p).map(|(gi, pi)| gi * pi).sum::<f64>() / len;
    Ok((s.value(0, &z.base.x) + z.k, np + len * z.q))
}

fn check_g(s: &SurfaceSpec, g: &FieldExpr) -> Result<(), ConversionError> {
    if g.coords() != s.coords() {
        return Err(
            FieldError::CoordinateMismatch(s.coords().to_vec(), g.coords().to_vec()).into(),
        );
    }
    Ok(())
}

struct Pieces {
    n: Vec<f64>,
    /// `∂ᵢ nₖ` at `i·d + k`
    dn: Vec<f64>,
    dg_normal: f64,
    g: f64,
}

fn pieces(s: &SurfaceSpec, g: &FieldExpr, x: &[f64]) -> Result<Pieces, ConversionError> {
    s.require_hypersurface()?;
    check_g(s, g)?;
    let jet = s.normal_jet(x)?;
    let d = s.dim();
    let mut dn = vec![0.0; d * d];
    for i in 0..d {
        for k in 0..d {
            dn[i * d + k] = jet.dn(k, i);
        }
    }
    let dg_normal = (0..d).map(|j| jet.n[j] * g.diff(j).eval(x)).sum();
    Ok(Pieces {
        n: jet.n,
        dn,
        dg_normal,
        g: g.eval(x),
    })
}

/// `Mᵢₖ = (n·∇g)(δᵢₖ − nᵢnₖ) − 2g ∂ᵢnₖ`, for distance-normalized surfaces.
pub fn conversion_residual_strict(
    s: &SurfaceSpec,
    g: &FieldExpr,
    x: &[f64],
) -> Result<Vec<Vec<f64>>, ConversionError> {
    let eik = s.eikonal_residual(x)?;
    if !(eik.residual <= DISTANCE_TOLERANCE) {
        return Err(ConversionError::NotDistanceNormalized {
            residual: eik.residual,
        });
    }
    let p = pieces(s, g, x)?;
    let d = p.n.len();
    Ok((0..d)
        .map(|i| {
            (0..d)
                .map(|k| {
                    let delta = if i == k { 1.0 } else { 0.0 };
                    p.dg_normal * (delta - p.n[i] * p.n[k]) - 2.0 * p.g * p.dn[i * d + k]
                })
                .collect()
        })
        .collect())
}

/// `Mᵢₖ = (n·∇g)(δᵢₖ − nᵢnₖ) + 2g (nᵢ Σⱼ nⱼ∂ⱼnₖ − ∂ᵢnₖ)`, any representation.
pub fn conversion_residual_weak(
    s: &SurfaceSpec,
    g: &FieldExpr,
    x: &[f64],
) -> Result<Vec<Vec<f64>>, ConversionError> {
    let p = pieces(s, g, x)?;
    let d = p.n.len();
    let drift: Vec<f64> = (0..d)
        .map(|k| (0..d).map(|j| p.n[j] * p.dn[j * d + k]).sum())
        .collect();
    Ok((0..d)
        .map(|i| {
            (0..d)
                .map(|k| {
                    let delta = if i == k { 1.0 } else { 0.0 };
                    p.dg_normal * (delta - p.n[i] * p.n[k])
                        + 2.0 * p.g * (p.n[i] * drift[k] - p.dn[i * d + k])
                })
                .collect()
        })
        .collect())
}

/// Largest entry of a residual matrix in magnitude.
pub fn max_norm(m: &[Vec<f64>]) -> f64 {
    m.iter().flatten().fold(0.0, |acc, v| acc.max(v.abs()))
}

/// `|Σ_{i<k}(xᵢpₖ − xₖpᵢ)² − x²(p² − (n·p)²)|` with `n = x/|x|`.
pub fn angular_identity_gap(z: &PhasePoint) -> Result<f64, ConversionError> {
    let (lhs, rhs) = angular_identity_sides(z)?;
    Ok((lhs - rhs).abs())
}

/// Both sides of the angular-momentum identity.
pub fn angular_identity_sides(z: &PhasePoint) -> Result<(f64, f64), ConversionError> {
    let (x, p) = (&z.x, &z.p);
    if x.len() != p.len() {
        return Err(ConversionError::DimensionMismatch {
            n: x.len(),
            x: x.len(),
            p: p.len(),
        });
    }
    let r = norm(x);
    if r == 0.0 {
        return Err(ConversionError::ZeroPosition);
    }
    let mut lhs = 0.0;
    for i in 0..x.len() {
        for k in i + 1..x.len() {
            lhs += (x[i] * p[k] - x[k] * p[i]).powi(2);
        }
    }
    let np: f64 = x.iter().zip(p).map(|(a, b)| a * b).sum::<f64>() / r;
    let p2: f64 = p.iter().map(|v| v * v).sum();
    Ok((lhs, r * r * (p2 - np * np)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn surf(src: &str, coords: &[&str]) -> SurfaceSpec {
        SurfaceSpec::parse(&[src], coords).unwrap()
    }

    #[test]
    fn constraints_examples() {
        let s = surf("x^2+y^2-1", &["x", "y"]);
        let z = ExtendedPhasePoint {
            base: PhasePoint::new(vec![1.0, 0.0], vec![0.0, 1.0]),
            q: 0.3,
            k: 0.1,
        };
        let (s1, s2) = conversion_constraints(&s, &z).unwrap();
        assert!((s1 - 0.1).abs() < 1e-15 && (s2 - 0.6).abs() < 1e-15);
        let z0 = ExtendedPhasePoint {
            q: 0.0,
            k: 0.0,
            ..z
        };
        assert_eq!(conversion_constraints(&s, &z0).unwrap(), (0.0, 0.0));
        let plane = surf("z", &["x", "y", "z"]);
        let z = ExtendedPhasePoint {
            base: PhasePoint::new(vec![1.0, 2.0, 0.0], vec![3.0, 4.0, 5.0]),
            q: 0.5,
            k: 0.0,
        };
        assert_eq!(conversion_constraints(&plane, &z).unwrap().1, 5.5);
    }

    #[test]
    fn strict_residual_on_sphere_and_ellipse() {
        let c = ["x", "y", "z"];
        let s = surf("sqrt(x^2+y^2+z^2)-2", &c);
        let g = FieldExpr::parse("x^2+y^2+z^2", &c).unwrap();
        let m = conversion_residual_strict(&s, &g, &[0.0, 1.2, 1.6]).unwrap();
        assert!(max_norm(&m) < 1e-12);
        let zero = FieldExpr::parse("0", &c).unwrap();
        assert_eq!(
            max_norm(&conversion_residual_strict(&s, &zero, &[0.0, 1.2, 1.6]).unwrap()),
            0.0
        );

        let e = surf("x^2/4+y^2-1", &["x", "y"]);
        let g = FieldExpr::parse("x^2+y^2", &["x", "y"]).unwrap();
        let m = conversion_residual_strict(&e, &g, &[2.0, 0.0]).unwrap();
        assert!(m[0][0].abs() < 1e-14 && (m[1][1] + 12.0).abs() < 1e-12);
    }

    #[test]
    fn strict_residual_requires_distance_field() {
        let s = surf("x^2+y^2-1", &["x", "y"]);
        let g = FieldExpr::parse("x^2+y^2", &["x", "y"]).unwrap();
        assert!(matches!(
            conversion_residual_strict(&s, &g, &[1.0, 0.0]),
            Err(ConversionError::NotDistanceNormalized { .. })
        ));
        assert!(max_norm(&conversion_residual_weak(&s, &g, &[0.6, 0.8]).unwrap()) < 1e-14);
    }

    #[test]
    fn angular_identity_examples() {
        assert_eq!(
            angular_identity_sides(&PhasePoint::new(vec![1.0, 0.0], vec![0.0, 3.0])).unwrap(),
            (9.0, 9.0)
        );
        assert_eq!(
            angular_identity_gap(&PhasePoint::new(vec![1.0, 0.0], vec![5.0, 0.0])).unwrap(),
            0.0
        );
        assert_eq!(
            angular_identity_gap(&PhasePoint::new(vec![0.0, 0.0], vec![1.0, 0.0])),
            Err(ConversionError::ZeroPosition)
        );
    }
}
