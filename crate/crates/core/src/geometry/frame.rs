use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{dot, GeometryError, SurfaceSpec};
use crate::fieldexpr::FieldExpr;

/// Normals and curvature data at a point of a submanifold.
///
/// `principal_curvatures` is filled for hypersurfaces only; `mean_div[a]` is
/// `div n⁽ᵃ⁾`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureFrame {
    pub point: Vec<f64>,
    pub normals: Vec<Vec<f64>>,
    pub principal_curvatures: Vec<f64>,
    pub mean_div: Vec<f64>,
}

impl CurvatureFrame {
    /// Frame without a point, for closed-form evaluations from curvatures.
    pub fn from_curvatures(k: &[f64]) -> Self {
        CurvatureFrame {
            point: Vec::new(),
            normals: Vec::new(),
            principal_curvatures: k.to_vec(),
            mean_div: vec![k.iter().sum()],
        }
    }
}

/// Symbolic orthonormal normal fields and their divergences.
#[derive(Debug)]
pub(super) struct FrameFields {
    normals: Vec<Vec<FieldExpr>>,
    divs: Vec<FieldExpr>,
}

impl FrameFields {
    fn build(s: &SurfaceSpec) -> Self {
        let mut normals: Vec<Vec<FieldExpr>> = Vec::with_capacity(s.codim());
        for a in 0..s.codim() {
            let mut v: Vec<FieldExpr> = s.grad_exprs(a).to_vec();
            for e in &normals {
                let c = FieldExpr::sum(&e.iter().zip(&v).map(|(p, q)| p * q).collect::<Vec<_>>())
                    .expect("nonempty coordinate list");
                v = v.iter().zip(e).map(|(vi, ei)| vi - &(&c * ei)).collect();
            }
            let len = FieldExpr::sum(&v.iter().map(|c| c.square()).collect::<Vec<_>>())
                .expect("nonempty coordinate list")
                .sqrt();
            normals.push(v.iter().map(|c| c / &len).collect());
        }
        let divs = normals
            .iter()
            .map(|e| {
                FieldExpr::sum(
                    &e.iter()
                        .enumerate()
                        .map(|(i, c)| c.diff(i))
                        .collect::<Vec<_>>(),
                )
                .expect("nonempty coordinate list")
            })
            .collect();
        FrameFields { normals, divs }
    }
}

impl SurfaceSpec {
    /// Orthonormal normal frame by Gram–Schmidt on the constraint gradients
    /// in declaration order, with `div n⁽ᵃ⁾` of each orthonormalized field.
    pub fn orthonormal_frame(&self, x: &[f64]) -> Result<CurvatureFrame, GeometryError> {
        self.check_point(x)?;
        let big_n = self.codim();
        let mut units = Vec::with_capacity(big_n);
        for a in 0..big_n {
            let (g, len) = self.checked_gradient(a, x)?;
            units.push(g.into_iter().map(|v| v / len).collect::<Vec<_>>());
        }
        let gram = DMatrix::from_fn(big_n, big_n, |a, b| dot(&units[a], &units[b]));
        let det = gram.determinant();
        if !(det > 1e-12) {
            return Err(GeometryError::DependentGradients { gram: det });
        }
        let fields = self.frame.get_or_init(|| FrameFields::build(self));
        let normals = fields
            .normals
            .iter()
            .map(|e| e.iter().map(|c| c.eval(x)).collect())
            .collect();
        let mean_div = fields.divs.iter().map(|d| d.eval(x)).collect();
        let principal_curvatures = if big_n == 1 {
            self.shape_spectrum(x)
                .map(|f| f.principal_curvatures)
                .unwrap_or_default()
        } else {
            Vec::new()
        };
        Ok(CurvatureFrame {
            point: x.to_vec(),
            normals,
            principal_curvatures,
            mean_div,
        })
    }
}

/// Component of `v` orthogonal to both `a1` and `a2`:
///
/// ```text
/// V⊥ = V − [a1 a2² (a1·V) + a2 a1² (a2·V) − (a1·a2)(a2 (a1·V) + a1 (a2·V))]
///          / (a1² a2² − (a1·a2)²)
/// ```
pub fn project_orthogonal_pair(
    v: &[f64],
    a1: &[f64],
    a2: &[f64],
) -> Result<Vec<f64>, GeometryError> {
    let a11 = dot(a1, a1);
    let a22 = dot(a2, a2);
    let a12 = dot(a1, a2);
    let gram = a11 * a22 - a12 * a12;
    let scale = a11 * a22;
    if !(scale > 0.0) || !(gram > 1e-12 * scale) {
        let rel = if scale > 0.0 { gram / scale } else { 0.0 };
        return Err(GeometryError::DependentGradients { gram: rel });
    }
    let a1v = dot(a1, v);
    let a2v = dot(a2, v);
    Ok((0..v.len())
        .map(|i| {
            let num = a1[i] * a22 * a1v + a2[i] * a11 * a2v - a12 * (a2[i] * a1v + a1[i] * a2v);
            v[i] - num / gram
        })
        .collect())
}
