//! Extrinsic geometry of implicitly defined submanifolds.
//!
//! A [`SurfaceSpec`] is the common zero set of `N` scalar fields in `ℝⁿ`.
//! Normals, the shape operator and everything downstream are evaluated from
//! exact symbolic derivatives of the fields, which are built on first use and
//! cached.

mod frame;
mod jet;

pub use frame::{project_orthogonal_pair, CurvatureFrame};
pub use jet::NormalJet;

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::fieldexpr::{FieldError, FieldExpr, ParseError};
use crate::linalg::jacobi_eigen;

/// Gradients with a norm at or below this are treated as vanishing.
pub const GRADIENT_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("gradient of field {field} vanishes at the query point (|∇f| = {norm:e})")]
    DegenerateGradient { field: usize, norm: f64 },
    #[error("point is off the surface: |f| = {value:e} exceeds {tolerance:e}")]
    OffSurface { value: f64, tolerance: f64 },
    #[error("constraint gradients are linearly dependent (Gram determinant {gram:e})")]
    DependentGradients { gram: f64 },
    #[error("closest-point iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("operation needs codimension {expected}, surface has {got}")]
    WrongCodimension { expected: &'static str, got: usize },
    #[error("invalid surface: {0}")]
    InvalidSurface(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

#[derive(Debug, Default)]
struct Derivatives {
    grad: OnceLock<Vec<FieldExpr>>,
    hess: OnceLock<Vec<FieldExpr>>,
    third: OnceLock<Vec<FieldExpr>>,
}

/// Common zero set of `N` fields `f⁽ᵃ⁾` over `ℝⁿ`, `1 ≤ N < n`.
#[derive(Debug)]
pub struct SurfaceSpec {
    fields: Vec<FieldExpr>,
    label: String,
    derivs: Vec<Derivatives>,
    frame: OnceLock<frame::FrameFields>,
}

impl Clone for SurfaceSpec {
    fn clone(&self) -> Self {
        SurfaceSpec::from_parts(self.fields.clone(), self.label.clone())
    }
}

impl SurfaceSpec {
    pub fn new(fields: Vec<FieldExpr>, label: impl Into<String>) -> Result<Self, GeometryError> {
        let Some(first) = fields.first() else {
            return Err(GeometryError::InvalidSurface("no constraint fields".into()));
        };
        let n = first.dim();
        if fields.len() >= n {
            return Err(GeometryError::InvalidSurface(format!(
                "{} constraints in {n} dimensions leave no surface",
                fields.len()
            )));
        }
        for f in &fields[1..] {
            if f.coords() != first.coords() {
                return Err(FieldError::CoordinateMismatch(
                    first.coords().to_vec(),
                    f.coords().to_vec(),
                )
                .into());
            }
        }
        Ok(SurfaceSpec::from_parts(fields, label.into()))
    }

    fn from_parts(fields: Vec<FieldExpr>, label: String) -> Self {
        let derivs = fields.iter().map(|_| Derivatives::default()).collect();
        SurfaceSpec {
            fields,
            label,
            derivs,
            frame: OnceLock::new(),
        }
    }

    /// Codimension-one surface `f = 0`.
    pub fn hypersurface(f: FieldExpr) -> Result<Self, GeometryError> {
        let label = f.to_string();
        SurfaceSpec::new(vec![f], label)
    }

    /// Parse one source string per constraint.
    pub fn parse(sources: &[&str], coords: &[&str]) -> Result<Self, GeometryError> {
        let fields = sources
            .iter()
            .map(|s| FieldExpr::parse(s, coords))
            .collect::<Result<Vec<_>, _>>()?;
        SurfaceSpec::new(fields, sources.join("; "))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn fields(&self) -> &[FieldExpr] {
        &self.fields
    }

    pub fn field(&self, a: usize) -> &FieldExpr {
        &self.fields[a]
    }

    pub fn coords(&self) -> &[String] {
        self.fields[0].coords()
    }

    /// Ambient dimension `n`.
    pub fn dim(&self) -> usize {
        self.fields[0].dim()
    }

    /// Number of constraints `N`.
    pub fn codim(&self) -> usize {
        self.fields.len()
    }

    pub(crate) fn require_hypersurface(&self) -> Result<(), GeometryError> {
        if self.codim() != 1 {
            return Err(GeometryError::WrongCodimension {
                expected: "1",
                got: self.codim(),
            });
        }
        Ok(())
    }

    pub fn grad_exprs(&self, a: usize) -> &[FieldExpr] {
        self.derivs[a]
            .grad
            .get_or_init(|| self.fields[a].gradient())
    }

    /// Second derivatives, row-major `n × n`.
    pub fn hessian_exprs(&self, a: usize) -> &[FieldExpr] {
        self.derivs[a].hess.get_or_init(|| {
            let g = self.grad_exprs(a);
            let n = self.dim();
            let mut out: Vec<Option<FieldExpr>> = vec![None; n * n];
            for i in 0..n {
                for j in i..n {
                    let e = g[i].diff(j);
                    out[j * n + i] = Some(e.clone());
                    out[i * n + j] = Some(e);
                }
            }
            out.into_iter().map(Option::unwrap).collect()
        })
    }

    /// Third derivatives, `t[(i·n + j)·n + k] = ∂³f/∂xᵢ∂xⱼ∂xₖ`.
    pub fn third_exprs(&self, a: usize) -> &[FieldExpr] {
        self.derivs[a].third.get_or_init(|| {
            let h = self.hessian_exprs(a);
            let n = self.dim();
            let mut out: Vec<Option<FieldExpr>> = vec![None; n * n * n];
            for i in 0..n {
                for j in i..n {
                    for k in j..n {
                        let e = h[i * n + j].diff(k);
                        for (p, q, r) in [
                            (i, j, k),
                            (i, k, j),
                            (j, i, k),
                            (j, k, i),
                            (k, i, j),
                            (k, j, i),
                        ] {
                            out[(p * n + q) * n + r] = Some(e.clone());
                        }
                    }
                }
            }
            out.into_iter().map(Option::unwrap).collect()
        })
    }

    pub fn check_point(&self, x: &[f64]) -> Result<(), GeometryError> {
        Ok(self.fields[0].check_dim(x)?)
    }

    pub fn value(&self, a: usize, x: &[f64]) -> f64 {
        self.fields[a].eval(x)
    }

    pub fn gradient(&self, a: usize, x: &[f64]) -> Vec<f64> {
        self.grad_exprs(a).iter().map(|e| e.eval(x)).collect()
    }

    pub fn hessian(&self, a: usize, x: &[f64]) -> Vec<f64> {
        self.hessian_exprs(a).iter().map(|e| e.eval(x)).collect()
    }

    pub fn third(&self, a: usize, x: &[f64]) -> Vec<f64> {
        self.third_exprs(a).iter().map(|e| e.eval(x)).collect()
    }

    /// Gradient of field `a` together with its norm, rejecting degenerate
    /// points.
    pub fn checked_gradient(&self, a: usize, x: &[f64]) -> Result<(Vec<f64>, f64), GeometryError> {
        self.check_point(x)?;
        let g = self.gradient(a, x);
        let norm = norm(&g);
        if !(norm > GRADIENT_FLOOR) {
            return Err(GeometryError::DegenerateGradient { field: a, norm });
        }
        Ok((g, norm))
    }

    /// On-surface gate `|f⁽ᵃ⁾(x)| ≤ 1e−8·(1+|x|)` for every field.
    pub fn check_on_surface(&self, x: &[f64]) -> Result<(), GeometryError> {
        self.check_point(x)?;
        let tolerance = 1e-8 * (1.0 + norm(x));
        for a in 0..self.codim() {
            let value = self.value(a, x);
            if !(value.abs() <= tolerance) {
                return Err(GeometryError::OffSurface { value, tolerance });
            }
        }
        Ok(())
    }

    /// `n = ∇f/|∇f|` for a hypersurface.
    pub fn unit_normal(&self, x: &[f64]) -> Result<Vec<f64>, GeometryError> {
        self.require_hypersurface()?;
        let (g, norm) = self.checked_gradient(0, x)?;
        Ok(g.iter().map(|v| v / norm).collect())
    }

    /// Principal curvatures and unit normal at an on-surface point.
    ///
    /// The shape operator `W = P(∇n)P = P H P/|∇f|` is restricted to an
    /// orthonormal tangent basis and diagonalized. Curvatures are positive
    /// when the surface bends away from the normal, so the unit sphere with
    /// `f = Σx²−1` has `k = (1, 1)`.
    pub fn shape_spectrum(&self, x: &[f64]) -> Result<CurvatureFrame, GeometryError> {
        self.require_hypersurface()?;
        self.check_on_surface(x)?;
        let (g, gnorm) = self.checked_gradient(0, x)?;
        let n = self.dim();
        let normal: Vec<f64> = g.iter().map(|v| v / gnorm).collect();
        let h = self.hessian(0, x);
        let basis = tangent_basis(&normal);
        let m = basis.len();
        let mut w = vec![0.0; m * m];
        for (a, ta) in basis.iter().enumerate() {
            let hta: Vec<f64> = (0..n)
                .map(|i| (0..n).map(|j| h[i * n + j] * ta[j]).sum())
                .collect();
            for (b, tb) in basis.iter().enumerate() {
                w[b * m + a] = dot(tb, &hta) / gnorm;
            }
        }
        let (k, _) = jacobi_eigen(&w, m);
        let div = (0..n).map(|i| h[i * n + i]).sum::<f64>() / gnorm
            - (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .map(|(i, j)| normal[i] * h[i * n + j] * normal[j])
                .sum::<f64>()
                / gnorm;
        Ok(CurvatureFrame {
            point: x.to_vec(),
            normals: vec![normal],
            principal_curvatures: k,
            mean_div: vec![div],
        })
    }

    /// Distance-normalization diagnostics: `||∇f| − 1|` and the normal drift
    /// `max_i |Σ_k n_k ∂_k n_i|`.
    pub fn eikonal_residual(&self, x: &[f64]) -> Result<EikonalReport, GeometryError> {
        self.require_hypersurface()?;
        let jet = self.normal_jet(x)?;
        let d = self.dim();
        let drift = (0..d)
            .map(|i| (0..d).map(|k| jet.n[k] * jet.dn(i, k)).sum::<f64>().abs())
            .fold(0.0, f64::max);
        Ok(EikonalReport {
            residual: (jet.grad_norm - 1.0).abs(),
            normal_drift: drift,
        })
    }

    /// Nearest surface point by Newton iteration on `x − y = λ∇f(y)`,
    /// `f(y) = 0`, started at `y = x`.
    ///
    /// The distance is signed by the side of `x` (the sign of `f(x)`). For
    /// points equidistant from several surface points the one reached from
    /// the start is returned.
    pub fn closest_point(&self, x: &[f64]) -> Result<ClosestPoint, GeometryError> {
        self.require_hypersurface()?;
        self.check_point(x)?;
        let n = self.dim();
        let residual = |y: &[f64], lambda: f64| -> DVector<f64> {
            let g = self.gradient(0, y);
            let mut r = DVector::zeros(n + 1);
            for i in 0..n {
                r[i] = y[i] - x[i] + lambda * g[i];
            }
            r[n] = self.value(0, y);
            r
        };
        let mut y = x.to_vec();
        let mut lambda = 0.0;
        let mut r = residual(&y, lambda);
        const MAX_ITER: usize = 100;
        for iter in 1..=MAX_ITER {
            let g = self.gradient(0, &y);
            let h = self.hessian(0, &y);
            let mut jac = DMatrix::zeros(n + 1, n + 1);
            for i in 0..n {
                for j in 0..n {
                    jac[(i, j)] = lambda * h[i * n + j] + if i == j { 1.0 } else { 0.0 };
                }
                jac[(i, n)] = g[i];
                jac[(n, i)] = g[i];
            }
            let rhs = -&r;
            // singular at focal points; take the minimum-norm step there
            let step = match jac.clone().lu().solve(&rhs) {
                Some(step) => step,
                None => jac.svd(true, true).solve(&rhs, 1e-14).map_err(|_| {
                    GeometryError::NoConvergence {
                        iterations: iter,
                        residual: r.norm(),
                    }
                })?,
            };
            let mut t = 1.0;
            let (mut y_new, mut l_new, mut r_new);
            loop {
                y_new = (0..n).map(|i| y[i] + t * step[i]).collect::<Vec<_>>();
                l_new = lambda + t * step[n];
                r_new = residual(&y_new, l_new);
                if r_new.norm() <= r.norm() || t < 1e-9 {
                    break;
                }
                t *= 0.5;
            }
            let update = t * step.norm();
            y = y_new;
            lambda = l_new;
            r = r_new;
            if update <= 1e-12 * (1.0 + norm(&y)) {
                let fx = self.value(0, x);
                let dist: f64 = x
                    .iter()
                    .zip(&y)
                    .map(|(a, b)| (a - b).powi(2))
                    .sum::<f64>()
                    .sqrt();
                let sign = if fx > 0.0 {
                    1.0
                } else if fx < 0.0 {
                    -1.0
                } else {
                    0.0
                };
                return Ok(ClosestPoint {
                    point: y,
                    distance: sign * dist,
                    iterations: iter,
                });
            }
        }
        Err(GeometryError::NoConvergence {
            iterations: MAX_ITER,
            residual: r.norm(),
        })
    }

    /// Value, first and second derivatives of the unit normal field.
    pub fn normal_jet(&self, x: &[f64]) -> Result<NormalJet, GeometryError> {
        self.require_hypersurface()?;
        let (g, _) = self.checked_gradient(0, x)?;
        let h = self.hessian(0, x);
        let t = self.third(0, x);
        Ok(NormalJet::from_derivatives(&g, &h, &t))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EikonalReport {
    pub residual: f64,
    pub normal_drift: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosestPoint {
    pub point: Vec<f64>,
    pub distance: f64,
    pub iterations: usize,
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Orthonormal basis of the complement of the unit vector `n`.
fn tangent_basis(n: &[f64]) -> Vec<Vec<f64>> {
    let d = n.len();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(d - 1);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| n[a].abs().total_cmp(&n[b].abs()));
    for &e in &order {
        if basis.len() == d - 1 {
            break;
        }
        let mut v = vec![0.0; d];
        v[e] = 1.0;
        for _ in 0..2 {
            for q in std::iter::once(n).chain(basis.iter().map(|b| b.as_slice())) {
                let c = dot(q, &v);
                v.iter_mut().zip(q).for_each(|(a, b)| *a -= c * b);
            }
        }
        let len = norm(&v);
        if len > 1e-8 {
            v.iter_mut().for_each(|a| *a /= len);
            basis.push(v);
        }
    }
    basis
}
