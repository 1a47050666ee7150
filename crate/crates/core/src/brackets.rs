//! Poisson and Dirac brackets on the phase space `T*ℝⁿ`.
//!
//! Observables are symbolic expressions over `x₁…xₙ, p_x₁…p_xₙ`, so every
//! bracket is assembled from exact partial derivatives. The Dirac bracket
//!
//! ```text
//! {A, B}_D = {A, B} − Σ_ab {A, φ_a} Δ_ab {φ_b, B},   Δ = C⁻¹,  C_ab = {φ_a, φ_b}
//! ```
//!
//! is available both numerically at a phase point and as an expression.

use std::sync::Arc;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::fieldexpr::{FieldError, FieldExpr, ParseError};
use crate::geometry::{GeometryError, NormalJet, SurfaceSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BracketError {
    #[error("phase point has dimension ({x}, {p}), phase space has n = {n}")]
    DimensionMismatch { n: usize, x: usize, p: usize },
    #[error("observable is not defined on this phase space: {0}")]
    ForeignObservable(String),
    #[error("second-class analysis needs an even number of constraints, got {0}")]
    OddConstraintCount(usize),
    #[error("constraint matrix is singular (det {det:e})")]
    SingularConstraintMatrix { det: f64 },
    #[error("symbolic Dirac brackets support at most 4 constraints, got {0}")]
    TooManyConstraints(usize),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// Names of the phase-space coordinates: positions followed by momenta
/// `p_<name>`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpace {
    positions: Arc<[String]>,
    names: Arc<[String]>,
}

impl PhaseSpace {
    pub fn new<S: AsRef<str>>(positions: &[S]) -> Result<Self, BracketError> {
        let pos: Vec<String> = positions.iter().map(|s| s.as_ref().to_string()).collect();
        let mut names = pos.clone();
        names.extend(pos.iter().map(|s| format!("p_{s}")));
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        FieldExpr::constant(0.0, &refs)?;
        Ok(PhaseSpace {
            positions: pos.into(),
            names: names.into(),
        })
    }

    pub fn for_surface(s: &SurfaceSpec) -> Result<Self, BracketError> {
        PhaseSpace::new(s.coords())
    }

    /// Configuration-space dimension `n`.
    pub fn dim(&self) -> usize {
        self.positions.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn positions(&self) -> &[String] {
        &self.positions
    }

    fn refs(&self) -> Vec<&str> {
        self.names.iter().map(String::as_str).collect()
    }

    pub fn parse(&self, src: &str) -> Result<Observable, BracketError> {
        Ok(Observable {
            expr: FieldExpr::parse(src, &self.refs())?,
        })
    }

    pub fn x(&self, i: usize) -> Observable {
        Observable {
            expr: FieldExpr::coordinate(i, &self.refs()).expect("valid phase space"),
        }
    }

    pub fn p(&self, i: usize) -> Observable {
        let n = self.dim();
        Observable {
            expr: FieldExpr::coordinate(n + i, &self.refs()).expect("valid phase space"),
        }
    }

    /// Lift a configuration-space field to phase space.
    pub fn lift(&self, f: &FieldExpr) -> Result<Observable, BracketError> {
        Ok(Observable {
            expr: f.embed(&self.names)?,
        })
    }

    /// Wrap an expression already defined over the phase-space names.
    pub fn observable(&self, expr: FieldExpr) -> Result<Observable, BracketError> {
        if expr.coords() != &*self.names {
            return Err(BracketError::ForeignObservable(expr.to_string()));
        }
        Ok(Observable { expr })
    }
}

/// Phase-space function.
#[derive(Debug, Clone)]
pub struct Observable {
    pub expr: FieldExpr,
}

impl Observable {
    pub fn eval(&self, z: &PhasePoint) -> f64 {
        self.expr.eval(&z.concat())
    }

    fn gradient_at(&self, z: &[f64]) -> Vec<f64> {
        (0..self.expr.dim())
            .map(|k| self.expr.diff(k).eval(z))
            .collect()
    }

    pub fn mul(&self, other: &Observable) -> Observable {
        Observable {
            expr: &self.expr * &other.expr,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint {
    pub x: Vec<f64>,
    pub p: Vec<f64>,
}

impl PhasePoint {
    pub fn new(x: Vec<f64>, p: Vec<f64>) -> Self {
        PhasePoint { x, p }
    }

    pub fn concat(&self) -> Vec<f64> {
        let mut z = self.x.clone();
        z.extend_from_slice(&self.p);
        z
    }
}

/// Ordered list of constraints `φ_a` on a phase space.
#[derive(Debug, Clone)]
pub struct ConstraintSet {
    pub space: PhaseSpace,
    pub constraints: Vec<Observable>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SecondClassReport {
    /// `C_ab = {φ_a, φ_b}`, row-major.
    pub matrix: Vec<Vec<f64>>,
    pub det: f64,
    pub second_class: bool,
}

fn check_point(space: &PhaseSpace, z: &PhasePoint) -> Result<Vec<f64>, BracketError> {
    let n = space.dim();
    if z.x.len() != n || z.p.len() != n {
        return Err(BracketError::DimensionMismatch {
            n,
            x: z.x.len(),
            p: z.p.len(),
        });
    }
    Ok(z.concat())
}

fn check_observable(space: &PhaseSpace, a: &Observable) -> Result<(), BracketError> {
    if a.expr.coords() != space.names() {
        return Err(BracketError::ForeignObservable(a.expr.to_string()));
    }
    Ok(())
}

/// `{U, V}` from the phase-space gradients of `U` and `V`.
fn bracket_of_gradients(gu: &[f64], gv: &[f64]) -> f64 {
    let n = gu.len() / 2;
    (0..n).map(|i| gu[i] * gv[n + i] - gu[n + i] * gv[i]).sum()
}

/// Canonical Poisson bracket `Σ_i (∂A/∂xᵢ ∂B/∂pᵢ − ∂A/∂pᵢ ∂B/∂xᵢ)`.
pub fn poisson(
    space: &PhaseSpace,
    a: &Observable,
    b: &Observable,
    z: &PhasePoint,
) -> Result<f64, BracketError> {
    check_observable(space, a)?;
    check_observable(space, b)?;
    let zz = check_point(space, z)?;
    Ok(bracket_of_gradients(
        &a.gradient_at(&zz),
        &b.gradient_at(&zz),
    ))
}

/// The Poisson bracket as an observable.
pub fn poisson_expr(a: &Observable, b: &Observable) -> Observable {
    let n = a.expr.dim() / 2;
    let terms: Vec<FieldExpr> = (0..n)
        .map(|i| {
            &(&a.expr.diff(i) * &b.expr.diff(n + i)) - &(&a.expr.diff(n + i) * &b.expr.diff(i))
        })
        .collect();
    Observable {
        expr: FieldExpr::sum(&terms).expect("nonempty phase space"),
    }
}

/// `φ₁ = f(x)`, `φ₂ = Σᵢ ∂ᵢf · pᵢ` for a hypersurface `f = 0`.
pub fn constraints_from_surface(s: &SurfaceSpec) -> Result<ConstraintSet, BracketError> {
    s.require_hypersurface()?;
    let space = PhaseSpace::for_surface(s)?;
    let phi1 = space.lift(s.field(0))?;
    let terms: Vec<FieldExpr> = s
        .grad_exprs(0)
        .iter()
        .enumerate()
        .map(|(i, g)| Ok(&space.lift(g)?.expr * &space.p(i).expr))
        .collect::<Result<_, BracketError>>()?;
    let phi2 = Observable {
        expr: FieldExpr::sum(&terms).expect("nonempty"),
    };
    Ok(ConstraintSet {
        space,
        constraints: vec![phi1, phi2],
    })
}

impl ConstraintSet {
    pub fn new(space: PhaseSpace, constraints: Vec<Observable>) -> Result<Self, BracketError> {
        for c in &constraints {
            check_observable(&space, c)?;
        }
        Ok(ConstraintSet { space, constraints })
    }

    fn matrix(&self, z: &[f64]) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let grads: Vec<Vec<f64>> = self.constraints.iter().map(|c| c.gradient_at(z)).collect();
        let m = grads.len();
        let mut c = vec![vec![0.0; m]; m];
        for a in 0..m {
            for b in a + 1..m {
                let v = bracket_of_gradients(&grads[a], &grads[b]);
                c[a][b] = v;
                c[b][a] = -v;
            }
        }
        (c, grads)
    }

    /// Constraint matrix, its determinant and the second-class flag
    /// (`|det| ≥ 1e−10`).
    pub fn second_class_check(&self, z: &PhasePoint) -> Result<SecondClassReport, BracketError> {
        let m = self.constraints.len();
        if m % 2 != 0 {
            return Err(BracketError::OddConstraintCount(m));
        }
        let zz = check_point(&self.space, z)?;
        let (c, _) = self.matrix(&zz);
        let det = DMatrix::from_fn(m, m, |a, b| c[a][b]).determinant();
        Ok(SecondClassReport {
            matrix: c,
            det,
            second_class: det.abs() >= 1e-10,
        })
    }

    /// Numeric Dirac bracket at `z`.
    pub fn dirac_bracket(
        &self,
        a: &Observable,
        b: &Observable,
        z: &PhasePoint,
    ) -> Result<f64, BracketError> {
        check_observable(&self.space, a)?;
        check_observable(&self.space, b)?;
        let zz = check_point(&self.space, z)?;
        let inv = self.inverse_at(&zz)?;
        let ga = a.gradient_at(&zz);
        let gb = b.gradient_at(&zz);
        Ok(self.dirac_from_gradients(&ga, &gb, &inv.0, &inv.1))
    }

    /// Full Dirac-bracket tables `{xᵢ,xⱼ}_D`, `{xᵢ,pⱼ}_D`, `{pᵢ,pⱼ}_D` at `z`.
    pub fn dirac_tables(&self, z: &PhasePoint) -> Result<DiracTables, BracketError> {
        let zz = check_point(&self.space, z)?;
        let (delta, grads) = self.inverse_at(&zz)?;
        let n = self.space.dim();
        let unit = |k: usize| {
            let mut e = vec![0.0; 2 * n];
            e[k] = 1.0;
            e
        };
        let table = |off_a: usize, off_b: usize| -> Vec<Vec<f64>> {
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            self.dirac_from_gradients(
                                &unit(off_a + i),
                                &unit(off_b + j),
                                &delta,
                                &grads,
                            )
                        })
                        .collect()
                })
                .collect()
        };
        Ok(DiracTables {
            xx: table(0, 0),
            xp: table(0, n),
            pp: table(n, n),
        })
    }

    fn inverse_at(&self, z: &[f64]) -> Result<(DMatrix<f64>, Vec<Vec<f64>>), BracketError> {
        let (c, grads) = self.matrix(z);
        let m = c.len();
        let cm = DMatrix::from_fn(m, m, |a, b| c[a][b]);
        let lu = cm.clone().lu();
        let det = lu.determinant();
        let row_norms: f64 = c
            .iter()
            .map(|r| r.iter().map(|v| v * v).sum::<f64>().sqrt())
            .product();
        if !(det.abs() >= 1e-10 * row_norms) || row_norms == 0.0 {
            return Err(BracketError::SingularConstraintMatrix { det });
        }
        let inv = lu
            .try_inverse()
            .ok_or(BracketError::SingularConstraintMatrix { det })?;
        Ok((inv, grads))
    }

    fn dirac_from_gradients(
        &self,
        ga: &[f64],
        gb: &[f64],
        delta: &DMatrix<f64>,
        grads: &[Vec<f64>],
    ) -> f64 {
        let m = grads.len();
        let a_phi: Vec<f64> = grads.iter().map(|g| bracket_of_gradients(ga, g)).collect();
        let phi_b: Vec<f64> = grads.iter().map(|g| bracket_of_gradients(g, gb)).collect();
        let mut corr = 0.0;
        for p in 0..m {
            for q in 0..m {
                corr += a_phi[p] * delta[(p, q)] * phi_b[q];
            }
        }
        bracket_of_gradients(ga, gb) - corr
    }

    /// Dirac bracket as an observable, with `C⁻¹` built from cofactors.
    pub fn dirac_bracket_expr(
        &self,
        a: &Observable,
        b: &Observable,
    ) -> Result<Observable, BracketError> {
        check_observable(&self.space, a)?;
        check_observable(&self.space, b)?;
        let m = self.constraints.len();
        if m > 4 {
            return Err(BracketError::TooManyConstraints(m));
        }
        let zero = a.expr.lit(0.0);
        let mut c = vec![vec![zero.clone(); m]; m];
        for p in 0..m {
            for q in p + 1..m {
                let v = poisson_expr(&self.constraints[p], &self.constraints[q]).expr;
                c[q][p] = -&v;
                c[p][q] = v;
            }
        }
        let det = determinant_expr(&c);
        let a_phi: Vec<FieldExpr> = self
            .constraints
            .iter()
            .map(|phi| poisson_expr(a, phi).expr)
            .collect();
        let phi_b: Vec<FieldExpr> = self
            .constraints
            .iter()
            .map(|phi| poisson_expr(phi, b).expr)
            .collect();
        let mut terms = Vec::new();
        for p in 0..m {
            for q in 0..m {
                // Δ_pq = adj(C)_pq / det = cofactor_qp / det
                let cof = cofactor_expr(&c, q, p);
                if cof.is_zero() || a_phi[p].is_zero() || phi_b[q].is_zero() {
                    continue;
                }
                terms.push(&(&a_phi[p] * &cof) * &phi_b[q]);
            }
        }
        let base = poisson_expr(a, b).expr;
        let expr = match FieldExpr::sum(&terms) {
            Some(corr) => &base - &(&corr / &det),
            None => base,
        };
        Ok(Observable { expr })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiracTables {
    pub xx: Vec<Vec<f64>>,
    pub xp: Vec<Vec<f64>>,
    pub pp: Vec<Vec<f64>>,
}

fn minor(c: &[Vec<FieldExpr>], row: usize, col: usize) -> Vec<Vec<FieldExpr>> {
    c.iter()
        .enumerate()
        .filter(|(i, _)| *i != row)
        .map(|(_, r)| {
            r.iter()
                .enumerate()
                .filter(|(j, _)| *j != col)
                .map(|(_, e)| e.clone())
                .collect()
        })
        .collect()
}

fn determinant_expr(c: &[Vec<FieldExpr>]) -> FieldExpr {
    match c.len() {
        0 => unreachable!("empty matrix"),
        1 => c[0][0].clone(),
        _ => {
            let terms: Vec<FieldExpr> = (0..c.len())
                .filter(|&j| !c[0][j].is_zero())
                .map(|j| {
                    let t = &c[0][j] * &determinant_expr(&minor(c, 0, j));
                    if j % 2 == 0 {
                        t
                    } else {
                        -t
                    }
                })
                .collect();
            FieldExpr::sum(&terms).unwrap_or_else(|| c[0][0].lit(0.0))
        }
    }
}

fn cofactor_expr(c: &[Vec<FieldExpr>], row: usize, col: usize) -> FieldExpr {
    if c.len() == 1 {
        return c[0][0].lit(1.0);
    }
    let d = determinant_expr(&minor(c, row, col));
    if (row + col) % 2 == 0 {
        d
    } else {
        -d
    }
}

/// Coefficients `cᵢ = ½ Σⱼ ∂ⱼ(∂ᵢf ∂ⱼf / |∇f|²)` of the self-adjoint momenta
/// `p̃ᵢ = p̂ᵢ + iħ cᵢ`.
pub fn selfadjoint_correction(s: &SurfaceSpec, x: &[f64]) -> Result<Vec<f64>, BracketError> {
    let jet: NormalJet = s.normal_jet(x)?;
    let div = jet.div();
    Ok((0..s.dim())
        .map(|i| 0.5 * (jet.drift(i) + jet.n[i] * div))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere2() -> ConstraintSet {
        let s = SurfaceSpec::parse(&["x^2+y^2-1"], &["x", "y"]).unwrap();
        constraints_from_surface(&s).unwrap()
    }

    #[test]
    fn canonical_brackets() {
        let ps = PhaseSpace::new(&["x", "y"]).unwrap();
        let z = PhasePoint::new(vec![0.3, -0.2], vec![1.0, 2.0]);
        assert_eq!(poisson(&ps, &ps.x(0), &ps.p(0), &z).unwrap(), 1.0);
        assert_eq!(poisson(&ps, &ps.x(0), &ps.x(1), &z).unwrap(), 0.0);
        let phi1 = ps.parse("x^2+y^2").unwrap();
        let phi2 = ps.parse("x*p_x+y*p_y").unwrap();
        let z = PhasePoint::new(vec![1.0, 0.0], vec![0.3, 0.7]);
        assert_eq!(poisson(&ps, &phi1, &phi2, &z).unwrap(), 2.0);
    }

    #[test]
    fn constraints_of_simple_surfaces() {
        let s = SurfaceSpec::parse(&["y-x^2/2+1"], &["x", "y"]).unwrap();
        let c = constraints_from_surface(&s).unwrap();
        let z = PhasePoint::new(vec![0.7, 3.0], vec![2.0, 5.0]);
        assert!((c.constraints[1].eval(&z) - (-0.7 * 2.0 + 5.0)).abs() < 1e-15);

        let plane = SurfaceSpec::parse(&["z"], &["x", "y", "z"]).unwrap();
        let c = constraints_from_surface(&plane).unwrap();
        assert_eq!(c.constraints[1].expr.to_string(), "p_z");
    }

    #[test]
    fn second_class_sphere_and_copy() {
        let ps = PhaseSpace::new(&["x", "y"]).unwrap();
        let phi = vec![
            ps.parse("x^2+y^2-1").unwrap(),
            ps.parse("x*p_x+y*p_y").unwrap(),
        ];
        let c = ConstraintSet::new(ps, phi).unwrap();
        let z = PhasePoint::new(vec![1.0, 0.0], vec![0.0, 1.0]);
        let r = c.second_class_check(&z).unwrap();
        assert_eq!(r.matrix[0][1], 2.0);
        assert_eq!(r.det, 4.0);
        assert!(r.second_class);
        let derived = sphere2().second_class_check(&z).unwrap();
        assert_eq!(derived.matrix[0][1], 4.0);

        let dup = ConstraintSet::new(
            c.space.clone(),
            vec![c.constraints[0].clone(), c.constraints[0].clone()],
        )
        .unwrap();
        let r = dup.second_class_check(&z).unwrap();
        assert_eq!(r.det, 0.0);
        assert!(!r.second_class);
        assert!(matches!(
            dup.dirac_bracket(&c.space.x(0), &c.space.p(0), &z),
            Err(BracketError::SingularConstraintMatrix { .. })
        ));

        let odd = ConstraintSet::new(c.space.clone(), vec![c.constraints[0].clone()]).unwrap();
        assert_eq!(
            odd.second_class_check(&z),
            Err(BracketError::OddConstraintCount(1))
        );
    }

    #[test]
    fn sphere_dirac_tables() {
        let c = sphere2();
        let z = PhasePoint::new(vec![1.0, 0.0], vec![0.0, 1.0]);
        let t = c.dirac_tables(&z).unwrap();
        assert_eq!(t.xx, vec![vec![0.0, 0.0], vec![0.0, 0.0]]);
        assert_eq!(t.xp, vec![vec![0.0, 0.0], vec![0.0, 1.0]]);
        assert_eq!(t.pp[0][1], -1.0);
        assert_eq!(t.pp[1][0], 1.0);
    }

    #[test]
    fn symbolic_dirac_matches_numeric() {
        let c = sphere2();
        let a = c.space.parse("x*p_y^2+y").unwrap();
        let b = c.space.parse("p_x*y^2-x*p_y").unwrap();
        let z = PhasePoint::new(vec![0.6, 0.8], vec![-0.4, 0.3]);
        let d = c.dirac_bracket(&a, &b, &z).unwrap();
        let e = c.dirac_bracket_expr(&a, &b).unwrap().eval(&z);
        assert!((d - e).abs() < 1e-13);
    }

    #[test]
    fn selfadjoint_correction_examples() {
        let s = SurfaceSpec::parse(&["x^2+y^2+z^2-4"], &["x", "y", "z"]).unwrap();
        let x = [0.0, 1.2, 1.6];
        let c = selfadjoint_correction(&s, &x).unwrap();
        for i in 0..3 {
            assert!((c[i] - x[i] / 4.0).abs() < 1e-15);
        }
        let plane = SurfaceSpec::parse(&["z"], &["x", "y", "z"]).unwrap();
        assert_eq!(
            selfadjoint_correction(&plane, &[1.0, 2.0, 0.0]).unwrap(),
            vec![0.0; 3]
        );
    }
}
