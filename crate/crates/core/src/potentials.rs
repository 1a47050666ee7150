//! Geometric quantum potentials of the competing quantization schemes.
//!
//! Units are `ħ = m = 1`; [`PotentialReport::scaled`] restores a factor
//! `ħ²`. Every report carries the intermediate quantities it was computed
//! from in `diagnostics`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fieldexpr::FieldExpr;
use crate::geometry::{CurvatureFrame, GeometryError, NormalJet, SurfaceSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeId {
    DiracRaw,
    DiracDistance,
    Podolsky,
    Fujii,
    ThinLayer,
    Curve,
    FlatBundle,
    ParaboloidClosedForm,
    Conversion,
}

impl SchemeId {
    pub const ALL: [SchemeId; 9] = [
        SchemeId::DiracRaw,
        SchemeId::DiracDistance,
        SchemeId::Podolsky,
        SchemeId::Fujii,
        SchemeId::ThinLayer,
        SchemeId::Curve,
        SchemeId::FlatBundle,
        SchemeId::ParaboloidClosedForm,
        SchemeId::Conversion,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchemeId::DiracRaw => "dirac_raw",
            SchemeId::DiracDistance => "dirac_distance",
            SchemeId::Podolsky => "podolsky",
            SchemeId::Fujii => "fujii",
            SchemeId::ThinLayer => "thin_layer",
            SchemeId::Curve => "curve",
            SchemeId::FlatBundle => "flat_bundle",
            SchemeId::ParaboloidClosedForm => "paraboloid_closed_form",
            SchemeId::Conversion => "conversion",
        }
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown scheme `{0}`")]
pub struct UnknownScheme(pub String);

impl FromStr for SchemeId {
    type Err = UnknownScheme;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SchemeId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| UnknownScheme(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialReport {
    pub scheme: SchemeId,
    pub value: f64,
    pub point: Vec<f64>,
    pub diagnostics: BTreeMap<String, f64>,
}

impl PotentialReport {
    fn new(scheme: SchemeId, value: f64, point: &[f64]) -> Self {
        PotentialReport {
            scheme,
            value,
            point: point.to_vec(),
            diagnostics: BTreeMap::new(),
        }
    }

    fn diag(mut self, key: &str, value: f64) -> Self {
        self.diagnostics.insert(key.to_string(), value);
        self
    }

    /// Multiply by `ħ²`.
    pub fn scaled(mut self, hbar: f64) -> Self {
        self.value *= hbar * hbar;
        self.diagnostics.insert("hbar".into(), hbar);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PotentialError {
    #[error("the two forms of the Dirac potential disagree: {potential_form} vs {normal_form}")]
    FormMismatch {
        potential_form: f64,
        normal_form: f64,
    },
    #[error("scheme {scheme} is not available here: {reason}")]
    UnsupportedScheme { scheme: SchemeId, reason: String },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Dirac-scheme potential of a hypersurface in the representation `f`
/// it is given in.
///
/// The potential is built symbolically from
///
/// ```text
/// V = −⅛ Σᵢ Aᵢ² + ¼ Σᵢ (∂ᵢ − Σₖ Pᵢₖ ∂ₖ) Aᵢ,   Pᵢⱼ = ∂ᵢf ∂ⱼf / |∇f|²,  Aᵢ = Σⱼ ∂ⱼ Pᵢⱼ
/// ```
///
/// and cross-checked at every evaluation against the normal-vector form
///
/// ```text
/// V = ¼ (½ (div n)² + Σᵢₖ ∂ᵢ(nₖ ∂ₖ nᵢ) − ½ Σᵢₖₘ nᵢ nₖ nₘ ∂ₖ∂ₘ nᵢ)
/// ```
///
/// evaluated from the numeric jet of `n`. Both reduce to
/// `⅛ (div n)² + ¼ div(n·∇n) + ⅛ |n·∇n|²`.
#[derive(Debug, Clone)]
pub struct DiracRawPotential {
    surface: SurfaceSpec,
    expr: FieldExpr,
}

/// Relative tolerance for agreement of the two forms.
pub const FORM_TOLERANCE: f64 = 1e-8;

impl DiracRawPotential {
    pub fn new(surface: &SurfaceSpec) -> Result<Self, PotentialError> {
        surface.require_hypersurface()?;
        let n = surface.dim();
        let g = surface.grad_exprs(0);
        let q = FieldExpr::sum(&g.iter().map(|c| c.square()).collect::<Vec<_>>()).expect("n ≥ 2");
        let proj: Vec<Vec<FieldExpr>> = (0..n)
            .map(|i| (0..n).map(|j| &(&g[i] * &g[j]) / &q).collect())
            .collect();
        let a: Vec<FieldExpr> = (0..n)
            .map(|i| {
                FieldExpr::sum(&(0..n).map(|j| proj[i][j].diff(j)).collect::<Vec<_>>())
                    .expect("n ≥ 2")
            })
            .collect();
        let mut terms = Vec::with_capacity(2 * n);
        for i in 0..n {
            terms.push(-0.125 * &a[i].square());
            let mut d = a[i].diff(i);
            for k in 0..n {
                d = &d - &(&proj[i][k] * &a[i].diff(k));
            }
            terms.push(0.25 * &d);
        }
        let expr = FieldExpr::sum(&terms).expect("n ≥ 2");
        Ok(DiracRawPotential {
            surface: surface.clone(),
            expr,
        })
    }

    /// The symbolic potential.
    pub fn expr(&self) -> &FieldExpr {
        &self.expr
    }

    pub fn eval(&self, x: &[f64]) -> Result<PotentialReport, PotentialError> {
        self.surface.check_on_surface(x)?;
        let jet = self.surface.normal_jet(x)?;
        let v1 = self.expr.eval(x);
        let v2 = normal_form(&jet);
        let gap = (v1 - v2).abs();
        if !(gap <= FORM_TOLERANCE * (1.0 + v1.abs().max(v2.abs()))) {
            return Err(PotentialError::FormMismatch {
                potential_form: v1,
                normal_form: v2,
            });
        }
        let drift2: f64 = (0..jet.dim()).map(|i| jet.drift(i).powi(2)).sum();
        Ok(PotentialReport::new(SchemeId::DiracRaw, v2, x)
            .diag("form_potential", v1)
            .diag("form_normal", v2)
            .diag("form_gap", gap)
            .diag("div_n", jet.div())
            .diag("grad_norm", jet.grad_norm)
            .diag("drift_sq", drift2)
            .diag("div_drift", jet.div_drift()))
    }
}

/// `¼ (½ (div n)² + Σ ∂ᵢ(nₖ∂ₖnᵢ) − ½ Σ nᵢnₖnₘ ∂ₖ∂ₘnᵢ)`
pub fn normal_form(jet: &NormalJet) -> f64 {
    let d = jet.dim();
    let mut cubic = 0.0;
    for i in 0..d {
        for k in 0..d {
            for m in 0..d {
                cubic += jet.n[i] * jet.n[k] * jet.n[m] * jet.ddn(i, k, m);
            }
        }
    }
    0.25 * (0.5 * jet.div().powi(2) + jet.div_drift() - 0.5 * cubic)
}

/// Dirac-scheme potential of `f` as given, see [`DiracRawPotential`].
pub fn vq_dirac_raw(s: &SurfaceSpec, x: &[f64]) -> Result<PotentialReport, PotentialError> {
    DiracRawPotential::new(s)?.eval(x)
}

/// Dirac-scheme potential in the distance representation: `(Σk)²/8`.
pub fn vq_dirac_distance(frame: &CurvatureFrame) -> PotentialReport {
    let sum = mean_curvature_sum(frame);
    PotentialReport::new(SchemeId::DiracDistance, sum * sum / 8.0, &frame.point).diag("sum_k", sum)
}

fn mean_curvature_sum(frame: &CurvatureFrame) -> f64 {
    if frame.principal_curvatures.is_empty() {
        frame.mean_div.first().copied().unwrap_or(0.0)
    } else {
        frame.principal_curvatures.iter().sum()
    }
}

fn sums(k: &[f64]) -> (f64, f64) {
    (k.iter().sum(), k.iter().map(|v| v * v).sum())
}

/// Tangent-paraboloid closed form `((Σk)² + 2Σk²)/8`.
pub fn vq_paraboloid(k: &[f64]) -> PotentialReport {
    let (s, s2) = sums(k);
    PotentialReport::new(
        SchemeId::ParaboloidClosedForm,
        (s * s + 2.0 * s2) / 8.0,
        &[],
    )
    .diag("sum_k", s)
    .diag("sum_k_sq", s2)
}

/// Fujii's extra terms `¼ Σᵢ ∂ᵢ(nⱼ∂ⱼnᵢ) − ⅛ Σᵢ (Σⱼ nⱼ∂ⱼnᵢ)²`.
///
/// The diagnostic `consistency_gap` is `|V_raw − (div n)²/8 − extra|`,
/// which equals `¼ |n·∇n|²` and so vanishes only where the normal field
/// has no drift along itself.
pub fn fujii_extra(s: &SurfaceSpec, x: &[f64]) -> Result<PotentialReport, PotentialError> {
    s.require_hypersurface()?;
    s.check_on_surface(x)?;
    let jet = s.normal_jet(x)?;
    let drift2: f64 = (0..jet.dim()).map(|i| jet.drift(i).powi(2)).sum();
    let extra = 0.25 * jet.div_drift() - 0.125 * drift2;
    let div = jet.div();
    let raw = normal_form(&jet);
    Ok(PotentialReport::new(SchemeId::Fujii, extra, x)
        .diag("div_n", div)
        .diag("dirac_raw", raw)
        .diag("drift_sq", drift2)
        .diag("consistency_gap", (raw - div * div / 8.0 - extra).abs()))
}

/// Thin-layer potential `((Σk)² − 2Σk²)/8`; for two curvatures the
/// da Costa form `−(k₁−k₂)²/8` is reported alongside.
pub fn vq_thin_layer(k: &[f64]) -> PotentialReport {
    let (s, s2) = sums(k);
    let value = (s * s - 2.0 * s2) / 8.0;
    let mut r = PotentialReport::new(SchemeId::ThinLayer, value, &[])
        .diag("sum_k", s)
        .diag("sum_k_sq", s2);
    if let [k1, k2] = k {
        let dc = -(k1 - k2).powi(2) / 8.0;
        r = r
            .diag("da_costa", dc)
            .diag("da_costa_gap", (value - dc).abs());
    }
    r
}

/// Thin-layer potential of a curve, `−k²/8`.
pub fn vq_curve(k: f64) -> PotentialReport {
    PotentialReport::new(SchemeId::Curve, -k * k / 8.0, &[]).diag("k", k)
}

/// Thin-layer reduction performed in stages: each entry lists the principal
/// curvatures of one stage inside the space left by the previous ones, and
/// the stage potentials add up.
pub fn vq_thin_layer_sequential(stages: &[Vec<f64>]) -> PotentialReport {
    let mut total = 0.0;
    let mut r = PotentialReport::new(SchemeId::ThinLayer, 0.0, &[]);
    for (i, k) in stages.iter().enumerate() {
        let v = vq_thin_layer(k).value;
        r = r.diag(&format!("stage_{i}"), v);
        total += v;
    }
    r.value = total;
    r.diag("stages", stages.len() as f64)
}

/// A straight line in `ℝ³` reached through a cylinder of radius `R`:
/// cylinder `k = (1/R, 0)`, then a generator of the cylinder (`k = 0`).
pub fn vq_cylinder_then_line(radius: f64) -> PotentialReport {
    vq_thin_layer_sequential(&[vec![1.0 / radius, 0.0], vec![0.0]]).diag("radius", radius)
}

/// Flat-normal-bundle potential `Σₐ (div n⁽ᵃ⁾)²/8`.
///
/// Flatness of the normal bundle is assumed, not checked.
pub fn vq_flat_bundle(frame: &CurvatureFrame) -> PotentialReport {
    let mut r = PotentialReport::new(
        SchemeId::FlatBundle,
        frame.mean_div.iter().map(|d| d * d).sum::<f64>() / 8.0,
        &frame.point,
    );
    for (a, d) in frame.mean_div.iter().enumerate() {
        r = r.diag(&format!("div_n{a}"), *d);
    }
    r
}

/// Schemes without a geometric potential (Podolsky, abelian conversion).
pub fn vq_zero(scheme: SchemeId, point: &[f64]) -> PotentialReport {
    PotentialReport::new(scheme, 0.0, point)
}

/// Evaluate `scheme` for a surface at an on-surface point.
pub fn evaluate_scheme(
    scheme: SchemeId,
    s: &SurfaceSpec,
    x: &[f64],
) -> Result<PotentialReport, PotentialError> {
    let with_point = |mut r: PotentialReport| {
        r.point = x.to_vec();
        r
    };
    match scheme {
        SchemeId::DiracRaw => vq_dirac_raw(s, x),
        SchemeId::Fujii => fujii_extra(s, x),
        SchemeId::Podolsky | SchemeId::Conversion => {
            s.check_on_surface(x)?;
            Ok(vq_zero(scheme, x))
        }
        SchemeId::FlatBundle => {
            s.check_on_surface(x)?;
            Ok(vq_flat_bundle(&s.orthonormal_frame(x)?))
        }
        SchemeId::DiracDistance
        | SchemeId::ThinLayer
        | SchemeId::ParaboloidClosedForm
        | SchemeId::Curve => {
            if s.codim() != 1 {
                return Err(PotentialError::UnsupportedScheme {
                    scheme,
                    reason: "needs a hypersurface".into(),
                });
            }
            let frame = s.shape_spectrum(x)?;
            let k = &frame.principal_curvatures;
            Ok(match scheme {
                SchemeId::DiracDistance => vq_dirac_distance(&frame),
                SchemeId::ThinLayer => with_point(vq_thin_layer(k)),
                SchemeId::ParaboloidClosedForm => with_point(vq_paraboloid(k)),
                _ => {
                    if k.len() != 1 {
                        return Err(PotentialError::UnsupportedScheme {
                            scheme,
                            reason: "needs a planar curve".into(),
                        });
                    }
                    with_point(vq_curve(k[0]))
                }
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn surf(src: &str, coords: &[&str]) -> SurfaceSpec {
        SurfaceSpec::parse(&[src], coords).unwrap()
    }

    #[test]
    fn scheme_names_round_trip() {
        for id in SchemeId::ALL {
            assert_eq!(id.name().parse::<SchemeId>().unwrap(), id);
            let json = serde_json::to_string(&id).unwrap();
            assert_eq!(json, format!("\"{}\"", id.name()));
            assert_eq!(serde_json::from_str::<SchemeId>(&json).unwrap(), id);
        }
        assert!("dirac".parse::<SchemeId>().is_err());
    }

    #[test]
    fn parabola_vertex_gives_three_eighths() {
        let s = surf("y-x^2/2+1", &["x", "y"]);
        let r = vq_dirac_raw(&s, &[0.0, -1.0]).unwrap();
        assert!((r.value - 0.375).abs() < 1e-12);
        assert!((r.diagnostics["div_n"] + 1.0).abs() < 1e-12);
        let f = fujii_extra(&s, &[0.0, -1.0]).unwrap();
        assert!((f.value - 0.25).abs() < 1e-12);
    }

    #[test]
    fn distance_circle_and_sphere() {
        let c = surf("sqrt(x^2+y^2)-1", &["x", "y"]);
        assert!((vq_dirac_raw(&c, &[0.6, 0.8]).unwrap().value - 0.125).abs() < 1e-12);
        let s = surf("sqrt(x^2+y^2+z^2)-1", &["x", "y", "z"]);
        assert!((vq_dirac_raw(&s, &[0.0, 0.6, 0.8]).unwrap().value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn raw_sphere_depends_only_on_normal_field() {
        let s = surf("x^2+y^2+z^2-1", &["x", "y", "z"]);
        let r = vq_dirac_raw(&s, &[0.0, 0.0, 1.0]).unwrap();
        assert!((r.value - 0.5).abs() < 1e-12);
        assert!(fujii_extra(&s, &[0.0, 0.0, 1.0]).unwrap().value.abs() < 1e-12);
    }

    #[test]
    fn paraboloid_representation_of_unit_sphere() {
        let s = surf("z-x^2/2-y^2/2", &["x", "y", "z"]);
        let r = vq_dirac_raw(&s, &[0.0, 0.0, 0.0]).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        assert!((vq_paraboloid(&[1.0, 1.0]).value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn off_surface_rejected() {
        let s = surf("x^2+y^2-1", &["x", "y"]);
        assert!(matches!(
            vq_dirac_raw(&s, &[1.5, 0.0]),
            Err(PotentialError::Geometry(GeometryError::OffSurface { .. }))
        ));
    }

    #[test]
    fn closed_forms() {
        assert_eq!(vq_thin_layer(&[1.0, 1.0]).value, 0.0);
        assert_eq!(vq_thin_layer(&[1.0]).value, -0.125);
        assert_eq!(vq_thin_layer(&[1.0, 1.0, 1.0]).value, 0.375);
        assert_eq!(vq_curve(1.0).value, -0.125);
        assert_eq!(vq_curve(0.0).value, 0.0);
        assert_eq!(vq_cylinder_then_line(2.0).value, -1.0 / 32.0);
        let r = vq_thin_layer(&[0.3, -1.7]);
        assert!(r.diagnostics["da_costa_gap"] < 1e-15);
        assert_eq!(
            vq_dirac_distance(&CurvatureFrame::from_curvatures(&[1.0, 1.0])).value,
            0.5
        );
        assert_eq!(
            vq_dirac_distance(&CurvatureFrame::from_curvatures(&[1.0])).value,
            0.125
        );
        assert_eq!(vq_paraboloid(&[1.0]).value, 0.375);
        assert_eq!(vq_zero(SchemeId::Podolsky, &[]).scaled(2.0).value, 0.0);
        assert_eq!(vq_curve(1.0).scaled(2.0).value, -0.5);
    }

    #[test]
    fn flat_bundle_examples() {
        let s = SurfaceSpec::parse(&["x^2+y^2-1", "z"], &["x", "y", "z"]).unwrap();
        let r = evaluate_scheme(SchemeId::FlatBundle, &s, &[1.0, 0.0, 0.0]).unwrap();
        assert!((r.value - 0.125).abs() < 1e-15);
        let one = surf("x^2+y^2+z^2-1", &["x", "y", "z"]);
        let f = one.orthonormal_frame(&[0.0, 0.0, 1.0]).unwrap();
        assert!((vq_flat_bundle(&f).value - vq_dirac_distance(&f).value).abs() < 1e-15);
    }
}
