//! Spectra of constrained and thin-layer Hamiltonians.
//!
//! Closed-form ladders on spheres, the effective operator `−½ d²/ds² + V(s)`
//! on closed planar curves, and Dirichlet solvers for a layer of half-width
//! `δ` around a circle (radial) or around an arbitrary closed curve (tube
//! coordinates). Thin-layer values are reported both raw and with the
//! transverse energy `π²/(8δ²)` subtracted.

mod annulus;
mod curve;
mod effective;
mod sweep;
mod tube;

pub use annulus::annulus_spectrum;
pub use curve::PlanarCurve;
pub use effective::curve_effective_spectrum;
pub use sweep::{delta_sweep, ConvergenceRow, ConvergenceTable, SweepProblem};
pub use tube::tube_band_spectrum;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::LinalgError;
use crate::potentials::SchemeId;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("scheme `{scheme}` is not supported here: {reason}")]
    UnsupportedScheme { scheme: SchemeId, reason: String },
    #[error("grid {grid} is too coarse (minimum {min})")]
    GridTooCoarse { grid: usize, min: usize },
    #[error("layer half-width {delta} must be positive and below the radius {radius}")]
    DeltaTooLarge { delta: f64, radius: f64 },
    #[error("tube chart is singular: δ·max|k| = {product} ≥ 0.9")]
    ChartSingular { product: f64 },
    #[error("layer folds over: 1 + εk = {factor} ≤ 0 for curvature #{index}")]
    FoldOver { index: usize, factor: f64 },
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// What an eigenvalue belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModeLabel {
    /// spherical harmonic degree `l` of the given multiplicity
    Harmonic { l: usize, multiplicity: usize },
    /// angular momentum `|m|` of a rotationally symmetric layer
    Angular { m: usize },
    /// position in the ascending list
    Band { index: usize },
}

/// Discretization data attached to a spectrum.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolverInfo {
    pub grid_s: Option<usize>,
    pub grid_w: Option<usize>,
    pub delta: Option<f64>,
    /// `π²/(8δ²)`, present exactly for thin-layer solves
    pub subtracted_energy: Option<f64>,
    pub numeric_transverse_energy: Option<f64>,
    pub iterations: Option<usize>,
    pub max_residual: Option<f64>,
    pub ground_state_sign_definite: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub problem: String,
    pub eigenvalues: Vec<f64>,
    pub labels: Vec<ModeLabel>,
    pub solver: SolverInfo,
    pub scheme: Option<SchemeId>,
}

impl SpectrumResult {
    /// Eigenvalues minus the transverse energy, for thin-layer solves.
    pub fn subtracted(&self) -> Option<Vec<f64>> {
        self.solver
            .subtracted_energy
            .map(|e| self.eigenvalues.iter().map(|v| v - e).collect())
    }
}

/// Ground energy `π²/(8δ²)` of `−½ d²/dw²` on `[−δ, δ]` with Dirichlet ends.
pub fn transverse_energy(delta: f64) -> f64 {
    std::f64::consts::PI.powi(2) / (8.0 * delta * delta)
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Dimension of the degree-`l` spherical harmonics on `S^{n−1}`.
pub fn harmonic_multiplicity(n: usize, l: usize) -> usize {
    let top = binomial(l + n - 1, n - 1);
    if l >= 2 {
        top - binomial(l + n - 3, n - 1)
    } else {
        top
    }
}

/// Constant shift added to `−½Δ` on the sphere of radius `r` in `ℝⁿ`.
pub fn sphere_shift(n: usize, r: f64, scheme: SchemeId) -> Result<f64, SpectralError> {
    let nf = n as f64;
    let r2 = r * r;
    Ok(match scheme {
        SchemeId::DiracDistance => (nf - 1.0).powi(2) / (8.0 * r2),
        SchemeId::DiracRaw => (nf * nf - 1.0) / (8.0 * r2),
        SchemeId::Podolsky | SchemeId::Conversion => 0.0,
        SchemeId::ThinLayer => (nf - 1.0) * (nf - 3.0) / (8.0 * r2),
        other => {
            return Err(SpectralError::UnsupportedScheme {
                scheme: other,
                reason: "sphere ladders exist for dirac_distance, dirac_raw, podolsky, thin_layer and conversion"
                    .into(),
            })
        }
    })
}

/// `l(l+n−2)/(2R²) + shift` for `l = 0..=l_max`, each repeated by its
/// multiplicity.
pub fn sphere_spectrum(
    n: usize,
    r: f64,
    scheme: SchemeId,
    l_max: usize,
) -> Result<SpectrumResult, SpectralError> {
    if n < 2 || !(r > 0.0) || !r.is_finite() {
        return Err(SpectralError::InvalidParameter(format!(
            "need n ≥ 2 and R > 0, got n = {n}, R = {r}"
        )));
    }
    let shift = sphere_shift(n, r, scheme)?;
    let mut eigenvalues = Vec::new();
    let mut labels = Vec::new();
    for l in 0..=l_max {
        let lam = (l * (l + n - 2)) as f64 / (2.0 * r * r) + shift;
        let multiplicity = harmonic_multiplicity(n, l);
        for _ in 0..multiplicity {
            eigenvalues.push(lam);
            labels.push(ModeLabel::Harmonic { l, multiplicity });
        }
    }
    Ok(SpectrumResult {
        problem: format!("sphere:n={n},R={r}"),
        eigenvalues,
        labels,
        solver: SolverInfo::default(),
        scheme: Some(scheme),
    })
}

/// Exact area ratio `Π(1 + εkₐ)` of a parallel layer and its second-order
/// expansion `1 + εΣk + ½ε²((Σk)² − Σk²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AreaRatio {
    pub exact: f64,
    pub expansion: f64,
}

impl AreaRatio {
    pub fn gap(&self) -> f64 {
        (self.exact - self.expansion).abs()
    }
}

pub fn area_ratio(k: &[f64], eps: f64) -> Result<AreaRatio, SpectralError> {
    let mut exact = 1.0;
    for (index, ka) in k.iter().enumerate() {
        let factor = 1.0 + eps * ka;
        if !(factor > 0.0) {
            return Err(SpectralError::FoldOver { index, factor });
        }
        exact *= factor;
    }
    let s: f64 = k.iter().sum();
    let s2: f64 = k.iter().map(|v| v * v).sum();
    Ok(AreaRatio {
        exact,
        expansion: 1.0 + eps * s + 0.5 * eps * eps * (s * s - s2),
    })
}

/// `true` if all entries share one sign up to `tol · max|v|`.
pub(crate) fn sign_definite(v: &[f64], tol: f64) -> bool {
    let scale = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let floor = tol * scale;
    v.iter().all(|&x| x >= -floor) || v.iter().all(|&x| x <= floor)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiplicities() {
        assert_eq!(
            (0..4)
                .map(|l| harmonic_multiplicity(2, l))
                .collect::<Vec<_>>(),
            [1, 2, 2, 2]
        );
        assert_eq!(
            (0..4)
                .map(|l| harmonic_multiplicity(3, l))
                .collect::<Vec<_>>(),
            [1, 3, 5, 7]
        );
        assert_eq!(
            (0..3)
                .map(|l| harmonic_multiplicity(4, l))
                .collect::<Vec<_>>(),
            [1, 4, 9]
        );
    }

    #[test]
    fn sphere_ladders() {
        let p = sphere_spectrum(2, 1.0, SchemeId::Podolsky, 2).unwrap();
        assert_eq!(p.eigenvalues, [0.0, 0.5, 0.5, 2.0, 2.0]);
        let t = sphere_spectrum(2, 1.0, SchemeId::ThinLayer, 2).unwrap();
        assert_eq!(t.eigenvalues, [-0.125, 0.375, 0.375, 1.875, 1.875]);
        let d = sphere_spectrum(3, 1.0, SchemeId::DiracDistance, 2).unwrap();
        assert_eq!(d.eigenvalues[0], 0.5);
        assert_eq!(d.eigenvalues[1..4], [1.5; 3]);
        assert_eq!(d.eigenvalues.len(), 9);
        let tl = sphere_spectrum(3, 1.0, SchemeId::ThinLayer, 3).unwrap();
        let pd = sphere_spectrum(3, 1.0, SchemeId::Podolsky, 3).unwrap();
        assert_eq!(tl.eigenvalues, pd.eigenvalues);
        assert!(matches!(
            sphere_spectrum(3, 1.0, SchemeId::Fujii, 1),
            Err(SpectralError::UnsupportedScheme { .. })
        ));
        assert!(sphere_spectrum(3, 0.0, SchemeId::Podolsky, 1).is_err());
    }

    #[test]
    fn area_ratio_examples() {
        let a = area_ratio(&[1.0, 1.0], 0.1).unwrap();
        assert!((a.exact - 1.21).abs() < 1e-15 && a.gap() < 1e-15);
        let a = area_ratio(&[2.0], 0.1).unwrap();
        assert!((a.exact - 1.2).abs() < 1e-15 && a.gap() < 1e-15);
        let a = area_ratio(&[1.0, 2.0, 3.0], 0.1).unwrap();
        assert!((a.exact - 1.716).abs() < 1e-14);
        assert!((a.expansion - 1.71).abs() < 1e-14);
        assert!((a.gap() - 0.006).abs() < 1e-14);
        assert!(matches!(
            area_ratio(&[1.0, -20.0], 0.1),
            Err(SpectralError::FoldOver { index: 1, .. })
        ));
    }
}
