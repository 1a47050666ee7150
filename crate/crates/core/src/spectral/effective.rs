use crate::linalg::{folded_ring_order, BandedSym, EigenOptions};
use crate::potentials::SchemeId;

use super::{sign_definite, ModeLabel, PlanarCurve, SolverInfo, SpectralError, SpectrumResult};

pub(crate) const MIN_GRID: usize = 16;

/// Potential along the curve for the schemes that have a 1D reduction.
pub(crate) fn curve_potential(scheme: SchemeId, k: f64) -> Result<f64, SpectralError> {
    match scheme {
        SchemeId::Curve | SchemeId::ThinLayer => Ok(-k * k / 8.0),
        SchemeId::Podolsky | SchemeId::Conversion => Ok(0.0),
        other => Err(SpectralError::UnsupportedScheme {
            scheme: other,
            reason: "curve spectra exist for curve, thin_layer, podolsky and conversion".into(),
        }),
    }
}

/// Lowest `count` eigenvalues of `−½ χ″ + V(s) χ` on the closed curve,
/// second-order central differences on `grid` uniform arclength nodes.
pub fn curve_effective_spectrum(
    c: &PlanarCurve,
    scheme: SchemeId,
    grid: usize,
    count: usize,
) -> Result<SpectrumResult, SpectralError> {
    if grid < MIN_GRID {
        return Err(SpectralError::GridTooCoarse {
            grid,
            min: MIN_GRID,
        });
    }
    let ds = c.length() / grid as f64;
    let v = c
        .sample_curvature(grid, 0.0)
        .into_iter()
        .map(|k| curve_potential(scheme, k))
        .collect::<Result<Vec<_>, _>>()?;

    let pos = folded_ring_order(grid);
    let mut a = BandedSym::zeros(grid, 2);
    let kin = 0.5 / (ds * ds);
    for i in 0..grid {
        let j = (i + 1) % grid;
        a.add(pos[i], pos[i], 2.0 * kin + v[i]);
        a.add(pos[i], pos[j], -kin);
    }
    let vmin = v.iter().cloned().fold(f64::INFINITY, f64::min);
    let pairs = a.lowest_eigenpairs(count, vmin - 0.1, &EigenOptions::default())?;
    let ground = &pairs.vectors[0];

    Ok(SpectrumResult {
        problem: format!("curve:{}", c.label()),
        labels: (0..count).map(|index| ModeLabel::Band { index }).collect(),
        eigenvalues: pairs.values,
        solver: SolverInfo {
            grid_s: Some(grid),
            iterations: Some(pairs.iterations),
            max_residual: Some(pairs.max_residual),
            ground_state_sign_definite: Some(sign_definite(ground, 1e-10)),
            ..SolverInfo::default()
        },
        scheme: Some(scheme),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_levels() {
        let c = PlanarCurve::circle(1.0).unwrap();
        let r = curve_effective_spectrum(&c, SchemeId::Curve, 512, 5).unwrap();
        let exact = [-0.125, 0.375, 0.375, 1.875, 1.875];
        // the m = 2 pair carries the O(m⁴ ds²/24) = 1.0e-4 truncation error
        for (i, (v, e)) in r.eigenvalues.iter().zip(exact).enumerate() {
            let tol = if i < 3 { 1e-5 } else { 1.1e-4 };
            assert!((v - e).abs() < tol, "{i}: {v} vs {e}");
        }
        assert_eq!(r.solver.ground_state_sign_definite, Some(true));
        let p = curve_effective_spectrum(&c, SchemeId::Podolsky, 512, 3).unwrap();
        assert!(p.eigenvalues[0].abs() < 1e-10 && (p.eigenvalues[2] - 0.5).abs() < 1e-4);
    }

    #[test]
    fn rejects_coarse_grid_and_unknown_scheme() {
        let c = PlanarCurve::circle(1.0).unwrap();
        assert_eq!(
            curve_effective_spectrum(&c, SchemeId::Curve, 8, 2),
            Err(SpectralError::GridTooCoarse { grid: 8, min: 16 })
        );
        assert!(matches!(
            curve_effective_spectrum(&c, SchemeId::DiracRaw, 64, 2),
            Err(SpectralError::UnsupportedScheme { .. })
        ));
    }

    #[test]
    fn ellipse_second_order_self_convergence() {
        let e = PlanarCurve::ellipse(1.0, 0.6).unwrap();
        let lam: Vec<Vec<f64>> = [128, 256, 512]
            .iter()
            .map(|&n| {
                curve_effective_spectrum(&e, SchemeId::Curve, n, 4)
                    .unwrap()
                    .eigenvalues
            })
            .collect();
        for i in [0, 1, 3] {
            let order = ((lam[1][i] - lam[0][i]) / (lam[2][i] - lam[1][i]))
                .abs()
                .log2();
            assert!((1.8..2.2).contains(&order), "mode {i}: order {order}");
        }
    }
}
