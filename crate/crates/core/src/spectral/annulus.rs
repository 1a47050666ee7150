use crate::linalg::SymTridiagonal;

use super::effective::MIN_GRID;
use super::{
    sign_definite, transverse_energy, ModeLabel, SolverInfo, SpectralError, SpectrumResult,
};

/// Radial operator for `u = √r g` on `M` interior nodes of `[R−δ, R+δ]`:
/// `−½ u″ + (m² − ¼)/(2r²) u`.
fn radial_matrix(radius: f64, delta: f64, m: usize, nodes: usize, flat: bool) -> SymTridiagonal {
    let h = 2.0 * delta / (nodes + 1) as f64;
    let c = (m * m) as f64 - 0.25;
    let diag = (1..=nodes)
        .map(|i| {
            let r = radius - delta + h * i as f64;
            1.0 / (h * h) + if flat { 0.0 } else { c / (2.0 * r * r) }
        })
        .collect();
    SymTridiagonal::new(diag, vec![-0.5 / (h * h); nodes - 1])
}

/// `(4 λ(h/2) − λ(h))/3` from grids with `M` and `2M + 1` interior nodes.
fn richardson_ground(
    radius: f64,
    delta: f64,
    m: usize,
    nodes: usize,
    flat: bool,
) -> (f64, SymTridiagonal, f64) {
    let coarse = radial_matrix(radius, delta, m, nodes, flat).eigenvalue(0);
    let fine_t = radial_matrix(radius, delta, m, 2 * nodes + 1, flat);
    let fine = fine_t.eigenvalue(0);
    ((4.0 * fine - coarse) / 3.0, fine_t, fine)
}

/// Lowest Dirichlet eigenvalue for each `|m| ≤ m_max` of the free particle
/// in the annulus `R − δ < r < R + δ`.
///
/// The radial problem is discretized with `radial_grid` interior nodes and
/// again with `2·radial_grid + 1` (half the spacing); the reported value is
/// the Richardson combination of the two.
pub fn annulus_spectrum(
    radius: f64,
    delta: f64,
    m_max: usize,
    radial_grid: usize,
) -> Result<SpectrumResult, SpectralError> {
    if !(delta > 0.0 && delta < radius) {
        return Err(SpectralError::DeltaTooLarge { delta, radius });
    }
    if radial_grid < MIN_GRID {
        return Err(SpectralError::GridTooCoarse {
            grid: radial_grid,
            min: MIN_GRID,
        });
    }
    let mut eigenvalues = Vec::with_capacity(m_max + 1);
    let mut perron = true;
    for m in 0..=m_max {
        let (lam, fine_t, fine) = richardson_ground(radius, delta, m, radial_grid, false);
        perron &= sign_definite(&fine_t.eigenvector(fine), 1e-10);
        eigenvalues.push(lam);
    }
    let (flat, _, _) = richardson_ground(radius, delta, 0, radial_grid, true);
    Ok(SpectrumResult {
        problem: format!("annulus:R={radius}"),
        eigenvalues,
        labels: (0..=m_max).map(|m| ModeLabel::Angular { m }).collect(),
        solver: SolverInfo {
            grid_w: Some(radial_grid),
            delta: Some(delta),
            subtracted_energy: Some(transverse_energy(delta)),
            numeric_transverse_energy: Some(flat),
            ground_state_sign_definite: Some(perron),
            ..SolverInfo::default()
        },
        scheme: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thin_annulus_matches_curve_levels() {
        let r = annulus_spectrum(1.0, 0.05, 2, 400).unwrap();
        let sub = r.subtracted().unwrap();
        assert!((sub[0] + 0.125).abs() < 5e-3, "{}", sub[0]);
        assert!((sub[2] - 1.875).abs() < 2e-2, "{}", sub[2]);
        let e = r.solver.subtracted_energy.unwrap();
        assert!((r.solver.numeric_transverse_energy.unwrap() - e).abs() < 1e-6 * e);
        assert_eq!(r.solver.ground_state_sign_definite, Some(true));
    }

    #[test]
    fn deviation_shrinks_with_delta() {
        for m in 0..=3usize {
            let target = (m * m) as f64 / 2.0 - 0.125;
            let dev: Vec<f64> = [0.1, 0.05, 0.025]
                .iter()
                .map(|&d| {
                    (annulus_spectrum(1.0, d, m, 400)
                        .unwrap()
                        .subtracted()
                        .unwrap()[m]
                        - target)
                        .abs()
                })
                .collect();
            assert!(dev[0] > dev[1] && dev[1] > dev[2], "m = {m}: {dev:?}");
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            annulus_spectrum(1.0, 1.0, 0, 100),
            Err(SpectralError::DeltaTooLarge { .. })
        ));
        assert!(matches!(
            annulus_spectrum(1.0, 0.1, 0, 4),
            Err(SpectralError::GridTooCoarse { .. })
        ));
    }
}
