use std::f64::consts::PI;

use crate::linalg::{folded_ring_order, gauss_legendre, jacobi_eigen, BandedSym, EigenOptions};

use super::effective::MIN_GRID;
use super::{
    sign_definite, transverse_energy, ModeLabel, PlanarCurve, SolverInfo, SpectralError,
    SpectrumResult,
};

/// Fourth-order staggered first derivative at `s_{i+½}`: node offsets and
/// weights (to be divided by `Δs`).
const STENCIL: [(isize, f64); 4] = [
    (-1, 1.0 / 24.0),
    (0, -27.0 / 24.0),
    (1, 27.0 / 24.0),
    (2, -1.0 / 24.0),
];

/// Transverse sine modes `χⱼ(w) = sin(jπ(w+δ)/(2δ))/√δ` and `χⱼ′` at the
/// quadrature nodes, `[j][q]`.
struct SineModes {
    w: Vec<f64>,
    wt: Vec<f64>,
    chi: Vec<Vec<f64>>,
    dchi: Vec<Vec<f64>>,
}

impl SineModes {
    fn new(delta: f64, modes: usize) -> Self {
        let (w, wt) = gauss_legendre((8 * modes).max(64), -delta, delta);
        let norm = delta.sqrt();
        let freq = |j: usize| (j + 1) as f64 * PI / (2.0 * delta);
        let chi = (0..modes)
            .map(|j| {
                w.iter()
                    .map(|&x| (freq(j) * (x + delta)).sin() / norm)
                    .collect()
            })
            .collect();
        let dchi = (0..modes)
            .map(|j| {
                w.iter()
                    .map(|&x| freq(j) * (freq(j) * (x + delta)).cos() / norm)
                    .collect()
            })
            .collect();
        SineModes { w, wt, chi, dchi }
    }

    fn at(delta: f64, j: usize, x: f64) -> f64 {
        ((j + 1) as f64 * PI * (x + delta) / (2.0 * delta)).sin() / delta.sqrt()
    }
}

/// Lowest `count` eigenvalues of the Dirichlet Laplacian `−½Δ` in the layer
/// `|w| < δ` around the closed curve, in tube coordinates `(s, w)` with
/// metric `diag(h², 1)`, `h = 1 + w k(s)`, `w` along the left normal.
///
/// Transverse direction: `grid_w` functions `χⱼ(w)/√h` (orthonormal for the
/// `h dw` measure). Arclength direction: `grid_s` periodic nodes, fourth-order
/// staggered differences in the quadratic form, so the assembled matrix is
/// symmetric positive definite and banded after folding the ring.
pub fn tube_band_spectrum(
    c: &PlanarCurve,
    delta: f64,
    grid_s: usize,
    grid_w: usize,
    count: usize,
) -> Result<SpectrumResult, SpectralError> {
    if grid_s < MIN_GRID {
        return Err(SpectralError::GridTooCoarse {
            grid: grid_s,
            min: MIN_GRID,
        });
    }
    if grid_w < 2 {
        return Err(SpectralError::GridTooCoarse {
            grid: grid_w,
            min: 2,
        });
    }
    if !(delta > 0.0) {
        return Err(SpectralError::InvalidParameter(format!(
            "layer half-width must be positive, got {delta}"
        )));
    }
    let k_nodes = c.sample_curvature(grid_s, 0.0);
    let k_mid = c.sample_curvature(grid_s, 0.5);
    let kmax = k_nodes
        .iter()
        .chain(&k_mid)
        .fold(0.0f64, |a, k| a.max(k.abs()));
    if !(delta * kmax < 0.9) {
        return Err(SpectralError::ChartSingular {
            product: delta * kmax,
        });
    }
    let mut r = solve(c.length(), &k_nodes, &k_mid, delta, grid_w, count)?;
    r.problem = format!("tube:{}", c.label());
    Ok(r)
}

fn solve(
    length: f64,
    k_nodes: &[f64],
    k_mid: &[f64],
    delta: f64,
    modes: usize,
    count: usize,
) -> Result<SpectrumResult, SpectralError> {
    let n = k_nodes.len();
    let jn = modes;
    let ds = length / n as f64;
    let basis = SineModes::new(delta, jn);
    let nq = basis.w.len();
    let pos = folded_ring_order(n);
    let index = |node: usize, j: usize| pos[node] * jn + j;
    let mut a = BandedSym::zeros(n * jn, 7 * jn - 1);

    // φⱼ(sᵢ, w_q) = χⱼ(w_q)/√hᵢ(w_q)
    let phi: Vec<Vec<Vec<f64>>> = k_nodes
        .iter()
        .map(|&k| {
            (0..jn)
                .map(|j| {
                    (0..nq)
                        .map(|q| basis.chi[j][q] / (1.0 + basis.w[q] * k).sqrt())
                        .collect()
                })
                .collect()
        })
        .collect();

    let mut lower = f64::INFINITY;
    for (i, &k) in k_nodes.iter().enumerate() {
        // ½ ∫ h (∂_w φⱼ)(∂_w φₗ) dw
        let dphi: Vec<Vec<f64>> = (0..jn)
            .map(|j| {
                (0..nq)
                    .map(|q| {
                        let h = 1.0 + basis.w[q] * k;
                        basis.dchi[j][q] / h.sqrt() - 0.5 * k * basis.chi[j][q] / h.powf(1.5)
                    })
                    .collect()
            })
            .collect();
        let mut block = vec![0.0; jn * jn];
        for j in 0..jn {
            for l in 0..=j {
                let v: f64 = (0..nq)
                    .map(|q| 0.5 * basis.wt[q] * (1.0 + basis.w[q] * k) * dphi[j][q] * dphi[l][q])
                    .sum();
                block[j * jn + l] = v;
                block[l * jn + j] = v;
                a.add(index(i, j), index(i, l), v);
            }
        }
        lower = lower.min(jacobi_eigen(&block, jn).0[0]);
    }

    // ½ Σ_q wt/h (D_s ψ)² at each midpoint
    let width = STENCIL.len() * jn;
    let mut g = vec![0.0; width];
    let mut local = vec![0.0; width * width];
    for (i, &km) in k_mid.iter().enumerate() {
        let nodes: Vec<usize> = STENCIL
            .iter()
            .map(|(o, _)| (i as isize + o).rem_euclid(n as isize) as usize)
            .collect();
        local.iter_mut().for_each(|v| *v = 0.0);
        for q in 0..nq {
            for (slot, ((_, coef), &node)) in STENCIL.iter().zip(&nodes).enumerate() {
                for j in 0..jn {
                    g[slot * jn + j] = coef / ds * phi[node][j][q];
                }
            }
            let weight = 0.5 * basis.wt[q] / (1.0 + basis.w[q] * km);
            for u in 0..width {
                let gu = weight * g[u];
                for v in 0..=u {
                    local[u * width + v] += gu * g[v];
                }
            }
        }
        for u in 0..width {
            let gu = index(nodes[u / jn], u % jn);
            for v in 0..=u {
                a.add(gu, index(nodes[v / jn], v % jn), local[u * width + v]);
            }
        }
    }

    let pairs = a.lowest_eigenpairs(count, lower - 0.1, &EigenOptions::default())?;

    let ground = &pairs.vectors[0];
    let probe: Vec<f64> = (1..32)
        .map(|r| -delta + 2.0 * delta * r as f64 / 32.0)
        .collect();
    let mut field = Vec::with_capacity(n * probe.len());
    for (i, &k) in k_nodes.iter().enumerate() {
        for &x in &probe {
            let v: f64 = (0..jn)
                .map(|j| ground[index(i, j)] * SineModes::at(delta, j, x))
                .sum();
            field.push(v / (1.0 + x * k).sqrt());
        }
    }

    Ok(SpectrumResult {
        problem: "tube".into(),
        labels: (0..count).map(|index| ModeLabel::Band { index }).collect(),
        eigenvalues: pairs.values,
        solver: SolverInfo {
            grid_s: Some(n),
            grid_w: Some(jn),
            delta: Some(delta),
            subtracted_energy: Some(transverse_energy(delta)),
            iterations: Some(pairs.iterations),
            max_residual: Some(pairs.max_residual),
            ground_state_sign_definite: Some(sign_definite(&field, 1e-8)),
            ..SolverInfo::default()
        },
        scheme: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::annulus_spectrum;

    #[test]
    fn circle_tube_equals_annulus() {
        let c = PlanarCurve::circle(1.0).unwrap();
        let t = tube_band_spectrum(&c, 0.05, 256, 10, 5).unwrap();
        let a = annulus_spectrum(1.0, 0.05, 2, 400).unwrap().eigenvalues;
        let expect = [a[0], a[1], a[1], a[2], a[2]];
        for (x, y) in t.eigenvalues.iter().zip(expect) {
            assert!((x - y).abs() < 1e-6, "{x} vs {y}");
        }
        assert_eq!(t.solver.ground_state_sign_definite, Some(true));
    }

    #[test]
    fn orientation_invariance() {
        let e = PlanarCurve::ellipse(1.0, 0.6).unwrap();
        let a = tube_band_spectrum(&e, 0.05, 64, 4, 3).unwrap();
        let b = tube_band_spectrum(&e.mirrored(), 0.05, 64, 4, 3).unwrap();
        for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
            assert!((x - y).abs() < 1e-9 * x.abs());
        }
    }

    #[test]
    fn chart_and_grid_checks() {
        let e = PlanarCurve::ellipse(1.0, 0.6).unwrap();
        assert!(matches!(
            tube_band_spectrum(&e, 0.4, 64, 4, 2),
            Err(SpectralError::ChartSingular { .. })
        ));
        assert!(matches!(
            tube_band_spectrum(&e, 0.02, 8, 4, 2),
            Err(SpectralError::GridTooCoarse { .. })
        ));
    }
}
