use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{annulus_spectrum, tube_band_spectrum, PlanarCurve, SpectralError};

/// One eigenvalue of a thin-layer problem, followed as `δ → 0`.
#[derive(Debug, Clone)]
pub enum SweepProblem {
    /// lowest level with angular momentum `mode` in the annulus around a circle
    Annulus {
        radius: f64,
        mode: usize,
        radial_grid: usize,
    },
    /// `band`-th level (0-based) of the tube around a closed curve
    Tube {
        curve: PlanarCurve,
        band: usize,
        grid_s: usize,
        grid_w: usize,
    },
}

impl SweepProblem {
    pub fn label(&self) -> String {
        match self {
            SweepProblem::Annulus { radius, .. } => format!("annulus:R={radius}"),
            SweepProblem::Tube { curve, .. } => format!("tube:{}", curve.label()),
        }
    }

    pub fn mode(&self) -> usize {
        match self {
            SweepProblem::Annulus { mode, .. } => *mode,
            SweepProblem::Tube { band, .. } => *band,
        }
    }

    /// `(eigenvalue, eigenvalue − π²/(8δ²))`
    pub fn solve(&self, delta: f64) -> Result<(f64, f64), SpectralError> {
        let r = match self {
            SweepProblem::Annulus {
                radius,
                mode,
                radial_grid,
            } => annulus_spectrum(*radius, delta, *mode, *radial_grid)?,
            SweepProblem::Tube {
                curve,
                band,
                grid_s,
                grid_w,
            } => tube_band_spectrum(curve, delta, *grid_s, *grid_w, band + 1)?,
        };
        let i = self.mode();
        let sub = r.subtracted().expect("thin-layer solve");
        Ok((r.eigenvalues[i], sub[i]))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub delta: f64,
    pub eigenvalue: f64,
    pub subtracted: f64,
    /// change of `subtracted` from the previous (larger) δ
    pub difference: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub problem: String,
    pub mode: usize,
    pub rows: Vec<ConvergenceRow>,
    /// `p` in `E(δ) ≈ E₀ + Cδᵖ`, from the last three δ
    pub rate: Option<f64>,
    /// Richardson limit from the last two δ with the fitted rate
    pub extrapolated: Option<f64>,
}

impl ConvergenceTable {
    pub fn last(&self) -> &ConvergenceRow {
        self.rows.last().expect("nonempty sweep")
    }
}

/// Solves `problem` at each δ (in parallel) and fits the approach to the
/// `δ → 0` limit.
pub fn delta_sweep(
    problem: &SweepProblem,
    deltas: &[f64],
) -> Result<ConvergenceTable, SpectralError> {
    if deltas.is_empty()
        || deltas.iter().any(|d| !(*d > 0.0))
        || deltas.windows(2).any(|w| !(w[1] < w[0]))
    {
        return Err(SpectralError::InvalidParameter(format!(
            "deltas must be positive and strictly descending, got {deltas:?}"
        )));
    }
    let values = deltas
        .par_iter()
        .map(|&d| problem.solve(d))
        .collect::<Result<Vec<_>, _>>()?;
    let rows: Vec<ConvergenceRow> = deltas
        .iter()
        .zip(&values)
        .enumerate()
        .map(|(i, (&delta, &(eigenvalue, subtracted)))| ConvergenceRow {
            delta,
            eigenvalue,
            subtracted,
            difference: (i > 0).then(|| subtracted - values[i - 1].1),
        })
        .collect();

    let (mut rate, mut extrapolated) = (None, None);
    if let [.., a, b, c] = rows.as_slice() {
        let d1 = b.subtracted - a.subtracted;
        let d2 = c.subtracted - b.subtracted;
        let p = (d1 / d2).abs().ln() / (a.delta / b.delta).ln();
        if p.is_finite() && p > 0.0 {
            rate = Some(p);
            extrapolated = Some(c.subtracted + d2 / ((b.delta / c.delta).powf(p) - 1.0));
        } else if d2 == 0.0 {
            extrapolated = Some(c.subtracted);
        }
    }
    Ok(ConvergenceTable {
        problem: problem.label(),
        mode: problem.mode(),
        rows,
        rate,
        extrapolated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn annulus_limit_extrapolates_to_curve_level() {
        let p = SweepProblem::Annulus {
            radius: 1.0,
            mode: 1,
            radial_grid: 400,
        };
        let t = delta_sweep(&p, &[0.1, 0.05, 0.025]).unwrap();
        let rate = t.rate.unwrap();
        assert!((0.8..=2.2).contains(&rate), "rate {rate}");
        assert!((t.extrapolated.unwrap() - 0.375).abs() < 1e-3);
        // the free-particle level 1/2 stays out of reach
        assert!(((t.extrapolated.unwrap() - 0.5).abs() - 0.125).abs() < 0.01);
    }

    #[test]
    fn rejects_unsorted_deltas() {
        let p = SweepProblem::Annulus {
            radius: 1.0,
            mode: 0,
            radial_grid: 100,
        };
        assert!(delta_sweep(&p, &[0.05, 0.1]).is_err());
        assert!(delta_sweep(&p, &[]).is_err());
    }
}
