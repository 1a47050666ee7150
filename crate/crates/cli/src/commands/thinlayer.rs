use qgeom::potentials::SchemeId;
use qgeom::spectral::{
    curve_effective_spectrum, delta_sweep, ConvergenceTable, SpectralError, SweepProblem,
};
use rayon::prelude::*;
use serde_json::json;

use super::spectrum::{curve, COLUMNS};
use super::Outcome;
use crate::config::{RunConfig, ThinLayerArgs};
use crate::error::CliError;
use crate::output::{Cell, Row, Table};

const DEFAULT_TOLERANCE: f64 = 0.02;
const DEFAULT_ABS_TOLERANCE: f64 = 5e-3;

fn solver_error(e: SpectralError) -> CliError {
    match e {
        SpectralError::InvalidParameter(_)
        | SpectralError::InvalidCurve(_)
        | SpectralError::GridTooCoarse { .. }
        | SpectralError::DeltaTooLarge { .. }
        | SpectralError::ChartSingular { .. }
        | SpectralError::UnsupportedScheme { .. } => CliError::config(e),
        e => CliError::compute(e),
    }
}

pub fn run(_run: &RunConfig, a: &ThinLayerArgs) -> Result<Outcome, CliError> {
    let deltas = a
        .deltas
        .clone()
        .filter(|d| !d.is_empty())
        .ok_or(CliError::Missing("--deltas"))?;
    let scheme = match a.scheme.as_deref().unwrap_or("curve") {
        "curve" | "thin_layer" => SchemeId::Curve,
        "podolsky" => SchemeId::Podolsky,
        other => {
            return Err(CliError::Config(format!(
                "target scheme must be curve or podolsky, got `{other}`"
            )))
        }
    };
    let tol = a.tolerance.unwrap_or(DEFAULT_TOLERANCE);
    let abs_tol = a.abs_tolerance.unwrap_or(DEFAULT_ABS_TOLERANCE);

    let (problems, targets, grids): (Vec<SweepProblem>, Vec<f64>, (Option<usize>, Option<usize>)) =
        match (&a.curve, a.annulus) {
            (Some(spec), None) => {
                let c = curve(spec)?;
                let count = a.count.unwrap_or(5);
                let (gs, gw) = (a.grid_s.unwrap_or(256), a.grid_w.unwrap_or(6));
                let eff =
                    curve_effective_spectrum(&c, scheme, a.effective_grid.unwrap_or(2048), count)
                        .map_err(solver_error)?;
                let problems = (0..count)
                    .map(|band| SweepProblem::Tube {
                        curve: c.clone(),
                        band,
                        grid_s: gs,
                        grid_w: gw,
                    })
                    .collect();
                (problems, eff.eigenvalues, (Some(gs), Some(gw)))
            }
            (None, Some(radius)) => {
                let count = a.count.unwrap_or(4);
                let grid = a.radial_grid.unwrap_or(200);
                let shift = if scheme == SchemeId::Curve { 0.25 } else { 0.0 };
                let problems = (0..count)
                    .map(|mode| SweepProblem::Annulus {
                        radius,
                        mode,
                        radial_grid: grid,
                    })
                    .collect();
                let targets = (0..count)
                    .map(|m| ((m * m) as f64 - shift) / (2.0 * radius * radius))
                    .collect();
                (problems, targets, (None, Some(grid)))
            }
            (None, None) => return Err(CliError::Missing("--curve or --annulus")),
            _ => {
                return Err(CliError::Config(
                    "give only one of --curve, --annulus".into(),
                ))
            }
        };

    let sweeps: Vec<ConvergenceTable> = problems
        .par_iter()
        .map(|p| delta_sweep(p, &deltas))
        .collect::<Result<_, _>>()
        .map_err(solver_error)?;

    let mut table = Table::new(COLUMNS.to_vec());
    let mut verdicts = Vec::new();
    let mut passed = 0;
    for (sweep, &target) in sweeps.iter().zip(&targets) {
        let base = |delta: f64| {
            vec![
                Cell::text(&sweep.problem),
                Cell::text(scheme.name()),
                Cell::Num(delta),
                grids.0.map_or(Cell::Empty, |g| Cell::Int(g as i64)),
                grids.1.map_or(Cell::Empty, |g| Cell::Int(g as i64)),
                Cell::Int(sweep.mode as i64),
            ]
        };
        for row in &sweep.rows {
            let mut cells = base(row.delta);
            cells.extend([
                Cell::Num(row.eigenvalue),
                Cell::Num(row.subtracted),
                Cell::Num(target),
                Cell::Num(row.subtracted - target),
            ]);
            table
                .rows
                .push(Row::new(cells).with_details(json!({ "difference": row.difference })));
        }
        // the δ → 0 limit
        let mut cells = base(0.0);
        cells.extend([
            Cell::Empty,
            Cell::opt(sweep.extrapolated),
            Cell::Num(target),
            Cell::opt(sweep.extrapolated.map(|v| v - target)),
        ]);
        table
            .rows
            .push(Row::new(cells).with_details(json!({ "rate": sweep.rate })));

        let finest = sweep.last().subtracted;
        let allowed = (tol * target.abs()).max(abs_tol);
        let ok = (finest - target).abs() <= allowed;
        passed += ok as usize;
        verdicts.push(json!({
            "mode": sweep.mode,
            "finest_delta": sweep.last().delta,
            "subtracted": finest,
            "target": target,
            "allowed": allowed,
            "rate": sweep.rate,
            "extrapolated": sweep.extrapolated,
            "pass": ok,
        }));
    }
    table.sort();
    let all = passed == sweeps.len();
    let word = if all { "PASS" } else { "FAIL" };
    eprintln!(
        "verdict: {word} ({passed}/{} modes within {}% or {abs_tol} of the {} target)",
        sweeps.len(),
        tol * 100.0,
        scheme.name()
    );
    table.summary =
        json!({ "verdict": word, "tolerance": tol, "abs_tolerance": abs_tol, "modes": verdicts });
    let failure = (!all).then(|| {
        CliError::Verdict(format!(
            "{} of {} modes missed the target",
            sweeps.len() - passed,
            sweeps.len()
        ))
    });
    Ok(Outcome {
        table,
        failure,
        plot: (Some("delta"), "subtracted"),
    })
}
