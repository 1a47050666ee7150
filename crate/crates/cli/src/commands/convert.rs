use qgeom::conversion::{
    conversion_residual_strict, conversion_residual_weak, max_norm, ConversionError,
};
use qgeom::FieldExpr;
use rayon::prelude::*;
use serde_json::json;

use super::{surface_input, Outcome};
use crate::config::{ConvertArgs, RunConfig};
use crate::error::CliError;
use crate::output::{join_point, Cell, Row, Table};

const DEFAULT_SAMPLE: usize = 100;
const DEFAULT_TOLERANCE: f64 = 1e-10;

pub fn run(run: &RunConfig, args: &ConvertArgs) -> Result<Outcome, CliError> {
    let input = surface_input!(args).points(run.seed, DEFAULT_SAMPLE)?;
    let s = &input.surface;
    let g_src = args.g.as_deref().ok_or(CliError::Missing("--g"))?;
    let coords: Vec<&str> = s.coords().iter().map(String::as_str).collect();
    let g = FieldExpr::parse(g_src, &coords).map_err(CliError::config)?;
    let tolerance = args.tolerance.unwrap_or(DEFAULT_TOLERANCE);

    let results: Vec<_> = input
        .points
        .par_iter()
        .map(|x| {
            let eik = s
                .eikonal_residual(x)
                .map(|e| e.residual)
                .unwrap_or(f64::NAN);
            let r = if args.weak {
                conversion_residual_weak(s, &g, x).map(|m| ("weak", m))
            } else {
                match conversion_residual_strict(s, &g, x) {
                    Err(ConversionError::NotDistanceNormalized { .. }) => {
                        conversion_residual_weak(s, &g, x).map(|m| ("weak", m))
                    }
                    r => r.map(|m| ("strict", m)),
                }
            };
            (x, eik, r)
        })
        .collect();

    let mut table = Table::new(vec![
        "surface",
        "g",
        "point",
        "residual",
        "max_residual",
        "eikonal_residual",
    ]);
    let mut failure = None;
    let mut worst = 0.0f64;
    for (x, eik, r) in results {
        let mut cells = vec![
            Cell::text(&input.label),
            Cell::text(g_src),
            Cell::text(join_point(x)),
        ];
        match r {
            Ok((kind, m)) => {
                let mx = max_norm(&m);
                worst = worst.max(mx);
                cells.extend([Cell::text(kind), Cell::Num(mx), Cell::Num(eik)]);
                table
                    .rows
                    .push(Row::new(cells).with_details(json!({ "matrix": m })));
            }
            Err(e) => {
                failure = Some(CliError::Compute(format!("{}: {e}", join_point(x))));
                cells.extend([Cell::text("error"), Cell::Empty, Cell::Num(eik)]);
                table
                    .rows
                    .push(Row::new(cells).with_details(json!({ "error": e.to_string() })));
            }
        }
    }
    table.sort();
    let solvable = failure.is_none() && worst <= tolerance;
    let verdict = if solvable {
        "SOLVABLE-AT-POINTS"
    } else {
        "NOT-SOLVABLE"
    };
    eprintln!(
        "verdict: {verdict} (max residual {worst:e}, tolerance {tolerance:e}, {} points)",
        input.points.len()
    );
    table.summary = json!({ "verdict": verdict, "max_residual": worst, "tolerance": tolerance });
    if failure.is_none() && !solvable {
        failure = Some(CliError::Verdict(format!(
            "max residual {worst:e} exceeds {tolerance:e}"
        )));
    }
    Ok(Outcome {
        table,
        failure,
        plot: (None, "max_residual"),
    })
}
