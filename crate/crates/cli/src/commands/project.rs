use rayon::prelude::*;

use super::{surface_input, Outcome};
use crate::config::{ProjectArgs, RunConfig};
use crate::error::CliError;
use crate::output::{join_point, Cell, Row, Table};

pub fn run(run: &RunConfig, args: &ProjectArgs) -> Result<Outcome, CliError> {
    let mut input = surface_input!(args);
    // the projection is the command itself
    input.project = false;
    let pts = input.points(run.seed, 0)?;
    let s = &pts.surface;
    let results: Vec<_> = pts
        .points
        .par_iter()
        .map(|x| (x, s.closest_point(x)))
        .collect();

    let mut table = Table::new(vec![
        "surface",
        "point",
        "closest",
        "distance",
        "iterations",
        "residual",
    ]);
    let mut failure = None;
    for (x, r) in results {
        let mut cells = vec![Cell::text(&pts.label), Cell::text(join_point(x))];
        match r {
            Ok(cp) => {
                let residual = (0..s.codim())
                    .map(|a| s.value(a, &cp.point).abs())
                    .fold(0.0, f64::max);
                cells.extend([
                    Cell::text(join_point(&cp.point)),
                    Cell::Num(cp.distance),
                    Cell::Int(cp.iterations as i64),
                    Cell::Num(residual),
                ]);
            }
            Err(e) => {
                failure = Some(CliError::Compute(format!("{}: {e}", join_point(x))));
                cells.extend([Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty]);
            }
        }
        table.rows.push(Row::new(cells));
    }
    table.sort();
    Ok(Outcome {
        table,
        failure,
        plot: (None, "distance"),
    })
}
