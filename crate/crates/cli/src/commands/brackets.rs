use qgeom::brackets::{constraints_from_surface, BracketError, DiracTables, PhasePoint};
use rayon::prelude::*;

use super::{surface_input, Outcome};
use crate::config::{BracketArgs, RunConfig};
use crate::error::CliError;
use crate::output::{join_point, Cell, Row, Table};
use crate::sample;

const TABLES: [&str; 3] = ["xx", "xp", "pp"];

fn pick<'a>(t: &'a DiracTables, name: &str) -> &'a [Vec<f64>] {
    match name {
        "xx" => &t.xx,
        "xp" => &t.xp,
        _ => &t.pp,
    }
}

pub fn run(run: &RunConfig, args: &BracketArgs) -> Result<Outcome, CliError> {
    let input = surface_input!(args).points(run.seed, 0)?;
    let s = &input.surface;
    let dim = s.dim();
    let tables: Vec<String> = match &args.tables {
        Some(t) if !t.is_empty() => t.iter().map(|x| x.trim().to_string()).collect(),
        _ => TABLES.iter().map(|t| t.to_string()).collect(),
    };
    if let Some(bad) = tables.iter().find(|t| !TABLES.contains(&t.as_str())) {
        return Err(CliError::Config(format!(
            "unknown table `{bad}`, expected xx, xp or pp"
        )));
    }

    let given = args.momentum.as_deref().unwrap_or_default();
    if given.len() > input.points.len() {
        return Err(CliError::Config(format!(
            "{} momenta for {} points",
            given.len(),
            input.points.len()
        )));
    }
    let mut momenta: Vec<Vec<f64>> = given
        .iter()
        .map(|p| sample::parse_point(p, dim))
        .collect::<Result<_, _>>()?;
    momenta.extend(sample::momenta(
        dim,
        input.points.len() - momenta.len(),
        run.seed,
    ));

    let set = constraints_from_surface(s).map_err(CliError::config)?;
    let results: Vec<_> = input
        .points
        .par_iter()
        .zip(&momenta)
        .map(|(x, p)| {
            let on = s.check_on_surface(x).is_ok();
            (
                x,
                p,
                on,
                set.dirac_tables(&PhasePoint::new(x.clone(), p.clone())),
            )
        })
        .collect();

    let mut table = Table::new(vec![
        "surface",
        "point",
        "momentum",
        "table",
        "i",
        "j",
        "value",
        "on_surface",
        "status",
    ]);
    let mut failure = None;
    for (x, p, on, r) in results {
        let base = |t: &str, i: usize, j: usize| {
            vec![
                Cell::text(&input.label),
                Cell::text(join_point(x)),
                Cell::text(join_point(p)),
                Cell::text(t),
                Cell::Int(i as i64),
                Cell::Int(j as i64),
            ]
        };
        match r {
            Ok(t) => {
                let status = if on { "ok" } else { "weak_sense" };
                if !on {
                    eprintln!(
                        "warning: {} is off the surface; brackets hold only in the weak sense",
                        join_point(x)
                    );
                }
                for name in &tables {
                    for (i, row) in pick(&t, name).iter().enumerate() {
                        for (j, v) in row.iter().enumerate() {
                            let mut cells = base(name, i, j);
                            cells.extend([Cell::Num(*v), Cell::Bool(on), Cell::text(status)]);
                            table.rows.push(Row::new(cells));
                        }
                    }
                }
            }
            Err(e) => {
                let status = match e {
                    BracketError::SingularConstraintMatrix { .. } => "singular",
                    _ => "error",
                };
                failure = Some(CliError::Compute(format!(
                    "{} at {}: {e}",
                    status,
                    join_point(x)
                )));
                let mut cells = base("", 0, 0);
                cells.extend([Cell::Empty, Cell::Bool(on), Cell::text(status)]);
                table.rows.push(Row::new(cells));
            }
        }
    }
    table.sort();
    Ok(Outcome {
        table,
        failure,
        plot: (None, "value"),
    })
}
