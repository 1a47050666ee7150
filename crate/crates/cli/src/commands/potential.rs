use qgeom::geometry::GeometryError;
use qgeom::potentials::{
    evaluate_scheme, vq_dirac_distance, PotentialError, PotentialReport, SchemeId,
};
use qgeom::SurfaceSpec;
use rayon::prelude::*;
use serde_json::json;

use super::{parse_schemes, surface_input, Outcome};
use crate::config::{PotentialArgs, RunConfig};
use crate::error::CliError;
use crate::output::{join_point, Cell, Row, Table};

enum Status {
    Ok,
    OffSurface,
    Unsupported,
    Integrity,
}

impl Status {
    fn name(&self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::OffSurface => "off_surface",
            Status::Unsupported => "unsupported",
            Status::Integrity => "form_mismatch",
        }
    }
}

/// Distance representation of the surface through `x`: curvatures at the
/// closest point, then the distance-form potential.
fn normalized(s: &SurfaceSpec, x: &[f64]) -> Result<PotentialReport, PotentialError> {
    let cp = s.closest_point(x)?;
    let mut r = vq_dirac_distance(&s.shape_spectrum(&cp.point)?);
    r.point = x.to_vec();
    r.diagnostics.insert("closest_distance".into(), cp.distance);
    Ok(r)
}

fn evaluate(
    s: &SurfaceSpec,
    scheme: SchemeId,
    x: &[f64],
    normalize: bool,
) -> (Status, Result<PotentialReport, String>) {
    let r = if normalize && scheme == SchemeId::DiracRaw {
        normalized(s, x)
    } else {
        evaluate_scheme(scheme, s, x)
    };
    match r {
        Ok(r) => (Status::Ok, Ok(r)),
        Err(e) => {
            let status = match &e {
                PotentialError::FormMismatch { .. } => Status::Integrity,
                PotentialError::Geometry(GeometryError::OffSurface { .. }) => Status::OffSurface,
                PotentialError::UnsupportedScheme { .. }
                | PotentialError::Geometry(GeometryError::WrongCodimension { .. }) => {
                    Status::Unsupported
                }
                PotentialError::Geometry(_) => Status::Integrity,
            };
            (status, Err(e.to_string()))
        }
    }
}

pub fn run(run: &RunConfig, args: &PotentialArgs) -> Result<Outcome, CliError> {
    let input = surface_input!(args).points(run.seed, 0)?;
    let schemes = parse_schemes(&args.schemes, &["dirac_raw"])?;
    let items: Vec<(SchemeId, &Vec<f64>)> = schemes
        .iter()
        .flat_map(|&sc| input.points.iter().map(move |p| (sc, p)))
        .collect();
    let results: Vec<_> = items
        .par_iter()
        .map(|&(scheme, x)| {
            (
                scheme,
                x,
                evaluate(&input.surface, scheme, x, args.normalize_distance),
            )
        })
        .collect();

    let mut table = Table::new(vec![
        "surface",
        "scheme",
        "point",
        "value",
        "status",
        "diagnostics",
    ]);
    let mut failure: Option<CliError> = None;
    for (scheme, x, (status, r)) in results {
        let mut cells = vec![
            Cell::text(&input.label),
            Cell::text(scheme.name()),
            Cell::text(join_point(x)),
        ];
        let row = match r {
            Ok(mut rep) => {
                if let Some(h) = args.hbar {
                    rep = rep.scaled(h);
                }
                if args.normalize_distance && scheme == SchemeId::DiracRaw {
                    rep.diagnostics.insert("normalized".into(), 1.0);
                }
                let diag: Vec<String> = rep
                    .diagnostics
                    .iter()
                    .map(|(k, v)| format!("{k}={v}"))
                    .collect();
                cells.extend([
                    Cell::Num(rep.value),
                    Cell::text(status.name()),
                    Cell::text(diag.join(";")),
                ]);
                Row::new(cells).with_details(json!({ "diagnostics": rep.diagnostics }))
            }
            Err(msg) => {
                let err = match status {
                    Status::Integrity => {
                        CliError::Compute(format!("{} at {}: {msg}", scheme.name(), join_point(x)))
                    }
                    _ => CliError::Config(format!("{} at {}: {msg}", scheme.name(), join_point(x))),
                };
                if failure
                    .as_ref()
                    .is_none_or(|f| err.exit_code() > f.exit_code())
                {
                    failure = Some(err);
                }
                cells.extend([Cell::Empty, Cell::text(status.name()), Cell::Empty]);
                Row::new(cells).with_details(json!({ "error": msg }))
            }
        };
        table.rows.push(row);
    }
    table.sort();
    Ok(Outcome {
        table,
        failure,
        plot: (None, "value"),
    })
}
