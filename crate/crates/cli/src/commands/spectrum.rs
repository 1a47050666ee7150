use qgeom::potentials::SchemeId;
use qgeom::spectral::{
    annulus_spectrum, curve_effective_spectrum, sphere_spectrum, tube_band_spectrum, ModeLabel,
    PlanarCurve, SpectrumResult,
};
use rayon::prelude::*;
use serde_json::json;

use super::{parse_schemes, Outcome};
use crate::config::{RunConfig, SpectrumArgs};
use crate::error::CliError;
use crate::output::{Cell, Row, Table};

pub const COLUMNS: [&str; 10] = [
    "problem",
    "scheme",
    "delta",
    "grid_s",
    "grid_w",
    "mode",
    "eigenvalue",
    "subtracted",
    "target",
    "gap",
];

pub(crate) fn curve(spec: &str) -> Result<PlanarCurve, CliError> {
    PlanarCurve::parse_spec(spec).map_err(CliError::config)
}

fn int(v: Option<usize>) -> Cell {
    v.map_or(Cell::Empty, |n| Cell::Int(n as i64))
}

fn label_mode(l: &ModeLabel) -> i64 {
    match *l {
        ModeLabel::Harmonic { l, .. } => l as i64,
        ModeLabel::Angular { m } => m as i64,
        ModeLabel::Band { index } => index as i64,
    }
}

/// Rows of one spectrum; `targets[i]` pairs with eigenvalue `i`.
fn rows(r: &SpectrumResult, scheme: &str, targets: &[Option<f64>]) -> Vec<Row> {
    let sub = r.subtracted();
    let mut out = Vec::new();
    let mut last: Option<ModeLabel> = None;
    for (i, (&e, label)) in r.eigenvalues.iter().zip(&r.labels).enumerate() {
        // degenerate harmonics are listed once per degree
        if matches!(label, ModeLabel::Harmonic { .. }) && last == Some(*label) {
            continue;
        }
        last = Some(*label);
        let s = sub.as_ref().map(|v| v[i]);
        let target = targets.get(i).copied().flatten();
        let gap = match (s.or(Some(e)), target) {
            (Some(v), Some(t)) => Some(v - t),
            _ => None,
        };
        let cells = vec![
            Cell::text(&r.problem),
            Cell::text(scheme),
            Cell::opt(r.solver.delta),
            int(r.solver.grid_s),
            int(r.solver.grid_w),
            Cell::Int(label_mode(label)),
            Cell::Num(e),
            Cell::opt(s),
            Cell::opt(target),
            Cell::opt(gap),
        ];
        out.push(Row::new(cells).with_details(json!({ "label": label, "solver": r.solver })));
    }
    out
}

fn need<T>(v: Option<T>, what: &'static str) -> Result<T, CliError> {
    v.ok_or(CliError::Missing(what))
}

pub fn run(_run: &RunConfig, a: &SpectrumArgs) -> Result<Outcome, CliError> {
    let chosen = [
        a.sphere.is_some(),
        a.curve.is_some(),
        a.annulus.is_some(),
        a.tube.is_some(),
    ];
    match chosen.iter().filter(|c| **c).count() {
        0 => {
            return Err(CliError::Missing(
                "one of --sphere, --curve, --annulus, --tube",
            ))
        }
        1 => {}
        _ => {
            return Err(CliError::Config(
                "give only one of --sphere, --curve, --annulus, --tube".into(),
            ))
        }
    }
    let compute = CliError::compute;
    let mut table = Table::new(COLUMNS.to_vec());

    if let Some(n) = a.sphere {
        let radius = a.radius.unwrap_or(1.0);
        let lmax = a.lmax.unwrap_or(3);
        for scheme in parse_schemes(&a.schemes, &["dirac_distance"])? {
            let r = sphere_spectrum(n, radius, scheme, lmax).map_err(CliError::config)?;
            table.rows.extend(rows(&r, scheme.name(), &[]));
        }
    } else if let Some(spec) = &a.curve {
        let c = curve(spec)?;
        let grid = a.grid.unwrap_or(512);
        let count = a.count.unwrap_or(6);
        let schemes = parse_schemes(&a.schemes, &["curve"])?;
        let results: Vec<_> = schemes
            .par_iter()
            .map(|&sc| curve_effective_spectrum(&c, sc, grid, count).map(|r| (sc, r)))
            .collect::<Result<_, _>>()
            .map_err(|e| match e {
                qgeom::spectral::SpectralError::UnsupportedScheme { .. }
                | qgeom::spectral::SpectralError::GridTooCoarse { .. } => CliError::config(e),
                e => compute(e),
            })?;
        for (sc, r) in results {
            table.rows.extend(rows(&r, sc.name(), &[]));
        }
    } else if let Some(radius) = a.annulus {
        let delta = need(a.delta, "--delta")?;
        let r = annulus_spectrum(
            radius,
            delta,
            a.mmax.unwrap_or(3),
            a.radial_grid.unwrap_or(200),
        )
        .map_err(CliError::config)?;
        let targets: Vec<Option<f64>> = r
            .labels
            .iter()
            .map(|l| Some((label_mode(l).pow(2) as f64 - 0.25) / (2.0 * radius * radius)))
            .collect();
        table
            .rows
            .extend(rows(&r, SchemeId::ThinLayer.name(), &targets));
    } else if let Some(spec) = &a.tube {
        let c = curve(spec)?;
        let delta = need(a.delta, "--delta")?;
        let count = a.count.unwrap_or(5);
        let (tube, eff) = rayon::join(
            || {
                tube_band_spectrum(
                    &c,
                    delta,
                    a.grid_s.unwrap_or(256),
                    a.grid_w.unwrap_or(6),
                    count,
                )
            },
            || curve_effective_spectrum(&c, SchemeId::Curve, a.grid.unwrap_or(2048), count),
        );
        let tube = tube.map_err(compute)?;
        let eff = eff.map_err(compute)?;
        let targets: Vec<Option<f64>> = eff.eigenvalues.iter().map(|&v| Some(v)).collect();
        table
            .rows
            .extend(rows(&tube, SchemeId::ThinLayer.name(), &targets));
    }
    table.sort();
    Ok(Outcome {
        table,
        failure: None,
        plot: (Some("mode"), "eigenvalue"),
    })
}
