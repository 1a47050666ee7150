use qgeom::SurfaceSpec;

use crate::error::CliError;
use crate::output::Table;
use crate::sample;

mod brackets;
mod convert;
mod potential;
mod project;
mod spectrum;
mod thinlayer;

pub use brackets::run as brackets;
pub use convert::run as convert_check;
pub use potential::run as potential;
pub use project::run as project;
pub use spectrum::run as spectrum;
pub use thinlayer::run as thinlayer;

/// A table to write, and the failure (if any) that sets the exit code
/// once it is written.
pub struct Outcome {
    pub table: Table,
    pub failure: Option<CliError>,
    /// Columns for the gnuplot script: `(x, y)`, `x = None` for row number.
    pub plot: (Option<&'static str>, &'static str),
}

/// Fields shared by the surface-based subcommands.
pub(crate) struct SurfaceInput<'a> {
    pub surface: &'a Option<Vec<String>>,
    pub coords: &'a Option<Vec<String>>,
    pub point: &'a Option<Vec<String>>,
    pub sample: Option<usize>,
    pub sample_box: Option<f64>,
    pub project: bool,
}

macro_rules! surface_input {
    ($a:expr) => {
        crate::commands::SurfaceInput {
            surface: &$a.surface,
            coords: &$a.coords,
            point: &$a.point,
            sample: $a.sample,
            sample_box: $a.sample_box,
            project: $a.project,
        }
    };
}
pub(crate) use surface_input;

pub(crate) struct Points {
    pub surface: SurfaceSpec,
    pub label: String,
    pub points: Vec<Vec<f64>>,
}

impl SurfaceInput<'_> {
    pub fn surface(&self) -> Result<(SurfaceSpec, String), CliError> {
        let sources = self
            .surface
            .as_ref()
            .filter(|s| !s.is_empty())
            .ok_or(CliError::Missing("--surface"))?;
        let coords = self
            .coords
            .as_ref()
            .filter(|c| !c.is_empty())
            .ok_or(CliError::Missing("--coords"))?;
        let src: Vec<&str> = sources.iter().map(String::as_str).collect();
        let names: Vec<&str> = coords.iter().map(|c| c.trim()).collect();
        let s = SurfaceSpec::parse(&src, &names).map_err(CliError::config)?;
        Ok((s, sources.join(" & ")))
    }

    /// Explicit points, then sampled ones; projected when asked.
    pub fn points(&self, seed: u64, default_sample: usize) -> Result<Points, CliError> {
        let (surface, label) = self.surface()?;
        let mut points = Vec::new();
        for p in self.point.iter().flatten() {
            points.push(sample::parse_point(p, surface.dim())?);
        }
        let n = self
            .sample
            .unwrap_or(if points.is_empty() { default_sample } else { 0 });
        if n > 0 {
            points.extend(sample::on_surface(
                &surface,
                n,
                self.sample_box.unwrap_or(2.0),
                seed,
            )?);
        }
        if points.is_empty() {
            return Err(CliError::Missing("--point or --sample"));
        }
        if self.project {
            for p in &mut points {
                *p = surface.closest_point(p).map_err(CliError::compute)?.point;
            }
        }
        Ok(Points {
            surface,
            label,
            points,
        })
    }
}

pub(crate) fn parse_schemes(
    list: &Option<Vec<String>>,
    default: &[&str],
) -> Result<Vec<qgeom::potentials::SchemeId>, CliError> {
    let names: Vec<String> = match list {
        Some(v) if !v.is_empty() => v.clone(),
        _ => default.iter().map(|s| s.to_string()).collect(),
    };
    names
        .iter()
        .map(|n| n.trim().parse().map_err(CliError::config))
        .collect()
}
