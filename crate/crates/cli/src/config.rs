use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::CliError;

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Options shared by every subcommand.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Globals {
    /// JSON run configuration; flags given on the command line take precedence
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Output format
    #[arg(long, global = true, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    /// Output file (stdout if absent); a manifest is written next to it
    #[arg(long, short, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// Also write a gnuplot script next to the output file
    #[arg(long, global = true)]
    #[serde(default, skip_serializing_if = "is_false")]
    pub gnuplot: bool,
    /// Seed for every random choice the run makes
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Surface, coordinates and the points to evaluate at.
macro_rules! surface_args {
    ($(#[$m:meta])* pub struct $name:ident { $($extra:tt)* }) => {
        $(#[$m])*
        #[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
        #[serde(deny_unknown_fields)]
        pub struct $name {
            /// Defining function; repeat for higher codimension
            #[arg(long)]
            #[serde(skip_serializing_if = "Option::is_none")]
            pub surface: Option<Vec<String>>,
            /// Coordinate names, comma separated
            #[arg(long, value_delimiter = ',')]
            #[serde(skip_serializing_if = "Option::is_none")]
            pub coords: Option<Vec<String>>,
            /// Point as comma-separated coordinates; repeatable
            #[arg(long, allow_hyphen_values = true)]
            #[serde(skip_serializing_if = "Option::is_none")]
            pub point: Option<Vec<String>>,
            /// Number of seeded on-surface sample points to add
            #[arg(long)]
            #[serde(skip_serializing_if = "Option::is_none")]
            pub sample: Option<usize>,
            /// Half-width of the box the sampler draws from
            #[arg(long)]
            #[serde(skip_serializing_if = "Option::is_none")]
            pub sample_box: Option<f64>,
            /// Snap points onto the surface before evaluating
            #[arg(long)]
            #[serde(default, skip_serializing_if = "is_false")]
            pub project: bool,
            $($extra)*
        }
    };
}

surface_args! {
    pub struct PotentialArgs {
        /// Schemes to evaluate, comma separated
        #[arg(long, alias = "scheme", value_delimiter = ',')]
        #[serde(skip_serializing_if = "Option::is_none")]
        pub schemes: Option<Vec<String>>,
        /// Evaluate dirac_raw in the distance representation via the closest point
        #[arg(long)]
        #[serde(default, skip_serializing_if = "is_false")]
        pub normalize_distance: bool,
        /// Multiply potentials by ħ²
        #[arg(long)]
        #[serde(skip_serializing_if = "Option::is_none")]
        pub hbar: Option<f64>,
    }
}

surface_args! {
    pub struct BracketArgs {
        /// Momentum for the matching --point; repeatable
        #[arg(long, allow_hyphen_values = true)]
        #[serde(skip_serializing_if = "Option::is_none")]
        pub momentum: Option<Vec<String>>,
        /// Tables to emit: xx, xp, pp
        #[arg(long, value_delimiter = ',')]
        #[serde(skip_serializing_if = "Option::is_none")]
        pub tables: Option<Vec<String>>,
    }
}

surface_args! {
    pub struct ConvertArgs {
        /// The function g of the conversion ansatz
        #[arg(long)]
        #[serde(skip_serializing_if = "Option::is_none")]
        pub g: Option<String>,
        /// Use the representation-independent residual even for distance fields
        #[arg(long)]
        #[serde(default, skip_serializing_if = "is_false")]
        pub weak: bool,
        /// Largest residual still counted as solvable
        #[arg(long)]
        #[serde(skip_serializing_if = "Option::is_none")]
        pub tolerance: Option<f64>,
    }
}

surface_args! {
    pub struct ProjectArgs {}
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumArgs {
    /// Round sphere S^(n-1) in n dimensions
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sphere: Option<usize>,
    /// Sphere radius
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    /// Highest harmonic degree for the sphere
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lmax: Option<usize>,
    /// Closed curve for the 1D effective operator: circle:R, ellipse:a,b or param:x;y
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curve: Option<String>,
    /// Arclength grid of the effective operator
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    /// Annulus around a circle of this radius
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub annulus: Option<f64>,
    /// Highest angular momentum for the annulus
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mmax: Option<usize>,
    /// Radial grid for the annulus
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radial_grid: Option<usize>,
    /// Tube around a closed curve (same syntax as --curve)
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tube: Option<String>,
    /// Layer half-width
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Arclength grid of the tube
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_s: Option<usize>,
    /// Transverse modes of the tube
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_w: Option<usize>,
    /// Number of eigenvalues
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    /// Schemes, comma separated
    #[arg(long, alias = "scheme", value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schemes: Option<Vec<String>>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThinLayerArgs {
    /// Tube around a closed curve: circle:R, ellipse:a,b or param:x;y
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curve: Option<String>,
    /// Annulus around a circle of this radius
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub annulus: Option<f64>,
    /// Layer half-widths, strictly descending
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deltas: Option<Vec<f64>>,
    /// Number of tube bands, or annulus modes 0..count
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_s: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_w: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radial_grid: Option<usize>,
    /// Grid of the 1D effective operator that supplies the targets
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub effective_grid: Option<usize>,
    /// Scheme of the target: curve (thin layer) or podolsky
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scheme: Option<String>,
    /// Relative tolerance of the verdict
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// Absolute tolerance floor of the verdict
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abs_tolerance: Option<f64>,
}

/// What gets echoed into the manifest.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: String,
    #[serde(default)]
    pub format: Format,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub gnuplot: bool,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub args: Value,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    command: Option<String>,
    format: Option<Format>,
    output: Option<PathBuf>,
    gnuplot: Option<bool>,
    seed: Option<u64>,
    #[serde(default)]
    args: Map<String, Value>,
}

fn read_file(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))
}

/// Overlay command-line values on the config file and build the run record.
pub fn resolve<T: Serialize + DeserializeOwned>(
    command: &str,
    globals: &Globals,
    cli: &T,
) -> Result<(RunConfig, T), CliError> {
    let file = match &globals.config {
        Some(p) => read_file(p)?,
        None => FileConfig::default(),
    };
    if let Some(c) = &file.command {
        if c != command {
            return Err(CliError::Config(format!(
                "config is for `{c}`, not `{command}`"
            )));
        }
    }
    let mut args = file.args;
    if let Value::Object(over) = serde_json::to_value(cli).map_err(CliError::config)? {
        args.extend(over);
    }
    let args = Value::Object(args);
    let parsed: T = serde_json::from_value(args.clone())
        .map_err(|e| CliError::Config(format!("config args: {e}")))?;
    let run = RunConfig {
        command: command.to_string(),
        format: globals.format.or(file.format).unwrap_or_default(),
        output: globals.output.clone().or(file.output),
        gnuplot: globals.gnuplot || file.gnuplot.unwrap_or(false),
        seed: globals.seed.or(file.seed).unwrap_or(1),
        args,
    };
    Ok((run, parsed))
}
