use qgeom::SurfaceSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::CliError;

/// `"0,-1"` or `"0;-1"` as a point of dimension `dim`.
pub fn parse_point(src: &str, dim: usize) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = src
        .split([',', ';', ' '])
        .filter(|s| !s.is_empty())
        .collect();
    if parts.len() != dim {
        return Err(CliError::Config(format!(
            "point `{src}` has {} coordinates, expected {dim}",
            parts.len()
        )));
    }
    parts
        .iter()
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Config(format!("bad coordinate `{p}` in `{src}`")))
        })
        .collect()
}

/// On-surface points: uniform draws from `[-half_width, half_width]ⁿ`,
/// pulled onto the surface by closest-point projection. Draws whose
/// projection fails or leaves the box are rejected.
pub fn on_surface(
    s: &SurfaceSpec,
    count: usize,
    half_width: f64,
    seed: u64,
) -> Result<Vec<Vec<f64>>, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let limit = 1000 * count.max(1);
    let mut tries = 0;
    while out.len() < count {
        tries += 1;
        if tries > limit {
            return Err(CliError::Config(format!(
                "sampler found only {} of {count} points in the box of half-width {half_width}",
                out.len()
            )));
        }
        let x: Vec<f64> = (0..s.dim())
            .map(|_| rng.random_range(-half_width..half_width))
            .collect();
        let Ok(cp) = s.closest_point(&x) else {
            continue;
        };
        if cp.point.iter().all(|c| c.abs() <= half_width) && s.check_on_surface(&cp.point).is_ok() {
            out.push(cp.point);
        }
    }
    Ok(out)
}

/// Uniform momenta in `[-1, 1]ⁿ`, one per point, from a stream separate
/// from the point sampler.
pub fn momenta(dim: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    (0..count)
        .map(|_| (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_signed_points() {
        assert_eq!(parse_point("0,-1", 2).unwrap(), vec![0.0, -1.0]);
        assert_eq!(parse_point("1;2;3", 3).unwrap(), vec![1.0, 2.0, 3.0]);
        assert!(parse_point("1,2", 3).is_err());
        assert!(parse_point("1,a", 2).is_err());
    }

    #[test]
    fn sampler_is_seeded_and_on_surface() {
        let s = SurfaceSpec::parse(&["x^2/4+y^2+z^2-1"], &["x", "y", "z"]).unwrap();
        let a = on_surface(&s, 10, 2.0, 3).unwrap();
        let b = on_surface(&s, 10, 2.0, 3).unwrap();
        assert_eq!(a, b);
        for p in &a {
            assert!(s.check_on_surface(p).is_ok());
        }
    }
}
