use std::f64::consts::TAU;

use crate::fieldexpr::FieldExpr;
use crate::linalg::adaptive_simpson;

use super::SpectralError;

const PANELS: usize = 512;
const ARCLENGTH_TOL: f64 = 1e-10;

/// Closed planar curve `t ↦ (x(t), y(t))`, `t ∈ [0, 2π)`, with an arclength
/// table for uniform sampling in `s`.
#[derive(Debug, Clone)]
pub struct PlanarCurve {
    label: String,
    x: [FieldExpr; 3],
    y: [FieldExpr; 3],
    /// cumulative arclength at `t = 2π k / PANELS`
    table: Vec<f64>,
}

impl PlanarCurve {
    /// Both expressions must use the single coordinate `t`.
    pub fn new(x: FieldExpr, y: FieldExpr, label: &str) -> Result<Self, SpectralError> {
        for e in [&x, &y] {
            if e.dim() != 1 {
                return Err(SpectralError::InvalidCurve(format!(
                    "parametrization must depend on one coordinate, got {:?}",
                    e.coords()
                )));
            }
        }
        let jet = |e: FieldExpr| {
            let d1 = e.diff(0);
            let d2 = d1.diff(0);
            [e, d1, d2]
        };
        let mut c = PlanarCurve {
            label: label.to_string(),
            x: jet(x),
            y: jet(y),
            table: Vec::new(),
        };

        let gap = c
            .point(0.0)
            .iter()
            .zip(c.point(TAU))
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        if !(gap <= 1e-10) {
            return Err(SpectralError::InvalidCurve(format!(
                "curve is not closed (|r(0) − r(2π)| = {gap:e})"
            )));
        }
        for k in 0..4 * PANELS {
            let t = TAU * k as f64 / (4 * PANELS) as f64;
            let speed = c.speed(t);
            if !(speed >= 1e-8) {
                return Err(SpectralError::InvalidCurve(format!(
                    "curve is singular at t = {t} (|r′| = {speed:e})"
                )));
            }
        }

        let f = |t: f64| c.speed(t);
        let h = TAU / PANELS as f64;
        let mut table = Vec::with_capacity(PANELS + 1);
        table.push(0.0);
        let mut acc = 0.0;
        for k in 0..PANELS {
            acc += adaptive_simpson(
                &f,
                k as f64 * h,
                (k + 1) as f64 * h,
                ARCLENGTH_TOL / PANELS as f64,
            );
            table.push(acc);
        }
        c.table = table;
        Ok(c)
    }

    pub fn circle(radius: f64) -> Result<Self, SpectralError> {
        Self::ellipse(radius, radius).map(|mut c| {
            c.label = format!("circle:{radius}");
            c
        })
    }

    /// `(a cos t, b sin t)`
    pub fn ellipse(a: f64, b: f64) -> Result<Self, SpectralError> {
        if !(a > 0.0 && b > 0.0) {
            return Err(SpectralError::InvalidCurve(format!(
                "semi-axes must be positive, got ({a}, {b})"
            )));
        }
        let x = FieldExpr::parse(&format!("{a}*cos(t)"), &["t"]).expect("valid expression");
        let y = FieldExpr::parse(&format!("{b}*sin(t)"), &["t"]).expect("valid expression");
        Self::new(x, y, &format!("ellipse:{a},{b}"))
    }

    /// Parses `circle:R`, `ellipse:a,b` or `param:<x(t)>;<y(t)>`.
    pub fn parse_spec(spec: &str) -> Result<Self, SpectralError> {
        let bad = || SpectralError::InvalidCurve(format!("cannot parse curve spec `{spec}`"));
        let (kind, args) = spec.split_once(':').ok_or_else(bad)?;
        let nums = || -> Result<Vec<f64>, SpectralError> {
            args.split(',')
                .map(|v| v.trim().parse::<f64>().map_err(|_| bad()))
                .collect()
        };
        match kind.trim() {
            "circle" => match nums()?.as_slice() {
                [r] => Self::circle(*r),
                _ => Err(bad()),
            },
            "ellipse" => match nums()?.as_slice() {
                [a, b] => Self::ellipse(*a, *b),
                _ => Err(bad()),
            },
            "param" => {
                let (xs, ys) = args.split_once(';').ok_or_else(bad)?;
                let parse = |s: &str| {
                    FieldExpr::parse(s.trim(), &["t"])
                        .map_err(|e| SpectralError::InvalidCurve(e.to_string()))
                };
                Self::new(parse(xs)?, parse(ys)?, spec)
            }
            _ => Err(bad()),
        }
    }

    /// Same trace with `y ↦ −y`, so the signed curvature flips.
    pub fn mirrored(&self) -> Self {
        let mut c = self.clone();
        c.y = self.y.clone().map(|e| -e);
        c.label = format!("{}:mirrored", self.label);
        c
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn point(&self, t: f64) -> [f64; 2] {
        [self.x[0].eval(&[t]), self.y[0].eval(&[t])]
    }

    /// `|r′(t)|`
    pub fn speed(&self, t: f64) -> f64 {
        self.x[1].eval(&[t]).hypot(self.y[1].eval(&[t]))
    }

    /// `(x′y″ − y′x″)/|r′|³`
    pub fn curvature_at(&self, t: f64) -> f64 {
        let (x1, x2) = (self.x[1].eval(&[t]), self.x[2].eval(&[t]));
        let (y1, y2) = (self.y[1].eval(&[t]), self.y[2].eval(&[t]));
        (x1 * y2 - y1 * x2) / x1.hypot(y1).powi(3)
    }

    pub fn length(&self) -> f64 {
        self.table[PANELS]
    }

    /// Parameter at arclength `s` (taken modulo the length).
    pub fn t_of_s(&self, s: f64) -> f64 {
        let len = self.length();
        let s = s.rem_euclid(len);
        let k = self.table.partition_point(|&v| v <= s).clamp(1, PANELS) - 1;
        let h = TAU / PANELS as f64;
        let t0 = k as f64 * h;
        let (mut lo, mut hi) = (t0, t0 + h);
        let (s0, s1) = (self.table[k], self.table[k + 1]);
        let mut t = t0 + h * (s - s0) / (s1 - s0);
        let f = |t: f64| self.speed(t);
        for _ in 0..60 {
            let resid = s0 + adaptive_simpson(&f, t0, t, 1e-14) - s;
            if resid.abs() <= 1e-13 * len {
                break;
            }
            if resid > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let newton = t - resid / self.speed(t);
            t = if newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
        }
        t
    }

    /// Signed curvature at arclength `s`.
    pub fn curvature(&self, s: f64) -> f64 {
        self.curvature_at(self.t_of_s(s))
    }

    /// `k(s)` at `s = (i + offset) L / n`, `i = 0..n`.
    pub fn sample_curvature(&self, n: usize, offset: f64) -> Vec<f64> {
        let ds = self.length() / n as f64;
        (0..n)
            .map(|i| self.curvature((i as f64 + offset) * ds))
            .collect()
    }
}
