/// Second-order jet of the unit normal field `n = ∇f/|∇f|` at a point,
/// assembled from the numeric first, second and third derivatives of `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalJet {
    pub n: Vec<f64>,
    /// `∂_a n_i` at `i·d + a`.
    pub first: Vec<f64>,
    /// `∂_a ∂_b n_i` at `(i·d + a)·d + b`.
    pub second: Vec<f64>,
    pub grad_norm: f64,
}

impl NormalJet {
    /// `g`, `h`, `t` are the gradient, Hessian (row-major) and third
    /// derivative tensor of `f`; `|g|` must be nonzero.
    pub fn from_derivatives(g: &[f64], h: &[f64], t: &[f64]) -> Self {
        let d = g.len();
        let q: f64 = g.iter().map(|v| v * v).sum();
        let s = q.powf(-0.5);
        // q_a = 2 Σ_k g_k H_ka, q_ab = 2 Σ_k (H_ka H_kb + g_k T_kab)
        let qa: Vec<f64> = (0..d)
            .map(|a| 2.0 * (0..d).map(|k| g[k] * h[k * d + a]).sum::<f64>())
            .collect();
        let mut qab = vec![0.0; d * d];
        for a in 0..d {
            for b in 0..d {
                qab[a * d + b] = 2.0
                    * (0..d)
                        .map(|k| h[k * d + a] * h[k * d + b] + g[k] * t[(k * d + a) * d + b])
                        .sum::<f64>();
            }
        }
        // s = q^{-1/2} and its derivatives
        let q32 = q.powf(-1.5);
        let q52 = q.powf(-2.5);
        let sa: Vec<f64> = qa.iter().map(|v| -0.5 * q32 * v).collect();
        let mut sab = vec![0.0; d * d];
        for a in 0..d {
            for b in 0..d {
                sab[a * d + b] = 0.75 * q52 * qa[a] * qa[b] - 0.5 * q32 * qab[a * d + b];
            }
        }
        let n: Vec<f64> = g.iter().map(|v| v * s).collect();
        let mut first = vec![0.0; d * d];
        let mut second = vec![0.0; d * d * d];
        for i in 0..d {
            for a in 0..d {
                first[i * d + a] = h[i * d + a] * s + g[i] * sa[a];
                for b in 0..d {
                    second[(i * d + a) * d + b] = t[(i * d + a) * d + b] * s
                        + h[i * d + a] * sa[b]
                        + h[i * d + b] * sa[a]
                        + g[i] * sab[a * d + b];
                }
            }
        }
        NormalJet {
            n,
            first,
            second,
            grad_norm: q.sqrt(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n.len()
    }

    /// `∂_a n_i`
    pub fn dn(&self, i: usize, a: usize) -> f64 {
        self.first[i * self.dim() + a]
    }

    /// `∂_a ∂_b n_i`
    pub fn ddn(&self, i: usize, a: usize, b: usize) -> f64 {
        let d = self.dim();
        self.second[(i * d + a) * d + b]
    }

    /// `div n`
    pub fn div(&self) -> f64 {
        (0..self.dim()).map(|i| self.dn(i, i)).sum()
    }

    /// `(n·∇) n_i`
    pub fn drift(&self, i: usize) -> f64 {
        (0..self.dim()).map(|k| self.n[k] * self.dn(i, k)).sum()
    }

    /// `Σ_i ∂_i ((n·∇) n_i) = Σ_{i,k} (∂_i n_k ∂_k n_i + n_k ∂_i ∂_k n_i)`
    pub fn div_drift(&self) -> f64 {
        let d = self.dim();
        let mut acc = 0.0;
        for i in 0..d {
            for k in 0..d {
                acc += self.dn(k, i) * self.dn(i, k) + self.n[k] * self.ddn(i, i, k);
            }
        }
        acc
    }
}
