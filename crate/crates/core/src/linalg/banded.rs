use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{jacobi_eigen, LinalgError};

/// Symmetric band matrix, lower band stored row by row.
///
/// Row `i` holds `A[i][i-d]` at offset `d` for `d = 0..=bandwidth`.
#[derive(Debug, Clone)]
pub struct BandedSym {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl BandedSym {
    pub fn zeros(n: usize, bandwidth: usize) -> Self {
        BandedSym {
            n,
            bw: bandwidth,
            data: vec![0.0; n * (bandwidth + 1)],
        }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        let d = i - j;
        (d <= self.bw).then_some(i * (self.bw + 1) + d)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.slot(i, j).map_or(0.0, |k| self.data[k])
    }

    /// Adds `v` to `A[i][j]` (and thereby to `A[j][i]`).
    ///
    /// Panics if `(i, j)` lies outside the band.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self
            .slot(i, j)
            .unwrap_or_else(|| panic!("entry ({i}, {j}) outside bandwidth {}", self.bw));
        self.data[k] += v;
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        let w = self.bw + 1;
        y.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..self.n {
            let row = &self.data[i * w..(i + 1) * w];
            y[i] += row[0] * x[i];
            for d in 1..=self.bw.min(i) {
                let a = row[d];
                y[i] += a * x[i - d];
                y[i - d] += a * x[i];
            }
        }
    }

    /// Gershgorin interval `(lo, hi)` enclosing the spectrum.
    pub fn gershgorin_bounds(&self) -> (f64, f64) {
        let mut radius = vec![0.0; self.n];
        let w = self.bw + 1;
        for i in 0..self.n {
            for d in 1..=self.bw.min(i) {
                let a = self.data[i * w + d].abs();
                radius[i] += a;
                radius[i - d] += a;
            }
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..self.n {
            let c = self.data[i * w];
            lo = lo.min(c - radius[i]);
            hi = hi.max(c + radius[i]);
        }
        (lo, hi)
    }

    /// Cholesky factor of `A - shift·I`.
    pub fn cholesky_shifted(&self, shift: f64) -> Result<BandedCholesky, LinalgError> {
        let n = self.n;
        let bw = self.bw;
        let w = bw + 1;
        let mut l = self.data.clone();
        for i in 0..n {
            l[i * w] -= shift;
        }
        for i in 0..n {
            let j0 = i.saturating_sub(bw);
            for j in j0..=i {
                let k0 = j0.max(j.saturating_sub(bw));
                let mut s = l[i * w + (i - j)];
                for k in k0..j {
                    s -= l[i * w + (i - k)] * l[j * w + (j - k)];
                }
                if j == i {
                    if s <= 0.0 || !s.is_finite() {
                        return Err(LinalgError::NotPositiveDefinite { row: i, pivot: s });
                    }
                    l[i * w] = s.sqrt();
                } else {
                    l[i * w + (i - j)] = s / l[j * w];
                }
            }
        }
        Ok(BandedCholesky { n, bw, l })
    }

    /// Lowest `count` eigenpairs by shift-invert subspace iteration.
    ///
    /// `lower_bound` must lie strictly below the smallest eigenvalue; the
    /// factorization fails otherwise.
    pub fn lowest_eigenpairs(
        &self,
        count: usize,
        lower_bound: f64,
        opts: &EigenOptions,
    ) -> Result<Eigenpairs, LinalgError> {
        let n = self.n;
        if count == 0 || count > n {
            return Err(LinalgError::TooManyEigenpairs {
                requested: count,
                order: n,
            });
        }
        let chol = self.cholesky_shifted(lower_bound)?;
        let p = (2 * count + 2).max(count + 6).min(n);
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let mut x: Vec<Vec<f64>> = (0..p)
            .map(|_| (0..n).map(|_| rng.random::<f64>() - 0.5).collect())
            .collect();
        orthonormalize(&mut x);

        let (_, hi) = self.gershgorin_bounds();
        let scale = hi.abs().max(lower_bound.abs()).max(1.0);
        let mut locked = 0;
        let mut ax = vec![vec![0.0; n]; p];
        let mut worst = f64::INFINITY;
        for iter in 1..=opts.max_iter {
            for v in x.iter_mut().skip(locked) {
                chol.solve_in_place(v);
            }
            orthonormalize_from(&mut x, locked);
            for (v, av) in x.iter().zip(ax.iter_mut()) {
                self.matvec(v, av);
            }
            let mut h = vec![0.0; p * p];
            for i in 0..p {
                for j in i..p {
                    let s = dot(&x[i], &ax[j]);
                    h[i * p + j] = s;
                    h[j * p + i] = s;
                }
            }
            let (theta, y) = jacobi_eigen(&h, p);
            x = combine(&x, &y, p);
            ax = combine(&ax, &y, p);

            let mut residuals = Vec::with_capacity(count);
            for k in 0..count {
                let r: f64 = x[k]
                    .iter()
                    .zip(&ax[k])
                    .map(|(v, av)| (av - theta[k] * v).powi(2))
                    .sum::<f64>()
                    .sqrt();
                residuals.push(r);
            }
            let tol = opts.tol * scale;
            locked = residuals.iter().take_while(|&&r| r <= tol).count();
            worst = residuals.iter().cloned().fold(0.0, f64::max);
            if locked == count {
                let vectors = x.into_iter().take(count).collect();
                return Ok(Eigenpairs {
                    values: theta[..count].to_vec(),
                    vectors,
                    iterations: iter,
                    max_residual: worst,
                });
            }
        }
        Err(LinalgError::NoConvergence {
            iterations: opts.max_iter,
            residual: worst,
        })
    }
}

/// Options for [`BandedSym::lowest_eigenpairs`].
#[derive(Debug, Clone, Copy)]
pub struct EigenOptions {
    /// Residual tolerance relative to the spectral scale of the matrix.
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions {
            tol: 1e-12,
            max_iter: 2000,
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Eigenpairs {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub iterations: usize,
    pub max_residual: f64,
}

#[derive(Debug, Clone)]
pub struct BandedCholesky {
    n: usize,
    bw: usize,
    l: Vec<f64>,
}

impl BandedCholesky {
    /// Overwrites `b` with the solution of `L Lᵀ x = b`.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let w = self.bw + 1;
        for i in 0..self.n {
            let mut s = b[i];
            for k in i.saturating_sub(self.bw)..i {
                s -= self.l[i * w + (i - k)] * b[k];
            }
            b[i] = s / self.l[i * w];
        }
        for i in (0..self.n).rev() {
            let mut s = b[i];
            for k in i + 1..(i + self.bw + 1).min(self.n) {
                s -= self.l[k * w + (k - i)] * b[k];
            }
            b[i] = s / self.l[i * w];
        }
    }
}

/// Ordering `0, N-1, 1, N-2, …` of a ring of `n` nodes.
///
/// Returns `position[node]`. Ring neighbours at distance `d` end up at most
/// `2d` positions apart, so periodic stencils become banded.
pub fn folded_ring_order(n: usize) -> Vec<usize> {
    let mut pos = vec![0; n];
    for (p, slot) in (0..n)
        .map(|p| if p % 2 == 0 { p / 2 } else { n - 1 - p / 2 })
        .enumerate()
    {
        pos[slot] = p;
    }
    pos
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn orthonormalize(x: &mut [Vec<f64>]) {
    orthonormalize_from(x, 0);
}

/// Modified Gram–Schmidt, applied twice, on vectors `from..`; earlier vectors
/// are assumed orthonormal already.
fn orthonormalize_from(x: &mut [Vec<f64>], from: usize) {
    for k in from..x.len() {
        let (done, rest) = x.split_at_mut(k);
        let v = &mut rest[0];
        for _ in 0..2 {
            for q in done.iter() {
                let c = dot(q, v);
                v.iter_mut().zip(q).for_each(|(a, b)| *a -= c * b);
            }
        }
        let norm = dot(v, v).sqrt();
        if norm > 0.0 {
            v.iter_mut().for_each(|a| *a /= norm);
        }
    }
}

fn combine(x: &[Vec<f64>], y: &[f64], p: usize) -> Vec<Vec<f64>> {
    let n = x[0].len();
    (0..p)
        .map(|col| {
            let mut out = vec![0.0; n];
            for (row, v) in x.iter().enumerate() {
                let c = y[row * p + col];
                if c != 0.0 {
                    out.iter_mut().zip(v).for_each(|(o, a)| *o += c * a);
                }
            }
            out
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn ring_laplacian(n: usize) -> BandedSym {
        let pos = folded_ring_order(n);
        let mut a = BandedSym::zeros(n, 2);
        for i in 0..n {
            let j = (i + 1) % n;
            a.add(pos[i], pos[i], 2.0);
            a.add(pos[i], pos[j], -1.0);
        }
        a
    }

    #[test]
    fn folded_order_is_a_permutation_with_small_gaps() {
        for n in [1, 2, 5, 8, 13] {
            let pos = folded_ring_order(n);
            let mut seen = pos.clone();
            seen.sort_unstable();
            assert_eq!(seen, (0..n).collect::<Vec<_>>());
            for i in 0..n {
                let j = (i + 1) % n;
                assert!(pos[i].abs_diff(pos[j]) <= 2);
            }
        }
    }

    #[test]
    fn cholesky_solves() {
        let a = ring_laplacian(9);
        let chol = a.cholesky_shifted(-0.5).unwrap();
        let x: Vec<f64> = (0..9).map(|i| (i as f64).sin()).collect();
        let mut b = vec![0.0; 9];
        a.matvec(&x, &mut b);
        b.iter_mut().zip(&x).for_each(|(b, x)| *b += 0.5 * x);
        chol.solve_in_place(&mut b);
        for (u, v) in b.iter().zip(&x) {
            assert!((u - v).abs() < 1e-13);
        }
        assert!(matches!(
            a.cholesky_shifted(0.5),
            Err(LinalgError::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn ring_spectrum_with_degeneracies() {
        let n = 40;
        let a = ring_laplacian(n);
        let pairs = a
            .lowest_eigenpairs(5, -0.1, &EigenOptions::default())
            .unwrap();
        let exact = |m: f64| 2.0 - 2.0 * (2.0 * PI * m / n as f64).cos();
        let expected = [0.0, exact(1.0), exact(1.0), exact(2.0), exact(2.0)];
        for (v, e) in pairs.values.iter().zip(expected) {
            assert!((v - e).abs() < 1e-11, "{v} vs {e}");
        }
    }
}
