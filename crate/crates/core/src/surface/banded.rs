//! Banded LU factorization with partial pivoting.
//!
//! Row `i` stores columns `i - kl ..= i + ku + kl`; the extra `kl` columns on
//! the right hold the fill produced by row interchanges.

use crate::error::{domain, Result};

#[derive(Debug, Clone)]
pub(crate) struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        BandMatrix { n, kl, ku, width, data: vec![0.0; n * width] }
    }

    fn idx(&self, i: usize, c: usize) -> usize {
        i * self.width + (c + self.kl - i)
    }

    /// Adds `v` to entry `(i, c)`; `c` must lie within the original band.
    pub fn add(&mut self, i: usize, c: usize, v: f64) {
        debug_assert!(c + self.kl >= i && c <= i + self.ku);
        let k = self.idx(i, c);
        self.data[k] += v;
    }

    #[cfg(test)]
    fn get(&self, i: usize, c: usize) -> f64 {
        if c + self.kl < i || c > i + self.ku + self.kl {
            0.0
        } else {
            self.data[self.idx(i, c)]
        }
    }

    /// Factors in place and returns the solver.
    pub fn factor(mut self) -> Result<BandLu> {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        let scale = self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let mut pivots = Vec::with_capacity(n);
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let mut piv = k;
            let mut best = self.data[self.idx(k, k)].abs();
            for r in k + 1..=last_row {
                let v = self.data[self.idx(r, k)].abs();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if !(best > 1e-300_f64.max(scale * 1e-15 * f64::EPSILON)) {
                return domain(format!("singular banded matrix at column {k}"));
            }
            pivots.push(piv);
            let last_col = (k + ku + kl).min(n - 1);
            if piv != k {
                for c in k..=last_col {
                    let (a, b) = (self.idx(k, c), self.idx(piv, c));
                    self.data.swap(a, b);
                }
            }
            let diag = self.data[self.idx(k, k)];
            for r in k + 1..=last_row {
                let ir = self.idx(r, k);
                let l = self.data[ir] / diag;
                self.data[ir] = l;
                if l == 0.0 {
                    continue;
                }
                let (row_k, row_r) = (self.idx(k, k), self.idx(r, k));
                for off in 1..=(last_col - k) {
                    self.data[row_r + off] -= l * self.data[row_k + off];
                }
            }
        }
        Ok(BandLu { m: self, pivots })
    }
}

pub(crate) struct BandLu {
    m: BandMatrix,
    pivots: Vec<usize>,
}

impl BandLu {
    pub fn solve(&self, rhs: &mut [f64]) {
        let BandMatrix { n, kl, ku, .. } = self.m;
        for k in 0..n {
            let piv = self.pivots[k];
            if piv != k {
                rhs.swap(k, piv);
            }
            let bk = rhs[k];
            for r in k + 1..=(k + kl).min(n - 1) {
                rhs[r] -= self.m.data[self.m.idx(r, k)] * bk;
            }
        }
        for k in (0..n).rev() {
            let mut s = rhs[k];
            for c in k + 1..=(k + ku + kl).min(n - 1) {
                s -= self.m.data[self.m.idx(k, c)] * rhs[c];
            }
            rhs[k] = s / self.m.data[self.m.idx(k, k)];
        }
    }
}
