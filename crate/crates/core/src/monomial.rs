//! Generalized Taylor monomials `h_k(t, s)` tabulated over all grid pairs.

use crate::timescale::TimeScale;
use crate::{Error, Result};

/// Dense table of `h_k(t_i, t_j)` for `0 <= k <= max_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct MonomialTable {
    max_k: usize,
    n: usize,
    values: Vec<f64>,
}

impl MonomialTable {
    /// Builds the table by the recursion `h_{k+1}(t, s) = int_s^t h_k(u, s) Delta u`.
    ///
    /// For a fixed `s` the integral is accumulated outward from `s`, one grid step at a time,
    /// in both directions (signed below `s`).
    pub fn build(ts: &TimeScale, max_k: usize) -> Self {
        let n = ts.len();
        let mut values = vec![0.0; (max_k + 1) * n * n];
        values[..n * n].iter_mut().for_each(|v| *v = 1.0);
        for k in 0..max_k {
            let (prev, next) = values.split_at_mut((k + 1) * n * n);
            let prev = &prev[k * n * n..];
            let next = &mut next[..n * n];
            for j in 0..n {
                next[j * n + j] = 0.0;
                for i in j + 1..n {
                    next[i * n + j] = next[(i - 1) * n + j] + prev[(i - 1) * n + j] * ts.mu(i - 1);
                }
                for i in (0..j).rev() {
                    next[i * n + j] = next[(i + 1) * n + j] - prev[i * n + j] * ts.mu(i);
                }
            }
        }
        MonomialTable { max_k, n, values }
    }

    pub fn max_k(&self) -> usize {
        self.max_k
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// `h_k(t_t, t_s)`.
    pub fn eval(&self, k: usize, t: usize, s: usize) -> Result<f64> {
        if k > self.max_k {
            return Err(Error::OrderTooHigh { k, max: self.max_k });
        }
        for idx in [t, s] {
            if idx >= self.n {
                return Err(Error::IndexOutOfRange { index: idx, len: self.n });
            }
        }
        Ok(self.get(k, t, s))
    }

    /// Unchecked lookup for hot loops.
    #[inline]
    pub fn get(&self, k: usize, t: usize, s: usize) -> f64 {
        self.values[(k * self.n + t) * self.n + s]
    }
}
