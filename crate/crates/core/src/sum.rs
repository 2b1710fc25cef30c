//! Fixed-order pairwise summation.

const BLOCK: usize = 8;

/// Sums `xs` by recursive halving; the reduction tree depends only on the length.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= BLOCK {
        let mut acc = 0.0;
        for &x in xs {
            acc += x;
        }
        return acc;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// `base^exp` for a nonnegative base; rejects negative bases instead of producing NaN.
pub fn pow_nonneg(base: f64, exp: f64) -> crate::Result<f64> {
    if base < 0.0 {
        return Err(crate::Error::NegativeBase(base));
    }
    Ok(base.powf(exp))
}
