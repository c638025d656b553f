//! Order-fixed reductions.
//!
//! Every floating-point reduction in the crate goes through these helpers so
//! results do not depend on the number of worker threads: parallel work only
//! ever produces per-item values, which are then combined by a pairwise tree
//! whose shape depends on the slice length alone.

use rayon::prelude::*;

const LEAF: usize = 64;

/// Pairwise (cascade) summation with a fixed tree shape.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= LEAF {
        let mut s = 0.0;
        for &x in xs {
            s += x;
        }
        return s;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Evaluates `f` on `0..len` in parallel and reduces the values pairwise.
pub fn par_map_sum<F>(len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let vals: Vec<f64> = (0..len).into_par_iter().map(f).collect();
    pairwise_sum(&vals)
}

/// Numerically stable `log(sum_j exp(a_j))`.
pub fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    let shifted: Vec<f64> = terms.iter().map(|&a| (a - max).exp()).collect();
    max + pairwise_sum(&shifted).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_exact_integers() {
        let xs: Vec<f64> = (1..=10_000).map(|k| k as f64).collect();
        assert_eq!(pairwise_sum(&xs), 50_005_000.0);
    }

    #[test]
    fn par_map_sum_is_thread_count_independent() {
        let f = |i: usize| ((i as f64) * 0.37).sin() / (1.0 + i as f64);
        let a = par_map_sum(100_003, f);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| par_map_sum(100_003, f));
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn log_sum_exp_handles_large_magnitudes() {
        let v = log_sum_exp(&[1000.0, 1000.0]);
        assert!((v - (1000.0 + 2f64.ln())).abs() < 1e-12);
        assert_eq!(log_sum_exp(&[f64::NEG_INFINITY]), f64::NEG_INFINITY);
    }
}
