//! Closed-form return probabilities of the lazy walk on the infinite `Z^d`.
//!
//! A lazy step on `Z^d` picks an axis uniformly and then takes a lazy step
//! along it (stay 1/2, move 1/4 each way). The axis choices are multinomial
//! and the coordinates are independent given them, so
//! `p_d(t) = sum_j Binom(t, 1/d)(j) P_1(j) p_{d-1}(t-j)` where
//! `P_1(n) = C(2n, n) / 4^n` is the one-dimensional lazy return probability.
//! This reaches horizons in the thousands at `O(d T^2)` cost, far beyond what
//! an explicit box allows.

use super::{KernelSeries, Semantics};
use crate::numeric::{binomial_pmf, CompensatedSum};

/// `C(2n, n) / 4^n` for `n = 0..=T`.
pub fn lazy_return_1d(t_max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(t_max + 1);
    let mut p = 1.0;
    out.push(p);
    for n in 1..=t_max {
        p *= (2 * n - 1) as f64 / (2 * n) as f64;
        out.push(p);
    }
    out
}

/// `p(0,0;t)` of the lazy walk on `Z^d` for `t = 0..=T`; exact at every `t`.
pub fn lazy_diagonal(d: usize, t_max: usize) -> KernelSeries {
    let one = lazy_return_1d(t_max);
    let mut prev = vec![1.0; t_max + 1];
    for k in 1..=d {
        let q = 1.0 / k as f64;
        let mut next = vec![0.0; t_max + 1];
        for (t, slot) in next.iter_mut().enumerate() {
            let w = binomial_pmf(t, q);
            *slot = (0..=t).map(|j| w[j] * one[j] * prev[t - j]).collect::<CompensatedSum>().value();
        }
        prev = next;
    }
    KernelSeries { values: prev, exact_horizon: usize::MAX, semantics: Semantics::Lazy }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{enumerate_graph, BoxSpec};
    use crate::kernel::heat_kernel_diag;

    #[test]
    fn one_dimension() {
        let s = lazy_diagonal(1, 3);
        assert_eq!(s.values, vec![1.0, 0.5, 0.375, 0.3125]);
    }

    #[test]
    fn zero_dimension_is_constant() {
        assert!(lazy_diagonal(0, 10).values.iter().all(|&p| p == 1.0));
    }

    #[test]
    fn matches_graph_stepping() {
        for d in 1..=3 {
            let r = 12;
            let g = enumerate_graph(|_| true, &BoxSpec::cube(d, r).unwrap()).unwrap();
            let stepped = heat_kernel_diag(&g, g.x().unwrap(), r as usize, Semantics::Lazy).unwrap();
            let closed = lazy_diagonal(d, r as usize);
            for t in 0..=r as usize {
                assert!((stepped.at(t) - closed.at(t)).abs() < 1e-15, "d={d} t={t}");
            }
        }
    }
}
