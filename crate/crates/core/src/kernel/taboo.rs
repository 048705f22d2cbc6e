//! Taboo evolution, first returns and escape probabilities.

use super::{estimate_alpha, exact_horizon, heat_kernel_diag, DistributionVector, KernelError, KernelSeries, Semantics, Walk};
use crate::graph::WeightedGraph;
use crate::numeric::{CompensatedSum, Interval};

/// Result of evolving with absorption at a taboo vertex.
#[derive(Debug, Clone)]
pub struct TabooRun {
    /// `absorbed[t]` is the mass that entered the taboo vertex at step `t`.
    pub absorbed: Vec<f64>,
    /// `survival[t]` is the mass that has avoided the taboo vertex through `t`.
    pub survival: Vec<f64>,
    /// Surviving distribution at the final time.
    pub last: DistributionVector,
}

/// Lazy evolution from `start` for `T` steps, removing all mass that lands
/// on `taboo`.
pub fn taboo_kernel(g: &WeightedGraph, start: usize, taboo: usize, t_max: usize) -> Result<TabooRun, KernelError> {
    if start == taboo {
        return Err(KernelError::StartIsTaboo);
    }
    if taboo >= g.vertex_count() {
        return Err(KernelError::VertexOutOfRange(taboo));
    }
    let walk = Walk::new(g, Semantics::Lazy)?;
    let mut ev = walk.evolve_from(start)?.with_taboo(Some(taboo));
    let mut absorbed = vec![0.0];
    let mut survival = vec![1.0];
    let mut lost = CompensatedSum::new();
    for _ in 0..t_max {
        let a = ev.step();
        lost.add(a);
        absorbed.push(a);
        survival.push(1.0 - lost.value());
    }
    Ok(TabooRun { absorbed, survival, last: ev.into_distribution() })
}

/// `P_from(walk reaches to before returning to from)`, accumulated over the
/// first `T` steps. A lazy stay at `from` counts as a return.
pub fn traversal_probability(g: &WeightedGraph, from: usize, to: usize, t_max: usize) -> Result<f64, KernelError> {
    if from == to {
        return Err(KernelError::SameVertex);
    }
    if to >= g.vertex_count() {
        return Err(KernelError::VertexOutOfRange(to));
    }
    let walk = Walk::new(g, Semantics::Lazy)?;
    let mut ev = walk.evolve_from(from)?.with_taboo(Some(from));
    let mut hit = CompensatedSum::new();
    for _ in 0..t_max {
        ev.step();
        hit.add(std::mem::take(&mut ev.current_mut()[to]));
    }
    Ok(hit.value())
}

/// First-return probabilities `f(t)` for `t = 0..=T` (`f(0) = 0`) by the
/// renewal identity `p(t) = sum_{s=1}^t f(s) p(t-s)`.
pub fn first_return_renewal(p: &KernelSeries) -> Vec<f64> {
    let p = &p.values;
    let mut f = vec![0.0; p.len()];
    for t in 1..p.len() {
        let mut acc = CompensatedSum::new();
        acc.add(p[t]);
        for s in 1..t {
            acc.add(-f[s] * p[t - s]);
        }
        f[t] = acc.value();
    }
    f
}

/// First-return probabilities by one step from `x` followed by evolution with
/// absorption at `x`.
pub fn first_return_taboo(g: &WeightedGraph, x: usize, t_max: usize) -> Result<Vec<f64>, KernelError> {
    let walk = Walk::new(g, Semantics::Lazy)?;
    let mut ev = walk.evolve_from(x)?.with_taboo(Some(x));
    let mut f = vec![0.0];
    for _ in 0..t_max {
        f.push(ev.step());
    }
    Ok(f)
}

#[derive(Debug, Clone)]
pub struct FirstReturn {
    pub f: Vec<f64>,
    pub diagonal: KernelSeries,
    /// Largest pointwise gap between the two routes.
    pub max_disagreement: f64,
}

pub const FIRST_RETURN_TOLERANCE: f64 = 1e-10;

/// First-return series computed both ways; disagreement beyond
/// [`FIRST_RETURN_TOLERANCE`] is an error.
pub fn first_return(g: &WeightedGraph, x: usize, t_max: usize) -> Result<FirstReturn, KernelError> {
    let diagonal = heat_kernel_diag(g, x, t_max, Semantics::Lazy)?;
    let renewal = first_return_renewal(&diagonal);
    let f = first_return_taboo(g, x, t_max)?;
    let mut max_disagreement: f64 = 0.0;
    for t in 1..=t_max {
        let gap = (renewal[t] - f[t]).abs();
        if gap > FIRST_RETURN_TOLERANCE {
            return Err(KernelError::FirstReturnDisagreement { t, renewal: renewal[t], taboo: f[t] });
        }
        max_disagreement = max_disagreement.max(gap);
    }
    Ok(FirstReturn { f, diagonal, max_disagreement })
}

/// Escape probability bounds from a finite horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct EscapeEstimate {
    pub interval: Interval,
    /// `1 / (sum_{t<=T} p(t) + tail)`, clamped into the interval.
    pub point: f64,
    /// `C t^{-d/2}` summed over `t > T`; infinite when `d_eff <= 2`.
    pub tail: f64,
    /// The tail bound is at least 1, so the lower bound is vacuous.
    pub horizon_too_small: bool,
    pub horizon: usize,
    pub c_hat: f64,
}

/// Combines a diagonal series and first-return series into an escape
/// interval, bounding the unseen tail by `c_hat t^{-d_eff/2}`.
pub fn escape_from_series(p: &KernelSeries, f: &[f64], d_eff: usize, c_hat: f64) -> Result<EscapeEstimate, KernelError> {
    let t_max = p.horizon();
    if t_max == 0 {
        return Err(KernelError::EmptyWindow);
    }
    if f.len() <= t_max {
        return Err(KernelError::SeriesTooShort { have: f.len(), need: t_max + 1 });
    }
    let returned: f64 = f[1..=t_max].iter().copied().collect::<CompensatedSum>().value();
    let upper = (1.0 - returned).clamp(0.0, 1.0);
    let half_d = d_eff as f64 / 2.0;
    let tail = if half_d > 1.0 {
        // sum_{t>T} t^{-a} <= int_T^inf t^{-a} dt
        c_hat * (t_max as f64).powf(1.0 - half_d) / (half_d - 1.0)
    } else {
        f64::INFINITY
    };
    let horizon_too_small = tail >= 1.0;
    let lower = (upper - tail).max(0.0);
    let green: f64 = p.values.iter().copied().collect::<CompensatedSum>().value();
    let point = (1.0 / (green + tail)).clamp(lower, upper);
    if horizon_too_small {
        log::info!("escape tail bound {tail} exceeds 1 at T={t_max}; lower bound is vacuous");
    }
    Ok(EscapeEstimate { interval: Interval::new(lower, upper), point, tail, horizon_too_small, horizon: t_max, c_hat })
}

/// Escape probability of the lazy walk from `x`, from `T` exact steps.
pub fn escape_prob(g: &WeightedGraph, x: usize, t_max: usize, d_eff: usize) -> Result<EscapeEstimate, KernelError> {
    if t_max == 0 {
        return Err(KernelError::EmptyWindow);
    }
    let achievable = exact_horizon(g, x);
    if t_max > achievable {
        return Err(KernelError::HorizonShortfall { requested: t_max, achievable });
    }
    let fr = first_return(g, x, t_max)?;
    let c_hat = estimate_alpha(&fr.diagonal, d_eff)?;
    escape_from_series(&fr.diagonal, &fr.f, d_eff, c_hat)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{enumerate_graph, glue, glue_unweighted, path_graph, BoxSpec};

    fn two_points(delta: f64) -> WeightedGraph {
        let pt = enumerate_graph(|p| p[0] == 0, &BoxSpec::cube(1, 1).unwrap()).unwrap();
        glue(&pt, &pt, delta).unwrap()
    }

    #[test]
    fn two_vertex_survival_halves() {
        let g = two_points(0.5);
        let run = taboo_kernel(&g, 1, 0, 10).unwrap();
        for t in 0..=10 {
            assert_eq!(run.survival[t], 0.5f64.powi(t as i32));
        }
        assert_eq!(taboo_kernel(&g, 0, 0, 3).unwrap_err(), KernelError::StartIsTaboo);
    }

    #[test]
    fn path_survival_two_steps() {
        // x - y - z, start at y
        let g = path_graph(3);
        let run = taboo_kernel(&g, 1, 0, 2).unwrap();
        assert_eq!(run.survival[1], 0.75);
        assert_eq!(run.survival[2], 0.625);
    }

    #[test]
    fn unreachable_taboo_matches_plain_kernel() {
        let g = path_graph(20);
        let run = taboo_kernel(&g, 0, 19, 10).unwrap();
        let plain = heat_kernel_diag(&g, 0, 10, Semantics::Lazy).unwrap();
        assert_eq!(run.survival[10], 1.0);
        assert_eq!(run.last.get(0), plain.at(10));
    }

    #[test]
    fn z1_first_returns() {
        let g = enumerate_graph(|_| true, &BoxSpec::cube(1, 30).unwrap()).unwrap();
        let fr = first_return(&g, g.x().unwrap(), 30).unwrap();
        assert_eq!(fr.f[1], 0.5);
        assert_eq!(fr.f[2], 0.125);
        assert_eq!(fr.f[3], 0.0625);
        assert!(fr.max_disagreement < 1e-15);
    }

    #[test]
    fn two_vertex_first_return_is_geometric() {
        let g = two_points(0.3);
        let fr = first_return(&g, 0, 40).unwrap();
        for t in 1..=40 {
            assert!((fr.f[t] - 0.5f64.powi(t as i32)).abs() < 1e-15);
        }
        let est = escape_from_series(&fr.diagonal, &fr.f, 0, 1.0).unwrap();
        assert!(est.interval.upper < 1e-11);
        assert_eq!(est.interval.lower, 0.0);
    }

    #[test]
    fn recurrent_upper_bound_shrinks() {
        let g = enumerate_graph(|_| true, &BoxSpec::cube(1, 400).unwrap()).unwrap();
        let x = g.x().unwrap();
        let a = escape_prob(&g, x, 50, 1).unwrap();
        let b = escape_prob(&g, x, 400, 1).unwrap();
        assert!(b.interval.upper < a.interval.upper);
        assert!(b.interval.upper < 0.03);
        assert!(b.horizon_too_small && b.interval.lower == 0.0);
    }

    #[test]
    fn escape_requires_exact_horizon() {
        let g = path_graph(10);
        let g = glue(&g, &g, 0.5).unwrap();
        assert_eq!(escape_prob(&g, g.x().unwrap(), 5, 3).unwrap().horizon, 5);
        let z = enumerate_graph(|_| true, &BoxSpec::cube(2, 4).unwrap()).unwrap();
        assert!(matches!(
            escape_prob(&z, z.x().unwrap(), 10, 2),
            Err(KernelError::HorizonShortfall { requested: 10, achievable: 4 })
        ));
    }

    #[test]
    fn single_edge_traversal() {
        let z = enumerate_graph(|_| true, &BoxSpec::cube(2, 3).unwrap()).unwrap();
        let g = glue(&z, &z, 0.25).unwrap();
        let p = traversal_probability(&g, g.x().unwrap(), g.y().unwrap(), 5).unwrap();
        assert!((p - 0.5 * 0.25 / 4.25).abs() < 1e-16);
    }

    #[test]
    fn segment_traversal_decreases_in_length() {
        let pt = enumerate_graph(|p| p[0].abs() <= 3, &BoxSpec::cube(1, 3).unwrap()).unwrap();
        let mut prev = f64::INFINITY;
        for len in 1..=6 {
            let g = glue_unweighted(&pt, &pt, len).unwrap();
            let p = traversal_probability(&g, g.x().unwrap(), g.y().unwrap(), 20_000).unwrap();
            // gambler's ruin along the segment: 1/2 * 1/deg(x) * 1/len
            assert!((p - 0.5 / 3.0 / len as f64).abs() < 1e-9, "len {len}: {p}");
            assert!(p < prev);
            prev = p;
        }
    }
}
