//! Splitting `p(y,y;t)` by visits to `x` near the two ends of the path.
//!
//! With `T1`/`T2` the first/last visit to `x` before `t`:
//! `p1 = P(T1 > gamma, R(t) = y)`, `p2 = P(T2 < t - gamma, R(t) = y)`,
//! `p12` is the probability of both, and `p3 = p_yy - p1 - p2 + p12` is the
//! mass of paths that visit `x` in both end windows. All walks start at `y`.
//!
//! `p2` uses reversibility: the probability of avoiding `x` for `gamma`
//! steps from `z` and ending at `y` is `deg(y)/deg(z)` times the taboo
//! kernel from `y` evaluated at `z`.

use std::fmt::Write as _;

use super::{exact_horizon, KernelError, Semantics, Walk};
use crate::graph::WeightedGraph;
use crate::numeric::{g17, CompensatedSum};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decomposition {
    pub t: usize,
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub p12: f64,
    pub p_yy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionTable {
    pub gamma: usize,
    pub rows: Vec<Decomposition>,
}

impl DecompositionTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,p1,p2,p3,p12,p_yy\n");
        for r in &self.rows {
            writeln!(out, "{},{},{},{},{},{}", r.t, g17(r.p1), g17(r.p2), g17(r.p3), g17(r.p12), g17(r.p_yy)).unwrap();
        }
        out
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| u * v).collect::<CompensatedSum>().value()
}

/// The decomposition for every `t` with `2 gamma < t <= T`.
pub fn visit_decomposition_series(
    g: &WeightedGraph,
    x: usize,
    y: usize,
    t_max: usize,
    gamma: usize,
) -> Result<DecompositionTable, KernelError> {
    let n = g.vertex_count();
    if x >= n || y >= n {
        return Err(KernelError::VertexOutOfRange(x.max(y)));
    }
    if x == y {
        return Err(KernelError::SameVertex);
    }
    if 2 * gamma >= t_max {
        return Err(KernelError::GammaTooLarge { gamma, t: t_max });
    }
    let achievable = exact_horizon(g, y);
    if t_max > achievable {
        return Err(KernelError::HorizonShortfall { requested: t_max, achievable });
    }
    let walk = Walk::new(g, Semantics::Lazy)?;
    let mut free = walk.evolve_from(y)?;
    let mut avoid = walk.evolve_from(y)?.with_taboo(Some(x));
    for _ in 0..gamma {
        free.step();
        avoid.step();
    }
    avoid.set_taboo(None);
    let dy = g.degree(y);
    let weight: Vec<f64> = avoid
        .current()
        .iter()
        .enumerate()
        .map(|(z, &c)| if c == 0.0 { 0.0 } else { dy / g.degree(z) * c })
        .collect();

    // index s - gamma
    let mut free_dot = vec![dot(free.current(), &weight)];
    let mut avoid_dot = vec![dot(avoid.current(), &weight)];
    let mut rows = Vec::with_capacity(t_max - 2 * gamma);
    for t in gamma + 1..=t_max {
        free.step();
        avoid.step();
        free_dot.push(dot(free.current(), &weight));
        avoid_dot.push(dot(avoid.current(), &weight));
        if t > 2 * gamma {
            let p_yy = free.current()[y];
            let p1 = avoid.current()[y];
            let p2 = free_dot[t - 2 * gamma];
            let p12 = avoid_dot[t - 2 * gamma];
            rows.push(Decomposition { t, p1, p2, p3: p_yy - p1 - p2 + p12, p12, p_yy });
        }
    }
    Ok(DecompositionTable { gamma, rows })
}

/// The decomposition at a single time `t`.
pub fn visit_decomposition(
    g: &WeightedGraph,
    x: usize,
    y: usize,
    t: usize,
    gamma: usize,
) -> Result<Decomposition, KernelError> {
    let table = visit_decomposition_series(g, x, y, t, gamma)?;
    Ok(*table.rows.last().expect("t > 2 gamma leaves at least one row"))
}
