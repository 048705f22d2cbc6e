//! Exact lazy-walk heat kernels on finite weighted graphs.
//!
//! The lazy walk stays put with probability 1/2 and otherwise moves along an
//! edge chosen proportionally to its weight. Distributions are stepped in
//! pull form, `out(u) = v(u)/2 + 1/2 sum_{w~u} v(w) weight(w,u)/deg(w)`, which
//! parallelizes over `u` without write contention.

mod decompose;
mod estimate;
mod ratio;
mod taboo;
pub mod zd;

use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{GraphError, WeightedGraph};
use crate::numeric::{binomial_pmf, CompensatedSum};

pub use decompose::{visit_decomposition, visit_decomposition_series, Decomposition, DecompositionTable};
pub use estimate::{estimate_alpha, estimate_beta};
pub use ratio::{ratio_experiment, RatioRow, RatioTable};
pub use taboo::{
    escape_from_series, escape_prob, first_return, first_return_renewal, first_return_taboo, taboo_kernel,
    traversal_probability, EscapeEstimate, FirstReturn, TabooRun,
};

/// Rows shorter than this are stepped sequentially.
const PAR_MIN_LEN: usize = 1 << 12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KernelError {
    #[error("vertex {0} has no incident edges")]
    IsolatedVertex(usize),
    #[error("vector has {got} entries, graph has {expected} vertices")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),
    #[error("start vertex equals the taboo vertex")]
    StartIsTaboo,
    #[error("x and y must be distinct")]
    SameVertex,
    #[error("series has {have} values, need {need}")]
    SeriesTooShort { have: usize, need: usize },
    #[error("expected a {expected} series")]
    WrongSemantics { expected: &'static str },
    #[error("first-return routes disagree at t={t}: renewal {renewal}, taboo {taboo}")]
    FirstReturnDisagreement { t: usize, renewal: f64, taboo: f64 },
    #[error("empty window")]
    EmptyWindow,
    #[error("first-return probability vanishes at t={0}")]
    ZeroFirstReturn(usize),
    #[error("requested horizon {requested} exceeds the exact horizon {achievable}")]
    HorizonShortfall { requested: usize, achievable: usize },
    #[error("gamma={gamma} must be below t/2 for t={t}")]
    GammaTooLarge { gamma: usize, t: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Semantics {
    Lazy,
    Simple,
}

impl Semantics {
    pub fn tag(self) -> &'static str {
        match self {
            Semantics::Lazy => "lazy",
            Semantics::Simple => "simple",
        }
    }
}

/// One probability mass per vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionVector(Vec<f64>);

impl DistributionVector {
    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn point_mass(n: usize, v: usize) -> Result<Self, KernelError> {
        if v >= n {
            return Err(KernelError::VertexOutOfRange(v));
        }
        let mut out = vec![0.0; n];
        out[v] = 1.0;
        Ok(Self(out))
    }

    pub fn from_vec(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, v: usize) -> f64 {
        self.0[v]
    }

    /// Total mass, compensated.
    pub fn mass(&self) -> f64 {
        self.0.iter().copied().collect::<CompensatedSum>().value()
    }
}

/// `p(t)` for `t = 0..=T` together with the largest `t` for which the
/// value is guaranteed to equal the untruncated graph's value.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSeries {
    pub values: Vec<f64>,
    /// `usize::MAX` when nothing was truncated.
    pub exact_horizon: usize,
    pub semantics: Semantics,
}

impl KernelSeries {
    /// Largest `t` in the series.
    pub fn horizon(&self) -> usize {
        self.values.len().saturating_sub(1)
    }

    pub fn is_exact(&self, t: usize) -> bool {
        t <= self.exact_horizon
    }

    pub fn at(&self, t: usize) -> f64 {
        self.values[t]
    }
}

/// Transition operator of a graph, with precomputed inverse degrees.
#[derive(Debug, Clone)]
pub struct Walk<'g> {
    g: &'g WeightedGraph,
    semantics: Semantics,
    inv_deg: Vec<f64>,
}

impl<'g> Walk<'g> {
    pub fn new(g: &'g WeightedGraph, semantics: Semantics) -> Result<Self, KernelError> {
        let inv_deg = g
            .degrees()
            .iter()
            .enumerate()
            .map(|(v, &d)| if d > 0.0 { Ok(1.0 / d) } else { Err(KernelError::IsolatedVertex(v)) })
            .collect::<Result<_, _>>()?;
        Ok(Self { g, semantics, inv_deg })
    }

    pub fn graph(&self) -> &'g WeightedGraph {
        self.g
    }

    pub fn semantics(&self) -> Semantics {
        self.semantics
    }

    /// `out = v P`. `scratch` holds `v / deg` and is resized as needed.
    pub fn step_into(&self, v: &[f64], scratch: &mut Vec<f64>, out: &mut [f64]) {
        let n = self.g.vertex_count();
        assert!(v.len() == n && out.len() == n);
        scratch.clear();
        scratch.extend(v.iter().zip(&self.inv_deg).map(|(a, b)| a * b));
        let (offsets, targets, weights) = self.g.csr();
        let vn = &scratch[..];
        let pull = |u: usize| -> f64 {
            let mut acc = 0.0;
            for k in offsets[u]..offsets[u + 1] {
                acc += weights[k] * vn[targets[k] as usize];
            }
            acc
        };
        match self.semantics {
            Semantics::Lazy => out
                .par_iter_mut()
                .enumerate()
                .with_min_len(PAR_MIN_LEN)
                .for_each(|(u, o)| *o = 0.5 * v[u] + 0.5 * pull(u)),
            Semantics::Simple => out
                .par_iter_mut()
                .enumerate()
                .with_min_len(PAR_MIN_LEN)
                .for_each(|(u, o)| *o = pull(u)),
        }
    }

    pub fn step(&self, v: &DistributionVector) -> Result<DistributionVector, KernelError> {
        let n = self.g.vertex_count();
        if v.len() != n {
            return Err(KernelError::DimensionMismatch { expected: n, got: v.len() });
        }
        let mut out = vec![0.0; n];
        self.step_into(v.as_slice(), &mut Vec::with_capacity(n), &mut out);
        Ok(DistributionVector(out))
    }

    /// Evolution from a point mass at `start`.
    pub fn evolve_from(&self, start: usize) -> Result<Evolution<'_, 'g>, KernelError> {
        let v = DistributionVector::point_mass(self.g.vertex_count(), start)?;
        Ok(self.evolve(v))
    }

    pub fn evolve(&self, v: DistributionVector) -> Evolution<'_, 'g> {
        let n = v.len();
        Evolution { walk: self, cur: v.0, next: vec![0.0; n], scratch: Vec::with_capacity(n), t: 0, taboo: None }
    }
}

/// A distribution advanced one step at a time, optionally absorbing all
/// mass that lands on a taboo vertex.
#[derive(Debug, Clone)]
pub struct Evolution<'w, 'g> {
    walk: &'w Walk<'g>,
    cur: Vec<f64>,
    next: Vec<f64>,
    scratch: Vec<f64>,
    t: usize,
    taboo: Option<usize>,
}

impl Evolution<'_, '_> {
    pub fn with_taboo(mut self, taboo: Option<usize>) -> Self {
        self.taboo = taboo;
        self
    }

    pub fn set_taboo(&mut self, taboo: Option<usize>) {
        self.taboo = taboo;
    }

    pub fn time(&self) -> usize {
        self.t
    }

    pub fn current(&self) -> &[f64] {
        &self.cur
    }

    pub fn current_mut(&mut self) -> &mut [f64] {
        &mut self.cur
    }

    /// Advances one step; returns the mass absorbed at the taboo vertex.
    pub fn step(&mut self) -> f64 {
        self.walk.step_into(&self.cur, &mut self.scratch, &mut self.next);
        std::mem::swap(&mut self.cur, &mut self.next);
        self.t += 1;
        match self.taboo {
            Some(x) => std::mem::take(&mut self.cur[x]),
            None => 0.0,
        }
    }

    pub fn mass(&self) -> f64 {
        self.cur.iter().copied().collect::<CompensatedSum>().value()
    }

    pub fn into_distribution(self) -> DistributionVector {
        DistributionVector(self.cur)
    }
}

/// One lazy step of `v` on `g`.
pub fn lazy_step(g: &WeightedGraph, v: &DistributionVector) -> Result<DistributionVector, KernelError> {
    Walk::new(g, Semantics::Lazy)?.step(v)
}

/// Exactness horizon of kernels started at `x`: its distance to the nearest
/// vertex whose neighborhood was cut by the enumeration box.
pub fn exact_horizon(g: &WeightedGraph, x: usize) -> usize {
    g.frontier_distance(x).unwrap_or(usize::MAX)
}

/// `p(x,x;t)` for `t = 0..=T`.
pub fn heat_kernel_diag(g: &WeightedGraph, x: usize, t_max: usize, semantics: Semantics) -> Result<KernelSeries, KernelError> {
    heat_kernel_between(g, x, x, t_max, semantics)
}

/// `p(x,y;t)` for `t = 0..=T`.
pub fn heat_kernel_between(
    g: &WeightedGraph,
    x: usize,
    y: usize,
    t_max: usize,
    semantics: Semantics,
) -> Result<KernelSeries, KernelError> {
    if y >= g.vertex_count() {
        return Err(KernelError::VertexOutOfRange(y));
    }
    let walk = Walk::new(g, semantics)?;
    let mut ev = walk.evolve_from(x)?;
    let mut values = Vec::with_capacity(t_max + 1);
    values.push(ev.current()[y]);
    let mut drift: f64 = 0.0;
    for t in 1..=t_max {
        ev.step();
        values.push(ev.current()[y]);
        if t % 256 == 0 || t == t_max {
            drift = drift.max((ev.mass() - 1.0).abs());
        }
    }
    if drift > 1e-12 * (1.0 + t_max as f64 / 1000.0) {
        log::warn!("mass drift {drift:e} after {t_max} steps from vertex {x}");
    }
    Ok(KernelSeries { values, exact_horizon: exact_horizon(g, x), semantics })
}

/// `p(x,x;t) = sum_i q(x,x;i) C(t,i) 2^-t` from a simple-walk series `q`.
pub fn binomial_lazy(q: &KernelSeries, t: usize) -> Result<f64, KernelError> {
    if q.semantics != Semantics::Simple {
        return Err(KernelError::WrongSemantics { expected: "simple" });
    }
    if q.values.len() <= t {
        return Err(KernelError::SeriesTooShort { have: q.values.len(), need: t + 1 });
    }
    let w = binomial_pmf(t, 0.5);
    Ok(w.iter().zip(&q.values).map(|(a, b)| a * b).collect::<CompensatedSum>().value())
}
