//! Numerical checks of the heat-kernel lemmas on concrete graphs and series.

use std::fmt;
use std::ops::RangeInclusive;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::WeightedGraph;
use crate::kernel::{KernelError, KernelSeries, RatioTable};
use crate::numeric::{format_g, g17, CompensatedSum};
use crate::schedule::ScaleSchedule;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error("empty window")]
    EmptyWindow,
    #[error("window ends at {end} but the series is exact only up to {horizon}")]
    BeyondHorizon { end: usize, horizon: usize },
    #[error("ball radius {radius} reaches the truncation boundary at distance {boundary}")]
    BallTooLarge { radius: usize, boundary: usize },
    #[error("every probe is constant on the ball")]
    AllProbesConstant,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("checkpoint t_{k} = {t} is beyond the table's exact horizon {horizon}")]
    CheckpointBeyondHorizon { k: usize, t: usize, horizon: usize },
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// Two-sided constants `c <= q(t) <= C` over a window.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundFit {
    pub c_lower: f64,
    pub c_upper: f64,
    pub window: (usize, usize),
    pub quantity: &'static str,
}

impl BoundFit {
    /// `C / c`.
    pub fn ratio(&self) -> f64 {
        self.c_upper / self.c_lower
    }

    fn over(quantity: &'static str, window: (usize, usize), values: impl Iterator<Item = f64>) -> Result<Self, VerifyError> {
        let (mut lo, mut hi, mut any) = (f64::INFINITY, f64::NEG_INFINITY, false);
        for v in values {
            lo = lo.min(v);
            hi = hi.max(v);
            any = true;
        }
        if !any {
            return Err(VerifyError::EmptyWindow);
        }
        Ok(Self { c_lower: lo, c_upper: hi, window, quantity })
    }
}

/// `min` and `max` of `p(t) t^{d_eff/2}` over the window.
pub fn check_delmotte(series: &KernelSeries, d_eff: usize, window: RangeInclusive<usize>) -> Result<BoundFit, VerifyError> {
    let (a, b) = (*window.start(), *window.end());
    if window.is_empty() || b >= series.values.len() {
        return Err(VerifyError::EmptyWindow);
    }
    if b > series.exact_horizon {
        return Err(VerifyError::BeyondHorizon { end: b, horizon: series.exact_horizon });
    }
    let e = d_eff as f64 / 2.0;
    BoundFit::over("p*t^(d/2)", (a, b), window.map(|t| series.values[t] * (t as f64).powf(e)))
}

/// Degree-weighted ball volumes `|B(x, r)|` for `r = 0..=r_max`.
fn ball_volumes(g: &WeightedGraph, dist: &[usize], r_max: usize) -> Vec<f64> {
    let mut vol = vec![CompensatedSum::new(); r_max + 1];
    for (v, &d) in dist.iter().enumerate() {
        if d <= r_max {
            vol[d].add(g.degree(v));
        }
    }
    let mut acc = 0.0;
    vol.iter()
        .map(|s| {
            acc += s.value();
            acc
        })
        .collect()
}

fn boundary_distance(g: &WeightedGraph, x: usize) -> usize {
    g.frontier_distance(x).unwrap_or(usize::MAX)
}

/// `|B(x,2r)| / |B(x,r)|` over the given radii; `c_lower`/`c_upper` are the
/// smallest and largest ratios.
pub fn check_volume_doubling(g: &WeightedGraph, x: usize, radii: &[usize]) -> Result<BoundFit, VerifyError> {
    let r_max = *radii.iter().max().ok_or(VerifyError::EmptyWindow)?;
    let boundary = boundary_distance(g, x);
    if 2 * r_max >= boundary {
        return Err(VerifyError::BallTooLarge { radius: 2 * r_max, boundary });
    }
    let dist = g.bfs_distances(x);
    let vol = ball_volumes(g, &dist, 2 * r_max);
    let r_min = *radii.iter().min().unwrap();
    BoundFit::over("|B(2r)|/|B(r)|", (r_min, r_max), radii.iter().map(|&r| vol[2 * r] / vol[r]))
}

/// Probe family for [`check_poincare`].
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeConfig {
    pub coordinates: bool,
    pub random: usize,
    pub power_iterates: usize,
    pub seed: u64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self { coordinates: true, random: 32, power_iterates: 8, seed: 0x5eed }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeKind {
    Coordinate(usize),
    Random(usize),
    PowerIterate(usize),
}

impl fmt::Display for ProbeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProbeKind::Coordinate(i) => write!(f, "coord{i}"),
            ProbeKind::Random(i) => write!(f, "random{i}"),
            ProbeKind::PowerIterate(i) => write!(f, "power{i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoincareResult {
    /// Largest ratio over the non-constant probes.
    pub value: f64,
    pub worst: ProbeKind,
    pub probes_used: usize,
}

/// The ball `B(x, 2r)` with local indexing.
pub struct Ball<'g> {
    g: &'g WeightedGraph,
    r: usize,
    /// Global ids of `B(x, 2r)`, ascending.
    members: Vec<usize>,
    dist: Vec<usize>,
    /// Edges of `G` with both ends in `B(x, 2r)`, as local index pairs.
    edges: Vec<(usize, usize, f64)>,
}

impl<'g> Ball<'g> {
    pub fn new(g: &'g WeightedGraph, x: usize, r: usize) -> Result<Self, VerifyError> {
        let boundary = boundary_distance(g, x);
        if 2 * r >= boundary {
            return Err(VerifyError::BallTooLarge { radius: 2 * r, boundary });
        }
        let all = g.bfs_distances(x);
        let mut local = vec![usize::MAX; g.vertex_count()];
        let mut members = Vec::new();
        let mut dist = Vec::new();
        for (v, &d) in all.iter().enumerate() {
            if d <= 2 * r {
                local[v] = members.len();
                members.push(v);
                dist.push(d);
            }
        }
        let edges = g
            .edges()
            .iter()
            .filter(|e| local[e.u] != usize::MAX && local[e.v] != usize::MAX)
            .map(|e| (local[e.u], local[e.v], e.weight))
            .collect();
        Ok(Self { g, r, members, dist, edges })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// `sum_{B(r)} deg |f - fbar|^2 / (r^2 sum_{E(B(2r))} (df)^2)`, `None`
    /// when `f` is constant on `B(2r)`'s edges.
    pub fn poincare_ratio(&self, f: &[f64]) -> Option<f64> {
        assert_eq!(f.len(), self.len());
        let inner = || (0..self.len()).filter(|&i| self.dist[i] <= self.r);
        let vol: f64 = inner().map(|i| self.g.degree(self.members[i])).sum();
        let mean = inner().map(|i| self.g.degree(self.members[i]) * f[i]).collect::<CompensatedSum>().value() / vol;
        let var = inner()
            .map(|i| self.g.degree(self.members[i]) * (f[i] - mean).powi(2))
            .collect::<CompensatedSum>()
            .value();
        let energy = self.edges.iter().map(|&(u, v, _)| (f[u] - f[v]).powi(2)).collect::<CompensatedSum>().value();
        let scale = f.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        if energy <= 1e-24 * scale * scale {
            return None;
        }
        Some(var / ((self.r * self.r) as f64 * energy))
    }

    /// One lazy step of the walk on the ball's own edges applied to `f`.
    fn diffuse(&self, f: &[f64], out: &mut [f64], deg: &[f64]) {
        for (o, &v) in out.iter_mut().zip(f) {
            *o = 0.5 * v;
        }
        for &(u, v, w) in &self.edges {
            out[u] += 0.5 * w * f[v] / deg[u];
            if u != v {
                out[v] += 0.5 * w * f[u] / deg[v];
            }
        }
    }

    fn probes(&self, cfg: &ProbeConfig) -> Vec<(ProbeKind, Vec<f64>)> {
        let n = self.len();
        let mut out = Vec::new();
        if cfg.coordinates {
            for i in 0..self.g.dim() {
                let f = self.members.iter().map(|&v| self.g.coords(v)[i] as f64).collect();
                out.push((ProbeKind::Coordinate(i), f));
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut start = Vec::new();
        for k in 0..cfg.random {
            let f: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            if k == 0 {
                start = f.clone();
            }
            out.push((ProbeKind::Random(k), f));
        }
        if cfg.power_iterates > 0 {
            if start.is_empty() {
                start = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            }
            let mut deg = vec![0.0; n];
            for &(u, v, w) in &self.edges {
                deg[u] += w;
                if u != v {
                    deg[v] += w;
                }
            }
            if deg.iter().all(|&d| d > 0.0) {
                let steps = (2 * self.r).pow(2).max(1);
                let mut f = start;
                let mut tmp = vec![0.0; n];
                for k in 0..cfg.power_iterates {
                    for _ in 0..steps {
                        self.diffuse(&f, &mut tmp, &deg);
                        std::mem::swap(&mut f, &mut tmp);
                    }
                    // project out constants in the stationary inner product, rescale
                    let total: f64 = deg.iter().sum();
                    let mean = f.iter().zip(&deg).map(|(a, b)| a * b).sum::<f64>() / total;
                    let norm = f.iter().fold(0.0f64, |m, v| m.max((v - mean).abs()));
                    if norm == 0.0 {
                        break;
                    }
                    for v in &mut f {
                        *v = (*v - mean) / norm;
                    }
                    out.push((ProbeKind::PowerIterate(k), f.clone()));
                }
            }
        }
        out
    }
}

/// Largest Poincaré ratio over the probe family on `B(x, r)` / `B(x, 2r)`.
pub fn check_poincare(g: &WeightedGraph, x: usize, r: usize, cfg: &ProbeConfig) -> Result<PoincareResult, VerifyError> {
    if r == 0 {
        return Err(VerifyError::Precondition("radius must be positive".into()));
    }
    let ball = Ball::new(g, x, r)?;
    let mut best: Option<(f64, ProbeKind)> = None;
    let mut used = 0;
    for (kind, f) in ball.probes(cfg) {
        if let Some(v) = ball.poincare_ratio(&f) {
            used += 1;
            if best.map_or(true, |(b, _)| v > b) {
                best = Some((v, kind));
            }
        }
    }
    let (value, worst) = best.ok_or(VerifyError::AllProbesConstant)?;
    Ok(PoincareResult { value, worst, probes_used: used })
}

/// Exponent constant `c` of the exponential term in the smoothing bound.
pub const SMOOTHING_C: f64 = 0.125;
/// Below this `t` smoothing fits are reported without judgment.
pub const SMOOTHING_MIN_T: usize = 16;

/// Smallest `C` with `|p(t) - p(s)| <= C (|t-s| log^3 t / sqrt t) p(t) + C exp(-log^2 t / 8)`.
pub fn check_lazy_smoothing(series: &KernelSeries, t: usize, s: usize) -> Result<f64, VerifyError> {
    let gap = t.abs_diff(s);
    if (gap * gap) as f64 > t as f64 {
        return Err(VerifyError::Precondition(format!("|t-s| = {gap} exceeds sqrt({t})")));
    }
    let need = t.max(s);
    if need >= series.values.len() {
        return Err(KernelError::SeriesTooShort { have: series.values.len(), need: need + 1 }.into());
    }
    if need > series.exact_horizon {
        return Err(VerifyError::BeyondHorizon { end: need, horizon: series.exact_horizon });
    }
    let diff = (series.values[t] - series.values[s]).abs();
    if diff == 0.0 {
        return Ok(0.0);
    }
    let lt = (t as f64).ln();
    let a = gap as f64 * lt.powi(3) / (t as f64).sqrt() * series.values[t];
    let b = (-SMOOTHING_C * lt * lt).exp();
    Ok(diff / (a + b))
}

/// Fitted smoothing constant at `t`: the maximum over every admissible `s`.
pub fn smoothing_profile(series: &KernelSeries, t: usize) -> Result<f64, VerifyError> {
    let w = (t as f64).sqrt().floor() as usize;
    let lo = t.saturating_sub(w);
    let mut best: f64 = 0.0;
    for s in lo..=t + w {
        best = best.max(check_lazy_smoothing(series, t, s)?);
    }
    Ok(best)
}

/// Outcome of one checkpoint of the oscillation inequalities.
#[derive(Debug, Clone, PartialEq)]
pub struct NkCheck {
    pub k: usize,
    pub t: usize,
    pub ratio: f64,
    /// `ratio >= factor` at even `k`, `ratio <= 1/factor` at odd `k`.
    pub expect_x_heavier: bool,
    pub threshold: f64,
    pub pass: bool,
}

/// Evaluates the checkpoint inequalities at every `t_k` the schedule defines.
pub fn check_nk(table: &RatioTable, sched: &ScaleSchedule, factor: f64) -> Result<Vec<NkCheck>, VerifyError> {
    if factor.is_nan() || factor <= 0.0 {
        return Err(VerifyError::Precondition(format!("factor {factor} must be positive")));
    }
    let mut out = Vec::new();
    for k in 2..=sched.len() {
        let Some(t) = sched.checkpoint(k) else { continue };
        let t = t as usize;
        if t > table.exact_horizon || t >= table.rows.len() {
            return Err(VerifyError::CheckpointBeyondHorizon { k, t, horizon: table.exact_horizon.min(table.rows.len().saturating_sub(1)) });
        }
        let ratio = table.rows[t].ratio;
        let even = k % 2 == 0;
        let (threshold, pass) = if even { (factor, ratio >= factor) } else { (1.0 / factor, ratio <= 1.0 / factor) };
        out.push(NkCheck { k, t, ratio, expect_x_heavier: even, threshold, pass });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Info,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Info => "INFO",
        })
    }
}

/// One report line: `name window value threshold STATUS`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportLine {
    pub name: String,
    pub window: String,
    pub value: f64,
    pub threshold: Option<f64>,
    pub status: Status,
}

impl ReportLine {
    pub fn judged(name: impl Into<String>, window: impl Into<String>, value: f64, threshold: f64, pass: bool) -> Self {
        let status = if pass { Status::Pass } else { Status::Fail };
        Self { name: name.into(), window: window.into(), value, threshold: Some(threshold), status }
    }

    pub fn info(name: impl Into<String>, window: impl Into<String>, value: f64) -> Self {
        Self { name: name.into(), window: window.into(), value, threshold: None, status: Status::Info }
    }
}

impl fmt::Display for ReportLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let th = self.threshold.map_or_else(|| "-".to_string(), |v| format_g(v, 6));
        write!(f, "{} {} {} {} {}", self.name, self.window, g17(self.value), th, self.status)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub lines: Vec<ReportLine>,
}

impl Report {
    pub fn push(&mut self, line: ReportLine) {
        self.lines.push(line);
    }

    pub fn any_failed(&self) -> bool {
        self.lines.iter().any(|l| l.status == Status::Fail)
    }

    pub fn render(&self) -> String {
        self.lines.iter().map(|l| format!("{l}\n")).collect()
    }
}

pub fn window_tag(a: usize, b: usize) -> String {
    format!("[{a},{b}]")
}
