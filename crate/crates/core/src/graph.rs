//! Finite weighted graphs realized from lattice membership predicates.
//!
//! [`enumerate_graph`] builds the induced subgraph of `Z^d` on the points of
//! a box that satisfy a predicate, restricted to the component of the origin.
//! Vertices are indexed lexicographically by coordinates (axis 0 most
//! significant), so every build is bit-stable.
//!
//! Vertices that would have had an extra neighbor if the box were larger are
//! recorded as *frontier* vertices; the lazy walk from `v` cannot feel the
//! truncation before it reaches one, which gives the exactness horizon used by
//! the kernel module.

use std::collections::VecDeque;
use std::fmt::Write as _;

use thiserror::Error;

use crate::numeric::g17;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("the origin is not a member of the region")]
    OriginExcluded,
    #[error("the origin lies outside the box")]
    OriginOutsideBox,
    #[error("empty graph")]
    Empty,
    #[error("box has {cells} cells, above the limit of {limit}")]
    BoxTooLarge { cells: u128, limit: u128 },
    #[error("invalid box: {0}")]
    InvalidBox(String),
    #[error("edge ({u}, {v}) has weight {w}, outside (0, 1]")]
    InvalidWeight { u: usize, v: usize, w: f64 },
    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),
    #[error("graph has no {0} marker")]
    MissingMarker(&'static str),
    #[error("glue weight {0} outside (0, 1]")]
    InvalidDelta(f64),
    #[error("segment length must be at least 1")]
    InvalidSegment,
    #[error("graphs have different ambient dimensions {0} and {1}")]
    DimensionMismatch(usize, usize),
    #[error("malformed graph dump, line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Which half of a glued graph a vertex belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Even,
    Odd,
    None,
}

impl Side {
    pub fn tag(self) -> &'static str {
        match self {
            Side::Even => "e",
            Side::Odd => "o",
            Side::None => "none",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "e" => Some(Side::Even),
            "o" => Some(Side::Odd),
            "none" => Some(Side::None),
            _ => None,
        }
    }
}

/// Axis-aligned box `lo_i <= n_i <= hi_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxSpec {
    lo: Vec<i64>,
    hi: Vec<i64>,
}

/// Upper bound on the number of box cells [`enumerate_graph`] will scan.
pub const MAX_BOX_CELLS: u128 = 1 << 31;

impl BoxSpec {
    /// `[-radius, radius]^d`.
    pub fn cube(d: usize, radius: i64) -> Result<Self, GraphError> {
        if radius < 1 {
            return Err(GraphError::InvalidBox(format!("radius {radius} < 1")));
        }
        Self::bounds(vec![-radius; d], vec![radius; d])
    }

    pub fn bounds(lo: Vec<i64>, hi: Vec<i64>) -> Result<Self, GraphError> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(GraphError::InvalidBox("bounds must have equal, non-zero length".into()));
        }
        if let Some(i) = (0..lo.len()).find(|&i| lo[i] > hi[i]) {
            return Err(GraphError::InvalidBox(format!("axis {i}: {} > {}", lo[i], hi[i])));
        }
        Ok(Self { lo, hi })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[i64] {
        &self.lo
    }

    pub fn hi(&self) -> &[i64] {
        &self.hi
    }

    pub fn cell_count(&self) -> u128 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| (h - l + 1) as u128)
            .fold(1u128, |acc, e| acc.saturating_mul(e))
    }

    pub fn contains(&self, p: &[i64]) -> bool {
        p.iter().zip(self.lo.iter().zip(&self.hi)).all(|(c, (l, h))| l <= c && c <= h)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

/// Finite undirected graph with positive edge weights in `(0, 1]`.
///
/// Adjacency is stored in CSR form; a self-loop `(u, u)` appears once in
/// `u`'s row and contributes its weight once to the degree.
#[derive(Debug, Clone)]
pub struct WeightedGraph {
    d: usize,
    coords: Vec<i64>,
    side: Vec<Side>,
    offsets: Vec<usize>,
    targets: Vec<u32>,
    weights: Vec<f64>,
    degree: Vec<f64>,
    edges: Vec<Edge>,
    frontier: Vec<bool>,
    x: Option<usize>,
    y: Option<usize>,
}

/// Incremental construction of a [`WeightedGraph`].
#[derive(Debug, Clone, Default)]
pub struct GraphBuilder {
    d: usize,
    coords: Vec<i64>,
    side: Vec<Side>,
    frontier: Vec<bool>,
    edges: Vec<Edge>,
    x: Option<usize>,
    y: Option<usize>,
}

impl GraphBuilder {
    pub fn new(d: usize) -> Self {
        Self { d, ..Default::default() }
    }

    pub fn add_vertex(&mut self, coords: &[i64], side: Side) -> usize {
        assert_eq!(coords.len(), self.d, "vertex dimension");
        self.coords.extend_from_slice(coords);
        self.side.push(side);
        self.frontier.push(false);
        self.side.len() - 1
    }

    pub fn vertex_count(&self) -> usize {
        self.side.len()
    }

    pub fn add_edge(&mut self, u: usize, v: usize, weight: f64) -> Result<(), GraphError> {
        let n = self.vertex_count();
        if u >= n || v >= n {
            return Err(GraphError::VertexOutOfRange(u.max(v)));
        }
        if !(weight > 0.0 && weight <= 1.0) {
            return Err(GraphError::InvalidWeight { u, v, w: weight });
        }
        let (u, v) = if u <= v { (u, v) } else { (v, u) };
        self.edges.push(Edge { u, v, weight });
        Ok(())
    }

    pub fn mark_frontier(&mut self, v: usize) {
        self.frontier[v] = true;
    }

    pub fn set_x(&mut self, v: usize) {
        self.x = Some(v);
    }

    pub fn set_y(&mut self, v: usize) {
        self.y = Some(v);
    }

    pub fn build(self) -> Result<WeightedGraph, GraphError> {
        let n = self.vertex_count();
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let mut counts = vec![0usize; n + 1];
        for e in &self.edges {
            counts[e.u] += 1;
            if e.u != e.v {
                counts[e.v] += 1;
            }
        }
        let mut offsets = vec![0usize; n + 1];
        for i in 0..n {
            offsets[i + 1] = offsets[i] + counts[i];
        }
        let mut fill = offsets.clone();
        let mut targets = vec![0u32; offsets[n]];
        let mut weights = vec![0.0; offsets[n]];
        let mut degree = vec![0.0; n];
        let mut put = |a: usize, b: usize, w: f64| {
            targets[fill[a]] = b as u32;
            weights[fill[a]] = w;
            fill[a] += 1;
        };
        for e in &self.edges {
            put(e.u, e.v, e.weight);
            degree[e.u] += e.weight;
            if e.u != e.v {
                put(e.v, e.u, e.weight);
                degree[e.v] += e.weight;
            }
        }
        Ok(WeightedGraph {
            d: self.d,
            coords: self.coords,
            side: self.side,
            offsets,
            targets,
            weights,
            degree,
            edges: self.edges,
            frontier: self.frontier,
            x: self.x,
            y: self.y,
        })
    }
}

impl WeightedGraph {
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn vertex_count(&self) -> usize {
        self.side.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn coords(&self, v: usize) -> &[i64] {
        &self.coords[v * self.d..(v + 1) * self.d]
    }

    pub fn side(&self, v: usize) -> Side {
        self.side[v]
    }

    pub fn degree(&self, v: usize) -> f64 {
        self.degree[v]
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degree
    }

    /// `(neighbor, weight)` pairs of `v`, self-loop included.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.offsets[v]..self.offsets[v + 1];
        self.targets[r.clone()].iter().map(|&t| t as usize).zip(self.weights[r].iter().copied())
    }

    pub(crate) fn csr(&self) -> (&[usize], &[u32], &[f64]) {
        (&self.offsets, &self.targets, &self.weights)
    }

    /// Weight of the edge `{u, v}`, zero if absent.
    pub fn weight(&self, u: usize, v: usize) -> f64 {
        self.neighbors(u).filter(|&(w, _)| w == v).map(|(_, wt)| wt).sum()
    }

    pub fn x(&self) -> Option<usize> {
        self.x
    }

    pub fn y(&self) -> Option<usize> {
        self.y
    }

    pub fn is_frontier(&self, v: usize) -> bool {
        self.frontier[v]
    }

    pub fn frontier_count(&self) -> usize {
        self.frontier.iter().filter(|&&f| f).count()
    }

    /// Vertex with the given coordinates and side, by linear scan.
    pub fn find(&self, coords: &[i64], side: Side) -> Option<usize> {
        (0..self.vertex_count()).find(|&v| self.side[v] == side && self.coords(v) == coords)
    }

    /// Graph distances from `src`; `usize::MAX` marks unreachable vertices.
    pub fn bfs_distances(&self, src: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.vertex_count()];
        let mut queue = VecDeque::new();
        dist[src] = 0;
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            for (w, _) in self.neighbors(u) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Distance from `src` to the nearest frontier vertex, `None` when the
    /// graph has no frontier reachable from `src` (nothing was truncated).
    pub fn frontier_distance(&self, src: usize) -> Option<usize> {
        let dist = self.bfs_distances(src);
        (0..self.vertex_count())
            .filter(|&v| self.frontier[v] && dist[v] != usize::MAX)
            .map(|v| dist[v])
            .min()
    }

    pub fn is_connected(&self) -> bool {
        self.bfs_distances(0).iter().all(|&d| d != usize::MAX)
    }

    /// Text dump: `d n_vertices n_edges`, then `id coords... side` per vertex,
    /// then `id1 id2 weight` per edge.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{} {} {}", self.d, self.vertex_count(), self.edge_count()).unwrap();
        for v in 0..self.vertex_count() {
            write!(out, "{v}").unwrap();
            for c in self.coords(v) {
                write!(out, " {c}").unwrap();
            }
            writeln!(out, " {}", self.side[v].tag()).unwrap();
        }
        for e in &self.edges {
            writeln!(out, "{} {} {}", e.u, e.v, g17(e.weight)).unwrap();
        }
        out
    }

    /// Reads a [`dump`](Self::dump). Markers and frontier flags are not part
    /// of the format and come back unset.
    pub fn parse_dump(text: &str) -> Result<Self, GraphError> {
        let mut lines = text.lines().enumerate();
        let perr = |line: usize, msg: &str| GraphError::Parse { line: line + 1, msg: msg.to_string() };
        let (i, header) = lines.next().ok_or(perr(0, "missing header"))?;
        let head: Vec<usize> = header
            .split_whitespace()
            .map(|f| f.parse().map_err(|_| perr(i, "bad header")))
            .collect::<Result<_, _>>()?;
        let [d, n, m] = head[..] else {
            return Err(perr(i, "header needs 3 fields"));
        };
        let mut b = GraphBuilder::new(d);
        for _ in 0..n {
            let (i, line) = lines.next().ok_or(perr(0, "truncated vertex list"))?;
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != d + 2 {
                return Err(perr(i, "vertex line has wrong arity"));
            }
            let coords: Vec<i64> = f[1..=d]
                .iter()
                .map(|c| c.parse().map_err(|_| perr(i, "bad coordinate")))
                .collect::<Result<_, _>>()?;
            let side = Side::parse(f[d + 1]).ok_or(perr(i, "bad side tag"))?;
            b.add_vertex(&coords, side);
        }
        for _ in 0..m {
            let (i, line) = lines.next().ok_or(perr(0, "truncated edge list"))?;
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 3 {
                return Err(perr(i, "edge line has wrong arity"));
            }
            let u = f[0].parse().map_err(|_| perr(i, "bad endpoint"))?;
            let v = f[1].parse().map_err(|_| perr(i, "bad endpoint"))?;
            let w = f[2].parse().map_err(|_| perr(i, "bad weight"))?;
            b.add_edge(u, v, w)?;
        }
        b.build()
    }
}

/// Induced subgraph on `{p in box : pred(p)}`, restricted to the component of
/// the origin, with unit-weight nearest-neighbor edges. The origin is marked
/// as `x`.
pub fn enumerate_graph<P>(pred: P, bx: &BoxSpec) -> Result<WeightedGraph, GraphError>
where
    P: Fn(&[i64]) -> bool,
{
    let d = bx.dim();
    let cells = bx.cell_count();
    if cells > MAX_BOX_CELLS {
        return Err(GraphError::BoxTooLarge { cells, limit: MAX_BOX_CELLS });
    }
    let origin = vec![0i64; d];
    if !bx.contains(&origin) {
        return Err(GraphError::OriginOutsideBox);
    }
    if !pred(&origin) {
        return Err(GraphError::OriginExcluded);
    }

    let extent: Vec<usize> = (0..d).map(|i| (bx.hi[i] - bx.lo[i] + 1) as usize).collect();
    // axis 0 most significant, so cell order is lexicographic order
    let mut stride = vec![1usize; d];
    for i in (0..d.saturating_sub(1)).rev() {
        stride[i] = stride[i + 1] * extent[i + 1];
    }
    let cell_of = |p: &[i64]| -> usize { (0..d).map(|i| (p[i] - bx.lo[i]) as usize * stride[i]).sum() };
    let point_of = |mut c: usize, out: &mut [i64]| {
        for i in 0..d {
            out[i] = bx.lo[i] + (c / stride[i]) as i64;
            c %= stride[i];
        }
    };

    const UNSEEN: u8 = 0;
    const MEMBER: u8 = 1;
    const OUTSIDE: u8 = 2;
    let mut state = vec![UNSEEN; cells as usize];
    let mut frontier_cells = Vec::new();
    let mut queue = VecDeque::new();
    let start = cell_of(&origin);
    state[start] = MEMBER;
    queue.push_back(start);
    let mut p = vec![0i64; d];
    let mut q = vec![0i64; d];
    while let Some(c) = queue.pop_front() {
        point_of(c, &mut p);
        let mut truncated = false;
        for i in 0..d {
            for step in [-1i64, 1] {
                q.copy_from_slice(&p);
                q[i] += step;
                if q[i] < bx.lo[i] || q[i] > bx.hi[i] {
                    truncated |= pred(&q);
                    continue;
                }
                let nc = (c as i64 + step * stride[i] as i64) as usize;
                if state[nc] == UNSEEN {
                    if pred(&q) {
                        state[nc] = MEMBER;
                        queue.push_back(nc);
                    } else {
                        state[nc] = OUTSIDE;
                    }
                }
            }
        }
        if truncated {
            frontier_cells.push(c);
        }
    }

    let mut index = vec![u32::MAX; cells as usize];
    let mut b = GraphBuilder::new(d);
    for (c, &st) in state.iter().enumerate() {
        if st == MEMBER {
            point_of(c, &mut p);
            index[c] = b.add_vertex(&p, Side::None) as u32;
        }
    }
    drop(state);
    for c in frontier_cells {
        b.mark_frontier(index[c] as usize);
    }
    let n = b.vertex_count();
    for u in 0..n {
        let c = cell_of(&b.coords[u * d..(u + 1) * d]);
        let pu = b.coords[u * d..(u + 1) * d].to_vec();
        for i in 0..d {
            if pu[i] < bx.hi[i] {
                let v = index[c + stride[i]];
                if v != u32::MAX {
                    b.add_edge(u, v as usize, 1.0)?;
                }
            }
        }
    }
    b.set_x(index[start] as usize);
    b.build()
}

fn disjoint_union(ge: &WeightedGraph, go: &WeightedGraph) -> Result<(GraphBuilder, usize, usize), GraphError> {
    if ge.d != go.d {
        return Err(GraphError::DimensionMismatch(ge.d, go.d));
    }
    let xe = ge.x.ok_or(GraphError::MissingMarker("origin (even half)"))?;
    let xo = go.x.ok_or(GraphError::MissingMarker("origin (odd half)"))?;
    let mut b = GraphBuilder::new(ge.d);
    let ne = ge.vertex_count();
    for (g, side) in [(ge, Side::Even), (go, Side::Odd)] {
        let offset = b.vertex_count();
        for v in 0..g.vertex_count() {
            let id = b.add_vertex(g.coords(v), side);
            if g.frontier[v] {
                b.mark_frontier(id);
            }
        }
        for e in &g.edges {
            b.add_edge(e.u + offset, e.v + offset, e.weight)?;
        }
    }
    Ok((b, xe, xo + ne))
}

/// Disjoint union of the two halves, tagged `e`/`o`, joined by one edge of
/// weight `delta` between their origins, which become `x` and `y`.
pub fn glue(ge: &WeightedGraph, go: &WeightedGraph, delta: f64) -> Result<WeightedGraph, GraphError> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(GraphError::InvalidDelta(delta));
    }
    let (mut b, x, y) = disjoint_union(ge, go)?;
    b.add_edge(x, y, delta)?;
    b.set_x(x);
    b.set_y(y);
    b.build()
}

/// Like [`glue`], but the halves are joined by a path of `len` unit edges
/// through `len - 1` fresh vertices (side `none`, zero coordinates).
pub fn glue_unweighted(ge: &WeightedGraph, go: &WeightedGraph, len: usize) -> Result<WeightedGraph, GraphError> {
    if len == 0 {
        return Err(GraphError::InvalidSegment);
    }
    let (mut b, x, y) = disjoint_union(ge, go)?;
    let zero = vec![0i64; ge.d];
    let mut prev = x;
    for _ in 1..len {
        let v = b.add_vertex(&zero, Side::None);
        b.add_edge(prev, v, 1.0)?;
        prev = v;
    }
    b.add_edge(prev, y, 1.0)?;
    b.set_x(x);
    b.set_y(y);
    b.build()
}

/// A single vertex carrying a unit self-loop; the walk on it never moves.
pub fn single_vertex_with_loop(d: usize) -> WeightedGraph {
    let mut b = GraphBuilder::new(d);
    let v = b.add_vertex(&vec![0; d], Side::None);
    b.add_edge(v, v, 1.0).expect("unit loop");
    b.set_x(v);
    b.build().expect("non-empty")
}

/// A path `0 - 1 - ... - (n-1)` in `Z^1` with unit weights; `x` is vertex 0.
pub fn path_graph(n: usize) -> WeightedGraph {
    let mut b = GraphBuilder::new(1);
    for i in 0..n {
        b.add_vertex(&[i as i64], Side::None);
    }
    for i in 1..n {
        b.add_edge(i - 1, i, 1.0).expect("unit edge");
    }
    b.set_x(0);
    b.build().expect("non-empty")
}
