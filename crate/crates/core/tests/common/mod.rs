//! Independent oracles shared by the integration tests and the acceptance
//! runner. None of them go through the library's walk code: they read the
//! edge list and build their own transition structure.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slabwalk::graph::{enumerate_graph, glue, glue_unweighted, path_graph, single_vertex_with_loop, BoxSpec, WeightedGraph};
use slabwalk::lattice::{Parity, SlabRegion};
use slabwalk::schedule::ScaleSchedule;

/// Row-stochastic transition matrix of the lazy (or simple) walk, built from
/// the edge list. A self-loop counts once in the degree.
pub fn dense_transition(g: &WeightedGraph, lazy: bool) -> Vec<Vec<f64>> {
    let n = g.vertex_count();
    let mut w = vec![vec![0.0; n]; n];
    let mut deg = vec![0.0; n];
    for e in g.edges() {
        w[e.u][e.v] += e.weight;
        deg[e.u] += e.weight;
        if e.u != e.v {
            w[e.v][e.u] += e.weight;
            deg[e.v] += e.weight;
        }
    }
    for (u, row) in w.iter_mut().enumerate() {
        for p in row.iter_mut() {
            *p /= deg[u];
            if lazy {
                *p *= 0.5;
            }
        }
        if lazy {
            row[u] += 0.5;
        }
    }
    w
}

/// Distributions `p(x, .; t)` for `t = 0..=T` by dense push iteration.
pub fn dense_distributions(g: &WeightedGraph, x: usize, t_max: usize, lazy: bool) -> Vec<Vec<f64>> {
    let p = dense_transition(g, lazy);
    let n = p.len();
    let mut cur = vec![0.0; n];
    cur[x] = 1.0;
    let mut out = vec![cur.clone()];
    for _ in 0..t_max {
        let mut next = vec![0.0; n];
        for (u, &m) in cur.iter().enumerate() {
            if m != 0.0 {
                for (v, &q) in p[u].iter().enumerate() {
                    next[v] += m * q;
                }
            }
        }
        cur = next;
        out.push(cur.clone());
    }
    out
}

pub fn dense_diag(g: &WeightedGraph, x: usize, t_max: usize, lazy: bool) -> Vec<f64> {
    dense_distributions(g, x, t_max, lazy).into_iter().map(|row| row[x]).collect()
}

/// Sums the probability of every length-`t` lazy trajectory from `start`
/// that ends at `end` and satisfies `keep`.
pub fn trajectory_sum(g: &WeightedGraph, start: usize, end: usize, t: usize, keep: &dyn Fn(&[usize]) -> bool) -> f64 {
    let p = dense_transition(g, true);
    let moves: Vec<Vec<(usize, f64)>> =
        p.iter().map(|row| row.iter().enumerate().filter(|(_, &q)| q > 0.0).map(|(v, &q)| (v, q)).collect()).collect();
    let mut path = vec![start];
    let mut total = 0.0;
    fn go(moves: &[Vec<(usize, f64)>], path: &mut Vec<usize>, prob: f64, t: usize, end: usize, keep: &dyn Fn(&[usize]) -> bool, total: &mut f64) {
        if path.len() == t + 1 {
            if *path.last().unwrap() == end && keep(path) {
                *total += prob;
            }
            return;
        }
        let u = *path.last().unwrap();
        for &(v, q) in &moves[u] {
            path.push(v);
            go(moves, path, prob * q, t, end, keep, total);
            path.pop();
        }
    }
    go(&moves, &mut path, 1.0, t, end, keep, &mut total);
    total
}

/// Smallest even `a > 2 gamma^4 + 4 a_prev` with `a_prev | a/2`, by scanning.
pub fn brute_next_scale(gamma: u64, a_prev: u64) -> u64 {
    let floor = 2 * gamma.pow(4) + 4 * a_prev;
    (1..).map(|a| a * 2).find(|&a| a > floor && (a / 2) % a_prev == 0).unwrap()
}

/// Monte Carlo escape probability of the lazy walk on `Z^3` from the origin:
/// half the walks stay put on the first step and so return at once; the rest
/// run as simple walks for at most `max_steps` moves.
pub fn monte_carlo_escape_z3(walks: u64, max_steps: u64, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut escaped = 0u64;
    for _ in 0..walks {
        if rng.random::<bool>() {
            continue;
        }
        let mut p = [0i64; 3];
        let mut steps = 0u64;
        let mut bits = 0u64;
        let mut left = 0u32;
        let mut returned = false;
        while steps < max_steps {
            if left == 0 {
                bits = rng.random();
                left = 21;
            }
            let c = (bits & 7) as usize;
            bits >>= 3;
            left -= 1;
            if c >= 6 {
                continue;
            }
            p[c / 2] += if c % 2 == 0 { 1 } else { -1 };
            steps += 1;
            if p == [0, 0, 0] {
                returned = true;
                break;
            }
        }
        if !returned {
            escaped += 1;
        }
    }
    escaped as f64 / walks as f64
}

/// Simple-walk return probability on `Z^3` (Watson's integral).
pub const R3: f64 = 0.340_537_329_550_999;

/// Lazy walk on a 2D region given by a membership test, with two copies
/// joined at their origins by a single edge of weight `delta`. Returns
/// `p(x,x;t)` and `p(y,y;t)` for `t = 0..=T`, where `x` is the origin of
/// the first copy. The grid has radius `r`; both regions must contain the
/// origin and the run must stay below `t = r`.
pub struct Stencil2 {
    r: i64,
    n: usize,
    member: [Vec<bool>; 2],
    deg: [Vec<f64>; 2],
    delta: f64,
}

impl Stencil2 {
    pub fn new(r: i64, delta: f64, even: impl Fn(i64, i64) -> bool, odd: impl Fn(i64, i64) -> bool) -> Self {
        let n = (2 * r + 1) as usize;
        let build = |f: &dyn Fn(i64, i64) -> bool| {
            let mut m = vec![false; n * n];
            for i in 0..n {
                for j in 0..n {
                    m[i * n + j] = f(i as i64 - r, j as i64 - r);
                }
            }
            m
        };
        let member = [build(&even), build(&odd)];
        let mut deg = [vec![0.0; n * n], vec![0.0; n * n]];
        let o = (r as usize) * n + r as usize;
        for side in 0..2 {
            for i in 0..n {
                for j in 0..n {
                    if !member[side][i * n + j] {
                        continue;
                    }
                    let mut k = 0.0;
                    for (di, dj) in [(-1i64, 0i64), (1, 0), (0, -1), (0, 1)] {
                        let (a, b) = (i as i64 + di, j as i64 + dj);
                        if a >= 0 && b >= 0 && (a as usize) < n && (b as usize) < n && member[side][a as usize * n + b as usize] {
                            k += 1.0;
                        }
                    }
                    deg[side][i * n + j] = k;
                }
            }
            assert!(member[side][o], "origin must be a member");
            deg[side][o] += delta;
        }
        Self { r, n, member, deg, delta }
    }

    fn origin(&self) -> usize {
        self.r as usize * self.n + self.r as usize
    }

    /// Return probabilities from the origin of `side` (0 = x, 1 = y).
    pub fn diag(&self, side: usize, t_max: usize) -> Vec<f64> {
        assert!((t_max as i64) < self.r);
        let n = self.n;
        let o = self.origin();
        let mut cur = [vec![0.0; n * n], vec![0.0; n * n]];
        cur[side][o] = 1.0;
        let mut out = vec![1.0];
        for _ in 0..t_max {
            let mut next = [vec![0.0; n * n], vec![0.0; n * n]];
            for s in 0..2 {
                for i in 0..n {
                    for j in 0..n {
                        let u = i * n + j;
                        let m = cur[s][u];
                        if m == 0.0 {
                            continue;
                        }
                        next[s][u] += 0.5 * m;
                        let share = 0.5 * m / self.deg[s][u];
                        for (di, dj) in [(-1i64, 0i64), (1, 0), (0, -1), (0, 1)] {
                            let (a, b) = (i as i64 + di, j as i64 + dj);
                            if a >= 0 && b >= 0 && (a as usize) < n && (b as usize) < n {
                                let v = a as usize * n + b as usize;
                                if self.member[s][v] {
                                    next[s][v] += share;
                                }
                            }
                        }
                        if u == o {
                            next[1 - s][o] += share * self.delta;
                        }
                    }
                }
            }
            cur = next;
            out.push(cur[side][o]);
        }
        out
    }
}

/// Membership in the half of a two-scale `d = 2, s = 1` schedule with
/// periods `(a1, a2)`: the even half keeps points whose first coordinate
/// shifted by `a2/2`, or whose second coordinate, lies within `a1 = b1` of
/// a multiple of `a2`. The odd half is the whole plane.
pub fn two_scale_even(a1: i64, a2: i64) -> impl Fn(i64, i64) -> bool {
    move |u, v| {
        let near = |c: i64| {
            let r = c.rem_euclid(a2);
            r.min(a2 - r) <= a1
        };
        near(u - a2 / 2) || near(v)
    }
}

/// A set of graphs covering boxes, slabs, halves, clamps and glued joins.
pub fn corpus() -> Vec<(String, WeightedGraph)> {
    let bx = |d, r| BoxSpec::cube(d, r).unwrap();
    let zd = |d, r| enumerate_graph(|_| true, &bx(d, r)).unwrap();
    let sched = ScaleSchedule::from_periods(2, 1, &[2, 12]).unwrap();
    let region = |p, clamped| {
        let reg = if clamped { SlabRegion::clamped(&sched, p, 2) } else { SlabRegion::half(&sched, p, 2) }.unwrap();
        enumerate_graph(|c| reg.contains(c), &bx(2, 20)).unwrap()
    };
    let he = region(Parity::Even, false);
    let ho = region(Parity::Odd, false);
    let sched3 = ScaleSchedule::from_periods(3, 1, &[2, 12]).unwrap();
    let reg3 = SlabRegion::half(&sched3, Parity::Even, 2).unwrap();
    let h3 = enumerate_graph(|c| reg3.contains(c), &bx(3, 8)).unwrap();
    let comb = enumerate_graph(|p| p[0] == 0 || p[1] % 3 == 0, &bx(2, 12)).unwrap();
    let mut out = vec![
        ("z1".to_string(), zd(1, 40)),
        ("z2".to_string(), zd(2, 15)),
        ("z3".to_string(), zd(3, 7)),
        ("path5".to_string(), path_graph(5)),
        ("loop".to_string(), single_vertex_with_loop(2)),
        ("h_even".to_string(), he.clone()),
        ("h_odd".to_string(), ho.clone()),
        ("f_even".to_string(), region(Parity::Even, true)),
        ("h3_even".to_string(), h3),
        ("comb".to_string(), comb.clone()),
        ("glued_halves".to_string(), glue(&he, &ho, 0.25).unwrap()),
        ("glued_mixed".to_string(), glue(&comb, &zd(2, 6), 0.5).unwrap()),
        ("glued_segment".to_string(), glue_unweighted(&zd(2, 5), &comb, 3).unwrap()),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let weighted = {
        let base = zd(2, 4);
        let mut b = slabwalk::graph::GraphBuilder::new(2);
        for v in 0..base.vertex_count() {
            b.add_vertex(base.coords(v), slabwalk::graph::Side::None);
        }
        for e in base.edges() {
            b.add_edge(e.u, e.v, rng.random_range(0.05..=1.0)).unwrap();
        }
        b.set_x(base.x().unwrap());
        b.build().unwrap()
    };
    out.push(("weighted".to_string(), weighted));
    out
}
