//! The library's kernels against independently built oracles, plus the
//! structural invariants as properties over random small graphs.

mod common;

use proptest::prelude::*;
use slabwalk::graph::{enumerate_graph, glue, BoxSpec, GraphBuilder, Side, WeightedGraph};
use slabwalk::kernel::{
    first_return, heat_kernel_between, heat_kernel_diag, lazy_step, visit_decomposition_series, zd, DistributionVector,
    Semantics,
};
use slabwalk::lattice::{centered_mod, Parity, SlabRegion};
use slabwalk::schedule::{next_scale, ScaleSchedule};

#[test]
fn corpus_matches_dense_matrix() {
    for (name, g) in common::corpus() {
        if g.vertex_count() > 1200 {
            continue;
        }
        let x = g.x().unwrap();
        for lazy in [true, false] {
            let sem = if lazy { Semantics::Lazy } else { Semantics::Simple };
            let ours = heat_kernel_diag(&g, x, 30, sem).unwrap();
            let oracle = common::dense_diag(&g, x, 30, lazy);
            for (t, want) in oracle.iter().enumerate() {
                assert!((ours.at(t) - want).abs() < 1e-13, "{name} lazy={lazy} t={t}");
            }
        }
    }
}

#[test]
fn full_distribution_matches_dense_matrix() {
    let g = glue(&zd_box(2, 6), &zd_box(2, 4), 0.3).unwrap();
    let y = g.y().unwrap();
    let oracle = common::dense_distributions(&g, y, 12, true);
    let mut v = DistributionVector::point_mass(g.vertex_count(), y).unwrap();
    for row in oracle.iter().skip(1) {
        v = lazy_step(&g, &v).unwrap();
        for (a, b) in v.as_slice().iter().zip(row) {
            assert!((a - b).abs() < 1e-14);
        }
    }
}

#[test]
fn two_scale_ratio_matches_stencil() {
    let t_max = 40;
    let sched = ScaleSchedule::from_periods(2, 1, &[2, 12]).unwrap();
    let half = |p| {
        let reg = SlabRegion::half(&sched, p, 2).unwrap();
        enumerate_graph(|c| reg.contains(c), &BoxSpec::cube(2, t_max as i64 + 1).unwrap()).unwrap()
    };
    let g = glue(&half(Parity::Even), &half(Parity::Odd), 0.25).unwrap();
    let stencil = common::Stencil2::new(t_max as i64 + 2, 0.25, common::two_scale_even(2, 12), |_, _| true);
    let px = heat_kernel_diag(&g, g.x().unwrap(), t_max, Semantics::Lazy).unwrap();
    let py = heat_kernel_diag(&g, g.y().unwrap(), t_max, Semantics::Lazy).unwrap();
    let (sx, sy) = (stencil.diag(0, t_max), stencil.diag(1, t_max));
    for t in 0..=t_max {
        assert!((px.at(t) - sx[t]).abs() < 1e-14, "t={t}");
        assert!((py.at(t) - sy[t]).abs() < 1e-14, "t={t}");
    }
}

#[test]
fn decomposition_matches_trajectory_sums_over_time() {
    let a = enumerate_graph(|p| p[0].abs() <= 2, &BoxSpec::cube(1, 3).unwrap()).unwrap();
    let b = enumerate_graph(|p| p[0].abs() <= 1, &BoxSpec::cube(1, 2).unwrap()).unwrap();
    let g = glue(&a, &b, 0.5).unwrap();
    let (x, y) = (g.x().unwrap(), g.y().unwrap());
    for gamma in 1..=2 {
        let table = visit_decomposition_series(&g, x, y, 8, gamma).unwrap();
        for row in &table.rows {
            let t = row.t;
            let hits = |p: &[usize], lo: usize, hi: usize| p[lo..=hi].contains(&x);
            let p1 = common::trajectory_sum(&g, y, y, t, &|p| !hits(p, 1, gamma));
            let p12 = common::trajectory_sum(&g, y, y, t, &|p| !hits(p, 1, gamma) && !hits(p, t - gamma, t - 1));
            assert!((row.p1 - p1).abs() < 1e-13, "gamma={gamma} t={t}");
            assert!((row.p12 - p12).abs() < 1e-13, "gamma={gamma} t={t}");
        }
    }
}

#[test]
fn closed_form_z3_matches_box_at_moderate_times() {
    let g = zd_box(3, 30);
    let boxed = heat_kernel_diag(&g, g.x().unwrap(), 30, Semantics::Lazy).unwrap();
    let closed = zd::lazy_diagonal(3, 30);
    for t in 0..=30 {
        assert!((boxed.at(t) - closed.at(t)).abs() < 1e-15);
    }
}

#[test]
fn next_scale_agrees_with_scan_on_a_grid() {
    for gamma in 1..=6 {
        for a_prev in (2..=40).step_by(2) {
            assert_eq!(next_scale(gamma, a_prev).unwrap(), common::brute_next_scale(gamma, a_prev));
        }
    }
}

fn zd_box(d: usize, r: i64) -> WeightedGraph {
    enumerate_graph(|_| true, &BoxSpec::cube(d, r).unwrap()).unwrap()
}

/// A connected random graph: a random tree on `n` vertices plus extra
/// edges and loops, all with weights in (0, 1].
fn random_graph() -> impl Strategy<Value = WeightedGraph> {
    (2usize..9).prop_flat_map(|n| {
        let parents = proptest::collection::vec((0usize..1000, 0.05f64..=1.0), n - 1);
        let extra = proptest::collection::vec((0..n, 0..n, 0.05f64..=1.0), 0..6);
        (Just(n), parents, extra).prop_map(|(n, parents, extra)| {
            let mut b = GraphBuilder::new(1);
            for i in 0..n {
                b.add_vertex(&[i as i64], Side::None);
            }
            for (i, (p, w)) in parents.into_iter().enumerate() {
                b.add_edge(p % (i + 1), i + 1, w).unwrap();
            }
            for (u, v, w) in extra {
                b.add_edge(u, v, w).unwrap();
            }
            b.set_x(0);
            b.build().unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mass_is_conserved(g in random_graph(), t in 0usize..40) {
        let mut v = DistributionVector::point_mass(g.vertex_count(), 0).unwrap();
        for _ in 0..t {
            v = lazy_step(&g, &v).unwrap();
        }
        prop_assert!((v.mass() - 1.0).abs() < 1e-12);
        prop_assert!(v.as_slice().iter().all(|&p| p >= 0.0));
    }

    #[test]
    fn kernel_is_reversible(g in random_graph(), t in 0usize..30) {
        let n = g.vertex_count();
        let y = n - 1;
        let xy = heat_kernel_between(&g, 0, y, t, Semantics::Lazy).unwrap();
        let yx = heat_kernel_between(&g, y, 0, t, Semantics::Lazy).unwrap();
        prop_assert!((g.degree(0) * xy.at(t) - g.degree(y) * yx.at(t)).abs() < 1e-13);
    }

    #[test]
    fn lazy_diagonal_is_non_increasing(g in random_graph()) {
        let p = heat_kernel_diag(&g, 0, 60, Semantics::Lazy).unwrap();
        for t in 0..60 {
            prop_assert!(p.at(t + 1) <= p.at(t) + 1e-12);
        }
    }

    #[test]
    fn kernel_matches_dense_oracle(g in random_graph(), lazy in any::<bool>()) {
        let sem = if lazy { Semantics::Lazy } else { Semantics::Simple };
        let ours = heat_kernel_diag(&g, 0, 20, sem).unwrap();
        let oracle = common::dense_diag(&g, 0, 20, lazy);
        for (t, want) in oracle.iter().enumerate() {
            prop_assert!((ours.at(t) - want).abs() < 1e-13);
        }
    }

    #[test]
    fn first_return_routes_agree(g in random_graph()) {
        let fr = first_return(&g, 0, 80).unwrap();
        prop_assert!(fr.max_disagreement < 1e-12);
        let total: f64 = fr.f[1..].iter().sum();
        prop_assert!(total <= 1.0 + 1e-12);
    }

    #[test]
    fn decomposition_identities(g in random_graph(), gamma in 1usize..3) {
        prop_assume!(g.vertex_count() >= 2);
        let y = g.vertex_count() - 1;
        let table = visit_decomposition_series(&g, 0, y, 20, gamma).unwrap();
        for r in &table.rows {
            prop_assert!((r.p1 - r.p2).abs() < 1e-12);
            prop_assert!(r.p12 <= r.p1.min(r.p2) + 1e-12);
            prop_assert!(r.p1 + r.p2 + r.p3 >= r.p_yy - 1e-10);
            prop_assert!(r.p3 >= -1e-12);
        }
    }

    #[test]
    fn regions_are_periodic_in_the_free_axes(
        a2_mult in 3u64..6, x in -60i64..60, y in -60i64..60, z in -60i64..60,
    ) {
        let sched = ScaleSchedule::from_periods(3, 2, &[2, 4 * a2_mult]).unwrap();
        let reg = SlabRegion::half(&sched, Parity::Even, 2).unwrap();
        let l = (4 * a2_mult) as i64;
        prop_assert_eq!(reg.contains(&[x, y, z]), reg.contains(&[x + l, y - l, z]));
        prop_assert_eq!(reg.contains(&[x, y, z]), reg.contains(&[x, y, z + l]));
        prop_assert!(reg.contains(&[0, 0, 0]));
    }

    #[test]
    fn centered_mod_is_a_centered_residue(n in -10_000i64..10_000, l in 1i64..200) {
        let c = centered_mod(n, l);
        prop_assert_eq!((n - c).rem_euclid(l), 0);
        prop_assert!(-(l - 1) / 2 <= c && c <= l / 2);
    }
}
