#![allow(clippy::needless_range_loop)]

use dperf_core::edge_sets::{validate_cutset, validate_pathset};
use dperf_core::graph::{Bound, Distance, Edge, EdgeMask, Network};
use dperf_core::RegionSpec;
use proptest::prelude::*;

const INF: u32 = u32::MAX;

/// All-pairs hop distances by Floyd–Warshall over the active edges.
fn floyd(net: &Network, active: &EdgeMask) -> Vec<Vec<u32>> {
    let n = net.node_count();
    let mut d = vec![vec![INF; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for e in active.iter() {
        let Edge { a, b, .. } = *net.edge(e);
        d[a][b] = 1;
        d[b][a] = 1;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] != INF && d[k][j] != INF && d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

fn oracle_delta(net: &Network, active: &EdgeMask) -> Distance {
    let d = floyd(net, active);
    let k = net.terminals();
    let mut worst = 0;
    for (i, &a) in k.iter().enumerate() {
        for &b in &k[i + 1..] {
            if d[a][b] == INF {
                return Distance::Unreachable;
            }
            worst = worst.max(d[a][b]);
        }
    }
    Distance::Finite(worst)
}

fn arb_network() -> impl Strategy<Value = Network> {
    (3usize..=8).prop_flat_map(|n| {
        let edge = (0..n, 0..n - 1, 0.5f64..0.99).prop_map(move |(a, off, r)| {
            let b = (a + 1 + off) % n;
            Edge { a, b, reliability: r }
        });
        let terminals = proptest::sample::subsequence((0..n).collect::<Vec<_>>(), 2..=3.min(n));
        (prop::collection::vec(edge, 1..=16), terminals)
            .prop_map(move |(edges, k)| Network::new(n, edges, k).expect("valid by construction"))
    })
}

fn arb_net_and_mask() -> impl Strategy<Value = (Network, EdgeMask)> {
    arb_network().prop_flat_map(|net| {
        let m = net.edge_count();
        (Just(net), prop::collection::vec(any::<bool>(), m))
            .prop_map(move |(net, bits)| (net, EdgeMask::from_edges(m, (0..m).filter(|&e| bits[e]))))
    })
}

proptest! {
    #[test]
    fn bfs_matches_floyd_and_is_lipschitz((net, active) in arb_net_and_mask()) {
        let d = floyd(&net, &active);
        for s in 0..net.node_count() {
            let bfs = net.bfs_distances(&active, s);
            for (v, dv) in bfs.iter().enumerate() {
                let want = if d[s][v] == INF { Distance::Unreachable } else { Distance::Finite(d[s][v]) };
                prop_assert_eq!(*dv, want);
            }
            for e in active.iter() {
                let Edge { a, b, .. } = *net.edge(e);
                if let (Distance::Finite(x), Distance::Finite(y)) = (bfs[a], bfs[b]) {
                    prop_assert!(x.abs_diff(y) <= 1);
                }
            }
        }
        prop_assert_eq!(net.max_terminal_distance(&active), oracle_delta(&net, &active));
    }

    #[test]
    fn delta_non_increasing_when_edges_added((net, active) in arb_net_and_mask(), extra in any::<prop::sample::Index>()) {
        let mut more = active.clone();
        more.insert(extra.index(net.edge_count()));
        prop_assert!(net.max_terminal_distance(&more) <= net.max_terminal_distance(&active));
    }

    #[test]
    fn d_connected_iff_delta_at_most_d((net, active) in arb_net_and_mask(), d in 1u32..10) {
        let delta = net.max_terminal_distance(&active);
        prop_assert_eq!(net.is_d_connected(&active, Bound::Hops(d)), delta <= Distance::Finite(d));
        prop_assert_eq!(net.is_d_connected(&active, Bound::Unbounded), delta.is_finite());
    }

    #[test]
    fn region_of_total_and_monotone(th in prop::collection::btree_set(1u32..12, 0..4), delta in 1u32..15) {
        let hops: Vec<u32> = th.into_iter().collect();
        let spec = RegionSpec::from_hops(&hops, vec![0.0; hops.len() + 1]).unwrap();
        let here = spec.region_of(Distance::Finite(delta)).unwrap();
        let next = spec.region_of(Distance::Finite(delta + 1)).unwrap();
        let far = spec.region_of(Distance::Unreachable).unwrap();
        prop_assert!(here <= next && next <= far);
        prop_assert_eq!(far, hops.len());
        let lower = if here == 0 { 0 } else { hops[here - 1] };
        prop_assert!(lower < delta);
        prop_assert!(hops.get(here).is_none_or(|&u| delta <= u));
    }

    #[test]
    fn set_validation_is_monotone((net, active) in arb_net_and_mask(), extra in any::<prop::sample::Index>(), d in 1u32..8) {
        let set: Vec<usize> = active.iter().collect();
        let mut bigger = set.clone();
        bigger.push(extra.index(net.edge_count()));
        for bound in [Bound::Hops(d), Bound::Unbounded] {
            if validate_pathset(&net, &set, bound) {
                prop_assert!(validate_pathset(&net, &bigger, bound));
            }
            if validate_cutset(&net, &set, bound) {
                prop_assert!(validate_cutset(&net, &bigger, bound));
            }
        }
    }

    #[test]
    fn pathsets_meet_every_cutset((net, a) in arb_net_and_mask(), bits in prop::collection::vec(any::<bool>(), 16), d in 1u32..8) {
        let p: Vec<usize> = a.iter().collect();
        let c: Vec<usize> = (0..net.edge_count()).filter(|&e| bits[e]).collect();
        for bound in [Bound::Hops(d), Bound::Unbounded] {
            if validate_pathset(&net, &p, bound) && validate_cutset(&net, &c, bound) {
                prop_assert!(p.iter().any(|e| c.contains(e)));
            }
        }
    }
}

#[test]
fn path_graph_examples() {
    let e = |a, b| Edge { a, b, reliability: 0.9 };
    let net = Network::new(3, vec![e(0, 1), e(1, 2)], vec![0, 2]).unwrap();
    let all = net.all_edges();
    assert_eq!(net.bfs_distances(&all, 0), vec![Distance::Finite(0), Distance::Finite(1), Distance::Finite(2)]);
    let cut = EdgeMask::from_edges(2, [0]);
    assert_eq!(net.bfs_distances(&cut, 0)[2], Distance::Unreachable);
    assert_eq!(net.max_terminal_distance(&all), Distance::Finite(2));
    assert!(net.is_d_connected(&all, Bound::Hops(2)));
    assert!(!net.is_d_connected(&all, Bound::Hops(1)));
    assert!(!validate_pathset(&net, &[0], Bound::Unbounded));
    assert!(!validate_cutset(&net, &[], Bound::Unbounded));
}
