use std::sync::Arc;

use asep::arborescence::{enumerate_arborescences, mctt_measure, psi_tree, DEFAULT_TREE_CAP};
use asep::markov::{LumpingMap, SymbolicChain};
use asep::models::{build_inhom_tasep, build_masep, Partition};
use asep::poly::{MultiPoly, Ring};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn ab() -> Arc<Ring> {
    Ring::new(["a", "b"]).unwrap()
}

/// Strongly connected digraph: a Hamiltonian cycle plus random chords,
/// each rate a small random polynomial with positive coefficients.
fn random_digraph(seed: u64) -> SymbolicChain {
    let mut rng = StdRng::seed_from_u64(seed);
    let r = ab();
    let n = rng.gen_range(3..=6);
    let rate = |rng: &mut StdRng| {
        let c1: i64 = rng.gen_range(0..3);
        let c2: i64 = rng.gen_range(0..3);
        let k: i64 = rng.gen_range(1..3);
        MultiPoly::parse(&r, &format!("{c1}*a + {c2}*b + {k}")).unwrap()
    };
    let mut edges = Vec::new();
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.gen_range(0..=i));
    }
    for k in 0..n {
        edges.push((perm[k], perm[(k + 1) % n], rate(&mut rng)));
    }
    for i in 0..n {
        for j in 0..n {
            if i != j && !edges.iter().any(|e| e.0 == i && e.1 == j) && rng.gen_bool(0.4) {
                edges.push((i, j, rate(&mut rng)));
            }
        }
    }
    SymbolicChain::new(&r, (0..n).map(|i| format!("s{i}")).collect(), edges).unwrap()
}

/// Weight sum over every choice of one out-edge per non-root state whose
/// pointer walk reaches the root.
fn brute_force_tree_sum(c: &SymbolicChain, root: usize) -> MultiPoly {
    let n = c.len();
    let choices: Vec<Vec<usize>> = (0..n)
        .map(|i| if i == root { vec![root] } else { c.out_edges(i).map(|(j, _)| j).collect() })
        .collect();
    let mut total = MultiPoly::zero(c.ring());
    let mut idx = vec![0usize; n];
    loop {
        let parent: Vec<usize> = (0..n).map(|i| choices[i][idx[i]]).collect();
        let reaches = (0..n).all(|mut x| {
            for _ in 0..n {
                if x == root {
                    return true;
                }
                x = parent[x];
            }
            x == root
        });
        if reaches {
            let w = (0..n)
                .filter(|&i| i != root)
                .fold(MultiPoly::one(c.ring()), |acc, i| acc * c.rate(i, parent[i]).unwrap());
            total = total + w;
        }
        let mut k = 0;
        while k < n {
            idx[k] += 1;
            if idx[k] < choices[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == n {
            return total;
        }
    }
}

#[test]
fn determinant_matches_enumeration_on_random_digraphs() {
    for seed in 0..20 {
        let c = random_digraph(seed);
        for root in 0..c.len() {
            let det = psi_tree(&c, root).unwrap();
            let trees = enumerate_arborescences(&c, root, DEFAULT_TREE_CAP).unwrap();
            let sum = trees
                .iter()
                .fold(MultiPoly::zero(c.ring()), |acc, t| acc + t.weight(&c));
            assert_eq!(det, sum, "seed {seed} root {root}");
            assert_eq!(det, brute_force_tree_sum(&c, root), "seed {seed} root {root}");
        }
        let m = mctt_measure(&c).unwrap();
        assert!(c.check_global_balance(&m).unwrap(), "seed {seed}");
        assert!(m.is_proportional_to(&c.stationary_compact().unwrap()).unwrap());
    }
}

#[test]
fn every_tree_is_acyclic_and_rooted() {
    let c = random_digraph(99);
    for t in enumerate_arborescences(&c, 0, DEFAULT_TREE_CAP).unwrap() {
        assert_eq!(t.parent[0], None);
        for start in 1..c.len() {
            let mut x = start;
            let mut steps = 0;
            while let Some(p) = t.parent[x] {
                assert!(c.rate(x, p).is_some());
                x = p;
                steps += 1;
                assert!(steps < c.len());
            }
            assert_eq!(x, 0);
        }
    }
}

fn assert_lumps(c: &SymbolicChain, map: &LumpingMap) {
    let lumped = map.lump(c).unwrap();
    let pushed = map.pushforward(&c.stationary_compact().unwrap()).unwrap();
    let direct = lumped.stationary_compact().unwrap();
    assert!(lumped.check_global_balance(&pushed).unwrap());
    assert!(pushed.is_proportional_to(&direct).unwrap());
}

fn threshold(label: &str, k: u32) -> String {
    label
        .chars()
        .map(|ch| if ch.to_digit(10).unwrap() >= k { '1' } else { '0' })
        .collect()
}

#[test]
fn lumping_examples() {
    // rotation classes of a ring
    let masep = build_masep(&Partition::new(vec![2, 1, 1, 0]).unwrap()).unwrap();
    let rotations = LumpingMap::from_fn(&masep, |s| {
        (0..s.len())
            .map(|k| format!("{}{}", &s[k..], &s[..k]))
            .min()
            .unwrap()
    });
    assert_lumps(&masep, &rotations);

    // merging species from the bottom projects onto fewer species
    let masep = build_masep(&Partition::new(vec![2, 1, 0]).unwrap()).unwrap();
    assert_lumps(&masep, &LumpingMap::from_fn(&masep, |s| threshold(s, 1)));

    let tasep = build_inhom_tasep(&Partition::staircase(3), false).unwrap();
    assert_lumps(&tasep, &LumpingMap::from_fn(&tasep, |s| threshold(s, 2)));

    // product of two independent two-state chains, projected on one factor
    let r = Ring::new(["a", "b", "c", "d"]).unwrap();
    let v = |s: &str| MultiPoly::var(&r, s).unwrap();
    let product = SymbolicChain::from_labelled(
        &r,
        ["00", "01", "10", "11"].iter().map(|s| s.to_string()).collect(),
        [
            ("00", "10", v("a")),
            ("01", "11", v("a")),
            ("10", "00", v("b")),
            ("11", "01", v("b")),
            ("00", "01", v("c")),
            ("10", "11", v("c")),
            ("01", "00", v("d")),
            ("11", "10", v("d")),
        ],
    )
    .unwrap();
    assert_lumps(&product, &LumpingMap::from_fn(&product, |s| s[..1].to_string()));

    // a star whose leaves are interchangeable
    let star = SymbolicChain::new(
        &r,
        ["hub", "x", "y", "z"].iter().map(|s| s.to_string()).collect(),
        (1..4).flat_map(|k| [(0, k, v("a")), (k, 0, v("b"))]),
    )
    .unwrap();
    let leaves = LumpingMap::new(vec!["hub".into(), "leaf".into()], vec![0, 1, 1, 1]).unwrap();
    assert_lumps(&star, &leaves);
}

#[test]
fn non_lumpable_partition_is_rejected() {
    let c = random_digraph(3);
    let assignment: Vec<usize> = (0..c.len()).map(|i| usize::from(i == 0)).collect();
    let map = LumpingMap::new(vec!["rest".into(), "first".into()], assignment).unwrap();
    // with generic random rates the rows into the singleton fiber differ
    assert!(map.lump(&c).is_err());
}
