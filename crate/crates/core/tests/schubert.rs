use asep::poly::{MultiPoly, Ring};
use asep::schubert::{
    complete_homogeneous, contains_pattern, divided_difference, invert_variables, is_evil_avoiding, schubert_ring,
    verify_kw, z_product, Permutation, SchubertTable,
};

fn perm(s: &str) -> Permutation {
    s.parse().unwrap()
}

/// Order isomorphism checked over every subsequence by bitmask.
fn brute_contains(w: &[usize], p: &[usize]) -> bool {
    let n = w.len();
    (0u32..1 << n).filter(|m| m.count_ones() as usize == p.len()).any(|m| {
        let sub: Vec<usize> = (0..n).filter(|&i| m >> i & 1 == 1).map(|i| w[i]).collect();
        (0..p.len()).all(|i| (0..p.len()).all(|j| (sub[i] < sub[j]) == (p[i] < p[j])))
    })
}

#[test]
fn pattern_containment_matches_brute_force() {
    let patterns: Vec<Permutation> = Permutation::all(3).into_iter().chain(Permutation::all(4)).collect();
    for w in Permutation::all(5) {
        for p in &patterns {
            assert_eq!(
                contains_pattern(&w, p).unwrap(),
                brute_contains(w.one_line(), p.one_line()),
                "{w} {p}"
            );
        }
    }
}

#[test]
fn evil_avoidance_counts_in_small_groups() {
    // every permutation of size three avoids the length-four patterns
    assert!(Permutation::all(3).iter().all(is_evil_avoiding));
    let evil = ["2413", "4132", "4213", "3214"].map(perm);
    let s4: Vec<Permutation> = Permutation::all(4);
    let avoiding = s4.iter().filter(|w| is_evil_avoiding(w)).count();
    assert_eq!(avoiding, 24 - evil.len());
    for w in &evil {
        assert!(!is_evil_avoiding(w));
    }
}

#[test]
fn divided_differences_follow_descents() {
    let mut table = SchubertTable::new(4);
    for w in Permutation::all(4) {
        let s = table.get(&w).unwrap();
        for i in 1..4 {
            let d = divided_difference(&s, i).unwrap();
            if w.one_line()[i - 1] > w.one_line()[i] {
                assert_eq!(d, table.get(&w.swap_positions(i)).unwrap(), "{w} at {i}");
            } else {
                assert!(d.is_zero(), "{w} at {i}");
            }
        }
    }
}

#[test]
fn schubert_polynomials_are_positive_with_the_right_degree() {
    for n in [4, 5] {
        let mut table = SchubertTable::new(n);
        for w in Permutation::all(n) {
            let s = table.get(&w).unwrap();
            assert!(s.all_coefficients_positive(), "{w}");
            assert!(s.terms().iter().all(|(m, _)| m.total_degree() as usize == w.length()), "{w}");
        }
    }
}

#[test]
fn stable_under_embedding() {
    let mut small = SchubertTable::new(4);
    let mut big = SchubertTable::new(5);
    for w in Permutation::all(4) {
        let mut line = w.one_line().to_vec();
        line.push(5);
        let embedded = Permutation::new(line).unwrap();
        let s = small.get(&w).unwrap().to_ring(big.ring()).unwrap();
        assert_eq!(s, big.get(&embedded).unwrap(), "{w}");
    }
}

#[test]
fn descent_bookkeeping() {
    for n in [4, 5] {
        for w in Permutation::all(n) {
            let line = w.one_line();
            let pos = |v: usize| line.iter().position(|&x| x == v).unwrap();
            let by_values: Vec<usize> = (1..n).filter(|&i| pos(i + 1) < pos(i)).collect();
            assert_eq!(w.inverse_descents(), by_values, "{w}");
            assert_eq!(w.inverse().descents(), by_values, "{w}");
        }
    }
}

#[test]
fn reference_schubert_values() {
    let r = schubert_ring(4);
    let p = |s: &str| MultiPoly::parse(&r, s).unwrap();
    let mut t = SchubertTable::new(4);
    assert_eq!(t.get(&perm("1243")).unwrap(), p("x1 + x2 + x3"));
    assert_eq!(t.get(&perm("1423")).unwrap(), p("x1^2 + x1*x2 + x2^2"));
    assert_eq!(t.get(&perm("1342")).unwrap(), p("x1*x2 + x1*x3 + x2*x3"));
    assert!(t.get(&Permutation::identity(4)).unwrap().is_one());
    assert_eq!(t.get(&Permutation::longest(4)).unwrap(), p("x1^3*x2^2*x3"));
}

#[test]
fn complete_homogeneous_with_repeats() {
    let r = Ring::new(["x1", "x2", "x3"]).unwrap();
    let p = |s: &str| MultiPoly::parse(&r, s).unwrap();
    assert_eq!(complete_homogeneous(&r, 1, &["x1", "x2", "x3", "x3"]).unwrap(), p("x1 + x2 + 2*x3"));
    assert_eq!(complete_homogeneous(&r, 2, &["x1", "x2"]).unwrap(), p("x1^2 + x1*x2 + x2^2"));
    assert!(complete_homogeneous(&r, 0, &["x1"]).unwrap().is_one());
    // number of monomials of degree k in m letters, with multiplicity
    let h = complete_homogeneous(&r, 3, &["x1", "x1", "x2"]).unwrap();
    let ones = vec![1.into(); 3];
    assert_eq!(h.eval_int(&ones), 10.into());
}

#[test]
fn schubert_factorizations_for_four_sites() {
    let report = verify_kw(4).unwrap();
    assert!(report.all_verified);
    let expect = [
        ("1234", 0, "x1^3*x2"),
        ("1243", 1, "x1^2"),
        ("1324", 1, "x1"),
        ("1342", 1, "x1*x2"),
        ("1423", 1, "x1^2*x2"),
        ("1432", 2, "1"),
    ];
    for (state, k, mono) in expect {
        let e = report.entries.iter().find(|e| e.state == perm(state)).unwrap();
        assert_eq!(e.k, k, "{state}");
        assert_eq!(e.monomial.as_deref(), Some(mono), "{state}");
        assert_eq!(e.factors.as_ref().map(Vec::len), Some(k), "{state}");
    }
    let e = report.entries.iter().find(|e| e.state == perm("1432")).unwrap();
    let mut f: Vec<String> = e.factors.as_ref().unwrap().iter().map(ToString::to_string).collect();
    f.sort();
    assert_eq!(f, ["1342", "1423"]);
}

#[test]
fn total_mass_matches_product_in_inverted_variables() {
    for n in [3, 4] {
        let report = verify_kw(n).unwrap();
        let r = schubert_ring(n);
        let z = z_product(&r, n).unwrap();
        assert_eq!(invert_variables(&z).to_string(), report.total, "n = {n}");
        assert!(report.total_equals_z_inverted);
    }
}
