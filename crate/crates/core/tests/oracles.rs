use asep::ansatz::{check_relations, transfer_psi};
use asep::markov::{ChainError, Measure, StationaryMethod, SymbolicChain};
use asep::models::{
    build_five_state, build_inhom_tasep, build_masep, build_open_asep3, build_open_asep5, decode_ring_state,
    encode_ring_state, Partition, Word,
};
use asep::poly::{BigInt, BigRational, MultiPoly};
use asep::tableaux::{count_tableaux, partition_function, psi_tableaux, tableaux_measure, Mode};
use num_traits::{One, Zero};

fn factorial(n: u64) -> u64 {
    (1..=n).product()
}

/// Stationary vector at a numeric point by Gaussian elimination on
/// `pi L = 0` with the last entry pinned to one.
fn numeric_stationary(c: &SymbolicChain, point: &[BigInt]) -> Vec<BigRational> {
    let n = c.len();
    let lap = c.laplacian().eval_int(point);
    // unknowns pi_0..pi_{n-2}; equations: columns 0..n-2 of pi L = 0
    let mut rows: Vec<Vec<BigRational>> = (0..n - 1)
        .map(|col| {
            let mut row: Vec<BigRational> = (0..n - 1).map(|i| BigRational::from(lap[i][col].clone())).collect();
            row.push(-BigRational::from(lap[n - 1][col].clone()));
            row
        })
        .collect();
    for k in 0..n - 1 {
        let piv = (k..n - 1).find(|&r| !rows[r][k].is_zero()).expect("nonsingular");
        rows.swap(k, piv);
        let inv = BigRational::one() / rows[k][k].clone();
        for x in rows[k].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..n - 1 {
            if r != k && !rows[r][k].is_zero() {
                let f = rows[r][k].clone();
                for j in k..n {
                    let d = &f * &rows[k][j];
                    rows[r][j] = &rows[r][j] - d;
                }
            }
        }
    }
    let mut pi: Vec<BigRational> = rows.into_iter().map(|r| r[n - 1].clone()).collect();
    pi.push(BigRational::one());
    pi
}

fn check_against_numeric(c: &SymbolicChain, m: &Measure, point: &[i64]) {
    let point: Vec<BigInt> = point.iter().map(|&v| BigInt::from(v)).collect();
    let pi = numeric_stationary(c, &point);
    let last = m.values().last().unwrap().eval_int(&point);
    for (v, p) in m.values().iter().zip(&pi) {
        assert_eq!(BigRational::new(v.eval_int(&point), last.clone()), *p);
    }
}

#[test]
fn solver_agrees_with_numeric_elimination() {
    let c = build_open_asep3(3).unwrap();
    check_against_numeric(&c, &c.stationary_compact().unwrap(), &[2, 3, 5]);
    let c = build_open_asep5(2).unwrap();
    check_against_numeric(&c, &c.stationary_compact().unwrap(), &[2, 3, 7, 5, 4]);
    let c = build_inhom_tasep(&Partition::staircase(3), true).unwrap();
    let names = c.ring().names().to_vec();
    // x_a - y_b must stay positive
    let point: Vec<i64> = names.iter().map(|s| if s.starts_with('x') { 11 + s.len() as i64 } else { 1 }).collect();
    check_against_numeric(&c, &c.stationary_compact().unwrap(), &point);
    let c = build_masep(&Partition::new(vec![2, 1, 1, 0]).unwrap()).unwrap();
    check_against_numeric(&c, &c.stationary_compact().unwrap(), &[3]);
}

#[test]
fn two_letter_tableaux_give_the_stationary_measure() {
    for n in 1..=4 {
        let c = build_open_asep3(n).unwrap();
        let solver = c.stationary_compact().unwrap();
        let tableaux = tableaux_measure(n, Mode::TwoLetter).unwrap();
        assert_eq!(solver.states(), tableaux.states());
        assert!(tableaux.is_proportional_to(&solver).unwrap(), "n = {n}");
        assert!(c.check_global_balance(&tableaux).unwrap());
    }
}

#[test]
fn four_letter_tableaux_give_the_stationary_measure() {
    for n in 1..=3 {
        let c = build_open_asep5(n).unwrap();
        let solver = c.stationary_compact().unwrap();
        let tableaux = tableaux_measure(n, Mode::FourLetter).unwrap();
        assert!(tableaux.is_proportional_to(&solver).unwrap(), "n = {n}");
        assert!(c.check_global_balance(&tableaux).unwrap());
    }
}

#[test]
fn tableaux_counts() {
    for n in 1..=5u64 {
        assert_eq!(count_tableaux(n as usize, Mode::TwoLetter).unwrap(), factorial(n + 1));
    }
    for n in 1..=4u64 {
        assert_eq!(count_tableaux(n as usize, Mode::FourLetter).unwrap(), 4u64.pow(n as u32) * factorial(n));
    }
}

#[test]
fn partition_function_at_ones() {
    for n in 1..=5 {
        let z = partition_function(n, Mode::TwoLetter).unwrap();
        let ones = vec![BigInt::one(); z.ring().nvars()];
        assert_eq!(z.eval_int(&ones), BigInt::from(factorial(n as u64 + 1)));
    }
}

#[test]
fn transfer_matrices_match_tableaux() {
    for d in 2..=6 {
        assert!(check_relations(d));
    }
    for n in 1..=4 {
        for w in Word::all(n) {
            assert_eq!(transfer_psi(&w), psi_tableaux(n, &w, Mode::TwoLetter).unwrap(), "{w}");
        }
    }
}

#[test]
fn five_parameter_specializes_to_three() {
    for n in 1..=3 {
        let five = build_open_asep5(n).unwrap().substitute(&[("gamma", 0), ("delta", 0)]).unwrap();
        let three = build_open_asep3(n).unwrap();
        let a = five.stationary_compact().unwrap();
        let b = three.stationary_compact().unwrap();
        assert!(a.is_proportional_to(&b).unwrap(), "n = {n}");
        // specializing the measure agrees with measuring the specialization
        let full = build_open_asep5(n).unwrap().stationary_compact().unwrap();
        let spec = full.substitute(&[("gamma", 0), ("delta", 0)]).unwrap();
        assert!(spec.is_proportional_to(&b).unwrap(), "n = {n}");
    }
}

fn assert_rotation_invariant(m: &Measure) {
    for (s, v) in m.states().iter().zip(m.values()) {
        let mut w = decode_ring_state(s).unwrap();
        w.rotate_left(1);
        assert_eq!(m.get(&encode_ring_state(&w)), Some(v), "{s}");
    }
}

#[test]
fn ring_measures_are_rotation_invariant() {
    for parts in [vec![3, 2, 1], vec![2, 2, 1, 0], vec![3, 1, 1, 0]] {
        let lambda = Partition::new(parts).unwrap();
        let c = build_masep(&lambda).unwrap();
        let m = c.stationary_compact().unwrap();
        assert_rotation_invariant(&m);
        assert!(c.check_global_balance(&m).unwrap());
        for with_y in [false, true] {
            let c = build_inhom_tasep(&lambda, with_y).unwrap();
            let m = c.stationary_compact().unwrap();
            assert_rotation_invariant(&m);
            assert!(c.check_global_balance(&m).unwrap());
        }
    }
}

#[test]
fn masep_at_t_zero_is_the_inhomogeneous_tasep_at_equal_rates() {
    let lambda = Partition::new(vec![2, 1, 0]).unwrap();
    let masep = build_masep(&lambda).unwrap().substitute(&[("t", 0)]).unwrap();
    let tasep = build_inhom_tasep(&lambda, false).unwrap();
    let ones: Vec<(&str, i64)> = tasep.ring().names().iter().map(|s| (s.as_str(), 1)).collect();
    let tasep = tasep.substitute(&ones).unwrap();
    let eval = |c: &SymbolicChain| -> Vec<BigInt> {
        let point = vec![BigInt::one(); c.ring().nvars()];
        c.stationary_compact().unwrap().values().iter().map(|v| v.eval_int(&point)).collect()
    };
    let (a, b) = (eval(&masep), eval(&tasep));
    assert_eq!(masep.states(), tasep.states());
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x * &b[0], y * &a[0]);
    }
}

fn anchored_equal(m: &Measure, expected: &[(&str, &str)]) {
    let ring = m.ring();
    let (a0, e0) = expected[0];
    let e0 = MultiPoly::parse(ring, e0).unwrap();
    let g0 = m.get(a0).unwrap();
    for (s, e) in expected {
        let e = MultiPoly::parse(ring, e).unwrap();
        assert_eq!(m.get(s).unwrap() * &e0, &e * g0, "{s}");
    }
}

#[test]
fn multispecies_ring_reference_values() {
    let m = build_masep(&Partition::staircase(4)).unwrap().stationary_compact().unwrap();
    anchored_equal(
        &m,
        &[
            ("1234", "9*t^3 + 7*t^2 + 7*t + 1"),
            ("1243", "3*(t^3 + 3*t^2 + 3*t + 1)"),
            ("1324", "3*t^3 + 11*t^2 + 5*t + 5"),
            ("1342", "3*(t^3 + 3*t^2 + 3*t + 1)"),
            ("1423", "5*t^3 + 5*t^2 + 11*t + 3"),
            ("1432", "t^3 + 7*t^2 + 7*t + 9"),
        ],
    );
}

#[test]
fn inhomogeneous_ring_reference_values() {
    let m = build_inhom_tasep(&Partition::staircase(4), false)
        .unwrap()
        .stationary_compact()
        .unwrap();
    anchored_equal(
        &m,
        &[
            ("1234", "x1^3*x2"),
            ("1243", "x1^2*(x1*x2 + x1*x3 + x2*x3)"),
            ("1324", "x1*(x1^2*x2 + x1*x2^2 + x1^2*x3 + x1*x2*x3 + x2^2*x3)"),
            ("1342", "x1*x2*(x1^2 + x1*x2 + x2^2)"),
            ("1423", "x1^2*x2*(x1 + x2 + x3)"),
            ("1432", "(x1^2 + x1*x2 + x2^2)*(x1*x2 + x1*x3 + x2*x3)"),
        ],
    );
}

#[test]
fn open_chain_reference_values() {
    let m = build_open_asep3(2).unwrap().stationary_compact().unwrap();
    let expected = Measure::parse(
        m.ring(),
        [
            ("BB", "alpha^2"),
            ("BO", "alpha*beta*(alpha + beta + q)"),
            ("OB", "alpha*beta"),
            ("OO", "beta^2"),
        ],
    )
    .unwrap();
    assert_eq!(m, expected);
}

#[test]
fn five_state_example_measure() {
    let c = build_five_state();
    let m = c.stationary_compact().unwrap();
    let expected = Measure::parse(
        c.ring(),
        [
            ("1", "2*q^2 - q + 2"),
            ("2", "q^3 + 2*q^2 + 2*q + 1"),
            ("3", "2*q^2 + 1"),
            ("4", "q^2 + 2"),
            ("5", "2*q^2 + 2*q + 2"),
        ],
    )
    .unwrap();
    assert_eq!(m, expected);
}

#[test]
fn engines_agree() {
    let chains = [
        build_inhom_tasep(&Partition::staircase(3), true).unwrap(),
        build_masep(&Partition::new(vec![2, 1, 1, 0]).unwrap()).unwrap(),
        build_open_asep5(2).unwrap(),
        build_open_asep3(4).unwrap(),
    ];
    for c in &chains {
        let a = c.stationary_with(StationaryMethod::Reconstruction).unwrap();
        let b = c.stationary_with(StationaryMethod::Modular).unwrap();
        let e = c.stationary_with(StationaryMethod::Elimination).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, e);
        assert!(c.check_global_balance(&a).unwrap());
    }
}

#[test]
fn dense_engine_refuses_oversized_grids() {
    let c = build_inhom_tasep(&Partition::staircase(4), true).unwrap();
    assert!(matches!(
        c.stationary_with(StationaryMethod::Modular),
        Err(ChainError::GridTooLarge(_))
    ));
    let m = c.stationary_compact().unwrap();
    assert!(c.check_global_balance(&m).unwrap());
}
