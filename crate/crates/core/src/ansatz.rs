//! Explicit transfer matrices for the open boundary process.
//!
//! `D` carries `alpha` on its superdiagonal and `E` is lower triangular, so
//! a word of length `n` never moves a row vector started at `W = e_1`
//! beyond index `n + 1`: truncating at that dimension is exact.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::One;

use crate::models::{open3_ring, Word};
use crate::poly::{MultiPoly, PolyMatrix, Ring};

/// The leading `dim x dim` corner of the infinite solution.
#[derive(Clone, Debug)]
pub struct AnsatzTruncation {
    pub dim: usize,
    pub d: PolyMatrix,
    pub e: PolyMatrix,
    pub w: Vec<MultiPoly>,
    pub v: Vec<MultiPoly>,
}

fn binomial(a: i64, b: i64) -> BigInt {
    if b < 0 || b > a {
        return BigInt::from(0);
    }
    let mut r = BigInt::one();
    for k in 0..b {
        r = r * (a - k) / (k + 1);
    }
    r
}

/// Entry `e_{ij}` (1-based) of `E`; zero above the diagonal.
pub fn e_entry(ring: &Arc<Ring>, i: usize, j: usize) -> MultiPoly {
    if j > i || j == 0 {
        return MultiPoly::zero(ring);
    }
    let var = |name: &str| MultiPoly::var(ring, name).expect("ring variable");
    let (alpha, beta, q) = (var("alpha"), var("beta"), var("q"));
    let (i, j) = (i as i64, j as i64);
    let mut inner = q.pow((j - 1) as u32).scale(&binomial(i - 1, j - 1));
    let mut sum = MultiPoly::zero(ring);
    for r in 0..=j - 2 {
        sum = sum + q.pow(r as u32).scale(&binomial(i - j + r, r));
    }
    inner = inner + &alpha * &sum;
    beta.pow((i - j + 1) as u32) * inner
}

pub fn build_truncation(dim: usize) -> AnsatzTruncation {
    let ring = open3_ring();
    let alpha = MultiPoly::var(&ring, "alpha").expect("ring variable");
    let mut d = PolyMatrix::zeros(&ring, dim, dim);
    let mut e = PolyMatrix::zeros(&ring, dim, dim);
    for i in 0..dim {
        if i + 1 < dim {
            d.set(i, i + 1, alpha.clone());
        }
        for j in 0..=i {
            e.set(i, j, e_entry(&ring, i + 1, j + 1));
        }
    }
    let mut w = vec![MultiPoly::zero(&ring); dim];
    if dim > 0 {
        w[0] = MultiPoly::one(&ring);
    }
    AnsatzTruncation {
        dim,
        d,
        e,
        w,
        v: vec![MultiPoly::one(&ring); dim],
    }
}

/// The three relations with the constant `alpha * beta`.
pub fn check_relations(dim: usize) -> bool {
    let ring = open3_ring();
    let c = MultiPoly::parse(&ring, "alpha*beta").expect("valid");
    check_relations_with(dim, &c)
}

/// Checks `DE - qED = c(D + E)` on the leading `dim` window of the
/// truncation at `dim + 1`, `beta D V = c V` on the first `dim - 1` rows and
/// `alpha W E = c W` on all columns.
pub fn check_relations_with(dim: usize, c: &MultiPoly) -> bool {
    let big = build_truncation(dim + 1);
    let ring = big.d.ring().clone();
    let var = |name: &str| MultiPoly::var(&ring, name).expect("ring variable");
    let (alpha, beta, q) = (var("alpha"), var("beta"), var("q"));
    let de = big.d.mul(&big.e).expect("square");
    let ed = big.e.mul(&big.d).expect("square");
    let lhs = de.sub(&ed.scale(&q)).expect("same shape");
    let rhs = big.d.add(&big.e).expect("same shape").scale(c);
    let bulk = (0..dim).all(|i| (0..dim).all(|j| lhs.get(i, j) == rhs.get(i, j)));

    let t = build_truncation(dim);
    let dv: Vec<MultiPoly> = (0..dim)
        .map(|i| {
            t.d.row(i)
                .iter()
                .zip(&t.v)
                .fold(MultiPoly::zero(&ring), |acc, (a, b)| acc + a * b)
        })
        .collect();
    let right = (0..dim.saturating_sub(1)).all(|i| &beta * &dv[i] == c * &t.v[i]);
    let we = t.e.left_apply(&t.w).expect("matching length");
    let left = (0..dim).all(|j| &alpha * &we[j] == c * &t.w[j]);
    bulk && right && left
}

/// `W * prod(tau_i D + (1 - tau_i) E) * V` at truncation dimension `dim`.
pub fn transfer_psi_dim(tau: &Word, dim: usize) -> MultiPoly {
    let t = build_truncation(dim);
    let mut row = t.w.clone();
    for &b in tau.sites() {
        let m = if b { &t.d } else { &t.e };
        row = m.left_apply(&row).expect("matching length");
    }
    row.iter()
        .zip(&t.v)
        .fold(MultiPoly::zero(t.d.ring()), |acc, (a, b)| acc + a * b)
}

/// Exact matrix product for the word `tau`, using dimension `|tau| + 1`.
pub fn transfer_psi(tau: &Word) -> MultiPoly {
    transfer_psi_dim(tau, tau.len() + 1)
}

/// `W (D + E)^n V`, the partition function of the transfer product.
pub fn transfer_total(n: usize) -> MultiPoly {
    let t = build_truncation(n + 1);
    let s = t.d.add(&t.e).expect("same shape");
    let mut row = t.w.clone();
    for _ in 0..n {
        row = s.left_apply(&row).expect("matching length");
    }
    row.iter()
        .zip(&t.v)
        .fold(MultiPoly::zero(t.d.ring()), |acc, (a, b)| acc + a * b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> MultiPoly {
        MultiPoly::parse(&open3_ring(), s).unwrap()
    }

    #[test]
    fn displayed_entries() {
        let t = build_truncation(4);
        assert_eq!(t.e.get(0, 0), &p("beta"));
        assert_eq!(t.e.get(1, 1), &p("beta*(alpha + q)"));
        assert_eq!(t.e.get(2, 1), &p("beta^2*(alpha + 2*q)"));
        assert_eq!(t.d.get(0, 1), &p("alpha"));
        assert!(t.e.get(0, 1).is_zero());
        assert!(t.d.get(1, 0).is_zero());
    }

    #[test]
    fn relations() {
        assert!(check_relations(4));
        assert!(check_relations(8));
        assert!(!check_relations_with(4, &p("1")));
    }

    #[test]
    fn small_products() {
        assert_eq!(transfer_psi(&"BO".parse().unwrap()), p("alpha*beta*(alpha + beta + q)"));
        assert_eq!(transfer_psi(&"O".parse().unwrap()), p("beta"));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(3, -1), BigInt::from(0));
        assert_eq!(binomial(2, 3), BigInt::from(0));
        assert_eq!(binomial(0, 0), BigInt::from(1));
    }
}
