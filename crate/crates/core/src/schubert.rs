//! Permutations, pattern avoidance and Schubert polynomials.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::markov::ChainError;
use crate::models::{build_inhom_tasep, ModelError, Partition};
use crate::poly::{Monomial, MultiPoly, PolyError, Ring};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchubertError {
    #[error("`{0}` is not a permutation of 1..n")]
    NotAPermutation(String),
    #[error("pattern of length {pattern} is longer than the permutation ({len})")]
    PatternTooLong { pattern: usize, len: usize },
    #[error("permutations of different sizes ({0} and {1})")]
    SizeMismatch(usize, usize),
    #[error("divided difference was not exact")]
    NonExact,
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Chain(#[from] ChainError),
}

/// A permutation in one-line notation with values `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(one_line: Vec<usize>) -> Result<Permutation, SchubertError> {
        let n = one_line.len();
        let mut seen = vec![false; n + 1];
        for &v in &one_line {
            if v == 0 || v > n || seen[v] {
                return Err(SchubertError::NotAPermutation(format!("{one_line:?}")));
            }
            seen[v] = true;
        }
        Ok(Permutation(one_line))
    }

    pub fn identity(n: usize) -> Permutation {
        Permutation((1..=n).collect())
    }

    /// The longest element `n, n-1, ..., 1`.
    pub fn longest(n: usize) -> Permutation {
        Permutation((1..=n).rev().collect())
    }

    /// All of `S_n` in lexicographic order.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (1..=n).collect();
        loop {
            out.push(Permutation(cur.clone()));
            let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
                break;
            };
            let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).expect("ascent has a successor");
            cur.swap(i - 1, j);
            cur[i..].reverse();
        }
        out
    }

    pub fn one_line(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (i, &v) in self.0.iter().enumerate() {
            inv[v - 1] = i + 1;
        }
        Permutation(inv)
    }

    /// Positions `i` (1-based) with `w_i > w_{i+1}`.
    pub fn descents(&self) -> Vec<usize> {
        (1..self.len()).filter(|&i| self.0[i - 1] > self.0[i]).collect()
    }

    /// Descents of the inverse read off `self`: values `i` such that `i + 1`
    /// appears to the left of `i`.
    pub fn inverse_descents(&self) -> Vec<usize> {
        let pos = self.inverse();
        (1..self.len())
            .filter(|&i| pos.0[i] < pos.0[i - 1])
            .collect()
    }

    /// Number of inversions, the degree of the Schubert polynomial.
    pub fn length(&self) -> usize {
        let w = &self.0;
        (0..w.len())
            .map(|i| (i + 1..w.len()).filter(|&j| w[i] > w[j]).count())
            .sum()
    }

    /// `w s_i`: the entries at positions `i` and `i + 1` (1-based) swapped.
    pub fn swap_positions(&self, i: usize) -> Permutation {
        let mut w = self.0.clone();
        w.swap(i - 1, i);
        Permutation(w)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len() <= 9 {
            self.0.iter().try_for_each(|v| write!(f, "{v}"))
        } else {
            let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
            f.write_str(&parts.join(","))
        }
    }
}

impl FromStr for Permutation {
    type Err = SchubertError;

    /// Accepts `1432` or `1,4,3,2`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SchubertError::NotAPermutation(s.to_string());
        let s = s.trim();
        let values: Vec<usize> = if s.contains(',') {
            s.split(',')
                .map(|p| p.trim().parse().map_err(|_| bad()))
                .collect::<Result<_, _>>()?
        } else {
            s.chars()
                .map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(bad))
                .collect::<Result<_, _>>()?
        };
        Permutation::new(values).map_err(|_| bad())
    }
}

impl Serialize for Permutation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// True iff some subsequence of `w` is order-isomorphic to `p`.
pub fn contains_pattern(w: &Permutation, p: &Permutation) -> Result<bool, SchubertError> {
    if p.len() > w.len() {
        return Err(SchubertError::PatternTooLong {
            pattern: p.len(),
            len: w.len(),
        });
    }
    let mut chosen = Vec::with_capacity(p.len());
    Ok(extend_match(w.one_line(), p.one_line(), 0, &mut chosen))
}

fn extend_match(w: &[usize], p: &[usize], start: usize, chosen: &mut Vec<usize>) -> bool {
    let k = chosen.len();
    if k == p.len() {
        return true;
    }
    // leave room for the remaining pattern letters
    for i in start..=w.len() - (p.len() - k) {
        let fits = chosen
            .iter()
            .zip(p)
            .all(|(&c, &pv)| (w[c] < w[i]) == (pv < p[k]));
        if fits {
            chosen.push(i);
            if extend_match(w, p, i + 1, chosen) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

/// The four forbidden patterns 2413, 4132, 4213 and 3214.
pub fn evil_patterns() -> [Permutation; 4] {
    [
        Permutation(vec![2, 4, 1, 3]),
        Permutation(vec![4, 1, 3, 2]),
        Permutation(vec![4, 2, 1, 3]),
        Permutation(vec![3, 2, 1, 4]),
    ]
}

pub fn is_evil_avoiding(w: &Permutation) -> bool {
    w.len() < 4
        || evil_patterns()
            .iter()
            .all(|p| !contains_pattern(w, p).expect("pattern fits"))
}

/// The ring `x1, ..., xn`.
pub fn schubert_ring(n: usize) -> Arc<Ring> {
    Ring::new((1..=n.max(1)).map(|i| format!("x{i}"))).expect("valid names")
}

/// `(f - s_i f) / (x_i - x_{i+1})` for 1-based `i`.
pub fn divided_difference(f: &MultiPoly, i: usize) -> Result<MultiPoly, SchubertError> {
    let ring = f.ring();
    let diff = f - &f.swap_vars(i - 1, i);
    let denom = MultiPoly::var_pow(ring, i - 1, 1) - MultiPoly::var_pow(ring, i, 1);
    diff.exact_div(&denom).map_err(|_| SchubertError::NonExact)
}

/// Memoized Schubert polynomials of `S_n`.
#[derive(Debug)]
pub struct SchubertTable {
    n: usize,
    ring: Arc<Ring>,
    memo: HashMap<Permutation, MultiPoly>,
}

impl SchubertTable {
    pub fn new(n: usize) -> SchubertTable {
        SchubertTable {
            n,
            ring: schubert_ring(n),
            memo: HashMap::new(),
        }
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    /// Descends from `w0` one ascent at a time: `S_w = d_i S_{w s_i}`
    /// whenever `w_i < w_{i+1}`.
    pub fn get(&mut self, w: &Permutation) -> Result<MultiPoly, SchubertError> {
        if w.len() != self.n {
            return Err(SchubertError::SizeMismatch(w.len(), self.n));
        }
        if let Some(p) = self.memo.get(w) {
            return Ok(p.clone());
        }
        let p = match (1..self.n).find(|&i| w.one_line()[i - 1] < w.one_line()[i]) {
            None => {
                let exps: Vec<u16> = (0..self.n).map(|i| (self.n - 1 - i) as u16).collect();
                MultiPoly::monomial(&self.ring, Monomial::from_exponents(&exps), 1.into())
            }
            Some(i) => {
                let up = self.get(&w.swap_positions(i))?;
                divided_difference(&up, i)?
            }
        };
        self.memo.insert(w.clone(), p.clone());
        Ok(p)
    }
}

pub fn schubert_poly(w: &Permutation) -> Result<MultiPoly, SchubertError> {
    SchubertTable::new(w.len()).get(w)
}

/// Sum of all degree `k` monomials in the multiset `vars` of ring
/// variables; repeated names count as distinct letters.
pub fn complete_homogeneous(ring: &Arc<Ring>, k: u32, vars: &[&str]) -> Result<MultiPoly, SchubertError> {
    let polys = vars
        .iter()
        .map(|v| MultiPoly::var(ring, v))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(h_rec(ring, k, &polys))
}

fn h_rec(ring: &Arc<Ring>, k: u32, vars: &[MultiPoly]) -> MultiPoly {
    match vars.split_first() {
        _ if k == 0 => MultiPoly::one(ring),
        None => MultiPoly::zero(ring),
        Some((v, rest)) => (0..=k).fold(MultiPoly::zero(ring), |acc, j| acc + v.pow(j) * h_rec(ring, k - j, rest)),
    }
}

/// `prod_{i=1}^{n} h_{n-i}(x1, ..., x_{i-1}, x_i, x_i)`.
pub fn z_product(ring: &Arc<Ring>, n: usize) -> Result<MultiPoly, SchubertError> {
    let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    let mut z = MultiPoly::one(ring);
    for i in 1..=n {
        let mut vars: Vec<&str> = names[..i].iter().map(String::as_str).collect();
        vars.push(&names[i - 1]);
        z = z * complete_homogeneous(ring, (n - i) as u32, &vars)?;
    }
    Ok(z)
}

/// `x^D p(1/x)` divided by its monomial content, where `D` is the vector
/// of per-variable degrees of `p`.
pub fn invert_variables(p: &MultiPoly) -> MultiPoly {
    let ring = p.ring();
    let nv = ring.nvars();
    let top: Vec<u16> = (0..nv).map(|i| p.degree_in(i)).collect();
    let flipped = MultiPoly::from_terms(
        ring,
        p.terms().iter().map(|(m, c)| {
            let e: Vec<u16> = (0..nv).map(|i| top[i] - m.exp(i)).collect();
            (Monomial::from_exponents(&e), c.clone())
        }),
    );
    let g = MultiPoly::monomial(ring, flipped.monomial_content(), 1.into());
    flipped.exact_div(&g).expect("monomial content divides")
}

#[derive(Clone, Debug, Serialize)]
pub struct KwEntry {
    pub state: Permutation,
    pub evil_avoiding: bool,
    /// Descents of the inverse permutation.
    pub k: usize,
    pub psi: String,
    /// Monomial gcd of the terms of `psi`, with its integer content.
    pub monomial: Option<String>,
    /// Schubert factors found, empty when `k = 0`.
    pub factors: Option<Vec<Permutation>>,
    pub verified: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct KwReport {
    pub n: usize,
    pub entries: Vec<KwEntry>,
    /// Sum of the compact measure over all states.
    pub total: String,
    pub z_product: String,
    /// Literal equality of the two.
    pub total_equals_z: bool,
    /// `z_product` with every `x_i` replaced by `1/x_i`, cleared of
    /// denominators and of its monomial content.
    pub z_inverted: String,
    pub total_equals_z_inverted: bool,
    /// Every evil-avoiding state factors as claimed.
    pub all_verified: bool,
}

/// Checks the Schubert factorization of the stationary measure of the
/// inhomogeneous process with `lambda = (n, ..., 1)` and `y = 0`.
pub fn verify_kw(n: usize) -> Result<KwReport, SchubertError> {
    let lambda = Partition::staircase(n as u32);
    let chain = build_inhom_tasep(&lambda, false)?;
    let measure = chain.stationary_compact()?;
    let ring = schubert_ring(n);
    let mut table = SchubertTable::new(n);
    let candidates: Vec<(Permutation, MultiPoly)> = Permutation::all(n)
        .into_iter()
        .filter(|w| w.length() > 0)
        .map(|w| {
            let s = table.get(&w)?;
            Ok((w, s))
        })
        .collect::<Result<_, SchubertError>>()?;

    let mut entries = Vec::new();
    let mut total = MultiPoly::zero(&ring);
    for (state, value) in measure.states().iter().zip(measure.values()) {
        let psi = value.to_ring(&ring)?;
        total = total + &psi;
        let w: Permutation = state.parse()?;
        if w.one_line()[0] != 1 {
            continue;
        }
        let evil_avoiding = is_evil_avoiding(&w);
        let k = w.inverse().descents().len();
        let mono = psi.monomial_content();
        let c = psi.content();
        let monomial = MultiPoly::monomial(&ring, mono, c);
        let rest = psi.exact_div(&monomial)?;
        let factors = if evil_avoiding {
            let mut found = Vec::new();
            factor_search(&rest, k, 0, &candidates, &mut found).then_some(found)
        } else {
            None
        };
        entries.push(KwEntry {
            state: w,
            evil_avoiding,
            k,
            psi: psi.to_string(),
            monomial: Some(monomial.to_string()),
            verified: factors.is_some(),
            factors,
        });
    }
    let z = z_product(&ring, n)?;
    let z_inverted = invert_variables(&z);
    Ok(KwReport {
        n,
        all_verified: entries.iter().all(|e| !e.evil_avoiding || e.verified),
        entries,
        total: total.to_string(),
        z_product: z.to_string(),
        total_equals_z: total == z,
        total_equals_z_inverted: total == z_inverted,
        z_inverted: z_inverted.to_string(),
    })
}

/// Writes `rest` as a product of exactly `k` candidate factors taken in
/// nondecreasing candidate order.
fn factor_search(
    rest: &MultiPoly,
    k: usize,
    from: usize,
    candidates: &[(Permutation, MultiPoly)],
    found: &mut Vec<Permutation>,
) -> bool {
    if k == 0 {
        return rest.is_one();
    }
    let degree = rest.total_degree() as usize;
    for (idx, (w, s)) in candidates.iter().enumerate().skip(from) {
        // every remaining factor has degree at least one
        let len = w.length();
        if len + (k - 1) > degree {
            continue;
        }
        let Ok(quotient) = rest.exact_div(s) else {
            continue;
        };
        found.push(w.clone());
        if factor_search(&quotient, k - 1, idx, candidates, found) {
            return true;
        }
        found.pop();
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    fn p(n: usize, s: &str) -> MultiPoly {
        MultiPoly::parse(&schubert_ring(n), s).unwrap()
    }

    #[test]
    fn patterns() {
        assert!(contains_pattern(&perm("326514"), &perm("2413")).unwrap());
        assert!(!contains_pattern(&perm("123"), &perm("21")).unwrap());
        assert!(!contains_pattern(&perm("1432"), &perm("3214")).unwrap());
        assert!(contains_pattern(&perm("12"), &perm("123")).is_err());
        assert!(is_evil_avoiding(&perm("1432")));
        assert!(is_evil_avoiding(&perm("1234")));
        assert!(!is_evil_avoiding(&perm("3214")));
    }

    #[test]
    fn parsing() {
        assert_eq!(perm("1,4,3,2"), perm("1432"));
        assert!("1224".parse::<Permutation>().is_err());
        assert!("105".parse::<Permutation>().is_err());
        assert_eq!(perm("2,1").to_string(), "21");
        assert_eq!(Permutation::all(3).len(), 6);
        assert_eq!(Permutation::all(0).len(), 1);
    }

    #[test]
    fn small_schubert() {
        assert_eq!(schubert_poly(&perm("1243")).unwrap(), p(4, "x1 + x2 + x3"));
        assert_eq!(schubert_poly(&perm("1423")).unwrap(), p(4, "x1^2 + x1*x2 + x2^2"));
        assert_eq!(schubert_poly(&perm("1342")).unwrap(), p(4, "x1*x2 + x1*x3 + x2*x3"));
        assert!(schubert_poly(&Permutation::identity(4)).unwrap().is_one());
        assert_eq!(schubert_poly(&perm("321")).unwrap(), p(3, "x1^2*x2"));
        assert_eq!(schubert_poly(&perm("2134")).unwrap(), p(4, "x1"));
    }

    #[test]
    fn homogeneous() {
        let r = schubert_ring(3);
        assert!(complete_homogeneous(&r, 0, &["x1"]).unwrap().is_one());
        assert_eq!(complete_homogeneous(&r, 2, &["x1", "x2"]).unwrap(), p(3, "x1^2 + x1*x2 + x2^2"));
        assert_eq!(
            complete_homogeneous(&r, 1, &["x1", "x2", "x3", "x3"]).unwrap(),
            p(3, "x1 + x2 + 2*x3")
        );
        assert!(complete_homogeneous(&r, 2, &[]).unwrap().is_zero());
    }

    #[test]
    fn inverted_variables() {
        assert_eq!(invert_variables(&p(2, "3*x1^3 + 6*x1^2*x2")), p(2, "6*x1 + 3*x2"));
        assert_eq!(invert_variables(&p(2, "x1^2*x2")), p(2, "1"));
    }

    #[test]
    fn inverse_descent_bookkeeping() {
        let w = perm("1432");
        assert_eq!(w.inverse(), perm("1432"));
        assert_eq!(perm("1342").inverse(), perm("1423"));
        assert_eq!(perm("1342").inverse_descents(), perm("1423").descents());
    }
}
