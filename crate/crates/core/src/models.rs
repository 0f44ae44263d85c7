//! Chain builders for the exclusion processes.
//!
//! Open-boundary states are words over `B` (particle) and `O` (hole) in
//! lexicographic order; ring states are the distinct rearrangements of a
//! partition, also in lexicographic order.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::markov::{ChainError, SymbolicChain};
use crate::poly::{MultiPoly, Ring};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("lattice size must be at least 1")]
    ZeroSize,
    #[error("partition must be weakly decreasing: {0}")]
    NotAPartition(String),
    #[error("partition needs at least two distinct parts")]
    ConstantPartition,
    #[error("invalid word `{0}`: use B/O (or 1/0) letters")]
    BadWord(String),
    #[error(transparent)]
    Chain(#[from] ChainError),
}

/// Occupation word of an open-boundary lattice; `true` is a particle.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<bool>);

impl Word {
    pub fn new(sites: Vec<bool>) -> Word {
        Word(sites)
    }

    pub fn sites(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn particles(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    /// All `2^n` words, `B` before `O` at every site.
    pub fn all(n: usize) -> Vec<Word> {
        (0..1usize << n)
            .map(|k| Word((0..n).map(|i| k >> (n - 1 - i) & 1 == 0).collect()))
            .collect()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "B" } else { "O" })?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = ModelError;

    /// Accepts `B`/`O`, `1`/`0` and the bullet symbols `•`/`∘`.
    fn from_str(s: &str) -> Result<Word, ModelError> {
        let sites = s
            .chars()
            .map(|c| match c {
                'B' | 'b' | '1' | '•' => Ok(true),
                'O' | 'o' | '0' | '∘' => Ok(false),
                _ => Err(ModelError::BadWord(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        if sites.is_empty() {
            return Err(ModelError::BadWord(s.to_string()));
        }
        Ok(Word(sites))
    }
}

/// Weakly decreasing sequence of nonnegative parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition(Vec<u32>);

impl Partition {
    pub fn new(parts: Vec<u32>) -> Result<Partition, ModelError> {
        if parts.is_empty() {
            return Err(ModelError::ZeroSize);
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(ModelError::NotAPartition(format!("{parts:?}")));
        }
        Ok(Partition(parts))
    }

    /// The staircase `(n, n-1, ..., 1)`.
    pub fn staircase(n: u32) -> Partition {
        Partition((1..=n).rev().collect())
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Distinct part values in increasing order.
    pub fn values(&self) -> Vec<u32> {
        let mut v = self.0.clone();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Distinct rearrangements in lexicographic order.
    pub fn arrangements(&self) -> Vec<Vec<u32>> {
        let mut cur: Vec<u32> = self.0.clone();
        cur.sort_unstable();
        let mut out = vec![cur.clone()];
        while next_permutation(&mut cur) {
            out.push(cur.clone());
        }
        out
    }
}

impl FromStr for Partition {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Partition, ModelError> {
        let parts = s
            .split(',')
            .map(|p| p.trim().parse::<u32>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| ModelError::NotAPartition(s.to_string()))?;
        Partition::new(parts)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

fn next_permutation(v: &mut [u32]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).expect("successor exists");
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// State label of a ring configuration: digits when every part is at most
/// nine, comma separated otherwise.
pub fn encode_ring_state(state: &[u32]) -> String {
    if state.iter().all(|&x| x <= 9) {
        state.iter().map(u32::to_string).collect()
    } else {
        state.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
    }
}

pub fn decode_ring_state(label: &str) -> Option<Vec<u32>> {
    if label.contains(',') {
        label.split(',').map(|p| p.parse().ok()).collect()
    } else {
        label.chars().map(|c| c.to_digit(10)).collect()
    }
}

/// The four model families.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Model {
    Open3 { n: usize },
    Open5 { n: usize },
    Masep { lambda: Partition },
    Tasep { lambda: Partition, with_y: bool },
    /// The five-state chain of [`build_five_state`].
    FiveState,
}

impl Model {
    pub fn build(&self) -> Result<SymbolicChain, ModelError> {
        match self {
            Model::Open3 { n } => build_open_asep3(*n),
            Model::Open5 { n } => build_open_asep5(*n),
            Model::Masep { lambda } => build_masep(lambda),
            Model::Tasep { lambda, with_y } => build_inhom_tasep(lambda, *with_y),
            Model::FiveState => Ok(build_five_state()),
        }
    }
}

/// States `1..5` with rates `1` and `q`. Its tree-theorem measure carries
/// the common factor `q + 1`, so the compact measure is not manifestly
/// positive.
pub fn build_five_state() -> SymbolicChain {
    let ring = Ring::new(["q"]).expect("valid names");
    let one = MultiPoly::one(&ring);
    let q = MultiPoly::var(&ring, "q").expect("ring variable");
    let edges = [
        (0, 2, &one),
        (0, 3, &q),
        (1, 4, &one),
        (2, 0, &q),
        (2, 1, &one),
        (2, 4, &one),
        (3, 0, &one),
        (3, 1, &q),
        (3, 4, &q),
        (4, 2, &q),
        (4, 3, &one),
    ];
    let states = (1..=5).map(|i| i.to_string()).collect();
    SymbolicChain::new(&ring, states, edges.iter().map(|&(i, j, r)| (i, j, r.clone()))).expect("valid chain")
}

pub fn open3_ring() -> Arc<Ring> {
    Ring::new(["alpha", "beta", "q"]).expect("valid names")
}

pub fn open5_ring() -> Arc<Ring> {
    Ring::new(["alpha", "beta", "gamma", "delta", "q"]).expect("valid names")
}

/// Open boundary process with entry `alpha` on the left, exit `beta` on the
/// right, and bulk hops at rate 1 rightward and `q` leftward.
pub fn build_open_asep3(n: usize) -> Result<SymbolicChain, ModelError> {
    build_open(n, &open3_ring(), false)
}

/// As [`build_open_asep3`] with left exit `gamma` and right entry `delta`.
pub fn build_open_asep5(n: usize) -> Result<SymbolicChain, ModelError> {
    build_open(n, &open5_ring(), true)
}

fn build_open(n: usize, ring: &Arc<Ring>, five: bool) -> Result<SymbolicChain, ModelError> {
    if n == 0 {
        return Err(ModelError::ZeroSize);
    }
    let var = |name: &str| MultiPoly::var(ring, name).expect("ring variable");
    let words = Word::all(n);
    let index = |w: &[bool]| -> usize {
        w.iter().fold(0usize, |acc, &b| acc << 1 | usize::from(!b))
    };
    let mut edges = Vec::new();
    for (k, w) in words.iter().enumerate() {
        let s = w.sites();
        let mut push = |t: Vec<bool>, r: MultiPoly| edges.push((k, index(&t), r));
        let flip = |site: usize| {
            let mut t = s.to_vec();
            t[site] = !t[site];
            t
        };
        if !s[0] {
            push(flip(0), var("alpha"));
        } else if five {
            push(flip(0), var("gamma"));
        }
        if s[n - 1] {
            push(flip(n - 1), var("beta"));
        } else if five {
            push(flip(n - 1), var("delta"));
        }
        for i in 0..n - 1 {
            if s[i] != s[i + 1] {
                let mut t = s.to_vec();
                t.swap(i, i + 1);
                let r = if s[i] { MultiPoly::one(ring) } else { var("q") };
                push(t, r);
            }
        }
    }
    let labels = words.iter().map(Word::to_string).collect();
    Ok(SymbolicChain::new(ring, labels, edges)?)
}

/// Multispecies process on a ring with `t` for a heavier particle passing
/// forward and 1 for a lighter one.
pub fn build_masep(lambda: &Partition) -> Result<SymbolicChain, ModelError> {
    let ring = Ring::new(["t"]).expect("valid name");
    let t = MultiPoly::var(&ring, "t").expect("ring variable");
    let one = MultiPoly::one(&ring);
    build_ring(lambda, &ring, |a, b| {
        if a > b {
            Some(t.clone())
        } else {
            Some(one.clone())
        }
    })
}

/// Ring of the inhomogeneous process: `x1..` for every part value, then
/// `y1..` when requested.
pub fn tasep_ring(lambda: &Partition, with_y: bool) -> Arc<Ring> {
    let values = lambda.values();
    let mut names: Vec<String> = values.iter().map(|v| format!("x{v}")).collect();
    if with_y {
        names.extend(values.iter().map(|v| format!("y{v}")));
    }
    Ring::new(names).expect("valid names")
}

/// Totally asymmetric process on a ring: adjacent `a < b` swap at rate
/// `x_a - y_b`.
pub fn build_inhom_tasep(lambda: &Partition, with_y: bool) -> Result<SymbolicChain, ModelError> {
    let ring = tasep_ring(lambda, with_y);
    build_ring(lambda, &ring, |a, b| {
        (a < b).then(|| {
            let x = MultiPoly::var(&ring, &format!("x{a}")).expect("ring variable");
            if with_y {
                x - MultiPoly::var(&ring, &format!("y{b}")).expect("ring variable")
            } else {
                x
            }
        })
    })
}

fn build_ring<F>(lambda: &Partition, ring: &Arc<Ring>, rate: F) -> Result<SymbolicChain, ModelError>
where
    F: Fn(u32, u32) -> Option<MultiPoly>,
{
    if lambda.values().len() < 2 {
        return Err(ModelError::ConstantPartition);
    }
    let states = lambda.arrangements();
    let n = lambda.len();
    let index: std::collections::HashMap<&[u32], usize> =
        states.iter().enumerate().map(|(i, s)| (s.as_slice(), i)).collect();
    let mut edges = Vec::new();
    for (k, s) in states.iter().enumerate() {
        for i in 0..n {
            let j = (i + 1) % n;
            if s[i] == s[j] {
                continue;
            }
            if let Some(r) = rate(s[i], s[j]) {
                let mut t = s.clone();
                t.swap(i, j);
                edges.push((k, index[t.as_slice()], r));
            }
        }
    }
    let labels = states.iter().map(|s| encode_ring_state(s)).collect();
    Ok(SymbolicChain::new(ring, labels, edges)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::assignment;
    use num_rational::BigRational;

    #[test]
    fn open3_two_sites_edges() {
        let c = build_open_asep3(2).unwrap();
        assert_eq!(c.states(), &["BB", "BO", "OB", "OO"]);
        let mut rates: Vec<String> = c.edges().map(|(_, _, r)| r.to_string()).collect();
        rates.sort();
        assert_eq!(rates, ["1", "alpha", "alpha", "beta", "beta", "q"]);
        assert_eq!(build_open_asep3(0).unwrap_err(), ModelError::ZeroSize);
    }

    #[test]
    fn open3_single_site() {
        let c = build_open_asep3(1).unwrap();
        let m = c.stationary_compact().unwrap();
        assert_eq!(m.to_json().to_string(), r#"{"B":"alpha","O":"beta"}"#);
    }

    #[test]
    fn open3_three_sites_total_at_ones() {
        let m = build_open_asep3(3).unwrap().stationary_compact().unwrap();
        let ones = assignment([("alpha", 1, 1), ("beta", 1, 1), ("q", 1, 1)]);
        assert_eq!(m.total().evaluate(&ones).unwrap(), BigRational::from_integer(24.into()));
    }

    #[test]
    fn open5_small_cases() {
        let c = build_open_asep5(1).unwrap();
        let m = c.stationary_compact().unwrap();
        assert_eq!(m.to_json().to_string(), r#"{"B":"alpha + delta","O":"beta + gamma"}"#);
        assert_eq!(build_open_asep5(2).unwrap().edge_count(), 10);
    }

    #[test]
    fn ring_state_counts() {
        assert_eq!(build_masep(&"4,3,2,1".parse().unwrap()).unwrap().len(), 24);
        assert_eq!(build_masep(&"2,1,1".parse().unwrap()).unwrap().len(), 3);
        assert_eq!(
            build_masep(&"1,1".parse().unwrap()).unwrap_err(),
            ModelError::ConstantPartition
        );
        assert!("1,2".parse::<Partition>().is_err());
    }

    #[test]
    fn two_site_ring_accumulates_parallel_swaps() {
        let c = build_masep(&"1,0".parse().unwrap()).unwrap();
        assert_eq!(c.states(), &["01", "10"]);
        assert_eq!(c.rate(0, 1).unwrap().to_string(), "t + 1");
        assert_eq!(c.rate(1, 0).unwrap().to_string(), "t + 1");
        let m = c.stationary_compact().unwrap();
        assert!(m.values().iter().all(MultiPoly::is_one));
    }

    #[test]
    fn tasep_two_states_uniform() {
        let c = build_inhom_tasep(&"2,1".parse().unwrap(), false).unwrap();
        assert_eq!(c.len(), 2);
        let m = c.stationary_compact().unwrap();
        assert!(m.values().iter().all(MultiPoly::is_one));
    }

    #[test]
    fn tasep_rates_use_smaller_x_and_larger_y() {
        let c = build_inhom_tasep(&"4,3,2,1".parse().unwrap(), true).unwrap();
        let from = c.state_index("1234").unwrap();
        // 4 then 1 across the wrap-around is not an ascent; 1 then 2 is
        let to = c.state_index("2134").unwrap();
        assert_eq!(c.rate(from, to).unwrap().to_string(), "x1 - y2");
        assert!(c.rate(from, c.state_index("4231").unwrap()).is_none());
    }

    #[test]
    fn words_round_trip() {
        let w: Word = "∘•∘••∘•".parse().unwrap();
        assert_eq!(w.to_string(), "OBOBBOB");
        assert_eq!("OBOBBOB".parse::<Word>().unwrap(), w);
        assert!("OXB".parse::<Word>().is_err());
        assert_eq!(decode_ring_state("1234"), Some(vec![1, 2, 3, 4]));
        assert_eq!(encode_ring_state(&[10, 2]), "10,2");
        assert_eq!(decode_ring_state("10,2"), Some(vec![10, 2]));
    }
}
