//! Spanning arborescences and the tree-theorem measure.
//!
//! An arborescence rooted at `r` picks one outgoing edge for every other
//! state so that following the edges from anywhere leads to `r`. Its
//! weight is the product of the chosen rates. The weight sum over all
//! arborescences rooted at `r` is the principal minor of the out-degree
//! Laplacian obtained by deleting row and column `r`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::markov::{modular, ChainError, Measure, SymbolicChain};
use crate::poly::{integer_determinant, MultiPoly, PolyError, PolyMatrix};

/// Default bound on the number of arborescences materialized at once.
pub const DEFAULT_TREE_CAP: usize = 1_000_000;

/// Environment variable overriding [`DEFAULT_TREE_CAP`].
pub const TREE_CAP_ENV: &str = "ASEP_TREE_CAP";

/// Chains up to this size take symbolic determinants directly.
const SYMBOLIC_DET_LIMIT: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error("more than {0} arborescences; use the determinant instead")]
    CapExceeded(usize),
    #[error("tree weight at `{0}` is not divisible by the reference entry")]
    NotDivisible(String),
    #[error("quotient at `{state}` differs from the quotient at `{first}`")]
    QuotientVaries { first: String, state: String },
    #[error("reference entry at `{0}` is zero")]
    ZeroReference(String),
}

impl From<PolyError> for TreeError {
    fn from(e: PolyError) -> Self {
        TreeError::Chain(e.into())
    }
}

/// The cap from [`TREE_CAP_ENV`] when set to a positive integer.
pub fn tree_cap() -> usize {
    std::env::var(TREE_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&c| c > 0)
        .unwrap_or(DEFAULT_TREE_CAP)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arborescence {
    pub root: usize,
    /// `parent[x]` is the head of the edge leaving `x`; `None` at the root.
    pub parent: Vec<Option<usize>>,
}

impl Arborescence {
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.parent
            .iter()
            .enumerate()
            .filter_map(|(x, p)| p.map(|p| (x, p)))
    }

    pub fn weight(&self, c: &SymbolicChain) -> MultiPoly {
        self.edges().fold(MultiPoly::one(c.ring()), |acc, (x, y)| {
            acc * c.rate(x, y).expect("tree edges are chain edges")
        })
    }
}

/// All arborescences rooted at `root`, in lexicographic order of their
/// parent vectors.
pub fn enumerate_arborescences(c: &SymbolicChain, root: usize, cap: usize) -> Result<Vec<Arborescence>, TreeError> {
    let n = c.len();
    if root >= n {
        return Err(ChainError::StateIndex { index: root, len: n }.into());
    }
    c.check_irreducible()?;
    let out: Vec<Vec<usize>> = (0..n).map(|i| c.out_edges(i).map(|(j, _)| j).collect()).collect();
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut found = Vec::new();
    search(&out, root, 0, &mut parent, &mut found, cap)?;
    Ok(found)
}

fn search(
    out: &[Vec<usize>],
    root: usize,
    v: usize,
    parent: &mut Vec<Option<usize>>,
    found: &mut Vec<Arborescence>,
    cap: usize,
) -> Result<(), TreeError> {
    if v == out.len() {
        if found.len() == cap {
            return Err(TreeError::CapExceeded(cap));
        }
        found.push(Arborescence {
            root,
            parent: parent.clone(),
        });
        return Ok(());
    }
    if v == root {
        return search(out, root, v + 1, parent, found, cap);
    }
    for &w in &out[v] {
        // reject the edge if it closes a cycle through assigned edges
        let mut x = w;
        let mut cycle = false;
        while let Some(p) = parent[x] {
            if p == v {
                cycle = true;
                break;
            }
            x = p;
        }
        if cycle || w == v {
            continue;
        }
        parent[v] = Some(w);
        search(out, root, v + 1, parent, found, cap)?;
        parent[v] = None;
    }
    Ok(())
}

fn minor(lap: &PolyMatrix, root: usize) -> PolyMatrix {
    let keep: Vec<usize> = (0..lap.rows()).filter(|&k| k != root).collect();
    let rows = keep
        .iter()
        .map(|&i| keep.iter().map(|&j| lap.get(i, j).clone()).collect())
        .collect();
    PolyMatrix::from_rows(lap.ring(), rows).expect("square minor")
}

/// Weight sum of the arborescences rooted at `root`.
pub fn psi_tree(c: &SymbolicChain, root: usize) -> Result<MultiPoly, TreeError> {
    if root >= c.len() {
        return Err(ChainError::StateIndex {
            index: root,
            len: c.len(),
        }
        .into());
    }
    c.check_irreducible()?;
    if c.len() <= SYMBOLIC_DET_LIMIT {
        Ok(minor(&c.laplacian(), root).determinant()?)
    } else {
        Ok(modular::tree_vector(c)?.swap_remove(root))
    }
}

/// The tree-theorem measure, deliberately left without gcd removal.
pub fn mctt_measure(c: &SymbolicChain) -> Result<Measure, TreeError> {
    c.check_irreducible()?;
    let values = if c.len() <= SYMBOLIC_DET_LIMIT {
        let lap = c.laplacian();
        (0..c.len())
            .map(|r| minor(&lap, r).determinant())
            .collect::<Result<Vec<_>, _>>()?
    } else {
        modular::tree_vector(c)?
    };
    Ok(Measure::new(c.states().to_vec(), values)?)
}

/// Integer tree-theorem vector with `values[i]` substituted for ring
/// variable `i` before taking determinants.
pub fn mctt_at(c: &SymbolicChain, values: &[BigInt]) -> Result<Vec<BigInt>, TreeError> {
    c.check_irreducible()?;
    let lap = c.laplacian().eval_int(values);
    let n = c.len();
    Ok((0..n)
        .map(|r| {
            let m: Vec<Vec<BigInt>> = (0..n)
                .filter(|&i| i != r)
                .map(|i| (0..n).filter(|&j| j != r).map(|j| lap[i][j].clone()).collect())
                .collect();
            integer_determinant(m)
        })
        .collect())
}

/// The common quotient of the tree measure by a reference measure.
pub fn ratio_q(c: &SymbolicChain, reference: &Measure) -> Result<MultiPoly, TreeError> {
    let tree = mctt_measure(c)?;
    ratio_of(&tree, reference)
}

/// The common quotient `tree / reference`, checked at every state.
pub fn ratio_of(tree: &Measure, reference: &Measure) -> Result<MultiPoly, TreeError> {
    if tree.len() != reference.len() {
        return Err(ChainError::IndexMismatch {
            expected: tree.len(),
            got: reference.len(),
        }
        .into());
    }
    let mut common: Option<(String, MultiPoly)> = None;
    for ((s, t), r) in tree.states().iter().zip(tree.values()).zip(reference.values()) {
        let r = r.to_ring(t.ring())?;
        if r.is_zero() {
            return Err(TreeError::ZeroReference(s.clone()));
        }
        let q = t.exact_div(&r).map_err(|_| TreeError::NotDivisible(s.clone()))?;
        match &common {
            None => common = Some((s.clone(), q)),
            Some((first, q0)) if *q0 != q => {
                return Err(TreeError::QuotientVaries {
                    first: first.clone(),
                    state: s.clone(),
                })
            }
            Some(_) => {}
        }
    }
    Ok(common.expect("nonempty measure").1)
}

/// Numeric ratio at an integer point: the tree vector evaluated by integer
/// determinants against integer reference values.
pub fn ratio_q_at(c: &SymbolicChain, reference: &[BigInt], values: &[BigInt]) -> Result<BigRational, TreeError> {
    let tree = mctt_at(c, values)?;
    if tree.len() != reference.len() {
        return Err(ChainError::IndexMismatch {
            expected: tree.len(),
            got: reference.len(),
        }
        .into());
    }
    let mut common: Option<BigRational> = None;
    for (k, (t, r)) in tree.into_iter().zip(reference).enumerate() {
        let state = c.states()[k].clone();
        if r.is_zero() {
            return Err(TreeError::ZeroReference(state));
        }
        let q = BigRational::new(t, r.clone());
        match &common {
            None => common = Some(q),
            Some(q0) if *q0 != q => {
                return Err(TreeError::QuotientVaries {
                    first: c.states()[0].clone(),
                    state,
                })
            }
            Some(_) => {}
        }
    }
    Ok(common.expect("nonempty chain"))
}
