use std::collections::BTreeMap;

use super::{ChainError, Measure, SymbolicChain};
use crate::poly::MultiPoly;

/// A surjection from the states of a source chain onto a target state list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LumpingMap {
    targets: Vec<String>,
    /// `assignment[x]` is the target index of source state `x`.
    assignment: Vec<usize>,
}

impl LumpingMap {
    /// Builds the map from a labelling function; targets are listed in order
    /// of first appearance along the source states.
    pub fn from_fn<F>(source: &SymbolicChain, f: F) -> LumpingMap
    where
        F: Fn(&str) -> String,
    {
        let mut targets: Vec<String> = Vec::new();
        let mut assignment = Vec::with_capacity(source.len());
        for s in source.states() {
            let t = f(s);
            let k = match targets.iter().position(|x| *x == t) {
                Some(k) => k,
                None => {
                    targets.push(t);
                    targets.len() - 1
                }
            };
            assignment.push(k);
        }
        LumpingMap { targets, assignment }
    }

    /// Builds the map from an explicit target list and per-state indices.
    pub fn new(targets: Vec<String>, assignment: Vec<usize>) -> Result<LumpingMap, ChainError> {
        let mut hit = vec![false; targets.len()];
        for &a in &assignment {
            let slot = hit.get_mut(a).ok_or(ChainError::StateIndex {
                index: a,
                len: targets.len(),
            })?;
            *slot = true;
        }
        if let Some(k) = hit.iter().position(|h| !h) {
            return Err(ChainError::NotSurjective(targets[k].clone()));
        }
        Ok(LumpingMap { targets, assignment })
    }

    pub fn identity(source: &SymbolicChain) -> LumpingMap {
        LumpingMap {
            targets: source.states().to_vec(),
            assignment: (0..source.len()).collect(),
        }
    }

    pub fn targets(&self) -> &[String] {
        &self.targets
    }

    pub fn image(&self, x: usize) -> usize {
        self.assignment[x]
    }

    fn check_source(&self, len: usize) -> Result<(), ChainError> {
        if self.assignment.len() == len {
            Ok(())
        } else {
            Err(ChainError::IndexMismatch {
                expected: self.assignment.len(),
                got: len,
            })
        }
    }

    /// The lumped chain. For each source state the total rate into every
    /// other fiber must depend only on the fiber of the source state; rates
    /// inside a fiber are ignored, the diagonal being fixed by row sums.
    pub fn lump(&self, c: &SymbolicChain) -> Result<SymbolicChain, ChainError> {
        self.check_source(c.len())?;
        let ring = c.ring();
        let mut rows: Vec<BTreeMap<usize, MultiPoly>> = vec![BTreeMap::new(); c.len()];
        for (i, j, r) in c.edges() {
            let (yi, yj) = (self.assignment[i], self.assignment[j]);
            if yi != yj {
                let slot = rows[i].entry(yj).or_insert_with(|| MultiPoly::zero(ring));
                *slot = &*slot + r;
            }
        }
        let mut representative: Vec<Option<usize>> = vec![None; self.targets.len()];
        for x in 0..c.len() {
            let y = self.assignment[x];
            match representative[y] {
                None => representative[y] = Some(x),
                Some(x0) if rows[x0] != rows[x] => {
                    let target = rows[x0]
                        .keys()
                        .chain(rows[x].keys())
                        .find(|t| rows[x0].get(t) != rows[x].get(t))
                        .copied()
                        .expect("rows differ somewhere");
                    return Err(ChainError::NotLumpable {
                        first: c.states()[x0].clone(),
                        second: c.states()[x].clone(),
                        target: self.targets[target].clone(),
                    });
                }
                Some(_) => {}
            }
        }
        let mut edges = Vec::new();
        for (y, rep) in representative.iter().enumerate() {
            let x = rep.expect("surjective map");
            for (&t, r) in &rows[x] {
                edges.push((y, t, r.clone()));
            }
        }
        SymbolicChain::new(ring, self.targets.clone(), edges)
    }

    /// Sums a measure over each fiber.
    pub fn pushforward(&self, m: &Measure) -> Result<Measure, ChainError> {
        self.check_source(m.len())?;
        let mut values = vec![MultiPoly::zero(m.ring()); self.targets.len()];
        for (x, v) in m.values().iter().enumerate() {
            let y = self.assignment[x];
            values[y] = &values[y] + v;
        }
        Measure::new(self.targets.clone(), values)
    }
}
