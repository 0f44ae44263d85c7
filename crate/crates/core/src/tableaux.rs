//! Staircase tableaux in English coordinates.
//!
//! Box `(i, j)` sits in row `i` and column `j` with `j <= n + 1 - i`; the
//! last box of every row lies on the anti-diagonal, which is also the last
//! box of its column. Anti-diagonal boxes are always filled and their
//! letters, read from `(1, n)` down to `(n, 1)`, give the type. A `beta`
//! (or `delta`) empties everything to its left in the row, an `alpha` (or
//! `gamma`) everything above it in the column.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use serde_json::{json, Value};
use thiserror::Error;

use crate::markov::Measure;
use crate::models::{open3_ring, open5_ring, Word};
use crate::poly::{Monomial, MultiPoly, Ring};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    Alpha,
    Beta,
    Gamma,
    Delta,
}

impl Letter {
    pub fn name(self) -> &'static str {
        match self {
            Letter::Alpha => "alpha",
            Letter::Beta => "beta",
            Letter::Gamma => "gamma",
            Letter::Delta => "delta",
        }
    }

    /// Whether the letter empties the boxes to its left.
    fn blocks_row(self) -> bool {
        matches!(self, Letter::Beta | Letter::Delta)
    }

    /// Whether the letter empties the boxes above it.
    fn blocks_column(self) -> bool {
        matches!(self, Letter::Alpha | Letter::Gamma)
    }

    /// Particle (`true`) or hole on the anti-diagonal.
    fn occupied(self) -> bool {
        matches!(self, Letter::Alpha | Letter::Delta)
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Letters `alpha`, `beta`.
    TwoLetter,
    /// Letters `alpha`, `beta`, `gamma`, `delta`.
    FourLetter,
}

impl Mode {
    pub fn letters(self) -> &'static [Letter] {
        match self {
            Mode::TwoLetter => &[Letter::Alpha, Letter::Beta],
            Mode::FourLetter => &[Letter::Alpha, Letter::Beta, Letter::Gamma, Letter::Delta],
        }
    }

    /// Weight ring: `alpha, beta, q` or `alpha, beta, gamma, delta, q`.
    pub fn ring(self) -> Arc<Ring> {
        match self {
            Mode::TwoLetter => open3_ring(),
            Mode::FourLetter => open5_ring(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableauError {
    #[error("size must be at least 1")]
    ZeroSize,
    #[error("box ({0}, {1}) is outside the staircase")]
    OutOfShape(usize, usize),
    #[error("letter {0} is not allowed in this mode")]
    LetterNotAllowed(Letter),
    #[error("anti-diagonal box ({0}, {1}) is empty")]
    EmptyDiagonal(usize, usize),
    #[error("box ({0}, {1}) must be empty")]
    ForcedEmpty(usize, usize),
    #[error("type has length {got}, expected {expected}")]
    TypeLength { expected: usize, got: usize },
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct StaircaseTableau {
    n: usize,
    mode: Mode,
    /// Row-major over the staircase.
    cells: Vec<Option<Letter>>,
}

fn row_start(n: usize, i: usize) -> usize {
    // rows 1..i-1 have lengths n, n-1, ..., n+2-i
    (i - 1) * (n + 1) - (i - 1) * i / 2
}

impl StaircaseTableau {
    /// Builds and validates a tableau from its filled boxes (1-based).
    pub fn new(n: usize, mode: Mode, filled: &[((usize, usize), Letter)]) -> Result<StaircaseTableau, TableauError> {
        if n == 0 {
            return Err(TableauError::ZeroSize);
        }
        let mut t = StaircaseTableau {
            n,
            mode,
            cells: vec![None; n * (n + 1) / 2],
        };
        for &((i, j), l) in filled {
            if i == 0 || j == 0 || i > n || j > n + 1 - i {
                return Err(TableauError::OutOfShape(i, j));
            }
            if !mode.letters().contains(&l) {
                return Err(TableauError::LetterNotAllowed(l));
            }
            let k = t.index(i, j);
            t.cells[k] = Some(l);
        }
        t.validate()?;
        Ok(t)
    }

    fn validate(&self) -> Result<(), TableauError> {
        for i in 1..=self.n {
            let last = self.n + 1 - i;
            if self.get(i, last).is_none() {
                return Err(TableauError::EmptyDiagonal(i, last));
            }
            for j in 1..=last {
                if self.get(i, j).is_some() && self.forced_empty(i, j) {
                    return Err(TableauError::ForcedEmpty(i, j));
                }
            }
        }
        Ok(())
    }

    fn index(&self, i: usize, j: usize) -> usize {
        row_start(self.n, i) + j - 1
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Letter in box `(i, j)`, 1-based.
    pub fn get(&self, i: usize, j: usize) -> Option<Letter> {
        self.cells[self.index(i, j)]
    }

    /// Filled boxes in row-major order.
    pub fn filled(&self) -> Vec<((usize, usize), Letter)> {
        let mut out = Vec::new();
        for i in 1..=self.n {
            for j in 1..=self.n + 1 - i {
                if let Some(l) = self.get(i, j) {
                    out.push(((i, j), l));
                }
            }
        }
        out
    }

    fn nearest_right(&self, i: usize, j: usize) -> Option<Letter> {
        (j + 1..=self.n + 1 - i).find_map(|c| self.get(i, c))
    }

    fn nearest_below(&self, i: usize, j: usize) -> Option<Letter> {
        (i + 1..=self.n + 1 - j).find_map(|r| self.get(r, j))
    }

    /// True when a letter to the right or below forces `(i, j)` empty.
    fn forced_empty(&self, i: usize, j: usize) -> bool {
        (j + 1..=self.n + 1 - i).any(|c| self.get(i, c).is_some_and(Letter::blocks_row))
            || (i + 1..=self.n + 1 - j).any(|r| self.get(r, j).is_some_and(Letter::blocks_column))
    }

    pub fn tableau_type(&self) -> Word {
        Word::new(
            (1..=self.n)
                .map(|i| self.get(i, self.n + 1 - i).expect("anti-diagonal is filled").occupied())
                .collect(),
        )
    }

    fn gets_q(&self, i: usize, j: usize) -> bool {
        let right = self.nearest_right(i, j);
        let below = self.nearest_below(i, j);
        match self.mode {
            Mode::TwoLetter => right == Some(Letter::Alpha) && below == Some(Letter::Beta),
            Mode::FourLetter => {
                right == Some(Letter::Delta)
                    || (matches!(right, Some(Letter::Alpha | Letter::Gamma))
                        && matches!(below, Some(Letter::Beta | Letter::Gamma)))
            }
        }
    }

    /// Places `q` in the unrestricted (two-letter) or distinguished
    /// (four-letter) boxes and assembles the weight monomial.
    pub fn place_q(&self) -> WeightedTableau {
        let ring = self.mode.ring();
        let q_index = ring.index_of("q").expect("q in weight ring");
        let mut exps = Monomial::ONE;
        let mut q_boxes = Vec::new();
        for i in 1..=self.n {
            for j in 1..=self.n + 1 - i {
                match self.get(i, j) {
                    Some(l) => {
                        let v = ring.index_of(l.name()).expect("letter in weight ring");
                        exps.set_exp(v, exps.exp(v) + 1);
                    }
                    None if self.gets_q(i, j) => q_boxes.push((i, j)),
                    None => {}
                }
            }
        }
        exps.set_exp(q_index, u16::try_from(q_boxes.len()).expect("box count fits"));
        WeightedTableau {
            tableau: self.clone(),
            q_boxes,
            weight: MultiPoly::monomial(&ring, exps, BigInt::from(1)),
        }
    }

    pub fn to_json(&self) -> Value {
        let boxes: Vec<Value> = self
            .filled()
            .into_iter()
            .map(|((i, j), l)| json!([i, j, l.name()]))
            .collect();
        json!({ "type": self.tableau_type().to_string(), "boxes": boxes })
    }
}

impl fmt::Debug for StaircaseTableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// One row per line, `a b g d` for letters and `.` for empty boxes.
impl fmt::Display for StaircaseTableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 1..=self.n {
            let row: String = (1..=self.n + 1 - i)
                .map(|j| match self.get(i, j) {
                    Some(Letter::Alpha) => 'a',
                    Some(Letter::Beta) => 'b',
                    Some(Letter::Gamma) => 'g',
                    Some(Letter::Delta) => 'd',
                    None => '.',
                })
                .collect();
            writeln!(f, "{row}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedTableau {
    pub tableau: StaircaseTableau,
    pub q_boxes: Vec<(usize, usize)>,
    pub weight: MultiPoly,
}

impl WeightedTableau {
    pub fn to_json(&self) -> Value {
        let mut v = self.tableau.to_json();
        let q: Vec<Value> = self.q_boxes.iter().map(|&(i, j)| json!([i, j])).collect();
        v["q_boxes"] = Value::Array(q);
        v["weight"] = Value::String(self.weight.to_string());
        v
    }
}

/// Calls `visit` on every tableau of size `n`, optionally only those of
/// the given type. Anti-diagonal letters are chosen first, then the other
/// boxes from the bottom row upward and right to left within a row, so
/// every box is decided after everything that can force it empty.
pub fn for_each_tableau<F>(n: usize, mode: Mode, type_filter: Option<&Word>, mut visit: F) -> Result<(), TableauError>
where
    F: FnMut(&StaircaseTableau),
{
    if n == 0 {
        return Err(TableauError::ZeroSize);
    }
    if let Some(w) = type_filter {
        if w.len() != n {
            return Err(TableauError::TypeLength {
                expected: n,
                got: w.len(),
            });
        }
    }
    let mut t = StaircaseTableau {
        n,
        mode,
        cells: vec![None; n * (n + 1) / 2],
    };
    let interior: Vec<(usize, usize)> = (1..=n)
        .rev()
        .flat_map(|i| (1..=n - i).rev().map(move |j| (i, j)))
        .collect();
    diagonal(&mut t, 1, type_filter, &interior, &mut visit);
    Ok(())
}

fn diagonal<F>(t: &mut StaircaseTableau, i: usize, filter: Option<&Word>, interior: &[(usize, usize)], visit: &mut F)
where
    F: FnMut(&StaircaseTableau),
{
    if i > t.n {
        fill(t, interior, visit);
        return;
    }
    let k = t.index(i, t.n + 1 - i);
    for &l in t.mode.letters() {
        if filter.is_some_and(|w| w.sites()[i - 1] != l.occupied()) {
            continue;
        }
        t.cells[k] = Some(l);
        diagonal(t, i + 1, filter, interior, visit);
    }
    t.cells[k] = None;
}

fn fill<F>(t: &mut StaircaseTableau, rest: &[(usize, usize)], visit: &mut F)
where
    F: FnMut(&StaircaseTableau),
{
    let Some((&(i, j), tail)) = rest.split_first() else {
        visit(t);
        return;
    };
    fill(t, tail, visit);
    if t.forced_empty(i, j) {
        return;
    }
    let k = t.index(i, j);
    for &l in t.mode.letters() {
        t.cells[k] = Some(l);
        fill(t, tail, visit);
    }
    t.cells[k] = None;
}

pub fn enumerate_tableaux(n: usize, mode: Mode, type_filter: Option<&Word>) -> Result<Vec<StaircaseTableau>, TableauError> {
    let mut out = Vec::new();
    for_each_tableau(n, mode, type_filter, |t| out.push(t.clone()))?;
    Ok(out)
}

pub fn count_tableaux(n: usize, mode: Mode) -> Result<u64, TableauError> {
    let mut k = 0u64;
    for_each_tableau(n, mode, None, |_| k += 1)?;
    Ok(k)
}

/// Sum of the weights of all tableaux of type `tau`.
pub fn psi_tableaux(n: usize, tau: &Word, mode: Mode) -> Result<MultiPoly, TableauError> {
    let mut acc: Vec<(Monomial, BigInt)> = Vec::new();
    for_each_tableau(n, mode, Some(tau), |t| {
        let w = t.place_q().weight;
        acc.extend(w.into_terms());
    })?;
    Ok(MultiPoly::from_terms(&mode.ring(), acc))
}

/// Sum of the weights of all tableaux of size `n`.
pub fn partition_function(n: usize, mode: Mode) -> Result<MultiPoly, TableauError> {
    let mut acc: Vec<(Monomial, BigInt)> = Vec::new();
    for_each_tableau(n, mode, None, |t| acc.extend(t.place_q().weight.into_terms()))?;
    Ok(MultiPoly::from_terms(&mode.ring(), acc))
}

/// The measure `tau -> psi_tableaux(n, tau)` over all words.
pub fn tableaux_measure(n: usize, mode: Mode) -> Result<Measure, TableauError> {
    let words = Word::all(n);
    let values = words
        .iter()
        .map(|w| psi_tableaux(n, w, mode))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Measure::new(words.iter().map(Word::to_string).collect(), values).expect("weights are nonzero"))
}
