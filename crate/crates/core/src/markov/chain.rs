use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde_json::{json, Value};

use super::measure::Measure;
use super::{modular, reconstruct, ChainError};
use crate::poly::{gcd_all, normalize_vector, MultiPoly, PolyMatrix, Ring};

/// States up to this count are solved by symbolic elimination under
/// [`StationaryMethod::Auto`]; larger chains use whichever modular engine
/// is estimated to be cheaper.
const ELIMINATION_LIMIT: usize = 12;

/// How [`SymbolicChain::stationary_with`] obtains the kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StationaryMethod {
    #[default]
    Auto,
    /// Fraction-free elimination over the polynomial ring.
    Elimination,
    /// Tree-theorem vector by modular evaluation and interpolation.
    Modular,
    /// Compact vector rebuilt from modular kernel ratios; never forms the
    /// tree-theorem vector.
    Reconstruction,
}

/// A continuous-time chain on labelled states with polynomial rates.
#[derive(Clone, Debug)]
pub struct SymbolicChain {
    ring: Arc<Ring>,
    states: Vec<String>,
    index: HashMap<String, usize>,
    rates: BTreeMap<(usize, usize), MultiPoly>,
}

impl SymbolicChain {
    /// Builds a chain; parallel edges between the same pair add up and
    /// edges whose total rate is zero are dropped.
    pub fn new<I>(ring: &Arc<Ring>, states: Vec<String>, edges: I) -> Result<SymbolicChain, ChainError>
    where
        I: IntoIterator<Item = (usize, usize, MultiPoly)>,
    {
        if states.is_empty() {
            return Err(ChainError::Empty);
        }
        let mut index = HashMap::with_capacity(states.len());
        for (i, s) in states.iter().enumerate() {
            if index.insert(s.clone(), i).is_some() {
                return Err(ChainError::DuplicateState(s.clone()));
            }
        }
        let mut rates: BTreeMap<(usize, usize), MultiPoly> = BTreeMap::new();
        for (i, j, r) in edges {
            for k in [i, j] {
                if k >= states.len() {
                    return Err(ChainError::StateIndex {
                        index: k,
                        len: states.len(),
                    });
                }
            }
            if i == j {
                return Err(ChainError::SelfLoop(states[i].clone()));
            }
            let r = r.to_ring(ring)?;
            match rates.get_mut(&(i, j)) {
                Some(acc) => *acc = &*acc + &r,
                None => {
                    rates.insert((i, j), r);
                }
            }
        }
        rates.retain(|_, r| !r.is_zero());
        Ok(SymbolicChain {
            ring: ring.clone(),
            states,
            index,
            rates,
        })
    }

    /// Same as [`SymbolicChain::new`] with edges given by state label.
    pub fn from_labelled<'a, I>(ring: &Arc<Ring>, states: Vec<String>, edges: I) -> Result<SymbolicChain, ChainError>
    where
        I: IntoIterator<Item = (&'a str, &'a str, MultiPoly)>,
    {
        let lookup: HashMap<&str, usize> = states.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let mut indexed = Vec::new();
        for (a, b, r) in edges {
            let i = *lookup.get(a).ok_or_else(|| ChainError::UnknownState(a.to_string()))?;
            let j = *lookup.get(b).ok_or_else(|| ChainError::UnknownState(b.to_string()))?;
            indexed.push((i, j, r));
        }
        SymbolicChain::new(ring, states, indexed)
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, state: &str) -> Option<usize> {
        self.index.get(state).copied()
    }

    pub fn state_index(&self, state: &str) -> Result<usize, ChainError> {
        self.index_of(state)
            .ok_or_else(|| ChainError::UnknownState(state.to_string()))
    }

    /// Rate of `i -> j`, `None` when there is no edge.
    pub fn rate(&self, i: usize, j: usize) -> Option<&MultiPoly> {
        self.rates.get(&(i, j))
    }

    /// All edges `(from, to, rate)` ordered by source then target.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, &MultiPoly)> {
        self.rates.iter().map(|(&(i, j), r)| (i, j, r))
    }

    pub fn edge_count(&self) -> usize {
        self.rates.len()
    }

    pub fn out_edges(&self, i: usize) -> impl Iterator<Item = (usize, &MultiPoly)> {
        self.rates
            .range((i, 0)..(i + 1, 0))
            .map(|(&(_, j), r)| (j, r))
    }

    /// Sum of the rates leaving `i`.
    pub fn out_rate(&self, i: usize) -> MultiPoly {
        self.out_edges(i)
            .fold(MultiPoly::zero(&self.ring), |acc, (_, r)| &acc + r)
    }

    /// Generator matrix: rates off the diagonal, negated row sums on it.
    pub fn rate_matrix(&self) -> PolyMatrix {
        let n = self.len();
        let mut m = PolyMatrix::zeros(&self.ring, n, n);
        for (&(i, j), r) in &self.rates {
            m.set(i, j, r.clone());
        }
        for i in 0..n {
            m.set(i, i, -self.out_rate(i));
        }
        m
    }

    /// Out-degree Laplacian, the negated rate matrix.
    pub fn laplacian(&self) -> PolyMatrix {
        let q = self.rate_matrix();
        q.scale(&MultiPoly::constant(&self.ring, -1))
    }

    /// Strong connectivity of the edge graph. Every stored rate counts as
    /// positive.
    pub fn check_irreducible(&self) -> Result<(), ChainError> {
        let n = self.len();
        let mut fwd = vec![Vec::new(); n];
        let mut bwd = vec![Vec::new(); n];
        for &(i, j) in self.rates.keys() {
            fwd[i].push(j);
            bwd[j].push(i);
        }
        for (adj, forward) in [(&fwd, true), (&bwd, false)] {
            let seen = reach(adj, 0);
            if let Some(k) = seen.iter().position(|s| !s) {
                let (from, to) = if forward { (0, k) } else { (k, 0) };
                return Err(ChainError::Reducible {
                    from: self.states[from].clone(),
                    to: self.states[to].clone(),
                });
            }
        }
        Ok(())
    }

    pub fn is_irreducible(&self) -> bool {
        self.check_irreducible().is_ok()
    }

    /// Compact stationary measure: the kernel of the rate matrix divided by
    /// the gcd of its entries.
    pub fn stationary_compact(&self) -> Result<Measure, ChainError> {
        self.stationary_with(StationaryMethod::Auto)
    }

    pub fn stationary_with(&self, method: StationaryMethod) -> Result<Measure, ChainError> {
        self.check_irreducible()?;
        let method = match method {
            StationaryMethod::Auto if self.len() <= ELIMINATION_LIMIT => StationaryMethod::Elimination,
            m => m,
        };
        let raw = match method {
            StationaryMethod::Auto => reconstruct::compact_vector(self, true)?,
            StationaryMethod::Elimination => self.rate_matrix().left_kernel()?,
            StationaryMethod::Reconstruction => reconstruct::compact_vector(self, false)?,
            _ => modular::tree_vector(self)?,
        };
        let g = gcd_all(raw.iter())?;
        let values = raw
            .iter()
            .map(|p| p.exact_div(&g))
            .collect::<Result<Vec<_>, _>>()?;
        Measure::new(self.states.clone(), normalize_vector(values))
    }

    /// Exact check of `Psi(i) * out(i) = sum_j Psi(j) rate(j, i)` at every state.
    pub fn check_global_balance(&self, m: &Measure) -> Result<bool, ChainError> {
        if m.len() != self.len() {
            return Err(ChainError::IndexMismatch {
                expected: self.len(),
                got: m.len(),
            });
        }
        let values: Vec<MultiPoly> = m
            .values()
            .iter()
            .map(|v| v.to_ring(&self.ring))
            .collect::<Result<_, _>>()?;
        let mut inflow = vec![MultiPoly::zero(&self.ring); self.len()];
        let mut outflow = vec![MultiPoly::zero(&self.ring); self.len()];
        for (&(i, j), r) in &self.rates {
            if values[i].is_zero() {
                continue;
            }
            let flux = &values[i] * r;
            inflow[j] = &inflow[j] + &flux;
            outflow[i] = &outflow[i] + &flux;
        }
        Ok(inflow == outflow)
    }

    /// The same chain with states listed in the order `order`, where
    /// `order[k]` is the old index of the new state `k`.
    pub fn reordered(&self, order: &[usize]) -> Result<SymbolicChain, ChainError> {
        let n = self.len();
        let mut new_of_old = vec![usize::MAX; n];
        for (k, &old) in order.iter().enumerate() {
            if old >= n || new_of_old[old] != usize::MAX {
                return Err(ChainError::Format("reordering is not a permutation".into()));
            }
            new_of_old[old] = k;
        }
        if order.len() != n {
            return Err(ChainError::Format("reordering is not a permutation".into()));
        }
        let states = order.iter().map(|&o| self.states[o].clone()).collect();
        let edges = self
            .rates
            .iter()
            .map(|(&(i, j), r)| (new_of_old[i], new_of_old[j], r.clone()));
        SymbolicChain::new(&self.ring, states, edges)
    }

    /// Substitutes integer values for named parameters; edges whose rate
    /// becomes zero disappear.
    pub fn substitute(&self, values: &[(&str, i64)]) -> Result<SymbolicChain, ChainError> {
        let edges = self
            .rates
            .iter()
            .map(|(&(i, j), r)| Ok((i, j, r.substitute(values)?)))
            .collect::<Result<Vec<_>, ChainError>>()?;
        SymbolicChain::new(&self.ring, self.states.clone(), edges)
    }

    pub fn to_json(&self) -> Value {
        let rates: Vec<Value> = self
            .rates
            .iter()
            .map(|(&(i, j), r)| {
                json!({
                    "from": self.states[i],
                    "to": self.states[j],
                    "rate": r.to_string(),
                })
            })
            .collect();
        json!({
            "variables": self.ring.names(),
            "states": self.states,
            "rates": rates,
        })
    }

    pub fn from_json(value: &Value) -> Result<SymbolicChain, ChainError> {
        let bad = |what: &str| ChainError::Format(format!("missing or invalid `{what}`"));
        let names: Vec<String> = value
            .get("variables")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("variables"))?
            .iter()
            .map(|v| v.as_str().map(str::to_string).ok_or_else(|| bad("variables")))
            .collect::<Result<_, _>>()?;
        let ring = Ring::new(names)?;
        let states: Vec<String> = value
            .get("states")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("states"))?
            .iter()
            .map(|v| v.as_str().map(str::to_string).ok_or_else(|| bad("states")))
            .collect::<Result<_, _>>()?;
        let mut edges = Vec::new();
        for e in value
            .get("rates")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("rates"))?
        {
            let field = |k: &str| e.get(k).and_then(Value::as_str).ok_or_else(|| bad(k));
            edges.push((field("from")?, field("to")?, MultiPoly::parse(&ring, field("rate")?)?));
        }
        SymbolicChain::from_labelled(&ring, states.clone(), edges)
    }
}

impl PartialEq for SymbolicChain {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.states == other.states && self.rates == other.rates
    }
}

fn reach(adj: &[Vec<usize>], start: usize) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen
}
