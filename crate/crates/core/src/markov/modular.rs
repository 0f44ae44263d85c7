//! Tree-theorem vector by evaluation and interpolation.
//!
//! Entry `j` of the vector is the principal minor of the out-degree
//! Laplacian with row and column `j` removed. All entries are recovered at
//! once from the adjugate identity `adj(L) = 1 * psi^T`: one minor and one
//! linear solve per evaluation point give the whole vector. Points are
//! taken on a dense grid modulo several word-size primes; per-variable
//! degree bounds make the interpolation exact and a coefficient bound
//! fixes the number of primes. The reconstructed vector is finally
//! checked against the balance equations with exact arithmetic.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{ChainError, SymbolicChain};
use crate::poly::{Monomial, MultiPoly, PolyError, PolyMatrix};

/// A rate polynomial reduced to `(exponents over used variables, coefficient)`.
struct Compiled {
    terms: Vec<(Vec<u16>, BigInt)>,
}

struct Layout {
    /// Ring indices of the variables that occur in some rate.
    vars: Vec<usize>,
    /// Interpolation degree bound per used variable.
    bounds: Vec<usize>,
    /// Number of grid points, the product of `bound + 1`.
    size: usize,
}

impl Layout {
    /// Mixed-radix digits of a flat grid index, most significant first.
    fn digits(&self, mut flat: usize, out: &mut [usize]) {
        for v in (0..self.vars.len()).rev() {
            let radix = self.bounds[v] + 1;
            out[v] = flat % radix;
            flat /= radix;
        }
    }

    fn stride(&self, v: usize) -> usize {
        self.bounds[v + 1..].iter().map(|b| b + 1).product()
    }
}

/// Largest dense coefficient grid per state; beyond it the accumulator
/// alone would need gigabytes.
pub const MAX_GRID: usize = 1 << 21;

/// Exact tree-theorem vector of `c`.
pub fn tree_vector(c: &SymbolicChain) -> Result<Vec<MultiPoly>, ChainError> {
    let n = c.len();
    let ring = c.ring().clone();
    if n == 1 {
        return Ok(vec![MultiPoly::one(&ring)]);
    }
    let lap = c.laplacian();
    let vars = used_vars(&lap);
    let compiled: Vec<Vec<Option<Compiled>>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let p = lap.get(i, j);
                    (!p.is_zero()).then(|| Compiled {
                        terms: p
                            .terms()
                            .iter()
                            .map(|(m, c)| (vars.iter().map(|&v| m.exp(v)).collect(), c.clone()))
                            .collect(),
                    })
                })
                .collect()
        })
        .collect();

    let bounds = degree_bounds(&lap, &vars);
    let size = bounds
        .iter()
        .try_fold(1usize, |acc, b| acc.checked_mul(b + 1))
        .unwrap_or(usize::MAX);
    if size > MAX_GRID {
        return Err(ChainError::GridTooLarge(size));
    }
    let layout = Layout { vars, bounds, size };
    let needed = coefficient_bound(&lap) * 2 + 1;

    let mut modulus = BigInt::one();
    let mut acc: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); layout.size]; n];
    let mut primes = PrimeIter::new();
    while modulus < needed {
        let p = primes.next().expect("enough word-size primes");
        let coeffs = solve_mod(&compiled, &layout, p)?;
        let inv = modulus
            .mod_floor(&BigInt::from(p))
            .to_u64()
            .map(|m| inv_mod(m, p))
            .expect("reduced modulus fits a word");
        for (state, cs) in coeffs.iter().enumerate() {
            for (k, &r) in cs.iter().enumerate() {
                let cur = acc[state][k].mod_floor(&BigInt::from(p)).to_u64().expect("reduced");
                let t = mul_mod(sub_mod(r, cur, p), inv, p);
                if t != 0 {
                    acc[state][k] += &modulus * BigInt::from(t);
                }
            }
        }
        modulus *= BigInt::from(p);
    }
    let half = &modulus / 2;
    let mut digits = vec![0usize; layout.vars.len()];
    let out: Vec<MultiPoly> = acc
        .into_iter()
        .map(|cs| {
            let terms: Vec<(Monomial, BigInt)> = cs
                .into_iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| {
                    layout.digits(k, &mut digits);
                    let mut m = Monomial::ONE;
                    for (d, &v) in digits.iter().zip(&layout.vars) {
                        m.set_exp(v, u16::try_from(*d).expect("degree fits"));
                    }
                    let c = if c > half { c - &modulus } else { c };
                    (m, c)
                })
                .collect();
            MultiPoly::from_terms(&ring, terms)
        })
        .collect();

    if out.iter().all(MultiPoly::is_zero) {
        return Err(PolyError::KernelDimension { rank: n - 2, size: n }.into());
    }
    let measure = super::Measure::new(c.states().to_vec(), out)?;
    if !c.check_global_balance(&measure)? {
        panic!("interpolated tree vector fails the balance equations");
    }
    Ok(measure.values().to_vec())
}

fn used_vars(lap: &PolyMatrix) -> Vec<usize> {
    let n = lap.rows();
    let mut vars: Vec<usize> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for v in lap.get(i, j).used_vars() {
                if !vars.contains(&v) {
                    vars.push(v);
                }
            }
        }
    }
    vars.sort_unstable();
    vars
}

/// Degree of any principal minor in each variable is at most both the sum
/// over rows and the sum over columns of the largest entry degree.
fn degree_bounds(lap: &PolyMatrix, vars: &[usize]) -> Vec<usize> {
    let n = lap.rows();
    vars.iter()
        .map(|&v| {
            let row: usize = (0..n)
                .map(|i| (0..n).map(|j| usize::from(lap.get(i, j).degree_in(v))).max().unwrap_or(0))
                .sum();
            let col: usize = (0..n)
                .map(|j| (0..n).map(|i| usize::from(lap.get(i, j).degree_in(v))).max().unwrap_or(0))
                .sum();
            row.min(col)
        })
        .collect()
}

/// Sum of absolute coefficients of any minor is at most the product of
/// the row norms.
fn coefficient_bound(lap: &PolyMatrix) -> BigInt {
    let n = lap.rows();
    let mut bound = BigInt::one();
    for i in 0..n {
        let norm: BigInt = (0..n)
            .flat_map(|j| lap.get(i, j).terms().iter().map(|(_, c)| c.abs()))
            .sum();
        if !norm.is_zero() {
            bound *= norm;
        }
    }
    bound
}

/// Rough count of modular multiplications [`tree_vector`] would spend.
pub(super) fn estimated_work(c: &SymbolicChain) -> f64 {
    let lap = c.laplacian();
    let n = c.len() as f64;
    let bounds = degree_bounds(&lap, &used_vars(&lap));
    let grid: f64 = bounds.iter().map(|&b| (b + 1) as f64).product();
    if grid > MAX_GRID as f64 {
        return f64::INFINITY;
    }
    let axes: f64 = bounds.iter().map(|&b| (b + 1) as f64).sum();
    let needed: BigInt = coefficient_bound(&lap) * 2 + 1;
    let primes = (needed.bits() as f64 / 61.0).ceil();
    primes * grid * (n * n * n + n * axes)
}

/// Coefficient arrays of every tree-vector entry modulo `p`.
fn solve_mod(compiled: &[Vec<Option<Compiled>>], layout: &Layout, p: u64) -> Result<Vec<Vec<u64>>, ChainError> {
    let n = compiled.len();
    let nv = layout.vars.len();
    let grid: Vec<Vec<u64>> = (0..nv)
        .map(|v| (0..=layout.bounds[v]).map(|k| (3 + 1009 * v + k) as u64 % p).collect())
        .collect();
    let reduced: Vec<Vec<Option<Vec<(Vec<u16>, u64)>>>> = compiled
        .iter()
        .map(|row| {
            row.iter()
                .map(|e| {
                    e.as_ref().map(|e| {
                        e.terms
                            .iter()
                            .map(|(x, c)| (x.clone(), c.mod_floor(&BigInt::from(p)).to_u64().expect("reduced")))
                            .collect()
                    })
                })
                .collect()
        })
        .collect();

    let mut values: Vec<Vec<u64>> = vec![vec![0; layout.size]; n];
    let mut digits = vec![0usize; nv];
    let mut lap = vec![vec![0u64; n]; n];
    let max_exp: Vec<usize> = layout.bounds.clone();
    let mut powers: Vec<Vec<u64>> = vec![Vec::new(); nv];
    for flat in 0..layout.size {
        layout.digits(flat, &mut digits);
        for v in 0..nv {
            let x = grid[v][digits[v]];
            let pw = &mut powers[v];
            pw.clear();
            pw.push(1);
            for _ in 0..max_exp[v].max(1) {
                let last = *pw.last().expect("nonempty");
                pw.push(mul_mod(last, x, p));
            }
        }
        for i in 0..n {
            for j in 0..n {
                lap[i][j] = match &reduced[i][j] {
                    None => 0,
                    Some(terms) => {
                        let mut s = 0u64;
                        for (ex, c) in terms {
                            let mut t = *c;
                            for (v, &e) in ex.iter().enumerate() {
                                if e > 0 {
                                    t = mul_mod(t, powers[v][usize::from(e)], p);
                                }
                            }
                            s = add_mod(s, t, p);
                        }
                        s
                    }
                };
            }
        }
        let psi = tree_vector_at(&lap, p);
        for (state, v) in psi.into_iter().enumerate() {
            values[state][flat] = v;
        }
    }

    for v in 0..nv {
        let stride = layout.stride(v);
        let len = layout.bounds[v] + 1;
        let newton = NewtonAxis::new(&grid[v], p);
        let mut line = vec![0u64; len];
        for vals in values.iter_mut() {
            for start in 0..layout.size {
                if (start / stride) % len != 0 {
                    continue;
                }
                for (k, slot) in line.iter_mut().enumerate() {
                    *slot = vals[start + k * stride];
                }
                newton.to_monomial(&mut line);
                for (k, &c) in line.iter().enumerate() {
                    vals[start + k * stride] = c;
                }
            }
        }
    }
    Ok(values)
}

/// Tree vector of an integer Laplacian modulo `p`.
pub(super) fn tree_vector_at(lap: &[Vec<u64>], p: u64) -> Vec<u64> {
    let n = lap.len();
    let k = n - 1;
    // Transposed minor augmented with the right-hand side -L[k, j].
    let mut a: Vec<Vec<u64>> = (0..k)
        .map(|j| {
            let mut row: Vec<u64> = (0..k).map(|i| lap[i][j]).collect();
            row.push(neg_mod(lap[k][j], p));
            row
        })
        .collect();
    let mut det = 1u64;
    for col in 0..k {
        let Some(piv) = (col..k).find(|&r| a[r][col] != 0) else {
            return (0..n).map(|j| minor_det(lap, j, p)).collect();
        };
        if piv != col {
            a.swap(piv, col);
            det = neg_mod(det, p);
        }
        det = mul_mod(det, a[col][col], p);
        let inv = inv_mod(a[col][col], p);
        for x in a[col][col..].iter_mut() {
            *x = mul_mod(*x, inv, p);
        }
        let pivot_row = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r == col || row[col] == 0 {
                continue;
            }
            let f = row[col];
            for (x, &y) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *x = sub_mod(*x, mul_mod(f, y, p), p);
            }
        }
    }
    let mut psi: Vec<u64> = a.iter().map(|row| mul_mod(row[k], det, p)).collect();
    psi.push(det);
    psi
}

fn minor_det(lap: &[Vec<u64>], skip: usize, p: u64) -> u64 {
    let mut a: Vec<Vec<u64>> = (0..lap.len())
        .filter(|&i| i != skip)
        .map(|i| (0..lap.len()).filter(|&j| j != skip).map(|j| lap[i][j]).collect())
        .collect();
    let m = a.len();
    let mut det = 1u64;
    for col in 0..m {
        let Some(piv) = (col..m).find(|&r| a[r][col] != 0) else {
            return 0;
        };
        if piv != col {
            a.swap(piv, col);
            det = neg_mod(det, p);
        }
        det = mul_mod(det, a[col][col], p);
        let inv = inv_mod(a[col][col], p);
        let pivot_row = a[col].clone();
        for row in a[col + 1..].iter_mut() {
            if row[col] == 0 {
                continue;
            }
            let f = mul_mod(row[col], inv, p);
            for (x, &y) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *x = sub_mod(*x, mul_mod(f, y, p), p);
            }
        }
    }
    det
}

/// Newton interpolation on fixed nodes, converting values to monomial
/// coefficients in place.
pub(super) struct NewtonAxis {
    nodes: Vec<u64>,
    inv: Inverses,
    p: u64,
}

enum Inverses {
    /// `table[d] = 1 / d` for node differences `d`; nodes are increasing
    /// and small.
    Differences(Vec<u64>),
    /// `rows[i][j] = 1 / (x_i - x_j)` for `j < i`.
    Pairs(Vec<Vec<u64>>),
}

/// Largest node for which differences are inverted through a table.
const SMALL_NODES: u64 = 1 << 24;

impl NewtonAxis {
    pub(super) fn new(nodes: &[u64], p: u64) -> NewtonAxis {
        let increasing = nodes.windows(2).all(|w| w[0] < w[1]);
        let top = nodes.last().copied().unwrap_or(0);
        let inv = if increasing && top < SMALL_NODES && top < p {
            // inv(d) = -(p / d) * inv(p mod d)
            let mut table = vec![0u64; top as usize + 1];
            if top >= 1 {
                table[1] = 1;
            }
            for d in 2..=top {
                let r = table[(p % d) as usize];
                table[d as usize] = neg_mod(mul_mod(p / d, r, p), p);
            }
            Inverses::Differences(table)
        } else {
            Inverses::Pairs(
                (0..nodes.len())
                    .map(|i| (0..i).map(|j| inv_mod(sub_mod(nodes[i], nodes[j], p), p)).collect())
                    .collect(),
            )
        };
        NewtonAxis {
            nodes: nodes.to_vec(),
            inv,
            p,
        }
    }

    fn inverse(&self, i: usize, j: usize) -> u64 {
        match &self.inv {
            Inverses::Differences(t) => t[(self.nodes[i] - self.nodes[j]) as usize],
            Inverses::Pairs(rows) => rows[i][j],
        }
    }

    pub(super) fn to_monomial(&self, vals: &mut [u64]) {
        let p = self.p;
        let n = vals.len();
        for j in 1..n {
            for i in (j..n).rev() {
                vals[i] = mul_mod(sub_mod(vals[i], vals[i - 1], p), self.inverse(i, i - j), p);
            }
        }
        // Horner: poly <- poly * (x - x_i) + c_i, updated from the top down.
        let mut poly = vec![0u64; n];
        for i in (0..n).rev() {
            for d in (1..n).rev() {
                poly[d] = sub_mod(poly[d - 1], mul_mod(poly[d], self.nodes[i], p), p);
            }
            poly[0] = sub_mod(vals[i], mul_mod(poly[0], self.nodes[i], p), p);
        }
        vals.copy_from_slice(&poly);
    }
}

pub(super) fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

pub(super) fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

pub(super) fn neg_mod(a: u64, p: u64) -> u64 {
    if a == 0 {
        0
    } else {
        p - a
    }
}

pub(super) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((u128::from(a) * u128::from(b)) % u128::from(p)) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

pub(super) fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(a % p != 0);
    pow_mod(a, p - 2, p)
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % q == 0 {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primes below 2^62 in decreasing order.
pub(super) struct PrimeIter {
    next: u64,
}

impl PrimeIter {
    pub(super) fn new() -> PrimeIter {
        PrimeIter { next: (1u64 << 62) - 1 }
    }
}

impl Iterator for PrimeIter {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        while self.next > 3 {
            let c = self.next;
            self.next -= 2;
            if is_prime(c) {
                return Some(c);
            }
        }
        None
    }
}
