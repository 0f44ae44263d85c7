//! Compact stationary vector by modular rational reconstruction.
//!
//! The tree-theorem vector of a chain with `N` states has degree close to
//! `N - 1` in each variable even when the compact measure is tiny. This
//! route never forms it. At each evaluation point modulo `p` only the
//! ratios `psi_j / psi_k` are kept; they equal `P_j / P_k` for the compact
//! vector `P`. Along a Kronecker curve `x_v = b_v + s^(e_v)` the ratios
//! are univariate rational functions, so `P_k` is recovered, up to a
//! scalar, as their common denominator and each `P_j` as `ratio * P_k`.
//! The Kronecker exponents are read off as monomials in the shifted
//! variables and the shift is undone exactly. When every rate is
//! homogeneous of one degree the first variable is set to 1 and restored
//! at the end. Normalising by one coefficient of `P_k` makes images modulo
//! different primes agree, so CRT and rational number reconstruction give
//! the vector over the integers, which is then checked exactly.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use super::modular::{add_mod, inv_mod, mul_mod, neg_mod, sub_mod, tree_vector_at, NewtonAxis, PrimeIter};
use super::{modular, ChainError, Measure, SymbolicChain};
use crate::poly::{Monomial, MultiPoly};

const ATTEMPTS_PER_PRIME: u64 = 4;
const MAX_PRIMES: usize = 64;

/// Rates as `(exponents over the used variables, coefficient)` lists.
struct CompiledLaplacian {
    n: usize,
    vars: Vec<usize>,
    max_exp: Vec<u16>,
    entries: Vec<(usize, usize, Vec<(Vec<u16>, BigInt)>)>,
}

impl CompiledLaplacian {
    fn new(c: &SymbolicChain) -> CompiledLaplacian {
        let n = c.len();
        let lap = c.laplacian();
        let mut vars: Vec<usize> = Vec::new();
        for (_, _, r) in c.edges() {
            for v in r.used_vars() {
                if !vars.contains(&v) {
                    vars.push(v);
                }
            }
        }
        vars.sort_unstable();
        let mut max_exp = vec![0u16; vars.len()];
        let mut entries = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let e = lap.get(i, j);
                if e.is_zero() {
                    continue;
                }
                let terms = e
                    .terms()
                    .iter()
                    .map(|(m, k)| {
                        let ex: Vec<u16> = vars.iter().map(|&v| m.exp(v)).collect();
                        for (mx, &x) in max_exp.iter_mut().zip(&ex) {
                            *mx = (*mx).max(x);
                        }
                        (ex, k.clone())
                    })
                    .collect();
                entries.push((i, j, terms));
            }
        }
        CompiledLaplacian { n, vars, max_exp, entries }
    }

    fn reduce(&self, p: u64) -> ReducedLaplacian {
        let bp = BigInt::from(p);
        ReducedLaplacian {
            n: self.n,
            max_exp: self.max_exp.clone(),
            p,
            entries: self
                .entries
                .iter()
                .map(|(i, j, ts)| {
                    let ts = ts
                        .iter()
                        .map(|(ex, k)| (ex.clone(), k.mod_floor(&bp).to_u64().expect("reduced")))
                        .collect();
                    (*i, *j, ts)
                })
                .collect(),
        }
    }

    /// All rates share one total degree, which is positive.
    fn homogeneous(c: &SymbolicChain) -> bool {
        let mut degree = None;
        for (_, _, r) in c.edges() {
            for (m, _) in r.terms() {
                let d = m.total_degree();
                match degree {
                    None => degree = Some(d),
                    Some(e) if e != d => return false,
                    Some(_) => {}
                }
            }
        }
        matches!(degree, Some(d) if d > 0)
    }
}

struct ReducedLaplacian {
    n: usize,
    max_exp: Vec<u16>,
    p: u64,
    entries: Vec<(usize, usize, Vec<(Vec<u16>, u64)>)>,
}

impl ReducedLaplacian {
    /// `psi_j / psi_k` for every `j`, with `k` the last state; `None` when
    /// `psi_k` vanishes at `point`.
    fn ratios(&self, point: &[u64]) -> Option<Vec<u64>> {
        let p = self.p;
        let powers: Vec<Vec<u64>> = point
            .iter()
            .zip(&self.max_exp)
            .map(|(&x, &e)| {
                let mut pw = vec![1u64; usize::from(e) + 1];
                for k in 1..pw.len() {
                    pw[k] = mul_mod(pw[k - 1], x, p);
                }
                pw
            })
            .collect();
        let mut lap = vec![vec![0u64; self.n]; self.n];
        for (i, j, ts) in &self.entries {
            let mut s = 0u64;
            for (ex, k) in ts {
                let mut t = *k;
                for (v, &e) in ex.iter().enumerate() {
                    if e > 0 {
                        t = mul_mod(t, powers[v][usize::from(e)], p);
                    }
                }
                s = add_mod(s, t, p);
            }
            lap[*i][*j] = s;
        }
        let psi = tree_vector_at(&lap, p);
        let last = *psi.last().expect("nonempty");
        if last == 0 {
            return None;
        }
        let inv = inv_mod(last, p);
        Some(psi.into_iter().map(|x| mul_mod(x, inv, p)).collect())
    }
}

/// Samples `count` curve parameters `s = 1, 2, ...` at which the anchor
/// does not vanish.
fn sample<F>(lap: &ReducedLaplacian, count: usize, curve: F) -> (Vec<u64>, Vec<Vec<u64>>)
where
    F: Fn(u64) -> Vec<u64>,
{
    let mut nodes = Vec::with_capacity(count);
    let mut values = Vec::with_capacity(count);
    let mut s = 1u64;
    while nodes.len() < count {
        if let Some(r) = lap.ratios(&curve(s)) {
            nodes.push(s);
            values.push(r);
        }
        s += 1;
    }
    (nodes, values)
}

/// Common denominator `den` of the sampled ratios and the numerators
/// `ratio_j * den`, each of degree at most `bound`; `None` when the
/// samples are inconsistent with that bound.
fn recover_curve(
    nodes: &[u64],
    values: &[Vec<u64>],
    bound: usize,
    weights: &[u64],
    p: u64,
) -> Option<Vec<Vec<u64>>> {
    let t = nodes.len();
    let mut mixed: Vec<u64> = values
        .iter()
        .map(|r| r.iter().zip(weights).fold(0, |acc, (&x, &w)| add_mod(acc, mul_mod(x, w, p), p)))
        .collect();
    NewtonAxis::new(nodes, p).to_monomial(&mut mixed);
    let modulus = nodes.iter().fold(vec![1u64], |acc, &x| upoly::mul(&acc, &[neg_mod(x, p), 1], p));
    let (_, den) = upoly::rational_reconstruct(modulus, upoly::trim(mixed), bound, p)?;
    if den.len() > bound + 1 {
        return None;
    }
    let head = NewtonAxis::new(&nodes[..bound + 1], p);
    let dens: Vec<u64> = nodes.iter().map(|&x| upoly::eval(&den, x, p)).collect();
    let n = values[0].len();
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        let vals: Vec<u64> = (0..t).map(|i| mul_mod(values[i][j], dens[i], p)).collect();
        let mut coeffs = vals[..bound + 1].to_vec();
        head.to_monomial(&mut coeffs);
        if (bound + 1..t).any(|i| upoly::eval(&coeffs, nodes[i], p) != vals[i]) {
            return None;
        }
        out.push(coeffs);
    }
    Some(out)
}

/// Compact stationary vector of an irreducible chain, up to the gcd of
/// its entries. With `prefer_cheaper`, the tree-theorem vector is returned
/// instead when its estimated cost is lower.
pub(super) fn compact_vector(c: &SymbolicChain, prefer_cheaper: bool) -> Result<Vec<MultiPoly>, ChainError> {
    let n = c.len();
    let ring = c.ring().clone();
    if n == 1 {
        return Ok(vec![MultiPoly::one(&ring)]);
    }
    let compiled = CompiledLaplacian::new(c);
    let homogeneous = CompiledLaplacian::homogeneous(c);
    // Positions in `compiled.vars` that vary; position 0 is pinned to 1
    // for homogeneous rates.
    let free: Vec<usize> = if homogeneous {
        (1..compiled.vars.len()).collect()
    } else {
        (0..compiled.vars.len()).collect()
    };
    let nv = compiled.vars.len();
    let mut rng = StdRng::seed_from_u64(0x6173_6570);
    let mut primes = PrimeIter::new();

    // Degree of the compact vector in each free variable, from a generic
    // axis-parallel line.
    let p0 = primes.next().expect("word-size prime");
    let lap0 = compiled.reduce(p0);
    let base: Vec<u64> = (0..nv).map(|_| rng.gen_range(2..p0)).collect();
    let mut degrees = Vec::with_capacity(free.len());
    for &v in &free {
        let bound = (n - 1) * usize::from(compiled.max_exp[v]);
        let weights: Vec<u64> = (0..n).map(|_| rng.gen_range(1..p0)).collect();
        let (nodes, values) = sample(&lap0, 2 * bound + 2, |s| {
            let mut pt = base.clone();
            if homogeneous {
                pt[0] = 1;
            }
            pt[v] = add_mod(base[v], s, p0);
            pt
        });
        let nums = recover_curve(&nodes, &values, bound, &weights, p0)
            .ok_or_else(|| ChainError::Reconstruction("degree probe failed".into()))?;
        degrees.push(nums.iter().map(|c| upoly::trim(c.clone()).len().saturating_sub(1)).max().unwrap_or(0));
    }

    // Kronecker exponents; least significant digit is free[0].
    let mut exps = Vec::with_capacity(free.len());
    let mut size = 1usize;
    for &d in &degrees {
        exps.push(size as u64);
        size = size
            .checked_mul(d + 1)
            .ok_or_else(|| ChainError::Reconstruction("Kronecker degree overflow".into()))?;
    }
    let top = size - 1;
    if prefer_cheaper {
        let t = (2 * size + 4) as f64;
        let nf = n as f64;
        let work = 3.0 * (t * nf * nf * nf + (nf + 4.0) * t * t);
        if work > modular::estimated_work(c) {
            return modular::tree_vector(c);
        }
    }

    let mut modulus = BigInt::one();
    let mut acc: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); size]; n];
    let mut previous: Option<Vec<Vec<(BigInt, BigInt)>>> = None;
    let mut first = Some(p0);
    for _ in 0..MAX_PRIMES {
        let p = match first.take() {
            Some(p) => p,
            None => primes.next().expect("word-size prime"),
        };
        let lap = compiled.reduce(p);
        let mut image = None;
        for _ in 0..ATTEMPTS_PER_PRIME {
            let shifts: Vec<u64> = (0..free.len()).map(|_| rng.gen_range(1..p)).collect();
            let weights: Vec<u64> = (0..n).map(|_| rng.gen_range(1..p)).collect();
            let (nodes, values) = sample(&lap, 2 * top + 4, |s| {
                let mut pt = vec![0u64; nv];
                if homogeneous {
                    pt[0] = 1;
                }
                for ((&v, &e), &b) in free.iter().zip(&exps).zip(&shifts) {
                    pt[v] = add_mod(b, pow(s, e, p), p);
                }
                pt
            });
            if let Some(nums) = recover_curve(&nodes, &values, top, &weights, p) {
                image = Some(unshift(nums, &degrees, &shifts, size, p));
                break;
            }
        }
        let Some(mut image) = image else {
            continue;
        };
        // Scale so the highest coefficient of the anchor is 1.
        let Some(lead) = image[n - 1].iter().rposition(|&x| x != 0) else {
            continue;
        };
        let inv = inv_mod(image[n - 1][lead], p);
        for row in image.iter_mut() {
            for x in row.iter_mut() {
                *x = mul_mod(*x, inv, p);
            }
        }

        let bp = BigInt::from(p);
        let minv = inv_mod(modulus.mod_floor(&bp).to_u64().expect("reduced"), p);
        for (row, img) in acc.iter_mut().zip(&image) {
            for (a, &r) in row.iter_mut().zip(img) {
                let cur = a.mod_floor(&bp).to_u64().expect("reduced");
                let t = mul_mod(sub_mod(r, cur, p), minv, p);
                if t != 0 {
                    *a += &modulus * BigInt::from(t);
                }
            }
        }
        modulus *= bp;

        let Some(rational) = acc
            .iter()
            .map(|row| row.iter().map(|a| rational_number(a, &modulus)).collect::<Option<Vec<_>>>())
            .collect::<Option<Vec<_>>>()
        else {
            continue;
        };
        if previous.as_ref() == Some(&rational) {
            let candidate = assemble(c, &compiled, &free, &degrees, &rational, homogeneous);
            let measure = Measure::new(c.states().to_vec(), candidate)?;
            if c.check_global_balance(&measure)? {
                return Ok(measure.values().to_vec());
            }
        }
        previous = Some(rational);
    }
    Err(ChainError::Reconstruction(format!(
        "no stable balanced vector after {MAX_PRIMES} primes"
    )))
}

fn pow(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

/// Turns Kronecker images in the shifted variables `y_v = x_v - b_v` into
/// dense coefficient tensors in the `x_v`.
fn unshift(nums: Vec<Vec<u64>>, degrees: &[usize], shifts: &[u64], size: usize, p: u64) -> Vec<Vec<u64>> {
    nums.into_iter()
        .map(|mut c| {
            c.resize(size, 0);
            let mut stride = 1usize;
            for (v, &d) in degrees.iter().enumerate() {
                let len = d + 1;
                let mut line = vec![0u64; len];
                for start in 0..size {
                    if (start / stride) % len != 0 {
                        continue;
                    }
                    for (k, slot) in line.iter_mut().enumerate() {
                        *slot = c[start + k * stride];
                    }
                    upoly::taylor_shift(&mut line, neg_mod(shifts[v], p), p);
                    for (k, &x) in line.iter().enumerate() {
                        c[start + k * stride] = x;
                    }
                }
                stride *= len;
            }
            c
        })
        .collect()
}

/// `a / b` with `|a|, b <= sqrt(m / 2)` and `a = b * x mod m`.
fn rational_number(x: &BigInt, m: &BigInt) -> Option<(BigInt, BigInt)> {
    let bound = (m / 2u32).sqrt();
    let (mut r0, mut r1) = (m.clone(), x.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        r0 = std::mem::replace(&mut r1, r2);
        let t2 = &t0 - &q * &t1;
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound || !r1.gcd(&t1).is_one() {
        return None;
    }
    if t1.is_negative() {
        Some((-r1, -t1))
    } else {
        Some((r1, t1))
    }
}

/// Integer polynomials from rational coefficient tensors, restoring the
/// pinned variable for homogeneous chains.
fn assemble(
    c: &SymbolicChain,
    compiled: &CompiledLaplacian,
    free: &[usize],
    degrees: &[usize],
    rational: &[Vec<(BigInt, BigInt)>],
    homogeneous: bool,
) -> Vec<MultiPoly> {
    let ring = c.ring();
    let lcm = rational
        .iter()
        .flatten()
        .fold(BigInt::one(), |acc, (_, d)| acc.lcm(d));
    let exponents = |mut flat: usize| -> Vec<u16> {
        degrees
            .iter()
            .map(|&d| {
                let e = flat % (d + 1);
                flat /= d + 1;
                u16::try_from(e).expect("degree fits")
            })
            .collect()
    };
    let total = rational
        .iter()
        .flat_map(|row| row.iter().enumerate().filter(|(_, (a, _))| !a.is_zero()))
        .map(|(k, _)| exponents(k).iter().map(|&e| u32::from(e)).sum::<u32>())
        .max()
        .unwrap_or(0);
    rational
        .iter()
        .map(|row| {
            let terms = row.iter().enumerate().filter(|(_, (a, _))| !a.is_zero()).map(|(k, (a, d))| {
                let ex = exponents(k);
                let mut m = Monomial::ONE;
                let mut used = 0u32;
                for (&v, &e) in free.iter().zip(&ex) {
                    m.set_exp(compiled.vars[v], e);
                    used += u32::from(e);
                }
                if homogeneous {
                    m.set_exp(compiled.vars[0], u16::try_from(total - used).expect("degree fits"));
                }
                (m, a * (&lcm / d))
            });
            MultiPoly::from_terms(ring, terms)
        })
        .collect()
}

/// Dense univariate polynomials modulo `p`, lowest degree first.
mod upoly {
    use super::super::modular::{add_mod, inv_mod, mul_mod, sub_mod};

    pub fn trim(mut a: Vec<u64>) -> Vec<u64> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    pub fn eval(a: &[u64], x: u64, p: u64) -> u64 {
        a.iter().rev().fold(0, |acc, &c| add_mod(mul_mod(acc, x, p), c, p))
    }

    pub fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = add_mod(out[i + j], mul_mod(x, y, p), p);
            }
        }
        trim(out)
    }

    fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut out = vec![0u64; a.len().max(b.len())];
        for (i, o) in out.iter_mut().enumerate() {
            *o = sub_mod(a.get(i).copied().unwrap_or(0), b.get(i).copied().unwrap_or(0), p);
        }
        trim(out)
    }

    /// Quotient and remainder; `b` must be nonzero and trimmed.
    fn divrem(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
        let mut r = a.to_vec();
        if r.len() < b.len() {
            return (Vec::new(), trim(r));
        }
        let db = b.len() - 1;
        let inv = inv_mod(b[db], p);
        let mut q = vec![0u64; r.len() - db];
        for k in (0..q.len()).rev() {
            let f = mul_mod(r[k + db], inv, p);
            q[k] = f;
            if f == 0 {
                continue;
            }
            for (i, &y) in b.iter().enumerate() {
                r[k + i] = sub_mod(r[k + i], mul_mod(f, y, p), p);
            }
        }
        r.truncate(db);
        (trim(q), trim(r))
    }

    /// `(num, den)` with `num = den * f mod m`, `deg num <= bound`, from the
    /// extended Euclidean remainder sequence.
    pub fn rational_reconstruct(m: Vec<u64>, f: Vec<u64>, bound: usize, p: u64) -> Option<(Vec<u64>, Vec<u64>)> {
        let (mut r0, mut r1) = (m, f);
        let (mut t0, mut t1): (Vec<u64>, Vec<u64>) = (Vec::new(), vec![1]);
        while r1.len() > bound + 1 {
            let (q, r2) = divrem(&r0, &r1, p);
            r0 = std::mem::replace(&mut r1, r2);
            let t2 = sub(&t0, &mul(&q, &t1, p), p);
            t0 = std::mem::replace(&mut t1, t2);
        }
        if t1.is_empty() {
            return None;
        }
        Some((r1, t1))
    }

    /// Replaces `f(y)` by `f(y + c)` in place.
    pub fn taylor_shift(f: &mut [u64], c: u64, p: u64) {
        let n = f.len();
        for i in 0..n {
            for k in (i..n.saturating_sub(1)).rev() {
                f[k] = add_mod(f[k], mul_mod(c, f[k + 1], p), p);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn taylor_shift_matches_expansion() {
        let p = PrimeIter::new().next().unwrap();
        // (y + 2)^2 = y^2 + 4y + 4
        let mut f = vec![0, 0, 1];
        upoly::taylor_shift(&mut f, 2, p);
        assert_eq!(f, vec![4, 4, 1]);
    }

    #[test]
    fn rational_numbers() {
        let m = BigInt::from(1_000_003u64);
        let x = (BigInt::from(-3) * BigInt::from(7).modpow(&(&m - 2u32), &m)).mod_floor(&m);
        assert_eq!(rational_number(&x, &m), Some((BigInt::from(-3), BigInt::from(7))));
    }
}
