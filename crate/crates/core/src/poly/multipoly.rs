use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::ring::{Monomial, Ring};
use super::PolyError;

/// Sparse multivariate polynomial with big-integer coefficients.
///
/// Terms are kept in strictly decreasing lexicographic order of their
/// exponent vectors and no stored coefficient is zero, so structural
/// equality is polynomial equality.
#[derive(Clone)]
pub struct MultiPoly {
    ring: Arc<Ring>,
    terms: Vec<(Monomial, BigInt)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

/// Applies `op` to `a` and `b`, reporting a ring mismatch instead of panicking.
pub fn arith(a: &MultiPoly, b: &MultiPoly, op: ArithOp) -> Result<MultiPoly, PolyError> {
    a.check_ring(b)?;
    Ok(match op {
        ArithOp::Add => a.add_impl(b, false),
        ArithOp::Sub => a.add_impl(b, true),
        ArithOp::Mul => a.mul_impl(b),
    })
}

impl MultiPoly {
    pub fn zero(ring: &Arc<Ring>) -> MultiPoly {
        MultiPoly {
            ring: ring.clone(),
            terms: Vec::new(),
        }
    }

    pub fn one(ring: &Arc<Ring>) -> MultiPoly {
        MultiPoly::constant(ring, 1)
    }

    pub fn constant(ring: &Arc<Ring>, c: impl Into<BigInt>) -> MultiPoly {
        MultiPoly::monomial(ring, Monomial::ONE, c.into())
    }

    pub fn monomial(ring: &Arc<Ring>, m: Monomial, c: BigInt) -> MultiPoly {
        let terms = if c.is_zero() { Vec::new() } else { vec![(m, c)] };
        MultiPoly {
            ring: ring.clone(),
            terms,
        }
    }

    /// The variable `name` of `ring`.
    pub fn var(ring: &Arc<Ring>, name: &str) -> Result<MultiPoly, PolyError> {
        let i = ring
            .index_of(name)
            .ok_or_else(|| PolyError::UnknownVariable(name.to_string()))?;
        Ok(MultiPoly::var_pow(ring, i, 1))
    }

    pub fn var_pow(ring: &Arc<Ring>, index: usize, exp: u16) -> MultiPoly {
        assert!(index < ring.nvars(), "variable index out of range");
        MultiPoly::monomial(ring, Monomial::var(index, exp), BigInt::one())
    }

    /// Builds a polynomial from arbitrary terms, merging duplicates and
    /// dropping zeros.
    pub fn from_terms<I>(ring: &Arc<Ring>, terms: I) -> MultiPoly
    where
        I: IntoIterator<Item = (Monomial, BigInt)>,
    {
        let mut terms: Vec<(Monomial, BigInt)> = terms.into_iter().collect();
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        let mut out: Vec<(Monomial, BigInt)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            match out.last_mut() {
                Some((lm, lc)) if *lm == m => *lc += c,
                _ => {
                    if let Some((_, lc)) = out.last() {
                        if lc.is_zero() {
                            out.pop();
                        }
                    }
                    out.push((m, c));
                }
            }
        }
        if out.last().is_some_and(|(_, c)| c.is_zero()) {
            out.pop();
        }
        MultiPoly {
            ring: ring.clone(),
            terms: out,
        }
    }

    /// Takes already-sorted, zero-free terms.
    pub(crate) fn from_sorted(ring: &Arc<Ring>, terms: Vec<(Monomial, BigInt)>) -> MultiPoly {
        debug_assert!(terms.windows(2).all(|w| w[0].0 > w[1].0));
        debug_assert!(terms.iter().all(|(_, c)| !c.is_zero()));
        MultiPoly {
            ring: ring.clone(),
            terms,
        }
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn terms(&self) -> &[(Monomial, BigInt)] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<(Monomial, BigInt)> {
        self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.is_one())
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn constant_value(&self) -> Option<BigInt> {
        match self.terms.as_slice() {
            [] => Some(BigInt::zero()),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &BigInt)> {
        self.terms.first().map(|(m, c)| (m, c))
    }

    pub fn coefficient(&self, m: &Monomial) -> BigInt {
        self.terms
            .binary_search_by(|(tm, _)| m.cmp(tm))
            .map(|i| self.terms[i].1.clone())
            .unwrap_or_default()
    }

    pub fn same_ring(&self, other: &MultiPoly) -> bool {
        Arc::ptr_eq(&self.ring, &other.ring) || self.ring == other.ring
    }

    pub(crate) fn check_ring(&self, other: &MultiPoly) -> Result<(), PolyError> {
        if self.same_ring(other) {
            Ok(())
        } else {
            Err(PolyError::RingMismatch {
                left: self.ring.to_string(),
                right: other.ring.to_string(),
            })
        }
    }

    fn add_impl(&self, other: &MultiPoly, negate: bool) -> MultiPoly {
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Less => {
                    let c = if negate { -&b[j].1 } else { b[j].1.clone() };
                    out.push((b[j].0, c));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = if negate {
                        &a[i].1 - &b[j].1
                    } else {
                        &a[i].1 + &b[j].1
                    };
                    if !c.is_zero() {
                        out.push((a[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        for (m, c) in &b[j..] {
            out.push((*m, if negate { -c } else { c.clone() }));
        }
        MultiPoly::from_sorted(&self.ring, out)
    }

    fn mul_impl(&self, other: &MultiPoly) -> MultiPoly {
        if self.is_zero() || other.is_zero() {
            return MultiPoly::zero(&self.ring);
        }
        if self.terms.len() == 1 {
            let (m, c) = &self.terms[0];
            return other.mul_term(m, c);
        }
        if other.terms.len() == 1 {
            let (m, c) = &other.terms[0];
            return self.mul_term(m, c);
        }
        let mut acc: HashMap<Monomial, BigInt> =
            HashMap::with_capacity(self.terms.len().max(other.terms.len()) * 2);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let prod = ca * cb;
                acc.entry(ma.mul(mb))
                    .and_modify(|c| *c += &prod)
                    .or_insert(prod);
            }
        }
        let mut terms: Vec<(Monomial, BigInt)> =
            acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        MultiPoly::from_sorted(&self.ring, terms)
    }

    /// Multiplies by the single term `c * m`.
    pub fn mul_term(&self, m: &Monomial, c: &BigInt) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(&self.ring);
        }
        let terms = self
            .terms
            .iter()
            .map(|(tm, tc)| (tm.mul(m), tc * c))
            .collect();
        MultiPoly::from_sorted(&self.ring, terms)
    }

    pub fn scale(&self, c: &BigInt) -> MultiPoly {
        self.mul_term(&Monomial::ONE, c)
    }

    pub fn checked_add(&self, other: &MultiPoly) -> Result<MultiPoly, PolyError> {
        arith(self, other, ArithOp::Add)
    }

    pub fn checked_sub(&self, other: &MultiPoly) -> Result<MultiPoly, PolyError> {
        arith(self, other, ArithOp::Sub)
    }

    pub fn checked_mul(&self, other: &MultiPoly) -> Result<MultiPoly, PolyError> {
        arith(self, other, ArithOp::Mul)
    }

    pub fn pow(&self, mut e: u32) -> MultiPoly {
        let mut base = self.clone();
        let mut acc = MultiPoly::one(&self.ring);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Divides every coefficient by `c`, failing if any division leaves a remainder.
    pub fn div_scalar(&self, c: &BigInt) -> Result<MultiPoly, PolyError> {
        if c.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, tc) in &self.terms {
            let (q, r) = tc.div_rem(c);
            if !r.is_zero() {
                return Err(PolyError::NotDivisible);
            }
            terms.push((*m, q));
        }
        Ok(MultiPoly::from_sorted(&self.ring, terms))
    }

    /// Exact quotient `self / divisor` in the integer polynomial ring.
    ///
    /// Fails with [`PolyError::NotDivisible`] whenever a remainder would be
    /// left over; never returns a truncated quotient.
    pub fn exact_div(&self, divisor: &MultiPoly) -> Result<MultiPoly, PolyError> {
        self.check_ring(divisor)?;
        let Some((lm, lc)) = divisor.leading_term() else {
            return Err(PolyError::DivisionByZero);
        };
        if self.is_zero() {
            return Ok(MultiPoly::zero(&self.ring));
        }
        if divisor.terms.len() == 1 {
            let mut terms = Vec::with_capacity(self.terms.len());
            for (m, c) in &self.terms {
                if !lm.divides(m) {
                    return Err(PolyError::NotDivisible);
                }
                let (q, r) = c.div_rem(lc);
                if !r.is_zero() {
                    return Err(PolyError::NotDivisible);
                }
                terms.push((m.div(lm), q));
            }
            return Ok(MultiPoly::from_sorted(&self.ring, terms));
        }
        let nvars = self.ring.nvars();
        let deg_a = self.degrees();
        let deg_b = divisor.degrees();
        for v in 0..nvars {
            if deg_b.exp(v) > deg_a.exp(v) {
                return Err(PolyError::NotDivisible);
            }
        }
        let mut rem: BTreeMap<Monomial, BigInt> = self.terms.iter().cloned().collect();
        let mut quotient = Vec::new();
        while let Some((m, c)) = rem.pop_last() {
            if !lm.divides(&m) {
                return Err(PolyError::NotDivisible);
            }
            let qm = m.div(lm);
            if (0..nvars).any(|v| qm.exp(v) + deg_b.exp(v) > deg_a.exp(v)) {
                return Err(PolyError::NotDivisible);
            }
            let (qc, r) = c.div_rem(lc);
            if !r.is_zero() {
                return Err(PolyError::NotDivisible);
            }
            for (bm, bc) in &divisor.terms[1..] {
                let key = qm.mul(bm);
                let delta = &qc * bc;
                match rem.entry(key) {
                    std::collections::btree_map::Entry::Occupied(mut e) => {
                        *e.get_mut() -= delta;
                        if e.get().is_zero() {
                            e.remove();
                        }
                    }
                    std::collections::btree_map::Entry::Vacant(e) => {
                        e.insert(-delta);
                    }
                }
            }
            quotient.push((qm, qc));
        }
        Ok(MultiPoly::from_sorted(&self.ring, quotient))
    }

    pub fn is_divisible_by(&self, divisor: &MultiPoly) -> bool {
        self.exact_div(divisor).is_ok()
    }

    /// Gcd of the integer coefficients (nonnegative; zero for the zero polynomial).
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for (_, c) in &self.terms {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Divides out the integer content and makes the leading coefficient positive.
    pub fn primitive_part(&self) -> MultiPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = self.content();
        if self.terms[0].1.is_negative() {
            c = -c;
        }
        self.div_scalar(&c).expect("content divides every coefficient")
    }

    /// Negates the polynomial if its leading coefficient is negative.
    pub fn sign_normalized(&self) -> MultiPoly {
        match self.terms.first() {
            Some((_, c)) if c.is_negative() => -self,
            _ => self.clone(),
        }
    }

    /// Per-variable maximum exponents.
    pub fn degrees(&self) -> Monomial {
        self.terms
            .iter()
            .fold(Monomial::ONE, |acc, (m, _)| acc.lcm(m))
    }

    pub fn degree_in(&self, var: usize) -> u16 {
        self.terms.iter().map(|(m, _)| m.exp(var)).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|(m, _)| m.total_degree())
            .max()
            .unwrap_or(0)
    }

    /// Largest monomial dividing every term (`1` for the zero polynomial).
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.iter();
        match it.next() {
            None => Monomial::ONE,
            Some((first, _)) => it.fold(*first, |acc, (m, _)| acc.gcd(m)),
        }
    }

    pub fn uses_var(&self, var: usize) -> bool {
        self.terms.iter().any(|(m, _)| m.exp(var) > 0)
    }

    /// Indices of variables that occur with positive exponent.
    pub fn used_vars(&self) -> Vec<usize> {
        let d = self.degrees();
        (0..self.ring.nvars()).filter(|&v| d.exp(v) > 0).collect()
    }

    pub fn all_coefficients_positive(&self) -> bool {
        self.terms.iter().all(|(_, c)| c.is_positive())
    }

    /// Exact rational value under a name-keyed assignment.
    ///
    /// Every variable that occurs in the polynomial must be assigned.
    pub fn evaluate(&self, assignment: &BTreeMap<String, BigRational>) -> Result<BigRational, PolyError> {
        let mut values = Vec::with_capacity(self.ring.nvars());
        let used = self.degrees();
        for (i, name) in self.ring.names().iter().enumerate() {
            match assignment.get(name) {
                Some(v) => values.push(Some(v.clone())),
                None if used.exp(i) == 0 => values.push(None),
                None => return Err(PolyError::MissingVariable(name.clone())),
            }
        }
        let mut total = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = BigRational::from_integer(c.clone());
            for (i, v) in values.iter().enumerate() {
                let e = m.exp(i);
                if e > 0 {
                    let v = v.as_ref().expect("checked above");
                    t *= num_traits::pow(v.clone(), usize::from(e));
                }
            }
            total += t;
        }
        Ok(total)
    }

    /// Integer value with `values[i]` substituted for variable `i`.
    pub fn eval_int(&self, values: &[BigInt]) -> BigInt {
        assert_eq!(values.len(), self.ring.nvars(), "one value per variable");
        let mut total = BigInt::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, v) in values.iter().enumerate() {
                let e = m.exp(i);
                if e > 0 {
                    t *= num_traits::pow(v.clone(), usize::from(e));
                }
            }
            total += t;
        }
        total
    }

    /// Substitutes the integer `value` for variable `var`, keeping the ring.
    pub fn specialize(&self, var: usize, value: &BigInt) -> MultiPoly {
        let mut powers: Vec<BigInt> = vec![BigInt::one()];
        let terms = self.terms.iter().map(|(m, c)| {
            let e = usize::from(m.exp(var));
            while powers.len() <= e {
                let next = powers.last().expect("nonempty") * value;
                powers.push(next);
            }
            let mut nm = *m;
            nm.set_exp(var, 0);
            (nm, c * &powers[e])
        });
        MultiPoly::from_terms(&self.ring, terms.collect::<Vec<_>>())
    }

    /// Substitutes integer values for the named variables.
    pub fn substitute(&self, values: &[(&str, i64)]) -> Result<MultiPoly, PolyError> {
        let mut out = self.clone();
        for (name, v) in values {
            let i = self
                .ring
                .index_of(name)
                .ok_or_else(|| PolyError::UnknownVariable(name.to_string()))?;
            out = out.specialize(i, &BigInt::from(*v));
        }
        Ok(out)
    }

    /// Re-expresses the polynomial over `target`, matching variables by name.
    pub fn to_ring(&self, target: &Arc<Ring>) -> Result<MultiPoly, PolyError> {
        if self.ring == *target {
            return Ok(MultiPoly {
                ring: target.clone(),
                terms: self.terms.clone(),
            });
        }
        let used = self.degrees();
        let mut map = Vec::with_capacity(self.ring.nvars());
        for (i, name) in self.ring.names().iter().enumerate() {
            match target.index_of(name) {
                Some(j) => map.push(Some(j)),
                None if used.exp(i) == 0 => map.push(None),
                None => return Err(PolyError::UnknownVariable(name.clone())),
            }
        }
        let terms = self.terms.iter().map(|(m, c)| {
            let mut nm = Monomial::ONE;
            for (i, j) in map.iter().enumerate() {
                if let Some(j) = j {
                    nm.set_exp(*j, m.exp(i));
                }
            }
            (nm, c.clone())
        });
        Ok(MultiPoly::from_terms(target, terms.collect::<Vec<_>>()))
    }

    /// Exchanges variables `i` and `j`.
    pub fn swap_vars(&self, i: usize, j: usize) -> MultiPoly {
        let terms = self.terms.iter().map(|(m, c)| {
            let mut nm = *m;
            nm.set_exp(i, m.exp(j));
            nm.set_exp(j, m.exp(i));
            (nm, c.clone())
        });
        MultiPoly::from_terms(&self.ring, terms.collect::<Vec<_>>())
    }

    /// Coefficients with respect to variable `var`: entry `k` is the
    /// coefficient of `var^k`, a polynomial free of `var`.
    pub fn coefficients_in(&self, var: usize) -> Vec<MultiPoly> {
        let deg = usize::from(self.degree_in(var));
        let mut buckets: Vec<Vec<(Monomial, BigInt)>> = vec![Vec::new(); deg + 1];
        for (m, c) in &self.terms {
            let mut nm = *m;
            nm.set_exp(var, 0);
            buckets[usize::from(m.exp(var))].push((nm, c.clone()));
        }
        // Stripping one variable keeps the relative order within each bucket.
        buckets
            .into_iter()
            .map(|t| MultiPoly::from_sorted(&self.ring, t))
            .collect()
    }
}

impl PartialEq for MultiPoly {
    fn eq(&self, other: &Self) -> bool {
        self.same_ring(other) && self.terms == other.terms
    }
}

impl Eq for MultiPoly {}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiPoly({self})")
    }
}

/// Canonical rendering: `2*q^3 + q^2 + q + 2`.
impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k == 0 {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else if c.is_negative() {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            let abs = c.abs();
            let mut first = true;
            if !abs.is_one() || m.is_one() {
                write!(f, "{abs}")?;
                first = false;
            }
            for (i, name) in self.ring.names().iter().enumerate() {
                let e = m.exp(i);
                if e == 0 {
                    continue;
                }
                if !first {
                    f.write_str("*")?;
                }
                first = false;
                f.write_str(name)?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        let terms = self.terms.iter().map(|(m, c)| (*m, -c)).collect();
        MultiPoly::from_sorted(&self.ring, terms)
    }
}

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(mut self) -> MultiPoly {
        for (_, c) in &mut self.terms {
            *c = -std::mem::take(c);
        }
        self
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $op:expr) => {
        impl $trait<&MultiPoly> for &MultiPoly {
            type Output = MultiPoly;
            /// Panics if the operands live in different rings; use
            /// [`arith`] for a fallible version.
            fn $method(self, rhs: &MultiPoly) -> MultiPoly {
                arith(self, rhs, $op).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $trait<MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: MultiPoly) -> MultiPoly {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: &MultiPoly) -> MultiPoly {
                (&self).$method(rhs)
            }
        }
    };
}

binop!(Add, add, ArithOp::Add);
binop!(Sub, sub, ArithOp::Sub);
binop!(Mul, mul, ArithOp::Mul);
