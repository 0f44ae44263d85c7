use std::fmt;
use std::sync::Arc;

use super::PolyError;

/// Maximum number of variables a [`Ring`] may carry.
pub const MAX_VARS: usize = 16;

/// An ordered list of variable names.
///
/// The position of a name in the list fixes its rank in the lexicographic
/// monomial order: the first variable is the most significant.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ring {
    vars: Vec<String>,
}

impl Ring {
    pub fn new<I, S>(names: I) -> Result<Arc<Ring>, PolyError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let vars: Vec<String> = names.into_iter().map(Into::into).collect();
        if vars.len() > MAX_VARS {
            return Err(PolyError::TooManyVariables(vars.len()));
        }
        for (i, v) in vars.iter().enumerate() {
            let valid = v
                .chars()
                .next()
                .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                && v.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !valid {
                return Err(PolyError::InvalidVariableName(v.clone()));
            }
            if vars[..i].contains(v) {
                return Err(PolyError::DuplicateVariable(v.clone()));
            }
        }
        Ok(Arc::new(Ring { vars }))
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn names(&self) -> &[String] {
        &self.vars
    }

    pub fn name(&self, index: usize) -> &str {
        &self.vars[index]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z[{}]", self.vars.join(", "))
    }
}

/// Exponent vector, one entry per ring variable.
///
/// Unused trailing slots stay zero, so the derived ordering is the
/// lexicographic order over the ring's variable list.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial([u16; MAX_VARS]);

impl Monomial {
    pub const ONE: Monomial = Monomial([0; MAX_VARS]);

    pub fn var(index: usize, exp: u16) -> Monomial {
        let mut m = Monomial::ONE;
        m.0[index] = exp;
        m
    }

    pub fn from_exponents(exps: &[u16]) -> Monomial {
        let mut m = Monomial::ONE;
        m.0[..exps.len()].copy_from_slice(exps);
        m
    }

    #[inline]
    pub fn exp(&self, index: usize) -> u16 {
        self.0[index]
    }

    #[inline]
    pub fn set_exp(&mut self, index: usize, exp: u16) {
        self.0[index] = exp;
    }

    pub fn exponents(&self, nvars: usize) -> &[u16] {
        &self.0[..nvars]
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|&e| u32::from(e)).sum()
    }

    #[inline]
    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = [0u16; MAX_VARS];
        for (o, (a, b)) in out.iter_mut().zip(self.0.iter().zip(other.0.iter())) {
            *o = a.checked_add(*b).expect("monomial exponent overflow");
        }
        Monomial(out)
    }

    #[inline]
    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    /// `self / other`, assuming `other` divides `self`.
    #[inline]
    pub fn div(&self, other: &Monomial) -> Monomial {
        let mut out = [0u16; MAX_VARS];
        for (o, (a, b)) in out.iter_mut().zip(self.0.iter().zip(other.0.iter())) {
            *o = a - b;
        }
        Monomial(out)
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let mut out = [0u16; MAX_VARS];
        for (o, (a, b)) in out.iter_mut().zip(self.0.iter().zip(other.0.iter())) {
            *o = (*a).min(*b);
        }
        Monomial(out)
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        let mut out = [0u16; MAX_VARS];
        for (o, (a, b)) in out.iter_mut().zip(self.0.iter().zip(other.0.iter())) {
            *o = (*a).max(*b);
        }
        Monomial(out)
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let last = self.0.iter().rposition(|&e| e != 0).map_or(0, |p| p + 1);
        write!(f, "{:?}", &self.0[..last])
    }
}
