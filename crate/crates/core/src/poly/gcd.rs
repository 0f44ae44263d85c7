//! Multivariate gcd over the integers.
//!
//! The fast path is the heuristic gcd: evaluate one variable at a large
//! integer, recurse, and lift the result back by a balanced radix
//! expansion. Every candidate is checked by exact division, so a wrong
//! guess can only cost time. When the heuristic gives up, a recursive
//! primitive polynomial remainder sequence takes over.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::ring::Monomial;
use super::{MultiPoly, PolyError};

const HEU_GCD_ATTEMPTS: usize = 6;

/// Greatest common divisor, primitive with positive leading coefficient.
pub fn gcd(a: &MultiPoly, b: &MultiPoly) -> Result<MultiPoly, PolyError> {
    a.check_ring(b)?;
    match (a.is_zero(), b.is_zero()) {
        (true, true) => Err(PolyError::ZeroGcd),
        (true, false) => Ok(b.primitive_part()),
        (false, true) => Ok(a.primitive_part()),
        (false, false) => Ok(gcd_nonzero(a, b).primitive_part()),
    }
}

/// Gcd of a whole family; zero entries are ignored.
pub fn gcd_all<'a, I>(polys: I) -> Result<MultiPoly, PolyError>
where
    I: IntoIterator<Item = &'a MultiPoly>,
{
    let mut acc: Option<MultiPoly> = None;
    for p in polys {
        if p.is_zero() {
            continue;
        }
        acc = Some(match acc {
            None => p.primitive_part(),
            Some(g) => {
                g.check_ring(p)?;
                if g.is_one() {
                    return Ok(g);
                }
                gcd_nonzero(&g, p).primitive_part()
            }
        });
    }
    acc.ok_or(PolyError::ZeroGcd)
}

fn strip_monomial(p: &MultiPoly, m: &Monomial) -> MultiPoly {
    if m.is_one() {
        return p.clone();
    }
    let terms = p.terms().iter().map(|(tm, c)| (tm.div(m), c.clone())).collect();
    MultiPoly::from_sorted(p.ring(), terms)
}

/// Gcd of two nonzero polynomials, correct up to sign and integer content.
fn gcd_nonzero(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    let ma = a.monomial_content();
    let mb = b.monomial_content();
    let mg = ma.gcd(&mb);
    let a1 = strip_monomial(a, &ma).primitive_part();
    let b1 = strip_monomial(b, &mb).primitive_part();
    let core = if a1.is_constant() || b1.is_constant() {
        MultiPoly::one(a.ring())
    } else if a1 == b1 {
        a1
    } else if a1.len() <= b1.len() && b1.is_divisible_by(&a1) {
        a1
    } else if b1.len() < a1.len() && a1.is_divisible_by(&b1) {
        b1
    } else {
        heu_gcd(&a1, &b1).unwrap_or_else(|| prs_gcd(&a1, &b1))
    };
    core.primitive_part().mul_term(&mg, &BigInt::one())
}

fn max_norm(p: &MultiPoly) -> BigInt {
    p.terms()
        .iter()
        .map(|(_, c)| c.abs())
        .max()
        .unwrap_or_default()
}

fn first_shared_var(f: &MultiPoly, g: &MultiPoly) -> Option<usize> {
    let df = f.degrees();
    let dg = g.degrees();
    (0..f.ring().nvars()).find(|&v| df.exp(v) > 0 || dg.exp(v) > 0)
}

/// Heuristic gcd including the gcd of the integer contents.
/// `None` means the heuristic did not converge.
fn heu_gcd(f: &MultiPoly, g: &MultiPoly) -> Option<MultiPoly> {
    let ring = f.ring();
    if f.is_constant() || g.is_constant() {
        return Some(MultiPoly::constant(ring, f.content().gcd(&g.content())));
    }
    let v = first_shared_var(f, g)?;
    let common = f.content().gcd(&g.content());
    let f = f.div_scalar(&common).ok()?;
    let g = g.div_scalar(&common).ok()?;

    let f_norm = max_norm(&f);
    let g_norm = max_norm(&g);
    let smaller: &BigInt = if f_norm < g_norm { &f_norm } else { &g_norm };
    let b: BigInt = BigInt::from(2) * smaller + 29;
    let lc_f = f.leading_term()?.1.abs();
    let lc_g = g.leading_term()?.1.abs();
    let ratio: BigInt = (&f_norm / &lc_f).min(&g_norm / &lc_g);
    let capped: BigInt = b.clone().min(BigInt::from(99) * b.sqrt());
    let mut x: BigInt = capped.max(BigInt::from(2) * ratio + 4);

    for _ in 0..HEU_GCD_ATTEMPTS {
        let ff = f.specialize(v, &x);
        let gg = g.specialize(v, &x);
        if !ff.is_zero() && !gg.is_zero() {
            if let Some(h) = heu_gcd(&ff, &gg) {
                let h = interpolate(&h, &x, v).primitive_part();
                if !h.is_zero() && f.is_divisible_by(&h) && g.is_divisible_by(&h) {
                    return Some(h.scale(&common));
                }
            }
        }
        x = BigInt::from(73794) * &x * x.sqrt().sqrt() / 27011;
    }
    None
}

fn symmetric_mod(c: &BigInt, x: &BigInt) -> BigInt {
    let r = c.mod_floor(x);
    if BigInt::from(2) * &r > *x {
        r - x
    } else {
        r
    }
}

/// Recovers a polynomial in variable `v` from its value at `v = x`, reading
/// coefficients as balanced base-`x` digits.
fn interpolate(h: &MultiPoly, x: &BigInt, v: usize) -> MultiPoly {
    let ring = h.ring();
    let mut rest = h.clone();
    let mut terms = Vec::new();
    let mut k: u16 = 0;
    while !rest.is_zero() {
        let digit_terms: Vec<(Monomial, BigInt)> = rest
            .terms()
            .iter()
            .map(|(m, c)| (*m, symmetric_mod(c, x)))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        let digit = MultiPoly::from_sorted(ring, digit_terms);
        for (m, c) in digit.terms() {
            let mut nm = *m;
            nm.set_exp(v, k);
            terms.push((nm, c.clone()));
        }
        rest = (&rest - &digit)
            .div_scalar(x)
            .expect("balanced digit leaves a multiple of the radix");
        k = k.checked_add(1).expect("interpolation degree overflow");
    }
    MultiPoly::from_terms(ring, terms).sign_normalized()
}

/// Primitive content with respect to `v`: gcd of the coefficients of the
/// powers of `v`, integer content dropped.
fn content_in(f: &MultiPoly, v: usize) -> MultiPoly {
    let mut coeffs = f.coefficients_in(v).into_iter().filter(|c| !c.is_zero());
    let mut acc = coeffs.next().expect("nonzero polynomial").primitive_part();
    for c in coeffs {
        if acc.is_constant() {
            break;
        }
        acc = gcd_nonzero(&acc, &c);
    }
    if acc.is_constant() {
        MultiPoly::one(f.ring())
    } else {
        acc
    }
}

fn primitive_in(f: &MultiPoly, v: usize) -> MultiPoly {
    let c = content_in(f, v);
    f.exact_div(&c).expect("content divides its polynomial")
}

fn leading_coeff_in(f: &MultiPoly, v: usize) -> MultiPoly {
    f.coefficients_in(v).pop().expect("nonzero polynomial")
}

/// Pseudo-remainder of `a` by `b` as polynomials in `v`.
fn pseudo_rem(a: &MultiPoly, b: &MultiPoly, v: usize) -> MultiPoly {
    let ring = a.ring();
    let db = b.degree_in(v);
    let lcb = leading_coeff_in(b, v);
    let mut r = a.clone();
    let mut steps = i32::from(a.degree_in(v)) - i32::from(db) + 1;
    while !r.is_zero() && r.degree_in(v) >= db {
        let dr = r.degree_in(v);
        let lcr = leading_coeff_in(&r, v);
        let shift = MultiPoly::var_pow(ring, v, dr - db);
        r = &r * &lcb - &(&lcr * &shift) * b;
        steps -= 1;
    }
    if steps > 0 {
        r = &r * &lcb.pow(steps as u32);
    }
    r
}

/// Recursive primitive remainder-sequence gcd (up to sign).
pub(crate) fn prs_gcd(f: &MultiPoly, g: &MultiPoly) -> MultiPoly {
    let ring = f.ring();
    if f.is_constant() || g.is_constant() {
        return MultiPoly::constant(ring, f.content().gcd(&g.content()));
    }
    let v = first_shared_var(f, g).expect("nonconstant input");
    if !f.uses_var(v) {
        return prs_gcd(f, &content_in(g, v));
    }
    if !g.uses_var(v) {
        return prs_gcd(&content_in(f, v), g);
    }
    let cf = content_in(f, v);
    let cg = content_in(g, v);
    let c = prs_gcd(&cf, &cg);
    let mut a = f.exact_div(&cf).expect("content divides");
    let mut b = g.exact_div(&cg).expect("content divides");
    if a.degree_in(v) < b.degree_in(v) {
        std::mem::swap(&mut a, &mut b);
    }
    loop {
        let r = pseudo_rem(&a, &b, v);
        if r.is_zero() {
            break;
        }
        if r.degree_in(v) == 0 {
            b = MultiPoly::one(ring);
            break;
        }
        a = b;
        b = primitive_in(&r, v);
    }
    let b = if b.is_one() { b } else { primitive_in(&b, v) };
    &b * &c
}
