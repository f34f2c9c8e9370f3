//! Exact rational helpers: parsing, canonical formatting, exact roots and
//! certified comparisons between rational powers.
//!
//! Nothing here touches floating point. Comparisons that involve
//! irrational roots are decided either algebraically or by integer-root
//! interval refinement that is guaranteed to terminate.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

/// `"p/q"` in lowest terms, or `"p"` for integers.
pub fn format_rational(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

fn to_u32(e: &BigInt) -> Result<u32> {
    e.to_u32().ok_or_else(|| Error::InexactPower(format!("exponent {e} too large")))
}

/// `x^k` for a (possibly negative) machine-size integer exponent.
pub fn pow_int(x: &Rational, k: i64) -> Rational {
    let p = num_traits::pow(x.clone(), k.unsigned_abs() as usize);
    if k < 0 {
        p.recip()
    } else {
        p
    }
}

fn exact_uint_root(x: &BigInt, q: u32) -> Option<BigInt> {
    let mag: BigUint = x.magnitude().clone();
    let r = mag.nth_root(q);
    if num_traits::pow(r.clone(), q as usize) == mag {
        Some(BigInt::from_biguint(Sign::Plus, r))
    } else {
        None
    }
}

/// The exact nonnegative `q`-th root of a nonnegative rational, if rational.
pub fn exact_root(x: &Rational, q: u32) -> Option<Rational> {
    assert!(q >= 1);
    if x.is_negative() {
        return None;
    }
    let n = exact_uint_root(x.numer(), q)?;
    let d = exact_uint_root(x.denom(), q)?;
    Some(Rational::new(n, d))
}

/// `x^e` for nonnegative `x` and rational `e`, when the result is rational.
pub fn rational_pow(x: &Rational, e: &Rational) -> Option<Rational> {
    if x.is_negative() {
        return None;
    }
    if x.is_zero() {
        return match e.cmp(&Rational::zero()) {
            Ordering::Greater => Some(Rational::zero()),
            Ordering::Equal => Some(Rational::one()),
            Ordering::Less => None,
        };
    }
    let p = e.numer().to_i64()?;
    let q = e.denom().to_u32()?;
    let root = exact_root(x, q)?;
    Some(pow_int(&root, p))
}

/// Rational bounds `lo ≤ x^(1/q) ≤ hi` with `hi − lo = 2^-bits`.
fn root_bounds(x: &Rational, q: u32, bits: u32) -> (Rational, Rational) {
    let scale = BigInt::one() << (bits as usize * q as usize);
    let scaled = (x.numer() * scale) / x.denom();
    let r = scaled.magnitude().nth_root(q);
    let r = BigInt::from_biguint(Sign::Plus, r);
    let denom = BigInt::one() << bits as usize;
    (Rational::new(r.clone(), denom.clone()), Rational::new(r + 1, denom))
}

/// Decides `a^e ≤ b^e + c^e` exactly for nonnegative `a, b, c` and `e > 0`.
///
/// With `e = p/q`, put `α = a^p` (and likewise β, γ) so the question is
/// `α^(1/q) ≤ β^(1/q) + γ^(1/q)`. When `β/γ` is a perfect `q`-th power the
/// right side is a rational multiple of `γ^(1/q)` and both sides can be
/// raised to the `q`-th power. Otherwise the three radicals have pairwise
/// irrational ratios, hence are linearly independent over **Q**, so the two
/// sides differ and interval refinement separates them.
pub fn pow_le_sum(a: &Rational, b: &Rational, c: &Rational, e: &Rational) -> bool {
    assert!(e.is_positive(), "exponent must be positive");
    assert!(!a.is_negative() && !b.is_negative() && !c.is_negative());
    let p = e.numer().to_u32().expect("exponent numerator too large");
    let q = e.denom().to_u32().expect("exponent denominator too large");
    let alpha = pow_int(a, p as i64);
    let beta = pow_int(b, p as i64);
    let gamma = pow_int(c, p as i64);
    if q == 1 {
        return alpha <= beta + gamma;
    }
    if alpha.is_zero() {
        return true;
    }
    if beta.is_zero() || gamma.is_zero() {
        return alpha <= beta + gamma;
    }
    if let Some(k) = exact_root(&(&beta / &gamma), q) {
        let rhs = gamma * pow_int(&(k + Rational::one()), q as i64);
        return alpha <= rhs;
    }
    let mut bits = 16;
    loop {
        let (alo, ahi) = root_bounds(&alpha, q, bits);
        let (blo, bhi) = root_bounds(&beta, q, bits);
        let (clo, chi) = root_bounds(&gamma, q, bits);
        if ahi < &blo + &clo {
            return true;
        }
        if alo > bhi + chi {
            return false;
        }
        bits *= 2;
    }
}

/// Compares `a^e1` with `b^e2` for positive `a, b` (zero allowed with a
/// positive exponent) by raising both sides to the product of the exponent
/// denominators.
pub fn cmp_powers(a: &Rational, e1: &Rational, b: &Rational, e2: &Rational) -> Ordering {
    let norm = |x: &Rational, e: &Rational| -> (Rational, Rational) {
        if e.is_negative() {
            (x.recip(), -e.clone())
        } else {
            (x.clone(), e.clone())
        }
    };
    let zero_side = |x: &Rational, e: &Rational| x.is_zero() && e.is_positive();
    match (zero_side(a, e1), zero_side(b, e2)) {
        (true, true) => return Ordering::Equal,
        (true, false) => return Ordering::Less,
        (false, true) => return Ordering::Greater,
        _ => {}
    }
    let (a, e1) = norm(a, e1);
    let (b, e2) = norm(b, e2);
    let q = e1.denom().lcm(e2.denom());
    let k1 = (&e1 * Rational::from_integer(q.clone())).to_integer();
    let k2 = (&e2 * Rational::from_integer(q)).to_integer();
    let k1 = to_u32(&k1).expect("exponent too large") as i64;
    let k2 = to_u32(&k2).expect("exponent too large") as i64;
    pow_int(&a, k1).cmp(&pow_int(&b, k2))
}
