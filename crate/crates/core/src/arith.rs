//! Integer partitions, the Möbius function, binomial coefficients and their
//! p-adic behaviour.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::{Error, Result};

/// A partition as a weakly decreasing list of positive parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    pub fn new(mut parts: Vec<u32>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::Domain("partition parts must be positive".into()));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Partition { parts })
    }

    pub fn empty() -> Self {
        Partition { parts: Vec::new() }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn weight(&self) -> u32 {
        self.parts.iter().sum()
    }

    /// Number of parts.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// `m_i`, the number of parts equal to `i`.
    pub fn multiplicity(&self, i: u32) -> usize {
        self.parts.iter().filter(|&&p| p == i).count()
    }

    /// `c_i = λ_i − λ_{i+1}` for `i = 1..=len`, with `λ_{len+1} = 0`.
    pub fn differences(&self) -> Vec<u32> {
        self.parts
            .iter()
            .enumerate()
            .map(|(i, &p)| p - self.parts.get(i + 1).copied().unwrap_or(0))
            .collect()
    }
}

/// All partitions of `n` in reverse lexicographic order, starting from `(n)`.
pub fn partitions_of(n: u32) -> Vec<Partition> {
    fn rec(rest: u32, max: u32, prefix: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if rest == 0 {
            out.push(Partition { parts: prefix.clone() });
            return;
        }
        for part in (1..=rest.min(max)).rev() {
            prefix.push(part);
            rec(rest - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// Number-theoretic Möbius function by trial division.
pub fn moebius(n: u64) -> Result<i8> {
    if n == 0 {
        return Err(Error::Domain("moebius is undefined at 0".into()));
    }
    let mut n = n;
    let mut sign = 1i8;
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return Ok(0);
            }
            sign = -sign;
        }
        p += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    Ok(sign)
}

/// Positive divisors of `n` in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|p| p * p <= n).all(|p| !n.is_multiple_of(p))
}

/// `q(q−1)…(q−k+1)/k!` for rational `q`.
pub fn gen_binomial(q: &BigRational, k: u32) -> BigRational {
    let mut acc = BigRational::one();
    for j in 0..k {
        acc *= q - BigRational::from_integer(j.into());
        acc /= BigRational::from_integer((j + 1).into());
    }
    acc
}

/// Integer binomial `binom(a, k)` for any integer `a`.
pub fn binomial(a: &BigInt, k: u64) -> BigInt {
    // after step j the accumulator is binom(a, j+1), an integer
    let mut acc = BigInt::one();
    for j in 0..k {
        acc = acc * (a - BigInt::from(j)) / BigInt::from(j + 1);
    }
    acc
}

/// `m_p(x)`; `None` stands for `+∞` at `x = 0`.
pub fn valuation(p: u64, x: &BigInt) -> Option<u32> {
    if x.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut x = x.abs();
    let mut v = 0;
    loop {
        let (q, r) = x.div_rem(&p);
        if !r.is_zero() {
            return Some(v);
        }
        x = q;
        v += 1;
    }
}

/// Outcome of the Jacobsthal-type congruence `binom(a,b) ≡ η binom(a/p,b/p) mod p^r`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JacobsthalCheck {
    pub eta: i8,
    /// Largest admissible `r`; `None` when some valuation is infinite, in
    /// which case exact equality is required.
    pub exponent: Option<u32>,
    pub holds: bool,
    /// The additional congruence modulo 4 (only for `p = 2`).
    pub mod4: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CongruenceReport {
    pub a: i64,
    pub b: u64,
    pub p: u64,
    /// `v_p(binom(a,b))`, `None` when the binomial vanishes.
    pub valuation: Option<u32>,
    /// `max(m_p(a) − m_p(b), 0)`.
    pub kummer_bound: Option<u32>,
    pub kummer_pass: bool,
    pub jacobsthal: Option<JacobsthalCheck>,
}

impl CongruenceReport {
    pub fn passed(&self) -> bool {
        self.kummer_pass
            && self
                .jacobsthal
                .as_ref()
                .is_none_or(|j| j.holds && j.mod4 != Some(false))
    }
}

/// Offset subtracted in the Jacobsthal exponent: 2, 1, 0 for `p = 2`, `p = 3`,
/// `p ≥ 5`. These are the constants under which the congruence holds; the
/// reversed assignment fails already for `binom(4,2)` with `p = 2`.
fn jacobsthal_offset(p: u64) -> u32 {
    match p {
        2 => 2,
        3 => 1,
        _ => 0,
    }
}

/// Checks the Kummer divisibility `p^max(m_p(a)−m_p(b),0) | binom(a,b)` and,
/// when `p` divides both `a` and `b`, the Jacobsthal congruence.
pub fn binomial_congruence_check(a: i64, b: u64, p: u64) -> Result<CongruenceReport> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let big_a = BigInt::from(a);
    let big_b = BigInt::from(b);
    let value = binomial(&big_a, b);
    let v = valuation(p, &value);

    // m_p(a) − m_p(b) with m_p(0) = ∞; ∞ − ∞ is read as 0.
    let kummer_bound = match (valuation(p, &big_a), valuation(p, &big_b)) {
        (_, None) => Some(0),
        (None, Some(_)) => None,
        (Some(x), Some(y)) => Some(x.saturating_sub(y)),
    };
    let kummer_pass = match (v, kummer_bound) {
        (None, _) => true,
        (Some(_), None) => false,
        (Some(v), Some(k)) => v >= k,
    };

    let pi = p as i64;
    let jacobsthal = (a % pi == 0 && b.is_multiple_of(p)).then(|| {
        let reduced = binomial(&BigInt::from(a / pi), b / p);
        let eta: i8 = if p == 2 && b % 4 == 2 && (a - b as i64).rem_euclid(4) == 2 {
            -1
        } else {
            1
        };
        let target = &reduced * BigInt::from(eta);
        let exponent = [
            valuation(p, &big_a),
            valuation(p, &big_b),
            valuation(p, &(&big_a - &big_b)),
            valuation(p, &reduced),
        ]
        .into_iter()
        .sum::<Option<u32>>()
        .map(|s| s.saturating_sub(jacobsthal_offset(p)));
        let holds = match exponent {
            None => value == target,
            Some(r) => (&value - &target).mod_floor(&BigInt::from(p).pow(r)).is_zero(),
        };
        let mod4 = (p == 2).then(|| (&value - &reduced).mod_floor(&BigInt::from(4)).is_zero());
        JacobsthalCheck { eta, exponent, holds, mod4 }
    });

    Ok(CongruenceReport { a, b, p, valuation: v, kummer_bound, kummer_pass, jacobsthal })
}

/// Euler characteristic of the stratum of `S^n X` of type `lam`, for a space
/// with Euler characteristic `chi`: `k! binom(chi, k) / ∏ m_i!` with `k` the
/// number of parts.
pub fn chi_symmetric_stratum(chi: &BigInt, lam: &Partition) -> BigInt {
    let k = lam.len() as u32;
    let mut value = gen_binomial(&BigRational::from_integer(chi.clone()), k);
    value *= BigRational::from_integer(factorial(k as u64));
    let mut seen = lam.parts.clone();
    seen.dedup();
    for part in seen {
        value /= BigRational::from_integer(factorial(lam.multiplicity(part) as u64));
    }
    assert!(value.is_integer(), "stratum Euler characteristic must be integral");
    value.to_integer()
}

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, j| acc * BigInt::from(j))
}

/// `[t^d] ∏_i (1 − t^i)^{−c_i}` as the partition sum
/// `Σ_{λ ⊢ d} ∏_i binom(c_i + λ_i − λ_{i+1} − 1, λ_i − λ_{i+1})`.
pub fn coeff_product_form(c: &BTreeMap<u32, BigInt>, d: u32) -> BigInt {
    let zero = BigInt::zero();
    partitions_of(d)
        .iter()
        .map(|lam| {
            lam.differences()
                .iter()
                .enumerate()
                .filter(|(_, &diff)| diff > 0)
                .map(|(i, &diff)| {
                    let ci = c.get(&(i as u32 + 1)).unwrap_or(&zero);
                    binomial(&(ci + BigInt::from(diff) - 1), diff as u64)
                })
                .product::<BigInt>()
        })
        .sum()
}
