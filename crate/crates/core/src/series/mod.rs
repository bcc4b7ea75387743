//! Truncated multivariate power series with exact rational coefficients.
//!
//! A [`TruncatedSeries`] lives in `Q[[t_1, ..., t_r]]` modulo all monomials of
//! total degree greater than its bound. Coefficients are stored densely in
//! graded-lex order against a shared monomial basis, so truncating to a
//! smaller bound is a prefix operation. Binary operations between series of
//! different bounds produce a result at the smaller bound.

mod basis;
mod lattice;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::gen_binomial;
use crate::rational::{format_rational, parse_rational};
use crate::{Error, Result};
use basis::{basis, MonomialBasis};

pub use lattice::{points_of_degree, points_up_to, LatticePoint};

#[derive(Clone)]
pub struct TruncatedSeries {
    basis: Arc<MonomialBasis>,
    coeffs: Vec<BigRational>,
}

/// One coefficient of a serialized series.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesRecord {
    pub exponents: Vec<u32>,
    pub coefficient: String,
}

impl TruncatedSeries {
    pub fn zero(rank: usize, bound: u32) -> Self {
        let basis = basis(rank, bound);
        let coeffs = vec![BigRational::zero(); basis.len()];
        TruncatedSeries { basis, coeffs }
    }

    pub fn one(rank: usize, bound: u32) -> Self {
        Self::constant(rank, bound, BigRational::one())
    }

    pub fn constant(rank: usize, bound: u32, c: BigRational) -> Self {
        let mut s = Self::zero(rank, bound);
        s.coeffs[0] = c;
        s
    }

    /// `c * t^exponents`; the zero series when the monomial exceeds the bound.
    pub fn monomial(bound: u32, exponents: &LatticePoint, c: BigRational) -> Self {
        let mut s = Self::zero(exponents.rank(), bound);
        if let Some(i) = s.basis.index_of(exponents) {
            s.coeffs[i] = c;
        }
        s
    }

    /// The coordinate function `t_i`.
    pub fn variable(rank: usize, bound: u32, i: usize) -> Self {
        Self::monomial(bound, &LatticePoint::unit(rank, i), BigRational::one())
    }

    /// Builds a series from `(exponent, coefficient)` pairs; repeated exponents
    /// accumulate and terms above the bound are dropped.
    pub fn from_terms<I>(rank: usize, bound: u32, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (LatticePoint, BigRational)>,
    {
        let mut s = Self::zero(rank, bound);
        for (point, c) in terms {
            if point.rank() != rank {
                return Err(Error::RankMismatch { left: rank, right: point.rank() });
            }
            if let Some(i) = s.basis.index_of(&point) {
                s.coeffs[i] += c;
            }
        }
        Ok(s)
    }

    /// Univariate series `sum c_k t^k` from a coefficient slice.
    pub fn univariate(bound: u32, coeffs: &[BigRational]) -> Self {
        let mut s = Self::zero(1, bound);
        for (slot, c) in s.coeffs.iter_mut().zip(coeffs) {
            *slot = c.clone();
        }
        s
    }

    pub fn univariate_int(bound: u32, coeffs: &[i64]) -> Self {
        let coeffs: Vec<BigRational> = coeffs
            .iter()
            .map(|&c| BigRational::from_integer(c.into()))
            .collect();
        Self::univariate(bound, &coeffs)
    }

    pub fn rank(&self) -> usize {
        self.basis.rank
    }

    pub fn bound(&self) -> u32 {
        self.basis.bound
    }

    pub fn coeff(&self, point: &LatticePoint) -> BigRational {
        self.basis
            .index_of(point)
            .map(|i| self.coeffs[i].clone())
            .unwrap_or_else(BigRational::zero)
    }

    pub fn coeff_at(&self, exponents: &[u32]) -> BigRational {
        self.coeff(&LatticePoint::new(exponents.to_vec()))
    }

    pub fn constant_term(&self) -> &BigRational {
        &self.coeffs[0]
    }

    /// Coefficients `c_0, ..., c_bound` of a univariate series.
    pub fn univariate_coeffs(&self) -> Vec<BigRational> {
        debug_assert_eq!(self.rank(), 1);
        self.coeffs.clone()
    }

    /// Nonzero terms in graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&LatticePoint, &BigRational)> {
        self.basis
            .monomials
            .iter()
            .zip(&self.coeffs)
            .filter(|(_, c)| !c.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Lowest total degree carrying a nonzero coefficient.
    pub fn order(&self) -> Option<u32> {
        self.coeffs
            .iter()
            .position(|c| !c.is_zero())
            .map(|i| self.basis.degrees[i])
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(BigRational::is_integer)
    }

    /// Drops every term of degree above `bound`; a no-op if `bound` is not
    /// smaller than the current bound.
    pub fn truncate(&self, bound: u32) -> Self {
        if bound >= self.bound() {
            return self.clone();
        }
        let basis = basis(self.rank(), bound);
        let coeffs = self.coeffs[..basis.len()].to_vec();
        TruncatedSeries { basis, coeffs }
    }

    /// Raises the bound, declaring all new coefficients zero. Only the
    /// degree-by-degree solvers use this, where the padded coefficients are
    /// overwritten by the next sweep.
    pub(crate) fn pad_to(&self, bound: u32) -> Self {
        if bound <= self.bound() {
            return self.truncate(bound);
        }
        let basis = basis(self.rank(), bound);
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(basis.len(), BigRational::zero());
        TruncatedSeries { basis, coeffs }
    }

    /// Multiplies by the monomial `t^e`.
    pub fn shift(&self, e: &LatticePoint) -> Self {
        let mut out = Self::zero(self.rank(), self.bound());
        if e.degree() > self.bound() {
            return out;
        }
        let top = self.basis.prefix(self.bound() - e.degree());
        for (i, c) in self.coeffs[..top].iter().enumerate() {
            if !c.is_zero() {
                let j = out.basis.index_of(&self.basis.monomials[i].add(e)).expect("within bound");
                out.coeffs[j] = c.clone();
            }
        }
        out
    }

    fn check_rank(&self, other: &Self) -> Result<()> {
        if self.rank() != other.rank() {
            return Err(Error::RankMismatch { left: self.rank(), right: other.rank() });
        }
        Ok(())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&BigRational, &BigRational) -> BigRational) -> Self {
        assert_eq!(self.rank(), other.rank(), "series of different rank");
        let bound = self.bound().min(other.bound());
        let basis = basis(self.rank(), bound);
        let coeffs = self.coeffs[..basis.len()]
            .iter()
            .zip(&other.coeffs[..basis.len()])
            .map(|(a, b)| f(a, b))
            .collect();
        TruncatedSeries { basis, coeffs }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        TruncatedSeries {
            basis: self.basis.clone(),
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Product truncated at the smaller of the two bounds.
    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_rank(other)?;
        let bound = self.bound().min(other.bound());
        let basis = basis(self.rank(), bound);
        let coeffs = convolve(&basis, &self.coeffs, &other.coeffs);
        Ok(TruncatedSeries { basis, coeffs })
    }

    /// Integer power by repeated squaring. Negative exponents need a nonzero
    /// constant term.
    pub fn pow_int(&self, n: i64) -> Result<Self> {
        if n < 0 {
            return self.inverse()?.pow_int(-n);
        }
        let mut result = Self::one(self.rank(), self.bound());
        let mut base = self.clone();
        let mut e = n as u64;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Ok(result)
    }

    /// `self^q` for rational `q`.
    ///
    /// Nonnegative integers are accepted for any series. Every other exponent
    /// requires the constant term to be exactly 1; the result is then the
    /// generalized binomial series `sum_k C(q,k) u^k` with `u = self - 1`.
    pub fn pow_rational(&self, q: &BigRational) -> Result<Self> {
        let unit = self.constant_term().is_one();
        let non_unit = || Error::NonUnitConstant {
            constant: format_rational(self.constant_term()),
            exponent: format_rational(q),
        };
        if q.is_integer() {
            let n = q
                .to_integer()
                .to_i64()
                .ok_or_else(|| Error::Domain(format!("exponent {q} too large")))?;
            if n < 0 && !unit {
                return Err(non_unit());
            }
            return self.pow_int(n);
        }
        if !unit {
            return Err(non_unit());
        }
        Ok(self.pow_binomial(q))
    }

    fn pow_binomial(&self, q: &BigRational) -> Self {
        debug_assert!(self.constant_term().is_one());
        let u = self - &Self::one(self.rank(), self.bound());
        let mut result = Self::one(self.rank(), self.bound());
        let mut u_pow = Self::one(self.rank(), self.bound());
        for k in 1..=self.bound() {
            u_pow = &u_pow * &u;
            if u_pow.is_zero() {
                break;
            }
            result = &result + &u_pow.scale(&gen_binomial(q, k));
        }
        result
    }

    /// Multiplicative inverse; the constant term must be nonzero.
    pub fn inverse(&self) -> Result<Self> {
        let c0 = self.constant_term().clone();
        if c0.is_zero() {
            return Err(Error::NotInvertible("zero constant term".into()));
        }
        let inv_c0 = c0.recip();
        // self = c0 (1 + u)
        let neg_u = &Self::one(self.rank(), self.bound()) - &self.scale(&inv_c0);
        let mut result = Self::one(self.rank(), self.bound());
        let mut term = Self::one(self.rank(), self.bound());
        for _ in 1..=self.bound() {
            term = &term * &neg_u;
            if term.is_zero() {
                break;
            }
            result = &result + &term;
        }
        Ok(result.scale(&inv_c0))
    }

    /// Evaluates `self(args[0], ..., args[r-1])`.
    ///
    /// Every argument must have zero constant term and all arguments must share
    /// one rank and bound. The result is truncated at the smaller of that bound
    /// and the bound of `self`.
    pub fn substitute(&self, args: &[TruncatedSeries]) -> Result<Self> {
        if args.len() != self.rank() {
            return Err(Error::RankMismatch { left: self.rank(), right: args.len() });
        }
        let first = &args[0];
        for (index, arg) in args.iter().enumerate() {
            first.check_rank(arg)?;
            if arg.bound() != first.bound() {
                return Err(Error::BoundMismatch { left: first.bound(), right: arg.bound() });
            }
            if !arg.constant_term().is_zero() {
                return Err(Error::DivergentSubstitution { index });
            }
        }
        let bound = self.bound().min(first.bound());
        let out_rank = first.rank();
        let args: Vec<Self> = args.iter().map(|a| a.truncate(bound)).collect();

        let mut max_exp = vec![0u32; self.rank()];
        for (point, _) in self.terms() {
            if point.degree() > bound {
                break;
            }
            for (slot, &e) in max_exp.iter_mut().zip(point.as_slice()) {
                *slot = (*slot).max(e);
            }
        }
        let powers: Vec<Vec<Self>> = args
            .iter()
            .zip(&max_exp)
            .map(|(arg, &top)| {
                let mut pows = vec![Self::one(out_rank, bound)];
                for p in 1..=top as usize {
                    let next = &pows[p - 1] * arg;
                    pows.push(next);
                }
                pows
            })
            .collect();

        let mut result = Self::zero(out_rank, bound);
        for (point, c) in self.terms() {
            if point.degree() > bound {
                break;
            }
            let mut term: Option<Self> = None;
            for (k, &e) in point.as_slice().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                term = Some(match term {
                    None => powers[k][e as usize].clone(),
                    Some(t) => &t * &powers[k][e as usize],
                });
            }
            match term {
                None => result.coeffs[0] += c,
                Some(t) => result.add_scaled(&t, c),
            }
        }
        Ok(result)
    }

    fn add_scaled(&mut self, other: &Self, c: &BigRational) {
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            if !b.is_zero() {
                *a += b * c;
            }
        }
    }

    /// Compositional inverse of a univariate series `H = h_1 t + h_2 t^2 + ...`
    /// with `h_1 != 0`, solved one coefficient at a time.
    pub fn comp_inverse(&self) -> Result<Self> {
        if self.rank() != 1 {
            return Err(Error::NotUnivariate(self.rank()));
        }
        if !self.constant_term().is_zero() {
            return Err(Error::NotInvertible("compositional inverse needs zero constant term".into()));
        }
        let bound = self.bound();
        if bound == 0 {
            return Ok(Self::zero(1, 0));
        }
        let h1 = self.coeffs[1].clone();
        if h1.is_zero() {
            return Err(Error::NotInvertible("linear coefficient is zero".into()));
        }
        let mut g = Self::zero(1, bound);
        g.coeffs[1] = h1.recip();
        for n in 2..=bound {
            let composed = self.truncate(n).substitute(&[g.truncate(n)])?;
            let excess = composed.coeffs[n as usize].clone();
            g.coeffs[n as usize] -= excess / &h1;
        }
        Ok(g)
    }

    /// `log(self)` for a series with constant term 1.
    pub fn log(&self) -> Result<Self> {
        if !self.constant_term().is_one() {
            return Err(Error::NonUnitConstant {
                constant: format_rational(self.constant_term()),
                exponent: "log".into(),
            });
        }
        let u = self - &Self::one(self.rank(), self.bound());
        let mut result = Self::zero(self.rank(), self.bound());
        let mut u_pow = Self::one(self.rank(), self.bound());
        for k in 1..=self.bound() {
            u_pow = &u_pow * &u;
            if u_pow.is_zero() {
                break;
            }
            let sign = if k % 2 == 1 { 1 } else { -1 };
            result.add_scaled(&u_pow, &BigRational::new(sign.into(), k.into()));
        }
        Ok(result)
    }

    /// `exp(self)` for a series with zero constant term.
    pub fn exp(&self) -> Result<Self> {
        if !self.constant_term().is_zero() {
            return Err(Error::DivergentSubstitution { index: 0 });
        }
        let mut result = Self::one(self.rank(), self.bound());
        let mut term = Self::one(self.rank(), self.bound());
        for k in 1..=self.bound() {
            term = (&term * self).scale(&BigRational::new(1.into(), k.into()));
            if term.is_zero() {
                break;
            }
            result = &result + &term;
        }
        Ok(result)
    }

    /// `t_k d/dt_k`: multiplies the coefficient of `t^d` by `d_k`.
    pub fn euler_derivative(&self, k: usize) -> Self {
        let coeffs = self
            .basis
            .monomials
            .iter()
            .zip(&self.coeffs)
            .map(|(m, c)| c * BigRational::from_integer(m.get(k).into()))
            .collect();
        TruncatedSeries { basis: self.basis.clone(), coeffs }
    }

    /// Sparse records in graded-lex order, zeros omitted.
    pub fn to_records(&self) -> Vec<SeriesRecord> {
        self.terms()
            .map(|(point, c)| SeriesRecord {
                exponents: point.as_slice().to_vec(),
                coefficient: format_rational(c),
            })
            .collect()
    }

    pub fn from_records(rank: usize, bound: u32, records: &[SeriesRecord]) -> Result<Self> {
        let terms = records
            .iter()
            .map(|r| Ok((LatticePoint::new(r.exponents.clone()), parse_rational(&r.coefficient)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_terms(rank, bound, terms)
    }
}

/// Solves a family of equations `F = step(F)` in which the degree-`n` part
/// of `step(F)` only reads coefficients of `F` of degree below `n`.
///
/// The family is built up one total degree at a time, starting from the
/// constant series 1: at bound `k` the previous solution is padded with zeros
/// and pushed through `step` once.
pub fn solve_by_degree<S>(count: usize, rank: usize, bound: u32, mut step: S) -> Result<Vec<TruncatedSeries>>
where
    S: FnMut(&[TruncatedSeries]) -> Result<Vec<TruncatedSeries>>,
{
    let mut family = vec![TruncatedSeries::one(rank, 0); count];
    for k in 0..=bound {
        let padded: Vec<_> = family.iter().map(|f| f.pad_to(k)).collect();
        family = step(&padded)?;
    }
    Ok(family)
}

/// Dense truncated product over the basis of the result.
///
/// Both operands are scaled to integer vectors by the lcm of their
/// denominators, convolved over the integers (in `i128` while that does not
/// overflow) and divided back once per coefficient.
fn convolve(basis: &MonomialBasis, a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = basis.len();
    let (a, b) = (&a[..n], &b[..n]);
    if let (Some(sa), Some(sb)) = (small_integers(a), small_integers(b)) {
        if let Some(out) = convolve_i128(basis, &sa, &sb) {
            return out.into_iter().map(|c| BigRational::from_integer(c.into())).collect();
        }
    }
    let (da, ia) = to_scaled(a);
    let (db, ib) = to_scaled(b);
    let small = |v: &[BigInt]| v.iter().map(ToPrimitive::to_i64).collect::<Option<Vec<i64>>>();
    let acc: Vec<BigInt> = match (small(&ia), small(&ib)) {
        (Some(sa), Some(sb)) => convolve_i128(basis, &sa, &sb).map(|v| v.into_iter().map(BigInt::from).collect()),
        _ => None,
    }
    .unwrap_or_else(|| {
        let mut out = vec![BigInt::zero(); n];
        let nz_b: Vec<usize> = (0..n).filter(|&j| !ib[j].is_zero()).collect();
        for i in (0..n).filter(|&i| !ia[i].is_zero()) {
            let limit = basis.prefix(basis.bound - basis.degrees[i]);
            for &j in nz_b.iter().take_while(|&&j| j < limit) {
                let k = basis.product_index(i, j).expect("degree within bound");
                out[k] += &ia[i] * &ib[j];
            }
        }
        out
    });
    let denom = da * db;
    if denom.is_one() {
        acc.into_iter().map(BigRational::from_integer).collect()
    } else {
        acc.into_iter()
            .map(|c| BigRational::new(c, denom.clone()))
            .collect()
    }
}

fn small_integers(v: &[BigRational]) -> Option<Vec<i64>> {
    v.iter()
        .map(|c| if c.denom().is_one() { c.numer().to_i64() } else { None })
        .collect()
}

/// Integer convolution in `i128`; `None` on overflow.
fn convolve_i128(basis: &MonomialBasis, a: &[i64], b: &[i64]) -> Option<Vec<i128>> {
    let n = basis.len();
    let nz_b: Vec<usize> = (0..n).filter(|&j| b[j] != 0).collect();
    let mut out = vec![0i128; n];
    for i in (0..n).filter(|&i| a[i] != 0) {
        let limit = basis.prefix(basis.bound - basis.degrees[i]);
        for &j in nz_b.iter().take_while(|&&j| j < limit) {
            let k = basis.product_index(i, j).expect("degree within bound");
            out[k] = out[k].checked_add(a[i] as i128 * b[j] as i128)?;
        }
    }
    Some(out)
}

fn to_scaled(v: &[BigRational]) -> (BigInt, Vec<BigInt>) {
    let lcm = v
        .iter()
        .filter(|c| !c.is_zero())
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let scaled = v
        .iter()
        .map(|c| {
            if c.denom().is_one() {
                c.numer() * &lcm
            } else {
                c.numer() * (&lcm / c.denom())
            }
        })
        .collect();
    (lcm, scaled)
}

impl PartialEq for TruncatedSeries {
    /// Coefficientwise equality up to the smaller bound.
    fn eq(&self, other: &Self) -> bool {
        if self.rank() != other.rank() {
            return false;
        }
        let n = self.coeffs.len().min(other.coeffs.len());
        self.coeffs[..n] == other.coeffs[..n]
    }
}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[rank {}, bound {}] ", self.rank(), self.bound())?;
        let mut first = true;
        for (point, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({})*t^{:?}", format_rational(c), point)?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl<'a> Add<&'a TruncatedSeries> for &'a TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, other: &TruncatedSeries) -> TruncatedSeries {
        self.zip_with(other, |a, b| a + b)
    }
}

impl<'a> Sub<&'a TruncatedSeries> for &'a TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, other: &TruncatedSeries) -> TruncatedSeries {
        self.zip_with(other, |a, b| a - b)
    }
}

impl<'a> Mul<&'a TruncatedSeries> for &'a TruncatedSeries {
    type Output = TruncatedSeries;
    /// Panics on rank mismatch; use [`TruncatedSeries::checked_mul`] for a
    /// fallible product.
    fn mul(self, other: &TruncatedSeries) -> TruncatedSeries {
        self.checked_mul(other).expect("series of different rank")
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        TruncatedSeries {
            basis: self.basis.clone(),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}
