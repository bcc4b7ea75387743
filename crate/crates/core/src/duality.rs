//! Duality between Euler products and functional equations.
//!
//! A unit series `F` in one variable can be written uniquely as
//!
//! ```text
//! F = ∏_i (1 − ((−1)^N t)^i)^{−i a_i}      (Euler product form)
//! F = ∏_i (1 − (t F^N)^i)^{i b_i}          (functional equation form)
//! ```
//!
//! with rational `a_i`, `b_i`. The `a_i` are all integers exactly when the
//! `b_i` are, and for `N ≠ 0` they are given by a Möbius inversion formula
//! over partitions.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::{binomial, divisors, moebius, partitions_of};
use crate::rational::{format_rational, int, sign_pow};
use crate::series::solve_by_degree;
use crate::{Error, LatticePoint, Result, TruncatedSeries};

/// `∏_i (1 − ((−1)^N t)^i)^{−i a_i}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EulerProductForm {
    pub n: i64,
    pub exponents: BTreeMap<u32, BigRational>,
}

/// `F = ∏_i (1 − (t F^N)^i)^{i b_i}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuncEqForm {
    pub n: i64,
    pub exponents: BTreeMap<u32, BigRational>,
}

fn exponent(map: &BTreeMap<u32, BigRational>, i: u32) -> BigRational {
    map.get(&i).cloned().unwrap_or_else(BigRational::zero)
}

impl EulerProductForm {
    pub fn new(n: i64, exponents: BTreeMap<u32, BigRational>) -> Self {
        EulerProductForm { n, exponents: drop_zeros(exponents) }
    }

    pub fn a(&self, i: u32) -> BigRational {
        exponent(&self.exponents, i)
    }
}

impl FuncEqForm {
    pub fn new(n: i64, exponents: BTreeMap<u32, BigRational>) -> Self {
        FuncEqForm { n, exponents: drop_zeros(exponents) }
    }

    pub fn from_integers(n: i64, exponents: &[(u32, i64)]) -> Self {
        Self::new(n, exponents.iter().map(|&(i, b)| (i, int(b))).collect())
    }

    pub fn b(&self, i: u32) -> BigRational {
        exponent(&self.exponents, i)
    }
}

fn drop_zeros(map: BTreeMap<u32, BigRational>) -> BTreeMap<u32, BigRational> {
    map.into_iter().filter(|(i, v)| *i > 0 && !v.is_zero()).collect()
}

fn check_unit_univariate(f: &TruncatedSeries) -> Result<()> {
    if f.rank() != 1 {
        return Err(Error::NotUnivariate(f.rank()));
    }
    if !f.constant_term().is_one() {
        return Err(Error::NonUnitConstant {
            constant: format_rational(f.constant_term()),
            exponent: "factorization".into(),
        });
    }
    Ok(())
}

/// `1 − u^i`.
fn one_minus_power(u: &TruncatedSeries, i: u32) -> Result<TruncatedSeries> {
    let one = TruncatedSeries::one(1, u.bound());
    Ok(&one - &u.pow_int(i64::from(i))?)
}

/// `t F^N`.
fn t_times_power(f: &TruncatedSeries, n: i64) -> Result<TruncatedSeries> {
    Ok(f.pow_int(n)?.shift(&LatticePoint::unit(1, 0)))
}

/// The unique unit series with `F = ∏_i (1 − (t F^N)^i)^{i b_i}` up to `bound`.
pub fn funceq_solve(form: &FuncEqForm, bound: u32) -> Result<TruncatedSeries> {
    let mut family = solve_by_degree(1, 1, bound, |f| {
        let u = t_times_power(&f[0], form.n)?;
        let mut product = TruncatedSeries::one(1, f[0].bound());
        for (&i, b) in form.exponents.range(..=f[0].bound().max(1)) {
            let e = BigRational::from_integer(i.into()) * b;
            product = &product * &one_minus_power(&u, i)?.pow_rational(&e)?;
        }
        Ok(vec![product])
    })?;
    Ok(family.remove(0))
}

/// Peels the `b_i` off a unit series: with the factors `j < i` divided out,
/// the `t^i` coefficient of the rest is `−i b_i`.
pub fn funceq_extract(f: &TruncatedSeries, n: i64) -> Result<FuncEqForm> {
    check_unit_univariate(f)?;
    let u = t_times_power(f, n)?;
    let mut residual = f.clone();
    let mut exponents = BTreeMap::new();
    for i in 1..=f.bound() {
        let b = -residual.coeff_at(&[i]) / BigRational::from_integer(i.into());
        if !b.is_zero() {
            let e = -BigRational::from_integer(i.into()) * &b;
            residual = &residual * &one_minus_power(&u, i)?.pow_rational(&e)?;
            exponents.insert(i, b);
        }
    }
    Ok(FuncEqForm { n, exponents })
}

/// `∏_{i ≤ bound} (1 − ((−1)^N t)^i)^{−i a_i}`.
pub fn euler_expand(form: &EulerProductForm, bound: u32) -> Result<TruncatedSeries> {
    let st = TruncatedSeries::univariate(bound, &[int(0), int(sign_pow(form.n))]);
    let mut product = TruncatedSeries::one(1, bound);
    for (&i, a) in form.exponents.range(..=bound) {
        let e = -BigRational::from_integer(i.into()) * a;
        product = &product * &one_minus_power(&st, i)?.pow_rational(&e)?;
    }
    Ok(product)
}

/// Peels the `a_i` off a unit series: with the factors `j < i` divided out,
/// the `t^i` coefficient of the rest is `i a_i (−1)^{N i}`.
pub fn euler_factorize(f: &TruncatedSeries, n: i64) -> Result<EulerProductForm> {
    check_unit_univariate(f)?;
    let st = TruncatedSeries::univariate(f.bound(), &[int(0), int(sign_pow(n))]);
    let mut residual = f.clone();
    let mut exponents = BTreeMap::new();
    for i in 1..=f.bound() {
        let a = residual.coeff_at(&[i]) * int(sign_pow(n * i64::from(i))) / BigRational::from_integer(i.into());
        if !a.is_zero() {
            let e = BigRational::from_integer(i.into()) * &a;
            residual = &residual * &one_minus_power(&st, i)?.pow_rational(&e)?;
            exponents.insert(i, a);
        }
    }
    Ok(EulerProductForm { n, exponents })
}

/// `a_d` by the closed formula
///
/// ```text
/// d² a_d = (1/N) Σ_{e | d} μ(d/e) (−1)^{N e} Σ_{λ ⊢ e} (−1)^{λ_1} ∏_i binom(N i b_i e, λ_i − λ_{i+1})
/// ```
///
/// which needs `N ≠ 0`; use [`euler_factorize`] on [`funceq_solve`] otherwise.
pub fn duality_moebius(form: &FuncEqForm, d: u32) -> Result<BigRational> {
    if form.n == 0 {
        return Err(Error::Domain(
            "the Möbius formula divides by N; for N = 0 factorize the solved series instead".into(),
        ));
    }
    if d == 0 {
        return Err(Error::Domain("a_d is indexed by d >= 1".into()));
    }
    let n = BigRational::from_integer(form.n.into());
    let mut total = BigRational::zero();
    for e in divisors(u64::from(d)) {
        let mu = moebius(u64::from(d) / e)?;
        if mu == 0 {
            continue;
        }
        let e32 = e as u32;
        let mut inner = BigRational::zero();
        for lam in partitions_of(e32) {
            let mut term = BigRational::from_integer(sign_pow(i64::from(lam.parts()[0])).into());
            for (idx, &c) in lam.differences().iter().enumerate() {
                if c == 0 {
                    continue;
                }
                let i = idx as u32 + 1;
                let top = &n * BigRational::from_integer((i64::from(i) * e as i64).into()) * form.b(i);
                term *= generalized(&top, c);
                if term.is_zero() {
                    break;
                }
            }
            inner += term;
        }
        total += inner * int(i64::from(mu) * sign_pow(form.n * e as i64));
    }
    Ok(total / (n * BigRational::from_integer((u64::from(d) * u64::from(d)).into())))
}

/// Binomial with a rational top entry, integer fast path.
fn generalized(top: &BigRational, k: u32) -> BigRational {
    if top.is_integer() {
        BigRational::from_integer(binomial(&top.to_integer(), u64::from(k)))
    } else {
        crate::arith::gen_binomial(top, k)
    }
}

/// Both sides of `(k+d) [t^d] F^k = k [t^d] G^{k+d}` where `F = G(tF)`,
/// computed independently, and whether they agree.
pub fn lagrange_verify(g: &TruncatedSeries, k: i64, d: u32) -> Result<(BigRational, BigRational, bool)> {
    if g.rank() != 1 {
        return Err(Error::NotUnivariate(g.rank()));
    }
    if g.constant_term().is_zero() {
        return Err(Error::NotInvertible("G needs a nonzero constant term".into()));
    }
    if g.bound() < d {
        return Err(Error::BoundMismatch { left: d, right: g.bound() });
    }
    let g = g.truncate(d);
    let f = fixed_point(&g, d)?;
    let lhs = BigRational::from_integer((k + i64::from(d)).into()) * f.pow_int(k)?.coeff_at(&[d]);
    let rhs = BigRational::from_integer(k.into()) * g.pow_int(k + i64::from(d))?.coeff_at(&[d]);
    let pass = lhs == rhs;
    Ok((lhs, rhs, pass))
}

/// `F = G(tF)` by plain iteration from `F = G(0)`; each pass fixes one more
/// coefficient.
fn fixed_point(g: &TruncatedSeries, d: u32) -> Result<TruncatedSeries> {
    let mut f = TruncatedSeries::constant(1, d, g.constant_term().clone());
    for _ in 0..d {
        f = g.substitute(&[f.shift(&LatticePoint::unit(1, 0))])?;
    }
    Ok(f)
}

/// The `a_i` of a functional equation form with integrality flags.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntegralityReport {
    #[serde(rename = "N")]
    pub n: i64,
    pub a: Vec<IntegralityEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntegralityEntry {
    pub i: u32,
    pub value: String,
    pub integral: bool,
}

impl IntegralityReport {
    pub fn first_non_integral(&self) -> Option<u32> {
        self.a.iter().find(|e| !e.integral).map(|e| e.i)
    }
}

pub fn integrality_report(form: &FuncEqForm, bound: u32) -> Result<IntegralityReport> {
    let f = funceq_solve(form, bound)?;
    let euler = euler_factorize(&f, form.n)?;
    let a = (1..=bound)
        .map(|i| {
            let v = euler.a(i);
            IntegralityEntry { i, integral: v.is_integer(), value: format_rational(&v) }
        })
        .collect();
    Ok(IntegralityReport { n: form.n, a })
}

/// The same report computed term by term with [`duality_moebius`].
pub fn moebius_report(form: &FuncEqForm, bound: u32) -> Result<IntegralityReport> {
    let a = (1..=bound)
        .map(|i| {
            let v = duality_moebius(form, i)?;
            Ok(IntegralityEntry { i, integral: v.is_integer(), value: format_rational(&v) })
        })
        .collect::<Result<_>>()?;
    Ok(IntegralityReport { n: form.n, a })
}

/// Integer values of a map of rationals, if they all are integers.
pub fn integral_values(map: &BTreeMap<u32, BigRational>) -> Option<BTreeMap<u32, BigInt>> {
    map.iter()
        .map(|(&i, v)| v.is_integer().then(|| (i, v.to_integer())))
        .collect()
}
