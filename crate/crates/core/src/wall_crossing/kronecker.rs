//! Donaldson-Thomas invariants `d(a,b,m)` of the Kronecker quivers `K_m`,
//! defined by
//!
//! ```text
//! T_{1,0} T_{0,1} = ∏^←_{b/(a+b) decreasing} (T_{a,b})^{d(a,b,m)}
//! ```
//!
//! in the coordinates `x`, `y` with `{x,y} = mxy`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use super::{t_ab_automorphism, t_abf_automorphism, PoissonAutomorphism};
use crate::arith::{binomial, divisors, moebius};
use crate::duality::{euler_expand, funceq_extract, EulerProductForm};
use crate::rational::{format_rational, int, sign_pow};
use crate::{Error, LatticePoint, Result, TruncatedSeries};

/// The exponents `d(a,b,m)` for `1 ≤ a+b ≤ bound`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DtTable {
    m: u32,
    bound: u32,
    entries: BTreeMap<(u32, u32), BigRational>,
}

/// JSON form of a table, optionally with extracted stable Euler
/// characteristics.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DtTableJson {
    pub m: u32,
    pub max_total_degree: u32,
    pub invariants: Vec<InvariantJson>,
    pub stable_chi: Vec<StableChiJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvariantJson {
    pub a: u32,
    pub b: u32,
    pub d: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StableChiJson {
    pub ray: [u32; 2],
    pub k: u32,
    pub chi: String,
}

/// `χ(M^st_{(ka,kb)}(K_m))` along one primitive ray.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StableChi {
    pub ray: (u32, u32),
    pub chi: BTreeMap<u32, BigInt>,
}

impl DtTable {
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    pub fn get(&self, a: u32, b: u32) -> BigRational {
        self.entries.get(&(a, b)).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Pairs in graded-lex order: by `a+b`, then by decreasing `a`.
    pub fn entries(&self) -> impl Iterator<Item = ((u32, u32), &BigRational)> {
        let mut keys: Vec<_> = self.entries.keys().copied().collect();
        keys.sort_by_key(|&(a, b)| LatticePoint::new(vec![a, b]));
        keys.into_iter().map(move |k| (k, &self.entries[&k]))
    }

    pub fn first_non_integral(&self) -> Option<(u32, u32)> {
        self.entries().find(|(_, d)| !d.is_integer()).map(|(k, _)| k)
    }

    /// `T_{ka,kb}^{d}` for every nonzero entry.
    pub fn factors(&self) -> Result<Vec<PoissonAutomorphism>> {
        self.entries()
            .filter(|(_, d)| !d.is_zero())
            .map(|((a, b), d)| {
                let mut exps = BTreeMap::new();
                exps.insert(1, d.clone());
                ray_factor(self.m, a, b, &exps, self.bound)
            })
            .collect()
    }

    /// The slope-ordered product of all factors.
    pub fn ordered_product(&self) -> Result<PoissonAutomorphism> {
        ordered_product(self.m, &self.entries, self.bound)
    }

    pub fn to_json(&self, stable: &[StableChi]) -> DtTableJson {
        DtTableJson {
            m: self.m,
            max_total_degree: self.bound,
            invariants: self
                .entries()
                .map(|((a, b), d)| InvariantJson { a, b, d: format_rational(d) })
                .collect(),
            stable_chi: stable
                .iter()
                .flat_map(|s| {
                    s.chi.iter().map(move |(&k, c)| StableChiJson {
                        ray: [s.ray.0, s.ray.1],
                        k,
                        chi: c.to_string(),
                    })
                })
                .collect(),
        }
    }
}

/// `∏_k (T_{ka,kb})^{d_k}` for the primitive ray through `(a, b)`, as the
/// single automorphism `T_{a,b,F}` with `F = ∏_k (1 − ((−1)^{mab} t)^k)^{k d_k}`.
pub fn ray_factor(
    m: u32,
    a: u32,
    b: u32,
    exponents: &BTreeMap<u32, BigRational>,
    bound: u32,
) -> Result<PoissonAutomorphism> {
    let n = i64::from(m) * i64::from(a) * i64::from(b);
    // (1 − ((−1)^n t)^k)^{k d_k} is the Euler product factor with N = n and a_k = −d_k
    let form = EulerProductForm::new(n, exponents.iter().map(|(&k, d)| (k, -d.clone())).collect());
    let f = euler_expand(&form, bound / (a + b))?;
    t_abf_automorphism(m, a, b, &f, bound)
}

fn slope_key(a: u32, b: u32) -> BigRational {
    BigRational::new(b.into(), (a + b).into())
}

/// A primitive ray with the exponents `d(ka,kb)` keyed by `k`.
type Ray = ((u32, u32), BTreeMap<u32, BigRational>);

/// Entries grouped by primitive ray, rays ordered by decreasing slope.
fn rays(entries: &BTreeMap<(u32, u32), BigRational>) -> Vec<Ray> {
    let mut grouped: BTreeMap<(u32, u32), BTreeMap<u32, BigRational>> = BTreeMap::new();
    for (&(a, b), d) in entries {
        if d.is_zero() {
            continue;
        }
        let g = a.gcd(&b);
        grouped.entry((a / g, b / g)).or_default().insert(g, d.clone());
    }
    let mut rays: Vec<_> = grouped.into_iter().collect();
    rays.sort_by_key(|((a, b), _)| std::cmp::Reverse(slope_key(*a, *b)));
    rays
}

fn ordered_product(m: u32, entries: &BTreeMap<(u32, u32), BigRational>, bound: u32) -> Result<PoissonAutomorphism> {
    let mut product = PoissonAutomorphism::identity(2, bound);
    for ((a, b), exps) in rays(entries) {
        product = product.compose(&ray_factor(m, a, b, &exps, bound)?)?;
    }
    Ok(product)
}

/// `T_{1,0} ∘ T_{0,1}`.
pub fn kronecker_target(m: u32, bound: u32) -> Result<PoissonAutomorphism> {
    t_ab_automorphism(m, 1, 0, bound)?.compose(&t_ab_automorphism(m, 0, 1, bound)?)
}

/// Solves for `d(a,b,m)`, `a+b ≤ bound`, one total degree at a time.
///
/// At level `n` the ordered product of the known factors is compared with
/// `T_{1,0} T_{0,1}`. A factor `T_{a,b}^d` with `a+b = n` changes the
/// `x^a y^b` coefficients of the two multipliers by `mbsd` and `−masd`,
/// `s = (−1)^{mab}`, and nothing else up to degree `n`; both readings are
/// used where available and must agree.
pub fn kronecker_factorize(m: u32, bound: u32) -> Result<DtTable> {
    if m == 0 {
        return Err(Error::Domain("the Kronecker quiver needs m >= 1".into()));
    }
    let target = kronecker_target(m, bound)?;
    let mut entries = BTreeMap::new();
    let mi = i64::from(m);
    for n in 1..=bound {
        let product = ordered_product(m, &entries, n)?;
        let gap = |k: usize, a: u32, b: u32| {
            let p = [a, b];
            target.multiplier(k).coeff_at(&p) - product.multiplier(k).coeff_at(&p)
        };
        for a in (0..=n).rev() {
            let b = n - a;
            let s = sign_pow(mi * i64::from(a) * i64::from(b));
            let (dx, dy) = (gap(0, a, b), gap(1, a, b));
            let from_x = (b > 0).then(|| &dx / int(mi * i64::from(b) * s));
            let from_y = (a > 0).then(|| -&dy / int(mi * i64::from(a) * s));
            let fail = |what: String| Error::Factorization(format!("({a},{b}), m = {m}: {what}"));
            let d = match (from_x, from_y) {
                (Some(x), Some(y)) if x != y => {
                    return Err(fail(format!(
                        "x-image gives {} but y-image gives {}",
                        format_rational(&x),
                        format_rational(&y)
                    )))
                }
                (Some(x), _) => x,
                (None, Some(y)) => y,
                (None, None) => unreachable!("a + b >= 1"),
            };
            if b == 0 && !dx.is_zero() {
                return Err(fail("x-image has a residual on the x-axis".into()));
            }
            if a == 0 && !dy.is_zero() {
                return Err(fail("y-image has a residual on the y-axis".into()));
            }
            entries.insert((a, b), d);
        }
    }
    let table = DtTable { m, bound, entries };
    if table.ordered_product()? != target {
        return Err(Error::Factorization("ordered product does not reproduce T_{1,0} T_{0,1}".into()));
    }
    Ok(table)
}

/// `d(k,k,m) = 1/((m−2)k²) Σ_{i|k} μ(k/i) (−1)^{mi+1} binom((m−1)² i − 1, i)`
/// for `m ≥ 3`.
pub fn diagonal_closed_form(m: u32, k: u32) -> Result<BigRational> {
    if m <= 2 {
        return Err(Error::Domain("the diagonal formula needs m >= 3".into()));
    }
    if k == 0 {
        return Err(Error::Domain("k must be positive".into()));
    }
    let m = i64::from(m);
    let mut sum = BigInt::zero();
    for i in divisors(u64::from(k)) {
        let mu = moebius(u64::from(k) / i)?;
        if mu == 0 {
            continue;
        }
        let i = i as i64;
        let top = BigInt::from((m - 1) * (m - 1) * i - 1);
        sum += binomial(&top, i as u64) * (i64::from(mu) * sign_pow(m * i + 1));
    }
    Ok(BigRational::new(sum, BigInt::from((m - 2) * i64::from(k) * i64::from(k))))
}

/// `χ_μ(k) = χ(M^st_{(ka,kb)}(K_m))` for `k(a+b) ≤ bound`.
pub fn kronecker_stable_chi(m: u32, ray: (u32, u32), bound: u32) -> Result<BTreeMap<u32, BigInt>> {
    let table = kronecker_factorize(m, bound)?;
    Ok(stable_chi_from_table(&table, ray)?.chi)
}

/// Reads `χ_μ(k)` off a computed table.
///
/// The exponents along the ray give `G_μ = ∏_k (1 − ((−1)^N t)^k)^{k d(ka,kb)}`
/// with `N = mab − a² − b²`, and `G_μ` solves
/// `G = ∏_k (1 − (t G^N)^k)^{−k χ_μ(k)}`. For `N = 0` both products are in
/// the same variable and `χ_μ(k) = −d(ka,kb)`.
pub fn stable_chi_from_table(table: &DtTable, ray: (u32, u32)) -> Result<StableChi> {
    let (a, b) = ray;
    if a.gcd(&b) != 1 {
        return Err(Error::Domain(format!("({a},{b}) is not primitive")));
    }
    let m = i64::from(table.m);
    let n = m * i64::from(a) * i64::from(b) - i64::from(a * a) - i64::from(b * b);
    let top = table.bound / (a + b);
    let d: BTreeMap<u32, BigRational> = (1..=top).map(|k| (k, table.get(k * a, k * b))).collect();
    let chi_rational: BTreeMap<u32, BigRational> = if n == 0 {
        d.iter().map(|(&k, v)| (k, -v.clone())).collect()
    } else {
        let g = euler_expand(&EulerProductForm::new(n, d.iter().map(|(&k, v)| (k, -v.clone())).collect()), top)?;
        let form = funceq_extract(&g, n)?;
        (1..=top).map(|k| (k, -form.b(k))).collect()
    };
    let mut chi = BTreeMap::new();
    for (k, v) in chi_rational {
        if !v.is_integer() {
            return Err(Error::NonIntegral {
                location: format!("chi of ({},{})", k * a, k * b),
                value: format_rational(&v),
            });
        }
        chi.insert(k, v.to_integer());
    }
    Ok(StableChi { ray, chi })
}

/// `G_μ` in the variable `t = t^{(a,b)}` built from the table exponents.
pub fn ray_series(table: &DtTable, ray: (u32, u32)) -> Result<TruncatedSeries> {
    let (a, b) = ray;
    let m = i64::from(table.m);
    let n = m * i64::from(a) * i64::from(b) - i64::from(a * a) - i64::from(b * b);
    let top = table.bound / (a + b);
    let exps = (1..=top).map(|k| (k, -table.get(k * a, k * b))).collect();
    euler_expand(&EulerProductForm::new(n, exps), top)
}

/// Whether every entry is an integer.
pub fn is_integral(table: &DtTable) -> bool {
    table.entries.values().all(|d| d.is_integer())
}

/// Primitive `(a, b)` with `1 ≤ a+b ≤ bound`, in graded-lex order.
pub fn primitive_rays(bound: u32) -> Vec<(u32, u32)> {
    (1..=bound)
        .flat_map(|s| (0..=s).rev().map(move |a| (a, s - a)))
        .filter(|&(a, b)| a.gcd(&b) == 1)
        .collect()
}

/// `χ_μ` along every primitive ray the table reaches.
pub fn stable_chi_all(table: &DtTable) -> Result<Vec<StableChi>> {
    primitive_rays(table.bound).into_iter().map(|ray| stable_chi_from_table(table, ray)).collect()
}

/// A diagonal entry of a table next to the closed form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagonalEntry {
    pub k: u32,
    pub table: BigRational,
    pub closed_form: BigRational,
}

impl DiagonalEntry {
    pub fn agrees(&self) -> bool {
        self.table == self.closed_form
    }
}

/// Compares `d(k,k,m)` with [`diagonal_closed_form`] for `2k ≤ bound`.
pub fn diagonal_check(table: &DtTable) -> Result<Vec<DiagonalEntry>> {
    (1..=table.bound / 2)
        .map(|k| {
            Ok(DiagonalEntry { k, table: table.get(k, k), closed_form: diagonal_closed_form(table.m, k)? })
        })
        .collect()
}
