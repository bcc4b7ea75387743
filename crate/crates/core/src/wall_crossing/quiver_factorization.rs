//! Slope factorization `T_{i_1} ∘ ... ∘ T_{i_r} = ∏^← T_μ` for an acyclic
//! quiver, with `T_μ(x^d) = x^d ∏_i (Q^i_μ)^{{i,d}}`.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{t_i_automorphism, PoissonAutomorphism};
use crate::rational::format_rational;
use crate::series::points_of_degree;
use crate::{Error, Quiver, Result, Stability, TruncatedSeries};

/// The series `Q^i_μ`, one family per slope value reached up to the bound.
#[derive(Debug, Clone)]
pub struct QuiverFactorization {
    skew: Vec<Vec<i64>>,
    bound: u32,
    slopes: BTreeMap<BigRational, Vec<TruncatedSeries>>,
}

impl QuiverFactorization {
    pub fn slopes(&self) -> &BTreeMap<BigRational, Vec<TruncatedSeries>> {
        &self.slopes
    }

    /// `Q^i_μ`.
    pub fn series(&self, mu: &BigRational, i: usize) -> Option<&TruncatedSeries> {
        self.slopes.get(mu).map(|family| &family[i])
    }

    /// `T_μ`, acting by `x_j ↦ x_j ∏_i (Q^i_μ)^{{i,j}}`.
    pub fn automorphism(&self, mu: &BigRational) -> Result<PoissonAutomorphism> {
        let family = self
            .slopes
            .get(mu)
            .ok_or_else(|| Error::Domain(format!("no slope {}", format_rational(mu))))?;
        slope_automorphism(&self.skew, family, self.bound)
    }

    /// `∏^← T_μ` over decreasing `μ`.
    pub fn ordered_product(&self) -> Result<PoissonAutomorphism> {
        let rank = self.skew.len();
        let mut product = PoissonAutomorphism::identity(rank, self.bound);
        for family in self.slopes.values().rev() {
            product = product.compose(&slope_automorphism(&self.skew, family, self.bound)?)?;
        }
        Ok(product)
    }
}

fn slope_automorphism(skew: &[Vec<i64>], family: &[TruncatedSeries], bound: u32) -> Result<PoissonAutomorphism> {
    let rank = skew.len();
    let multipliers = (0..rank)
        .map(|j| {
            let mut u = TruncatedSeries::one(rank, bound);
            for (i, q) in family.iter().enumerate() {
                if skew[i][j] != 0 {
                    u = &u * &q.truncate(bound).pow_int(skew[i][j])?;
                }
            }
            Ok(u)
        })
        .collect::<Result<Vec<_>>>()?;
    PoissonAutomorphism::new(multipliers)
}

/// `T_{i_1} ∘ ... ∘ T_{i_r}` with sinks first.
pub fn vertex_product(q: &Quiver, bound: u32) -> Result<PoissonAutomorphism> {
    let mut product = PoissonAutomorphism::identity(q.rank(), bound);
    for i in q.sink_first_order()? {
        product = product.compose(&t_i_automorphism(q, i, bound)?)?;
    }
    Ok(product)
}

/// Solves for the `Q^i_μ` by increasing total degree.
///
/// A coefficient `q_i` of `Q^i_μ` at `x^d`, `|d| = n`, changes the degree-`n`
/// multiplier coefficients at `x^d` by `Σ_i {i,j} q_i` and nothing else up to
/// degree `n`. Where the skew form is degenerate the system has free
/// variables, which are set to zero; the equations must still be consistent.
pub fn quiver_factorize(q: &Quiver, theta: &Stability, bound: u32) -> Result<QuiverFactorization> {
    if theta.rank() != q.rank() {
        return Err(Error::RankMismatch { left: q.rank(), right: theta.rank() });
    }
    let rank = q.rank();
    let skew = q.skew_matrix();
    let target = vertex_product(q, bound)?;

    let mut slopes: BTreeMap<BigRational, Vec<TruncatedSeries>> = BTreeMap::new();
    for n in 1..=bound {
        for d in points_of_degree(rank, n) {
            slopes
                .entry(theta.slope(&d)?)
                .or_insert_with(|| vec![TruncatedSeries::one(rank, bound); rank]);
        }
    }

    // M[j][i] = {i,j}
    let matrix: Vec<Vec<BigRational>> = (0..rank)
        .map(|j| (0..rank).map(|i| BigRational::from_integer(skew[i][j].into())).collect())
        .collect();

    for n in 1..=bound {
        let partial = QuiverFactorization { skew: skew.clone(), bound: n, slopes: slopes.clone() };
        let product = partial.ordered_product()?;
        for d in points_of_degree(rank, n) {
            let rhs: Vec<BigRational> = (0..rank)
                .map(|j| target.multiplier(j).coeff(&d) - product.multiplier(j).coeff(&d))
                .collect();
            let solution = solve_linear(&matrix, &rhs).ok_or_else(|| {
                Error::Factorization(format!("inconsistent equations at {d:?}"))
            })?;
            let family = slopes.get_mut(&theta.slope(&d)?).expect("slope registered");
            for (series, value) in family.iter_mut().zip(solution) {
                if !value.is_zero() {
                    let term = TruncatedSeries::monomial(bound, &d, value);
                    *series = &*series + &term;
                }
            }
        }
    }

    let result = QuiverFactorization { skew, bound, slopes };
    if result.ordered_product()? != target {
        return Err(Error::Factorization("slope product does not reproduce the vertex product".into()));
    }
    Ok(result)
}

/// Exact Gaussian elimination; free variables are set to zero. `None` if
/// the system is inconsistent.
fn solve_linear(matrix: &[Vec<BigRational>], rhs: &[BigRational]) -> Option<Vec<BigRational>> {
    let rows = matrix.len();
    let cols = matrix.first().map_or(0, Vec::len);
    let mut aug: Vec<Vec<BigRational>> = matrix
        .iter()
        .zip(rhs)
        .map(|(row, r)| row.iter().cloned().chain(std::iter::once(r.clone())).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..rows).find(|&r| !aug[r][col].is_zero()) else {
            continue;
        };
        aug.swap(row, p);
        let inv = aug[row][col].recip();
        for v in aug[row].iter_mut() {
            *v *= &inv;
        }
        for r in 0..rows {
            if r != row && !aug[r][col].is_zero() {
                let factor = aug[r][col].clone();
                for c in col..=cols {
                    let delta = &aug[row][c] * &factor;
                    aug[r][c] -= delta;
                }
            }
        }
        pivots.push((row, col));
        row += 1;
    }
    if aug[row..].iter().any(|r| !r[cols].is_zero()) {
        return None;
    }
    let mut x = vec![BigRational::zero(); cols];
    for (r, c) in pivots {
        x[c] = aug[r][cols].clone();
    }
    Some(x)
}

/// Whether every series of a family is the constant 1.
pub fn is_unit_family(family: &[TruncatedSeries]) -> bool {
    family.iter().all(|s| s.terms().all(|(d, c)| d.is_zero() && c.is_one()))
}
