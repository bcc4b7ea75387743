//! Poisson automorphisms of formal power series rings and wall-crossing
//! factorizations.
//!
//! An automorphism acts by `x_i ↦ x_i u_i(x)` with unit series `u_i`.
//! Composition follows function composition, `(S∘T)(f) = S(T(f))`, so
//!
//! ```text
//! (S∘T)(x_i) = x_i u_i^S(x) · u_i^T(x_1 u_1^S(x), ..., x_r u_r^S(x)).
//! ```
//!
//! Ordered products `∏^←` are written left to right in decreasing slope. With
//! this convention the pentagon identity reads
//! `T_{1,0} T_{0,1} = T_{0,1} T_{1,1} T_{1,0}` with every exponent `+1`;
//! reversing the composition convention would reverse the product order.

mod kronecker;
mod quiver_factorization;

pub use kronecker::{
    diagonal_check, diagonal_closed_form, is_integral, kronecker_factorize, kronecker_stable_chi, kronecker_target,
    primitive_rays, ray_factor, ray_series, stable_chi_all, stable_chi_from_table, DiagonalEntry, DtTable,
    DtTableJson, InvariantJson, StableChi, StableChiJson,
};
pub use quiver_factorization::{is_unit_family, quiver_factorize, vertex_product, QuiverFactorization};

use num_rational::BigRational;
use num_traits::One;

use crate::rational::{int, sign_pow};
use crate::{Error, LatticePoint, Quiver, Result, TruncatedSeries};

/// Formal automorphism `x_i ↦ x_i u_i(x)`, truncated at a total degree.
#[derive(Clone, PartialEq)]
pub struct PoissonAutomorphism {
    multipliers: Vec<TruncatedSeries>,
}

impl std::fmt::Debug for PoissonAutomorphism {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(&self.multipliers).finish()
    }
}

impl PoissonAutomorphism {
    pub fn identity(rank: usize, bound: u32) -> Self {
        PoissonAutomorphism { multipliers: vec![TruncatedSeries::one(rank, bound); rank] }
    }

    /// Every multiplier must have constant term 1 and share rank and bound.
    pub fn new(multipliers: Vec<TruncatedSeries>) -> Result<Self> {
        let rank = multipliers.len();
        let bound = multipliers.first().map_or(0, TruncatedSeries::bound);
        for u in &multipliers {
            if u.rank() != rank {
                return Err(Error::RankMismatch { left: rank, right: u.rank() });
            }
            if u.bound() != bound {
                return Err(Error::BoundMismatch { left: bound, right: u.bound() });
            }
            if !u.constant_term().is_one() {
                return Err(Error::Invalid("multipliers must have constant term 1".into()));
            }
        }
        Ok(PoissonAutomorphism { multipliers })
    }

    pub fn rank(&self) -> usize {
        self.multipliers.len()
    }

    pub fn bound(&self) -> u32 {
        self.multipliers[0].bound()
    }

    pub fn multiplier(&self, i: usize) -> &TruncatedSeries {
        &self.multipliers[i]
    }

    pub fn multipliers(&self) -> &[TruncatedSeries] {
        &self.multipliers
    }

    /// The images `x_i u_i(x)`.
    pub fn images(&self) -> Vec<TruncatedSeries> {
        let rank = self.rank();
        self.multipliers
            .iter()
            .enumerate()
            .map(|(i, u)| u.shift(&LatticePoint::unit(rank, i)))
            .collect()
    }

    /// `T(f) = f(x_1 u_1, ..., x_r u_r)`.
    pub fn apply(&self, f: &TruncatedSeries) -> Result<TruncatedSeries> {
        f.substitute(&self.images())
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.rank() != other.rank() {
            return Err(Error::RankMismatch { left: self.rank(), right: other.rank() });
        }
        if self.bound() != other.bound() {
            return Err(Error::BoundMismatch { left: self.bound(), right: other.bound() });
        }
        let images = self.images();
        let multipliers = self
            .multipliers
            .iter()
            .zip(&other.multipliers)
            .map(|(us, ut)| Ok(us * &ut.substitute(&images)?))
            .collect::<Result<Vec<_>>>()?;
        Ok(PoissonAutomorphism { multipliers })
    }

    /// `T^n` for any integer `n`.
    pub fn pow(&self, n: i64) -> Result<Self> {
        let base = if n < 0 { self.inverse()? } else { self.clone() };
        let mut result = Self::identity(self.rank(), self.bound());
        for _ in 0..n.unsigned_abs() {
            result = result.compose(&base)?;
        }
        Ok(result)
    }

    /// Inverse automorphism, by fixed-point iteration on
    /// `v_i = 1 / u_i(x_1 v_1, ..., x_r v_r)`.
    pub fn inverse(&self) -> Result<Self> {
        let rank = self.rank();
        let bound = self.bound();
        let mut inv = Self::identity(rank, bound);
        for _ in 0..=bound {
            let images = inv.images();
            inv.multipliers = self
                .multipliers
                .iter()
                .map(|u| u.substitute(&images)?.inverse())
                .collect::<Result<Vec<_>>>()?;
        }
        Ok(inv)
    }

    /// Conjugation by `x ↦ −x`: the multipliers become `u_i(−x)`. This is
    /// the change between the coordinates `x_i` of a quiver and
    /// `x = −x_i`, `y = −x_j`.
    pub fn sign_flip(&self) -> Self {
        let rank = self.rank();
        let bound = self.bound();
        let negated: Vec<TruncatedSeries> = (0..rank)
            .map(|i| -&TruncatedSeries::variable(rank, bound, i))
            .collect();
        let multipliers = self
            .multipliers
            .iter()
            .map(|u| u.substitute(&negated).expect("negation is a valid substitution"))
            .collect();
        PoissonAutomorphism { multipliers }
    }

    /// Whether `{T(x_i), T(x_j)} = T({x_i, x_j})` for all pairs, up to the
    /// bound.
    pub fn preserves_bracket(&self, skew: &[Vec<i64>]) -> Result<bool> {
        let images = self.images();
        let bound = self.bound();
        for i in 0..self.rank() {
            for j in i + 1..self.rank() {
                let lhs = poisson_bracket(&images[i], &images[j], skew, bound)?;
                let rhs = (&images[i] * &images[j]).scale(&int(skew[i][j]));
                if lhs != rhs {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// `{A, B}` for the log-canonical bracket `{x_k, x_l} = b_{kl} x_k x_l`:
/// `Σ_{k,l} b_{kl} (x_k ∂_k A)(x_l ∂_l B)`.
pub fn poisson_bracket(
    a: &TruncatedSeries,
    b: &TruncatedSeries,
    skew: &[Vec<i64>],
    bound: u32,
) -> Result<TruncatedSeries> {
    let rank = a.rank();
    if b.rank() != rank {
        return Err(Error::RankMismatch { left: rank, right: b.rank() });
    }
    if skew.len() != rank || skew.iter().any(|row| row.len() != rank) {
        return Err(Error::RankMismatch { left: rank, right: skew.len() });
    }
    for k in 0..rank {
        for l in 0..rank {
            if skew[k][l] != -skew[l][k] {
                return Err(Error::Invalid("bracket matrix is not antisymmetric".into()));
            }
        }
    }
    let a = a.truncate(bound);
    let b = b.truncate(bound);
    let da: Vec<_> = (0..rank).map(|k| a.euler_derivative(k)).collect();
    let db: Vec<_> = (0..rank).map(|l| b.euler_derivative(l)).collect();
    let mut result = TruncatedSeries::zero(rank, a.bound().min(b.bound()));
    for k in 0..rank {
        for l in 0..rank {
            if skew[k][l] != 0 {
                result = &result + &(&da[k] * &db[l]).scale(&int(skew[k][l]));
            }
        }
    }
    Ok(result)
}

/// `T_i(x_j) = x_j (1 + x_i)^{{i,j}}`.
pub fn t_i_automorphism(q: &Quiver, i: usize, bound: u32) -> Result<PoissonAutomorphism> {
    let rank = q.rank();
    if i >= rank {
        return Err(Error::Invalid(format!("vertex {i} out of range")));
    }
    let skew = q.skew_matrix();
    let base = &TruncatedSeries::one(rank, bound) + &TruncatedSeries::variable(rank, bound, i);
    let multipliers = (0..rank)
        .map(|j| base.pow_int(skew[i][j]))
        .collect::<Result<Vec<_>>>()?;
    Ok(PoissonAutomorphism { multipliers })
}

/// `T^{(m)}_{a,b,F}: x ↦ x F(x^a y^b)^{−mb}, y ↦ y F(x^a y^b)^{ma}`.
///
/// `F` is a univariate unit series known at least to degree
/// `⌊bound/(a+b)⌋`.
pub fn t_abf_automorphism(m: u32, a: u32, b: u32, f: &TruncatedSeries, bound: u32) -> Result<PoissonAutomorphism> {
    if a + b == 0 {
        return Err(Error::Domain("(a,b) = (0,0) has no automorphism".into()));
    }
    if f.rank() != 1 {
        return Err(Error::NotUnivariate(f.rank()));
    }
    if !f.constant_term().is_one() {
        return Err(Error::Invalid("F must have constant term 1".into()));
    }
    let needed = bound / (a + b);
    if f.bound() < needed {
        return Err(Error::BoundMismatch { left: needed, right: f.bound() });
    }
    let monomial = TruncatedSeries::monomial(bound, &LatticePoint::new(vec![a, b]), BigRational::one());
    let composed = f.pad_to(bound.max(f.bound())).substitute(&[monomial])?;
    let (m, a, b) = (i64::from(m), i64::from(a), i64::from(b));
    Ok(PoissonAutomorphism {
        multipliers: vec![composed.pow_int(-m * b)?, composed.pow_int(m * a)?],
    })
}

/// The basic `T^{(m)}_{a,b}` with `F(t) = 1 − (−1)^{mab} t`.
pub fn t_ab_automorphism(m: u32, a: u32, b: u32, bound: u32) -> Result<PoissonAutomorphism> {
    let s = sign_pow(i64::from(m) * i64::from(a) * i64::from(b));
    let f = TruncatedSeries::univariate(bound, &[int(1), int(-s)]);
    t_abf_automorphism(m, a, b, &f, bound)
}

/// The bracket matrix `[[0, m], [−m, 0]]` of the `(x, y)` coordinates.
pub fn kronecker_skew(m: u32) -> Vec<Vec<i64>> {
    let m = i64::from(m);
    vec![vec![0, m], vec![-m, 0]]
}

#[cfg(test)]
mod tests;
