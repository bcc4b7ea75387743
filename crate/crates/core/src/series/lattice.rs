use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

/// A point of the positive lattice: a dimension vector or a monomial exponent.
///
/// Ordering is graded lexicographic: total degree first, then the exponent
/// tuples compared so that `(1,0)` precedes `(0,1)`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticePoint(Vec<u32>);

impl LatticePoint {
    pub fn new(exponents: Vec<u32>) -> Self {
        LatticePoint(exponents)
    }

    pub fn zero(rank: usize) -> Self {
        LatticePoint(vec![0; rank])
    }

    pub fn unit(rank: usize, i: usize) -> Self {
        let mut v = vec![0; rank];
        v[i] = 1;
        LatticePoint(v)
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    /// Total degree `|d|`.
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0[i]
    }

    pub fn add(&self, other: &LatticePoint) -> LatticePoint {
        debug_assert_eq!(self.rank(), other.rank());
        LatticePoint(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self - other` when it stays in the positive lattice.
    pub fn checked_sub(&self, other: &LatticePoint) -> Option<LatticePoint> {
        debug_assert_eq!(self.rank(), other.rank());
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(LatticePoint)
    }

    pub fn scale(&self, k: u32) -> LatticePoint {
        LatticePoint(self.0.iter().map(|a| a * k).collect())
    }

    /// Evaluates an integer functional on this point.
    pub fn pair(&self, functional: &[i64]) -> i64 {
        debug_assert_eq!(self.rank(), functional.len());
        self.0.iter().zip(functional).map(|(&a, &f)| a as i64 * f).sum()
    }

    pub fn to_signed(&self) -> Vec<i64> {
        self.0.iter().map(|&a| a as i64).collect()
    }

    /// Whether `self <= other` componentwise.
    pub fn divides(&self, other: &LatticePoint) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

impl From<Vec<u32>> for LatticePoint {
    fn from(v: Vec<u32>) -> Self {
        LatticePoint(v)
    }
}

impl fmt::Debug for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl Ord for LatticePoint {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for LatticePoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All points of the given rank with total degree exactly `degree`, in
/// graded-lex order.
pub fn points_of_degree(rank: usize, degree: u32) -> Vec<LatticePoint> {
    fn rec(rank: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<LatticePoint>) {
        if prefix.len() + 1 == rank {
            prefix.push(left);
            out.push(LatticePoint(prefix.clone()));
            prefix.pop();
            return;
        }
        for first in (0..=left).rev() {
            prefix.push(first);
            rec(rank, left - first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if rank == 0 {
        if degree == 0 {
            out.push(LatticePoint(Vec::new()));
        }
        return out;
    }
    rec(rank, degree, &mut Vec::with_capacity(rank), &mut out);
    out
}

/// All points with total degree at most `bound`, in graded-lex order.
pub fn points_up_to(rank: usize, bound: u32) -> Vec<LatticePoint> {
    (0..=bound).flat_map(|d| points_of_degree(rank, d)).collect()
}
