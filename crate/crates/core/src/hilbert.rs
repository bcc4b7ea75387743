//! Euler characteristics of non-commutative Hilbert schemes of framed
//! quiver representations.
//!
//! The Euler characteristic of `Hilb_{d,n}(Q)` equals the number of
//! `n`-forests of dimension vector `d`, and the Hilbert scheme shares it with
//! its nilpotent counterpart, so only one count is exposed. Two independent
//! routes compute it: the grafting equations
//!
//! ```text
//! F^n = ∏_i (F^i)^{n_i},    F^i = 1 + t_i ∏_j (F^j)^{r_{i,j}}
//! ```
//!
//! solved degree by degree, and explicit enumeration of subtrees of the path
//! trees. Forests may contain empty trees; this is what the constant term 1
//! of `F^i` records.

use std::collections::HashMap;

use crate::series::solve_by_degree;
use crate::{Error, LatticePoint, Quiver, Result, TruncatedSeries};

/// Largest total dimension the forest enumeration accepts.
pub const ORACLE_LIMIT: u32 = 8;

/// The per-vertex series `F^i` of a quiver.
#[derive(Debug, Clone)]
pub struct HilbertSeries {
    per_vertex: Vec<TruncatedSeries>,
}

impl HilbertSeries {
    pub fn solve(q: &Quiver, bound: u32) -> Result<Self> {
        let n = q.rank();
        let per_vertex = solve_by_degree(n, n, bound, |f| {
            (0..n)
                .map(|i| {
                    let mut product = TruncatedSeries::one(n, f[i].bound());
                    for (j, fj) in f.iter().enumerate() {
                        let r = q.arrows(i, j);
                        if r > 0 {
                            product = &product * &fj.pow_int(i64::from(r))?;
                        }
                    }
                    let shifted = product.shift(&LatticePoint::unit(n, i));
                    Ok(&TruncatedSeries::one(n, f[i].bound()) + &shifted)
                })
                .collect()
        })?;
        Ok(HilbertSeries { per_vertex })
    }

    pub fn vertex(&self, i: usize) -> &TruncatedSeries {
        &self.per_vertex[i]
    }

    /// `F^n = ∏ (F^i)^{n_i}`.
    pub fn framed(&self, n: &LatticePoint) -> Result<TruncatedSeries> {
        let f0 = &self.per_vertex[0];
        if n.rank() != self.per_vertex.len() {
            return Err(Error::RankMismatch { left: self.per_vertex.len(), right: n.rank() });
        }
        let mut result = TruncatedSeries::one(f0.rank(), f0.bound());
        for (fi, &ni) in self.per_vertex.iter().zip(n.as_slice()) {
            if ni > 0 {
                result = &result * &fi.pow_int(i64::from(ni))?;
            }
        }
        Ok(result)
    }
}

/// `Σ_d χ(Hilb_{d,n}(Q)) t^d` truncated at total degree `bound`.
pub fn hilb_series(q: &Quiver, n: &LatticePoint, bound: u32) -> Result<TruncatedSeries> {
    if n.rank() != q.rank() {
        return Err(Error::RankMismatch { left: q.rank(), right: n.rank() });
    }
    HilbertSeries::solve(q, bound)?.framed(n)
}

/// Input of a single forest count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForestSpec {
    pub quiver: Quiver,
    pub framing: LatticePoint,
    pub target_dim: LatticePoint,
}

/// Subtree tallies of the path trees of a quiver, obtained by enumerating
/// predecessor-closed subtrees one by one.
#[derive(Debug, Clone)]
pub struct ForestOracle {
    rank: usize,
    max_degree: u32,
    trees: Vec<HashMap<LatticePoint, u64>>,
}

impl ForestOracle {
    pub fn new(q: &Quiver, max_degree: u32) -> Result<Self> {
        if max_degree > ORACLE_LIMIT {
            return Err(Error::OracleLimit { requested: max_degree, limit: ORACLE_LIMIT });
        }
        let trees = (0..q.rank())
            .map(|i| enumerate_subtrees(q, i, max_degree))
            .collect();
        Ok(ForestOracle { rank: q.rank(), max_degree, trees })
    }

    /// Number of subtrees of the path tree at vertex `i` per dimension vector.
    pub fn subtrees(&self, i: usize) -> &HashMap<LatticePoint, u64> {
        &self.trees[i]
    }

    /// Number of `n`-forests per dimension vector: one tree slot for each
    /// unit of framing, filled independently.
    pub fn forests(&self, n: &LatticePoint) -> Result<HashMap<LatticePoint, u64>> {
        if n.rank() != self.rank {
            return Err(Error::RankMismatch { left: self.rank, right: n.rank() });
        }
        let mut tally = HashMap::from([(LatticePoint::zero(self.rank), 1u64)]);
        for (i, &ni) in n.as_slice().iter().enumerate() {
            for _ in 0..ni {
                tally = self.add_slot(&tally, i);
            }
        }
        Ok(tally)
    }

    /// Extends a forest tally by one more tree rooted at `i`.
    pub fn add_slot(&self, tally: &HashMap<LatticePoint, u64>, i: usize) -> HashMap<LatticePoint, u64> {
        let mut next = HashMap::new();
        for (d, &x) in tally {
            for (e, &y) in &self.trees[i] {
                if d.degree() + e.degree() <= self.max_degree {
                    *next.entry(d.add(e)).or_insert(0) += x * y;
                }
            }
        }
        next
    }

    pub fn count(&self, n: &LatticePoint, d: &LatticePoint) -> Result<u64> {
        if d.degree() > self.max_degree {
            return Err(Error::OracleLimit { requested: d.degree(), limit: self.max_degree });
        }
        Ok(self.forests(n)?.get(d).copied().unwrap_or(0))
    }
}

/// Counts `n`-forests of dimension vector `d` by explicit enumeration.
pub fn forest_oracle(spec: &ForestSpec) -> Result<u64> {
    let q = &spec.quiver;
    if spec.framing.rank() != q.rank() || spec.target_dim.rank() != q.rank() {
        return Err(Error::RankMismatch { left: q.rank(), right: spec.target_dim.rank() });
    }
    let size = spec.target_dim.degree();
    if size > ORACLE_LIMIT {
        return Err(Error::OracleLimit { requested: size, limit: ORACLE_LIMIT });
    }
    ForestOracle::new(q, size)?.count(&spec.framing, &spec.target_dim)
}

/// Tallies the subtrees of the path tree rooted at `root` with at most
/// `max` nodes, the empty subtree included.
///
/// Nodes of the path tree are paths starting at `root`; a node ending at
/// vertex `v` has one child per arrow out of `v`. A subtree is grown by
/// walking a frontier of candidate nodes and deciding for each whether it is
/// taken (its children join the frontier) or dropped for good, so every
/// subtree is produced exactly once.
fn enumerate_subtrees(q: &Quiver, root: usize, max: u32) -> HashMap<LatticePoint, u64> {
    let n = q.rank();
    let children: Vec<Vec<usize>> = (0..n)
        .map(|v| (0..n).flat_map(|w| std::iter::repeat_n(w, q.arrows(v, w) as usize)).collect())
        .collect();

    struct Walk<'a> {
        children: &'a [Vec<usize>],
        max: u32,
        frontier: Vec<usize>,
        dim: Vec<u32>,
        tally: HashMap<LatticePoint, u64>,
    }

    impl Walk<'_> {
        fn step(&mut self, pos: usize, size: u32) {
            if pos == self.frontier.len() || size == self.max {
                *self.tally.entry(LatticePoint::new(self.dim.clone())).or_insert(0) += 1;
                return;
            }
            // drop frontier[pos]
            self.step(pos + 1, size);
            // take frontier[pos]
            let v = self.frontier[pos];
            let mark = self.frontier.len();
            self.frontier.extend_from_slice(&self.children[v]);
            self.dim[v] += 1;
            self.step(pos + 1, size + 1);
            self.dim[v] -= 1;
            self.frontier.truncate(mark);
        }
    }

    let mut walk = Walk {
        children: &children,
        max,
        frontier: vec![root],
        dim: vec![0; n],
        tally: HashMap::new(),
    };
    walk.step(0, 0);
    walk.tally
}

/// Reads the counts of a series as nonnegative integers, for comparison with
/// the oracle.
pub fn integer_coefficients(series: &TruncatedSeries) -> Option<HashMap<LatticePoint, u64>> {
    use num_traits::ToPrimitive;
    series
        .terms()
        .map(|(d, c)| {
            let v = if c.is_integer() { c.to_integer().to_u64() } else { None };
            v.map(|v| (d.clone(), v))
        })
        .collect()
}
