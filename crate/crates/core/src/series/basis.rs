//! Dense monomial indexing shared by every series of a given rank and bound.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::lattice::{points_up_to, LatticePoint};

const NO_INDEX: u32 = u32::MAX;
// Above this many monomials the pairwise product table is not materialized.
const TABLE_LIMIT: usize = 2048;

pub(crate) struct MonomialBasis {
    pub rank: usize,
    pub bound: u32,
    pub monomials: Vec<LatticePoint>,
    pub degrees: Vec<u32>,
    /// `degree_end[k]` = number of monomials of degree <= k.
    pub degree_end: Vec<usize>,
    index: HashMap<LatticePoint, usize>,
    products: OnceLock<Option<Vec<u32>>>,
}

impl MonomialBasis {
    fn build(rank: usize, bound: u32) -> Self {
        let monomials = points_up_to(rank, bound);
        let degrees: Vec<u32> = monomials.iter().map(LatticePoint::degree).collect();
        let mut degree_end = vec![0; bound as usize + 1];
        for &d in &degrees {
            for slot in degree_end.iter_mut().skip(d as usize) {
                *slot += 1;
            }
        }
        let index = monomials
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        MonomialBasis {
            rank,
            bound,
            monomials,
            degrees,
            degree_end,
            index,
            products: OnceLock::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn index_of(&self, point: &LatticePoint) -> Option<usize> {
        self.index.get(point).copied()
    }

    /// Number of monomials of degree at most `k`, clamped to the basis.
    pub fn prefix(&self, k: u32) -> usize {
        self.degree_end[k.min(self.bound) as usize]
    }

    /// Index of `monomials[i] + monomials[j]`, provided its degree is within
    /// the bound.
    pub fn product_index(&self, i: usize, j: usize) -> Option<usize> {
        match self.table() {
            Some(table) => {
                let k = table[i * self.len() + j];
                (k != NO_INDEX).then_some(k as usize)
            }
            None => {
                if self.degrees[i] + self.degrees[j] > self.bound {
                    return None;
                }
                self.index_of(&self.monomials[i].add(&self.monomials[j]))
            }
        }
    }

    fn table(&self) -> Option<&Vec<u32>> {
        self.products
            .get_or_init(|| {
                let n = self.len();
                if n > TABLE_LIMIT {
                    return None;
                }
                let mut table = vec![NO_INDEX; n * n];
                for i in 0..n {
                    for j in 0..n {
                        if self.degrees[i] + self.degrees[j] <= self.bound {
                            let sum = self.monomials[i].add(&self.monomials[j]);
                            table[i * n + j] = self.index[&sum] as u32;
                        }
                    }
                }
                Some(table)
            })
            .as_ref()
    }
}

/// Shared basis for `(rank, bound)`; identical requests return the same `Arc`.
pub(crate) fn basis(rank: usize, bound: u32) -> Arc<MonomialBasis> {
    type Cache = Mutex<HashMap<(usize, u32), Arc<MonomialBasis>>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    guard
        .entry((rank, bound))
        .or_insert_with(|| Arc::new(MonomialBasis::build(rank, bound)))
        .clone()
}
