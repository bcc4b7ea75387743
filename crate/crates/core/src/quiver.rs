//! Quivers, their Euler form, stabilities and local quivers.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::{Error, LatticePoint, Result};

/// A finite quiver. `arrow_counts[k][l]` is the number of arrows from vertex
/// `k` to vertex `l`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawQuiver")]
pub struct Quiver {
    vertices: Vec<String>,
    arrow_counts: Vec<Vec<u32>>,
}

#[derive(Deserialize)]
struct RawQuiver {
    vertices: Vec<String>,
    arrow_counts: Vec<Vec<u32>>,
}

impl TryFrom<RawQuiver> for Quiver {
    type Error = Error;
    fn try_from(raw: RawQuiver) -> Result<Self> {
        Quiver::new(raw.vertices, raw.arrow_counts)
    }
}

impl Quiver {
    pub fn new(vertices: Vec<String>, arrow_counts: Vec<Vec<u32>>) -> Result<Self> {
        let n = vertices.len();
        if n == 0 {
            return Err(Error::Invalid("a quiver needs at least one vertex".into()));
        }
        if arrow_counts.len() != n || arrow_counts.iter().any(|row| row.len() != n) {
            return Err(Error::Invalid(format!(
                "arrow_counts must be a {n}x{n} matrix"
            )));
        }
        Ok(Quiver { vertices, arrow_counts })
    }

    /// Quiver on vertices `0..n` named by their index, from an arrow list.
    pub fn from_arrows(n: usize, arrows: &[(usize, usize)]) -> Result<Self> {
        let mut counts = vec![vec![0u32; n]; n];
        for &(k, l) in arrows {
            if k >= n || l >= n {
                return Err(Error::Invalid(format!("arrow {k}->{l} leaves the quiver")));
            }
            counts[k][l] += 1;
        }
        Quiver::new((1..=n).map(|i| i.to_string()).collect(), counts)
    }

    /// The `m`-Kronecker quiver on vertices `i`, `j` with `m` arrows `j -> i`.
    pub fn kronecker(m: u32) -> Self {
        Quiver {
            vertices: vec!["i".into(), "j".into()],
            arrow_counts: vec![vec![0, 0], vec![m, 0]],
        }
    }

    /// One vertex with `m` loops.
    pub fn loops(m: u32) -> Self {
        Quiver { vertices: vec!["v".into()], arrow_counts: vec![vec![m]] }
    }

    /// Linearly oriented `A_n`: `1 -> 2 -> ... -> n`.
    pub fn linear(n: usize) -> Self {
        let arrows: Vec<_> = (1..n).map(|k| (k - 1, k)).collect();
        Quiver::from_arrows(n, &arrows).expect("valid arrows")
    }

    pub fn rank(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn arrows(&self, from: usize, to: usize) -> u32 {
        self.arrow_counts[from][to]
    }

    pub fn arrow_counts(&self) -> &[Vec<u32>] {
        &self.arrow_counts
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == name)
    }

    fn check(&self, d: &LatticePoint) -> Result<()> {
        if d.rank() != self.rank() {
            return Err(Error::RankMismatch { left: self.rank(), right: d.rank() });
        }
        Ok(())
    }

    /// `⟨d,e⟩ = Σ d_i e_i − Σ_{k,l} r_{k,l} d_k e_l`.
    pub fn euler_form(&self, d: &LatticePoint, e: &LatticePoint) -> Result<i64> {
        self.check(d)?;
        self.check(e)?;
        Ok(self.euler_form_signed(&d.to_signed(), &e.to_signed()))
    }

    /// The Euler form extended to arbitrary integer vectors.
    pub fn euler_form_signed(&self, d: &[i64], e: &[i64]) -> i64 {
        let n = self.rank();
        let mut s: i64 = (0..n).map(|k| d[k] * e[k]).sum();
        for k in 0..n {
            for l in 0..n {
                s -= i64::from(self.arrow_counts[k][l]) * d[k] * e[l];
            }
        }
        s
    }

    /// Matrix `E = I − R` of the Euler form, `⟨d,e⟩ = dᵀ E e`.
    pub fn euler_matrix(&self) -> Vec<Vec<i64>> {
        let n = self.rank();
        (0..n)
            .map(|k| {
                (0..n)
                    .map(|l| i64::from(k == l) - i64::from(self.arrow_counts[k][l]))
                    .collect()
            })
            .collect()
    }

    /// Skew form `{i,j} = ⟨i,j⟩ − ⟨j,i⟩` on vertices.
    pub fn skew_matrix(&self) -> Vec<Vec<i64>> {
        let n = self.rank();
        (0..n)
            .map(|k| {
                (0..n)
                    .map(|l| i64::from(self.arrow_counts[l][k]) - i64::from(self.arrow_counts[k][l]))
                    .collect()
            })
            .collect()
    }

    /// `{d,e} = ⟨d,e⟩ − ⟨e,d⟩` on integer vectors.
    pub fn skew_form(&self, d: &[i64], e: &[i64]) -> i64 {
        self.euler_form_signed(d, e) - self.euler_form_signed(e, d)
    }

    /// Vertex order with sources first, or `None` if there is an oriented
    /// cycle (loops included).
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.rank();
        let mut indegree: Vec<u32> = (0..n)
            .map(|l| (0..n).map(|k| self.arrow_counts[k][l]).sum())
            .collect();
        let mut ready: Vec<usize> = (0..n).filter(|&v| indegree[v] == 0).rev().collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = ready.pop() {
            order.push(v);
            for l in (0..n).rev() {
                let r = self.arrow_counts[v][l];
                if r > 0 {
                    indegree[l] -= r;
                    if indegree[l] == 0 {
                        ready.push(l);
                    }
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_some()
    }

    /// Vertex order `i_1, ..., i_r` with `k > l` whenever there is an arrow
    /// `i_k -> i_l`, i.e. sinks first.
    pub fn sink_first_order(&self) -> Result<Vec<usize>> {
        let mut order = self.topological_order().ok_or(Error::Cyclic)?;
        order.reverse();
        Ok(order)
    }

    /// Coxeter matrix `Φ` with `⟨Φd, e⟩ = −⟨e, d⟩`, namely `Φ = −E^{−T} E`.
    /// Rows index the output coordinate.
    pub fn coxeter_phi(&self) -> Result<Vec<Vec<i64>>> {
        if !self.is_acyclic() {
            return Err(Error::Cyclic);
        }
        let n = self.rank();
        let e = self.euler_matrix();
        // E = I − R with R nilpotent, so E^{-1} = Σ_{k<n} R^k.
        let r: Vec<Vec<i64>> = (0..n)
            .map(|k| (0..n).map(|l| i64::from(self.arrow_counts[k][l])).collect())
            .collect();
        let mut inv = identity(n);
        let mut power = identity(n);
        for _ in 1..n {
            power = mat_mul(&power, &r);
            for k in 0..n {
                for l in 0..n {
                    inv[k][l] += power[k][l];
                }
            }
        }
        let inv_t: Vec<Vec<i64>> = (0..n).map(|k| (0..n).map(|l| inv[l][k]).collect()).collect();
        let phi = mat_mul(&inv_t, &e);
        Ok(phi.into_iter().map(|row| row.into_iter().map(|x| -x).collect()).collect())
    }
}

fn identity(n: usize) -> Vec<Vec<i64>> {
    (0..n).map(|k| (0..n).map(|l| i64::from(k == l)).collect()).collect()
}

fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    let m = b[0].len();
    (0..n)
        .map(|k| (0..m).map(|l| (0..b.len()).map(|j| a[k][j] * b[j][l]).sum()).collect())
        .collect()
}

/// Applies an integer matrix to an integer vector.
pub fn apply_matrix(m: &[Vec<i64>], v: &[i64]) -> Vec<i64> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

/// A stability given by an integer functional `Θ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stability {
    pub theta: Vec<i64>,
}

impl Stability {
    pub fn new(theta: Vec<i64>) -> Self {
        Stability { theta }
    }

    pub fn trivial(rank: usize) -> Self {
        Stability { theta: vec![0; rank] }
    }

    /// The dual basis functional `i^*`.
    pub fn dual_vertex(rank: usize, i: usize) -> Self {
        let mut theta = vec![0; rank];
        theta[i] = 1;
        Stability { theta }
    }

    pub fn rank(&self) -> usize {
        self.theta.len()
    }

    /// `μ(d) = Θ(d) / dim d`.
    pub fn slope(&self, d: &LatticePoint) -> Result<BigRational> {
        if d.rank() != self.rank() {
            return Err(Error::RankMismatch { left: self.rank(), right: d.rank() });
        }
        if d.is_zero() {
            return Err(Error::Domain("slope of the zero dimension vector".into()));
        }
        Ok(BigRational::new(d.pair(&self.theta).into(), i64::from(d.degree()).into()))
    }
}

/// A polystable type `ξ = Σ m_i d^i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolystableType {
    summands: Vec<(LatticePoint, u32)>,
}

impl PolystableType {
    pub fn new(summands: Vec<(LatticePoint, u32)>) -> Result<Self> {
        for (k, (d, m)) in summands.iter().enumerate() {
            if d.is_zero() {
                return Err(Error::Invalid("polystable summand of dimension zero".into()));
            }
            if *m == 0 {
                return Err(Error::Invalid("polystable multiplicities must be positive".into()));
            }
            if summands[..k].iter().any(|(e, _)| e == d) {
                return Err(Error::Invalid(format!("repeated polystable summand {d:?}")));
            }
            if d.rank() != summands[0].0.rank() {
                return Err(Error::RankMismatch { left: summands[0].0.rank(), right: d.rank() });
            }
        }
        Ok(PolystableType { summands })
    }

    pub fn summands(&self) -> &[(LatticePoint, u32)] {
        &self.summands
    }

    /// Total dimension vector `Σ m_i d^i`.
    pub fn dimension(&self) -> Option<LatticePoint> {
        let mut iter = self.summands.iter();
        let (d0, m0) = iter.next()?;
        Some(iter.fold(d0.scale(*m0), |acc, (d, m)| acc.add(&d.scale(*m))))
    }

    /// Whether all summands share one slope.
    pub fn is_semistable_type(&self, theta: &Stability) -> Result<bool> {
        let mut slopes = self.summands.iter().map(|(d, _)| theta.slope(d));
        let Some(first) = slopes.next().transpose()? else {
            return Ok(true);
        };
        for s in slopes {
            if s? != first {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Local quiver data `(Q_ξ, d_ξ)` together with the summand dimension vectors
/// needed to transport framings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalQuiver {
    pub quiver: Quiver,
    pub dimension: LatticePoint,
    summand_dims: Vec<LatticePoint>,
}

impl LocalQuiver {
    /// `(n_ξ)_i = n · d^i`.
    pub fn framing(&self, n: &LatticePoint) -> Result<LatticePoint> {
        let n = n.to_signed();
        let values = self
            .summand_dims
            .iter()
            .map(|d| {
                if d.rank() != n.len() {
                    return Err(Error::RankMismatch { left: d.rank(), right: n.len() });
                }
                Ok(d.pair(&n) as u32)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LatticePoint::new(values))
    }
}

/// Builds `Q_ξ`: one vertex per summand and `δ_{ij} − ⟨d^i, d^j⟩` arrows
/// from summand `i` to summand `j`.
pub fn local_quiver(q: &Quiver, xi: &PolystableType) -> Result<LocalQuiver> {
    let summands = xi.summands();
    let s = summands.len();
    let mut counts = vec![vec![0u32; s]; s];
    for (k, (dk, _)) in summands.iter().enumerate() {
        for (l, (dl, _)) in summands.iter().enumerate() {
            let count = i64::from(k == l) - q.euler_form(dk, dl)?;
            if count < 0 {
                return Err(Error::NegativeArrowCount { from: k, to: l, count });
            }
            counts[k][l] = count as u32;
        }
    }
    let names = (1..=s).map(|k| format!("xi{k}")).collect();
    Ok(LocalQuiver {
        quiver: Quiver::new(names, counts)?,
        dimension: LatticePoint::new(summands.iter().map(|(_, m)| *m).collect()),
        summand_dims: summands.iter().map(|(d, _)| d.clone()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn lp(v: &[u32]) -> LatticePoint {
        LatticePoint::new(v.to_vec())
    }

    #[test]
    fn kronecker_euler_form() {
        for m in 0..5 {
            let q = Quiver::kronecker(m);
            assert_eq!(q.euler_form(&lp(&[0, 1]), &lp(&[1, 0])).unwrap(), -(m as i64));
            assert_eq!(q.euler_form(&lp(&[1, 0]), &lp(&[0, 1])).unwrap(), 0);
            assert_eq!(q.skew_matrix()[0][1], m as i64);
        }
        let k3 = Quiver::kronecker(3);
        assert_eq!(k3.euler_form(&lp(&[1, 1]), &lp(&[1, 1])).unwrap(), -1);
        assert_eq!(k3.euler_form(&lp(&[4, 7]), &lp(&[0, 0])).unwrap(), 0);
        assert_eq!(
            k3.euler_form(&lp(&[1, 1]), &lp(&[1])),
            Err(Error::RankMismatch { left: 2, right: 1 })
        );
    }

    #[test]
    fn diagonal_euler_form_matches_sign_parameter() {
        // −⟨(a,b),(a,b)⟩ = mab − a² − b²
        for m in 1..5i64 {
            let q = Quiver::kronecker(m as u32);
            for a in 0..5i64 {
                for b in 0..5i64 {
                    let d = lp(&[a as u32, b as u32]);
                    assert_eq!(-q.euler_form(&d, &d).unwrap(), m * a * b - a * a - b * b);
                }
            }
        }
    }

    #[test]
    fn slopes() {
        let theta = Stability::dual_vertex(2, 1);
        assert_eq!(theta.slope(&lp(&[2, 3])).unwrap(), ratio(3, 5));
        assert_eq!(Stability::trivial(3).slope(&lp(&[1, 0, 4])).unwrap(), ratio(0, 1));
        assert_eq!(Stability::new(vec![1, 0]).slope(&lp(&[1, 1])).unwrap(), ratio(1, 2));
        assert!(theta.slope(&lp(&[0, 0])).is_err());
    }

    #[test]
    fn coxeter_a2() {
        let a2 = Quiver::linear(2);
        assert_eq!(a2.coxeter_phi().unwrap(), vec![vec![-1, 1], vec![-1, 0]]);
    }

    #[test]
    fn coxeter_without_arrows() {
        let q = Quiver::from_arrows(3, &[]).unwrap();
        let minus_id: Vec<Vec<i64>> = (0..3).map(|k| (0..3).map(|l| -i64::from(k == l)).collect()).collect();
        assert_eq!(q.coxeter_phi().unwrap(), minus_id);
    }

    #[test]
    fn coxeter_rejects_cycles() {
        assert_eq!(Quiver::loops(1).coxeter_phi(), Err(Error::Cyclic));
        let cyc = Quiver::from_arrows(2, &[(0, 1), (1, 0)]).unwrap();
        assert_eq!(cyc.coxeter_phi(), Err(Error::Cyclic));
    }

    #[test]
    fn coxeter_identity_on_random_pairs() {
        let q = Quiver::kronecker(2);
        let phi = q.coxeter_phi().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let d: Vec<i64> = (0..2).map(|_| rng.gen_range(-6..=6)).collect();
            let e: Vec<i64> = (0..2).map(|_| rng.gen_range(-6..=6)).collect();
            assert_eq!(
                q.euler_form_signed(&apply_matrix(&phi, &d), &e),
                -q.euler_form_signed(&e, &d)
            );
        }
    }

    fn small_acyclic() -> Vec<Quiver> {
        vec![
            Quiver::linear(2),
            Quiver::linear(3),
            Quiver::kronecker(2),
            Quiver::kronecker(3),
            Quiver::from_arrows(3, &[(2, 0), (2, 1), (1, 0), (1, 0)]).unwrap(),
            Quiver::from_arrows(4, &[(0, 1), (0, 2), (0, 3), (3, 1)]).unwrap(),
        ]
    }

    #[test]
    fn coxeter_identity_on_basis() {
        for q in small_acyclic() {
            let n = q.rank();
            let phi = q.coxeter_phi().unwrap();
            let basis: Vec<Vec<i64>> = (0..n).map(|k| (0..n).map(|l| i64::from(k == l)).collect()).collect();
            for d in &basis {
                let phid = apply_matrix(&phi, d);
                for e in &basis {
                    assert_eq!(q.euler_form_signed(&phid, e), -q.euler_form_signed(e, d));
                    // {e,d} = ⟨−(id+Φ)d, e⟩
                    let shifted: Vec<i64> = d.iter().zip(&phid).map(|(a, b)| -(a + b)).collect();
                    assert_eq!(q.skew_form(e, d), q.euler_form_signed(&shifted, e));
                }
            }
        }
    }

    #[test]
    fn sink_first_order_respects_arrows() {
        for q in small_acyclic() {
            let order = q.sink_first_order().unwrap();
            let pos = |v: usize| order.iter().position(|&w| w == v).unwrap();
            for k in 0..q.rank() {
                for l in 0..q.rank() {
                    if q.arrows(k, l) > 0 {
                        assert!(pos(k) > pos(l));
                    }
                }
            }
        }
    }

    #[test]
    fn local_quiver_of_kronecker_simples() {
        for m in 1..4 {
            let q = Quiver::kronecker(m);
            let xi = PolystableType::new(vec![(lp(&[1, 0]), 1), (lp(&[0, 1]), 1)]).unwrap();
            let local = local_quiver(&q, &xi).unwrap();
            assert_eq!(local.quiver.arrow_counts(), q.arrow_counts());
            assert_eq!(local.dimension, lp(&[1, 1]));
            assert_eq!(local.framing(&lp(&[2, 5])).unwrap(), lp(&[2, 5]));
        }
    }

    #[test]
    fn local_quiver_single_summand() {
        let a2 = Quiver::linear(2);
        let xi = PolystableType::new(vec![(lp(&[1, 1]), 3)]).unwrap();
        let local = local_quiver(&a2, &xi).unwrap();
        assert_eq!(local.quiver.arrow_counts(), &[vec![0]]);
        assert_eq!(local.dimension, lp(&[3]));

        let k3 = Quiver::kronecker(3);
        let xi = PolystableType::new(vec![(lp(&[1, 1]), 2)]).unwrap();
        let local = local_quiver(&k3, &xi).unwrap();
        assert_eq!(local.quiver.arrow_counts(), &[vec![2]]);
        assert_eq!(local.dimension, lp(&[2]));
        assert_eq!(local.framing(&lp(&[1, 0])).unwrap(), lp(&[1]));
    }

    #[test]
    fn local_quiver_rejects_negative_counts() {
        // ⟨(1,0),(0,1)⟩ = 0 on A_2 but ⟨(0,1),(1,0)⟩... pick a pair with positive form
        let q = Quiver::from_arrows(2, &[]).unwrap();
        let xi = PolystableType::new(vec![(lp(&[1, 0]), 1), (lp(&[1, 1]), 1)]).unwrap();
        assert_eq!(
            local_quiver(&q, &xi).unwrap_err(),
            Error::NegativeArrowCount { from: 0, to: 1, count: -1 }
        );
    }

    #[test]
    fn polystable_validation() {
        assert!(PolystableType::new(vec![(lp(&[0, 0]), 1)]).is_err());
        assert!(PolystableType::new(vec![(lp(&[1, 0]), 0)]).is_err());
        assert!(PolystableType::new(vec![(lp(&[1, 0]), 1), (lp(&[1, 0]), 2)]).is_err());
        let xi = PolystableType::new(vec![(lp(&[1, 1]), 1), (lp(&[2, 2]), 1)]).unwrap();
        assert!(xi.is_semistable_type(&Stability::dual_vertex(2, 1)).unwrap());
        assert_eq!(xi.dimension().unwrap(), lp(&[3, 3]));
    }

    #[test]
    fn quiver_json_round_trip() {
        let q = Quiver::kronecker(3);
        let json = serde_json::to_string(&q).unwrap();
        assert_eq!(json, r#"{"vertices":["i","j"],"arrow_counts":[[0,0],[3,0]]}"#);
        assert_eq!(serde_json::from_str::<Quiver>(&json).unwrap(), q);
        assert!(serde_json::from_str::<Quiver>(r#"{"vertices":["a"],"arrow_counts":[[0,1]]}"#).is_err());
        assert!(serde_json::from_str::<Quiver>(r#"{"vertices":["a"],"arrow_counts":[[-1]]}"#).is_err());
        let theta: Stability = serde_json::from_str(r#"{"theta":[0,1]}"#).unwrap();
        assert_eq!(theta, Stability::dual_vertex(2, 1));
    }

    proptest! {
        #[test]
        fn euler_form_is_bilinear(
            m in 0u32..4,
            d in proptest::collection::vec(0u32..6, 2),
            d2 in proptest::collection::vec(0u32..6, 2),
            e in proptest::collection::vec(0u32..6, 2),
        ) {
            let q = Quiver::kronecker(m);
            let (d, d2, e) = (LatticePoint::new(d), LatticePoint::new(d2), LatticePoint::new(e));
            prop_assert_eq!(
                q.euler_form(&d.add(&d2), &e).unwrap(),
                q.euler_form(&d, &e).unwrap() + q.euler_form(&d2, &e).unwrap()
            );
            prop_assert_eq!(
                q.euler_form(&e, &d.add(&d2)).unwrap(),
                q.euler_form(&e, &d).unwrap() + q.euler_form(&e, &d2).unwrap()
            );
        }
    }
}
