//! A property suite over the whole crate, at a configurable degree bound.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::arith::{binomial_congruence_check, chi_symmetric_stratum, gen_binomial, partitions_of};
use crate::duality::{duality_moebius, euler_factorize, funceq_solve, lagrange_verify, FuncEqForm};
use crate::hilbert::{hilb_series, ForestOracle, ORACLE_LIMIT};
use crate::moduli::{smooth_model_series, SlopeStratumData};
use crate::rational::int;
use crate::series::points_up_to;
use crate::wall_crossing::{
    diagonal_check, kronecker_factorize, kronecker_skew, kronecker_stable_chi, kronecker_target, t_ab_automorphism,
};
use crate::{LatticePoint, Quiver, Stability, TruncatedSeries};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    /// Empty on success, otherwise the first failing instance.
    pub detail: String,
}

type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn lib<T>(r: crate::Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

/// Runs every check at degree bound `bound`.
pub fn run_suite(bound: u32) -> Vec<CheckOutcome> {
    let checks: [(&'static str, fn(u32) -> Check); 11] = [
        ("catalan", catalan),
        ("fuss_catalan_forests", fuss_catalan),
        ("trivial_stability", trivial_stability),
        ("duality_integrality", duality_integrality),
        ("lagrange_inversion", lagrange),
        ("pentagon", pentagon),
        ("kronecker_integrality", kronecker_integrality),
        ("diagonal_closed_form", diagonal),
        ("stable_chi", stable_chi),
        ("poisson_preservation", poisson),
        ("congruences", congruences),
    ];
    checks
        .iter()
        .map(|&(name, check)| {
            let outcome = check(bound);
            CheckOutcome { name, passed: outcome.is_ok(), detail: outcome.err().unwrap_or_default() }
        })
        .collect()
}

fn catalan(bound: u32) -> Check {
    let form = FuncEqForm::from_integers(1, &[(1, -1)]);
    let f = lib(funceq_solve(&form, bound))?;
    for (n, c) in f.univariate_coeffs().iter().enumerate() {
        let n = n as u32;
        let expected = gen_binomial(&int(2 * i64::from(n)), n) / int(i64::from(n) + 1);
        ensure!(*c == expected, "coefficient {n}: {c}");
    }
    let euler = lib(euler_factorize(&f, 1))?;
    for i in 1..=bound {
        ensure!(lib(duality_moebius(&form, i))? == euler.a(i), "a_{i}");
    }
    Ok(())
}

fn fuss_catalan(bound: u32) -> Check {
    let oracle_bound = bound.min(5).min(ORACLE_LIMIT);
    for m in 1..=4u32 {
        let q = Quiver::loops(m);
        let n = LatticePoint::new(vec![1]);
        let series = lib(hilb_series(&q, &n, bound))?;
        let oracle = lib(ForestOracle::new(&q, oracle_bound))?;
        for d in 0..=bound {
            let fc = gen_binomial(&int(i64::from(m * d)), d) / int(i64::from((m - 1) * d + 1));
            ensure!(series.coeff_at(&[d]) == fc, "{m} loops, degree {d}");
            if d <= oracle_bound {
                let count = lib(oracle.count(&n, &LatticePoint::new(vec![d])))?;
                ensure!(fc == int(count as i64), "{m} loops, degree {d}: {count} forests");
            }
        }
    }
    Ok(())
}

fn trivial_stability(bound: u32) -> Check {
    for q in [Quiver::linear(2), Quiver::linear(3), Quiver::kronecker(2)] {
        let n = q.rank();
        let chi = (0..n).map(|i| (LatticePoint::unit(n, i), 1)).collect();
        let data = lib(SlopeStratumData::new(q.clone(), Stability::trivial(n), int(0), bound.max(1), chi))?;
        for fr in points_up_to(n, 2).into_iter().skip(1) {
            let smooth = lib(smooth_model_series(&data, &fr.to_signed(), bound))?;
            ensure!(smooth == lib(hilb_series(&q, &fr, bound))?, "{:?} framed by {fr:?}", q.arrow_counts());
        }
    }
    Ok(())
}

fn duality_integrality(bound: u32) -> Check {
    for n in [-2i64, -1, 1, 2, 3] {
        for b1 in -2..=2 {
            for b2 in -2..=2 {
                let form = FuncEqForm::from_integers(n, &[(1, b1), (2, b2)]);
                let euler = lib(euler_factorize(&lib(funceq_solve(&form, bound))?, n))?;
                for i in 1..=bound {
                    let a = euler.a(i);
                    ensure!(a.is_integer(), "N {n}, b = ({b1},{b2}): a_{i} = {a}");
                    ensure!(lib(duality_moebius(&form, i))? == a, "N {n}, b = ({b1},{b2}): moebius a_{i}");
                }
            }
        }
    }
    Ok(())
}

fn lagrange(bound: u32) -> Check {
    for coeffs in [&[1, 1][..], &[1, 1, 1], &[1, -2, 0, 3], &[-1, 2, 1, 0, -1]] {
        let g = TruncatedSeries::univariate_int(bound, coeffs);
        for k in [-3, -2, -1, 1, 2, 3] {
            for d in 0..=bound {
                let (lhs, rhs, pass) = lib(lagrange_verify(&g, k, d))?;
                ensure!(pass, "G = {coeffs:?}, k {k}, d {d}: {lhs} vs {rhs}");
            }
        }
    }
    Ok(())
}

fn pentagon(bound: u32) -> Check {
    let t = |a, b| t_ab_automorphism(1, a, b, bound);
    let lhs = lib(lib(t(1, 0))?.compose(&lib(t(0, 1))?))?;
    let rhs = lib(lib(lib(t(0, 1))?.compose(&lib(t(1, 1))?))?.compose(&lib(t(1, 0))?))?;
    ensure!(lhs == rhs, "T_(1,0) T_(0,1) differs from T_(0,1) T_(1,1) T_(1,0)");
    let table = lib(kronecker_factorize(1, bound))?;
    for ((a, b), d) in table.entries() {
        let expected = int(i64::from(matches!((a, b), (1, 0) | (0, 1) | (1, 1))));
        ensure!(*d == expected, "d({a},{b}) = {d}");
    }
    Ok(())
}

fn kronecker_integrality(bound: u32) -> Check {
    for m in 1..=5 {
        let table = lib(kronecker_factorize(m, bound))?;
        if let Some((a, b)) = table.first_non_integral() {
            return Err(format!("m {m}: d({a},{b}) = {}", table.get(a, b)));
        }
        if bound >= 1 {
            ensure!(table.get(1, 0) == int(1) && table.get(0, 1) == int(1), "m {m}: endpoint exponents");
        }
    }
    Ok(())
}

fn diagonal(bound: u32) -> Check {
    for m in [3, 4] {
        for entry in lib(diagonal_check(&lib(kronecker_factorize(m, bound))?))? {
            ensure!(entry.agrees(), "m {m}, k {}: {} vs {}", entry.k, entry.table, entry.closed_form);
        }
    }
    Ok(())
}

fn stable_chi(bound: u32) -> Check {
    for m in 2..=4u32 {
        for (k, chi) in lib(kronecker_stable_chi(m, (1, 1), bound))? {
            let expected = if k == 1 { BigInt::from(m) } else { BigInt::from(0) };
            ensure!(chi == expected, "m {m}: chi({k},{k}) = {chi}");
        }
    }
    Ok(())
}

fn poisson(bound: u32) -> Check {
    for m in 1..=3 {
        let skew = kronecker_skew(m);
        let table = lib(kronecker_factorize(m, bound))?;
        let mut autos = lib(table.factors())?;
        autos.push(lib(table.ordered_product())?);
        autos.push(lib(kronecker_target(m, bound))?);
        for (k, t) in autos.iter().enumerate() {
            ensure!(lib(t.preserves_bracket(&skew))?, "m {m}: automorphism {k}");
        }
    }
    Ok(())
}

fn congruences(bound: u32) -> Check {
    let top = 10 * i64::from(bound.max(1));
    for p in [2u64, 3, 5, 7] {
        for a in 0..=top {
            for b in 0..=top as u64 {
                let report = lib(binomial_congruence_check(a, b, p))?;
                ensure!(report.passed(), "binom({a},{b}) at p = {p}");
            }
        }
    }
    for chi in -5i64..=5 {
        for n in 0..=bound.min(6) {
            let total: BigInt = partitions_of(n).iter().map(|lam| chi_symmetric_stratum(&BigInt::from(chi), lam)).sum();
            let expected = gen_binomial(&int(chi + i64::from(n) - 1), n);
            ensure!(BigRational::from_integer(total) == expected, "strata of S^{n} for chi {chi}");
        }
    }
    Ok(())
}
