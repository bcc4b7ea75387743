//! Generating series of smooth models over a single slope.
//!
//! For a slope `μ` and integers `χ(e)` attached to the slope-`μ` dimension
//! vectors, the series `R^d` are the unique solutions of
//!
//! ```text
//! R^d = 1 + t^d R^d ∏_e (R^e)^{−⟨d,e⟩ χ(e)}
//! ```
//!
//! and the smooth-model series for a functional `η` is
//! `Q^η = ∏_e (R^e)^{χ(e) η(e)}`. The series `S^d = Q^{⟨d,_⟩}` satisfy
//! `S^d = ∏_e (1 − t^e / S^e)^{−⟨d,e⟩ χ(e)}`.
//!
//! The `χ(e)` are arbitrary integers; the equations are polynomial in them.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::rational::{format_rational, parse_rational};
use crate::series::{points_up_to, solve_by_degree};
use crate::{Error, LatticePoint, Quiver, Result, Stability, TruncatedSeries};

/// The slope-`μ` part of a quiver with stability, truncated at a total
/// degree, together with the Euler characteristics `χ(e)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SlopeStratumData {
    quiver: Quiver,
    theta: Stability,
    mu: BigRational,
    bound: u32,
    elements: Vec<LatticePoint>,
    chi: BTreeMap<LatticePoint, i64>,
}

/// On-disk form: `{"mu":"p/q","elements":[[ints]],"chi":[ints]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratumFile {
    pub mu: String,
    pub elements: Vec<Vec<u32>>,
    pub chi: Vec<i64>,
}

impl SlopeStratumData {
    /// Enumerates every slope-`μ` point up to `bound`. Points missing from
    /// `chi` get `χ = 0`.
    pub fn new(
        quiver: Quiver,
        theta: Stability,
        mu: BigRational,
        bound: u32,
        chi: BTreeMap<LatticePoint, i64>,
    ) -> Result<Self> {
        if theta.rank() != quiver.rank() {
            return Err(Error::RankMismatch { left: quiver.rank(), right: theta.rank() });
        }
        let elements = points_up_to(quiver.rank(), bound)
            .into_iter()
            .skip(1)
            .filter(|d| theta.slope(d).is_ok_and(|s| s == mu))
            .collect::<Vec<_>>();
        for (d, &c) in &chi {
            if d.rank() != quiver.rank() {
                return Err(Error::RankMismatch { left: quiver.rank(), right: d.rank() });
            }
            if d.is_zero() || theta.slope(d)? != mu {
                return Err(Error::WrongSlope { point: d.clone(), mu: format_rational(&mu) });
            }
            if d.degree() > bound && c != 0 {
                return Err(Error::Invalid(format!("{d:?} lies beyond the bound {bound}")));
            }
        }
        let chi = chi
            .into_iter()
            .filter(|(d, c)| *c != 0 && d.degree() <= bound)
            .collect();
        Ok(SlopeStratumData { quiver, theta, mu, bound, elements, chi })
    }

    pub fn from_file(quiver: Quiver, theta: Stability, bound: u32, file: &StratumFile) -> Result<Self> {
        if file.elements.len() != file.chi.len() {
            return Err(Error::Invalid("elements and chi differ in length".into()));
        }
        let chi = file
            .elements
            .iter()
            .map(|e| LatticePoint::new(e.clone()))
            .zip(file.chi.iter().copied())
            .collect();
        Self::new(quiver, theta, parse_rational(&file.mu)?, bound, chi)
    }

    pub fn to_file(&self) -> StratumFile {
        StratumFile {
            mu: format_rational(&self.mu),
            elements: self.elements.iter().map(|e| e.as_slice().to_vec()).collect(),
            chi: self.elements.iter().map(|e| self.chi(e)).collect(),
        }
    }

    pub fn quiver(&self) -> &Quiver {
        &self.quiver
    }

    pub fn theta(&self) -> &Stability {
        &self.theta
    }

    pub fn mu(&self) -> &BigRational {
        &self.mu
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    /// All slope-`μ` points up to the bound, graded-lex ordered.
    pub fn elements(&self) -> &[LatticePoint] {
        &self.elements
    }

    pub fn chi(&self, e: &LatticePoint) -> i64 {
        self.chi.get(e).copied().unwrap_or(0)
    }

    /// Points with `χ ≠ 0`.
    pub fn support(&self) -> impl Iterator<Item = (&LatticePoint, i64)> {
        self.chi.iter().map(|(e, &c)| (e, c))
    }

    fn check_element(&self, d: &LatticePoint) -> Result<()> {
        if d.rank() != self.quiver.rank() {
            return Err(Error::RankMismatch { left: self.quiver.rank(), right: d.rank() });
        }
        if d.is_zero() || self.theta.slope(d)? != self.mu {
            return Err(Error::WrongSlope { point: d.clone(), mu: format_rational(&self.mu) });
        }
        Ok(())
    }

    fn euler(&self, d: &LatticePoint, e: &LatticePoint) -> i64 {
        self.quiver.euler_form_signed(&d.to_signed(), &e.to_signed())
    }

    /// Solves for `R^e` on the support of `χ` plus the extra points.
    fn solve_r(&self, extra: &[LatticePoint], bound: u32) -> Result<BTreeMap<LatticePoint, TruncatedSeries>> {
        let mut points: Vec<LatticePoint> = self.chi.keys().cloned().collect();
        for d in extra {
            if !points.contains(d) {
                points.push(d.clone());
            }
        }
        let support: Vec<(usize, i64)> = points
            .iter()
            .enumerate()
            .filter_map(|(k, e)| self.chi.get(e).map(|&c| (k, c)))
            .collect();
        let rank = self.quiver.rank();
        let family = solve_by_degree(points.len(), rank, bound, |r| {
            points
                .iter()
                .zip(r)
                .map(|(d, rd)| r_step(self, d, rd, r, &points, &support))
                .collect()
        })?;
        Ok(points.into_iter().zip(family).collect())
    }
}

/// One pass of `R^d ← 1 + t^d R^d ∏_e (R^e)^{−⟨d,e⟩χ(e)}`.
fn r_step(
    data: &SlopeStratumData,
    d: &LatticePoint,
    rd: &TruncatedSeries,
    r: &[TruncatedSeries],
    points: &[LatticePoint],
    support: &[(usize, i64)],
) -> Result<TruncatedSeries> {
    let mut product = rd.clone();
    for &(k, c) in support {
        let exponent = -data.euler(d, &points[k]) * c;
        if exponent != 0 {
            product = &product * &r[k].pow_int(exponent)?;
        }
    }
    let one = TruncatedSeries::one(rd.rank(), rd.bound());
    Ok(&one + &product.shift(d))
}

/// `R^d` truncated at `bound`.
pub fn r_chi_series(data: &SlopeStratumData, d: &LatticePoint, bound: u32) -> Result<TruncatedSeries> {
    data.check_element(d)?;
    let mut family = data.solve_r(std::slice::from_ref(d), bound)?;
    Ok(family.remove(d).expect("requested point is solved"))
}

/// `Q^η = ∏_e (R^e)^{χ(e) η(e)}` for an integer functional `η`.
pub fn smooth_model_series(data: &SlopeStratumData, eta: &[i64], bound: u32) -> Result<TruncatedSeries> {
    if eta.len() != data.quiver.rank() {
        return Err(Error::RankMismatch { left: data.quiver.rank(), right: eta.len() });
    }
    let r = data.solve_r(&[], bound)?;
    product_of_powers(data, &r, bound, |e| e.pair(eta))
}

fn product_of_powers(
    data: &SlopeStratumData,
    r: &BTreeMap<LatticePoint, TruncatedSeries>,
    bound: u32,
    weight: impl Fn(&LatticePoint) -> i64,
) -> Result<TruncatedSeries> {
    let mut result = TruncatedSeries::one(data.quiver.rank(), bound);
    for (e, c) in data.support() {
        let exponent = c * weight(e);
        if exponent != 0 {
            result = &result * &r[e].pow_int(exponent)?;
        }
    }
    Ok(result)
}

/// `S^d = Q^{⟨d,_⟩} = ∏_e (R^e)^{⟨d,e⟩ χ(e)}`.
pub fn s_series(data: &SlopeStratumData, d: &LatticePoint, bound: u32) -> Result<TruncatedSeries> {
    data.check_element(d)?;
    let r = data.solve_r(&[], bound)?;
    product_of_powers(data, &r, bound, |e| data.euler(d, e))
}

/// Right-hand side `∏_e (1 − t^e / S^e)^{−⟨d,e⟩ χ(e)}` of the equation
/// characterizing `S^d`, built from independently computed `S^e`.
pub fn s_equation_rhs(data: &SlopeStratumData, d: &LatticePoint, bound: u32) -> Result<TruncatedSeries> {
    data.check_element(d)?;
    let mut result = TruncatedSeries::one(data.quiver.rank(), bound);
    for (e, c) in data.support() {
        let exponent = -data.euler(d, e) * c;
        if exponent == 0 {
            continue;
        }
        let se = s_series(data, e, bound)?;
        let one = TruncatedSeries::one(se.rank(), bound);
        let factor = &one - &se.inverse()?.shift(e);
        result = &result * &factor.pow_int(exponent)?;
    }
    Ok(result)
}

/// Recovers `χ` from observed series `S^d`.
///
/// Elements are processed by increasing total degree. At the element `e`,
/// the `t^e` coefficient of `S^d` equals a value determined by the already
/// known `χ` plus `⟨d,e⟩ χ(e)`; every observed `d` with `⟨d,e⟩ ≠ 0` yields
/// `χ(e)` and all of them must agree on one integer. Finally the whole family
/// is recomputed from the extracted values and compared with the input.
pub fn extract_stable_chi(
    quiver: &Quiver,
    theta: &Stability,
    mu: &BigRational,
    observed: &BTreeMap<LatticePoint, TruncatedSeries>,
    bound: u32,
) -> Result<BTreeMap<LatticePoint, i64>> {
    let mut data = SlopeStratumData::new(quiver.clone(), theta.clone(), mu.clone(), bound, BTreeMap::new())?;
    let elements = data.elements.clone();
    for d in observed.keys() {
        data.check_element(d)?;
    }
    for e in &elements {
        if let Some(s) = observed.get(e) {
            if s.bound() < bound {
                return Err(Error::BoundMismatch { left: bound, right: s.bound() });
            }
        }
    }

    for e in &elements {
        let mut value: Option<BigRational> = None;
        let r = data.solve_r(&[], e.degree())?;
        for (d, s) in observed {
            let pairing = data.euler(d, e);
            if pairing == 0 {
                continue;
            }
            let current = product_of_powers(&data, &r, e.degree(), |f| data.euler(d, f))?;
            let gap = s.coeff(e) - current.coeff(e);
            let candidate = gap / BigRational::from_integer(pairing.into());
            match &value {
                None => value = Some(candidate),
                Some(v) if *v != candidate => {
                    return Err(Error::InconsistentObservation {
                        point: e.clone(),
                        reason: format!(
                            "series disagree on chi: {} vs {}",
                            format_rational(v),
                            format_rational(&candidate)
                        ),
                    })
                }
                Some(_) => {}
            }
        }
        let value = value.ok_or_else(|| Error::InconsistentObservation {
            point: e.clone(),
            reason: "chi is not determined: <d,e> = 0 for every observed d".into(),
        })?;
        if !value.is_integer() {
            return Err(Error::InconsistentObservation {
                point: e.clone(),
                reason: format!("non-integral chi {}", format_rational(&value)),
            });
        }
        let chi = value.to_integer().to_i64().ok_or_else(|| Error::InconsistentObservation {
            point: e.clone(),
            reason: "chi out of range".into(),
        })?;
        if chi != 0 {
            data.chi.insert(e.clone(), chi);
        }
    }

    for (d, s) in observed {
        if s_series(&data, d, bound)? != s.truncate(bound) {
            return Err(Error::InconsistentObservation {
                point: d.clone(),
                reason: "extracted chi does not reproduce the observed series".into(),
            });
        }
    }
    Ok(elements.into_iter().map(|e| (e.clone(), data.chi(&e))).collect())
}

/// Whether `χ(e)` is visible to extraction from the series `S^d` of the
/// given stratum, i.e. `⟨d,e⟩ ≠ 0` for some element `d`.
pub fn chi_is_observable(data: &SlopeStratumData, e: &LatticePoint) -> bool {
    data.elements.iter().any(|d| data.euler(d, e) != 0)
}
