//! One adapter per subcommand: read inputs, call the library, shape the
//! result.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use num_rational::BigRational;
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use quiver_dt::duality::{
    euler_expand, funceq_extract, funceq_solve, integrality_report, moebius_report, EulerProductForm, FuncEqForm,
    IntegralityReport,
};
use quiver_dt::hilbert::{hilb_series, integer_coefficients, ForestOracle};
use quiver_dt::moduli::{r_chi_series, s_series, smooth_model_series, SlopeStratumData, StratumFile};
use quiver_dt::rational::format_rational;
use quiver_dt::verify::run_suite;
use quiver_dt::wall_crossing::{diagonal_check, kronecker_factorize, stable_chi_all};
use quiver_dt::{Error, LatticePoint, Quiver, Stability, TruncatedSeries};

use crate::args::{Cli, Command, DtArgs, DualityArgs, DualityOp, HilbArgs, ModuliArgs, ModuliSeries};
use crate::output::{join, Report};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Consistency(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Input(_) => 2,
            CliError::Consistency(_) => 3,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::NonIntegral { .. } | Error::Factorization(_) | Error::InconsistentObservation { .. } => {
                CliError::Consistency(e.to_string())
            }
            _ => CliError::Input(e.to_string()),
        }
    }
}

/// A report plus the consistency failure it documents, if any. The report is
/// written either way.
pub struct Outcome {
    pub report: Report,
    pub failure: Option<String>,
}

impl From<Report> for Outcome {
    fn from(report: Report) -> Self {
        Outcome { report, failure: None }
    }
}

pub fn dispatch(cli: &Cli) -> Result<Outcome, CliError> {
    let bound = cli.max_degree;
    match &cli.command {
        Command::Hilb(args) => hilb(args, bound),
        Command::Moduli(args) => moduli(args, bound).map(Outcome::from),
        Command::Duality(args) => duality(args, bound),
        Command::Dt(args) => dt(args, bound),
        Command::Verify => Ok(verify(bound)),
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn series_rows(series: &TruncatedSeries) -> Vec<Vec<String>> {
    series.terms().map(|(p, c)| vec![join(p.as_slice()), format_rational(c)]).collect()
}

fn series_report(mut json: Value, series: &TruncatedSeries) -> Report {
    json["series"] = serde_json::to_value(series.to_records()).expect("records serialize");
    Report { json, header: vec!["exponents", "coefficient"], rows: series_rows(series) }
}

fn hilb(args: &HilbArgs, bound: u32) -> Result<Outcome, CliError> {
    let q: Quiver = read_json(&args.quiver)?;
    let framing = args.framing.clone().unwrap_or_else(|| vec![1; q.rank()]);
    let n = LatticePoint::new(framing.clone());
    let series = hilb_series(&q, &n, bound)?;
    let mut report = series_report(json!({ "framing": framing, "max_degree": bound }), &series);
    if !args.oracle {
        return Ok(report.into());
    }

    let forests = ForestOracle::new(&q, bound)?.forests(&n)?;
    let agrees = integer_coefficients(&series).as_ref() == Some(&forests);
    report.json["oracle_agrees"] = agrees.into();
    report.header.push("forests");
    for (row, (p, _)) in report.rows.iter_mut().zip(series.terms()) {
        row.push(forests.get(p).copied().unwrap_or(0).to_string());
    }
    let failure = (!agrees).then(|| "forest enumeration disagrees with the series".to_string());
    Ok(Outcome { report, failure })
}

fn moduli(args: &ModuliArgs, bound: u32) -> Result<Report, CliError> {
    let q: Quiver = read_json(&args.quiver)?;
    let theta: Stability = read_json(&args.stability)?;
    let file: StratumFile = read_json(&args.stratum)?;
    let data = SlopeStratumData::from_file(q, theta, bound, &file)?;
    let point = || -> Result<LatticePoint, CliError> {
        let v = args
            .vector
            .iter()
            .map(|&x| u32::try_from(x))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| CliError::Input("a dimension vector cannot have negative entries".into()))?;
        Ok(LatticePoint::new(v))
    };
    let (kind, series) = match args.series {
        ModuliSeries::Q => ("q", smooth_model_series(&data, &args.vector, bound)?),
        ModuliSeries::R => ("r", r_chi_series(&data, &point()?, bound)?),
        ModuliSeries::S => ("s", s_series(&data, &point()?, bound)?),
    };
    let json = json!({
        "kind": kind,
        "vector": args.vector,
        "mu": format_rational(data.mu()),
        "max_degree": bound,
    });
    Ok(series_report(json, &series))
}

fn exponent_map(pairs: &[(u32, BigRational)]) -> Result<BTreeMap<u32, BigRational>, CliError> {
    let mut map = BTreeMap::new();
    for (i, v) in pairs {
        if map.insert(*i, v.clone()).is_some() {
            return Err(CliError::Usage(format!("exponent index {i} given twice")));
        }
    }
    Ok(map)
}

fn integrality_outcome(report: IntegralityReport, form: &FuncEqForm) -> Outcome {
    // integrality is only promised for integral b
    let failure = form
        .exponents
        .values()
        .all(|b| b.is_integer())
        .then(|| report.first_non_integral())
        .flatten()
        .map(|i| format!("a_{i} is not an integer although every b_i is"));
    let rows = report
        .a
        .iter()
        .map(|e| vec![e.i.to_string(), e.value.clone(), e.integral.to_string()])
        .collect();
    let json = serde_json::to_value(&report).expect("report serializes");
    Outcome { report: Report { json, header: vec!["i", "value", "integral"], rows }, failure }
}

fn duality(args: &DualityArgs, bound: u32) -> Result<Outcome, CliError> {
    let extract = args.op == DualityOp::Extract;
    if extract && !args.b.is_empty() {
        return Err(CliError::Usage("extract reads --a, not --b".into()));
    }
    if !extract && !args.a.is_empty() {
        return Err(CliError::Usage("--a only applies to --op extract".into()));
    }
    let n = args.n;
    if extract {
        let euler = EulerProductForm::new(n, exponent_map(&args.a)?);
        let form = funceq_extract(&euler_expand(&euler, bound)?, n)?;
        let entries: Vec<(u32, String)> = (1..=bound).map(|i| (i, format_rational(&form.b(i)))).collect();
        let json = json!({
            "N": n,
            "b": entries.iter().map(|(i, v)| json!({ "i": i, "value": v })).collect::<Vec<_>>(),
        });
        let rows = entries.into_iter().map(|(i, v)| vec![i.to_string(), v]).collect();
        return Ok(Report { json, header: vec!["i", "value"], rows }.into());
    }

    let form = FuncEqForm::new(n, exponent_map(&args.b)?);
    Ok(match args.op {
        DualityOp::Solve => series_report(json!({ "N": n, "max_degree": bound }), &funceq_solve(&form, bound)?).into(),
        DualityOp::Factorize => integrality_outcome(integrality_report(&form, bound)?, &form),
        DualityOp::Moebius => integrality_outcome(moebius_report(&form, bound)?, &form),
        DualityOp::Extract => unreachable!("handled above"),
    })
}

fn dt(args: &DtArgs, bound: u32) -> Result<Outcome, CliError> {
    let table = kronecker_factorize(args.m, bound)?;
    if let Some((a, b)) = table.first_non_integral() {
        return Err(CliError::Consistency(format!(
            "d({a},{b},{}) = {} is not an integer",
            args.m,
            format_rational(&table.get(a, b))
        )));
    }
    let stable = if args.stable_chi { stable_chi_all(&table)? } else { Vec::new() };

    let mut json = serde_json::to_value(table.to_json(&stable)).expect("table serializes");
    let mut rows: Vec<Vec<String>> = table
        .entries()
        .map(|((a, b), d)| vec!["d".into(), a.to_string(), b.to_string(), format_rational(d)])
        .collect();
    for s in &stable {
        let (a, b) = s.ray;
        for (k, chi) in &s.chi {
            rows.push(vec!["chi".into(), (k * a).to_string(), (k * b).to_string(), chi.to_string()]);
        }
    }

    let mut failure = None;
    if args.diagonal_check {
        let entries = diagonal_check(&table)?;
        json["diagonal"] = entries
            .iter()
            .map(|e| json!({ "k": e.k, "d": format_rational(&e.table), "closed_form": format_rational(&e.closed_form) }))
            .collect();
        for e in &entries {
            rows.push(vec!["diagonal".into(), e.k.to_string(), e.k.to_string(), format_rational(&e.closed_form)]);
        }
        failure = entries
            .iter()
            .find(|e| !e.agrees())
            .map(|e| format!("d({k},{k}) differs from the closed form", k = e.k));
    }
    Ok(Outcome { report: Report { json, header: vec!["record", "a", "b", "value"], rows }, failure })
}

fn verify(bound: u32) -> Outcome {
    let outcomes = run_suite(bound);
    let failed: Vec<_> = outcomes.iter().filter(|c| !c.passed).map(|c| c.name).collect();
    let rows = outcomes
        .iter()
        .map(|c| vec![c.name.to_string(), c.passed.to_string(), c.detail.clone()])
        .collect();
    let json = json!({ "max_degree": bound, "checks": outcomes });
    let failure = (!failed.is_empty()).then(|| format!("failed checks: {}", failed.join(", ")));
    Outcome { report: Report { json, header: vec!["check", "passed", "detail"], rows }, failure }
}
