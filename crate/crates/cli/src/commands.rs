//! Subcommand implementations and artifact emission.

use std::path::Path;

use banachlab::basis::{profile, BasisProfile, FiniteBasicSequence};
use banachlab::optkit::OptBudget;
use banachlab::renorm::{equivalence_constants, premise_check, PremiseReport};
use banachlab::scalar::format_rational;
use banachlab::select::{asymptotic_monotone_select, diagonal_profile, SelectConfig, SelectionTrace};
use banachlab::separation::{kottman_lower_bound, symmetric_separation_with, verify_separated, SeparationCertificate};
use banachlab::vecspace::NormConfig;
use banachlab::{Error, Evaluator, RenormSpec, Result, SpaceSpec, SparseVec, VERSION};
use serde::Serialize;

use crate::input;
use crate::{Command, Common};

/// Everything written for one run.
#[derive(Serialize)]
struct Artifact<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    config: &'a Command,
    result: T,
}

/// A CSV companion written next to the JSON artifact.
struct Csv {
    suffix: &'static str,
    body: String,
}

fn emit<T: Serialize>(cmd: &Command, result: T, csv: Vec<Csv>, summary: Option<String>) -> Result<()> {
    let artifact = Artifact { tool: "banachlab", version: VERSION, config: cmd, result };
    let json = serde_json::to_string_pretty(&artifact)? + "\n";
    match &cmd.common().out {
        Some(path) => {
            std::fs::write(path, json)?;
            for c in csv {
                std::fs::write(csv_path(path, c.suffix), c.body)?;
            }
            if let Some(s) = summary {
                println!("{s}");
            }
        }
        None => match summary {
            Some(s) if matches!(cmd, Command::Norm { .. }) => println!("{s}"),
            _ => print!("{json}"),
        },
    }
    Ok(())
}

/// `out.json` with suffix `profile` becomes `out.profile.csv`.
fn csv_path(out: &Path, suffix: &str) -> std::path::PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "out".into());
    out.with_file_name(format!("{stem}.{suffix}.csv"))
}

fn evaluator(common: &Common) -> Result<Evaluator> {
    let mut config = NormConfig::default();
    config.ic_budget = match &common.budget {
        Some(_) => input::budget(common.budget.as_deref(), common.seed)?,
        None => OptBudget { seed: common.seed, ..config.ic_budget },
    };
    Ok(Evaluator::new(config))
}

fn budget(common: &Common) -> Result<OptBudget> {
    input::budget(common.budget.as_deref(), common.seed)
}

pub fn run(cmd: &Command) -> Result<()> {
    match cmd {
        Command::Norm { space, renorm, vec, common } => norm(cmd, &input::space(space, renorm.as_deref())?, &input::vector(vec)?, common),
        Command::Profile { space, renorm, vecs, common } => {
            let seq = FiniteBasicSequence::new(input::space(space, renorm.as_deref())?, input::vectors(vecs)?)?;
            let p = profile(&seq, &budget(common)?)?;
            let summary = format!("basis constant {:?} (certified: {})", p.basis_constant, p.certified);
            let csv = vec![Csv { suffix: "profile", body: p.to_csv() }];
            emit(cmd, p, csv, Some(summary))
        }
        Command::Select { source, epsilons, stages, guard, common } => {
            let source = input::source(source)?;
            let eps = input::epsilons(epsilons, *stages)?;
            let cfg = SelectConfig { budget: budget(common)?, guard: *guard, ..SelectConfig::default() };
            let trace = asymptotic_monotone_select(&source, &eps, *stages, &cfg, None)?;
            let prof = diagonal_profile(&source, &trace, &cfg.budget)?;
            let summary = format!("diagonal {:?}", trace.diagonal);
            let csv = prof.iter().map(|p| Csv { suffix: "profile", body: p.to_csv() }).collect();
            emit(cmd, SelectResult { trace, diagonal_profile: prof }, csv, Some(summary))
        }
        Command::Renorm { space, renorm, vecs, samples, dim, common } => {
            let base = input::space(space, None)?;
            let spec = input::renorm(renorm)?;
            let probes = input::vectors(vecs)?;
            let r = renorm_report(&base, spec, &probes, *samples, *dim, common)?;
            let summary = format!("sandwich estimate [{:?}, {:?}]", r.sandwich.0, r.sandwich.1);
            emit(cmd, r, Vec::new(), Some(summary))
        }
        Command::Separate { space, renorm, vecs, delta, common } => {
            let space = input::space(space, renorm.as_deref())?;
            let ev = evaluator(common)?;
            let cert = symmetric_separation_with(&ev, &space, &input::vectors(vecs)?, common.exact)?;
            let verified = delta.map(|d| verify_separated(&cert, d, 0.0)).transpose()?;
            let summary = separation_summary(&cert);
            let csv = vec![Csv { suffix: "pairs", body: pairs_csv(&cert) }];
            emit(cmd, SeparationResult { certificate: cert, delta: *delta, verified }, csv, Some(summary))
        }
        Command::Kottman { space, renorm, k, dim, common } => {
            let space = input::space(space, renorm.as_deref())?;
            let cert = kottman_lower_bound(&space, *k, *dim, &budget(common)?)?;
            let summary = separation_summary(&cert);
            let csv = vec![Csv { suffix: "pairs", body: pairs_csv(&cert) }];
            emit(cmd, cert, csv, Some(summary))
        }
        Command::TsirelsonTable { dim, .. } => {
            let rows = tsirelson_table(*dim)?;
            let mut body = String::from("i,j,t_plus,t_minus,tstar_plus,tstar_minus\n");
            for r in &rows {
                body += &format!("{},{},{},{},{},{}\n", r.i, r.j, r.t_plus, r.t_minus, r.tstar_plus, r.tstar_minus);
            }
            let summary = format!("{} pairs", rows.len());
            emit(cmd, rows, vec![Csv { suffix: "table", body }], Some(summary))
        }
    }
}

#[derive(Serialize)]
struct NormResult {
    space: SpaceSpec,
    value: f64,
    certified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    exact: Option<String>,
}

fn norm(cmd: &Command, space: &SpaceSpec, v: &SparseVec, common: &Common) -> Result<()> {
    let ev = evaluator(common)?;
    let r = if common.exact {
        let exact = ev
            .norm_exact(space, &v.to_rational())?
            .ok_or_else(|| Error::Unsupported(format!("no exact path for {space}")))?;
        NormResult { space: space.clone(), value: banachlab::Scalar::to_f64(&exact), certified: true, exact: Some(format_rational(&exact)) }
    } else {
        let n = ev.eval(space, v)?;
        NormResult { space: space.clone(), value: n.value, certified: n.certified, exact: None }
    };
    let summary = r.exact.clone().unwrap_or_else(|| r.value.to_string());
    emit(cmd, r, Vec::new(), Some(summary))
}

#[derive(Serialize)]
struct SelectResult {
    trace: SelectionTrace,
    diagonal_profile: Option<BasisProfile>,
}

#[derive(Serialize)]
struct SeparationResult {
    certificate: SeparationCertificate,
    #[serde(skip_serializing_if = "Option::is_none")]
    delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    verified: Option<bool>,
}

fn separation_summary(cert: &SeparationCertificate) -> String {
    match &cert.separation_exact {
        Some(s) => format!("separation {s} (exact)"),
        None => format!("separation {:?} (certified: {})", cert.separation, cert.certified),
    }
}

fn pairs_csv(cert: &SeparationCertificate) -> String {
    let mut out = String::from("i,j,min_norm\n");
    for (i, j, v) in &cert.pairs {
        out += &format!("{i},{j},{v:?}\n");
    }
    out
}

#[derive(Serialize)]
struct ProbeValue {
    base_norm: f64,
    renormed_norm: f64,
    certified: bool,
}

#[derive(Serialize)]
struct RenormReport {
    space: SpaceSpec,
    probes: Vec<ProbeValue>,
    /// Min and max of renormed/base over seeded samples.
    sandwich: (f64, f64),
    #[serde(skip_serializing_if = "Option::is_none")]
    premise: Option<PremiseReport>,
}

fn renorm_report(
    base: &SpaceSpec,
    spec: RenormSpec,
    probes: &[SparseVec],
    samples: usize,
    dim: usize,
    common: &Common,
) -> Result<RenormReport> {
    let ev = evaluator(common)?;
    let premise = match &spec {
        RenormSpec::MaxBiortho { epsilon, functionals } => Some(premise_check(base, *epsilon, functionals, samples, common.seed, dim)?),
        _ => None,
    };
    let space = SpaceSpec::renormed(base.clone(), spec);
    let probes = probes
        .iter()
        .map(|v| {
            let r = ev.eval(&space, v)?;
            Ok(ProbeValue { base_norm: ev.norm(base, v)?, renormed_norm: r.value, certified: r.certified })
        })
        .collect::<Result<Vec<_>>>()?;
    let sandwich = equivalence_constants(base, &space, samples, common.seed, dim)?;
    Ok(RenormReport { space, probes, sandwich, premise })
}

#[derive(Serialize)]
struct TableRow {
    i: usize,
    j: usize,
    t_plus: String,
    t_minus: String,
    tstar_plus: String,
    tstar_minus: String,
}

fn tsirelson_table(dim: usize) -> Result<Vec<TableRow>> {
    if dim < 2 {
        return Err(Error::Parameter("tsirelson-table needs dim ≥ 2".into()));
    }
    let ev = Evaluator::new(NormConfig { tsirelson_cap: dim.max(NormConfig::default().tsirelson_cap), ..NormConfig::default() });
    let exact = |space: &SpaceSpec, v: &SparseVec| -> Result<String> {
        let n = ev.norm_exact(space, &v.to_rational())?.ok_or_else(|| Error::Unsupported(format!("no exact path for {space}")))?;
        Ok(format_rational(&n))
    };
    let (t, ts) = (SpaceSpec::tsirelson(), SpaceSpec::tsirelson_dual());
    let mut rows = Vec::new();
    for i in 1..=dim {
        for j in (i + 1)..=dim {
            let (ei, ej) = (SparseVec::unit(i), SparseVec::unit(j));
            let (p, m) = (ei.add(&ej), ei.sub(&ej));
            rows.push(TableRow { i, j, t_plus: exact(&t, &p)?, t_minus: exact(&t, &m)?, tstar_plus: exact(&ts, &p)?, tstar_minus: exact(&ts, &m)? });
        }
    }
    Ok(rows)
}
