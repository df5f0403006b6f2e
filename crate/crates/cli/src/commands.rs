use std::fmt::Display;
use std::path::Path;

use fdepth::bounds::{bound_curve, criteria_exclude, usefulness_of, ClosedForm};
use fdepth::classify::{class_of, ensemble_avg_depth, ensemble_depth, Ensemble, EnsembleMember};
use fdepth::genfun::parse_genfun;
use fdepth::partition::enumerate_partitions;
use fdepth::qstate::{qfi_state, verify_criterion, Certificate, CollectiveOp, CriterionReport, StateSpec};
use fdepth::verify::{run_suite, SuiteName, SuiteReport, VerifyConfig};
use fdepth::{Family, GenFun, GraphFormat, HasseGraph, OrderKind, Partition};
use serde::{Deserialize, Serialize};

use crate::output::{csv_table, emit, json, read, real};
use crate::{Failure, Format, Status};

pub fn genfun(spec: &str, unchecked: bool) -> Result<GenFun, Failure> {
    parse_genfun(spec, !unchecked).map_err(|e| Failure::usage(format!("--f {spec:?}: {e}")))
}

fn pick(format: Option<Format>, default: Format, allowed: &[Format]) -> Result<Format, Failure> {
    let f = format.unwrap_or(default);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        Err(Failure::usage(format!("format {f:?} is not available for this command")))
    }
}

/// Value of `f` at `xi`, exact where the family is integer valued.
fn value(f: &GenFun, xi: &Partition) -> String {
    match f.evaluate_exact(xi) {
        Some(v) => v.to_string(),
        None => real(f.evaluate(xi)),
    }
}

fn labels(ps: &[Partition]) -> String {
    ps.iter().map(Partition::label).collect::<Vec<_>>().join(";")
}

#[derive(Serialize)]
struct PartitionRow {
    parts: Partition,
    h: u32,
    w: u32,
    r: i64,
    t: u32,
    s2: u64,
}

pub fn partitions(n: u32, format: Option<Format>, out: Option<&Path>) -> Result<Status, Failure> {
    let format = pick(format, Format::Csv, &[Format::Csv, Format::Json])?;
    let all = enumerate_partitions(n).map_err(Failure::usage)?;
    let rows: Vec<PartitionRow> = all
        .into_iter()
        .map(|p| PartitionRow { h: p.height(), w: p.width(), r: p.rank(), t: p.toughness(), s2: p.squareability(), parts: p })
        .collect();
    let text = match format {
        Format::Json => json(&rows)?,
        _ => csv_table(
            &["parts", "h", "w", "r", "t", "s2"],
            rows.iter().map(|r| {
                vec![r.parts.label(), r.h.to_string(), r.w.to_string(), r.r.to_string(), r.t.to_string(), r.s2.to_string()]
            }),
        )?,
    };
    emit(out, &text)?;
    Ok(Status::Ok)
}

pub fn hasse(n: u32, order: OrderKind, format: Option<Format>, out: Option<&Path>) -> Result<Status, Failure> {
    let format = match pick(format, Format::Dot, &[Format::Dot, Format::Json])? {
        Format::Json => GraphFormat::Json,
        _ => GraphFormat::Dot,
    };
    let graph = HasseGraph::build(n, order).map_err(Failure::usage)?;
    let mut text = graph.render(format).map_err(Failure::io)?;
    if !text.ends_with('\n') {
        text.push('\n');
    }
    emit(out, &text)?;
    Ok(Status::Ok)
}

#[derive(Serialize)]
struct ValueRow {
    parts: Partition,
    f_value: f64,
}

pub fn genfun_table(n: u32, f: &GenFun, format: Option<Format>, out: Option<&Path>) -> Result<Status, Failure> {
    let format = pick(format, Format::Csv, &[Format::Csv, Format::Json])?;
    let all = enumerate_partitions(n).map_err(Failure::usage)?;
    let text = match format {
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                f: &'a GenFun,
                n: u32,
                rows: Vec<ValueRow>,
            }
            let rows = all.into_iter().map(|p| ValueRow { f_value: f.evaluate(&p), parts: p }).collect();
            json(&Doc { f, n, rows })?
        }
        _ => csv_table(&["parts", "f_value"], all.iter().map(|p| vec![p.label(), value(f, p)]))?,
    };
    emit(out, &text)?;
    Ok(Status::Ok)
}

#[derive(Serialize)]
struct BoundDoc<'a> {
    f: &'a GenFun,
    n: u32,
    closed_form: Option<ClosedForm>,
    rows: Vec<BoundDocRow>,
}

#[derive(Serialize)]
struct BoundDocRow {
    k: f64,
    b: u64,
    closed: Option<i64>,
    /// `nk`, the producibility bound without the remainder term.
    prod_weak: Option<i64>,
    strict: bool,
    witnesses: Vec<Partition>,
}

pub fn bounds(n: u32, f: &GenFun, format: Option<Format>, out: Option<&Path>) -> Result<Status, Failure> {
    let format = pick(format, Format::Csv, &[Format::Csv, Format::Json])?;
    let table = bound_curve(f, n).map_err(Failure::usage)?;
    let useful = usefulness_of(&table);
    let form = ClosedForm::for_genfun(f);
    let weak = matches!(f.family(), Family::Width);
    let rows: Vec<BoundDocRow> = table
        .rows
        .iter()
        .zip(&useful.rows)
        .map(|(r, u)| {
            let k = r.k as i64;
            BoundDocRow {
                k: r.k,
                b: r.b,
                closed: form.and_then(|c| c.evaluate(k, n).ok()),
                prod_weak: weak.then(|| ClosedForm::ProdWeak.evaluate(k, n).ok()).flatten(),
                strict: u.strict,
                witnesses: r.witnesses.clone(),
            }
        })
        .collect();
    let text = match format {
        Format::Json => json(&BoundDoc { f, n, closed_form: form, rows })?,
        _ => {
            let mut header = vec!["k", "b"];
            if form.is_some() {
                header.push("closed_form");
            }
            if weak {
                header.push("prod_weak");
            }
            header.extend(["strict", "witnesses"]);
            csv_table(
                &header,
                rows.iter().map(|r| {
                    let mut row = vec![real(r.k), r.b.to_string()];
                    if form.is_some() {
                        row.push(r.closed.map(|c| c.to_string()).unwrap_or_default());
                    }
                    if weak {
                        row.push(r.prod_weak.map(|c| c.to_string()).unwrap_or_default());
                    }
                    row.push(r.strict.to_string());
                    row.push(labels(&r.witnesses));
                    row
                }),
            )?
        }
    };
    emit(out, &text)?;
    Ok(Status::Ok)
}

pub fn usefulness(n: u32, f: &GenFun, format: Option<Format>, out: Option<&Path>) -> Result<Status, Failure> {
    let format = pick(format, Format::Json, &[Format::Csv, Format::Json])?;
    let table = bound_curve(f, n).map_err(Failure::usage)?;
    let report = usefulness_of(&table);
    let text = match format {
        Format::Csv => csv_table(
            &["k", "b", "strict"],
            report.rows.iter().map(|r| vec![real(r.k), r.b.to_string(), r.strict.to_string()]),
        )?,
        _ => json(&report)?,
    };
    emit(out, &text)?;
    Ok(Status::Ok)
}

#[derive(Serialize)]
struct MemberReport {
    p: f64,
    parts: Partition,
    value: f64,
    k_neighbor: Option<f64>,
}

#[derive(Serialize)]
struct ClassifyReport<'a> {
    f: &'a GenFun,
    n: u32,
    depth: f64,
    avg_depth: f64,
    ases: f64,
    members: Vec<MemberReport>,
}

pub fn classify(input: &Path, f: &GenFun, format: Option<Format>, out: Option<&Path>) -> Result<Status, Failure> {
    let format = pick(format, Format::Json, &[Format::Csv, Format::Json])?;
    let ensemble = Ensemble::from_json(&read(input)?).map_err(|e| Failure::io(format!("{}: {e}", input.display())))?;
    let members = ensemble
        .members()
        .iter()
        .map(|m| {
            let label = class_of(f, &m.parts).map_err(Failure::io)?;
            Ok(MemberReport { p: m.p, parts: m.parts.clone(), value: label.k, k_neighbor: label.k_neighbor })
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    let report = ClassifyReport {
        f,
        n: ensemble.n(),
        depth: ensemble_depth(f, &ensemble),
        avg_depth: ensemble_avg_depth(f, &ensemble),
        ases: fdepth::bounds::ases(&ensemble),
        members,
    };
    let text = match format {
        Format::Csv => csv_table(
            &["p", "parts", "f_value", "k_neighbor"],
            report.members.iter().map(|m| {
                vec![real(m.p), m.parts.label(), real(m.value), m.k_neighbor.map(real).unwrap_or_default()]
            }),
        )?,
        _ => json(&report)?,
    };
    emit(out, &text)?;
    Ok(Status::Ok)
}

/// Input of `witness`: a state spec, optionally with its separability
/// certificate.
#[derive(Deserialize)]
#[serde(untagged)]
enum WitnessInput {
    Certified {
        state: StateSpec,
        #[serde(default)]
        certificate: Option<Certificate>,
    },
    Bare(StateSpec),
}

/// Finest separating types known from the way the state was built.
fn implied_certificate(spec: &StateSpec) -> Option<Certificate> {
    fn pure_type(spec: &StateSpec) -> Option<Partition> {
        match spec {
            StateSpec::GhzProduct { parts } => Some(parts.clone()),
            StateSpec::Basis { bits } => u32::try_from(bits.len()).ok().filter(|&n| n > 0).map(Partition::bottom),
            StateSpec::Plus { n } => Some(Partition::bottom(*n)),
            StateSpec::Mixture { .. } => None,
        }
    }
    match spec {
        StateSpec::Mixture { terms } => {
            let total: f64 = terms.iter().map(|t| t.w).sum();
            let members = terms
                .iter()
                .map(|t| Some(EnsembleMember { p: t.w / total, parts: pure_type(&t.state)? }))
                .collect::<Option<Vec<_>>>()?;
            Ensemble::new(members).ok().map(|ensemble| Certificate::Ensemble { ensemble })
        }
        other => pure_type(other).map(|parts| Certificate::Pure { parts }),
    }
}

#[derive(Serialize)]
struct WitnessReport<'a> {
    f: &'a GenFun,
    n: u32,
    fq: f64,
    excluded: Vec<f64>,
    criterion: Option<CriterionReport>,
}

pub fn witness(input: &Path, f: &GenFun, format: Option<Format>, out: Option<&Path>) -> Result<Status, Failure> {
    pick(format, Format::Json, &[Format::Json])?;
    let text = read(input)?;
    let schema = |e: &dyn Display| Failure::io(format!("{}: {e}", input.display()));
    let doc: WitnessInput = serde_json::from_str(&text).map_err(|e| schema(&e))?;
    let (spec, certificate) = match doc {
        WitnessInput::Certified { state, certificate } => {
            let cert = certificate.or_else(|| implied_certificate(&state));
            (state, cert)
        }
        WitnessInput::Bare(state) => {
            let cert = implied_certificate(&state);
            (state, cert)
        }
    };
    let state = spec.build().map_err(|e| schema(&e))?;
    let n = state.n();
    let jz = CollectiveOp::jz(n).map_err(|e| schema(&e))?;
    let fq = qfi_state(&state, &jz).map_err(Failure::io)?;
    let excluded = criteria_exclude(f, n, fq).map_err(Failure::io)?;
    let criterion = certificate
        .map(|c| verify_criterion(&state, f, &c).map_err(|e| schema(&e)))
        .transpose()?;
    let violated = criterion.as_ref().is_some_and(|c| !c.holds);
    emit(out, &json(&WitnessReport { f, n, fq, excluded, criterion })?)?;
    Ok(if violated { Status::Violation } else { Status::Ok })
}

#[derive(Serialize)]
struct VerifySummary {
    passed: bool,
    failed_checks: usize,
    suites: Vec<SuiteReport>,
}

pub fn verify(suite: &str, n_max: Option<u32>, seed: u64, extra: Vec<GenFun>, out: Option<&Path>) -> Result<Status, Failure> {
    let suites: Vec<SuiteName> = if suite == "all" {
        SuiteName::ALL.to_vec()
    } else {
        suite
            .split(',')
            .map(|s| s.trim().parse::<SuiteName>().map_err(Failure::usage))
            .collect::<Result<_, _>>()?
    };
    let cfg = VerifyConfig { n_max, seed, extra };
    let reports = suites
        .into_iter()
        .map(|s| run_suite(s, &cfg).map_err(Failure::usage))
        .collect::<Result<Vec<_>, _>>()?;
    let failed_checks = reports.iter().flat_map(|r| &r.checks).filter(|c| !c.passed).count();
    let summary = VerifySummary { passed: failed_checks == 0, failed_checks, suites: reports };
    emit(out, &json(&summary)?)?;
    Ok(if summary.passed { Status::Ok } else { Status::Violation })
}
