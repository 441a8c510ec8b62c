use std::time::Duration;

use serde::Serialize;

use super::error::RunError;
use super::session::{render_op, CheckDef, Command, Kind, Session, Verdict};
use crate::algebroid::{bracket_report, certify_bracket_sign, check_hamiltonian, check_jacobi};
use crate::homological::{
    bivector, build_q, check_master_equation, classical_checks, classical_q, hamiltonian_q, odd_neighbour,
    verify_q2,
};
use crate::jetcore::{render_poly, render_tuple, DiffPoly};
use crate::report::{Named, Value, VerificationReport};

pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

/// A finished check together with what it was asked to do.
#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub check: CheckDef,
    /// Rendered definition of the target, echoed into the report.
    pub input: String,
    pub report: VerificationReport,
    pub elapsed: Duration,
    pub bases: Vec<String>,
}

impl CheckOutcome {
    pub fn verdict(&self) -> Verdict {
        Verdict::of(self.report.passed())
    }

    pub fn as_expected(&self) -> bool {
        self.verdict() == self.check.expect
    }
}

fn unresolved(kind: Kind, name: &str) -> RunError {
    RunError::Unresolved {
        kind: kind.label().into(),
        name: name.into(),
    }
}

/// Dispatch one check to the engine.
pub fn run_check(session: &Session, check: &CheckDef) -> Result<VerificationReport, RunError> {
    let name = check.target.as_str();
    let kind = session.kind_of(name).ok_or_else(|| unresolved(Kind::Op, name))?;
    if !check.command.accepts().contains(&kind) {
        return Err(RunError::BadArguments {
            command: check.command.name().into(),
            expected: check.command.accepts()[0].label().into(),
        });
    }
    let spec = || session.anchor_spec(name).ok_or_else(|| unresolved(Kind::Op, name));
    let report = match (check.command, kind) {
        (Command::CheckHamiltonian, _) => check_hamiltonian(&spec()?.anchor)?,
        (Command::Bracket, _) => bracket_report(&spec()?)?,
        (Command::Closure, _) => {
            let spec = spec()?;
            certify_bracket_sign(&spec.anchor, &spec.resolved_bracket()?)?.0
        }
        (Command::Jacobi, _) => check_jacobi(&spec()?)?,
        (Command::BuildQ, _) => {
            let q = build_q(&spec()?)?;
            let off_degree: Vec<DiffPoly> = q
                .phi_b()
                .iter()
                .map(|p| p.filter_terms(|t| t.odd_count() != 2))
                .collect();
            VerificationReport::new("build-q")
                .residual("odd_degree", Value::Polys(off_degree))
                .output("phi_u", Value::Polys(q.phi_u().to_vec()))
                .output("phi_b", Value::Polys(q.phi_b().to_vec()))
        }
        (Command::VerifyQ2, Kind::Op) => verify_q2(&build_q(&spec()?)?)?,
        (Command::VerifyQ2, Kind::Classical) => {
            let c = session.classical_spec(name).ok_or_else(|| unresolved(kind, name))?;
            verify_q2(&classical_q(c)?)?
        }
        (Command::VerifyQ2, Kind::Density) => {
            let d = session.density(name).ok_or_else(|| unresolved(kind, name))?;
            verify_q2(&hamiltonian_q(&d.density, &d.u, &d.b)?)?
        }
        (Command::Bivector, _) => {
            let h = bivector(&spec()?.anchor)?;
            VerificationReport::new("bivector").output("H", Value::poly(h))
        }
        (Command::Master, Kind::Op) => {
            let a = spec()?.anchor;
            check_master_equation(&bivector(&a)?, a.codomain(), &odd_neighbour(&a))?
        }
        (Command::Master, _) => {
            let d = session.density(name).ok_or_else(|| unresolved(kind, name))?;
            check_master_equation(&d.density, &d.u, &d.b)?
        }
        (Command::Classical, _) => {
            classical_checks(session.classical_spec(name).ok_or_else(|| unresolved(kind, name))?)
        }
    };
    Ok(report)
}

/// Rendered definition of a named session object.
pub fn describe_target(session: &Session, name: &str) -> String {
    if let Some(o) = session.op(name) {
        let mut s = format!(
            "op {} : {} -> {} = {}",
            o.name,
            o.op.domain().symbol(),
            o.op.codomain().symbol(),
            render_op(&o.op, &session.bases)
        );
        if let Some(b) = session.bracket(name) {
            if let Ok(v) = b.bracket.on_bundles(&b.p, &b.q) {
                s.push_str(&format!(
                    "; bracket ({}, {}) = {}",
                    b.p.symbol(),
                    b.q.symbol(),
                    render_tuple(&v, &session.bases)
                ));
            }
        }
        return s;
    }
    if let Some(d) = session.density(name) {
        return format!(
            "density {}({}, {}) = {}",
            d.name,
            d.u.symbol(),
            d.b.symbol(),
            render_poly(&d.density, &session.bases)
        );
    }
    if let Some(c) = session.classical_spec(name) {
        return format!("classical {} (coords {}, rank {})", c.name, c.m, c.d);
    }
    name.to_string()
}

/// Wall time of `f`. The browser target has no monotonic clock in `std`,
/// so there the duration is reported as zero.
#[cfg(not(target_arch = "wasm32"))]
fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = std::time::Instant::now();
    let out = f();
    (out, start.elapsed())
}

#[cfg(target_arch = "wasm32")]
fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    (f(), Duration::ZERO)
}

/// Run every check (or those whose target, command or `command target`
/// label matches `only`).
pub fn run_session(session: &Session, only: Option<&str>) -> Result<Vec<CheckOutcome>, RunError> {
    let mut out = Vec::new();
    for check in &session.checks {
        if let Some(sel) = only {
            if sel != check.target && sel != check.command.name() && sel != check.label() {
                continue;
            }
        }
        let (report, elapsed) = timed(|| run_check(session, check));
        let report = report?;
        out.push(CheckOutcome {
            check: check.clone(),
            input: describe_target(session, &check.target),
            report,
            elapsed,
            bases: session.bases.clone(),
        });
    }
    Ok(out)
}

fn render_value(v: &Value, bases: &[String]) -> String {
    match v {
        Value::Polys(ps) => render_tuple(ps, bases),
        Value::Op(op) => render_op(op, bases),
    }
}

#[derive(Serialize)]
struct JsonNamed {
    name: String,
    value: String,
}

#[derive(Serialize)]
struct JsonInputs<'a> {
    command: &'a str,
    target: &'a str,
    definition: &'a str,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    check: &'a str,
    target: &'a str,
    verdict: &'a str,
    expected: &'a str,
    inputs: JsonInputs<'a>,
    residuals: Vec<JsonNamed>,
    outputs: Vec<JsonNamed>,
    notes: Vec<JsonNamed>,
    engine_version: &'a str,
}

fn named(items: &[Named], bases: &[String]) -> Vec<JsonNamed> {
    items
        .iter()
        .map(|n| JsonNamed {
            name: n.name.clone(),
            value: render_value(&n.value, bases),
        })
        .collect()
}

fn json_report(o: &CheckOutcome) -> JsonReport<'_> {
    let command = o.check.command.name();
    JsonReport {
        check: command,
        target: &o.check.target,
        verdict: o.verdict().as_str(),
        expected: o.check.expect.as_str(),
        inputs: JsonInputs {
            command,
            target: &o.check.target,
            definition: &o.input,
        },
        residuals: named(&o.report.residuals, &o.bases),
        outputs: named(&o.report.outputs, &o.bases),
        notes: o
            .report
            .notes
            .iter()
            .map(|(k, v)| JsonNamed {
                name: k.clone(),
                value: v.clone(),
            })
            .collect(),
        engine_version: ENGINE_VERSION,
    }
}

/// One report. JSON carries no timing so that identical inputs give
/// identical bytes; text includes the wall time.
pub fn render_report(o: &CheckOutcome, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(&json_report(o)).expect("serializable"),
        Format::Text => {
            let tag = match o.verdict() {
                Verdict::Pass => "PASS",
                Verdict::Fail => "FAIL",
            };
            let mut s = format!(
                "[{tag}] {} (expected {})\n  input: {}\n",
                o.check.label(),
                o.check.expect.as_str(),
                o.input
            );
            for r in &o.report.residuals {
                s.push_str(&format!("  {} residual: {}\n", r.name, render_value(&r.value, &o.bases)));
            }
            for r in &o.report.outputs {
                s.push_str(&format!("  {}: {}\n", r.name, render_value(&r.value, &o.bases)));
            }
            for (k, v) in &o.report.notes {
                s.push_str(&format!("  {k}: {v}\n"));
            }
            s.push_str(&format!("  time: {:.3} ms\n", o.elapsed.as_secs_f64() * 1e3));
            s
        }
    }
}

/// All reports of a run: a JSON array, or text blocks with a summary line.
pub fn render_reports(outcomes: &[CheckOutcome], format: Format) -> String {
    match format {
        Format::Json => {
            let all: Vec<JsonReport> = outcomes.iter().map(json_report).collect();
            let mut s = serde_json::to_string_pretty(&all).expect("serializable");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut s = String::new();
            for o in outcomes {
                s.push_str(&render_report(o, format));
                s.push('\n');
            }
            let passed = outcomes.iter().filter(|o| o.report.passed()).count();
            let unexpected = outcomes.iter().filter(|o| !o.as_expected()).count();
            s.push_str(&format!(
                "{} checks: {} passed, {} failed, {} differ from expectation\n",
                outcomes.len(),
                passed,
                outcomes.len() - passed,
                unexpected
            ));
            s
        }
    }
}
