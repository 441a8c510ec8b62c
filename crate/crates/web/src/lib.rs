//! Browser front end for the `jets` engine: run a session, analyze a scalar
//! operator in one field `w(x)`, and take variational derivatives of a
//! density. Each operation has a plain Rust form (tested natively) and a
//! `wasm_bindgen` export that reports errors as text.

use jets::frontend::{builtin_names, builtin_source, parse_session, render_reports, run_session, Format};
use jets::jetcore::render_tuple;
use jets::{euler, homological::check_master_equation};
use wasm_bindgen::prelude::*;

/// Declarations shared by the single-field operations.
const KDV_CONTEXT: &str = "base x;\neven w:1;\nodd b:1 dual w;\n";

fn format_of(json: bool) -> Format {
    if json {
        Format::Json
    } else {
        Format::Text
    }
}

/// Text reports carry a wall time that the browser build cannot measure;
/// the page times the call itself instead.
fn strip_times(report: String) -> String {
    report
        .lines()
        .filter(|l| !l.trim_start().starts_with("time:"))
        .map(|l| format!("{l}\n"))
        .collect()
}

/// Parse and run every check of a session.
pub fn run_text(text: &str, json: bool) -> Result<String, String> {
    let session = parse_session(text).map_err(|e| e.to_string())?;
    if session.checks.is_empty() {
        return Err("the session declares no checks".into());
    }
    let outcomes = run_session(&session, None).map_err(|e| e.to_string())?;
    let out = render_reports(&outcomes, format_of(json));
    Ok(if json { out } else { strip_times(out) })
}

/// Skew-adjointness, the Hamiltonian identity, the induced bracket and
/// `Q² = 0` for an operator `A : b -> w` written in the session syntax.
pub fn analyze(operator: &str) -> Result<String, String> {
    let text = format!(
        "{KDV_CONTEXT}op A : b -> w = {operator};\n\
         check check-hamiltonian A;\n\
         check bracket A;\n\
         check verify-q2 A;\n"
    );
    run_text(&text, false)
}

/// `δH/δw`, `δH/δb` and the master-equation verdict for a density in `w, b`.
pub fn variations(density: &str) -> Result<String, String> {
    let text = format!("{KDV_CONTEXT}density H(w, b) = {density};\n");
    let session = parse_session(&text).map_err(|e| e.to_string())?;
    let d = &session.densities[0];
    let bases = &session.bases;
    let master = check_master_equation(&d.density, &d.u, &d.b).map_err(|e| e.to_string())?;
    Ok(format!(
        "H       = {}\ndH/dw   = {}\ndH/db   = {}\nmaster  = {}\n",
        render_tuple(std::slice::from_ref(&d.density), bases),
        render_tuple(&euler(&d.density, &d.u), bases),
        render_tuple(&euler(&d.density, &d.b), bases),
        if master.passed() { "pass" } else { "fail" },
    ))
}

fn flatten(r: Result<String, String>) -> String {
    r.unwrap_or_else(|e| format!("error: {e}\n"))
}

#[wasm_bindgen(js_name = exampleNames)]
pub fn example_names() -> Vec<String> {
    builtin_names().into_iter().map(String::from).collect()
}

#[wasm_bindgen(js_name = exampleSource)]
pub fn example_source(name: &str) -> String {
    builtin_source(name).unwrap_or_default().to_string()
}

#[wasm_bindgen(js_name = runSession)]
pub fn run_session_js(text: &str, json: bool) -> String {
    flatten(run_text(text, json))
}

#[wasm_bindgen(js_name = analyzeOperator)]
pub fn analyze_operator(operator: &str) -> String {
    flatten(analyze(operator))
}

#[wasm_bindgen(js_name = variationalDerivatives)]
pub fn variational_derivatives(density: &str) -> String {
    flatten(variations(density))
}
