//! Session language, check runner, report rendering and the built-in
//! example registry.
//!
//! ```text
//! base x;
//! even w:1;
//! odd b:1 dual w;
//! op A2 : b -> w = -1/2*D[x]^3 + 2*w*D[x] + w_x;
//! check verify-q2 A2 expect pass;
//! ```

mod error;
mod lexer;
mod parser;
mod run;
mod session;

pub use error::{ErrorCode, ParseError, Pos, RunError};
pub use parser::{max_order_from_env, parse_session, parse_session_with, DEFAULT_MAX_ORDER};
pub use run::{
    describe_target, render_report, render_reports, run_check, run_session, CheckOutcome, Format, ENGINE_VERSION,
};
pub use session::{
    render_op, render_scalar_op, BracketDef, BundleDecl, CheckDef, Command, DensityDef, Kind, OpDef, Session,
    Verdict,
};

const BUILTINS: [(&str, &str); 7] = [
    ("kdv_a2", include_str!("../../sessions/kdv_a2.jets")),
    ("toda_heavenly_x", include_str!("../../sessions/toda_heavenly_x.jets")),
    ("toda_heavenly_y", include_str!("../../sessions/toda_heavenly_y.jets")),
    ("tangent_algebroid", include_str!("../../sessions/tangent_algebroid.jets")),
    ("so3_point", include_str!("../../sessions/so3_point.jets")),
    ("so3_action", include_str!("../../sessions/so3_action.jets")),
    ("skew_non_hamiltonian", include_str!("../../sessions/skew_non_hamiltonian.jets")),
];

/// Names of the built-in example sessions.
pub fn builtin_names() -> Vec<&'static str> {
    BUILTINS.iter().map(|(n, _)| *n).collect()
}

/// Source text of a built-in session.
pub fn builtin_source(name: &str) -> Option<&'static str> {
    BUILTINS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

/// Every built-in session, parsed.
pub fn builtin_examples() -> Vec<(&'static str, Session)> {
    BUILTINS
        .iter()
        .map(|(n, s)| (*n, parse_session(s).unwrap_or_else(|e| panic!("builtin {n}: {e}"))))
        .collect()
}
