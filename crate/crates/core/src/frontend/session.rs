use std::fmt;

use crate::algebroid::{AnchorSpec, BiDiffOp};
use crate::homological::ClassicalAlgebroidSpec;
use crate::jetcore::{render_poly, Bundle, DiffPoly, MultiIndex};
use crate::operators::{ScalarOp, TotalDiffOp};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BundleDecl {
    pub bundle: Bundle,
    /// Even bundle this odd bundle is paired with, if declared.
    pub dual: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpDef {
    pub name: String,
    pub op: TotalDiffOp,
}

/// Candidate bracket attached to the operator of the same name.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BracketDef {
    pub op: String,
    pub p: Bundle,
    pub q: Bundle,
    pub bracket: BiDiffOp,
}

/// Density in the jets of an even bundle `u` and an odd bundle `b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityDef {
    pub name: String,
    pub u: Bundle,
    pub b: Bundle,
    pub density: DiffPoly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Command {
    CheckHamiltonian,
    Bracket,
    Closure,
    Jacobi,
    BuildQ,
    VerifyQ2,
    Bivector,
    Master,
    Classical,
}

/// Kinds of named session objects a command argument may refer to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Op,
    Density,
    Classical,
}

impl Kind {
    pub fn label(self) -> &'static str {
        match self {
            Kind::Op => "operator",
            Kind::Density => "density",
            Kind::Classical => "classical algebroid",
        }
    }
}

impl Command {
    pub const ALL: [Command; 9] = [
        Command::CheckHamiltonian,
        Command::Bracket,
        Command::Closure,
        Command::Jacobi,
        Command::BuildQ,
        Command::VerifyQ2,
        Command::Bivector,
        Command::Master,
        Command::Classical,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::CheckHamiltonian => "check-hamiltonian",
            Command::Bracket => "bracket",
            Command::Closure => "closure",
            Command::Jacobi => "jacobi",
            Command::BuildQ => "build-q",
            Command::VerifyQ2 => "verify-q2",
            Command::Bivector => "bivector",
            Command::Master => "master",
            Command::Classical => "classical",
        }
    }

    pub fn parse(s: &str) -> Option<Command> {
        Command::ALL.into_iter().find(|c| c.name() == s)
    }

    /// Object kinds accepted as the single argument.
    pub fn accepts(self) -> &'static [Kind] {
        match self {
            Command::VerifyQ2 => &[Kind::Op, Kind::Classical, Kind::Density],
            Command::Master => &[Kind::Op, Kind::Density],
            Command::Classical => &[Kind::Classical],
            _ => &[Kind::Op],
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn of(passed: bool) -> Verdict {
        if passed {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckDef {
    pub command: Command,
    pub target: String,
    pub expect: Verdict,
}

impl CheckDef {
    /// `command target`, used to select checks from the command line.
    pub fn label(&self) -> String {
        format!("{} {}", self.command, self.target)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Session {
    pub bases: Vec<String>,
    pub bundles: Vec<BundleDecl>,
    pub ops: Vec<OpDef>,
    pub brackets: Vec<BracketDef>,
    pub densities: Vec<DensityDef>,
    pub classical: Vec<ClassicalAlgebroidSpec>,
    pub checks: Vec<CheckDef>,
}

impl Session {
    pub fn bundle(&self, symbol: &str) -> Option<&BundleDecl> {
        self.bundles.iter().find(|d| d.bundle.symbol() == symbol)
    }

    pub fn op(&self, name: &str) -> Option<&OpDef> {
        self.ops.iter().find(|o| o.name == name)
    }

    pub fn bracket(&self, op: &str) -> Option<&BracketDef> {
        self.brackets.iter().find(|b| b.op == op)
    }

    pub fn density(&self, name: &str) -> Option<&DensityDef> {
        self.densities.iter().find(|d| d.name == name)
    }

    pub fn classical_spec(&self, name: &str) -> Option<&ClassicalAlgebroidSpec> {
        self.classical.iter().find(|c| c.name == name)
    }

    pub fn kind_of(&self, name: &str) -> Option<Kind> {
        if self.op(name).is_some() {
            Some(Kind::Op)
        } else if self.density(name).is_some() {
            Some(Kind::Density)
        } else if self.classical_spec(name).is_some() {
            Some(Kind::Classical)
        } else {
            None
        }
    }

    /// The operator with its supplied bracket, or as a Hamiltonian candidate
    /// whose bracket is derived from the operator.
    pub fn anchor_spec(&self, name: &str) -> Option<AnchorSpec> {
        let op = self.op(name)?;
        Some(match self.bracket(name) {
            Some(b) => AnchorSpec::with_bracket(name, op.op.clone(), b.bracket.clone()),
            None => AnchorSpec::hamiltonian(name, op.op.clone()),
        })
    }

    /// Canonical text; parsing it back yields an equal session.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let bases = &self.bases;
        if !bases.is_empty() {
            out.push_str(&format!("base {};\n", bases.join(" ")));
        }
        for d in &self.bundles {
            let b = &d.bundle;
            out.push_str(&format!("{} {}:{}", b.parity(), b.symbol(), b.dim()));
            if b.depends_on().len() != bases.len() {
                out.push_str(" depends");
                for &i in b.depends_on() {
                    out.push(' ');
                    out.push_str(&bases[i]);
                }
            }
            if let Some(w) = &d.dual {
                out.push_str(&format!(" dual {w}"));
            }
            out.push_str(";\n");
        }
        for o in &self.ops {
            out.push_str(&format!(
                "op {} : {} -> {} = {};\n",
                o.name,
                o.op.domain().symbol(),
                o.op.codomain().symbol(),
                render_op(&o.op, bases)
            ));
        }
        for b in &self.brackets {
            let values = b.bracket.on_bundles(&b.p, &b.q).expect("slot shapes");
            out.push_str(&format!(
                "bracket {}({}, {}) = {};\n",
                b.op,
                b.p.symbol(),
                b.q.symbol(),
                render_list(&values, bases)
            ));
        }
        for d in &self.densities {
            out.push_str(&format!(
                "density {}({}, {}) = {};\n",
                d.name,
                d.u.symbol(),
                d.b.symbol(),
                render_poly(&d.density, bases)
            ));
        }
        for c in &self.classical {
            out.push_str(&render_classical(c));
        }
        for c in &self.checks {
            out.push_str(&format!("check {} {} expect {};\n", c.command, c.target, c.expect.as_str()));
        }
        out
    }
}

fn render_list(values: &[DiffPoly], bases: &[String]) -> String {
    if values.len() == 1 {
        return render_poly(&values[0], bases);
    }
    let inner: Vec<String> = values.iter().map(|v| render_poly(v, bases)).collect();
    format!("[{}]", inner.join(", "))
}

fn render_derivative(sigma: &MultiIndex, bases: &[String]) -> String {
    let parts: Vec<String> = sigma
        .iter()
        .map(|(i, k)| {
            if k == 1 {
                format!("D[{}]", bases[i])
            } else {
                format!("D[{}]^{k}", bases[i])
            }
        })
        .collect();
    parts.join("*")
}

/// Normal form `Σ a_σ D_σ` in the session syntax, e.g.
/// `-1/2*D[x]^3 + 2*w*D[x] + w_x`.
pub fn render_scalar_op(op: &ScalarOp, bases: &[String]) -> String {
    let mut out = String::new();
    let mut terms: Vec<_> = op.terms().collect();
    terms.reverse();
    for (sigma, a) in terms {
        let coeff = render_poly(a, bases);
        let (neg, body) = match coeff.strip_prefix('-') {
            Some(rest) if a.len() == 1 => (true, rest.to_string()),
            _ if a.len() > 1 => (false, format!("({coeff})")),
            _ => (false, coeff),
        };
        let text = match (sigma.is_empty(), body.as_str()) {
            (true, _) => body,
            (false, "1") => render_derivative(sigma, bases),
            (false, _) => format!("{body}*{}", render_derivative(sigma, bases)),
        };
        match (out.is_empty(), neg) {
            (true, true) => out.push('-'),
            (true, false) => {}
            (false, true) => out.push_str(" - "),
            (false, false) => out.push_str(" + "),
        }
        out.push_str(&text);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// A scalar expression for `1 × 1` operators, a row-major matrix otherwise.
pub fn render_op(op: &TotalDiffOp, bases: &[String]) -> String {
    if op.rows() == 1 && op.cols() == 1 {
        return render_scalar_op(op.entry(0, 0), bases);
    }
    let rows: Vec<String> = op
        .entries()
        .iter()
        .map(|row| {
            let cells: Vec<String> = row.iter().map(|e| render_scalar_op(e, bases)).collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    format!("[{}]", rows.join(", "))
}

fn render_classical(c: &ClassicalAlgebroidSpec) -> String {
    let rows: Vec<String> = c
        .anchors
        .iter()
        .map(|row| {
            let cells: Vec<String> = row.iter().map(|a| render_poly(a, &[])).collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    let mut out = format!(
        "classical {} {{\n  coords = {};\n  rank = {};\n  anchors = [{}];\n  constants = {{",
        c.name,
        c.m,
        c.d,
        rows.join(", ")
    );
    for i in 0..c.d {
        for j in i + 1..c.d {
            let v: Vec<DiffPoly> = (0..c.d).map(|k| c.constants[k][i][j].clone()).collect();
            if v.iter().all(DiffPoly::is_zero) {
                continue;
            }
            let cells: Vec<String> = v.iter().map(|p| render_poly(p, &[])).collect();
            out.push_str(&format!(" ({},{}) = [{}];", i + 1, j + 1, cells.join(", ")));
        }
    }
    out.push_str(" };\n}\n");
    out
}
