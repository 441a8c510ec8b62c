//! Verification results shared by every checker.

use crate::jetcore::DiffPoly;
use crate::operators::TotalDiffOp;

/// A residual or computed quantity: a tuple of polynomials or an operator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Polys(Vec<DiffPoly>),
    Op(TotalDiffOp),
}

impl Value {
    pub fn poly(p: DiffPoly) -> Value {
        Value::Polys(vec![p])
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Value::Polys(ps) => ps.iter().all(DiffPoly::is_zero),
            Value::Op(op) => op.is_zero(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Named {
    pub name: String,
    pub value: Value,
}

/// Outcome of one check. The verdict is derived: a report passes exactly
/// when every residual is identically zero.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerificationReport {
    pub check: String,
    pub residuals: Vec<Named>,
    pub outputs: Vec<Named>,
    pub notes: Vec<(String, String)>,
}

impl VerificationReport {
    pub fn new(check: impl Into<String>) -> Self {
        VerificationReport {
            check: check.into(),
            ..Default::default()
        }
    }

    pub fn residual(mut self, name: impl Into<String>, value: Value) -> Self {
        self.residuals.push(Named {
            name: name.into(),
            value,
        });
        self
    }

    pub fn output(mut self, name: impl Into<String>, value: Value) -> Self {
        self.outputs.push(Named {
            name: name.into(),
            value,
        });
        self
    }

    pub fn note(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.notes.push((key.into(), value.into()));
        self
    }

    pub fn passed(&self) -> bool {
        self.residuals.iter().all(|r| r.value.is_zero())
    }

    pub fn residual_value(&self, name: &str) -> Option<&Value> {
        self.residuals.iter().find(|r| r.name == name).map(|r| &r.value)
    }

    pub fn output_value(&self, name: &str) -> Option<&Value> {
        self.outputs.iter().find(|r| r.name == name).map(|r| &r.value)
    }

    pub fn note_value(&self, key: &str) -> Option<&str> {
        self.notes.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}
