//! Equations between two diagrams, parameterised by phase variables and
//! !-box labels.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use super::{Diagram, DiagramError, Language};

/// How nested parameters behave when an enclosing box is replicated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Every copy shares the nested variable and label names.
    #[default]
    Copy,
    /// Every copy gets fresh child names with recorded lineage.
    Child,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Copy => "copy",
            Mode::Child => "child",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "copy" => Ok(Mode::Copy),
            "child" => Ok(Mode::Child),
            other => Err(format!("unknown mode `{other}` (expected copy or child)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Lhs,
    Rhs,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Lhs => "lhs",
            Side::Rhs => "rhs",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FamilyError {
    #[error("{side}: {source}")]
    Diagram { side: Side, source: DiagramError },
    #[error("sides are in different calculi ({0} vs {1})")]
    LanguageMismatch(Language, Language),
    #[error("sides have different boundaries: {0}")]
    BoundaryMismatch(String),
    #[error("!-box `{label}` encloses different boundary counts on the two sides: {detail}")]
    EnclosedBoundary { label: String, detail: String },
    #[error("phase variable `{0}` is used but not declared")]
    UndeclaredVariable(String),
    #[error("!-box `{0}` is used but not declared")]
    UndeclaredLabel(String),
    #[error("a quotient is only meaningful for ZX phases, not {0}")]
    QuotientNotZx(Language),
    #[error("quotient order for `{0}` must be at least 1")]
    ZeroQuotient(String),
}

/// `lhs = rhs` for every instantiation of the declared parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct EquationFamily {
    pub lhs: Diagram,
    pub rhs: Diagram,
    pub phase_vars: Vec<String>,
    pub bang_labels: Vec<String>,
    pub mode: Mode,
    /// Finite phase group order per ZX variable (e.g. 8 for Clifford+T).
    pub quotients: BTreeMap<String, u32>,
}

impl EquationFamily {
    pub fn new(lhs: Diagram, rhs: Diagram) -> Self {
        let mut phase_vars: Vec<String> = lhs.variables().into_iter().chain(rhs.variables()).collect();
        phase_vars.sort();
        phase_vars.dedup();
        let mut bang_labels: Vec<String> = lhs
            .bangboxes()
            .keys()
            .chain(rhs.bangboxes().keys())
            .cloned()
            .collect();
        bang_labels.sort();
        bang_labels.dedup();
        EquationFamily {
            lhs,
            rhs,
            phase_vars,
            bang_labels,
            mode: Mode::Copy,
            quotients: BTreeMap::new(),
        }
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn language(&self) -> Language {
        self.lhs.language()
    }

    pub fn sides(&self) -> [(Side, &Diagram); 2] {
        [(Side::Lhs, &self.lhs), (Side::Rhs, &self.rhs)]
    }

    /// No variables and no boxes on either side.
    pub fn is_simple(&self) -> bool {
        self.lhs.is_simple() && self.rhs.is_simple()
    }

    pub fn has_bangboxes(&self) -> bool {
        self.lhs.has_bangboxes() || self.rhs.has_bangboxes()
    }

    pub fn mentions(&self, var: &str) -> bool {
        self.lhs.mentions(var) || self.rhs.mentions(var)
    }

    pub fn validate(&self) -> Result<(), FamilyError> {
        for (side, d) in self.sides() {
            d.validate().map_err(|source| FamilyError::Diagram { side, source })?;
        }
        if self.lhs.language() != self.rhs.language() {
            return Err(FamilyError::LanguageMismatch(self.lhs.language(), self.rhs.language()));
        }
        let (li, lo) = (self.lhs.inputs().len(), self.lhs.outputs().len());
        let (ri, ro) = (self.rhs.inputs().len(), self.rhs.outputs().len());
        if (li, lo) != (ri, ro) {
            return Err(FamilyError::BoundaryMismatch(format!(
                "lhs {li} in / {lo} out, rhs {ri} in / {ro} out"
            )));
        }
        for (_, d) in self.sides() {
            for v in d.variables() {
                if !self.phase_vars.contains(&v) && !self.is_child_name(d, &v) {
                    return Err(FamilyError::UndeclaredVariable(v));
                }
            }
            for l in d.bangboxes().keys() {
                if !self.bang_labels.contains(l) && !self.is_child_name(d, l) {
                    return Err(FamilyError::UndeclaredLabel(l.clone()));
                }
            }
        }
        let labels: std::collections::BTreeSet<&String> = self
            .lhs
            .bangboxes()
            .keys()
            .chain(self.rhs.bangboxes().keys())
            .collect();
        for l in labels {
            let count = |d: &Diagram| match d.bangboxes().get(l) {
                None => (0, 0),
                Some(b) => (
                    d.inputs().iter().filter(|s| b.slots.contains(*s)).count(),
                    d.outputs().iter().filter(|s| b.slots.contains(*s)).count(),
                ),
            };
            let (a, b) = (count(&self.lhs), count(&self.rhs));
            if a != b {
                return Err(FamilyError::EnclosedBoundary {
                    label: l.clone(),
                    detail: format!("lhs {}/{} in/out, rhs {}/{} in/out", a.0, a.1, b.0, b.1),
                });
            }
        }
        if !self.quotients.is_empty() && self.language() != Language::Zx {
            return Err(FamilyError::QuotientNotZx(self.language()));
        }
        for (v, g) in &self.quotients {
            if *g == 0 {
                return Err(FamilyError::ZeroQuotient(v.clone()));
            }
        }
        Ok(())
    }

    fn is_child_name(&self, d: &Diagram, name: &str) -> bool {
        let root = d.original_name(name);
        root != name && (self.phase_vars.iter().any(|v| v == root) || self.bang_labels.iter().any(|l| l == root))
    }

    /// Quotient order declared for `var`, if any.
    pub fn quotient_of(&self, var: &str) -> Option<u32> {
        let root = self.lhs.original_name(var);
        self.quotients
            .get(var)
            .or_else(|| self.quotients.get(root))
            .or_else(|| self.quotients.get(self.rhs.original_name(var)))
            .copied()
    }
}
