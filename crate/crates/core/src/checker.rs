//! Evaluation of a verification plan and the symbolic cross-check.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use thiserror::Error;

use crate::diagram::{Diagram, EquationFamily};
use crate::interp::{interpret_sparse, InterpError, InterpretOptions, SparseMatrix};
use crate::phasepoly::{Coeff, LaurentPoly};
use crate::planner::{Assignment, VerificationPlan};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error(transparent)]
    Interp(#[from] InterpError),
    #[error("sides have shapes {lhs:?} and {rhs:?} (inputs, outputs)")]
    ShapeMismatch { lhs: (usize, usize), rhs: (usize, usize) },
    #[error("could not build a worker pool: {0}")]
    Pool(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckSettings {
    /// Largest accepted entrywise distance when floats are involved.
    pub tolerance: f64,
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
    /// Accept `rhs = λ·lhs` for a nonzero scalar `λ`.
    pub up_to_scalar: bool,
    pub interp: InterpretOptions,
}

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

impl Default for CheckSettings {
    fn default() -> Self {
        CheckSettings {
            tolerance: DEFAULT_TOLERANCE,
            jobs: None,
            up_to_scalar: false,
            interp: InterpretOptions::default(),
        }
    }
}

/// Outcome of one simple equation.
#[derive(Clone, Debug, PartialEq)]
pub struct Comparison {
    /// Largest entrywise distance, after rescaling in up-to-scalar mode.
    pub deviation: f64,
    pub pass: bool,
    /// Both matrices had exact entries and were compared exactly.
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Record {
    pub index: usize,
    pub assignment: Assignment,
    pub deviation: f64,
    pub pass: bool,
    pub exact: bool,
    pub error: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Verified,
    Falsified,
    PreconditionFailed,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Verified => "verified",
            Verdict::Falsified => "falsified",
            Verdict::PreconditionFailed => "precondition-failed",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub verdict: Verdict,
    pub records: Vec<Record>,
    /// Index of the lowest failing record.
    pub counterexample: Option<usize>,
    pub elapsed: Duration,
}

impl Report {
    pub fn counterexample(&self) -> Option<&Record> {
        self.counterexample.map(|i| &self.records[i])
    }

    pub fn max_deviation(&self) -> f64 {
        self.records.iter().map(|r| r.deviation).fold(0.0, f64::max)
    }
}

fn shape<S>(m: &SparseMatrix<S>) -> (usize, usize) {
    (m.inputs, m.outputs)
}

fn compare(a: &SparseMatrix<Coeff>, b: &SparseMatrix<Coeff>, settings: &CheckSettings) -> Comparison {
    let exact = a.is_exact() && b.is_exact();
    let scaled;
    let a = if settings.up_to_scalar {
        match rescale(a, b) {
            Some(s) => {
                scaled = s;
                &scaled
            }
            None => {
                return Comparison {
                    deviation: a.max_deviation(b),
                    pass: false,
                    exact,
                }
            }
        }
    } else {
        a
    };
    let deviation = a.max_deviation(b);
    let pass = if exact && a.is_exact() {
        a.entries == b.entries
    } else {
        deviation <= settings.tolerance
    };
    Comparison { deviation, pass, exact }
}

/// `λ·a` where `λ` matches the first nonzero entry of `a` to that of `b`.
fn rescale(a: &SparseMatrix<Coeff>, b: &SparseMatrix<Coeff>) -> Option<SparseMatrix<Coeff>> {
    match (a.entries.iter().next(), b.entries.iter().next()) {
        (None, None) => Some(a.clone()),
        (Some((ka, va)), Some((kb, vb))) if ka == kb => {
            let lambda = vb * &va.inv()?;
            if lambda.is_zero() {
                return None;
            }
            let mut out = a.clone();
            for v in out.entries.values_mut() {
                *v = &*v * &lambda;
            }
            out.entries.retain(|_, v| !v.is_zero());
            Some(out)
        }
        _ => None,
    }
}

/// Compare the matrices of two simple diagrams.
pub fn check_simple(lhs: &Diagram, rhs: &Diagram, settings: &CheckSettings) -> Result<Comparison, CheckError> {
    let a = interpret_sparse::<Coeff>(lhs, &settings.interp)?;
    let b = interpret_sparse::<Coeff>(rhs, &settings.interp)?;
    if shape(&a) != shape(&b) {
        return Err(CheckError::ShapeMismatch {
            lhs: shape(&a),
            rhs: shape(&b),
        });
    }
    Ok(compare(&a, &b, settings))
}

fn record(index: usize, assignment: &Assignment, lhs: &Diagram, rhs: &Diagram, settings: &CheckSettings) -> Record {
    match check_simple(lhs, rhs, settings) {
        Ok(c) => Record {
            index,
            assignment: assignment.clone(),
            deviation: c.deviation,
            pass: c.pass,
            exact: c.exact,
            error: None,
        },
        Err(e) => Record {
            index,
            assignment: assignment.clone(),
            deviation: f64::NAN,
            pass: false,
            exact: false,
            error: Some(e.to_string()),
        },
    }
}

/// Check every member of the plan; records keep plan order.
pub fn run_plan(plan: &VerificationPlan, settings: &CheckSettings) -> Result<Report, CheckError> {
    let start = Instant::now();
    let work = || -> Vec<Record> {
        plan.entries
            .par_iter()
            .enumerate()
            .map(|(i, e)| record(i, &e.assignment, &e.lhs, &e.rhs, settings))
            .collect()
    };
    let records = match settings.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| CheckError::Pool(e.to_string()))?
            .install(work),
        None => work(),
    };
    let verdict = if records.iter().any(|r| r.error.is_some()) {
        Verdict::PreconditionFailed
    } else if records.iter().all(|r| r.pass) {
        Verdict::Verified
    } else {
        Verdict::Falsified
    };
    let counterexample = records.iter().position(|r| !r.pass && r.error.is_none());
    Ok(Report {
        verdict,
        records,
        counterexample,
        elapsed: start.elapsed(),
    })
}

/// Equality of the two polynomial matrices of a bangbox-free family, with
/// the family's quotients applied.
pub fn symbolic_check(family: &EquationFamily, opts: &InterpretOptions) -> Result<bool, CheckError> {
    if family.has_bangboxes() {
        return Err(InterpError::HasBangbox.into());
    }
    let mut opts = opts.clone();
    for (v, g) in &family.quotients {
        opts.quotients.entry(v.clone()).or_insert(*g);
    }
    let a = interpret_sparse::<LaurentPoly>(&family.lhs, &opts)?;
    let b = interpret_sparse::<LaurentPoly>(&family.rhs, &opts)?;
    if shape(&a) != shape(&b) {
        return Err(CheckError::ShapeMismatch {
            lhs: shape(&a),
            rhs: shape(&b),
        });
    }
    let keys: BTreeSet<&(u128, u128)> = a.entries.keys().chain(b.entries.keys()).collect();
    let equal = keys
        .into_iter()
        .all(|k| a.get(k.0, k.1).approx_eq(&b.get(k.0, k.1), DEFAULT_TOLERANCE));
    Ok(equal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{Angle, DiagramBuilder, Language, NodeKind, PhaseExpr};

    fn spider(phase: Angle, ins: usize, outs: usize) -> Diagram {
        let mut b = DiagramBuilder::new(Language::Zx);
        b.node("s", NodeKind::ZxZ, Some(PhaseExpr::angle(phase)));
        for k in 0..ins {
            b.input(&format!("i{k}")).edge(&format!("i{k}"), "s");
        }
        for k in 0..outs {
            b.output(&format!("o{k}")).edge("s", &format!("o{k}"));
        }
        b.build().unwrap()
    }

    #[test]
    fn reflexive() {
        let d = spider(Angle::pi_frac(1, 3), 2, 1);
        let c = check_simple(&d, &d, &CheckSettings::default()).unwrap();
        assert!(c.pass);
        assert_eq!(c.deviation, 0.0);
    }

    #[test]
    fn phase_zero_against_pi() {
        let c = check_simple(&spider(Angle::zero(), 1, 1), &spider(Angle::pi(), 1, 1), &CheckSettings::default()).unwrap();
        assert!(!c.pass);
        assert!(c.exact);
        assert_eq!(c.deviation, 2.0);
    }

    #[test]
    fn fused_instance() {
        // s1 (π) with two inputs joined to s2 (0), against one spider of phase π
        let mut b = DiagramBuilder::new(Language::Zx);
        b.input("i0").input("i1").output("o");
        b.node("s1", NodeKind::ZxZ, Some(PhaseExpr::angle(Angle::pi())))
            .node("s2", NodeKind::ZxZ, Some(PhaseExpr::angle(Angle::zero())))
            .edge("i0", "s1")
            .edge("i1", "s1")
            .edge("s1", "s2")
            .edge("s2", "o");
        let lhs = b.build().unwrap();
        let c = check_simple(&lhs, &spider(Angle::pi(), 2, 1), &CheckSettings::default()).unwrap();
        assert!(c.pass);
    }

    #[test]
    fn shapes_must_match() {
        let r = check_simple(&spider(Angle::zero(), 1, 1), &spider(Angle::zero(), 2, 1), &CheckSettings::default());
        assert!(matches!(r, Err(CheckError::ShapeMismatch { .. })));
    }

    #[test]
    fn up_to_scalar_flag() {
        // Z(0) with no legs is 2; the empty diagram is 1.
        let two = spider(Angle::zero(), 0, 0);
        let one = Diagram::empty(Language::Zx);
        let s = CheckSettings::default();
        assert!(!check_simple(&two, &one, &s).unwrap().pass);
        let loose = CheckSettings {
            up_to_scalar: true,
            ..CheckSettings::default()
        };
        assert!(check_simple(&two, &one, &loose).unwrap().pass);
        assert!(!check_simple(&spider(Angle::zero(), 1, 1), &spider(Angle::pi(), 1, 1), &loose).unwrap().pass);
    }

    #[test]
    fn empty_plan_is_vacuous() {
        let plan = VerificationPlan {
            language: Language::Zx,
            entries: vec![],
            bounds: Default::default(),
            grids: Default::default(),
            removal_order: vec![],
            mode: Default::default(),
            grid_mode: Default::default(),
            warnings: vec![],
        };
        let r = run_plan(&plan, &CheckSettings::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Verified);
    }

    #[test]
    fn symbolic_distinguishes_powers() {
        let mk = |k: i64| {
            let mut b = DiagramBuilder::new(Language::Zx);
            b.input("i").output("o");
            b.node("s", NodeKind::ZxZ, Some(PhaseExpr::linear(Angle::zero(), [("a", k)])))
                .edge("i", "s")
                .edge("s", "o");
            b.build().unwrap()
        };
        let opts = InterpretOptions::default();
        assert!(symbolic_check(&EquationFamily::new(mk(1), mk(1)), &opts).unwrap());
        assert!(!symbolic_check(&EquationFamily::new(mk(1), mk(2)), &opts).unwrap());
        let mut q = EquationFamily::new(mk(1), mk(9));
        q.quotients.insert("a".into(), 8);
        assert!(symbolic_check(&q, &opts).unwrap());
    }
}
