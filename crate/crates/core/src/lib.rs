//! Finite verification of parameterised equations between ZX, ZH and ZW
//! diagrams.
//!
//! A family of diagram equations may carry phase variables (ranging over a
//! calculus's phase group) and !-boxes (regions repeated any number of
//! times). Such a family stands for infinitely many concrete equations. This
//! crate builds a finite *verifying set* for a family and checks every member
//! against the matrix semantics:
//!
//! * each !-box is replaced by its instances `0..=N` with `N = 2^n1 + 2^n2`,
//!   `nk` counting the wires that cross the box border on side `k`
//!   ([`planner::bbox_bound`]);
//! * each phase variable is replaced by a grid of distinct values whose size
//!   comes from the Laurent-polynomial degree of the variable in the matrix
//!   interpretation ([`planner::grid_size`]).
//!
//! The modules map onto the pipeline:
//!
//! * [`phasepoly`]: multivariate Laurent polynomials and polynomial matrices;
//! * [`diagram`]: the open-graph data model, instantiation, nesting and
//!   separation analyses;
//! * [`interp`]: tensor-network interpretation into (polynomial) matrices;
//! * [`planner`]: construction of the verifying set;
//! * [`checker`]: evaluation of a plan and the symbolic oracle;
//! * [`cli`]: the equation file format, reports, and command drivers.
//!
//! ```
//! use famverify::cli::parse_equation_file;
//! use famverify::planner::{build_plan, PlanSettings};
//! use famverify::checker::{run_plan, CheckSettings, Verdict};
//!
//! let text = "\
//! language zx
//! phase a b
//!
//! lhs
//!   inputs i
//!   outputs o
//!   node s1 Z a
//!   node s2 Z b
//!   edge i s1
//!   edge s1 s2
//!   edge s2 o
//!
//! rhs
//!   inputs i
//!   outputs o
//!   node s Z a + b
//!   edge i s
//!   edge s o
//! ";
//! let family = parse_equation_file(text).unwrap();
//! let plan = build_plan(&family, &PlanSettings::default()).unwrap();
//! assert_eq!(plan.len(), 4);
//! let report = run_plan(&plan, &CheckSettings::default()).unwrap();
//! assert_eq!(report.verdict, Verdict::Verified);
//! ```

pub mod checker;
pub mod cli;
pub mod diagram;
pub mod interp;
pub mod phasepoly;
pub mod planner;
