//! Reduction of a parameterised family to a finite list of simple
//! equations: !-boxes are replaced by every instance count up to a bound,
//! then each phase variable by enough distinct grid points.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::diagram::{
    is_well_nested, nesting_order, Angle, Diagram, DiagramError, EquationFamily, FamilyError, Language, Mode,
    PhaseValue, Side,
};
use crate::interp::{diagram_degree, InterpError, InterpretOptions};
use crate::phasepoly::{Coeff, DegreePair};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlannerError {
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Interp(#[from] InterpError),
    #[error("the two sides have different !-box nesting")]
    NotWellNested,
    #[error("{side}: !-boxes `{first}` and `{second}` share an edge without being nested")]
    NotSeparated { side: Side, first: String, second: String },
    #[error("!-box `{0}` is nested inside another !-box")]
    NotMaximal(String),
    #[error("`{var}` needs {size} grid points but its phase group has only {order} elements")]
    QuotientTooSmall { var: String, size: usize, order: u32 },
    #[error("`{var}` needs {needed} grid points, only {given} supplied")]
    GridTooSmall { var: String, needed: usize, given: usize },
    #[error("family still contains !-boxes")]
    HasBangbox,
    #[error("grid size must be at least 1")]
    EmptyGrid,
}

/// How grids are sized.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum GridMode {
    /// One grid per variable, sized from the family with every box at its
    /// largest instance count.
    #[default]
    Uniform,
    /// Each bangbox-free family gets its own grids.
    PerEquation,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PlanSettings {
    pub grid: GridMode,
    /// Phase group order for ZX variables the family gives no quotient.
    pub quotient: Option<u32>,
    pub interp: InterpretOptions,
}

/// Concrete values for the parameters of one plan member.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Assignment {
    pub phases: BTreeMap<String, PhaseValue>,
    pub bangs: BTreeMap<String, u64>,
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .phases
            .iter()
            .map(|(k, v)| match v {
                PhaseValue::Angle(a) => format!("{k}={a}"),
                PhaseValue::Complex(c) => format!("{k}={c}"),
            })
            .collect();
        parts.extend(self.bangs.iter().map(|(k, v)| format!("{k}={v}")));
        if parts.is_empty() {
            f.write_str("(no parameters)")
        } else {
            f.write_str(&parts.join(", "))
        }
    }
}

/// A family on the way to being simple, with the values fixed so far.
#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    pub family: EquationFamily,
    pub assignment: Assignment,
}

impl Branch {
    pub fn root(family: EquationFamily) -> Self {
        Branch {
            family,
            assignment: Assignment::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlanEntry {
    pub assignment: Assignment,
    pub lhs: Diagram,
    pub rhs: Diagram,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationPlan {
    pub language: Language,
    pub entries: Vec<PlanEntry>,
    /// Largest instance bound seen per declared label.
    pub bounds: BTreeMap<String, u64>,
    /// Uniform grids per variable (empty in per-equation mode).
    pub grids: BTreeMap<String, Vec<PhaseValue>>,
    pub removal_order: Vec<String>,
    pub mode: Mode,
    pub grid_mode: GridMode,
    pub warnings: Vec<String>,
}

impl VerificationPlan {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &PlanEntry> {
        self.entries.iter()
    }
}

fn interp_options(family: &EquationFamily, settings: &PlanSettings) -> InterpretOptions {
    let mut opts = settings.interp.clone();
    if family.language() == Language::Zx {
        for side in [&family.lhs, &family.rhs] {
            for v in side.variables() {
                if let Some(g) = family.quotient_of(&v).or(settings.quotient) {
                    opts.quotients.insert(v, g);
                }
            }
        }
    }
    opts
}

/// `max deg⁺ + max deg⁻ + 1` over the two sides.
pub fn grid_size(lhs: &Diagram, rhs: &Diagram, var: &str, opts: &InterpretOptions) -> Result<usize, PlannerError> {
    let a = diagram_degree(lhs, var, opts)?.degree;
    let b = diagram_degree(rhs, var, opts)?.degree;
    let DegreePair { pos, neg } = a.join(b);
    Ok(pos.or_zero() as usize + neg.or_zero() as usize + 1)
}

/// `size` distinct values for a phase variable.
///
/// ZX: angles `2πk/size`, or the first `size` multiples of `2π/g` under a
/// quotient. ZH and ZW: the integers `1..=size`.
pub fn choose_points(language: Language, size: usize, quotient: Option<u32>) -> Result<Vec<PhaseValue>, PlannerError> {
    if size == 0 {
        return Err(PlannerError::EmptyGrid);
    }
    match language {
        Language::Zx => {
            let denom = match quotient {
                Some(g) if size > g as usize => {
                    return Err(PlannerError::QuotientTooSmall {
                        var: String::new(),
                        size,
                        order: g,
                    })
                }
                Some(g) => g as i64,
                None => size as i64,
            };
            Ok((0..size as i64)
                .map(|k| PhaseValue::Angle(Angle::pi_frac(2 * k, denom)))
                .collect())
        }
        Language::Zh | Language::Zw => Ok((1..=size as i64).map(|k| PhaseValue::Complex(Coeff::from_i64(k))).collect()),
    }
}

/// Edges with exactly one end inside the box.
fn join_width(d: &Diagram, label: &str) -> usize {
    let Some(b) = d.bangboxes().get(label) else { return 0 };
    d.edges().iter().filter(|e| b.contains(&e.a) != b.contains(&e.b)).count()
}

fn check_box(family: &EquationFamily, label: &str) -> Result<(), PlannerError> {
    for (side, d) in family.sides() {
        if !d.bangboxes().contains_key(label) {
            continue;
        }
        if !nesting_order(d)?.is_maximal(label) {
            return Err(PlannerError::NotMaximal(label.to_string()));
        }
        let report = d.is_separated();
        if let Some(o) = report.offenders.iter().find(|o| o.first == label || o.second == label) {
            return Err(PlannerError::NotSeparated {
                side,
                first: o.first.clone(),
                second: o.second.clone(),
            });
        }
    }
    Ok(())
}

/// Largest instance count that has to be checked for `label`:
/// `2^{n1} + 2^{n2}` with `nk` the join width on side `k`.
pub fn bbox_bound(family: &EquationFamily, label: &str) -> Result<u64, PlannerError> {
    check_box(family, label)?;
    let n1 = join_width(&family.lhs, label) as u32;
    let n2 = join_width(&family.rhs, label) as u32;
    let pow = |n: u32| 1u64.checked_shl(n).unwrap_or(u64::MAX);
    Ok(pow(n1).saturating_add(pow(n2)))
}

/// Join edges of `label` whose endpoint is not an arbitrary-arity node.
pub fn attachment_warnings(family: &EquationFamily, label: &str) -> Vec<String> {
    let mut out = Vec::new();
    for (side, d) in family.sides() {
        let Some(b) = d.bangboxes().get(label) else { continue };
        for e in d.edges() {
            if b.contains(&e.a) == b.contains(&e.b) {
                continue;
            }
            for ep in e.endpoints() {
                if let crate::diagram::Endpoint::Node { id, .. } = ep {
                    let kind = d.node(id).map(|n| n.kind);
                    if let Some(k) = kind.filter(|k| !k.is_spider()) {
                        out.push(format!(
                            "{side}: join edge of !-box `{label}` attaches to {k} node `{}`",
                            d.original_name(id)
                        ));
                    }
                }
            }
        }
    }
    out
}

/// Labels currently present whose declared ancestor is `label`.
fn instances_of(family: &EquationFamily, label: &str) -> Vec<String> {
    let mut out: BTreeSet<String> = BTreeSet::new();
    for (_, d) in family.sides() {
        for l in d.bangboxes().keys() {
            if d.original_name(l) == label {
                out.insert(l.clone());
            }
        }
    }
    out.into_iter().collect()
}

/// Replace `label` (every child instance of it, in child mode) by each
/// count from 0 to its bound.
pub fn bang_remove(branches: Vec<Branch>, label: &str) -> Result<Vec<Branch>, PlannerError> {
    let mut out = Vec::new();
    for branch in branches {
        let mut work = vec![branch];
        let instances = match work[0].family.mode {
            Mode::Copy => vec![label.to_string()],
            Mode::Child => instances_of(&work[0].family, label),
        };
        for inst in instances {
            let mut next = Vec::new();
            for b in work {
                let present = b.family.sides().iter().any(|(_, d)| d.bangboxes().contains_key(&inst));
                if !present {
                    next.push(b);
                    continue;
                }
                let n = bbox_bound(&b.family, &inst)?;
                for count in 0..=n {
                    let family = b.family.instantiate_bangbox(&inst, count as usize)?;
                    let mut assignment = b.assignment.clone();
                    assignment.bangs.insert(inst.clone(), count);
                    next.push(Branch { family, assignment });
                }
            }
            work = next;
        }
        out.extend(work);
    }
    Ok(out)
}

/// Substitute each grid value for `var`, checking the grid is big enough
/// for every family that mentions it.
pub fn alpha_remove(
    branches: Vec<Branch>,
    var: &str,
    points: &[PhaseValue],
    settings: &PlanSettings,
) -> Result<Vec<Branch>, PlannerError> {
    for b in &branches {
        if b.family.has_bangboxes() {
            return Err(PlannerError::HasBangbox);
        }
        if b.family.mentions(var) {
            let opts = interp_options(&b.family, settings);
            let needed = grid_size(&b.family.lhs, &b.family.rhs, var, &opts)?;
            if needed > points.len() {
                return Err(PlannerError::GridTooSmall {
                    var: var.to_string(),
                    needed,
                    given: points.len(),
                });
            }
        }
    }
    substitute_all(branches, var, points)
}

fn substitute_all(branches: Vec<Branch>, var: &str, points: &[PhaseValue]) -> Result<Vec<Branch>, PlannerError> {
    let mut out = Vec::new();
    for b in branches {
        if !b.family.mentions(var) {
            out.push(b);
            continue;
        }
        for p in points {
            let mut family = b.family.clone();
            family.lhs = family.lhs.instantiate_phase(var, p)?;
            family.rhs = family.rhs.instantiate_phase(var, p)?;
            let mut assignment = b.assignment.clone();
            assignment.phases.insert(var.to_string(), p.clone());
            out.push(Branch { family, assignment });
        }
    }
    Ok(out)
}

/// Outermost boxes first; among boxes that are available at the same time
/// the lexicographically smallest label goes first.
pub fn removal_order(family: &EquationFamily) -> Result<Vec<String>, PlannerError> {
    let forest = nesting_order(&family.lhs)?;
    let mut available: BTreeSet<String> = forest.roots().into_iter().map(String::from).collect();
    for l in family.rhs.bangboxes().keys() {
        if !forest.parent.contains_key(l) {
            available.insert(l.clone());
        }
    }
    let mut order = Vec::new();
    while let Some(l) = available.pop_first() {
        if let Some(cs) = forest.children.get(&l) {
            available.extend(cs.iter().cloned());
        }
        order.push(l);
    }
    Ok(order)
}

fn quotient_for(family: &EquationFamily, settings: &PlanSettings, var: &str) -> Option<u32> {
    if family.language() != Language::Zx {
        return None;
    }
    family.quotient_of(var).or(settings.quotient)
}

/// Build the finite list of simple equations that decides the family.
pub fn build_plan(family: &EquationFamily, settings: &PlanSettings) -> Result<VerificationPlan, PlannerError> {
    family.validate()?;
    if !is_well_nested(family) {
        return Err(PlannerError::NotWellNested);
    }
    for (side, d) in family.sides() {
        if let Some(o) = d.is_separated().offenders.first() {
            return Err(PlannerError::NotSeparated {
                side,
                first: o.first.clone(),
                second: o.second.clone(),
            });
        }
    }
    let order = removal_order(family)?;
    let mut warnings = Vec::new();
    for l in &order {
        warnings.extend(attachment_warnings(family, l));
    }

    let mut branches = vec![Branch::root(family.clone())];
    let mut bounds: BTreeMap<String, u64> = BTreeMap::new();
    for l in &order {
        for b in &branches {
            let instances = match b.family.mode {
                Mode::Copy => vec![l.clone()],
                Mode::Child => instances_of(&b.family, l),
            };
            for inst in instances {
                if b.family.sides().iter().any(|(_, d)| d.bangboxes().contains_key(&inst)) {
                    let n = bbox_bound(&b.family, &inst)?;
                    let e = bounds.entry(l.clone()).or_insert(0);
                    *e = (*e).max(n);
                }
            }
        }
        branches = bang_remove(branches, l)?;
    }

    let mut vars: BTreeSet<String> = BTreeSet::new();
    for b in &branches {
        for (_, d) in b.family.sides() {
            vars.extend(d.variables());
        }
    }

    let mut grids = BTreeMap::new();
    match settings.grid {
        GridMode::Uniform => {
            let widest = widest_family(family, &order)?;
            let wopts = interp_options(&widest, settings);
            for var in &vars {
                let from_widest = if widest.mentions(var) {
                    grid_size(&widest.lhs, &widest.rhs, var, &wopts)?
                } else {
                    1
                };
                let mut size = from_widest;
                for b in &branches {
                    if b.family.mentions(var) {
                        let opts = interp_options(&b.family, settings);
                        size = size.max(grid_size(&b.family.lhs, &b.family.rhs, var, &opts)?);
                    }
                }
                if size > from_widest {
                    warnings.push(format!(
                        "grid for `{var}` raised from {from_widest} to {size}: a smaller instance needs more points"
                    ));
                }
                let q = quotient_for(family, settings, family.lhs.original_name(var));
                let points = choose_points(family.language(), size, q).map_err(|e| name_var(e, var))?;
                branches = substitute_all(branches, var, &points)?;
                grids.insert(var.clone(), points);
            }
        }
        GridMode::PerEquation => {
            let mut done = Vec::new();
            for b in branches {
                let mut local = vec![b];
                for var in &vars {
                    let mut next = Vec::new();
                    for lb in local {
                        if !lb.family.mentions(var) {
                            next.push(lb);
                            continue;
                        }
                        let opts = interp_options(&lb.family, settings);
                        let size = grid_size(&lb.family.lhs, &lb.family.rhs, var, &opts)?;
                        let q = quotient_for(family, settings, family.lhs.original_name(var));
                        let points = choose_points(family.language(), size, q).map_err(|e| name_var(e, var))?;
                        next.extend(substitute_all(vec![lb], var, &points)?);
                    }
                    local = next;
                }
                done.extend(local);
            }
            branches = done;
        }
    }

    let entries = branches
        .into_iter()
        .map(|b| PlanEntry {
            assignment: b.assignment,
            lhs: b.family.lhs,
            rhs: b.family.rhs,
        })
        .collect();
    Ok(VerificationPlan {
        language: family.language(),
        entries,
        bounds,
        grids,
        removal_order: order,
        mode: family.mode,
        grid_mode: settings.grid,
        warnings,
    })
}

fn name_var(e: PlannerError, var: &str) -> PlannerError {
    match e {
        PlannerError::QuotientTooSmall { size, order, .. } => PlannerError::QuotientTooSmall {
            var: var.to_string(),
            size,
            order,
        },
        other => other,
    }
}

/// Every box instantiated at its bound, outermost first.
pub fn widest_family(family: &EquationFamily, order: &[String]) -> Result<EquationFamily, PlannerError> {
    let mut f = family.clone();
    for l in order {
        let instances = match f.mode {
            Mode::Copy => vec![l.clone()],
            Mode::Child => instances_of(&f, l),
        };
        for inst in instances {
            if f.sides().iter().any(|(_, d)| d.bangboxes().contains_key(&inst)) {
                let n = bbox_bound(&f, &inst)?;
                f = f.instantiate_bangbox(&inst, n as usize)?;
            }
        }
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{DiagramBuilder, NodeKind, PhaseExpr};
    use crate::phasepoly::LaurentPoly;

    fn zx_phase(terms: &[(&str, i64)]) -> Option<PhaseExpr> {
        Some(PhaseExpr::linear(Angle::zero(), terms.iter().map(|(v, k)| (*v, *k))))
    }

    /// Two fused spiders against one, each with a boxed input and output.
    fn spider_law(extra: Angle) -> EquationFamily {
        let mut l = DiagramBuilder::new(Language::Zx);
        l.input("i").output("o");
        l.node("s1", NodeKind::ZxZ, zx_phase(&[("a1", 1)]))
            .node("s2", NodeKind::ZxZ, zx_phase(&[("a2", 1)]))
            .edge("i", "s1")
            .edge("s1", "s2")
            .edge("s2", "o")
            .bangbox("d1", ["i"])
            .bangbox("d2", ["o"]);
        let mut r = DiagramBuilder::new(Language::Zx);
        r.input("i").output("o");
        r.node("s", NodeKind::ZxZ, Some(PhaseExpr::linear(extra, [("a1", 1), ("a2", 1)])))
            .edge("i", "s")
            .edge("s", "o")
            .bangbox("d1", ["i"])
            .bangbox("d2", ["o"]);
        EquationFamily::new(l.build().unwrap(), r.build().unwrap())
    }

    #[test]
    fn grids_for_zx() {
        let pts = choose_points(Language::Zx, 2, None).unwrap();
        assert_eq!(pts, vec![PhaseValue::Angle(Angle::zero()), PhaseValue::Angle(Angle::pi())]);
        assert!(matches!(
            choose_points(Language::Zx, 9, Some(8)),
            Err(PlannerError::QuotientTooSmall { size: 9, order: 8, .. })
        ));
        let q = choose_points(Language::Zx, 3, Some(8)).unwrap();
        assert_eq!(q[1], PhaseValue::Angle(Angle::pi_frac(1, 4)));
        let zh = choose_points(Language::Zh, 4, None).unwrap();
        assert_eq!(zh.len(), 4);
        assert_eq!(zh[3], PhaseValue::Complex(Coeff::from_i64(4)));
    }

    #[test]
    fn zh_grid_size() {
        let mk = |p: LaurentPoly| {
            let mut b = DiagramBuilder::new(Language::Zh);
            b.input("i").output("o");
            b.node("h", NodeKind::ZhH, Some(PhaseExpr::poly(p))).edge("i", "h").edge("h", "o");
            b.build().unwrap()
        };
        let a = LaurentPoly::var("a");
        let inv = LaurentPoly::monomial(Coeff::one(), crate::phasepoly::Exponents::from_pairs([("a", -1)]));
        let lhs = mk(&(&a * &a) + &inv);
        let rhs = mk(a);
        let opts = InterpretOptions::default();
        assert_eq!(grid_size(&lhs, &rhs, "a", &opts).unwrap(), 4);
        assert_eq!(grid_size(&lhs, &rhs, "b", &opts).unwrap(), 1);
    }

    #[test]
    fn spider_law_bounds_and_count() {
        let fam = spider_law(Angle::zero());
        assert_eq!(bbox_bound(&fam, "d1").unwrap(), 4);
        assert_eq!(bbox_bound(&fam, "d2").unwrap(), 4);
        let plan = build_plan(&fam, &PlanSettings::default()).unwrap();
        assert_eq!(plan.len(), 100);
        assert_eq!(plan.grids["a1"].len(), 2);
        assert_eq!(plan.removal_order, ["d1", "d2"]);
        assert!(plan.iter().all(|e| e.lhs.is_simple() && e.rhs.is_simple()));
        assert_eq!(plan, build_plan(&fam, &PlanSettings::default()).unwrap());
    }

    #[test]
    fn bang_remove_counts() {
        let fam = spider_law(Angle::zero());
        let one = bang_remove(vec![Branch::root(fam.clone())], "d1").unwrap();
        assert_eq!(one.len(), 5);
        let two = bang_remove(one, "d2").unwrap();
        assert_eq!(two.len(), 25);
        let same = bang_remove(two.clone(), "d1").unwrap();
        assert_eq!(same.len(), 25);
        let mut alpha = alpha_remove(two, "a1", &choose_points(Language::Zx, 2, None).unwrap(), &PlanSettings::default());
        assert_eq!(alpha.as_ref().unwrap().len(), 50);
        alpha = alpha_remove(alpha.unwrap(), "a2", &choose_points(Language::Zx, 2, None).unwrap(), &PlanSettings::default());
        assert_eq!(alpha.unwrap().len(), 100);
    }

    #[test]
    fn grid_too_small_and_boxes_left() {
        let fam = spider_law(Angle::zero());
        assert_eq!(
            alpha_remove(vec![Branch::root(fam.clone())], "a1", &[], &PlanSettings::default()),
            Err(PlannerError::HasBangbox)
        );
        let bare = fam.instantiate_bangbox("d1", 1).unwrap().instantiate_bangbox("d2", 1).unwrap();
        assert!(matches!(
            alpha_remove(vec![Branch::root(bare)], "a1", &[], &PlanSettings::default()),
            Err(PlannerError::GridTooSmall { needed: 2, given: 0, .. })
        ));
    }

    #[test]
    fn parameterless_family_is_one_equation() {
        let id = Diagram::identity(Language::Zx);
        let plan = build_plan(&EquationFamily::new(id.clone(), id), &PlanSettings::default()).unwrap();
        assert_eq!(plan.len(), 1);
    }

    #[test]
    fn per_equation_grids_never_exceed_uniform() {
        let fam = spider_law(Angle::zero());
        let per = build_plan(
            &fam,
            &PlanSettings {
                grid: GridMode::PerEquation,
                ..PlanSettings::default()
            },
        )
        .unwrap();
        assert!(per.len() <= 100);
        assert!(per.grids.is_empty());
    }

    #[test]
    fn empty_join_bound_is_two() {
        let mut b = DiagramBuilder::new(Language::Zx);
        b.node("z", NodeKind::ZxZ, None).bangbox("d", ["z"]);
        let d = b.build().unwrap();
        let fam = EquationFamily::new(d.clone(), d);
        assert_eq!(bbox_bound(&fam, "d").unwrap(), 2);
        assert_eq!(build_plan(&fam, &PlanSettings::default()).unwrap().len(), 3);
    }
}
