//! Structural analyses over !-boxes: nesting, well-nesting, separation.

use std::collections::{BTreeMap, BTreeSet};

use super::{Diagram, DiagramError, EquationFamily, Language, NodeKind};

/// Parent/children view of the containment order on !-box labels.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NestingForest {
    pub parent: BTreeMap<String, Option<String>>,
    pub children: BTreeMap<String, Vec<String>>,
}

impl NestingForest {
    pub fn roots(&self) -> Vec<&str> {
        self.parent
            .iter()
            .filter(|(_, p)| p.is_none())
            .map(|(l, _)| l.as_str())
            .collect()
    }

    pub fn is_maximal(&self, label: &str) -> bool {
        matches!(self.parent.get(label), Some(None))
    }

    pub fn depth(&self, label: &str) -> usize {
        let mut d = 0;
        let mut cur = label;
        while let Some(Some(p)) = self.parent.get(cur) {
            d += 1;
            cur = p;
        }
        d
    }

    /// Labels strictly below `label`.
    pub fn descendants(&self, label: &str) -> Vec<String> {
        let mut out = Vec::new();
        let mut stack = vec![label.to_string()];
        while let Some(l) = stack.pop() {
            for c in self.children.get(&l).into_iter().flatten() {
                out.push(c.clone());
                stack.push(c.clone());
            }
        }
        out.sort();
        out
    }
}

/// Compute the forest; fails when two boxes overlap without nesting.
pub fn nesting_order(d: &Diagram) -> Result<NestingForest, DiagramError> {
    let members: Vec<(&String, BTreeSet<_>)> =
        d.bangboxes().iter().map(|(l, b)| (l, b.members())).collect();
    for (i, (la, ma)) in members.iter().enumerate() {
        for (lb, mb) in &members[i + 1..] {
            if ma.is_empty() || mb.is_empty() {
                continue;
            }
            if ma == mb {
                return Err(DiagramError::AmbiguousNesting((*la).clone(), (*lb).clone()));
            }
            let disjoint = ma.is_disjoint(mb);
            if !disjoint && !ma.is_subset(mb) && !mb.is_subset(ma) {
                return Err(DiagramError::NotLaminar((*la).clone(), (*lb).clone()));
            }
        }
    }
    let mut forest = NestingForest::default();
    for (l, m) in &members {
        let parent = if m.is_empty() {
            None
        } else {
            members
                .iter()
                .filter(|(o, om)| o != l && m.is_subset(om))
                .min_by_key(|(o, om)| (om.len(), (*o).clone()))
                .map(|(o, _)| (*o).clone())
        };
        forest.children.entry((*l).clone()).or_default();
        if let Some(p) = &parent {
            forest.children.entry(p.clone()).or_default().push((*l).clone());
        }
        forest.parent.insert((*l).clone(), parent);
    }
    for c in forest.children.values_mut() {
        c.sort();
    }
    Ok(forest)
}

/// Both sides induce the same labelled forest.
pub fn is_well_nested(eq: &EquationFamily) -> bool {
    match (nesting_order(&eq.lhs), nesting_order(&eq.rhs)) {
        (Ok(a), Ok(b)) => a.parent == b.parent,
        _ => false,
    }
}

/// One edge joining two non-nested boxes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparationOffender {
    pub first: String,
    pub second: String,
    /// Node kinds at the two ends of each joining edge.
    pub kinds: Vec<(Option<NodeKind>, Option<NodeKind>)>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SeparationReport {
    pub offenders: Vec<SeparationOffender>,
}

impl SeparationReport {
    pub fn is_separated(&self) -> bool {
        self.offenders.is_empty()
    }

    pub fn involves(&self, label: &str) -> bool {
        self.offenders.iter().any(|o| o.first == label || o.second == label)
    }
}

impl Diagram {
    /// List pairs of disjoint boxes that share an edge.
    pub fn is_separated(&self) -> SeparationReport {
        let boxes: Vec<_> = self.bangboxes().iter().collect();
        let kind = |e: &super::Endpoint| match e {
            super::Endpoint::Node { id, .. } => self.node(id).map(|n| n.kind),
            super::Endpoint::Boundary(_) => None,
        };
        let mut report = SeparationReport::default();
        for (i, (la, ba)) in boxes.iter().enumerate() {
            for (lb, bb) in &boxes[i + 1..] {
                let (ma, mb) = (ba.members(), bb.members());
                if ma.is_subset(&mb) || mb.is_subset(&ma) {
                    continue;
                }
                let kinds: Vec<_> = self
                    .edges()
                    .iter()
                    .filter_map(|e| {
                        if ba.contains(&e.a) && bb.contains(&e.b) {
                            Some((kind(&e.a), kind(&e.b)))
                        } else if bb.contains(&e.a) && ba.contains(&e.b) {
                            Some((kind(&e.b), kind(&e.a)))
                        } else {
                            None
                        }
                    })
                    .collect();
                if !kinds.is_empty() {
                    report.offenders.push(SeparationOffender {
                        first: (*la).clone(),
                        second: (*lb).clone(),
                        kinds,
                    });
                }
            }
        }
        report
    }
}

/// Whether the calculus can in principle cut an edge between two nodes of
/// the given kinds. Tokens: `Z`, `X`, `H`, `W`, and `grey` for ZH.
pub fn separable_pair(language: Language, a: &str, b: &str) -> Result<bool, DiagramError> {
    let known: &[&str] = match language {
        Language::Zx => &["Z", "X"],
        Language::Zh => &["Z", "H", "grey"],
        Language::Zw => &["Z", "W"],
    };
    for t in [a, b] {
        if !known.contains(&t) {
            return Err(DiagramError::UnknownKind {
                language,
                token: t.to_string(),
            });
        }
    }
    let (x, y) = if a <= b { (a, b) } else { (b, a) };
    Ok(match language {
        Language::Zx => true,
        Language::Zh => matches!((x, y), ("Z", "Z") | ("Z", "grey") | ("H", "grey")),
        Language::Zw => matches!((x, y), ("Z", "Z") | ("W", "Z")),
    })
}
