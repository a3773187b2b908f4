//! Open-graph model of ZX, ZH and ZW diagrams.
//!
//! A [`Diagram`] is a set of generator nodes joined by edges, with ordered
//! input and output boundary slots and any number of labelled !-boxes. Legs
//! of spider-like nodes are unordered; the ZW crossing is the one generator
//! whose four legs are addressed by port (`id.0` … `id.3`).

mod analysis;
mod family;
mod instantiate;
mod phase;

pub use analysis::{
    is_well_nested, nesting_order, separable_pair, NestingForest, SeparationOffender,
    SeparationReport,
};
pub use family::{EquationFamily, FamilyError, Mode, Side};
pub use phase::{Angle, PhaseExpr, PhaseValue};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::phasepoly::PolyError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Language {
    Zx,
    Zh,
    Zw,
}

impl Language {
    pub fn name(self) -> &'static str {
        match self {
            Language::Zx => "zx",
            Language::Zh => "zh",
            Language::Zw => "zw",
        }
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Language {
    type Err = DiagramError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "zx" => Ok(Language::Zx),
            "zh" => Ok(Language::Zh),
            "zw" => Ok(Language::Zw),
            _ => Err(DiagramError::UnknownLanguage(s.to_string())),
        }
    }
}

/// Generator kinds, tagged by calculus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeKind {
    ZxZ,
    ZxX,
    ZxH,
    ZhZ,
    ZhH,
    ZwZ,
    ZwW,
    ZwCross,
}

impl NodeKind {
    pub fn language(self) -> Language {
        match self {
            NodeKind::ZxZ | NodeKind::ZxX | NodeKind::ZxH => Language::Zx,
            NodeKind::ZhZ | NodeKind::ZhH => Language::Zh,
            NodeKind::ZwZ | NodeKind::ZwW | NodeKind::ZwCross => Language::Zw,
        }
    }

    pub fn admits_phase(self) -> bool {
        matches!(self, NodeKind::ZxZ | NodeKind::ZxX | NodeKind::ZhH | NodeKind::ZwZ)
    }

    /// Arbitrary-arity nodes; the only ones a !-box join can attach to.
    pub fn is_spider(self) -> bool {
        !matches!(self, NodeKind::ZxH | NodeKind::ZwCross)
    }

    pub fn fixed_arity(self) -> Option<usize> {
        match self {
            NodeKind::ZxH => Some(2),
            NodeKind::ZwCross => Some(4),
            _ => None,
        }
    }

    /// Short name used in equation files.
    pub fn token(self) -> &'static str {
        match self {
            NodeKind::ZxZ | NodeKind::ZhZ | NodeKind::ZwZ => "Z",
            NodeKind::ZxX => "X",
            NodeKind::ZxH | NodeKind::ZhH => "H",
            NodeKind::ZwW => "W",
            NodeKind::ZwCross => "cross",
        }
    }

    pub fn from_token(language: Language, token: &str) -> Result<NodeKind, DiagramError> {
        let kind = match (language, token) {
            (Language::Zx, "Z") => NodeKind::ZxZ,
            (Language::Zx, "X") => NodeKind::ZxX,
            (Language::Zx, "H") => NodeKind::ZxH,
            (Language::Zh, "Z") => NodeKind::ZhZ,
            (Language::Zh, "H") => NodeKind::ZhH,
            (Language::Zw, "Z") => NodeKind::ZwZ,
            (Language::Zw, "W") => NodeKind::ZwW,
            (Language::Zw, "cross") => NodeKind::ZwCross,
            _ => {
                return Err(DiagramError::UnknownKind {
                    language,
                    token: token.to_string(),
                })
            }
        };
        Ok(kind)
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.language().name().to_uppercase(), self.token())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub id: String,
    pub kind: NodeKind,
    /// `None` means the zero phase (ZX) or no phase.
    pub phase: Option<PhaseExpr>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Endpoint {
    Node { id: String, port: Option<u8> },
    Boundary(String),
}

impl Endpoint {
    pub fn node(id: impl Into<String>) -> Self {
        Endpoint::Node {
            id: id.into(),
            port: None,
        }
    }

    pub fn port(id: impl Into<String>, port: u8) -> Self {
        Endpoint::Node {
            id: id.into(),
            port: Some(port),
        }
    }

    pub fn boundary(slot: impl Into<String>) -> Self {
        Endpoint::Boundary(slot.into())
    }

}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::Node { id, port: None } => write!(f, "{id}"),
            Endpoint::Node { id, port: Some(p) } => write!(f, "{id}.{p}"),
            Endpoint::Boundary(s) => write!(f, "{s}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub a: Endpoint,
    pub b: Endpoint,
}

impl Edge {
    pub fn new(a: Endpoint, b: Endpoint) -> Self {
        Edge { a, b }
    }

    pub fn endpoints(&self) -> [&Endpoint; 2] {
        [&self.a, &self.b]
    }
}

/// Something a !-box can enclose.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Member {
    Node(String),
    Slot(String),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BangBox {
    pub nodes: BTreeSet<String>,
    pub slots: BTreeSet<String>,
}

impl BangBox {
    pub fn members(&self) -> BTreeSet<Member> {
        self.nodes
            .iter()
            .cloned()
            .map(Member::Node)
            .chain(self.slots.iter().cloned().map(Member::Slot))
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty() && self.slots.is_empty()
    }

    pub fn contains(&self, e: &Endpoint) -> bool {
        match e {
            Endpoint::Node { id, .. } => self.nodes.contains(id),
            Endpoint::Boundary(s) => self.slots.contains(s),
        }
    }
}

/// Provenance of a child parameter or child !-box label.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChildOf {
    pub parent: String,
    pub bbox: String,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiagramError {
    #[error("unknown language `{0}`")]
    UnknownLanguage(String),
    #[error("`{token}` is not a node kind of {language}")]
    UnknownKind { language: Language, token: String },
    #[error("node kind {kind} does not belong to {language}")]
    KindNotInLanguage { kind: NodeKind, language: Language },
    #[error("duplicate identifier `{0}`")]
    DuplicateId(String),
    #[error("unknown node or boundary `{0}`")]
    UnknownEndpoint(String),
    #[error("node `{0}` does not admit a phase")]
    PhaseNotAdmitted(String),
    #[error("node `{0}` carries a phase of the wrong kind for its calculus")]
    PhaseKindMismatch(String),
    #[error("node `{node}` needs exactly {expected} legs, found {found}")]
    BadArity {
        node: String,
        expected: usize,
        found: usize,
    },
    #[error("bad port on node `{node}`: {detail}")]
    BadPort { node: String, detail: String },
    #[error("boundary slot `{slot}` must occur in exactly one edge (found {count})")]
    SlotUsage { slot: String, count: usize },
    #[error("boundary slot `{0}` is listed more than once")]
    SlotListedTwice(String),
    #[error("self-loop on node `{0}`, which is not a spider")]
    SelfLoopNotAllowed(String),
    #[error("!-box `{label}` refers to unknown member `{member}`")]
    UnknownBoxMember { label: String, member: String },
    #[error("!-boxes `{0}` and `{1}` overlap without nesting")]
    NotLaminar(String, String),
    #[error("!-boxes `{0}` and `{1}` enclose exactly the same members")]
    AmbiguousNesting(String, String),
    #[error("boundary slot `{slot}` outside !-box `{label}` is wired into it")]
    BoundaryCrossesBox { label: String, slot: String },
    #[error("unknown !-box `{0}`")]
    UnknownLabel(String),
    #[error("!-box `{0}` is nested inside another !-box")]
    NotMaximalBox(String),
    #[error("value of the wrong kind for phase variable `{0}`")]
    WrongValueKind(String),
    #[error("variable `{0}` set to zero where it appears with a negative power")]
    ZeroAtNegativePower(String),
    #[error(transparent)]
    Poly(PolyError),
    #[error("cannot combine a {0} diagram with a {1} diagram")]
    LanguageMismatch(Language, Language),
    #[error("boundary mismatch: {0} outputs against {1} inputs")]
    BoundaryMismatch(usize, usize),
}

/// An open graph of generators with boundaries and !-boxes.
///
/// Construct through [`DiagramBuilder`]; every public constructor validates.
#[derive(Clone, Debug, PartialEq)]
pub struct Diagram {
    language: Language,
    nodes: BTreeMap<String, Node>,
    edges: Vec<Edge>,
    inputs: Vec<String>,
    outputs: Vec<String>,
    bangboxes: BTreeMap<String, BangBox>,
    lineage: BTreeMap<String, ChildOf>,
}

impl Diagram {
    pub fn empty(language: Language) -> Self {
        Diagram {
            language,
            nodes: BTreeMap::new(),
            edges: Vec::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            bangboxes: BTreeMap::new(),
            lineage: BTreeMap::new(),
        }
    }

    /// A single wire from one input to one output.
    pub fn identity(language: Language) -> Self {
        let mut d = Diagram::empty(language);
        d.inputs.push("in".into());
        d.outputs.push("out".into());
        d.edges.push(Edge::new(Endpoint::boundary("in"), Endpoint::boundary("out")));
        d
    }

    pub fn language(&self) -> Language {
        self.language
    }

    pub fn nodes(&self) -> impl Iterator<Item = &Node> {
        self.nodes.values()
    }

    pub fn node(&self, id: &str) -> Option<&Node> {
        self.nodes.get(id)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[String] {
        &self.outputs
    }

    pub fn bangboxes(&self) -> &BTreeMap<String, BangBox> {
        &self.bangboxes
    }

    pub fn lineage(&self) -> &BTreeMap<String, ChildOf> {
        &self.lineage
    }

    pub fn has_bangboxes(&self) -> bool {
        !self.bangboxes.is_empty()
    }

    /// Phase variables mentioned anywhere.
    pub fn variables(&self) -> BTreeSet<String> {
        self.nodes
            .values()
            .filter_map(|n| n.phase.as_ref())
            .flat_map(PhaseExpr::variables)
            .collect()
    }

    pub fn mentions(&self, var: &str) -> bool {
        self.nodes
            .values()
            .filter_map(|n| n.phase.as_ref())
            .any(|p| p.mentions(var))
    }

    /// No !-boxes (not even empty ones) and no phase variables.
    pub fn is_simple(&self) -> bool {
        self.bangboxes.is_empty() && self.variables().is_empty()
    }

    /// Follow child provenance back to a declared name.
    pub fn original_name<'a>(&'a self, mut name: &'a str) -> &'a str {
        while let Some(c) = self.lineage.get(name) {
            name = &c.parent;
        }
        name
    }

    fn is_slot(&self, name: &str) -> bool {
        self.inputs.iter().chain(&self.outputs).any(|s| s == name)
    }

    fn name_taken(&self, name: &str) -> bool {
        self.nodes.contains_key(name) || self.is_slot(name)
    }

    /// Degree of each node (self-loops count twice).
    pub fn leg_counts(&self) -> BTreeMap<&str, usize> {
        let mut legs: BTreeMap<&str, usize> = self.nodes.keys().map(|k| (k.as_str(), 0)).collect();
        for e in &self.edges {
            for ep in e.endpoints() {
                if let Endpoint::Node { id, .. } = ep {
                    if let Some(c) = legs.get_mut(id.as_str()) {
                        *c += 1;
                    }
                }
            }
        }
        legs
    }

    /// Check every structural invariant.
    pub fn validate(&self) -> Result<(), DiagramError> {
        for (id, node) in &self.nodes {
            debug_assert_eq!(id, &node.id);
            if node.kind.language() != self.language {
                return Err(DiagramError::KindNotInLanguage {
                    kind: node.kind,
                    language: self.language,
                });
            }
            if let Some(p) = &node.phase {
                if !node.kind.admits_phase() {
                    return Err(DiagramError::PhaseNotAdmitted(id.clone()));
                }
                let ok = matches!(
                    (self.language, p),
                    (Language::Zx, PhaseExpr::AngleLinear { .. })
                        | (Language::Zh | Language::Zw, PhaseExpr::PolyPhase(_))
                );
                if !ok {
                    return Err(DiagramError::PhaseKindMismatch(id.clone()));
                }
            }
        }

        let mut seen = BTreeSet::new();
        for s in self.inputs.iter().chain(&self.outputs) {
            if !seen.insert(s.as_str()) {
                return Err(DiagramError::SlotListedTwice(s.clone()));
            }
            if self.nodes.contains_key(s) {
                return Err(DiagramError::DuplicateId(s.clone()));
            }
        }

        let mut slot_uses: BTreeMap<&str, usize> = seen.iter().map(|s| (*s, 0)).collect();
        let mut ports: BTreeMap<&str, Vec<u8>> = BTreeMap::new();
        for e in &self.edges {
            if let (Endpoint::Node { id: a, .. }, Endpoint::Node { id: b, .. }) = (&e.a, &e.b) {
                if a == b {
                    if let Some(n) = self.nodes.get(a) {
                        if !n.kind.is_spider() {
                            return Err(DiagramError::SelfLoopNotAllowed(a.clone()));
                        }
                    }
                }
            }
            for ep in e.endpoints() {
                match ep {
                    Endpoint::Boundary(s) => match slot_uses.get_mut(s.as_str()) {
                        Some(c) => *c += 1,
                        None => return Err(DiagramError::UnknownEndpoint(s.clone())),
                    },
                    Endpoint::Node { id, port } => {
                        let node = self
                            .nodes
                            .get(id)
                            .ok_or_else(|| DiagramError::UnknownEndpoint(id.clone()))?;
                        match (node.kind, port) {
                            (NodeKind::ZwCross, Some(p)) if *p < 4 => {
                                ports.entry(id.as_str()).or_default().push(*p)
                            }
                            (NodeKind::ZwCross, _) => {
                                return Err(DiagramError::BadPort {
                                    node: id.clone(),
                                    detail: "crossing legs need a port 0..3".into(),
                                })
                            }
                            (_, Some(_)) => {
                                return Err(DiagramError::BadPort {
                                    node: id.clone(),
                                    detail: "only crossings have numbered ports".into(),
                                })
                            }
                            _ => {}
                        }
                    }
                }
            }
        }
        for (slot, count) in slot_uses {
            if count != 1 {
                return Err(DiagramError::SlotUsage {
                    slot: slot.to_string(),
                    count,
                });
            }
        }
        let legs = self.leg_counts();
        for (id, node) in &self.nodes {
            if let Some(k) = node.kind.fixed_arity() {
                if legs[id.as_str()] != k {
                    return Err(DiagramError::BadArity {
                        node: id.clone(),
                        expected: k,
                        found: legs[id.as_str()],
                    });
                }
            }
            if node.kind == NodeKind::ZwCross {
                let mut p = ports.get(id.as_str()).cloned().unwrap_or_default();
                p.sort_unstable();
                if p != [0, 1, 2, 3] {
                    return Err(DiagramError::BadPort {
                        node: id.clone(),
                        detail: "each of ports 0..3 must be used exactly once".into(),
                    });
                }
            }
        }

        for (label, b) in &self.bangboxes {
            for n in &b.nodes {
                if !self.nodes.contains_key(n) {
                    return Err(DiagramError::UnknownBoxMember {
                        label: label.clone(),
                        member: n.clone(),
                    });
                }
            }
            for s in &b.slots {
                if !self.is_slot(s) {
                    return Err(DiagramError::UnknownBoxMember {
                        label: label.clone(),
                        member: s.clone(),
                    });
                }
            }
        }
        nesting_order(self)?;
        for (label, b) in &self.bangboxes {
            for e in &self.edges {
                for (x, y) in [(&e.a, &e.b), (&e.b, &e.a)] {
                    if let Endpoint::Boundary(s) = x {
                        if !b.contains(x) && b.contains(y) {
                            return Err(DiagramError::BoundaryCrossesBox {
                                label: label.clone(),
                                slot: s.clone(),
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Substitute a value for a phase variable in every node.
    pub fn instantiate_phase(&self, var: &str, value: &PhaseValue) -> Result<Diagram, DiagramError> {
        match (self.language, value) {
            (Language::Zx, PhaseValue::Angle(_)) | (Language::Zh | Language::Zw, PhaseValue::Complex(_)) => {}
            _ => return Err(DiagramError::WrongValueKind(var.to_string())),
        }
        let mut out = self.clone();
        for node in out.nodes.values_mut() {
            if let Some(p) = &node.phase {
                node.phase = Some(p.instantiate(var, value)?);
            }
        }
        Ok(out)
    }

    /// Rename `from` to a fresh, unused name derived from `base`.
    fn fresh_name(&self, base: &str, extra: &BTreeSet<String>) -> String {
        let mut name = base.to_string();
        while self.name_taken(&name) || extra.contains(&name) {
            name.push('\'');
        }
        name
    }

    /// Rename every node and slot of `other` that clashes with `self`.
    fn disjoint_copy(&self, other: &Diagram) -> Diagram {
        let mut taken: BTreeSet<String> = BTreeSet::new();
        let mut rename: BTreeMap<String, String> = BTreeMap::new();
        let names = other
            .nodes
            .keys()
            .chain(&other.inputs)
            .chain(&other.outputs);
        for n in names {
            let fresh = self.fresh_name(n, &taken);
            // must also avoid other's own names that we have not renamed
            let fresh = if fresh != *n {
                let mut f = fresh;
                while other.name_taken(&f) || taken.contains(&f) || self.name_taken(&f) {
                    f.push('\'');
                }
                f
            } else {
                fresh
            };
            taken.insert(fresh.clone());
            rename.insert(n.clone(), fresh);
        }
        other.rename_ids(&rename)
    }

    fn rename_ids(&self, rename: &BTreeMap<String, String>) -> Diagram {
        let r = |s: &String| rename.get(s).cloned().unwrap_or_else(|| s.clone());
        let ep = |e: &Endpoint| match e {
            Endpoint::Node { id, port } => Endpoint::Node { id: r(id), port: *port },
            Endpoint::Boundary(s) => Endpoint::Boundary(r(s)),
        };
        Diagram {
            language: self.language,
            nodes: self
                .nodes
                .values()
                .map(|n| {
                    let id = r(&n.id);
                    (id.clone(), Node { id, ..n.clone() })
                })
                .collect(),
            edges: self.edges.iter().map(|e| Edge::new(ep(&e.a), ep(&e.b))).collect(),
            inputs: self.inputs.iter().map(r).collect(),
            outputs: self.outputs.iter().map(r).collect(),
            bangboxes: self
                .bangboxes
                .iter()
                .map(|(l, b)| {
                    (
                        l.clone(),
                        BangBox {
                            nodes: b.nodes.iter().map(r).collect(),
                            slots: b.slots.iter().map(r).collect(),
                        },
                    )
                })
                .collect(),
            lineage: self.lineage.clone(),
        }
    }

    fn merge_boxes(&mut self, other: &Diagram) {
        for (l, b) in &other.bangboxes {
            let entry = self.bangboxes.entry(l.clone()).or_default();
            entry.nodes.extend(b.nodes.iter().cloned());
            entry.slots.extend(b.slots.iter().cloned());
        }
        self.lineage
            .extend(other.lineage.iter().map(|(k, v)| (k.clone(), v.clone())));
    }

    /// Place `other` beside `self`: boundaries are concatenated.
    pub fn tensor(&self, other: &Diagram) -> Result<Diagram, DiagramError> {
        if self.language != other.language {
            return Err(DiagramError::LanguageMismatch(self.language, other.language));
        }
        let other = self.disjoint_copy(other);
        let mut out = self.clone();
        out.nodes.extend(other.nodes.clone());
        out.edges.extend(other.edges.iter().cloned());
        out.inputs.extend(other.inputs.iter().cloned());
        out.outputs.extend(other.outputs.iter().cloned());
        out.merge_boxes(&other);
        out.validate()?;
        Ok(out)
    }

    /// Sequential composition: `self` first, its outputs glued to the inputs
    /// of `next` in order.
    pub fn compose(&self, next: &Diagram) -> Result<Diagram, DiagramError> {
        if self.language != next.language {
            return Err(DiagramError::LanguageMismatch(self.language, next.language));
        }
        if self.outputs.len() != next.inputs.len() {
            return Err(DiagramError::BoundaryMismatch(self.outputs.len(), next.inputs.len()));
        }
        let next = self.disjoint_copy(next);
        let glued: BTreeSet<String> = self.outputs.iter().chain(&next.inputs).cloned().collect();
        let mut edges: Vec<Option<Edge>> = self
            .edges
            .iter()
            .chain(&next.edges)
            .cloned()
            .map(Some)
            .collect();
        let mut out = Diagram::empty(self.language);
        out.nodes = self.nodes.clone();
        out.nodes.extend(next.nodes.clone());
        out.inputs = self.inputs.clone();
        out.outputs = next.outputs.clone();

        // Splice each glued pair: the two edges meeting there become one.
        let find = |edges: &[Option<Edge>], slot: &str| -> Option<(usize, Endpoint)> {
            edges.iter().enumerate().find_map(|(k, e)| {
                let e = e.as_ref()?;
                match (&e.a, &e.b) {
                    (Endpoint::Boundary(s), far) if s == slot => Some((k, far.clone())),
                    (far, Endpoint::Boundary(s)) if s == slot => Some((k, far.clone())),
                    _ => None,
                }
            })
        };
        for (o, i) in self.outputs.iter().zip(&next.inputs) {
            let (ko, fo) = find(&edges, o).expect("slot wired");
            let (ki, fi) = find(&edges, i).expect("slot wired");
            if ko == ki {
                // A bare wire closed on itself: keep it as a phase-free
                // spider with a self-loop, whose value is the wire dimension.
                edges[ko] = None;
                let id = out.fresh_name("loop", &BTreeSet::new());
                let kind = match self.language {
                    Language::Zx => NodeKind::ZxZ,
                    Language::Zh => NodeKind::ZhZ,
                    Language::Zw => NodeKind::ZwZ,
                };
                out.nodes.insert(id.clone(), Node { id: id.clone(), kind, phase: None });
                edges.push(Some(Edge::new(Endpoint::node(&id), Endpoint::node(&id))));
                continue;
            }
            edges[ko] = None;
            edges[ki] = Some(Edge::new(fo, fi));
        }
        out.edges = edges.into_iter().flatten().collect();
        out.merge_boxes(self);
        out.merge_boxes(&next);
        for b in out.bangboxes.values_mut() {
            b.slots.retain(|s| !glued.contains(s));
        }
        out.validate()?;
        Ok(out)
    }
}

/// Incremental construction of a [`Diagram`]; endpoints are resolved by
/// name when [`DiagramBuilder::build`] runs.
///
/// A name listed with [`input`](Self::input) or [`output`](Self::output) is a
/// boundary slot; any other name refers to a node, with `id.k` addressing
/// port `k` of a crossing.
#[derive(Clone, Debug)]
pub struct DiagramBuilder {
    language: Language,
    nodes: Vec<Node>,
    edges: Vec<(String, String)>,
    inputs: Vec<String>,
    outputs: Vec<String>,
    boxes: Vec<(String, Vec<String>)>,
}

impl DiagramBuilder {
    pub fn new(language: Language) -> Self {
        DiagramBuilder {
            language,
            nodes: Vec::new(),
            edges: Vec::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            boxes: Vec::new(),
        }
    }

    pub fn node(&mut self, id: &str, kind: NodeKind, phase: Option<PhaseExpr>) -> &mut Self {
        self.nodes.push(Node {
            id: id.to_string(),
            kind,
            phase,
        });
        self
    }

    pub fn edge(&mut self, a: &str, b: &str) -> &mut Self {
        self.edges.push((a.to_string(), b.to_string()));
        self
    }

    pub fn input(&mut self, slot: &str) -> &mut Self {
        self.inputs.push(slot.to_string());
        self
    }

    pub fn output(&mut self, slot: &str) -> &mut Self {
        self.outputs.push(slot.to_string());
        self
    }

    pub fn bangbox<I, S>(&mut self, label: &str, members: I) -> &mut Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        self.boxes.push((
            label.to_string(),
            members.into_iter().map(|s| s.as_ref().to_string()).collect(),
        ));
        self
    }

    fn resolve(&self, name: &str, nodes: &BTreeMap<String, Node>) -> Result<Endpoint, DiagramError> {
        if self.inputs.iter().chain(&self.outputs).any(|s| s == name) {
            return Ok(Endpoint::boundary(name));
        }
        if nodes.contains_key(name) {
            return Ok(Endpoint::node(name));
        }
        if let Some((id, port)) = name.rsplit_once('.') {
            if nodes.contains_key(id) {
                let port = port.parse::<u8>().map_err(|_| DiagramError::BadPort {
                    node: id.to_string(),
                    detail: format!("`{port}` is not a port number"),
                })?;
                return Ok(Endpoint::port(id, port));
            }
        }
        Err(DiagramError::UnknownEndpoint(name.to_string()))
    }

    pub fn build(&self) -> Result<Diagram, DiagramError> {
        let mut d = Diagram::empty(self.language);
        for n in &self.nodes {
            if d.nodes.insert(n.id.clone(), n.clone()).is_some() {
                return Err(DiagramError::DuplicateId(n.id.clone()));
            }
        }
        d.inputs = self.inputs.clone();
        d.outputs = self.outputs.clone();
        for (a, b) in &self.edges {
            let a = self.resolve(a, &d.nodes)?;
            let b = self.resolve(b, &d.nodes)?;
            d.edges.push(Edge::new(a, b));
        }
        for (label, members) in &self.boxes {
            let mut entry = d.bangboxes.remove(label).unwrap_or_default();
            for m in members {
                if d.is_slot(m) {
                    entry.slots.insert(m.clone());
                } else if d.nodes.contains_key(m) {
                    entry.nodes.insert(m.clone());
                } else {
                    return Err(DiagramError::UnknownBoxMember {
                        label: label.clone(),
                        member: m.clone(),
                    });
                }
            }
            d.bangboxes.insert(label.clone(), entry);
        }
        d.validate()?;
        Ok(d)
    }
}
