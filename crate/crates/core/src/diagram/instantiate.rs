//! Replication of !-box contents.

use std::collections::{BTreeMap, BTreeSet};

use super::{
    nesting_order, BangBox, ChildOf, Diagram, DiagramError, Edge, Endpoint, EquationFamily, Mode, Node,
};

/// Child name for `name` in copy `index` of box `bbox`.
pub(crate) fn child_name(name: &str, bbox: &str, index: usize) -> String {
    format!("{name}@{bbox}.{index}")
}

impl Diagram {
    /// Replace the maximal box `label` by `count` copies of its contents.
    ///
    /// In child mode every phase variable that occurs only inside the box,
    /// and every nested label, is renamed per copy.
    pub fn instantiate_bangbox(&self, label: &str, count: usize, mode: Mode) -> Result<Diagram, DiagramError> {
        let local = match mode {
            Mode::Copy => BTreeSet::new(),
            Mode::Child => self.box_local_variables(label)?,
        };
        self.instantiate_with(label, count, mode, &local)
    }

    /// Variables that appear inside `label` and nowhere outside it.
    pub(crate) fn box_local_variables(&self, label: &str) -> Result<BTreeSet<String>, DiagramError> {
        let b = self
            .bangboxes()
            .get(label)
            .ok_or_else(|| DiagramError::UnknownLabel(label.to_string()))?;
        let mut inside = BTreeSet::new();
        let mut outside = BTreeSet::new();
        for n in self.nodes() {
            let vars = n.phase.as_ref().map(|p| p.variables()).unwrap_or_default();
            if b.nodes.contains(&n.id) {
                inside.extend(vars);
            } else {
                outside.extend(vars);
            }
        }
        Ok(inside.difference(&outside).cloned().collect())
    }

    pub(crate) fn instantiate_with(
        &self,
        label: &str,
        count: usize,
        mode: Mode,
        renamed_vars: &BTreeSet<String>,
    ) -> Result<Diagram, DiagramError> {
        let forest = nesting_order(self)?;
        let bbox = self
            .bangboxes
            .get(label)
            .ok_or_else(|| DiagramError::UnknownLabel(label.to_string()))?
            .clone();
        if !forest.is_maximal(label) {
            return Err(DiagramError::NotMaximalBox(label.to_string()));
        }
        let nested = forest.descendants(label);

        let mut out = self.clone();
        out.bangboxes.remove(label);
        for l in &nested {
            out.bangboxes.remove(l);
        }
        out.nodes.retain(|id, _| !bbox.nodes.contains(id));
        out.inputs.retain(|s| !bbox.slots.contains(s));
        out.outputs.retain(|s| !bbox.slots.contains(s));
        let inside = |e: &Endpoint| bbox.contains(e);
        out.edges.retain(|e| !inside(&e.a) && !inside(&e.b));

        let mut taken: BTreeSet<String> = self
            .nodes
            .keys()
            .chain(&self.inputs)
            .chain(&self.outputs)
            .cloned()
            .collect();
        let mut fresh = |base: String| {
            let mut name = base;
            while taken.contains(&name) {
                name.push('\'');
            }
            taken.insert(name.clone());
            name
        };

        let mut copy_boxes: BTreeMap<String, BangBox> = BTreeMap::new();
        for i in 0..count {
            let mut rename: BTreeMap<&str, String> = BTreeMap::new();
            for id in bbox.nodes.iter().chain(&bbox.slots) {
                rename.insert(id.as_str(), fresh(format!("{id}~{i}")));
            }
            let ep = |e: &Endpoint| match e {
                Endpoint::Node { id, port } => Endpoint::Node {
                    id: rename.get(id.as_str()).cloned().unwrap_or_else(|| id.clone()),
                    port: *port,
                },
                Endpoint::Boundary(s) => {
                    Endpoint::Boundary(rename.get(s.as_str()).cloned().unwrap_or_else(|| s.clone()))
                }
            };

            for id in &bbox.nodes {
                let src = &self.nodes[id];
                let mut phase = src.phase.clone();
                if mode == Mode::Child {
                    for v in renamed_vars {
                        if let Some(p) = &phase {
                            let child = child_name(v, label, i);
                            if p.mentions(v) {
                                phase = Some(p.rename_var(v, &child));
                            }
                            out.lineage.insert(
                                child,
                                ChildOf {
                                    parent: v.clone(),
                                    bbox: label.to_string(),
                                    index: i,
                                },
                            );
                        }
                    }
                }
                let new_id = rename[id.as_str()].clone();
                out.nodes.insert(
                    new_id.clone(),
                    Node {
                        id: new_id,
                        kind: src.kind,
                        phase,
                    },
                );
            }
            for s in self.inputs.iter().filter(|s| bbox.slots.contains(*s)) {
                out.inputs.push(rename[s.as_str()].clone());
            }
            for s in self.outputs.iter().filter(|s| bbox.slots.contains(*s)) {
                out.outputs.push(rename[s.as_str()].clone());
            }
            for e in &self.edges {
                if inside(&e.a) || inside(&e.b) {
                    out.edges.push(Edge::new(ep(&e.a), ep(&e.b)));
                }
            }
            for l in &nested {
                let src = &self.bangboxes[l];
                let target = match mode {
                    Mode::Copy => l.clone(),
                    Mode::Child => {
                        let c = child_name(l, label, i);
                        out.lineage.insert(
                            c.clone(),
                            ChildOf {
                                parent: l.clone(),
                                bbox: label.to_string(),
                                index: i,
                            },
                        );
                        c
                    }
                };
                let entry = copy_boxes.entry(target).or_default();
                entry.nodes.extend(src.nodes.iter().map(|n| rename[n.as_str()].clone()));
                entry.slots.extend(src.slots.iter().map(|n| rename[n.as_str()].clone()));
            }
        }
        out.bangboxes.extend(copy_boxes);
        out.validate()?;
        Ok(out)
    }
}

impl EquationFamily {
    /// Instantiate `label` on both sides with the family's mode.
    ///
    /// A side that lacks the label is left alone.
    pub fn instantiate_bangbox(&self, label: &str, count: usize) -> Result<EquationFamily, DiagramError> {
        let mut renamed = BTreeSet::new();
        if self.mode == Mode::Child {
            let mut inside = BTreeSet::new();
            let mut outside = BTreeSet::new();
            for (_, d) in self.sides() {
                let Some(b) = d.bangboxes().get(label) else {
                    outside.extend(d.variables());
                    continue;
                };
                for n in d.nodes() {
                    let vars = n.phase.as_ref().map(|p| p.variables()).unwrap_or_default();
                    if b.nodes.contains(&n.id) {
                        inside.extend(vars);
                    } else {
                        outside.extend(vars);
                    }
                }
            }
            renamed = inside.difference(&outside).cloned().collect();
        }
        let side = |d: &Diagram| {
            if d.bangboxes().contains_key(label) {
                d.instantiate_with(label, count, self.mode, &renamed)
            } else {
                Ok(d.clone())
            }
        };
        let lhs = side(&self.lhs)?;
        let rhs = side(&self.rhs)?;

        let mut phase_vars: Vec<String> = Vec::new();
        for v in &self.phase_vars {
            if renamed.contains(v) {
                phase_vars.extend((0..count).map(|i| child_name(v, label, i)));
            } else {
                phase_vars.push(v.clone());
            }
        }
        let mut bang_labels: Vec<String> = Vec::new();
        let nested: BTreeSet<String> = [&self.lhs, &self.rhs]
            .iter()
            .filter_map(|d| nesting_order(d).ok())
            .flat_map(|f| if f.parent.contains_key(label) { f.descendants(label) } else { vec![] })
            .collect();
        for l in &self.bang_labels {
            if l == label {
                continue;
            }
            if self.mode == Mode::Child && nested.contains(l) {
                bang_labels.extend((0..count).map(|i| child_name(l, label, i)));
            } else {
                bang_labels.push(l.clone());
            }
        }
        Ok(EquationFamily {
            lhs,
            rhs,
            phase_vars,
            bang_labels,
            mode: self.mode,
            quotients: self.quotients.clone(),
        })
    }
}
