//! The line-oriented equation file format.
//!
//! ```text
//! language zx
//! phase a1 a2
//! bang d1 d2
//! mode copy
//!
//! lhs
//! inputs i
//! outputs o
//! node s1 Z a1
//! node s2 Z a2
//! edge i s1
//! edge s1 s2
//! edge s2 o
//! box d1 i
//! box d2 o
//!
//! rhs
//! ...
//! ```
//!
//! `#` starts a comment. Node kinds are `Z`, `X`, `H` (ZX), `Z`, `H` (ZH)
//! and `Z`, `W`, `cross` (ZW); crossing legs are written `id.0` … `id.3`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use super::expr::parse_phase;
use crate::diagram::{Diagram, DiagramBuilder, EquationFamily, Language, Mode, NodeKind, Side};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InputError {
    #[error("line {line}, column {col}: {message}")]
    Parse { line: usize, col: usize, message: String },
    #[error("{0}")]
    Semantic(String),
    #[error("cannot read `{path}`: {message}")]
    Io { path: String, message: String },
}

fn perr(line: usize, col: usize, message: impl Into<String>) -> InputError {
    InputError::Parse {
        line,
        col,
        message: message.into(),
    }
}

/// Words of a line with their 1-based starting columns.
fn words(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (k, c) in line.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push((s, &line[s..k]));
                start = None;
            }
            (false, None) => start = Some(k),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, &line[s..]));
    }
    out.into_iter()
        .map(|(s, w)| (line[..s].chars().count() + 1, w))
        .collect()
}

pub fn parse_equation_file(text: &str) -> Result<EquationFamily, InputError> {
    let mut language: Option<Language> = None;
    let mut vars: Vec<String> = Vec::new();
    let mut labels: Vec<String> = Vec::new();
    let mut mode = Mode::Copy;
    let mut quotients: BTreeMap<String, u32> = BTreeMap::new();
    let mut sides: [Option<DiagramBuilder>; 2] = [None, None];
    let mut current: Option<usize> = None;

    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = raw.split('#').next().unwrap_or("");
        let ws = words(line);
        let Some(&(col0, kw)) = ws.first() else { continue };
        let args = &ws[1..];
        let need = |n: usize| -> Result<(), InputError> {
            if args.len() < n {
                Err(perr(line_no, col0, format!("`{kw}` needs {n} argument(s)")))
            } else {
                Ok(())
            }
        };
        match kw {
            "language" | "phase" | "quotient" | "bang" | "mode" if current.is_some() => {
                return Err(perr(line_no, col0, format!("`{kw}` must appear before the lhs section")));
            }
            "language" => {
                need(1)?;
                language = Some(
                    args[0]
                        .1
                        .parse()
                        .map_err(|_| perr(line_no, args[0].0, format!("unknown language `{}`", args[0].1)))?,
                );
            }
            "phase" => vars.extend(args.iter().map(|(_, w)| w.to_string())),
            "bang" => labels.extend(args.iter().map(|(_, w)| w.to_string())),
            "mode" => {
                need(1)?;
                mode = args[0].1.parse().map_err(|m: String| perr(line_no, args[0].0, m))?;
            }
            "quotient" => {
                need(2)?;
                if !vars.iter().any(|v| v == args[0].1) {
                    return Err(perr(line_no, args[0].0, format!("`{}` is not a declared phase variable", args[0].1)));
                }
                let g: u32 = args[1]
                    .1
                    .parse()
                    .map_err(|_| perr(line_no, args[1].0, "quotient order must be a positive integer"))?;
                quotients.insert(args[0].1.to_string(), g);
            }
            "lhs" | "rhs" => {
                let lang = language.ok_or_else(|| perr(line_no, col0, "`language` must be declared first"))?;
                let k = usize::from(kw == "rhs");
                if sides[k].is_some() {
                    return Err(perr(line_no, col0, format!("second `{kw}` section")));
                }
                sides[k] = Some(DiagramBuilder::new(lang));
                current = Some(k);
            }
            _ => {
                let Some(k) = current else {
                    return Err(perr(line_no, col0, format!("unknown header keyword `{kw}`")));
                };
                let lang = language.expect("set before sections");
                let b = sides[k].as_mut().expect("section open");
                match kw {
                    "inputs" => {
                        for (_, w) in args {
                            b.input(w);
                        }
                    }
                    "outputs" => {
                        for (_, w) in args {
                            b.output(w);
                        }
                    }
                    "node" => {
                        need(2)?;
                        let kind = NodeKind::from_token(lang, args[1].1)
                            .map_err(|e| perr(line_no, args[1].0, e.to_string()))?;
                        let phase = match args.get(2) {
                            None => None,
                            Some(&(pcol, _)) => {
                                if !kind.admits_phase() {
                                    return Err(perr(line_no, pcol, format!("{kind} nodes take no phase")));
                                }
                                let byte = line.char_indices().nth(pcol - 1).map_or(line.len(), |(i, _)| i);
                                let text = line[byte..].trim_end();
                                Some(
                                    parse_phase(lang, text, &vars)
                                        .map_err(|(off, m)| perr(line_no, pcol + off, m))?,
                                )
                            }
                        };
                        b.node(args[0].1, kind, phase);
                    }
                    "edge" => {
                        need(2)?;
                        if args.len() > 2 {
                            return Err(perr(line_no, args[2].0, "an edge has exactly two endpoints"));
                        }
                        b.edge(args[0].1, args[1].1);
                    }
                    "box" => {
                        need(1)?;
                        b.bangbox(args[0].1, args[1..].iter().map(|(_, w)| *w));
                    }
                    other => return Err(perr(line_no, col0, format!("unknown keyword `{other}`"))),
                }
            }
        }
    }

    let [lhs, rhs] = sides;
    let build = |side: Side, b: Option<DiagramBuilder>| -> Result<Diagram, InputError> {
        b.ok_or_else(|| InputError::Semantic(format!("missing `{side}` section")))?
            .build()
            .map_err(|e| InputError::Semantic(format!("{side}: {e}")))
    };
    let family = EquationFamily {
        lhs: build(Side::Lhs, lhs)?,
        rhs: build(Side::Rhs, rhs)?,
        phase_vars: vars,
        bang_labels: labels,
        mode,
        quotients,
    };
    family.validate().map_err(|e| InputError::Semantic(e.to_string()))?;
    Ok(family)
}

fn write_side(out: &mut String, name: &str, d: &Diagram) {
    let _ = writeln!(out, "\n{name}");
    let _ = writeln!(out, "inputs {}", d.inputs().join(" ")).map(|_| ());
    let _ = writeln!(out, "outputs {}", d.outputs().join(" "));
    for n in d.nodes() {
        match &n.phase {
            Some(p) => {
                let _ = writeln!(out, "node {} {} {}", n.id, n.kind.token(), p);
            }
            None => {
                let _ = writeln!(out, "node {} {}", n.id, n.kind.token());
            }
        }
    }
    for e in d.edges() {
        let _ = writeln!(out, "edge {} {}", e.a, e.b);
    }
    for (label, b) in d.bangboxes() {
        let members: Vec<&str> = b.nodes.iter().chain(&b.slots).map(String::as_str).collect();
        let _ = writeln!(out, "box {label} {}", members.join(" "));
    }
}

/// Text that [`parse_equation_file`] reads back to the same family.
pub fn write_equation_file(family: &EquationFamily) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "language {}", family.language());
    if !family.phase_vars.is_empty() {
        let _ = writeln!(out, "phase {}", family.phase_vars.join(" "));
    }
    for (v, g) in &family.quotients {
        let _ = writeln!(out, "quotient {v} {g}");
    }
    if !family.bang_labels.is_empty() {
        let _ = writeln!(out, "bang {}", family.bang_labels.join(" "));
    }
    let _ = writeln!(out, "mode {}", family.mode);
    write_side(&mut out, "lhs", &family.lhs);
    write_side(&mut out, "rhs", &family.rhs);
    out
}
