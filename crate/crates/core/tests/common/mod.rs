//! Shared helpers for the integration tests: fixture loading, random
//! generators, and a brute-force matrix oracle that shares no code with the
//! tensor engine.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::PathBuf;

use num_complex::Complex64;
use rand::Rng;

use famverify::cli::parse_equation_file;
use famverify::diagram::{Angle, Diagram, DiagramBuilder, Endpoint, EquationFamily, Language, NodeKind, PhaseExpr};
use famverify::phasepoly::{Coeff, Exponents, LaurentPoly};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn fixture(name: &str) -> EquationFamily {
    let text = std::fs::read_to_string(fixture_path(name)).unwrap();
    parse_equation_file(&text).unwrap()
}

/// Dense complex matrix as rows.
pub type Dense = Vec<Vec<Complex64>>;

fn node_value(kind: NodeKind, param: Complex64, bits: &[u8]) -> Complex64 {
    let n = bits.len();
    let ones = bits.iter().filter(|b| **b == 1).count();
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    match kind {
        NodeKind::ZxZ | NodeKind::ZwZ | NodeKind::ZhZ => {
            let p = if kind == NodeKind::ZhZ { one } else { param };
            let mut v = zero;
            if ones == 0 {
                v += one;
            }
            if ones == n {
                v += p;
            }
            v
        }
        NodeKind::ZxX => one + param * if ones % 2 == 0 { 1.0 } else { -1.0 },
        NodeKind::ZxH => {
            if ones == 2 {
                -one
            } else {
                one
            }
        }
        NodeKind::ZhH => {
            if ones == n {
                param
            } else {
                one
            }
        }
        NodeKind::ZwW => {
            if ones == 1 {
                one
            } else {
                zero
            }
        }
        NodeKind::ZwCross => {
            let (a, b, c, d) = (bits[0], bits[1], bits[2], bits[3]);
            if c == b && d == a {
                if a == 1 && b == 1 {
                    -one
                } else {
                    one
                }
            } else {
                zero
            }
        }
    }
}

fn param_of(kind: NodeKind, phase: &Option<PhaseExpr>, env: &BTreeMap<String, Complex64>) -> Complex64 {
    match phase {
        None => {
            if kind == NodeKind::ZhH {
                Complex64::new(-1.0, 0.0)
            } else {
                Complex64::new(1.0, 0.0)
            }
        }
        Some(PhaseExpr::AngleLinear { constant, coeffs }) => {
            let mut theta = constant.to_radians();
            let mut y = Complex64::new(1.0, 0.0);
            for (v, k) in coeffs {
                y *= env[v].powi(*k as i32);
            }
            theta = theta.rem_euclid(2.0 * PI);
            Complex64::from_polar(1.0, theta) * y
        }
        Some(PhaseExpr::PolyPhase(p)) => {
            let mut total = Complex64::new(0.0, 0.0);
            for (e, c) in p.terms() {
                let mut t = c.to_c64();
                for (v, k) in e.iter() {
                    t *= env[v].powi(k);
                }
                total += t;
            }
            total
        }
    }
}

/// Matrix of a bangbox-free diagram by summing over every wire labelling.
/// `env` gives `Y` (ZX) or the value itself (ZH/ZW) for each variable.
pub fn brute_force(d: &Diagram, env: &BTreeMap<String, Complex64>) -> Dense {
    let edges = d.edges();
    let e = edges.len();
    assert!(e <= 20, "oracle is exponential in the edge count");
    let slot_edge = |s: &str| {
        edges
            .iter()
            .position(|x| x.a == Endpoint::Boundary(s.into()) || x.b == Endpoint::Boundary(s.into()))
            .unwrap()
    };
    let ins: Vec<usize> = d.inputs().iter().map(|s| slot_edge(s)).collect();
    let outs: Vec<usize> = d.outputs().iter().map(|s| slot_edge(s)).collect();
    let mut legs: BTreeMap<&str, Vec<(u8, usize)>> = BTreeMap::new();
    for (k, edge) in edges.iter().enumerate() {
        for ep in [&edge.a, &edge.b] {
            if let Endpoint::Node { id, port } = ep {
                legs.entry(id.as_str()).or_default().push((port.unwrap_or(0), k));
            }
        }
    }
    for l in legs.values_mut() {
        l.sort_by_key(|x| x.0);
    }
    let params: BTreeMap<&str, Complex64> = d
        .nodes()
        .map(|n| (n.id.as_str(), param_of(n.kind, &n.phase, env)))
        .collect();
    let rows = 1usize << outs.len();
    let cols = 1usize << ins.len();
    let mut m = vec![vec![Complex64::new(0.0, 0.0); cols]; rows];
    for labelling in 0u32..(1u32 << e) {
        let bit = |k: usize| ((labelling >> k) & 1) as u8;
        let mut v = Complex64::new(1.0, 0.0);
        for n in d.nodes() {
            let bits: Vec<u8> = legs.get(n.id.as_str()).map_or(vec![], |l| l.iter().map(|x| bit(x.1)).collect());
            v *= node_value(n.kind, params[n.id.as_str()], &bits);
            if v == Complex64::new(0.0, 0.0) {
                break;
            }
        }
        let r = outs.iter().fold(0usize, |acc, &k| (acc << 1) | bit(k) as usize);
        let c = ins.iter().fold(0usize, |acc, &k| (acc << 1) | bit(k) as usize);
        // a wire between two boundary slots carries one bit to both
        m[r][c] += v;
    }
    m
}

pub fn max_diff(a: &Dense, b: &Dense) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .flat_map(|(x, y)| {
            assert_eq!(x.len(), y.len());
            x.iter().zip(y).map(|(p, q)| (p - q).norm())
        })
        .fold(0.0, f64::max)
}

pub fn coeff_rows(rows: usize, cols: usize, get: impl Fn(usize, usize) -> Coeff) -> Dense {
    (0..rows).map(|r| (0..cols).map(|c| get(r, c).to_c64()).collect()).collect()
}

/// Random node kinds available in a language.
pub fn kinds(lang: Language) -> &'static [NodeKind] {
    match lang {
        Language::Zx => &[NodeKind::ZxZ, NodeKind::ZxX, NodeKind::ZxH],
        Language::Zh => &[NodeKind::ZhZ, NodeKind::ZhH],
        Language::Zw => &[NodeKind::ZwZ, NodeKind::ZwW],
    }
}

pub fn random_phase<R: Rng>(rng: &mut R, lang: Language, kind: NodeKind, vars: &[&str], max_deg: i64) -> Option<PhaseExpr> {
    if !kind.admits_phase() || rng.gen_bool(0.2) {
        return None;
    }
    match lang {
        Language::Zx => {
            let c = Angle::pi_frac(rng.gen_range(0..8), 4);
            let mut terms: Vec<(&str, i64)> = Vec::new();
            for v in vars {
                if rng.gen_bool(0.6) {
                    terms.push((*v, rng.gen_range(-max_deg..=max_deg)));
                }
            }
            Some(PhaseExpr::linear(c, terms))
        }
        _ => {
            let mut p = LaurentPoly::constant(Coeff::from_i64(rng.gen_range(-2..=2)));
            for v in vars {
                if rng.gen_bool(0.6) {
                    let k = rng.gen_range(-max_deg..=max_deg) as i32;
                    let c = Coeff::from_i64(rng.gen_range(1..=2) * if rng.gen_bool(0.5) { 1 } else { -1 });
                    p = &p + &LaurentPoly::monomial(c, Exponents::from_pairs([(*v, k)]));
                }
            }
            Some(PhaseExpr::poly(p))
        }
    }
}

/// A connected-ish random diagram with `ins` inputs and `outs` outputs.
pub fn random_diagram<R: Rng>(rng: &mut R, lang: Language, nodes: usize, ins: usize, outs: usize, vars: &[&str], max_deg: i64) -> Diagram {
    let nodes = nodes.max(1);
    let ks = kinds(lang);
    let mut b = DiagramBuilder::new(lang);
    let mut chosen = Vec::new();
    let mut legs = vec![0usize; nodes];
    for k in 0..nodes {
        let mut kind = ks[rng.gen_range(0..ks.len())];
        if kind == NodeKind::ZxH {
            kind = NodeKind::ZxZ; // arity-2 nodes are placed separately below
        }
        chosen.push(kind);
        b.node(&format!("n{k}"), kind, random_phase(rng, lang, kind, vars, max_deg));
    }
    for s in 0..ins {
        let t = rng.gen_range(0..nodes);
        legs[t] += 1;
        b.input(&format!("i{s}")).edge(&format!("i{s}"), &format!("n{t}"));
    }
    for s in 0..outs {
        let t = rng.gen_range(0..nodes);
        legs[t] += 1;
        b.output(&format!("o{s}")).edge(&format!("n{t}"), &format!("o{s}"));
    }
    for k in 1..nodes {
        let j = rng.gen_range(0..k);
        b.edge(&format!("n{j}"), &format!("n{k}"));
    }
    let extra = rng.gen_range(0..=2);
    for _ in 0..extra {
        let x = rng.gen_range(0..nodes);
        let y = rng.gen_range(0..nodes);
        if x != y {
            b.edge(&format!("n{x}"), &format!("n{y}"));
        }
    }
    if lang == Language::Zx && nodes >= 2 && rng.gen_bool(0.5) {
        let x = rng.gen_range(0..nodes);
        let y = (x + 1) % nodes;
        b.node("h", NodeKind::ZxH, None).edge(&format!("n{x}"), "h").edge("h", &format!("n{y}"));
    }
    b.build().unwrap()
}

/// Rewrite that keeps the matrix: split a ZX Z spider `n0` into two joined
/// spiders with the phase on one of them.
pub fn unfuse_first_spider(d: &Diagram) -> Diagram {
    let Some(n0) = d.node("n0").filter(|n| n.kind == NodeKind::ZxZ || n.kind == NodeKind::ZhZ) else {
        return d.clone();
    };
    let kind = n0.kind;
    let mut b = DiagramBuilder::new(d.language());
    for s in d.inputs() {
        b.input(s);
    }
    for s in d.outputs() {
        b.output(s);
    }
    for n in d.nodes() {
        b.node(&n.id, n.kind, n.phase.clone());
    }
    b.node("n0_split", kind, None);
    // move every other leg of n0 to the new spider
    let mut flip = false;
    let name = |e: &Endpoint| match e {
        Endpoint::Node { id, port: Some(p) } => format!("{id}.{p}"),
        Endpoint::Node { id, port: None } => id.clone(),
        Endpoint::Boundary(s) => s.clone(),
    };
    for e in d.edges() {
        let mut a = name(&e.a);
        let mut c = name(&e.b);
        if a == "n0" && c != "n0" {
            if flip {
                a = "n0_split".into();
            }
            flip = !flip;
        } else if c == "n0" && a != "n0" {
            if flip {
                c = "n0_split".into();
            }
            flip = !flip;
        }
        b.edge(&a, &c);
    }
    b.edge("n0", "n0_split");
    b.build().unwrap()
}

/// Environment assigning `Y = e^{iθ}` (ZX) or the value itself.
pub fn env_of(lang: Language, values: &BTreeMap<String, f64>) -> BTreeMap<String, Complex64> {
    values
        .iter()
        .map(|(k, v)| {
            let y = match lang {
                Language::Zx => Complex64::from_polar(1.0, *v),
                _ => Complex64::new(*v, 0.0),
            };
            (k.clone(), y)
        })
        .collect()
}
