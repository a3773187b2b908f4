//! Matrix semantics of diagrams.
//!
//! A bangbox-free diagram is evaluated by contracting one sparse tensor per
//! generator. Entries are [`LaurentPoly`] when phase variables remain and
//! [`Coeff`] for simple diagrams; ZX phases `b0 + Σ bj·αj` become
//! `e^{i·b0}·Π Yj^{bj}` with `Yj` written under the name of `αj`.

mod tensor;

pub use tensor::{Scalar, SparseTensor, MAX_LEGS};

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::diagram::{Diagram, Endpoint, NodeKind, PhaseExpr};
use crate::phasepoly::{Coeff, DegreePair, Exponents, LaurentPoly, PolyMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InterpError {
    #[error("diagram still contains !-boxes")]
    HasBangbox,
    #[error("diagram is not simple: node `{0}` carries a phase variable")]
    NotSimple(String),
    #[error("tensor with {entries} stored entries exceeds the cap of {cap}")]
    DimensionCapExceeded { entries: u128, cap: usize },
    #[error("tensor with {0} legs exceeds the limit of {MAX_LEGS}")]
    TooManyLegs(usize),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ContractionOrder {
    /// Repeatedly contract the connected pair with the smallest result.
    #[default]
    Greedy,
    /// Fold generators in node order.
    Sequential,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterpretOptions {
    /// Limit on stored nonzero entries of any tensor, and on `rows·cols`
    /// for dense output.
    pub max_entries: usize,
    /// Per-variable order `g` of a finite phase group: `Y^g = 1`.
    pub quotients: BTreeMap<String, u32>,
    pub order: ContractionOrder,
}

pub const DEFAULT_MAX_ENTRIES: usize = 1 << 14;

impl Default for InterpretOptions {
    fn default() -> Self {
        InterpretOptions {
            max_entries: DEFAULT_MAX_ENTRIES,
            quotients: BTreeMap::new(),
            order: ContractionOrder::Greedy,
        }
    }
}

/// Scalars a node phase can be turned into.
pub trait PhaseScalar: Scalar {
    fn from_phase(node: &str, phase: &PhaseExpr) -> Result<Self, InterpError>;
}

impl PhaseScalar for Coeff {
    fn from_phase(node: &str, phase: &PhaseExpr) -> Result<Self, InterpError> {
        match phase {
            PhaseExpr::AngleLinear { constant, coeffs } if coeffs.is_empty() => Ok(constant.to_coeff()),
            PhaseExpr::PolyPhase(p) => p.as_constant().ok_or_else(|| InterpError::NotSimple(node.to_string())),
            _ => Err(InterpError::NotSimple(node.to_string())),
        }
    }
}

impl PhaseScalar for LaurentPoly {
    fn from_phase(_node: &str, phase: &PhaseExpr) -> Result<Self, InterpError> {
        Ok(match phase {
            PhaseExpr::AngleLinear { constant, coeffs } => LaurentPoly::monomial(
                constant.to_coeff(),
                Exponents::from_pairs(coeffs.iter().map(|(v, k)| (v.as_str(), *k as i32))),
            ),
            PhaseExpr::PolyPhase(p) => p.clone(),
        })
    }
}

/// Sparse matrix with `2^outputs` rows and `2^inputs` columns; the first
/// boundary wire is the most significant bit.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix<S> {
    pub inputs: usize,
    pub outputs: usize,
    pub entries: BTreeMap<(u128, u128), S>,
}

impl<S: Scalar> SparseMatrix<S> {
    pub fn get(&self, row: u128, col: u128) -> S {
        self.entries.get(&(row, col)).cloned().unwrap_or_else(S::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// `(rows, cols)`, or `None` when either side exceeds `u128`.
    pub fn shape(&self) -> Option<(u128, u128)> {
        if self.inputs >= 128 || self.outputs >= 128 {
            None
        } else {
            Some((1u128 << self.outputs, 1u128 << self.inputs))
        }
    }

    fn dense_shape(&self, cap: usize) -> Result<(usize, usize), InterpError> {
        let too_big = InterpError::DimensionCapExceeded {
            entries: self
                .shape()
                .map(|(r, c)| r.saturating_mul(c))
                .unwrap_or(u128::MAX),
            cap,
        };
        let (r, c) = self.shape().ok_or(too_big.clone())?;
        if r.saturating_mul(c) > cap as u128 {
            return Err(too_big);
        }
        Ok((r as usize, c as usize))
    }

    fn dense(&self, cap: usize) -> Result<(usize, usize, Vec<S>), InterpError> {
        let (r, c) = self.dense_shape(cap)?;
        let mut out = vec![S::zero(); r * c];
        for ((i, j), v) in &self.entries {
            out[*i as usize * c + *j as usize] = v.clone();
        }
        Ok((r, c, out))
    }
}

impl SparseMatrix<LaurentPoly> {
    pub fn degree(&self, var: &str) -> DegreePair {
        self.entries
            .values()
            .fold(DegreePair::ZERO_POLY, |acc, p| acc.join(p.degree(var)))
    }

    pub fn to_poly_matrix(&self, cap: usize) -> Result<PolyMatrix, InterpError> {
        let (r, c, e) = self.dense(cap)?;
        Ok(PolyMatrix::from_entries(r, c, e).expect("shape matches"))
    }
}

impl SparseMatrix<Coeff> {
    pub fn is_exact(&self) -> bool {
        self.entries.values().all(Coeff::is_exact)
    }

    pub fn to_complex_matrix(&self, cap: usize) -> Result<ComplexMatrix, InterpError> {
        let (rows, cols, entries) = self.dense(cap)?;
        Ok(ComplexMatrix { rows, cols, entries })
    }

    /// Largest entrywise distance to `other` (same shape assumed).
    pub fn max_deviation(&self, other: &SparseMatrix<Coeff>) -> f64 {
        let mut worst: f64 = 0.0;
        for (k, v) in &self.entries {
            let w = other.entries.get(k).cloned().unwrap_or_else(Coeff::zero);
            worst = worst.max(v.abs_diff(&w));
        }
        for (k, w) in &other.entries {
            if !self.entries.contains_key(k) {
                worst = worst.max(w.abs());
            }
        }
        worst
    }
}

/// Dense complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Coeff>,
}

impl ComplexMatrix {
    pub fn get(&self, r: usize, c: usize) -> &Coeff {
        &self.entries[r * self.cols + c]
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        ComplexMatrix {
            rows: r,
            cols: c,
            entries: rows.iter().flat_map(|x| x.iter().map(|v| Coeff::from_i64(*v))).collect(),
        }
    }

    pub fn approx_eq(&self, other: &ComplexMatrix, tol: f64) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.entries.iter().zip(&other.entries).all(|(a, b)| a.approx_eq(b, tol))
    }
}

impl fmt::Display for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

fn default_phase<S: Scalar>(kind: NodeKind) -> S {
    match kind {
        NodeKind::ZhH => S::from_i64(-1),
        _ => S::one(),
    }
}

fn dense_guard(n: usize, cap: usize) -> Result<(), InterpError> {
    if n >= 127 || (1u128 << n) > cap as u128 {
        return Err(InterpError::DimensionCapExceeded {
            entries: if n >= 127 { u128::MAX } else { 1u128 << n },
            cap,
        });
    }
    Ok(())
}

/// Tensor of one generator on the given wires (ports in order for the
/// crossing). Wire dimension is 2 and nothing is normalised.
pub fn generator_tensor<S: Scalar>(
    kind: NodeKind,
    param: Option<S>,
    legs: Vec<usize>,
    cap: usize,
) -> Result<SparseTensor<S>, InterpError> {
    let n = legs.len();
    if n > MAX_LEGS {
        return Err(InterpError::TooManyLegs(n));
    }
    let c = param.unwrap_or_else(|| default_phase(kind));
    let all = if n == 0 { 0 } else { u128::MAX >> (128 - n) };
    let mut t = SparseTensor::new(legs);
    match kind {
        NodeKind::ZxZ | NodeKind::ZwZ => {
            t.insert(0, S::one());
            t.insert(all, c);
        }
        NodeKind::ZhZ => {
            t.insert(0, S::one());
            t.insert(all, S::one());
        }
        NodeKind::ZxX => {
            dense_guard(n, cap)?;
            let minus = c.mul(&S::from_i64(-1));
            for idx in 0..(1u128 << n) {
                let sign = if idx.count_ones() % 2 == 0 { &c } else { &minus };
                t.insert(idx, S::one().add(sign));
            }
        }
        NodeKind::ZxH => {
            for idx in 0..4u128 {
                t.insert(idx, S::from_i64(if idx == 3 { -1 } else { 1 }));
            }
        }
        NodeKind::ZhH => {
            dense_guard(n, cap)?;
            for idx in 0..(1u128 << n) {
                t.insert(idx, if idx == all { c.clone() } else { S::one() });
            }
        }
        NodeKind::ZwW => {
            for k in 0..n {
                t.insert(1u128 << k, S::one());
            }
        }
        NodeKind::ZwCross => {
            // ports 0,1 in; 2,3 out: a swap with a sign on |11>
            t.insert(0b0000, S::one());
            t.insert(0b0110, S::one());
            t.insert(0b1001, S::one());
            t.insert(0b1111, S::from_i64(-1));
        }
    }
    Ok(t)
}

struct Network<S> {
    tensors: Vec<SparseTensor<S>>,
    out_wires: Vec<usize>,
    in_wires: Vec<usize>,
}

fn build_network<S: PhaseScalar>(d: &Diagram, opts: &InterpretOptions) -> Result<Network<S>, InterpError> {
    if d.has_bangboxes() {
        return Err(InterpError::HasBangbox);
    }
    let mut slot_wire: BTreeMap<&str, usize> = BTreeMap::new();
    let mut node_legs: BTreeMap<&str, Vec<(u8, usize)>> = d.nodes().map(|n| (n.id.as_str(), Vec::new())).collect();
    let mut tensors = Vec::new();
    let mut next_wire = d.edges().len();
    for (w, e) in d.edges().iter().enumerate() {
        match (&e.a, &e.b) {
            (Endpoint::Boundary(a), Endpoint::Boundary(b)) => {
                let extra = next_wire;
                next_wire += 1;
                slot_wire.insert(a, w);
                slot_wire.insert(b, extra);
                let mut id = SparseTensor::new(vec![w, extra]);
                id.insert(0b00, S::one());
                id.insert(0b11, S::one());
                tensors.push(id);
            }
            _ => {
                for ep in e.endpoints() {
                    match ep {
                        Endpoint::Boundary(s) => {
                            slot_wire.insert(s, w);
                        }
                        Endpoint::Node { id, port } => {
                            node_legs.get_mut(id.as_str()).expect("validated").push((port.unwrap_or(0), w));
                        }
                    }
                }
            }
        }
    }
    for node in d.nodes() {
        let mut legs = node_legs.remove(node.id.as_str()).unwrap_or_default();
        if node.kind == NodeKind::ZwCross {
            legs.sort_by_key(|(p, _)| *p);
        }
        let param = node
            .phase
            .as_ref()
            .map(|p| S::from_phase(&node.id, p))
            .transpose()?;
        let t = generator_tensor(node.kind, param, legs.into_iter().map(|(_, w)| w).collect(), opts.max_entries)?;
        let t = t.trace_repeated();
        tensors.push(t.map(|v| v.reduce(&opts.quotients)));
    }
    Ok(Network {
        tensors,
        out_wires: d.outputs().iter().map(|s| slot_wire[s.as_str()]).collect(),
        in_wires: d.inputs().iter().map(|s| slot_wire[s.as_str()]).collect(),
    })
}

fn checked<S: Scalar>(t: SparseTensor<S>, opts: &InterpretOptions) -> Result<SparseTensor<S>, InterpError> {
    if t.rank() > MAX_LEGS {
        return Err(InterpError::TooManyLegs(t.rank()));
    }
    if t.nnz() > opts.max_entries {
        return Err(InterpError::DimensionCapExceeded {
            entries: t.nnz() as u128,
            cap: opts.max_entries,
        });
    }
    Ok(t.map(|v| v.reduce(&opts.quotients)))
}

fn contract_all<S: Scalar>(mut tensors: Vec<SparseTensor<S>>, opts: &InterpretOptions) -> Result<SparseTensor<S>, InterpError> {
    if opts.order == ContractionOrder::Sequential {
        let mut acc = SparseTensor::scalar(S::one());
        for t in &tensors {
            acc = checked(acc.contract(t), opts)?;
        }
        return Ok(acc);
    }
    loop {
        let mut best: Option<(usize, u128, usize, usize)> = None;
        for i in 0..tensors.len() {
            for j in i + 1..tensors.len() {
                let shared = tensors[i].legs.iter().filter(|w| tensors[j].legs.contains(w)).count();
                if shared == 0 {
                    continue;
                }
                let rank = tensors[i].rank() + tensors[j].rank() - 2 * shared;
                let work = tensors[i].nnz() as u128 * tensors[j].nnz() as u128;
                let key = (rank, work, i, j);
                if best.is_none_or(|b| key < b) {
                    best = Some(key);
                }
            }
        }
        let Some((_, _, i, j)) = best else { break };
        let b = tensors.remove(j);
        let a = tensors.remove(i);
        tensors.push(checked(a.contract(&b), opts)?);
    }
    // Disconnected components: smallest first.
    tensors.sort_by_key(|t| t.rank());
    let mut acc = SparseTensor::scalar(S::one());
    for t in &tensors {
        acc = checked(acc.contract(t), opts)?;
    }
    Ok(acc)
}

/// Evaluate a bangbox-free diagram to a sparse matrix over `S`.
pub fn interpret_sparse<S: PhaseScalar>(d: &Diagram, opts: &InterpretOptions) -> Result<SparseMatrix<S>, InterpError> {
    let net = build_network::<S>(d, opts)?;
    let result = contract_all(net.tensors, opts)?;
    let order: Vec<usize> = net.out_wires.iter().chain(&net.in_wires).copied().collect();
    let result = result.permute(&order);
    let (no, ni) = (net.out_wires.len(), net.in_wires.len());
    let mut entries = BTreeMap::new();
    for (idx, v) in result.entries {
        let mut row = 0u128;
        let mut col = 0u128;
        for k in 0..no {
            row = (row << 1) | ((idx >> k) & 1);
        }
        for k in 0..ni {
            col = (col << 1) | ((idx >> (no + k)) & 1);
        }
        entries.insert((row, col), v);
    }
    Ok(SparseMatrix {
        inputs: ni,
        outputs: no,
        entries,
    })
}

/// Laurent polynomial matrix of a bangbox-free diagram.
pub fn interpret_family(d: &Diagram, opts: &InterpretOptions) -> Result<PolyMatrix, InterpError> {
    interpret_sparse::<LaurentPoly>(d, opts)?.to_poly_matrix(opts.max_entries)
}

/// Complex matrix of a simple diagram.
pub fn interpret_simple(d: &Diagram, opts: &InterpretOptions) -> Result<ComplexMatrix, InterpError> {
    interpret_sparse::<Coeff>(d, opts)?.to_complex_matrix(opts.max_entries)
}

/// A degree pair together with whether it was read off the full matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DegreeReport {
    pub degree: DegreePair,
    pub exact: bool,
}

/// Sum of per-generator degrees in `var`; never below the true degree.
pub fn degree_bound(d: &Diagram, var: &str, quotient: Option<u32>) -> DegreePair {
    let mut total = DegreePair::finite(0, 0);
    for n in d.nodes() {
        let contribution = match &n.phase {
            Some(PhaseExpr::AngleLinear { coeffs, .. }) => match coeffs.get(var) {
                Some(&k) if k > 0 => DegreePair::finite(k as u32, 0),
                Some(&k) => DegreePair::finite(0, k.unsigned_abs() as u32),
                None => DegreePair::finite(0, 0),
            },
            Some(PhaseExpr::PolyPhase(p)) => p.degree(var).join(DegreePair::finite(0, 0)),
            None => DegreePair::finite(0, 0),
        };
        total = total + contribution;
    }
    match quotient {
        Some(g) if d.mentions(var) => {
            let pos = if total.neg.or_zero() == 0 {
                total.pos.or_zero().min(g - 1)
            } else {
                g - 1
            };
            DegreePair::finite(pos, 0)
        }
        _ => total,
    }
}

/// Degree of `var` in the interpretation, exact when the contraction fits
/// under the cap and an additive bound otherwise.
pub fn diagram_degree(d: &Diagram, var: &str, opts: &InterpretOptions) -> Result<DegreeReport, InterpError> {
    if d.has_bangboxes() {
        return Err(InterpError::HasBangbox);
    }
    if !d.mentions(var) {
        return Ok(DegreeReport {
            degree: DegreePair::finite(0, 0),
            exact: true,
        });
    }
    match interpret_sparse::<LaurentPoly>(d, opts) {
        Ok(m) => Ok(DegreeReport {
            degree: m.degree(var),
            exact: true,
        }),
        Err(InterpError::DimensionCapExceeded { .. } | InterpError::TooManyLegs(_)) => Ok(DegreeReport {
            degree: degree_bound(d, var, opts.quotients.get(var).copied()),
            exact: false,
        }),
        Err(e) => Err(e),
    }
}
