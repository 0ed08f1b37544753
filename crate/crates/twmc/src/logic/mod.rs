//! The specification logic: counting modal formulas with an arithmetic side
//! condition over set cardinalities and component counts.
//!
//! A problem specification has the shape "there exist vertex sets X̄ and
//! edge sets Ȳ such that an arithmetic sentence over |X_i|, |Y_j|, cc(·),
//! parameters and graph size holds, and *every* vertex satisfies a modal
//! formula". The modal layer speaks about one vertex at a time: set
//! membership, boolean connectives, and counting modalities `diamond[S](ψ)`
//! ("the number of incident edges whose far endpoint satisfies ψ lies in
//! S") with `box[S](ψ)` as the dual. On directed graphs the atoms `down`
//! and `up` test the orientation of the edge used to reach the current
//! vertex: `down` holds when the arc points at it, `up` when the arc points
//! back at the origin.
//!
//! Submodules: [`parse`] reads the textual format, [`eval`] is a direct
//! reference evaluator used by the brute-force oracle and the tests.

pub mod eval;
pub mod parse;

use std::fmt;

use num_bigint::BigInt;
use serde_json::Value;

use crate::graph::{EdgeId, Graph, Instance, Subset, Vertex};
use crate::upset::UpSet;
use crate::{Error, Result};

/// A reference to a vertex set or edge set: existentially quantified (index
/// into the problem's declaration order) or fixed by the instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetRef {
    Quantified(usize),
    Fixed(usize),
}

/// A counting modal formula, evaluated at a single vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    /// The current vertex belongs to the referenced vertex set.
    VertexSet(SetRef),
    /// The accessing edge belongs to the referenced edge set (only valid
    /// under a modality).
    EdgeSet(SetRef),
    /// The accessing arc points at the current vertex (directed only).
    Down,
    /// The accessing arc points at the neighbour we came from.
    Up,
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    /// Counting modality: the number of incident edges whose far endpoint
    /// satisfies the body lies in the set.
    Diamond(UpSet, Box<Formula>),
    /// Dual modality: the number of incident edges whose far endpoint
    /// *fails* the body does not lie in the set.
    Box(UpSet, Box<Formula>),
}

/// Comparison operators of the arithmetic layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Le,
    Lt,
    Ge,
    Gt,
    Eq,
    Ne,
}

impl CmpOp {
    fn symbol(self) -> &'static str {
        match self {
            CmpOp::Le => "<=",
            CmpOp::Lt => "<",
            CmpOp::Ge => ">=",
            CmpOp::Gt => ">",
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
        }
    }
}

/// An expression of the arithmetic side condition. Integer leaves are
/// parameters, cardinalities `|X|`, component counts `cc(X)`, and the graph
/// sizes `|V|`, `|E|`; booleans are built with comparisons and `and`, `or`,
/// `not`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ArithExpr {
    Num(i64),
    Param(usize),
    CardV(SetRef),
    CardE(SetRef),
    CcV(SetRef),
    CcE(SetRef),
    NumVertices,
    NumEdges,
    Add(Box<ArithExpr>, Box<ArithExpr>),
    Sub(Box<ArithExpr>, Box<ArithExpr>),
    Mul(Box<ArithExpr>, Box<ArithExpr>),
    Cmp(CmpOp, Box<ArithExpr>, Box<ArithExpr>),
    And(Box<ArithExpr>, Box<ArithExpr>),
    Or(Box<ArithExpr>, Box<ArithExpr>),
    Not(Box<ArithExpr>),
}

/// A complete problem specification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Problem {
    pub name: String,
    pub directed: bool,
    /// Parameter names, in declaration order.
    pub params: Vec<String>,
    pub fixed_vertex_sets: Vec<String>,
    pub fixed_edge_sets: Vec<String>,
    /// Existentially quantified vertex sets, in declaration order.
    pub vertex_sets: Vec<String>,
    pub edge_sets: Vec<String>,
    /// Conjunction of arithmetic side conditions.
    pub requires: Vec<ArithExpr>,
    /// The modal formula every vertex must satisfy.
    pub matrix: Formula,
}

impl Problem {
    /// Number of quantified vertex sets.
    pub fn p1(&self) -> usize {
        self.vertex_sets.len()
    }

    /// Number of quantified edge sets.
    pub fn q1(&self) -> usize {
        self.edge_sets.len()
    }

    /// Which quantified vertex sets appear under `cc(..)` in the side
    /// condition.
    pub fn cc_vertex_used(&self) -> Vec<bool> {
        let mut used = vec![false; self.p1()];
        for r in &self.requires {
            mark_qcc(r, &mut used, true);
        }
        used
    }

    /// Which quantified edge sets appear under `cc(..)`.
    pub fn cc_edge_used(&self) -> Vec<bool> {
        let mut used = vec![false; self.q1()];
        for r in &self.requires {
            mark_qcc(r, &mut used, false);
        }
        used
    }

    /// Whether any quantified set's component count constrains the answer.
    pub fn uses_cc(&self) -> bool {
        self.cc_vertex_used().iter().chain(self.cc_edge_used().iter()).any(|&b| b)
    }

    /// Validates the well-formedness rules: name hygiene, reference ranges,
    /// placement of edge atoms and orientation atoms, boolean-typed side
    /// conditions, the monotone component-count fragment, and the modality
    /// budget of the engines.
    pub fn check(&self) -> Result<()> {
        let ill = |reason: String| Error::IllFormed { problem: self.name.clone(), reason };

        let mut names = std::collections::HashSet::new();
        for name in self
            .params
            .iter()
            .chain(&self.fixed_vertex_sets)
            .chain(&self.fixed_edge_sets)
            .chain(&self.vertex_sets)
            .chain(&self.edge_sets)
        {
            if parse::is_reserved(name) || !parse::is_valid_name(name) {
                return Err(ill(format!("`{name}` cannot be used as a name")));
            }
            if !names.insert(name.clone()) {
                return Err(ill(format!("name `{name}` declared twice")));
            }
        }
        if self.p1() > 16 || self.q1() > 16 {
            return Err(ill("more than 16 quantified sets of one kind".into()));
        }
        if self.fixed_vertex_sets.len() > 16 || self.fixed_edge_sets.len() > 16 {
            return Err(ill("more than 16 fixed sets of one kind".into()));
        }

        self.check_matrix(&self.matrix, 0).map_err(ill)?;
        if count_modalities(&self.matrix) > 64 {
            return Err(ill("more than 64 modalities in the formula".into()));
        }

        for r in &self.requires {
            if self.ty(r).map_err(&ill)? != Ty::Bool {
                return Err(ill("a `require` clause must be a comparison or boolean".into()));
            }
            self.check_monotone_positive(r).map_err(&ill)?;
        }
        Ok(())
    }

    fn check_matrix(&self, f: &Formula, depth: usize) -> std::result::Result<(), String> {
        match f {
            Formula::VertexSet(r) => self.check_ref(*r, true),
            Formula::EdgeSet(r) => {
                if depth == 0 {
                    return Err("edge-set atom used outside a modality".into());
                }
                self.check_ref(*r, false)
            }
            Formula::Down | Formula::Up => {
                if depth == 0 {
                    return Err("`up`/`down` used outside a modality".into());
                }
                if !self.directed {
                    return Err("`up`/`down` used in an undirected problem".into());
                }
                Ok(())
            }
            Formula::Not(a) => self.check_matrix(a, depth),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => {
                self.check_matrix(a, depth)?;
                self.check_matrix(b, depth)
            }
            Formula::Diamond(_, body) | Formula::Box(_, body) => {
                self.check_matrix(body, depth + 1)
            }
        }
    }

    fn check_ref(&self, r: SetRef, vertex: bool) -> std::result::Result<(), String> {
        let (len, kind) = match (r, vertex) {
            (SetRef::Quantified(_), true) => (self.p1(), "vertex"),
            (SetRef::Quantified(_), false) => (self.q1(), "edge"),
            (SetRef::Fixed(_), true) => (self.fixed_vertex_sets.len(), "fixed vertex"),
            (SetRef::Fixed(_), false) => (self.fixed_edge_sets.len(), "fixed edge"),
        };
        let idx = match r {
            SetRef::Quantified(i) | SetRef::Fixed(i) => i,
        };
        if idx >= len {
            return Err(format!("{kind} set reference {idx} out of range"));
        }
        Ok(())
    }

    fn ty(&self, e: &ArithExpr) -> std::result::Result<Ty, String> {
        let int = |x: &ArithExpr, this: &Self| -> std::result::Result<(), String> {
            match this.ty(x)? {
                Ty::Int => Ok(()),
                Ty::Bool => Err("expected an integer expression".into()),
            }
        };
        match e {
            ArithExpr::Num(_) | ArithExpr::NumVertices | ArithExpr::NumEdges => Ok(Ty::Int),
            ArithExpr::Param(i) => {
                if *i >= self.params.len() {
                    return Err(format!("parameter reference {i} out of range"));
                }
                Ok(Ty::Int)
            }
            ArithExpr::CardV(r) | ArithExpr::CcV(r) => {
                self.check_ref(*r, true)?;
                Ok(Ty::Int)
            }
            ArithExpr::CardE(r) | ArithExpr::CcE(r) => {
                self.check_ref(*r, false)?;
                Ok(Ty::Int)
            }
            ArithExpr::Add(a, b) | ArithExpr::Sub(a, b) | ArithExpr::Mul(a, b) => {
                int(a, self)?;
                int(b, self)?;
                Ok(Ty::Int)
            }
            ArithExpr::Cmp(_, a, b) => {
                int(a, self)?;
                int(b, self)?;
                Ok(Ty::Bool)
            }
            ArithExpr::And(a, b) | ArithExpr::Or(a, b) => {
                for x in [a, b] {
                    if self.ty(x)? != Ty::Bool {
                        return Err("`and`/`or` expects boolean operands".into());
                    }
                }
                Ok(Ty::Bool)
            }
            ArithExpr::Not(a) => {
                if self.ty(a)? != Ty::Bool {
                    return Err("`not` expects a boolean operand".into());
                }
                Ok(Ty::Bool)
            }
        }
    }

    /// Enforces the monotone fragment for quantified component counts: such
    /// a `cc(Q)` may only appear as a nonnegatively-scaled summand on the
    /// left of `<=`/`<` whose right side is free of quantified `cc`, and
    /// those atoms may only sit under `and`/`or`. (Lowering any cc value
    /// then never turns the side condition false-to-true in the wrong
    /// direction, which the randomized engine's branch relaxation needs.)
    fn check_monotone_positive(&self, e: &ArithExpr) -> std::result::Result<(), String> {
        const MSG: &str = "component counts of quantified sets may only be bounded from above \
                           (summands on the left of <= or <, under and/or only)";
        match e {
            ArithExpr::And(a, b) | ArithExpr::Or(a, b) => {
                self.check_monotone_positive(a)?;
                self.check_monotone_positive(b)
            }
            ArithExpr::Not(a) => {
                if has_qcc(a) {
                    Err(MSG.into())
                } else {
                    Ok(())
                }
            }
            ArithExpr::Cmp(op, l, r) => {
                if !has_qcc(l) && !has_qcc(r) {
                    return Ok(());
                }
                if !matches!(op, CmpOp::Le | CmpOp::Lt) || has_qcc(r) {
                    return Err(MSG.into());
                }
                check_cc_summands(l).map_err(|_| String::from(MSG))
            }
            _ => {
                if has_qcc(e) {
                    Err(MSG.into())
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Materializes an instance from a bindings document: a JSON object with
    /// `params` (name → integer) and `fixed` (name → vertex list / endpoint
    /// pair list). Vertices are written as 1-based numbers for unlabeled
    /// graphs and as label strings for labeled ones.
    pub fn bind(&self, graph: Graph, bindings: &str) -> Result<Instance> {
        let doc: Value =
            serde_json::from_str(bindings).map_err(|e| Error::Bindings(format!("bad JSON: {e}")))?;
        let obj = doc.as_object().ok_or_else(|| Error::Bindings("expected an object".into()))?;
        for key in obj.keys() {
            if key != "params" && key != "fixed" {
                return Err(Error::Bindings(format!("unknown top-level key `{key}`")));
            }
        }
        let empty = serde_json::Map::new();
        let params_doc = match obj.get("params") {
            Some(v) => v
                .as_object()
                .ok_or_else(|| Error::Bindings("`params` must be an object".into()))?,
            None => &empty,
        };
        let fixed_doc = match obj.get("fixed") {
            Some(v) => {
                v.as_object().ok_or_else(|| Error::Bindings("`fixed` must be an object".into()))?
            }
            None => &empty,
        };
        for key in params_doc.keys() {
            if !self.params.contains(key) {
                return Err(Error::Bindings(format!("unknown parameter `{key}`")));
            }
        }
        for key in fixed_doc.keys() {
            if !self.fixed_vertex_sets.contains(key) && !self.fixed_edge_sets.contains(key) {
                return Err(Error::Bindings(format!("unknown fixed set `{key}`")));
            }
        }
        let params: Vec<i64> = self
            .params
            .iter()
            .map(|name| {
                params_doc
                    .get(name)
                    .ok_or_else(|| Error::Bindings(format!("missing parameter `{name}`")))?
                    .as_i64()
                    .ok_or_else(|| Error::Bindings(format!("parameter `{name}` must be an integer")))
            })
            .collect::<Result<_>>()?;
        let fixed_vertex_sets: Vec<Vec<Vertex>> = self
            .fixed_vertex_sets
            .iter()
            .map(|name| {
                let list = fixed_doc
                    .get(name)
                    .ok_or_else(|| Error::Bindings(format!("missing fixed set `{name}`")))?
                    .as_array()
                    .ok_or_else(|| Error::Bindings(format!("fixed set `{name}` must be a list")))?;
                list.iter().map(|v| resolve_vertex(&graph, v)).collect()
            })
            .collect::<Result<_>>()?;
        let fixed_edge_sets: Vec<Vec<EdgeId>> = self
            .fixed_edge_sets
            .iter()
            .map(|name| {
                let list = fixed_doc
                    .get(name)
                    .ok_or_else(|| Error::Bindings(format!("missing fixed set `{name}`")))?
                    .as_array()
                    .ok_or_else(|| Error::Bindings(format!("fixed set `{name}` must be a list")))?;
                list.iter().map(|v| resolve_edge(&graph, v)).collect()
            })
            .collect::<Result<_>>()?;
        Instance::new(graph, fixed_vertex_sets, fixed_edge_sets, params)
    }

    /// Exact component counts of the instance's fixed sets, used when
    /// evaluating the side condition.
    pub fn fixed_cc(&self, inst: &Instance) -> (Vec<u64>, Vec<u64>) {
        let ccv = inst
            .fixed_vertex_sets()
            .iter()
            .map(|s| crate::graph::connected_components(inst.graph(), Subset::Vertices(s)) as u64)
            .collect();
        let cce = inst
            .fixed_edge_sets()
            .iter()
            .map(|s| crate::graph::connected_components(inst.graph(), Subset::Edges(s)) as u64)
            .collect();
        (ccv, cce)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ty {
    Int,
    Bool,
}

fn resolve_vertex(graph: &Graph, value: &Value) -> Result<Vertex> {
    match value {
        Value::Number(num) => {
            let v = num
                .as_u64()
                .ok_or_else(|| Error::Bindings(format!("bad vertex number {num}")))?;
            if v == 0 || v > u64::from(graph.n()) {
                return Err(Error::Bindings(format!(
                    "vertex {v} outside 1..={}",
                    graph.n()
                )));
            }
            Ok((v - 1) as Vertex)
        }
        Value::String(label) => (0..graph.n())
            .find(|&v| graph.vertex_name(v) == *label)
            .ok_or_else(|| Error::Bindings(format!("no vertex labeled `{label}`"))),
        other => Err(Error::Bindings(format!("bad vertex reference {other}"))),
    }
}

fn resolve_edge(graph: &Graph, value: &Value) -> Result<EdgeId> {
    let pair = value
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| Error::Bindings(format!("an edge must be a pair, got {value}")))?;
    let a = resolve_vertex(graph, &pair[0])?;
    let b = resolve_vertex(graph, &pair[1])?;
    graph
        .edges()
        .iter()
        .position(|e| {
            (e.u == a && e.v == b) || (!graph.is_directed() && e.u == b && e.v == a)
        })
        .map(|i| i as EdgeId)
        .ok_or_else(|| {
            Error::Bindings(format!(
                "no edge {}-{} in the graph",
                graph.vertex_name(a),
                graph.vertex_name(b)
            ))
        })
}

fn has_qcc(e: &ArithExpr) -> bool {
    match e {
        ArithExpr::CcV(SetRef::Quantified(_)) | ArithExpr::CcE(SetRef::Quantified(_)) => true,
        ArithExpr::Num(_)
        | ArithExpr::Param(_)
        | ArithExpr::NumVertices
        | ArithExpr::NumEdges
        | ArithExpr::CardV(_)
        | ArithExpr::CardE(_)
        | ArithExpr::CcV(_)
        | ArithExpr::CcE(_) => false,
        ArithExpr::Add(a, b)
        | ArithExpr::Sub(a, b)
        | ArithExpr::Mul(a, b)
        | ArithExpr::Cmp(_, a, b)
        | ArithExpr::And(a, b)
        | ArithExpr::Or(a, b) => has_qcc(a) || has_qcc(b),
        ArithExpr::Not(a) => has_qcc(a),
    }
}

/// Checks that quantified `cc` terms appear only as positive summands:
/// directly, or scaled by a nonnegative constant.
fn check_cc_summands(e: &ArithExpr) -> std::result::Result<(), ()> {
    match e {
        ArithExpr::CcV(SetRef::Quantified(_)) | ArithExpr::CcE(SetRef::Quantified(_)) => Ok(()),
        ArithExpr::Add(a, b) => {
            check_cc_summands(a)?;
            check_cc_summands(b)
        }
        ArithExpr::Sub(a, b) => {
            check_cc_summands(a)?;
            if has_qcc(b) {
                Err(())
            } else {
                Ok(())
            }
        }
        ArithExpr::Mul(a, b) => match (&**a, &**b) {
            (ArithExpr::Num(c), t) | (t, ArithExpr::Num(c))
                if matches!(
                    t,
                    ArithExpr::CcV(SetRef::Quantified(_)) | ArithExpr::CcE(SetRef::Quantified(_))
                ) =>
            {
                if *c >= 0 {
                    Ok(())
                } else {
                    Err(())
                }
            }
            _ => {
                if has_qcc(e) {
                    Err(())
                } else {
                    Ok(())
                }
            }
        },
        _ => {
            if has_qcc(e) {
                Err(())
            } else {
                Ok(())
            }
        }
    }
}

fn mark_qcc(e: &ArithExpr, used: &mut [bool], vertex: bool) {
    match e {
        ArithExpr::CcV(SetRef::Quantified(i)) if vertex => used[*i] = true,
        ArithExpr::CcE(SetRef::Quantified(j)) if !vertex => used[*j] = true,
        ArithExpr::Add(a, b)
        | ArithExpr::Sub(a, b)
        | ArithExpr::Mul(a, b)
        | ArithExpr::Cmp(_, a, b)
        | ArithExpr::And(a, b)
        | ArithExpr::Or(a, b) => {
            mark_qcc(a, used, vertex);
            mark_qcc(b, used, vertex);
        }
        ArithExpr::Not(a) => mark_qcc(a, used, vertex),
        _ => {}
    }
}

fn count_modalities(f: &Formula) -> usize {
    match f {
        Formula::VertexSet(_) | Formula::EdgeSet(_) | Formula::Down | Formula::Up => 0,
        Formula::Not(a) => count_modalities(a),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            count_modalities(a) + count_modalities(b)
        }
        Formula::Diamond(_, body) | Formula::Box(_, body) => 1 + count_modalities(body),
    }
}

/// Evaluates the integer value of a side-condition expression; booleans are
/// reported through [`eval_require`].
pub fn eval_arith(e: &ArithExpr, env: &ArithEnv<'_>) -> Result<BigInt> {
    match eval_value(e, env)? {
        ValueKind::Int(i) => Ok(i),
        ValueKind::Bool(_) => Err(Error::InvalidInstance(
            "expected an integer expression, found a boolean".into(),
        )),
    }
}

/// Evaluates a side condition to its truth value in the given environment.
pub fn eval_require(e: &ArithExpr, env: &ArithEnv<'_>) -> Result<bool> {
    match eval_value(e, env)? {
        ValueKind::Bool(b) => Ok(b),
        ValueKind::Int(_) => Err(Error::InvalidInstance(
            "expected a boolean side condition, found an integer".into(),
        )),
    }
}

enum ValueKind {
    Int(BigInt),
    Bool(bool),
}

/// Everything a side-condition expression can mention: parameter values and
/// per-set cardinalities/component counts. Quantified-set entries are the
/// branch values under consideration; fixed-set entries are exact.
pub struct ArithEnv<'a> {
    pub params: &'a [i64],
    pub card_v: &'a [u64],
    pub card_e: &'a [u64],
    pub cc_v: &'a [u64],
    pub cc_e: &'a [u64],
    pub fixed_card_v: &'a [u64],
    pub fixed_card_e: &'a [u64],
    pub fixed_cc_v: &'a [u64],
    pub fixed_cc_e: &'a [u64],
    pub n: u64,
    pub m: u64,
}

fn eval_value(e: &ArithExpr, env: &ArithEnv<'_>) -> Result<ValueKind> {
    use ValueKind::{Bool, Int};
    let int = |e: &ArithExpr| -> Result<BigInt> { eval_arith(e, env) };
    let lookup = |r: &SetRef, q: &[u64], f: &[u64]| -> BigInt {
        match r {
            SetRef::Quantified(i) => BigInt::from(q[*i]),
            SetRef::Fixed(i) => BigInt::from(f[*i]),
        }
    };
    Ok(match e {
        ArithExpr::Num(v) => Int(BigInt::from(*v)),
        ArithExpr::Param(i) => Int(BigInt::from(env.params[*i])),
        ArithExpr::CardV(r) => Int(lookup(r, env.card_v, env.fixed_card_v)),
        ArithExpr::CardE(r) => Int(lookup(r, env.card_e, env.fixed_card_e)),
        ArithExpr::CcV(r) => Int(lookup(r, env.cc_v, env.fixed_cc_v)),
        ArithExpr::CcE(r) => Int(lookup(r, env.cc_e, env.fixed_cc_e)),
        ArithExpr::NumVertices => Int(BigInt::from(env.n)),
        ArithExpr::NumEdges => Int(BigInt::from(env.m)),
        ArithExpr::Add(a, b) => Int(int(a)? + int(b)?),
        ArithExpr::Sub(a, b) => Int(int(a)? - int(b)?),
        ArithExpr::Mul(a, b) => Int(int(a)? * int(b)?),
        ArithExpr::Cmp(op, a, b) => {
            let (a, b) = (int(a)?, int(b)?);
            Bool(match op {
                CmpOp::Le => a <= b,
                CmpOp::Lt => a < b,
                CmpOp::Ge => a >= b,
                CmpOp::Gt => a > b,
                CmpOp::Eq => a == b,
                CmpOp::Ne => a != b,
            })
        }
        ArithExpr::And(a, b) => Bool(eval_require(a, env)? && eval_require(b, env)?),
        ArithExpr::Or(a, b) => Bool(eval_require(a, env)? || eval_require(b, env)?),
        ArithExpr::Not(a) => Bool(!eval_require(a, env)?),
    })
}

// ---------------------------------------------------------------------------
// Pretty-printing: `Display` emits the textual format accepted by `parse`.
// ---------------------------------------------------------------------------

impl Problem {
    fn set_name(&self, r: SetRef, vertex: bool) -> &str {
        match (r, vertex) {
            (SetRef::Quantified(i), true) => &self.vertex_sets[i],
            (SetRef::Quantified(i), false) => &self.edge_sets[i],
            (SetRef::Fixed(i), true) => &self.fixed_vertex_sets[i],
            (SetRef::Fixed(i), false) => &self.fixed_edge_sets[i],
        }
    }

    fn fmt_formula(&self, f: &Formula, prec: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Precedence: <-> 1, -> 2 (right), | 3, & 4, ! 5.
        let paren = |p: u8| prec > p;
        match f {
            Formula::VertexSet(r) => write!(out, "{}", self.set_name(*r, true)),
            Formula::EdgeSet(r) => write!(out, "{}", self.set_name(*r, false)),
            Formula::Down => write!(out, "down"),
            Formula::Up => write!(out, "up"),
            Formula::Not(a) => {
                write!(out, "!")?;
                self.fmt_formula(a, 5, out)
            }
            Formula::And(a, b) => {
                if paren(4) {
                    write!(out, "(")?;
                }
                self.fmt_formula(a, 4, out)?;
                write!(out, " & ")?;
                self.fmt_formula(b, 4, out)?;
                if paren(4) {
                    write!(out, ")")?;
                }
                Ok(())
            }
            Formula::Or(a, b) => {
                if paren(3) {
                    write!(out, "(")?;
                }
                self.fmt_formula(a, 3, out)?;
                write!(out, " | ")?;
                self.fmt_formula(b, 3, out)?;
                if paren(3) {
                    write!(out, ")")?;
                }
                Ok(())
            }
            Formula::Implies(a, b) => {
                if paren(2) {
                    write!(out, "(")?;
                }
                self.fmt_formula(a, 3, out)?;
                write!(out, " -> ")?;
                self.fmt_formula(b, 2, out)?;
                if paren(2) {
                    write!(out, ")")?;
                }
                Ok(())
            }
            Formula::Iff(a, b) => {
                if paren(1) {
                    write!(out, "(")?;
                }
                self.fmt_formula(a, 2, out)?;
                write!(out, " <-> ")?;
                self.fmt_formula(b, 2, out)?;
                if paren(1) {
                    write!(out, ")")?;
                }
                Ok(())
            }
            Formula::Diamond(s, body) | Formula::Box(s, body) => {
                let kw = if matches!(f, Formula::Diamond(..)) { "diamond" } else { "box" };
                write!(out, "{kw}")?;
                if *s != UpSet::positive() {
                    write!(out, "[{s}]")?;
                }
                write!(out, "(")?;
                self.fmt_formula(body, 0, out)?;
                write!(out, ")")
            }
        }
    }

    fn fmt_arith(&self, e: &ArithExpr, prec: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Precedence: or 1, and 2, not 3, cmp 4, +/- 5, * 6.
        let paren = |p: u8| prec > p;
        let bin = |op: &str,
                   p: u8,
                   a: &ArithExpr,
                   b: &ArithExpr,
                   rp: u8,
                   this: &Self,
                   out: &mut fmt::Formatter<'_>|
         -> fmt::Result {
            if paren(p) {
                write!(out, "(")?;
            }
            this.fmt_arith(a, p, out)?;
            write!(out, " {op} ")?;
            this.fmt_arith(b, rp, out)?;
            if paren(p) {
                write!(out, ")")?;
            }
            Ok(())
        };
        match e {
            ArithExpr::Num(v) => write!(out, "{v}"),
            ArithExpr::Param(i) => write!(out, "{}", self.params[*i]),
            ArithExpr::CardV(r) => write!(out, "|{}|", self.set_name(*r, true)),
            ArithExpr::CardE(r) => write!(out, "|{}|", self.set_name(*r, false)),
            ArithExpr::CcV(r) => write!(out, "cc({})", self.set_name(*r, true)),
            ArithExpr::CcE(r) => write!(out, "cc({})", self.set_name(*r, false)),
            ArithExpr::NumVertices => write!(out, "|V|"),
            ArithExpr::NumEdges => write!(out, "|E|"),
            ArithExpr::Add(a, b) => bin("+", 5, a, b, 6, self, out),
            ArithExpr::Sub(a, b) => bin("-", 5, a, b, 6, self, out),
            ArithExpr::Mul(a, b) => bin("*", 6, a, b, 7, self, out),
            ArithExpr::Cmp(op, a, b) => bin(op.symbol(), 4, a, b, 5, self, out),
            ArithExpr::And(a, b) => bin("and", 2, a, b, 3, self, out),
            ArithExpr::Or(a, b) => bin("or", 1, a, b, 2, self, out),
            ArithExpr::Not(a) => {
                write!(out, "not ")?;
                self.fmt_arith(a, 3, out)
            }
        }
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "problem \"{}\"", self.name)?;
        if self.directed {
            writeln!(f, "directed")?;
        }
        for p in &self.params {
            writeln!(f, "param {p}")?;
        }
        for s in &self.fixed_vertex_sets {
            writeln!(f, "fixed vertexset {s}")?;
        }
        for s in &self.fixed_edge_sets {
            writeln!(f, "fixed edgeset {s}")?;
        }
        for s in &self.vertex_sets {
            writeln!(f, "exists vertexset {s}")?;
        }
        for s in &self.edge_sets {
            writeln!(f, "exists edgeset {s}")?;
        }
        for r in &self.requires {
            write!(f, "require ")?;
            self.fmt_arith(r, 0, f)?;
            writeln!(f)?;
        }
        write!(f, "formula: ")?;
        self.fmt_formula(&self.matrix, 0, f)?;
        writeln!(f)
    }
}
