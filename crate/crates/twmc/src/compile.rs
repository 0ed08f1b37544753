//! Compilation of a problem specification into the tables the dynamic
//! programs consume.
//!
//! Both engines process one vertex-local state at a time: a membership
//! vector `b` over the quantified vertex sets, a prediction vector `π`
//! guessing the truth of each modality at the vertex, and a history vector
//! `h` tracking — per modality, inside its finite counting monoid — how many
//! witnessing edges have been seen so far. Compilation rewrites boxes into
//! diamonds, numbers the diamonds, packs histories into mixed-radix codes,
//! and precomputes the two truth tables the recurrences need: the matrix at
//! modal depth zero, and the per-diamond body satisfaction masks for an
//! edge access.

use crate::logic::eval::eliminate_boxes;
use crate::logic::{Formula, Problem, SetRef};
use crate::upset::UpSet;
use crate::{Error, Result};

/// Hard cap on the packed history space; keeps per-vertex codes in `u32`.
const MAX_H_SPACE: u64 = 1 << 14;
/// Truth tables are materialized up to this many index bits.
const MAX_TABLE_BITS: usize = 20;

/// Flattened box-free formula node; children are arena indices.
#[derive(Debug, Clone, Copy)]
enum CNode {
    VertexQ(u16),
    VertexF(u16),
    EdgeQ(u16),
    EdgeF(u16),
    Down,
    Up,
    Not(u32),
    And(u32, u32),
    Or(u32, u32),
    Implies(u32, u32),
    Iff(u32, u32),
    Dia(u16),
}

/// A specification compiled for the engines.
pub struct Compiled {
    pub directed: bool,
    pub p1: usize,
    pub q1: usize,
    pub p0: usize,
    pub q0: usize,
    /// Number of modalities after box elimination.
    pub l: usize,
    /// The counting set of each modality, in evaluation (post-)order.
    pub sets: Vec<UpSet>,
    /// Monoid carrier sizes per modality.
    pub h_sizes: Vec<u32>,
    /// Mixed-radix strides: code = Σ digit_i · stride_i.
    pub h_strides: Vec<u32>,
    /// Total packed history space, ∏ h_sizes (≥ 1).
    pub h_space: u32,
    /// `add_one[i][h]`: history code with coordinate i advanced by one
    /// witnessed edge.
    add_one: Vec<Vec<u32>>,
    /// `accept_mask[h]`: bit i set iff coordinate i of `h` lies in set i.
    accept_mask: Vec<u64>,
    /// Pairwise history join, materialized when small.
    join_table: Option<Vec<u32>>,
    nodes: Vec<CNode>,
    root: u32,
    /// Body root node per modality.
    dia_body: Vec<u32>,
    depth0_table: Option<Vec<bool>>,
    body_table: Option<Vec<u64>>,
    nested_bodies: bool,
}

/// Evaluation context for a compiled node.
#[derive(Clone, Copy)]
struct Ctx {
    b: u32,
    fx: u32,
    pi: u64,
    /// Edge-side information; `None` at modal depth zero.
    edge: Option<EdgeCtx>,
}

#[derive(Clone, Copy)]
struct EdgeCtx {
    d: u32,
    fy: u32,
    /// Whether the accessing arc points at the vertex under evaluation.
    arrow: bool,
}

impl Compiled {
    pub fn new(problem: &Problem) -> Result<Self> {
        problem.check()?;
        let matrix = eliminate_boxes(&problem.matrix);
        let mut c = Compiled {
            directed: problem.directed,
            p1: problem.p1(),
            q1: problem.q1(),
            p0: problem.fixed_vertex_sets.len(),
            q0: problem.fixed_edge_sets.len(),
            l: 0,
            sets: Vec::new(),
            h_sizes: Vec::new(),
            h_strides: Vec::new(),
            h_space: 1,
            add_one: Vec::new(),
            accept_mask: Vec::new(),
            join_table: None,
            nodes: Vec::new(),
            root: 0,
            dia_body: Vec::new(),
            depth0_table: None,
            body_table: None,
            nested_bodies: false,
        };
        c.root = c.flatten(&matrix);
        c.l = c.sets.len();
        if c.l > 63 {
            return Err(Error::Unsupported("more than 63 modalities".into()));
        }
        c.nested_bodies = c.dia_body.iter().any(|&b| c.subtree_has_dia(b));

        let mut space: u64 = 1;
        for s in &c.sets {
            c.h_strides.push(space as u32);
            let size = s.carrier_size() as u64;
            c.h_sizes.push(size as u32);
            space *= size;
            if space > MAX_H_SPACE {
                return Err(Error::BudgetExceeded(format!(
                    "history space {space}+ exceeds the {MAX_H_SPACE} cap"
                )));
            }
        }
        c.h_space = space as u32;
        let info_bits = (c.p1 + c.l) as u32;
        if info_bits > 26 || (1u64 << info_bits) * space > u64::from(u32::MAX) {
            return Err(Error::BudgetExceeded(
                "per-vertex state space does not fit 32-bit codes".into(),
            ));
        }

        // Per-coordinate "one more witness" maps and the acceptance mask.
        for i in 0..c.l {
            let set = &c.sets[i];
            let one = set.hom(1);
            let stride = c.h_strides[i];
            let size = c.h_sizes[i];
            let mut table = vec![0u32; c.h_space as usize];
            for (h, slot) in table.iter_mut().enumerate() {
                let h = h as u32;
                let digit = h / stride % size;
                let bumped = u32::from(set.madd(digit as u16, one));
                // Periodic coordinates may wrap downward, so rebuild rather
                // than offset.
                *slot = h - digit * stride + bumped * stride;
            }
            c.add_one.push(table);
        }
        c.accept_mask = (0..c.h_space)
            .map(|h| {
                let mut mask = 0u64;
                for i in 0..c.l {
                    let digit = h / c.h_strides[i] % c.h_sizes[i];
                    if c.sets[i].accepts(digit as u16) {
                        mask |= 1 << i;
                    }
                }
                mask
            })
            .collect();
        if u64::from(c.h_space) * u64::from(c.h_space) <= 1 << 16 {
            let table = (0..c.h_space)
                .flat_map(|a| (0..c.h_space).map(move |b| (a, b)))
                .map(|(a, b)| c.join_h_slow(a, b))
                .collect();
            c.join_table = Some(table);
        }

        // Truth tables.
        let t0 = c.p1 + c.p0 + c.l;
        if t0 <= MAX_TABLE_BITS {
            let table = (0..1u64 << t0)
                .map(|idx| {
                    let (b, fx, pi) = c.unpack_vertex(idx);
                    c.eval(c.root, Ctx { b, fx, pi, edge: None })
                })
                .collect();
            c.depth0_table = Some(table);
        }
        let t1 = t0 + c.q1 + c.q0 + 1;
        if t1 <= MAX_TABLE_BITS {
            let table = (0..1u64 << t1)
                .map(|idx| {
                    let (b, fx, pi) = c.unpack_vertex(idx);
                    let rest = idx >> t0;
                    let d = (rest & ((1 << c.q1) - 1)) as u32;
                    let fy = (rest >> c.q1 & ((1 << c.q0) - 1)) as u32;
                    let arrow = rest >> (c.q1 + c.q0) & 1 == 1;
                    c.body_mask_direct(b, fx, pi, d, fy, arrow)
                })
                .collect();
            c.body_table = Some(table);
        }
        Ok(c)
    }

    fn flatten(&mut self, f: &Formula) -> u32 {
        let node = match f {
            Formula::VertexSet(SetRef::Quantified(i)) => CNode::VertexQ(*i as u16),
            Formula::VertexSet(SetRef::Fixed(i)) => CNode::VertexF(*i as u16),
            Formula::EdgeSet(SetRef::Quantified(j)) => CNode::EdgeQ(*j as u16),
            Formula::EdgeSet(SetRef::Fixed(j)) => CNode::EdgeF(*j as u16),
            Formula::Down => CNode::Down,
            Formula::Up => CNode::Up,
            Formula::Not(a) => {
                let a = self.flatten(a);
                CNode::Not(a)
            }
            Formula::And(a, b) => {
                let (a, b) = (self.flatten(a), self.flatten(b));
                CNode::And(a, b)
            }
            Formula::Or(a, b) => {
                let (a, b) = (self.flatten(a), self.flatten(b));
                CNode::Or(a, b)
            }
            Formula::Implies(a, b) => {
                let (a, b) = (self.flatten(a), self.flatten(b));
                CNode::Implies(a, b)
            }
            Formula::Iff(a, b) => {
                let (a, b) = (self.flatten(a), self.flatten(b));
                CNode::Iff(a, b)
            }
            Formula::Diamond(set, body) => {
                let body = self.flatten(body);
                let idx = self.sets.len() as u16;
                self.sets.push(set.clone());
                self.dia_body.push(body);
                CNode::Dia(idx)
            }
            Formula::Box(..) => unreachable!("boxes eliminated before flattening"),
        };
        self.nodes.push(node);
        (self.nodes.len() - 1) as u32
    }

    fn subtree_has_dia(&self, node: u32) -> bool {
        match self.nodes[node as usize] {
            CNode::Dia(_) => true,
            CNode::Not(a) => self.subtree_has_dia(a),
            CNode::And(a, b) | CNode::Or(a, b) | CNode::Implies(a, b) | CNode::Iff(a, b) => {
                self.subtree_has_dia(a) || self.subtree_has_dia(b)
            }
            _ => false,
        }
    }

    /// Whether any modality body contains another modality. Only then do
    /// the engines have to guess each vertex's truth pattern up front; flat
    /// bodies let the pattern be read off the final history at forget time.
    #[inline]
    pub fn needs_promises(&self) -> bool {
        self.nested_bodies
    }

    fn unpack_vertex(&self, idx: u64) -> (u32, u32, u64) {
        let b = (idx & ((1 << self.p1) - 1)) as u32;
        let fx = (idx >> self.p1 & ((1 << self.p0) - 1)) as u32;
        let pi = idx >> (self.p1 + self.p0) & ((1u64 << self.l) - 1);
        (b, fx, pi)
    }

    fn eval(&self, node: u32, ctx: Ctx) -> bool {
        match self.nodes[node as usize] {
            CNode::VertexQ(i) => ctx.b >> i & 1 == 1,
            CNode::VertexF(i) => ctx.fx >> i & 1 == 1,
            CNode::EdgeQ(j) => {
                let e = ctx.edge.expect("edge atom below modal depth one");
                e.d >> j & 1 == 1
            }
            CNode::EdgeF(j) => {
                let e = ctx.edge.expect("edge atom below modal depth one");
                e.fy >> j & 1 == 1
            }
            CNode::Down => ctx.edge.expect("orientation atom below modal depth one").arrow,
            CNode::Up => !ctx.edge.expect("orientation atom below modal depth one").arrow,
            CNode::Not(a) => !self.eval(a, ctx),
            CNode::And(a, b) => self.eval(a, ctx) && self.eval(b, ctx),
            CNode::Or(a, b) => self.eval(a, ctx) || self.eval(b, ctx),
            CNode::Implies(a, b) => !self.eval(a, ctx) || self.eval(b, ctx),
            CNode::Iff(a, b) => self.eval(a, ctx) == self.eval(b, ctx),
            CNode::Dia(i) => ctx.pi >> i & 1 == 1,
        }
    }

    fn body_mask_direct(&self, b: u32, fx: u32, pi: u64, d: u32, fy: u32, arrow: bool) -> u64 {
        let ctx = Ctx { b, fx, pi, edge: Some(EdgeCtx { d, fy, arrow }) };
        let mut mask = 0u64;
        for (i, &body) in self.dia_body.iter().enumerate() {
            if self.eval(body, ctx) {
                mask |= 1 << i;
            }
        }
        mask
    }

    /// Truth of the whole formula at a vertex with membership `b`, fixed
    /// membership `fx`, under predictions `pi` for the modalities.
    #[inline]
    pub fn depth0(&self, b: u32, fx: u32, pi: u64) -> bool {
        match &self.depth0_table {
            Some(t) => {
                let idx = u64::from(b) | u64::from(fx) << self.p1 | pi << (self.p1 + self.p0);
                t[idx as usize]
            }
            None => self.eval(self.root, Ctx { b, fx, pi, edge: None }),
        }
    }

    /// Bitmask over the modalities whose body holds at an endpoint with
    /// vertex context `(b, fx, pi)`, accessed via an edge with membership
    /// `d`, fixed membership `fy`, and `arrow` telling whether the arc
    /// points at that endpoint.
    #[inline]
    pub fn body_mask(&self, b: u32, fx: u32, pi: u64, d: u32, fy: u32, arrow: bool) -> u64 {
        match &self.body_table {
            Some(t) => {
                let t0 = self.p1 + self.p0 + self.l;
                let idx = u64::from(b)
                    | u64::from(fx) << self.p1
                    | pi << (self.p1 + self.p0)
                    | u64::from(d) << t0
                    | u64::from(fy) << (t0 + self.q1)
                    | u64::from(arrow) << (t0 + self.q1 + self.q0);
                t[idx as usize]
            }
            None => self.body_mask_direct(b, fx, pi, d, fy, arrow),
        }
    }

    /// Advances every coordinate in `mask` by one witnessed edge.
    #[inline]
    pub fn bump(&self, mut h: u32, mut mask: u64) -> u32 {
        while mask != 0 {
            let i = mask.trailing_zeros() as usize;
            h = self.add_one[i][h as usize];
            mask &= mask - 1;
        }
        h
    }

    /// Coordinatewise monoid sum of two history codes.
    #[inline]
    pub fn join_h(&self, a: u32, b: u32) -> u32 {
        match &self.join_table {
            Some(t) => t[(a * self.h_space + b) as usize],
            None => self.join_h_slow(a, b),
        }
    }

    fn join_h_slow(&self, a: u32, b: u32) -> u32 {
        let mut out = 0u32;
        for i in 0..self.l {
            let (stride, size) = (self.h_strides[i], self.h_sizes[i]);
            let da = a / stride % size;
            let db = b / stride % size;
            out += u32::from(self.sets[i].madd(da as u16, db as u16)) * stride;
        }
        out
    }

    /// Bitmask over modalities whose history coordinate is accepted.
    #[inline]
    pub fn accept_mask(&self, h: u32) -> u64 {
        self.accept_mask[h as usize]
    }

    /// Identity history: no witnessed edges on any coordinate.
    pub fn h_identity(&self) -> u32 {
        0
    }

    /// Size of the per-vertex local state space: memberships × predictions
    /// × histories.
    pub fn states_per_vertex(&self) -> u64 {
        (1u64 << (self.p1 + self.l)) * u64::from(self.h_space)
    }
}
