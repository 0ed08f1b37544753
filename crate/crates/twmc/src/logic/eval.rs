//! Reference evaluation of modal formulas, by direct recursion over the
//! graph. Deliberately simple — this is the semantic ground truth that the
//! brute-force oracle and the tests compare the engines against.

use crate::graph::{EdgeId, Instance, Vertex};
use crate::logic::{ArithEnv, Formula, Problem, SetRef};

/// A concrete choice of the quantified sets: membership masks indexed
/// `[set][vertex]` and `[set][edge]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    pub vertex_sets: Vec<Vec<bool>>,
    pub edge_sets: Vec<Vec<bool>>,
}

impl Assignment {
    pub fn empty(problem: &Problem, inst: &Instance) -> Self {
        Self {
            vertex_sets: vec![vec![false; inst.graph().n() as usize]; problem.p1()],
            edge_sets: vec![vec![false; inst.graph().m() as usize]; problem.q1()],
        }
    }
}

/// Evaluates a formula at vertex `v`. `via` is the edge through which `v`
/// was reached (`None` at the outermost level); edge-set atoms and
/// orientation atoms refer to it and may only occur where it exists, which
/// [`Problem::check`] guarantees for well-formed specifications.
pub fn eval_cml(
    inst: &Instance,
    asg: &Assignment,
    f: &Formula,
    v: Vertex,
    via: Option<EdgeId>,
) -> bool {
    match f {
        Formula::VertexSet(SetRef::Quantified(i)) => asg.vertex_sets[*i][v as usize],
        Formula::VertexSet(SetRef::Fixed(i)) => inst.fx_bits(v) >> i & 1 == 1,
        Formula::EdgeSet(r) => {
            let e = via.expect("edge-set atom evaluated without an accessing edge");
            match r {
                SetRef::Quantified(j) => asg.edge_sets[*j][e as usize],
                SetRef::Fixed(j) => inst.fy_bits(e) >> j & 1 == 1,
            }
        }
        Formula::Down => {
            let e = via.expect("`down` evaluated without an accessing edge");
            inst.graph().endpoints(e).v == v
        }
        Formula::Up => {
            let e = via.expect("`up` evaluated without an accessing edge");
            inst.graph().endpoints(e).u == v
        }
        Formula::Not(a) => !eval_cml(inst, asg, a, v, via),
        Formula::And(a, b) => eval_cml(inst, asg, a, v, via) && eval_cml(inst, asg, b, v, via),
        Formula::Or(a, b) => eval_cml(inst, asg, a, v, via) || eval_cml(inst, asg, b, v, via),
        Formula::Implies(a, b) => !eval_cml(inst, asg, a, v, via) || eval_cml(inst, asg, b, v, via),
        Formula::Iff(a, b) => eval_cml(inst, asg, a, v, via) == eval_cml(inst, asg, b, v, via),
        Formula::Diamond(set, body) => {
            let hits = inst
                .graph()
                .incident(v)
                .iter()
                .filter(|&&(w, e)| eval_cml(inst, asg, body, w, Some(e)))
                .count();
            set.contains(hits)
        }
        Formula::Box(set, body) => {
            // Dual of the diamond: the count of *failures* is not in the set.
            let misses = inst
                .graph()
                .incident(v)
                .iter()
                .filter(|&&(w, e)| !eval_cml(inst, asg, body, w, Some(e)))
                .count();
            !set.contains(misses)
        }
    }
}

/// Rewrites every `box[S](ψ)` into `!diamond[S](!ψ)`; the result evaluates
/// identically and contains only diamonds, which is the form the engines
/// compile.
pub fn eliminate_boxes(f: &Formula) -> Formula {
    match f {
        Formula::VertexSet(_) | Formula::EdgeSet(_) | Formula::Down | Formula::Up => f.clone(),
        Formula::Not(a) => Formula::Not(Box::new(eliminate_boxes(a))),
        Formula::And(a, b) => {
            Formula::And(Box::new(eliminate_boxes(a)), Box::new(eliminate_boxes(b)))
        }
        Formula::Or(a, b) => Formula::Or(Box::new(eliminate_boxes(a)), Box::new(eliminate_boxes(b))),
        Formula::Implies(a, b) => {
            Formula::Implies(Box::new(eliminate_boxes(a)), Box::new(eliminate_boxes(b)))
        }
        Formula::Iff(a, b) => {
            Formula::Iff(Box::new(eliminate_boxes(a)), Box::new(eliminate_boxes(b)))
        }
        Formula::Diamond(s, body) => Formula::Diamond(s.clone(), Box::new(eliminate_boxes(body))),
        Formula::Box(s, body) => Formula::Not(Box::new(Formula::Diamond(
            s.clone(),
            Box::new(Formula::Not(Box::new(eliminate_boxes(body)))),
        ))),
    }
}

/// Decides whether a full assignment satisfies the specification on this
/// instance: the side conditions with *exact* cardinalities and component
/// counts, and the modal formula at every vertex.
pub fn sentence_holds(inst: &Instance, problem: &Problem, asg: &Assignment) -> crate::Result<bool> {
    let g = inst.graph();
    let card_v: Vec<u64> =
        asg.vertex_sets.iter().map(|m| m.iter().filter(|&&b| b).count() as u64).collect();
    let card_e: Vec<u64> =
        asg.edge_sets.iter().map(|m| m.iter().filter(|&&b| b).count() as u64).collect();
    let cc_v: Vec<u64> =
        asg.vertex_sets.iter().map(|m| crate::graph::cc_of_vertex_mask(g, m) as u64).collect();
    let cc_e: Vec<u64> =
        asg.edge_sets.iter().map(|m| crate::graph::cc_of_edge_mask(g, m) as u64).collect();
    let fixed_card_v: Vec<u64> = inst.fixed_vertex_sets().iter().map(|s| s.len() as u64).collect();
    let fixed_card_e: Vec<u64> = inst.fixed_edge_sets().iter().map(|s| s.len() as u64).collect();
    let (fixed_cc_v, fixed_cc_e) = problem.fixed_cc(inst);
    let env = ArithEnv {
        params: inst.params(),
        card_v: &card_v,
        card_e: &card_e,
        cc_v: &cc_v,
        cc_e: &cc_e,
        fixed_card_v: &fixed_card_v,
        fixed_card_e: &fixed_card_e,
        fixed_cc_v: &fixed_cc_v,
        fixed_cc_e: &fixed_cc_e,
        n: g.n() as u64,
        m: g.m() as u64,
    };
    for r in &problem.requires {
        if !crate::logic::eval_require(r, &env)? {
            return Ok(false);
        }
    }
    Ok((0..g.n()).all(|v| eval_cml(inst, asg, &problem.matrix, v, None)))
}
