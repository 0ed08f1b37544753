//! Brute-force reference oracle: enumerates every assignment of the
//! quantified sets and checks the specification directly. Exponential in
//! `p1·n + q1·m`, guarded by an explicit budget — its only job is to be
//! obviously correct so the engines can be validated against it.

use num_bigint::BigUint;
use num_traits::Zero;

use crate::graph::Instance;
use crate::logic::eval::{sentence_holds, Assignment};
use crate::logic::Problem;
use crate::{Error, Result};

/// Default cap on the number of enumerated assignments.
pub const DEFAULT_ORACLE_BUDGET: u64 = 1 << 24;

/// Counts satisfying assignments by exhaustive enumeration. The enumeration
/// walks a binary counter over the concatenated membership bits (vertex
/// sets in declaration order, each over vertices `0..n`, then edge sets
/// over edges `0..m`).
pub fn brute_force_count(inst: &Instance, problem: &Problem, budget: u64) -> Result<BigUint> {
    let mut count = BigUint::zero();
    enumerate(inst, problem, budget, |_| {
        count += 1u32;
        true
    })?;
    Ok(count)
}

/// Decides satisfiability by exhaustive enumeration, stopping at the first
/// witness.
pub fn brute_force_decide(inst: &Instance, problem: &Problem, budget: u64) -> Result<bool> {
    let mut found = false;
    enumerate(inst, problem, budget, |_| {
        found = true;
        false
    })?;
    Ok(found)
}

/// Runs `on_hit` for every satisfying assignment (in counter order) until it
/// returns `false`. Exposed for tests that need the witnesses themselves.
pub fn enumerate(
    inst: &Instance,
    problem: &Problem,
    budget: u64,
    mut on_hit: impl FnMut(&Assignment) -> bool,
) -> Result<()> {
    problem.check()?;
    if problem.directed != inst.graph().is_directed() {
        return Err(Error::InvalidInstance(format!(
            "problem `{}` expects a {} graph",
            problem.name,
            if problem.directed { "directed" } else { "undirected" }
        )));
    }
    if inst.params().len() != problem.params.len()
        || inst.fixed_vertex_sets().len() != problem.fixed_vertex_sets.len()
        || inst.fixed_edge_sets().len() != problem.fixed_edge_sets.len()
    {
        return Err(Error::InvalidInstance(format!(
            "instance bindings do not match problem `{}`",
            problem.name
        )));
    }
    let n = inst.graph().n() as usize;
    let m = inst.graph().m() as usize;
    let bits = problem.p1() * n + problem.q1() * m;
    if bits >= 64 || (1u64 << bits) > budget {
        return Err(Error::BudgetExceeded(format!(
            "oracle would enumerate 2^{bits} assignments (budget {budget})"
        )));
    }
    let mut asg = Assignment::empty(problem, inst);
    for code in 0..(1u64 << bits) {
        let mut c = code;
        for set in asg.vertex_sets.iter_mut() {
            for b in set.iter_mut() {
                *b = c & 1 == 1;
                c >>= 1;
            }
        }
        for set in asg.edge_sets.iter_mut() {
            for b in set.iter_mut() {
                *b = c & 1 == 1;
                c >>= 1;
            }
        }
        if sentence_holds(inst, problem, &asg)? && !on_hit(&asg) {
            return Ok(());
        }
    }
    Ok(())
}
