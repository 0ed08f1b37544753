//! Hardness-instance generator: reduces 3CNF satisfiability to
//! short-cycle vertex deletion on a graph of pathwidth O(√n).
//!
//! The construction places all 2n literals injectively on a grid A×B with
//! |A| = |B| = ⌈√(2n)⌉ and builds one gadget per variable and per clause
//! out of internally disjoint paths between the placed endpoints, so that
//! the formula is satisfiable exactly when n + 2m vertex deletions can kill
//! every cycle of length (at most) `l`. A path decomposition with one bag
//! per gadget — the shared endpoint pool plus that gadget's inner
//! vertices — certifies the width bound.

use std::collections::HashSet;

use serde_json::json;

use crate::decomp::TreeDecomposition;
use crate::graph::{Graph, Vertex};
use crate::{Error, Result};

/// A CNF formula with exactly three (possibly repeated) literals per
/// clause; literals are signed 1-based variable indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfFormula {
    n_vars: u32,
    clauses: Vec<[i32; 3]>,
}

impl CnfFormula {
    /// Builds a formula, padding shorter clauses by repeating their last
    /// literal. Rejects empty or over-long clauses and out-of-range
    /// variables.
    pub fn new(n_vars: u32, clauses: &[Vec<i32>]) -> Result<Self> {
        if n_vars == 0 {
            return Err(Error::Hardness("formula must have at least one variable".into()));
        }
        let mut padded = Vec::with_capacity(clauses.len());
        for (i, clause) in clauses.iter().enumerate() {
            if clause.is_empty() {
                return Err(Error::Hardness(format!("clause {} is empty", i + 1)));
            }
            if clause.len() > 3 {
                return Err(Error::Hardness(format!(
                    "clause {} has {} literals; at most three are allowed",
                    i + 1,
                    clause.len()
                )));
            }
            for &lit in clause {
                if lit == 0 || lit.unsigned_abs() > n_vars {
                    return Err(Error::Hardness(format!(
                        "clause {} holds literal {lit} outside ±1..=±{n_vars}",
                        i + 1
                    )));
                }
            }
            let last = *clause.last().expect("nonempty");
            let mut tuple = [last; 3];
            tuple[..clause.len()].copy_from_slice(clause);
            padded.push(tuple);
        }
        Ok(CnfFormula { n_vars, clauses: padded })
    }

    /// Parses the DIMACS CNF format: optional `c` comments, a
    /// `p cnf <vars> <clauses>` header, then whitespace-separated literals
    /// with `0` terminating each clause.
    pub fn parse_dimacs(text: &str) -> Result<Self> {
        let mut header: Option<(u32, usize)> = None;
        let mut clauses: Vec<Vec<i32>> = Vec::new();
        let mut current: Vec<i32> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let lineno = lineno + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('p') {
                if header.is_some() {
                    return Err(Error::ParseCnf { line: lineno, reason: "second header".into() });
                }
                let fields: Vec<&str> = rest.split_whitespace().collect();
                if fields.len() != 3 || fields[0] != "cnf" {
                    return Err(Error::ParseCnf {
                        line: lineno,
                        reason: "header must read `p cnf <vars> <clauses>`".into(),
                    });
                }
                let vars = fields[1].parse::<u32>().map_err(|e| Error::ParseCnf {
                    line: lineno,
                    reason: format!("bad variable count: {e}"),
                })?;
                let count = fields[2].parse::<usize>().map_err(|e| Error::ParseCnf {
                    line: lineno,
                    reason: format!("bad clause count: {e}"),
                })?;
                header = Some((vars, count));
                continue;
            }
            if header.is_none() {
                return Err(Error::ParseCnf {
                    line: lineno,
                    reason: "clause before the `p cnf` header".into(),
                });
            }
            for token in line.split_whitespace() {
                let lit = token.parse::<i32>().map_err(|e| Error::ParseCnf {
                    line: lineno,
                    reason: format!("bad literal `{token}`: {e}"),
                })?;
                if lit == 0 {
                    clauses.push(std::mem::take(&mut current));
                } else {
                    current.push(lit);
                }
            }
        }
        let Some((n_vars, declared)) = header else {
            return Err(Error::ParseCnf { line: 0, reason: "missing `p cnf` header".into() });
        };
        if !current.is_empty() {
            return Err(Error::ParseCnf {
                line: 0,
                reason: "last clause is not 0-terminated".into(),
            });
        }
        if clauses.len() != declared {
            return Err(Error::ParseCnf {
                line: 0,
                reason: format!("header declares {declared} clauses, found {}", clauses.len()),
            });
        }
        CnfFormula::new(n_vars, &clauses)
    }

    pub fn n_vars(&self) -> u32 {
        self.n_vars
    }

    pub fn clauses(&self) -> &[[i32; 3]] {
        &self.clauses
    }

    /// Evaluates under the assignment whose bit `i` gives variable `i+1`.
    pub fn eval(&self, assignment: u64) -> bool {
        self.clauses.iter().all(|clause| {
            clause.iter().any(|&lit| {
                let var = lit.unsigned_abs() - 1;
                (assignment >> var & 1 == 1) == (lit > 0)
            })
        })
    }

    /// Exhaustively searches for a satisfying assignment (≤ 24 variables).
    pub fn satisfiable(&self) -> Result<Option<u64>> {
        if self.n_vars > 24 {
            return Err(Error::BudgetExceeded(format!(
                "exhaustive satisfiability over {} variables",
                self.n_vars
            )));
        }
        Ok((0..1u64 << self.n_vars).find(|&a| self.eval(a)))
    }
}

/// Positions of one variable gadget's special vertices.
#[derive(Debug, Clone)]
pub struct VariableGadget {
    /// Endpoints of the positive literal's placement.
    pub u: Vertex,
    pub v: Vertex,
    /// Endpoints of the negated literal's placement.
    pub u_neg: Vertex,
    pub v_neg: Vertex,
    /// Deleting this vertex encodes "true".
    pub t_pos: Vertex,
    /// Deleting this vertex encodes "false".
    pub t_neg: Vertex,
    /// Every vertex the gadget added (inner path vertices only).
    pub inner: Vec<Vertex>,
}

/// Positions of one clause gadget's special vertices.
#[derive(Debug, Clone)]
pub struct ClauseGadget {
    /// Placement endpoints per literal slot.
    pub u: [Vertex; 3],
    pub v: [Vertex; 3],
    /// Selector vertices; the solution deletes the two whose literals do
    /// not certify the clause.
    pub s: [Vertex; 3],
    pub inner: Vec<Vertex>,
}

/// Where everything ended up: the literal grid and per-gadget maps.
#[derive(Debug, Clone)]
pub struct GadgetIndex {
    pub l: u32,
    pub alpha: u32,
    pub beta: u32,
    /// First grid axis (vertex ids).
    pub a: Vec<Vertex>,
    /// Second grid axis.
    pub b: Vec<Vertex>,
    pub variables: Vec<VariableGadget>,
    pub clauses: Vec<ClauseGadget>,
}

/// A generated deletion instance: graph, budget, decomposition, index.
#[derive(Debug, Clone)]
pub struct HardInstance {
    pub graph: Graph,
    /// Deletion budget, variables + 2 · clauses.
    pub k: u32,
    pub decomposition: TreeDecomposition,
    pub index: GadgetIndex,
}

impl HardInstance {
    /// The gadget index as JSON, with 1-based vertex ids matching the
    /// serialized graph and decomposition formats.
    pub fn index_json(&self) -> serde_json::Value {
        let ids = |vs: &[Vertex]| vs.iter().map(|&v| v + 1).collect::<Vec<u32>>();
        json!({
            "l": self.index.l,
            "alpha": self.index.alpha,
            "beta": self.index.beta,
            "k": self.k,
            "a": ids(&self.index.a),
            "b": ids(&self.index.b),
            "variables": self.index.variables.iter().map(|g| json!({
                "u": g.u + 1,
                "v": g.v + 1,
                "u_neg": g.u_neg + 1,
                "v_neg": g.v_neg + 1,
                "t_pos": g.t_pos + 1,
                "t_neg": g.t_neg + 1,
                "inner": ids(&g.inner),
            })).collect::<Vec<_>>(),
            "clauses": self.index.clauses.iter().map(|g| json!({
                "u": ids(&g.u),
                "v": ids(&g.v),
                "s": ids(&g.s),
                "inner": ids(&g.inner),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Grows a graph edge list while handing out fresh vertex ids.
struct Builder {
    next: u32,
    edges: Vec<(u32, u32)>,
}

impl Builder {
    /// Connects `from` to `to` with a fresh path of `len` edges and returns
    /// the `len - 1` inner vertices, ordered from the `from` side.
    fn add_path(&mut self, from: Vertex, to: Vertex, len: u32) -> Vec<Vertex> {
        debug_assert!(len >= 2, "paths of the construction have length at least two");
        let inner: Vec<Vertex> = (0..len - 1)
            .map(|_| {
                let v = self.next;
                self.next += 1;
                v
            })
            .collect();
        let mut prev = from;
        for &w in &inner {
            self.edges.push((prev, w));
            prev = w;
        }
        self.edges.push((prev, to));
        inner
    }
}

/// Index of a literal in the placement order: positive then negative per
/// variable.
fn literal_slot(lit: i32) -> usize {
    let var = (lit.unsigned_abs() - 1) as usize;
    2 * var + usize::from(lit < 0)
}

/// Builds the deletion instance for cycle length `l ≥ 5`.
///
/// The two halves of each variable gadget and the three cycles of each
/// clause gadget all have length exactly `l`; the emitted decomposition has
/// one bag per gadget (grid plus inner vertices) arranged along a path.
pub fn generate(cnf: &CnfFormula, l: u32) -> Result<HardInstance> {
    if l < 5 {
        return Err(Error::Hardness(format!("cycle length {l} is below the minimum of 5")));
    }
    let alpha = (l - 1) / 2;
    let beta = (l + 2) / 2;
    debug_assert!(2 <= alpha && alpha < beta);
    debug_assert_eq!(alpha + beta, l);
    debug_assert!(2 * beta > l && 2 * alpha + 4 > l);

    let n = cnf.n_vars;
    let side = (2 * n as usize).isqrt();
    let side = if side * side < 2 * n as usize { side + 1 } else { side } as u32;
    let a: Vec<Vertex> = (0..side).collect();
    let b: Vec<Vertex> = (side..2 * side).collect();
    let place = |lit: i32| -> (Vertex, Vertex) {
        let slot = literal_slot(lit) as u32;
        (a[(slot / side) as usize], b[(slot % side) as usize])
    };

    let mut builder = Builder { next: 2 * side, edges: Vec::new() };
    let mut variables = Vec::with_capacity(n as usize);
    for var in 1..=n as i32 {
        let (u, v) = place(var);
        let (u_neg, v_neg) = place(-var);
        let mut inner = builder.add_path(u, v, alpha);
        let t_pos = inner[0];
        let neg_inner = builder.add_path(u_neg, v_neg, alpha);
        let t_neg = neg_inner[0];
        inner.extend(neg_inner);
        inner.extend(builder.add_path(t_pos, t_neg, alpha));
        inner.extend(builder.add_path(t_pos, t_neg, beta));
        variables.push(VariableGadget { u, v, u_neg, v_neg, t_pos, t_neg, inner });
    }

    let mut clause_gadgets = Vec::with_capacity(cnf.clauses.len());
    for clause in &cnf.clauses {
        let mut u = [0; 3];
        let mut v = [0; 3];
        let mut s = [0; 3];
        let mut inner = Vec::new();
        for (i, &lit) in clause.iter().enumerate() {
            let (ui, vi) = place(lit);
            let path = builder.add_path(ui, vi, beta);
            u[i] = ui;
            v[i] = vi;
            s[i] = path[0];
            inner.extend(path);
        }
        for (x, y) in [(0, 1), (1, 2), (2, 0)] {
            inner.extend(builder.add_path(s[x], s[y], alpha));
            inner.extend(builder.add_path(s[x], s[y], beta));
        }
        clause_gadgets.push(ClauseGadget { u, v, s, inner });
    }

    let graph = Graph::undirected(builder.next, &builder.edges)?;
    let k = n + 2 * cnf.clauses.len() as u32;

    // One bag per gadget: the whole grid plus the gadget's inner vertices.
    let pool: Vec<Vertex> = (0..2 * side).collect();
    let mut bags: Vec<Vec<Vertex>> = Vec::with_capacity(variables.len() + clause_gadgets.len());
    for gadget in &variables {
        let mut bag = pool.clone();
        bag.extend(&gadget.inner);
        bags.push(bag);
    }
    for gadget in &clause_gadgets {
        let mut bag = pool.clone();
        bag.extend(&gadget.inner);
        bags.push(bag);
    }
    if bags.is_empty() {
        bags.push(pool.clone());
    }
    let tree_edges: Vec<(usize, usize)> = (1..bags.len()).map(|i| (i - 1, i)).collect();
    let decomposition = TreeDecomposition::new(bags, tree_edges, graph.n())?;

    Ok(HardInstance {
        graph,
        k,
        decomposition,
        index: GadgetIndex { l, alpha, beta, a, b, variables, clauses: clause_gadgets },
    })
}

/// Which cycles a deletion must destroy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycleTarget {
    /// Cycles of length exactly `l`.
    ExactLength(u32),
    /// Cycles of length at most `l` (girth must exceed `l` afterwards).
    AtMostLength(u32),
}

impl CycleTarget {
    fn bound(self) -> u32 {
        match self {
            CycleTarget::ExactLength(l) | CycleTarget::AtMostLength(l) => l,
        }
    }
}

/// Finds a simple cycle of length exactly `len` avoiding `dead` vertices,
/// as a vertex list. Each cycle is sought from its minimum vertex, with
/// interior vertices kept strictly above it.
fn find_cycle_exact(g: &Graph, dead: &[bool], len: u32) -> Option<Vec<Vertex>> {
    let n = g.n();
    let adjacency: Vec<Vec<Vertex>> =
        (0..n).map(|v| g.incident(v).iter().map(|&(w, _)| w).collect()).collect();
    let mut on_path = dead.to_vec();
    let mut path: Vec<Vertex> = Vec::with_capacity(len as usize);

    fn dfs(
        adjacency: &[Vec<Vertex>],
        on_path: &mut [bool],
        path: &mut Vec<Vertex>,
        root: Vertex,
        len: u32,
    ) -> bool {
        let current = *path.last().expect("path nonempty");
        if path.len() == len as usize {
            return adjacency[current as usize].contains(&root);
        }
        for &w in &adjacency[current as usize] {
            // Only the root may close the cycle; interior vertices stay
            // above it so each cycle is found once, from its minimum.
            if w <= root || on_path[w as usize] {
                continue;
            }
            on_path[w as usize] = true;
            path.push(w);
            if dfs(adjacency, on_path, path, root, len) {
                return true;
            }
            path.pop();
            on_path[w as usize] = false;
        }
        false
    }

    for root in 0..n {
        if dead[root as usize] {
            continue;
        }
        path.push(root);
        if dfs(&adjacency, &mut on_path, &mut path, root, len) {
            return Some(path);
        }
        path.pop();
    }
    None
}

/// Finds a simple cycle with length in `3..=bound`, shortest first.
fn find_cycle_at_most(g: &Graph, dead: &[bool], bound: u32) -> Option<Vec<Vertex>> {
    (3..=bound).find_map(|len| find_cycle_exact(g, dead, len))
}

fn find_target_cycle(g: &Graph, dead: &[bool], target: CycleTarget) -> Option<Vec<Vertex>> {
    match target {
        CycleTarget::ExactLength(l) => find_cycle_exact(g, dead, l),
        CycleTarget::AtMostLength(l) => find_cycle_at_most(g, dead, l),
    }
}

/// Checks that deleting `deleted` leaves no target cycle.
pub fn deletion_destroys_cycles(g: &Graph, deleted: &[Vertex], target: CycleTarget) -> bool {
    let mut dead = vec![false; g.n() as usize];
    for &v in deleted {
        dead[v as usize] = true;
    }
    find_target_cycle(g, &dead, target).is_none()
}

/// Exact bounded-depth search for a deletion set of size ≤ `k` destroying
/// every target cycle; returns a witness set if one exists.
///
/// Branches on the vertices of a found cycle that keep degree ≥ 3 among
/// live vertices: a degree-2 vertex on a cycle is dominated by the nearest
/// higher-degree vertex along it (every target cycle through the one passes
/// through the other), and a cycle whose vertices all have degree 2 is an
/// isolated cycle, killed by deleting any single vertex.
pub fn solve_deletion(
    g: &Graph,
    k: u32,
    target: CycleTarget,
    node_budget: u64,
) -> Result<Option<Vec<Vertex>>> {
    if target.bound() < 3 {
        return Err(Error::Hardness(format!(
            "cycle length bound {} is below 3",
            target.bound()
        )));
    }
    let mut dead = vec![false; g.n() as usize];
    let mut chosen: Vec<Vertex> = Vec::new();
    let mut seen: HashSet<Vec<Vertex>> = HashSet::new();
    let mut nodes_left = node_budget;
    let found = branch(g, target, k, &mut dead, &mut chosen, &mut seen, &mut nodes_left)?;
    Ok(found.then(|| {
        chosen.sort_unstable();
        chosen
    }))
}

fn branch(
    g: &Graph,
    target: CycleTarget,
    k: u32,
    dead: &mut Vec<bool>,
    chosen: &mut Vec<Vertex>,
    seen: &mut HashSet<Vec<Vertex>>,
    nodes_left: &mut u64,
) -> Result<bool> {
    if *nodes_left == 0 {
        return Err(Error::BudgetExceeded(
            "deletion search exceeded its node budget".into(),
        ));
    }
    *nodes_left -= 1;
    let mut signature = chosen.clone();
    signature.sort_unstable();
    if !seen.insert(signature) {
        return Ok(false);
    }
    let Some(cycle) = find_target_cycle(g, dead, target) else {
        return Ok(true);
    };
    if chosen.len() as u32 >= k {
        return Ok(false);
    }
    let live_degree = |v: Vertex| -> usize {
        g.incident(v).iter().filter(|&&(w, _)| !dead[w as usize]).count()
    };
    let mut candidates: Vec<Vertex> =
        cycle.iter().copied().filter(|&v| live_degree(v) >= 3).collect();
    if candidates.is_empty() {
        // Isolated cycle: every vertex is equivalent, delete one.
        candidates.push(cycle[0]);
    }
    for v in candidates {
        dead[v as usize] = true;
        chosen.push(v);
        if branch(g, target, k, dead, chosen, seen, nodes_left)? {
            return Ok(true);
        }
        chosen.pop();
        dead[v as usize] = false;
    }
    Ok(false)
}

/// The deletion set the satisfying assignment induces: per variable the
/// selector matching its truth value, per clause the two selectors of the
/// literals not chosen to certify it.
pub fn witness_deletion(inst: &HardInstance, cnf: &CnfFormula, assignment: u64) -> Vec<Vertex> {
    let mut deleted = Vec::with_capacity(inst.k as usize);
    for (var, gadget) in inst.index.variables.iter().enumerate() {
        if assignment >> var & 1 == 1 {
            deleted.push(gadget.t_pos);
        } else {
            deleted.push(gadget.t_neg);
        }
    }
    for (clause, gadget) in cnf.clauses.iter().zip(&inst.index.clauses) {
        let satisfier = clause
            .iter()
            .position(|&lit| {
                let var = lit.unsigned_abs() - 1;
                (assignment >> var & 1 == 1) == (lit > 0)
            })
            .expect("assignment satisfies every clause");
        for i in 0..3 {
            if i != satisfier {
                deleted.push(gadget.s[i]);
            }
        }
    }
    deleted
}

/// Outcome of cross-checking a generated instance against its formula.
#[derive(Debug, Clone)]
pub struct EquivalenceReport {
    pub satisfiable: bool,
    /// Exact-length deletion answer from the bounded search.
    pub exact_deletion: bool,
    /// Girth-style (at-most-length) deletion answer.
    pub girth_deletion: bool,
    /// A deletion set built from a satisfying assignment, when one exists;
    /// already verified to destroy all short cycles.
    pub witness: Option<Vec<Vertex>>,
}

impl EquivalenceReport {
    /// Both reduction directions at once: satisfiability, exact-length
    /// deletion, and girth deletion must agree.
    pub fn holds(&self) -> bool {
        self.satisfiable == self.exact_deletion && self.satisfiable == self.girth_deletion
    }
}

/// Cross-checks a generated instance against exhaustive satisfiability and
/// the exact deletion search, in both reduction directions.
pub fn check_equivalence(
    inst: &HardInstance,
    cnf: &CnfFormula,
    node_budget: u64,
) -> Result<EquivalenceReport> {
    let l = inst.index.l;
    let assignment = cnf.satisfiable()?;
    let exact =
        solve_deletion(&inst.graph, inst.k, CycleTarget::ExactLength(l), node_budget)?;
    let girth =
        solve_deletion(&inst.graph, inst.k, CycleTarget::AtMostLength(l), node_budget)?;
    let witness = assignment.map(|a| witness_deletion(inst, cnf, a));
    if let Some(w) = &witness {
        if w.len() as u32 != inst.k {
            return Err(Error::Hardness(format!(
                "witness deletes {} vertices, budget is {}",
                w.len(),
                inst.k
            )));
        }
        if !deletion_destroys_cycles(&inst.graph, w, CycleTarget::AtMostLength(l)) {
            return Err(Error::Hardness(
                "assignment-derived deletion left a short cycle".into(),
            ));
        }
    }
    Ok(EquivalenceReport {
        satisfiable: assignment.is_some(),
        exact_deletion: exact.is_some(),
        girth_deletion: girth.is_some(),
        witness,
    })
}
