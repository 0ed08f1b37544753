//! Exact solution counting by dynamic programming over a nice tree
//! decomposition.
//!
//! A solution is an assignment of the quantified vertex and edge sets that
//! satisfies the side conditions and makes the matrix formula true at every
//! vertex. The table at a decomposition node is keyed by one local state
//! per bag vertex — packed membership bits `b`, modality predictions `π`,
//! and monoid histories `h` — together with running totals of set sizes
//! among already-processed vertices (`τ`) and edges (`σ`). Predictions are
//! verified the moment a vertex is forgotten, which is also when the matrix
//! is enforced at that vertex; histories advance when an edge is introduced
//! and the far endpoint's body holds.
//!
//! The whole run is one pass: totals are capped by the per-coordinate
//! maxima over all admissible cardinality branches, and every branch reads
//! its answer off the root table afterwards.

use arrayvec::ArrayVec;
use num_bigint::BigUint;
use num_traits::Zero;

use crate::compile::Compiled;
use crate::graph::Instance;
use crate::hash::FnvHashMap;
use crate::logic::{eval_require, ArithEnv, Problem};
use crate::nice::{NiceDecomposition, NiceNode};
use crate::{Error, Result};

/// Keys pack per-bag-vertex codes plus the running totals.
pub const KEY_CAP: usize = 24;
type Key = ArrayVec<u32, KEY_CAP>;
type Table = FnvHashMap<Key, BigUint>;

/// Raw branch tuples are capped at this many combinations.
const MAX_BRANCH_SPACE: u128 = 1 << 26;

/// One admissible cardinality choice for the quantified sets; `cx`/`cy`
/// additionally carry component-count bounds when the randomized engine
/// asks for them (zero entries for sets whose component count is unused).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Branch {
    pub x: Vec<u32>,
    pub y: Vec<u32>,
    pub cx: Vec<u32>,
    pub cy: Vec<u32>,
}

/// What a branch enumeration should range over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchMode {
    /// Cardinalities only; rejects specifications whose side condition
    /// mentions component counts of quantified sets.
    CardinalitiesOnly,
    /// Cardinalities plus component-count bounds for every quantified set
    /// the side condition constrains.
    WithComponentBounds,
}

/// Enumerates every tuple of set cardinalities (and, if requested,
/// component bounds) that satisfies the side conditions on this instance.
pub fn enumerate_branches(
    inst: &Instance,
    problem: &Problem,
    mode: BranchMode,
) -> Result<Vec<Branch>> {
    problem.check()?;
    check_compatible(inst, problem)?;
    if mode == BranchMode::CardinalitiesOnly && problem.uses_cc() {
        return Err(Error::Unsupported(
            "side conditions on component counts need the randomized decision engine".into(),
        ));
    }
    let (p1, q1) = (problem.p1(), problem.q1());
    let (n, m) = (u64::from(inst.graph().n()), u64::from(inst.graph().m()));
    let cc_v = if mode == BranchMode::WithComponentBounds {
        problem.cc_vertex_used()
    } else {
        vec![false; p1]
    };
    let cc_e = if mode == BranchMode::WithComponentBounds {
        problem.cc_edge_used()
    } else {
        vec![false; q1]
    };

    let mut space: u128 = 1;
    for _ in 0..p1 {
        space *= n as u128 + 1;
    }
    for _ in 0..q1 {
        space *= m as u128 + 1;
    }
    for used in cc_v.iter().chain(&cc_e) {
        if *used {
            space *= (n.max(m)) as u128 + 1;
        }
    }
    if space > MAX_BRANCH_SPACE {
        return Err(Error::BudgetExceeded(format!(
            "branch space of {space} cardinality tuples exceeds the {MAX_BRANCH_SPACE} cap"
        )));
    }

    let (fixed_cc_v, fixed_cc_e) = problem.fixed_cc(inst);
    let fixed_card_v: Vec<u64> = inst.fixed_vertex_sets().iter().map(|s| s.len() as u64).collect();
    let fixed_card_e: Vec<u64> = inst.fixed_edge_sets().iter().map(|s| s.len() as u64).collect();

    let mut dims = vec![n + 1; p1];
    dims.extend(std::iter::repeat(m + 1).take(q1));
    let mut out = Vec::new();
    let mut cards = vec![0u64; p1 + q1];
    let with_bounds = mode == BranchMode::WithComponentBounds;
    loop {
        let (xs, ys) = cards.split_at(p1);
        // Component bounds: a nonempty set has at least one component, so
        // bound 0 pairs only with cardinality 0. Sets whose component count
        // the side condition never reads get the vacuous bound — their
        // cardinality — so the constraint imposes nothing.
        let mut cx = vec![0u64; p1];
        let mut cy = vec![0u64; q1];
        push_cc_tuples(
            inst, problem, with_bounds, xs, ys, &cc_v, &cc_e, &fixed_card_v, &fixed_card_e,
            &fixed_cc_v, &fixed_cc_e, &mut cx, &mut cy, 0, &mut out,
        )?;
        if !advance(&mut cards, &dims) {
            break;
        }
    }
    Ok(out)
}

/// Odometer step; returns false once all tuples are exhausted.
fn advance(cur: &mut [u64], dims: &[u64]) -> bool {
    for i in (0..cur.len()).rev() {
        cur[i] += 1;
        if cur[i] < dims[i] {
            return true;
        }
        cur[i] = 0;
    }
    false
}

#[allow(clippy::too_many_arguments)]
fn push_cc_tuples(
    inst: &Instance,
    problem: &Problem,
    with_bounds: bool,
    xs: &[u64],
    ys: &[u64],
    cc_v: &[bool],
    cc_e: &[bool],
    fixed_card_v: &[u64],
    fixed_card_e: &[u64],
    fixed_cc_v: &[u64],
    fixed_cc_e: &[u64],
    cx: &mut Vec<u64>,
    cy: &mut Vec<u64>,
    depth: usize,
    out: &mut Vec<Branch>,
) -> Result<()> {
    let p1 = xs.len();
    if depth == p1 + ys.len() {
        let env = ArithEnv {
            params: inst.params(),
            card_v: xs,
            card_e: ys,
            cc_v: cx,
            cc_e: cy,
            fixed_card_v,
            fixed_card_e,
            fixed_cc_v,
            fixed_cc_e,
            n: u64::from(inst.graph().n()),
            m: u64::from(inst.graph().m()),
        };
        for req in &problem.requires {
            if !eval_require(req, &env)? {
                return Ok(());
            }
        }
        out.push(Branch {
            x: xs.iter().map(|&v| v as u32).collect(),
            y: ys.iter().map(|&v| v as u32).collect(),
            cx: cx.iter().map(|&v| v as u32).collect(),
            cy: cy.iter().map(|&v| v as u32).collect(),
        });
        return Ok(());
    }
    let (used, card) =
        if depth < p1 { (cc_v[depth], xs[depth]) } else { (cc_e[depth - p1], ys[depth - p1]) };
    let range: std::ops::RangeInclusive<u64> = if used && card > 0 {
        1..=card
    } else if !used && with_bounds {
        card..=card
    } else {
        0..=0
    };
    for bound in range {
        if depth < p1 {
            cx[depth] = bound;
        } else {
            cy[depth - p1] = bound;
        }
        push_cc_tuples(
            inst, problem, with_bounds, xs, ys, cc_v, cc_e, fixed_card_v, fixed_card_e, fixed_cc_v,
            fixed_cc_e, cx, cy, depth + 1, out,
        )?;
    }
    Ok(())
}

fn check_compatible(inst: &Instance, problem: &Problem) -> Result<()> {
    if inst.graph().is_directed() != problem.directed {
        return Err(Error::InvalidInstance(format!(
            "specification `{}` expects a {} graph",
            problem.name,
            if problem.directed { "directed" } else { "undirected" }
        )));
    }
    if inst.params().len() != problem.params.len()
        || inst.fixed_vertex_sets().len() != problem.fixed_vertex_sets.len()
        || inst.fixed_edge_sets().len() != problem.fixed_edge_sets.len()
    {
        return Err(Error::InvalidInstance(
            "instance parameters or fixed sets do not match the specification".into(),
        ));
    }
    Ok(())
}

/// Resource limits for a counting run.
#[derive(Debug, Clone)]
pub struct CountOptions {
    /// Maximum live entries in any one node table.
    pub max_table_entries: usize,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions { max_table_entries: 1 << 24 }
    }
}

/// Result of a counting run.
#[derive(Debug, Clone)]
pub struct CountReport {
    /// Number of satisfying set assignments, over all branches.
    pub count: BigUint,
    /// How many cardinality branches passed the side conditions.
    pub branches: usize,
    /// Width of the decomposition the run used.
    pub width_used: usize,
    /// Largest table encountered, for capacity diagnostics.
    pub max_table_entries: usize,
    /// Table size after processing each node.
    pub per_node_entries: Vec<usize>,
}

/// Counts satisfying assignments of `problem` on `inst` along `nice`.
pub fn count_solutions(
    inst: &Instance,
    problem: &Problem,
    nice: &NiceDecomposition,
    opts: &CountOptions,
) -> Result<CountReport> {
    let branches = enumerate_branches(inst, problem, BranchMode::CardinalitiesOnly)?;
    nice.validate_for(inst.graph())?;
    let compiled = Compiled::new(problem)?;
    let width_used = nice.width();
    if branches.is_empty() {
        return Ok(CountReport {
            count: BigUint::zero(),
            branches: 0,
            width_used,
            max_table_entries: 0,
            per_node_entries: Vec::new(),
        });
    }
    let (p1, q1) = (compiled.p1, compiled.q1);
    let max_bag = nice.nodes().iter().enumerate().map(|(i, _)| nice.bag(i).len()).max().unwrap_or(0);
    if max_bag + p1 + q1 > KEY_CAP {
        return Err(Error::BudgetExceeded(format!(
            "bag size {max_bag} plus {} totals exceeds the key capacity of {KEY_CAP}",
            p1 + q1
        )));
    }
    let xmax: Vec<u32> = (0..p1).map(|i| branches.iter().map(|b| b.x[i]).max().unwrap()).collect();
    let ymax: Vec<u32> = (0..q1).map(|j| branches.iter().map(|b| b.y[j]).max().unwrap()).collect();

    let dp = run_tables(inst, &compiled, nice, &xmax, &ymax, opts.max_table_entries)?;
    let root = dp.root_table;

    let mut total = BigUint::zero();
    for branch in &branches {
        let mut key = Key::new();
        for &x in &branch.x {
            key.push(x);
        }
        for &y in &branch.y {
            key.push(y);
        }
        if let Some(v) = root.get(&key) {
            total += v;
        }
    }
    Ok(CountReport {
        count: total,
        branches: branches.len(),
        width_used,
        max_table_entries: dp.max_entries,
        per_node_entries: dp.per_node_entries,
    })
}

struct DpOutcome {
    root_table: Table,
    max_entries: usize,
    per_node_entries: Vec<usize>,
}

fn run_tables(
    inst: &Instance,
    compiled: &Compiled,
    nice: &NiceDecomposition,
    xmax: &[u32],
    ymax: &[u32],
    max_entries: usize,
) -> Result<DpOutcome> {
    let g = inst.graph();
    let (p1, q1, l) = (compiled.p1, compiled.q1, compiled.l);
    let h_space = compiled.h_space;
    let pi_mask: u32 = if l >= 32 { u32::MAX } else { (1u32 << l) - 1 };
    // Flat modality bodies never read the truth pattern before forget time,
    // so the pattern need not be guessed per vertex — it is read off the
    // final history instead, and the code keeps a zero placeholder.
    let guess_mask: u32 = if compiled.needs_promises() { pi_mask } else { 0 };
    let pack = |b: u32, pi: u32, h: u32| (b << l | pi) * h_space + h;
    let unpack = |code: u32| {
        let h = code % h_space;
        let rest = code / h_space;
        (rest >> l, rest & pi_mask, h)
    };

    let mut tables: Vec<Option<Table>> = vec![None; nice.nodes().len()];
    let mut per_node_entries = Vec::with_capacity(nice.nodes().len());
    let mut max_seen = 0usize;

    for idx in 0..nice.nodes().len() {
        let bag: Vec<u32> = nice.bag(idx).to_vec();
        let table = match *nice_node(nice, idx) {
            NiceNode::Leaf => {
                let mut t = Table::default();
                let mut key = Key::new();
                for _ in 0..p1 + q1 {
                    key.push(0);
                }
                t.insert(key, BigUint::from(1u32));
                t
            }
            NiceNode::IntroduceVertex { vertex, child } => {
                let child_t = tables[child].take().expect("child table present");
                let pos = bag.binary_search(&vertex).expect("introduced vertex in bag");
                let mut t = Table::default();
                'entry: for (key, val) in &child_t {
                    let (codes, totals) = key.split_at(bag.len() - 1);
                    for b in 0..1u32 << p1 {
                        let mut new_totals: ArrayVec<u32, KEY_CAP> =
                            totals.iter().copied().collect();
                        let mut ok = true;
                        for i in 0..p1 {
                            if b >> i & 1 == 1 {
                                new_totals[i] += 1;
                                if new_totals[i] > xmax[i] {
                                    ok = false;
                                    break;
                                }
                            }
                        }
                        if !ok {
                            continue;
                        }
                        for pi in 0..=guess_mask {
                            let mut key2 = Key::new();
                            key2.try_extend_from_slice(&codes[..pos]).unwrap();
                            key2.push(pack(b, pi, compiled.h_identity()));
                            key2.try_extend_from_slice(&codes[pos..]).unwrap();
                            key2.try_extend_from_slice(&new_totals).unwrap();
                            *t.entry(key2).or_insert_with(BigUint::zero) += val;
                        }
                        if t.len() > max_entries {
                            break 'entry;
                        }
                    }
                }
                if t.len() > max_entries {
                    return Err(budget_error(idx, t.len()));
                }
                t
            }
            NiceNode::IntroduceEdge { edge, child } => {
                let child_t = tables[child].take().expect("child table present");
                let ends = g.endpoints(edge);
                let pa = bag.binary_search(&ends.u).expect("endpoint in bag");
                let pb = bag.binary_search(&ends.v).expect("endpoint in bag");
                let (fxa, fxb) = (inst.fx_bits(ends.u), inst.fx_bits(ends.v));
                let fy = inst.fy_bits(edge);
                let mut t = Table::default();
                for (key, val) in &child_t {
                    let (codes, totals) = key.split_at(bag.len());
                    let (ba, pia, ha) = unpack(codes[pa]);
                    let (bb, pib, hb) = unpack(codes[pb]);
                    for d in 0..1u32 << q1 {
                        let mut new_totals: ArrayVec<u32, KEY_CAP> =
                            totals.iter().copied().collect();
                        let mut ok = true;
                        for j in 0..q1 {
                            if d >> j & 1 == 1 {
                                new_totals[p1 + j] += 1;
                                if new_totals[p1 + j] > ymax[j] {
                                    ok = false;
                                    break;
                                }
                            }
                        }
                        if !ok {
                            continue;
                        }
                        // The arc points at its second endpoint, so bodies
                        // evaluated there see an inbound arrow.
                        let mask_a =
                            compiled.body_mask(bb, fxb, u64::from(pib), d, fy, true);
                        let mask_b =
                            compiled.body_mask(ba, fxa, u64::from(pia), d, fy, false);
                        let mut key2 = Key::new();
                        key2.try_extend_from_slice(codes).unwrap();
                        key2[pa] = pack(ba, pia, compiled.bump(ha, mask_a));
                        key2[pb] = pack(bb, pib, compiled.bump(hb, mask_b));
                        key2.try_extend_from_slice(&new_totals).unwrap();
                        *t.entry(key2).or_insert_with(BigUint::zero) += val;
                    }
                }
                if t.len() > max_entries {
                    return Err(budget_error(idx, t.len()));
                }
                t
            }
            NiceNode::Forget { vertex, child } => {
                let child_t = tables[child].take().expect("child table present");
                let child_bag = nice.bag(child);
                let pos = child_bag.binary_search(&vertex).expect("forgotten vertex in bag");
                let fx = inst.fx_bits(vertex);
                let mut t = Table::default();
                for (key, val) in &child_t {
                    let (b, pi, h) = unpack(key[pos]);
                    let actual = compiled.accept_mask(h);
                    if compiled.needs_promises() && actual != u64::from(pi) {
                        continue;
                    }
                    if !compiled.depth0(b, fx, actual) {
                        continue;
                    }
                    let mut key2 = Key::new();
                    key2.try_extend_from_slice(&key[..pos]).unwrap();
                    key2.try_extend_from_slice(&key[pos + 1..]).unwrap();
                    *t.entry(key2).or_insert_with(BigUint::zero) += val;
                }
                if t.len() > max_entries {
                    return Err(budget_error(idx, t.len()));
                }
                t
            }
            NiceNode::Join { left, right } => {
                let left_t = tables[left].take().expect("left table present");
                let right_t = tables[right].take().expect("right table present");
                let bl = bag.len();
                // Group the right side by the (b, π) shape of its bag codes;
                // histories and totals combine freely within a shape.
                let mut groups: FnvHashMap<Key, Vec<(&Key, &BigUint)>> = FnvHashMap::default();
                for (key, val) in &right_t {
                    groups.entry(shape_of(key, bl, h_space)).or_default().push((key, val));
                }
                let mut t = Table::default();
                for (key, val) in &left_t {
                    let shape = shape_of(key, bl, h_space);
                    let Some(partners) = groups.get(&shape) else { continue };
                    // Bag vertices were counted by both children; subtract
                    // their memberships once.
                    let mut dup = vec![0u32; p1];
                    for &code in &key[..bl] {
                        let (b, _, _) = unpack(code);
                        for (i, slot) in dup.iter_mut().enumerate() {
                            *slot += b >> i & 1;
                        }
                    }
                    for &(rkey, rval) in partners {
                        let mut key2 = Key::new();
                        let mut ok = true;
                        for pos in 0..bl {
                            let (b, pi, h1) = unpack(key[pos]);
                            let (_, _, h2) = unpack(rkey[pos]);
                            key2.push(pack(b, pi, compiled.join_h(h1, h2)));
                        }
                        for i in 0..p1 {
                            let total = key[bl + i] + rkey[bl + i] - dup[i];
                            if total > xmax[i] {
                                ok = false;
                                break;
                            }
                            key2.push(total);
                        }
                        if !ok {
                            continue;
                        }
                        for j in 0..q1 {
                            let total = key[bl + p1 + j] + rkey[bl + p1 + j];
                            if total > ymax[j] {
                                ok = false;
                                break;
                            }
                            key2.push(total);
                        }
                        if !ok {
                            continue;
                        }
                        *t.entry(key2).or_insert_with(BigUint::zero) += val * rval;
                    }
                }
                if t.len() > max_entries {
                    return Err(budget_error(idx, t.len()));
                }
                t
            }
        };
        max_seen = max_seen.max(table.len());
        per_node_entries.push(table.len());
        tables[idx] = Some(table);
    }

    let root_table = tables[nice.root()].take().expect("root table present");
    Ok(DpOutcome { root_table, max_entries: max_seen, per_node_entries })
}

fn nice_node(nice: &NiceDecomposition, idx: usize) -> &NiceNode {
    &nice.nodes()[idx]
}

fn shape_of(key: &Key, bag_len: usize, h_space: u32) -> Key {
    key[..bag_len].iter().map(|&c| c / h_space).collect()
}

fn budget_error(node: usize, entries: usize) -> Error {
    Error::BudgetExceeded(format!(
        "table at decomposition node {node} reached {entries} entries, over the configured budget"
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::greedy_decomposition;
    use crate::graph::Graph;
    use crate::logic::parse::parse_problem;
    use crate::nice::make_nice;
    use crate::oracle::brute_force_count;

    fn count_on(problem_text: &str, g: Graph, params: Vec<i64>) -> (BigUint, BigUint) {
        let problem = parse_problem(problem_text).unwrap();
        let inst = Instance::new(g, vec![], vec![], params).unwrap();
        let td = greedy_decomposition(inst.graph());
        let nice = make_nice(inst.graph(), &td).unwrap();
        let report =
            count_solutions(&inst, &problem, &nice, &CountOptions::default()).unwrap();
        let oracle = brute_force_count(&inst, &problem, 1 << 24).unwrap();
        (report.count, oracle)
    }

    const VC: &str = "problem \"vc\"\nparam k\nexists vertexset X\nrequire |X| <= k\nformula: !X -> box(X)\n";

    #[test]
    fn vertex_cover_counts_match_the_oracle_on_a_triangle() {
        let g = Graph::undirected(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let (dp, oracle) = count_on(VC, g, vec![2]);
        assert_eq!(dp, oracle);
        assert_eq!(dp, BigUint::from(3u32));
    }

    #[test]
    fn vertex_cover_counts_match_on_a_path_with_budget_one() {
        let g = Graph::undirected(3, &[(0, 1), (1, 2)]).unwrap();
        let (dp, oracle) = count_on(VC, g, vec![1]);
        assert_eq!(dp, oracle);
        assert_eq!(dp, BigUint::from(1u32));
    }

    #[test]
    fn edge_set_histories_count_vertex_degrees() {
        // Vertices covered by exactly two selected edges: perfect 2-regular
        // edge subsets, i.e. disjoint cycle covers. On C4: the full cycle.
        let spec = "problem \"two-regular\"\nexists edgeset Y\nrequire |Y| >= 1\nformula: diamond[{2}](Y)\n";
        let g = Graph::undirected(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        let (dp, oracle) = count_on(spec, g, vec![]);
        assert_eq!(dp, oracle);
        assert_eq!(dp, BigUint::from(1u32));
    }

    #[test]
    fn branch_enumeration_filters_by_side_conditions() {
        let problem = parse_problem(VC).unwrap();
        let g = Graph::undirected(3, &[(0, 1)]).unwrap();
        let inst = Instance::new(g, vec![], vec![], vec![1]).unwrap();
        let branches =
            enumerate_branches(&inst, &problem, BranchMode::CardinalitiesOnly).unwrap();
        let xs: Vec<u32> = branches.iter().map(|b| b.x[0]).collect();
        assert_eq!(xs, vec![0, 1]);
    }

    #[test]
    fn component_bounds_pair_zero_only_with_empty_sets() {
        let spec = "problem \"ct\"\nparam k\nexists vertexset X\nrequire |X| <= k\nrequire cc(X) <= 1\nformula: X | !X\n";
        let problem = parse_problem(spec).unwrap();
        let g = Graph::undirected(2, &[(0, 1)]).unwrap();
        let inst = Instance::new(g, vec![], vec![], vec![2]).unwrap();
        let branches =
            enumerate_branches(&inst, &problem, BranchMode::WithComponentBounds).unwrap();
        let tuples: Vec<(u32, u32)> = branches.iter().map(|b| (b.x[0], b.cx[0])).collect();
        assert_eq!(tuples, vec![(0, 0), (1, 1), (2, 1)]);
        let err = enumerate_branches(&inst, &problem, BranchMode::CardinalitiesOnly);
        assert!(matches!(err, Err(Error::Unsupported(_))));
    }

    #[test]
    fn counting_rejects_component_side_conditions() {
        let spec = "problem \"ct\"\nexists vertexset X\nrequire cc(X) <= 1\nformula: X | !X\n";
        let problem = parse_problem(spec).unwrap();
        let g = Graph::undirected(2, &[(0, 1)]).unwrap();
        let inst = Instance::bare(g);
        let td = greedy_decomposition(inst.graph());
        let nice = make_nice(inst.graph(), &td).unwrap();
        let err = count_solutions(&inst, &problem, &nice, &CountOptions::default());
        assert!(matches!(err, Err(Error::Unsupported(_))));
    }

    #[test]
    fn directed_degree_constraints_count_correctly() {
        // Every vertex has exactly one selected outgoing and one selected
        // incoming arc: selected arcs form a spanning union of directed
        // cycles. On a directed triangle plus a chord, only the triangle.
        let spec = "problem \"functional\"\ndirected\nexists edgeset Y\nformula: diamond[{1}](Y & up) & diamond[{1}](Y & down)\n";
        let problem = parse_problem(spec).unwrap();
        let g = Graph::directed(3, &[(0, 1), (1, 2), (2, 0), (0, 2)]).unwrap();
        let inst = Instance::bare(g);
        let td = greedy_decomposition(inst.graph());
        let nice = make_nice(inst.graph(), &td).unwrap();
        let report = count_solutions(&inst, &problem, &nice, &CountOptions::default()).unwrap();
        let oracle = brute_force_count(&inst, &problem, 1 << 24).unwrap();
        assert_eq!(report.count, oracle);
        assert_eq!(report.count, BigUint::from(1u32));
    }

    #[test]
    fn table_budget_is_enforced() {
        let g = Graph::undirected(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]).unwrap();
        let problem = parse_problem(VC).unwrap();
        let inst = Instance::new(g, vec![], vec![], vec![6]).unwrap();
        let td = greedy_decomposition(inst.graph());
        let nice = make_nice(inst.graph(), &td).unwrap();
        let err = count_solutions(
            &inst,
            &problem,
            &nice,
            &CountOptions { max_table_entries: 2 },
        );
        assert!(matches!(err, Err(Error::BudgetExceeded(_))));
    }
}
