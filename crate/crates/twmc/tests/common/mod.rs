//! Shared machinery for the acceptance suite: the pass/fail reporter,
//! deterministic graph generators, an exhaustive object enumerator for the
//! parity engine, and one independent combinatorial checker per catalogue
//! problem. The checkers are deliberately written against the textbook
//! problem statements (subset enumeration plus elementary graph search) and
//! never call the logic evaluator or the engines.

// Helpers are shared across criteria; not every criterion uses every one.
#![allow(dead_code)]

use std::panic::UnwindSafe;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use twmc::count_dp::Branch;
use twmc::cutcount::WeightAssignment;
use twmc::decomp::{greedy_decomposition, TreeDecomposition};
use twmc::graph::{Graph, Instance, Vertex};
use twmc::logic::eval::{eval_cml, Assignment};
use twmc::logic::Problem;
use twmc::nice::{make_nice, NiceDecomposition};

/// Runs one criterion body and prints exactly one PASS/FAIL line for it.
pub fn report(id: &str, title: &str, body: impl FnOnce() + UnwindSafe) {
    match std::panic::catch_unwind(body) {
        Ok(()) => println!("criterion {id} ({title}): PASS"),
        Err(cause) => {
            println!("criterion {id} ({title}): FAIL");
            std::panic::resume_unwind(cause);
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn bindings_k(k: i64) -> String {
    format!(r#"{{"params":{{"k":{k}}}}}"#)
}

pub fn nice_of(g: &Graph) -> NiceDecomposition {
    make_nice(g, &greedy_decomposition(g)).expect("heuristic decomposition normalizes")
}

// ---------------------------------------------------------------------------
// Graph generation
// ---------------------------------------------------------------------------

/// All unordered vertex pairs of `0..n` in lexicographic order.
pub fn all_pairs(n: u32) -> Vec<(Vertex, Vertex)> {
    let mut pairs = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            pairs.push((u, v));
        }
    }
    pairs
}

/// The undirected graph on `n` vertices whose edge set is the given bitmask
/// over [`all_pairs`].
pub fn graph_from_mask(n: u32, mask: u64) -> Graph {
    let pairs = all_pairs(n);
    let chosen: Vec<(Vertex, Vertex)> = pairs
        .iter()
        .enumerate()
        .filter(|&(i, _)| mask >> i & 1 == 1)
        .map(|(_, &p)| p)
        .collect();
    Graph::undirected(n, &chosen).expect("mask graphs are simple")
}

/// Every undirected graph on exactly `n` labelled vertices.
pub fn all_graphs(n: u32) -> impl Iterator<Item = Graph> {
    let pair_count = (n * n.saturating_sub(1) / 2) as u64;
    (0..1u64 << pair_count).map(move |mask| graph_from_mask(n, mask))
}

/// A uniform random undirected graph: `n` vertices, each edge kept with the
/// given probability.
pub fn random_graph(rng: &mut ChaCha8Rng, n: u32, edge_prob: f64) -> Graph {
    let pairs = all_pairs(n);
    let chosen: Vec<(Vertex, Vertex)> =
        pairs.into_iter().filter(|_| rng.gen_bool(edge_prob)).collect();
    Graph::undirected(n, &chosen).expect("random graphs are simple")
}

/// A random undirected graph with at most `max_edges` edges.
pub fn random_sparse_graph(rng: &mut ChaCha8Rng, n: u32, max_edges: usize) -> Graph {
    let mut pairs = all_pairs(n);
    for i in (1..pairs.len()).rev() {
        pairs.swap(i, rng.gen_range(0..=i));
    }
    let m = rng.gen_range(0..=max_edges.min(pairs.len()));
    let mut chosen = pairs[..m].to_vec();
    chosen.sort_unstable();
    Graph::undirected(n, &chosen).expect("random graphs are simple")
}

/// A random simple directed graph (antiparallel arc pairs allowed) with at
/// most `max_arcs` arcs.
pub fn random_digraph(rng: &mut ChaCha8Rng, n: u32, max_arcs: usize) -> Graph {
    let mut arcs = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u != v {
                arcs.push((u, v));
            }
        }
    }
    for i in (1..arcs.len()).rev() {
        arcs.swap(i, rng.gen_range(0..=i));
    }
    let m = rng.gen_range(0..=max_arcs.min(arcs.len()));
    let mut chosen = arcs[..m].to_vec();
    chosen.sort_unstable();
    Graph::directed(n, &chosen).expect("random digraphs are simple")
}

/// A random graph of treewidth at most `width`, built by attaching each new
/// vertex to a random `width`-clique of the part built so far and then
/// dropping each edge independently with probability `1 - keep_prob`. The
/// construction decomposition (one bag per attachment) is returned with it.
pub fn random_partial_ktree(
    rng: &mut ChaCha8Rng,
    n: u32,
    width: u32,
    keep_prob: f64,
) -> (Graph, TreeDecomposition) {
    assert!(n > width, "need at least width + 1 vertices");
    let k = width as usize;
    let mut edges: Vec<(Vertex, Vertex)> = Vec::new();
    let mut bags: Vec<Vec<Vertex>> = Vec::new();
    let mut tree_edges: Vec<(usize, usize)> = Vec::new();
    // Base clique on 0..=width.
    let base: Vec<Vertex> = (0..=width).collect();
    for i in 0..base.len() {
        for j in i + 1..base.len() {
            edges.push((base[i], base[j]));
        }
    }
    bags.push(base.clone());
    // Candidate attachment cliques, each remembering the bag it came from.
    let mut cliques: Vec<(Vec<Vertex>, usize)> = Vec::new();
    for drop in 0..base.len() {
        let c: Vec<Vertex> =
            base.iter().enumerate().filter(|&(i, _)| i != drop).map(|(_, &v)| v).collect();
        cliques.push((c, 0));
    }
    for v in width + 1..n {
        let (clique, origin) = cliques[rng.gen_range(0..cliques.len())].clone();
        for &u in &clique {
            edges.push((u.min(v), u.max(v)));
        }
        let mut bag = clique.clone();
        bag.push(v);
        bags.push(bag);
        let new_bag = bags.len() - 1;
        tree_edges.push((origin, new_bag));
        for drop in 0..k {
            let mut c: Vec<Vertex> = clique
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != drop)
                .map(|(_, &u)| u)
                .collect();
            c.push(v);
            cliques.push((c, new_bag));
        }
    }
    edges.retain(|_| rng.gen_bool(keep_prob));
    edges.sort_unstable();
    edges.dedup();
    let g = Graph::undirected(n, &edges).expect("construction is simple");
    let td = TreeDecomposition::new(bags, tree_edges, n).expect("construction decomposes");
    (g, td)
}

// ---------------------------------------------------------------------------
// Elementary graph predicates on bitmask subsets
// ---------------------------------------------------------------------------

fn adjacency(g: &Graph) -> Vec<Vec<Vertex>> {
    (0..g.n()).map(|v| g.incident(v).iter().map(|&(w, _)| w).collect()).collect()
}

/// Number of connected components of the subgraph induced by the vertex
/// mask (isolated selected vertices each count).
pub fn vertex_mask_components(g: &Graph, mask: u32) -> u32 {
    let mut seen = 0u32;
    let mut components = 0;
    for start in 0..g.n() {
        if mask >> start & 1 == 0 || seen >> start & 1 == 1 {
            continue;
        }
        components += 1;
        let mut stack = vec![start];
        seen |= 1 << start;
        while let Some(v) = stack.pop() {
            for &(w, _) in g.incident(v) {
                if mask >> w & 1 == 1 && seen >> w & 1 == 0 {
                    seen |= 1 << w;
                    stack.push(w);
                }
            }
        }
    }
    components
}

/// Whether the vertex mask induces a connected-or-empty subgraph.
pub fn mask_connected(g: &Graph, mask: u32) -> bool {
    vertex_mask_components(g, mask) <= 1
}

/// The connected components of the subgraph induced by the vertex mask,
/// one mask per component.
pub fn vertex_mask_component_list(g: &Graph, mask: u32) -> Vec<u32> {
    let mut seen = 0u32;
    let mut components = Vec::new();
    for start in 0..g.n() {
        if mask >> start & 1 == 0 || seen >> start & 1 == 1 {
            continue;
        }
        let mut comp = 1u32 << start;
        let mut stack = vec![start];
        seen |= 1 << start;
        while let Some(v) = stack.pop() {
            for &(w, _) in g.incident(v) {
                if mask >> w & 1 == 1 && seen >> w & 1 == 0 {
                    seen |= 1 << w;
                    comp |= 1 << w;
                    stack.push(w);
                }
            }
        }
        components.push(comp);
    }
    components
}

/// The connected components of the edge subset, one edge-id mask per
/// component.
pub fn edge_mask_component_list(g: &Graph, mask: u64) -> Vec<u64> {
    let mut assigned = 0u64;
    let mut components = Vec::new();
    for first in 0..g.m() as usize {
        if mask >> first & 1 == 0 || assigned >> first & 1 == 1 {
            continue;
        }
        let mut comp = 1u64 << first;
        assigned |= 1 << first;
        let e = g.edges()[first];
        let mut vertices = 1u32 << e.u | 1 << e.v;
        let mut grew = true;
        while grew {
            grew = false;
            for (i, e) in g.edges().iter().enumerate() {
                if mask >> i & 1 == 1
                    && assigned >> i & 1 == 0
                    && (vertices >> e.u & 1 == 1 || vertices >> e.v & 1 == 1)
                {
                    assigned |= 1 << i;
                    comp |= 1 << i;
                    vertices |= 1 << e.u | 1 << e.v;
                    grew = true;
                }
            }
        }
        components.push(comp);
    }
    components
}

/// Number of connected components of the subgraph formed by the edge mask
/// (vertices touched by no selected edge do not count).
pub fn edge_mask_components(g: &Graph, mask: u64) -> u32 {
    let mut touched = 0u32;
    for (i, e) in g.edges().iter().enumerate() {
        if mask >> i & 1 == 1 {
            touched |= 1 << e.u;
            touched |= 1 << e.v;
        }
    }
    let mut seen = 0u32;
    let mut components = 0;
    for start in 0..g.n() {
        if touched >> start & 1 == 0 || seen >> start & 1 == 1 {
            continue;
        }
        components += 1;
        let mut stack = vec![start];
        seen |= 1 << start;
        while let Some(v) = stack.pop() {
            for &(w, e) in g.incident(v) {
                if mask >> e & 1 == 1 && seen >> w & 1 == 0 {
                    seen |= 1 << w;
                    stack.push(w);
                }
            }
        }
    }
    components
}

/// Whether deleting the masked vertices leaves an acyclic graph.
fn deletion_leaves_forest(g: &Graph, deleted: u32) -> bool {
    let n = g.n() as usize;
    let mut parent: Vec<i64> = vec![-2; n];
    for v in 0..g.n() {
        if deleted >> v & 1 == 1 || parent[v as usize] != -2 {
            continue;
        }
        parent[v as usize] = -1;
        let mut stack: Vec<(Vertex, i64)> = vec![(v, -1)];
        while let Some((x, via)) = stack.pop() {
            for &(w, e) in g.incident(x) {
                if deleted >> w & 1 == 1 || i64::from(e) == via {
                    continue;
                }
                if parent[w as usize] != -2 {
                    return false;
                }
                parent[w as usize] = i64::from(e);
                stack.push((w, i64::from(e)));
            }
        }
    }
    true
}

/// Whether deleting the masked vertices leaves a bipartite graph.
fn deletion_leaves_bipartite(g: &Graph, deleted: u32) -> bool {
    let n = g.n() as usize;
    let mut colour: Vec<i8> = vec![-1; n];
    for v in 0..g.n() {
        if deleted >> v & 1 == 1 || colour[v as usize] != -1 {
            continue;
        }
        colour[v as usize] = 0;
        let mut stack = vec![v];
        while let Some(x) = stack.pop() {
            for &(w, _) in g.incident(x) {
                if deleted >> w & 1 == 1 {
                    continue;
                }
                if colour[w as usize] == -1 {
                    colour[w as usize] = 1 - colour[x as usize];
                    stack.push(w);
                } else if colour[w as usize] == colour[x as usize] {
                    return false;
                }
            }
        }
    }
    true
}

fn covers_all_edges(g: &Graph, mask: u32) -> bool {
    g.edges().iter().all(|e| mask >> e.u & 1 == 1 || mask >> e.v & 1 == 1)
}

// ---------------------------------------------------------------------------
// Independent per-problem checkers
// ---------------------------------------------------------------------------

pub fn check_vertex_cover(g: &Graph, k: i64) -> bool {
    if k < 0 {
        return false;
    }
    (0u32..1 << g.n())
        .any(|x| i64::from(x.count_ones()) <= k && covers_all_edges(g, x))
}

pub fn check_r_dominating(g: &Graph, r: u32, k: i64) -> bool {
    if k < 0 {
        return false;
    }
    let n = g.n() as usize;
    // BFS distances from every vertex.
    let mut dist = vec![vec![u32::MAX; n]; n];
    for s in 0..g.n() {
        let d = &mut dist[s as usize];
        d[s as usize] = 0;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &(w, _) in g.incident(v) {
                if d[w as usize] == u32::MAX {
                    d[w as usize] = d[v as usize] + 1;
                    queue.push_back(w);
                }
            }
        }
    }
    (0u32..1 << g.n()).any(|x| {
        i64::from(x.count_ones()) <= k
            && (0..n).all(|v| {
                (0..n).any(|u| x >> u & 1 == 1 && dist[u][v] <= r)
            })
    })
}

pub fn check_steiner(g: &Graph, terminals: &[Vertex], k: i64) -> bool {
    let t_mask: u32 = terminals.iter().map(|&t| 1 << t).sum();
    let budget = k + terminals.len() as i64;
    (0u32..1 << g.n()).any(|x| {
        x & t_mask == t_mask
            && i64::from(x.count_ones()) <= budget
            && mask_connected(g, x)
    })
}

pub fn check_fvs(g: &Graph, k: i64) -> bool {
    (0u32..1 << g.n())
        .any(|x| i64::from(x.count_ones()) <= k && deletion_leaves_forest(g, x))
}

pub fn check_cvc(g: &Graph, k: i64) -> bool {
    (0u32..1 << g.n()).any(|x| {
        i64::from(x.count_ones()) <= k && covers_all_edges(g, x) && mask_connected(g, x)
    })
}

pub fn check_cds(g: &Graph, k: i64) -> bool {
    (0u32..1 << g.n()).any(|x| {
        i64::from(x.count_ones()) <= k
            && mask_connected(g, x)
            && (0..g.n()).all(|v| {
                x >> v & 1 == 1 || g.incident(v).iter().any(|&(w, _)| x >> w & 1 == 1)
            })
    })
}

pub fn check_cfvs(g: &Graph, k: i64) -> bool {
    (0u32..1 << g.n()).any(|x| {
        i64::from(x.count_ones()) <= k
            && mask_connected(g, x)
            && deletion_leaves_forest(g, x)
    })
}

pub fn check_coct(g: &Graph, k: i64) -> bool {
    (0u32..1 << g.n()).any(|x| {
        i64::from(x.count_ones()) <= k
            && mask_connected(g, x)
            && deletion_leaves_bipartite(g, x)
    })
}

/// Vertex-disjoint cycles covering every vertex, at most `k` of them: a
/// spanning 2-regular edge subset with at most `k` components.
pub fn check_mcc_undirected(g: &Graph, k: i64) -> bool {
    let m = g.m() as usize;
    (0u64..1 << m).any(|y| {
        let mut deg = vec![0u32; g.n() as usize];
        for (i, e) in g.edges().iter().enumerate() {
            if y >> i & 1 == 1 {
                deg[e.u as usize] += 1;
                deg[e.v as usize] += 1;
            }
        }
        deg.iter().all(|&d| d == 2) && i64::from(edge_mask_components(g, y)) <= k
    })
}

/// Vertex-disjoint directed cycles covering every vertex: every vertex with
/// one selected outgoing and one selected incoming arc, at most `k`
/// components.
pub fn check_mcc_directed(g: &Graph, k: i64) -> bool {
    let m = g.m() as usize;
    (0u64..1 << m).any(|y| {
        let mut indeg = vec![0u32; g.n() as usize];
        let mut outdeg = vec![0u32; g.n() as usize];
        for (i, e) in g.edges().iter().enumerate() {
            if y >> i & 1 == 1 {
                outdeg[e.u as usize] += 1;
                indeg[e.v as usize] += 1;
            }
        }
        indeg.iter().all(|&d| d == 1)
            && outdeg.iter().all(|&d| d == 1)
            && i64::from(edge_mask_components(g, y)) <= k
    })
}

fn longest_simple_path_from(
    adj: &[Vec<Vertex>],
    v: Vertex,
    visited: u32,
    best: &mut u32,
    len: u32,
) {
    *best = (*best).max(len);
    for &w in &adj[v as usize] {
        if visited >> w & 1 == 0 {
            longest_simple_path_from(adj, w, visited | 1 << w, best, len + 1);
        }
    }
}

/// A simple path with at least `k` edges (`k = 0` still needs one edge:
/// two distinct endpoints must exist).
pub fn check_longest_path_undirected(g: &Graph, k: i64) -> bool {
    let need = k.max(1);
    let adj = adjacency(g);
    let mut best = 0;
    for v in 0..g.n() {
        longest_simple_path_from(&adj, v, 1 << v, &mut best, 0);
    }
    i64::from(best) >= need
}

pub fn check_longest_path_directed(g: &Graph, k: i64) -> bool {
    let need = k.max(1);
    let n = g.n() as usize;
    let mut out_adj: Vec<Vec<Vertex>> = vec![Vec::new(); n];
    for e in g.edges() {
        out_adj[e.u as usize].push(e.v);
    }
    let mut best = 0;
    for v in 0..g.n() {
        longest_simple_path_from(&out_adj, v, 1 << v, &mut best, 0);
    }
    i64::from(best) >= need
}

fn has_cycle_of_length_at_least(adj: &[Vec<Vertex>], need: u32, directed: bool) -> bool {
    // Depth-first search for a simple cycle through its minimum vertex.
    fn dfs(
        adj: &[Vec<Vertex>],
        root: Vertex,
        v: Vertex,
        visited: u32,
        len: u32,
        need: u32,
        directed: bool,
    ) -> bool {
        for &w in &adj[v as usize] {
            if w == root && (len + 1 >= need) && (directed || len + 1 >= 3) {
                return true;
            }
            if w > root && visited >> w & 1 == 0 {
                if dfs(adj, root, w, visited | 1 << w, len + 1, need, directed) {
                    return true;
                }
            }
        }
        false
    }
    (0..adj.len() as u32).any(|root| dfs(adj, root, root, 1 << root, 0, need, directed))
}

/// A simple cycle with at least `k` edges; the empty edge set satisfies
/// `k = 0`.
pub fn check_longest_cycle_undirected(g: &Graph, k: i64) -> bool {
    if k <= 0 {
        return true;
    }
    has_cycle_of_length_at_least(&adjacency(g), k.max(3) as u32, false)
}

pub fn check_longest_cycle_directed(g: &Graph, k: i64) -> bool {
    if k <= 0 {
        return true;
    }
    let n = g.n() as usize;
    let mut out_adj: Vec<Vec<Vertex>> = vec![Vec::new(); n];
    for e in g.edges() {
        out_adj[e.u as usize].push(e.v);
    }
    has_cycle_of_length_at_least(&out_adj, k.max(2) as u32, true)
}

/// Iterates edge subsets of size `n - 1` that form a spanning tree.
fn spanning_trees(g: &Graph) -> Vec<u64> {
    let n = g.n();
    let m = g.m() as usize;
    if n == 0 || u64::from(n) - 1 > m as u64 {
        return Vec::new();
    }
    let want = n - 1;
    (0u64..1 << m)
        .filter(|y| y.count_ones() == want && edge_mask_components(g, *y) == 1)
        .filter(|y| {
            // n - 1 edges in one component: spanning and acyclic iff the
            // component touches every vertex.
            let mut touched = 0u32;
            for (i, e) in g.edges().iter().enumerate() {
                if y >> i & 1 == 1 {
                    touched |= 1 << e.u | 1 << e.v;
                }
            }
            n == 1 || touched == (1 << n) - 1
        })
        .collect()
}

fn tree_degrees(g: &Graph, y: u64) -> Vec<u32> {
    let mut deg = vec![0u32; g.n() as usize];
    for (i, e) in g.edges().iter().enumerate() {
        if y >> i & 1 == 1 {
            deg[e.u as usize] += 1;
            deg[e.v as usize] += 1;
        }
    }
    deg
}

/// A spanning tree with exactly `k` leaves (no tree on one vertex counts:
/// every vertex needs an incident tree edge).
pub fn check_eklst(g: &Graph, k: i64) -> bool {
    if g.n() < 2 {
        return false;
    }
    spanning_trees(g).into_iter().any(|y| {
        let leaves = tree_degrees(g, y).iter().filter(|&&d| d == 1).count();
        leaves as i64 == k
    })
}

/// A spanning out-tree rooted at `root` with exactly `k` leaves (vertices
/// without outgoing tree arcs); single-vertex graphs never qualify.
pub fn check_eklo(g: &Graph, root: Vertex, k: i64) -> bool {
    let n = g.n();
    if n < 2 {
        return false;
    }
    let m = g.m() as usize;
    (0u64..1 << m).any(|y| {
        if y.count_ones() != n - 1 {
            return false;
        }
        let mut indeg = vec![0u32; n as usize];
        let mut outdeg = vec![0u32; n as usize];
        for (i, e) in g.edges().iter().enumerate() {
            if y >> i & 1 == 1 {
                outdeg[e.u as usize] += 1;
                indeg[e.v as usize] += 1;
            }
        }
        if indeg[root as usize] != 0
            || (0..n).any(|v| v != root && indeg[v as usize] != 1)
        {
            return false;
        }
        // Reachability from the root along selected arcs.
        let mut reached = 1u32 << root;
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            for (i, e) in g.edges().iter().enumerate() {
                if y >> i & 1 == 1 && e.u == v && reached >> e.v & 1 == 0 {
                    reached |= 1 << e.v;
                    stack.push(e.v);
                }
            }
        }
        reached == (1u32 << n) - 1
            && (0..n).filter(|&v| outdeg[v as usize] == 0).count() as i64 == k
    })
}

/// A spanning tree in which at least `k` vertices keep their full graph
/// degree; single-vertex graphs never qualify.
pub fn check_mfdst(g: &Graph, k: i64) -> bool {
    if g.n() < 2 {
        return false;
    }
    spanning_trees(g).into_iter().any(|y| {
        let deg = tree_degrees(g, y);
        let full = (0..g.n())
            .filter(|&v| deg[v as usize] as usize == g.degree(v))
            .count();
        full as i64 >= k
    })
}

/// A closed walk of length at most `k` visiting every vertex, using each
/// edge at most twice: disjoint edge sets S (once) and D (twice) with
/// connected spanning support, every S-degree even, and |S| + 2|D| ≤ k.
pub fn check_tsp(g: &Graph, k: i64) -> bool {
    let n = g.n();
    if n == 0 {
        return false;
    }
    let m = g.m() as usize;
    let mut assignment = vec![0u8; m]; // 0 = unused, 1 = once, 2 = twice
    loop {
        let mut single_deg = vec![0u32; n as usize];
        let mut support = 0u64;
        let mut cost = 0i64;
        for (i, e) in g.edges().iter().enumerate() {
            match assignment[i] {
                1 => {
                    single_deg[e.u as usize] += 1;
                    single_deg[e.v as usize] += 1;
                    support |= 1 << i;
                    cost += 1;
                }
                2 => {
                    support |= 1 << i;
                    cost += 2;
                }
                _ => {}
            }
        }
        let mut touched = 0u32;
        for (i, e) in g.edges().iter().enumerate() {
            if support >> i & 1 == 1 {
                touched |= 1 << e.u | 1 << e.v;
            }
        }
        if cost <= k
            && touched == (1u32 << n) - 1
            && single_deg.iter().all(|&d| d % 2 == 0)
            && edge_mask_components(g, support) == 1
        {
            return true;
        }
        // Advance the ternary odometer.
        let mut i = 0;
        loop {
            if i == m {
                return false;
            }
            assignment[i] += 1;
            if assignment[i] == 3 {
                assignment[i] = 0;
                i += 1;
            } else {
                break;
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Exhaustive object enumeration for the parity engine
// ---------------------------------------------------------------------------

/// Counts the consistent two-sided cuts of the vertex set `x` (as a mask)
/// with all of `markers` on side one, by trying every side assignment:
/// a cut is consistent when no edge of the induced subgraph crosses it.
pub fn count_vertex_cuts(g: &Graph, x: u32, markers: u32) -> u64 {
    debug_assert_eq!(markers & !x, 0, "markers live inside the set");
    let mut count = 0;
    let mut side1 = x;
    loop {
        let consistent = markers & !side1 == 0
            && g.edges().iter().all(|e| {
                let both = x >> e.u & 1 == 1 && x >> e.v & 1 == 1;
                !both || (side1 >> e.u & 1) == (side1 >> e.v & 1)
            });
        count += u64::from(consistent);
        if side1 == 0 {
            break;
        }
        side1 = (side1 - 1) & x;
    }
    count
}

/// Counts the consistent two-sided cuts of the edge set `y` (as a mask)
/// with all of `markers` on side one: edges sharing an endpoint must sit on
/// the same side.
pub fn count_edge_cuts(g: &Graph, y: u64, markers: u64) -> u64 {
    debug_assert_eq!(markers & !y, 0, "markers live inside the set");
    let edges = g.edges();
    let mut count = 0;
    let mut side1 = y;
    loop {
        let mut consistent = markers & !side1 == 0;
        if consistent {
            'outer: for i in 0..edges.len() {
                if y >> i & 1 == 0 {
                    continue;
                }
                for j in i + 1..edges.len() {
                    if y >> j & 1 == 0 {
                        continue;
                    }
                    let (a, b) = (edges[i], edges[j]);
                    let share =
                        a.u == b.u || a.u == b.v || a.v == b.u || a.v == b.v;
                    if share && (side1 >> i & 1) != (side1 >> j & 1) {
                        consistent = false;
                        break 'outer;
                    }
                }
            }
        }
        count += u64::from(consistent);
        if side1 == 0 {
            break;
        }
        side1 = (side1 - 1) & y;
    }
    count
}

fn masks_of_weight(bits: u32, weight: u32) -> Vec<u64> {
    (0u64..1 << bits).filter(|m| m.count_ones() == weight).collect()
}

/// Counts, for every total weight W, the objects of one cardinality branch:
/// a set assignment of the exact branch cardinalities whose matrix holds at
/// every vertex, marker subsets within the branch's component bounds, and a
/// consistent cut per quantified set with every marker on side one. Returns
/// the count per W, indexed `0..=wmax`.
pub fn enumerate_objects(
    inst: &Instance,
    problem: &Problem,
    branch: &Branch,
    weights: &WeightAssignment,
) -> Vec<u64> {
    let g = inst.graph();
    let (n, m) = (g.n(), g.m() as u32);
    let (p1, q1) = (problem.p1(), problem.q1());
    let mut counts = vec![0u64; weights.wmax + 1];

    let vertex_choices: Vec<Vec<u64>> =
        branch.x.iter().map(|&x| masks_of_weight(n, x)).collect();
    let edge_choices: Vec<Vec<u64>> =
        branch.y.iter().map(|&y| masks_of_weight(m, y)).collect();
    if vertex_choices.iter().chain(&edge_choices).any(Vec::is_empty) {
        return counts;
    }

    let mut picks_v = vec![0usize; p1];
    'assignments: loop {
        let x_masks: Vec<u64> =
            (0..p1).map(|i| vertex_choices[i][picks_v[i]]).collect();
        let mut picks_e = vec![0usize; q1];
        loop {
            let y_masks: Vec<u64> =
                (0..q1).map(|j| edge_choices[j][picks_e[j]]).collect();
            let asg = Assignment {
                vertex_sets: x_masks
                    .iter()
                    .map(|&mask| (0..n).map(|v| mask >> v & 1 == 1).collect())
                    .collect(),
                edge_sets: y_masks
                    .iter()
                    .map(|&mask| (0..m).map(|e| mask >> e & 1 == 1).collect())
                    .collect(),
            };
            if (0..n).all(|v| eval_cml(inst, &asg, &problem.matrix, v, None)) {
                add_marker_and_cut_objects(
                    g, branch, weights, &x_masks, &y_masks, &mut counts,
                );
            }
            // Advance edge assignment odometer.
            let mut j = 0;
            loop {
                if j == q1 {
                    break;
                }
                picks_e[j] += 1;
                if picks_e[j] == edge_choices[j].len() {
                    picks_e[j] = 0;
                    j += 1;
                } else {
                    break;
                }
            }
            if j == q1 {
                break;
            }
        }
        // Advance vertex assignment odometer.
        let mut i = 0;
        loop {
            if i == p1 {
                break 'assignments;
            }
            picks_v[i] += 1;
            if picks_v[i] == vertex_choices[i].len() {
                picks_v[i] = 0;
                i += 1;
            } else {
                break;
            }
        }
    }
    counts
}

fn add_marker_and_cut_objects(
    g: &Graph,
    branch: &Branch,
    weights: &WeightAssignment,
    x_masks: &[u64],
    y_masks: &[u64],
    counts: &mut [u64],
) {
    let (p1, q1) = (x_masks.len(), y_masks.len());
    let marker_sets_v: Vec<Vec<u64>> = (0..p1)
        .map(|i| {
            submasks(x_masks[i])
                .into_iter()
                .filter(|mk| mk.count_ones() <= branch.cx[i])
                .collect()
        })
        .collect();
    let marker_sets_e: Vec<Vec<u64>> = (0..q1)
        .map(|j| {
            submasks(y_masks[j])
                .into_iter()
                .filter(|mk| mk.count_ones() <= branch.cy[j])
                .collect()
        })
        .collect();

    let mut picks_v = vec![0usize; p1];
    'markers: loop {
        let mv: Vec<u64> = (0..p1).map(|i| marker_sets_v[i][picks_v[i]]).collect();
        let mut picks_e = vec![0usize; q1];
        loop {
            let me: Vec<u64> = (0..q1).map(|j| marker_sets_e[j][picks_e[j]]).collect();

            let mut cuts = 1u64;
            for i in 0..p1 {
                cuts *= count_vertex_cuts(g, x_masks[i] as u32, mv[i] as u32);
            }
            for j in 0..q1 {
                cuts *= count_edge_cuts(g, y_masks[j], me[j]);
            }
            if cuts > 0 {
                let mut w = 0u64;
                if p1 > 0 {
                    for v in 0..g.n() {
                        let mut profile = 0u32;
                        let mut place = 1u32;
                        for i in 0..p1 {
                            let digit = (x_masks[i] >> v & 1) + (mv[i] >> v & 1);
                            profile += digit as u32 * place;
                            place *= 3;
                        }
                        w += weights.vertex_weight(v, profile);
                    }
                }
                if q1 > 0 {
                    for e in 0..g.m() {
                        let mut profile = 0u32;
                        let mut place = 1u32;
                        for j in 0..q1 {
                            let digit = (y_masks[j] >> e & 1) + (me[j] >> e & 1);
                            profile += digit as u32 * place;
                            place *= 3;
                        }
                        w += weights.edge_weight(e, profile);
                    }
                }
                counts[w as usize] += cuts;
            }

            let mut j = 0;
            loop {
                if j == q1 {
                    break;
                }
                picks_e[j] += 1;
                if picks_e[j] == marker_sets_e[j].len() {
                    picks_e[j] = 0;
                    j += 1;
                } else {
                    break;
                }
            }
            if j == q1 {
                break;
            }
        }
        let mut i = 0;
        loop {
            if i == p1 {
                break 'markers;
            }
            picks_v[i] += 1;
            if picks_v[i] == marker_sets_v[i].len() {
                picks_v[i] = 0;
                i += 1;
            } else {
                break;
            }
        }
    }
}

fn submasks(mask: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut s = mask;
    loop {
        out.push(s);
        if s == 0 {
            break;
        }
        s = (s - 1) & mask;
    }
    out
}

// ---------------------------------------------------------------------------
// Random specifications for the oracle-equivalence sweep
// ---------------------------------------------------------------------------

/// Builds a random well-formed specification in the problem DSL: one or two
/// quantified vertex sets, sometimes a quantified edge set, optional
/// cardinality conditions, and a random formula of modal depth at most two
/// (edge-set atoms only under a modality).
pub fn random_spec_text(rng: &mut ChaCha8Rng) -> String {
    let p1 = rng.gen_range(1..=2);
    let q1 = usize::from(rng.gen_bool(0.35));
    let vertex_names = ["X", "Z"];
    let mut text = String::from("problem \"random\"\n");
    for name in &vertex_names[..p1] {
        text.push_str(&format!("exists vertexset {name}\n"));
    }
    if q1 == 1 {
        text.push_str("exists edgeset Y\n");
    }
    for name in &vertex_names[..p1] {
        if rng.gen_bool(0.5) {
            text.push_str(&format!("require |{name}| <= {}\n", rng.gen_range(0..=3)));
        }
    }
    if q1 == 1 && rng.gen_bool(0.5) {
        text.push_str(&format!("require |Y| <= {}\n", rng.gen_range(0..=4)));
    }
    let mut diamonds_left = 2;
    let formula = random_formula(rng, p1, q1, 0, &mut diamonds_left, 3);
    text.push_str(&format!("formula: {formula}\n"));
    text
}

fn random_formula(
    rng: &mut ChaCha8Rng,
    p1: usize,
    q1: usize,
    modal_depth: u32,
    diamonds_left: &mut u32,
    size_budget: u32,
) -> String {
    let vertex_names = ["X", "Z"];
    let atom = |rng: &mut ChaCha8Rng| -> String {
        // Edge-set atoms are only well-formed under a modality.
        if modal_depth >= 1 && q1 == 1 && rng.gen_bool(0.4) {
            String::from("Y")
        } else {
            String::from(vertex_names[rng.gen_range(0..p1)])
        }
    };
    if size_budget == 0 {
        return atom(rng);
    }
    let can_dive = *diamonds_left > 0 && modal_depth < 2;
    match rng.gen_range(0..100) {
        0..=24 => atom(rng),
        25..=39 if can_dive => {
            *diamonds_left -= 1;
            let sets = ["", "[{0}]", "[{1}]", "[{2}]", "[{0,2}]", "[even]", "[>=2]"];
            let set = sets[rng.gen_range(0..sets.len())];
            let body =
                random_formula(rng, p1, q1, modal_depth + 1, diamonds_left, size_budget - 1);
            let op = if rng.gen_bool(0.7) { "diamond" } else { "box" };
            format!("{op}{set}({body})")
        }
        40..=54 => {
            let a = random_formula(rng, p1, q1, modal_depth, diamonds_left, size_budget - 1);
            format!("!({a})")
        }
        _ => {
            let a = random_formula(rng, p1, q1, modal_depth, diamonds_left, size_budget - 1);
            let b = random_formula(rng, p1, q1, modal_depth, diamonds_left, size_budget - 1);
            let op = ["&", "|", "->", "<->"][rng.gen_range(0..4)];
            format!("({a}) {op} ({b})")
        }
    }
}
