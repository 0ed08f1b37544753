//! Nice tree decompositions: the normalized form the solver engines run on.
//!
//! A nice decomposition is a rooted binary tree of five node kinds — leaf,
//! introduce-vertex, introduce-edge, forget, join — where leaves and the
//! root carry empty bags, every graph edge is introduced exactly once, and
//! joins have identical bags on both sides. [`make_nice`] converts any valid
//! tree decomposition into this form without increasing the width; each edge
//! is introduced directly below the forget of whichever endpoint is
//! forgotten first, which the connectivity engine relies on.

use serde::{Deserialize, Serialize};

use crate::decomp::TreeDecomposition;
use crate::graph::{EdgeId, Graph, Vertex};
use crate::{Error, Result};

/// One node of a nice decomposition. Child indices always point at earlier
/// positions in the node array, so the array order is a valid evaluation
/// order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum NiceNode {
    /// An empty bag with no children.
    Leaf,
    /// Adds `vertex` to the child's bag.
    IntroduceVertex { vertex: Vertex, child: usize },
    /// Makes `edge` visible; both endpoints are in the (unchanged) bag.
    IntroduceEdge { edge: EdgeId, child: usize },
    /// Removes `vertex` from the child's bag, fixing its local state.
    Forget { vertex: Vertex, child: usize },
    /// Combines two subtrees over the same bag.
    Join { left: usize, right: usize },
}

/// A nice tree decomposition plus the bag at every node.
#[derive(Debug, Clone)]
pub struct NiceDecomposition {
    nodes: Vec<NiceNode>,
    root: usize,
    bags: Vec<Vec<Vertex>>,
    n_vertices: u32,
}

#[derive(Serialize, Deserialize)]
struct NiceJson {
    nodes: Vec<NiceNode>,
    root: usize,
    n_vertices: u32,
}

impl NiceDecomposition {
    pub fn nodes(&self) -> &[NiceNode] {
        &self.nodes
    }

    pub fn root(&self) -> usize {
        self.root
    }

    /// The bag at (i.e. after applying) node `i`, sorted ascending.
    pub fn bag(&self, i: usize) -> &[Vertex] {
        &self.bags[i]
    }

    pub fn n_vertices(&self) -> u32 {
        self.n_vertices
    }

    pub fn width(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(0).saturating_sub(1)
    }

    /// Serializes to a flat JSON document (`nodes` in evaluation order plus
    /// the root index); bags are recomputed on load.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&NiceJson {
            nodes: self.nodes.clone(),
            root: self.root,
            n_vertices: self.n_vertices,
        })
        .expect("nice decomposition serializes")
    }

    /// Loads a document produced by [`NiceDecomposition::to_json`],
    /// recomputing bags and rejecting structurally broken trees.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: NiceJson = serde_json::from_str(text)?;
        Self::assemble(doc.nodes, doc.root, doc.n_vertices)
    }

    /// Validates node/bag consistency and computes bags. Children must
    /// appear before parents and be referenced exactly once.
    fn assemble(nodes: Vec<NiceNode>, root: usize, n_vertices: u32) -> Result<Self> {
        let invalid = |msg: String| Error::InvalidDecomposition(msg);
        if root >= nodes.len() {
            return Err(invalid("root index out of range".into()));
        }
        let mut used = vec![false; nodes.len()];
        let mut bags: Vec<Vec<Vertex>> = Vec::with_capacity(nodes.len());
        let claim = |child: usize, parent: usize, used: &mut Vec<bool>| -> Result<()> {
            if child >= parent {
                return Err(invalid(format!("node {parent} references later node {child}")));
            }
            if std::mem::replace(&mut used[child], true) {
                return Err(invalid(format!("node {child} has two parents")));
            }
            Ok(())
        };
        for (i, node) in nodes.iter().enumerate() {
            let bag = match *node {
                NiceNode::Leaf => Vec::new(),
                NiceNode::IntroduceVertex { vertex, child } => {
                    claim(child, i, &mut used)?;
                    if vertex >= n_vertices {
                        return Err(invalid(format!("vertex {vertex} out of range")));
                    }
                    let mut bag = bags[child].clone();
                    match bag.binary_search(&vertex) {
                        Ok(_) => {
                            return Err(invalid(format!(
                                "node {i} introduces vertex {vertex} already in the bag"
                            )))
                        }
                        Err(pos) => bag.insert(pos, vertex),
                    }
                    bag
                }
                NiceNode::IntroduceEdge { child, .. } => {
                    claim(child, i, &mut used)?;
                    bags[child].clone()
                }
                NiceNode::Forget { vertex, child } => {
                    claim(child, i, &mut used)?;
                    let mut bag = bags[child].clone();
                    match bag.binary_search(&vertex) {
                        Ok(pos) => {
                            bag.remove(pos);
                        }
                        Err(_) => {
                            return Err(invalid(format!(
                                "node {i} forgets vertex {vertex} missing from the bag"
                            )))
                        }
                    }
                    bag
                }
                NiceNode::Join { left, right } => {
                    claim(left, i, &mut used)?;
                    claim(right, i, &mut used)?;
                    if bags[left] != bags[right] {
                        return Err(invalid(format!("join {i} has mismatched child bags")));
                    }
                    bags[left].clone()
                }
            };
            bags.push(bag);
        }
        for (i, &u) in used.iter().enumerate() {
            if i != root && !u {
                return Err(invalid(format!("node {i} is unreachable from the root")));
            }
        }
        if used[root] {
            return Err(invalid("root has a parent".into()));
        }
        if !bags[root].is_empty() {
            return Err(invalid("root bag is not empty".into()));
        }
        Ok(Self { nodes, root, bags, n_vertices })
    }

    /// Checks that this decomposition fits `g`: vertex/edge ids in range,
    /// every edge introduced exactly once with both endpoints in the bag.
    pub fn validate_for(&self, g: &Graph) -> Result<()> {
        if self.n_vertices != g.n() {
            return Err(Error::InvalidDecomposition(format!(
                "decomposition is over {} vertices, graph has {}",
                self.n_vertices,
                g.n()
            )));
        }
        let mut introduced = vec![false; g.m() as usize];
        for (i, node) in self.nodes.iter().enumerate() {
            if let NiceNode::IntroduceEdge { edge, child } = *node {
                if edge >= g.m() {
                    return Err(Error::InvalidDecomposition(format!("edge {edge} out of range")));
                }
                if std::mem::replace(&mut introduced[edge as usize], true) {
                    return Err(Error::InvalidDecomposition(format!(
                        "edge {edge} introduced twice"
                    )));
                }
                let e = g.endpoints(edge);
                let bag = &self.bags[child];
                if bag.binary_search(&e.u).is_err() || bag.binary_search(&e.v).is_err() {
                    return Err(Error::InvalidDecomposition(format!(
                        "edge {edge} introduced at node {i} whose bag misses an endpoint"
                    )));
                }
            }
        }
        if let Some(missing) = introduced.iter().position(|&b| !b) {
            return Err(Error::InvalidDecomposition(format!("edge {missing} never introduced")));
        }
        Ok(())
    }
}

/// Converts a valid tree decomposition into nice form. The width is
/// preserved exactly; the node count is bounded by
/// `m + #bags · (2·width + 4)` plus the initial leaf.
pub fn make_nice(g: &Graph, td: &TreeDecomposition) -> Result<NiceDecomposition> {
    let report = td.validate(g);
    if !report.is_valid() {
        let list: Vec<String> = report.violations.iter().take(4).map(|v| v.to_string()).collect();
        return Err(Error::InvalidDecomposition(list.join("; ")));
    }

    // Edges between a pair of bag vertices, looked up when forgetting.
    let mut pair_edges: std::collections::HashMap<(Vertex, Vertex), Vec<EdgeId>> =
        std::collections::HashMap::new();
    for (id, e) in g.edges().iter().enumerate() {
        let key = (e.u.min(e.v), e.u.max(e.v));
        pair_edges.entry(key).or_default().push(id as EdgeId);
    }

    let mut builder = Builder {
        nodes: Vec::new(),
        bags: Vec::new(),
        introduced: vec![false; g.m() as usize],
        pair_edges,
    };

    if td.bags().is_empty() {
        // Only the empty graph validates against an empty decomposition.
        let root = builder.leaf();
        return NiceDecomposition::assemble(builder.nodes, root, g.n());
    }

    // Root the bag tree at bag 0 and compute children lists.
    let b = td.bags().len();
    let mut adj = vec![Vec::new(); b];
    for &(x, y) in td.tree_edges() {
        adj[x].push(y);
        adj[y].push(x);
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    let mut parent = vec![usize::MAX; b];
    let mut order = Vec::with_capacity(b); // BFS order from the root bag
    let mut seen = vec![false; b];
    seen[0] = true;
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(x) = queue.pop_front() {
        order.push(x);
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                parent[y] = x;
                queue.push_back(y);
            }
        }
    }

    // Process bags in reverse BFS order (children before parents).
    let mut chain_top: Vec<Option<usize>> = vec![None; b];
    for &x in order.iter().rev() {
        let bag_x = &td.bags()[x];
        let children: Vec<usize> = adj[x].iter().copied().filter(|&y| parent[y] == x).collect();
        let mut acc: Option<usize> = None;
        for c in children {
            let mut top = chain_top[c].take().expect("child processed first");
            // Shrink B_c to B_c ∩ B_x, introducing each pending edge at the
            // last moment both endpoints are still present.
            let bag_c = &td.bags()[c];
            for &w in bag_c.iter().filter(|v| bag_x.binary_search(v).is_err()) {
                top = builder.forget_with_edges(top, w);
            }
            // Grow to B_x.
            for &v in bag_x.iter().filter(|v| bag_c.binary_search(v).is_err()) {
                top = builder.introduce_vertex(top, v);
            }
            acc = Some(match acc {
                None => top,
                Some(a) => builder.join(a, top),
            });
        }
        let top = match acc {
            Some(a) => a,
            None => {
                // Leaf bag: build the chain from scratch.
                let mut t = builder.leaf();
                for &v in bag_x {
                    t = builder.introduce_vertex(t, v);
                }
                t
            }
        };
        chain_top[x] = Some(top);
    }

    // Forget the root bag down to the empty bag.
    let mut top = chain_top[0].take().expect("root bag processed");
    let root_bag = td.bags()[0].clone();
    for &w in &root_bag {
        top = builder.forget_with_edges(top, w);
    }

    debug_assert!(builder.introduced.iter().all(|&i| i), "all edges introduced");
    let nice = NiceDecomposition::assemble(builder.nodes, top, g.n())?;
    nice.validate_for(g)?;
    Ok(nice)
}

struct Builder {
    nodes: Vec<NiceNode>,
    bags: Vec<Vec<Vertex>>,
    introduced: Vec<bool>,
    pair_edges: std::collections::HashMap<(Vertex, Vertex), Vec<EdgeId>>,
}

impl Builder {
    fn push(&mut self, node: NiceNode, bag: Vec<Vertex>) -> usize {
        self.nodes.push(node);
        self.bags.push(bag);
        self.nodes.len() - 1
    }

    fn leaf(&mut self) -> usize {
        self.push(NiceNode::Leaf, Vec::new())
    }

    fn introduce_vertex(&mut self, child: usize, v: Vertex) -> usize {
        let mut bag = self.bags[child].clone();
        let pos = bag.binary_search(&v).unwrap_err();
        bag.insert(pos, v);
        self.push(NiceNode::IntroduceVertex { vertex: v, child }, bag)
    }

    fn join(&mut self, left: usize, right: usize) -> usize {
        let bag = self.bags[left].clone();
        debug_assert_eq!(bag, self.bags[right]);
        self.push(NiceNode::Join { left, right }, bag)
    }

    /// Introduces every pending edge between `w` and the rest of the bag
    /// (ascending edge id), then forgets `w`.
    fn forget_with_edges(&mut self, child: usize, w: Vertex) -> usize {
        let bag = self.bags[child].clone();
        let mut pending = Vec::new();
        for &z in bag.iter().filter(|&&z| z != w) {
            let key = (w.min(z), w.max(z));
            if let Some(ids) = self.pair_edges.get(&key) {
                pending.extend(ids.iter().copied().filter(|&e| !self.introduced[e as usize]));
            }
        }
        pending.sort_unstable();
        let mut top = child;
        for e in pending {
            self.introduced[e as usize] = true;
            let b = self.bags[top].clone();
            top = self.push(NiceNode::IntroduceEdge { edge: e, child: top }, b);
        }
        let mut bag = self.bags[top].clone();
        let pos = bag.binary_search(&w).expect("forgotten vertex is in the bag");
        bag.remove(pos);
        self.push(NiceNode::Forget { vertex: w, child: top }, bag)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::greedy_decomposition;

    #[test]
    fn single_edge_normalizes_to_the_forced_shape() {
        let g = Graph::undirected(2, &[(0, 1)]).unwrap();
        let td = TreeDecomposition::new(vec![vec![0, 1]], vec![], 2).unwrap();
        let nice = make_nice(&g, &td).unwrap();
        // Leaf, introduce 0, introduce 1, introduce edge, forget 0, forget 1.
        assert_eq!(
            nice.nodes(),
            &[
                NiceNode::Leaf,
                NiceNode::IntroduceVertex { vertex: 0, child: 0 },
                NiceNode::IntroduceVertex { vertex: 1, child: 1 },
                NiceNode::IntroduceEdge { edge: 0, child: 2 },
                NiceNode::Forget { vertex: 0, child: 3 },
                NiceNode::Forget { vertex: 1, child: 4 },
            ]
        );
        assert_eq!(nice.root(), 5);
        assert_eq!(nice.width(), 1);
    }

    #[test]
    fn width_is_preserved_and_bounds_hold() {
        for (g, name) in [
            (Graph::undirected(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]).unwrap(), "c6"),
            (Graph::undirected(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap(), "star"),
            (Graph::undirected(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap(), "k4"),
            (Graph::undirected(3, &[]).unwrap(), "edgeless"),
        ] {
            let td = greedy_decomposition(&g);
            let nice = make_nice(&g, &td).unwrap();
            assert_eq!(nice.width(), td.width(), "{name}");
            nice.validate_for(&g).unwrap();
            let bound = g.m() as usize + td.bags().len() * (2 * td.width() + 4) + 1;
            assert!(nice.nodes().len() <= bound, "{name}: {} > {bound}", nice.nodes().len());
        }
    }

    #[test]
    fn every_edge_is_introduced_exactly_once() {
        let g = Graph::undirected(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 4), (1, 3)]).unwrap();
        let td = greedy_decomposition(&g);
        let nice = make_nice(&g, &td).unwrap();
        let mut count = vec![0usize; g.m() as usize];
        for node in nice.nodes() {
            if let NiceNode::IntroduceEdge { edge, .. } = node {
                count[*edge as usize] += 1;
            }
        }
        assert!(count.iter().all(|&c| c == 1), "{count:?}");
    }

    #[test]
    fn join_bags_match_and_root_is_empty() {
        // A star decomposition with three leaves around a center bag forces joins.
        let g = Graph::undirected(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let td = TreeDecomposition::new(
            vec![vec![0], vec![0, 1], vec![0, 2], vec![0, 3]],
            vec![(0, 1), (0, 2), (0, 3)],
            4,
        )
        .unwrap();
        let nice = make_nice(&g, &td).unwrap();
        assert!(nice.bag(nice.root()).is_empty());
        let joins = nice
            .nodes()
            .iter()
            .filter(|n| matches!(n, NiceNode::Join { .. }))
            .count();
        assert_eq!(joins, 2, "three children fold into two binary joins");
        for node in nice.nodes() {
            if let NiceNode::Join { left, right } = node {
                assert_eq!(nice.bag(*left), nice.bag(*right));
            }
        }
    }

    #[test]
    fn rejects_invalid_decompositions() {
        let g = Graph::undirected(3, &[(0, 1), (1, 2)]).unwrap();
        let td = TreeDecomposition::new(vec![vec![0, 1]], vec![], 3).unwrap();
        assert!(matches!(make_nice(&g, &td), Err(Error::InvalidDecomposition(_))));
    }

    #[test]
    fn json_round_trips_and_loader_rejects_broken_trees() {
        let g = Graph::undirected(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let td = greedy_decomposition(&g);
        let nice = make_nice(&g, &td).unwrap();
        let text = nice.to_json();
        let back = NiceDecomposition::from_json(&text).unwrap();
        assert_eq!(back.nodes(), nice.nodes());
        assert_eq!(back.root(), nice.root());
        assert_eq!(back.bag(3), nice.bag(3));

        // Forgetting a vertex that is not in the bag must be rejected.
        let bad = r#"{"nodes":[{"kind":"leaf"},{"kind":"forget","vertex":0,"child":0}],"root":1,"n_vertices":1}"#;
        assert!(NiceDecomposition::from_json(bad).is_err());
        // Two parents for one child must be rejected.
        let bad = r#"{"nodes":[{"kind":"leaf"},{"kind":"join","left":0,"right":0}],"root":1,"n_vertices":0}"#;
        assert!(NiceDecomposition::from_json(bad).is_err());
    }
}
