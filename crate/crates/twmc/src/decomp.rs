//! Tree decompositions: PACE-style `.td` I/O, validation, and a greedy
//! heuristic for graphs that come without a decomposition.

use std::fmt;
use std::fmt::Write as _;

use crate::graph::{Graph, Vertex};
use crate::{Error, Result};

/// A tree decomposition: bags of vertices connected by tree edges. Bags are
/// kept sorted; bag indices are 0-based (the `.td` format is 1-based).
#[derive(Debug, Clone)]
pub struct TreeDecomposition {
    bags: Vec<Vec<Vertex>>,
    tree_edges: Vec<(usize, usize)>,
    n_vertices: u32,
}

/// One way a candidate decomposition fails the decomposition axioms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// A vertex of the graph appears in no bag.
    MissingVertex(Vertex),
    /// An edge of the graph has no bag containing both endpoints.
    UncoveredEdge(u32),
    /// The occurrences of a vertex do not form a connected subtree.
    DisconnectedVertex(Vertex),
    /// The bag graph is not a tree (disconnected or cyclic).
    NotATree,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MissingVertex(v) => write!(f, "vertex {v} appears in no bag"),
            Violation::UncoveredEdge(e) => write!(f, "edge {e} is covered by no bag"),
            Violation::DisconnectedVertex(v) => {
                write!(f, "the bags containing vertex {v} are not connected")
            }
            Violation::NotATree => write!(f, "the bags do not form a tree"),
        }
    }
}

/// Result of checking a decomposition against a graph.
#[derive(Debug, Clone)]
pub struct DecompositionReport {
    /// Largest bag size minus one (0 for an empty decomposition).
    pub width: usize,
    pub violations: Vec<Violation>,
}

impl DecompositionReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl TreeDecomposition {
    /// Builds a decomposition from bags and tree edges; bags are sorted and
    /// deduplicated, tree edges must reference existing bags.
    pub fn new(
        bags: Vec<Vec<Vertex>>,
        tree_edges: Vec<(usize, usize)>,
        n_vertices: u32,
    ) -> Result<Self> {
        let mut bags = bags;
        for bag in &mut bags {
            bag.sort_unstable();
            bag.dedup();
        }
        for &(a, b) in &tree_edges {
            if a >= bags.len() || b >= bags.len() || a == b {
                return Err(Error::InvalidDecomposition(format!(
                    "tree edge {a}-{b} references a missing bag"
                )));
            }
        }
        Ok(Self { bags, tree_edges, n_vertices })
    }

    pub fn bags(&self) -> &[Vec<Vertex>] {
        &self.bags
    }

    pub fn tree_edges(&self) -> &[(usize, usize)] {
        &self.tree_edges
    }

    pub fn n_vertices(&self) -> u32 {
        self.n_vertices
    }

    /// Largest bag size minus one; 0 when there are no bags or only empties.
    pub fn width(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(0).saturating_sub(1)
    }

    /// Parses the PACE-style `.td` format: an `s td <bags> <width+1> <n>`
    /// header, `b <id> <vertices…>` lines (1-based), tree edge lines, and
    /// `c` comments.
    pub fn parse(text: &str) -> Result<Self> {
        let mut header: Option<(usize, u32)> = None;
        let mut bags: Vec<Option<Vec<Vertex>>> = Vec::new();
        let mut tree_edges = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let lineno = lineno + 1;
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("s ") {
                if header.is_some() {
                    return Err(Error::ParseDecomposition {
                        line: lineno,
                        reason: "second header line".into(),
                    });
                }
                let fields: Vec<&str> = rest.split_whitespace().collect();
                let ["td", b, _w, n] = fields[..] else {
                    return Err(Error::ParseDecomposition {
                        line: lineno,
                        reason: "header must be `s td <bags> <width+1> <n>`".into(),
                    });
                };
                let b: usize = b.parse().map_err(|_| Error::ParseDecomposition {
                    line: lineno,
                    reason: "bad bag count".into(),
                })?;
                let n: u32 = n.parse().map_err(|_| Error::ParseDecomposition {
                    line: lineno,
                    reason: "bad vertex count".into(),
                })?;
                bags = vec![None; b];
                header = Some((b, n));
                continue;
            }
            let Some((bag_count, n)) = header else {
                return Err(Error::ParseDecomposition {
                    line: lineno,
                    reason: "content before the `s td` header".into(),
                });
            };
            if let Some(rest) = line.strip_prefix("b ") {
                let mut it = rest.split_whitespace();
                let id: usize = it
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| Error::ParseDecomposition {
                        line: lineno,
                        reason: "bag line without an id".into(),
                    })?;
                if id == 0 || id > bag_count {
                    return Err(Error::ParseDecomposition {
                        line: lineno,
                        reason: format!("bag id {id} outside 1..={bag_count}"),
                    });
                }
                if bags[id - 1].is_some() {
                    return Err(Error::ParseDecomposition {
                        line: lineno,
                        reason: format!("bag {id} defined twice"),
                    });
                }
                let mut bag = Vec::new();
                for tok in it {
                    let v: u64 = tok.parse().map_err(|_| Error::ParseDecomposition {
                        line: lineno,
                        reason: format!("bad vertex `{tok}`"),
                    })?;
                    if v == 0 || v > u64::from(n) {
                        return Err(Error::ParseDecomposition {
                            line: lineno,
                            reason: format!("vertex {v} outside 1..={n}"),
                        });
                    }
                    bag.push((v - 1) as Vertex);
                }
                bags[id - 1] = Some(bag);
                continue;
            }
            // Anything else is a tree edge between 1-based bag ids.
            let mut it = line.split_whitespace();
            let (a, b) = match (it.next(), it.next(), it.next()) {
                (Some(a), Some(b), None) => (a, b),
                _ => {
                    return Err(Error::ParseDecomposition {
                        line: lineno,
                        reason: "expected a tree edge `a b`".into(),
                    })
                }
            };
            let parse_id = |tok: &str| -> Result<usize> {
                let id: usize = tok.parse().map_err(|_| Error::ParseDecomposition {
                    line: lineno,
                    reason: format!("bad bag id `{tok}`"),
                })?;
                if id == 0 || id > bag_count {
                    return Err(Error::ParseDecomposition {
                        line: lineno,
                        reason: format!("bag id {id} outside 1..={bag_count}"),
                    });
                }
                Ok(id - 1)
            };
            tree_edges.push((parse_id(a)?, parse_id(b)?));
        }
        let Some((_, n)) = header else {
            return Err(Error::ParseDecomposition { line: 0, reason: "missing `s td` header".into() });
        };
        let bags: Vec<Vec<Vertex>> = bags
            .into_iter()
            .enumerate()
            .map(|(i, b)| {
                b.ok_or_else(|| Error::ParseDecomposition {
                    line: 0,
                    reason: format!("bag {} never defined", i + 1),
                })
            })
            .collect::<Result<_>>()?;
        Self::new(bags, tree_edges, n)
    }

    /// Serializes to the `.td` format parsed by [`TreeDecomposition::parse`].
    pub fn to_td_string(&self) -> String {
        let mut out = String::new();
        let width_plus_one = self.bags.iter().map(Vec::len).max().unwrap_or(0);
        let _ = writeln!(out, "s td {} {} {}", self.bags.len(), width_plus_one, self.n_vertices);
        for (i, bag) in self.bags.iter().enumerate() {
            let _ = write!(out, "b {}", i + 1);
            for &v in bag {
                let _ = write!(out, " {}", v + 1);
            }
            out.push('\n');
        }
        for &(a, b) in &self.tree_edges {
            let _ = writeln!(out, "{} {}", a + 1, b + 1);
        }
        out
    }

    /// Checks the three decomposition axioms against `g` and reports every
    /// violation found together with the width.
    pub fn validate(&self, g: &Graph) -> DecompositionReport {
        let mut violations = Vec::new();
        let b = self.bags.len();

        // Tree shape: connected and acyclic (a single bag is a tree; zero
        // bags only decompose the empty graph).
        let is_tree = if b == 0 {
            g.n() == 0
        } else {
            let mut adj = vec![Vec::new(); b];
            for &(x, y) in &self.tree_edges {
                adj[x].push(y);
                adj[y].push(x);
            }
            let mut seen = vec![false; b];
            let mut stack = vec![0usize];
            seen[0] = true;
            let mut reached = 1;
            while let Some(x) = stack.pop() {
                for &y in &adj[x] {
                    if !seen[y] {
                        seen[y] = true;
                        reached += 1;
                        stack.push(y);
                    }
                }
            }
            reached == b && self.tree_edges.len() == b - 1
        };
        if !is_tree {
            violations.push(Violation::NotATree);
        }

        // Every vertex occurs; occurrences are connected (checked per vertex
        // by BFS restricted to bags containing it, valid only on trees).
        let mut occurrence: Vec<Vec<usize>> = vec![Vec::new(); g.n() as usize];
        for (i, bag) in self.bags.iter().enumerate() {
            for &v in bag {
                if v < g.n() {
                    occurrence[v as usize].push(i);
                }
            }
        }
        let mut adj = vec![Vec::new(); b];
        for &(x, y) in &self.tree_edges {
            adj[x].push(y);
            adj[y].push(x);
        }
        for v in 0..g.n() {
            let occ = &occurrence[v as usize];
            if occ.is_empty() {
                violations.push(Violation::MissingVertex(v));
                continue;
            }
            if !is_tree {
                continue; // connectivity of occurrences is meaningless here
            }
            let inside: std::collections::HashSet<usize> = occ.iter().copied().collect();
            let mut seen = std::collections::HashSet::new();
            let mut stack = vec![occ[0]];
            seen.insert(occ[0]);
            while let Some(x) = stack.pop() {
                for &y in &adj[x] {
                    if inside.contains(&y) && seen.insert(y) {
                        stack.push(y);
                    }
                }
            }
            if seen.len() != occ.len() {
                violations.push(Violation::DisconnectedVertex(v));
            }
        }

        // Every edge is covered by some bag.
        for (id, e) in g.edges().iter().enumerate() {
            let covered = occurrence[e.u as usize]
                .iter()
                .any(|&bag| self.bags[bag].binary_search(&e.v).is_ok());
            if !covered {
                violations.push(Violation::UncoveredEdge(id as u32));
            }
        }

        DecompositionReport { width: self.width(), violations }
    }
}

/// Builds the decomposition induced by an elimination order: the bag of `v`
/// is `v` plus its higher-ordered neighbours in the fill-in graph, attached
/// to the bag of its lowest-ordered such neighbour. Roots of different
/// components are chained so the result is a single tree.
pub fn elimination_decomposition(g: &Graph, order: &[Vertex]) -> Result<TreeDecomposition> {
    let n = g.n() as usize;
    if order.len() != n {
        return Err(Error::InvalidDecomposition(format!(
            "elimination order has {} entries for {n} vertices",
            order.len()
        )));
    }
    let mut pos = vec![usize::MAX; n];
    for (i, &v) in order.iter().enumerate() {
        if (v as usize) >= n || pos[v as usize] != usize::MAX {
            return Err(Error::InvalidDecomposition(
                "elimination order is not a permutation of the vertices".into(),
            ));
        }
        pos[v as usize] = i;
    }
    if n == 0 {
        return TreeDecomposition::new(vec![Vec::new()], Vec::new(), 0);
    }

    // Adjacency matrix of the progressively filled graph.
    let mut adj = vec![false; n * n];
    for e in g.edges() {
        adj[e.u as usize * n + e.v as usize] = true;
        adj[e.v as usize * n + e.u as usize] = true;
    }
    let mut bags = Vec::with_capacity(n);
    let mut tree_edges = Vec::new();
    let mut prev_root: Option<usize> = None;
    for (i, &v) in order.iter().enumerate() {
        let vu = v as usize;
        let higher: Vec<usize> =
            (0..n).filter(|&u| adj[vu * n + u] && pos[u] > i).collect();
        for (a_i, &a) in higher.iter().enumerate() {
            for &b in &higher[a_i + 1..] {
                adj[a * n + b] = true;
                adj[b * n + a] = true;
            }
        }
        let mut bag: Vec<Vertex> = higher.iter().map(|&u| u as Vertex).collect();
        bag.push(v);
        bags.push(bag);
        match higher.iter().min_by_key(|&&u| pos[u]) {
            Some(&next) => {
                // The bag of `next` is created at its own elimination step;
                // record the edge now, indices are stable (bag i = step i).
                tree_edges.push((i, pos[next]));
            }
            None => {
                if let Some(r) = prev_root {
                    tree_edges.push((i, r));
                }
                prev_root = Some(i);
            }
        }
    }
    TreeDecomposition::new(bags, tree_edges, g.n())
}

/// Greedy minimum-fill elimination order (ties to the smallest vertex id).
pub fn min_fill_order(g: &Graph) -> Vec<Vertex> {
    let n = g.n() as usize;
    let mut adj = vec![false; n * n];
    for e in g.edges() {
        adj[e.u as usize * n + e.v as usize] = true;
        adj[e.v as usize * n + e.u as usize] = true;
    }
    let mut alive: Vec<usize> = (0..n).collect();
    let mut order = Vec::with_capacity(n);
    while !alive.is_empty() {
        let mut best = (usize::MAX, usize::MAX);
        for &v in &alive {
            let nb: Vec<usize> = alive.iter().copied().filter(|&u| adj[v * n + u]).collect();
            let mut fill = 0usize;
            for (i, &a) in nb.iter().enumerate() {
                for &b in &nb[i + 1..] {
                    if !adj[a * n + b] {
                        fill += 1;
                    }
                }
            }
            if (fill, v) < best {
                best = (fill, v);
            }
        }
        let v = best.1;
        let nb: Vec<usize> = alive.iter().copied().filter(|&u| adj[v * n + u]).collect();
        for (i, &a) in nb.iter().enumerate() {
            for &b in &nb[i + 1..] {
                adj[a * n + b] = true;
                adj[b * n + a] = true;
            }
        }
        alive.retain(|&u| u != v);
        order.push(v as Vertex);
    }
    order
}

/// Heuristic decomposition via greedy minimum-fill; always valid, width is
/// not guaranteed optimal.
pub fn greedy_decomposition(g: &Graph) -> TreeDecomposition {
    elimination_decomposition(g, &min_fill_order(g))
        .expect("min-fill order is a permutation")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: u32) -> Graph {
        Graph::undirected(n, &(0..n - 1).map(|i| (i, i + 1)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn td_round_trips_through_the_text_format() {
        let td = TreeDecomposition::new(
            vec![vec![0, 1], vec![1, 2], vec![2, 3]],
            vec![(0, 1), (1, 2)],
            4,
        )
        .unwrap();
        let text = td.to_td_string();
        let back = TreeDecomposition::parse(&text).unwrap();
        assert_eq!(back.bags(), td.bags());
        assert_eq!(back.tree_edges(), td.tree_edges());
        assert_eq!(back.width(), 1);
    }

    #[test]
    fn td_parse_reports_errors_with_lines() {
        assert!(TreeDecomposition::parse("b 1 1\n").is_err());
        let err = TreeDecomposition::parse("s td 1 1 2\nb 1 3\n").unwrap_err();
        assert!(matches!(err, Error::ParseDecomposition { line: 2, .. }), "{err}");
        assert!(TreeDecomposition::parse("s td 2 1 2\nb 1 1\n").is_err(), "missing bag");
        assert!(TreeDecomposition::parse("s td 1 1 1\nb 1 1\nb 1 1\n").is_err(), "dup bag");
    }

    #[test]
    fn validation_flags_each_axiom_violation() {
        let g = path(3);
        // Vertex 2 missing entirely.
        let td = TreeDecomposition::new(vec![vec![0, 1]], vec![], 3).unwrap();
        let report = td.validate(&g);
        assert!(report.violations.contains(&Violation::MissingVertex(2)));
        assert!(report.violations.contains(&Violation::UncoveredEdge(1)));

        // Edge 0-1 never shares a bag.
        let td =
            TreeDecomposition::new(vec![vec![0], vec![1, 2]], vec![(0, 1)], 3).unwrap();
        assert!(td.validate(&g).violations.contains(&Violation::UncoveredEdge(0)));

        // Vertex 0 occurs in two disconnected bags.
        let td = TreeDecomposition::new(
            vec![vec![0, 1], vec![1, 2], vec![0, 2]],
            vec![(0, 1), (1, 2)],
            3,
        )
        .unwrap();
        assert!(td.validate(&g).violations.contains(&Violation::DisconnectedVertex(0)));

        // Disconnected bag tree.
        let td = TreeDecomposition::new(vec![vec![0, 1], vec![1, 2]], vec![], 3).unwrap();
        assert!(td.validate(&g).violations.contains(&Violation::NotATree));

        // A correct decomposition is clean.
        let td = TreeDecomposition::new(vec![vec![0, 1], vec![1, 2]], vec![(0, 1)], 3).unwrap();
        let report = td.validate(&g);
        assert!(report.is_valid(), "{:?}", report.violations);
        assert_eq!(report.width, 1);
    }

    #[test]
    fn greedy_widths_match_known_graphs() {
        let tree = Graph::undirected(5, &[(0, 1), (0, 2), (2, 3), (2, 4)]).unwrap();
        let td = greedy_decomposition(&tree);
        assert!(td.validate(&tree).is_valid());
        assert_eq!(td.width(), 1);

        let k5 = Graph::undirected(
            5,
            &[(0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)],
        )
        .unwrap();
        let td = greedy_decomposition(&k5);
        assert!(td.validate(&k5).is_valid());
        assert_eq!(td.width(), 4);

        let c4 = Graph::undirected(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let td = greedy_decomposition(&c4);
        assert!(td.validate(&c4).is_valid());
        assert_eq!(td.width(), 2);
    }

    #[test]
    fn greedy_handles_edgeless_and_disconnected_graphs() {
        let g = Graph::undirected(3, &[]).unwrap();
        let td = greedy_decomposition(&g);
        assert!(td.validate(&g).is_valid());

        let two_paths = Graph::undirected(6, &[(0, 1), (1, 2), (3, 4), (4, 5)]).unwrap();
        let td = greedy_decomposition(&two_paths);
        assert!(td.validate(&two_paths).is_valid());
        assert_eq!(td.width(), 1);
    }

    #[test]
    fn elimination_orders_give_different_valid_decompositions() {
        let g = path(6);
        let forward = elimination_decomposition(&g, &[0, 1, 2, 3, 4, 5]).unwrap();
        let spread = elimination_decomposition(&g, &[0, 2, 4, 1, 3, 5]).unwrap();
        assert!(forward.validate(&g).is_valid());
        assert!(spread.validate(&g).is_valid());
        assert_ne!(forward.bags(), spread.bags());

        assert!(elimination_decomposition(&g, &[0, 0, 1, 2, 3, 4]).is_err());
        assert!(elimination_decomposition(&g, &[0, 1]).is_err());
    }
}
