//! Graphs, problem instances, and the two supported graph file formats.
//!
//! Graphs are simple (no self-loops, no duplicate edges) and either
//! undirected or directed; a directed graph may contain both `u→v` and
//! `v→u`. Vertices are dense `0..n` indices; edges carry stable ids given by
//! their position in the input, which is also the order used by tree
//! decompositions and the solver engines.

use std::fmt::Write as _;

use crate::{Error, Result};

pub type Vertex = u32;
pub type EdgeId = u32;

/// An edge; for directed graphs the direction is `u → v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub u: Vertex,
    pub v: Vertex,
}

impl Edge {
    /// The endpoint other than `w` (which must be an endpoint).
    pub fn other(&self, w: Vertex) -> Vertex {
        if w == self.u {
            self.v
        } else {
            self.u
        }
    }
}

/// A finite simple graph with optional vertex names.
#[derive(Debug, Clone)]
pub struct Graph {
    directed: bool,
    n: u32,
    edges: Vec<Edge>,
    /// `adj[v]` lists `(neighbour, edge id)` for every incident edge,
    /// incoming and outgoing alike, sorted by edge id.
    adj: Vec<Vec<(Vertex, EdgeId)>>,
    names: Option<Vec<String>>,
}

impl Graph {
    /// Builds an undirected graph on `n` vertices.
    pub fn undirected(n: u32, pairs: &[(Vertex, Vertex)]) -> Result<Self> {
        Self::build(false, n, pairs, None)
    }

    /// Builds a directed graph on `n` vertices with arcs `u → v`.
    pub fn directed(n: u32, pairs: &[(Vertex, Vertex)]) -> Result<Self> {
        Self::build(true, n, pairs, None)
    }

    fn build(
        directed: bool,
        n: u32,
        pairs: &[(Vertex, Vertex)],
        names: Option<Vec<String>>,
    ) -> Result<Self> {
        let mut seen = std::collections::HashSet::with_capacity(pairs.len());
        let mut edges = Vec::with_capacity(pairs.len());
        let mut adj = vec![Vec::new(); n as usize];
        for (id, &(u, v)) in pairs.iter().enumerate() {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge {id} touches vertex {} but the graph has {n} vertices",
                    u.max(v)
                )));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("edge {id} is a self-loop at {u}")));
            }
            let key = if directed { (u, v) } else { (u.min(v), u.max(v)) };
            if !seen.insert(key) {
                return Err(Error::InvalidGraph(format!("duplicate edge {u}-{v} (edge {id})")));
            }
            let id = id as EdgeId;
            edges.push(Edge { u, v });
            adj[u as usize].push((v, id));
            adj[v as usize].push((u, id));
        }
        Ok(Self { directed, n, edges, adj, names })
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> u32 {
        self.edges.len() as u32
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn endpoints(&self, e: EdgeId) -> Edge {
        self.edges[e as usize]
    }

    /// All `(neighbour, edge id)` pairs at `v`, regardless of direction.
    pub fn incident(&self, v: Vertex) -> &[(Vertex, EdgeId)] {
        &self.adj[v as usize]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v as usize].len()
    }

    /// The display name of a vertex: its label from an edge-list file, or
    /// its index rendered as a number.
    pub fn vertex_name(&self, v: Vertex) -> String {
        match &self.names {
            Some(names) => names[v as usize].clone(),
            None => v.to_string(),
        }
    }

    /// Parses a graph in the named [`GraphFormat`].
    pub fn parse(text: &str, format: GraphFormat) -> Result<Self> {
        match format {
            GraphFormat::EdgeList => parse_edge_list(text),
            GraphFormat::Pace => parse_pace(text),
        }
    }

    /// Serializes to the PACE-style `.gr` format (`p tw`/`p dtw` header,
    /// 1-based endpoints, one edge per line in id order).
    pub fn to_gr_string(&self) -> String {
        let mut out = String::new();
        let kind = if self.directed { "dtw" } else { "tw" };
        let _ = writeln!(out, "p {kind} {} {}", self.n, self.m());
        for e in &self.edges {
            let _ = writeln!(out, "{} {}", e.u + 1, e.v + 1);
        }
        out
    }
}

/// The two graph file formats understood by [`Graph::parse`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    /// One edge per line as two whitespace-separated labels; vertices are
    /// numbered by first appearance and the graph is undirected. `#` starts
    /// a comment.
    EdgeList,
    /// PACE-style `.gr`: a `p tw n m` (undirected) or `p dtw n m` (directed)
    /// header, `c` comment lines, then exactly `m` 1-based edge lines.
    Pace,
}

fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut ids = std::collections::HashMap::new();
    let mut names = Vec::new();
    let mut pairs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let (a, b) = match (it.next(), it.next(), it.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => {
                return Err(Error::ParseGraph {
                    line: lineno + 1,
                    reason: "expected exactly two vertex labels".into(),
                })
            }
        };
        let mut intern = |tok: &str| -> Vertex {
            *ids.entry(tok.to_string()).or_insert_with(|| {
                names.push(tok.to_string());
                (names.len() - 1) as Vertex
            })
        };
        pairs.push((intern(a), intern(b)));
    }
    let n = names.len() as u32;
    Graph::build(false, n, &pairs, Some(names)).map_err(|e| match e {
        Error::InvalidGraph(reason) => Error::ParseGraph { line: 0, reason },
        other => other,
    })
}

fn parse_pace(text: &str) -> Result<Graph> {
    let mut header: Option<(bool, u32, usize)> = None;
    let mut pairs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let lineno = lineno + 1;
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("p ") {
            if header.is_some() {
                return Err(Error::ParseGraph { line: lineno, reason: "second header line".into() });
            }
            let fields: Vec<&str> = rest.split_whitespace().collect();
            let [kind, n, m] = fields[..] else {
                return Err(Error::ParseGraph {
                    line: lineno,
                    reason: "header must be `p tw n m` or `p dtw n m`".into(),
                });
            };
            let directed = match kind {
                "tw" => false,
                "dtw" => true,
                other => {
                    return Err(Error::ParseGraph {
                        line: lineno,
                        reason: format!("unknown descriptor `{other}` (expected tw or dtw)"),
                    })
                }
            };
            let n: u32 = n.parse().map_err(|_| Error::ParseGraph {
                line: lineno,
                reason: "vertex count must be a natural".into(),
            })?;
            let m: usize = m.parse().map_err(|_| Error::ParseGraph {
                line: lineno,
                reason: "edge count must be a natural".into(),
            })?;
            header = Some((directed, n, m));
            continue;
        }
        let Some((_, n, _)) = header else {
            return Err(Error::ParseGraph {
                line: lineno,
                reason: "edge line before the `p` header".into(),
            });
        };
        let mut it = line.split_whitespace();
        let (a, b) = match (it.next(), it.next(), it.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => {
                return Err(Error::ParseGraph {
                    line: lineno,
                    reason: "expected exactly two endpoints".into(),
                })
            }
        };
        let parse_endpoint = |tok: &str| -> Result<Vertex> {
            let v: u64 = tok.parse().map_err(|_| Error::ParseGraph {
                line: lineno,
                reason: format!("bad endpoint `{tok}`"),
            })?;
            if v == 0 || v > u64::from(n) {
                return Err(Error::ParseGraph {
                    line: lineno,
                    reason: format!("endpoint {v} outside 1..={n}"),
                });
            }
            Ok((v - 1) as Vertex)
        };
        pairs.push((parse_endpoint(a)?, parse_endpoint(b)?));
    }
    let Some((directed, n, m)) = header else {
        return Err(Error::ParseGraph { line: 0, reason: "missing `p` header".into() });
    };
    if pairs.len() != m {
        return Err(Error::ParseGraph {
            line: 0,
            reason: format!("header promises {m} edges but {} were given", pairs.len()),
        });
    }
    Graph::build(directed, n, &pairs, None).map_err(|e| match e {
        Error::InvalidGraph(reason) => Error::ParseGraph { line: 0, reason },
        other => other,
    })
}

/// A subset of a graph's vertices or of its edges, for connectivity queries.
#[derive(Debug, Clone, Copy)]
pub enum Subset<'a> {
    Vertices(&'a [Vertex]),
    Edges(&'a [EdgeId]),
}

/// Number of connected components of the subgraph selected by `subset`:
/// for a vertex set X the subgraph induced on X; for an edge set F the
/// subgraph (V(F), F) on the endpoints of F. Edge directions are ignored.
/// The empty subset has zero components.
pub fn connected_components(g: &Graph, subset: Subset<'_>) -> usize {
    match subset {
        Subset::Vertices(xs) => {
            let mut mask = vec![false; g.n() as usize];
            for &v in xs {
                mask[v as usize] = true;
            }
            cc_of_vertex_mask(g, &mask)
        }
        Subset::Edges(es) => {
            let mut mask = vec![false; g.m() as usize];
            for &e in es {
                mask[e as usize] = true;
            }
            cc_of_edge_mask(g, &mask)
        }
    }
}

/// Component count of the subgraph induced on the masked vertices.
pub fn cc_of_vertex_mask(g: &Graph, mask: &[bool]) -> usize {
    let mut uf = UnionFind::new(g.n() as usize);
    for e in g.edges() {
        if mask[e.u as usize] && mask[e.v as usize] {
            uf.union(e.u as usize, e.v as usize);
        }
    }
    (0..g.n() as usize).filter(|&v| mask[v] && uf.find(v) == v).count()
}

/// Component count of the subgraph `(V(F), F)` for the masked edge set.
pub fn cc_of_edge_mask(g: &Graph, mask: &[bool]) -> usize {
    let mut uf = UnionFind::new(g.n() as usize);
    let mut touched = vec![false; g.n() as usize];
    for (id, e) in g.edges().iter().enumerate() {
        if mask[id] {
            touched[e.u as usize] = true;
            touched[e.v as usize] = true;
            uf.union(e.u as usize, e.v as usize);
        }
    }
    (0..g.n() as usize).filter(|&v| touched[v] && uf.find(v) == v).count()
}

/// Plain union-find with path halving, shared by connectivity queries.
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        // Smaller root wins so that representatives are deterministic.
        let (lo, hi) = (ra.min(rb), ra.max(rb));
        self.parent[hi] = lo;
        true
    }
}

/// A graph together with the closed part of an assignment: fixed vertex
/// sets, fixed edge sets, and integer parameter values, in the order the
/// problem specification declares them.
#[derive(Debug, Clone)]
pub struct Instance {
    graph: Graph,
    fixed_vertex_sets: Vec<Vec<Vertex>>,
    fixed_edge_sets: Vec<Vec<EdgeId>>,
    params: Vec<i64>,
    /// `fx_bits[v]` has bit i set iff v belongs to the i-th fixed vertex set.
    fx_bits: Vec<u32>,
    fy_bits: Vec<u32>,
}

impl Instance {
    pub fn new(
        graph: Graph,
        fixed_vertex_sets: Vec<Vec<Vertex>>,
        fixed_edge_sets: Vec<Vec<EdgeId>>,
        params: Vec<i64>,
    ) -> Result<Self> {
        if fixed_vertex_sets.len() > 32 || fixed_edge_sets.len() > 32 {
            return Err(Error::InvalidInstance("more than 32 fixed sets".into()));
        }
        let mut fixed_vertex_sets = fixed_vertex_sets;
        for (i, set) in fixed_vertex_sets.iter_mut().enumerate() {
            set.sort_unstable();
            set.dedup();
            if set.iter().any(|&v| v >= graph.n()) {
                return Err(Error::InvalidInstance(format!(
                    "fixed vertex set {i} mentions a vertex outside the graph"
                )));
            }
        }
        let mut fixed_edge_sets = fixed_edge_sets;
        for (j, set) in fixed_edge_sets.iter_mut().enumerate() {
            set.sort_unstable();
            set.dedup();
            if set.iter().any(|&e| e >= graph.m()) {
                return Err(Error::InvalidInstance(format!(
                    "fixed edge set {j} mentions an edge outside the graph"
                )));
            }
        }
        let mut fx_bits = vec![0u32; graph.n() as usize];
        for (i, set) in fixed_vertex_sets.iter().enumerate() {
            for &v in set {
                fx_bits[v as usize] |= 1 << i;
            }
        }
        let mut fy_bits = vec![0u32; graph.m() as usize];
        for (j, set) in fixed_edge_sets.iter().enumerate() {
            for &e in set {
                fy_bits[e as usize] |= 1 << j;
            }
        }
        Ok(Self { graph, fixed_vertex_sets, fixed_edge_sets, params, fx_bits, fy_bits })
    }

    /// An instance with no fixed sets and no parameters.
    pub fn bare(graph: Graph) -> Self {
        Self::new(graph, Vec::new(), Vec::new(), Vec::new()).expect("bare instance is valid")
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn fixed_vertex_sets(&self) -> &[Vec<Vertex>] {
        &self.fixed_vertex_sets
    }

    pub fn fixed_edge_sets(&self) -> &[Vec<EdgeId>] {
        &self.fixed_edge_sets
    }

    pub fn params(&self) -> &[i64] {
        &self.params
    }

    /// Bitmask of fixed vertex sets containing `v`.
    pub fn fx_bits(&self, v: Vertex) -> u32 {
        self.fx_bits[v as usize]
    }

    /// Bitmask of fixed edge sets containing `e`.
    pub fn fy_bits(&self, e: EdgeId) -> u32 {
        self.fy_bits[e as usize]
    }
}
