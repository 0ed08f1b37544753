//! Built-in catalogue of problem specifications.
//!
//! Each entry is a named template that yields a parsed, well-formed
//! [`Problem`]. Most entries are fixed specification texts; families such
//! as `r-dominating-set(r)` instantiate their text from the argument in
//! the requested name.

use std::sync::OnceLock;

use crate::logic::parse::parse_problem;
use crate::logic::Problem;
use crate::{Error, Result};

/// A named entry in the built-in catalogue.
pub trait ProblemTemplate: Send + Sync {
    /// Catalogue name; family entries show a placeholder argument, e.g.
    /// `r-dominating-set(r)`.
    fn name(&self) -> &'static str;
    /// One-line description of the problem.
    fn summary(&self) -> &'static str;
    /// Whether this template answers to a requested name.
    fn matches(&self, requested: &str) -> bool {
        self.name() == requested
    }
    /// Builds the specification for a matching requested name.
    fn build(&self, requested: &str) -> Result<Problem>;
    /// Representative specification source (families instantiate a small
    /// example of the placeholder).
    fn source(&self, requested: &str) -> Result<String>;
}

struct FixedSpec {
    name: &'static str,
    summary: &'static str,
    text: &'static str,
}

impl ProblemTemplate for FixedSpec {
    fn name(&self) -> &'static str {
        self.name
    }
    fn summary(&self) -> &'static str {
        self.summary
    }
    fn build(&self, _requested: &str) -> Result<Problem> {
        parse_problem(self.text)
    }
    fn source(&self, _requested: &str) -> Result<String> {
        Ok(self.text.to_string())
    }
}

/// Dominating set at distance `r`: the matrix unrolls `r` nested
/// neighbourhood quantifiers.
struct RDominatingSet;

impl RDominatingSet {
    fn radius(requested: &str) -> Result<u32> {
        let arg = requested
            .strip_prefix("r-dominating-set(")
            .and_then(|rest| rest.strip_suffix(')'))
            .ok_or_else(|| {
                Error::Unsupported(format!(
                    "`{requested}` does not name a catalogue problem; family entries are \
                     requested as r-dominating-set(2), r-dominating-set(3), ..."
                ))
            })?;
        let r: u32 = arg
            .parse()
            .map_err(|_| Error::Unsupported(format!("invalid radius `{arg}`")))?;
        if r == 0 || r > 16 {
            return Err(Error::Unsupported(format!(
                "radius {r} out of the supported range 1..=16"
            )));
        }
        Ok(r)
    }

    fn text(r: u32) -> String {
        let mut body = String::from("X");
        for _ in 0..r {
            body = format!("X | diamond({body})");
        }
        format!(
            "problem \"r-dominating-set({r})\"\nparam k\nexists vertexset X\nrequire |X| <= k\nformula: {body}\n"
        )
    }
}

impl ProblemTemplate for RDominatingSet {
    fn name(&self) -> &'static str {
        "r-dominating-set(r)"
    }
    fn summary(&self) -> &'static str {
        "a set of at most k vertices within distance r of every vertex"
    }
    fn matches(&self, requested: &str) -> bool {
        Self::radius(requested).is_ok()
    }
    fn build(&self, requested: &str) -> Result<Problem> {
        parse_problem(&Self::text(Self::radius(requested)?))
    }
    fn source(&self, requested: &str) -> Result<String> {
        let r = if requested == self.name() { 2 } else { Self::radius(requested)? };
        Ok(Self::text(r))
    }
}

macro_rules! fixed {
    ($name:literal, $summary:literal, $text:literal) => {
        Box::new(FixedSpec { name: $name, summary: $summary, text: $text })
    };
}

/// All catalogue templates, in listing order.
pub fn registry() -> &'static [Box<dyn ProblemTemplate>] {
    static REGISTRY: OnceLock<Vec<Box<dyn ProblemTemplate>>> = OnceLock::new();
    REGISTRY.get_or_init(|| {
        vec![
            fixed!(
                "vertex-cover",
                "a set of at most k vertices touching every edge",
                "problem \"vertex-cover\"\n\
                 param k\n\
                 exists vertexset X\n\
                 require |X| <= k\n\
                 formula: !X -> box(X)\n"
            ),
            Box::new(RDominatingSet),
            fixed!(
                "steiner-tree",
                "a connected set of at most k extra vertices containing all terminals T",
                "problem \"steiner-tree\"\n\
                 param k\n\
                 fixed vertexset T\n\
                 exists vertexset X\n\
                 require cc(X) <= 1\n\
                 require |X| <= k + |T|\n\
                 formula: T -> X\n"
            ),
            fixed!(
                "feedback-vertex-set",
                "at most k vertices whose removal leaves a forest",
                "problem \"feedback-vertex-set\"\n\
                 param k\n\
                 exists vertexset X\n\
                 exists vertexset Z\n\
                 exists edgeset Y\n\
                 require cc(Y) + |Y| + |Z| + |X| <= |V|\n\
                 require |X| <= k\n\
                 formula: (Z <-> (!X & box(X))) & (X -> box(!Y)) & (!X -> box(!X -> Y))\n"
            ),
            fixed!(
                "connected-vertex-cover",
                "a connected set of at most k vertices touching every edge",
                "problem \"connected-vertex-cover\"\n\
                 param k\n\
                 exists vertexset X\n\
                 require cc(X) <= 1\n\
                 require |X| <= k\n\
                 formula: !X -> box(X)\n"
            ),
            fixed!(
                "connected-dominating-set",
                "a connected set of at most k vertices adjacent to every other vertex",
                "problem \"connected-dominating-set\"\n\
                 param k\n\
                 exists vertexset X\n\
                 require cc(X) <= 1\n\
                 require |X| <= k\n\
                 formula: !X -> diamond(X)\n"
            ),
            fixed!(
                "connected-feedback-vertex-set",
                "a connected set of at most k vertices whose removal leaves a forest",
                "problem \"connected-feedback-vertex-set\"\n\
                 param k\n\
                 exists vertexset X\n\
                 exists vertexset Z\n\
                 exists edgeset Y\n\
                 require cc(Y) + |Y| + |Z| + |X| <= |V|\n\
                 require cc(X) <= 1\n\
                 require |X| <= k\n\
                 formula: (Z <-> (!X & box(X))) & (X -> box(!Y)) & (!X -> box(!X -> Y))\n"
            ),
            fixed!(
                "connected-odd-cycle-transversal",
                "a connected set of at most k vertices whose removal leaves a bipartite graph",
                "problem \"connected-odd-cycle-transversal\"\n\
                 param k\n\
                 exists vertexset X\n\
                 exists vertexset L\n\
                 exists vertexset R\n\
                 require cc(X) <= 1\n\
                 require |X| <= k\n\
                 formula: (L | R | X) & !(L & R) & !(R & X) & !(X & L) & (L -> box(R | X)) & (R -> box(L | X))\n"
            ),
            fixed!(
                "min-cycle-cover-undirected",
                "at most k vertex-disjoint cycles covering every vertex",
                "problem \"min-cycle-cover-undirected\"\n\
                 param k\n\
                 exists edgeset Y\n\
                 require cc(Y) <= k\n\
                 formula: diamond[{2}](Y)\n"
            ),
            fixed!(
                "min-cycle-cover-directed",
                "at most k vertex-disjoint directed cycles covering every vertex",
                "problem \"min-cycle-cover-directed\"\n\
                 directed\n\
                 param k\n\
                 exists edgeset Y\n\
                 require cc(Y) <= k\n\
                 formula: diamond[{1}](Y & up) & diamond[{1}](Y & down)\n"
            ),
            fixed!(
                "longest-path-undirected",
                "a simple path with at least k edges",
                "problem \"longest-path-undirected\"\n\
                 param k\n\
                 exists vertexset A\n\
                 exists edgeset Y\n\
                 require cc(Y) <= 1\n\
                 require |A| == 2\n\
                 require |Y| >= k\n\
                 formula: (A -> diamond[{1}](Y)) & (!A -> diamond[{0,2}](Y))\n"
            ),
            fixed!(
                "longest-path-directed",
                "a simple directed path with at least k arcs",
                "problem \"longest-path-directed\"\n\
                 directed\n\
                 param k\n\
                 exists vertexset A\n\
                 exists vertexset B\n\
                 exists edgeset Y\n\
                 require cc(Y) <= 1\n\
                 require |A| == 1\n\
                 require |B| == 1\n\
                 require |Y| >= k\n\
                 formula: (A -> (!B & diamond[{1}](Y) & diamond[{1}](Y & down))) \
                 & (B -> (!A & diamond[{1}](Y) & diamond[{1}](Y & up))) \
                 & ((!A & !B) -> (!diamond(Y) | (diamond[{1}](Y & down) & diamond[{1}](Y & up))))\n"
            ),
            fixed!(
                "longest-cycle-undirected",
                "a simple cycle with at least k edges",
                "problem \"longest-cycle-undirected\"\n\
                 param k\n\
                 exists edgeset Y\n\
                 require cc(Y) <= 1\n\
                 require |Y| >= k\n\
                 formula: diamond[{0,2}](Y)\n"
            ),
            fixed!(
                "longest-cycle-directed",
                "a simple directed cycle with at least k arcs",
                "problem \"longest-cycle-directed\"\n\
                 directed\n\
                 param k\n\
                 exists edgeset Y\n\
                 require cc(Y) <= 1\n\
                 require |Y| >= k\n\
                 formula: !diamond(Y) | (diamond[{1}](Y & down) & diamond[{1}](Y & up))\n"
            ),
            fixed!(
                "exact-k-leaf-spanning-tree",
                "a spanning tree with exactly k leaves",
                "problem \"exact-k-leaf-spanning-tree\"\n\
                 param k\n\
                 exists vertexset L\n\
                 exists edgeset T\n\
                 require cc(T) <= 1\n\
                 require |L| == k\n\
                 require |T| == |V| - 1\n\
                 formula: diamond(T) & (L <-> diamond[{1}](T))\n"
            ),
            fixed!(
                "exact-k-leaf-outbranching",
                "a spanning out-tree from the fixed root R with exactly k leaves",
                "problem \"exact-k-leaf-outbranching\"\n\
                 directed\n\
                 param k\n\
                 fixed vertexset R\n\
                 exists vertexset L\n\
                 exists edgeset T\n\
                 require cc(T) <= 1\n\
                 require |L| == k\n\
                 require |T| == |V| - 1\n\
                 require |R| == 1\n\
                 formula: diamond(T) & (R -> !diamond(T & up)) & (!R -> diamond[{1}](T & up)) \
                 & (L <-> !diamond(T & down))\n"
            ),
            fixed!(
                "max-full-degree-spanning-tree",
                "a spanning tree preserving the full degree of at least k vertices",
                "problem \"max-full-degree-spanning-tree\"\n\
                 param k\n\
                 exists vertexset F\n\
                 exists edgeset T\n\
                 require cc(T) <= 1\n\
                 require |F| >= k\n\
                 require |T| == |V| - 1\n\
                 formula: diamond(T) & (F <-> box(T))\n"
            ),
            fixed!(
                "graph-metric-tsp",
                "a closed walk of length at most k through every vertex, edges used once or twice",
                "problem \"graph-metric-tsp\"\n\
                 param k\n\
                 exists edgeset Y\n\
                 exists edgeset Y1\n\
                 exists edgeset Y2\n\
                 require cc(Y) <= 1\n\
                 require |Y1| + 2 * |Y2| <= k\n\
                 formula: box(Y <-> (Y1 | Y2)) & box(!Y1 | !Y2) & diamond(Y) & diamond[even](Y1)\n"
            ),
        ]
    })
}

/// Resolves a catalogue name (or family instantiation) to a specification.
pub fn lookup(name: &str) -> Result<Problem> {
    for template in registry() {
        if template.matches(name) {
            return template.build(name);
        }
    }
    Err(Error::Unsupported(format!(
        "unknown problem `{name}`; available: {}",
        catalogue_names().join(", ")
    )))
}

/// The catalogue listing, in registry order.
pub fn catalogue_names() -> Vec<&'static str> {
    registry().iter().map(|t| t.name()).collect()
}
