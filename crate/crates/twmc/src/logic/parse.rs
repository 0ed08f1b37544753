//! Parser for the textual problem format.
//!
//! ```text
//! problem "connected-vertex-cover"
//! param k
//! exists vertexset X
//! require cc(X) <= 1
//! require |X| <= k
//! formula: !X -> box(X)
//! ```
//!
//! Statements are newline-terminated (newlines inside parentheses or
//! brackets do not count), `#` starts a comment. Counting sets appear in
//! brackets after `diamond`/`box` using the syntax of
//! [`UpSet::parse`](crate::upset::UpSet::parse); a bare `diamond`/`box`
//! counts `>=1`. The arithmetic layer uses `|X|`, `cc(X)`, `|V|`, `|E|`,
//! parameter names, `+ - *`, comparisons, and the keywords `and or not`.

use crate::logic::{ArithExpr, CmpOp, Formula, Problem, SetRef};
use crate::upset::UpSet;
use crate::{Error, Result};

const RESERVED: &[&str] = &[
    "problem", "directed", "param", "fixed", "exists", "vertexset", "edgeset", "require",
    "formula", "diamond", "box", "up", "down", "cc", "and", "or", "not", "true", "false", "V",
    "E",
];

/// Whether `name` is a keyword or otherwise unusable as a declared name.
pub fn is_reserved(name: &str) -> bool {
    RESERVED.contains(&name)
}

/// Declared names are identifiers: a letter or `_`, then letters, digits,
/// `_`.
pub fn is_valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    Str(String),
    /// The raw text between `[` and `]`, handed to the counting-set parser.
    SetLit(String),
    Punct(&'static str),
    Newline,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    depth: usize,
    tokens: Vec<(Tok, usize)>,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let mut lx = Lexer { src: text.as_bytes(), pos: 0, line: 1, depth: 0, tokens: Vec::new() };
    lx.run()?;
    Ok(lx.tokens)
}

impl<'a> Lexer<'a> {
    fn err(&self, reason: impl Into<String>) -> Error {
        Error::ParseProblem { line: self.line, reason: reason.into() }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn push(&mut self, t: Tok) {
        self.tokens.push((t, self.line));
    }

    fn run(&mut self) -> Result<()> {
        while let Some(c) = self.peek() {
            match c {
                b'#' => {
                    while let Some(c) = self.peek() {
                        if c == b'\n' {
                            break;
                        }
                        self.pos += 1;
                    }
                }
                b'\n' => {
                    self.pos += 1;
                    if self.depth == 0 && !matches!(self.tokens.last(), None | Some((Tok::Newline, _)))
                    {
                        self.push(Tok::Newline);
                    }
                    self.line += 1;
                }
                c if c.is_ascii_whitespace() => self.pos += 1,
                b'"' => {
                    self.pos += 1;
                    let start = self.pos;
                    while let Some(c) = self.peek() {
                        if c == b'"' || c == b'\n' {
                            break;
                        }
                        self.pos += 1;
                    }
                    if self.peek() != Some(b'"') {
                        return Err(self.err("unterminated string"));
                    }
                    let s = std::str::from_utf8(&self.src[start..self.pos])
                        .map_err(|_| self.err("string is not UTF-8"))?
                        .to_string();
                    self.pos += 1;
                    self.push(Tok::Str(s));
                }
                b'[' => {
                    self.pos += 1;
                    let start = self.pos;
                    while let Some(c) = self.peek() {
                        if c == b']' {
                            break;
                        }
                        if c == b'\n' {
                            self.line += 1;
                        }
                        self.pos += 1;
                    }
                    if self.peek() != Some(b']') {
                        return Err(self.err("unterminated `[` counting set"));
                    }
                    let s = std::str::from_utf8(&self.src[start..self.pos])
                        .map_err(|_| self.err("counting set is not UTF-8"))?
                        .to_string();
                    self.pos += 1;
                    self.push(Tok::SetLit(s));
                }
                c if c.is_ascii_digit() => {
                    let start = self.pos;
                    while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                        self.pos += 1;
                    }
                    let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                    let v: i64 =
                        text.parse().map_err(|_| self.err(format!("number `{text}` too large")))?;
                    self.push(Tok::Int(v));
                }
                c if c.is_ascii_alphabetic() || c == b'_' => {
                    let start = self.pos;
                    while self
                        .peek()
                        .is_some_and(|c| c.is_ascii_alphanumeric() || c == b'_')
                    {
                        self.pos += 1;
                    }
                    let text =
                        std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string();
                    self.push(Tok::Ident(text));
                }
                _ => {
                    let two = &self.src[self.pos..(self.pos + 2).min(self.src.len())];
                    let two_str = std::str::from_utf8(two).unwrap_or("");
                    let mut took_two = true;
                    match two_str {
                        "->" => self.push(Tok::Punct("->")),
                        "<-" => {
                            if self.src.get(self.pos + 2) == Some(&b'>') {
                                self.pos += 1;
                                self.push(Tok::Punct("<->"));
                            } else {
                                return Err(self.err("`<-` is not an operator (use <-> or <)"));
                            }
                        }
                        "<=" => self.push(Tok::Punct("<=")),
                        ">=" => self.push(Tok::Punct(">=")),
                        "==" => self.push(Tok::Punct("==")),
                        "!=" => self.push(Tok::Punct("!=")),
                        _ => {
                            took_two = false;
                            let p: &'static str = match c {
                                b'(' => "(",
                                b')' => ")",
                                b',' => ",",
                                b':' => ":",
                                b'|' => "|",
                                b'!' => "!",
                                b'&' => "&",
                                b'+' => "+",
                                b'-' => "-",
                                b'*' => "*",
                                b'<' => "<",
                                b'>' => ">",
                                b'=' => {
                                    return Err(self.err("single `=` (use == for comparison)"))
                                }
                                other => {
                                    return Err(self.err(format!(
                                        "unexpected character `{}`",
                                        other as char
                                    )))
                                }
                            };
                            if p == "(" {
                                self.depth += 1;
                            }
                            if p == ")" {
                                self.depth = self.depth.saturating_sub(1);
                            }
                            self.push(Tok::Punct(p));
                        }
                    }
                    self.pos += if took_two { 2 } else { 1 };
                }
            }
        }
        if !matches!(self.tokens.last(), None | Some((Tok::Newline, _))) {
            self.push(Tok::Newline);
        }
        Ok(())
    }
}

struct Parser {
    tokens: Vec<(Tok, usize)>,
    pos: usize,
    problem: Problem,
}

/// Parses and validates a problem specification.
pub fn parse_problem(text: &str) -> Result<Problem> {
    let tokens = lex(text)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        problem: Problem {
            name: String::new(),
            directed: false,
            params: Vec::new(),
            fixed_vertex_sets: Vec::new(),
            fixed_edge_sets: Vec::new(),
            vertex_sets: Vec::new(),
            edge_sets: Vec::new(),
            requires: Vec::new(),
            matrix: Formula::Down, // replaced; a formula statement is mandatory
        },
    };
    let problem = parser.run()?;
    problem.check()?;
    Ok(problem)
}

impl Parser {
    fn line(&self) -> usize {
        self.tokens.get(self.pos).or(self.tokens.last()).map_or(0, |t| t.1)
    }

    fn err(&self, reason: impl Into<String>) -> Error {
        Error::ParseProblem { line: self.line(), reason: reason.into() }
    }

    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.0)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).map(|t| t.0.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Punct(q)) if *q == p) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, p: &'static str) -> Result<()> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{p}`")))
        }
    }

    fn eat_newlines(&mut self) {
        while self.peek() == Some(&Tok::Newline) {
            self.pos += 1;
        }
    }

    fn expect_newline(&mut self) -> Result<()> {
        match self.next() {
            Some(Tok::Newline) | None => Ok(()),
            _ => Err(self.err("expected end of statement")),
        }
    }

    fn ident(&mut self) -> Result<String> {
        match self.next() {
            Some(Tok::Ident(s)) => Ok(s),
            _ => Err(self.err("expected a name")),
        }
    }

    fn declare(&mut self, name: String) -> Result<String> {
        if is_reserved(&name) {
            return Err(self.err(format!("`{name}` is reserved")));
        }
        let all = self
            .problem
            .params
            .iter()
            .chain(&self.problem.fixed_vertex_sets)
            .chain(&self.problem.fixed_edge_sets)
            .chain(&self.problem.vertex_sets)
            .chain(&self.problem.edge_sets);
        if all.into_iter().any(|n| *n == name) {
            return Err(self.err(format!("`{name}` declared twice")));
        }
        Ok(name)
    }

    fn run(&mut self) -> Result<Problem> {
        self.eat_newlines();
        match self.next() {
            Some(Tok::Ident(kw)) if kw == "problem" => {}
            _ => return Err(self.err("a specification starts with `problem \"name\"`")),
        }
        match self.next() {
            Some(Tok::Str(name)) if !name.is_empty() => self.problem.name = name,
            _ => return Err(self.err("expected a quoted problem name")),
        }
        self.expect_newline()?;

        let mut saw_formula = false;
        loop {
            self.eat_newlines();
            let Some(tok) = self.peek().cloned() else { break };
            let Tok::Ident(kw) = tok else {
                return Err(self.err("expected a statement keyword"));
            };
            self.pos += 1;
            match kw.as_str() {
                "directed" => {
                    if self.problem.directed {
                        return Err(self.err("`directed` given twice"));
                    }
                    self.problem.directed = true;
                    self.expect_newline()?;
                }
                "param" => {
                    let name = self.ident()?;
                    let name = self.declare(name)?;
                    self.problem.params.push(name);
                    self.expect_newline()?;
                }
                "fixed" | "exists" => {
                    let kind = self.ident()?;
                    let name = self.ident()?;
                    let name = self.declare(name)?;
                    match (kw.as_str(), kind.as_str()) {
                        ("fixed", "vertexset") => self.problem.fixed_vertex_sets.push(name),
                        ("fixed", "edgeset") => self.problem.fixed_edge_sets.push(name),
                        ("exists", "vertexset") => self.problem.vertex_sets.push(name),
                        ("exists", "edgeset") => self.problem.edge_sets.push(name),
                        _ => return Err(self.err("expected `vertexset` or `edgeset`")),
                    }
                    self.expect_newline()?;
                }
                "require" => {
                    let e = self.arith_expr()?;
                    self.problem.requires.push(e);
                    self.expect_newline()?;
                }
                "formula" => {
                    if saw_formula {
                        return Err(self.err("`formula` given twice"));
                    }
                    self.expect_punct(":")?;
                    self.problem.matrix = self.formula_iff()?;
                    saw_formula = true;
                    self.expect_newline()?;
                }
                other => return Err(self.err(format!("unknown statement `{other}`"))),
            }
        }
        if !saw_formula {
            return Err(self.err("missing `formula:` statement"));
        }
        Ok(self.problem.clone())
    }

    // ----- modal formulas ------------------------------------------------

    fn formula_iff(&mut self) -> Result<Formula> {
        let mut lhs = self.formula_implies()?;
        while self.eat_punct("<->") {
            let rhs = self.formula_implies()?;
            lhs = Formula::Iff(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn formula_implies(&mut self) -> Result<Formula> {
        let lhs = self.formula_or()?;
        if self.eat_punct("->") {
            let rhs = self.formula_implies()?;
            return Ok(Formula::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn formula_or(&mut self) -> Result<Formula> {
        let mut lhs = self.formula_and()?;
        while self.eat_punct("|") {
            let rhs = self.formula_and()?;
            lhs = Formula::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn formula_and(&mut self) -> Result<Formula> {
        let mut lhs = self.formula_unary()?;
        while self.eat_punct("&") {
            let rhs = self.formula_unary()?;
            lhs = Formula::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn formula_unary(&mut self) -> Result<Formula> {
        if self.eat_punct("!") {
            return Ok(Formula::Not(Box::new(self.formula_unary()?)));
        }
        if self.eat_punct("(") {
            let inner = self.formula_iff()?;
            self.expect_punct(")")?;
            return Ok(inner);
        }
        match self.next() {
            Some(Tok::Ident(word)) => match word.as_str() {
                "diamond" | "box" => {
                    let set = match self.peek() {
                        Some(Tok::SetLit(_)) => {
                            let Some(Tok::SetLit(text)) = self.next() else { unreachable!() };
                            UpSet::parse(&text).map_err(|e| self.err(e.to_string()))?
                        }
                        _ => UpSet::positive(),
                    };
                    self.expect_punct("(")?;
                    let body = self.formula_iff()?;
                    self.expect_punct(")")?;
                    Ok(if word == "diamond" {
                        Formula::Diamond(set, Box::new(body))
                    } else {
                        Formula::Box(set, Box::new(body))
                    })
                }
                "up" => Ok(Formula::Up),
                "down" => Ok(Formula::Down),
                name => {
                    let (r, vertex) = self
                        .resolve_set(name)
                        .ok_or_else(|| self.err(format!("unknown set `{name}`")))?;
                    Ok(if vertex { Formula::VertexSet(r) } else { Formula::EdgeSet(r) })
                }
            },
            _ => Err(self.err("expected a formula")),
        }
    }

    /// Looks a name up in the four set namespaces; `true` means vertex set.
    fn resolve_set(&self, name: &str) -> Option<(SetRef, bool)> {
        let p = &self.problem;
        if let Some(i) = p.vertex_sets.iter().position(|n| n == name) {
            return Some((SetRef::Quantified(i), true));
        }
        if let Some(j) = p.edge_sets.iter().position(|n| n == name) {
            return Some((SetRef::Quantified(j), false));
        }
        if let Some(i) = p.fixed_vertex_sets.iter().position(|n| n == name) {
            return Some((SetRef::Fixed(i), true));
        }
        if let Some(j) = p.fixed_edge_sets.iter().position(|n| n == name) {
            return Some((SetRef::Fixed(j), false));
        }
        None
    }

    // ----- arithmetic ----------------------------------------------------

    fn arith_expr(&mut self) -> Result<ArithExpr> {
        self.arith_or()
    }

    fn arith_or(&mut self) -> Result<ArithExpr> {
        let mut lhs = self.arith_and()?;
        while matches!(self.peek(), Some(Tok::Ident(w)) if w == "or") {
            self.pos += 1;
            let rhs = self.arith_and()?;
            lhs = ArithExpr::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn arith_and(&mut self) -> Result<ArithExpr> {
        let mut lhs = self.arith_not()?;
        while matches!(self.peek(), Some(Tok::Ident(w)) if w == "and") {
            self.pos += 1;
            let rhs = self.arith_not()?;
            lhs = ArithExpr::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn arith_not(&mut self) -> Result<ArithExpr> {
        if matches!(self.peek(), Some(Tok::Ident(w)) if w == "not") {
            self.pos += 1;
            return Ok(ArithExpr::Not(Box::new(self.arith_not()?)));
        }
        self.arith_cmp()
    }

    fn arith_cmp(&mut self) -> Result<ArithExpr> {
        let lhs = self.arith_sum()?;
        let op = match self.peek() {
            Some(Tok::Punct("<=")) => CmpOp::Le,
            Some(Tok::Punct("<")) => CmpOp::Lt,
            Some(Tok::Punct(">=")) => CmpOp::Ge,
            Some(Tok::Punct(">")) => CmpOp::Gt,
            Some(Tok::Punct("==")) => CmpOp::Eq,
            Some(Tok::Punct("!=")) => CmpOp::Ne,
            _ => return Ok(lhs),
        };
        self.pos += 1;
        let rhs = self.arith_sum()?;
        Ok(ArithExpr::Cmp(op, Box::new(lhs), Box::new(rhs)))
    }

    fn arith_sum(&mut self) -> Result<ArithExpr> {
        let mut lhs = self.arith_product()?;
        loop {
            if self.eat_punct("+") {
                let rhs = self.arith_product()?;
                lhs = ArithExpr::Add(Box::new(lhs), Box::new(rhs));
            } else if self.eat_punct("-") {
                let rhs = self.arith_product()?;
                lhs = ArithExpr::Sub(Box::new(lhs), Box::new(rhs));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn arith_product(&mut self) -> Result<ArithExpr> {
        let mut lhs = self.arith_atom()?;
        while self.eat_punct("*") {
            let rhs = self.arith_atom()?;
            lhs = ArithExpr::Mul(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn arith_atom(&mut self) -> Result<ArithExpr> {
        if self.eat_punct("(") {
            let inner = self.arith_expr()?;
            self.expect_punct(")")?;
            return Ok(inner);
        }
        if self.eat_punct("-") {
            let inner = self.arith_atom()?;
            return Ok(ArithExpr::Sub(Box::new(ArithExpr::Num(0)), Box::new(inner)));
        }
        if self.eat_punct("|") {
            let name = self.ident()?;
            self.expect_punct("|")?;
            if name == "V" {
                return Ok(ArithExpr::NumVertices);
            }
            if name == "E" {
                return Ok(ArithExpr::NumEdges);
            }
            let (r, vertex) = self
                .resolve_set(&name)
                .ok_or_else(|| self.err(format!("unknown set `{name}` in |..|")))?;
            return Ok(if vertex { ArithExpr::CardV(r) } else { ArithExpr::CardE(r) });
        }
        match self.next() {
            Some(Tok::Int(v)) => Ok(ArithExpr::Num(v)),
            Some(Tok::Ident(word)) if word == "cc" => {
                self.expect_punct("(")?;
                let name = self.ident()?;
                self.expect_punct(")")?;
                let (r, vertex) = self
                    .resolve_set(&name)
                    .ok_or_else(|| self.err(format!("unknown set `{name}` in cc(..)")))?;
                Ok(if vertex { ArithExpr::CcV(r) } else { ArithExpr::CcE(r) })
            }
            Some(Tok::Ident(name)) => {
                if let Some(i) = self.problem.params.iter().position(|n| *n == name) {
                    return Ok(ArithExpr::Param(i));
                }
                if self.resolve_set(&name).is_some() {
                    return Err(self.err(format!(
                        "set `{name}` used as a number (write |{name}| or cc({name}))"
                    )));
                }
                Err(self.err(format!("unknown name `{name}`")))
            }
            _ => Err(self.err("expected an arithmetic expression")),
        }
    }
}
