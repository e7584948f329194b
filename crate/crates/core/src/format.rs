//! Line-oriented text formats for shape graphs and typed graphs.
//!
//! Schema (`.sg`):
//!
//! ```text
//! # comment
//! @order str, E, U, B
//! B -> d::str, s::U, v::E?, r::B*
//! str ->
//! ```
//!
//! A missing multiplicity means `⟨1⟩`, absent triples are `⟨0⟩`. The optional
//! `@order` header lists a base order on types.
//!
//! Typed graph (`.tg`):
//!
//! ```text
//! node b1 : B
//! node e1 : U, E
//! edge b1 v e1
//! ```

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{Graph, GraphError, TypeSet, TypedGraph, Typing};
use crate::interval::Multiplicity;
use crate::shape::ShapeGraph;
use crate::symbol::{Label, NodeId, TypeName};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

fn err(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        column,
        message: message.into(),
    }
}

/// A parsed schema file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaDocument {
    pub shape: ShapeGraph,
    pub order: Option<Vec<TypeName>>,
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '\'' | '.')
}

pub fn is_identifier(s: &str) -> bool {
    !s.is_empty() && s.chars().all(is_ident_char)
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn column(&self) -> usize {
        self.text[..self.pos].chars().count() + 1
    }

    fn skip_ws(&mut self) {
        let rest = &self.text[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos == self.text.len()
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.text[self.pos..].starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<(), ParseError> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(err(self.line, self.column(), format!("expected `{token}`")))
        }
    }

    fn ident(&mut self, what: &str) -> Result<&'a str, ParseError> {
        self.skip_ws();
        let rest = &self.text[self.pos..];
        let len = rest.find(|c: char| !is_ident_char(c)).unwrap_or(rest.len());
        if len == 0 {
            return Err(err(self.line, self.column(), format!("expected {what}")));
        }
        self.pos += len;
        Ok(&rest[..len])
    }
}

fn strip_comment(line: &str) -> &str {
    line.find('#').map_or(line, |i| &line[..i])
}

pub fn parse_schema(text: &str) -> Result<SchemaDocument, ParseError> {
    let mut shape = ShapeGraph::new();
    let mut order = None;
    let mut seen: BTreeSet<(TypeName, Label, TypeName)> = BTreeSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = strip_comment(raw);
        let mut cur = Cursor {
            text: body,
            pos: 0,
            line,
        };
        if cur.at_end() {
            continue;
        }
        if cur.eat("@order") {
            if order.is_some() {
                return Err(err(line, 1, "duplicate @order header"));
            }
            let mut types = vec![TypeName::new(cur.ident("type name")?)];
            while cur.eat(",") {
                types.push(TypeName::new(cur.ident("type name")?));
            }
            if !cur.at_end() {
                return Err(err(line, cur.column(), "unexpected trailing input"));
            }
            order = Some(types);
            continue;
        }
        let source = TypeName::new(cur.ident("type name")?);
        cur.expect("->")?;
        shape.add_type(source.clone());
        if cur.at_end() {
            continue;
        }
        loop {
            let col = cur.column();
            let label = Label::new(cur.ident("edge label")?);
            cur.expect("::")?;
            let target = TypeName::new(cur.ident("type name")?);
            cur.skip_ws();
            let mult = match cur.text[cur.pos..].chars().next() {
                Some('?') => Multiplicity::Opt,
                Some('*') => Multiplicity::Star,
                Some('+') => Multiplicity::Plus,
                Some(',') | None => Multiplicity::One,
                Some(c) => {
                    return Err(err(
                        line,
                        cur.column(),
                        format!("unknown multiplicity `{c}`"),
                    ))
                }
            };
            if mult != Multiplicity::One {
                cur.pos += 1;
            }
            let key = (source.clone(), label.clone(), target.clone());
            if !seen.insert(key) {
                return Err(err(
                    line,
                    col,
                    format!("duplicate atom `{label}::{target}` for `{source}`"),
                ));
            }
            shape.set(&source, &label, &target, mult);
            if cur.at_end() {
                break;
            }
            cur.expect(",")?;
        }
    }
    Ok(SchemaDocument { shape, order })
}

/// One definition per type, sorted, atoms sorted by label then target.
pub fn print_schema(shape: &ShapeGraph) -> String {
    print_schema_with_order(shape, None)
}

pub fn print_schema_with_order(shape: &ShapeGraph, order: Option<&[TypeName]>) -> String {
    let mut out = String::new();
    if let Some(order) = order {
        let names: Vec<&str> = order.iter().map(TypeName::as_str).collect();
        let _ = writeln!(out, "@order {}", names.join(", "));
    }
    for ty in shape.types() {
        let atoms: Vec<String> = shape
            .definition(ty)
            .into_iter()
            .flat_map(|(a, targets)| {
                targets
                    .into_iter()
                    .map(move |(s, m)| format!("{a}::{s}{}", m.suffix()))
            })
            .collect();
        if atoms.is_empty() {
            let _ = writeln!(out, "{ty} ->");
        } else {
            let _ = writeln!(out, "{ty} -> {}", atoms.join(", "));
        }
    }
    out
}

pub fn parse_typed_graph(text: &str) -> Result<TypedGraph, ParseError> {
    let mut graph = Graph::new();
    let mut typing = Typing::new();
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = strip_comment(raw).trim();
        if body.is_empty() {
            continue;
        }
        let (keyword, rest) = body.split_once(char::is_whitespace).unwrap_or((body, ""));
        match keyword {
            "node" => {
                let rest = rest.trim_start();
                let (id, types) = rest
                    .split_once(char::is_whitespace)
                    .map(|(id, tail)| (id, tail.trim_start()))
                    .unwrap_or((rest, ""));
                let (id, types) = match id.strip_suffix(':') {
                    Some(id) if !id.is_empty() => (id, types),
                    _ => match types.strip_prefix(':') {
                        Some(t) => (id, t),
                        None => return Err(err(line, 1, "expected `node <id> : <Type>, ...`")),
                    },
                };
                if id.is_empty() {
                    return Err(err(line, 1, "missing node identifier"));
                }
                let mut set = TypeSet::new();
                for part in types.split(',') {
                    let name = part.trim();
                    if name.is_empty() {
                        return Err(err(
                            line,
                            1,
                            format!("empty type list or empty type name for node `{id}`"),
                        ));
                    }
                    if !is_identifier(name) {
                        return Err(err(line, 1, format!("invalid type name `{name}`")));
                    }
                    set.insert(TypeName::new(name));
                }
                let node = NodeId::new(id);
                if !graph.add_node(node.clone()) {
                    return Err(err(line, 1, format!("duplicate node `{id}`")));
                }
                typing.set(node, set);
            }
            "edge" => {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                let [s, a, t] = parts[..] else {
                    return Err(err(line, 1, "expected `edge <id> <label> <id>`"));
                };
                if !is_identifier(a) {
                    return Err(err(line, 1, format!("invalid edge label `{a}`")));
                }
                edges.push((line, NodeId::new(s), Label::new(a), NodeId::new(t)));
            }
            other => return Err(err(line, 1, format!("unknown directive `{other}`"))),
        }
    }
    for (line, s, a, t) in edges {
        graph.add_edge(&s, a, &t).map_err(|e| match e {
            GraphError::UnknownNode(n) => {
                err(line, 1, format!("edge endpoint `{n}` has no node line"))
            }
            other => err(line, 1, other.to_string()),
        })?;
    }
    Ok(TypedGraph::new(graph, typing).expect("typing built from node lines"))
}

/// Node lines first, then edge lines, both sorted.
pub fn print_typed_graph(g: &TypedGraph) -> String {
    let mut out = String::new();
    for n in g.graph.nodes() {
        let types: Vec<&str> = g.typing.types_of(n).iter().map(TypeName::as_str).collect();
        let _ = writeln!(out, "node {n} : {}", types.join(", "));
    }
    for (s, a, t) in g.graph.edges() {
        let _ = writeln!(out, "edge {s} {a} {t}");
    }
    out
}
