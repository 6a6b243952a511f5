//! Extended Newick reading and writing.
//!
//! Hybrid vertices are written as `name#H<k>` (any tag after the last `#`
//! is accepted). Every occurrence of a tag refers to the same vertex; at
//! most one occurrence may list children. Branch lengths may be decimals,
//! scientific notation or `p/q` fractions and are kept exact.

use std::collections::HashMap;

use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::model::{Dag, Edge, ModelError, Network, VertexId, Weight};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NewickError {
    #[error("syntax error at byte {0}: {1}")]
    SyntaxError(usize, String),
    #[error("hybrid tag #{0} has children at more than one occurrence")]
    InconsistentHybridTag(String),
    #[error("hybrid tag #{0} occurs only once")]
    DanglingHybrid(String),
    #[error("hybrid tags induce a directed cycle")]
    Cycle,
    #[error("invalid graph: {0}")]
    Graph(ModelError),
}

#[derive(Debug, Default)]
struct Occ {
    name: Option<String>,
    tag: Option<String>,
    length: Option<Weight>,
    children: Vec<usize>,
    parens: bool,
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    occs: Vec<Occ>,
}

fn is_delim(c: u8) -> bool {
    matches!(c, b'(' | b')' | b'[' | b']' | b'\'' | b':' | b';' | b',') || c.is_ascii_whitespace()
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, NewickError> {
        Err(NewickError::SyntaxError(self.pos, msg.into()))
    }

    fn skip_ws(&mut self) -> Result<(), NewickError> {
        loop {
            match self.src.get(self.pos) {
                Some(c) if c.is_ascii_whitespace() => self.pos += 1,
                Some(b'[') => {
                    let mut depth = 0;
                    loop {
                        match self.src.get(self.pos) {
                            None => return self.err("unterminated comment"),
                            Some(b'[') => depth += 1,
                            Some(b']') => {
                                depth -= 1;
                                if depth == 0 {
                                    self.pos += 1;
                                    break;
                                }
                            }
                            _ => {}
                        }
                        self.pos += 1;
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn peek(&mut self) -> Result<Option<u8>, NewickError> {
        self.skip_ws()?;
        Ok(self.src.get(self.pos).copied())
    }

    fn subtree(&mut self) -> Result<usize, NewickError> {
        let mut occ = Occ::default();
        if self.peek()? == Some(b'(') {
            self.pos += 1;
            occ.parens = true;
            loop {
                let c = self.subtree()?;
                occ.children.push(c);
                match self.peek()? {
                    Some(b',') => self.pos += 1,
                    Some(b')') => {
                        self.pos += 1;
                        break;
                    }
                    _ => return self.err("expected ',' or ')'"),
                }
            }
        }
        if let Some(raw) = self.label()? {
            match raw.rfind('#') {
                Some(i) => {
                    let tag = &raw[i + 1..];
                    if tag.is_empty() {
                        return self.err("empty hybrid tag");
                    }
                    occ.tag = Some(tag.to_string());
                    if i > 0 {
                        occ.name = Some(raw[..i].to_string());
                    }
                }
                None => occ.name = Some(raw),
            }
        }
        if self.peek()? == Some(b':') {
            self.pos += 1;
            occ.length = Some(self.length()?);
            // Extra eNewick fields (support, probability) are ignored.
            while self.peek()? == Some(b':') {
                self.pos += 1;
                self.skip_ws()?;
                self.word();
            }
        }
        self.occs.push(occ);
        Ok(self.occs.len() - 1)
    }

    fn word(&mut self) -> &'a str {
        let start = self.pos;
        while self.pos < self.src.len() && !is_delim(self.src[self.pos]) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("")
    }

    fn label(&mut self) -> Result<Option<String>, NewickError> {
        match self.peek()? {
            Some(b'\'') => {
                self.pos += 1;
                let mut out = Vec::new();
                loop {
                    match self.src.get(self.pos) {
                        None => return self.err("unterminated quoted label"),
                        Some(b'\'') if self.src.get(self.pos + 1) == Some(&b'\'') => {
                            out.push(b'\'');
                            self.pos += 2;
                        }
                        Some(b'\'') => {
                            self.pos += 1;
                            break;
                        }
                        Some(&c) => {
                            out.push(c);
                            self.pos += 1;
                        }
                    }
                }
                // A hybrid tag may follow a quoted name: 'x y'#H1
                let rest = self.word().to_string();
                let mut s = String::from_utf8(out).map_err(|_| NewickError::SyntaxError(self.pos, "invalid UTF-8".into()))?;
                s.push_str(&rest);
                Ok(Some(s))
            }
            Some(c) if !is_delim(c) => {
                Ok(Some(self.word().to_string()))
            }
            _ => Ok(None),
        }
    }

    fn length(&mut self) -> Result<Weight, NewickError> {
        self.skip_ws()?;
        let start = self.pos;
        let w = self.word();
        parse_weight(w).ok_or(NewickError::SyntaxError(start, format!("bad branch length {w:?}")))
    }
}

/// Parses `"3"`, `"-0.25"`, `"1.5e-2"` or `"7/3"` into an exact rational.
pub fn parse_weight(s: &str) -> Option<Weight> {
    if let Some((p, q)) = s.split_once('/') {
        let p: i64 = p.parse().ok()?;
        let q: i64 = q.parse().ok()?;
        return (q != 0).then(|| Weight::new(p, q));
    }
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int}{frac}");
    let mut num: i64 = if digits.is_empty() { 0 } else { digits.parse().ok()? };
    let mut scale = -(frac.len() as i32) + exp;
    let mut den: i64 = 1;
    while scale > 0 {
        num = num.checked_mul(10)?;
        scale -= 1;
    }
    while scale < 0 {
        den = den.checked_mul(10)?;
        scale += 1;
    }
    if neg {
        num = -num;
    }
    Some(Weight::new(num, den))
}

/// Parses one extended Newick network into a [`Dag`] with vertex labels.
/// Vertex ids follow the preorder of first appearance, so the root is 0.
pub fn parse_enewick(text: &str) -> Result<Dag, NewickError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, occs: Vec::new() };
    let root = p.subtree()?;
    if p.peek()? != Some(b';') {
        return p.err("expected ';'");
    }
    p.pos += 1;
    if p.peek()?.is_some() {
        return p.err("trailing input after ';'");
    }
    let occs = p.occs;

    let mut tag_count: HashMap<&str, usize> = HashMap::new();
    let mut tag_defined: HashMap<&str, bool> = HashMap::new();
    for o in &occs {
        if let Some(t) = &o.tag {
            *tag_count.entry(t).or_default() += 1;
            if o.parens {
                let d = tag_defined.entry(t).or_default();
                if *d {
                    return Err(NewickError::InconsistentHybridTag(t.clone()));
                }
                *d = true;
            }
        }
    }
    let mut tags: Vec<_> = tag_count.iter().filter(|(_, &c)| c < 2).map(|(t, _)| t.to_string()).collect();
    tags.sort();
    if let Some(t) = tags.into_iter().next() {
        return Err(NewickError::DanglingHybrid(t));
    }

    // Assign vertex ids in preorder.
    let mut vid_of_occ = vec![usize::MAX; occs.len()];
    let mut vid_of_tag: HashMap<&str, VertexId> = HashMap::new();
    let mut labels: Vec<Option<String>> = Vec::new();
    let mut edges = Vec::new();
    let mut stack = vec![root];
    while let Some(o) = stack.pop() {
        let occ = &occs[o];
        let v = match &occ.tag {
            Some(t) => *vid_of_tag.entry(t).or_insert_with(|| {
                labels.push(None);
                labels.len() - 1
            }),
            None => {
                labels.push(None);
                labels.len() - 1
            }
        };
        vid_of_occ[o] = v;
        if labels[v].is_none() {
            labels[v] = occ.name.clone().filter(|s| !s.is_empty());
        }
        for &c in occ.children.iter().rev() {
            stack.push(c);
        }
    }
    for (oi, occ) in occs.iter().enumerate() {
        let v = vid_of_occ[oi];
        for &c in &occ.children {
            let w = vid_of_occ[c];
            edges.push(Edge::new(v, w, occs[c].length.unwrap_or_else(Weight::zero)));
        }
    }
    // Edge order by preorder of the tail so adjacency follows the text.
    edges.sort_by_key(|e| e.tail);
    let n = labels.len();
    Dag::new(n, edges, labels).map_err(|e| match e {
        ModelError::CyclicInput => NewickError::Cycle,
        other => NewickError::Graph(other),
    })
}

fn quote_label(s: &str) -> String {
    let plain = !s.is_empty() && !s.bytes().any(|c| is_delim(c) || c == b'#');
    if plain {
        s.to_string()
    } else {
        format!("'{}'", s.replace('\'', "''"))
    }
}

/// Renders a weight as an exact decimal when possible, otherwise `p/q`.
pub fn format_weight(w: &Weight) -> String {
    if w.is_integer() {
        return w.to_integer().to_string();
    }
    let mut den = *w.denom();
    let (mut twos, mut fives) = (0, 0);
    while den % 2 == 0 {
        den /= 2;
        twos += 1;
    }
    while den % 5 == 0 {
        den /= 5;
        fives += 1;
    }
    if den != 1 {
        return format!("{}/{}", w.numer(), w.denom());
    }
    let places: u32 = twos.max(fives);
    let scaled = w * Weight::from_integer(10i64.pow(places));
    let Some(s) = scaled.to_integer().to_i128() else {
        return format!("{}/{}", w.numer(), w.denom());
    };
    let neg = s < 0;
    let digits = format!("{:0>width$}", s.unsigned_abs(), width = places as usize + 1);
    let (i, f) = digits.split_at(digits.len() - places as usize);
    format!("{}{}.{}", if neg { "-" } else { "" }, i, f)
}

/// Writes a network in deterministic depth-first order. Reticulations get
/// tags `#H1`, `#H2`, ... in order of first visit; their subtree is written
/// at the first visit.
pub fn serialize_enewick(net: &Network) -> String {
    serialize_dag_from(net.dag(), net.root())
}

pub fn serialize_dag_from(g: &Dag, root: VertexId) -> String {
    let mut tags: HashMap<VertexId, usize> = HashMap::new();
    let mut out = String::new();
    write_vertex(g, root, None, &mut tags, &mut out);
    out.push(';');
    out
}

fn write_vertex(g: &Dag, v: VertexId, via: Option<&Edge>, tags: &mut HashMap<VertexId, usize>, out: &mut String) {
    let hybrid = g.in_degree(v) >= 2;
    let first = if hybrid {
        let k = tags.len() + 1;
        match tags.get(&v) {
            Some(_) => false,
            None => {
                tags.insert(v, k);
                true
            }
        }
    } else {
        true
    };
    if first && g.out_degree(v) > 0 {
        out.push('(');
        for (i, &e) in g.out_edges(v).iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            let ed = g.edge(e);
            write_vertex(g, ed.head, Some(ed), tags, out);
        }
        out.push(')');
    }
    if let Some(l) = g.label(v) {
        out.push_str(&quote_label(l));
    }
    if hybrid {
        out.push_str(&format!("#H{}", tags[&v]));
    }
    if let Some(e) = via {
        out.push(':');
        out.push_str(&format_weight(&e.weight));
    }
}
