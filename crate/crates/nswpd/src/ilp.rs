//! Integer program for node scanwidth, written in LP file format, and a
//! checker that evaluates an assignment against it without a solver.
//!
//! Variables, for vertices u, v, w:
//!
//! * `x_u_v` = 1 iff uv is an edge of Γ;
//! * `y_u_v` = 1 iff v is reachable from u in Γ (`y_v_v` is fixed to 1);
//! * `z_u_v` = 1 iff u is in the bag of v;
//! * `a_u_v_w` = 1 iff `y_u_v` and `x_v_w`;
//! * `s`, the objective, bounds every bag size.
//!
//! Constraint families (δ is 1 iff uw is an edge of G):
//!
//! | name      | form                                   | range            |
//! |-----------|----------------------------------------|------------------|
//! | `gw`      | s - Σ_u z_u_v >= 0                     | every v          |
//! | `reach`   | y_u_v >= 1                             | every edge uv    |
//! | `bagdef`  | z_u_v - y_u_v - y_v_w >= δ - 2         | u != v, every w  |
//! | `treeedges` | Σ x = \|V\| - 1                      | once             |
//! | `treein`  | Σ_u x_u_v <= 1                         | every v          |
//! | `acyc`    | y_u_v + y_v_u <= 1                     | u < v            |
//! | `adef`    | a_u_v_w - y_u_v - x_v_w >= -1          | every u, v, w    |
//! | `a1`      | y_u_w - a_u_v_w >= 0                   | u != w, every v  |
//! | `a2`      | y_u_w - Σ_v a_u_v_w <= 0               | u != w           |
//! | `a3`      | a_u_v_w - y_u_v <= 0                   | every u, v, w    |
//! | `a4`      | a_u_v_w - x_v_w <= 0                   | every u, v, w    |
//!
//! `bagdef` is left out for u = v because `y_v_v = 1` would force v into its
//! own bag, and `a2` for u = w because `y_w_w = 1` has no Γ-path ending in
//! an edge into w.

use std::collections::{HashMap, HashSet};
use std::fmt::Write;

use thiserror::Error;

use crate::extension::TreeExtension;
use crate::model::{Dag, VertexId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IlpError {
    #[error("assignment has no value for variable {0}")]
    MissingVariable(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub name: String,
    pub family: &'static str,
    pub terms: Vec<(usize, i64)>,
    pub sense: Sense,
    pub rhs: i64,
}

#[derive(Debug, Clone)]
pub struct IlpModel {
    pub n: usize,
    pub var_names: Vec<String>,
    pub constraints: Vec<Constraint>,
    /// Variables fixed by the bounds section.
    pub fixed: Vec<(usize, i64)>,
    pub objective: usize,
}

struct Vars {
    n: usize,
}

impl Vars {
    fn x(&self, u: usize, v: usize) -> usize {
        u * self.n + v
    }
    fn y(&self, u: usize, v: usize) -> usize {
        self.n * self.n + u * self.n + v
    }
    fn z(&self, u: usize, v: usize) -> usize {
        2 * self.n * self.n + u * self.n + v
    }
    fn a(&self, u: usize, v: usize, w: usize) -> usize {
        3 * self.n * self.n + (u * self.n + v) * self.n + w
    }
    fn s(&self) -> usize {
        3 * self.n * self.n + self.n * self.n * self.n
    }
}

impl IlpModel {
    pub fn num_vars(&self) -> usize {
        self.var_names.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.var_names.iter().position(|v| v == name)
    }

    pub fn family_count(&self, family: &str) -> usize {
        self.constraints.iter().filter(|c| c.family == family).count()
    }

    /// LP file text. Byte-identical for identical input graphs.
    pub fn to_lp_string(&self) -> String {
        let mut out = String::new();
        out.push_str("\\ node scanwidth of a DAG\nMinimize\n obj: s\nSubject To\n");
        for c in &self.constraints {
            let _ = write!(out, " {}:", c.name);
            for (i, &(var, coef)) in c.terms.iter().enumerate() {
                let sign = if coef < 0 { "-" } else if i == 0 { "" } else { "+" };
                let mag = coef.abs();
                if mag == 1 {
                    let _ = write!(out, " {sign} {}", self.var_names[var]);
                } else {
                    let _ = write!(out, " {sign} {mag} {}", self.var_names[var]);
                }
            }
            let op = match c.sense {
                Sense::Le => "<=",
                Sense::Ge => ">=",
                Sense::Eq => "=",
            };
            let _ = writeln!(out, " {op} {}", c.rhs);
        }
        out.push_str("Bounds\n");
        for &(var, val) in &self.fixed {
            let _ = writeln!(out, " {} = {}", self.var_names[var], val);
        }
        let _ = writeln!(out, " s >= 0");
        out.push_str("Generals\n s\nBinaries\n");
        for (i, name) in self.var_names.iter().enumerate() {
            if i != self.objective {
                let _ = writeln!(out, " {name}");
            }
        }
        out.push_str("End\n");
        out
    }
}

/// Builds the model for `g`.
pub fn emit_ilp(g: &Dag) -> IlpModel {
    let n = g.num_vertices();
    let vs = Vars { n };
    let mut var_names = Vec::with_capacity(3 * n * n + n * n * n + 1);
    for p in ["x", "y", "z"] {
        for u in 0..n {
            for v in 0..n {
                var_names.push(format!("{p}_{u}_{v}"));
            }
        }
    }
    for u in 0..n {
        for v in 0..n {
            for w in 0..n {
                var_names.push(format!("a_{u}_{v}_{w}"));
            }
        }
    }
    var_names.push("s".to_string());
    let edges: HashSet<(VertexId, VertexId)> = g.edges().iter().map(|e| (e.tail, e.head)).collect();
    let mut cs = Vec::new();
    let mut push = |name: String, family: &'static str, terms: Vec<(usize, i64)>, sense, rhs| {
        cs.push(Constraint { name, family, terms, sense, rhs });
    };
    for v in 0..n {
        let mut t = vec![(vs.s(), 1)];
        t.extend((0..n).map(|u| (vs.z(u, v), -1)));
        push(format!("gw_{v}"), "gw", t, Sense::Ge, 0);
    }
    for e in g.edges() {
        push(format!("reach_{}_{}", e.tail, e.head), "reach", vec![(vs.y(e.tail, e.head), 1)], Sense::Ge, 1);
    }
    for u in 0..n {
        for v in 0..n {
            if u == v {
                continue;
            }
            for w in 0..n {
                let delta = i64::from(edges.contains(&(u, w)));
                let terms = vec![(vs.z(u, v), 1), (vs.y(u, v), -1), (vs.y(v, w), -1)];
                push(format!("bagdef_{u}_{v}_{w}"), "bagdef", terms, Sense::Ge, delta - 2);
            }
        }
    }
    let mut t = Vec::new();
    for u in 0..n {
        for v in 0..n {
            t.push((vs.x(u, v), 1));
        }
    }
    push("treeedges".to_string(), "treeedges", t, Sense::Eq, n as i64 - 1);
    for v in 0..n {
        let t = (0..n).map(|u| (vs.x(u, v), 1)).collect();
        push(format!("treein_{v}"), "treein", t, Sense::Le, 1);
    }
    for u in 0..n {
        for v in u + 1..n {
            push(format!("acyc_{u}_{v}"), "acyc", vec![(vs.y(u, v), 1), (vs.y(v, u), 1)], Sense::Le, 1);
        }
    }
    for u in 0..n {
        for v in 0..n {
            for w in 0..n {
                let a = vs.a(u, v, w);
                push(format!("adef_{u}_{v}_{w}"), "adef", vec![(a, 1), (vs.y(u, v), -1), (vs.x(v, w), -1)], Sense::Ge, -1);
            }
        }
    }
    for u in 0..n {
        for v in 0..n {
            for w in 0..n {
                if u != w {
                    push(format!("a1_{u}_{v}_{w}"), "a1", vec![(vs.y(u, w), 1), (vs.a(u, v, w), -1)], Sense::Ge, 0);
                }
            }
        }
    }
    for u in 0..n {
        for w in 0..n {
            if u != w {
                let mut t = vec![(vs.y(u, w), 1)];
                t.extend((0..n).map(|v| (vs.a(u, v, w), -1)));
                push(format!("a2_{u}_{w}"), "a2", t, Sense::Le, 0);
            }
        }
    }
    for u in 0..n {
        for v in 0..n {
            for w in 0..n {
                push(format!("a3_{u}_{v}_{w}"), "a3", vec![(vs.a(u, v, w), 1), (vs.y(u, v), -1)], Sense::Le, 0);
            }
        }
    }
    for u in 0..n {
        for v in 0..n {
            for w in 0..n {
                push(format!("a4_{u}_{v}_{w}"), "a4", vec![(vs.a(u, v, w), 1), (vs.x(v, w), -1)], Sense::Le, 0);
            }
        }
    }
    let mut fixed = Vec::new();
    for v in 0..n {
        fixed.push((vs.x(v, v), 0));
        fixed.push((vs.y(v, v), 1));
    }
    IlpModel { n, var_names, constraints: cs, fixed, objective: vs.s() }
}

/// Values for every model variable, by name.
pub type Assignment = HashMap<String, i64>;

/// The assignment describing `ext`.
pub fn encode_extension(g: &Dag, ext: &TreeExtension) -> Assignment {
    let n = g.num_vertices();
    let mut out = Assignment::new();
    for u in 0..n {
        for v in 0..n {
            let x = ext.parent(v) == Some(u);
            out.insert(format!("x_{u}_{v}"), i64::from(x));
            out.insert(format!("y_{u}_{v}"), i64::from(ext.is_ancestor(u, v)));
            out.insert(format!("z_{u}_{v}"), i64::from(ext.bag(v).contains(u)));
            for w in 0..n {
                let a = ext.is_ancestor(u, v) && ext.parent(w) == Some(v);
                out.insert(format!("a_{u}_{v}_{w}"), i64::from(a));
            }
        }
    }
    out.insert("s".to_string(), ext.width() as i64);
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    pub feasible: bool,
    pub objective: i64,
    /// Names of violated constraints and bounds.
    pub violations: Vec<String>,
}

/// Evaluates every constraint, bound and domain restriction.
pub fn check_assignment(model: &IlpModel, assignment: &Assignment) -> Result<CheckReport, IlpError> {
    let mut vals = Vec::with_capacity(model.num_vars());
    for name in &model.var_names {
        vals.push(*assignment.get(name).ok_or_else(|| IlpError::MissingVariable(name.clone()))?);
    }
    let mut violations = Vec::new();
    for (i, &v) in vals.iter().enumerate() {
        if i != model.objective && !(v == 0 || v == 1) {
            violations.push(format!("binary:{}", model.var_names[i]));
        }
    }
    if vals[model.objective] < 0 {
        violations.push("bound:s".to_string());
    }
    for &(var, val) in &model.fixed {
        if vals[var] != val {
            violations.push(format!("bound:{}", model.var_names[var]));
        }
    }
    for c in &model.constraints {
        let lhs: i64 = c.terms.iter().map(|&(var, coef)| coef * vals[var]).sum();
        let ok = match c.sense {
            Sense::Le => lhs <= c.rhs,
            Sense::Ge => lhs >= c.rhs,
            Sense::Eq => lhs == c.rhs,
        };
        if !ok {
            violations.push(c.name.clone());
        }
    }
    Ok(CheckReport { feasible: violations.is_empty(), objective: vals[model.objective], violations })
}
