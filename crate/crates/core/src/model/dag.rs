//! Expected-flow models on a directed acyclic graph.
//!
//! Text format:
//!
//! ```text
//! nodes: home search cart done
//! sink: done
//! start: home s_home          # start-count variable for a node
//! edge: home search p_hs      # from, to, edge-probability variable
//! edge: search cart p_sc
//! edge: cart done p_cd
//! ```
//!
//! The compiled function is `sum_i s_i sum_{P: i -> sink} prod_{e in P} p_e`.

use std::collections::{HashMap, HashSet};

use super::format::{is_identifier, ModelSpec};
use crate::characteristic::CharacteristicFunction;
use crate::error::{AttribError, Result};

pub const DEFAULT_PATH_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DagEdge {
    pub from: usize,
    pub to: usize,
    pub var: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DagModel {
    pub nodes: Vec<String>,
    pub sink: usize,
    /// `(node, start variable)`.
    pub starts: Vec<(usize, String)>,
    pub edges: Vec<DagEdge>,
}

impl DagModel {
    pub fn parse(text: &str) -> Result<Self> {
        let mut nodes: Vec<String> = Vec::new();
        let mut sink: Option<(usize, String)> = None;
        let mut starts: Vec<(usize, String, String)> = Vec::new();
        let mut edges: Vec<(usize, String, String, String)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let err = |msg: String| AttribError::Parse { line: line_no, msg };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, rest) = line
                .split_once(':')
                .ok_or_else(|| err(format!("expected `key: value`, got `{line}`")))?;
            let f: Vec<&str> = rest.split_whitespace().collect();
            match (key.trim(), f.as_slice()) {
                ("nodes", list) => nodes.extend(list.iter().map(|s| s.to_string())),
                ("sink", [t]) => sink = Some((line_no, t.to_string())),
                ("start", [node, var]) => starts.push((line_no, node.to_string(), var.to_string())),
                ("edge", [from, to, var]) => {
                    edges.push((line_no, from.to_string(), to.to_string(), var.to_string()))
                }
                ("sink" | "start" | "edge", _) => {
                    return Err(err(format!("wrong number of fields for `{}`", key.trim())))
                }
                (other, _) => return Err(err(format!("unknown key `{other}`"))),
            }
        }
        let lookup: HashMap<&str, usize> = nodes.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        if lookup.len() != nodes.len() {
            return Err(AttribError::Input("duplicate node name".into()));
        }
        let node = |line: usize, name: &str| {
            lookup.get(name).copied().ok_or_else(|| AttribError::Parse {
                line,
                msg: format!("undeclared node `{name}`"),
            })
        };
        let (sink_line, sink_name) = sink.ok_or_else(|| AttribError::Input("missing `sink:` line".into()))?;
        let sink = node(sink_line, &sink_name)?;
        let starts = starts
            .into_iter()
            .map(|(l, n, v)| Ok((node(l, &n)?, v)))
            .collect::<Result<Vec<_>>>()?;
        let edges = edges
            .into_iter()
            .map(|(l, a, b, v)| {
                Ok(DagEdge {
                    from: node(l, &a)?,
                    to: node(l, &b)?,
                    var: v,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(DagModel {
            nodes,
            sink,
            starts,
            edges,
        })
    }

    /// Variable names: start variables first, then edge variables, in declaration order.
    pub fn variable_names(&self) -> Vec<String> {
        self.starts
            .iter()
            .map(|(_, v)| v.clone())
            .chain(self.edges.iter().map(|e| e.var.clone()))
            .collect()
    }

    fn validate(&self) -> Result<()> {
        let n = self.nodes.len();
        if self.sink >= n {
            return Err(AttribError::IndexOutOfRange { index: self.sink, n });
        }
        let mut seen = HashSet::new();
        for v in self.variable_names() {
            if !is_identifier(&v) {
                return Err(AttribError::Input(format!("invalid variable name `{v}`")));
            }
            if !seen.insert(v.clone()) {
                return Err(AttribError::Input(format!("variable `{v}` is used more than once")));
            }
        }
        for e in &self.edges {
            if e.from >= n || e.to >= n {
                return Err(AttribError::IndexOutOfRange {
                    index: e.from.max(e.to),
                    n,
                });
            }
        }
        let mut start_nodes = HashSet::new();
        for &(v, _) in &self.starts {
            if v >= n {
                return Err(AttribError::IndexOutOfRange { index: v, n });
            }
            if !start_nodes.insert(v) {
                return Err(AttribError::Input(format!(
                    "node `{}` has more than one start variable",
                    self.nodes[v]
                )));
            }
        }
        Ok(())
    }

    /// Kahn's algorithm; on failure names a node that lies on a cycle.
    fn topological_order(&self) -> Result<Vec<usize>> {
        let n = self.nodes.len();
        let mut indeg = vec![0usize; n];
        for e in &self.edges {
            indeg[e.to] += 1;
        }
        let mut stack: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = stack.pop() {
            order.push(v);
            for e in self.edges.iter().filter(|e| e.from == v) {
                indeg[e.to] -= 1;
                if indeg[e.to] == 0 {
                    stack.push(e.to);
                }
            }
        }
        if order.len() < n {
            let stuck = (0..n).find(|&v| indeg[v] > 0).unwrap_or(0);
            return Err(AttribError::Cycle(self.nodes[stuck].clone()));
        }
        Ok(order)
    }

    /// Compiles to a named model, refusing more than `cap` (start, path) pairs.
    pub fn compile_with_cap(&self, cap: usize) -> Result<ModelSpec> {
        self.validate()?;
        let order = self.topological_order()?;
        let n = self.nodes.len();
        let mut out_edges: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (k, e) in self.edges.iter().enumerate() {
            if e.from == self.sink {
                return Err(AttribError::Input(format!(
                    "sink `{}` has an outgoing edge",
                    self.nodes[self.sink]
                )));
            }
            out_edges[e.from].push(k);
        }

        // Number of paths from each node to the sink, saturating.
        let mut count = vec![0u128; n];
        count[self.sink] = 1;
        for &v in order.iter().rev() {
            if v != self.sink {
                count[v] = out_edges[v]
                    .iter()
                    .fold(0u128, |acc, &k| acc.saturating_add(count[self.edges[k].to]));
            }
        }
        let mut total: u128 = 0;
        for &(v, _) in &self.starts {
            if count[v] == 0 {
                return Err(AttribError::Input(format!(
                    "sink `{}` is unreachable from start node `{}`",
                    self.nodes[self.sink], self.nodes[v]
                )));
            }
            total = total.saturating_add(count[v]);
        }
        if total > cap as u128 {
            return Err(AttribError::PathCap(cap));
        }

        let n_starts = self.starts.len();
        let mut f = CharacteristicFunction::zero(n_starts + self.edges.len());
        let mut stack: Vec<usize> = Vec::new();
        for (si, &(v, _)) in self.starts.iter().enumerate() {
            self.emit_paths(v, si, n_starts, &out_edges, &mut stack, &mut f)?;
        }
        ModelSpec::from_function(self.variable_names(), f)
    }

    fn emit_paths(
        &self,
        v: usize,
        start_var: usize,
        offset: usize,
        out_edges: &[Vec<usize>],
        stack: &mut Vec<usize>,
        f: &mut CharacteristicFunction,
    ) -> Result<()> {
        if v == self.sink {
            let mut vars = Vec::with_capacity(stack.len() + 1);
            vars.push(start_var);
            vars.extend(stack.iter().map(|&k| offset + k));
            return f.add_monomial(vars, 1.0);
        }
        for &k in &out_edges[v] {
            stack.push(k);
            self.emit_paths(self.edges[k].to, start_var, offset, out_edges, stack, f)?;
            stack.pop();
        }
        Ok(())
    }

    pub fn compile(&self) -> Result<ModelSpec> {
        self.compile_with_cap(DEFAULT_PATH_CAP)
    }
}

/// Compiles a DAG model with the default path cap.
pub fn compile_dag(d: &DagModel) -> Result<CharacteristicFunction> {
    Ok(d.compile()?.function().clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coef(m: &ModelSpec, names: &[&str]) -> f64 {
        let mut idx: Vec<usize> = names.iter().map(|n| m.index_of(n).unwrap()).collect();
        idx.sort();
        m.function().multilinear_part().coefficient(&idx)
    }

    #[test]
    fn single_edge() {
        let d = DagModel::parse("nodes: a t\nsink: t\nstart: a s_a\nedge: a t p\n").unwrap();
        let m = d.compile().unwrap();
        assert_eq!(m.function().multilinear_part().len(), 1);
        assert_eq!(coef(&m, &["s_a", "p"]), 1.0);
    }

    #[test]
    fn three_paths() {
        let text = "nodes: a b t\nsink: t\nstart: a s_a\nstart: b s_b\n\
                    edge: a b p_ab\nedge: b t p_bt\nedge: a t p_at\n";
        let m = DagModel::parse(text).unwrap().compile().unwrap();
        assert_eq!(m.function().multilinear_part().len(), 3);
        assert_eq!(coef(&m, &["s_a", "p_ab", "p_bt"]), 1.0);
        assert_eq!(coef(&m, &["s_a", "p_at"]), 1.0);
        assert_eq!(coef(&m, &["s_b", "p_bt"]), 1.0);
    }

    #[test]
    fn cycle_is_rejected() {
        let text = "nodes: a b t\nsink: t\nstart: a s\nedge: a b p\nedge: b a q\nedge: b t r\n";
        assert!(matches!(
            DagModel::parse(text).unwrap().compile(),
            Err(AttribError::Cycle(_))
        ));
    }

    #[test]
    fn other_errors() {
        let unreachable = "nodes: a b t\nsink: t\nstart: a s\nedge: b t p\n";
        assert!(DagModel::parse(unreachable).unwrap().compile().is_err());
        let dup = "nodes: a t\nsink: t\nstart: a p\nedge: a t p\n";
        assert!(DagModel::parse(dup).unwrap().compile().is_err());
        assert!(DagModel::parse("nodes: a\nstart: a s\n").is_err());
        assert!(DagModel::parse("nodes: a t\nsink: t\nedge: a x p\n").is_err());

        // Diamond chain: 2^k paths.
        let mut text = String::from("nodes: n0");
        for i in 1..=12 {
            text.push_str(&format!(" n{i}"));
        }
        text.push_str("\nsink: n12\nstart: n0 s\n");
        for i in 0..12 {
            text.push_str(&format!("edge: n{i} n{} u{i}\nedge: n{i} n{} d{i}\n", i + 1, i + 1));
        }
        let d = DagModel::parse(&text).unwrap();
        assert!(matches!(d.compile_with_cap(1000), Err(AttribError::PathCap(1000))));
        assert_eq!(d.compile().unwrap().function().multilinear_part().len(), 4096);
    }
}
