//! Hasse diagrams of the refinement and dominance orders.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::{dominance_covers, enumerate_partitions, Partition};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrderKind {
    Refinement,
    Dominance,
}

impl FromStr for OrderKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "refinement" | "ref" => Ok(Self::Refinement),
            "dominance" | "dom" | "majorization" => Ok(Self::Dominance),
            other => Err(Error::Argument(format!("unknown order {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphFormat {
    Dot,
    Json,
}

impl FromStr for GraphFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dot" => Ok(Self::Dot),
            "json" => Ok(Self::Json),
            other => Err(Error::Format(other.to_string())),
        }
    }
}

/// Node record of the JSON export.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HasseNode {
    pub parts: Vec<u32>,
    pub h: u32,
    pub w: u32,
    pub r: i64,
    pub s2: u64,
}

impl HasseNode {
    fn of(p: &Partition) -> Self {
        Self {
            parts: p.parts().to_vec(),
            h: p.height(),
            w: p.width(),
            r: p.rank(),
            s2: p.squareability(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct GraphDoc {
    order: OrderKind,
    nodes: Vec<HasseNode>,
    edges: Vec<[usize; 2]>,
}

/// Covering graph of one order on `P_I(n)`. Edges point from the lower
/// element (finer or dominated) to the upper one and index into `nodes`.
#[derive(Clone, Debug, PartialEq)]
pub struct HasseGraph {
    pub order: OrderKind,
    pub nodes: Vec<Partition>,
    pub edges: Vec<(usize, usize)>,
}

impl HasseGraph {
    pub fn build(n: u32, order: OrderKind) -> Result<Self> {
        let nodes = enumerate_partitions(n)?;
        let index: HashMap<&Partition, usize> =
            nodes.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let mut edges = Vec::new();
        for (i, p) in nodes.iter().enumerate() {
            let ups = match order {
                OrderKind::Refinement => p.refinement_upper_covers(),
                OrderKind::Dominance => dominance_covers(p),
            };
            for q in ups {
                edges.push((i, index[&q]));
            }
        }
        edges.sort_unstable();
        Ok(Self { order, nodes, edges })
    }

    pub fn n(&self) -> u32 {
        self.nodes.first().map_or(0, Partition::n)
    }

    pub fn render(&self, format: GraphFormat) -> Result<String> {
        match format {
            GraphFormat::Dot => Ok(self.to_dot()),
            GraphFormat::Json => self.to_json(),
        }
    }

    pub fn to_dot(&self) -> String {
        let name = match self.order {
            OrderKind::Refinement => "refinement",
            OrderKind::Dominance => "dominance",
        };
        let mut s = String::new();
        writeln!(s, "digraph {name}_{} {{", self.n()).unwrap();
        writeln!(s, "  rankdir=BT;").unwrap();
        for (i, p) in self.nodes.iter().enumerate() {
            writeln!(
                s,
                "  n{i} [label=\"{}\", h={}, w={}, r={}, s2={}];",
                p.label(),
                p.height(),
                p.width(),
                p.rank(),
                p.squareability()
            )
            .unwrap();
        }
        for (a, b) in &self.edges {
            writeln!(s, "  n{a} -> n{b};").unwrap();
        }
        s.push_str("}\n");
        s
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = GraphDoc {
            order: self.order,
            nodes: self.nodes.iter().map(HasseNode::of).collect(),
            edges: self.edges.iter().map(|&(a, b)| [a, b]).collect(),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    /// Reads back a document written by [`HasseGraph::to_json`].
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: GraphDoc = serde_json::from_str(text)?;
        let nodes = doc
            .nodes
            .into_iter()
            .map(|n| Partition::new(n.parts))
            .collect::<Result<Vec<_>>>()?;
        let len = nodes.len();
        let edges = doc
            .edges
            .into_iter()
            .map(|[a, b]| {
                if a >= len || b >= len {
                    Err(Error::Inconsistent(format!("edge [{a},{b}] out of range")))
                } else {
                    Ok((a, b))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { order: doc.order, nodes, edges })
    }

    /// Reachability matrix of the edge relation (reflexive-transitive closure).
    pub fn reachability(&self) -> Vec<Vec<bool>> {
        let len = self.nodes.len();
        let mut reach = vec![vec![false; len]; len];
        let mut adj = vec![Vec::new(); len];
        for &(a, b) in &self.edges {
            adj[a].push(b);
        }
        for i in 0..len {
            reach[i][i] = true;
            let mut stack = vec![i];
            while let Some(v) = stack.pop() {
                for &u in &adj[v] {
                    if !reach[i][u] {
                        reach[i][u] = true;
                        stack.push(u);
                    }
                }
            }
        }
        reach
    }
}
