//! Sentence hypergraph: section, topic and keyword hyperedges fused into one
//! incidence structure.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::corpus::Document;
use crate::error::{Error, Result};

pub const DEFAULT_MIN_DEGREE: usize = 5;
pub const DEFAULT_MAX_DEGREE: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeType {
    Section,
    Topic,
    Keyword,
}

impl EdgeType {
    pub const ALL: [EdgeType; 3] = [EdgeType::Section, EdgeType::Topic, EdgeType::Keyword];

    pub fn as_str(self) -> &'static str {
        match self {
            EdgeType::Section => "section",
            EdgeType::Topic => "topic",
            EdgeType::Keyword => "keyword",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for EdgeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One block of incidence columns, each column stored as its sorted member rows.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct IncidenceColumns {
    pub n: usize,
    pub columns: Vec<Vec<usize>>,
    pub labels: Vec<String>,
}

impl IncidenceColumns {
    pub fn empty(n: usize) -> Self {
        IncidenceColumns {
            n,
            columns: Vec::new(),
            labels: Vec::new(),
        }
    }

    pub fn width(&self) -> usize {
        self.columns.len()
    }

    /// Dense n×width 0/1 matrix, row-major.
    pub fn dense(&self) -> Vec<u8> {
        let w = self.width();
        let mut out = vec![0u8; self.n * w];
        for (j, col) in self.columns.iter().enumerate() {
            for &i in col {
                out[i * w + j] = 1;
            }
        }
        out
    }
}

/// Column `j` contains exactly the sentences of section `j`.
pub fn section_hyperedges(doc: &Document) -> IncidenceColumns {
    IncidenceColumns {
        n: doc.n_sentences(),
        columns: doc
            .sections
            .iter()
            .map(|s| s.span.clone().collect())
            .collect(),
        labels: doc.sections.iter().map(|s| s.name.clone()).collect(),
    }
}

/// Fused incidence matrix with type-tagged columns in section‖topic‖keyword order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypergraph {
    n: usize,
    members: Vec<Vec<usize>>,
    edge_types: Vec<EdgeType>,
    labels: Vec<String>,
    #[serde(skip)]
    node_edges: Vec<Vec<usize>>,
}

/// Concatenates the three blocks after dropping topic and keyword columns
/// whose degree falls outside `[min_deg, max_deg]`. Section columns are kept
/// whatever their size, so every sentence stays connected.
pub fn fuse(
    sections: &IncidenceColumns,
    topics: &IncidenceColumns,
    keywords: &IncidenceColumns,
    min_deg: usize,
    max_deg: usize,
) -> Result<Hypergraph> {
    let n = sections.n;
    for block in [topics, keywords] {
        if block.n != n {
            return Err(Error::shape(
                "fuse",
                alloc::format!("{n} rows"),
                alloc::format!("{} rows", block.n),
            ));
        }
    }
    let mut members = Vec::new();
    let mut edge_types = Vec::new();
    let mut labels = Vec::new();
    let label = |b: &IncidenceColumns, j: usize| b.labels.get(j).cloned().unwrap_or_default();
    for (j, col) in sections.columns.iter().enumerate() {
        members.push(col.clone());
        edge_types.push(EdgeType::Section);
        labels.push(label(sections, j));
    }
    for (ty, block) in [(EdgeType::Topic, topics), (EdgeType::Keyword, keywords)] {
        for (j, col) in block.columns.iter().enumerate() {
            if (min_deg..=max_deg).contains(&col.len()) {
                members.push(col.clone());
                edge_types.push(ty);
                labels.push(label(block, j));
            }
        }
    }
    Hypergraph::from_parts(n, members, edge_types, labels)
}

impl Hypergraph {
    /// Builds and validates a hypergraph from per-edge member lists.
    pub fn from_parts(
        n: usize,
        mut members: Vec<Vec<usize>>,
        edge_types: Vec<EdgeType>,
        mut labels: Vec<String>,
    ) -> Result<Self> {
        if edge_types.len() != members.len() {
            return Err(Error::shape("Hypergraph", members.len(), edge_types.len()));
        }
        labels.resize(members.len(), String::new());
        for col in &mut members {
            col.sort_unstable();
            col.dedup();
        }
        let mut g = Hypergraph {
            n,
            members,
            edge_types,
            labels,
            node_edges: Vec::new(),
        };
        g.rebuild_node_index();
        g.check_invariants()?;
        Ok(g)
    }

    fn rebuild_node_index(&mut self) {
        let mut node_edges = vec![Vec::new(); self.n];
        for (j, col) in self.members.iter().enumerate() {
            for &i in col {
                if i < self.n {
                    node_edges[i].push(j);
                }
            }
        }
        self.node_edges = node_edges;
    }

    /// Restores the node→edge index after deserialization.
    pub fn reindexed(mut self) -> Result<Self> {
        self.rebuild_node_index();
        self.check_invariants()?;
        Ok(self)
    }

    pub fn check_invariants(&self) -> Result<()> {
        for (j, col) in self.members.iter().enumerate() {
            if let Some(&i) = col.iter().find(|&&i| i >= self.n) {
                return Err(Error::Graph(alloc::format!(
                    "edge {j} references node {i} >= n = {}",
                    self.n
                )));
            }
            let min = if self.edge_types[j] == EdgeType::Section {
                1
            } else {
                2
            };
            if col.len() < min {
                return Err(Error::Graph(alloc::format!(
                    "{} edge {j} has {} member(s)",
                    self.edge_types[j],
                    col.len()
                )));
            }
        }
        if let Some(i) = self.node_edges.iter().position(Vec::is_empty) {
            return Err(Error::Graph(alloc::format!(
                "node {i} has no incident edge"
            )));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.members.len()
    }

    pub fn members(&self, edge: usize) -> &[usize] {
        &self.members[edge]
    }

    pub fn all_members(&self) -> &[Vec<usize>] {
        &self.members
    }

    pub fn incident_edges(&self, node: usize) -> &[usize] {
        &self.node_edges[node]
    }

    pub fn edge_types(&self) -> &[EdgeType] {
        &self.edge_types
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn degree(&self, edge: usize) -> usize {
        self.members[edge].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.members.iter().map(Vec::len).collect()
    }

    pub fn count_of(&self, ty: EdgeType) -> usize {
        self.edge_types.iter().filter(|&&t| t == ty).count()
    }

    pub fn contains(&self, node: usize, edge: usize) -> bool {
        self.members[edge].binary_search(&node).is_ok()
    }

    /// Dense n×m incidence, row-major.
    pub fn incidence(&self) -> Vec<u8> {
        let m = self.m();
        let mut out = vec![0u8; self.n * m];
        for (j, col) in self.members.iter().enumerate() {
            for &i in col {
                out[i * m + j] = 1;
            }
        }
        out
    }

    /// n×m membership mask (row = node).
    pub fn node_mask(&self) -> Vec<bool> {
        self.incidence().into_iter().map(|x| x == 1).collect()
    }

    /// m×n membership mask (row = edge).
    pub fn edge_mask(&self) -> Vec<bool> {
        let n = self.n;
        let mut out = vec![false; self.m() * n];
        for (j, col) in self.members.iter().enumerate() {
            for &i in col {
                out[j * n + i] = true;
            }
        }
        out
    }

    /// Same hypergraph with node `perm[i]` of `self` becoming node `i`.
    pub fn permute_nodes(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::shape("permute_nodes", self.n, perm.len()));
        }
        let mut inverse = vec![usize::MAX; self.n];
        for (new, &old) in perm.iter().enumerate() {
            if old >= self.n || inverse[old] != usize::MAX {
                return Err(Error::Config("not a permutation".into()));
            }
            inverse[old] = new;
        }
        let members = self
            .members
            .iter()
            .map(|col| col.iter().map(|&i| inverse[i]).collect())
            .collect();
        Hypergraph::from_parts(
            self.n,
            members,
            self.edge_types.clone(),
            self.labels.clone(),
        )
    }

    /// Copy without the listed edges.
    pub fn without_edges(&self, drop: &[usize]) -> Result<Self> {
        let keep: Vec<usize> = (0..self.m()).filter(|j| !drop.contains(j)).collect();
        Hypergraph::from_parts(
            self.n,
            keep.iter().map(|&j| self.members[j].clone()).collect(),
            keep.iter().map(|&j| self.edge_types[j]).collect(),
            keep.iter().map(|&j| self.labels[j].clone()).collect(),
        )
    }
}
