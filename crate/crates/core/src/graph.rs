//! Directed weighted communication graph.
//!
//! Nodes are people keyed by normalized email address or by a public
//! person id (`pid:` prefix). Every node is a `Person`; a node may also be
//! a `Founder` or an `Investor`, never both. Parallel emails between two
//! people are aggregated into one edge whose weight is the email count.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SNAPSHOT_MAGIC: &str = "founderrank-graph";
pub const SNAPSHOT_VERSION: u32 = 1;
pub const DELTA_MAGIC: &str = "founderrank-delta";
pub const DELTA_VERSION: u32 = 1;

const PERSON_PREFIX: &str = "pid:";

/// Node identity: a normalized email address or a prefixed person id.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(String);

impl NodeId {
    pub fn new(raw: impl Into<String>) -> Self {
        NodeId(raw.into())
    }

    /// Node for a public-record person id. The `pid:` prefix keeps these
    /// disjoint from email addresses.
    pub fn person(id: &str) -> Self {
        if id.starts_with(PERSON_PREFIX) {
            NodeId(id.to_string())
        } else {
            NodeId(format!("{PERSON_PREFIX}{id}"))
        }
    }

    pub fn is_person_id(&self) -> bool {
        self.0.starts_with(PERSON_PREFIX)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    fn check_serializable(&self) -> Result<()> {
        if self.0.is_empty() || self.0.chars().any(char::is_whitespace) {
            return Err(Error::InvalidInput(format!(
                "node id {:?} is empty or contains whitespace",
                self.0
            )));
        }
        Ok(())
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId(s.to_string())
    }
}

/// The exclusive role label carried on top of `Person`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Person,
    Founder,
    Investor,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Person => "person",
            Label::Founder => "founder",
            Label::Investor => "investor",
        }
    }
}

impl std::str::FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "person" => Ok(Label::Person),
            "founder" => Ok(Label::Founder),
            "investor" => Ok(Label::Investor),
            other => Err(Error::InvalidInput(format!("unknown label {other:?}"))),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Resolve the exclusive label from the evidence about a person.
///
/// Someone who is both a founder and an investor counts as an investor only
/// while employed by an institutional investment firm.
pub fn resolve_label(is_founder: bool, is_investor: bool, employed_by_fund: bool) -> Label {
    match (is_founder, is_investor) {
        (true, true) if employed_by_fund => Label::Investor,
        (true, true) => Label::Founder,
        (true, false) => Label::Founder,
        (false, true) => Label::Investor,
        (false, false) => Label::Person,
    }
}

/// Accumulated label evidence for a node. Merging is a logical OR, so the
/// resolved label never depends on the order evidence arrives in.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LabelClaims {
    pub founder: bool,
    pub investor: bool,
    pub employed_by_fund: bool,
}

impl LabelClaims {
    pub const FOUNDER: LabelClaims = LabelClaims {
        founder: true,
        investor: false,
        employed_by_fund: false,
    };
    pub const INVESTOR: LabelClaims = LabelClaims {
        founder: false,
        investor: true,
        employed_by_fund: false,
    };

    pub fn merge(self, other: LabelClaims) -> LabelClaims {
        LabelClaims {
            founder: self.founder || other.founder,
            investor: self.investor || other.investor,
            employed_by_fund: self.employed_by_fund || other.employed_by_fund,
        }
    }

    pub fn label(self) -> Label {
        resolve_label(self.founder, self.investor, self.employed_by_fund)
    }

    fn encode(self) -> String {
        let mut s = String::new();
        if self.founder {
            s.push('F');
        }
        if self.investor {
            s.push('I');
        }
        if self.employed_by_fund {
            s.push('E');
        }
        if s.is_empty() {
            s.push('-');
        }
        s
    }

    fn decode(s: &str) -> Option<LabelClaims> {
        if s == "-" {
            return Some(LabelClaims::default());
        }
        let mut claims = LabelClaims::default();
        for c in s.chars() {
            match c {
                'F' => claims.founder = true,
                'I' => claims.investor = true,
                'E' => claims.employed_by_fund = true,
                _ => return None,
            }
        }
        Some(claims)
    }
}

/// Edge-weight increments and label evidence produced by ingestion.
///
/// Merging deltas is associative and commutative.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GraphDelta {
    pub edge_increments: BTreeMap<(NodeId, NodeId), u64>,
    pub new_labels: BTreeMap<NodeId, LabelClaims>,
}

impl GraphDelta {
    pub fn is_empty(&self) -> bool {
        self.edge_increments.is_empty() && self.new_labels.is_empty()
    }

    /// Records one more email from `src` to `dst`. Self-loops are dropped.
    pub fn increment(&mut self, src: NodeId, dst: NodeId, by: u64) {
        if src == dst || by == 0 {
            return;
        }
        *self.edge_increments.entry((src, dst)).or_insert(0) += by;
    }

    pub fn claim(&mut self, node: NodeId, claims: LabelClaims) {
        let entry = self.new_labels.entry(node).or_default();
        *entry = entry.merge(claims);
    }

    pub fn merge(&mut self, other: &GraphDelta) {
        for ((s, d), w) in &other.edge_increments {
            self.increment(s.clone(), d.clone(), *w);
        }
        for (n, c) in &other.new_labels {
            self.claim(n.clone(), *c);
        }
    }

    pub fn total_increment(&self) -> u64 {
        self.edge_increments.values().sum()
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        let io = |e| Error::io("<delta>", e);
        writeln!(out, "{DELTA_MAGIC} {DELTA_VERSION}").map_err(io)?;
        for (node, claims) in &self.new_labels {
            node.check_serializable()?;
            writeln!(out, "label\t{node}\t{}", claims.encode()).map_err(io)?;
        }
        for ((s, d), w) in &self.edge_increments {
            s.check_serializable()?;
            d.check_serializable()?;
            writeln!(out, "edge\t{s}\t{d}\t{w}").map_err(io)?;
        }
        writeln!(out, "end").map_err(io)?;
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("in-memory write");
        String::from_utf8(buf).expect("utf8")
    }

    pub fn read_from<R: BufRead>(input: R) -> Result<GraphDelta> {
        let mut lines = input.lines();
        let header = next_line(&mut lines)?.ok_or_else(|| corrupt("empty delta file"))?;
        check_header(&header, DELTA_MAGIC, DELTA_VERSION)?;
        let mut delta = GraphDelta::default();
        loop {
            let line = next_line(&mut lines)?.ok_or_else(|| corrupt("missing end marker"))?;
            if line == "end" {
                break;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            match fields.as_slice() {
                ["label", node, claims] => {
                    let claims = LabelClaims::decode(claims)
                        .ok_or_else(|| corrupt(&format!("bad label claims {claims:?}")))?;
                    delta.claim(NodeId::new(*node), claims);
                }
                ["edge", s, d, w] => {
                    let w: u64 = w
                        .parse()
                        .map_err(|_| corrupt(&format!("bad increment {w:?}")))?;
                    if w == 0 {
                        return Err(corrupt("zero increment"));
                    }
                    delta.increment(NodeId::new(*s), NodeId::new(*d), w);
                }
                _ => return Err(corrupt(&format!("unrecognized delta line {line:?}"))),
            }
        }
        Ok(delta)
    }
}

/// Directed weighted graph of people.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CommGraph {
    nodes: BTreeMap<NodeId, LabelClaims>,
    edges: BTreeMap<(NodeId, NodeId), u64>,
}

impl CommGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, node: NodeId) {
        self.nodes.entry(node).or_default();
    }

    pub fn claim(&mut self, node: NodeId, claims: LabelClaims) {
        let entry = self.nodes.entry(node).or_default();
        *entry = entry.merge(claims);
    }

    /// Adds `weight` emails from `src` to `dst`, creating both endpoints as
    /// needed. Self-loops and zero weights are ignored.
    pub fn add_edge(&mut self, src: NodeId, dst: NodeId, weight: u64) {
        if src == dst || weight == 0 {
            return;
        }
        self.add_node(src.clone());
        self.add_node(dst.clone());
        *self.edges.entry((src, dst)).or_insert(0) += weight;
    }

    pub fn contains(&self, node: &NodeId) -> bool {
        self.nodes.contains_key(node)
    }

    pub fn label(&self, node: &NodeId) -> Option<Label> {
        self.nodes.get(node).map(|c| c.label())
    }

    pub fn claims(&self, node: &NodeId) -> Option<LabelClaims> {
        self.nodes.get(node).copied()
    }

    pub fn weight(&self, src: &NodeId, dst: &NodeId) -> u64 {
        // BTreeMap keyed by owned tuples; a borrowed lookup needs a clone.
        self.edges
            .get(&(src.clone(), dst.clone()))
            .copied()
            .unwrap_or(0)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> u64 {
        self.edges.values().sum()
    }

    /// Nodes in sorted order.
    pub fn nodes(&self) -> impl Iterator<Item = &NodeId> {
        self.nodes.keys()
    }

    pub fn labeled_nodes(&self) -> impl Iterator<Item = (&NodeId, Label)> {
        self.nodes.iter().map(|(n, c)| (n, c.label()))
    }

    pub fn nodes_with_label(&self, label: Label) -> Vec<NodeId> {
        self.labeled_nodes()
            .filter(|(_, l)| *l == label)
            .map(|(n, _)| n.clone())
            .collect()
    }

    /// Edges in sorted `(src, dst)` order.
    pub fn edges(&self) -> impl Iterator<Item = (&NodeId, &NodeId, u64)> {
        self.edges.iter().map(|((s, d), w)| (s, d, *w))
    }

    pub fn apply_delta(&self, delta: &GraphDelta) -> CommGraph {
        let mut g = self.clone();
        g.apply_delta_in_place(delta);
        g
    }

    pub fn apply_delta_in_place(&mut self, delta: &GraphDelta) {
        for ((s, d), w) in &delta.edge_increments {
            self.add_edge(s.clone(), d.clone(), *w);
        }
        for (n, c) in &delta.new_labels {
            self.claim(n.clone(), *c);
        }
    }

    /// Drops every node with no incident edge in either direction.
    pub fn remove_orphans(&self) -> CommGraph {
        let mut touched: BTreeSet<&NodeId> = BTreeSet::new();
        for (s, d) in self.edges.keys() {
            touched.insert(s);
            touched.insert(d);
        }
        let nodes = self
            .nodes
            .iter()
            .filter(|(n, _)| touched.contains(n))
            .map(|(n, c)| (n.clone(), *c))
            .collect();
        CommGraph {
            nodes,
            edges: self.edges.clone(),
        }
    }

    /// Removes nodes whose distinct in- or out-degree lies strictly above the
    /// given percentile (0–100) of the respective degree distribution,
    /// together with their edges.
    pub fn remove_degree_outliers(&self, percentile: f64) -> CommGraph {
        let topo = self.topology();
        let n = topo.len();
        if n == 0 {
            return self.clone();
        }
        let cutoff = |degrees: Vec<usize>| -> usize {
            let mut sorted = degrees;
            sorted.sort_unstable();
            let p = percentile.clamp(0.0, 100.0) / 100.0;
            let idx = ((n - 1) as f64 * p).ceil() as usize;
            sorted[idx.min(n - 1)]
        };
        let out_cut = cutoff(topo.out_adj.iter().map(Vec::len).collect());
        let in_cut = cutoff(topo.in_adj.iter().map(Vec::len).collect());
        let dropped: BTreeSet<&NodeId> = (0..n)
            .filter(|&i| topo.out_adj[i].len() > out_cut || topo.in_adj[i].len() > in_cut)
            .map(|i| &topo.ids[i])
            .collect();
        CommGraph {
            nodes: self
                .nodes
                .iter()
                .filter(|(k, _)| !dropped.contains(k))
                .map(|(k, v)| (k.clone(), *v))
                .collect(),
            edges: self
                .edges
                .iter()
                .filter(|((s, d), _)| !dropped.contains(s) && !dropped.contains(d))
                .map(|(k, v)| (k.clone(), *v))
                .collect(),
        }
    }

    /// Dense-index adjacency view used by the metric algorithms.
    pub fn topology(&self) -> Topology {
        Topology::new(self)
    }

    pub fn save<W: Write>(&self, mut out: W) -> Result<()> {
        let io = |e| Error::io("<snapshot>", e);
        writeln!(out, "{SNAPSHOT_MAGIC} {SNAPSHOT_VERSION}").map_err(io)?;
        writeln!(out, "nodes {}", self.nodes.len()).map_err(io)?;
        for (node, claims) in &self.nodes {
            node.check_serializable()?;
            writeln!(out, "{node}\t{}\t{}", claims.label(), claims.encode()).map_err(io)?;
        }
        writeln!(out, "edges {}", self.edges.len()).map_err(io)?;
        for ((s, d), w) in &self.edges {
            writeln!(out, "{s}\t{d}\t{w}").map_err(io)?;
        }
        writeln!(out, "end").map_err(io)?;
        Ok(())
    }

    pub fn to_snapshot(&self) -> String {
        let mut buf = Vec::new();
        self.save(&mut buf).expect("in-memory write");
        String::from_utf8(buf).expect("utf8")
    }

    pub fn load<R: BufRead>(input: R) -> Result<CommGraph> {
        let mut lines = input.lines();
        let header = next_line(&mut lines)?.ok_or_else(|| corrupt("empty snapshot"))?;
        check_header(&header, SNAPSHOT_MAGIC, SNAPSHOT_VERSION)?;
        let node_count = section_count(next_line(&mut lines)?, "nodes")?;
        let mut g = CommGraph::new();
        for _ in 0..node_count {
            let line = next_line(&mut lines)?.ok_or_else(|| corrupt("truncated node section"))?;
            let fields: Vec<&str> = line.split('\t').collect();
            let [id, label, claims] = fields.as_slice() else {
                return Err(corrupt(&format!("bad node line {line:?}")));
            };
            let claims = LabelClaims::decode(claims)
                .ok_or_else(|| corrupt(&format!("bad label claims {claims:?}")))?;
            let label: Label = label.parse().map_err(|_| corrupt("bad label"))?;
            if claims.label() != label {
                return Err(corrupt(&format!("label of {id} disagrees with its claims")));
            }
            if g.nodes.insert(NodeId::new(*id), claims).is_some() {
                return Err(corrupt(&format!("duplicate node {id}")));
            }
        }
        let edge_count = section_count(next_line(&mut lines)?, "edges")?;
        for _ in 0..edge_count {
            let line = next_line(&mut lines)?.ok_or_else(|| corrupt("truncated edge section"))?;
            let fields: Vec<&str> = line.split('\t').collect();
            let [s, d, w] = fields.as_slice() else {
                return Err(corrupt(&format!("bad edge line {line:?}")));
            };
            let w: u64 = w
                .parse()
                .map_err(|_| corrupt(&format!("bad weight {w:?}")))?;
            let (s, d) = (NodeId::new(*s), NodeId::new(*d));
            if w == 0 || s == d || !g.nodes.contains_key(&s) || !g.nodes.contains_key(&d) {
                return Err(corrupt(&format!("invalid edge {line:?}")));
            }
            if g.edges.insert((s, d), w).is_some() {
                return Err(corrupt(&format!("duplicate edge {line:?}")));
            }
        }
        match next_line(&mut lines)? {
            Some(l) if l == "end" => Ok(g),
            _ => Err(corrupt("missing end marker")),
        }
    }

    pub fn from_snapshot(text: &str) -> Result<CommGraph> {
        CommGraph::load(text.as_bytes())
    }
}

fn corrupt(msg: &str) -> Error {
    Error::CorruptSnapshot(msg.to_string())
}

fn next_line<B: BufRead>(lines: &mut std::io::Lines<B>) -> Result<Option<String>> {
    match lines.next() {
        None => Ok(None),
        Some(Ok(l)) => Ok(Some(l)),
        Some(Err(e)) if e.kind() == std::io::ErrorKind::InvalidData => {
            Err(corrupt("invalid utf-8"))
        }
        Some(Err(e)) => Err(Error::io("<snapshot>", e)),
    }
}

fn check_header(line: &str, magic: &str, version: u32) -> Result<()> {
    let mut parts = line.split(' ');
    if parts.next() != Some(magic) {
        return Err(corrupt(&format!("expected {magic} header")));
    }
    let v = parts.next().unwrap_or("");
    if v != version.to_string() {
        return Err(Error::UnsupportedVersion(v.to_string()));
    }
    Ok(())
}

fn section_count(line: Option<String>, name: &str) -> Result<usize> {
    let line = line.ok_or_else(|| corrupt(&format!("missing {name} section")))?;
    line.strip_prefix(name)
        .and_then(|rest| rest.strip_prefix(' '))
        .and_then(|n| n.parse().ok())
        .ok_or_else(|| corrupt(&format!("bad {name} section header {line:?}")))
}

/// Index-based adjacency lists. Node indices follow sorted `NodeId` order;
/// neighbor lists are sorted and free of duplicates.
#[derive(Debug, Clone)]
pub struct Topology {
    pub ids: Vec<NodeId>,
    pub out_adj: Vec<Vec<usize>>,
    pub in_adj: Vec<Vec<usize>>,
    /// Union of in- and out-neighbors.
    pub undirected: Vec<Vec<usize>>,
}

impl Topology {
    fn new(g: &CommGraph) -> Self {
        let ids: Vec<NodeId> = g.nodes.keys().cloned().collect();
        let index: BTreeMap<&NodeId, usize> = ids.iter().enumerate().map(|(i, n)| (n, i)).collect();
        let n = ids.len();
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        for (s, d) in g.edges.keys() {
            let (si, di) = (index[s], index[d]);
            out_adj[si].push(di);
            in_adj[di].push(si);
        }
        let mut undirected = vec![Vec::new(); n];
        for i in 0..n {
            in_adj[i].sort_unstable();
            let mut u: Vec<usize> = out_adj[i].iter().chain(&in_adj[i]).copied().collect();
            u.sort_unstable();
            u.dedup();
            undirected[i] = u;
        }
        Topology {
            ids,
            out_adj,
            in_adj,
            undirected,
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn index_of(&self, id: &NodeId) -> Option<usize> {
        self.ids.binary_search(id).ok()
    }
}

/// Reads a label file: CSV with header `node_id,label,employed_by_fund`,
/// where `label` is `founder`, `investor` or `person`. Several rows for one
/// node merge their evidence, so a founder row plus an investor row resolves
/// through the employment flag.
pub fn read_labels<R: std::io::Read>(input: R) -> Result<BTreeMap<NodeId, LabelClaims>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut out: BTreeMap<NodeId, LabelClaims> = BTreeMap::new();
    for (line, row) in rdr.records().enumerate() {
        let row = row?;
        let bad = |m: String| Error::InvalidInput(format!("label row {}: {m}", line + 2));
        let id = row
            .get(0)
            .filter(|s| !s.is_empty())
            .ok_or_else(|| bad("missing node_id".into()))?;
        let mut claims = match row.get(1).unwrap_or("").to_ascii_lowercase().as_str() {
            "founder" => LabelClaims::FOUNDER,
            "investor" => LabelClaims::INVESTOR,
            "person" | "" => LabelClaims::default(),
            other => return Err(bad(format!("unknown label {other:?}"))),
        };
        claims.employed_by_fund = match row.get(2).unwrap_or("").to_ascii_lowercase().as_str() {
            "true" | "1" | "yes" => true,
            "false" | "0" | "no" | "" => false,
            other => return Err(bad(format!("bad employed_by_fund {other:?}"))),
        };
        let entry = out.entry(NodeId::new(id)).or_default();
        *entry = entry.merge(claims);
    }
    Ok(out)
}

/// Writes the resolved label of every non-`Person` node in the label file
/// format read by [`read_labels`].
pub fn write_labels<W: Write>(g: &CommGraph, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["node_id", "label", "employed_by_fund"])?;
    for (n, label) in g.labeled_nodes() {
        if label != Label::Person {
            let employed = g.claims(n).is_some_and(|c| c.employed_by_fund);
            w.write_record([
                n.as_str(),
                label.as_str(),
                if employed { "true" } else { "false" },
            ])?;
        }
    }
    w.flush().map_err(|e| Error::io("<labels>", e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(s: &str) -> NodeId {
        NodeId::new(s)
    }

    #[test]
    fn resolve_label_rules() {
        assert_eq!(resolve_label(true, true, true), Label::Investor);
        assert_eq!(resolve_label(true, true, false), Label::Founder);
        assert_eq!(resolve_label(true, false, false), Label::Founder);
        assert_eq!(resolve_label(false, true, false), Label::Investor);
        assert_eq!(resolve_label(false, false, false), Label::Person);
        assert_eq!(resolve_label(false, false, true), Label::Person);
    }

    #[test]
    fn apply_empty_delta_is_identity() {
        let mut g = CommGraph::new();
        g.add_edge(n("a"), n("b"), 3);
        assert_eq!(g.apply_delta(&GraphDelta::default()), g);
    }

    #[test]
    fn apply_delta_sums_weights() {
        let mut g = CommGraph::new();
        g.add_edge(n("a"), n("b"), 3);
        let mut d = GraphDelta::default();
        d.increment(n("a"), n("b"), 2);
        assert_eq!(g.apply_delta(&d).weight(&n("a"), &n("b")), 5);
    }

    #[test]
    fn delta_label_creates_isolated_person() {
        let mut d = GraphDelta::default();
        d.claim(n("c"), LabelClaims::default());
        let g = CommGraph::new().apply_delta(&d);
        assert!(g.contains(&n("c")));
        assert_eq!(g.label(&n("c")), Some(Label::Person));
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn conflicting_claims_resolve_through_employment() {
        let mut g = CommGraph::new();
        g.claim(n("x"), LabelClaims::FOUNDER);
        g.claim(n("x"), LabelClaims::INVESTOR);
        assert_eq!(g.label(&n("x")), Some(Label::Founder));
        g.claim(
            n("x"),
            LabelClaims {
                employed_by_fund: true,
                ..Default::default()
            },
        );
        assert_eq!(g.label(&n("x")), Some(Label::Investor));
    }

    #[test]
    fn orphans() {
        let mut g = CommGraph::new();
        g.add_edge(n("a"), n("b"), 1);
        g.add_node(n("c"));
        let pruned = g.remove_orphans();
        assert_eq!(
            pruned.nodes().cloned().collect::<Vec<_>>(),
            vec![n("a"), n("b")]
        );
        assert_eq!(pruned.remove_orphans(), pruned);

        let mut only = CommGraph::new();
        only.add_node(n("x"));
        only.add_node(n("y"));
        assert!(only.remove_orphans().is_empty());
    }

    #[test]
    fn self_loops_are_dropped() {
        let mut g = CommGraph::new();
        g.add_edge(n("a"), n("a"), 4);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn snapshot_round_trip() {
        let mut g = CommGraph::new();
        g.add_edge(n("a@x.com"), n("b@x.com"), 7);
        g.add_edge(n("b@x.com"), n("pid:42"), 1);
        g.claim(n("a@x.com"), LabelClaims::FOUNDER);
        g.claim(n("pid:42"), LabelClaims::INVESTOR);
        let text = g.to_snapshot();
        let back = CommGraph::from_snapshot(&text).unwrap();
        assert_eq!(back, g);
        assert_eq!(back.weight(&n("a@x.com"), &n("b@x.com")), 7);
        assert_eq!(back.to_snapshot(), text);
    }

    #[test]
    fn truncated_snapshot_is_corrupt() {
        let mut g = CommGraph::new();
        g.add_edge(n("a"), n("b"), 2);
        g.add_edge(n("b"), n("c"), 2);
        let text = g.to_snapshot();
        let cut = &text[..text.len() - 12];
        assert!(matches!(
            CommGraph::from_snapshot(cut),
            Err(Error::CorruptSnapshot(_))
        ));
    }

    #[test]
    fn unknown_version_rejected() {
        let text = "founderrank-graph 9\nnodes 0\nedges 0\nend\n";
        assert!(matches!(
            CommGraph::from_snapshot(text),
            Err(Error::UnsupportedVersion(v)) if v == "9"
        ));
    }

    #[test]
    fn delta_text_round_trip() {
        let mut d = GraphDelta::default();
        d.increment(n("a"), n("b"), 2);
        d.claim(n("a"), LabelClaims::FOUNDER);
        let back = GraphDelta::read_from(d.to_text().as_bytes()).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn degree_outliers_removed_above_percentile() {
        let mut g = CommGraph::new();
        for i in 0..10 {
            g.add_edge(n("hub"), NodeId::new(format!("leaf{i}")), 1);
        }
        g.add_edge(n("leaf0"), n("leaf1"), 1);
        g.add_edge(n("leaf1"), n("leaf0"), 1);
        let trimmed = g.remove_degree_outliers(90.0);
        assert!(!trimmed.contains(&n("hub")));
        assert_eq!(trimmed.weight(&n("leaf0"), &n("leaf1")), 1);
    }

    #[test]
    fn label_file_round_trip() {
        let text = "node_id,label,employed_by_fund\na@x.com,founder,false\nb@y.vc,investor,true\nb@y.vc,founder,\nc@z.com,person,0\n";
        let claims = read_labels(text.as_bytes()).unwrap();
        assert_eq!(claims[&NodeId::new("a@x.com")].label(), Label::Founder);
        assert_eq!(claims[&NodeId::new("b@y.vc")].label(), Label::Investor);
        assert_eq!(claims[&NodeId::new("c@z.com")].label(), Label::Person);
        let mut g = CommGraph::new();
        for (n, c) in &claims {
            g.claim(n.clone(), *c);
        }
        let mut buf = Vec::new();
        write_labels(&g, &mut buf).unwrap();
        let back = read_labels(buf.as_slice()).unwrap();
        for (n, c) in &claims {
            assert_eq!(back.get(n).copied().unwrap_or_default().label(), c.label());
        }
        assert!(read_labels("node_id,label\na,martian\n".as_bytes()).is_err());
    }
}
