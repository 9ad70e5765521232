//! Warm-introduction paths from a founder to an investor or a firm.
//!
//! Edges are traversed in either direction, and a hop's strength is the
//! email count both ways. Only minimum-hop paths are considered.

use std::cmp::Ordering;
use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::graph::{CommGraph, NodeId, Topology};

pub const DEFAULT_MAX_HOPS: usize = 4;
pub const DEFAULT_K: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntroPath {
    /// From the founder to the target, inclusive.
    pub nodes: Vec<NodeId>,
    pub total_strength: u64,
}

impl IntroPath {
    pub fn hops(&self) -> usize {
        self.nodes.len().saturating_sub(1)
    }
}

/// Strength ordering: stronger first, then lexicographic node sequence.
fn by_strength(a: &IntroPath, b: &IntroPath) -> Ordering {
    b.total_strength
        .cmp(&a.total_strength)
        .then_with(|| a.nodes.cmp(&b.nodes))
}

/// Email count between `a` and `b` in both directions.
pub fn tie_strength(g: &CommGraph, a: &NodeId, b: &NodeId) -> u64 {
    g.weight(a, b) + g.weight(b, a)
}

fn bfs(topo: &Topology, src: usize, limit: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; topo.len()];
    dist[src] = 0;
    let mut queue = VecDeque::from([src]);
    while let Some(u) = queue.pop_front() {
        if dist[u] == limit {
            continue;
        }
        for &v in &topo.undirected[u] {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

fn index(topo: &Topology, id: &NodeId) -> Result<usize> {
    topo.index_of(id)
        .ok_or_else(|| Error::UnknownNode(id.clone()))
}

/// Up to `k` minimum-hop paths from `founder` to `investor`, strongest
/// first with ties broken by node sequence. Empty when the investor is
/// more than `max_hops` away.
pub fn top_intro_paths(
    g: &CommGraph,
    founder: &NodeId,
    investor: &NodeId,
    max_hops: usize,
    k: usize,
) -> Result<Vec<IntroPath>> {
    let topo = g.topology();
    paths_in(g, &topo, founder, investor, max_hops, k)
}

fn paths_in(
    g: &CommGraph,
    topo: &Topology,
    founder: &NodeId,
    investor: &NodeId,
    max_hops: usize,
    k: usize,
) -> Result<Vec<IntroPath>> {
    let s = index(topo, founder)?;
    let t = index(topo, investor)?;
    if s == t {
        return Err(Error::InvalidInput(format!(
            "{founder} is both ends of the path"
        )));
    }
    let from_s = bfs(topo, s, max_hops);
    let d = from_s[t];
    if d == usize::MAX || k == 0 {
        return Ok(Vec::new());
    }
    let to_t = bfs(topo, t, d);

    // Best suffixes towards `t`, kept per node on some shortest path and
    // built one layer at a time from the target back. Extending the k best
    // suffixes of each successor yields the k best from a node, since a
    // common prefix preserves both strength order and sequence order.
    let on_path =
        |v: usize| from_s[v] != usize::MAX && to_t[v] != usize::MAX && from_s[v] + to_t[v] == d;
    let mut layers: Vec<Vec<usize>> = vec![Vec::new(); d + 1];
    for v in 0..topo.len() {
        if on_path(v) {
            layers[from_s[v]].push(v);
        }
    }
    let mut best: Vec<Vec<(u64, Vec<usize>)>> = vec![Vec::new(); topo.len()];
    best[t] = vec![(0, vec![t])];
    for layer in (0..d).rev() {
        for &u in &layers[layer] {
            let mut cands: Vec<(u64, Vec<usize>)> = Vec::new();
            for &v in &topo.undirected[u] {
                if !on_path(v) || from_s[v] != layer + 1 {
                    continue;
                }
                let w = tie_strength(g, &topo.ids[u], &topo.ids[v]);
                for (strength, suffix) in &best[v] {
                    let mut seq = Vec::with_capacity(suffix.len() + 1);
                    seq.push(u);
                    seq.extend_from_slice(suffix);
                    cands.push((strength + w, seq));
                }
            }
            cands.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
            cands.truncate(k);
            best[u] = cands;
        }
    }
    Ok(std::mem::take(&mut best[s])
        .into_iter()
        .map(|(total_strength, seq)| IntroPath {
            nodes: seq.into_iter().map(|i| topo.ids[i].clone()).collect(),
            total_strength,
        })
        .collect())
}

/// Best paths to any investor at a firm: the union of each investor's top
/// paths, ordered by hop count, then strength, then node sequence.
pub fn firm_intro_paths(
    g: &CommGraph,
    founder: &NodeId,
    firm_investors: &[NodeId],
    max_hops: usize,
    k: usize,
) -> Result<Vec<IntroPath>> {
    if firm_investors.is_empty() {
        return Err(Error::InvalidInput("firm has no investors".into()));
    }
    let topo = g.topology();
    let investors: BTreeSet<&NodeId> = firm_investors.iter().collect();
    let mut all = Vec::new();
    for inv in investors {
        all.extend(paths_in(g, &topo, founder, inv, max_hops, k)?);
    }
    all.sort_by(|a, b| a.hops().cmp(&b.hops()).then_with(|| by_strength(a, b)));
    all.truncate(k);
    Ok(all)
}
