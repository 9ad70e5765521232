//! Community detection: asynchronous label propagation, with Louvain as an
//! alternative backend behind the same `Partition` contract.
//!
//! Both treat edges as undirected and unweighted. Communities that come out
//! internally disconnected are split into their connected pieces, and every
//! community is named by its smallest member id.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{CommGraph, Label, NodeId, Topology};

pub type CommunityId = NodeId;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Partition {
    pub assignment: BTreeMap<NodeId, CommunityId>,
    pub communities: BTreeMap<CommunityId, BTreeSet<NodeId>>,
}

impl Partition {
    /// Builds a canonical partition from per-index group labels. Groups are
    /// split into connected components first.
    fn from_groups(topo: &Topology, groups: &[usize]) -> Partition {
        let n = topo.len();
        let mut component = vec![usize::MAX; n];
        let mut next = 0;
        let mut queue = VecDeque::new();
        for start in 0..n {
            if component[start] != usize::MAX {
                continue;
            }
            component[start] = next;
            queue.push_back(start);
            while let Some(v) = queue.pop_front() {
                for &w in &topo.undirected[v] {
                    if component[w] == usize::MAX && groups[w] == groups[start] {
                        component[w] = next;
                        queue.push_back(w);
                    }
                }
            }
            next += 1;
        }
        let mut members: BTreeMap<usize, BTreeSet<NodeId>> = BTreeMap::new();
        for (i, c) in component.iter().enumerate() {
            members.entry(*c).or_default().insert(topo.ids[i].clone());
        }
        let mut partition = Partition::default();
        for set in members.into_values() {
            let id = set.iter().next().expect("non-empty community").clone();
            for m in &set {
                partition.assignment.insert(m.clone(), id.clone());
            }
            partition.communities.insert(id, set);
        }
        partition
    }

    pub fn len(&self) -> usize {
        self.communities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.communities.is_empty()
    }

    pub fn community_of(&self, node: &NodeId) -> Option<&CommunityId> {
        self.assignment.get(node)
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        let io = |e| Error::io("<partition>", e);
        writeln!(out, "node_id\tcommunity_id").map_err(io)?;
        for (node, c) in &self.assignment {
            writeln!(out, "{node}\t{c}").map_err(io)?;
        }
        Ok(())
    }

    pub fn read_from<R: BufRead>(input: R) -> Result<Partition> {
        let mut p = Partition::default();
        for (i, line) in input.lines().enumerate() {
            let line = line.map_err(|e| Error::io("<partition>", e))?;
            if i == 0 || line.is_empty() {
                continue;
            }
            let (node, c) = line
                .split_once('\t')
                .ok_or_else(|| Error::InvalidInput(format!("bad partition line {line:?}")))?;
            p.assignment.insert(NodeId::new(node), NodeId::new(c));
            p.communities
                .entry(NodeId::new(c))
                .or_default()
                .insert(NodeId::new(node));
        }
        Ok(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    #[default]
    LabelPropagation,
    Louvain,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lpa" => Ok(Method::LabelPropagation),
            "louvain" => Ok(Method::Louvain),
            other => Err(Error::InvalidInput(format!(
                "unknown community method {other:?}"
            ))),
        }
    }
}

pub fn detect(g: &CommGraph, method: Method, seed: u64, max_iter: usize) -> Result<Partition> {
    match method {
        Method::LabelPropagation => label_propagation(g, seed, max_iter),
        Method::Louvain => Ok(louvain(g, seed)),
    }
}

/// Asynchronous label propagation.
///
/// Every node starts with its own label. Each sweep visits nodes in a
/// seeded random order and sets each node's label to one drawn uniformly
/// from the most frequent labels among its distinct neighbors. The run
/// stops once every node already carries one of its neighborhood's most
/// frequent labels.
pub fn label_propagation(g: &CommGraph, seed: u64, max_iter: usize) -> Result<Partition> {
    let topo = g.topology();
    let n = topo.len();
    if n == 0 {
        return Ok(Partition::default());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labels: Vec<usize> = (0..n).collect();
    let mut order: Vec<usize> = (0..n).collect();
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    let mut best: Vec<usize> = Vec::new();

    let mut settled = false;
    for _ in 0..max_iter {
        order.shuffle(&mut rng);
        for &v in &order {
            if topo.undirected[v].is_empty() {
                continue;
            }
            dominant_labels(&topo.undirected[v], &labels, &mut counts, &mut best);
            labels[v] = best[rng.gen_range(0..best.len())];
        }
        settled = (0..n).all(|v| {
            if topo.undirected[v].is_empty() {
                return true;
            }
            dominant_labels(&topo.undirected[v], &labels, &mut counts, &mut best);
            best.contains(&labels[v])
        });
        if settled {
            break;
        }
    }
    let partition = Partition::from_groups(&topo, &labels);
    if settled {
        Ok(partition)
    } else {
        Err(Error::PartitionNonConvergence {
            max_iter,
            partial: Box::new(partition),
        })
    }
}

fn dominant_labels(
    neighbors: &[usize],
    labels: &[usize],
    counts: &mut BTreeMap<usize, usize>,
    best: &mut Vec<usize>,
) {
    counts.clear();
    for &w in neighbors {
        *counts.entry(labels[w]).or_insert(0) += 1;
    }
    let max = counts.values().copied().max().unwrap_or(0);
    best.clear();
    best.extend(counts.iter().filter(|(_, c)| **c == max).map(|(l, _)| *l));
}

/// Louvain modularity optimisation. Deterministic for a given seed, which
/// fixes the node visiting order of every local-moving pass.
pub fn louvain(g: &CommGraph, seed: u64) -> Partition {
    let topo = g.topology();
    let n = topo.len();
    if n == 0 {
        return Partition::default();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Weighted undirected multigraph over super-nodes.
    let mut adj: Vec<BTreeMap<usize, f64>> = (0..n)
        .map(|v| topo.undirected[v].iter().map(|&w| (w, 1.0)).collect())
        .collect();
    let mut self_loops = vec![0.0; n];
    let mut membership: Vec<usize> = (0..n).collect();

    loop {
        let level = local_moving(&adj, &self_loops, &mut rng);
        let communities: BTreeSet<usize> = level.iter().copied().collect();
        if communities.len() == adj.len() {
            break;
        }
        let renumber: BTreeMap<usize, usize> = communities
            .iter()
            .enumerate()
            .map(|(i, c)| (*c, i))
            .collect();
        let k = renumber.len();
        let mut next_adj: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); k];
        let mut next_self = vec![0.0; k];
        for (v, nbrs) in adj.iter().enumerate() {
            let cv = renumber[&level[v]];
            next_self[cv] += self_loops[v];
            for (&w, &wt) in nbrs {
                let cw = renumber[&level[w]];
                if cv == cw {
                    // each undirected edge is seen from both endpoints
                    next_self[cv] += wt / 2.0;
                } else {
                    *next_adj[cv].entry(cw).or_insert(0.0) += wt;
                }
            }
        }
        for m in membership.iter_mut() {
            *m = renumber[&level[*m]];
        }
        adj = next_adj;
        self_loops = next_self;
    }
    Partition::from_groups(&topo, &membership)
}

fn local_moving(
    adj: &[BTreeMap<usize, f64>],
    self_loops: &[f64],
    rng: &mut ChaCha8Rng,
) -> Vec<usize> {
    let n = adj.len();
    let degree: Vec<f64> = (0..n)
        .map(|v| adj[v].values().sum::<f64>() + 2.0 * self_loops[v])
        .collect();
    let two_m: f64 = degree.iter().sum();
    let mut community: Vec<usize> = (0..n).collect();
    if two_m == 0.0 {
        return community;
    }
    let mut total: Vec<f64> = degree.clone();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut improved = true;
    let mut passes = 0;
    while improved && passes < 100 {
        improved = false;
        passes += 1;
        for &v in &order {
            let own = community[v];
            let mut links: BTreeMap<usize, f64> = BTreeMap::new();
            for (&w, &wt) in &adj[v] {
                *links.entry(community[w]).or_insert(0.0) += wt;
            }
            total[own] -= degree[v];
            let gain = |c: usize, links: &BTreeMap<usize, f64>| {
                links.get(&c).copied().unwrap_or(0.0) - total[c] * degree[v] / two_m
            };
            let mut best = own;
            let mut best_gain = gain(own, &links);
            for &c in links.keys() {
                let g = gain(c, &links);
                if g > best_gain + 1e-12 {
                    best = c;
                    best_gain = g;
                }
            }
            total[best] += degree[v];
            if best != own {
                community[v] = best;
                improved = true;
            }
        }
    }
    community
}

/// Newman modularity of a partition over the undirected, unweighted view of
/// the graph.
pub fn modularity(g: &CommGraph, p: &Partition) -> f64 {
    let topo = g.topology();
    let degree: Vec<f64> = topo.undirected.iter().map(|v| v.len() as f64).collect();
    let two_m: f64 = degree.iter().sum();
    if two_m == 0.0 {
        return 0.0;
    }
    let comm = |i: usize| p.assignment.get(&topo.ids[i]);
    let mut inside = 0.0;
    let mut totals: BTreeMap<&CommunityId, f64> = BTreeMap::new();
    for (i, d) in degree.iter().enumerate() {
        if let Some(c) = comm(i) {
            *totals.entry(c).or_insert(0.0) += d;
        }
        for &j in &topo.undirected[i] {
            if comm(i) == comm(j) {
                inside += 1.0;
            }
        }
    }
    inside / two_m - totals.values().map(|t| (t / two_m).powi(2)).sum::<f64>()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommunityStats {
    pub community_count: usize,
    pub mean_founders: f64,
    /// `(community, founder count, size)` sorted by founder count
    /// descending, then community id.
    pub top: Vec<(CommunityId, usize, usize)>,
}

pub fn community_stats(
    p: &Partition,
    labels: &BTreeMap<NodeId, Label>,
    top_k: usize,
) -> Result<CommunityStats> {
    let mut rows = Vec::with_capacity(p.len());
    for (id, members) in &p.communities {
        let mut founders = 0;
        for m in members {
            match labels.get(m) {
                Some(Label::Founder) => founders += 1,
                Some(_) => {}
                None => return Err(Error::UnknownNode(m.clone())),
            }
        }
        rows.push((id.clone(), founders, members.len()));
    }
    let total_founders: usize = rows.iter().map(|r| r.1).sum();
    let mean_founders = if rows.is_empty() {
        0.0
    } else {
        total_founders as f64 / rows.len() as f64
    };
    rows.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    rows.truncate(top_k);
    Ok(CommunityStats {
        community_count: p.len(),
        mean_founders,
        top: rows,
    })
}
