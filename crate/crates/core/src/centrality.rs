//! PageRank, betweenness and closeness over the communication graph.
//!
//! Edge weights are ignored; shortest paths count directed hops.

use std::collections::{BTreeMap, VecDeque};
use std::io::{BufRead, Write};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{CommGraph, NodeId, Topology};

pub const DEFAULT_DAMPING: f64 = 0.85;
pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 10_000;

/// Sources handled per parallel task. Fixed so partial sums are always
/// combined in the same order.
const SOURCE_CHUNK: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PageRankConfig {
    pub damping: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PageRankConfig {
    fn default() -> Self {
        PageRankConfig {
            damping: DEFAULT_DAMPING,
            tol: DEFAULT_TOLERANCE,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

/// Unscaled metric values for one node.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RawMetrics {
    pub pagerank: f64,
    pub betweenness: f64,
    pub closeness: f64,
}

/// The three FounderRank metrics for a node, each min-max scaled to [0, 1]
/// over the whole graph, together with the values they were scaled from.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricVector {
    pub node_id: NodeId,
    pub pagerank: f64,
    pub betweenness: f64,
    pub closeness: f64,
    pub raw: RawMetrics,
}

impl MetricVector {
    pub fn zero(node_id: NodeId) -> Self {
        MetricVector {
            node_id,
            pagerank: 0.0,
            betweenness: 0.0,
            closeness: 0.0,
            raw: RawMetrics::default(),
        }
    }
}

fn require_nonempty(topo: &Topology) -> Result<()> {
    if topo.is_empty() {
        return Err(Error::InvalidInput("graph has no nodes".into()));
    }
    Ok(())
}

fn to_map(topo: &Topology, values: Vec<f64>) -> BTreeMap<NodeId, f64> {
    topo.ids.iter().cloned().zip(values).collect()
}

/// PageRank by power iteration. Scores sum to one; dangling nodes spread
/// their mass uniformly. Converged once the L1 change of an iteration falls
/// below `tol`.
pub fn pagerank(g: &CommGraph, cfg: PageRankConfig) -> Result<BTreeMap<NodeId, f64>> {
    let topo = g.topology();
    pagerank_topology(&topo, cfg).map(|v| to_map(&topo, v))
}

pub fn pagerank_topology(topo: &Topology, cfg: PageRankConfig) -> Result<Vec<f64>> {
    require_nonempty(topo)?;
    if !(cfg.damping > 0.0 && cfg.damping < 1.0) || cfg.tol <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "damping must lie in (0, 1) and tol be positive, got {} / {}",
            cfg.damping, cfg.tol
        )));
    }
    let n = topo.len();
    let nf = n as f64;
    let d = cfg.damping;
    let mut x = vec![1.0 / nf; n];
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for _ in 0..cfg.max_iter {
        let dangling: f64 = (0..n)
            .filter(|&u| topo.out_adj[u].is_empty())
            .map(|u| x[u])
            .sum();
        let base = (1.0 - d) / nf + d * dangling / nf;
        for (v, slot) in next.iter_mut().enumerate() {
            let inflow: f64 = topo.in_adj[v]
                .iter()
                .map(|&u| x[u] / topo.out_adj[u].len() as f64)
                .sum();
            *slot = base + d * inflow;
        }
        residual = x.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut x, &mut next);
        if residual < cfg.tol {
            let total: f64 = x.iter().sum();
            x.iter_mut().for_each(|v| *v /= total);
            return Ok(x);
        }
    }
    Err(Error::NonConvergence {
        max_iter: cfg.max_iter,
        residual,
    })
}

/// Shortest-path betweenness over directed hops, normalized by
/// `(N-1)(N-2)`. Graphs with fewer than three nodes score zero everywhere.
pub fn betweenness(g: &CommGraph) -> Result<BTreeMap<NodeId, f64>> {
    let topo = g.topology();
    betweenness_topology(&topo).map(|v| to_map(&topo, v))
}

pub fn betweenness_topology(topo: &Topology) -> Result<Vec<f64>> {
    require_nonempty(topo)?;
    let n = topo.len();
    if n < 3 {
        return Ok(vec![0.0; n]);
    }
    let sources: Vec<usize> = (0..n).collect();
    let partials: Vec<Vec<f64>> = sources
        .par_chunks(SOURCE_CHUNK)
        .map(|chunk| {
            let mut acc = vec![0.0; n];
            let mut scratch = BrandesScratch::new(n);
            for &s in chunk {
                scratch.accumulate(topo, s, &mut acc);
            }
            acc
        })
        .collect();
    let mut total = vec![0.0; n];
    for part in partials {
        for (t, p) in total.iter_mut().zip(part) {
            *t += p;
        }
    }
    let norm = ((n - 1) * (n - 2)) as f64;
    total.iter_mut().for_each(|v| *v /= norm);
    Ok(total)
}

struct BrandesScratch {
    dist: Vec<i64>,
    sigma: Vec<f64>,
    delta: Vec<f64>,
    preds: Vec<Vec<usize>>,
    order: Vec<usize>,
    queue: VecDeque<usize>,
}

impl BrandesScratch {
    fn new(n: usize) -> Self {
        BrandesScratch {
            dist: vec![-1; n],
            sigma: vec![0.0; n],
            delta: vec![0.0; n],
            preds: vec![Vec::new(); n],
            order: Vec::with_capacity(n),
            queue: VecDeque::with_capacity(n),
        }
    }

    fn accumulate(&mut self, topo: &Topology, s: usize, acc: &mut [f64]) {
        self.dist.fill(-1);
        self.sigma.fill(0.0);
        self.delta.fill(0.0);
        self.preds.iter_mut().for_each(Vec::clear);
        self.order.clear();

        self.dist[s] = 0;
        self.sigma[s] = 1.0;
        self.queue.push_back(s);
        while let Some(v) = self.queue.pop_front() {
            self.order.push(v);
            for &w in &topo.out_adj[v] {
                if self.dist[w] < 0 {
                    self.dist[w] = self.dist[v] + 1;
                    self.queue.push_back(w);
                }
                if self.dist[w] == self.dist[v] + 1 {
                    self.sigma[w] += self.sigma[v];
                    self.preds[w].push(v);
                }
            }
        }
        for &w in self.order.iter().rev() {
            for &v in &self.preds[w] {
                self.delta[v] += self.sigma[v] / self.sigma[w] * (1.0 + self.delta[w]);
            }
            if w != s {
                acc[w] += self.delta[w];
            }
        }
    }
}

/// Harmonic closeness over outgoing directed hops:
/// `(1/(N-1)) * sum over u != v of 1/d(v, u)`, unreachable nodes adding 0.
pub fn closeness(g: &CommGraph) -> Result<BTreeMap<NodeId, f64>> {
    let topo = g.topology();
    closeness_topology(&topo).map(|v| to_map(&topo, v))
}

pub fn closeness_topology(topo: &Topology) -> Result<Vec<f64>> {
    require_nonempty(topo)?;
    let n = topo.len();
    if n == 1 {
        return Ok(vec![0.0]);
    }
    let sources: Vec<usize> = (0..n).collect();
    let values: Vec<f64> = sources
        .par_chunks(SOURCE_CHUNK)
        .flat_map_iter(|chunk| {
            let mut dist = vec![usize::MAX; n];
            let mut queue = VecDeque::with_capacity(n);
            chunk
                .iter()
                .map(|&s| {
                    dist.fill(usize::MAX);
                    dist[s] = 0;
                    queue.push_back(s);
                    let mut sum = 0.0;
                    while let Some(v) = queue.pop_front() {
                        if v != s {
                            sum += 1.0 / dist[v] as f64;
                        }
                        for &w in &topo.out_adj[v] {
                            if dist[w] == usize::MAX {
                                dist[w] = dist[v] + 1;
                                queue.push_back(w);
                            }
                        }
                    }
                    sum / (n - 1) as f64
                })
                .collect::<Vec<_>>()
        })
        .collect();
    Ok(values)
}

/// Affine min-max scaling into [0, 1]. A constant input maps to all zeros.
pub fn scale_unit(values: &BTreeMap<NodeId, f64>) -> BTreeMap<NodeId, f64> {
    let scaled = scale_slice(&values.values().copied().collect::<Vec<_>>());
    values.keys().cloned().zip(scaled).collect()
}

pub fn scale_slice(values: &[f64]) -> Vec<f64> {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = max - min;
    if span.is_nan() || span <= 0.0 {
        return vec![0.0; values.len()];
    }
    values
        .iter()
        .map(|v| ((v - min) / span).clamp(0.0, 1.0))
        .collect()
}

/// Computes all three metrics for every node and scales each to [0, 1].
pub fn compute_metrics(g: &CommGraph, cfg: PageRankConfig) -> Result<Vec<MetricVector>> {
    let topo = g.topology();
    let pr = pagerank_topology(&topo, cfg)?;
    let bt = betweenness_topology(&topo)?;
    let cl = closeness_topology(&topo)?;
    let (spr, sbt, scl) = (scale_slice(&pr), scale_slice(&bt), scale_slice(&cl));
    Ok(topo
        .ids
        .iter()
        .enumerate()
        .map(|(i, id)| MetricVector {
            node_id: id.clone(),
            pagerank: spr[i],
            betweenness: sbt[i],
            closeness: scl[i],
            raw: RawMetrics {
                pagerank: pr[i],
                betweenness: bt[i],
                closeness: cl[i],
            },
        })
        .collect())
}

const METRICS_HEADER: &str =
    "node_id\tpagerank\tbetweenness\tcloseness\tpagerank_raw\tbetweenness_raw\tcloseness_raw";

pub fn write_metrics<W: Write>(metrics: &[MetricVector], mut out: W) -> Result<()> {
    let io = |e| Error::io("<metrics>", e);
    writeln!(out, "{METRICS_HEADER}").map_err(io)?;
    for m in metrics {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            m.node_id,
            m.pagerank,
            m.betweenness,
            m.closeness,
            m.raw.pagerank,
            m.raw.betweenness,
            m.raw.closeness
        )
        .map_err(io)?;
    }
    Ok(())
}

pub fn read_metrics<R: BufRead>(input: R) -> Result<Vec<MetricVector>> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line.map_err(|e| Error::io("<metrics>", e))?;
        if i == 0 {
            if line != METRICS_HEADER {
                return Err(Error::InvalidInput(format!("bad metrics header {line:?}")));
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 7 {
            return Err(Error::InvalidInput(format!("bad metrics line {line:?}")));
        }
        let num = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|_| Error::InvalidInput(format!("bad number {s:?} in metrics file")))
        };
        out.push(MetricVector {
            node_id: NodeId::new(f[0]),
            pagerank: num(f[1])?,
            betweenness: num(f[2])?,
            closeness: num(f[3])?,
            raw: RawMetrics {
                pagerank: num(f[4])?,
                betweenness: num(f[5])?,
                closeness: num(f[6])?,
            },
        });
    }
    Ok(out)
}
