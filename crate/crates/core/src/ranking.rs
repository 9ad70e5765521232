use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::graph::NodeId;

/// A total order over founders (best first) with a score in [0, 1] for
/// each. Equal scores are ordered by founder id.
#[derive(Debug, Clone, PartialEq)]
pub struct Ranking {
    order: Vec<NodeId>,
    scores: BTreeMap<NodeId, f64>,
}

impl Ranking {
    /// Orders founders by descending score, ties by id. Scores are clamped
    /// into [0, 1]; NaN is rejected.
    pub fn from_scores(scores: BTreeMap<NodeId, f64>) -> Result<Ranking> {
        if let Some((f, _)) = scores.iter().find(|(_, s)| s.is_nan()) {
            return Err(Error::InvalidInput(format!("score for {f} is NaN")));
        }
        let scores: BTreeMap<NodeId, f64> = scores
            .into_iter()
            .map(|(f, s)| (f, s.clamp(0.0, 1.0)))
            .collect();
        let mut order: Vec<NodeId> = scores.keys().cloned().collect();
        order.sort_by(|a, b| scores[b].total_cmp(&scores[a]).then_with(|| a.cmp(b)));
        Ok(Ranking { order, scores })
    }

    /// A ranking whose scores are the rank scaled to [0, 1]: the founder at
    /// 0-based position `r` scores `1 - r/(N-1)`; a lone founder scores 1.
    pub fn from_order(order: Vec<NodeId>) -> Result<Ranking> {
        let n = order.len();
        let mut scores = BTreeMap::new();
        for (r, f) in order.iter().enumerate() {
            let s = if n < 2 {
                1.0
            } else {
                1.0 - r as f64 / (n - 1) as f64
            };
            if scores.insert(f.clone(), s).is_some() {
                return Err(Error::InvalidInput(format!("founder {f} ranked twice")));
            }
        }
        Ok(Ranking { order, scores })
    }

    pub fn order(&self) -> &[NodeId] {
        &self.order
    }

    pub fn scores(&self) -> &BTreeMap<NodeId, f64> {
        &self.scores
    }

    pub fn score(&self, founder: &NodeId) -> Option<f64> {
        self.scores.get(founder).copied()
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// 0-based position of each founder.
    pub fn positions(&self) -> BTreeMap<&NodeId, usize> {
        self.order.iter().enumerate().map(|(i, f)| (f, i)).collect()
    }

    pub fn reversed(&self) -> Ranking {
        let order: Vec<NodeId> = self.order.iter().rev().cloned().collect();
        let n = order.len();
        let scores = order
            .iter()
            .enumerate()
            .map(|(r, f)| {
                let s = if n < 2 {
                    1.0
                } else {
                    1.0 - r as f64 / (n - 1) as f64
                };
                (f.clone(), s)
            })
            .collect();
        Ranking { order, scores }
    }

    pub fn write_to<W: Write>(&self, mut out: W, method: &str) -> Result<()> {
        let io = |e| Error::io("<ranking>", e);
        writeln!(out, "# founderrank ranking method={method}").map_err(io)?;
        writeln!(out, "rank\tfounder_id\tscore").map_err(io)?;
        for (i, f) in self.order.iter().enumerate() {
            writeln!(out, "{i}\t{f}\t{}", self.scores[f]).map_err(io)?;
        }
        Ok(())
    }

    /// Reads a ranking file. The listed order is kept as-is.
    pub fn read_from<R: BufRead>(input: R) -> Result<Ranking> {
        let mut order = Vec::new();
        let mut scores = BTreeMap::new();
        let mut saw_header = false;
        for line in input.lines() {
            let line = line.map_err(|e| Error::io("<ranking>", e))?;
            if line.starts_with('#') || line.is_empty() {
                continue;
            }
            if !saw_header {
                if line != "rank\tfounder_id\tscore" {
                    return Err(Error::InvalidInput(format!("bad ranking header {line:?}")));
                }
                saw_header = true;
                continue;
            }
            let f: Vec<&str> = line.split('\t').collect();
            let bad = || Error::InvalidInput(format!("bad ranking line {line:?}"));
            let [rank, founder, score] = f.as_slice() else {
                return Err(bad());
            };
            let rank: usize = rank.parse().map_err(|_| bad())?;
            let score: f64 = score.parse().map_err(|_| bad())?;
            if rank != order.len() || !(0.0..=1.0).contains(&score) {
                return Err(bad());
            }
            let id = NodeId::new(*founder);
            if scores.insert(id.clone(), score).is_some() {
                return Err(Error::InvalidInput(format!(
                    "founder {founder} ranked twice"
                )));
            }
            order.push(id);
        }
        Ok(Ranking { order, scores })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ties_break_by_id() {
        let scores = [("b", 0.5), ("a", 0.5), ("c", 0.9)]
            .iter()
            .map(|(k, v)| (NodeId::new(*k), *v))
            .collect();
        let r = Ranking::from_scores(scores).unwrap();
        let ids: Vec<&str> = r.order().iter().map(NodeId::as_str).collect();
        assert_eq!(ids, ["c", "a", "b"]);
    }

    #[test]
    fn order_scores_are_scaled_ranks() {
        let r = Ranking::from_order(vec!["x".into(), "y".into(), "z".into()]).unwrap();
        assert_eq!(r.score(&"x".into()), Some(1.0));
        assert_eq!(r.score(&"y".into()), Some(0.5));
        assert_eq!(r.score(&"z".into()), Some(0.0));
    }

    #[test]
    fn file_round_trip() {
        let scores = [("a", 0.1), ("b", 0.7), ("c", 1.0 / 3.0)]
            .iter()
            .map(|(k, v)| (NodeId::new(*k), *v))
            .collect();
        let r = Ranking::from_scores(scores).unwrap();
        let mut buf = Vec::new();
        r.write_to(&mut buf, "test").unwrap();
        assert_eq!(Ranking::read_from(buf.as_slice()).unwrap(), r);
    }
}
