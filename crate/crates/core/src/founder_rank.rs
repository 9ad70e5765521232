//! Founder rankings: the weighted sort-index baseline, a random model,
//! Naive and Weighted FounderRank over graph metrics, and the public
//! funding graph used by the investment-augmented variants.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::centrality::MetricVector;
use crate::error::{Error, Result};
use crate::graph::{CommGraph, LabelClaims, NodeId};
use crate::ranking::Ranking;
use crate::regression::{fit_with_intercept, RegressionFit};

/// Per-founder fundraising features. Money amounts share one currency unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FounderProfile {
    pub founder_id: NodeId,
    pub current_round_raised: f64,
    pub previous_rounds_raised: f64,
    pub industry_avg_round: f64,
    /// Investors with two or more exchanged emails during the raise.
    pub interested_investor_count: u32,
    pub waitlist_responded_count: u32,
    pub avg_incoming_sentiment: f64,
    pub job_ipo: u32,
    pub job_acq: u32,
    pub exec_ipo: u32,
    pub exec_acq: u32,
    pub adv_ipo: u32,
    pub adv_acq: u32,
}

impl FounderProfile {
    /// A profile with every feature at zero and unit industry average.
    pub fn empty(founder_id: impl Into<NodeId>) -> Self {
        FounderProfile {
            founder_id: founder_id.into(),
            current_round_raised: 0.0,
            previous_rounds_raised: 0.0,
            industry_avg_round: 1.0,
            interested_investor_count: 0,
            waitlist_responded_count: 0,
            avg_incoming_sentiment: 0.0,
            job_ipo: 0,
            job_acq: 0,
            exec_ipo: 0,
            exec_acq: 0,
            adv_ipo: 0,
            adv_acq: 0,
        }
    }

    pub fn exits(&self) -> [u32; 6] {
        [
            self.job_ipo,
            self.job_acq,
            self.exec_ipo,
            self.exec_acq,
            self.adv_ipo,
            self.adv_acq,
        ]
    }

    pub fn affiliated_exits(&self) -> u32 {
        self.exits().iter().sum()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| {
            Err(Error::InvalidInput(format!(
                "profile {}: {what}",
                self.founder_id
            )))
        };
        if !(self.industry_avg_round > 0.0 && self.industry_avg_round.is_finite()) {
            return bad("industry_avg_round must be positive");
        }
        if !(self.current_round_raised >= 0.0 && self.previous_rounds_raised >= 0.0) {
            return bad("amounts raised must be non-negative");
        }
        if !(-1.0..=1.0).contains(&self.avg_incoming_sentiment) {
            return bad("avg_incoming_sentiment outside [-1, 1]");
        }
        Ok(())
    }
}

/// Total raised, scaled by the industry's average round size.
pub fn scaled_funding(p: &FounderProfile) -> f64 {
    (p.current_round_raised + p.previous_rounds_raised) / p.industry_avg_round
}

/// Reads a profiles CSV whose header names the [`FounderProfile`] fields.
pub fn read_profiles<R: std::io::Read>(input: R) -> Result<Vec<FounderProfile>> {
    let mut rdr = csv::Reader::from_reader(input);
    let mut out: Vec<FounderProfile> = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for row in rdr.deserialize() {
        let p: FounderProfile = row?;
        p.validate()?;
        if !seen.insert(p.founder_id.clone()) {
            return Err(Error::InvalidInput(format!(
                "duplicate profile {}",
                p.founder_id
            )));
        }
        out.push(p);
    }
    Ok(out)
}

pub fn write_profiles<W: Write>(profiles: &[FounderProfile], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for p in profiles {
        w.serialize(p)?;
    }
    w.flush().map_err(|e| Error::io("<profiles>", e))?;
    Ok(())
}

/// Profile-derived quantities a baseline can weight. Larger is better for
/// every one of them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BaselineMetric {
    AggregateFunding,
    InterestedInvestors,
    WaitlistResponded,
    Sentiment,
    AffiliatedExits,
}

impl BaselineMetric {
    pub const ALL: [BaselineMetric; 5] = [
        BaselineMetric::AggregateFunding,
        BaselineMetric::InterestedInvestors,
        BaselineMetric::WaitlistResponded,
        BaselineMetric::Sentiment,
        BaselineMetric::AffiliatedExits,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BaselineMetric::AggregateFunding => "aggregate_funding",
            BaselineMetric::InterestedInvestors => "interested_investors",
            BaselineMetric::WaitlistResponded => "waitlist_responded",
            BaselineMetric::Sentiment => "sentiment",
            BaselineMetric::AffiliatedExits => "affiliated_exits",
        }
    }

    pub fn value(self, p: &FounderProfile) -> f64 {
        match self {
            BaselineMetric::AggregateFunding => scaled_funding(p),
            BaselineMetric::InterestedInvestors => p.interested_investor_count as f64,
            BaselineMetric::WaitlistResponded => p.waitlist_responded_count as f64,
            BaselineMetric::Sentiment => p.avg_incoming_sentiment,
            BaselineMetric::AffiliatedExits => p.affiliated_exits() as f64,
        }
    }
}

impl fmt::Display for BaselineMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BaselineMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BaselineMetric::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::UnknownMetric(s.to_string()))
    }
}

/// Ordered `(metric name, weight)` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineWeights(pub Vec<(String, f64)>);

impl BaselineWeights {
    /// Aggregate funding 4, interested investors 3, waitlist responses 2,
    /// sentiment 1.
    pub fn email() -> Self {
        BaselineWeights(vec![
            ("aggregate_funding".into(), 4.0),
            ("interested_investors".into(), 3.0),
            ("waitlist_responded".into(), 2.0),
            ("sentiment".into(), 1.0),
        ])
    }

    /// Affiliated exits 4, aggregate funding 1.
    pub fn funding() -> Self {
        BaselineWeights(vec![
            ("affiliated_exits".into(), 4.0),
            ("aggregate_funding".into(), 1.0),
        ])
    }

    pub fn scaled(&self, factor: f64) -> Self {
        BaselineWeights(
            self.0
                .iter()
                .map(|(m, w)| (m.clone(), w * factor))
                .collect(),
        )
    }

    fn resolve(&self) -> Result<Vec<(BaselineMetric, f64)>> {
        self.0
            .iter()
            .map(|(name, w)| {
                let m: BaselineMetric = name.parse()?;
                if !(*w > 0.0 && w.is_finite()) {
                    return Err(Error::InvalidInput(format!(
                        "weight for {name} must be positive"
                    )));
                }
                Ok((m, *w))
            })
            .collect()
    }

    /// Parses `metric weight` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (Some(name), Some(w), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(Error::InvalidInput(format!("bad weight line {line:?}")));
            };
            let w: f64 = w
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad weight {w:?}")))?;
            pairs.push((name.to_string(), w));
        }
        let weights = BaselineWeights(pairs);
        weights.resolve()?;
        Ok(weights)
    }
}

/// Sort index per founder: the number of founders with a strictly larger
/// value, so tied founders share the best index of their group.
pub fn sort_index(values: &[f64]) -> Vec<usize> {
    let mut sorted: Vec<f64> = values.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    values
        .iter()
        .map(|v| sorted.partition_point(|s| s.total_cmp(v).is_gt()))
        .collect()
}

/// Weighted sort-index sums; lower is better.
pub fn baseline_sums(
    profiles: &[FounderProfile],
    weights: &BaselineWeights,
) -> Result<BTreeMap<NodeId, f64>> {
    let resolved = weights.resolve()?;
    let mut sums = vec![0.0; profiles.len()];
    for (metric, w) in resolved {
        let values: Vec<f64> = profiles.iter().map(|p| metric.value(p)).collect();
        for (s, idx) in sums.iter_mut().zip(sort_index(&values)) {
            *s += idx as f64 * w;
        }
    }
    let mut out = BTreeMap::new();
    for (p, s) in profiles.iter().zip(sums) {
        if out.insert(p.founder_id.clone(), s).is_some() {
            return Err(Error::InvalidInput(format!(
                "duplicate profile {}",
                p.founder_id
            )));
        }
    }
    Ok(out)
}

const TIE_QUANTUM: f64 = 1e9;

/// Orders founders by ascending weighted sort-index sum, ties by id. The
/// ranking's scores are the scaled ranks.
pub fn baseline_rank(profiles: &[FounderProfile], weights: &BaselineWeights) -> Result<Ranking> {
    let sums = baseline_sums(profiles, weights)?;
    // Sums normalized by total weight and quantized, so founders tied in
    // exact arithmetic stay tied whatever the weight scale.
    let total: f64 = weights.0.iter().map(|(_, w)| w).sum();
    let key = |id: &NodeId| (sums[id] / total * TIE_QUANTUM).round() as i64;
    let mut order: Vec<NodeId> = sums.keys().cloned().collect();
    order.sort_by(|a, b| key(a).cmp(&key(b)).then_with(|| a.cmp(b)));
    Ranking::from_order(order)
}

pub fn email_baseline(profiles: &[FounderProfile]) -> Result<Ranking> {
    baseline_rank(profiles, &BaselineWeights::email())
}

pub fn fri_baseline(profiles: &[FounderProfile]) -> Result<Ranking> {
    baseline_rank(profiles, &BaselineWeights::funding())
}

/// Uniform [0, 1) scores drawn in the given founder order.
pub fn random_rank(founders: &[NodeId], seed: u64) -> Result<Ranking> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut scores = BTreeMap::new();
    for f in founders {
        if scores.insert(f.clone(), rng.gen::<f64>()).is_some() {
            return Err(Error::InvalidInput(format!("founder {f} listed twice")));
        }
    }
    Ranking::from_scores(scores)
}

/// Mean of the three scaled metrics.
pub fn nfr_score(m: &MetricVector) -> f64 {
    (m.pagerank + m.betweenness + m.closeness) / 3.0
}

fn founder_metrics<'a>(
    metrics: &'a [MetricVector],
    founders: &[NodeId],
) -> Result<Vec<&'a MetricVector>> {
    let by_id: BTreeMap<&NodeId, &MetricVector> = metrics.iter().map(|m| (&m.node_id, m)).collect();
    founders
        .iter()
        .map(|f| {
            by_id
                .get(f)
                .copied()
                .ok_or_else(|| Error::UnknownNode(f.clone()))
        })
        .collect()
}

pub fn nfr_rank(metrics: &[MetricVector], founders: &[NodeId]) -> Result<Ranking> {
    let scores = founder_metrics(metrics, founders)?
        .into_iter()
        .map(|m| (m.node_id.clone(), nfr_score(m)))
        .collect();
    Ranking::from_scores(scores)
}

pub const METRIC_NAMES: [&str; 3] = ["pagerank", "betweenness", "closeness"];

pub fn metric_row(m: &MetricVector) -> Vec<f64> {
    vec![m.pagerank, m.betweenness, m.closeness]
}

/// Least-squares fit of baseline scores on scaled metrics, with intercept.
pub fn wfr_fit(features: &[Vec<f64>], names: &[String], target: &[f64]) -> Result<RegressionFit> {
    fit_with_intercept(features, names, target)
}

/// Fits the three metrics of each baseline founder to their baseline scores
/// and ranks founders by fitted score, clamped to [0, 1]. Metrics constant
/// across founders carry no information and are left out of the fit.
pub fn wfr_rank(metrics: &[MetricVector], baseline: &Ranking) -> Result<(RegressionFit, Ranking)> {
    let founders: Vec<NodeId> = baseline.order().to_vec();
    let rows: Vec<Vec<f64>> = founder_metrics(metrics, &founders)?
        .into_iter()
        .map(metric_row)
        .collect();
    let keep: Vec<usize> = (0..METRIC_NAMES.len())
        .filter(|&j| rows.iter().any(|r| r[j] != rows[0][j]))
        .collect();
    let names: Vec<String> = keep.iter().map(|&j| METRIC_NAMES[j].to_string()).collect();
    let features: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| keep.iter().map(|&j| r[j]).collect())
        .collect();
    let target: Vec<f64> = founders
        .iter()
        .map(|f| baseline.score(f).expect("founder from baseline"))
        .collect();
    let fit = wfr_fit(&features, &names, &target)?;
    let scores = founders
        .into_iter()
        .zip(&features)
        .map(|(f, row)| (f, fit.predict(row)))
        .collect();
    Ok((fit, Ranking::from_scores(scores)?))
}

/// Builds the public funding graph over person-id nodes. Each investment
/// and each co-founding relation adds one edge in both directions.
pub fn build_funding_graph(
    investments: &[(String, String)],
    cofoundings: &[(String, String)],
    coinvestings: Option<&[(String, String)]>,
) -> Result<CommGraph> {
    let node = |id: &String| {
        if id.trim().is_empty() {
            return Err(Error::InvalidInput("empty person id".into()));
        }
        Ok(NodeId::person(id.trim()))
    };
    let mut g = CommGraph::new();
    let both_ways = |g: &mut CommGraph, a: NodeId, b: NodeId| {
        g.add_edge(a.clone(), b.clone(), 1);
        g.add_edge(b, a, 1);
    };
    for (f, i) in investments {
        let (f, i) = (node(f)?, node(i)?);
        g.claim(f.clone(), LabelClaims::FOUNDER);
        g.claim(i.clone(), LabelClaims::INVESTOR);
        both_ways(&mut g, f, i);
    }
    for (a, b) in cofoundings {
        let (a, b) = (node(a)?, node(b)?);
        g.claim(a.clone(), LabelClaims::FOUNDER);
        g.claim(b.clone(), LabelClaims::FOUNDER);
        both_ways(&mut g, a, b);
    }
    for (a, b) in coinvestings.unwrap_or(&[]) {
        let (a, b) = (node(a)?, node(b)?);
        g.claim(a.clone(), LabelClaims::INVESTOR);
        g.claim(b.clone(), LabelClaims::INVESTOR);
        both_ways(&mut g, a, b);
    }
    Ok(g)
}

/// Reads `kind,a,b` rows where `kind` is `invest` (founder, investor),
/// `cofound` or `coinvest`.
pub fn read_funding_records<R: std::io::Read>(input: R) -> Result<FundingRecords> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(input);
    let mut rec = FundingRecords::default();
    for row in rdr.records() {
        let row = row?;
        let field = |i: usize| row.get(i).unwrap_or("").trim().to_string();
        let pair = (field(1), field(2));
        match field(0).as_str() {
            "invest" => rec.investments.push(pair),
            "cofound" => rec.cofoundings.push(pair),
            "coinvest" => rec.coinvestings.push(pair),
            other => {
                return Err(Error::InvalidInput(format!(
                    "unknown funding record kind {other:?}"
                )))
            }
        }
    }
    Ok(rec)
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FundingRecords {
    pub investments: Vec<(String, String)>,
    pub cofoundings: Vec<(String, String)>,
    pub coinvestings: Vec<(String, String)>,
}

/// Merges the funding graph into the email graph. Mapped person nodes take
/// the identity of their email address; everything else is added as-is.
/// Edge weights add and label evidence merges.
pub fn overlay(
    email_g: &CommGraph,
    funding_g: &CommGraph,
    identity_map: &BTreeMap<String, String>,
) -> Result<CommGraph> {
    let mut by_address: BTreeMap<String, &String> = BTreeMap::new();
    let mut mapping: BTreeMap<NodeId, NodeId> = BTreeMap::new();
    for (person, address) in identity_map {
        let address = address.trim().to_lowercase();
        if let Some(first) = by_address.insert(address.clone(), person) {
            let (first, second) = if first < person {
                (first, person)
            } else {
                (person, first)
            };
            return Err(Error::IdentityConflict {
                first: first.clone(),
                second: second.clone(),
                address,
            });
        }
        mapping.insert(NodeId::person(person), NodeId::new(address));
    }
    let map = |n: &NodeId| mapping.get(n).cloned().unwrap_or_else(|| n.clone());
    let mut g = email_g.clone();
    for n in funding_g.nodes() {
        g.claim(map(n), funding_g.claims(n).unwrap_or_default());
    }
    for (s, d, w) in funding_g.edges() {
        g.add_edge(map(s), map(d), w);
    }
    Ok(g)
}
