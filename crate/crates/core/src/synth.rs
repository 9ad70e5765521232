//! Seeded synthetic worlds: a communication graph with planted structure,
//! the email log that produces it, founder profiles, an investor catalog
//! and raise timelines, together with the ground truth used to build them.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::Path;

use rand::seq::{IteratorRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analytics::{write_timelines, RaiseTimeline};
use crate::catalog::{Catalog, CompanyRecord, FirmRecord, FundStage, Industry, InvestorRecord};
use crate::centrality::{compute_metrics, MetricVector, PageRankConfig};
use crate::error::{Error, Result};
use crate::founder_rank::{write_profiles, FounderProfile};
use crate::graph::{write_labels, CommGraph, Label, LabelClaims, NodeId};
use crate::ingest::RawEvent;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EdgeModel {
    /// Each arriving node links to `edges_per_node` distinct earlier nodes
    /// chosen with probability proportional to degree + 1.
    PreferentialAttachment { edges_per_node: usize },
    /// Every ordered pair within a community gets an edge with probability `p`.
    ErdosRenyi { p: f64 },
}

impl Default for EdgeModel {
    fn default() -> Self {
        EdgeModel::PreferentialAttachment { edges_per_node: 2 }
    }
}

/// Weights of the planted linear founder score over scaled metrics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlantedBaseline {
    pub pagerank: f64,
    pub betweenness: f64,
    pub closeness: f64,
    pub intercept: f64,
}

impl Default for PlantedBaseline {
    fn default() -> Self {
        PlantedBaseline {
            pagerank: 0.3,
            betweenness: 0.0,
            closeness: 0.7,
            intercept: 0.0,
        }
    }
}

impl PlantedBaseline {
    pub fn score(&self, m: &MetricVector) -> f64 {
        self.intercept
            + self.pagerank * m.pagerank
            + self.betweenness * m.betweenness
            + self.closeness * m.closeness
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthSpec {
    pub seed: u64,
    pub founders: usize,
    pub investors: usize,
    /// People who are neither founders nor investors.
    pub persons: usize,
    pub model: EdgeModel,
    /// Disconnected groups the nodes are split into.
    pub communities: usize,
    /// Edge weights are uniform in `1..=max_weight`.
    pub max_weight: u64,
    pub baseline: PlantedBaseline,
    pub firms: usize,
    /// Newsletter-style messages mixed into the event log.
    pub bulk_messages: usize,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            seed: 0,
            founders: 50,
            investors: 50,
            persons: 400,
            model: EdgeModel::default(),
            communities: 1,
            max_weight: 4,
            baseline: PlantedBaseline::default(),
            firms: 40,
            bulk_messages: 20,
        }
    }
}

impl SynthSpec {
    pub fn from_toml(text: &str) -> Result<SynthSpec> {
        let spec: SynthSpec =
            toml::from_str(text).map_err(|e| Error::InvalidInput(format!("synth spec: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("spec serializes")
    }

    pub fn node_count(&self) -> usize {
        self.founders + self.investors + self.persons
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidInput(format!("synth spec: {m}")));
        if self.founders < 3 || self.investors == 0 || self.firms == 0 {
            return bad("need at least 3 founders, 1 investor and 1 firm");
        }
        if self.max_weight == 0 {
            return bad("max_weight must be positive");
        }
        if self.communities == 0 || self.communities * 2 > self.node_count() {
            return bad("communities must be between 1 and half the node count");
        }
        match self.model {
            EdgeModel::PreferentialAttachment { edges_per_node: 0 } => {
                bad("edges_per_node must be positive")
            }
            EdgeModel::ErdosRenyi { p } if !(0.0..=1.0).contains(&p) => bad("p must lie in [0, 1]"),
            _ => Ok(()),
        }
    }

    /// Expected number of edges under the edge model, summed over the
    /// planted communities.
    pub fn expected_edges(&self) -> f64 {
        community_sizes(self.node_count(), self.communities)
            .into_iter()
            .map(|n| match self.model {
                EdgeModel::PreferentialAttachment { edges_per_node } => {
                    (0..n).map(|i| i.min(edges_per_node)).sum::<usize>() as f64
                }
                EdgeModel::ErdosRenyi { p } => p * (n * n.saturating_sub(1)) as f64,
            })
            .sum()
    }
}

fn community_sizes(n: usize, k: usize) -> Vec<usize> {
    (0..k).map(|c| n / k + usize::from(c < n % k)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    /// Planted community index of every node.
    pub communities: BTreeMap<NodeId, usize>,
    /// Planted metric weights, plus `intercept`.
    pub coefficients: BTreeMap<String, f64>,
    /// Planted score of each founder.
    pub planted_scores: BTreeMap<NodeId, f64>,
}

#[derive(Debug, Clone)]
pub struct SynthWorld {
    pub graph: CommGraph,
    pub events: Vec<RawEvent>,
    pub profiles: Vec<FounderProfile>,
    pub catalog: Catalog,
    pub timelines: Vec<RaiseTimeline>,
    pub metrics: Vec<MetricVector>,
    pub ground_truth: GroundTruth,
}

impl SynthWorld {
    pub fn founders(&self) -> Vec<NodeId> {
        self.graph.nodes_with_label(Label::Founder)
    }
}

const CITIES: [&str; 12] = [
    "San Francisco",
    "New York",
    "Boston",
    "Los Angeles",
    "Seattle",
    "Austin",
    "Chicago",
    "London",
    "Berlin",
    "Toronto",
    "Paris",
    "Tel Aviv",
];
const US_CITIES: usize = 7;
const TOPICS: [&str; 10] = [
    "ai",
    "crypto",
    "climate",
    "devtools",
    "fintech",
    "health",
    "marketplaces",
    "robotics",
    "security",
    "consumer",
];
const FIRM_WORDS: [&str; 12] = [
    "Alder", "Birch", "Cedar", "Delta", "Ember", "Flint", "Granite", "Harbor", "Iron", "Juniper",
    "Kestrel", "Lumen",
];
const FIRST_NAMES: [&str; 12] = [
    "Anna", "Ben", "Chloe", "Dev", "Elena", "Farid", "Grace", "Hiro", "Ines", "Jonah", "Kira",
    "Luis",
];
const LAST_NAMES: [&str; 12] = [
    "Adler", "Brooks", "Chen", "Diaz", "Evans", "Fischer", "Gupta", "Hale", "Ito", "Jensen",
    "Kowalski", "Lopez",
];

/// Epoch seconds the synthetic timeline starts at.
const EPOCH: i64 = 1_500_000_000;
const DAY: i64 = 86_400;

fn founder_id(i: usize) -> NodeId {
    NodeId::new(format!("f{i:04}@founders.example"))
}

fn investor_id(i: usize, firms: usize) -> NodeId {
    NodeId::new(format!("inv{i:04}@firm{:03}.example", i % firms))
}

fn person_id(i: usize) -> NodeId {
    NodeId::new(format!("p{i:04}@people.example"))
}

pub fn generate(spec: &SynthSpec) -> Result<SynthWorld> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let mut ids: Vec<(NodeId, LabelClaims)> = Vec::with_capacity(spec.node_count());
    ids.extend((0..spec.founders).map(|i| (founder_id(i), LabelClaims::FOUNDER)));
    ids.extend((0..spec.investors).map(|i| (investor_id(i, spec.firms), LabelClaims::INVESTOR)));
    ids.extend((0..spec.persons).map(|i| (person_id(i), LabelClaims::default())));
    ids.shuffle(&mut rng);

    let mut graph = CommGraph::new();
    let mut communities = BTreeMap::new();
    let mut start = 0;
    for (c, size) in community_sizes(ids.len(), spec.communities)
        .into_iter()
        .enumerate()
    {
        let members = &ids[start..start + size];
        start += size;
        for (id, claims) in members {
            graph.claim(id.clone(), *claims);
            communities.insert(id.clone(), c);
        }
        let edges = match spec.model {
            EdgeModel::PreferentialAttachment { edges_per_node } => {
                preferential_attachment(size, edges_per_node, &mut rng)
            }
            EdgeModel::ErdosRenyi { p } => erdos_renyi(size, p, &mut rng),
        };
        for (a, b) in edges {
            let w = rng.gen_range(1..=spec.max_weight);
            graph.add_edge(members[a].0.clone(), members[b].0.clone(), w);
        }
    }

    let metrics = compute_metrics(&graph, PageRankConfig::default())?;
    let founders = graph.nodes_with_label(Label::Founder);
    let by_id: BTreeMap<&NodeId, &MetricVector> = metrics.iter().map(|m| (&m.node_id, m)).collect();
    let planted_scores: BTreeMap<NodeId, f64> = founders
        .iter()
        .map(|f| (f.clone(), spec.baseline.score(by_id[f])))
        .collect();

    let events = events_for(&graph, spec.bulk_messages, &mut rng);
    let profiles = profiles_for(&planted_scores, &mut rng);
    let catalog = catalog_for(spec, &founders, &mut rng)?;
    let timelines = timelines_for(&founders, &mut rng);

    let b = spec.baseline;
    let coefficients = BTreeMap::from([
        ("pagerank".to_string(), b.pagerank),
        ("betweenness".to_string(), b.betweenness),
        ("closeness".to_string(), b.closeness),
        ("intercept".to_string(), b.intercept),
    ]);
    Ok(SynthWorld {
        graph,
        events,
        profiles,
        catalog,
        timelines,
        metrics,
        ground_truth: GroundTruth {
            communities,
            coefficients,
            planted_scores,
        },
    })
}

/// Undirected attachment pairs oriented at random.
fn preferential_attachment(n: usize, m: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    // each node appears once per unit of (degree + 1)
    let mut urn: Vec<usize> = Vec::new();
    for v in 0..n {
        let mut targets = BTreeSet::new();
        let want = m.min(v);
        while targets.len() < want {
            targets.insert(urn[rng.gen_range(0..urn.len())]);
        }
        urn.push(v);
        for &u in &targets {
            urn.push(u);
            urn.push(v);
            if rng.gen_bool(0.5) {
                edges.push((v, u));
            } else {
                edges.push((u, v));
            }
        }
    }
    edges
}

fn erdos_renyi(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if a != b && rng.gen_bool(p) {
                edges.push((a, b));
            }
        }
    }
    edges
}

/// One message per unit of edge weight, plus bulk messages that ingestion
/// should drop, in ascending timestamp order.
fn events_for(graph: &CommGraph, bulk: usize, rng: &mut ChaCha8Rng) -> Vec<RawEvent> {
    let mut events = Vec::new();
    let nodes: Vec<&NodeId> = graph.nodes().collect();
    for (thread, (s, d, w)) in graph.edges().enumerate() {
        for _ in 0..w {
            events.push(RawEvent {
                thread_id: format!("t{thread:06}"),
                from_addr: s.to_string(),
                to: vec![d.to_string()],
                body_text: Some("Following up on our conversation.".into()),
                ..RawEvent::default()
            });
        }
    }
    for i in 0..bulk {
        let to = nodes
            .iter()
            .choose(rng)
            .map(|n| n.to_string())
            .unwrap_or_default();
        events.push(RawEvent {
            thread_id: format!("bulk{i:05}"),
            from_addr: "noreply@newsletter.example".into(),
            from_name: "Weekly Digest".into(),
            to: vec![to],
            headers: vec!["List-Unsubscribe".into()],
            body_text: Some("Top stories this week. Unsubscribe at any time.".into()),
            ..RawEvent::default()
        });
    }
    events.shuffle(rng);
    for (i, e) in events.iter_mut().enumerate() {
        e.message_id = format!("m{i:07}");
        e.timestamp = EPOCH + 60 * i as i64;
    }
    events
}

fn profiles_for(planted: &BTreeMap<NodeId, f64>, rng: &mut ChaCha8Rng) -> Vec<FounderProfile> {
    let mut out = Vec::new();
    for (f, &s) in planted {
        let noise = |rng: &mut ChaCha8Rng, scale: f64| rng.gen_range(-scale..=scale);
        let strength = s.clamp(0.0, 1.0);
        let mut p = FounderProfile::empty(f.clone());
        p.industry_avg_round = [1.5e6, 2.0e6, 3.0e6][rng.gen_range(0..3)];
        p.current_round_raised = ((0.1 + 3.0 * strength + noise(rng, 0.3)).max(0.0) * 1e6).round();
        p.previous_rounds_raised = ((strength + noise(rng, 0.3)).max(0.0) * 5e5).round();
        p.interested_investor_count = (10.0 * strength + noise(rng, 1.5)).max(0.0).round() as u32;
        p.waitlist_responded_count = (6.0 * strength + noise(rng, 1.5)).max(0.0).round() as u32;
        p.avg_incoming_sentiment =
            ((2.0 * strength - 1.0 + noise(rng, 0.3)).clamp(-1.0, 1.0) * 1e3).round() / 1e3;
        let exits = (3.0 * strength + noise(rng, 1.0)).max(0.0).round() as u32;
        for _ in 0..exits {
            match rng.gen_range(0..6) {
                0 => p.job_ipo += 1,
                1 => p.job_acq += 1,
                2 => p.exec_ipo += 1,
                3 => p.exec_acq += 1,
                4 => p.adv_ipo += 1,
                _ => p.adv_acq += 1,
            }
        }
        out.push(p);
    }
    out
}

fn pick_industries(rng: &mut ChaCha8Rng, max: usize) -> BTreeSet<Industry> {
    let k = rng.gen_range(1..=max);
    Industry::all()
        .choose_multiple(rng, k)
        .into_iter()
        .collect()
}

fn catalog_for(spec: &SynthSpec, founders: &[NodeId], rng: &mut ChaCha8Rng) -> Result<Catalog> {
    let mut firms = Vec::new();
    for j in 0..spec.firms {
        let city = rng.gen_range(0..CITIES.len());
        let n_offices = rng.gen_range(0..3);
        let offices: BTreeSet<&str> = CITIES
            .iter()
            .copied()
            .choose_multiple(rng, n_offices)
            .into_iter()
            .collect();
        let n_stages = rng.gen_range(1..=3);
        let stages: BTreeSet<FundStage> = FundStage::ALL
            .iter()
            .copied()
            .choose_multiple(rng, n_stages)
            .into_iter()
            .collect();
        firms.push(FirmRecord {
            firm_id: format!("firm{j:03}"),
            name: format!(
                "{} {}",
                FIRM_WORDS[j % FIRM_WORDS.len()],
                ["Ventures", "Capital", "Partners"][(j / FIRM_WORDS.len()) % 3]
            ) + &if j >= FIRM_WORDS.len() * 3 {
                format!(" {}", j / (FIRM_WORDS.len() * 3) + 1)
            } else {
                String::new()
            },
            hq_city: CITIES[city].into(),
            office_cities: offices
                .into_iter()
                .filter(|c| *c != CITIES[city])
                .map(String::from)
                .collect(),
            stages,
            industries: pick_industries(rng, 4),
            investments: Vec::new(),
            investments_last_year: rng.gen_range(0..40),
            featured_investor_count: 0,
            verified_investor_count: 0,
            conversation_count: rng.gen_range(0..25),
            us_only_eligible: city < US_CITIES,
            investors: Vec::new(),
        });
    }
    let investors: Vec<InvestorRecord> = (0..spec.investors)
        .map(|i| {
            let n_topics = rng.gen_range(0..=3);
            let topics = TOPICS.iter().choose_multiple(rng, n_topics);
            InvestorRecord {
                investor_id: format!("inv{i:04}"),
                first_name: FIRST_NAMES[i % FIRST_NAMES.len()].into(),
                last_name: LAST_NAMES[(i / FIRST_NAMES.len() + i) % LAST_NAMES.len()].into(),
                firm_id: format!("firm{:03}", i % spec.firms),
                email: Some(investor_id(i, spec.firms).to_string()),
                featured: rng.gen_bool(0.2),
                verified: rng.gen_bool(0.4),
                topics: topics.into_iter().map(|t| t.to_string()).collect(),
                industries: pick_industries(rng, 3),
            }
        })
        .collect();
    let companies: Vec<CompanyRecord> = founders
        .iter()
        .enumerate()
        .map(|(i, _)| {
            let n = rng.gen_range(0..=3).min(spec.firms);
            let mut backers: Vec<String> = (0..spec.firms)
                .choose_multiple(rng, n)
                .into_iter()
                .map(|j| format!("firm{j:03}"))
                .collect();
            backers.sort();
            CompanyRecord {
                company_id: format!("co{i:04}"),
                name: format!("Startup {i}"),
                industries: pick_industries(rng, 3),
                city: CITIES[rng.gen_range(0..CITIES.len())].into(),
                investor_firm_ids: backers,
            }
        })
        .collect();
    Catalog::assemble(firms, investors, companies)
}

fn timelines_for(founders: &[NodeId], rng: &mut ChaCha8Rng) -> Vec<RaiseTimeline> {
    founders
        .iter()
        .map(|f| {
            let first = EPOCH + rng.gen_range(0..365) * DAY + rng.gen_range(0..DAY);
            let last = first + rng.gen_range(20..220) * DAY + rng.gen_range(0..DAY);
            let weeks = ((last - first + 7 * DAY - 1) / (7 * DAY)).max(1) as u32;
            let raw: Vec<f64> = (0..weeks).map(|_| rng.gen_range(0.05..1.0)).collect();
            let total: f64 = raw.iter().sum();
            let mut shares: Vec<(u32, f64)> = raw
                .iter()
                .enumerate()
                .map(|(w, r)| (w as u32, r / total))
                .collect();
            // absorb rounding so the shares sum to one
            let drift: f64 = 1.0 - shares.iter().map(|s| s.1).sum::<f64>();
            shares[0].1 += drift;
            let eventual = rng.gen_range(0..=5u32);
            let mut committed: Vec<f64> = (0..weeks)
                .map(|_| {
                    if eventual == 0 {
                        0.0
                    } else {
                        rng.gen_range(0.0..=1.0)
                    }
                })
                .collect();
            committed.sort_by(f64::total_cmp);
            if let Some(last) = committed.last_mut() {
                if eventual > 0 {
                    *last = 1.0;
                }
            }
            RaiseTimeline {
                founder_id: f.to_string(),
                wishlist_first_add: first,
                last_status_update: last,
                weekly_email_share: shares,
                committed_fraction_by_week: committed
                    .into_iter()
                    .enumerate()
                    .map(|(w, c)| (w as u32, c))
                    .collect(),
                eventual_investors: eventual,
            }
        })
        .collect()
}

/// A single founder's mailbox of `messages` records: ordinary threads with
/// a handful of investors and contacts, interleaved with bulk mail.
pub fn mailbox(seed: u64, messages: usize) -> (String, Vec<RawEvent>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let founder = "founder@startup.example".to_string();
    let contacts: Vec<String> = (0..40)
        .map(|i| {
            if i < 15 {
                format!("partner{i}@fund{}.example", i % 5)
            } else {
                format!("contact{i}@mail.example")
            }
        })
        .collect();
    let bodies = [
        "Hi, would love an intro to your team.",
        "Could you send over the latest numbers?",
        "Let's schedule a call next week.",
        "Attached is our deck for the partner meeting.",
        "We'd like to invest in the round.",
        "Thanks, not a fit for us right now.",
        "Great to meet you today.",
    ];
    let mut events = Vec::with_capacity(messages);
    for i in 0..messages {
        let mut e = RawEvent {
            message_id: format!("<msg{i:06}@mail.example>"),
            thread_id: format!("thread{:05}", i / 3),
            timestamp: EPOCH + 300 * i as i64,
            body_text: Some(bodies[rng.gen_range(0..bodies.len())].into()),
            ..RawEvent::default()
        };
        let contact = contacts[rng.gen_range(0..contacts.len())].clone();
        match rng.gen_range(0..10) {
            0 => {
                e.from_addr = "no-reply@service.example".into();
                e.to = vec![founder.clone()];
                e.body_text = Some("Your receipt. View in your browser.".into());
            }
            1 => {
                e.from_addr = contact;
                e.to = (0..7)
                    .map(|k| contacts[(i + k) % contacts.len()].clone())
                    .collect();
            }
            2..=5 => {
                e.from_addr = founder.clone();
                e.to = vec![contact];
                if rng.gen_bool(0.3) {
                    e.cc = vec![contacts[rng.gen_range(0..contacts.len())].clone()];
                }
            }
            _ => {
                e.from_addr = contact;
                e.to = vec![founder.clone()];
            }
        }
        events.push(e);
    }
    (founder, events)
}

/// Writes every artifact of a world under `dir`:
/// `graph.snapshot`, `events.jsonl`, `labels.csv`, `profiles.csv`,
/// `catalog/`, `timelines.jsonl` and `ground_truth.json`.
pub fn write_world(world: &SynthWorld, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let create = |name: &str| {
        let path = dir.join(name);
        std::fs::File::create(&path)
            .map(std::io::BufWriter::new)
            .map_err(|e| Error::io(path, e))
    };
    world.graph.save(create("graph.snapshot")?)?;
    let mut events = create("events.jsonl")?;
    for e in &world.events {
        serde_json::to_writer(&mut events, e)?;
        writeln!(events).map_err(|e| Error::io("events.jsonl", e))?;
    }
    events.flush().map_err(|e| Error::io("events.jsonl", e))?;
    write_labels(&world.graph, create("labels.csv")?)?;
    write_profiles(&world.profiles, create("profiles.csv")?)?;
    world.catalog.save(&dir.join("catalog"))?;
    write_timelines(&world.timelines, create("timelines.jsonl")?)?;
    let mut gt = create("ground_truth.json")?;
    serde_json::to_writer_pretty(&mut gt, &world.ground_truth)?;
    writeln!(gt).map_err(|e| Error::io("ground_truth.json", e))?;
    gt.flush().map_err(|e| Error::io("ground_truth.json", e))?;
    Ok(())
}
