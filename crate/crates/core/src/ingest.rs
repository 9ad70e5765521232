//! Email-metadata ingestion: parse line-delimited message records, drop
//! bulk mail and already-imported messages, and turn the rest into edge
//! increments and conversation-stage updates.
//!
//! Each input line is a JSON object with these fields:
//!
//! | field                | type              | notes                                  |
//! |----------------------|-------------------|----------------------------------------|
//! | `message_id`         | string            | required, non-empty                    |
//! | `thread_id`          | string            | required                               |
//! | `timestamp`          | integer           | UTC seconds                            |
//! | `from_addr`          | string            | `local@domain`, or `Name <local@domain>` |
//! | `from_name`          | string            | optional                               |
//! | `to`, `cc`, `bcc`    | array of strings  | optional, unioned in that order        |
//! | `headers`            | array of strings  | header names present, optional         |
//! | `return_path_domain` | string            | optional                               |
//! | `body_text`          | string            | optional                               |
//! | `body_html`          | string            | optional, appended to the text body    |
//! | `sentiment`          | number in [-1, 1] | optional                               |

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::BufRead;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{GraphDelta, LabelClaims, NodeId};

/// Lowercases, trims and drops a `+tag` suffix from the local part. Accepts
/// an optional `Name <addr>` wrapper. Returns `None` unless the result looks
/// like `local@domain`.
pub fn normalize_address(raw: &str) -> Option<String> {
    let mut s = raw.trim();
    if let (Some(open), true) = (s.rfind('<'), s.ends_with('>')) {
        s = s[open + 1..s.len() - 1].trim();
    }
    let s = s.to_lowercase();
    let (local, domain) = s.split_once('@')?;
    let local = local.split_once('+').map_or(local, |(base, _)| base);
    let valid = |part: &str| {
        !part.is_empty()
            && !part
                .chars()
                .any(|c| c.is_whitespace() || c == '@' || c == '<' || c == '>')
    };
    if !valid(local) || !valid(domain) || domain.starts_with('.') || domain.ends_with('.') {
        return None;
    }
    Some(format!("{local}@{domain}"))
}

fn domain_of(addr: &str) -> &str {
    addr.rsplit_once('@').map_or("", |(_, d)| d)
}

fn local_of(addr: &str) -> &str {
    addr.split_once('@').map_or(addr, |(l, _)| l)
}

/// One record as it appears in the event log.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct RawEvent {
    pub message_id: String,
    pub thread_id: String,
    pub timestamp: i64,
    pub from_addr: String,
    pub from_name: String,
    pub to: Vec<String>,
    pub cc: Vec<String>,
    pub bcc: Vec<String>,
    pub headers: Vec<String>,
    pub return_path_domain: String,
    pub body_text: Option<String>,
    pub body_html: Option<String>,
    pub sentiment: Option<f64>,
}

/// A validated message. Addresses are normalized and the sender never
/// appears among the recipients.
#[derive(Debug, Clone, PartialEq)]
pub struct EmailEvent {
    pub message_id: String,
    pub thread_id: String,
    pub timestamp: i64,
    pub from_addr: String,
    pub from_name: String,
    /// Union of TO, CC and BCC, first occurrence kept.
    pub recipients: Vec<String>,
    /// Lowercased header names.
    pub headers: BTreeSet<String>,
    pub return_path_domain: String,
    pub body_text: Option<String>,
    pub sentiment: Option<f64>,
}

impl TryFrom<RawEvent> for EmailEvent {
    type Error = String;

    fn try_from(raw: RawEvent) -> std::result::Result<Self, String> {
        if raw.message_id.trim().is_empty() {
            return Err("empty message_id".into());
        }
        let from_addr = normalize_address(&raw.from_addr)
            .ok_or_else(|| format!("bad sender address {:?}", raw.from_addr))?;
        let mut recipients = Vec::new();
        let mut seen = BTreeSet::new();
        for r in raw.to.iter().chain(&raw.cc).chain(&raw.bcc) {
            let addr =
                normalize_address(r).ok_or_else(|| format!("bad recipient address {r:?}"))?;
            if addr != from_addr && seen.insert(addr.clone()) {
                recipients.push(addr);
            }
        }
        if let Some(s) = raw.sentiment {
            if !(-1.0..=1.0).contains(&s) {
                return Err(format!("sentiment {s} outside [-1, 1]"));
            }
        }
        let body_text = match (raw.body_text, raw.body_html) {
            (None, None) => None,
            (t, h) => Some([t.unwrap_or_default(), h.unwrap_or_default()].join("\n")),
        };
        Ok(EmailEvent {
            message_id: raw.message_id,
            thread_id: raw.thread_id,
            timestamp: raw.timestamp,
            from_addr,
            from_name: raw.from_name,
            recipients,
            headers: raw
                .headers
                .iter()
                .map(|h| h.trim().to_lowercase())
                .collect(),
            return_path_domain: raw.return_path_domain.trim().to_lowercase(),
            body_text,
            sentiment: raw.sentiment,
        })
    }
}

/// A log line that could not be turned into an [`EmailEvent`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Malformed {
    /// 0-based line number.
    pub index: usize,
    pub reason: String,
}

pub type LogRecord = std::result::Result<EmailEvent, Malformed>;

/// Parses a line-delimited event log. Blank lines are ignored; lines that
/// fail to parse or validate become [`Malformed`] entries in place.
pub fn parse_log<R: BufRead>(input: R) -> Result<Vec<LogRecord>> {
    let mut records = Vec::new();
    for (index, line) in input.lines().enumerate() {
        let line = line.map_err(|e| Error::io("<events>", e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str::<RawEvent>(&line)
            .map_err(|e| e.to_string())
            .and_then(EmailEvent::try_from)
            .map_err(|reason| Malformed { index, reason });
        records.push(record);
    }
    Ok(records)
}

/// Rule lists for bulk-mail detection. Every list is matched
/// case-insensitively.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BulkRules {
    /// More recipients than this marks a message as bulk.
    pub max_recipients: usize,
    /// Substrings of the body.
    pub phrases: Vec<String>,
    /// Header names.
    pub listserv_headers: Vec<String>,
    /// Return-path domains; subdomains match too.
    pub vendor_domains: Vec<String>,
    /// Exact sender local parts.
    pub automated_locals: Vec<String>,
    /// Substrings of the sender display name.
    pub sender_aliases: Vec<String>,
    /// Sender or recipient domains; subdomains match too.
    pub transactional_domains: Vec<String>,
}

fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

impl Default for BulkRules {
    fn default() -> Self {
        BulkRules {
            max_recipients: 5,
            phrases: strings(&["unsubscribe", "terms of use", "view in your browser"]),
            listserv_headers: strings(&[
                "list-unsubscribe",
                "list-id",
                "list-post",
                "x-campaign-id",
                "x-mailgun-sid",
                "x-sg-eid",
                "x-mc-user",
            ]),
            vendor_domains: strings(&[
                "mailchimp.com",
                "mcsv.net",
                "mcdlv.net",
                "rsgsv.net",
                "sendgrid.net",
                "mailgun.org",
                "amazonses.com",
                "constantcontact.com",
                "mandrillapp.com",
                "sparkpostmail.com",
                "hubspotemail.net",
            ]),
            automated_locals: strings(&[
                "noreply",
                "no-reply",
                "donotreply",
                "do-not-reply",
                "info",
                "notifications",
                "newsletter",
                "mailer-daemon",
                "bounce",
            ]),
            sender_aliases: strings(&["support", "payroll", "billing"]),
            transactional_domains: strings(&[
                "paypal.com",
                "stripe.com",
                "docusign.net",
                "gusto.com",
                "intuit.com",
                "squareup.com",
                "venmo.com",
            ]),
        }
    }
}

fn domain_matches(domain: &str, list: &[String]) -> bool {
    list.iter().any(|d| {
        let d = d.to_lowercase();
        domain == d
            || domain
                .strip_suffix(d.as_str())
                .is_some_and(|rest| rest.ends_with('.'))
    })
}

/// True if any bulk rule fires. Body rules are skipped without a body.
pub fn is_bulk(msg: &EmailEvent, rules: &BulkRules) -> bool {
    if msg.recipients.len() > rules.max_recipients {
        return true;
    }
    if let Some(body) = &msg.body_text {
        let body = body.to_lowercase();
        if rules
            .phrases
            .iter()
            .any(|p| body.contains(&p.to_lowercase()))
        {
            return true;
        }
    }
    if rules
        .listserv_headers
        .iter()
        .any(|h| msg.headers.contains(&h.to_lowercase()))
    {
        return true;
    }
    if !msg.return_path_domain.is_empty()
        && domain_matches(&msg.return_path_domain, &rules.vendor_domains)
    {
        return true;
    }
    let local = local_of(&msg.from_addr);
    if rules
        .automated_locals
        .iter()
        .any(|l| l.eq_ignore_ascii_case(local))
    {
        return true;
    }
    let name = msg.from_name.to_lowercase();
    if rules
        .sender_aliases
        .iter()
        .any(|a| name.contains(&a.to_lowercase()))
    {
        return true;
    }
    std::iter::once(&msg.from_addr)
        .chain(&msg.recipients)
        .any(|a| domain_matches(domain_of(a), &rules.transactional_domains))
}

/// Conversation stages in pipeline order. An inferred stage only ever moves
/// a conversation forward in this order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    MyWishlist,
    AskedForIntro,
    InTalks,
    NeedToRespond,
    Pitching,
    Committed,
    Passed,
    NotInterested,
}

impl Stage {
    pub const ALL: [Stage; 8] = [
        Stage::MyWishlist,
        Stage::AskedForIntro,
        Stage::InTalks,
        Stage::NeedToRespond,
        Stage::Pitching,
        Stage::Committed,
        Stage::Passed,
        Stage::NotInterested,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Stage::MyWishlist => "my_wishlist",
            Stage::AskedForIntro => "asked_for_intro",
            Stage::InTalks => "in_talks",
            Stage::NeedToRespond => "need_to_respond",
            Stage::Pitching => "pitching",
            Stage::Committed => "committed",
            Stage::Passed => "passed",
            Stage::NotInterested => "not_interested",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Stage::ALL
            .into_iter()
            .find(|st| st.as_str() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown stage {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Incoming,
    Outgoing,
}

/// One row of the stage keyword table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRule {
    pub stage: Stage,
    /// Directions the rule applies to.
    pub directions: Vec<Direction>,
    /// Lowercase substrings of the body; any one fires the rule.
    pub phrases: Vec<String>,
}

/// Keyword table for stage inference. Rules are tried in order and the
/// first that fires wins; outgoing messages matching no rule fall back to
/// `outgoing_default`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StageRules {
    pub rules: Vec<StageRule>,
    pub outgoing_default: Option<Stage>,
}

impl Default for StageRules {
    fn default() -> Self {
        use Direction::*;
        let rule = |stage, directions: &[Direction], phrases: &[&str]| StageRule {
            stage,
            directions: directions.to_vec(),
            phrases: strings(phrases),
        };
        StageRules {
            rules: vec![
                rule(
                    Stage::Committed,
                    &[Incoming],
                    &[
                        "we'd like to invest",
                        "we would like to invest",
                        "we'd love to invest",
                        "happy to invest",
                        "excited to invest",
                        "we're in for",
                        "count us in",
                        "we will invest",
                        "we'll invest",
                    ],
                ),
                rule(
                    Stage::Passed,
                    &[Incoming],
                    &[
                        "not a fit",
                        "not the right fit",
                        "pass on this",
                        "pass for now",
                        "we'll pass",
                        "we will pass",
                        "going to pass",
                        "decided to pass",
                        "not going to invest",
                    ],
                ),
                rule(
                    Stage::NotInterested,
                    &[Incoming],
                    &[
                        "not interested",
                        "no interest",
                        "please remove me",
                        "stop emailing",
                    ],
                ),
                rule(
                    Stage::Pitching,
                    &[Incoming, Outgoing],
                    &[
                        "partner meeting",
                        "pitch",
                        "our deck",
                        "the deck",
                        "your deck",
                        "data room",
                    ],
                ),
                rule(
                    Stage::InTalks,
                    &[Incoming, Outgoing],
                    &[
                        "schedule",
                        "grab coffee",
                        "a call",
                        "hop on",
                        "calendar invite",
                        "meet next",
                        "meet this",
                        "let's meet",
                        "great chatting",
                        "great to meet",
                    ],
                ),
                rule(
                    Stage::NeedToRespond,
                    &[Incoming],
                    &[
                        "let me know",
                        "could you send",
                        "can you send",
                        "a few questions",
                        "any update",
                        "following up",
                    ],
                ),
            ],
            outgoing_default: Some(Stage::AskedForIntro),
        }
    }
}

/// Infers a conversation stage from a message body; `None` when no rule
/// fires for an incoming message.
pub fn guess_stage(msg: &EmailEvent, direction: Direction, rules: &StageRules) -> Option<Stage> {
    let body = msg.body_text.as_deref().unwrap_or("").to_lowercase();
    rules
        .rules
        .iter()
        .filter(|r| r.directions.contains(&direction))
        .find(|r| r.phrases.iter().any(|p| body.contains(&p.to_lowercase())))
        .map(|r| r.stage)
        .or(match direction {
            Direction::Outgoing => rules.outgoing_default,
            Direction::Incoming => None,
        })
}

/// Everything ingestion needs besides the events themselves.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IngestConfig {
    pub bulk: BulkRules,
    pub stages: StageRules,
    /// Investor addresses whose conversations are tracked.
    pub targets: BTreeSet<String>,
}

impl IngestConfig {
    pub fn from_toml(text: &str) -> Result<IngestConfig> {
        let mut cfg: IngestConfig =
            toml::from_str(text).map_err(|e| Error::InvalidInput(format!("ingest config: {e}")))?;
        cfg.targets = normalize_targets(&cfg.targets)?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn with_targets<I, S>(mut self, targets: I) -> Result<IngestConfig>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let raw: BTreeSet<String> = targets
            .into_iter()
            .map(|s| s.as_ref().to_string())
            .collect();
        self.targets.extend(normalize_targets(&raw)?);
        Ok(self)
    }
}

fn normalize_targets(raw: &BTreeSet<String>) -> Result<BTreeSet<String>> {
    raw.iter()
        .map(|t| {
            normalize_address(t)
                .ok_or_else(|| Error::InvalidInput(format!("bad target address {t:?}")))
        })
        .collect()
}

/// Import progress that survives between runs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IngestState {
    pub seen_message_ids: BTreeSet<String>,
    /// Last thread processed, per founder mailbox.
    pub history_cursor: BTreeMap<String, String>,
    /// Current stage per founder, per investor.
    pub stages: BTreeMap<String, BTreeMap<String, Stage>>,
}

impl IngestState {
    pub fn from_json(text: &str) -> Result<IngestState> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("state serializes")
    }

    pub fn stage(&self, founder: &str, investor: &str) -> Option<Stage> {
        self.stages.get(founder)?.get(investor).copied()
    }
}

/// A stage inference for one tracked conversation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConversationUpdate {
    pub message_id: String,
    pub timestamp: i64,
    pub investor: String,
    pub direction: Direction,
    pub inferred: Stage,
    /// Stage after the update; never earlier than before it.
    pub stage: Stage,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct IngestStats {
    pub ingested: usize,
    pub skipped_bulk: usize,
    pub skipped_dup: usize,
    pub malformed: usize,
    #[serde(skip)]
    pub malformed_records: Vec<Malformed>,
}

impl IngestStats {
    /// `key<TAB>value` summary lines.
    pub fn summary(&self) -> String {
        format!(
            "ingested\t{}\nskipped_bulk\t{}\nskipped_dup\t{}\nmalformed\t{}\n",
            self.ingested, self.skipped_bulk, self.skipped_dup, self.malformed
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct IngestOutcome {
    pub delta: GraphDelta,
    pub updates: Vec<ConversationUpdate>,
    pub stats: IngestStats,
}

/// Imports one founder's mailbox log. Each message is imported at most
/// once across runs sharing `state`; bulk messages are marked seen too.
///
/// Expects records in ascending timestamp order, since stage updates are
/// applied in sequence.
pub fn ingest_events(
    records: &[LogRecord],
    founder_addr: &str,
    state: &mut IngestState,
    cfg: &IngestConfig,
) -> Result<IngestOutcome> {
    let founder = normalize_address(founder_addr)
        .ok_or_else(|| Error::InvalidInput(format!("bad founder address {founder_addr:?}")))?;
    let mut out = IngestOutcome::default();
    for record in records {
        let msg = match record {
            Ok(msg) => msg,
            Err(m) => {
                out.stats.malformed += 1;
                out.stats.malformed_records.push(m.clone());
                continue;
            }
        };
        state
            .history_cursor
            .insert(founder.clone(), msg.thread_id.clone());
        if !state.seen_message_ids.insert(msg.message_id.clone()) {
            out.stats.skipped_dup += 1;
            continue;
        }
        if is_bulk(msg, &cfg.bulk) {
            out.stats.skipped_bulk += 1;
            continue;
        }
        out.stats.ingested += 1;
        out.delta
            .claim(NodeId::new(founder.as_str()), LabelClaims::FOUNDER);
        let from = NodeId::new(msg.from_addr.as_str());
        for r in &msg.recipients {
            out.delta
                .increment(from.clone(), NodeId::new(r.as_str()), 1);
        }
        track_conversation(msg, &founder, state, cfg, &mut out);
    }
    Ok(out)
}

fn track_conversation(
    msg: &EmailEvent,
    founder: &str,
    state: &mut IngestState,
    cfg: &IngestConfig,
    out: &mut IngestOutcome,
) {
    let (direction, investors): (Direction, Vec<&String>) = if msg.from_addr == founder {
        let to: Vec<&String> = msg
            .recipients
            .iter()
            .filter(|r| cfg.targets.contains(*r))
            .collect();
        (Direction::Outgoing, to)
    } else if cfg.targets.contains(&msg.from_addr) {
        (Direction::Incoming, vec![&msg.from_addr])
    } else {
        return;
    };
    for inv in &investors {
        out.delta
            .claim(NodeId::new(inv.as_str()), LabelClaims::INVESTOR);
    }
    let Some(inferred) = guess_stage(msg, direction, &cfg.stages) else {
        return;
    };
    let stages = state.stages.entry(founder.to_string()).or_default();
    for inv in investors {
        let current = stages.entry(inv.clone()).or_insert(inferred);
        *current = (*current).max(inferred);
        out.updates.push(ConversationUpdate {
            message_id: msg.message_id.clone(),
            timestamp: msg.timestamp,
            investor: inv.clone(),
            direction,
            inferred,
            stage: *current,
        });
    }
}
