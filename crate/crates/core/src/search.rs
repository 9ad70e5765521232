//! Filter, search and sort over the investor catalog, plus the attributes
//! derived from it: covering industries, inferred stages, topics, hub
//! cities, point partners and CSV column guessing.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::catalog::{
    city_key, Catalog, CompanyRecord, FirmRecord, FundStage, Industry, InvestorRecord,
};
use crate::error::{Error, Result};

/// Search strings shorter than this (after trimming) are ignored.
pub const MIN_SEARCH_LEN: usize = 2;
pub const HUB_CITY_THRESHOLD: usize = 50;
pub const STAGE_SHARE: f64 = 0.5;
pub const TOPIC_SHARE: f64 = 0.05;
pub const MAX_HEADER_DISTANCE: usize = 3;

/// Greedy industry cover: industries in order of descending frequency
/// (ties by slug), each kept only if it covers a company not yet covered,
/// until every company is covered.
pub fn covering_industries(companies: &[CompanyRecord]) -> Vec<Industry> {
    let mut freq: BTreeMap<Industry, usize> = BTreeMap::new();
    for c in companies {
        for &i in &c.industries {
            *freq.entry(i).or_insert(0) += 1;
        }
    }
    let mut options: Vec<(Industry, usize)> = freq.into_iter().collect();
    options.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    let mut uncovered: Vec<&CompanyRecord> = companies
        .iter()
        .filter(|c| !c.industries.is_empty())
        .collect();
    let mut picked = Vec::new();
    for (ind, _) in options {
        if uncovered.is_empty() {
            break;
        }
        let before = uncovered.len();
        uncovered.retain(|c| !c.industries.contains(&ind));
        if uncovered.len() < before {
            picked.push(ind);
        }
    }
    picked
}

/// Stages present in at least half of the rounds.
pub fn infer_stages(round_stages: &[FundStage]) -> BTreeSet<FundStage> {
    let n = round_stages.len();
    let mut counts: BTreeMap<FundStage, usize> = BTreeMap::new();
    for &s in round_stages {
        *counts.entry(s).or_insert(0) += 1;
    }
    counts
        .into_iter()
        .filter(|&(_, c)| c as f64 >= STAGE_SHARE * n as f64)
        .map(|(s, _)| s)
        .collect()
}

/// Topics mentioned in at least 5% of an investor's content.
pub fn associate_topics(mention_fractions: &BTreeMap<String, f64>) -> BTreeSet<String> {
    mention_fractions
        .iter()
        .filter(|&(_, &f)| f >= TOPIC_SHARE)
        .map(|(t, _)| t.clone())
        .collect()
}

/// Cities hosting at least `threshold` firm offices, counting each firm at
/// most once per city. Returned in case-folded form.
pub fn hub_cities(firms: &[FirmRecord], threshold: usize) -> BTreeSet<String> {
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for f in firms {
        for c in f.city_keys() {
            *counts.entry(c).or_insert(0) += 1;
        }
    }
    counts
        .into_iter()
        .filter(|&(_, n)| n >= threshold)
        .map(|(c, _)| c)
        .collect()
}

/// The investor mentioned strictly more often than every other one.
pub fn infer_point_partner(mention_counts: &BTreeMap<String, u32>) -> Option<String> {
    let mut best: Option<(&String, u32)> = None;
    let mut tied = false;
    for (inv, &c) in mention_counts {
        match best {
            Some((_, b)) if c < b => {}
            Some((_, b)) if c == b => tied = true,
            _ => {
                best = Some((inv, c));
                tied = false;
            }
        }
    }
    match best {
        Some((inv, c)) if c > 0 && !tied => Some(inv.clone()),
        _ => None,
    }
}

/// Maps header positions to canonical field names by case-insensitive edit
/// distance. Pairs within the cutoff are assigned greedily by ascending
/// distance (then header position, then canonical position), each header
/// and field used once.
pub fn guess_column_mapping(headers: &[String], canonical: &[String]) -> BTreeMap<usize, String> {
    let norm = |s: &str| s.trim().to_lowercase();
    let mut pairs = Vec::new();
    for (h, header) in headers.iter().enumerate() {
        for (c, field) in canonical.iter().enumerate() {
            let d = strsim::levenshtein(&norm(header), &norm(field));
            if d <= MAX_HEADER_DISTANCE {
                pairs.push((d, h, c));
            }
        }
    }
    pairs.sort_unstable();
    let mut used = BTreeSet::new();
    let mut out = BTreeMap::new();
    for (_, h, c) in pairs {
        if !out.contains_key(&h) && !used.contains(&c) {
            used.insert(c);
            out.insert(h, canonical[c].clone());
        }
    }
    out
}

/// Column-sort overrides; they replace the custom ranking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SortColumn {
    /// Firm name, lexicographic.
    Firm,
    /// Headquarters city, lexicographic.
    Location,
    /// Investments in the last year, numeric.
    Pace,
    /// Earliest stage the firm invests at; firms without stages last.
    Stage,
}

impl std::str::FromStr for SortColumn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "firm" => Ok(SortColumn::Firm),
            "location" => Ok(SortColumn::Location),
            "pace" => Ok(SortColumn::Pace),
            "stage" => Ok(SortColumn::Stage),
            _ => Err(Error::InvalidInput(format!("unknown sort column {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnSort {
    pub column: SortColumn,
    #[serde(default)]
    pub descending: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct FilterQuery {
    /// Any of these stages.
    pub stages: BTreeSet<FundStage>,
    pub industries: BTreeSet<Industry>,
    /// Require every listed industry instead of any.
    pub industries_and: bool,
    pub cities: BTreeSet<String>,
    /// Match the cities of portfolio companies instead of firm offices.
    pub cities_invested_in: bool,
    /// Company ids.
    pub related_companies: BTreeSet<String>,
    /// Match firms that invested in companies sharing an industry with the
    /// listed ones, instead of the listed companies themselves.
    pub related_similar: bool,
    /// Any of these topics.
    pub topics: BTreeSet<String>,
    pub us_only: bool,
    pub search: Option<String>,
    pub sort: Option<ColumnSort>,
}

impl FilterQuery {
    pub fn from_toml(text: &str) -> Result<FilterQuery> {
        toml::from_str(text).map_err(|e| Error::InvalidInput(format!("query: {e}")))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("query serializes")
    }

    /// The search string, when long enough to use.
    pub fn effective_search(&self) -> Option<&str> {
        self.search
            .as_deref()
            .map(str::trim)
            .filter(|s| s.chars().count() >= MIN_SEARCH_LEN)
    }
}

/// Founder profile data used to personalize ranking when the query leaves
/// industries or cities open. Never used for filtering.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct FounderContext {
    pub industries: BTreeSet<Industry>,
    pub cities: BTreeSet<String>,
}

/// `(first, last)` components of a search string. A single token serves
/// as both.
pub fn name_components(search: &str) -> (String, String) {
    let tokens: Vec<String> = search.split_whitespace().map(str::to_lowercase).collect();
    match tokens.as_slice() {
        [] => (String::new(), String::new()),
        [only] => (only.clone(), only.clone()),
        [first, .., last] => (first.clone(), last.clone()),
    }
}

fn investor_name_matches(inv: &InvestorRecord, first: &str, last: &str) -> bool {
    inv.first_name.to_lowercase().contains(first) || inv.last_name.to_lowercase().contains(last)
}

fn validate(catalog: &Catalog, q: &FilterQuery) -> Result<()> {
    if let Some(c) = q
        .related_companies
        .iter()
        .find(|c| !catalog.companies.contains_key(*c))
    {
        return Err(Error::UnknownCompanyId(c.clone()));
    }
    let known = catalog.topics();
    if let Some(t) = q.topics.iter().find(|t| !known.contains(t.as_str())) {
        return Err(Error::UnknownTopicId(t.clone()));
    }
    Ok(())
}

/// True if the firm passes every filter present in the query. The search
/// string is not considered here.
pub fn passes_filters(catalog: &Catalog, firm: &FirmRecord, q: &FilterQuery) -> bool {
    if !q.stages.is_empty() && firm.stages.is_disjoint(&q.stages) {
        return false;
    }
    if !q.industries.is_empty() {
        let ok = if q.industries_and {
            q.industries.is_subset(&firm.industries)
        } else {
            !q.industries.is_disjoint(&firm.industries)
        };
        if !ok {
            return false;
        }
    }
    if !q.cities.is_empty() {
        let wanted: BTreeSet<String> = q.cities.iter().map(|c| city_key(c)).collect();
        let ok = if q.cities_invested_in {
            firm.investments
                .iter()
                .filter_map(|id| catalog.companies.get(id))
                .any(|c| wanted.contains(&city_key(&c.city)))
        } else {
            !firm.city_keys().is_disjoint(&wanted)
        };
        if !ok {
            return false;
        }
    }
    if !q.related_companies.is_empty() {
        let ok = if q.related_similar {
            let wanted: BTreeSet<Industry> = q
                .related_companies
                .iter()
                .filter_map(|id| catalog.companies.get(id))
                .flat_map(|c| c.industries.iter().copied())
                .collect();
            firm.investments
                .iter()
                .filter_map(|id| catalog.companies.get(id))
                .any(|c| !c.industries.is_disjoint(&wanted))
        } else {
            firm.investments
                .iter()
                .any(|id| q.related_companies.contains(id))
        };
        if !ok {
            return false;
        }
    }
    if !q.topics.is_empty()
        && !firm
            .investors
            .iter()
            .any(|i| !i.topics.is_disjoint(&q.topics))
    {
        return false;
    }
    !(q.us_only && !firm.us_only_eligible)
}

/// True if the firm's name or one of its investors' names matches `search`.
pub fn matches_search(firm: &FirmRecord, search: &str) -> bool {
    let (first, last) = name_components(search);
    firm.name.to_lowercase().contains(&search.to_lowercase())
        || firm
            .investors
            .iter()
            .any(|i| investor_name_matches(i, &first, &last))
}

/// Name search first, then every filter present, then ordering: the
/// custom ranking, or a column sort when the query asks for one.
pub fn filter_and_search<'c>(
    catalog: &'c Catalog,
    founder: &FounderContext,
    q: &FilterQuery,
) -> Result<Vec<&'c FirmRecord>> {
    validate(catalog, q)?;
    let search = q.effective_search();
    let firms: Vec<&FirmRecord> = catalog
        .firms
        .iter()
        .filter(|f| search.is_none_or(|s| matches_search(f, s)))
        .filter(|f| passes_filters(catalog, f, q))
        .collect();
    let mut ranked = rank_firms(firms, founder, q);
    if let Some(sort) = q.sort {
        apply_column_sort(&mut ranked, sort);
    }
    Ok(ranked)
}

/// The six ranking keys, larger first.
pub fn rank_keys(firm: &FirmRecord, founder: &FounderContext, q: &FilterQuery) -> [usize; 6] {
    let topic_matches = firm
        .investors
        .iter()
        .filter(|i| !i.topics.is_disjoint(&q.topics))
        .count();
    let industries = if q.industries.is_empty() {
        &founder.industries
    } else {
        &q.industries
    };
    let industry_overlap = firm.industries.intersection(industries).count();
    let cities = if q.cities.is_empty() {
        &founder.cities
    } else {
        &q.cities
    };
    let wanted: BTreeSet<String> = cities.iter().map(|c| city_key(c)).collect();
    let city_overlap = firm.city_keys().intersection(&wanted).count();
    [
        topic_matches,
        firm.featured_investor_count as usize,
        industry_overlap,
        city_overlap,
        firm.conversation_count as usize,
        firm.verified_investor_count as usize,
    ]
}

/// Orders firms by the six keys, descending, then by name and id. A key
/// whose filter is absent (and has no profile fallback) is zero for every
/// firm, so it never separates them.
pub fn rank_firms<'c>(
    firms: Vec<&'c FirmRecord>,
    founder: &FounderContext,
    q: &FilterQuery,
) -> Vec<&'c FirmRecord> {
    let mut keyed: Vec<([usize; 6], &FirmRecord)> = firms
        .into_iter()
        .map(|f| (rank_keys(f, founder, q), f))
        .collect();
    keyed.sort_by(|(ka, a), (kb, b)| {
        kb.cmp(ka)
            .then_with(|| a.name.cmp(&b.name))
            .then_with(|| a.firm_id.cmp(&b.firm_id))
    });
    keyed.into_iter().map(|(_, f)| f).collect()
}

/// Stable re-sort of a ranked list by one display column.
pub fn apply_column_sort(firms: &mut [&FirmRecord], sort: ColumnSort) {
    let cmp = |a: &&FirmRecord, b: &&FirmRecord| -> Ordering {
        match sort.column {
            SortColumn::Firm => a.name.cmp(&b.name),
            SortColumn::Location => a.hq_city.cmp(&b.hq_city),
            SortColumn::Pace => a.investments_last_year.cmp(&b.investments_last_year),
            SortColumn::Stage => match (a.stages.first(), b.stages.first()) {
                (Some(x), Some(y)) => x.cmp(y),
                (Some(_), None) => Ordering::Less,
                (None, Some(_)) => Ordering::Greater,
                (None, None) => Ordering::Equal,
            },
        }
    };
    if sort.descending {
        firms.sort_by(|a, b| cmp(b, a));
    } else {
        firms.sort_by(cmp);
    }
}

/// How closely an investor's name matches a search: 2 for an exact first,
/// last or full name, 1 for a substring match, 0 otherwise.
fn name_match_level(inv: &InvestorRecord, search: &str) -> u8 {
    let (first, last) = name_components(search);
    let s = search.to_lowercase();
    let (f, l) = (inv.first_name.to_lowercase(), inv.last_name.to_lowercase());
    if f == first || l == last || inv.full_name().to_lowercase() == s {
        2
    } else if investor_name_matches(inv, &first, &last) {
        1
    } else {
        0
    }
}

/// The investor at a firm who best matches the query's search string and
/// topics, ties broken by full name then id. `None` when the query has
/// neither or nobody matches.
pub fn best_partner_match<'f>(firm: &'f FirmRecord, q: &FilterQuery) -> Option<&'f InvestorRecord> {
    let search = q.effective_search();
    if search.is_none() && q.topics.is_empty() {
        return None;
    }
    firm.investors
        .iter()
        .map(|i| {
            let name = search.map_or(0, |s| name_match_level(i, s));
            let topics = i.topics.intersection(&q.topics).count();
            ((name, topics), i)
        })
        .filter(|((name, topics), _)| *name > 0 || *topics > 0)
        .min_by(|(ka, a), (kb, b)| {
            kb.cmp(ka)
                .then_with(|| a.full_name().cmp(&b.full_name()))
                .then_with(|| a.investor_id.cmp(&b.investor_id))
        })
        .map(|(_, i)| i)
}
