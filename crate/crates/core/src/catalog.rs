//! Investor catalog: firms, their investors, and portfolio companies.
//!
//! A catalog directory holds three CSV files. List-valued columns are
//! `;`-separated.
//!
//! `firms.csv`: `firm_id, name, hq_city, office_cities, stages, industries,
//! investments_last_year, conversation_count, us_only_eligible`
//!
//! `investors.csv`: `investor_id, first_name, last_name, firm_id, email,
//! featured, verified, topics, industries`
//!
//! `companies.csv`: `company_id, name, industries, city, investor_firm_ids`
//!
//! A firm's investments and its featured and verified investor counts are
//! derived from the other two files.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `(slug, display name)` of every industry tag.
pub const INDUSTRIES: [(&str, &str); 34] = [
    ("ar_vr", "AR/VR"),
    ("blockchain", "Blockchain"),
    ("consumer", "Consumer"),
    ("enterprise", "Enterprise"),
    ("e_commerce", "E-Commerce"),
    ("delivery", "Delivery"),
    ("saas", "SaaS"),
    ("ai_ml", "AI/ML"),
    ("robotics", "Robotics"),
    ("food_drink", "Food & Drink"),
    ("mobile", "Mobile"),
    ("healthcare", "Healthcare"),
    ("media", "Media"),
    ("finance", "Finance"),
    ("education", "Education"),
    ("life_sci", "Life Sci."),
    ("retail", "Retail"),
    ("real_estate", "Real Estate"),
    ("travel", "Travel"),
    ("automotive", "Automotive"),
    ("sports", "Sports"),
    ("clean_tech", "Clean Tech"),
    ("iot", "IoT"),
    ("social", "Social"),
    ("energy", "Energy"),
    ("hardware", "Hardware"),
    ("gaming", "Gaming"),
    ("space", "Space"),
    ("big_data", "Big Data"),
    ("transportation", "Transportation"),
    ("marketplace", "Marketplace"),
    ("security", "Security"),
    ("government", "Government"),
    ("legal", "Legal"),
];

/// One tag of the fixed industry universe. Orders by slug.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Industry(u8);

impl Industry {
    pub fn all() -> impl Iterator<Item = Industry> {
        (0..INDUSTRIES.len() as u8).map(Industry)
    }

    pub fn slug(self) -> &'static str {
        INDUSTRIES[self.0 as usize].0
    }

    pub fn display_name(self) -> &'static str {
        INDUSTRIES[self.0 as usize].1
    }
}

impl PartialOrd for Industry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Industry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.slug().cmp(other.slug())
    }
}

impl fmt::Display for Industry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

impl FromStr for Industry {
    type Err = Error;

    /// Accepts the slug or the display name, ignoring case.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        INDUSTRIES
            .iter()
            .position(|(slug, name)| slug.eq_ignore_ascii_case(s) || name.eq_ignore_ascii_case(s))
            .map(|i| Industry(i as u8))
            .ok_or_else(|| Error::UnknownIndustry(s.to_string()))
    }
}

impl Serialize for Industry {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.slug())
    }
}

impl<'de> Deserialize<'de> for Industry {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Investment stages in their display order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FundStage {
    Accelerator,
    Angel,
    #[serde(rename = "Pre-Seed")]
    PreSeed,
    Seed,
    #[serde(rename = "Series A")]
    SeriesA,
    #[serde(rename = "Series B")]
    SeriesB,
    Venture,
}

impl FundStage {
    pub const ALL: [FundStage; 7] = [
        FundStage::Accelerator,
        FundStage::Angel,
        FundStage::PreSeed,
        FundStage::Seed,
        FundStage::SeriesA,
        FundStage::SeriesB,
        FundStage::Venture,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FundStage::Accelerator => "Accelerator",
            FundStage::Angel => "Angel",
            FundStage::PreSeed => "Pre-Seed",
            FundStage::Seed => "Seed",
            FundStage::SeriesA => "Series A",
            FundStage::SeriesB => "Series B",
            FundStage::Venture => "Venture",
        }
    }
}

impl fmt::Display for FundStage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FundStage {
    type Err = Error;

    /// Case-insensitive; spaces, hyphens and underscores are interchangeable.
    fn from_str(s: &str) -> Result<Self> {
        let key = |x: &str| -> String {
            x.chars()
                .filter(|c| !matches!(c, ' ' | '-' | '_'))
                .flat_map(char::to_lowercase)
                .collect()
        };
        let want = key(s);
        FundStage::ALL
            .into_iter()
            .find(|st| key(st.as_str()) == want)
            .ok_or_else(|| Error::InvalidInput(format!("unknown stage {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvestorRecord {
    pub investor_id: String,
    pub first_name: String,
    pub last_name: String,
    pub firm_id: String,
    pub email: Option<String>,
    pub featured: bool,
    pub verified: bool,
    pub topics: BTreeSet<String>,
    pub industries: BTreeSet<Industry>,
}

impl InvestorRecord {
    pub fn full_name(&self) -> String {
        format!("{} {}", self.first_name, self.last_name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FirmRecord {
    pub firm_id: String,
    pub name: String,
    pub hq_city: String,
    pub office_cities: Vec<String>,
    pub stages: BTreeSet<FundStage>,
    pub industries: BTreeSet<Industry>,
    /// Company ids, sorted.
    pub investments: Vec<String>,
    pub investments_last_year: u32,
    pub featured_investor_count: u32,
    pub verified_investor_count: u32,
    pub conversation_count: u32,
    pub us_only_eligible: bool,
    /// Sorted by investor id.
    pub investors: Vec<InvestorRecord>,
}

impl FirmRecord {
    /// Headquarters and offices, each once, compared case-insensitively.
    pub fn city_keys(&self) -> BTreeSet<String> {
        std::iter::once(&self.hq_city)
            .chain(&self.office_cities)
            .filter(|c| !c.trim().is_empty())
            .map(|c| city_key(c))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompanyRecord {
    pub company_id: String,
    pub name: String,
    pub industries: BTreeSet<Industry>,
    pub city: String,
    pub investor_firm_ids: Vec<String>,
}

/// Case-folded, trimmed city name used for matching.
pub fn city_key(city: &str) -> String {
    city.trim().to_lowercase()
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Catalog {
    /// Sorted by firm id.
    pub firms: Vec<FirmRecord>,
    pub companies: BTreeMap<String, CompanyRecord>,
}

impl Catalog {
    /// Links investors and companies to firms and derives the per-firm
    /// counts. Rejects dangling firm references and duplicate ids.
    pub fn assemble(
        mut firms: Vec<FirmRecord>,
        investors: Vec<InvestorRecord>,
        companies: Vec<CompanyRecord>,
    ) -> Result<Catalog> {
        firms.sort_by(|a, b| a.firm_id.cmp(&b.firm_id));
        if let Some(w) = firms.windows(2).find(|w| w[0].firm_id == w[1].firm_id) {
            return Err(Error::InvalidInput(format!(
                "duplicate firm {}",
                w[0].firm_id
            )));
        }
        let pos = |firms: &[FirmRecord], id: &str| {
            firms
                .binary_search_by(|f| f.firm_id.as_str().cmp(id))
                .map_err(|_| Error::InvalidInput(format!("unknown firm {id:?}")))
        };
        for f in &mut firms {
            f.investors.clear();
            f.investments.clear();
        }
        let mut seen = BTreeSet::new();
        for inv in investors {
            if !seen.insert(inv.investor_id.clone()) {
                return Err(Error::InvalidInput(format!(
                    "duplicate investor {}",
                    inv.investor_id
                )));
            }
            let i = pos(&firms, &inv.firm_id)?;
            firms[i].investors.push(inv);
        }
        let mut by_id = BTreeMap::new();
        for c in companies {
            for fid in &c.investor_firm_ids {
                let i = pos(&firms, fid)?;
                firms[i].investments.push(c.company_id.clone());
            }
            let id = c.company_id.clone();
            if by_id.insert(id.clone(), c).is_some() {
                return Err(Error::InvalidInput(format!("duplicate company {id}")));
            }
        }
        for f in &mut firms {
            f.investors
                .sort_by(|a, b| a.investor_id.cmp(&b.investor_id));
            f.investments.sort();
            f.investments.dedup();
            f.featured_investor_count = f.investors.iter().filter(|i| i.featured).count() as u32;
            f.verified_investor_count = f.investors.iter().filter(|i| i.verified).count() as u32;
        }
        Ok(Catalog {
            firms,
            companies: by_id,
        })
    }

    pub fn firm(&self, firm_id: &str) -> Option<&FirmRecord> {
        self.firms
            .binary_search_by(|f| f.firm_id.as_str().cmp(firm_id))
            .ok()
            .map(|i| &self.firms[i])
    }

    /// Every topic carried by some investor.
    pub fn topics(&self) -> BTreeSet<&str> {
        self.firms
            .iter()
            .flat_map(|f| &f.investors)
            .flat_map(|i| &i.topics)
            .map(String::as_str)
            .collect()
    }

    pub fn load(dir: &Path) -> Result<Catalog> {
        let open = |name: &str| {
            let path = dir.join(name);
            std::fs::File::open(&path).map_err(|e| Error::io(path, e))
        };
        Catalog::from_readers(
            open("firms.csv")?,
            open("investors.csv")?,
            open("companies.csv")?,
        )
    }

    pub fn from_readers<R1, R2, R3>(firms: R1, investors: R2, companies: R3) -> Result<Catalog>
    where
        R1: std::io::Read,
        R2: std::io::Read,
        R3: std::io::Read,
    {
        let firms = read_rows::<FirmRow, _>(firms)?
            .into_iter()
            .map(FirmRow::into_record)
            .collect::<Result<Vec<_>>>()?;
        let investors = read_rows::<InvestorRow, _>(investors)?
            .into_iter()
            .map(InvestorRow::into_record)
            .collect::<Result<Vec<_>>>()?;
        let companies = read_rows::<CompanyRow, _>(companies)?
            .into_iter()
            .map(CompanyRow::into_record)
            .collect::<Result<Vec<_>>>()?;
        Catalog::assemble(firms, investors, companies)
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let create = |name: &str| {
            let path = dir.join(name);
            std::fs::File::create(&path).map_err(|e| Error::io(path, e))
        };
        self.write_firms(create("firms.csv")?)?;
        self.write_investors(create("investors.csv")?)?;
        self.write_companies(create("companies.csv")?)?;
        Ok(())
    }

    pub fn write_firms<W: Write>(&self, out: W) -> Result<()> {
        write_rows(out, self.firms.iter().map(FirmRow::from_record))
    }

    pub fn write_investors<W: Write>(&self, out: W) -> Result<()> {
        let rows = self
            .firms
            .iter()
            .flat_map(|f| &f.investors)
            .map(InvestorRow::from_record);
        write_rows(out, rows)
    }

    pub fn write_companies<W: Write>(&self, out: W) -> Result<()> {
        write_rows(out, self.companies.values().map(CompanyRow::from_record))
    }
}

fn read_rows<T: serde::de::DeserializeOwned, R: std::io::Read>(input: R) -> Result<Vec<T>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    rdr.deserialize().map(|r| r.map_err(Error::from)).collect()
}

fn write_rows<T: Serialize, W: Write>(out: W, rows: impl Iterator<Item = T>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| Error::io("<catalog>", e))?;
    Ok(())
}

fn split_list(s: &str) -> impl Iterator<Item = &str> {
    s.split(';').map(str::trim).filter(|x| !x.is_empty())
}

fn join_list<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items
        .into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(";")
}

fn parse_set<T: FromStr<Err = Error> + Ord>(s: &str) -> Result<BTreeSet<T>> {
    split_list(s).map(str::parse).collect()
}

/// Column headers of the firms file, in order.
pub const FIRM_COLUMNS: [&str; 9] = [
    "firm_id",
    "name",
    "hq_city",
    "office_cities",
    "stages",
    "industries",
    "investments_last_year",
    "conversation_count",
    "us_only_eligible",
];
/// Column headers of the investors file, in order.
pub const INVESTOR_COLUMNS: [&str; 9] = [
    "investor_id",
    "first_name",
    "last_name",
    "firm_id",
    "email",
    "featured",
    "verified",
    "topics",
    "industries",
];
/// Column headers of the companies file, in order.
pub const COMPANY_COLUMNS: [&str; 5] = [
    "company_id",
    "name",
    "industries",
    "city",
    "investor_firm_ids",
];

#[derive(Serialize, Deserialize)]
struct FirmRow {
    firm_id: String,
    name: String,
    hq_city: String,
    office_cities: String,
    stages: String,
    industries: String,
    investments_last_year: u32,
    conversation_count: u32,
    us_only_eligible: bool,
}

impl FirmRow {
    fn into_record(self) -> Result<FirmRecord> {
        if self.firm_id.is_empty() {
            return Err(Error::InvalidInput("empty firm_id".into()));
        }
        Ok(FirmRecord {
            office_cities: split_list(&self.office_cities).map(String::from).collect(),
            stages: parse_set(&self.stages)?,
            industries: parse_set(&self.industries)?,
            firm_id: self.firm_id,
            name: self.name,
            hq_city: self.hq_city,
            investments: Vec::new(),
            investments_last_year: self.investments_last_year,
            featured_investor_count: 0,
            verified_investor_count: 0,
            conversation_count: self.conversation_count,
            us_only_eligible: self.us_only_eligible,
            investors: Vec::new(),
        })
    }

    fn from_record(f: &FirmRecord) -> FirmRow {
        FirmRow {
            firm_id: f.firm_id.clone(),
            name: f.name.clone(),
            hq_city: f.hq_city.clone(),
            office_cities: join_list(&f.office_cities),
            stages: join_list(&f.stages),
            industries: join_list(&f.industries),
            investments_last_year: f.investments_last_year,
            conversation_count: f.conversation_count,
            us_only_eligible: f.us_only_eligible,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct InvestorRow {
    investor_id: String,
    first_name: String,
    last_name: String,
    firm_id: String,
    email: String,
    featured: bool,
    verified: bool,
    topics: String,
    industries: String,
}

impl InvestorRow {
    fn into_record(self) -> Result<InvestorRecord> {
        Ok(InvestorRecord {
            topics: split_list(&self.topics).map(String::from).collect(),
            industries: parse_set(&self.industries)?,
            email: Some(self.email.trim().to_lowercase()).filter(|e| !e.is_empty()),
            investor_id: self.investor_id,
            first_name: self.first_name,
            last_name: self.last_name,
            firm_id: self.firm_id,
            featured: self.featured,
            verified: self.verified,
        })
    }

    fn from_record(i: &InvestorRecord) -> InvestorRow {
        InvestorRow {
            investor_id: i.investor_id.clone(),
            first_name: i.first_name.clone(),
            last_name: i.last_name.clone(),
            firm_id: i.firm_id.clone(),
            email: i.email.clone().unwrap_or_default(),
            featured: i.featured,
            verified: i.verified,
            topics: join_list(&i.topics),
            industries: join_list(&i.industries),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct CompanyRow {
    company_id: String,
    name: String,
    industries: String,
    city: String,
    investor_firm_ids: String,
}

impl CompanyRow {
    fn into_record(self) -> Result<CompanyRecord> {
        Ok(CompanyRecord {
            industries: parse_set(&self.industries)?,
            investor_firm_ids: split_list(&self.investor_firm_ids)
                .map(String::from)
                .collect(),
            company_id: self.company_id,
            name: self.name,
            city: self.city,
        })
    }

    fn from_record(c: &CompanyRecord) -> CompanyRow {
        CompanyRow {
            company_id: c.company_id.clone(),
            name: c.name.clone(),
            industries: join_list(&c.industries),
            city: c.city.clone(),
            investor_firm_ids: join_list(&c.investor_firm_ids),
        }
    }
}
