mod common;

use std::collections::BTreeSet;

use common::{dp_levenshtein, firm_ids, naive_filter, random_query, rng, strengthen};
use founderrank::catalog::{Catalog, CompanyRecord, Industry};
use founderrank::search::{
    covering_industries, filter_and_search, guess_column_mapping, hub_cities, FounderContext,
    HUB_CITY_THRESHOLD, MAX_HEADER_DISTANCE,
};
use founderrank::synth::{generate, SynthSpec};
use proptest::prelude::*;
use rand::Rng;

fn fixture() -> Catalog {
    let spec = SynthSpec {
        seed: 11,
        founders: 120,
        investors: 400,
        persons: 10,
        firms: 200,
        ..SynthSpec::default()
    };
    generate(&spec).unwrap().catalog
}

fn founder(r: &mut rand_chacha::ChaCha8Rng) -> FounderContext {
    FounderContext {
        industries: Industry::all().filter(|_| r.gen_bool(0.1)).collect(),
        cities: ["Boston", "Austin", "London"]
            .iter()
            .filter(|_| r.gen_bool(0.5))
            .map(|c| c.to_string())
            .collect(),
    }
}

#[test]
fn filter_equals_naive_oracle() {
    let cat = fixture();
    assert_eq!(cat.firms.len(), 200);
    let mut r = rng(5);
    for i in 0..300 {
        let q = random_query(&cat, &mut r);
        let who = founder(&mut r);
        let got = filter_and_search(&cat, &who, &q).unwrap();
        assert_eq!(
            firm_ids(&got),
            firm_ids(&naive_filter(&cat, &who, &q)),
            "query {i}: {q:?}"
        );
    }
}

#[test]
fn strengthening_never_enlarges() {
    let cat = fixture();
    let mut r = rng(6);
    for _ in 0..300 {
        let q = random_query(&cat, &mut r);
        let s = strengthen(&cat, &q, &mut r);
        let who = founder(&mut r);
        let weak: BTreeSet<String> = firm_ids(&filter_and_search(&cat, &who, &q).unwrap())
            .into_iter()
            .collect();
        let strong: BTreeSet<String> = firm_ids(&filter_and_search(&cat, &who, &s).unwrap())
            .into_iter()
            .collect();
        assert!(strong.is_subset(&weak), "{q:?} -> {s:?}");
    }
}

#[test]
fn fully_specified_query_ignores_founder() {
    let cat = fixture();
    let mut r = rng(7);
    for _ in 0..50 {
        let mut q = random_query(&cat, &mut r);
        if q.industries.is_empty() {
            q.industries.insert(Industry::all().next().unwrap());
        }
        if q.cities.is_empty() {
            q.cities.insert(cat.firms[0].hq_city.clone());
        }
        let a = filter_and_search(&cat, &founder(&mut r), &q).unwrap();
        let b = filter_and_search(&cat, &founder(&mut r), &q).unwrap();
        assert_eq!(firm_ids(&a), firm_ids(&b));
    }
}

#[test]
fn hub_city_boundary() {
    let mut firms = fixture().firms;
    for f in firms.iter_mut() {
        f.hq_city = "Nowhere".into();
        f.office_cities.clear();
    }
    for f in firms.iter_mut().take(HUB_CITY_THRESHOLD) {
        f.office_cities = vec!["Denver".into(), " denver".into()];
    }
    assert!(hub_cities(&firms, HUB_CITY_THRESHOLD).contains("denver"));
    firms[0].office_cities.clear();
    assert!(!hub_cities(&firms, HUB_CITY_THRESHOLD).contains("denver"));
}

proptest! {
    #[test]
    fn covering_selection_covers(sets in prop::collection::vec(prop::collection::btree_set(0usize..34, 1..4), 0..30)) {
        let all: Vec<Industry> = Industry::all().collect();
        let companies: Vec<CompanyRecord> = sets
            .iter()
            .enumerate()
            .map(|(i, s)| CompanyRecord {
                company_id: format!("c{i}"),
                name: format!("c{i}"),
                industries: s.iter().map(|&j| all[j]).collect(),
                city: "Boston".into(),
                investor_firm_ids: Vec::new(),
            })
            .collect();
        let picked: BTreeSet<Industry> = covering_industries(&companies).into_iter().collect();
        for c in &companies {
            prop_assert!(!c.industries.is_disjoint(&picked));
        }
    }

    #[test]
    fn mapping_respects_dp_edit_distance(headers in prop::collection::vec("[a-zA-Z _]{0,14}", 1..8)) {
        let canonical: Vec<String> = founderrank::catalog::FIRM_COLUMNS.iter().map(|c| c.to_string()).collect();
        let mapping = guess_column_mapping(&headers, &canonical);
        let norm = |s: &str| s.trim().to_lowercase();
        let used: BTreeSet<&String> = mapping.values().collect();
        prop_assert_eq!(used.len(), mapping.len());
        for (h, field) in &mapping {
            let d = dp_levenshtein(&norm(&headers[*h]), &norm(field));
            prop_assert!(d <= MAX_HEADER_DISTANCE);
            // no free field was strictly closer to this header
            for c in canonical.iter().filter(|c| !used.contains(c)) {
                prop_assert!(dp_levenshtein(&norm(&headers[*h]), &norm(c)) >= d);
            }
        }
        for (i, h) in headers.iter().enumerate() {
            if !mapping.contains_key(&i) {
                for c in canonical.iter().filter(|c| !used.contains(c)) {
                    prop_assert!(dp_levenshtein(&norm(h), &norm(c)) > MAX_HEADER_DISTANCE);
                }
            }
        }
    }
}

#[test]
fn mapping_examples() {
    let canonical = vec!["firm".to_string(), "investor name".to_string()];
    let headers = vec![
        "Firm".to_string(),
        "Investor Nme".to_string(),
        "zzzz".to_string(),
    ];
    assert_eq!(dp_levenshtein("investor nme", "investor name"), 1);
    let m = guess_column_mapping(&headers, &canonical);
    assert_eq!(m.get(&0).map(String::as_str), Some("firm"));
    assert_eq!(m.get(&1).map(String::as_str), Some("investor name"));
    assert!(!m.contains_key(&2));
}
