//! Definition-level oracles shared by the integration tests and the
//! acceptance harness. Each one recomputes a quantity the slow, obvious way,
//! independently of the library's algorithm.

#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::{BTreeMap, BTreeSet};

use founderrank::catalog::{city_key, Catalog, FirmRecord, FundStage, Industry};
use founderrank::search::{ColumnSort, FilterQuery, FounderContext, SortColumn};
use founderrank::{CommGraph, NodeId, Ranking};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random directed graph on `2..=max_nodes` nodes with random weights,
/// some nodes possibly isolated.
pub fn random_graph(seed: u64, max_nodes: usize) -> CommGraph {
    let mut r = rng(seed);
    let n = r.gen_range(2..=max_nodes);
    let p = r.gen_range(0.05..0.35);
    let mut g = CommGraph::new();
    for i in 0..n {
        g.add_node(NodeId::new(format!("v{i:02}")));
    }
    for a in 0..n {
        for b in 0..n {
            if a != b && r.gen_bool(p) {
                g.add_edge(
                    NodeId::new(format!("v{a:02}")),
                    NodeId::new(format!("v{b:02}")),
                    r.gen_range(1..=5),
                );
            }
        }
    }
    g
}

pub fn ids(g: &CommGraph) -> Vec<NodeId> {
    g.nodes().cloned().collect()
}

/// Floyd-Warshall hop distances over directed edges.
pub fn hop_distances(g: &CommGraph) -> Vec<Vec<Option<usize>>> {
    let ids = ids(g);
    let n = ids.len();
    let mut d = vec![vec![None; n]; n];
    for i in 0..n {
        d[i][i] = Some(0);
        for j in 0..n {
            if i != j && g.weight(&ids[i], &ids[j]) > 0 {
                d[i][j] = Some(1);
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(a), Some(b)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|c| a + b < c) {
                        d[i][j] = Some(a + b);
                    }
                }
            }
        }
    }
    d
}

/// Betweenness by listing every shortest path between every ordered pair
/// and counting the share passing through each interior node, normalized
/// by `(N-1)(N-2)`.
pub fn brute_betweenness(g: &CommGraph) -> Vec<f64> {
    let ids = ids(g);
    let n = ids.len();
    let mut out = vec![0.0; n];
    if n < 3 {
        return out;
    }
    let d = hop_distances(g);
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| i != j && g.weight(&ids[i], &ids[j]) > 0)
                .collect()
        })
        .collect();
    for s in 0..n {
        for t in 0..n {
            let Some(dst) = d[s][t] else { continue };
            if s == t {
                continue;
            }
            let mut paths: Vec<Vec<usize>> = Vec::new();
            let mut stack = vec![vec![s]];
            while let Some(path) = stack.pop() {
                let u = *path.last().unwrap();
                if u == t {
                    paths.push(path);
                    continue;
                }
                for &w in &adj[u] {
                    if path.len() <= dst && d[w][t].is_some_and(|x| x + path.len() == dst) {
                        let mut next = path.clone();
                        next.push(w);
                        stack.push(next);
                    }
                }
            }
            let total = paths.len() as f64;
            for p in &paths {
                for &v in &p[1..p.len() - 1] {
                    out[v] += 1.0 / total;
                }
            }
        }
    }
    let norm = ((n - 1) * (n - 2)) as f64;
    out.iter_mut().for_each(|v| *v /= norm);
    out
}

/// Harmonic closeness from the all-pairs distance table.
pub fn brute_closeness(g: &CommGraph) -> Vec<f64> {
    let d = hop_distances(g);
    let n = d.len();
    if n < 2 {
        return vec![0.0; n];
    }
    (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i)
                .filter_map(|j| d[i][j])
                .map(|x| 1.0 / x as f64)
                .sum::<f64>()
                / (n - 1) as f64
        })
        .collect()
}

/// Gaussian elimination with partial pivoting.
pub fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

/// PageRank as the solution of `(I - dM) x = (1-d)/N`, where `M` is the
/// column-stochastic transition matrix with dangling columns uniform.
pub fn dense_pagerank(g: &CommGraph, damping: f64) -> Vec<f64> {
    let ids = ids(g);
    let n = ids.len();
    let nf = n as f64;
    let mut m = vec![vec![0.0; n]; n];
    for u in 0..n {
        let outs: Vec<usize> = (0..n)
            .filter(|&v| v != u && g.weight(&ids[u], &ids[v]) > 0)
            .collect();
        if outs.is_empty() {
            for row in m.iter_mut() {
                row[u] = 1.0 / nf;
            }
        } else {
            for &v in &outs {
                m[v][u] = 1.0 / outs.len() as f64;
            }
        }
    }
    let a: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| f64::from(u8::from(i == j)) - damping * m[i][j])
                .collect()
        })
        .collect();
    gauss_solve(a, vec![(1.0 - damping) / nf; n])
}

/// Kendall tau by counting concordant and discordant founder pairs.
pub fn tau_definition(x: &Ranking, b: &Ranking) -> f64 {
    let (px, pb) = (x.positions(), b.positions());
    let f: Vec<&NodeId> = b.order().iter().collect();
    let n = f.len();
    let mut net = 0i64;
    for i in 0..n {
        for j in i + 1..n {
            let sx = (px[f[i]] as i64 - px[f[j]] as i64).signum();
            let sb = (pb[f[i]] as i64 - pb[f[j]] as i64).signum();
            net += sx * sb;
        }
    }
    net as f64 / (n * (n - 1) / 2) as f64
}

/// Spearman rho from squared rank differences.
pub fn rho_definition(x: &Ranking, b: &Ranking) -> f64 {
    let (px, pb) = (x.positions(), b.positions());
    let n = b.len() as f64;
    let ssd: f64 = b
        .order()
        .iter()
        .map(|f| (px[f] as f64 - pb[f] as f64).powi(2))
        .sum();
    1.0 - 6.0 * ssd / (n * (n * n - 1.0))
}

/// NDCG with gains `2^(N - rg) - 1`, discounts `log2(i + 1)` over 1-based
/// positions, straight from the definition.
pub fn ndcg_definition(x: &Ranking, b: &Ranking) -> f64 {
    let pb = b.positions();
    let n = b.len() as i32;
    let gain = |rg: usize| 2f64.powi(n - rg as i32) - 1.0;
    let dcg: f64 = x
        .order()
        .iter()
        .enumerate()
        .map(|(i, f)| gain(pb[f]) / ((i + 2) as f64).log2())
        .sum();
    let ideal: f64 = (0..b.len())
        .map(|i| gain(i) / ((i + 2) as f64).log2())
        .sum();
    dcg / ideal
}

pub fn ranking_of(order: &[usize]) -> Ranking {
    Ranking::from_order(order.iter().map(|i| NodeId::new(format!("f{i}"))).collect()).unwrap()
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                go(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Top-k minimum-hop introduction paths by enumerating every simple
/// undirected path of at most `max_hops` hops.
pub fn brute_intro_paths(
    g: &CommGraph,
    from: &NodeId,
    to: &NodeId,
    max_hops: usize,
    k: usize,
) -> Vec<(Vec<NodeId>, u64)> {
    let strength = |a: &NodeId, b: &NodeId| g.weight(a, b) + g.weight(b, a);
    let nodes = ids(g);
    let mut found: Vec<Vec<NodeId>> = Vec::new();
    let mut stack = vec![vec![from.clone()]];
    while let Some(path) = stack.pop() {
        let last = path.last().unwrap();
        if last == to {
            found.push(path);
            continue;
        }
        if path.len() > max_hops {
            continue;
        }
        for n in &nodes {
            if strength(last, n) > 0 && !path.contains(n) {
                let mut next = path.clone();
                next.push(n.clone());
                stack.push(next);
            }
        }
    }
    let Some(shortest) = found.iter().map(Vec::len).min() else {
        return Vec::new();
    };
    let mut best: Vec<(Vec<NodeId>, u64)> = found
        .into_iter()
        .filter(|p| p.len() == shortest)
        .map(|p| {
            let s = p.windows(2).map(|w| strength(&w[0], &w[1])).sum();
            (p, s)
        })
        .collect();
    best.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    best.truncate(k);
    best
}

/// Textbook dynamic-programming edit distance.
pub fn dp_levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut t = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in t.iter_mut().enumerate() {
        row[0] = i;
    }
    for j in 0..=b.len() {
        t[0][j] = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let sub = t[i - 1][j - 1] + usize::from(a[i - 1] != b[j - 1]);
            t[i][j] = sub.min(t[i - 1][j] + 1).min(t[i][j - 1] + 1);
        }
    }
    t[a.len()][b.len()]
}

fn lower(s: &str) -> String {
    s.to_lowercase()
}

fn firm_cities(f: &FirmRecord) -> Vec<String> {
    let mut v = vec![city_key(&f.hq_city)];
    for c in &f.office_cities {
        let k = city_key(c);
        if !v.contains(&k) {
            v.push(k);
        }
    }
    v
}

/// Does the firm survive the query's search string and every filter?
/// Written predicate by predicate, with plain loops.
pub fn naive_keep(cat: &Catalog, f: &FirmRecord, q: &FilterQuery) -> bool {
    if let Some(raw) = &q.search {
        let s = raw.trim();
        if s.chars().count() >= 2 {
            let tokens: Vec<String> = s.split_whitespace().map(lower).collect();
            let first = tokens[0].clone();
            let last = tokens[tokens.len() - 1].clone();
            let mut hit = lower(&f.name).contains(&lower(s));
            for inv in &f.investors {
                if lower(&inv.first_name).contains(&first) || lower(&inv.last_name).contains(&last)
                {
                    hit = true;
                }
            }
            if !hit {
                return false;
            }
        }
    }
    if !q.stages.is_empty() && !q.stages.iter().any(|s| f.stages.contains(s)) {
        return false;
    }
    if !q.industries.is_empty() {
        let count = q
            .industries
            .iter()
            .filter(|i| f.industries.contains(i))
            .count();
        let ok = if q.industries_and {
            count == q.industries.len()
        } else {
            count > 0
        };
        if !ok {
            return false;
        }
    }
    if !q.cities.is_empty() {
        let wanted: Vec<String> = q.cities.iter().map(|c| city_key(c)).collect();
        let mut ok = false;
        if q.cities_invested_in {
            for cid in &f.investments {
                if let Some(c) = cat.companies.get(cid) {
                    if wanted.contains(&city_key(&c.city)) {
                        ok = true;
                    }
                }
            }
        } else {
            for c in firm_cities(f) {
                if wanted.contains(&c) {
                    ok = true;
                }
            }
        }
        if !ok {
            return false;
        }
    }
    if !q.related_companies.is_empty() {
        let mut ok = false;
        for cid in &f.investments {
            if q.related_similar {
                let Some(mine) = cat.companies.get(cid) else {
                    continue;
                };
                for rid in &q.related_companies {
                    if let Some(r) = cat.companies.get(rid) {
                        if r.industries.iter().any(|i| mine.industries.contains(i)) {
                            ok = true;
                        }
                    }
                }
            } else if q.related_companies.contains(cid) {
                ok = true;
            }
        }
        if !ok {
            return false;
        }
    }
    if !q.topics.is_empty() {
        let ok = f
            .investors
            .iter()
            .any(|i| i.topics.iter().any(|t| q.topics.contains(t)));
        if !ok {
            return false;
        }
    }
    !q.us_only || f.us_only_eligible
}

/// The six ordering keys, recomputed with plain loops.
pub fn naive_keys(f: &FirmRecord, who: &FounderContext, q: &FilterQuery) -> [usize; 6] {
    let mut topic = 0;
    for inv in &f.investors {
        if inv.topics.iter().any(|t| q.topics.contains(t)) {
            topic += 1;
        }
    }
    let featured = f.investors.iter().filter(|i| i.featured).count();
    let verified = f.investors.iter().filter(|i| i.verified).count();
    let inds = if q.industries.is_empty() {
        &who.industries
    } else {
        &q.industries
    };
    let ind = f.industries.iter().filter(|i| inds.contains(i)).count();
    let cities = if q.cities.is_empty() {
        &who.cities
    } else {
        &q.cities
    };
    let wanted: BTreeSet<String> = cities.iter().map(|c| city_key(c)).collect();
    let city = firm_cities(f)
        .into_iter()
        .filter(|c| wanted.contains(c))
        .count();
    [
        topic,
        featured,
        ind,
        city,
        f.conversation_count as usize,
        verified,
    ]
}

/// Full filter, search and ordering by brute force: keep, then insertion
/// sort by keys, then the optional column sort as a second stable pass.
pub fn naive_filter<'c>(
    cat: &'c Catalog,
    who: &FounderContext,
    q: &FilterQuery,
) -> Vec<&'c FirmRecord> {
    let mut out: Vec<&FirmRecord> = Vec::new();
    for f in &cat.firms {
        if !naive_keep(cat, f, q) {
            continue;
        }
        let key = (
            std::cmp::Reverse(naive_keys(f, who, q)),
            f.name.clone(),
            f.firm_id.clone(),
        );
        let pos = out
            .iter()
            .position(|o| {
                (
                    std::cmp::Reverse(naive_keys(o, who, q)),
                    o.name.clone(),
                    o.firm_id.clone(),
                ) > key
            })
            .unwrap_or(out.len());
        out.insert(pos, f);
    }
    if let Some(ColumnSort { column, descending }) = q.sort {
        let key = |f: &FirmRecord| -> (String, u32, u8) {
            match column {
                SortColumn::Firm => (f.name.clone(), 0, 0),
                SortColumn::Location => (f.hq_city.clone(), 0, 0),
                SortColumn::Pace => (String::new(), f.investments_last_year, 0),
                SortColumn::Stage => {
                    let rank = FundStage::ALL
                        .iter()
                        .position(|s| f.stages.contains(s))
                        .map_or(u8::MAX, |p| p as u8);
                    (String::new(), 0, rank)
                }
            }
        };
        // stable insertion sort keeps equal keys in ranked order; a firm
        // with no stage sorts after every staged firm when ascending
        let mut sorted: Vec<&FirmRecord> = Vec::new();
        for f in out {
            let k = key(f);
            let pos = sorted
                .iter()
                .position(|o| if descending { key(o) < k } else { key(o) > k })
                .unwrap_or(sorted.len());
            sorted.insert(pos, f);
        }
        out = sorted;
    }
    out
}

fn some<T: Clone>(items: &[T], r: &mut ChaCha8Rng, max: usize) -> Vec<T> {
    let k = r.gen_range(1..=max);
    items.choose_multiple(r, k).cloned().collect()
}

/// A random query over the catalog's own values.
pub fn random_query(cat: &Catalog, r: &mut ChaCha8Rng) -> FilterQuery {
    let mut q = FilterQuery::default();
    let stages: Vec<FundStage> = FundStage::ALL.to_vec();
    let industries: Vec<Industry> = Industry::all().collect();
    let cities: Vec<String> = cat.firms.iter().map(|f| f.hq_city.clone()).collect();
    let companies: Vec<String> = cat.companies.keys().cloned().collect();
    let topics: Vec<String> = cat.topics().into_iter().map(String::from).collect();
    if r.gen_bool(0.4) {
        q.stages = some(&stages, r, 2).into_iter().collect();
    }
    if r.gen_bool(0.4) {
        q.industries = some(&industries, r, 3).into_iter().collect();
        q.industries_and = r.gen_bool(0.3);
    }
    if r.gen_bool(0.3) {
        q.cities = some(&cities, r, 2).into_iter().collect();
        q.cities_invested_in = r.gen_bool(0.4);
    }
    if r.gen_bool(0.25) && !companies.is_empty() {
        q.related_companies = some(&companies, r, 2).into_iter().collect();
        q.related_similar = r.gen_bool(0.5);
    }
    if r.gen_bool(0.3) && !topics.is_empty() {
        q.topics = some(&topics, r, 2).into_iter().collect();
    }
    q.us_only = r.gen_bool(0.2);
    if r.gen_bool(0.3) {
        let f = cat.firms.choose(r).unwrap();
        q.search = Some(match (r.gen_range(0..3), f.investors.first()) {
            (0, Some(i)) => i.first_name[..i.first_name.len().min(3)].to_string(),
            (1, Some(i)) => format!("{} {}", i.first_name, i.last_name),
            _ => f.name.split_whitespace().next().unwrap().to_string(),
        });
    }
    if r.gen_bool(0.2) {
        let column = [
            SortColumn::Firm,
            SortColumn::Location,
            SortColumn::Pace,
            SortColumn::Stage,
        ][r.gen_range(0..4)];
        q.sort = Some(ColumnSort {
            column,
            descending: r.gen_bool(0.5),
        });
    }
    q
}

/// A query at least as strict as `q`: one more constraint, or a narrower
/// OR set, or OR switched to AND.
pub fn strengthen(cat: &Catalog, q: &FilterQuery, r: &mut ChaCha8Rng) -> FilterQuery {
    let mut s = q.clone();
    loop {
        match r.gen_range(0..6) {
            0 if q.stages.len() > 1 => {
                let drop = *q.stages.iter().next().unwrap();
                s.stages.remove(&drop);
            }
            0 if q.stages.is_empty() => {
                s.stages
                    .insert(FundStage::ALL[r.gen_range(0..FundStage::ALL.len())]);
            }
            1 if !q.industries.is_empty() && !q.industries_and => s.industries_and = true,
            1 if q.industries.is_empty() => {
                s.industries
                    .insert(Industry::all().nth(r.gen_range(0..34)).unwrap());
            }
            2 if !q.us_only => s.us_only = true,
            3 if q.effective_search().is_none() => {
                s.search = Some(cat.firms[r.gen_range(0..cat.firms.len())].name[..3].to_string());
            }
            4 if q.topics.is_empty() => {
                let topics: Vec<&str> = cat.topics().into_iter().collect();
                if let Some(t) = topics.choose(r) {
                    s.topics.insert(t.to_string());
                }
            }
            5 if q.cities.is_empty() => {
                s.cities
                    .insert(cat.firms[r.gen_range(0..cat.firms.len())].hq_city.clone());
            }
            _ => continue,
        }
        return s;
    }
}

pub fn firm_ids(firms: &[&FirmRecord]) -> Vec<String> {
    firms.iter().map(|f| f.firm_id.clone()).collect()
}

pub fn count_by<K: Ord, T>(items: &[T], key: impl Fn(&T) -> K) -> BTreeMap<K, usize> {
    let mut m = BTreeMap::new();
    for i in items {
        *m.entry(key(i)).or_insert(0) += 1;
    }
    m
}
