//! Comparing a candidate founder ranking against a baseline: NDCG,
//! Precision@n, Kendall's tau, Spearman's rho, RMSE, MAE and permutation
//! p-values for the two rank correlations.
//!
//! Ranks are 0-based throughout; `rg(f)` is a founder's position in the
//! baseline, so the best baseline founder has relevance `N`.

use std::collections::BTreeMap;
use std::io::Write;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::NodeId;
use crate::ranking::Ranking;

/// Rank scaled to [0, 1]: position `r` of `N` scores `1 - r/(N-1)`.
pub fn baseline_scores(b: &Ranking) -> BTreeMap<NodeId, f64> {
    let n = b.len();
    b.order()
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
        .collect()
}

/// Baseline ranks of the candidate's founders, in candidate order:
/// `ranks[i] = rg(X_i)`. Fails unless both rankings cover the same founders.
pub fn candidate_ranks(x: &Ranking, b: &Ranking) -> Result<Vec<usize>> {
    if x.len() != b.len() {
        return Err(Error::InvalidInput(format!(
            "candidate ranks {} founders, baseline {}",
            x.len(),
            b.len()
        )));
    }
    let pos = b.positions();
    x.order()
        .iter()
        .map(|f| {
            pos.get(f)
                .copied()
                .ok_or_else(|| Error::InvalidInput(format!("founder {f} missing from baseline")))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Gain {
    /// `2^(N - rg) - 1`.
    #[default]
    Exponential,
    /// `N - rg`, for large-N exploration only.
    Linear,
}

/// `sum_i gain(rg(X_i)) / log2(i + 1)` over 1-based positions `i`.
///
/// Exponential gains are computed scaled by `2^-N`, which is exact in
/// binary floating point and leaves the NDCG ratio unchanged while keeping
/// large `N` finite.
fn scaled_dcg(ranks: &[usize], gain: Gain) -> f64 {
    let n = ranks.len();
    let floor = (-(n as f64)).exp2();
    let mut sum = 0.0;
    let mut comp = 0.0;
    for (i, &rg) in ranks.iter().enumerate() {
        let g = match gain {
            Gain::Exponential => (-(rg as f64)).exp2() - floor,
            Gain::Linear => (n - rg) as f64,
        };
        let term = g / ((i + 2) as f64).log2();
        // Neumaier compensated summation
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Unscaled DCG with exponential gains. Overflows to infinity past N ≈ 1023.
pub fn dcg(x: &Ranking, b: &Ranking) -> Result<f64> {
    let ranks = candidate_ranks(x, b)?;
    Ok(scaled_dcg(&ranks, Gain::Exponential) * (ranks.len() as f64).exp2())
}

pub fn ndcg(x: &Ranking, b: &Ranking) -> Result<f64> {
    ndcg_with_gain(x, b, Gain::Exponential)
}

pub fn ndcg_with_gain(x: &Ranking, b: &Ranking, gain: Gain) -> Result<f64> {
    let ranks = candidate_ranks(x, b)?;
    Ok(ndcg_of_ranks(&ranks, gain))
}

pub fn ndcg_of_ranks(ranks: &[usize], gain: Gain) -> f64 {
    if ranks.is_empty() {
        return 1.0;
    }
    let ideal: Vec<usize> = (0..ranks.len()).collect();
    scaled_dcg(ranks, gain) / scaled_dcg(&ideal, gain)
}

/// Fraction of the candidate's top `n` that is also in the baseline's top `n`.
pub fn precision_at(x: &Ranking, b: &Ranking, n: usize) -> Result<f64> {
    let ranks = candidate_ranks(x, b)?;
    precision_of_ranks(&ranks, n)
}

pub fn precision_of_ranks(ranks: &[usize], n: usize) -> Result<f64> {
    if n == 0 || n > ranks.len() {
        return Err(Error::InvalidInput(format!(
            "precision cutoff {n} outside 1..={}",
            ranks.len()
        )));
    }
    let hits = ranks[..n].iter().filter(|&&rg| rg < n).count();
    Ok(hits as f64 / n as f64)
}

pub fn kendall_tau(x: &Ranking, b: &Ranking) -> Result<f64> {
    let ranks = candidate_ranks(x, b)?;
    require_pairs(ranks.len())?;
    Ok(tau_of_ranks(&ranks))
}

/// `sum over ordered pairs i != j of sign(rg(X_i) - rg(X_j)) * sign(i - j)`,
/// divided by `N(N-1)`. Each unordered pair contributes twice, so counting
/// `i < j` once and doubling is equivalent.
pub fn tau_of_ranks(ranks: &[usize]) -> f64 {
    let n = ranks.len();
    if n < 2 {
        return 0.0;
    }
    let mut net: i64 = 0;
    for i in 0..n {
        let ri = ranks[i];
        for &rj in &ranks[i + 1..] {
            // i < j, so sign(i - j) = -1
            net += (rj > ri) as i64 - (rj < ri) as i64;
        }
    }
    (2 * net) as f64 / (n * (n - 1)) as f64
}

pub fn spearman_rho(x: &Ranking, b: &Ranking) -> Result<f64> {
    let ranks = candidate_ranks(x, b)?;
    require_pairs(ranks.len())?;
    Ok(rho_of_ranks(&ranks))
}

/// `1 - 6 * sum_i (rg(X_i) - i)^2 / (N (N^2 - 1))`.
pub fn rho_of_ranks(ranks: &[usize]) -> f64 {
    let n = ranks.len();
    if n < 2 {
        return 0.0;
    }
    let ssd: u128 = ranks
        .iter()
        .enumerate()
        .map(|(i, &rg)| {
            let d = rg.abs_diff(i) as u128;
            d * d
        })
        .sum();
    let n = n as u128;
    1.0 - (6 * ssd) as f64 / (n * (n * n - 1)) as f64
}

fn require_pairs(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidInput(
            "rank correlation needs at least two founders".into(),
        ));
    }
    Ok(())
}

fn score_diffs(x: &Ranking, b: &Ranking) -> Result<Vec<f64>> {
    candidate_ranks(x, b)?;
    Ok(b.scores()
        .iter()
        .map(|(f, sb)| x.score(f).expect("same founder set") - sb)
        .collect())
}

/// Root-mean-square of `sc(X, f) - sc(B, f)` over founders.
pub fn rmse(x: &Ranking, b: &Ranking) -> Result<f64> {
    let d = score_diffs(x, b)?;
    if d.is_empty() {
        return Ok(0.0);
    }
    Ok((d.iter().map(|v| v * v).sum::<f64>() / d.len() as f64).sqrt())
}

/// Mean absolute `sc(X, f) - sc(B, f)` over founders.
pub fn mae(x: &Ranking, b: &Ranking) -> Result<f64> {
    let d = score_diffs(x, b)?;
    if d.is_empty() {
        return Ok(0.0);
    }
    Ok(d.iter().map(|v| v.abs()).sum::<f64>() / d.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrelationStat {
    Tau,
    Rho,
}

impl CorrelationStat {
    pub fn of_ranks(self, ranks: &[usize]) -> f64 {
        match self {
            CorrelationStat::Tau => tau_of_ranks(ranks),
            CorrelationStat::Rho => rho_of_ranks(ranks),
        }
    }
}

pub const MIN_TRIALS: usize = 100;

/// Two-sided Monte Carlo permutation test of zero rank correlation.
///
/// Each trial shuffles the candidate order with its own generator (the
/// seed's ChaCha stream number is the trial index), so the result does not
/// depend on how trials are scheduled. Returns
/// `(1 + #{|stat| >= |observed|}) / (trials + 1)`.
pub fn perm_pvalue(
    stat: CorrelationStat,
    x: &Ranking,
    b: &Ranking,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    let ranks = candidate_ranks(x, b)?;
    require_pairs(ranks.len())?;
    pvalue_of_ranks(stat, &ranks, trials, seed)
}

pub fn pvalue_of_ranks(
    stat: CorrelationStat,
    ranks: &[usize],
    trials: usize,
    seed: u64,
) -> Result<f64> {
    if trials < MIN_TRIALS {
        return Err(Error::InvalidInput(format!(
            "permutation test needs at least {MIN_TRIALS} trials, got {trials}"
        )));
    }
    let observed = stat.of_ranks(ranks).abs();
    let at_least: usize = (0..trials as u64)
        .into_par_iter()
        .map_init(
            || ranks.to_vec(),
            |buf, trial| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(trial);
                buf.copy_from_slice(ranks);
                buf.shuffle(&mut rng);
                (stat.of_ranks(buf).abs() >= observed - 1e-12) as usize
            },
        )
        .sum();
    Ok((at_least + 1) as f64 / (trials + 1) as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalOptions {
    pub precision_cutoffs: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub gain: Gain,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            precision_cutoffs: vec![5, 10, 20],
            trials: 10_000,
            seed: 0,
            gain: Gain::Exponential,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub n: usize,
    pub ndcg: f64,
    /// Cutoffs larger than `n` are left out.
    pub precision_at: BTreeMap<usize, f64>,
    pub kendall_tau: f64,
    pub spearman_rho: f64,
    pub rmse: f64,
    pub mae: f64,
    pub p_tau: f64,
    pub p_rho: f64,
    pub gain: Gain,
}

pub fn evaluate(x: &Ranking, b: &Ranking, opts: &EvalOptions) -> Result<EvalReport> {
    let ranks = candidate_ranks(x, b)?;
    require_pairs(ranks.len())?;
    let mut precision = BTreeMap::new();
    for &n in &opts.precision_cutoffs {
        if n >= 1 && n <= ranks.len() {
            precision.insert(n, precision_of_ranks(&ranks, n)?);
        }
    }
    Ok(EvalReport {
        n: ranks.len(),
        ndcg: ndcg_of_ranks(&ranks, opts.gain),
        precision_at: precision,
        kendall_tau: tau_of_ranks(&ranks),
        spearman_rho: rho_of_ranks(&ranks),
        rmse: rmse(x, b)?,
        mae: mae(x, b)?,
        p_tau: pvalue_of_ranks(CorrelationStat::Tau, &ranks, opts.trials, opts.seed)?,
        p_rho: pvalue_of_ranks(CorrelationStat::Rho, &ranks, opts.trials, opts.seed)?,
        gain: opts.gain,
    })
}

impl EvalReport {
    /// Flat `key<TAB>value` lines in results-table column order.
    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        let io = |e| Error::io("<report>", e);
        writeln!(out, "N\t{}", self.n).map_err(io)?;
        writeln!(out, "NDCG\t{}", self.ndcg).map_err(io)?;
        for (n, p) in &self.precision_at {
            writeln!(out, "P@{n}\t{p}").map_err(io)?;
        }
        writeln!(out, "tau\t{}", self.kendall_tau).map_err(io)?;
        writeln!(out, "rho\t{}", self.spearman_rho).map_err(io)?;
        writeln!(out, "RMSE\t{}", self.rmse).map_err(io)?;
        writeln!(out, "MAE\t{}", self.mae).map_err(io)?;
        writeln!(out, "p_tau\t{}", self.p_tau).map_err(io)?;
        writeln!(out, "p_rho\t{}", self.p_rho).map_err(io)?;
        let gain = match self.gain {
            Gain::Exponential => "exponential",
            Gain::Linear => "linear (non-standard)",
        };
        writeln!(out, "gain\t{gain}").map_err(io)?;
        Ok(())
    }
}
