//! Fundraising-pattern analyses: how long founders spend raising, and how
//! email volume tracks the share of eventual investors committed.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::regression::solve_least_squares;

const DAY: i64 = 86_400;
const WEEK: i64 = 7 * DAY;
const SHARE_TOLERANCE: f64 = 1e-9;

/// One founder's raise. Timestamps are UTC seconds; weeks are counted from
/// the first wishlist addition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RaiseTimeline {
    pub founder_id: String,
    pub wishlist_first_add: i64,
    pub last_status_update: i64,
    /// `(week, fraction of the raise's emails sent that week)`.
    #[serde(default)]
    pub weekly_email_share: Vec<(u32, f64)>,
    /// `(week, fraction of eventual investors committed by then)`.
    #[serde(default)]
    pub committed_fraction_by_week: Vec<(u32, f64)>,
    /// Investors who end up committing.
    #[serde(default)]
    pub eventual_investors: u32,
}

impl RaiseTimeline {
    pub fn validate(&self) -> Result<()> {
        if self.last_status_update < self.wishlist_first_add {
            return Err(Error::InvalidTimeline {
                founder: self.founder_id.clone(),
            });
        }
        let bad = |what: &str| {
            Err(Error::InvalidInput(format!(
                "timeline {}: {what}",
                self.founder_id
            )))
        };
        if !self.weekly_email_share.is_empty() {
            let total: f64 = self.weekly_email_share.iter().map(|(_, s)| s).sum();
            if (total - 1.0).abs() > SHARE_TOLERANCE
                || self.weekly_email_share.iter().any(|(_, s)| *s < 0.0)
            {
                return bad("weekly email shares must be non-negative and sum to 1");
            }
        }
        let mut prev = 0.0;
        for &(_, c) in &self.committed_fraction_by_week {
            if !(0.0..=1.0).contains(&c) || c < prev {
                return bad("committed fractions must be non-decreasing within [0, 1]");
            }
            prev = c;
        }
        Ok(())
    }
}

/// Whole days from the first wishlist addition to the last status update.
pub fn fundraising_period(t: &RaiseTimeline) -> Result<i64> {
    if t.last_status_update < t.wishlist_first_add {
        return Err(Error::InvalidTimeline {
            founder: t.founder_id.clone(),
        });
    }
    Ok((t.last_status_update - t.wishlist_first_add) / DAY)
}

/// Weeks touched by the raise; a partial final week counts.
pub fn fundraising_weeks(t: &RaiseTimeline) -> Result<i64> {
    fundraising_period(t)?;
    let secs = t.last_status_update - t.wishlist_first_add;
    Ok((secs + WEEK - 1) / WEEK)
}

/// `(committed fraction, email share)` for each week present in both
/// series. Timelines without eventual investors contribute nothing.
pub fn volume_points(timelines: &[RaiseTimeline]) -> Vec<(f64, f64)> {
    let mut points = Vec::new();
    for t in timelines.iter().filter(|t| t.eventual_investors > 0) {
        let committed: BTreeMap<u32, f64> = t.committed_fraction_by_week.iter().copied().collect();
        for &(week, share) in &t.weekly_email_share {
            if let Some(&c) = committed.get(&week) {
                points.push((c, share));
            }
        }
    }
    points
}

#[derive(Debug, Clone, PartialEq)]
pub struct CubicFit {
    /// `c0 + c1 x + c2 x^2 + c3 x^3`.
    pub coefficients: [f64; 4],
    pub residual_norm: f64,
    pub residuals: Vec<f64>,
}

impl CubicFit {
    pub fn eval(&self, x: f64) -> f64 {
        self.coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c)
    }
}

const POWER_NAMES: [&str; 4] = ["x^0", "x^1", "x^2", "x^3"];
pub const MIN_FIT_POINTS: usize = 5;

/// Unweighted least-squares cubic through `(committed fraction, share)`
/// points.
pub fn volume_curve_fit(points: &[(f64, f64)]) -> Result<CubicFit> {
    let mut xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    if xs.len() < 4 {
        return Err(Error::SingularDesign {
            columns: POWER_NAMES[xs.len()..]
                .iter()
                .map(|s| s.to_string())
                .collect(),
        });
    }
    if points.len() < MIN_FIT_POINTS {
        return Err(Error::InvalidInput(format!(
            "cubic fit needs at least {MIN_FIT_POINTS} points, got {}",
            points.len()
        )));
    }
    if let Some(p) = points
        .iter()
        .find(|p| !(0.0..=1.0).contains(&p.0) || !p.1.is_finite())
    {
        return Err(Error::InvalidInput(format!("bad curve point {p:?}")));
    }
    let columns: Vec<Vec<f64>> = (0..4)
        .map(|k| points.iter().map(|p| p.0.powi(k)).collect())
        .collect();
    let names: Vec<String> = POWER_NAMES.iter().map(|s| s.to_string()).collect();
    let target: Vec<f64> = points.iter().map(|p| p.1).collect();
    let (coef, residuals) = solve_least_squares(&columns, &names, &target)?;
    let residual_norm = residuals.iter().map(|r| r * r).sum::<f64>().sqrt();
    Ok(CubicFit {
        coefficients: [coef[0], coef[1], coef[2], coef[3]],
        residual_norm,
        residuals,
    })
}

pub fn read_timelines<R: BufRead>(input: R) -> Result<Vec<RaiseTimeline>> {
    let mut out = Vec::new();
    for line in input.lines() {
        let line = line.map_err(|e| Error::io("<timelines>", e))?;
        if line.trim().is_empty() {
            continue;
        }
        let t: RaiseTimeline = serde_json::from_str(&line)?;
        t.validate()?;
        out.push(t);
    }
    Ok(out)
}

pub fn write_timelines<W: Write>(timelines: &[RaiseTimeline], mut out: W) -> Result<()> {
    for t in timelines {
        serde_json::to_writer(&mut out, t)?;
        writeln!(out).map_err(|e| Error::io("<timelines>", e))?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisReport {
    pub founders: usize,
    pub mean_period_days: f64,
    /// Weeks spent raising, to number of founders.
    pub week_histogram: BTreeMap<i64, usize>,
    pub fit: Option<CubicFit>,
    pub fit_points: usize,
    /// Timelines left out of the fit for lack of eventual investors.
    pub excluded_from_fit: usize,
}

/// Period statistics over all timelines and, when enough points exist, the
/// cubic volume fit.
pub fn analyze(timelines: &[RaiseTimeline]) -> Result<AnalysisReport> {
    let mut histogram = BTreeMap::new();
    let mut total_days = 0i64;
    for t in timelines {
        total_days += fundraising_period(t)?;
        *histogram.entry(fundraising_weeks(t)?).or_insert(0) += 1;
    }
    let points = volume_points(timelines);
    let fit = match volume_curve_fit(&points) {
        Ok(f) => Some(f),
        Err(Error::SingularDesign { .. } | Error::InvalidInput(_))
            if points.len() < MIN_FIT_POINTS =>
        {
            None
        }
        Err(e) => return Err(e),
    };
    Ok(AnalysisReport {
        founders: timelines.len(),
        mean_period_days: if timelines.is_empty() {
            0.0
        } else {
            total_days as f64 / timelines.len() as f64
        },
        week_histogram: histogram,
        fit,
        fit_points: points.len(),
        excluded_from_fit: timelines
            .iter()
            .filter(|t| t.eventual_investors == 0)
            .count(),
    })
}

impl AnalysisReport {
    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        let io = |e| Error::io("<report>", e);
        writeln!(out, "founders\t{}", self.founders).map_err(io)?;
        writeln!(out, "mean_period_days\t{}", self.mean_period_days).map_err(io)?;
        writeln!(out, "fit_points\t{}", self.fit_points).map_err(io)?;
        writeln!(out, "excluded_from_fit\t{}", self.excluded_from_fit).map_err(io)?;
        match &self.fit {
            Some(f) => {
                for (k, c) in f.coefficients.iter().enumerate() {
                    writeln!(out, "c{k}\t{c}").map_err(io)?;
                }
                writeln!(out, "residual_norm\t{}", f.residual_norm).map_err(io)?;
            }
            None => writeln!(out, "fit\tnone").map_err(io)?,
        }
        writeln!(out, "\nweeks\tfounders").map_err(io)?;
        for (w, n) in &self.week_histogram {
            writeln!(out, "{w}\t{n}").map_err(io)?;
        }
        Ok(())
    }
}
