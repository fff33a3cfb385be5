use rand::distr::Distribution;
use rand::Rng;
use rand_distr::Binomial;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dataset::{CountDataset, CountRecord, Histogram};
use super::sampling::substream;
use crate::correlations::theta_from_g;
use crate::error::{Error, Result};
use crate::oracle::NumberMoments;

pub const DEFAULT_REPLICATES: usize = 200;
pub const MIN_REPLICATES: usize = 100;
pub const DEFAULT_BOOTSTRAP_SEED: u64 = 0;

/// Point estimate with a percentile bootstrap interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateWithCI {
    pub point: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Standard deviation of the bootstrap replicates.
    pub std_error: f64,
    pub bootstrap_replicates: usize,
}

impl EstimateWithCI {
    /// 2.5/97.5 percentiles of the finite replicate values. The interval is
    /// widened if needed so that it contains `point`.
    pub fn from_replicates(point: f64, values: &[f64]) -> Self {
        let mut v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
        v.sort_by(f64::total_cmp);
        let (low, high, sd) = if v.is_empty() {
            (point, point, 0.0)
        } else {
            (quantile(&v, 0.025), quantile(&v, 0.975), std_dev(&v))
        };
        Self {
            point,
            ci_low: low.min(point),
            ci_high: high.max(point),
            std_error: sd,
            bootstrap_replicates: v.len(),
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.ci_low <= x && x <= self.ci_high
    }
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let h = q * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn std_dev(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    let m = v.iter().sum::<f64>() / v.len() as f64;
    let ss: f64 = v.iter().map(|x| (x - m).powi(2)).sum();
    (ss / (v.len() - 1) as f64).sqrt()
}

/// Weighted sums from which every plug-in estimator follows.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct Summary {
    shots: f64,
    n1: f64,
    n2: f64,
    n12: f64,
    f12: f64,
    f1: f64,
    f2: f64,
}

impl Summary {
    fn add(&mut self, n1: u64, n2: u64, w: f64) {
        let (a, b) = (n1 as f64, n2 as f64);
        let (fa, fb) = (a * (a - 1.0), b * (b - 1.0));
        self.shots += w;
        self.n1 += w * a;
        self.n2 += w * b;
        self.n12 += w * a * b;
        self.f12 += w * fa * fb;
        self.f1 += w * fa;
        self.f2 += w * fb;
    }

    pub(crate) fn from_histogram(h: &Histogram) -> Self {
        let mut s = Self::default();
        for &((a, b), c) in &h.bins {
            s.add(a, b, c as f64);
        }
        s
    }

    fn from_weights(h: &Histogram, weights: &[u64]) -> Self {
        let mut s = Self::default();
        for (&((a, b), _), &w) in h.bins.iter().zip(weights) {
            if w > 0 {
                s.add(a, b, w as f64);
            }
        }
        s
    }

    pub(crate) fn moments(&self) -> Result<NumberMoments> {
        if !(self.shots > 0.0) {
            return Err(Error::Domain("no records to estimate from".into()));
        }
        let n1 = self.n1 / self.shots;
        let n2 = self.n2 / self.shots;
        if !(n1 > 0.0 && n2 > 0.0) {
            return Err(Error::Domain(format!(
                "mean counts must be positive in both modes, got {n1}, {n2}"
            )));
        }
        Ok(NumberMoments {
            n1,
            n2,
            g2_12: self.n12 / self.shots / (n1 * n2),
            g4_12: self.f12 / self.shots / (n1 * n1 * n2 * n2),
            g2_1: self.f1 / self.shots / (n1 * n1),
            g2_2: self.f2 / self.shots / (n2 * n2),
        })
    }
}

/// Plug-in estimators on a set of records, without uncertainties.
pub fn plug_in_moments(records: &[CountRecord]) -> Result<NumberMoments> {
    let mut s = Summary::default();
    for r in records {
        s.add(r.n1, r.n2, 1.0);
    }
    s.moments()
}

/// One multinomial resample of the histogram per replicate, which is the
/// same as resampling shots with replacement.
pub(crate) fn resample_histogram(h: &Histogram, replicates: usize, seed: u64) -> Vec<Summary> {
    let total = h.shots();
    (0..replicates)
        .into_par_iter()
        .map(|r| {
            let mut rng = substream(seed, r as u64);
            let mut weights = vec![0u64; h.bins.len()];
            let mut left = total;
            let mut mass_left = total;
            for (k, &(_, c)) in h.bins.iter().enumerate() {
                if left == 0 {
                    break;
                }
                if k + 1 == h.bins.len() || c == mass_left {
                    weights[k] = left;
                    break;
                }
                let p = (c as f64 / mass_left as f64).clamp(0.0, 1.0);
                let x = Binomial::new(left, p).expect("valid binomial").sample(&mut rng);
                weights[k] = x;
                left -= x;
                mass_left -= c;
            }
            Summary::from_weights(h, &weights)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimates {
    pub shots: usize,
    pub n1: EstimateWithCI,
    pub n2: EstimateWithCI,
    pub g2_12: EstimateWithCI,
    pub g4_12: EstimateWithCI,
    pub g2_1: EstimateWithCI,
    pub g2_2: EstimateWithCI,
    /// Missing when the point estimate of `g2_12` leaves `theta` undefined.
    pub theta: Option<EstimateWithCI>,
}

impl MomentEstimates {
    pub fn points(&self) -> NumberMoments {
        NumberMoments {
            n1: self.n1.point,
            n2: self.n2.point,
            g2_12: self.g2_12.point,
            g4_12: self.g4_12.point,
            g2_1: self.g2_1.point,
            g2_2: self.g2_2.point,
        }
    }
}

pub fn estimate_moments(data: &CountDataset) -> Result<MomentEstimates> {
    estimate_moments_with(data, DEFAULT_REPLICATES, DEFAULT_BOOTSTRAP_SEED)
}

pub fn estimate_moments_with(data: &CountDataset, replicates: usize, seed: u64) -> Result<MomentEstimates> {
    Ok(moments_and_replicates(data, replicates, seed)?.0)
}

pub(crate) fn moments_and_replicates(
    data: &CountDataset,
    replicates: usize,
    seed: u64,
) -> Result<(MomentEstimates, Vec<Summary>)> {
    if data.len() < 2 {
        return Err(Error::Domain(format!(
            "at least two records are needed, got {}",
            data.len()
        )));
    }
    check_replicates(replicates)?;
    let hist = data.histogram();
    let point = Summary::from_histogram(&hist).moments()?;
    let reps = resample_histogram(&hist, replicates, seed);
    let rep_moments: Vec<Option<NumberMoments>> = reps.iter().map(|s| s.moments().ok()).collect();
    let field = |f: fn(&NumberMoments) -> f64| {
        let values: Vec<f64> = rep_moments.iter().flatten().map(f).collect();
        EstimateWithCI::from_replicates(f(&point), &values)
    };
    let theta = theta_from_g(point.g2_12, point.g4_12).ok().map(|t| {
        let values: Vec<f64> = rep_moments
            .iter()
            .flatten()
            .filter_map(|m| theta_from_g(m.g2_12, m.g4_12).ok())
            .collect();
        EstimateWithCI::from_replicates(t, &values)
    });
    let est = MomentEstimates {
        shots: data.len(),
        n1: field(|m| m.n1),
        n2: field(|m| m.n2),
        g2_12: field(|m| m.g2_12),
        g4_12: field(|m| m.g4_12),
        g2_1: field(|m| m.g2_1),
        g2_2: field(|m| m.g2_2),
        theta,
    };
    Ok((est, reps))
}

fn check_replicates(replicates: usize) -> Result<()> {
    if replicates < MIN_REPLICATES {
        return Err(Error::Config(format!(
            "at least {MIN_REPLICATES} bootstrap replicates are required, got {replicates}"
        )));
    }
    Ok(())
}

/// Percentile bootstrap of an arbitrary statistic, resampling shots with
/// replacement.
pub fn bootstrap_ci<F>(data: &CountDataset, statistic: F, replicates: usize, seed: u64) -> Result<EstimateWithCI>
where
    F: Fn(&[CountRecord]) -> f64 + Sync,
{
    check_replicates(replicates)?;
    let records = data.records();
    if records.is_empty() {
        return Err(Error::Config("cannot bootstrap an empty dataset".into()));
    }
    let point = statistic(records);
    let values: Vec<f64> = (0..replicates)
        .into_par_iter()
        .map(|r| {
            let mut rng = substream(seed, r as u64);
            let sample: Vec<CountRecord> = (0..records.len())
                .map(|_| records[rng.random_range(0..records.len())])
                .collect();
            statistic(&sample)
        })
        .collect();
    Ok(EstimateWithCI::from_replicates(point, &values))
}

/// Whether both single-mode `g2` are compatible with thermal statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalCheck {
    pub passed: bool,
    pub tolerance_sigma: f64,
    pub g2_1: Option<EstimateWithCI>,
    pub g2_2: Option<EstimateWithCI>,
}

pub fn thermal_check(data: &CountDataset, tolerance_sigma: f64) -> ThermalCheck {
    match estimate_moments(data) {
        Ok(m) => thermal_check_from(&m, tolerance_sigma),
        Err(_) => ThermalCheck {
            passed: false,
            tolerance_sigma,
            g2_1: None,
            g2_2: None,
        },
    }
}

pub fn thermal_check_from(m: &MomentEstimates, tolerance_sigma: f64) -> ThermalCheck {
    let ok = |e: &EstimateWithCI| (e.point - 2.0).abs() <= tolerance_sigma * e.std_error;
    ThermalCheck {
        passed: ok(&m.g2_1) && ok(&m.g2_2),
        tolerance_sigma,
        g2_1: Some(m.g2_1),
        g2_2: Some(m.g2_2),
    }
}
