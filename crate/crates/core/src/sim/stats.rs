use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::engine::{run_replication, ReplicationResult};
use super::Scenario;
use crate::error::{Error, Result};

/// Confidence level of every interval reported here.
pub const CONFIDENCE: f64 = 0.95;

/// Sample mean with a two-sided Student-t confidence interval.
#[derive(Clone, Copy, PartialEq, Debug, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_err: f64,
    pub half_width: f64,
    pub samples: usize,
    /// Samples are 0/1 indicators. Agreement with a hypothesised
    /// probability then uses the score test, whose standard error comes
    /// from the hypothesis and stays meaningful for rare events.
    pub indicator: bool,
}

impl Estimate {
    /// Needs at least two samples for a finite interval.
    pub fn from_samples(xs: &[f64]) -> Option<Self> {
        if xs.is_empty() {
            return None;
        }
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        if xs.len() < 2 {
            return Some(Self {
                mean,
                std_err: f64::INFINITY,
                half_width: f64::INFINITY,
                samples: xs.len(),
                indicator: false,
            });
        }
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let std_err = (var / n).sqrt();
        Some(Self {
            mean,
            std_err,
            half_width: critical_value(xs.len()) * std_err,
            samples: xs.len(),
            indicator: false,
        })
    }

    pub fn from_indicators(xs: &[f64]) -> Option<Self> {
        Self::from_samples(xs).map(|e| Self { indicator: true, ..e })
    }

    fn hypothesis_std_err(&self, p: f64) -> Option<f64> {
        (self.indicator && (0.0..=1.0).contains(&p))
            .then(|| (p * (1.0 - p) / self.samples as f64).sqrt())
    }

    pub fn lower(&self) -> f64 {
        self.mean - self.half_width
    }

    pub fn upper(&self) -> f64 {
        self.mean + self.half_width
    }

    /// Whether `value` lies in the interval, allowing for rounding of the
    /// sample sums.
    pub fn contains(&self, value: f64) -> bool {
        let slack = 1e-9 * value.abs().max(1.0);
        let half_width = match self.hypothesis_std_err(value) {
            Some(se) if self.samples >= 2 => critical_value(self.samples) * se,
            _ => self.half_width,
        };
        (value - self.mean).abs() <= half_width + slack
    }

    /// Distance from the mean in standard errors.
    pub fn z(&self, value: f64) -> f64 {
        let std_err = self.hypothesis_std_err(value).unwrap_or(self.std_err);
        if std_err == 0.0 {
            if (value - self.mean).abs() <= 1e-9 * value.abs().max(1.0) {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (value - self.mean).abs() / std_err
        }
    }
}

/// Two-sided Student-t quantile for `samples` observations.
fn critical_value(samples: usize) -> f64 {
    StudentsT::new(0.0, 1.0, samples as f64 - 1.0)
        .expect("degrees of freedom are positive")
        .inverse_cdf(0.5 + CONFIDENCE / 2.0)
}

#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct AggregateStats {
    pub replications: usize,
    pub blocked: usize,
    pub blocking_rate: Estimate,
    pub mean_available: Option<Estimate>,
    pub mean_diff_delay: Option<Estimate>,
    pub p_up_empirical: Option<Estimate>,
    pub mean_deskew: Option<Estimate>,
    pub mean_decoding: Option<Estimate>,
    pub mean_decoding_steady: Option<Estimate>,
    pub decode_failures: usize,
    pub stalls: usize,
    pub voq_conflicts: usize,
    /// Fraction of delivered replications whose frames all arrived intact.
    pub intact_rate: f64,
}

/// Runs every replication of `s`, in parallel, and merges the results in
/// replication order so the outcome depends only on the scenario.
pub fn run_scenario(s: &Scenario) -> Result<AggregateStats> {
    s.validate()?;
    let mut s = s.clone();
    if s.redraw_per_frame {
        s.replications *= s.frames_per_replication;
        s.frames_per_replication = 1;
    }
    let results: Vec<ReplicationResult> = (0..s.replications as u64)
        .into_par_iter()
        .map(|i| run_replication(&s, &mut s.replication_rng(i)))
        .collect::<Result<_>>()?;
    aggregate(&results)
}

pub fn aggregate(results: &[ReplicationResult]) -> Result<AggregateStats> {
    let delivered: Vec<_> = results.iter().filter_map(|r| r.delivery.as_ref()).collect();
    if delivered.is_empty() {
        return Err(Error::AllBlocked);
    }
    let blocked = results.len() - delivered.len();
    let flags: Vec<f64> = results.iter().map(|r| f64::from(u8::from(r.blocked()))).collect();
    let values = |f: &dyn Fn(&super::engine::Delivery) -> Option<f64>| -> Vec<f64> {
        delivered.iter().filter_map(|d| f(d)).collect()
    };
    let collect = |f: &dyn Fn(&super::engine::Delivery) -> Option<f64>| Estimate::from_samples(&values(f));
    Ok(AggregateStats {
        replications: results.len(),
        blocked,
        blocking_rate: Estimate::from_indicators(&flags).expect("at least one replication"),
        mean_available: collect(&|d| Some(d.available as f64)),
        mean_diff_delay: collect(&|d| d.diff_delay.map(|v| v as f64)),
        p_up_empirical: Estimate::from_indicators(&values(&|d| {
            d.diff_delay.map(|_| f64::from(u8::from(d.hit_tau_up)))
        })),
        mean_deskew: collect(&|d| d.deskew_peak.map(|v| v as f64)),
        mean_decoding: collect(&|d| d.decoding_peak.map(|v| v as f64)),
        mean_decoding_steady: collect(&|d| d.decoding_steady_mean),
        decode_failures: delivered.iter().map(|d| d.decode_failures).sum(),
        stalls: delivered.iter().map(|d| d.stalls).sum(),
        voq_conflicts: delivered.iter().map(|d| d.voq_conflicts).sum(),
        intact_rate: delivered.iter().filter(|d| d.frame_intact).count() as f64
            / delivered.len() as f64,
    })
}
