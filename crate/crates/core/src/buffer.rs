//! Receiver queue sizes for the deskew (uncoded) and VOQ decoding (coded)
//! architectures, their expectations under random path choice, and bounds.
//!
//! Sizes are in blocks.

use num::{BigInt, Zero};
use serde::Serialize;

use crate::combin::{to_f64, Ratio};
use crate::delay::{expected_diff_delay, expected_diff_delay_redundant, expected_mth_delay};
use crate::error::{invalid, Error, Result};
use crate::paths::DelayVector;

/// Tolerance when flooring cycle ratios that are integers up to rounding.
const FLOOR_SLACK: f64 = 1e-9;

/// Round-robin receiver scheduler: one poll plus one forward per queue
/// visit, a full cycle over `n` queues taking `n (t_poll + t_f)` tu.
#[derive(Clone, Copy, PartialEq, Debug, Serialize)]
pub struct SchedulerModel {
    pub k: usize,
    pub n: usize,
    pub t_poll: f64,
    pub t_f: f64,
}

impl SchedulerModel {
    pub fn new(k: usize, n: usize, t_poll: f64, t_f: f64) -> Result<Self> {
        if k == 0 || n < k {
            return Err(invalid(format!("scheduler needs 1 <= k <= n (k={k}, n={n})")));
        }
        if !(t_poll >= 0.0 && t_f > 0.0) {
            return Err(invalid("t_poll must be >= 0 and t_f > 0"));
        }
        let cycle = n as f64 * (t_poll + t_f);
        if cycle > 1.0 {
            return Err(Error::CycleTooLong { cycle });
        }
        Ok(Self { k, n, t_poll, t_f })
    }

    /// `t_f = 1/(n+1)` and `t_poll = t_f/100`.
    pub fn with_defaults(k: usize, n: usize) -> Result<Self> {
        let t_f = 1.0 / (n as f64 + 1.0);
        Self::new(k, n, t_f / 100.0, t_f)
    }

    /// Time to serve `queues` queues once.
    pub fn cycle(&self, queues: usize) -> f64 {
        queues as f64 * (self.t_poll + self.t_f)
    }

    /// Decoding interval, taken as the time to serve `k` queues.
    pub fn decoding_interval(&self) -> f64 {
        self.cycle(self.k)
    }

    /// Blocks forwarded within `interval` tu.
    pub fn forwarded_within(&self, interval: f64) -> usize {
        (interval / (self.t_poll + self.t_f) + FLOOR_SLACK).floor() as usize
    }

    /// Steady-state queue contribution per decoding interval.
    pub fn steady_per_cycle(&self) -> usize {
        self.forwarded_within(self.decoding_interval())
    }
}

/// Queue sizes for one realized path set.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub struct BufferReport {
    pub deskew_size: u64,
    pub decoding_size: u64,
    pub initial_phase: u64,
    pub steady_per_cycle: u64,
    pub upper_bound: u64,
    pub lower_bound: u64,
}

impl BufferReport {
    /// `set` holds the ascending delays of the chosen `n >= k` paths and
    /// `all` the delay vector they were picked from.
    pub fn for_set(set: &[u64], k: usize, all: &DelayVector) -> Result<Self> {
        check_set(set, k)?;
        let r = set.len() - k;
        let tau = set[k - 1] - set[0];
        let initial_phase = initial_phase(set, k)?;
        Ok(Self {
            deskew_size: deskew_buffer(tau, k)?,
            decoding_size: k as u64 + initial_phase,
            initial_phase,
            steady_per_cycle: k as u64,
            upper_bound: decoding_buffer_upper_topo(all, k, r)?,
            lower_bound: k as u64 + tau,
        })
    }
}

fn check_set(set: &[u64], k: usize) -> Result<()> {
    if k == 0 || set.len() < k {
        return Err(invalid(format!("need n >= k >= 1 (n={}, k={k})", set.len())));
    }
    if set.windows(2).any(|w| w[0] > w[1]) {
        return Err(invalid("path delays must be sorted ascending"));
    }
    Ok(())
}

/// `k (tau + 1)`.
pub fn deskew_buffer(tau: u64, k: usize) -> Result<u64> {
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    Ok(k as u64 * (tau + 1))
}

/// Blocks queued before the first generation completes:
/// `sum_{m<=k} (d_(k) - d_(m))` over the `k` fastest of the set.
pub fn initial_phase(set: &[u64], k: usize) -> Result<u64> {
    check_set(set, k)?;
    Ok(crate::select::accumulated_skew(set, k))
}

/// `k + sum_{m<=k} (d_(k) - d_(m))`; redundant slower paths are ignored.
pub fn decoding_buffer(set: &[u64], k: usize) -> Result<u64> {
    Ok(k as u64 + initial_phase(set, k)?)
}

/// Same, with the steady-state term taken from a scheduler model.
pub fn decoding_buffer_scheduled(set: &[u64], sched: &SchedulerModel) -> Result<u64> {
    Ok(sched.steady_per_cycle() as u64 + initial_phase(set, sched.k)?)
}

fn check_dkr(d: &DelayVector, k: usize, r: usize) -> Result<()> {
    if k == 0 || k + r > d.len() {
        return Err(invalid(format!(
            "need 1 <= k and k+r <= N (k={k}, r={r}, N={})",
            d.len()
        )));
    }
    Ok(())
}

/// Mean decoding queue over uniform `(k+r)`-subsets, from exact order
/// statistics: `k + sum_m (E{d_(k)} - E{d_(m)})`.
pub fn expected_decoding_buffer(d: &DelayVector, k: usize, r: usize) -> Result<Ratio> {
    check_dkr(d, k, r)?;
    let n = k + r;
    let top = expected_mth_delay(d, n, k)?;
    let mut sum = Ratio::zero();
    for m in 1..k {
        sum += &top - expected_mth_delay(d, n, m)?;
    }
    Ok(Ratio::from_integer(BigInt::from(k)) + sum)
}

/// Equal-spacing approximation `k + tau_bar(r) k / 2`.
pub fn expected_decoding_buffer_approx(d: &DelayVector, k: usize, r: usize) -> Result<Ratio> {
    let tau = expected_diff_delay_redundant(d, k, r)?;
    let kk = Ratio::from_integer(BigInt::from(k));
    Ok(&kk + tau * &kk / Ratio::from_integer(2.into()))
}

/// `k (tau_bar + 1)` for uniform `k`-subsets.
pub fn expected_deskew_buffer(d: &DelayVector, k: usize) -> Result<Ratio> {
    if k < 2 || k > d.len() {
        return Err(invalid(format!("need 2 <= k <= N (k={k}, N={})", d.len())));
    }
    let tau = expected_diff_delay(d, k)?;
    Ok(Ratio::from_integer(BigInt::from(k)) * (tau + Ratio::from_integer(1.into())))
}

/// Worst case over all sets drawn from `d`: the `k - 1` fastest paths of the
/// vector together with `d_{N-r}`.
pub fn decoding_buffer_upper_topo(d: &DelayVector, k: usize, r: usize) -> Result<u64> {
    check_dkr(d, k, r)?;
    let top = d.d(d.len() - r);
    Ok(k as u64 + (1..k).map(|m| top - d.d(m)).sum::<u64>())
}

/// `(k + (k-1) tau_up, k + tau_up)`.
pub fn decoding_buffer_bounds_absolute(tau_up: u64, k: usize) -> Result<(u64, u64)> {
    if k < 2 {
        return Err(invalid(format!("k={k} must be at least 2")));
    }
    let k = k as u64;
    Ok((k + (k - 1) * tau_up, k + tau_up))
}

/// Relative saving of the decoding buffer over the deskew buffer under the
/// equal-spacing approximation, `tau_bar / (2 (tau_bar + 1))`.
pub fn improvement_ratio(tau_bar: f64) -> Result<f64> {
    if tau_bar.is_nan() || tau_bar < 0.0 {
        return Err(invalid(format!("mean differential delay {tau_bar} must be >= 0")));
    }
    Ok(tau_bar / (2.0 * (tau_bar + 1.0)))
}

/// Convenience conversion for reporting.
pub fn as_f64(r: &Ratio) -> f64 {
    to_f64(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{mean_decoding_queue, mean_deskew_queue, subset_mean};

    fn int(v: i64) -> Ratio {
        Ratio::from_integer(v.into())
    }

    const NSF: &str = "2,3,4,4,5,6,6,7,8,8,9";

    #[test]
    fn deskew_examples() {
        assert_eq!(deskew_buffer(0, 4).unwrap(), 4);
        assert_eq!(deskew_buffer(7, 4).unwrap(), 32);
        assert_eq!(deskew_buffer(14, 8).unwrap(), 120);
    }

    #[test]
    fn decoding_examples() {
        assert_eq!(decoding_buffer(&[5, 5, 5, 5], 4).unwrap(), 4);
        assert_eq!(initial_phase(&[5, 5, 5, 5], 4).unwrap(), 0);
        assert_eq!(decoding_buffer(&[2, 3, 4, 4], 4).unwrap(), 7);
        assert_eq!(decoding_buffer(&[1, 5], 2).unwrap(), 6);
        assert_eq!(decoding_buffer(&[1, 5, 9, 20], 2).unwrap(), 6);
        assert!(decoding_buffer(&[3, 1], 2).is_err());
    }

    #[test]
    fn scheduler_defaults() {
        for n in 1..=16 {
            for k in 1..=n {
                let s = SchedulerModel::with_defaults(k, n).unwrap();
                assert!(s.cycle(n) <= 1.0);
                assert_eq!(s.steady_per_cycle(), k);
                if k <= 4 {
                    let set = &[2, 3, 4, 4][..k];
                    assert_eq!(
                        decoding_buffer_scheduled(set, &s).unwrap(),
                        decoding_buffer(set, k).unwrap()
                    );
                }
            }
        }
        assert!(matches!(
            SchedulerModel::new(4, 4, 0.1, 0.2),
            Err(Error::CycleTooLong { .. })
        ));
        let s = SchedulerModel::new(2, 3, 0.0, 0.3).unwrap();
        assert_eq!(s.forwarded_within(1.0), 3);
    }

    #[test]
    fn expected_decoding_examples() {
        let d: DelayVector = "2,3,4,4".parse().unwrap();
        assert_eq!(expected_decoding_buffer(&d, 4, 0).unwrap(), int(7));
        let d = DelayVector::abstract_network(5).unwrap();
        assert_eq!(expected_decoding_buffer(&d, 2, 0).unwrap(), int(4));
        let ns: DelayVector = NSF.parse().unwrap();
        for k in 1..=ns.len() {
            for r in 0..=ns.len() - k {
                assert_eq!(
                    expected_decoding_buffer(&ns, k, r).unwrap(),
                    mean_decoding_queue(ns.as_slice(), k, r)
                );
            }
        }
    }

    #[test]
    fn approximation() {
        let flat: DelayVector = "4,4,4,4,4".parse().unwrap();
        assert_eq!(expected_decoding_buffer_approx(&flat, 3, 1).unwrap(), int(3));
        let d = DelayVector::abstract_network(15).unwrap();
        let approx = expected_decoding_buffer_approx(&d, 4, 0).unwrap();
        let tau = expected_diff_delay(&d, 4).unwrap();
        assert_eq!(approx, int(4) + tau * int(2));
        let exact = expected_decoding_buffer(&d, 4, 0).unwrap();
        let rel = as_f64(&((&exact - &approx) / &exact)).abs();
        assert!(rel <= 0.10, "{rel}");
    }

    #[test]
    fn deskew_expectation() {
        let d: DelayVector = "1,4,6".parse().unwrap();
        assert_eq!(expected_deskew_buffer(&d, 3).unwrap(), int(3 * 6));
        let d = DelayVector::abstract_network(5).unwrap();
        assert_eq!(expected_deskew_buffer(&d, 2).unwrap(), int(6));
        let ns: DelayVector = NSF.parse().unwrap();
        for k in 2..=ns.len() {
            assert_eq!(
                expected_deskew_buffer(&ns, k).unwrap(),
                mean_deskew_queue(ns.as_slice(), k)
            );
        }
    }

    #[test]
    fn topo_upper_examples() {
        let ns: DelayVector = NSF.parse().unwrap();
        assert_eq!(decoding_buffer_upper_topo(&ns, 4, 0).unwrap(), 22);
        assert_eq!(decoding_buffer_upper_topo(&ns, 4, 2).unwrap(), 19);
        assert_eq!(decoding_buffer_upper_topo(&ns, 2, 0).unwrap(), 2 + 7);
    }

    #[test]
    fn absolute_bounds() {
        assert_eq!(decoding_buffer_bounds_absolute(7, 2).unwrap(), (9, 9));
        assert_eq!(decoding_buffer_bounds_absolute(7, 4).unwrap(), (25, 11));
        assert_eq!(decoding_buffer_bounds_absolute(0, 5).unwrap(), (5, 5));
    }

    #[test]
    fn bound_chain_over_all_sets() {
        let ns: DelayVector = NSF.parse().unwrap();
        for k in 2..=6 {
            for r in 0..=ns.len() - k {
                let upper_topo = decoding_buffer_upper_topo(&ns, k, r).unwrap();
                let (upper_abs, _) = decoding_buffer_bounds_absolute(ns.tau_up(r).unwrap(), k).unwrap();
                assert!(upper_topo <= upper_abs);
                let bad = subset_mean(ns.as_slice(), k + r, |s| {
                    let rep = BufferReport::for_set(s, k, &ns).unwrap();
                    let tau = s[k - 1] - s[0];
                    let ok = rep.lower_bound <= rep.decoding_size
                        && rep.decoding_size <= rep.upper_bound
                        && (tau == 0 || rep.decoding_size < rep.deskew_size)
                        && (tau != 0 || rep.decoding_size == rep.deskew_size);
                    i64::from(!ok)
                });
                assert!(bad.is_zero(), "k={k} r={r}");
            }
        }
    }

    #[test]
    fn improvement_ratio_shape() {
        let vals: Vec<f64> = (0..200).map(|t| improvement_ratio(t as f64 * 0.5).unwrap()).collect();
        assert_eq!(vals[0], 0.0);
        assert!(vals.windows(2).all(|w| w[0] < w[1]));
        assert!(vals.iter().all(|&v| v < 0.5));
        assert!(improvement_ratio(10.0).unwrap() > 0.45);
        assert!(improvement_ratio(-1.0).is_err());
    }
}
