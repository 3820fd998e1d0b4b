//! Order statistics of uniformly random path subsets and the differential
//! delay quantities built on them.
//!
//! All functions return exact rationals; `*_f64` wrappers convert at the end.

use num::{BigInt, One, Zero};
use serde::Serialize;

use crate::combin::{binom_int, to_f64, Ratio};
use crate::error::{invalid, Error, Result};
use crate::paths::DelayVector;
use crate::select::optimal_set;

fn c(n: usize, k: usize) -> BigInt {
    binom_int(n as i64, k as i64)
}

fn check_subset_size(big_n: usize, n: usize) -> Result<()> {
    if n == 0 || n > big_n {
        return Err(invalid(format!("subset size n={n} must satisfy 1 <= n <= N={big_n}")));
    }
    Ok(())
}

fn check_redundancy(d: &DelayVector, k: usize, r: usize) -> Result<()> {
    if k < 2 {
        return Err(invalid(format!("k={k} must be at least 2")));
    }
    if k + r > d.len() {
        return Err(invalid(format!("k+r={} exceeds N={}", k + r, d.len())));
    }
    Ok(())
}

/// Probability that existing path `l` (1-based, ascending delay) is the
/// `m`-th smallest member of a uniform random `n`-subset of `big_n` paths.
pub fn selection_probability(big_n: usize, n: usize, l: usize, m: usize) -> Result<Ratio> {
    check_subset_size(big_n, n)?;
    if m == 0 || m > n || l == 0 || l > big_n {
        return Err(invalid(format!("indices l={l}, m={m} out of range for N={big_n}, n={n}")));
    }
    if l < m || l > big_n - n + m {
        return Ok(Ratio::zero());
    }
    Ok(Ratio::new(c(l - 1, m - 1) * c(big_n - l, n - m), c(big_n, n)))
}

/// `E{d_m}` over uniform `n`-subsets of `d`.
pub fn expected_mth_delay(d: &DelayVector, n: usize, m: usize) -> Result<Ratio> {
    let big_n = d.len();
    check_subset_size(big_n, n)?;
    if m == 0 || m > n {
        return Err(invalid(format!("order m={m} outside 1..={n}")));
    }
    let mut num = BigInt::zero();
    for l in m..=big_n - n + m {
        num += BigInt::from(d.d(l)) * c(l - 1, m - 1) * c(big_n - l, n - m);
    }
    Ok(Ratio::new(num, c(big_n, n)))
}

/// Mean differential delay `E{d_n} - E{d_1}` of a uniform `n`-subset,
/// evaluated through the pairwise-extremes sum.
pub fn expected_diff_delay(d: &DelayVector, n: usize) -> Result<Ratio> {
    let big_n = d.len();
    if n < 2 || n > big_n {
        return Err(invalid(format!("n={n} must satisfy 2 <= n <= N={big_n}")));
    }
    let mut num = BigInt::zero();
    for i in 0..=big_n - n {
        let span = BigInt::from(d.d(big_n - i)) - BigInt::from(d.d(i + 1));
        num += span * c(big_n - i - 1, n - 1);
    }
    Ok(Ratio::new(num, c(big_n, n)))
}

/// `d_{N-r} - d_1`.
pub fn tau_up(d: &DelayVector, r: usize) -> Result<u64> {
    d.tau_up(r)
}

/// Probability that a uniform `n`-subset, decoded from its `n - r` fastest
/// members, sees the differential delay `tau_up(d, r)`.
///
/// Ties are handled by summing over every position `j` whose delay equals
/// `d_{N-r}` that can hold the `k`-th member, and every position `i` inside
/// the minimal-delay run that can hold the first.
pub fn p_up(d: &DelayVector, n: usize, r: usize) -> Result<Ratio> {
    let big_n = d.len();
    if n > big_n || n < r + 2 {
        return Err(invalid(format!(
            "p_up needs 2 <= n-r and n <= N (n={n}, r={r}, N={big_n})"
        )));
    }
    let k = n - r;
    let target = d.d(big_n - r);
    let d_min = d.d_min_count();
    let mut num = BigInt::zero();
    for j in (k..=big_n - r).rev() {
        if d.d(j) != target {
            break;
        }
        let upper = c(big_n - j, r);
        let mut inner = BigInt::zero();
        for i in 1..=d_min.min(j + 1 - k) {
            inner += c(j - i - 1, k - 2);
        }
        num += upper * inner;
    }
    Ok(Ratio::new(num, c(big_n, n)))
}

/// Probability that paths `x < y` (1-based) are exactly the fastest and the
/// slowest members of a uniform `n`-subset.
pub fn p_specific_extremes(big_n: usize, n: usize, x: usize, y: usize) -> Result<Ratio> {
    check_subset_size(big_n, n)?;
    if n < 2 || x == 0 || x >= y || y > big_n || y - x - 1 < n - 2 {
        return Err(invalid(format!(
            "need 1 <= x < y <= N and y-x-1 >= n-2 (x={x}, y={y}, n={n}, N={big_n})"
        )));
    }
    Ok(Ratio::new(c(y - x - 1, n - 2), c(big_n, n)))
}

/// Mean differential delay `E{d_k} - E{d_1}` over uniform `(k+r)`-subsets,
/// when only the `k` fastest members matter.
pub fn expected_diff_delay_redundant(d: &DelayVector, k: usize, r: usize) -> Result<Ratio> {
    check_redundancy(d, k, r)?;
    let n = k + r;
    Ok(expected_mth_delay(d, n, k)? - expected_mth_delay(d, n, 1)?)
}

/// Worst case under packet loss: the full span `E{d_{k+r}} - E{d_1}`.
pub fn expected_diff_delay_lossy(d: &DelayVector, k: usize, r: usize) -> Result<Ratio> {
    check_redundancy(d, k, r)?;
    let n = k + r;
    Ok(expected_mth_delay(d, n, n)? - expected_mth_delay(d, n, 1)?)
}

#[derive(Clone, Copy, PartialEq, Debug, Serialize)]
pub struct ReductionMetrics {
    /// `(d_N - d_{N-r}) / d_N`.
    pub delta_max: f64,
    /// `(tau_bar - tau_bar(r)) / tau_bar`.
    pub delta_tau: f64,
    /// `r / k`.
    pub overhead: f64,
}

pub fn reduction_metrics(d: &DelayVector, k: usize, r: usize) -> Result<ReductionMetrics> {
    check_redundancy(d, k, r)?;
    let base = expected_diff_delay(d, k)?;
    if base.is_zero() || d.max() == 0 {
        return Err(Error::DegenerateBaseline);
    }
    let reduced = expected_diff_delay_redundant(d, k, r)?;
    let delta_max = Ratio::new(
        BigInt::from(d.max() - d.d(d.len() - r)),
        BigInt::from(d.max()),
    );
    Ok(ReductionMetrics {
        delta_max: to_f64(&delta_max),
        delta_tau: to_f64(&((&base - reduced) / &base)),
        overhead: r as f64 / k as f64,
    })
}

/// Differential delay seen when the `k` decoding paths are chosen optimally
/// out of all of `d`, with `r` redundant paths on top.
pub fn optimal_diff_delay(d: &DelayVector, k: usize, r: usize) -> Result<u64> {
    let set = optimal_set(d.as_slice(), k, r)?;
    Ok(d.as_slice()[set[k - 1]] - d.as_slice()[set[0]])
}

/// Mean optimal differential delay when `available` of the `F = d.len()`
/// paths are set up, each `available`-subset equally likely. Evaluated by
/// enumerating every subset.
pub fn expected_optimal_diff_delay(
    d: &DelayVector,
    available: usize,
    k: usize,
    r: usize,
) -> Result<Ratio> {
    if k == 0 || k + r > available || available > d.len() {
        return Err(invalid(format!(
            "need k+r <= available <= F (k={k}, r={r}, available={available}, F={})",
            d.len()
        )));
    }
    let all = d.as_slice();
    let mut total = BigInt::zero();
    let mut count = BigInt::zero();
    let mut delays = Vec::with_capacity(available);
    crate::oracle::for_each_subset(all.len(), available, |idx| {
        delays.clear();
        delays.extend(idx.iter().map(|&i| all[i]));
        let set = optimal_set(&delays, k, r).expect("sizes checked above");
        total += BigInt::from(delays[set[k - 1]] - delays[set[0]]);
        count += BigInt::one();
    });
    Ok(Ratio::new(total, count))
}

/// Summary of the closed-form statistics for one `(d, k, r)` point.
#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct DelayStats {
    pub expected_diff_delay: f64,
    pub expected_max: f64,
    pub expected_min: f64,
    pub tau_up: u64,
    pub p_up: f64,
}

pub fn delay_stats(d: &DelayVector, k: usize, r: usize) -> Result<DelayStats> {
    check_redundancy(d, k, r)?;
    let n = k + r;
    let max = expected_mth_delay(d, n, k)?;
    let min = expected_mth_delay(d, n, 1)?;
    Ok(DelayStats {
        expected_diff_delay: to_f64(&(&max - &min)),
        expected_max: to_f64(&max),
        expected_min: to_f64(&min),
        tau_up: d.tau_up(r)?,
        p_up: to_f64(&p_up(d, n, r)?),
    })
}

pub fn ratio_f64(r: Result<Ratio>) -> Result<f64> {
    r.map(|v| to_f64(&v))
}
