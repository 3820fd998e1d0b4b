//! Brute-force reference computations over every path subset.
//!
//! These are deliberately naive and independent of the closed forms in
//! [`crate::delay`] and [`crate::buffer`]; they back the test suites and the
//! `validate` command.

use num::{BigInt, Zero};

use crate::combin::Ratio;

/// Calls `f` with every `size`-subset of `0..total`, in lexicographic order.
pub fn for_each_subset(total: usize, size: usize, mut f: impl FnMut(&[usize])) {
    if size > total {
        return;
    }
    let mut idx: Vec<usize> = (0..size).collect();
    loop {
        f(&idx);
        let Some(i) = (0..size).rev().find(|&i| idx[i] < i + total - size) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..size {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Mean of `stat` over every `n`-subset of an ascending delay slice. `stat`
/// sees the chosen delays in ascending order.
pub fn subset_mean(delays: &[u64], n: usize, stat: impl Fn(&[u64]) -> i64) -> Ratio {
    let mut total = BigInt::zero();
    let mut count = 0i64;
    let mut buf = Vec::with_capacity(n);
    for_each_subset(delays.len(), n, |idx| {
        buf.clear();
        buf.extend(idx.iter().map(|&i| delays[i]));
        total += stat(&buf);
        count += 1;
    });
    Ratio::new(total, count.into())
}

/// Enumerated mean of the `m`-th smallest chosen delay.
pub fn mth_delay(delays: &[u64], n: usize, m: usize) -> Ratio {
    subset_mean(delays, n, |s| s[m - 1] as i64)
}

/// Enumerated mean of `d_(k) - d_(1)` over `(k + r)`-subsets.
pub fn diff_delay(delays: &[u64], k: usize, r: usize) -> Ratio {
    subset_mean(delays, k + r, |s| (s[k - 1] - s[0]) as i64)
}

/// Enumerated mean of the full span `d_(k+r) - d_(1)`.
pub fn span(delays: &[u64], n: usize) -> Ratio {
    subset_mean(delays, n, |s| (s[n - 1] - s[0]) as i64)
}

/// Enumerated probability that the `k` fastest of a `(k + r)`-subset span
/// exactly `target`.
pub fn span_probability(delays: &[u64], k: usize, r: usize, target: u64) -> Ratio {
    subset_mean(delays, k + r, |s| i64::from(s[k - 1] - s[0] == target))
}

/// Enumerated probability that position `m` (0-based) of the full vector
/// lands at order `j` (1-based) of an `n`-subset.
pub fn position_probability(total: usize, n: usize, l: usize, m: usize) -> Ratio {
    let mut hits = 0i64;
    let mut count = 0i64;
    for_each_subset(total, n, |idx| {
        count += 1;
        if idx[m - 1] == l - 1 {
            hits += 1;
        }
    });
    Ratio::new(hits.into(), count.into())
}

/// Decoding queue of one set: `k + sum_m (d_(k) - d_(m))`, by direct sum.
pub fn decoding_queue(sorted: &[u64], k: usize) -> i64 {
    let top = sorted[k - 1] as i64;
    k as i64 + sorted[..k].iter().map(|&d| top - d as i64).sum::<i64>()
}

/// Enumerated mean decoding queue over `(k + r)`-subsets.
pub fn mean_decoding_queue(delays: &[u64], k: usize, r: usize) -> Ratio {
    subset_mean(delays, k + r, |s| decoding_queue(s, k))
}

/// Enumerated mean deskew queue `k (tau + 1)` over `k`-subsets.
pub fn mean_deskew_queue(delays: &[u64], k: usize) -> Ratio {
    subset_mean(delays, k, |s| k as i64 * ((s[k - 1] - s[0]) as i64 + 1))
}

/// Carry-less shift-and-reduce multiplication in GF(2^8), no tables.
pub fn gf_mul_reference(mut a: u8, mut b: u8) -> u8 {
    let mut p = 0u8;
    while b != 0 {
        if b & 1 != 0 {
            p ^= a;
        }
        let carry = a & 0x80 != 0;
        a <<= 1;
        if carry {
            a ^= (crate::gf256::POLYNOMIAL & 0xFF) as u8;
        }
        b >>= 1;
    }
    p
}

/// `1 - prod_{i=1..k} (1 - 256^-i)`: probability that a uniform `k x k`
/// matrix over GF(2^8) is singular.
pub fn singular_probability(k: usize) -> f64 {
    1.0 - (1..=k).map(|i| 1.0 - 256f64.powi(-(i as i32))).product::<f64>()
}
