//! Delay-optimal path set selection.

use crate::error::{Error, Result};

/// Accumulated differential delay `sum_m (d_(k) - d_(m))` of the `k` fastest
/// members of an ascending delay slice.
pub fn accumulated_skew(sorted: &[u64], k: usize) -> u64 {
    let top = sorted[k - 1];
    sorted[..k].iter().map(|&d| top - d).sum()
}

/// Picks `k + r` positions out of an ascending delay slice so that the `k`
/// fastest chosen paths have the smallest accumulated differential delay.
///
/// Ties go to the set with the smaller maximum delay and then to the
/// lexicographically smaller position list. Returned positions ascend.
pub fn optimal_set(delays: &[u64], k: usize, r: usize) -> Result<Vec<usize>> {
    let n = k + r;
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if delays.len() < n {
        return Err(Error::InsufficientPaths {
            available: delays.len(),
            required: n,
        });
    }
    debug_assert!(delays.windows(2).all(|w| w[0] <= w[1]));

    let mut best: Option<(u64, u64, Vec<usize>)> = None;
    // `t` is the position of the k-th fastest member.
    for t in k - 1..delays.len() - r {
        let mut set = lower_members(delays, t, k);
        set.push(t);
        set.extend(t + 1..=t + r);
        let cost: u64 = set[..k].iter().map(|&i| delays[t] - delays[i]).sum();
        let max_delay = delays[set[n - 1]];
        let candidate = (cost, max_delay, set);
        if best.as_ref().is_none_or(|b| candidate < *b) {
            best = Some(candidate);
        }
    }
    Ok(best.expect("at least one candidate position").2)
}

/// The `k - 1` largest delays strictly before position `t`, preferring the
/// earliest positions among equal delays at the cut.
fn lower_members(delays: &[u64], t: usize, k: usize) -> Vec<usize> {
    if k == 1 {
        return Vec::new();
    }
    let window = t + 1 - k..t;
    let cut = delays[window.start];
    let above: Vec<usize> = window.clone().filter(|&i| delays[i] > cut).collect();
    let need_at_cut = (k - 1) - above.len();
    let first_at_cut = delays.partition_point(|&d| d < cut);
    let mut set: Vec<usize> = (first_at_cut..first_at_cut + need_at_cut).collect();
    set.extend(above);
    set
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::for_each_subset;
    use proptest::prelude::*;

    fn brute(delays: &[u64], k: usize, r: usize) -> Vec<usize> {
        let mut best: Option<(u64, u64, Vec<usize>)> = None;
        for_each_subset(delays.len(), k + r, |idx| {
            let ds: Vec<u64> = idx.iter().map(|&i| delays[i]).collect();
            let cand = (accumulated_skew(&ds, k), ds[k + r - 1], idx.to_vec());
            if best.as_ref().is_none_or(|b| cand < *b) {
                best = Some(cand);
            }
        });
        best.unwrap().2
    }

    #[test]
    fn adjacent_pair() {
        assert_eq!(optimal_set(&[1, 2, 3, 4, 5], 2, 0).unwrap(), vec![0, 1]);
    }

    #[test]
    fn exact_fit() {
        assert_eq!(optimal_set(&[1, 4, 9], 2, 1).unwrap(), vec![0, 1, 2]);
        assert_eq!(optimal_set(&[1, 4, 9], 3, 0).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn ties_prefer_early_positions() {
        assert_eq!(optimal_set(&[2, 3, 4, 4, 5, 6, 6, 7, 8, 8, 9], 2, 0).unwrap(), vec![2, 3]);
        assert_eq!(optimal_set(&[1, 3, 3, 3, 4], 2, 1).unwrap(), vec![1, 2, 3]);
    }

    #[test]
    fn too_few() {
        assert_eq!(
            optimal_set(&[1, 2], 2, 1).unwrap_err(),
            Error::InsufficientPaths {
                available: 2,
                required: 3
            }
        );
    }

    proptest! {
        #[test]
        fn matches_brute_force(
            mut delays in prop::collection::vec(0u64..6, 1..9),
            k in 1usize..5,
            r in 0usize..3,
        ) {
            delays.sort_unstable();
            prop_assume!(k + r <= delays.len());
            prop_assert_eq!(optimal_set(&delays, k, r).unwrap(), brute(&delays, k, r));
        }
    }
}
