//! Self-check suite comparing every closed form with brute-force
//! enumeration, plus codec sanity checks.

use num::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::buffer::{expected_decoding_buffer, expected_deskew_buffer};
use crate::codec::{decode_generation, encode_generation, Block};
use crate::combin::{to_f64, Ratio};
use crate::delay::{
    expected_diff_delay, expected_diff_delay_lossy, expected_diff_delay_redundant,
    expected_mth_delay, p_specific_extremes, p_up, selection_probability,
};
use crate::gf256::Gf256;
use crate::oracle;
use crate::paths::DelayVector;

#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub comparisons: usize,
    pub max_deviation: f64,
    pub passed: bool,
}

#[derive(Default)]
struct Tally {
    comparisons: usize,
    max_dev: Ratio,
}

impl Tally {
    fn exact(&mut self, got: Ratio, want: Ratio) {
        self.comparisons += 1;
        let dev = (got - want).abs();
        if dev > self.max_dev {
            self.max_dev = dev;
        }
    }

    fn finish(self, name: &'static str) -> Check {
        Check {
            name,
            comparisons: self.comparisons,
            max_deviation: to_f64(&self.max_dev),
            passed: self.max_dev.is_zero(),
        }
    }
}

/// Random ascending delay vectors with values in `0..20`, `per_size` for
/// each length up to `max_len`.
pub fn random_vectors(max_len: usize, per_size: usize, seed: u64) -> Vec<DelayVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for len in 1..=max_len {
        out.push(DelayVector::abstract_network(len).expect("len >= 1"));
        for _ in 0..per_size {
            let v: Vec<u64> = (0..len).map(|_| rng.random_range(0..20)).collect();
            out.push(DelayVector::new(v).expect("len >= 1"));
        }
    }
    out
}

/// Runs the whole suite; `per_size` random vectors per length up to 12.
pub fn run_all(per_size: usize, seed: u64) -> Vec<Check> {
    let vectors = random_vectors(12, per_size, seed);
    vec![
        selection_check(),
        extremes_check(),
        order_statistics_check(&vectors),
        diff_delay_check(&vectors),
        p_up_check(&vectors),
        redundancy_check(&vectors),
        buffer_check(&vectors),
        field_check(),
        codec_check(seed),
    ]
}

fn selection_check() -> Check {
    let mut t = Tally::default();
    for big_n in 1..=9 {
        for n in 1..=big_n {
            for l in 1..=big_n {
                for m in 1..=n {
                    t.exact(
                        selection_probability(big_n, n, l, m).expect("in range"),
                        oracle::position_probability(big_n, n, l, m),
                    );
                }
            }
        }
    }
    t.finish("selection probability")
}

fn extremes_check() -> Check {
    let mut t = Tally::default();
    for big_n in 2..=10 {
        for n in 2..=big_n {
            for x in 1..big_n {
                for y in x + 1..=big_n {
                    if y - x - 1 < n - 2 {
                        continue;
                    }
                    let mut hits = 0i64;
                    let mut count = 0i64;
                    oracle::for_each_subset(big_n, n, |s| {
                        count += 1;
                        hits += i64::from(s[0] == x - 1 && s[n - 1] == y - 1);
                    });
                    t.exact(
                        p_specific_extremes(big_n, n, x, y).expect("in range"),
                        Ratio::new(hits.into(), count.into()),
                    );
                }
            }
        }
    }
    t.finish("specific extremes")
}

fn order_statistics_check(vectors: &[DelayVector]) -> Check {
    let mut t = Tally::default();
    for d in vectors {
        for n in 1..=d.len() {
            for m in 1..=n {
                t.exact(
                    expected_mth_delay(d, n, m).expect("in range"),
                    oracle::mth_delay(d.as_slice(), n, m),
                );
            }
        }
    }
    t.finish("expected m-th delay")
}

fn diff_delay_check(vectors: &[DelayVector]) -> Check {
    let mut t = Tally::default();
    for d in vectors {
        for n in 2..=d.len() {
            t.exact(
                expected_diff_delay(d, n).expect("in range"),
                oracle::span(d.as_slice(), n),
            );
        }
    }
    t.finish("expected differential delay")
}

fn p_up_check(vectors: &[DelayVector]) -> Check {
    let mut t = Tally::default();
    for d in vectors {
        for n in 2..=d.len() {
            for r in 0..=n - 2 {
                let target = d.tau_up(r).expect("r < N");
                t.exact(
                    p_up(d, n, r).expect("in range"),
                    oracle::span_probability(d.as_slice(), n - r, r, target),
                );
            }
        }
    }
    t.finish("maximal differential delay probability")
}

fn redundancy_check(vectors: &[DelayVector]) -> Check {
    let mut t = Tally::default();
    for d in vectors {
        for k in 2..=d.len() {
            for r in 0..=d.len() - k {
                t.exact(
                    expected_diff_delay_redundant(d, k, r).expect("in range"),
                    oracle::diff_delay(d.as_slice(), k, r),
                );
                t.exact(
                    expected_diff_delay_lossy(d, k, r).expect("in range"),
                    oracle::span(d.as_slice(), k + r),
                );
            }
        }
    }
    t.finish("redundant and lossy differential delay")
}

fn buffer_check(vectors: &[DelayVector]) -> Check {
    let mut t = Tally::default();
    for d in vectors {
        for k in 1..=d.len() {
            for r in 0..=d.len() - k {
                t.exact(
                    expected_decoding_buffer(d, k, r).expect("in range"),
                    oracle::mean_decoding_queue(d.as_slice(), k, r),
                );
            }
            if k >= 2 {
                t.exact(
                    expected_deskew_buffer(d, k).expect("in range"),
                    oracle::mean_deskew_queue(d.as_slice(), k),
                );
            }
        }
    }
    t.finish("expected buffer sizes")
}

fn field_check() -> Check {
    let mut bad = 0usize;
    let mut comparisons = 0usize;
    for a in 0..=255u8 {
        for b in 0..=255u8 {
            comparisons += 1;
            bad += usize::from((Gf256(a) * Gf256(b)).0 != oracle::gf_mul_reference(a, b));
        }
        if a != 0 {
            comparisons += 1;
            let inv = Gf256(a).inv().expect("nonzero");
            bad += usize::from(Gf256(a) * inv != Gf256::ONE);
        }
    }
    Check {
        name: "field arithmetic",
        comparisons,
        max_deviation: bad as f64,
        passed: bad == 0,
    }
}

fn codec_check(seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xC0DE);
    let mut bad = 0usize;
    let mut comparisons = 0usize;
    for k in 1..=8 {
        for n in k..=(k + 4) {
            for _ in 0..20 {
                let source: Vec<Block> = (0..k).map(|_| Block::random(&mut rng)).collect();
                let generation = match encode_generation(0, source.clone(), n, &mut rng) {
                    Ok(g) => g,
                    Err(_) => {
                        bad += 1;
                        continue;
                    }
                };
                let blocks: Vec<_> = generation.coded_blocks().collect();
                let mut pick = rand::seq::index::sample(&mut rng, n, k).into_vec();
                pick.sort_unstable();
                let chosen: Vec<_> = pick.iter().map(|&i| blocks[i].clone()).collect();
                comparisons += 1;
                match decode_generation(&chosen, k) {
                    Ok(out) => bad += usize::from(out != source),
                    // A rank-deficient subset is legitimate; decoding from
                    // everything must still work.
                    Err(_) => {
                        bad += usize::from(decode_generation(&blocks, k).ok() != Some(source));
                    }
                }
            }
        }
    }
    Check {
        name: "codec round trip",
        comparisons,
        max_deviation: bad as f64,
        passed: bad == 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes() {
        for check in run_all(1, 7) {
            assert!(check.passed, "{check:?}");
            assert!(check.comparisons > 0);
        }
    }
}
