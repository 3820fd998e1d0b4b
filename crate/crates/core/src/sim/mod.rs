//! Monte-Carlo simulation of coded and uncoded multilane transmission.

mod engine;
mod expect;
mod stats;

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::paths::{AvailabilityModel, DelayVector};
use crate::select::optimal_set;

pub use engine::{run_replication, Delivery, ReplicationResult};
pub use expect::{expected, Expected};
pub use stats::{run_scenario, AggregateStats, Estimate};

/// Default frame size in bytes.
pub const DEFAULT_FRAME_BYTES: usize = 1500;
/// Default number of frames sent per replication.
pub const DEFAULT_FRAMES: usize = 100;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize)]
pub enum Method {
    /// Coded, uniformly random path set.
    LncRnd,
    /// Coded, delay-optimal path set.
    LncOpt,
    /// Uncoded multilane with deskew buffers, delay-optimal path set.
    MlOpt,
}

impl Method {
    pub fn is_coded(self) -> bool {
        !matches!(self, Method::MlOpt)
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::LncRnd => "lnc-rnd",
            Method::LncOpt => "lnc-opt",
            Method::MlOpt => "ml-opt",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "lnc-rnd" => Ok(Method::LncRnd),
            "lnc-opt" => Ok(Method::LncOpt),
            "ml-opt" => Ok(Method::MlOpt),
            other => Err(invalid(format!(
                "unknown method {other:?}; expected lnc-rnd, lnc-opt or ml-opt"
            ))),
        }
    }
}

/// Failures applied on top of path blocking.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default, Serialize)]
pub struct Failures {
    /// Available paths that fail before path selection.
    pub paths: usize,
    /// Coded blocks lost per generation.
    pub packets: usize,
}

#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct Scenario {
    /// Delays of every existing path.
    pub delays: DelayVector,
    pub k: usize,
    pub r: usize,
    pub method: Method,
    pub blocking: f64,
    /// Make exactly this many uniformly chosen paths available in every
    /// replication instead of drawing each path with `blocking`.
    pub fixed_available: Option<usize>,
    pub failures: Failures,
    /// Permit more losses than the redundancy can absorb.
    pub allow_excess_loss: bool,
    pub replications: usize,
    pub frames_per_replication: usize,
    pub frame_bytes: usize,
    pub seed: u64,
    /// Number of VOQs before generation numbers wrap. `None` is unlimited.
    pub voq_limit: Option<usize>,
    /// Draw path availability anew for every frame instead of once per
    /// replication.
    pub redraw_per_frame: bool,
}

impl Scenario {
    pub fn new(delays: DelayVector, k: usize, r: usize, method: Method) -> Self {
        Self {
            delays,
            k,
            r,
            method,
            blocking: 0.0,
            fixed_available: None,
            failures: Failures::default(),
            allow_excess_loss: false,
            replications: 1000,
            frames_per_replication: DEFAULT_FRAMES,
            frame_bytes: DEFAULT_FRAME_BYTES,
            seed: 1,
            voq_limit: None,
            redraw_per_frame: false,
        }
    }

    pub fn n(&self) -> usize {
        self.k + self.r
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(invalid("k must be at least 1"));
        }
        if self.n() > self.delays.len() {
            return Err(invalid(format!(
                "k+r={} exceeds the {} existing paths",
                self.n(),
                self.delays.len()
            )));
        }
        if self.method == Method::MlOpt && self.r != 0 {
            return Err(invalid("ml-opt does not code and requires r = 0"));
        }
        if !(0.0..=1.0).contains(&self.blocking) {
            return Err(invalid(format!("blocking probability {} outside [0, 1]", self.blocking)));
        }
        if let Some(a) = self.fixed_available {
            if a > self.delays.len() {
                return Err(invalid(format!(
                    "{a} available paths requested but only {} exist",
                    self.delays.len()
                )));
            }
        }
        if !self.allow_excess_loss {
            if self.failures.packets > self.r {
                return Err(invalid(format!(
                    "{} lost blocks per generation exceed r={}",
                    self.failures.packets, self.r
                )));
            }
            if self.failures.paths > self.r {
                return Err(invalid(format!(
                    "{} failed paths exceed r={}",
                    self.failures.paths, self.r
                )));
            }
        }
        if self.failures.packets > self.n() {
            return Err(invalid("cannot lose more blocks than are sent"));
        }
        if self.replications < 2 {
            return Err(invalid("at least 2 replications are needed for a confidence interval"));
        }
        if self.frames_per_replication == 0 {
            return Err(invalid("frames per replication must be at least 1"));
        }
        if self.frame_bytes == 0 {
            return Err(Error::EmptyFrame);
        }
        if self.voq_limit == Some(0) {
            return Err(invalid("VOQ limit must be at least 1"));
        }
        Ok(())
    }

    /// Draws the indices of the paths that can be set up.
    pub fn draw_available<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<usize> {
        match self.fixed_available {
            Some(a) => {
                let mut v = sample(rng, self.delays.len(), a).into_vec();
                v.sort_unstable();
                v
            }
            None => self.availability().sample_available(rng),
        }
    }

    pub fn availability(&self) -> AvailabilityModel {
        AvailabilityModel {
            paths: self.delays.len(),
            blocking: self.blocking,
        }
    }

    /// Random source for replication `index`: the scenario seed selects the
    /// key and the replication index the stream.
    pub fn replication_rng(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        rng
    }
}

/// `k + r` chosen positions, ascending, into an available delay slice.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct PathSet {
    pub members: Vec<usize>,
    pub k: usize,
    pub r: usize,
}

impl PathSet {
    pub fn delays(&self, available: &[u64]) -> Vec<u64> {
        self.members.iter().map(|&i| available[i]).collect()
    }
}

/// Chooses `k + r` of the available paths (ascending delays).
pub fn select_paths<R: Rng + ?Sized>(
    available: &[u64],
    k: usize,
    r: usize,
    method: Method,
    rng: &mut R,
) -> Result<PathSet> {
    let n = k + r;
    if available.len() < n {
        return Err(Error::InsufficientPaths {
            available: available.len(),
            required: n,
        });
    }
    let members = match method {
        Method::LncRnd => {
            let mut m = sample(rng, available.len(), n).into_vec();
            m.sort_unstable();
            m
        }
        Method::LncOpt | Method::MlOpt => optimal_set(available, k, r)?,
    };
    Ok(PathSet { members, k, r })
}

/// Removes `count` uniformly chosen entries from `available` and returns
/// them.
pub fn inject_path_failures<R: Rng + ?Sized>(
    available: &mut Vec<usize>,
    count: usize,
    rng: &mut R,
) -> Vec<usize> {
    let count = count.min(available.len());
    let mut gone: Vec<usize> = sample(rng, available.len(), count).into_vec();
    gone.sort_unstable();
    let removed: Vec<usize> = gone.iter().map(|&i| available[i]).collect();
    for &i in gone.iter().rev() {
        available.remove(i);
    }
    removed
}

/// Marks `count` of the `n` coded blocks of one generation as lost.
pub fn inject_packet_loss<R: Rng + ?Sized>(n: usize, count: usize, rng: &mut R) -> Vec<bool> {
    let mut lost = vec![false; n];
    for i in sample(rng, n, count.min(n)) {
        lost[i] = true;
    }
    lost
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn method_names_round_trip() {
        for m in [Method::LncRnd, Method::LncOpt, Method::MlOpt] {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert_eq!("LNC_OPT".parse::<Method>().unwrap(), Method::LncOpt);
        assert!("best".parse::<Method>().is_err());
    }

    #[test]
    fn validation() {
        let d = DelayVector::abstract_network(6).unwrap();
        let ok = Scenario::new(d.clone(), 4, 2, Method::LncRnd);
        ok.validate().unwrap();
        assert!(Scenario::new(d.clone(), 4, 3, Method::LncRnd).validate().is_err());
        assert!(Scenario::new(d.clone(), 4, 1, Method::MlOpt).validate().is_err());
        let mut s = ok.clone();
        s.failures.packets = 3;
        assert!(s.validate().is_err());
        s.allow_excess_loss = true;
        s.validate().unwrap();
        let mut s = ok.clone();
        s.replications = 1;
        assert!(s.validate().is_err());
        let mut s = ok;
        s.blocking = 1.2;
        assert!(s.validate().is_err());
    }

    #[test]
    fn opt_selection() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let set = select_paths(&[1, 2, 3, 4, 5], 2, 0, Method::LncOpt, &mut rng).unwrap();
        assert_eq!(set.members, vec![0, 1]);
        for m in [Method::LncRnd, Method::LncOpt] {
            let set = select_paths(&[3, 7, 9], 2, 1, m, &mut rng).unwrap();
            assert_eq!(set.members, vec![0, 1, 2]);
        }
        assert!(matches!(
            select_paths(&[3, 7], 2, 1, Method::LncRnd, &mut rng),
            Err(Error::InsufficientPaths { .. })
        ));
    }

    #[test]
    fn random_selection_is_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let draws = 100_000;
        let mut counts = std::collections::BTreeMap::new();
        for _ in 0..draws {
            let set = select_paths(&[1, 2, 3, 4, 5], 2, 0, Method::LncRnd, &mut rng).unwrap();
            *counts.entry(set.members).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 10);
        let sigma = (0.1 * 0.9 / draws as f64).sqrt();
        for c in counts.values() {
            let p = *c as f64 / draws as f64;
            assert!((p - 0.1).abs() <= 3.0 * sigma, "{p}");
        }
    }

    #[test]
    fn failure_injection() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut avail: Vec<usize> = (0..10).collect();
        let removed = inject_path_failures(&mut avail, 3, &mut rng);
        assert_eq!(removed.len(), 3);
        assert_eq!(avail.len(), 7);
        assert!(removed.iter().all(|r| !avail.contains(r)));
        let lost = inject_packet_loss(6, 2, &mut rng);
        assert_eq!(lost.iter().filter(|&&l| l).count(), 2);
    }

    #[test]
    fn rng_streams_differ() {
        let s = Scenario::new(DelayVector::abstract_network(5).unwrap(), 2, 0, Method::LncRnd);
        let a: u64 = s.replication_rng(0).random();
        let b: u64 = s.replication_rng(1).random();
        let a2: u64 = s.replication_rng(0).random();
        assert_ne!(a, b);
        assert_eq!(a, a2);
    }
}
