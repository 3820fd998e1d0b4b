//! `param:lo:hi:step` sweep specifications.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

/// Upper limit on points in one sweep.
pub const MAX_POINTS: usize = 10_000;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize)]
pub enum SweepParam {
    /// Number of available paths.
    Available,
    K,
    R,
    /// Per-path blocking probability.
    Blocking,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Available => "N",
            SweepParam::K => "k",
            SweepParam::R => "r",
            SweepParam::Blocking => "pb",
        }
    }

    pub fn is_integer(self) -> bool {
        !matches!(self, SweepParam::Blocking)
    }
}

#[derive(Clone, Copy, PartialEq, Debug, Serialize)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl SweepSpec {
    /// Points `lo, lo + step, ...` up to and including `hi`.
    pub fn values(&self) -> Vec<f64> {
        let count = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| self.lo + i as f64 * self.step).collect()
    }

    /// Integer points; only meaningful for integer parameters.
    pub fn int_values(&self) -> Vec<usize> {
        self.values().into_iter().map(|v| v.round() as usize).collect()
    }
}

impl fmt::Display for SweepSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}:{}", self.param.name(), self.lo, self.hi, self.step)
    }
}

impl FromStr for SweepSpec {
    type Err = Error;

    fn from_str(spec: &str) -> Result<Self> {
        let fail = |message: String| Error::InvalidSweep {
            spec: spec.to_string(),
            message,
        };
        let parts: Vec<&str> = spec.trim().split(':').collect();
        if parts.len() != 4 {
            return Err(fail(format!("expected param:lo:hi:step, got {} fields", parts.len())));
        }
        let param = match parts[0].trim() {
            "N" | "paths" => SweepParam::Available,
            "k" => SweepParam::K,
            "r" => SweepParam::R,
            "pb" | "PB" | "P_B" => SweepParam::Blocking,
            other => {
                return Err(fail(format!(
                    "unknown parameter {other:?}; expected N, k, r or pb"
                )))
            }
        };
        let num = |s: &str, what: &str| -> Result<f64> {
            let v: f64 = s
                .trim()
                .parse()
                .map_err(|_| fail(format!("{what} {s:?} is not a number")))?;
            if !v.is_finite() {
                return Err(fail(format!("{what} must be finite")));
            }
            Ok(v)
        };
        let (lo, hi, step) = (num(parts[1], "lo")?, num(parts[2], "hi")?, num(parts[3], "step")?);
        if step <= 0.0 {
            return Err(fail("step must be positive".into()));
        }
        if lo > hi {
            return Err(fail("lo must not exceed hi".into()));
        }
        if lo < 0.0 {
            return Err(fail("values must be nonnegative".into()));
        }
        if param.is_integer() && [lo, hi, step].iter().any(|v| v.fract() != 0.0) {
            return Err(fail(format!("{} takes integer values", param.name())));
        }
        if param == SweepParam::Blocking && hi > 1.0 {
            return Err(fail("blocking probability must stay within [0, 1]".into()));
        }
        if (hi - lo) / step + 1.0 > MAX_POINTS as f64 {
            return Err(fail(format!("more than {MAX_POINTS} points")));
        }
        Ok(Self { param, lo, hi, step })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_sweep() {
        let s: SweepSpec = "r:0:4:1".parse().unwrap();
        assert_eq!(s.param, SweepParam::R);
        assert_eq!(s.int_values(), vec![0, 1, 2, 3, 4]);
        let s: SweepSpec = "N:4:15:2".parse().unwrap();
        assert_eq!(s.int_values(), vec![4, 6, 8, 10, 12, 14]);
    }

    #[test]
    fn float_sweep_includes_end() {
        let s: SweepSpec = "pb:0.1:0.9:0.1".parse().unwrap();
        let v = s.values();
        assert_eq!(v.len(), 9);
        assert!((v[8] - 0.9).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_specs() {
        for bad in [
            "r:0:4",
            "x:0:4:1",
            "r:0:4:0",
            "r:4:0:1",
            "r:0:4:0.5",
            "pb:0:2:0.5",
            "k:0:1e9:1",
            "r:a:4:1",
            "r:-1:4:1",
            "pb:0:1:nan",
        ] {
            assert!(
                matches!(bad.parse::<SweepSpec>(), Err(Error::InvalidSweep { .. })),
                "{bad}"
            );
        }
    }

    #[test]
    fn display_round_trip() {
        let s: SweepSpec = "k:2:8:2".parse().unwrap();
        assert_eq!(s.to_string().parse::<SweepSpec>().unwrap(), s);
    }
}
