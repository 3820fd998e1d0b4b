use serde::Serialize;

use super::{Method, Scenario};
use crate::buffer::{decoding_buffer, expected_decoding_buffer, expected_deskew_buffer};
use crate::combin::{binom, to_f64};
use crate::delay::{
    expected_diff_delay_lossy, expected_diff_delay_redundant, expected_optimal_diff_delay, p_up,
};
use crate::error::{Error, Result};
use crate::report::MAX_OPT_SUBSETS;
use crate::select::optimal_set;

/// Closed-form counterparts of the statistics a scenario measures. A field is
/// `None` when no closed form applies to the scenario.
#[derive(Clone, Copy, PartialEq, Debug, Default, Serialize)]
pub struct Expected {
    pub blocking: Option<f64>,
    pub mean_available: Option<f64>,
    pub diff_delay: Option<f64>,
    pub p_up: Option<f64>,
    pub deskew: Option<f64>,
    pub decoding: Option<f64>,
}

pub fn expected(s: &Scenario) -> Result<Expected> {
    s.validate()?;
    let (k, r, n) = (s.k, s.r, s.n());
    let d = &s.delays;
    let big_f = d.len();
    let fp = s.failures.paths;
    let mut e = Expected::default();

    // Request blocking and path count after failures.
    match s.fixed_available {
        Some(a) => {
            let left = a.saturating_sub(fp);
            e.blocking = Some(f64::from(u8::from(left < n)));
            e.mean_available = (left >= n).then_some(left as f64);
        }
        None => {
            let model = s.availability();
            let need = n + fp;
            if need > big_f {
                e.blocking = Some(1.0);
            } else {
                e.blocking = Some(model.request_blocking(need)?);
                e.mean_available = match model.mean_available_given_success(need) {
                    Ok(v) => Some(v - fp as f64),
                    Err(Error::DegenerateConditioning) => None,
                    Err(err) => return Err(err),
                };
            }
        }
    }

    let lossless = s.failures.packets == 0;
    match s.method {
        Method::LncRnd => {
            // Random choice among randomly available paths is a uniform
            // choice among all existing ones.
            if k < 2 {
                return Ok(e);
            }
            if lossless {
                e.diff_delay = Some(to_f64(&expected_diff_delay_redundant(d, k, r)?));
                e.p_up = Some(to_f64(&p_up(d, n, r)?));
                e.decoding = Some(to_f64(&expected_decoding_buffer(d, k, r)?));
            } else if s.failures.packets == r {
                e.diff_delay = Some(to_f64(&expected_diff_delay_lossy(d, k, r)?));
            }
            if r == 0 {
                e.deskew = Some(to_f64(&expected_deskew_buffer(d, k)?));
            }
        }
        Method::LncOpt | Method::MlOpt => {
            let deterministic = fp == 0
                && match s.fixed_available {
                    Some(a) => a == big_f,
                    None => s.blocking == 0.0,
                };
            if deterministic && lossless {
                let set: Vec<u64> = optimal_set(d.as_slice(), k, r)?
                    .into_iter()
                    .map(|i| d.as_slice()[i])
                    .collect();
                let tau = set[k - 1] - set[0];
                e.diff_delay = Some(tau as f64);
                e.p_up = Some(f64::from(u8::from(tau == d.tau_up(r)?)));
                if r == 0 {
                    e.deskew = Some((k as u64 * (tau + 1)) as f64);
                }
                if s.method.is_coded() {
                    e.decoding = Some(decoding_buffer(&set, k)? as f64);
                }
            } else if lossless && fp == 0 && s.blocking == 0.0 {
                if let Some(a) = s.fixed_available {
                    if binom(big_f as i64, a as i64) <= MAX_OPT_SUBSETS.into() {
                        e.diff_delay = Some(to_f64(&expected_optimal_diff_delay(d, a, k, r)?));
                    }
                }
            }
        }
    }
    Ok(e)
}
