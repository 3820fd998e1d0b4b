//! One row of closed-form results for a `(d, N, k, r, P_B)` point.

use serde::Serialize;

use crate::buffer::{
    decoding_buffer_bounds_absolute, decoding_buffer_upper_topo, expected_decoding_buffer,
    expected_decoding_buffer_approx, expected_deskew_buffer,
};
use crate::combin::{binom, to_f64};
use crate::delay::{
    expected_diff_delay_lossy, expected_diff_delay_redundant, expected_optimal_diff_delay,
    optimal_diff_delay, p_up, reduction_metrics,
};
use crate::error::{invalid, Error, Result};
use crate::paths::{AvailabilityModel, DelayVector};

/// Largest number of availability patterns enumerated for the optimal
/// selection column.
pub const MAX_OPT_SUBSETS: u64 = 200_000;

#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct AnalysisRow {
    #[serde(rename = "N")]
    pub available: usize,
    pub n: usize,
    pub k: usize,
    pub r: usize,
    pub tau_bar: f64,
    pub tau_bar_normalized: f64,
    pub tau_up: u64,
    pub p_up: f64,
    pub omega_ml: f64,
    pub omega_lnc_exact: f64,
    pub omega_lnc_approx: f64,
    pub omega_up_topo: u64,
    pub omega_up_abs: u64,
    pub omega_low: u64,
    pub delta_max: f64,
    pub delta_tau: Option<f64>,
    pub theta: f64,
    #[serde(rename = "B_n")]
    pub b_n: f64,
    #[serde(rename = "N_bar_cond")]
    pub n_bar_cond: Option<f64>,
    pub tau_bar_lossy: f64,
    pub tau_bar_opt: Option<f64>,
    pub tau_bar_opt_normalized: Option<f64>,
}

/// Closed forms for random path choice over the whole of `d`; `available`
/// only enters the optimal-selection columns, which average over every
/// equally likely set of `available` paths.
pub fn analyze_point(
    d: &DelayVector,
    available: usize,
    k: usize,
    r: usize,
    blocking: f64,
) -> Result<AnalysisRow> {
    let n = k + r;
    if k < 2 {
        return Err(invalid(format!("k={k} must be at least 2")));
    }
    if n > available || available > d.len() {
        return Err(invalid(format!(
            "need k+r <= N <= F (k+r={n}, N={available}, F={})",
            d.len()
        )));
    }
    let tau_full = d.tau_up(0)? as f64;
    let norm = |v: f64| if tau_full > 0.0 { v / tau_full } else { 0.0 };
    let tau_bar = to_f64(&expected_diff_delay_redundant(d, k, r)?);
    let tau_up = d.tau_up(r)?;
    let (omega_up_abs, omega_low) = decoding_buffer_bounds_absolute(tau_up, k)?;
    let (delta_max, delta_tau) = match reduction_metrics(d, k, r) {
        Ok(m) => (m.delta_max, Some(m.delta_tau)),
        Err(Error::DegenerateBaseline) => {
            let dm = if d.max() == 0 {
                0.0
            } else {
                (d.max() - d.d(d.len() - r)) as f64 / d.max() as f64
            };
            (dm, None)
        }
        Err(e) => return Err(e),
    };
    let model = AvailabilityModel::new(d.len(), blocking)?;
    let n_bar_cond = match model.mean_available_given_success(n) {
        Ok(v) => Some(v),
        Err(Error::DegenerateConditioning) => None,
        Err(e) => return Err(e),
    };
    let tau_bar_opt = if available == d.len() {
        Some(optimal_diff_delay(d, k, r)? as f64)
    } else if binom(d.len() as i64, available as i64) <= MAX_OPT_SUBSETS.into() {
        Some(to_f64(&expected_optimal_diff_delay(d, available, k, r)?))
    } else {
        None
    };
    Ok(AnalysisRow {
        available,
        n,
        k,
        r,
        tau_bar,
        tau_bar_normalized: norm(tau_bar),
        tau_up,
        p_up: to_f64(&p_up(d, n, r)?),
        omega_ml: to_f64(&expected_deskew_buffer(d, k)?),
        omega_lnc_exact: to_f64(&expected_decoding_buffer(d, k, r)?),
        omega_lnc_approx: to_f64(&expected_decoding_buffer_approx(d, k, r)?),
        omega_up_topo: decoding_buffer_upper_topo(d, k, r)?,
        omega_up_abs,
        omega_low,
        delta_max,
        delta_tau,
        theta: r as f64 / k as f64,
        b_n: model.request_blocking(n)?,
        n_bar_cond,
        tau_bar_lossy: to_f64(&expected_diff_delay_lossy(d, k, r)?),
        tau_bar_opt,
        tau_bar_opt_normalized: tau_bar_opt.map(norm),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn abstract_row() {
        let d = DelayVector::abstract_network(15).unwrap();
        let row = analyze_point(&d, 15, 4, 0, 0.0).unwrap();
        assert!((row.p_up - 12.0 / 210.0).abs() < 1e-15);
        assert_eq!((row.delta_max, row.delta_tau, row.theta), (0.0, Some(0.0), 0.0));
        assert_eq!(row.tau_up, 14);
        assert_eq!(row.tau_bar_opt, Some(3.0));
        assert_eq!(row.b_n, 0.0);
        assert_eq!(row.n_bar_cond, Some(15.0));
    }

    #[test]
    fn random_column_ignores_availability() {
        let d = DelayVector::abstract_network(15).unwrap();
        let rows: Vec<AnalysisRow> = (4..=15).map(|a| analyze_point(&d, a, 4, 0, 0.0).unwrap()).collect();
        assert!(rows.windows(2).all(|w| w[0].tau_bar == w[1].tau_bar));
        let opt: Vec<f64> = rows.iter().map(|r| r.tau_bar_opt.unwrap()).collect();
        assert!(opt.windows(2).all(|w| w[0] >= w[1]));
        assert!(opt[0] > opt[opt.len() - 1]);
    }

    #[test]
    fn flat_vector_has_no_baseline() {
        let d: DelayVector = "3,3,3,3".parse().unwrap();
        let row = analyze_point(&d, 4, 2, 1, 0.5).unwrap();
        assert_eq!(row.delta_tau, None);
        assert_eq!(row.delta_max, 0.0);
    }

    #[test]
    fn bad_points() {
        let d = DelayVector::abstract_network(5).unwrap();
        assert!(analyze_point(&d, 5, 1, 0, 0.0).is_err());
        assert!(analyze_point(&d, 4, 3, 2, 0.0).is_err());
        assert!(analyze_point(&d, 6, 2, 0, 0.0).is_err());
    }
}
