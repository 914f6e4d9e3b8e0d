use std::collections::BTreeMap;

use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::model::SystemState;
use crate::solver::StationaryDistribution;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct BatchCounters {
    pub laa_arrivals: u64,
    pub laa_drops: u64,
    pub wifi_arrivals: u64,
    /// Wi-Fi arrivals blocked while `x = D`.
    pub wifi_drops: u64,
}

/// Counters and estimates of one run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SimStats {
    pub laa_arrivals: u64,
    /// LAA arrivals that went straight onto a channel.
    pub laa_served_direct: u64,
    /// LAA arrivals that entered the buffer.
    pub laa_buffered: u64,
    pub laa_drops: u64,
    /// LAA services finished.
    pub laa_completed: u64,
    pub wifi_arrivals: u64,
    /// Wi-Fi arrivals blocked while every channel carried LAA traffic.
    pub wifi_drops_laa_occupied: u64,
    /// All blocked Wi-Fi arrivals.
    pub wifi_drops_total: u64,
    /// `laa_drops / laa_arrivals`, 0 without LAA arrivals.
    pub p_bl_hat: f64,
    /// `wifi_drops_laa_occupied / wifi_arrivals`, 0 without Wi-Fi arrivals.
    pub p_bw_hat: f64,
    /// 95 % batch-means half-width for `p_bl_hat`.
    pub ci95_bl: f64,
    /// 95 % batch-means half-width for `p_bw_hat`.
    pub ci95_bw: f64,
    /// Time-weighted fraction of the run spent in each visited state.
    pub occupancy: Vec<(SystemState, f64)>,
    pub sim_time: f64,
    pub events: u64,
}

impl SimStats {
    pub(crate) fn finalize(&mut self, batches: &[BatchCounters], occupancy: BTreeMap<SystemState, f64>) {
        self.p_bl_hat = ratio(self.laa_drops, self.laa_arrivals);
        self.p_bw_hat = ratio(self.wifi_drops_laa_occupied, self.wifi_arrivals);
        let bl: Vec<f64> = batches.iter().map(|b| ratio(b.laa_drops, b.laa_arrivals)).collect();
        let bw: Vec<f64> = batches.iter().map(|b| ratio(b.wifi_drops, b.wifi_arrivals)).collect();
        self.ci95_bl = half_width(&bl);
        self.ci95_bw = half_width(&bw);
        let total: f64 = occupancy.values().sum();
        self.occupancy = occupancy
            .into_iter()
            .map(|(s, t)| (s, if total > 0.0 { t / total } else { 0.0 }))
            .collect();
    }

    /// Occupancy fraction of `state`; 0 if never visited.
    pub fn occupancy_of(&self, state: &SystemState) -> f64 {
        self.occupancy
            .binary_search_by(|(s, _)| s.cmp(state))
            .map_or(0.0, |i| self.occupancy[i].1)
    }

    /// Time-weighted mass of `{x = channels}`.
    pub fn laa_full_fraction(&self, channels: u32) -> f64 {
        self.occupancy
            .iter()
            .filter(|(s, _)| s.laa == channels)
            .map(|(_, p)| p)
            .sum()
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Student-t 95 % half-width over batch means.
fn half_width(means: &[f64]) -> f64 {
    let n = means.len();
    if n < 2 {
        return f64::NAN;
    }
    let nf = n as f64;
    let mean = means.iter().sum::<f64>() / nf;
    let var = means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (nf - 1.0);
    let t = StudentsT::new(0.0, 1.0, nf - 1.0)
        .map(|d| d.inverse_cdf(0.975))
        .unwrap_or(f64::NAN);
    t * (var / nf).sqrt()
}

/// Total-variation distance between simulated occupancy and `pi`.
pub fn total_variation(stats: &SimStats, pi: &StationaryDistribution) -> f64 {
    let mut sum = 0.0;
    for (s, p) in pi.iter() {
        sum += (p - stats.occupancy_of(s)).abs();
    }
    for (s, f) in &stats.occupancy {
        if !pi.space().contains(s) {
            sum += f;
        }
    }
    0.5 * sum
}
