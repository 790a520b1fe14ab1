//! Monetary and penalty terms: demand-response baseline and tiered revenue,
//! grid interaction cost, carbon cost, and the comfort / EV-departure
//! penalties.
//!
//! Sign conventions: revenue and penalties are non-negative; `grid_cost` is
//! negative when the park exports.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::DrEvent;

/// Hours per day; the settlement granularity is hourly.
pub const HOURS_PER_DAY: usize = 24;

#[derive(Debug, Error, PartialEq)]
pub enum EconomicsError {
    #[error("baseline history for hour {hour} has {found} entries, expected {expected}")]
    WrongHistoryLength {
        hour: usize,
        expected: usize,
        found: usize,
    },
}

/// Carbon pricing parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CarbonSpec {
    /// Carbon tax rate (dimensionless fraction).
    pub tax_rate: f64,
    /// Emission intensity of grid electricity, kgCO2/kWh.
    pub intensity: f64,
}

/// Per-slot ledger of all reward terms. Additive across slots.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    /// Demand-response compensation, RMB.
    pub dr_revenue: f64,
    /// Net grid energy cost, RMB (negative when exporting).
    pub grid_cost: f64,
    /// Carbon cost on purchased energy, RMB-scaled.
    pub carbon_cost: f64,
    /// Battery ageing cost across both packs, RMB.
    pub deg_cost: f64,
    /// Comfort-band violation, degC.
    pub temp_penalty: f64,
    /// EV departure SoC shortfall, fraction.
    pub soc_penalty: f64,
    /// Response ratio achieved this slot (zero outside DR windows).
    pub response_ratio: f64,
    /// Adjusted load credited to the DR settlement, kWh.
    pub adjusted_load: f64,
}

impl CostBreakdown {
    /// Accumulates another slot's ledger into this one. The ratio and
    /// adjusted load are summed too; divide by the slot count if an average
    /// is wanted.
    pub fn accumulate(&mut self, other: &CostBreakdown) {
        self.dr_revenue += other.dr_revenue;
        self.grid_cost += other.grid_cost;
        self.carbon_cost += other.carbon_cost;
        self.deg_cost += other.deg_cost;
        self.temp_penalty += other.temp_penalty;
        self.soc_penalty += other.soc_penalty;
        self.response_ratio += other.response_ratio;
        self.adjusted_load += other.adjusted_load;
    }

    /// Net monetary cost of the slot: grid + carbon + ageing - DR revenue.
    /// The comfort and SoC penalties are reward-shaping terms, not money,
    /// and are reported separately.
    pub fn total_cost(&self) -> f64 {
        self.grid_cost + self.carbon_cost + self.deg_cost - self.dr_revenue
    }
}

/// Maps a 1-indexed global slot to its intra-day hour in `1..=24`.
pub fn intraday_hour(t: usize) -> usize {
    (t - 1) % HOURS_PER_DAY + 1
}

/// Baseline load for one hour: the mean production load over the N
/// preceding similar days.
pub fn baseline_load(history: &[f64], hour: usize, expected_n: usize) -> Result<f64, EconomicsError> {
    if history.len() != expected_n {
        return Err(EconomicsError::WrongHistoryLength {
            hour,
            expected: expected_n,
            found: history.len(),
        });
    }
    Ok(history.iter().sum::<f64>() / history.len() as f64)
}

/// Adjusted load credited to a DR event: baseline deviation plus PV energy
/// plus the battery energy allocated to the production zone.
///
/// `q_bat_discharged` is the non-negative discharged energy; charging
/// contributes nothing. Returns `(delta_l, q_pro)`.
pub fn adjusted_load(
    base: f64,
    actual_pro: f64,
    q_pv: f64,
    q_bat_discharged: f64,
    r_dis: f64,
) -> (f64, f64) {
    debug_assert!((0.0..=1.0).contains(&r_dis));
    debug_assert!(q_bat_discharged >= 0.0);
    let q_pro = r_dis * q_bat_discharged;
    let delta_l = base - actual_pro + q_pv + q_pro;
    (delta_l, q_pro)
}

/// Tiered DR compensation. The response ratio `delta_l / invited_load`
/// selects the multiplier:
///
/// * below 0.5: nothing;
/// * 0.5 ..= 0.8: 60% of the unit price;
/// * above 0.8 up to 2.0: full unit price;
/// * above 2.0: double unit price.
///
/// Returns `(revenue, response_ratio)`.
pub fn dr_revenue(delta_l: f64, event: &DrEvent) -> (f64, f64) {
    let ratio = delta_l / event.invited_load;
    let revenue = if ratio < 0.5 {
        0.0
    } else if ratio <= 0.8 {
        0.6 * event.unit_price * delta_l
    } else if ratio <= 2.0 {
        event.unit_price * delta_l
    } else {
        2.0 * event.unit_price * delta_l
    };
    (revenue, ratio)
}

/// Net cost of the grid exchange for one slot (energy * price).
pub fn grid_cost(grid_energy: f64, price: f64) -> f64 {
    grid_energy * price
}

/// Carbon cost: only purchased energy is taxed, exports are carbon-free.
pub fn carbon_cost(spec: &CarbonSpec, grid_energy: f64) -> f64 {
    spec.tax_rate * spec.intensity * grid_energy.max(0.0)
}

/// Degrees of comfort-band violation (zero inside the band).
pub fn temp_penalty(t_in: f64, lo: f64, hi: f64) -> f64 {
    debug_assert!(lo < hi);
    (t_in - hi).max(0.0) + (lo - t_in).max(0.0)
}

/// SoC shortfall against the departure requirement, charged only on the
/// departure slot.
pub fn soc_departure_penalty(soc: f64, soc_lim: f64, is_departure_slot: bool) -> f64 {
    if is_departure_slot {
        (soc_lim - soc).max(0.0)
    } else {
        0.0
    }
}
