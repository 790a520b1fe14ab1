//! The three rule-based comparison strategies plus the shared thermostat
//! HVAC rule. All of them emit raw actions through the same environment
//! mapping and settlement as the learned policy.

use serde::{Deserialize, Serialize};

use crate::dynamics::{HvacCommand, HvacMode, HvacSpec};
use crate::env::{Action, EnvState, SlotContext};
use crate::rollout::Policy;

/// The comparison strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BaselineKind {
    /// Discharge through DR windows, recharge off-peak.
    RuleBasedDr,
    /// Charge cheap, discharge dear; blind to DR signals.
    TouArbitrage,
    /// No battery dispatch at all.
    NoDispatch,
}

impl BaselineKind {
    /// CLI name of the strategy.
    pub fn as_str(self) -> &'static str {
        match self {
            BaselineKind::RuleBasedDr => "dr-rule",
            BaselineKind::TouArbitrage => "tou",
            BaselineKind::NoDispatch => "none",
        }
    }
}

/// Price thresholds for the arbitrage baseline.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TouThresholds {
    /// Charge at or below this price, RMB/kWh.
    pub charge_price: f64,
    /// Discharge at or above this price, RMB/kWh.
    pub discharge_price: f64,
}

impl TouThresholds {
    pub fn validate(&self) -> Result<(), String> {
        if self.charge_price >= self.discharge_price {
            return Err(format!(
                "charge price {} must be below discharge price {}",
                self.charge_price, self.discharge_price
            ));
        }
        Ok(())
    }

    /// Defaults from the dataset tariff: 25th / 75th percentiles
    /// (nearest-rank) of the price series.
    pub fn from_price_percentiles(prices: &[f64]) -> Self {
        assert!(!prices.is_empty());
        let mut sorted = prices.to_vec();
        sorted.sort_by(f64::total_cmp);
        let rank = |q: f64| {
            let idx = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
            sorted[idx - 1]
        };
        TouThresholds {
            charge_price: rank(0.25),
            discharge_price: rank(0.75),
        }
    }
}

/// Bang-bang thermostat shared by every baseline: full cooling above the
/// band, full heating below it, off inside.
pub fn thermostat_hvac(t_in: f64, spec: &HvacSpec) -> HvacCommand {
    if t_in > spec.comfort_max {
        HvacCommand::new(HvacMode::Cool, spec.max_power, spec)
    } else if t_in < spec.comfort_min {
        HvacCommand::new(HvacMode::Heat, spec.max_power, spec)
    } else {
        HvacCommand::off()
    }
}

/// Raw HVAC channel implementing the thermostat through the environment's
/// action mapping (the mapped mode agrees with the thermostat's, since any
/// temperature outside the band is on the matching side of the midpoint).
fn thermostat_raw(t_in: f64, spec: &HvacSpec) -> f64 {
    if thermostat_hvac(t_in, spec).mode == HvacMode::Off {
        0.0
    } else {
        1.0
    }
}

/// Baseline 1: follow the day-ahead DR signal. Full discharge with all
/// battery energy credited to production during DR windows; full recharge
/// during the configured off-peak hours; idle otherwise. The EV mirrors the
/// ESS while on site.
#[derive(Debug, Clone)]
pub struct RuleBasedDrPolicy {
    hvac: HvacSpec,
    /// Off-peak charging window, half-open hours `[start, end)`.
    pub offpeak_start: usize,
    pub offpeak_end: usize,
}

impl RuleBasedDrPolicy {
    pub fn new(hvac: HvacSpec, offpeak_start: usize, offpeak_end: usize) -> Self {
        RuleBasedDrPolicy {
            hvac,
            offpeak_start,
            offpeak_end,
        }
    }
}

impl Policy for RuleBasedDrPolicy {
    fn act(&self, state: &EnvState, ctx: &SlotContext) -> Action {
        let (bat, rdis) = if ctx.dr_active {
            (-1.0, 1.0)
        } else if (self.offpeak_start..self.offpeak_end).contains(&ctx.hour) {
            (1.0, 0.0)
        } else {
            (0.0, 0.0)
        };
        Action::new(bat, bat, rdis, thermostat_raw(state.indoor_temp, &self.hvac))
    }

    fn name(&self) -> &'static str {
        BaselineKind::RuleBasedDr.as_str()
    }
}

/// Baseline 2: conventional time-of-use arbitrage. Never reads the DR
/// signal; any DR revenue during high-price discharge is incidental.
#[derive(Debug, Clone)]
pub struct TouArbitragePolicy {
    hvac: HvacSpec,
    pub thresholds: TouThresholds,
}

impl TouArbitragePolicy {
    pub fn new(hvac: HvacSpec, thresholds: TouThresholds) -> Self {
        TouArbitragePolicy { hvac, thresholds }
    }
}

impl Policy for TouArbitragePolicy {
    fn act(&self, state: &EnvState, _ctx: &SlotContext) -> Action {
        let (bat, rdis) = if state.price <= self.thresholds.charge_price {
            (1.0, 0.0)
        } else if state.price >= self.thresholds.discharge_price {
            (-1.0, 1.0)
        } else {
            (0.0, 0.0)
        };
        Action::new(bat, bat, rdis, thermostat_raw(state.indoor_temp, &self.hvac))
    }

    fn name(&self) -> &'static str {
        BaselineKind::TouArbitrage.as_str()
    }
}

/// Baseline 3: passive operation, thermostat only.
#[derive(Debug, Clone)]
pub struct NoDispatchPolicy {
    hvac: HvacSpec,
}

impl NoDispatchPolicy {
    pub fn new(hvac: HvacSpec) -> Self {
        NoDispatchPolicy { hvac }
    }
}

impl Policy for NoDispatchPolicy {
    fn act(&self, state: &EnvState, _ctx: &SlotContext) -> Action {
        Action::new(0.0, 0.0, 0.0, thermostat_raw(state.indoor_temp, &self.hvac))
    }

    fn name(&self) -> &'static str {
        BaselineKind::NoDispatch.as_str()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hvac() -> HvacSpec {
        HvacSpec {
            efficiency_ratio: 3.2,
            conductance: 18.0,
            inertia: 0.85,
            max_power: 50.0,
            comfort_min: 20.0,
            comfort_max: 24.0,
        }
    }

    fn state(t_in: f64, price: f64) -> EnvState {
        EnvState {
            production_load: 200.0,
            office_load: 40.0,
            baseline_load: 210.0,
            outdoor_temp: 30.0,
            indoor_temp: t_in,
            pv_energy: 50.0,
            price,
            soc_ess: 0.5,
            soc_ev: 0.5,
        }
    }

    fn ctx(hour: usize, dr_active: bool, ev_present: bool) -> SlotContext {
        SlotContext {
            day: 10,
            hour,
            dr_active,
            day_has_dr: dr_active,
            ev_present,
        }
    }

    #[test]
    fn thermostat_rule() {
        let spec = hvac();
        let cool = thermostat_hvac(25.0, &spec);
        assert_eq!((cool.mode, cool.power), (HvacMode::Cool, 50.0));
        let heat = thermostat_hvac(19.0, &spec);
        assert_eq!((heat.mode, heat.power), (HvacMode::Heat, 50.0));
        assert_eq!(thermostat_hvac(22.0, &spec), HvacCommand::off());
    }

    #[test]
    fn dr_rule_discharges_in_window() {
        let p = RuleBasedDrPolicy::new(hvac(), 0, 6);
        let a = p.act(&state(22.0, 1.2), &ctx(17, true, true));
        assert_eq!(a.raw_ess, -1.0);
        assert_eq!(a.raw_ev, -1.0);
        assert_eq!(a.raw_rdis, 1.0); // maps to r_dis = 1
    }

    #[test]
    fn dr_rule_charges_off_peak() {
        let p = RuleBasedDrPolicy::new(hvac(), 0, 6);
        let a = p.act(&state(22.0, 0.3), &ctx(3, false, false));
        assert_eq!(a.raw_ess, 1.0);
    }

    #[test]
    fn dr_rule_idles_otherwise() {
        let p = RuleBasedDrPolicy::new(hvac(), 0, 6);
        let a = p.act(&state(22.0, 0.75), &ctx(13, false, true));
        assert_eq!(a.raw_ess, 0.0);
        assert_eq!(a.raw_ev, 0.0);
    }

    #[test]
    fn tou_threshold_rule() {
        let p = TouArbitragePolicy::new(
            hvac(),
            TouThresholds {
                charge_price: 0.4,
                discharge_price: 1.0,
            },
        );
        assert_eq!(p.act(&state(22.0, 0.3), &ctx(2, false, false)).raw_ess, 1.0);
        assert_eq!(p.act(&state(22.0, 1.1), &ctx(11, false, true)).raw_ess, -1.0);
        assert_eq!(p.act(&state(22.0, 0.7), &ctx(13, false, true)).raw_ess, 0.0);
        // boundary prices trigger
        assert_eq!(p.act(&state(22.0, 0.4), &ctx(2, false, false)).raw_ess, 1.0);
        assert_eq!(p.act(&state(22.0, 1.0), &ctx(11, false, true)).raw_ess, -1.0);
    }

    #[test]
    fn tou_ignores_dr_signal() {
        let p = TouArbitragePolicy::new(
            hvac(),
            TouThresholds {
                charge_price: 0.4,
                discharge_price: 1.0,
            },
        );
        let with_dr = p.act(&state(22.0, 0.7), &ctx(17, true, true));
        let without = p.act(&state(22.0, 0.7), &ctx(17, false, true));
        assert_eq!(with_dr, without);
    }

    #[test]
    fn no_dispatch_never_moves_batteries() {
        let p = NoDispatchPolicy::new(hvac());
        for (t_in, price, dr) in [(25.0, 1.2, true), (22.0, 0.3, false), (18.0, 0.75, true)] {
            let a = p.act(&state(t_in, price), &ctx(12, dr, true));
            assert_eq!(a.raw_ess, 0.0);
            assert_eq!(a.raw_ev, 0.0);
            assert_eq!(a.raw_rdis, 0.0); // maps to r_dis = 0.5
        }
        // hot slot still cools through the shared thermostat
        let a = p.act(&state(25.0, 0.75), &ctx(14, false, true));
        assert_eq!(a.raw_hvac, 1.0);
    }

    #[test]
    fn percentile_thresholds() {
        let prices: Vec<f64> = (1..=100).map(|i| i as f64 / 100.0).collect();
        let th = TouThresholds::from_price_percentiles(&prices);
        assert_eq!(th.charge_price, 0.25);
        assert_eq!(th.discharge_price, 0.75);
        th.validate().unwrap();
    }
}
