//! The MDP wrapper around the park physics: assembles the nine-channel
//! observation, maps raw actions onto admissible controls, advances one slot,
//! and returns the six-term reward with its full ledger.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ageing::{step_deg_cost, AgeingCoefficient};
use crate::data::{
    baseline_history, channel, DataError, NormStats, ParkDataset, STATE_DIM,
};
use crate::dynamics::{
    battery_step, clamp_battery_power, grid_power, thermal_step, BatterySpec, BatteryState,
    DynamicsError, HvacCommand, HvacMode, HvacSpec, DT_HOURS,
};
use crate::economics::{
    adjusted_load, baseline_load, carbon_cost, dr_revenue, grid_cost, soc_departure_penalty,
    temp_penalty, CarbonSpec, CostBreakdown, HOURS_PER_DAY,
};

/// Number of continuous action channels.
pub const ACTION_DIM: usize = 4;

#[derive(Debug, Error)]
pub enum EnvError {
    #[error("episode already finished; call reset")]
    EpisodeFinished,
    #[error("day {day} out of range ({num_days} days)")]
    DayOutOfRange { day: usize, num_days: usize },
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

/// The nine-component observation, in fixed channel order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvState {
    pub production_load: f64,
    pub office_load: f64,
    pub baseline_load: f64,
    pub outdoor_temp: f64,
    pub indoor_temp: f64,
    pub pv_energy: f64,
    pub price: f64,
    pub soc_ess: f64,
    pub soc_ev: f64,
}

impl EnvState {
    /// Channel-ordered vector view.
    pub fn to_array(&self) -> [f64; STATE_DIM] {
        let mut v = [0.0; STATE_DIM];
        v[channel::PRODUCTION_LOAD] = self.production_load;
        v[channel::OFFICE_LOAD] = self.office_load;
        v[channel::BASELINE_LOAD] = self.baseline_load;
        v[channel::OUTDOOR_TEMP] = self.outdoor_temp;
        v[channel::INDOOR_TEMP] = self.indoor_temp;
        v[channel::PV_ENERGY] = self.pv_energy;
        v[channel::PRICE] = self.price;
        v[channel::SOC_ESS] = self.soc_ess;
        v[channel::SOC_EV] = self.soc_ev;
        v
    }
}

/// Raw policy output; every channel lives in [-1, 1]. Out-of-range values
/// are clamped on construction, never rejected.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Action {
    pub raw_ess: f64,
    pub raw_ev: f64,
    pub raw_rdis: f64,
    pub raw_hvac: f64,
}

impl Action {
    pub fn new(raw_ess: f64, raw_ev: f64, raw_rdis: f64, raw_hvac: f64) -> Self {
        Action {
            raw_ess: raw_ess.clamp(-1.0, 1.0),
            raw_ev: raw_ev.clamp(-1.0, 1.0),
            raw_rdis: raw_rdis.clamp(-1.0, 1.0),
            raw_hvac: raw_hvac.clamp(-1.0, 1.0),
        }
    }

    pub fn neutral() -> Self {
        Action::new(0.0, 0.0, 0.0, 0.0)
    }

    pub fn from_array(a: [f64; ACTION_DIM]) -> Self {
        Action::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_array(&self) -> [f64; ACTION_DIM] {
        [self.raw_ess, self.raw_ev, self.raw_rdis, self.raw_hvac]
    }
}

/// Non-negative multipliers on the six reward terms.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RewardWeights {
    pub dr_revenue: f64,
    pub grid_cost: f64,
    pub temp_penalty: f64,
    pub soc_penalty: f64,
    pub deg_cost: f64,
    pub carbon_cost: f64,
}

impl Default for RewardWeights {
    fn default() -> Self {
        // Monetary terms unweighted; comfort and departure shortfalls scaled
        // so one degree-hour or a 0.1 SoC gap outweighs typical hourly
        // arbitrage profit. Tuning defaults, config-exposed.
        RewardWeights {
            dr_revenue: 1.0,
            grid_cost: 1.0,
            temp_penalty: 50.0,
            soc_penalty: 200.0,
            deg_cost: 1.0,
            carbon_cost: 1.0,
        }
    }
}

impl RewardWeights {
    /// Weighted combination of a slot ledger (before the global divisor).
    pub fn combine(&self, b: &CostBreakdown) -> f64 {
        self.dr_revenue * b.dr_revenue - self.grid_cost * b.grid_cost
            - self.temp_penalty * b.temp_penalty
            - self.soc_penalty * b.soc_penalty
            - self.deg_cost * b.deg_cost
            - self.carbon_cost * b.carbon_cost
    }
}

/// Per-episode configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EpisodeConfig {
    /// Slots per episode; one day of hourly slots.
    pub steps_per_episode: usize,
    pub initial_soc_ess: f64,
    pub initial_soc_ev: f64,
    pub initial_indoor_temp: f64,
    /// Degrees shaved off each side of the comfort band during training.
    pub training_comfort_shrink: f64,
    pub weights: RewardWeights,
    /// Global scale-down applied uniformly to the reward; keeps critic
    /// targets near unit magnitude without reordering policies.
    pub reward_divisor: f64,
}

impl Default for EpisodeConfig {
    fn default() -> Self {
        EpisodeConfig {
            steps_per_episode: HOURS_PER_DAY,
            initial_soc_ess: 0.5,
            initial_soc_ev: 0.35,
            initial_indoor_temp: 22.0,
            training_comfort_shrink: 0.5,
            weights: RewardWeights::default(),
            reward_divisor: 100.0,
        }
    }
}

/// Static environment inputs: component specs plus the PV cap and the EV
/// departure requirement.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnvSpecs {
    pub hvac: HvacSpec,
    pub ess: BatterySpec,
    pub ev: BatterySpec,
    pub carbon: CarbonSpec,
    /// Installed PV capacity, kW.
    pub pv_max: f64,
    /// Minimum acceptable EV SoC at departure.
    pub ev_soc_lim: f64,
    /// Drop DR days from baseline-history collection.
    pub exclude_dr_days_from_baseline: bool,
}

/// Train episodes start from configured initial conditions; eval episodes
/// report violations against the nominal comfort band and accept carried
/// state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunMode {
    Train,
    Eval,
}

/// State carried across chained evaluation days.
#[derive(Debug, Clone, Copy)]
pub struct CarryIn {
    pub soc_ess: f64,
    pub soc_ev: f64,
    pub indoor_temp: f64,
}

/// Admissible physical controls produced from a raw action.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MappedControls {
    /// Stationary battery power, kW (positive charges).
    pub ess_kw: f64,
    /// EV power, kW; zero whenever the vehicle is away.
    pub ev_kw: f64,
    /// Share of discharged battery energy credited to the production zone.
    pub r_dis: f64,
    pub hvac: HvacCommand,
}

/// One environment transition with its complete ledger.
#[derive(Debug, Clone)]
pub struct Transition {
    pub state: EnvState,
    pub action: Action,
    pub reward: f64,
    pub next_state: EnvState,
    pub done: bool,
    pub breakdown: CostBreakdown,
    pub controls: MappedControls,
    /// Grid exchange this slot, kW.
    pub grid_kw: f64,
    /// Global slot index of the transition.
    pub slot: usize,
}

/// The park environment. Deterministic: all stochasticity lives in the
/// dataset and the caller's policy.
#[derive(Debug, Clone)]
pub struct ParkEnv {
    dataset: Arc<ParkDataset>,
    specs: EnvSpecs,
    config: EpisodeConfig,
    // episode runtime
    day: usize,
    hour: usize,
    mode: RunMode,
    indoor_temp: f64,
    ess: BatteryState,
    ev: BatteryState,
    baseline: [f64; HOURS_PER_DAY],
    done: bool,
    active: bool,
}

impl ParkEnv {
    pub fn new(dataset: Arc<ParkDataset>, specs: EnvSpecs, config: EpisodeConfig) -> Self {
        assert!(
            (1..=HOURS_PER_DAY).contains(&config.steps_per_episode),
            "steps_per_episode must be in 1..=24"
        );
        assert!(
            config.training_comfort_shrink >= 0.0
                && config.training_comfort_shrink
                    < 0.5 * (specs.hvac.comfort_max - specs.hvac.comfort_min),
            "comfort shrink must leave a non-empty band"
        );
        ParkEnv {
            dataset,
            specs,
            config,
            day: 0,
            hour: 0,
            mode: RunMode::Train,
            indoor_temp: 0.0,
            ess: BatteryState { soc: 0.0 },
            ev: BatteryState { soc: 0.0 },
            baseline: [0.0; HOURS_PER_DAY],
            done: true,
            active: false,
        }
    }

    pub fn dataset(&self) -> &ParkDataset {
        &self.dataset
    }

    pub fn specs(&self) -> &EnvSpecs {
        &self.specs
    }

    pub fn config(&self) -> &EpisodeConfig {
        &self.config
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    pub fn current_day(&self) -> usize {
        self.day
    }

    /// Comfort band used for the penalty in the current mode.
    pub fn penalty_band(&self) -> (f64, f64) {
        let (lo, hi) = (self.specs.hvac.comfort_min, self.specs.hvac.comfort_max);
        match self.mode {
            RunMode::Train => (
                lo + self.config.training_comfort_shrink,
                hi - self.config.training_comfort_shrink,
            ),
            RunMode::Eval => (lo, hi),
        }
    }

    fn slot(&self) -> usize {
        self.dataset.slot(self.day, self.hour)
    }

    fn ev_present(&self, hour: usize) -> bool {
        self.dataset
            .ev_window(self.day)
            .is_some_and(|w| (w.arrival_hour..w.departure_hour).contains(&hour))
    }

    /// Snaps the EV SoC to the scheduled arrival value when `hour` is the
    /// arrival slot (the pack returns from driving with that charge).
    fn apply_ev_arrival(&mut self, hour: usize) {
        if let Some(w) = self.dataset.ev_window(self.day) {
            if hour == w.arrival_hour {
                self.ev.soc = w
                    .arrival_soc
                    .clamp(self.specs.ev.soc_min, self.specs.ev.soc_max);
            }
        }
    }

    fn observe(&self) -> EnvState {
        let slot = self.dataset.slot(self.day, self.hour.min(HOURS_PER_DAY - 1));
        // A finished episode freezes the exogenous channels at the final
        // slot; internal channels carry the post-step physical state.
        EnvState {
            production_load: self.dataset.production_load[slot],
            office_load: self.dataset.office_load[slot],
            baseline_load: self.baseline[self.hour.min(HOURS_PER_DAY - 1)],
            outdoor_temp: self.dataset.outdoor_temp[slot],
            indoor_temp: self.indoor_temp,
            pv_energy: self.pv_at(slot),
            price: self.dataset.price[slot],
            soc_ess: self.ess.soc,
            soc_ev: self.ev.soc,
        }
    }

    fn pv_at(&self, slot: usize) -> f64 {
        self.dataset.pv_energy[slot].clamp(0.0, self.specs.pv_max)
    }

    /// Starts an episode on `day`. Train mode takes the configured initial
    /// conditions. Eval mode carries the ESS SoC and indoor temperature over
    /// from `carry_in` when given; the EV channel starts from the day's
    /// scheduled arrival SoC (the pack is away until it arrives, at which
    /// point the schedule governs either way).
    pub fn reset(
        &mut self,
        day: usize,
        mode: RunMode,
        carry_in: Option<CarryIn>,
    ) -> Result<EnvState, EnvError> {
        if day >= self.dataset.num_days() {
            return Err(EnvError::DayOutOfRange {
                day,
                num_days: self.dataset.num_days(),
            });
        }
        let history = baseline_history(
            &self.dataset,
            day,
            self.specs.exclude_dr_days_from_baseline,
        )?;
        let needed = self.dataset.day_type(day).baseline_days();
        for (h, per_hour) in history.iter().enumerate() {
            self.baseline[h] = baseline_load(per_hour, h + 1, needed)
                .expect("history length checked by baseline_history");
        }

        self.day = day;
        self.hour = 0;
        self.mode = mode;
        self.done = false;
        self.active = true;

        let ev_arrival_soc = self
            .dataset
            .ev_window(day)
            .map(|w| w.arrival_soc)
            .unwrap_or(self.config.initial_soc_ev);
        match (mode, carry_in) {
            (RunMode::Train, _) => {
                self.indoor_temp = self.config.initial_indoor_temp;
                self.ess.soc = self.config.initial_soc_ess;
                self.ev.soc = self.config.initial_soc_ev;
            }
            (RunMode::Eval, Some(c)) => {
                self.indoor_temp = c.indoor_temp;
                self.ess.soc = c.soc_ess;
                self.ev.soc = ev_arrival_soc;
            }
            (RunMode::Eval, None) => {
                self.indoor_temp = self.config.initial_indoor_temp;
                self.ess.soc = self.config.initial_soc_ess;
                self.ev.soc = ev_arrival_soc;
            }
        }
        self.ess.soc = self.ess.soc.clamp(self.specs.ess.soc_min, self.specs.ess.soc_max);
        self.ev.soc = self.ev.soc.clamp(self.specs.ev.soc_min, self.specs.ev.soc_max);
        self.apply_ev_arrival(0);
        Ok(self.observe())
    }

    /// Maps a raw action to admissible physical controls at the current
    /// state. The HVAC mode is derived from the band midpoint (cool above,
    /// heat below) and only the magnitude of the HVAC channel is used.
    pub fn map_action(&self, action: &Action) -> MappedControls {
        let a = Action::new(
            action.raw_ess,
            action.raw_ev,
            action.raw_rdis,
            action.raw_hvac,
        );
        let ess_kw = clamp_battery_power(
            &self.specs.ess,
            &self.ess,
            a.raw_ess * self.specs.ess.rated_power,
        );
        let ev_kw = if self.ev_present(self.hour) {
            clamp_battery_power(&self.specs.ev, &self.ev, a.raw_ev * self.specs.ev.rated_power)
        } else {
            0.0
        };
        let r_dis = (a.raw_rdis + 1.0) / 2.0;
        let power = a.raw_hvac.abs() * self.specs.hvac.max_power;
        let mode = if power == 0.0 {
            HvacMode::Off
        } else if self.indoor_temp >= self.specs.hvac.band_midpoint() {
            HvacMode::Cool
        } else {
            HvacMode::Heat
        };
        MappedControls {
            ess_kw,
            ev_kw,
            r_dis,
            hvac: HvacCommand::new(mode, power, &self.specs.hvac),
        }
    }

    /// Context a rule-based policy needs beyond the observation.
    pub fn slot_context(&self) -> SlotContext {
        SlotContext {
            day: self.day,
            hour: self.hour,
            dr_active: self.dataset.dr_event_at(self.slot()).is_some(),
            day_has_dr: self.dataset.day_has_dr(self.day),
            ev_present: self.ev_present(self.hour),
        }
    }

    /// Advances one slot: applies the mapped controls, steps the thermal and
    /// battery dynamics, settles all six reward terms, and returns the full
    /// transition.
    pub fn step(&mut self, action: Action) -> Result<Transition, EnvError> {
        if self.done || !self.active {
            return Err(EnvError::EpisodeFinished);
        }
        let state = self.observe();
        let slot = self.slot();
        let controls = self.map_action(&action);

        let load = self.dataset.production_load[slot] + self.dataset.office_load[slot];
        let pv = self.pv_at(slot);
        let grid_kw = grid_power(load, controls.hvac.power, controls.ess_kw, controls.ev_kw, pv);

        let next_temp = thermal_step(
            &self.specs.hvac,
            self.indoor_temp,
            self.dataset.outdoor_temp[slot],
            &controls.hvac,
        );
        let next_ess = battery_step(&self.specs.ess, &self.ess, controls.ess_kw)?;
        let next_ev = if self.ev_present(self.hour) {
            battery_step(&self.specs.ev, &self.ev, controls.ev_kw)?
        } else {
            self.ev
        };

        // Settlement.
        let price = self.dataset.price[slot];
        let grid_energy = grid_kw * DT_HOURS;
        let g_cost = grid_cost(grid_energy, price);
        let c_cost = carbon_cost(&self.specs.carbon, grid_energy);
        let deg = step_deg_cost(
            AgeingCoefficient {
                value: self.specs.ess.ageing_coeff,
            },
            controls.ess_kw,
        ) + step_deg_cost(
            AgeingCoefficient {
                value: self.specs.ev.ageing_coeff,
            },
            controls.ev_kw,
        );
        let (band_lo, band_hi) = self.penalty_band();
        let t_pen = temp_penalty(next_temp, band_lo, band_hi);
        let is_departure = self
            .dataset
            .ev_window(self.day)
            .is_some_and(|w| self.hour + 1 == w.departure_hour);
        let s_pen = soc_departure_penalty(next_ev.soc, self.specs.ev_soc_lim, is_departure);

        let (rev, ratio, delta_l) = match self.dataset.dr_event_at(slot) {
            Some(event) => {
                let q_pv = pv * DT_HOURS;
                let q_bat_discharged =
                    (-(controls.ess_kw + controls.ev_kw) * DT_HOURS).max(0.0);
                let (delta_l, _q_pro) = adjusted_load(
                    self.baseline[self.hour],
                    self.dataset.production_load[slot],
                    q_pv,
                    q_bat_discharged,
                    controls.r_dis,
                );
                let (rev, ratio) = dr_revenue(delta_l, event);
                (rev, ratio, delta_l)
            }
            None => (0.0, 0.0, 0.0),
        };

        let breakdown = CostBreakdown {
            dr_revenue: rev,
            grid_cost: g_cost,
            carbon_cost: c_cost,
            deg_cost: deg,
            temp_penalty: t_pen,
            soc_penalty: s_pen,
            response_ratio: ratio,
            adjusted_load: delta_l,
        };
        let reward = self.config.weights.combine(&breakdown) / self.config.reward_divisor;

        // Advance.
        self.indoor_temp = next_temp;
        self.ess = next_ess;
        self.ev = next_ev;
        self.hour += 1;
        self.done = self.hour >= self.config.steps_per_episode;
        if !self.done {
            self.apply_ev_arrival(self.hour);
        }

        Ok(Transition {
            state,
            action,
            reward,
            next_state: self.observe(),
            done: self.done,
            breakdown,
            controls,
            grid_kw,
            slot,
        })
    }

    /// Snapshot of the internal state for chaining days.
    pub fn carry_out(&self) -> CarryIn {
        CarryIn {
            soc_ess: self.ess.soc,
            soc_ev: self.ev.soc,
            indoor_temp: self.indoor_temp,
        }
    }
}

/// Day-ahead information available to any dispatch policy at a slot.
#[derive(Debug, Clone, Copy)]
pub struct SlotContext {
    pub day: usize,
    pub hour: usize,
    /// A DR window covers this slot.
    pub dr_active: bool,
    /// Some DR window exists today.
    pub day_has_dr: bool,
    /// The EV is on site this slot.
    pub ev_present: bool,
}

/// Channel-wise min-max normalization of an observation, clamped to [0, 1];
/// constant channels map to 0.5.
pub fn normalize_state(state: &EnvState, stats: &NormStats) -> [f64; STATE_DIM] {
    let raw = state.to_array();
    let mut out = [0.0; STATE_DIM];
    for ch in 0..STATE_DIM {
        out[ch] = stats.normalize(ch, raw[ch]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::synth::{synthesize, SynthConfig};
    use approx::assert_relative_eq;

    pub(crate) fn test_specs() -> EnvSpecs {
        EnvSpecs {
            hvac: HvacSpec {
                efficiency_ratio: 3.2,
                conductance: 18.0,
                inertia: 0.85,
                max_power: 50.0,
                comfort_min: 20.0,
                comfort_max: 24.0,
            },
            ess: BatterySpec {
                chemistry: crate::dynamics::Chemistry::Lfp,
                capacity: 400.0,
                rated_power: 100.0,
                charge_eff: 0.95,
                discharge_eff: 0.95,
                soc_min: 0.2,
                soc_max: 1.0,
                standby_loss: 0.0,
                procurement_cost: 1000.0,
                ageing_coeff: 0.0125,
            },
            ev: BatterySpec {
                chemistry: crate::dynamics::Chemistry::Nmc,
                capacity: 400.0,
                rated_power: 100.0,
                charge_eff: 0.95,
                discharge_eff: 0.95,
                soc_min: 0.2,
                soc_max: 1.0,
                standby_loss: 0.0,
                procurement_cost: 1200.0,
                ageing_coeff: 6.0e-4,
            },
            carbon: CarbonSpec {
                tax_rate: 0.06,
                intensity: 0.28088,
            },
            pv_max: 200.0,
            ev_soc_lim: 0.6,
            exclude_dr_days_from_baseline: false,
        }
    }

    fn make_env() -> ParkEnv {
        let ds = Arc::new(synthesize(&SynthConfig::default()));
        ParkEnv::new(ds, test_specs(), EpisodeConfig::default())
    }

    #[test]
    fn train_reset_uses_configured_initials() {
        let mut env = make_env();
        let day = env.dataset().eligible_days(false)[0];
        let s = env.reset(day, RunMode::Train, None).unwrap();
        assert_eq!(s.soc_ess, 0.5);
        assert_eq!(s.soc_ev, 0.35);
        assert_eq!(s.indoor_temp, 22.0);
    }

    #[test]
    fn eval_reset_carries_state() {
        let mut env = make_env();
        let day = env.dataset().eligible_days(false)[0];
        let s = env
            .reset(
                day,
                RunMode::Eval,
                Some(CarryIn {
                    soc_ess: 0.73,
                    soc_ev: 0.9,
                    indoor_temp: 23.1,
                }),
            )
            .unwrap();
        assert_eq!(s.soc_ess, 0.73);
        assert_eq!(s.indoor_temp, 23.1);
    }

    #[test]
    fn reset_day_without_history_fails() {
        let mut env = make_env();
        let err = env.reset(0, RunMode::Train, None).unwrap_err();
        assert!(matches!(
            err,
            EnvError::Data(DataError::InsufficientHistory { .. })
        ));
    }

    #[test]
    fn neutral_action_maps_to_zero_powers_and_half_rdis() {
        let mut env = make_env();
        let day = env.dataset().eligible_days(false)[0];
        env.reset(day, RunMode::Train, None).unwrap();
        let c = env.map_action(&Action::neutral());
        assert_eq!(c.ess_kw, 0.0);
        assert_eq!(c.ev_kw, 0.0);
        assert_eq!(c.r_dis, 0.5);
        assert_eq!(c.hvac.power, 0.0);
    }

    #[test]
    fn full_charge_request_at_soc_max_maps_to_zero() {
        let mut env = make_env();
        let day = env.dataset().eligible_days(false)[0];
        env.reset(
            day,
            RunMode::Eval,
            Some(CarryIn {
                soc_ess: 1.0,
                soc_ev: 0.35,
                indoor_temp: 22.0,
            }),
        )
        .unwrap();
        let c = env.map_action(&Action::new(1.0, 0.0, 0.0, 0.0));
        assert_eq!(c.ess_kw, 0.0);
    }

    #[test]
    fn ev_masked_while_absent() {
        let mut env = make_env();
        let day = env.dataset().eligible_days(false)[0];
        env.reset(day, RunMode::Train, None).unwrap();
        // hour 0: EV arrives at 8, so it is away now
        assert!(!env.slot_context().ev_present);
        let c = env.map_action(&Action::new(0.0, -1.0, 0.0, 0.0));
        assert_eq!(c.ev_kw, 0.0);
    }

    #[test]
    fn done_exactly_at_final_slot_and_step_after_done_errors() {
        let mut env = make_env();
        let day = env.dataset().eligible_days(false)[0];
        env.reset(day, RunMode::Train, None).unwrap();
        for h in 0..24 {
            let t = env.step(Action::neutral()).unwrap();
            assert_eq!(t.done, h == 23, "hour {h}");
        }
        assert!(matches!(
            env.step(Action::neutral()),
            Err(EnvError::EpisodeFinished)
        ));
    }

    #[test]
    fn reward_is_weighted_ledger_over_divisor() {
        let mut env = make_env();
        let day = env.dataset().eligible_days(false)[0];
        env.reset(day, RunMode::Train, None).unwrap();
        for _ in 0..24 {
            let t = env.step(Action::new(0.6, -0.2, 0.3, 0.4)).unwrap();
            let expected = env.config.weights.combine(&t.breakdown) / env.config.reward_divisor;
            assert_relative_eq!(t.reward, expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn ev_arrival_snaps_soc() {
        let mut env = make_env();
        let day = env.dataset().eligible_days(false)[0];
        assert!(env.dataset().ev_window(day).is_some());
        env.reset(
            day,
            RunMode::Eval,
            Some(CarryIn {
                soc_ess: 0.5,
                soc_ev: 0.9,
                indoor_temp: 22.0,
            }),
        )
        .unwrap();
        let mut seen_arrival = false;
        for _ in 0..24 {
            let t = env.step(Action::neutral()).unwrap();
            let ctx_hour = env.hour;
            if ctx_hour == 8 {
                assert_relative_eq!(t.next_state.soc_ev, 0.35);
                seen_arrival = true;
            }
        }
        assert!(seen_arrival);
    }

    #[test]
    fn departure_penalty_fires_on_shortfall() {
        let mut env = make_env();
        let day = env.dataset().eligible_days(false)[0];
        env.reset(day, RunMode::Train, None).unwrap();
        let mut penalties = Vec::new();
        for h in 0..24 {
            let t = env.step(Action::neutral()).unwrap();
            if t.breakdown.soc_penalty > 0.0 {
                penalties.push((h, t.breakdown.soc_penalty));
            }
        }
        // Neutral policy never charges: the EV departs at its arrival SoC
        // 0.35, shortfall 0.25 against the 0.6 requirement, exactly once.
        assert_eq!(penalties.len(), 1);
        let (hour, pen) = penalties[0];
        assert_eq!(hour, 17); // step of hour 17 ends at the 18:00 departure
        assert_relative_eq!(pen, 0.25, epsilon = 1e-12);
    }

    #[test]
    fn grid_follows_power_balance() {
        let mut env = make_env();
        let day = env.dataset().eligible_days(false)[0];
        env.reset(day, RunMode::Train, None).unwrap();
        for _ in 0..24 {
            let t = env.step(Action::new(0.5, 0.5, 0.0, 0.8)).unwrap();
            let load = t.state.production_load + t.state.office_load;
            let residual = t.grid_kw
                - (load + t.controls.hvac.power + t.controls.ess_kw + t.controls.ev_kw
                    - t.state.pv_energy);
            assert!(residual.abs() < 1e-9, "residual {residual}");
        }
    }

    #[test]
    fn normalize_state_endpoints() {
        let ds = synthesize(&SynthConfig::default());
        let stats = crate::data::compute_norm_stats(
            &ds,
            22.0,
            (20.0, 24.0),
            (0.2, 1.0),
            (0.2, 1.0),
        )
        .unwrap();
        let state = EnvState {
            production_load: stats.min[channel::PRODUCTION_LOAD],
            office_load: stats.max[channel::OFFICE_LOAD] + 100.0,
            baseline_load: stats.min[channel::BASELINE_LOAD],
            outdoor_temp: stats.max[channel::OUTDOOR_TEMP],
            indoor_temp: 22.0,
            pv_energy: 0.0,
            price: 0.3,
            soc_ess: 0.2,
            soc_ev: 1.0,
        };
        let v = normalize_state(&state, &stats);
        assert_eq!(v[channel::PRODUCTION_LOAD], 0.0);
        assert_eq!(v[channel::OFFICE_LOAD], 1.0); // clamped
        assert_eq!(v[channel::OUTDOOR_TEMP], 1.0);
        assert_eq!(v[channel::SOC_ESS], 0.0);
        assert_eq!(v[channel::SOC_EV], 1.0);
        assert!(v.iter().all(|x| (0.0..=1.0).contains(x)));
    }

    #[test]
    fn deterministic_trajectories() {
        let actions: Vec<Action> = (0..24)
            .map(|i| {
                let x = (i as f64) / 24.0;
                Action::new(x.sin(), -x, 2.0 * x - 1.0, x.cos())
            })
            .collect();
        let run = || {
            let mut env = make_env();
            let day = env.dataset().eligible_days(false)[0];
            env.reset(day, RunMode::Train, None).unwrap();
            actions
                .iter()
                .map(|a| env.step(*a).unwrap().reward)
                .collect::<Vec<_>>()
        };
        let a = run();
        let b = run();
        assert_eq!(a, b); // bit-identical
    }
}
