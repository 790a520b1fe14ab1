//! Deterministic state-transition physics: building thermal model, battery
//! SoC dynamics with hard bounds, and the grid power balance.
//!
//! All functions here are pure. With a 1-hour slot (`DT_HOURS = 1`), kW and
//! kWh are numerically interchangeable; everything runs in `f64`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Slot length in hours. The whole simulation is hourly.
pub const DT_HOURS: f64 = 1.0;

/// Tolerance for "a bound was violated by more than rounding".
pub const BOUND_TOL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum DynamicsError {
    /// `battery_step` received a power that violates a SoC or rated bound by
    /// more than [`BOUND_TOL`]. Powers must come through [`clamp_battery_power`].
    #[error("inadmissible battery power {power} kW: {reason}")]
    InadmissiblePower { power: f64, reason: String },
    #[error("slot {slot} out of range (dataset has {len} slots)")]
    SlotOutOfRange { slot: usize, len: usize },
}

/// Battery cell chemistry; selects the empirical ageing law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Chemistry {
    Lfp,
    Nmc,
}

/// Static HVAC and building-envelope parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HvacSpec {
    /// Coefficient of performance of the HVAC unit.
    pub efficiency_ratio: f64,
    /// Building thermal conductance, kW/degC.
    pub conductance: f64,
    /// Thermal inertia factor in [0, 1); larger keeps the room closer to its
    /// previous temperature.
    pub inertia: f64,
    /// Rated electrical power of the HVAC unit, kW.
    pub max_power: f64,
    /// Lower comfort bound, degC.
    pub comfort_min: f64,
    /// Upper comfort bound, degC.
    pub comfort_max: f64,
}

impl HvacSpec {
    /// Midpoint of the comfort band, used to derive the heat/cool mode.
    pub fn band_midpoint(&self) -> f64 {
        0.5 * (self.comfort_min + self.comfort_max)
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(0.0..1.0).contains(&self.inertia) {
            return Err(format!("inertia must be in [0,1), got {}", self.inertia));
        }
        if self.conductance <= 0.0 {
            return Err(format!("conductance must be > 0, got {}", self.conductance));
        }
        if self.efficiency_ratio <= 0.0 {
            return Err(format!(
                "efficiency_ratio must be > 0, got {}",
                self.efficiency_ratio
            ));
        }
        if self.max_power <= 0.0 {
            return Err(format!("max_power must be > 0, got {}", self.max_power));
        }
        if self.comfort_min >= self.comfort_max {
            return Err(format!(
                "comfort band empty: [{}, {}]",
                self.comfort_min, self.comfort_max
            ));
        }
        Ok(())
    }
}

/// HVAC operating mode. Heating adds heat, cooling removes it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HvacMode {
    Heat,
    Cool,
    Off,
}

impl HvacMode {
    /// Sign carried into the thermal model: +1 heat, -1 cool, 0 off.
    pub fn sign(self) -> f64 {
        match self {
            HvacMode::Heat => 1.0,
            HvacMode::Cool => -1.0,
            HvacMode::Off => 0.0,
        }
    }
}

/// One slot's HVAC command. `power` is the electrical magnitude in kW.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HvacCommand {
    pub mode: HvacMode,
    pub power: f64,
}

impl HvacCommand {
    pub fn off() -> Self {
        HvacCommand {
            mode: HvacMode::Off,
            power: 0.0,
        }
    }

    /// Builds a command, clamping power to `[0, max_power]` and forcing
    /// mode `Off` whenever the power is zero.
    pub fn new(mode: HvacMode, power: f64, spec: &HvacSpec) -> Self {
        let power = power.clamp(0.0, spec.max_power);
        if power == 0.0 || mode == HvacMode::Off {
            HvacCommand::off()
        } else {
            HvacCommand { mode, power }
        }
    }
}

/// Static battery parameters shared by the stationary store and the EV pack.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BatterySpec {
    pub chemistry: Chemistry,
    /// Total energy capacity, kWh.
    pub capacity: f64,
    /// Rated charge/discharge power magnitude, kW.
    pub rated_power: f64,
    /// Charging efficiency in (0, 1].
    pub charge_eff: f64,
    /// Discharging efficiency in (0, 1].
    pub discharge_eff: f64,
    /// Lowest admissible state of charge.
    pub soc_min: f64,
    /// Highest admissible state of charge.
    pub soc_max: f64,
    /// Energy lost per idle slot, kWh.
    pub standby_loss: f64,
    /// Procurement cost, RMB per kWh of capacity.
    pub procurement_cost: f64,
    /// Ageing cost per kWh of throughput, RMB/kWh.
    pub ageing_coeff: f64,
}

impl BatterySpec {
    pub fn validate(&self) -> Result<(), String> {
        if !(0.0 < self.charge_eff && self.charge_eff <= 1.0) {
            return Err(format!("charge_eff must be in (0,1], got {}", self.charge_eff));
        }
        if !(0.0 < self.discharge_eff && self.discharge_eff <= 1.0) {
            return Err(format!(
                "discharge_eff must be in (0,1], got {}",
                self.discharge_eff
            ));
        }
        if !(0.0 <= self.soc_min && self.soc_min < self.soc_max && self.soc_max <= 1.0) {
            return Err(format!(
                "SoC limits must satisfy 0 <= min < max <= 1, got [{}, {}]",
                self.soc_min, self.soc_max
            ));
        }
        if self.capacity <= 0.0 || self.rated_power <= 0.0 {
            return Err("capacity and rated_power must be > 0".to_string());
        }
        if self.standby_loss < 0.0 {
            return Err(format!("standby_loss must be >= 0, got {}", self.standby_loss));
        }
        if self.ageing_coeff < 0.0 {
            return Err(format!("ageing_coeff must be >= 0, got {}", self.ageing_coeff));
        }
        Ok(())
    }
}

/// Evolving battery state: just the state of charge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BatteryState {
    pub soc: f64,
}

/// Signed power flows for one slot. Charging and purchasing are positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerFlows {
    /// Grid exchange, kW; positive buys, negative sells.
    pub grid: f64,
    /// PV generation, kW.
    pub pv: f64,
    /// Production plus office load, kW.
    pub load: f64,
    /// HVAC electrical magnitude, kW.
    pub hvac: f64,
    /// Stationary battery, kW; positive charges.
    pub ess: f64,
    /// EV battery, kW; positive charges.
    pub ev: f64,
}

impl PowerFlows {
    /// Residual of the balance equation; zero up to rounding for flows built
    /// through [`grid_power`].
    pub fn balance_residual(&self) -> f64 {
        self.grid - (self.load + self.hvac + self.ess + self.ev - self.pv)
    }
}

/// Advances the indoor temperature by one slot under the first-order
/// building model: the room relaxes toward the outdoor temperature shifted
/// by the HVAC contribution `sign * eta * P / G`.
pub fn thermal_step(spec: &HvacSpec, t_in: f64, t_out: f64, cmd: &HvacCommand) -> f64 {
    let forcing = t_out
        + cmd.mode.sign() * spec.efficiency_ratio * cmd.power / spec.conductance;
    spec.inertia * t_in + (1.0 - spec.inertia) * forcing
}

/// Clips a requested battery power to the admissible range: rated power
/// first, then the SoC headroom bounds. Positive requests charge, negative
/// discharge; the sign is preserved (or the result is zero), so simultaneous
/// charge/discharge cannot occur.
pub fn clamp_battery_power(spec: &BatterySpec, state: &BatteryState, requested: f64) -> f64 {
    let rated = requested.clamp(-spec.rated_power, spec.rated_power);
    if rated > 0.0 {
        // Charging is limited by the energy headroom up to soc_max.
        let charge_cap = (spec.soc_max - state.soc).max(0.0) * spec.capacity
            / (spec.charge_eff * DT_HOURS);
        rated.min(charge_cap)
    } else if rated < 0.0 {
        // Discharging is limited by the energy above soc_min.
        let discharge_floor =
            (spec.soc_min - state.soc).min(0.0) * spec.capacity * spec.discharge_eff / DT_HOURS;
        rated.max(discharge_floor)
    } else {
        0.0
    }
}

/// Advances the SoC one slot under an already-admissible power. Charging
/// stores `P * dt * eta_c`; discharging draws `P * dt / eta_d`; idling pays
/// the standby loss, floored at `soc_min`.
pub fn battery_step(
    spec: &BatterySpec,
    state: &BatteryState,
    power: f64,
) -> Result<BatteryState, DynamicsError> {
    let soc = if power > 0.0 {
        state.soc + power * DT_HOURS * spec.charge_eff / spec.capacity
    } else if power < 0.0 {
        state.soc + power * DT_HOURS / (spec.capacity * spec.discharge_eff)
    } else {
        (state.soc - spec.standby_loss / spec.capacity).max(spec.soc_min)
    };
    if soc > spec.soc_max + BOUND_TOL || soc < spec.soc_min - BOUND_TOL {
        return Err(DynamicsError::InadmissiblePower {
            power,
            reason: format!(
                "would move SoC to {soc}, outside [{}, {}]",
                spec.soc_min, spec.soc_max
            ),
        });
    }
    Ok(BatteryState {
        soc: soc.clamp(spec.soc_min, spec.soc_max),
    })
}

/// Grid exchange that balances the park: load + HVAC + batteries - PV.
pub fn grid_power(load: f64, hvac: f64, ess: f64, ev: f64, pv: f64) -> f64 {
    load + hvac + ess + ev - pv
}

/// PV power available at a slot: the dataset value clipped to `[0, pv_max]`.
pub fn pv_available(pv_series: &[f64], slot: usize, pv_max: f64) -> Result<f64, DynamicsError> {
    let raw = pv_series
        .get(slot)
        .copied()
        .ok_or(DynamicsError::SlotOutOfRange {
            slot,
            len: pv_series.len(),
        })?;
    Ok(raw.clamp(0.0, pv_max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

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

    fn ess() -> BatterySpec {
        BatterySpec {
            chemistry: Chemistry::Lfp,
            capacity: 400.0,
            rated_power: 100.0,
            charge_eff: 0.95,
            discharge_eff: 0.95,
            soc_min: 0.2,
            soc_max: 1.0,
            standby_loss: 0.0,
            procurement_cost: 1000.0,
            ageing_coeff: 0.0,
        }
    }

    #[test]
    fn thermal_step_cooling() {
        let spec = hvac();
        let cmd = HvacCommand::new(HvacMode::Cool, 20.0, &spec);
        let next = thermal_step(&spec, 22.0, 30.0, &cmd);
        assert_relative_eq!(next, 22.0 + 2.0 / 3.0, epsilon = 1e-9);
    }

    #[test]
    fn thermal_step_off_drifts_to_outdoor() {
        let next = thermal_step(&hvac(), 22.0, 30.0, &HvacCommand::off());
        assert_relative_eq!(next, 23.2, epsilon = 1e-12);
    }

    #[test]
    fn thermal_step_fixed_point() {
        let next = thermal_step(&hvac(), 27.5, 27.5, &HvacCommand::off());
        assert_relative_eq!(next, 27.5, epsilon = 1e-12);
    }

    #[test]
    fn clamp_full_battery_rejects_charge() {
        let spec = ess();
        let state = BatteryState { soc: 1.0 };
        assert_eq!(clamp_battery_power(&spec, &state, 100.0), 0.0);
    }

    #[test]
    fn clamp_rated_power_binds_before_soc_bound() {
        // At SoC 0.5 the discharge bound is (0.2-0.5)*400*0.95 = -114 kW,
        // so the rated -100 kW binds first.
        let spec = ess();
        let state = BatteryState { soc: 0.5 };
        assert_eq!(clamp_battery_power(&spec, &state, -200.0), -100.0);
    }

    #[test]
    fn clamp_zero_is_identity() {
        let spec = ess();
        let state = BatteryState { soc: 0.5 };
        assert_eq!(clamp_battery_power(&spec, &state, 0.0), 0.0);
    }

    #[test]
    fn battery_step_charge() {
        let spec = ess();
        let next = battery_step(&spec, &BatteryState { soc: 0.5 }, 100.0).unwrap();
        assert_relative_eq!(next.soc, 0.7375, epsilon = 1e-12);
    }

    #[test]
    fn battery_step_discharge() {
        let spec = ess();
        let next = battery_step(&spec, &BatteryState { soc: 0.7375 }, -100.0).unwrap();
        assert_relative_eq!(next.soc, 0.474_342_105_263_157_9, epsilon = 1e-12);
    }

    #[test]
    fn battery_step_idle_without_standby_loss() {
        let spec = ess();
        let next = battery_step(&spec, &BatteryState { soc: 0.42 }, 0.0).unwrap();
        assert_eq!(next.soc, 0.42);
    }

    #[test]
    fn battery_step_idle_standby_loss_floors_at_min() {
        let mut spec = ess();
        spec.standby_loss = 200.0; // absurdly lossy on purpose
        let next = battery_step(&spec, &BatteryState { soc: 0.25 }, 0.0).unwrap();
        assert_eq!(next.soc, spec.soc_min);
    }

    #[test]
    fn battery_step_rejects_inadmissible_power() {
        let spec = ess();
        let err = battery_step(&spec, &BatteryState { soc: 0.99 }, 100.0).unwrap_err();
        assert!(matches!(err, DynamicsError::InadmissiblePower { .. }));
    }

    #[test]
    fn grid_power_examples() {
        assert_relative_eq!(grid_power(200.0, 20.0, 50.0, -30.0, 100.0), 140.0);
        assert_eq!(grid_power(0.0, 0.0, 0.0, 0.0, 0.0), 0.0);
        assert_eq!(grid_power(0.0, 0.0, 0.0, 0.0, 300.0), -300.0);
    }

    #[test]
    fn pv_available_clips_to_capacity() {
        let series = [0.0, 120.0, 180.0];
        assert_eq!(pv_available(&series, 1, 150.0).unwrap(), 120.0);
        assert_eq!(pv_available(&series, 2, 150.0).unwrap(), 150.0);
        assert_eq!(pv_available(&series, 0, 150.0).unwrap(), 0.0);
        assert!(matches!(
            pv_available(&series, 3, 150.0),
            Err(DynamicsError::SlotOutOfRange { .. })
        ));
    }

    #[test]
    fn hvac_command_zero_power_is_off() {
        let spec = hvac();
        let cmd = HvacCommand::new(HvacMode::Cool, 0.0, &spec);
        assert_eq!(cmd.mode, HvacMode::Off);
        let cmd = HvacCommand::new(HvacMode::Heat, 80.0, &spec);
        assert_eq!(cmd.power, 50.0);
    }
}
