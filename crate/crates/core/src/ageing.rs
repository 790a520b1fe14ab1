//! Empirical cycle-ageing models for LFP and NMC cells, the throughput-based
//! ageing-cost coefficient, and the per-step degradation cost.
//!
//! Unit convention: both loss laws are taken to yield *percent* of nominal
//! capacity (the fitted coefficients are calibrated on percent-scale data);
//! [`representative_cycle_calibration`] divides by 100 before converting the
//! loss into a cost coefficient. Temperature dependence is fixed at the
//! parameters' reference condition and not modelled.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{BatterySpec, Chemistry, DT_HOURS};

#[derive(Debug, Error, PartialEq)]
pub enum AgeingError {
    #[error("representative cycle has zero energy throughput")]
    ZeroThroughput,
}

/// Empirical cycle-ageing fit for LFP cells.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LfpParams {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
    pub z_cyc: f64,
}

impl Default for LfpParams {
    fn default() -> Self {
        LfpParams {
            a1: 0.0630,
            a2: 0.0971,
            a3: 4.0253,
            a4: 1.0923,
            z_cyc: 0.5,
        }
    }
}

/// Empirical cycle-ageing fit for NMC cells.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NmcParams {
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    /// Reference voltage, V.
    pub v0: f64,
    /// Average operating voltage, V.
    pub v_avg: f64,
    /// Initial cell capacity, Ah.
    pub c0: f64,
}

impl Default for NmcParams {
    fn default() -> Self {
        NmcParams {
            b1: 7.348e-3,
            b2: 7.60e-4,
            b3: 4.081e-3,
            v0: 3.667,
            v_avg: 3.7,
            c0: 2.05,
        }
    }
}

/// Both chemistry fits together.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct AgeingParams {
    pub lfp: LfpParams,
    pub nmc: NmcParams,
}

/// Representative-cycle settings for calibrating the ageing coefficient.
/// Defaults match the park's rated dispatch envelope: 100 kW on 400 kWh
/// (0.25 C), 0.8 depth of discharge, evaluated at the thousandth cycle.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CalibrationConfig {
    pub c_rate: f64,
    pub dod: f64,
    pub reference_efc: f64,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        CalibrationConfig {
            c_rate: 0.25,
            dod: 0.8,
            reference_efc: 1000.0,
        }
    }
}

impl CalibrationConfig {
    pub fn cycle_summary(&self) -> CycleSummary {
        CycleSummary {
            c_rate: self.c_rate,
            dod: self.dod,
            efc: self.reference_efc,
        }
    }
}

/// Operating point of a representative cycle family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleSummary {
    /// Charge/discharge rate relative to capacity, 1/h.
    pub c_rate: f64,
    /// Depth of discharge swung per cycle, fraction in (0, 1].
    pub dod: f64,
    /// Equivalent full cycles accumulated.
    pub efc: f64,
}

/// Ageing cost per kWh of throughput, RMB/kWh.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgeingCoefficient {
    pub value: f64,
}

/// LFP cycling capacity loss (percent of nominal):
/// `(a1*C + a2) * (a3*(DOD-0.6)^3 + a4) * EFC^z`.
pub fn lfp_capacity_loss(p: &LfpParams, c: &CycleSummary) -> f64 {
    let k_c = p.a1 * c.c_rate + p.a2;
    let k_d = p.a3 * (c.dod - 0.6).powi(3) + p.a4;
    k_c * k_d * c.efc.powf(p.z_cyc)
}

/// NMC cycling capacity loss (percent of nominal):
/// `b_cap(DOD) * sqrt(EFC * C0 * DOD)`.
pub fn nmc_capacity_loss(p: &NmcParams, c: &CycleSummary) -> f64 {
    let b_cap = p.b1 * (p.v_avg - p.v0).powi(2) + p.b2 + p.b3 * c.dod;
    let q_throughput = c.efc * p.c0 * c.dod;
    b_cap * q_throughput.sqrt()
}

/// Capacity loss of a cycle summary under the spec's chemistry.
pub fn capacity_loss(params: &AgeingParams, chemistry: Chemistry, c: &CycleSummary) -> f64 {
    match chemistry {
        Chemistry::Lfp => lfp_capacity_loss(&params.lfp, c),
        Chemistry::Nmc => nmc_capacity_loss(&params.nmc, c),
    }
}

/// Cost per kWh of throughput: `frac_loss * capacity / throughput * cost_per_kwh`.
pub fn ageing_coefficient(
    frac_loss: f64,
    capacity: f64,
    throughput: f64,
    cost_per_kwh: f64,
) -> Result<AgeingCoefficient, AgeingError> {
    if throughput <= 0.0 {
        return Err(AgeingError::ZeroThroughput);
    }
    Ok(AgeingCoefficient {
        value: frac_loss * capacity / throughput * cost_per_kwh,
    })
}

/// Per-step degradation cost of one battery: `alpha * |P| * dt`.
pub fn step_deg_cost(coeff: AgeingCoefficient, power: f64) -> f64 {
    coeff.value * power.abs() * DT_HOURS
}

/// Calibrates the ageing coefficient from one representative cycle family.
///
/// The marginal loss of one extra EFC at the reference cycle count is used
/// (the local slope of the degradation curve, which is what an incremental
/// dispatch decision actually costs), converted from percent to fraction.
/// Throughput per EFC is `2 * DOD * capacity`.
pub fn representative_cycle_calibration(
    params: &AgeingParams,
    spec: &BatterySpec,
    c: &CycleSummary,
    cost_per_kwh: f64,
) -> Result<AgeingCoefficient, AgeingError> {
    let at_ref = capacity_loss(params, spec.chemistry, c);
    let before = CycleSummary {
        efc: (c.efc - 1.0).max(0.0),
        ..*c
    };
    let marginal_percent = at_ref - capacity_loss(params, spec.chemistry, &before);
    let frac_loss = marginal_percent / 100.0;
    let throughput = 2.0 * c.dod * spec.capacity;
    ageing_coefficient(frac_loss, spec.capacity, throughput, cost_per_kwh)
}
