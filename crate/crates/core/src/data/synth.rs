//! Seeded synthetic dataset generator for desk-scale experiments.
//!
//! Profiles are deliberately simple but carry the features the dispatch
//! problem needs: a pronounced time-of-use price spread, a daytime PV bell,
//! working/non-working load patterns, a diurnal temperature swing that keeps
//! the comfort band reachable at rated HVAC power, a weekday EV presence
//! window, and a daily evening DR event on working days.

use chrono::{Datelike, Duration, NaiveDate, Weekday};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{DayType, DrEvent, EvWindow, ParkDataset};
use crate::economics::HOURS_PER_DAY;
use rand::SeedableRng;

/// Knobs for the generator. The defaults produce a 43-day horizon whose
/// final 30 days (a full September) all satisfy the baseline-history
/// precondition, working or not.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthConfig {
    pub start_date: NaiveDate,
    pub days: usize,
    pub seed: u64,
    /// Clear-sky PV peak, kW.
    pub pv_peak: f64,
    /// Peak production load on working days, kWh per slot.
    pub production_peak: f64,
    /// DR invitation size, kWh.
    pub dr_invited: f64,
    /// DR unit compensation price, RMB/kWh.
    pub dr_price: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            start_date: NaiveDate::from_ymd_opt(2024, 8, 19).unwrap(),
            days: 43,
            seed: 42,
            pv_peak: 180.0,
            production_peak: 266.0,
            dr_invited: 100.0,
            dr_price: 4.0,
        }
    }
}

/// Fixed time-of-use tariff, RMB/kWh, by hour of day.
pub fn tou_price(hour: usize) -> f64 {
    match hour {
        0..=6 => 0.30,
        7..=9 => 0.75,
        10..=11 => 1.20,
        12..=16 => 0.75,
        17..=20 => 1.20,
        _ => 0.45,
    }
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Builds the full synthetic dataset. Deterministic in the seed.
pub fn synthesize(cfg: &SynthConfig) -> ParkDataset {
    assert!(cfg.days > 0, "need at least one day");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let slots = cfg.days * HOURS_PER_DAY;

    let mut timestamps = Vec::with_capacity(slots);
    let mut production = Vec::with_capacity(slots);
    let mut office = Vec::with_capacity(slots);
    let mut pv = Vec::with_capacity(slots);
    let mut price = Vec::with_capacity(slots);
    let mut temp = Vec::with_capacity(slots);
    let mut day_types = Vec::with_capacity(cfg.days);
    let mut ev_days = Vec::with_capacity(cfg.days);
    let mut dr_events = Vec::new();

    let start = cfg.start_date.and_hms_opt(0, 0, 0).unwrap();
    for day in 0..cfg.days {
        let date = cfg.start_date + Duration::days(day as i64);
        let working = !matches!(date.weekday(), Weekday::Sat | Weekday::Sun);
        day_types.push(if working {
            DayType::Working
        } else {
            DayType::NonWorking
        });

        // Per-day slow variation: cloud cover and a temperature offset.
        let cloud: f64 = 0.65 + 0.35 * rng.random::<f64>();
        let temp_offset = 1.2 * gaussian(&mut rng);

        for hour in 0..HOURS_PER_DAY {
            timestamps.push(start + Duration::hours((day * HOURS_PER_DAY + hour) as i64));

            let pro = if working {
                // Shift-hours bell centred early afternoon, peak ~production_peak.
                let shape = if (7..=18).contains(&hour) {
                    let x = (hour as f64 - 7.0) / 11.0 * std::f64::consts::PI;
                    x.sin().powf(1.2)
                } else {
                    0.0
                };
                70.0 + (cfg.production_peak - 70.0) * shape
            } else {
                55.0
            };
            let pro_noise = 1.0 + 0.04 * gaussian(&mut rng);
            production.push((pro * pro_noise).max(0.0));

            let off = if working && (8..=18).contains(&hour) {
                60.0
            } else {
                12.0
            };
            let off_noise = 1.0 + 0.05 * gaussian(&mut rng);
            office.push((off * off_noise).max(0.0));

            let clear_sky = if (6..18).contains(&hour) {
                let x = (hour as f64 - 6.0) / 12.0 * std::f64::consts::PI;
                cfg.pv_peak * x.sin().powf(1.5)
            } else {
                0.0
            };
            pv.push((clear_sky * cloud).max(0.0));

            price.push(tou_price(hour));

            // Diurnal swing: coolest near 03:00, hottest near 15:00.
            let swing = 4.5 * (std::f64::consts::TAU * (hour as f64 - 15.0) / 24.0).cos();
            temp.push(25.5 + swing + temp_offset + 0.3 * gaussian(&mut rng));
        }

        if working {
            ev_days.push(Some(EvWindow {
                arrival_hour: 8,
                departure_hour: 18,
                arrival_soc: 0.35,
            }));
            dr_events.push(DrEvent {
                start_slot: day * HOURS_PER_DAY + 17,
                end_slot: day * HOURS_PER_DAY + 18,
                invited_load: cfg.dr_invited,
                unit_price: cfg.dr_price,
            });
        } else {
            ev_days.push(None);
        }
    }

    ParkDataset {
        timestamps,
        production_load: production,
        office_load: office,
        pv_energy: pv,
        price,
        outdoor_temp: temp,
        day_types,
        ev_days,
        dr_events,
    }
}
