//! Policy abstraction and the chained daily rollout used for evaluation.
//!
//! Every strategy — learned or rule-based — emits raw actions through the
//! same [`ParkEnv`] mapping and settlement, so ledgers are directly
//! comparable. Evaluation chains consecutive days, carrying the ESS SoC and
//! indoor temperature across midnight.

use std::io::Write;
use std::path::Path;

use chrono::NaiveDate;

use crate::data::TIMESTAMP_FMT;
use crate::economics::CostBreakdown;
use crate::env::{Action, EnvError, EnvState, ParkEnv, RunMode, SlotContext, Transition};

/// A dispatch strategy: observes the state (plus day-ahead context) and
/// returns a raw action.
pub trait Policy {
    fn act(&self, state: &EnvState, ctx: &SlotContext) -> Action;
    /// Short name used in reports and file names.
    fn name(&self) -> &'static str;
}

/// Result of rolling a policy over a sequence of days.
#[derive(Debug, Clone)]
pub struct RolloutResult {
    pub transitions: Vec<Transition>,
    /// Per-day ledger totals, in rollout order.
    pub day_totals: Vec<(NaiveDate, CostBreakdown)>,
    /// Whole-period ledger total.
    pub total: CostBreakdown,
    /// Sum of rewards over the period (after the global divisor).
    pub reward_sum: f64,
}

/// Rolls `policy` over `days` in order with SoC/temperature carry-over.
/// Days must satisfy the baseline-history precondition.
pub fn rollout_chained(
    env: &mut ParkEnv,
    policy: &dyn Policy,
    days: &[usize],
) -> Result<RolloutResult, EnvError> {
    let mut transitions = Vec::with_capacity(days.len() * 24);
    let mut day_totals = Vec::with_capacity(days.len());
    let mut total = CostBreakdown::default();
    let mut reward_sum = 0.0;
    let mut carry = None;

    for &day in days {
        let mut state = env.reset(day, RunMode::Eval, carry)?;
        let mut day_total = CostBreakdown::default();
        while !env.is_done() {
            let ctx = env.slot_context();
            let action = policy.act(&state, &ctx);
            let t = env.step(action)?;
            day_total.accumulate(&t.breakdown);
            reward_sum += t.reward;
            state = t.next_state;
            transitions.push(t);
        }
        total.accumulate(&day_total);
        day_totals.push((env.dataset().date(day), day_total));
        carry = Some(env.carry_out());
    }

    Ok(RolloutResult {
        transitions,
        day_totals,
        total,
        reward_sum,
    })
}

/// Writes the per-slot trace: timestamp, the nine observed channels, the
/// four raw actions, the four physical controls, grid power, the six ledger
/// terms, reward, and the done flag.
pub fn write_trace_csv(
    env: &ParkEnv,
    transitions: &[Transition],
    path: &Path,
) -> std::io::Result<()> {
    let mut out = String::from(
        "timestamp,production_load_kwh,office_load_kwh,baseline_load_kwh,outdoor_temp_c,\
         indoor_temp_c,pv_kwh,price_rmb_per_kwh,soc_ess,soc_ev,\
         raw_ess,raw_ev,raw_rdis,raw_hvac,\
         ess_kw,ev_kw,r_dis,hvac_kw,grid_kw,\
         dr_revenue_rmb,grid_cost_rmb,carbon_cost_rmb,deg_cost_rmb,temp_penalty_c,soc_penalty,\
         reward,done\n",
    );
    for t in transitions {
        let ts = env.dataset().timestamps[t.slot].format(TIMESTAMP_FMT);
        let s = &t.state;
        let b = &t.breakdown;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            ts,
            s.production_load,
            s.office_load,
            s.baseline_load,
            s.outdoor_temp,
            s.indoor_temp,
            s.pv_energy,
            s.price,
            s.soc_ess,
            s.soc_ev,
            t.action.raw_ess,
            t.action.raw_ev,
            t.action.raw_rdis,
            t.action.raw_hvac,
            t.controls.ess_kw,
            t.controls.ev_kw,
            t.controls.r_dis,
            t.controls.hvac.power,
            t.grid_kw,
            b.dr_revenue,
            b.grid_cost,
            b.carbon_cost,
            b.deg_cost,
            b.temp_penalty,
            b.soc_penalty,
            t.reward,
            u8::from(t.done),
        ));
    }
    let mut f = std::fs::File::create(path)?;
    f.write_all(out.as_bytes())
}

/// Writes the per-day ledger plus a final `total` row.
pub fn write_breakdown_csv(result: &RolloutResult, path: &Path) -> std::io::Result<()> {
    let mut out = String::from(
        "date,dr_revenue_rmb,grid_cost_rmb,carbon_cost_rmb,deg_cost_rmb,\
         temp_penalty_c,soc_penalty,total_cost_rmb\n",
    );
    let mut push_row = |label: &str, b: &CostBreakdown| {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            label,
            b.dr_revenue,
            b.grid_cost,
            b.carbon_cost,
            b.deg_cost,
            b.temp_penalty,
            b.soc_penalty,
            b.total_cost()
        ));
    };
    for (date, b) in &result.day_totals {
        push_row(&date.format("%Y-%m-%d").to_string(), b);
    }
    push_row("total", &result.total);
    let mut f = std::fs::File::create(path)?;
    f.write_all(out.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::NoDispatchPolicy;
    use crate::data::synth::{synthesize, SynthConfig};
    use crate::env::{EnvSpecs, EpisodeConfig};
    use approx::assert_relative_eq;
    use std::sync::Arc;

    fn env() -> ParkEnv {
        let ds = Arc::new(synthesize(&SynthConfig::default()));
        ParkEnv::new(ds, crate::env::tests::test_specs(), EpisodeConfig::default())
    }

    fn specs() -> EnvSpecs {
        crate::env::tests::test_specs()
    }

    #[test]
    fn day_totals_sum_to_period_total() {
        let mut env = env();
        let days: Vec<usize> = env.dataset().eligible_days(false)[..5].to_vec();
        let policy = NoDispatchPolicy::new(specs().hvac.clone());
        let r = rollout_chained(&mut env, &policy, &days).unwrap();
        assert_eq!(r.transitions.len(), days.len() * 24);
        let summed: f64 = r.day_totals.iter().map(|(_, b)| b.grid_cost).sum();
        assert_relative_eq!(summed, r.total.grid_cost, epsilon = 1e-9);
    }

    #[test]
    fn carry_over_preserves_soc_and_temperature() {
        let mut env = env();
        let days: Vec<usize> = env.dataset().eligible_days(false)[..2].to_vec();
        let policy = NoDispatchPolicy::new(specs().hvac.clone());
        let r = rollout_chained(&mut env, &policy, &days).unwrap();
        let last_of_day1 = &r.transitions[23];
        let first_of_day2 = &r.transitions[24];
        assert_eq!(first_of_day2.state.soc_ess, last_of_day1.next_state.soc_ess);
        assert_eq!(
            first_of_day2.state.indoor_temp,
            last_of_day1.next_state.indoor_temp
        );
    }

    #[test]
    fn trace_and_breakdown_files_have_expected_shape() {
        let dir = tempfile::tempdir().unwrap();
        let mut env = env();
        let days: Vec<usize> = env.dataset().eligible_days(false)[..2].to_vec();
        let policy = NoDispatchPolicy::new(specs().hvac.clone());
        let r = rollout_chained(&mut env, &policy, &days).unwrap();

        let trace = dir.path().join("trace.csv");
        write_trace_csv(&env, &r.transitions, &trace).unwrap();
        let text = std::fs::read_to_string(&trace).unwrap();
        assert_eq!(text.lines().count(), 1 + 48);
        assert_eq!(text.lines().next().unwrap().split(',').count(), 27);

        let breakdown = dir.path().join("cost_breakdown.csv");
        write_breakdown_csv(&r, &breakdown).unwrap();
        let text = std::fs::read_to_string(&breakdown).unwrap();
        assert_eq!(text.lines().count(), 1 + 2 + 1); // header, 2 days, total
        assert!(text.lines().last().unwrap().starts_with("total,"));
    }
}
