//! Simulation and learning core for industrial-park energy management under
//! a tiered demand-response policy.
//!
//! The crate models PV supply, building thermal dynamics, and two
//! heterogeneous batteries with dispatch-level ageing costs; settles
//! demand-response revenue against a similar-day baseline; wraps everything
//! as a Markov decision process; trains a DDPG agent from scratch; and
//! provides three rule-based strategies for cost comparison.
//!
//! Modules follow the pipeline:
//!
//! * [`data`] - CSV ingestion, validation, baseline history, normalization
//!   statistics, and a seeded synthetic-dataset generator.
//! * [`dynamics`] - pure physics: thermal model, battery SoC updates with
//!   hard bounds, grid power balance.
//! * [`economics`] - DR settlement tiers, grid and carbon costs, comfort and
//!   EV-departure penalties.
//! * [`ageing`] - empirical LFP/NMC cycle-ageing laws and the throughput
//!   cost coefficient.
//! * [`env`] - the MDP environment: observation assembly, action mapping,
//!   stepping, reward composition.
//! * [`ddpg`] - the learner: MLPs with manual reverse-mode gradients, Adam,
//!   replay, OU noise, target networks, training and deployment.
//! * [`baselines`] - the rule-based comparison strategies.
//! * [`rollout`] - the policy trait, chained daily evaluation, and trace
//!   output.

pub mod ageing;
pub mod baselines;
pub mod data;
pub mod ddpg;
pub mod dynamics;
pub mod economics;
pub mod env;
pub mod rollout;

pub use ageing::{AgeingCoefficient, AgeingParams, CycleSummary, LfpParams, NmcParams};
pub use baselines::{BaselineKind, NoDispatchPolicy, RuleBasedDrPolicy, TouArbitragePolicy, TouThresholds};
pub use data::{DataPaths, DayType, DrEvent, EvWindow, NormStats, ParkDataset};
pub use ddpg::{DdpgConfig, PolicyCheckpoint};
pub use dynamics::{BatterySpec, BatteryState, Chemistry, HvacCommand, HvacMode, HvacSpec};
pub use economics::{CarbonSpec, CostBreakdown};
pub use env::{Action, CarryIn, EnvSpecs, EnvState, EpisodeConfig, ParkEnv, RewardWeights, RunMode};
pub use rollout::{Policy, RolloutResult};
