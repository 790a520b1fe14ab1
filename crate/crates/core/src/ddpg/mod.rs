//! Deep deterministic policy gradient: actor-critic networks with manual
//! reverse-mode gradients, experience replay, OU exploration, target
//! networks with soft updates, a training loop, and greedy deployment.

pub mod adam;
pub mod mlp;
pub mod noise;
pub mod replay;

use std::path::Path;
use std::sync::Arc;

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{NormStats, ParkDataset, STATE_DIM};
use crate::env::{
    normalize_state, Action, EnvError, EnvSpecs, EnvState, EpisodeConfig, ParkEnv, RunMode,
    SlotContext, ACTION_DIM,
};
use crate::rollout::{rollout_chained, Policy, RolloutResult};
use adam::Adam;
use mlp::{Mlp, MlpGrads, OutputActivation};
use noise::OuNoise;
use replay::{ReplayBuffer, StoredTransition};

/// Checkpoint encoding version accepted by this build.
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum DdpgError {
    #[error("critic loss became non-finite ({loss}) at episode {episode}, update {update}")]
    NonFiniteLoss {
        episode: usize,
        update: usize,
        loss: f64,
    },
    #[error("gradient became non-finite at episode {episode}, update {update}")]
    NonFiniteGradient { episode: usize, update: usize },
    #[error("no day in the dataset satisfies the baseline-history precondition")]
    NoEligibleDays,
    #[error(transparent)]
    Env(#[from] EnvError),
}

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("checkpoint {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("checkpoint {path}: {source}")]
    Decode {
        path: String,
        source: serde_json::Error,
    },
    #[error("checkpoint {path}: format version {found} unsupported (expected {expected})")]
    UnsupportedVersion {
        path: String,
        found: u32,
        expected: u32,
    },
}

/// Training hyper-parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DdpgConfig {
    pub actor_lr: f64,
    pub critic_lr: f64,
    pub gamma: f64,
    pub tau: f64,
    pub batch_size: usize,
    pub buffer_capacity: usize,
    pub episodes: usize,
    pub hidden_layers: usize,
    pub hidden_units: usize,
    /// OU mean-reversion rate.
    pub ou_nu: f64,
    /// OU noise scale.
    pub ou_sigma: f64,
    /// Global gradient-norm clip; 0 disables clipping.
    pub grad_clip: f64,
}

impl Default for DdpgConfig {
    fn default() -> Self {
        DdpgConfig {
            actor_lr: 1e-4,
            critic_lr: 1e-3,
            gamma: 0.99,
            tau: 0.001,
            batch_size: 64,
            buffer_capacity: 1_000_000,
            episodes: 7_500,
            hidden_layers: 2,
            hidden_units: 256,
            ou_nu: 0.15,
            ou_sigma: 0.2,
            grad_clip: 0.0,
        }
    }
}

impl DdpgConfig {
    pub fn actor_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![STATE_DIM];
        sizes.extend(std::iter::repeat(self.hidden_units).take(self.hidden_layers));
        sizes.push(ACTION_DIM);
        sizes
    }

    pub fn critic_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![STATE_DIM + ACTION_DIM];
        sizes.extend(std::iter::repeat(self.hidden_units).take(self.hidden_layers));
        sizes.push(1);
        sizes
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(0.0 < self.gamma && self.gamma <= 1.0) {
            return Err(format!("gamma must be in (0,1], got {}", self.gamma));
        }
        if !(0.0 < self.tau && self.tau <= 1.0) {
            return Err(format!("tau must be in (0,1], got {}", self.tau));
        }
        if self.batch_size == 0 {
            return Err("batch_size must be >= 1".to_string());
        }
        if self.hidden_layers == 0 || self.hidden_units == 0 {
            return Err("networks need at least one hidden layer and unit".to_string());
        }
        Ok(())
    }
}

/// Online and target networks plus their optimizers.
pub struct DdpgAgent {
    pub actor: Mlp,
    pub critic: Mlp,
    pub target_actor: Mlp,
    pub target_critic: Mlp,
    actor_opt: Adam,
    critic_opt: Adam,
    cfg: DdpgConfig,
}

impl DdpgAgent {
    pub fn new<R: Rng>(cfg: DdpgConfig, rng: &mut R) -> Self {
        let actor = Mlp::new(&cfg.actor_sizes(), OutputActivation::Tanh, rng);
        let critic = Mlp::new(&cfg.critic_sizes(), OutputActivation::Linear, rng);
        let target_actor = actor.clone();
        let target_critic = critic.clone();
        let actor_opt = Adam::new(cfg.actor_lr, actor.num_params());
        let critic_opt = Adam::new(cfg.critic_lr, critic.num_params());
        DdpgAgent {
            actor,
            critic,
            target_actor,
            target_critic,
            actor_opt,
            critic_opt,
            cfg,
        }
    }

    pub fn config(&self) -> &DdpgConfig {
        &self.cfg
    }

    /// Greedy action for a normalized state.
    pub fn act(&self, state_norm: &[f64; STATE_DIM]) -> [f64; ACTION_DIM] {
        let out = self.actor.forward_one(state_norm);
        [out[0], out[1], out[2], out[3]]
    }

    fn clip(&self, grads: &mut MlpGrads) {
        if self.cfg.grad_clip > 0.0 {
            let norm = grads.global_norm();
            if norm > self.cfg.grad_clip {
                grads.scale(self.cfg.grad_clip / norm);
            }
        }
    }

    /// One critic descent step on the mean squared TD error. Returns the
    /// pre-step loss.
    pub fn critic_update(&mut self, batch: &Batch) -> Result<f64, NonFinite> {
        let b = batch.len() as f64;
        let y = td_targets_batch(
            &batch.rewards,
            &batch.dones,
            &batch.next_states,
            &self.target_actor,
            &self.target_critic,
            self.cfg.gamma,
        );
        let sa = concat_state_action(&batch.states, &batch.actions);
        let cache = self.critic.forward_cached(&sa);
        let q = cache.output();
        // loss = mean((q - y)^2); dL/dq = 2 (q - y) / B
        let mut loss = 0.0;
        let mut grad_out = Array2::zeros((batch.len(), 1));
        for i in 0..batch.len() {
            let diff = q[(i, 0)] - y[i];
            loss += diff * diff;
            grad_out[(i, 0)] = 2.0 * diff / b;
        }
        loss /= b;
        if !loss.is_finite() {
            return Err(NonFinite::Loss(loss));
        }
        let (mut grads, _) = self.critic.backward(&cache, &grad_out);
        if !grads.is_finite() {
            return Err(NonFinite::Gradient);
        }
        self.clip(&mut grads);
        let mut params = self.critic.flat_params();
        self.critic_opt.step(&mut params, &grads.to_flat());
        self.critic.set_flat_params(&params);
        Ok(loss)
    }

    /// One actor ascent step on `mean(Q(s, mu(s)))` with the critic held
    /// fixed: the critic's input gradient is sliced at the action columns
    /// and chained through the actor.
    pub fn actor_update(&mut self, states: &Array2<f64>) -> Result<(), NonFinite> {
        let b = states.nrows() as f64;
        let actor_cache = self.actor.forward_cached(states);
        let actions = actor_cache.output().clone();
        let sa = concat_state_action(states, &actions);
        let critic_cache = self.critic.forward_cached(&sa);
        // Ascend J = mean(Q)  <=>  descend -J; d(-J)/dQ = -1/B per sample.
        let grad_q = Array2::from_elem((states.nrows(), 1), -1.0 / b);
        let (_, grad_sa) = self.critic.backward(&critic_cache, &grad_q);
        let grad_actions = grad_sa.slice(ndarray::s![.., STATE_DIM..]).to_owned();
        let (mut grads, _) = self.actor.backward(&actor_cache, &grad_actions);
        if !grads.is_finite() {
            return Err(NonFinite::Gradient);
        }
        self.clip(&mut grads);
        let mut params = self.actor.flat_params();
        self.actor_opt.step(&mut params, &grads.to_flat());
        self.actor.set_flat_params(&params);
        Ok(())
    }

    /// Soft-updates both target networks toward their online twins.
    pub fn update_targets(&mut self) {
        self.target_critic.soft_update_from(&self.critic, self.cfg.tau);
        self.target_actor.soft_update_from(&self.actor, self.cfg.tau);
    }
}

/// Non-finite numeric failure inside an update.
#[derive(Debug, Clone, Copy)]
pub enum NonFinite {
    Loss(f64),
    Gradient,
}

/// Minibatch assembled from the replay buffer.
pub struct Batch {
    pub states: Array2<f64>,
    pub actions: Array2<f64>,
    pub rewards: Array1<f64>,
    pub next_states: Array2<f64>,
    pub dones: Vec<bool>,
}

impl Batch {
    pub fn len(&self) -> usize {
        self.states.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn from_buffer(buffer: &ReplayBuffer, indices: &[usize]) -> Self {
        let n = indices.len();
        let mut states = Array2::zeros((n, STATE_DIM));
        let mut actions = Array2::zeros((n, ACTION_DIM));
        let mut rewards = Array1::zeros(n);
        let mut next_states = Array2::zeros((n, STATE_DIM));
        let mut dones = Vec::with_capacity(n);
        for (row, &idx) in indices.iter().enumerate() {
            let t = buffer.get(idx);
            for c in 0..STATE_DIM {
                states[(row, c)] = t.state[c];
                next_states[(row, c)] = t.next_state[c];
            }
            for c in 0..ACTION_DIM {
                actions[(row, c)] = t.action[c];
            }
            rewards[row] = t.reward;
            dones.push(t.done);
        }
        Batch {
            states,
            actions,
            rewards,
            next_states,
            dones,
        }
    }
}

fn concat_state_action(states: &Array2<f64>, actions: &Array2<f64>) -> Array2<f64> {
    let n = states.nrows();
    let mut sa = Array2::zeros((n, STATE_DIM + ACTION_DIM));
    for i in 0..n {
        for c in 0..STATE_DIM {
            sa[(i, c)] = states[(i, c)];
        }
        for c in 0..ACTION_DIM {
            sa[(i, STATE_DIM + c)] = actions[(i, c)];
        }
    }
    sa
}

/// Bootstrapped target for one transition:
/// `y = r + gamma * (1 - d) * Q'(s', mu'(s'))`.
pub fn td_target(
    reward: f64,
    done: bool,
    next_state_norm: &[f64; STATE_DIM],
    target_actor: &Mlp,
    target_critic: &Mlp,
    gamma: f64,
) -> f64 {
    if done {
        return reward;
    }
    let next_action = target_actor.forward_one(next_state_norm);
    let mut sa = Vec::with_capacity(STATE_DIM + ACTION_DIM);
    sa.extend_from_slice(next_state_norm);
    sa.extend_from_slice(&next_action);
    reward + gamma * target_critic.forward_one(&sa)[0]
}

fn td_targets_batch(
    rewards: &Array1<f64>,
    dones: &[bool],
    next_states: &Array2<f64>,
    target_actor: &Mlp,
    target_critic: &Mlp,
    gamma: f64,
) -> Array1<f64> {
    let next_actions = target_actor.forward(next_states);
    let sa = concat_state_action(next_states, &next_actions);
    let q_next = target_critic.forward(&sa);
    Array1::from_shape_fn(rewards.len(), |i| {
        let mask = if dones[i] { 0.0 } else { 1.0 };
        rewards[i] + gamma * mask * q_next[(i, 0)]
    })
}

/// Versioned, self-describing snapshot of a trained policy.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolicyCheckpoint {
    pub format_version: u32,
    pub actor: Mlp,
    pub critic: Mlp,
    pub target_actor: Mlp,
    pub target_critic: Mlp,
    pub config: DdpgConfig,
    pub norm_stats: NormStats,
    pub episodes_trained: usize,
    pub seed: u64,
}

impl PolicyCheckpoint {
    pub fn save(&self, path: &Path) -> Result<(), CheckpointError> {
        let json = serde_json::to_string(self).map_err(|source| CheckpointError::Decode {
            path: path.display().to_string(),
            source,
        })?;
        std::fs::write(path, json).map_err(|source| CheckpointError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self, CheckpointError> {
        let text = std::fs::read_to_string(path).map_err(|source| CheckpointError::Io {
            path: path.display().to_string(),
            source,
        })?;
        // Peek the version first so unsupported files fail clearly.
        #[derive(Deserialize)]
        struct VersionOnly {
            format_version: u32,
        }
        let v: VersionOnly =
            serde_json::from_str(&text).map_err(|source| CheckpointError::Decode {
                path: path.display().to_string(),
                source,
            })?;
        if v.format_version != CHECKPOINT_VERSION {
            return Err(CheckpointError::UnsupportedVersion {
                path: path.display().to_string(),
                found: v.format_version,
                expected: CHECKPOINT_VERSION,
            });
        }
        serde_json::from_str(&text).map_err(|source| CheckpointError::Decode {
            path: path.display().to_string(),
            source,
        })
    }
}

/// One learning-curve row.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub episode: usize,
    pub steps: usize,
    pub mean_reward: f64,
    pub sum_reward: f64,
    pub critic_loss_mean: f64,
}

/// Training outputs: the checkpoint plus the per-episode curve.
pub struct TrainArtifacts {
    pub checkpoint: PolicyCheckpoint,
    pub curve: Vec<EpisodeRecord>,
}

/// Runs the full training loop: per step, act with OU-perturbed policy
/// (clamped to the action box), store the normalized transition, and once
/// the buffer reaches one batch perform a critic step, an actor step, and
/// soft target updates.
///
/// Episodes are single days sampled uniformly from the eligible set. The
/// seed fixes initialization, noise, day selection, and minibatch sampling.
pub fn train(
    dataset: Arc<ParkDataset>,
    specs: EnvSpecs,
    episode_cfg: EpisodeConfig,
    cfg: DdpgConfig,
    stats: NormStats,
    seed: u64,
) -> Result<TrainArtifacts, DdpgError> {
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let mut init_rng = ChaCha8Rng::seed_from_u64(master.random());
    let mut noise_rng = ChaCha8Rng::seed_from_u64(master.random());
    let mut sample_rng = ChaCha8Rng::seed_from_u64(master.random());
    let mut day_rng = ChaCha8Rng::seed_from_u64(master.random());

    let mut agent = DdpgAgent::new(cfg.clone(), &mut init_rng);
    let mut buffer = ReplayBuffer::new(cfg.buffer_capacity);
    let mut noise = OuNoise::new(cfg.ou_nu, cfg.ou_sigma);
    let mut env = ParkEnv::new(dataset, specs, episode_cfg);

    let eligible = env
        .dataset()
        .eligible_days(env.specs().exclude_dr_days_from_baseline);
    if eligible.is_empty() {
        return Err(DdpgError::NoEligibleDays);
    }

    let mut curve = Vec::with_capacity(cfg.episodes);
    let mut updates_done = 0usize;

    for episode in 0..cfg.episodes {
        let day = eligible[day_rng.random_range(0..eligible.len())];
        let mut state = env.reset(day, RunMode::Train, None)?;
        noise.reset();

        let mut sum_reward = 0.0;
        let mut steps = 0usize;
        let mut loss_sum = 0.0;
        let mut loss_count = 0usize;

        while !env.is_done() {
            let s_norm = normalize_state(&state, &stats);
            let mut raw = agent.act(&s_norm);
            let n = noise.step(&mut noise_rng);
            for (a, dn) in raw.iter_mut().zip(n) {
                *a = (*a + dn).clamp(-1.0, 1.0);
            }
            let action = Action::from_array(raw);
            let transition = env.step(action)?;
            let next_norm = normalize_state(&transition.next_state, &stats);
            buffer.push(StoredTransition {
                state: s_norm,
                action: raw,
                reward: transition.reward,
                next_state: next_norm,
                done: transition.done,
            });
            sum_reward += transition.reward;
            steps += 1;
            state = transition.next_state;

            if buffer.len() >= cfg.batch_size {
                let indices = buffer.sample_indices(&mut sample_rng, cfg.batch_size);
                let batch = Batch::from_buffer(&buffer, &indices);
                let loss = agent.critic_update(&batch).map_err(|nf| match nf {
                    NonFinite::Loss(loss) => DdpgError::NonFiniteLoss {
                        episode,
                        update: updates_done,
                        loss,
                    },
                    NonFinite::Gradient => DdpgError::NonFiniteGradient {
                        episode,
                        update: updates_done,
                    },
                })?;
                agent.actor_update(&batch.states).map_err(|_| {
                    DdpgError::NonFiniteGradient {
                        episode,
                        update: updates_done,
                    }
                })?;
                agent.update_targets();
                updates_done += 1;
                loss_sum += loss;
                loss_count += 1;
            }
        }

        curve.push(EpisodeRecord {
            episode,
            steps,
            mean_reward: sum_reward / steps.max(1) as f64,
            sum_reward,
            critic_loss_mean: if loss_count > 0 {
                loss_sum / loss_count as f64
            } else {
                0.0
            },
        });
    }

    Ok(TrainArtifacts {
        checkpoint: PolicyCheckpoint {
            format_version: CHECKPOINT_VERSION,
            actor: agent.actor,
            critic: agent.critic,
            target_actor: agent.target_actor,
            target_critic: agent.target_critic,
            config: cfg,
            norm_stats: stats,
            episodes_trained: curve.len(),
            seed,
        },
        curve,
    })
}

/// Greedy wrapper over a trained actor; normalizes with the stats baked
/// into the checkpoint.
pub struct ActorPolicy {
    actor: Mlp,
    stats: NormStats,
}

impl ActorPolicy {
    pub fn from_checkpoint(ckpt: &PolicyCheckpoint) -> Self {
        ActorPolicy {
            actor: ckpt.actor.clone(),
            stats: ckpt.norm_stats.clone(),
        }
    }
}

impl Policy for ActorPolicy {
    fn act(&self, state: &EnvState, _ctx: &SlotContext) -> Action {
        let s = normalize_state(state, &self.stats);
        let out = self.actor.forward_one(&s);
        Action::from_array([out[0], out[1], out[2], out[3]])
    }

    fn name(&self) -> &'static str {
        "ddpg"
    }
}

/// Greedy rollout of a checkpointed policy over `days` with carry-over
/// (no exploration noise).
pub fn deploy(
    ckpt: &PolicyCheckpoint,
    env: &mut ParkEnv,
    days: &[usize],
) -> Result<RolloutResult, EnvError> {
    let policy = ActorPolicy::from_checkpoint(ckpt);
    rollout_chained(env, &policy, days)
}

/// Writes the learning curve CSV: `episode, steps, mean_reward, sum_reward,
/// critic_loss_mean`.
pub fn write_learning_curve(curve: &[EpisodeRecord], path: &Path) -> std::io::Result<()> {
    let mut out = String::from("episode,steps,mean_reward,sum_reward,critic_loss_mean\n");
    for r in curve {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.episode, r.steps, r.mean_reward, r.sum_reward, r.critic_loss_mean
        ));
    }
    std::fs::write(path, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn tiny_cfg() -> DdpgConfig {
        DdpgConfig {
            hidden_layers: 2,
            hidden_units: 16,
            batch_size: 8,
            buffer_capacity: 256,
            episodes: 2,
            ..Default::default()
        }
    }

    #[test]
    fn td_target_terminal_ignores_bootstrap() {
        let cfg = tiny_cfg();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let agent = DdpgAgent::new(cfg, &mut rng);
        let y = td_target(
            1.0,
            true,
            &[0.5; STATE_DIM],
            &agent.target_actor,
            &agent.target_critic,
            0.99,
        );
        assert_eq!(y, 1.0);
    }

    #[test]
    fn td_target_bootstraps_with_gamma() {
        // Zero critic plus a bias gives Q' = 2 everywhere.
        let actor = Mlp::zeros(&[STATE_DIM, 4, ACTION_DIM], OutputActivation::Tanh);
        let mut critic = Mlp::zeros(&[STATE_DIM + ACTION_DIM, 4, 1], OutputActivation::Linear);
        let n = critic.num_params();
        let mut p = vec![0.0; n];
        p[n - 1] = 2.0; // output bias
        critic.set_flat_params(&p);
        let y = td_target(1.0, false, &[0.0; STATE_DIM], &actor, &critic, 0.99);
        assert_relative_eq!(y, 2.98, epsilon = 1e-12);
        let y0 = td_target(1.0, false, &[0.0; STATE_DIM], &actor, &critic, 0.0);
        assert_eq!(y0, 1.0);
    }

    #[test]
    fn critic_at_optimum_sees_zero_gradient() {
        // Critic == 0 everywhere, rewards 0, terminal transitions: targets
        // are exactly met, so the parameters must not move.
        let cfg = tiny_cfg();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut agent = DdpgAgent::new(cfg.clone(), &mut rng);
        agent.critic = Mlp::zeros(
            &[STATE_DIM + ACTION_DIM, 16, 16, 1],
            OutputActivation::Linear,
        );
        let before = agent.critic.param_hash();
        let n = 8;
        let batch = Batch {
            states: Array2::zeros((n, STATE_DIM)),
            actions: Array2::zeros((n, ACTION_DIM)),
            rewards: Array1::zeros(n),
            next_states: Array2::zeros((n, STATE_DIM)),
            dones: vec![true; n],
        };
        let loss = agent.critic_update(&batch).unwrap();
        assert_eq!(loss, 0.0);
        assert_eq!(agent.critic.param_hash(), before);
    }

    #[test]
    fn actor_unmoved_when_critic_ignores_action() {
        // A zero critic is constant in the action, so the policy gradient
        // vanishes and the actor parameters stay bit-identical.
        let cfg = tiny_cfg();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut agent = DdpgAgent::new(cfg, &mut rng);
        agent.critic = Mlp::zeros(
            &[STATE_DIM + ACTION_DIM, 16, 16, 1],
            OutputActivation::Linear,
        );
        let before = agent.actor.param_hash();
        let states = Array2::from_elem((8, STATE_DIM), 0.3);
        agent.actor_update(&states).unwrap();
        assert_eq!(agent.actor.param_hash(), before);
    }

    #[test]
    fn actor_converges_to_tent_critic_peak() {
        // Hand-built critic Q(s, a) = -|a0 - 0.3| (two ReLU units); repeated
        // actor updates must drive the first action channel to 0.3.
        let cfg = DdpgConfig {
            actor_lr: 0.01,
            hidden_layers: 1,
            hidden_units: 16,
            ..tiny_cfg()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut agent = DdpgAgent::new(cfg, &mut rng);
        let mut critic = Mlp::zeros(&[STATE_DIM + ACTION_DIM, 2, 1], OutputActivation::Linear);
        let mut p = vec![0.0; critic.num_params()];
        // hidden unit 0: relu(a0 - 0.3); unit 1: relu(0.3 - a0)
        let w0_len = 2 * (STATE_DIM + ACTION_DIM);
        p[STATE_DIM] = 1.0; // row 0, column of a0
        p[(STATE_DIM + ACTION_DIM) + STATE_DIM] = -1.0; // row 1
        p[w0_len] = -0.3; // bias 0
        p[w0_len + 1] = 0.3; // bias 1
        p[w0_len + 2] = -1.0; // output weights
        p[w0_len + 3] = -1.0;
        critic.set_flat_params(&p);
        agent.critic = critic;

        let states = Array2::from_elem((4, STATE_DIM), 0.5);
        for _ in 0..3000 {
            agent.actor_update(&states).unwrap();
        }
        let out = agent.actor.forward(&states);
        assert_relative_eq!(out[(0, 0)], 0.3, epsilon = 0.02);
    }

    #[test]
    fn actor_update_leaves_critic_untouched() {
        let cfg = tiny_cfg();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut agent = DdpgAgent::new(cfg, &mut rng);
        let critic_before = agent.critic.param_hash();
        let states = Array2::from_elem((8, STATE_DIM), 0.4);
        agent.actor_update(&states).unwrap();
        assert_eq!(agent.critic.param_hash(), critic_before);
        assert_ne!(agent.actor.param_hash(), {
            let mut rng = ChaCha8Rng::seed_from_u64(3);
            DdpgAgent::new(tiny_cfg(), &mut rng).actor.param_hash()
        });
    }
}
