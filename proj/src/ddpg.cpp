#include "geppg/ddpg.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace geppg::ddpg {

// ---------------------------------------------------------------------------
// Replay buffer

ReplayBuffer::ReplayBuffer(Index capacity, Index obs_dim, Index act_dim)
    : capacity_(capacity), states_(obs_dim, 0), actions_(act_dim, 0), next_states_(obs_dim, 0) {
    if (capacity < 1) throw InputDomainError("ReplayBuffer: capacity must be >= 1");
    if (obs_dim < 1 || act_dim < 1) throw InputDomainError("ReplayBuffer: dimensions must be >= 1");
}

void ReplayBuffer::grow_to(Index cols) {
    states_.conservativeResize(Eigen::NoChange, cols);
    actions_.conservativeResize(Eigen::NoChange, cols);
    next_states_.conservativeResize(Eigen::NoChange, cols);
    rewards_.conservativeResize(cols);
    terminals_.conservativeResize(cols);
}

void ReplayBuffer::push(const Transition& t) {
    if (t.state.size() != observation_dim() || t.next_state.size() != observation_dim() ||
        t.action.size() != action_dim()) {
        throw InputDomainError("ReplayBuffer::push: transition shape does not match the buffer");
    }
    if (!t.state.allFinite() || !t.next_state.allFinite() || !t.action.allFinite() || !std::isfinite(t.reward)) {
        throw InputDomainError("ReplayBuffer::push: non-finite transition");
    }

    Index col;
    if (size_ < capacity_) {
        col = slot(size_);
        if (col >= states_.cols()) grow_to(std::min(capacity_, std::max<Index>(1024, 2 * states_.cols())));
        ++size_;
    } else {
        col = head_;
        head_ = (head_ + 1) % capacity_;
    }
    states_.col(col) = t.state;
    actions_.col(col) = t.action;
    next_states_.col(col) = t.next_state;
    rewards_[col] = t.reward;
    terminals_[col] = t.terminal ? 1.0 : 0.0;
}

Transition ReplayBuffer::at(Index i) const {
    if (i < 0 || i >= size_) throw InputDomainError("ReplayBuffer::at: index out of range");
    const Index c = slot(i);
    return Transition{states_.col(c), actions_.col(c), rewards_[c], next_states_.col(c), terminals_[c] != 0.0, false};
}

Batch ReplayBuffer::sample(Index n, Rng& rng) const {
    if (size_ == 0) throw StateError("ReplayBuffer::sample: buffer is empty");
    if (n < 1) throw InputDomainError("ReplayBuffer::sample: batch size must be >= 1");

    std::uniform_int_distribution<Index> pick(0, size_ - 1);
    Batch b{MatrixXd(observation_dim(), n), MatrixXd(action_dim(), n), VectorXd(n), MatrixXd(observation_dim(), n),
            VectorXd(n)};
    for (Index j = 0; j < n; ++j) {
        const Index c = slot(pick(rng));
        b.states.col(j) = states_.col(c);
        b.actions.col(j) = actions_.col(c);
        b.rewards[j] = rewards_[c];
        b.next_states.col(j) = next_states_.col(c);
        b.terminals[j] = terminals_[c];
    }
    return b;
}

// ---------------------------------------------------------------------------
// Exploration noise

std::string to_string(NoiseKind k) {
    switch (k) {
    case NoiseKind::none: return "none";
    case NoiseKind::ou: return "ou";
    case NoiseKind::ou_decreasing: return "ou_decreasing";
    case NoiseKind::param: return "param";
    }
    return "?";
}

NoiseKind noise_kind_from_string(const std::string& s) {
    if (s == "none") return NoiseKind::none;
    if (s == "ou") return NoiseKind::ou;
    if (s == "ou_decreasing") return NoiseKind::ou_decreasing;
    if (s == "param") return NoiseKind::param;
    throw InputDomainError("unknown noise kind '" + s + "'");
}

double OuNoiseState::sigma_at(Index t) const {
    if (schedule == Schedule::constant) return sigma;
    if (total_steps <= 1) return 0.0;
    const double frac = static_cast<double>(std::clamp<Index>(t, 0, total_steps - 1)) /
                        static_cast<double>(total_steps - 1);
    return sigma * (1.0 - frac);
}

VectorXd ou_sample(OuNoiseState& state, Rng& rng) {
    const double s = state.sigma_at(state.step) * std::sqrt(state.dt);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Index i = 0; i < state.x.size(); ++i) {
        state.x[i] += state.theta * (state.mu - state.x[i]) * state.dt + s * normal(rng);
    }
    ++state.step;
    return state.x;
}

const VectorXd& param_noise_refresh(ParamNoiseState& state, const VectorXd& actor_params, Rng& rng) {
    state.perturbed = actor_params + gaussian_vector<double>(actor_params.size(), state.sigma, rng);
    return state.perturbed;
}

// ---------------------------------------------------------------------------
// Agent

namespace {

nn::MlpSpec make_spec(Index in, const std::vector<Index>& hidden, Index out, nn::Activation output) {
    nn::MlpSpec spec;
    spec.layer_sizes.push_back(in);
    spec.layer_sizes.insert(spec.layer_sizes.end(), hidden.begin(), hidden.end());
    spec.layer_sizes.push_back(out);
    spec.hidden = nn::Activation::relu;
    spec.output = output;
    spec.bias = true;
    spec.validate();
    return spec;
}

MatrixXd stack(const MatrixXd& top, const MatrixXd& bottom) {
    MatrixXd m(top.rows() + bottom.rows(), top.cols());
    m << top, bottom;
    return m;
}

} // namespace

DdpgAgent::DdpgAgent(const DdpgConfig& config, const Environment& env, Rng& init_rng)
    : actor_spec(make_spec(env.observation_dim(), config.hidden, env.action_dim(), nn::Activation::tanh)),
      critic_spec(make_spec(env.observation_dim() + env.action_dim(), config.hidden, 1, nn::Activation::linear)),
      scaler(config.scale_observations ? InputScaler::from_bounds(env.observation_low(), env.observation_high())
                                       : InputScaler::identity(env.observation_dim())),
      actor(nn::init_params<double>(actor_spec, init_rng)),
      critic(nn::init_params<double>(critic_spec, init_rng)),
      target_actor(actor),
      target_critic(critic),
      actor_adam(actor.size(), config.learning_enabled ? config.actor_lr : 0.0),
      critic_adam(critic.size(), config.learning_enabled ? config.critic_lr : 0.0),
      gamma(config.gamma),
      tau(config.tau),
      batch_size(config.batch_size) {}

VectorXd DdpgAgent::act_with(const VectorXd& params, const VectorXd& observation) const {
    return nn::forward<double>(actor_spec, params, scaler.apply(observation)).col(0);
}

void soft_update(VectorXd& target, const VectorXd& online, double tau) {
    if (!(tau >= 0.0 && tau <= 1.0)) throw InputDomainError("soft_update: tau must lie in [0, 1]");
    if (target.size() != online.size()) throw InputDomainError("soft_update: length mismatch");
    target = (1.0 - tau) * target + tau * online;
}

TrainResult train_step(DdpgAgent& agent, const Batch& batch) {
    const Index n = batch.size();
    if (n < 1) throw InputDomainError("train_step: empty batch");
    const double inv_n = 1.0 / static_cast<double>(n);

    const MatrixXd s = agent.scaler.apply(batch.states);
    const MatrixXd s_next = agent.scaler.apply(batch.next_states);

    // Bellman targets from the target networks.
    const MatrixXd a_next = nn::forward<double>(agent.actor_spec, agent.target_actor, s_next);
    const MatrixXd q_next = nn::forward<double>(agent.critic_spec, agent.target_critic, stack(s_next, a_next));
    const VectorXd y =
        batch.rewards + agent.gamma * (VectorXd::Ones(n) - batch.terminals).cwiseProduct(q_next.row(0).transpose());

    // Critic: mean squared TD error.
    nn::ForwardCache<double> critic_cache;
    const MatrixXd q = nn::forward<double>(agent.critic_spec, agent.critic, stack(s, batch.actions), &critic_cache);
    const MatrixXd diff = q - y.transpose();
    const double critic_loss = diff.squaredNorm() * inv_n;
    const VectorXd critic_grad =
        nn::backward<double>(agent.critic_spec, agent.critic, critic_cache, (2.0 * inv_n) * diff).params;

    // Actor: ascend Q(s, mu(s)) through the critic's action input.
    nn::ForwardCache<double> actor_cache;
    const MatrixXd mu = nn::forward<double>(agent.actor_spec, agent.actor, s, &actor_cache);
    nn::ForwardCache<double> q_mu_cache;
    const MatrixXd q_mu = nn::forward<double>(agent.critic_spec, agent.critic, stack(s, mu), &q_mu_cache);
    const double actor_objective = q_mu.mean();
    const MatrixXd dq_dinput =
        nn::backward<double>(agent.critic_spec, agent.critic, q_mu_cache, MatrixXd::Constant(1, n, -inv_n)).inputs;
    const VectorXd actor_grad =
        nn::backward<double>(agent.actor_spec, agent.actor, actor_cache, dq_dinput.bottomRows(mu.rows())).params;

    if (!std::isfinite(critic_loss) || !std::isfinite(actor_objective)) {
        throw NumericError("train_step: non-finite loss (critic " + std::to_string(critic_loss) + ", actor " +
                           std::to_string(actor_objective) + ")");
    }

    nn::adam_step<double>(agent.critic_adam, agent.critic, critic_grad);
    nn::adam_step<double>(agent.actor_adam, agent.actor, actor_grad);
    soft_update(agent.target_critic, agent.critic, agent.tau);
    soft_update(agent.target_actor, agent.actor, agent.tau);
    return {critic_loss, actor_objective};
}

// ---------------------------------------------------------------------------
// Exploration / training loop

namespace {

/// Behaviour-policy side of a DDPG run: owns the episode state and the noise processes.
class Explorer {
public:
    Explorer(Environment& env, const DdpgConfig& config, const NoiseConfig& noise, Index schedule_steps,
             std::uint64_t seed, Index start_step)
        : env_(env),
          config_(config),
          noise_(noise),
          env_rng_(make_stream(seed, Stream::env)),
          noise_rng_(make_stream(seed, Stream::noise)),
          start_step_(start_step) {
        ou_ = OuNoiseState(env.action_dim(), noise.ou_mu, noise.ou_theta, noise.ou_sigma, noise.ou_dt);
        if (noise.kind == NoiseKind::ou_decreasing) {
            ou_.sigma = noise.ou_sigma_start;
            ou_.schedule = OuNoiseState::Schedule::linear_decreasing;
            ou_.total_steps = schedule_steps;
        }
        param_.sigma = noise.param_sigma;
    }

    /// Called at the start of each cycle; refreshes the parameter perturbation.
    void begin_cycle(const DdpgAgent& agent, const ReplayBuffer& buffer) {
        if (noise_.kind != NoiseKind::param) return;
        if (noise_.param_adaptive && param_.perturbed.size() == agent.actor.size() &&
            buffer.size() >= config_.batch_size) {
            const Batch b = buffer.sample(config_.batch_size, noise_rng_);
            const MatrixXd s = agent.scaler.apply(b.states);
            const MatrixXd clean = nn::forward<double>(agent.actor_spec, agent.actor, s);
            const MatrixXd noisy = nn::forward<double>(agent.actor_spec, param_.perturbed, s);
            const double distance = std::sqrt((clean - noisy).squaredNorm() / static_cast<double>(clean.size()));
            if (distance > noise_.param_target_distance) {
                param_.sigma /= noise_.param_adapt_factor;
            } else {
                param_.sigma *= noise_.param_adapt_factor;
            }
        }
        param_noise_refresh(param_, agent.actor, noise_rng_);
    }

    /// One behaviour step; returns true when the episode ended.
    bool step(const DdpgAgent& agent, ReplayBuffer& buffer) {
        if (!episode_open_) {
            obs_ = env_.reset(env_rng_);
            ou_.reset();
            episode_open_ = true;
        }

        VectorXd action;
        switch (noise_.kind) {
        case NoiseKind::none: action = agent.act(obs_); break;
        case NoiseKind::ou:
        case NoiseKind::ou_decreasing: action = agent.act(obs_) + ou_sample(ou_, noise_rng_); break;
        case NoiseKind::param: action = agent.act_with(param_.perturbed, obs_); break;
        }
        if (!action.allFinite()) throw NumericError("ddpg: behaviour policy produced a non-finite action");
        action = action.cwiseMax(-1.0).cwiseMin(1.0);

        EnvStep s = env_.step(action);
        ++steps_;
        if (s.goal_reached && !first_goal_) first_goal_ = start_step_ + steps_;
        buffer.push(Transition{obs_, s.applied_action, s.reward, s.observation, s.terminal, s.goal_reached});
        obs_ = std::move(s.observation);
        if (s.terminal) episode_open_ = false;
        return s.terminal;
    }

    Index steps() const { return steps_; }
    std::optional<Index> first_goal() const { return first_goal_; }

private:
    Environment& env_;
    const DdpgConfig& config_;
    const NoiseConfig& noise_;
    Rng env_rng_;
    Rng noise_rng_;
    OuNoiseState ou_;
    ParamNoiseState param_;
    VectorXd obs_;
    bool episode_open_ = false;
    Index steps_ = 0;
    Index start_step_ = 0;
    std::optional<Index> first_goal_;
};

} // namespace

RunLog run_ddpg(Environment& env, DdpgAgent& agent, ReplayBuffer& buffer, const DdpgConfig& config,
                const NoiseConfig& noise, Index total_steps, const RunOptions& options) {
    const Index eval_period = config.cycle_steps * config.cycles_per_eval;
    if (total_steps < eval_period || total_steps % eval_period != 0) {
        throw InputDomainError("run_ddpg: total_steps must be a positive multiple of " + std::to_string(eval_period));
    }

    Explorer explorer(env, config, noise, total_steps, options.seed, options.start_step);
    Rng buffer_rng = make_stream(options.seed, Stream::buffer);
    const std::unique_ptr<Environment> eval_env = env.clone();

    RunLog log;
    const Index cycles = total_steps / config.cycle_steps;
    for (Index cycle = 1; cycle <= cycles; ++cycle) {
        explorer.begin_cycle(agent, buffer);
        for (Index i = 0; i < config.cycle_steps; ++i) explorer.step(agent, buffer);

        if (config.learning_enabled && buffer.size() >= config.batch_size) {
            for (Index i = 0; i < config.train_steps_per_cycle; ++i) {
                train_step(agent, buffer.sample(config.batch_size, buffer_rng));
                ++log.train_steps;
            }
        }

        if (cycle % config.cycles_per_eval == 0) {
            Rng eval_rng = make_stream(options.seed, Stream::eval, static_cast<std::uint64_t>(log.evals.size()));
            auto policy = std::make_shared<const Controller>(agent.controller());
            const EvaluationResult r = evaluate_controller(*eval_env, *policy, config.eval_episodes, eval_rng);

            EvalRecord rec;
            rec.env_step = options.start_step + explorer.steps();
            rec.mean_return = r.mean();
            rec.std_return = r.stddev();
            rec.episodes = config.eval_episodes;
            rec.returns = r.returns;
            rec.policy = std::move(policy);
            rec.phase = options.phase;
            if (options.eval_hook) options.eval_hook(rec);
            log.evals.push_back(std::move(rec));
        }
    }
    log.env_steps = explorer.steps();
    log.first_goal_step = explorer.first_goal();
    return log;
}

RunLog explore_frozen(Environment& env, const DdpgAgent& agent, ReplayBuffer& buffer, const DdpgConfig& config,
                      const NoiseConfig& noise, Index episodes, std::uint64_t seed) {
    if (episodes < 1) throw InputDomainError("explore_frozen: need at least one episode");
    Explorer explorer(env, config, noise, episodes * env.max_episode_steps(), seed, 0);

    Index finished = 0;
    while (finished < episodes) {
        explorer.begin_cycle(agent, buffer);
        for (Index i = 0; i < config.cycle_steps && finished < episodes; ++i) {
            if (explorer.step(agent, buffer)) ++finished;
        }
    }
    RunLog log;
    log.env_steps = explorer.steps();
    log.first_goal_step = explorer.first_goal();
    return log;
}

} // namespace geppg::ddpg
