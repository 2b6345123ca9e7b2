#ifndef GEPPG_DDPG_HPP
#define GEPPG_DDPG_HPP

#include "geppg/controller.hpp"
#include "geppg/runlog.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace geppg::ddpg {

struct Batch {
    MatrixXd states;
    MatrixXd actions;
    VectorXd rewards;
    MatrixXd next_states;
    VectorXd terminals;

    Index size() const { return rewards.size(); }
};

/// Sliding-window replay memory; pushing beyond capacity evicts the oldest transition.
class ReplayBuffer {
public:
    ReplayBuffer(Index capacity, Index obs_dim, Index act_dim);

    void push(const Transition& t);
    void push_all(const std::vector<Transition>& ts) {
        for (const auto& t : ts) push(t);
    }

    /// i = 0 is the oldest stored transition.
    Transition at(Index i) const;
    /// `n` independent uniform draws with replacement.
    Batch sample(Index n, Rng& rng) const;

    Index size() const { return size_; }
    Index capacity() const { return capacity_; }
    bool empty() const { return size_ == 0; }
    Index observation_dim() const { return states_.rows(); }
    Index action_dim() const { return actions_.rows(); }

private:
    Index slot(Index i) const { return (head_ + i) % capacity_; }
    void grow_to(Index cols);

    Index capacity_;
    Index head_ = 0;
    Index size_ = 0;
    MatrixXd states_;
    MatrixXd actions_;
    MatrixXd next_states_;
    VectorXd rewards_;
    VectorXd terminals_;
};

enum class NoiseKind { none, ou, ou_decreasing, param };

std::string to_string(NoiseKind k);
NoiseKind noise_kind_from_string(const std::string& s);

struct NoiseConfig {
    NoiseKind kind = NoiseKind::ou;
    double ou_mu = 0.0;
    double ou_theta = 0.15;
    double ou_sigma = 0.3;
    /// Integration step of the OU process; 0.01 is the reference DDPG baseline's value.
    double ou_dt = 0.01;
    /// Starting sigma of the linearly decreasing schedule.
    double ou_sigma_start = 0.6;
    double param_sigma = 0.2;
    bool param_adaptive = false;
    double param_target_distance = 0.2;
    double param_adapt_factor = 1.01;
};

struct OuNoiseState {
    enum class Schedule { constant, linear_decreasing };

    VectorXd x;
    double mu = 0.0;
    double theta = 0.15;
    double sigma = 0.3;
    double dt = 1.0;
    Schedule schedule = Schedule::constant;
    /// Length of the linear schedule: sigma reaches zero at step total_steps - 1.
    Index total_steps = 1;
    Index step = 0;

    OuNoiseState() = default;
    OuNoiseState(Index dim, double mu_, double theta_, double sigma_, double dt_ = 1.0)
        : x(VectorXd::Constant(dim, mu_)), mu(mu_), theta(theta_), sigma(sigma_), dt(dt_) {}

    double sigma_at(Index t) const;
    void reset() { x.setConstant(mu); }
};

/// x <- x + theta (mu - x) dt + sigma_t sqrt(dt) N(0, 1), per dimension.
VectorXd ou_sample(OuNoiseState& state, Rng& rng);

struct ParamNoiseState {
    double sigma = 0.2;
    VectorXd perturbed;
};

/// Resamples the perturbed actor: actor + N(0, sigma^2) per coordinate.
const VectorXd& param_noise_refresh(ParamNoiseState& state, const VectorXd& actor_params, Rng& rng);

struct DdpgConfig {
    std::vector<Index> hidden = {64, 64};
    double gamma = 0.99;
    double tau = 0.001;
    Index batch_size = 64;
    double actor_lr = 1e-4;
    double critic_lr = 1e-3;
    Index buffer_capacity = 1'000'000;
    Index cycle_steps = 100;
    Index train_steps_per_cycle = 50;
    Index cycles_per_eval = 20;
    Index eval_episodes = 10;
    /// Feed the networks observations rescaled to [-1, 1] by the environment bounds (off: raw observations).
    bool scale_observations = false;
    bool learning_enabled = true;
};

class DdpgAgent {
public:
    DdpgAgent(const DdpgConfig& config, const Environment& env, Rng& init_rng);

    nn::MlpSpec actor_spec;
    nn::MlpSpec critic_spec;
    InputScaler scaler;
    VectorXd actor;
    VectorXd critic;
    VectorXd target_actor;
    VectorXd target_critic;
    nn::AdamState<double> actor_adam;
    nn::AdamState<double> critic_adam;
    double gamma;
    double tau;
    Index batch_size;

    VectorXd act(const VectorXd& observation) const { return act_with(actor, observation); }
    VectorXd act_with(const VectorXd& params, const VectorXd& observation) const;
    Controller controller() const { return {actor_spec, actor, scaler}; }
};

struct TrainResult {
    double critic_loss = 0.0;
    double actor_objective = 0.0;
};

/// One critic and one actor Adam step on `batch`, then soft target updates.
/// Both gradients are computed from the parameters before this step.
TrainResult train_step(DdpgAgent& agent, const Batch& batch);

/// target <- (1 - tau) target + tau online.
void soft_update(VectorXd& target, const VectorXd& online, double tau);

struct RunOptions {
    std::uint64_t seed = 0;
    /// Global env-step count at which this run starts (second phase of a two-phase run).
    Index start_step = 0;
    std::string phase = "ddpg";
    EvalHook eval_hook;
};

/**
 * Interleaves exploration and learning: `cycle_steps` noisy environment
 * steps pushed to `buffer`, then `train_steps_per_cycle` train steps once
 * the buffer holds a batch. Every `cycles_per_eval` cycles the clean actor is
 * evaluated offline and the record passed to `options.eval_hook`.
 *
 * `total_steps` must be a positive multiple of cycle_steps * cycles_per_eval.
 */
RunLog run_ddpg(Environment& env, DdpgAgent& agent, ReplayBuffer& buffer, const DdpgConfig& config,
                const NoiseConfig& noise, Index total_steps, const RunOptions& options);

/// Exploration loop only (no learning) for `episodes` complete episodes. Used
/// to fill a buffer with the DDPG behaviour policy under a zero learning rate.
RunLog explore_frozen(Environment& env, const DdpgAgent& agent, ReplayBuffer& buffer, const DdpgConfig& config,
                      const NoiseConfig& noise, Index episodes, std::uint64_t seed);

} // namespace geppg::ddpg

#endif
