#ifndef GEPPG_CMC_HPP
#define GEPPG_CMC_HPP

#include "geppg/env.hpp"

namespace geppg::cmc {

inline constexpr double min_position = -1.2;
inline constexpr double max_position = 0.6;
inline constexpr double max_speed = 0.07;
inline constexpr double goal_position = 0.45;
inline constexpr double power = 0.0015;
inline constexpr double gravity = 0.0025;
inline constexpr double start_low = -0.6;
inline constexpr double start_high = -0.4;
inline constexpr double goal_reward = 100.0;
inline constexpr double action_cost = 0.1;
inline constexpr Index max_steps = 1000;

struct CmcState {
    double position = 0.0;
    double velocity = 0.0;
};

struct StepResult {
    CmcState next_state;
    double reward = 0.0;
    bool terminal = false;
    bool goal_reached = false;
    double applied_action = 0.0;
};

/// Start state: position uniform in [start_low, start_high], velocity zero.
CmcState reset(Rng& rng);

/// Advances the car by one step. `step_index` counts the steps already taken
/// in this episode; the episode ends after `max_steps` steps or at the goal.
/// Throws InputDomainError for a non-finite action.
StepResult step(const CmcState& state, double action, Index step_index);

} // namespace geppg::cmc

namespace geppg {

class ContinuousMountainCar final : public Environment {
public:
    std::string name() const override { return "continuous_mountain_car"; }
    std::string fingerprint() const override;

    Index observation_dim() const override { return 2; }
    Index action_dim() const override { return 1; }
    VectorXd observation_low() const override;
    VectorXd observation_high() const override;
    Index max_episode_steps() const override { return cmc::max_steps; }

    VectorXd reset(Rng& rng) override;
    EnvStep step(const VectorXd& action) override;
    Index steps_taken() const override { return steps_; }

    std::unique_ptr<Environment> clone() const override {
        return std::make_unique<ContinuousMountainCar>(*this);
    }

    const cmc::CmcState& state() const { return state_; }

private:
    cmc::CmcState state_;
    Index steps_ = 0;
    bool done_ = true;
};

} // namespace geppg

#endif
