#include "geppg/cmc.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace geppg::cmc {

CmcState reset(Rng& rng) {
    std::uniform_real_distribution<double> start(start_low, start_high);
    return CmcState{start(rng), 0.0};
}

StepResult step(const CmcState& state, double action, Index step_index) {
    if (!std::isfinite(action)) {
        throw InputDomainError("cmc::step: non-finite action");
    }
    const double a = std::clamp(action, -1.0, 1.0);

    double velocity = state.velocity + a * power - gravity * std::cos(3.0 * state.position);
    velocity = std::clamp(velocity, -max_speed, max_speed);
    double position = std::clamp(state.position + velocity, min_position, max_position);
    if (position == min_position && velocity < 0.0) velocity = 0.0;

    StepResult out;
    out.next_state = CmcState{position, velocity};
    out.goal_reached = position >= goal_position;
    out.reward = (out.goal_reached ? goal_reward : 0.0) - action_cost * a * a;
    out.terminal = out.goal_reached || step_index + 1 >= max_steps;
    out.applied_action = a;
    return out;
}

} // namespace geppg::cmc

namespace geppg {

std::string ContinuousMountainCar::fingerprint() const {
    std::ostringstream os;
    os.precision(17);
    os << "continuous_mountain_car"
       << ";pos=" << cmc::min_position << ',' << cmc::max_position
       << ";speed=" << cmc::max_speed << ";goal=" << cmc::goal_position
       << ";power=" << cmc::power << ";gravity=" << cmc::gravity
       << ";start=" << cmc::start_low << ',' << cmc::start_high
       << ";reward=" << cmc::goal_reward << ',' << cmc::action_cost
       << ";max_steps=" << cmc::max_steps;
    return os.str();
}

VectorXd ContinuousMountainCar::observation_low() const {
    return (VectorXd(2) << cmc::min_position, -cmc::max_speed).finished();
}

VectorXd ContinuousMountainCar::observation_high() const {
    return (VectorXd(2) << cmc::max_position, cmc::max_speed).finished();
}

VectorXd ContinuousMountainCar::reset(Rng& rng) {
    state_ = cmc::reset(rng);
    steps_ = 0;
    done_ = false;
    return (VectorXd(2) << state_.position, state_.velocity).finished();
}

EnvStep ContinuousMountainCar::step(const VectorXd& action) {
    if (done_) throw StateError("ContinuousMountainCar::step: episode finished, call reset()");
    if (action.size() != 1) throw InputDomainError("ContinuousMountainCar::step: action must have one entry");

    const cmc::StepResult r = cmc::step(state_, action[0], steps_);
    state_ = r.next_state;
    ++steps_;
    done_ = r.terminal;

    EnvStep out;
    out.observation = (VectorXd(2) << state_.position, state_.velocity).finished();
    out.applied_action = VectorXd::Constant(1, r.applied_action);
    out.reward = r.reward;
    out.terminal = r.terminal;
    out.goal_reached = r.goal_reached;
    return out;
}

Trajectory rollout(Environment& env, const Policy& policy, Index max_steps, Rng& rng) {
    if (max_steps < 1 || max_steps > env.max_episode_steps()) {
        throw InputDomainError("rollout: max_steps must lie in [1, max_episode_steps]");
    }
    Trajectory traj;
    traj.transitions.reserve(static_cast<std::size_t>(max_steps));

    VectorXd obs = env.reset(rng);
    for (Index t = 0; t < max_steps; ++t) {
        VectorXd action = policy(obs);
        if (!action.allFinite()) throw NumericError("rollout: policy produced a non-finite action");

        EnvStep s = env.step(action);
        const bool last = s.terminal || t + 1 == max_steps;
        traj.episode_return += s.reward;
        traj.goal_reached = traj.goal_reached || s.goal_reached;
        traj.transitions.push_back(Transition{std::move(obs), std::move(s.applied_action), s.reward,
                                              s.observation, s.terminal, s.goal_reached});
        obs = std::move(s.observation);
        if (last) break;
    }
    return traj;
}

std::unique_ptr<Environment> make_environment(const std::string& name) {
    if (name == "cmc" || name == "continuous_mountain_car") {
        return std::make_unique<ContinuousMountainCar>();
    }
    throw InputDomainError("unknown environment '" + name + "'");
}

} // namespace geppg
