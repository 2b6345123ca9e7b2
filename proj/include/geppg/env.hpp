#ifndef GEPPG_ENV_HPP
#define GEPPG_ENV_HPP

#include "geppg/common.hpp"
#include "geppg/rng.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace geppg {

/// One (state, action, reward, next state, terminal) sample. The action is
/// the one actually applied, i.e. after clipping to the action bounds.
struct Transition {
    VectorXd state;
    VectorXd action;
    double reward = 0.0;
    VectorXd next_state;
    bool terminal = false;
    bool goal_reached = false;
};

struct Trajectory {
    std::vector<Transition> transitions;
    double episode_return = 0.0;
    bool goal_reached = false;

    Index length() const { return static_cast<Index>(transitions.size()); }
    bool empty() const { return transitions.empty(); }
};

struct EnvStep {
    VectorXd observation;
    VectorXd applied_action;
    double reward = 0.0;
    bool terminal = false;
    bool goal_reached = false;
};

/// Episodic continuous-control environment. Instances are single-owner.
class Environment {
public:
    virtual ~Environment() = default;

    virtual std::string name() const = 0;
    /// Stable text describing everything that changes the dynamics or reward.
    virtual std::string fingerprint() const = 0;

    virtual Index observation_dim() const = 0;
    virtual Index action_dim() const = 0;
    virtual VectorXd observation_low() const = 0;
    virtual VectorXd observation_high() const = 0;
    virtual Index max_episode_steps() const = 0;

    virtual VectorXd reset(Rng& rng) = 0;
    virtual EnvStep step(const VectorXd& action) = 0;
    virtual Index steps_taken() const = 0;

    virtual std::unique_ptr<Environment> clone() const = 0;
};

using Policy = std::function<VectorXd(const VectorXd&)>;

/// Resets `env` from `rng` and runs `policy` until the episode terminates or
/// `max_steps` is reached. Throws NumericError if the policy emits a
/// non-finite action.
Trajectory rollout(Environment& env, const Policy& policy, Index max_steps, Rng& rng);

/// Creates an environment by name ("cmc" or "continuous_mountain_car").
std::unique_ptr<Environment> make_environment(const std::string& name);

} // namespace geppg

#endif
