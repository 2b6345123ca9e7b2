#ifndef GEPPG_CONTROLLER_HPP
#define GEPPG_CONTROLLER_HPP

#include "geppg/env.hpp"
#include "geppg/tinynet.hpp"

#include <filesystem>
#include <iosfwd>
#include <vector>

namespace geppg {

/// Fixed affine map x -> (x - offset) .* scale applied to observations before a network.
struct InputScaler {
    VectorXd offset;
    VectorXd scale;

    static InputScaler identity(Index n) { return {VectorXd::Zero(n), VectorXd::Ones(n)}; }

    /// Maps the box [low, high] onto [-1, 1].
    static InputScaler from_bounds(const VectorXd& low, const VectorXd& high);

    MatrixXd apply(const MatrixXd& x) const {
        return ((x.colwise() - offset).array().colwise() * scale.array()).matrix();
    }

    friend bool operator==(const InputScaler&, const InputScaler&) = default;
};

/// A deterministic policy: network spec, flat parameters and input scaling.
struct Controller {
    nn::MlpSpec spec;
    VectorXd params;
    InputScaler scaler;

    VectorXd act(const VectorXd& observation) const {
        return nn::forward<double>(spec, params, scaler.apply(observation)).col(0);
    }
    MatrixXd act_batch(const MatrixXd& observations) const {
        return nn::forward<double>(spec, params, scaler.apply(observations));
    }
    Policy policy() const {
        return [c = *this](const VectorXd& obs) { return c.act(obs); };
    }
};

void write_controller(std::ostream& os, const Controller& c);
Controller read_controller(std::istream& is);
void save_controller(const std::filesystem::path& path, const Controller& c);
Controller load_controller(const std::filesystem::path& path);

struct EvaluationResult {
    std::vector<double> returns;
    bool goal_reached = false;
    Index steps = 0;

    double mean() const;
    /// Population standard deviation of the episode returns.
    double stddev() const;
};

/// Noiseless evaluation of `controller` over `episodes` full episodes on
/// clones of `prototype`. Episodes run in lockstep so the network is applied
/// to all of them as one batch; start states are drawn from `rng` in episode order.
EvaluationResult evaluate_controller(const Environment& prototype, const Controller& controller, Index episodes,
                                     Rng& rng);

} // namespace geppg

#endif
