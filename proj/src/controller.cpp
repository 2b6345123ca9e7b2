#include "geppg/controller.hpp"

#include <cmath>
#include <fstream>
#include <memory>
#include <numeric>

namespace geppg {

InputScaler InputScaler::from_bounds(const VectorXd& low, const VectorXd& high) {
    if (low.size() != high.size() || !(high.array() > low.array()).all()) {
        throw InputDomainError("InputScaler::from_bounds: need low < high in every dimension");
    }
    return {0.5 * (low + high), (2.0 / (high - low).array()).matrix()};
}

void write_controller(std::ostream& os, const Controller& c) {
    nn::write_checkpoint(os, c.spec, c.params);
    nn::write_param_vector(os, c.scaler.offset);
    nn::write_param_vector(os, c.scaler.scale);
}

Controller read_controller(std::istream& is) {
    auto [spec, params] = nn::read_checkpoint(is);
    Controller c{std::move(spec), std::move(params), {}};
    c.scaler.offset = nn::read_param_vector(is);
    c.scaler.scale = nn::read_param_vector(is);
    if (c.scaler.offset.size() != c.spec.input_size() || c.scaler.scale.size() != c.spec.input_size()) {
        throw InputDomainError("read_controller: input scaler does not match the network input");
    }
    return c;
}

void save_controller(const std::filesystem::path& path, const Controller& c) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw StateError("cannot write checkpoint " + path.string());
    write_controller(os, c);
}

Controller load_controller(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw StateError("missing checkpoint " + path.string());
    return read_controller(is);
}

double EvaluationResult::mean() const {
    if (returns.empty()) return 0.0;
    return std::accumulate(returns.begin(), returns.end(), 0.0) / static_cast<double>(returns.size());
}

double EvaluationResult::stddev() const {
    if (returns.empty()) return 0.0;
    const double m = mean();
    double ss = 0.0;
    for (double r : returns) ss += (r - m) * (r - m);
    return std::sqrt(ss / static_cast<double>(returns.size()));
}

EvaluationResult evaluate_controller(const Environment& prototype, const Controller& controller, Index episodes,
                                     Rng& rng) {
    if (episodes < 1) throw InputDomainError("evaluate_controller: need at least one episode");

    std::vector<std::unique_ptr<Environment>> envs;
    MatrixXd obs(prototype.observation_dim(), episodes);
    for (Index e = 0; e < episodes; ++e) {
        envs.push_back(prototype.clone());
        obs.col(e) = envs.back()->reset(rng);
    }

    EvaluationResult result;
    result.returns.assign(static_cast<std::size_t>(episodes), 0.0);
    std::vector<Index> active(static_cast<std::size_t>(episodes));
    std::iota(active.begin(), active.end(), Index{0});

    while (!active.empty()) {
        MatrixXd batch(obs.rows(), static_cast<Index>(active.size()));
        for (std::size_t i = 0; i < active.size(); ++i) batch.col(static_cast<Index>(i)) = obs.col(active[i]);
        const MatrixXd actions = controller.act_batch(batch);
        if (!actions.allFinite()) throw NumericError("evaluate_controller: non-finite action");

        std::vector<Index> still_active;
        for (std::size_t i = 0; i < active.size(); ++i) {
            const Index e = active[i];
            EnvStep s = envs[static_cast<std::size_t>(e)]->step(actions.col(static_cast<Index>(i)));
            result.returns[static_cast<std::size_t>(e)] += s.reward;
            result.goal_reached = result.goal_reached || s.goal_reached;
            ++result.steps;
            obs.col(e) = s.observation;
            if (!s.terminal) still_active.push_back(e);
        }
        active = std::move(still_active);
    }
    return result;
}

} // namespace geppg
