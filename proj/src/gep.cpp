#include "geppg/gep.hpp"

#include "geppg/cmc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace geppg::gep {

void OutcomeSpaceSpec::validate() const {
    if (lower.size() == 0 || lower.size() != upper.size() || static_cast<Index>(names.size()) != lower.size()) {
        throw InputDomainError("OutcomeSpaceSpec: names and bounds must have the same non-zero length");
    }
    if (!(lower.array() < upper.array()).all()) throw InputDomainError("OutcomeSpaceSpec: need lower < upper");
}

VectorXd OutcomeSpaceSpec::normalize(const VectorXd& raw) const {
    if (raw.size() != dims()) throw InputDomainError("OutcomeSpaceSpec::normalize: dimension mismatch");
    return ((raw - lower).array() / (upper - lower).array()).cwiseMax(0.0).cwiseMin(1.0).matrix();
}

OutcomeSpaceSpec cmc_outcome_space() {
    OutcomeSpaceSpec spec;
    spec.names = {"range_of_position", "max_position", "energy_spent"};
    spec.lower = (VectorXd(3) << 0.0, cmc::min_position, 0.0).finished();
    spec.upper = (VectorXd(3) << cmc::max_position - cmc::min_position, cmc::max_position,
                  cmc::action_cost * static_cast<double>(cmc::max_steps))
                     .finished();
    return spec;
}

VectorXd cmc_raw_outcome(const Trajectory& traj) {
    if (traj.empty()) throw InputDomainError("compute_outcome: empty trajectory");
    double lo = traj.transitions.front().state[0];
    double hi = lo;
    double energy = 0.0;
    for (const Transition& t : traj.transitions) {
        for (double p : {t.state[0], t.next_state[0]}) {
            lo = std::min(lo, p);
            hi = std::max(hi, p);
        }
        energy += cmc::action_cost * t.action.squaredNorm();
    }
    return (VectorXd(3) << hi - lo, hi, energy).finished();
}

VectorXd compute_outcome(const Trajectory& traj, const OutcomeSpaceSpec& spec) {
    return spec.normalize(cmc_raw_outcome(traj));
}

std::string to_string(PolicyKind k) { return k == PolicyKind::linear_no_bias ? "linear" : "mlp"; }

PolicyKind policy_kind_from_string(const std::string& s) {
    if (s == "linear" || s == "linear_no_bias") return PolicyKind::linear_no_bias;
    if (s == "mlp" || s == "complex") return PolicyKind::mlp;
    throw InputDomainError("unknown GEP policy kind '" + s + "'");
}

void GepConfig::validate() const {
    if (bootstrap_episodes < 1) throw InputDomainError("GepConfig: bootstrap_episodes must be >= 1");
    if (goal_episodes < 0) throw InputDomainError("GepConfig: goal_episodes must be >= 0");
    if (!(perturb_sigma >= 0.0)) throw InputDomainError("GepConfig: perturb_sigma must be >= 0");
    if (k < 1) throw InputDomainError("GepConfig: k must be >= 1");
}

nn::MlpSpec policy_spec(const GepConfig& config, const Environment& env) {
    nn::MlpSpec spec;
    spec.layer_sizes.push_back(env.observation_dim());
    if (config.policy == PolicyKind::mlp) {
        spec.layer_sizes.insert(spec.layer_sizes.end(), config.mlp_hidden.begin(), config.mlp_hidden.end());
    }
    spec.layer_sizes.push_back(env.action_dim());
    spec.hidden = nn::Activation::relu;
    spec.output = nn::Activation::tanh;
    spec.bias = false;
    spec.validate();
    return spec;
}

Controller make_controller(const nn::MlpSpec& spec, const VectorXd& params, const Environment& env) {
    return Controller{spec, params, InputScaler::from_bounds(env.observation_low(), env.observation_high())};
}

// ---------------------------------------------------------------------------
// Archive

void Archive::add(ArchiveEntry entry) {
    if (entry.outcome.size() != outcomes_.rows()) throw InputDomainError("Archive::add: outcome dimension mismatch");
    if (!entries_.empty() && entry.params.size() != entries_.front().params.size()) {
        throw InputDomainError("Archive::add: parameter length differs from stored policies");
    }
    const Index n = size();
    if (n >= outcomes_.cols()) outcomes_.conservativeResize(Eigen::NoChange, std::max<Index>(16, 2 * n));
    outcomes_.col(n) = entry.outcome;
    entries_.push_back(std::move(entry));
}

Index Archive::nearest_index(const VectorXd& goal) const {
    if (empty()) throw StateError("Archive::nearest: archive is empty");
    if (goal.size() != outcomes_.rows()) throw InputDomainError("Archive::nearest: goal dimension mismatch");
    Index best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < size(); ++i) {
        const double d = (outcomes_.col(i) - goal).squaredNorm();
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

std::vector<Index> Archive::nearest_k(const VectorXd& goal, Index k) const {
    if (empty()) throw StateError("Archive::nearest: archive is empty");
    if (goal.size() != outcomes_.rows()) throw InputDomainError("Archive::nearest: goal dimension mismatch");
    const Index n = size();
    const VectorXd d = (outcomes_.leftCols(n).colwise() - goal).colwise().squaredNorm().transpose();
    std::vector<Index> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), Index{0});
    const auto m = static_cast<std::ptrdiff_t>(std::min(k, n));
    std::partial_sort(idx.begin(), idx.begin() + m, idx.end(),
                      [&](Index a, Index b) { return d[a] < d[b] || (d[a] == d[b] && a < b); });
    idx.resize(static_cast<std::size_t>(m));
    return idx;
}

Index Archive::best_index() const {
    if (empty()) throw StateError("Archive::best_index: archive is empty");
    Index best = 0;
    for (Index i = 1; i < size(); ++i) {
        if ((*this)[i].episode_return > (*this)[best].episode_return) best = i;
    }
    return best;
}

VectorXd sample_goal(const OutcomeSpaceSpec& spec, Rng& rng) { return uniform_vector<double>(spec.dims(), 0.0, 1.0, rng); }

VectorXd perturb(const VectorXd& params, double sigma, Rng& rng) {
    if (!(sigma >= 0.0)) throw InputDomainError("perturb: sigma must be >= 0");
    return params + gaussian_vector<double>(params.size(), sigma, rng);
}

// ---------------------------------------------------------------------------
// Exploration loop

namespace {

class Explorer {
public:
    Explorer(Environment& env, const GepConfig& config, const OutcomeSpaceSpec& spec, const GepRunOptions& options)
        : env_(env),
          spec_(spec),
          options_(options),
          policy_spec_(policy_spec(config, env)),
          env_rng_(make_stream(options.seed, Stream::env)),
          gep_rng_(make_stream(options.seed, Stream::gep)),
          result_{Archive(spec.dims()), {}, {}, {}, {}} {
        spec.validate();
        config.validate();
        if (options.evaluate && options.eval_period < 1) throw InputDomainError("GepRunOptions: eval_period must be >= 1");
        next_eval_ = options.eval_period;
        eval_env_ = env.clone();
    }

    Index param_count() const { return policy_spec_.param_count(); }
    Rng& rng() { return gep_rng_; }
    const Archive& archive() const { return result_.archive; }
    Index steps() const { return result_.log.env_steps; }

    void run_episode(const VectorXd& params) {
        const Controller controller = make_controller(policy_spec_, params, env_);
        Trajectory traj = rollout(env_, controller.policy(), env_.max_episode_steps(), env_rng_);

        for (Index t = 0; t < traj.length(); ++t) {
            if (traj.transitions[static_cast<std::size_t>(t)].goal_reached && !result_.log.first_goal_step) {
                result_.log.first_goal_step = result_.log.env_steps + t + 1;
            }
        }
        result_.log.env_steps += traj.length();

        ArchiveEntry entry;
        entry.params = params;
        entry.raw_outcome = cmc_raw_outcome(traj);
        entry.outcome = spec_.normalize(entry.raw_outcome);
        entry.episode_return = traj.episode_return;
        entry.episode_length = traj.length();
        entry.trajectory_id = result_.archive.size();
        result_.archive.add(std::move(entry));
        result_.best_return_history.push_back(result_.archive[result_.archive.best_index()].episode_return);
        result_.behaviour_params.push_back(params);

        if (options_.keep_transitions) {
            std::move(traj.transitions.begin(), traj.transitions.end(), std::back_inserter(result_.transitions));
        }
        evaluate_due();
    }

    GepResult finish() { return std::move(result_); }

private:
    // Records an evaluation of the best archived policy at every eval-period
    // boundary crossed by the last episode.
    void evaluate_due() {
        if (!options_.evaluate) return;
        while (next_eval_ <= result_.log.env_steps) {
            const ArchiveEntry& best = result_.archive[result_.archive.best_index()];
            auto policy = std::make_shared<const Controller>(make_controller(policy_spec_, best.params, env_));
            Rng eval_rng = make_stream(options_.seed, Stream::eval, static_cast<std::uint64_t>(result_.log.evals.size()));
            const EvaluationResult r = evaluate_controller(*eval_env_, *policy, options_.eval_episodes, eval_rng);

            EvalRecord rec;
            rec.env_step = next_eval_;
            rec.mean_return = r.mean();
            rec.std_return = r.stddev();
            rec.episodes = options_.eval_episodes;
            rec.returns = r.returns;
            rec.policy = std::move(policy);
            rec.phase = options_.phase;
            if (options_.eval_hook) options_.eval_hook(rec);
            result_.log.evals.push_back(std::move(rec));
            next_eval_ += options_.eval_period;
        }
    }

    Environment& env_;
    const OutcomeSpaceSpec& spec_;
    const GepRunOptions& options_;
    nn::MlpSpec policy_spec_;
    Rng env_rng_;
    Rng gep_rng_;
    std::unique_ptr<Environment> eval_env_;
    Index next_eval_ = 0;
    GepResult result_;
};

void run_bootstrap(Explorer& ex, Index episodes) {
    for (Index e = 0; e < episodes; ++e) {
        ex.run_episode(uniform_vector<double>(ex.param_count(), -1.0, 1.0, ex.rng()));
    }
}

} // namespace

GepResult bootstrap(Environment& env, const GepConfig& config, const OutcomeSpaceSpec& spec,
                    const GepRunOptions& options) {
    Explorer ex(env, config, spec, options);
    run_bootstrap(ex, config.bootstrap_episodes);
    return ex.finish();
}

GepResult run_gep(Environment& env, const GepConfig& config, const OutcomeSpaceSpec& spec,
                  const GepRunOptions& options) {
    Explorer ex(env, config, spec, options);
    run_bootstrap(ex, config.bootstrap_episodes);

    auto more = [&](Index done) {
        return config.step_budget ? ex.steps() < *config.step_budget : done < config.goal_episodes;
    };
    for (Index done = 0; more(done); ++done) {
        const VectorXd goal = sample_goal(spec, ex.rng());
        Index chosen;
        if (config.k == 1) {
            chosen = ex.archive().nearest_index(goal);
        } else {
            const std::vector<Index> near = ex.archive().nearest_k(goal, config.k);
            std::uniform_int_distribution<std::size_t> pick(0, near.size() - 1);
            chosen = near[pick(ex.rng())];
        }
        ex.run_episode(perturb(ex.archive()[chosen].params, config.perturb_sigma, ex.rng()));
    }
    return ex.finish();
}

GepResult run_random_policy_search(Environment& env, const GepConfig& config, const OutcomeSpaceSpec& spec,
                                   Index episodes, const GepRunOptions& options) {
    if (episodes < 1) throw InputDomainError("run_random_policy_search: need at least one episode");
    Explorer ex(env, config, spec, options);
    run_bootstrap(ex, episodes);
    return ex.finish();
}

} // namespace geppg::gep
