#ifndef GEPPG_GEP_HPP
#define GEPPG_GEP_HPP

#include "geppg/controller.hpp"
#include "geppg/runlog.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace geppg::gep {

/// Behavioural feature space with fixed per-dimension bounds used for normalization.
struct OutcomeSpaceSpec {
    std::vector<std::string> names;
    VectorXd lower;
    VectorXd upper;

    Index dims() const { return lower.size(); }
    void validate() const;
    /// Maps raw features into [0, 1]^d, clipping values outside the bounds.
    VectorXd normalize(const VectorXd& raw) const;
};

/// range_of_position in [0, 1.8], max_position in [-1.2, 0.6], energy_spent in [0, 100].
OutcomeSpaceSpec cmc_outcome_space();

/// Raw CMC features over all visited positions (every transition's state and
/// the final next state): (max - min position, max position, sum of 0.1 a^2).
VectorXd cmc_raw_outcome(const Trajectory& traj);

/// Normalized CMC outcome. Throws InputDomainError for an empty trajectory.
VectorXd compute_outcome(const Trajectory& traj, const OutcomeSpaceSpec& spec);

enum class PolicyKind { linear_no_bias, mlp };

std::string to_string(PolicyKind k);
PolicyKind policy_kind_from_string(const std::string& s);

struct GepConfig {
    PolicyKind policy = PolicyKind::linear_no_bias;
    /// Hidden layers of the `mlp` policy (bias-free, relu hidden, tanh output).
    std::vector<Index> mlp_hidden = {64, 64};
    Index bootstrap_episodes = 5;
    /// Number of goal-directed episodes; ignored when `step_budget` is set.
    Index goal_episodes = 45;
    /// When set, goal-directed episodes continue until this many env steps.
    std::optional<Index> step_budget;
    double perturb_sigma = 0.01;
    Index k = 1;

    void validate() const;
};

nn::MlpSpec policy_spec(const GepConfig& config, const Environment& env);
Controller make_controller(const nn::MlpSpec& spec, const VectorXd& params, const Environment& env);

struct ArchiveEntry {
    VectorXd params;
    VectorXd raw_outcome;
    VectorXd outcome;
    double episode_return = 0.0;
    Index episode_length = 0;
    Index trajectory_id = 0;
};

/**
 * Append-only memory of explored policies. Nearest-neighbour lookups read
 * only the outcome matrix, so goal-directed selection never sees rewards.
 */
class Archive {
public:
    explicit Archive(Index outcome_dims) : outcomes_(outcome_dims, 0) {}

    void add(ArchiveEntry entry);

    Index size() const { return static_cast<Index>(entries_.size()); }
    bool empty() const { return entries_.empty(); }
    const ArchiveEntry& operator[](Index i) const { return entries_[static_cast<std::size_t>(i)]; }
    const std::vector<ArchiveEntry>& entries() const { return entries_; }

    /// Normalized outcomes, one column per entry.
    const MatrixXd& outcomes() const { return outcomes_; }

    /// Entry index minimizing Euclidean distance to `goal`; ties go to the
    /// lowest insertion index. Throws StateError when empty.
    Index nearest_index(const VectorXd& goal) const;
    const ArchiveEntry& nearest(const VectorXd& goal) const { return (*this)[nearest_index(goal)]; }
    /// Indices of the `k` nearest entries, closest first, same tie rule.
    std::vector<Index> nearest_k(const VectorXd& goal, Index k) const;

    /// Index of the entry with the highest episode return (earliest on ties).
    Index best_index() const;

private:
    std::vector<ArchiveEntry> entries_;
    MatrixXd outcomes_;
};

/// Uniform goal in the normalized outcome space [0, 1]^d.
VectorXd sample_goal(const OutcomeSpaceSpec& spec, Rng& rng);

/// params + N(0, sigma^2) per coordinate, no clipping.
VectorXd perturb(const VectorXd& params, double sigma, Rng& rng);

struct GepResult {
    Archive archive;
    std::vector<Transition> transitions;
    RunLog log;
    /// Best stored return after each episode.
    std::vector<double> best_return_history;
    /// Parameters of every behaviour policy, in execution order.
    std::vector<VectorXd> behaviour_params;
};

struct GepRunOptions {
    std::uint64_t seed = 0;
    /// Evaluate the best archived policy at each multiple of eval_period env steps.
    bool evaluate = false;
    Index eval_period = 2000;
    Index eval_episodes = 10;
    /// Keep every transition (needed for buffer filling); off for speed studies.
    bool keep_transitions = true;
    std::string phase = "gep";
    EvalHook eval_hook;
};

/// Random-policy stage: `bootstrap_episodes` policies with parameters uniform in [-1, 1]^P.
GepResult bootstrap(Environment& env, const GepConfig& config, const OutcomeSpaceSpec& spec,
                    const GepRunOptions& options);

/// Bootstrap then goal-directed exploration: sample goal, retrieve nearest
/// policy, perturb, roll out, archive.
GepResult run_gep(Environment& env, const GepConfig& config, const OutcomeSpaceSpec& spec,
                  const GepRunOptions& options);

/// Random policy search: every episode draws fresh parameters uniform in [-1, 1]^P.
GepResult run_random_policy_search(Environment& env, const GepConfig& config, const OutcomeSpaceSpec& spec,
                                   Index episodes, const GepRunOptions& options);

} // namespace geppg::gep

#endif
