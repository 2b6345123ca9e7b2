#ifndef GEPPG_PIPELINE_HPP
#define GEPPG_PIPELINE_HPP

#include "geppg/ddpg.hpp"
#include "geppg/gep.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace geppg::pipeline {

enum class Algorithm { gep, ddpg, gep_pg, rp_pg };

std::string to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& s);

/// Exploration strategy that harvests transitions for the replay buffer.
/// The frozen variants run DDPG's exploration loop with learning disabled.
enum class FillerKind { gep, random_policy_search, ddpg_action_noise_frozen, ddpg_param_noise_frozen };

std::string to_string(FillerKind k);
FillerKind filler_kind_from_string(const std::string& s);

/// Which evaluation checkpoints are written to disk.
enum class CheckpointPolicy { all, best, none };

std::string to_string(CheckpointPolicy c);
CheckpointPolicy checkpoint_policy_from_string(const std::string& s);

struct ExperimentPlan {
    Algorithm algorithm = Algorithm::gep_pg;
    std::string environment = "cmc";
    /// Buffer filler of the two-phase algorithms; rp_pg always uses random_policy_search.
    FillerKind filler = FillerKind::gep;
    Index filler_episodes = 50;
    /// Budget shared by both phases of a two-phase run.
    Index total_steps = 500'000;
    std::uint64_t master_seed = 0;
    std::vector<std::uint64_t> seeds = default_seeds(20);
    ddpg::NoiseConfig noise;
    ddpg::DdpgConfig ddpg;
    gep::GepConfig gep;
    Index absolute_episodes = 100;
    CheckpointPolicy checkpoints = CheckpointPolicy::all;
    Index threads = 1;

    static std::vector<std::uint64_t> default_seeds(Index n);

    FillerKind effective_filler() const { return algorithm == Algorithm::rp_pg ? FillerKind::random_policy_search : filler; }
    bool two_phase() const { return algorithm == Algorithm::gep_pg || algorithm == Algorithm::rp_pg; }
    Index eval_period() const { return ddpg.cycle_steps * ddpg.cycles_per_eval; }
    void validate() const;
};

struct FillResult {
    ddpg::ReplayBuffer buffer;
    RunLog log;
    /// Present for the GEP and random-policy fillers.
    std::optional<gep::Archive> archive;
};

/**
 * Phase 1 of a two-phase run: `episodes` complete episodes of the chosen
 * strategy, every transition pushed to a fresh buffer. No learning happens.
 * GEP-type fillers record evaluations of their best archived policy.
 */
FillResult fill_buffer(FillerKind kind, Index episodes, Environment& env, const ExperimentPlan& plan,
                       std::uint64_t seed, const EvalHook& hook = {});

struct SeedResult {
    RunLog log;
    std::optional<gep::Archive> archive;
};

/// Fill the buffer, then train a freshly initialized DDPG agent on it for the
/// rest of the budget. The second phase's budget is the remaining steps
/// rounded to the nearest evaluation period (at least one period).
SeedResult run_gep_pg(const ExperimentPlan& plan, Environment& env, std::uint64_t seed, const EvalHook& hook = {});

/// Runs one seed of any algorithm. `seed` is the already-derived run seed.
SeedResult run_seed(const ExperimentPlan& plan, Environment& env, std::uint64_t seed, const EvalHook& hook = {});

/// Budget of the DDPG phase after `filler_steps` exploration steps.
Index second_phase_budget(Index total_steps, Index filler_steps, Index eval_period);

struct SeedStatus {
    std::uint64_t seed = 0;
    std::string status = "pending";  // pending | ok | failed
    std::string error;
    std::string directory;
    std::optional<Index> first_goal_step;
    std::optional<double> absolute_metric;
    std::optional<double> final_metric;
};

struct Manifest {
    std::string config_hash;
    std::string environment_hash;
    std::vector<std::pair<std::string, std::string>> config;
    std::vector<SeedStatus> seeds;

    bool complete() const;
};

using SeedCallback = std::function<void(const SeedStatus&)>;

/**
 * One run per seed, optionally on several threads. Writes
 * out_dir/seed_<k>/{runlog.csv, evals.csv, archive.csv, metrics.csv, checkpoints/}
 * and out_dir/manifest.json. A failing seed is recorded in the manifest
 * without affecting the others.
 */
Manifest run_experiment(const ExperimentPlan& plan, const std::filesystem::path& out_dir,
                        const SeedCallback& on_seed_done = {});

void write_manifest(const std::filesystem::path& path, const Manifest& m);
Manifest read_manifest(const std::filesystem::path& path);

} // namespace geppg::pipeline

#endif
