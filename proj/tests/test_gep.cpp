#include "geppg/cmc.hpp"
#include "geppg/gep.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace geppg;
using namespace geppg::gep;

namespace {

Trajectory scripted(const std::vector<double>& positions, const std::vector<double>& actions) {
    Trajectory t;
    for (std::size_t i = 0; i + 1 < positions.size(); ++i) {
        VectorXd s(2), n(2);
        s << positions[i], 0.0;
        n << positions[i + 1], 0.0;
        t.transitions.push_back({s, VectorXd::Constant(1, actions[i]), -0.1 * actions[i] * actions[i], n, false, false});
    }
    return t;
}

Archive random_archive(Index n, Index dims, Rng& rng) {
    Archive a(dims);
    for (Index i = 0; i < n; ++i) {
        ArchiveEntry e;
        e.outcome = uniform_vector(dims, 0.0, 1.0, rng);
        e.raw_outcome = e.outcome;
        e.params = VectorXd::Constant(1, static_cast<double>(i));
        e.episode_return = static_cast<double>(i % 7);
        a.add(std::move(e));
    }
    return a;
}

} // namespace

TEST(Outcome, RawFeaturesOfAScriptedEpisode) {
    const Trajectory t = scripted({-0.5, -0.7, -0.2, 0.1}, {1.0, -0.5, 0.2});
    const VectorXd raw = cmc_raw_outcome(t);
    EXPECT_NEAR(raw[0], 0.1 - (-0.7), 1e-15);
    EXPECT_NEAR(raw[1], 0.1, 1e-15);
    EXPECT_NEAR(raw[2], 0.1 * (1.0 + 0.25 + 0.04), 1e-15);
}

TEST(Outcome, NormalizesAndClips) {
    const OutcomeSpaceSpec spec = cmc_outcome_space();
    ASSERT_EQ(spec.dims(), 3);
    VectorXd raw(3);
    raw << 0.9, -0.3, 50.0;
    const VectorXd n = spec.normalize(raw);
    EXPECT_NEAR(n[0], 0.5, 1e-15);
    EXPECT_NEAR(n[1], 0.5, 1e-15);
    EXPECT_NEAR(n[2], 0.5, 1e-15);
    raw << 5.0, -3.0, 200.0;
    const VectorXd c = spec.normalize(raw);
    EXPECT_EQ(c[0], 1.0);
    EXPECT_EQ(c[1], 0.0);
    EXPECT_EQ(c[2], 1.0);
}

TEST(Outcome, EmptyTrajectoryThrows) {
    EXPECT_THROW(compute_outcome(Trajectory{}, cmc_outcome_space()), InputDomainError);
}

TEST(Outcome, SpecValidation) {
    OutcomeSpaceSpec bad = cmc_outcome_space();
    bad.upper[0] = bad.lower[0];
    EXPECT_THROW(bad.validate(), InputDomainError);
}

TEST(PolicySpec, LinearAndMlpShapes) {
    ContinuousMountainCar env;
    GepConfig cfg;
    const nn::MlpSpec linear = policy_spec(cfg, env);
    EXPECT_EQ(linear.layer_sizes, (std::vector<Index>{2, 1}));
    EXPECT_FALSE(linear.bias);
    EXPECT_EQ(linear.param_count(), 2);
    cfg.policy = PolicyKind::mlp;
    const nn::MlpSpec mlp = policy_spec(cfg, env);
    EXPECT_EQ(mlp.param_count(), 4288);
    EXPECT_EQ(mlp.output, nn::Activation::tanh);
}

TEST(PolicyKind, StringRoundTrip) {
    EXPECT_EQ(policy_kind_from_string(to_string(PolicyKind::mlp)), PolicyKind::mlp);
    EXPECT_EQ(policy_kind_from_string(to_string(PolicyKind::linear_no_bias)), PolicyKind::linear_no_bias);
    EXPECT_THROW(policy_kind_from_string("rbf"), InputDomainError);
}

TEST(Archive, NearestMatchesBruteForce) {
    Rng rng(1);
    const Archive a = random_archive(500, 3, rng);
    for (int q = 0; q < 200; ++q) {
        const VectorXd goal = uniform_vector(3, 0.0, 1.0, rng);
        Index best = 0;
        double best_d = INFINITY;
        for (Index i = 0; i < a.size(); ++i) {
            const double d = (a[i].outcome - goal).norm();
            if (d < best_d) {
                best_d = d;
                best = i;
            }
        }
        ASSERT_EQ(a.nearest_index(goal), best);
    }
}

TEST(Archive, NearestKIsSortedPrefix) {
    Rng rng(2);
    const Archive a = random_archive(100, 2, rng);
    const VectorXd goal = VectorXd::Constant(2, 0.5);
    const auto idx = a.nearest_k(goal, 10);
    ASSERT_EQ(idx.size(), 10u);
    EXPECT_EQ(idx.front(), a.nearest_index(goal));
    for (std::size_t i = 1; i < idx.size(); ++i) {
        EXPECT_LE((a[idx[i - 1]].outcome - goal).norm(), (a[idx[i]].outcome - goal).norm());
    }
    EXPECT_EQ(a.nearest_k(goal, 1000).size(), 100u);
}

TEST(Archive, TiesGoToEarliestEntry) {
    Archive a(1);
    for (double v : {0.2, 0.8, 0.2, 0.8}) {
        ArchiveEntry e;
        e.outcome = VectorXd::Constant(1, v);
        e.raw_outcome = e.outcome;
        e.params = VectorXd::Zero(1);
        e.episode_return = 1.0;
        a.add(e);
    }
    EXPECT_EQ(a.nearest_index(VectorXd::Constant(1, 0.5)), 0);
    EXPECT_EQ(a.nearest_index(VectorXd::Constant(1, 0.9)), 1);
    EXPECT_EQ(a.best_index(), 0);
}

TEST(Archive, EmptyAndShapeErrors) {
    Archive a(3);
    EXPECT_THROW(a.nearest_index(VectorXd::Zero(3)), StateError);
    ArchiveEntry e;
    e.outcome = VectorXd::Zero(2);
    EXPECT_THROW(a.add(e), InputDomainError);
}

TEST(Perturb, HasRequestedSpread) {
    Rng rng(3);
    const VectorXd base = VectorXd::Zero(40'000);
    const VectorXd p = perturb(base, 0.01, rng);
    EXPECT_NEAR(std::sqrt(p.squaredNorm() / 40'000.0), 0.01, 2e-4);
}

TEST(SampleGoal, InsideUnitCube) {
    Rng rng(4);
    const OutcomeSpaceSpec spec = cmc_outcome_space();
    for (int i = 0; i < 1000; ++i) {
        const VectorXd g = sample_goal(spec, rng);
        ASSERT_EQ(g.size(), 3);
        EXPECT_GE(g.minCoeff(), 0.0);
        EXPECT_LE(g.maxCoeff(), 1.0);
    }
}

TEST(Bootstrap, UniformPoliciesInUnitBox) {
    ContinuousMountainCar env;
    GepConfig cfg;
    GepRunOptions opt;
    opt.seed = 5;
    const GepResult r = bootstrap(env, cfg, cmc_outcome_space(), opt);
    ASSERT_EQ(r.archive.size(), 5);
    for (const auto& e : r.archive.entries()) {
        EXPECT_LE(e.params.cwiseAbs().maxCoeff(), 1.0);
        EXPECT_EQ(e.outcome.size(), 3);
    }
    EXPECT_EQ(r.behaviour_params.size(), 5u);
}

TEST(RunGep, EpisodeCountsAndTransitionBookkeeping) {
    ContinuousMountainCar env;
    GepConfig cfg;
    cfg.goal_episodes = 15;
    GepRunOptions opt;
    opt.seed = 6;
    const GepResult r = run_gep(env, cfg, cmc_outcome_space(), opt);
    EXPECT_EQ(r.archive.size(), 20);
    EXPECT_EQ(r.best_return_history.size(), 20u);
    Index steps = 0;
    for (const auto& e : r.archive.entries()) steps += e.episode_length;
    EXPECT_EQ(steps, r.log.env_steps);
    EXPECT_EQ(static_cast<Index>(r.transitions.size()), steps);
    EXPECT_TRUE(std::is_sorted(r.best_return_history.begin(), r.best_return_history.end()));
}

TEST(RunGep, GoalEpisodesPerturbAnArchivedPolicy) {
    ContinuousMountainCar env;
    GepConfig cfg;
    cfg.goal_episodes = 10;
    GepRunOptions opt;
    opt.seed = 7;
    const GepResult r = run_gep(env, cfg, cmc_outcome_space(), opt);
    for (std::size_t i = 5; i < r.behaviour_params.size(); ++i) {
        double closest = INFINITY;
        for (std::size_t j = 0; j < i; ++j) closest = std::min(closest, (r.behaviour_params[i] - r.behaviour_params[j]).norm());
        // Two coordinates perturbed by sigma = 0.01: the parent is always within a few sigma.
        EXPECT_LT(closest, 0.1);
    }
}

TEST(RunGep, DeterministicPerSeed) {
    ContinuousMountainCar env;
    GepConfig cfg;
    cfg.policy = PolicyKind::mlp;
    cfg.goal_episodes = 5;
    GepRunOptions opt;
    opt.seed = 8;
    const GepResult a = run_gep(env, cfg, cmc_outcome_space(), opt);
    const GepResult b = run_gep(env, cfg, cmc_outcome_space(), opt);
    ASSERT_EQ(a.archive.size(), b.archive.size());
    for (Index i = 0; i < a.archive.size(); ++i) {
        EXPECT_EQ(a.archive[i].params, b.archive[i].params);
        EXPECT_EQ(a.archive[i].outcome, b.archive[i].outcome);
    }
    EXPECT_EQ(a.log.first_goal_step, b.log.first_goal_step);
}

TEST(RunGep, StepBudgetStopsExploration) {
    ContinuousMountainCar env;
    GepConfig cfg;
    cfg.step_budget = 6000;
    GepRunOptions opt;
    opt.seed = 9;
    opt.evaluate = true;
    opt.eval_episodes = 2;
    const GepResult r = run_gep(env, cfg, cmc_outcome_space(), opt);
    EXPECT_GE(r.log.env_steps, 6000);
    EXPECT_LT(r.log.env_steps - r.archive[r.archive.size() - 1].episode_length, 6000);
    ASSERT_FALSE(r.log.evals.empty());
    for (const auto& e : r.log.evals) EXPECT_EQ(e.env_step % 2000, 0);
}

TEST(GepConfig, Validation) {
    GepConfig cfg;
    cfg.perturb_sigma = -1.0;
    EXPECT_THROW(cfg.validate(), InputDomainError);
    cfg = GepConfig{};
    cfg.k = 0;
    EXPECT_THROW(cfg.validate(), InputDomainError);
}

TEST(RandomPolicySearch, FreshParametersEachEpisode) {
    ContinuousMountainCar env;
    GepRunOptions opt;
    opt.seed = 10;
    const GepResult r = run_random_policy_search(env, GepConfig{}, cmc_outcome_space(), 12, opt);
    EXPECT_EQ(r.archive.size(), 12);
    for (const auto& p : r.behaviour_params) EXPECT_LE(p.cwiseAbs().maxCoeff(), 1.0);
}
