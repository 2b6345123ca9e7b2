#include "geppg/cmc.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace geppg;

namespace {

// Direct transcription of the car dynamics, independent of the library.
cmc::CmcState hand_step(cmc::CmcState s, double a) {
    a = std::clamp(a, -1.0, 1.0);
    double v = s.velocity + a * 0.0015 - 0.0025 * std::cos(3.0 * s.position);
    v = std::clamp(v, -0.07, 0.07);
    double x = std::clamp(s.position + v, -1.2, 0.6);
    if (x == -1.2 && v < 0.0) v = 0.0;
    return {x, v};
}

Policy bang_bang() {
    return [](const VectorXd& obs) { return VectorXd::Constant(1, obs[1] >= 0.0 ? 1.0 : -1.0); };
}

} // namespace

TEST(CmcReset, StartsAtRestInsideTheValley) {
    Rng rng(3);
    for (int i = 0; i < 1000; ++i) {
        const cmc::CmcState s = cmc::reset(rng);
        EXPECT_EQ(s.velocity, 0.0);
        EXPECT_GE(s.position, -0.6);
        EXPECT_LE(s.position, -0.4);
    }
}

TEST(CmcReset, SameSeedSameState) {
    Rng a(42), b(42);
    EXPECT_EQ(cmc::reset(a).position, cmc::reset(b).position);
}

TEST(CmcStep, GravityPullsFromRest) {
    const cmc::StepResult r = cmc::step({-0.5, 0.0}, 0.0, 0);
    EXPECT_NEAR(r.next_state.velocity, -0.0025 * std::cos(-1.5), 1e-15);
    EXPECT_NEAR(r.next_state.velocity, -1.768e-4, 1e-7);
    EXPECT_NEAR(r.next_state.position, -0.5 + r.next_state.velocity, 1e-15);
    EXPECT_EQ(r.reward, 0.0);
    EXPECT_FALSE(r.terminal);
}

TEST(CmcStep, FullThrottleCostsPointOne) {
    const cmc::StepResult r = cmc::step({-0.5, 0.0}, 1.0, 0);
    EXPECT_DOUBLE_EQ(r.reward, -0.1);
    EXPECT_DOUBLE_EQ(cmc::step({0.1, -0.02}, -1.0, 10).reward, -0.1);
}

TEST(CmcStep, ActionIsClippedBeforeUse) {
    const cmc::StepResult big = cmc::step({-0.5, 0.0}, 5.0, 0);
    const cmc::StepResult one = cmc::step({-0.5, 0.0}, 1.0, 0);
    EXPECT_EQ(big.next_state.velocity, one.next_state.velocity);
    EXPECT_EQ(big.applied_action, 1.0);
    EXPECT_DOUBLE_EQ(big.reward, -0.1);
}

TEST(CmcStep, ReachesGoalFromNearTheTop) {
    const cmc::StepResult r = cmc::step({0.449, 0.07}, 0.0, 0);
    // 0.449 + min(0.07, 0.07 - 0.0025 cos(1.347)) clears 0.45 by a wide margin.
    const double v = 0.07 - 0.0025 * std::cos(3.0 * 0.449);
    EXPECT_NEAR(r.next_state.position, 0.449 + v, 1e-15);
    EXPECT_GE(r.next_state.position, 0.45);
    EXPECT_TRUE(r.goal_reached);
    EXPECT_TRUE(r.terminal);
    EXPECT_DOUBLE_EQ(r.reward, 100.0);
}

TEST(CmcStep, LeftWallStopsTheCar) {
    const cmc::StepResult r = cmc::step({-1.19, -0.05}, -1.0, 0);
    EXPECT_EQ(r.next_state.position, -1.2);
    EXPECT_EQ(r.next_state.velocity, 0.0);
}

TEST(CmcStep, TimeLimitTerminates) {
    EXPECT_FALSE(cmc::step({-0.5, 0.0}, 0.0, 998).terminal);
    const cmc::StepResult r = cmc::step({-0.5, 0.0}, 0.0, 999);
    EXPECT_TRUE(r.terminal);
    EXPECT_FALSE(r.goal_reached);
}

TEST(CmcStep, RejectsNonFiniteAction) {
    EXPECT_THROW(cmc::step({-0.5, 0.0}, std::nan(""), 0), InputDomainError);
    EXPECT_THROW(cmc::step({-0.5, 0.0}, INFINITY, 0), InputDomainError);
}

TEST(CmcStep, MatchesHandDynamicsAndStaysInBounds) {
    Rng rng(11);
    std::uniform_real_distribution<double> act(-2.0, 2.0);
    cmc::CmcState s = cmc::reset(rng);
    for (Index t = 0; t < 5000; ++t) {
        const double a = act(rng);
        const cmc::StepResult r = cmc::step(s, a, 0);
        const cmc::CmcState expected = hand_step(s, a);
        ASSERT_DOUBLE_EQ(r.next_state.position, expected.position);
        ASSERT_DOUBLE_EQ(r.next_state.velocity, expected.velocity);
        ASSERT_GE(r.next_state.position, -1.2);
        ASSERT_LE(r.next_state.position, 0.6);
        ASSERT_LE(std::abs(r.next_state.velocity), 0.07);
        s = r.goal_reached ? cmc::reset(rng) : r.next_state;
    }
}

TEST(ContinuousMountainCar, StepAfterDoneThrows) {
    ContinuousMountainCar env;
    EXPECT_THROW(env.step(VectorXd::Zero(1)), StateError);
    Rng rng(0);
    env.reset(rng);
    for (Index t = 0; t < 1000; ++t) env.step(VectorXd::Zero(1));
    EXPECT_THROW(env.step(VectorXd::Zero(1)), StateError);
}

TEST(ContinuousMountainCar, RejectsWrongActionShape) {
    ContinuousMountainCar env;
    Rng rng(0);
    env.reset(rng);
    EXPECT_THROW(env.step(VectorXd::Zero(2)), InputDomainError);
}

TEST(ContinuousMountainCar, CloneIsIndependent) {
    ContinuousMountainCar env;
    Rng rng(5);
    env.reset(rng);
    auto copy = env.clone();
    env.step(VectorXd::Ones(1));
    EXPECT_EQ(copy->steps_taken(), 0);
    EXPECT_EQ(env.steps_taken(), 1);
}

TEST(MakeEnvironment, KnownAndUnknownNames) {
    EXPECT_EQ(make_environment("cmc")->observation_dim(), 2);
    EXPECT_EQ(make_environment("continuous_mountain_car")->action_dim(), 1);
    EXPECT_THROW(make_environment("half_cheetah"), InputDomainError);
}

TEST(Rollout, ZeroPolicyRunsToTheTimeLimit) {
    ContinuousMountainCar env;
    Rng rng(1);
    const Trajectory t = rollout(env, [](const VectorXd&) { return VectorXd::Zero(1); }, 1000, rng);
    EXPECT_EQ(t.length(), 1000);
    EXPECT_EQ(t.episode_return, 0.0);
    EXPECT_FALSE(t.goal_reached);
}

TEST(Rollout, BangBangReachesGoal) {
    ContinuousMountainCar env;
    Rng rng(2);
    const Trajectory t = rollout(env, bang_bang(), 1000, rng);
    ASSERT_TRUE(t.goal_reached);
    EXPECT_LT(t.length(), 1000);
    EXPECT_NEAR(t.episode_return, 100.0 - 0.1 * static_cast<double>(t.length()), 1e-9);

    double sum = 0.0;
    for (std::size_t i = 0; i < t.transitions.size(); ++i) {
        sum += t.transitions[i].reward;
        EXPECT_EQ(t.transitions[i].terminal, i + 1 == t.transitions.size());
    }
    EXPECT_DOUBLE_EQ(sum, t.episode_return);
}

TEST(Rollout, Deterministic) {
    ContinuousMountainCar env;
    Rng a(9), b(9);
    const Trajectory t1 = rollout(env, bang_bang(), 1000, a);
    const Trajectory t2 = rollout(env, bang_bang(), 1000, b);
    ASSERT_EQ(t1.length(), t2.length());
    for (std::size_t i = 0; i < t1.transitions.size(); ++i) {
        EXPECT_EQ(t1.transitions[i].next_state, t2.transitions[i].next_state);
    }
}

TEST(Rollout, NonFinitePolicyAborts) {
    ContinuousMountainCar env;
    Rng rng(0);
    EXPECT_THROW(rollout(env, [](const VectorXd&) { return VectorXd::Constant(1, std::nan("")); }, 1000, rng),
                 NumericError);
}

TEST(Rollout, StepCapValidated) {
    ContinuousMountainCar env;
    Rng rng(0);
    auto zero = [](const VectorXd&) { return VectorXd::Zero(1); };
    EXPECT_THROW(rollout(env, zero, 0, rng), InputDomainError);
    EXPECT_THROW(rollout(env, zero, 1001, rng), InputDomainError);
    EXPECT_EQ(rollout(env, zero, 10, rng).length(), 10);
}
