// Acceptance checks, one per invocation: `geppg_acceptance <criterion>`.
// Prints a single "PASS criterion n: ..." or "FAIL criterion n: ..." line and
// exits 0 on pass, 1 on failure.
#include "oracles.hpp"

#include "geppg/analysis.hpp"
#include "geppg/cmc.hpp"
#include "geppg/ddpg.hpp"
#include "geppg/gep.hpp"
#include "geppg/pipeline.hpp"
#include "geppg/tinynet.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

using namespace geppg;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

void progress(const std::string& s) {
    std::fprintf(stderr, "  %s\n", s.c_str());
    std::fflush(stderr);
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

fs::path work_dir(const std::string& name) {
    const char* root = std::getenv("GEPPG_ACCEPTANCE_DIR");
    fs::path d = (root ? fs::path(root) : fs::temp_directory_path() / "geppg_acceptance") / name;
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------------------
// GEP first-goal speed

constexpr Index gep_goal_budget = 50'000;

struct FirstGoalSample {
    /// Steps to the first goal of the runs that reached it within the budget.
    std::vector<double> steps;
    Index trials = 0;

    double reach_percent() const { return 100.0 * static_cast<double>(steps.size()) / static_cast<double>(trials); }
};

FirstGoalSample gep_first_goal_steps(gep::PolicyKind kind, Index trials) {
    gep::GepConfig cfg;
    cfg.policy = kind;
    cfg.step_budget = gep_goal_budget;
    FirstGoalSample out;
    out.trials = trials;
    for (Index i = 0; i < trials; ++i) {
        ContinuousMountainCar env;
        gep::GepRunOptions opt;
        opt.seed = run_seed(0, static_cast<std::uint64_t>(i));
        opt.keep_transitions = false;
        const gep::GepResult r = gep::run_gep(env, cfg, gep::cmc_outcome_space(), opt);
        if (r.log.goal_reached_by(gep_goal_budget)) out.steps.push_back(static_cast<double>(*r.log.first_goal_step));
    }
    return out;
}

Outcome criterion_1() {
    const auto t0 = std::chrono::steady_clock::now();
    const FirstGoalSample s = gep_first_goal_steps(gep::PolicyKind::linear_no_bias, 200);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double m = s.steps.empty() ? INFINITY : mean(s.steps);
    return {m >= 2000.0 && m <= 8000.0 && secs < 120.0,
            fmt("GEP linear, 200 trials: mean steps to first goal %.1f (target [2000, 8000]) over the %.0f%% of "
                "trials reaching it within 5e4 steps, %.1f s (target < 120 s)",
                m, s.reach_percent(), secs)};
}

Outcome criterion_2() {
    const FirstGoalSample lin = gep_first_goal_steps(gep::PolicyKind::linear_no_bias, 50);
    const FirstGoalSample mlp = gep_first_goal_steps(gep::PolicyKind::mlp, 50);
    const double ratio = mean(mlp.steps) / mean(lin.steps);
    const analysis::TTestResult t = analysis::t_test(mlp.steps, lin.steps);
    return {ratio >= 0.5 && ratio <= 2.0 && t.p >= 0.05,
            fmt("GEP first goal, 50 trials each: mlp %.1f (%.0f%% reached) vs linear %.1f (%.0f%% reached), "
                "ratio %.3f (target [0.5, 2]); Welch p = %.4f (target >= 0.05)",
                mean(mlp.steps), mlp.reach_percent(), mean(lin.steps), lin.reach_percent(), ratio, t.p)};
}

// ---------------------------------------------------------------------------
// DDPG exploration

pipeline::ExperimentPlan ddpg_plan(ddpg::NoiseKind kind, Index total_steps) {
    pipeline::ExperimentPlan plan;
    plan.algorithm = pipeline::Algorithm::ddpg;
    plan.noise.kind = kind;
    plan.total_steps = total_steps;
    return plan;
}

double goal_reach_rate(ddpg::NoiseKind kind, Index seeds, Index steps) {
    const pipeline::ExperimentPlan plan = ddpg_plan(kind, steps);
    Index hits = 0;
    for (Index s = 0; s < seeds; ++s) {
        ContinuousMountainCar env;
        const pipeline::SeedResult r = pipeline::run_seed(plan, env, run_seed(plan.master_seed, static_cast<std::uint64_t>(s)));
        if (r.log.goal_reached_by(steps)) ++hits;
        progress(fmt("%s seed %lld: %s", ddpg::to_string(kind).c_str(), static_cast<long long>(s),
                     r.log.goal_reached_by(steps) ? "goal" : "no goal"));
    }
    return 100.0 * static_cast<double>(hits) / static_cast<double>(seeds);
}

Outcome criterion_3() {
    const double ou = goal_reach_rate(ddpg::NoiseKind::ou, 50, 50'000);
    const double param = goal_reach_rate(ddpg::NoiseKind::param, 50, 50'000);
    const bool ou_ok = std::abs(ou - 22.0) <= 15.0;
    const bool param_ok = std::abs(param - 42.0) <= 15.0;
    return {ou_ok && param_ok && param >= ou,
            fmt("DDPG goal reached within 5e4 steps, 50 seeds: OU %.0f%% (target 22 +/- 15), "
                "parameter noise %.0f%% (target 42 +/- 15), parameter >= OU: %s",
                ou, param, param >= ou ? "yes" : "no")};
}

struct GroupSummary {
    double mean_absolute = 0.0;
    double goal_fraction = 0.0;
};

GroupSummary run_group(const std::string& label, pipeline::ExperimentPlan plan, const fs::path& root) {
    plan.checkpoints = pipeline::CheckpointPolicy::none;
    const pipeline::Manifest m = pipeline::run_experiment(plan, root / label, [&](const pipeline::SeedStatus& s) {
        progress(fmt("%s seed %llu: %s", label.c_str(), static_cast<unsigned long long>(s.seed), s.status.c_str()));
    });
    if (!m.complete()) throw StateError("acceptance: group " + label + " has failed seeds");
    std::vector<double> absolute;
    Index reached = 0;
    for (const auto& s : m.seeds) {
        absolute.push_back(s.absolute_metric.value());
        if (s.first_goal_step) ++reached;
    }
    return {mean(absolute), static_cast<double>(reached) / static_cast<double>(m.seeds.size())};
}

Outcome criterion_4() {
    const fs::path root = work_dir("criterion_4");
    const Index steps = 500'000;
    std::map<std::string, GroupSummary> g;
    for (ddpg::NoiseKind kind : {ddpg::NoiseKind::ou, ddpg::NoiseKind::param}) {
        pipeline::ExperimentPlan plan = ddpg_plan(kind, steps);
        g["ddpg_" + ddpg::to_string(kind)] = run_group("ddpg_" + ddpg::to_string(kind), plan, root);
        plan.algorithm = pipeline::Algorithm::gep_pg;
        g["geppg_" + ddpg::to_string(kind)] = run_group("geppg_" + ddpg::to_string(kind), plan, root);
    }
    pipeline::ExperimentPlan gep_plan;
    gep_plan.algorithm = pipeline::Algorithm::gep;
    gep_plan.total_steps = steps;
    const GroupSummary gep = run_group("gep", gep_plan, root);

    bool pass = true;
    std::string detail = "20 seeds, 5e5 steps;";
    for (const char* kind : {"ou", "param"}) {
        const GroupSummary& d = g.at(std::string("ddpg_") + kind);
        const GroupSummary& p = g.at(std::string("geppg_") + kind);
        pass = pass && p.mean_absolute >= d.mean_absolute && gep.goal_fraction >= d.goal_fraction;
        detail += fmt(" %s: GEP-PG absolute %.2f vs DDPG %.2f, DDPG goal fraction %.2f;", kind, p.mean_absolute,
                      d.mean_absolute, d.goal_fraction);
    }
    detail += fmt(" GEP goal fraction %.2f", gep.goal_fraction);
    fs::remove_all(root);
    return {pass, detail};
}

// ---------------------------------------------------------------------------
// Method-level properties

Outcome criterion_5() {
    Rng rng(2024);
    std::uniform_int_distribution<int> depth(1, 3), width(1, 16), io(1, 4), act(0, 2), coin(0, 1);
    const nn::Activation acts[] = {nn::Activation::relu, nn::Activation::tanh, nn::Activation::linear};
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        nn::MlpSpec spec;
        spec.layer_sizes.push_back(io(rng));
        for (int l = depth(rng); l > 0; --l) spec.layer_sizes.push_back(width(rng));
        spec.layer_sizes.push_back(io(rng));
        spec.hidden = acts[act(rng)];
        spec.output = acts[act(rng)];
        spec.bias = coin(rng) == 1;
        const VectorXd p = nn::init_params<double>(spec, rng);
        const VectorXd x = uniform_vector(spec.input_size(), -1.0, 1.0, rng);
        const VectorXd u = uniform_vector(spec.output_size(), -1.0, 1.0, rng);
        nn::ForwardCache<double> cache;
        nn::forward<double>(spec, p, MatrixXd(x), &cache);
        const VectorXd analytic = nn::backward<double>(spec, p, cache, MatrixXd(u)).params;
        const VectorXd numeric = oracle::numeric_param_gradient(spec, p, std::vector<double>(x.data(), x.data() + x.size()),
                                                                std::vector<double>(u.data(), u.data() + u.size()));
        worst = std::max(worst, oracle::max_relative_error(analytic, numeric));
    }
    return {worst < 1e-4, fmt("20 random MLPs: max relative error vs central differences %.3e (target < 1e-4)", worst)};
}

Outcome criterion_6() {
    const double theta = 0.15, sigma = 0.3;
    ddpg::OuNoiseState ou(1, 0.0, theta, sigma, 1.0);
    Rng rng(6);
    for (int i = 0; i < 1000; ++i) ddpg::ou_sample(ou, rng);
    const Index n = 1'000'000;
    double sum = 0.0, sq = 0.0;
    for (Index i = 0; i < n; ++i) {
        const double x = ddpg::ou_sample(ou, rng)[0];
        sum += x;
        sq += x * x;
    }
    const double m = sum / static_cast<double>(n);
    const double sd = std::sqrt(sq / static_cast<double>(n) - m * m);
    const double expected = std::sqrt(sigma * sigma / (2 * theta - theta * theta));
    const double rel = std::abs(sd - expected) / expected;
    return {rel <= 0.05, fmt("OU 1e6 samples: std %.4f vs %.4f (relative error %.4f, target <= 0.05)", sd, expected, rel)};
}

Outcome criterion_7() {
    // Reference values computed with scipy.stats (ttest_ind equal_var=False, pearsonr, t.sf).
    const std::vector<double> a = {12.1, 14.3, 11.8, 15.2, 13.9, 12.7, 14.8, 13.1};
    const std::vector<double> b = {10.2, 11.9, 12.4, 9.8, 11.1, 10.7};
    const std::vector<double> x = {1, 2, 3, 4, 5, 6, 7};
    const std::vector<double> y = {2.1, 3.9, 6.2, 7.8, 10.1, 12.2, 13.8};
    double worst = 0.0;
    auto check = [&](double got, double want) { worst = std::max(worst, std::abs(got - want)); };

    const analysis::TTestResult t = analysis::t_test(a, b);
    check(t.t, 4.107308418118099);
    check(t.p, 0.0014719724308028042);
    check(t.dof, 11.92490076125272);
    const analysis::PearsonResult r = analysis::pearson(x, y);
    check(r.r, 0.999172912755884);
    check(r.p, 3.776936574882502e-08);
    check(r.slope, 1.9857142857142858);
    check(r.intercept, 0.07142857142857117);
    check(analysis::student_t_two_sided_p(2.0, 10.0), 0.07338803477074039);
    check(analysis::student_t_two_sided_p(-4.2, 25.5), 0.0002862330244441692);

    // Bootstrap: replay the same draws and take order statistics of a sorted copy.
    const Index n = 2001;
    Rng rng(5), replay(5);
    const analysis::BootstrapResult ci = analysis::bootstrap_ci(a, b, rng, n);
    std::uniform_int_distribution<std::size_t> pa(0, a.size() - 1), pb(0, b.size() - 1);
    std::vector<double> d;
    for (Index i = 0; i < n; ++i) {
        double sa = 0, sb = 0;
        for (std::size_t j = 0; j < a.size(); ++j) sa += a[pa(replay)];
        for (std::size_t j = 0; j < b.size(); ++j) sb += b[pb(replay)];
        d.push_back(sa / static_cast<double>(a.size()) - sb / static_cast<double>(b.size()));
    }
    std::sort(d.begin(), d.end());
    check(ci.lo, d[50]);
    check(ci.hi, d[1950]);
    check(ci.mean_diff, mean(a) - mean(b));

    Rng gen(77);
    std::normal_distribution<double> normal(0.0, 1.0);
    Index flagged = 0;
    const Index trials = 500;
    for (Index i = 0; i < trials; ++i) {
        std::vector<double> u(20), v(20);
        for (double& e : u) e = normal(gen);
        for (double& e : v) e = normal(gen);
        if (analysis::bootstrap_ci(u, v, gen).significant()) ++flagged;
    }
    const double fpr = 100.0 * static_cast<double>(flagged) / static_cast<double>(trials);
    return {worst <= 1e-10 && fpr <= 8.0,
            fmt("fixtures max abs error %.2e (target <= 1e-10); bootstrap false-positive rate %.1f%% over 500 "
                "equal-mean trials (target <= 8%%)",
                worst, fpr)};
}

Outcome criterion_8() {
    Rng rng(8);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> runs(40);
    for (double& v : runs) v = normal(rng);
    const analysis::SplitVariability s = analysis::split_variability(runs, rng, 1000, 20);
    return {s.t_test_percent <= 6.0 && s.bootstrap_percent <= 6.0,
            fmt("1000 random 20/20 splits of 40 same-distribution runs flagged: t-test %.1f%%, bootstrap %.1f%% "
                "(target <= 6%% each)",
                s.t_test_percent, s.bootstrap_percent)};
}

Outcome criterion_9() {
    const MatrixXd identical = MatrixXd::Constant(3, 50, 0.3);
    const double knn_same = analysis::knn_diversity(identical, 1);
    const double entropy_same = analysis::cell_metrics(identical, 5).entropy;

    Rng rng(9);
    MatrixXd uniform(3, 1000);
    for (Index c = 0; c < uniform.cols(); ++c) uniform.col(c) = uniform_vector(3, 0.0, 1.0, rng);
    const double knn_uniform = analysis::knn_diversity(uniform, 1);

    // Four points in each of the 5 x 5 cells.
    MatrixXd grid(2, 100);
    Index col = 0;
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) {
            for (int k = 0; k < 4; ++k) grid.col(col++) << (i + 0.2 + 0.15 * k) / 5.0, (j + 0.5) / 5.0;
        }
    }
    const double entropy_grid = analysis::cell_metrics(grid, 5).entropy;
    const bool pass = knn_same == 0.0 && entropy_same == 0.0 && std::abs(knn_uniform - 1.0) <= 0.1 &&
                      entropy_grid == std::log(25.0);
    return {pass, fmt("identical points: knn %.3g, entropy %.3g (target 0); uniform knn %.4f (target 1 +/- 0.1); "
                      "equal occupancy entropy %.17g vs ln 25 = %.17g",
                      knn_same, entropy_same, knn_uniform, entropy_grid, std::log(25.0))};
}

Outcome criterion_10() {
    const fs::path root = work_dir("criterion_10");
    Index compared = 0, identical = 0;
    for (pipeline::Algorithm alg : {pipeline::Algorithm::gep, pipeline::Algorithm::ddpg, pipeline::Algorithm::gep_pg,
                                    pipeline::Algorithm::rp_pg}) {
        pipeline::ExperimentPlan plan;
        plan.algorithm = alg;
        plan.total_steps = 10'000;
        plan.filler_episodes = 5;
        plan.seeds = {0, 1};
        plan.master_seed = 10;
        plan.absolute_episodes = 5;
        const std::string name = pipeline::to_string(alg);
        pipeline::run_experiment(plan, root / (name + "_a"));
        pipeline::run_experiment(plan, root / (name + "_b"));
        for (const char* seed : {"seed_0", "seed_1"}) {
            const std::string first = slurp(root / (name + "_a") / seed / "runlog.csv");
            ++compared;
            if (!first.empty() && first == slurp(root / (name + "_b") / seed / "runlog.csv")) ++identical;
        }
    }
    fs::remove_all(root);
    return {identical == compared,
            fmt("%lld of %lld RunLog CSVs byte-identical on rerun (gep, ddpg, gep_pg, rp_pg; 2 seeds each)",
                static_cast<long long>(identical), static_cast<long long>(compared))};
}

} // namespace

int main(int argc, char** argv) {
    const std::vector<std::function<Outcome()>> criteria = {criterion_1, criterion_2, criterion_3, criterion_4,
                                                            criterion_5, criterion_6, criterion_7, criterion_8,
                                                            criterion_9, criterion_10};
    const int n = argc == 2 ? std::atoi(argv[1]) : 0;
    if (n < 1 || n > static_cast<int>(criteria.size())) {
        std::fprintf(stderr, "usage: %s <criterion 1-%zu>\n", argv[0], criteria.size());
        return 2;
    }
    Outcome o;
    try {
        o = criteria[static_cast<std::size_t>(n - 1)]();
    } catch (const std::exception& e) {
        o = {false, std::string("error: ") + e.what()};
    }
    std::printf("%s criterion %d: %s\n", o.pass ? "PASS" : "FAIL", n, o.detail.c_str());
    return o.pass ? 0 : 1;
}
