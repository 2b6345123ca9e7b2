#include "geppg/cmc.hpp"
#include "geppg/report.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace geppg;
using namespace geppg::report;
namespace fs = std::filesystem;

namespace {

runio::LoadedRun fake_run(const std::vector<std::pair<Index, double>>& curve, std::optional<double> absolute = {},
                          std::optional<double> final = {}, std::optional<Index> first_goal = {}) {
    runio::LoadedRun r;
    for (const auto& [step, value] : curve) {
        EvalRecord e;
        e.env_step = step;
        e.mean_return = value;
        r.log.evals.push_back(e);
    }
    r.absolute_metric = absolute;
    r.final_metric = final;
    r.log.first_goal_step = first_goal;
    return r;
}

RunGroup fake_group(const std::string& label, std::vector<runio::LoadedRun> runs, const std::string& env_hash = "e") {
    RunGroup g;
    g.label = label;
    g.manifest.environment_hash = env_hash;
    g.runs = std::move(runs);
    return g;
}

} // namespace

TEST(SnapStep, NearestMultiple) {
    EXPECT_EQ(snap_step(2999, 2000), 2000);
    EXPECT_EQ(snap_step(3000, 2000), 4000);
    EXPECT_EQ(snap_step(4100, 2000), 4000);
    EXPECT_EQ(snap_step(0, 2000), 0);
    EXPECT_THROW(snap_step(10, 0), InputDomainError);
}

TEST(PlotKind, StringRoundTrip) {
    for (PlotKind k : {PlotKind::learning_curve, PlotKind::histogram, PlotKind::first_goal_histogram,
                       PlotKind::correlation_scatter}) {
        EXPECT_EQ(plot_kind_from_string(to_string(k)), k);
    }
    EXPECT_THROW(plot_kind_from_string("pie"), InputDomainError);
}

TEST(LearningCurve, CsvHoldsThePlottedMeans) {
    const RunGroup g = fake_group("a", {fake_run({{2000, 1.0}, {4100, 3.0}, {6000, 5.0}}),
                                        fake_run({{1900, 3.0}, {4000, 5.0}, {6050, 9.0}})});
    const PlotOutput p = learning_curve({g});
    ASSERT_EQ(p.data.header, (std::vector<std::string>{"env_step", "a_mean", "a_sem", "a_n"}));
    ASSERT_EQ(p.data.rows.size(), 3u);
    const std::vector<double> means = {2.0, 4.0, 7.0};
    const std::vector<double> sems = {1.0, 1.0, 2.0}; // sd / sqrt(2) of two values = |x - y| / 2
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(p.data.number(i, "env_step"), 2000.0 * static_cast<double>(i + 1));
        EXPECT_NEAR(p.data.number(i, "a_mean"), means[i], 1e-12);
        EXPECT_NEAR(p.data.number(i, "a_sem"), sems[i], 1e-12);
        EXPECT_EQ(p.data.at(i, "a_n"), "2");
    }
    EXPECT_TRUE(p.notes.empty());
    EXPECT_NE(p.svg.find("<svg"), std::string::npos);
    EXPECT_NE(p.svg.find("</svg>"), std::string::npos);
}

TEST(LearningCurve, DifferentGridsAreResampledWithANote) {
    const RunGroup fine = fake_group("fine", {fake_run({{2000, 1}, {4000, 2}, {6000, 3}, {8000, 4}})});
    const RunGroup coarse = fake_group("coarse", {fake_run({{4000, 10}, {8000, 20}})});
    const PlotOutput p = learning_curve({fine, coarse});
    ASSERT_EQ(p.notes.size(), 1u);
    EXPECT_NE(p.notes[0].find("4000"), std::string::npos);
    ASSERT_EQ(p.data.rows.size(), 2u);
    EXPECT_EQ(p.data.number(0, "fine_mean"), 2.0);
    EXPECT_EQ(p.data.number(1, "coarse_mean"), 20.0);
}

TEST(Plots, EmptyInputIsAnError) {
    const RunGroup empty = fake_group("x", {});
    for (PlotKind k : {PlotKind::learning_curve, PlotKind::histogram, PlotKind::first_goal_histogram,
                       PlotKind::correlation_scatter}) {
        EXPECT_THROW(make_plot(k, {empty}), InputDomainError) << to_string(k);
    }
}

TEST(Plots, MismatchedEnvironmentsAreRefused) {
    const RunGroup a = fake_group("a", {fake_run({{2000, 1.0}}, 1.0)}, "env1");
    const RunGroup b = fake_group("b", {fake_run({{2000, 1.0}}, 1.0)}, "env2");
    EXPECT_THROW(check_environments({a, b}), InputDomainError);
    EXPECT_THROW(learning_curve({a, b}), InputDomainError);
    Rng rng(0);
    EXPECT_THROW(analyze({a, b}, rng), InputDomainError);
}

TEST(Histogram, CountsEveryRun) {
    std::vector<runio::LoadedRun> runs;
    for (int i = 0; i < 10; ++i) runs.push_back(fake_run({{2000, 0.0}}, static_cast<double>(i)));
    const PlotOutput p = histogram({fake_group("h", std::move(runs))}, 5);
    ASSERT_EQ(p.data.rows.size(), 5u);
    double total = 0.0;
    for (std::size_t i = 0; i < 5; ++i) {
        total += p.data.number(i, "count");
        EXPECT_EQ(p.data.number(i, "count"), 2.0);
    }
    EXPECT_EQ(total, 10.0);
}

TEST(FirstGoalHistogram, NotReachedBin) {
    const RunGroup g = fake_group("f", {fake_run({{2000, 0}}, {}, {}, 1200), fake_run({{2000, 0}}, {}, {}, 7000),
                                        fake_run({{2000, 0}}, {}, {}, std::nullopt)});
    const PlotOutput p = first_goal_histogram({g});
    double in_range = 0.0, not_reached = 0.0;
    for (std::size_t i = 0; i < p.data.rows.size(); ++i) {
        (p.data.at(i, "bin_hi") == "inf" ? not_reached : in_range) += p.data.number(i, "count");
    }
    EXPECT_EQ(in_range, 2.0);
    EXPECT_EQ(not_reached, 1.0);
}

TEST(CorrelationScatter, FitMatchesPearson) {
    std::vector<runio::LoadedRun> runs;
    for (int i = 0; i < 5; ++i) runs.push_back(fake_run({{2000, 0}}, 2.0 * i + 1.0, static_cast<double>(i)));
    const PlotOutput p = correlation_scatter({fake_group("c", std::move(runs))});
    EXPECT_EQ(p.data.rows.size(), 5u);
    EXPECT_NEAR(csv::parse_double(p.data.meta.at("slope")), 2.0, 1e-12);
    EXPECT_NEAR(csv::parse_double(p.data.meta.at("pearson_r")), 1.0, 1e-12);
}

TEST(Analyze, ReportsFromARealRunDirectory) {
    const fs::path root = fs::temp_directory_path() / "geppg_report_test";
    fs::remove_all(root);
    pipeline::ExperimentPlan plan;
    plan.algorithm = pipeline::Algorithm::gep;
    plan.total_steps = 6000;
    plan.seeds = {0, 1, 2};
    plan.absolute_episodes = 2;
    plan.ddpg.eval_episodes = 2;
    pipeline::run_experiment(plan, root / "gep");
    plan.algorithm = pipeline::Algorithm::gep_pg;
    pipeline::run_experiment(plan, root / "geppg");

    RunGroup gep = load_group(root / "gep");
    RunGroup geppg = load_group(root / "geppg");
    EXPECT_EQ(gep.runs.size(), 3u);
    EXPECT_TRUE(gep.warnings.empty());
    EXPECT_EQ(gep.label, "gep");

    Rng rng(1);
    const AnalysisReport rep = analyze({gep, geppg}, rng, 0.05, 500);
    EXPECT_EQ(rep.metrics.rows.size(), 2u);
    EXPECT_EQ(rep.metrics.at(0, "seeds"), "3");
    EXPECT_EQ(rep.diversity.rows.size(), 2u);
    EXPECT_FALSE(format_table(rep.metrics).empty());

    // A seed whose files vanished is skipped with a warning.
    fs::remove(root / "gep" / "seed_1" / "runlog.csv");
    gep = load_group(root / "gep");
    EXPECT_EQ(gep.runs.size(), 2u);
    EXPECT_EQ(gep.warnings.size(), 1u);

    // Missing absolute metrics are recomputed from the stored checkpoints.
    const fs::path metrics = root / "geppg" / "seed_0" / "metrics.csv";
    fs::remove(metrics);
    const RunGroup recomputed = load_group(root / "geppg");
    ASSERT_EQ(recomputed.runs.size(), 3u);
    EXPECT_EQ(recomputed.runs[0].absolute_metric, geppg.runs[0].absolute_metric);
    fs::remove_all(root);
}
