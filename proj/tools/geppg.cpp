// Command-line front-end: run, analyze, plot, sweep.

#include "geppg/config.hpp"
#include "geppg/pipeline.hpp"
#include "geppg/report.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace geppg;

namespace {

constexpr int exit_failure = 1;
constexpr int exit_usage = 2;

fs::path output_root() {
    const char* root = std::getenv("GEPPG_OUT_ROOT");
    return root && *root ? fs::path(root) : fs::path("runs");
}

std::string config_name(const std::string& preset_or_path) {
    return config::is_preset(preset_or_path) ? preset_or_path : fs::path(preset_or_path).stem().string();
}

std::string opt_text(const std::optional<double>& v) {
    if (!v) return "none";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", *v);
    return buf;
}

void print_seed(const pipeline::SeedStatus& s) {
    if (s.status == "ok") {
        std::printf("seed %llu: ok  first_goal=%s  absolute=%s  final=%s\n", static_cast<unsigned long long>(s.seed),
                    s.first_goal_step ? std::to_string(*s.first_goal_step).c_str() : "none",
                    opt_text(s.absolute_metric).c_str(), opt_text(s.final_metric).c_str());
    } else {
        std::printf("seed %llu: %s  %s\n", static_cast<unsigned long long>(s.seed), s.status.c_str(), s.error.c_str());
    }
    std::fflush(stdout);
}

struct RunArgs {
    std::string config;
    int seeds = 0;
    long long steps = 0;
    int threads = 0;
    std::string out;
    std::vector<std::string> overrides;
};

config::RunConfig build_config(const RunArgs& a) {
    config::RunConfig c = config::load(a.config);
    for (const auto& o : a.overrides) config::apply_override(c, o);
    if (a.seeds > 0) c.set("seeds", "0.." + std::to_string(a.seeds - 1));
    if (a.steps > 0) c.set("total_steps", std::to_string(a.steps));
    if (a.threads > 0) c.set("threads", std::to_string(a.threads));
    return c;
}

int execute(config::RunConfig c, const fs::path& out_dir) {
    c.set("output_dir", out_dir.string());
    const pipeline::ExperimentPlan plan = config::to_plan(c);
    std::printf("running %s (%zu seeds, %lld steps) -> %s\n", pipeline::to_string(plan.algorithm).c_str(),
                plan.seeds.size(), static_cast<long long>(plan.total_steps), out_dir.string().c_str());
    std::fflush(stdout);
    const pipeline::Manifest m = pipeline::run_experiment(plan, out_dir, print_seed);
    std::printf("%s %s\n", m.complete() ? "completed" : "finished with failures:", out_dir.string().c_str());
    return m.complete() ? 0 : exit_failure;
}

int cmd_run(const RunArgs& a) {
    config::RunConfig c = build_config(a);
    const fs::path out = a.out.empty() ? output_root() / (config_name(a.config) + "_" + c.content_hash().substr(0, 8))
                                       : fs::path(a.out);
    return execute(std::move(c), out);
}

int cmd_sweep(const RunArgs& a, const std::string& fillers) {
    const config::RunConfig base = build_config(a);
    const fs::path root =
        a.out.empty() ? output_root() / (config_name(a.config) + "_sweep_" + base.content_hash().substr(0, 8))
                      : fs::path(a.out);
    int status = 0;
    for (std::uint64_t n : config::parse_seed_list(fillers)) {
        config::RunConfig c = base;
        c.set("filler_episodes", std::to_string(n));
        if (const int s = execute(c, root / ("filler_" + std::to_string(n))); s != 0) status = s;
    }
    return status;
}

std::vector<report::RunGroup> load_groups(const std::vector<std::string>& dirs) {
    std::vector<report::RunGroup> groups;
    for (const auto& d : dirs) {
        report::RunGroup g = report::load_group(d);
        for (const auto& w : g.warnings) std::fprintf(stderr, "warning: %s: %s\n", g.label.c_str(), w.c_str());
        groups.push_back(std::move(g));
    }
    return groups;
}

int cmd_analyze(const std::vector<std::string>& dirs, const std::string& out_arg, double alpha, long long resamples,
                unsigned long long seed) {
    const auto groups = load_groups(dirs);
    Rng rng = make_stream(seed, Stream::analysis);
    const report::AnalysisReport rep = report::analyze(groups, rng, alpha, resamples);

    const fs::path out = out_arg.empty() ? fs::path(dirs.front()) / "analysis" : fs::path(out_arg);
    fs::create_directories(out);
    csv::write_table(out / "metrics.csv", rep.metrics);
    csv::write_table(out / "comparisons.csv", rep.comparisons);
    csv::write_table(out / "diversity.csv", rep.diversity);
    csv::write_table(out / "correlation.csv", rep.correlation);

    std::cout << "metrics\n" << report::format_table(rep.metrics);
    if (!rep.comparisons.rows.empty()) std::cout << "\ncomparisons\n" << report::format_table(rep.comparisons);
    if (!rep.diversity.rows.empty()) std::cout << "\ndiversity\n" << report::format_table(rep.diversity);
    if (!rep.correlation.rows.empty()) std::cout << "\ncorrelation\n" << report::format_table(rep.correlation);
    std::cout << "\nreports written to " << out.string() << '\n';
    return 0;
}

int cmd_plot(const std::string& kind_name, const std::vector<std::string>& dirs, const std::string& out_arg) {
    const report::PlotKind kind = report::plot_kind_from_string(kind_name);
    const auto groups = load_groups(dirs);
    const report::PlotOutput plot = report::make_plot(kind, groups);
    for (const auto& n : plot.notes) std::printf("note: %s\n", n.c_str());

    const fs::path out = out_arg.empty() ? fs::path(dirs.front()) / "plots" : fs::path(out_arg);
    fs::create_directories(out);
    const fs::path stem = out / kind_name;
    csv::write_table(fs::path(stem.string() + ".csv"), plot.data);
    std::ofstream(stem.string() + ".svg", std::ios::trunc) << plot.svg;
    std::printf("wrote %s.svg and %s.csv\n", stem.string().c_str(), stem.string().c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"GEP-PG experiments on Continuous Mountain Car"};
    app.require_subcommand(1);

    RunArgs run_args;
    auto add_run_options = [&](CLI::App* cmd) {
        cmd->add_option("--config", run_args.config, "Preset name or config file")->required();
        cmd->add_option("--seeds", run_args.seeds, "Run seeds 0..N-1")->check(CLI::PositiveNumber);
        cmd->add_option("--steps", run_args.steps, "Total environment steps per run")->check(CLI::PositiveNumber);
        cmd->add_option("--threads", run_args.threads, "Seeds run in parallel")->check(CLI::PositiveNumber);
        cmd->add_option("--out", run_args.out, "Output directory (default: $GEPPG_OUT_ROOT or ./runs)");
        cmd->add_option("--set", run_args.overrides, "Config override key=value (repeatable)");
    };

    CLI::App* run = app.add_subcommand("run", "Run one experiment");
    add_run_options(run);

    CLI::App* sweep = app.add_subcommand("sweep", "Run an experiment for several buffer-filler sizes");
    add_run_options(sweep);
    std::string fillers = "100,200,500,1000,2000";
    sweep->add_option("--filler-episodes", fillers, "Comma-separated filler episode counts");

    std::vector<std::string> dirs;
    std::string out_dir;
    CLI::App* analyze = app.add_subcommand("analyze", "Metrics, comparisons, diversity and correlations");
    analyze->add_option("dirs", dirs, "Run directories")->required();
    analyze->add_option("--out", out_dir, "Report directory (default: <first dir>/analysis)");
    double alpha = 0.05;
    long long resamples = 10'000;
    unsigned long long analysis_seed = 0;
    analyze->add_option("--alpha", alpha, "Significance level");
    analyze->add_option("--resamples", resamples, "Bootstrap resamples")->check(CLI::Range(2LL, 100'000'000LL));
    analyze->add_option("--seed", analysis_seed, "Seed of the bootstrap resampling");

    std::string kind;
    CLI::App* plot = app.add_subcommand("plot", "Emit SVG and CSV plot data");
    plot->add_option("--kind", kind, "learning_curve | histogram | first_goal_histogram | correlation_scatter")
        ->required();
    plot->add_option("dirs", dirs, "Run directories");
    plot->add_option("--out", out_dir, "Plot directory (default: <first dir>/plots)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(run_args);
        if (sweep->parsed()) return cmd_sweep(run_args, fillers);
        if (analyze->parsed()) return cmd_analyze(dirs, out_dir, alpha, resamples, analysis_seed);
        if (plot->parsed()) {
            if (dirs.empty()) {
                std::fprintf(stderr, "error: no run directories given\n");
                return exit_failure;
            }
            return cmd_plot(kind, dirs, out_dir);
        }
    } catch (const config::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_usage;
    } catch (const InputDomainError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_usage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_failure;
    }
    return 0;
}
