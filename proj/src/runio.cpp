#include "geppg/runio.hpp"

#include <filesystem>

namespace geppg::runio {

using csv::format_double;

namespace {

std::string opt_index(const std::optional<Index>& v) { return v ? std::to_string(*v) : "none"; }

std::optional<Index> read_opt_index(const std::map<std::string, std::string>& meta, const std::string& key) {
    const auto it = meta.find(key);
    if (it == meta.end() || it->second == "none") return std::nullopt;
    return static_cast<Index>(csv::parse_int(it->second));
}

} // namespace

csv::Table runlog_table(const RunLog& log, const std::map<std::string, std::string>& meta) {
    csv::Table t;
    t.meta = meta;
    t.meta["first_goal_step"] = opt_index(log.first_goal_step);
    t.meta["env_steps"] = std::to_string(log.env_steps);
    t.meta["train_steps"] = std::to_string(log.train_steps);
    t.meta["phase_boundary"] = opt_index(log.phase_boundary);
    t.header = {"env_step", "eval_mean_return", "eval_std_return", "goal_reach_flag", "phase", "episodes", "policy_ref"};
    for (const EvalRecord& r : log.evals) {
        t.rows.push_back({std::to_string(r.env_step), format_double(r.mean_return), format_double(r.std_return),
                          log.goal_reached_by(r.env_step) ? "1" : "0", r.phase, std::to_string(r.episodes),
                          r.policy_ref});
    }
    return t;
}

csv::Table evals_table(const RunLog& log, const std::map<std::string, std::string>& meta) {
    csv::Table t;
    t.meta = meta;
    t.header = {"env_step", "episode", "return"};
    for (const EvalRecord& r : log.evals) {
        for (std::size_t e = 0; e < r.returns.size(); ++e) {
            t.rows.push_back({std::to_string(r.env_step), std::to_string(e), format_double(r.returns[e])});
        }
    }
    return t;
}

csv::Table archive_table(const gep::Archive& archive, const gep::OutcomeSpaceSpec& spec,
                         const std::map<std::string, std::string>& meta) {
    csv::Table t;
    t.meta = meta;
    t.header = {"index", "episode_return", "episode_length"};
    for (const auto& n : spec.names) t.header.push_back("raw_" + n);
    for (const auto& n : spec.names) t.header.push_back("outcome_" + n);
    const Index p = archive.empty() ? 0 : archive[0].params.size();
    for (Index i = 0; i < p; ++i) t.header.push_back("param_" + std::to_string(i));

    for (const gep::ArchiveEntry& e : archive.entries()) {
        std::vector<std::string> row{std::to_string(e.trajectory_id), format_double(e.episode_return),
                                     std::to_string(e.episode_length)};
        for (Index i = 0; i < e.raw_outcome.size(); ++i) row.push_back(format_double(e.raw_outcome[i]));
        for (Index i = 0; i < e.outcome.size(); ++i) row.push_back(format_double(e.outcome[i]));
        for (Index i = 0; i < e.params.size(); ++i) row.push_back(format_double(e.params[i]));
        t.rows.push_back(std::move(row));
    }
    return t;
}

LoadedRun load_seed_dir(const std::filesystem::path& dir, bool load_policies) {
    LoadedRun run;
    run.directory = dir;
    const csv::Table curve = csv::read_table(dir / "runlog.csv");
    run.meta = curve.meta;
    run.log.first_goal_step = read_opt_index(curve.meta, "first_goal_step");
    run.log.phase_boundary = read_opt_index(curve.meta, "phase_boundary");
    if (auto it = curve.meta.find("env_steps"); it != curve.meta.end()) run.log.env_steps = csv::parse_int(it->second);
    if (auto it = curve.meta.find("train_steps"); it != curve.meta.end()) {
        run.log.train_steps = csv::parse_int(it->second);
    }

    std::map<Index, std::size_t> by_step;
    for (std::size_t i = 0; i < curve.rows.size(); ++i) {
        EvalRecord r;
        r.env_step = csv::parse_int(curve.at(i, "env_step"));
        r.phase = curve.at(i, "phase");
        r.mean_return = curve.number(i, "eval_mean_return");
        r.std_return = curve.number(i, "eval_std_return");
        r.episodes = csv::parse_int(curve.at(i, "episodes"));
        r.policy_ref = curve.at(i, "policy_ref");
        if (load_policies && !r.policy_ref.empty() && std::filesystem::exists(dir / r.policy_ref)) {
            r.policy = std::make_shared<const Controller>(load_controller(dir / r.policy_ref));
        }
        by_step[r.env_step] = run.log.evals.size();
        run.log.evals.push_back(std::move(r));
    }

    if (std::filesystem::exists(dir / "evals.csv")) {
        const csv::Table eps = csv::read_table(dir / "evals.csv");
        for (std::size_t i = 0; i < eps.rows.size(); ++i) {
            const auto it = by_step.find(csv::parse_int(eps.at(i, "env_step")));
            if (it == by_step.end()) throw InputDomainError((dir / "evals.csv").string() + ": unknown env_step");
            run.log.evals[it->second].returns.push_back(eps.number(i, "return"));
        }
    }

    if (std::filesystem::exists(dir / "archive.csv")) {
        const csv::Table arch = csv::read_table(dir / "archive.csv");
        std::vector<std::size_t> cols;
        for (std::size_t c = 0; c < arch.header.size(); ++c) {
            if (arch.header[c].rfind("outcome_", 0) == 0) cols.push_back(c);
        }
        MatrixXd pts(static_cast<Index>(cols.size()), static_cast<Index>(arch.rows.size()));
        for (std::size_t j = 0; j < arch.rows.size(); ++j) {
            for (std::size_t i = 0; i < cols.size(); ++i) {
                pts(static_cast<Index>(i), static_cast<Index>(j)) = csv::parse_double(arch.rows[j][cols[i]]);
            }
        }
        run.archive_outcomes = std::move(pts);
    }

    if (std::filesystem::exists(dir / "metrics.csv")) {
        const csv::Table m = csv::read_table(dir / "metrics.csv");
        if (!m.rows.empty()) {
            if (m.at(0, "absolute_metric") != "none") run.absolute_metric = m.number(0, "absolute_metric");
            if (m.at(0, "final_metric") != "none") run.final_metric = m.number(0, "final_metric");
        }
    }
    return run;
}

} // namespace geppg::runio
