#include "geppg/pipeline.hpp"

#include "geppg/analysis.hpp"
#include "geppg/config.hpp"
#include "geppg/csv.hpp"
#include "geppg/runio.hpp"

#include <json.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

namespace geppg::pipeline {

std::string to_string(Algorithm a) {
    switch (a) {
    case Algorithm::gep: return "gep";
    case Algorithm::ddpg: return "ddpg";
    case Algorithm::gep_pg: return "gep_pg";
    case Algorithm::rp_pg: return "rp_pg";
    }
    return "?";
}

Algorithm algorithm_from_string(const std::string& s) {
    for (Algorithm a : {Algorithm::gep, Algorithm::ddpg, Algorithm::gep_pg, Algorithm::rp_pg}) {
        if (to_string(a) == s) return a;
    }
    throw InputDomainError("unknown algorithm '" + s + "'");
}

std::string to_string(FillerKind k) {
    switch (k) {
    case FillerKind::gep: return "gep";
    case FillerKind::random_policy_search: return "random_policy_search";
    case FillerKind::ddpg_action_noise_frozen: return "ddpg_action_noise_frozen";
    case FillerKind::ddpg_param_noise_frozen: return "ddpg_param_noise_frozen";
    }
    return "?";
}

FillerKind filler_kind_from_string(const std::string& s) {
    for (FillerKind k : {FillerKind::gep, FillerKind::random_policy_search, FillerKind::ddpg_action_noise_frozen,
                         FillerKind::ddpg_param_noise_frozen}) {
        if (to_string(k) == s) return k;
    }
    throw InputDomainError("unknown buffer filler '" + s + "'");
}

std::string to_string(CheckpointPolicy c) {
    switch (c) {
    case CheckpointPolicy::all: return "all";
    case CheckpointPolicy::best: return "best";
    case CheckpointPolicy::none: return "none";
    }
    return "?";
}

CheckpointPolicy checkpoint_policy_from_string(const std::string& s) {
    for (CheckpointPolicy c : {CheckpointPolicy::all, CheckpointPolicy::best, CheckpointPolicy::none}) {
        if (to_string(c) == s) return c;
    }
    throw InputDomainError("unknown checkpoint policy '" + s + "'");
}

std::vector<std::uint64_t> ExperimentPlan::default_seeds(Index n) {
    std::vector<std::uint64_t> s(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) s[static_cast<std::size_t>(i)] = static_cast<std::uint64_t>(i);
    return s;
}

void ExperimentPlan::validate() const {
    if (seeds.empty()) throw InputDomainError("ExperimentPlan: need at least one seed");
    if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
        throw InputDomainError("ExperimentPlan: seeds must be pairwise distinct");
    }
    if (filler_episodes < 0) throw InputDomainError("ExperimentPlan: filler_episodes must be >= 0");
    if (total_steps < 1) throw InputDomainError("ExperimentPlan: total_steps must be >= 1");
    if (threads < 1) throw InputDomainError("ExperimentPlan: threads must be >= 1");
    if (absolute_episodes < 1) throw InputDomainError("ExperimentPlan: absolute_episodes must be >= 1");
    if (algorithm == Algorithm::ddpg && total_steps % eval_period() != 0) {
        throw InputDomainError("ExperimentPlan: DDPG total_steps must be a multiple of " + std::to_string(eval_period()));
    }
    gep.validate();
}

Index second_phase_budget(Index total_steps, Index filler_steps, Index eval_period) {
    const Index remaining = std::max<Index>(0, total_steps - filler_steps);
    const Index periods = (remaining + eval_period / 2) / eval_period;
    return std::max<Index>(1, periods) * eval_period;
}

namespace {

gep::GepRunOptions gep_options(const ExperimentPlan& plan, std::uint64_t seed, const std::string& phase,
                               const EvalHook& hook) {
    gep::GepRunOptions o;
    o.seed = seed;
    o.evaluate = true;
    o.eval_period = plan.eval_period();
    o.eval_episodes = plan.ddpg.eval_episodes;
    o.phase = phase;
    o.eval_hook = hook;
    return o;
}

// The second phase and the frozen-DDPG filler draw from their own streams.
std::uint64_t filler_agent_seed(std::uint64_t seed) { return mix_seed(seed, 1); }
std::uint64_t learner_seed(std::uint64_t seed) { return mix_seed(seed, 2); }

} // namespace

FillResult fill_buffer(FillerKind kind, Index episodes, Environment& env, const ExperimentPlan& plan,
                       std::uint64_t seed, const EvalHook& hook) {
    if (episodes < 1) throw InputDomainError("fill_buffer: need at least one episode");
    FillResult out{ddpg::ReplayBuffer(plan.ddpg.buffer_capacity, env.observation_dim(), env.action_dim()), {}, {}};
    const gep::OutcomeSpaceSpec spec = gep::cmc_outcome_space();

    switch (kind) {
    case FillerKind::gep: {
        gep::GepConfig g = plan.gep;
        g.step_budget.reset();
        g.bootstrap_episodes = std::min(g.bootstrap_episodes, episodes);
        g.goal_episodes = episodes - g.bootstrap_episodes;
        gep::GepResult r = gep::run_gep(env, g, spec, gep_options(plan, seed, "gep", hook));
        out.buffer.push_all(r.transitions);
        out.log = std::move(r.log);
        out.archive = std::move(r.archive);
        break;
    }
    case FillerKind::random_policy_search: {
        gep::GepResult r = gep::run_random_policy_search(env, plan.gep, spec, episodes,
                                                         gep_options(plan, seed, "random_policy_search", hook));
        out.buffer.push_all(r.transitions);
        out.log = std::move(r.log);
        out.archive = std::move(r.archive);
        break;
    }
    case FillerKind::ddpg_action_noise_frozen:
    case FillerKind::ddpg_param_noise_frozen: {
        ddpg::DdpgConfig cfg = plan.ddpg;
        cfg.learning_enabled = false;
        ddpg::NoiseConfig noise = plan.noise;
        noise.kind = kind == FillerKind::ddpg_param_noise_frozen ? ddpg::NoiseKind::param : ddpg::NoiseKind::ou;
        const std::uint64_t s = filler_agent_seed(seed);
        Rng init = make_stream(s, Stream::net_init);
        const ddpg::DdpgAgent agent(cfg, env, init);
        out.log = ddpg::explore_frozen(env, agent, out.buffer, cfg, noise, episodes, s);
        break;
    }
    }
    return out;
}

SeedResult run_gep_pg(const ExperimentPlan& plan, Environment& env, std::uint64_t seed, const EvalHook& hook) {
    if (!plan.two_phase()) throw InputDomainError("run_gep_pg: plan is not a two-phase algorithm");

    SeedResult result;
    std::optional<ddpg::ReplayBuffer> buffer;
    if (plan.filler_episodes > 0) {
        FillResult fill = fill_buffer(plan.effective_filler(), plan.filler_episodes, env, plan, seed, hook);
        buffer.emplace(std::move(fill.buffer));
        result.log = std::move(fill.log);
        result.archive = std::move(fill.archive);
    } else {
        buffer.emplace(plan.ddpg.buffer_capacity, env.observation_dim(), env.action_dim());
    }

    const Index boundary = result.log.env_steps;
    const std::uint64_t s = learner_seed(seed);
    Rng init = make_stream(s, Stream::net_init);
    ddpg::DdpgAgent agent(plan.ddpg, env, init);

    ddpg::RunOptions options;
    options.seed = s;
    options.start_step = boundary;
    options.phase = "ddpg";
    options.eval_hook = hook;
    const RunLog tail = ddpg::run_ddpg(env, agent, *buffer, plan.ddpg, plan.noise,
                                       second_phase_budget(plan.total_steps, boundary, plan.eval_period()), options);
    append_runlog(result.log, tail);
    result.log.phase_boundary = boundary;
    return result;
}

SeedResult run_seed(const ExperimentPlan& plan, Environment& env, std::uint64_t seed, const EvalHook& hook) {
    switch (plan.algorithm) {
    case Algorithm::gep: {
        gep::GepConfig g = plan.gep;
        g.step_budget = plan.total_steps;
        gep::GepRunOptions o = gep_options(plan, seed, "gep", hook);
        o.keep_transitions = false;
        gep::GepResult r = gep::run_gep(env, g, gep::cmc_outcome_space(), o);
        return {std::move(r.log), std::move(r.archive)};
    }
    case Algorithm::ddpg: {
        Rng init = make_stream(seed, Stream::net_init);
        ddpg::DdpgAgent agent(plan.ddpg, env, init);
        ddpg::ReplayBuffer buffer(plan.ddpg.buffer_capacity, env.observation_dim(), env.action_dim());
        ddpg::RunOptions o;
        o.seed = seed;
        o.eval_hook = hook;
        return {ddpg::run_ddpg(env, agent, buffer, plan.ddpg, plan.noise, plan.total_steps, o), std::nullopt};
    }
    case Algorithm::gep_pg:
    case Algorithm::rp_pg:
        return run_gep_pg(plan, env, seed, hook);
    }
    throw InputDomainError("run_seed: unknown algorithm");
}

// ---------------------------------------------------------------------------
// Experiment runner

bool Manifest::complete() const {
    return std::all_of(seeds.begin(), seeds.end(), [](const SeedStatus& s) { return s.status == "ok"; });
}

void write_manifest(const std::filesystem::path& path, const Manifest& m) {
    nlohmann::ordered_json j;
    j["config_hash"] = m.config_hash;
    j["environment_hash"] = m.environment_hash;
    nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
    for (const auto& [k, v] : m.config) cfg[k] = v;
    j["config"] = cfg;
    j["complete"] = m.complete();
    nlohmann::ordered_json seeds = nlohmann::ordered_json::array();
    for (const SeedStatus& s : m.seeds) {
        nlohmann::ordered_json e;
        e["seed"] = s.seed;
        e["status"] = s.status;
        e["directory"] = s.directory;
        if (!s.error.empty()) e["error"] = s.error;
        e["first_goal_step"] = s.first_goal_step ? nlohmann::ordered_json(*s.first_goal_step) : nullptr;
        if (s.absolute_metric) e["absolute_metric"] = csv::format_double(*s.absolute_metric);
        if (s.final_metric) e["final_metric"] = csv::format_double(*s.final_metric);
        seeds.push_back(std::move(e));
    }
    j["seeds"] = seeds;

    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << j.dump(2) << '\n';
    }
    std::filesystem::rename(tmp, path);
}

Manifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputDomainError("cannot open " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw InputDomainError(path.string() + ": " + e.what());
    }
    Manifest m;
    m.config_hash = j.value("config_hash", "");
    m.environment_hash = j.value("environment_hash", "");
    if (j.contains("config")) {
        for (const auto& [k, v] : j["config"].items()) m.config.emplace_back(k, v.get<std::string>());
    }
    for (const auto& e : j.value("seeds", nlohmann::json::array())) {
        SeedStatus s;
        s.seed = e.value("seed", std::uint64_t{0});
        s.status = e.value("status", "pending");
        s.directory = e.value("directory", "");
        s.error = e.value("error", "");
        if (e.contains("first_goal_step") && !e["first_goal_step"].is_null()) {
            s.first_goal_step = e["first_goal_step"].get<Index>();
        }
        if (e.contains("absolute_metric")) s.absolute_metric = csv::parse_double(e["absolute_metric"].get<std::string>());
        if (e.contains("final_metric")) s.final_metric = csv::parse_double(e["final_metric"].get<std::string>());
        m.seeds.push_back(std::move(s));
    }
    return m;
}

namespace {

std::string checkpoint_name(Index env_step) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "checkpoints/step_%010lld.bin", static_cast<long long>(env_step));
    return buf;
}

std::string opt_number(const std::optional<double>& v) { return v ? csv::format_double(*v) : "none"; }

void run_one_seed(const ExperimentPlan& plan, const Environment& prototype, const std::filesystem::path& dir,
                  const std::map<std::string, std::string>& meta, SeedStatus& status) {
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir / "checkpoints");

    const std::uint64_t seed = geppg::run_seed(plan.master_seed, status.seed);
    const auto env = prototype.clone();

    EvalHook hook;
    if (plan.checkpoints == CheckpointPolicy::all) {
        hook = [&dir](EvalRecord& rec) {
            rec.policy_ref = checkpoint_name(rec.env_step);
            save_controller(dir / rec.policy_ref, *rec.policy);
        };
    }
    SeedResult r = pipeline::run_seed(plan, *env, seed, hook);

    if (!r.log.evals.empty()) {
        const Index best = analysis::best_record_index(r.log.evals);
        EvalRecord& rec = r.log.evals[static_cast<std::size_t>(best)];
        if (plan.checkpoints == CheckpointPolicy::best) {
            rec.policy_ref = checkpoint_name(rec.env_step);
            save_controller(dir / rec.policy_ref, *rec.policy);
        }
        status.absolute_metric = analysis::absolute_metric(r.log.evals, *env, seed, plan.absolute_episodes);
    }
    if (static_cast<Index>(r.log.evals.size()) >= 10) status.final_metric = analysis::final_metric(r.log.evals);
    status.first_goal_step = r.log.first_goal_step;

    std::map<std::string, std::string> seed_meta = meta;
    seed_meta["seed"] = std::to_string(status.seed);
    csv::write_table(dir / "runlog.csv", runio::runlog_table(r.log, seed_meta));
    csv::write_table(dir / "evals.csv", runio::evals_table(r.log, seed_meta));
    if (r.archive) csv::write_table(dir / "archive.csv", runio::archive_table(*r.archive, gep::cmc_outcome_space(), seed_meta));

    csv::Table metrics;
    metrics.meta = seed_meta;
    metrics.header = {"absolute_metric", "final_metric", "first_goal_step", "env_steps", "train_steps"};
    metrics.rows.push_back({opt_number(status.absolute_metric), opt_number(status.final_metric),
                            r.log.first_goal_step ? std::to_string(*r.log.first_goal_step) : "none",
                            std::to_string(r.log.env_steps), std::to_string(r.log.train_steps)});
    csv::write_table(dir / "metrics.csv", metrics);
}

} // namespace

Manifest run_experiment(const ExperimentPlan& plan, const std::filesystem::path& out_dir,
                        const SeedCallback& on_seed_done) {
    plan.validate();
    const auto env = make_environment(plan.environment);
    const config::RunConfig cfg = config::from_plan(plan, out_dir.string());

    Manifest manifest;
    manifest.config_hash = cfg.content_hash();
    manifest.environment_hash = csv::fnv1a_hex(env->fingerprint());
    for (const auto& [k, v] : cfg.values()) manifest.config.emplace_back(k, v);
    for (std::uint64_t s : plan.seeds) {
        SeedStatus st;
        st.seed = s;
        st.directory = "seed_" + std::to_string(s);
        manifest.seeds.push_back(std::move(st));
    }

    std::filesystem::create_directories(out_dir);
    const std::filesystem::path manifest_path = out_dir / "manifest.json";
    std::mutex sink;
    write_manifest(manifest_path, manifest);

    const std::map<std::string, std::string> meta = {{"config_hash", manifest.config_hash},
                                                     {"environment_hash", manifest.environment_hash},
                                                     {"algorithm", to_string(plan.algorithm)}};

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < manifest.seeds.size(); i = next++) {
            SeedStatus status = manifest.seeds[i];
            try {
                run_one_seed(plan, *env, out_dir / status.directory, meta, status);
                status.status = "ok";
            } catch (const std::exception& e) {
                status.status = "failed";
                status.error = e.what();
            }
            std::lock_guard lock(sink);
            manifest.seeds[i] = status;
            write_manifest(manifest_path, manifest);
            if (on_seed_done) on_seed_done(status);
        }
    };

    const auto n_threads = static_cast<std::size_t>(std::min<Index>(plan.threads, static_cast<Index>(plan.seeds.size())));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return manifest;
}

} // namespace geppg::pipeline
