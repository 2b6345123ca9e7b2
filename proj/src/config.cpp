#include "geppg/config.hpp"

#include "geppg/csv.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace geppg::config {

ConfigError::ConfigError(const std::string& key, int line, const std::string& message)
    : InputDomainError((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) + "'" + key + "': " + message),
      key_(key),
      line_(line) {}

namespace {

enum class Kind { choice, integer, real, boolean, seeds, text };

struct KeySpec {
    std::string name;
    Kind kind;
    std::string fallback;
    std::vector<std::string> choices = {};
    double min = 0.0;
    bool semantic = true;
};

const std::vector<KeySpec>& key_specs() {
    static const std::vector<KeySpec> specs = {
        {"absolute_episodes", Kind::integer, "100", {}, 1},
        {"actor_lr", Kind::real, "0.0001"},
        {"algorithm", Kind::choice, "gep_pg", {"gep", "ddpg", "gep_pg", "rp_pg"}},
        {"batch_size", Kind::integer, "64", {}, 1},
        {"buffer_capacity", Kind::integer, "1000000", {}, 1},
        {"checkpoints", Kind::choice, "all", {"all", "best", "none"}},
        {"critic_lr", Kind::real, "0.001"},
        {"environment", Kind::choice, "cmc", {"cmc"}},
        {"eval_episodes", Kind::integer, "10", {}, 1},
        {"filler", Kind::choice, "gep",
         {"gep", "random_policy_search", "ddpg_action_noise_frozen", "ddpg_param_noise_frozen"}},
        {"filler_episodes", Kind::integer, "50", {}, 0},
        {"gamma", Kind::real, "0.99"},
        {"gep_bootstrap_episodes", Kind::integer, "5", {}, 1},
        {"gep_k", Kind::integer, "1", {}, 1},
        {"gep_perturb_sigma", Kind::real, "0.01"},
        {"gep_policy", Kind::choice, "linear", {"linear", "mlp"}},
        {"master_seed", Kind::integer, "0", {}, 0},
        {"noise", Kind::choice, "ou", {"none", "ou", "ou_decreasing", "param"}},
        {"ou_dt", Kind::real, "0.01"},
        {"ou_sigma", Kind::real, "0.3"},
        {"ou_sigma_start", Kind::real, "0.6"},
        {"ou_theta", Kind::real, "0.15"},
        {"output_dir", Kind::text, "", {}, 0, false},
        {"param_adaptive", Kind::boolean, "false"},
        {"param_sigma", Kind::real, "0.2"},
        {"param_target_distance", Kind::real, "0.2"},
        {"scale_observations", Kind::boolean, "false"},
        {"seeds", Kind::seeds, "0..19"},
        {"tau", Kind::real, "0.001"},
        {"threads", Kind::integer, "1", {}, 1, false},
        {"total_steps", Kind::integer, "500000", {}, 1},
    };
    return specs;
}

const KeySpec& find_spec(const std::string& key, int line) {
    for (const auto& s : key_specs()) {
        if (s.name == key) return s;
    }
    throw ConfigError(key, line, "unknown key");
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string canonical_value(const KeySpec& spec, const std::string& raw, int line) {
    const std::string v = trim(raw);
    try {
        switch (spec.kind) {
        case Kind::choice:
            if (std::find(spec.choices.begin(), spec.choices.end(), v) == spec.choices.end()) {
                std::string all;
                for (const auto& c : spec.choices) all += (all.empty() ? "" : "|") + c;
                throw ConfigError(spec.name, line, "expected one of " + all + ", got '" + v + "'");
            }
            return v;
        case Kind::integer: {
            const std::int64_t x = csv::parse_int(v);
            if (static_cast<double>(x) < spec.min) {
                throw ConfigError(spec.name, line, "must be >= " + csv::format_double(spec.min));
            }
            return std::to_string(x);
        }
        case Kind::real: {
            const double x = csv::parse_double(v);
            if (!std::isfinite(x) || x < spec.min) throw ConfigError(spec.name, line, "must be a finite number >= 0");
            return csv::format_double(x);
        }
        case Kind::boolean:
            if (v == "true" || v == "1" || v == "yes" || v == "on") return "true";
            if (v == "false" || v == "0" || v == "no" || v == "off") return "false";
            throw ConfigError(spec.name, line, "expected true or false, got '" + v + "'");
        case Kind::seeds: {
            const auto seeds = parse_seed_list(v);
            std::string out;
            for (auto s : seeds) out += (out.empty() ? "" : ",") + std::to_string(s);
            return out;
        }
        case Kind::text:
            return v;
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const InputDomainError& e) {
        throw ConfigError(spec.name, line, e.what());
    }
    return v;
}

} // namespace

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        part = trim(part);
        if (const auto dots = part.find(".."); dots != std::string::npos) {
            const std::uint64_t a = csv::parse_uint(trim(part.substr(0, dots)));
            const std::uint64_t b = csv::parse_uint(trim(part.substr(dots + 2)));
            if (b < a) throw InputDomainError("seed range '" + part + "' is empty");
            for (std::uint64_t s = a; s <= b; ++s) seeds.push_back(s);
        } else {
            seeds.push_back(csv::parse_uint(part));
        }
    }
    if (seeds.empty()) throw InputDomainError("seed list is empty");
    std::set<std::uint64_t> seen;
    for (auto s : seeds) {
        if (!seen.insert(s).second) throw InputDomainError("seed " + std::to_string(s) + " listed twice");
    }
    return seeds;
}

RunConfig::RunConfig() {
    for (const auto& s : key_specs()) values_[s.name] = canonical_value(s, s.fallback, 0);
}

void RunConfig::set(const std::string& key, const std::string& value, int line) {
    const KeySpec& spec = find_spec(key, line);
    values_[key] = canonical_value(spec, value, line);
}

const std::string& RunConfig::get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError(key, 0, "unknown key");
    return it->second;
}

std::string RunConfig::canonical_text() const {
    std::string out;
    for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
    return out;
}

std::string RunConfig::content_hash() const {
    std::string text;
    for (const auto& [k, v] : values_) {
        if (is_semantic(k)) text += k + "=" + v + "\n";
    }
    return csv::fnv1a_hex(text);
}

const std::vector<std::string>& RunConfig::keys() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& s : key_specs()) n.push_back(s.name);
        return n;
    }();
    return names;
}

bool RunConfig::is_semantic(const std::string& key) { return find_spec(key, 0).semantic; }

void apply_text(RunConfig& config, std::istream& is) {
    std::string line;
    int number = 0;
    while (std::getline(is, line)) {
        ++number;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(line, number, "expected 'key = value'");
        config.set(trim(line.substr(0, eq)), line.substr(eq + 1), number);
    }
}

void apply_override(RunConfig& config, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError(assignment, 0, "expected key=value");
    config.set(trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

namespace {

const std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>>& presets() {
    static const std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>> p = {
        {"cmc_gep", {{"algorithm", "gep"}}},
        {"cmc_gep_mlp", {{"algorithm", "gep"}, {"gep_policy", "mlp"}}},
        {"cmc_ddpg_ou", {{"algorithm", "ddpg"}, {"noise", "ou"}}},
        {"cmc_ddpg_ou_decreasing", {{"algorithm", "ddpg"}, {"noise", "ou_decreasing"}}},
        {"cmc_ddpg_param", {{"algorithm", "ddpg"}, {"noise", "param"}}},
        {"cmc_ddpg_none", {{"algorithm", "ddpg"}, {"noise", "none"}}},
        {"cmc_geppg", {{"algorithm", "gep_pg"}, {"noise", "param"}}},
        {"cmc_geppg_param", {{"algorithm", "gep_pg"}, {"noise", "param"}}},
        {"cmc_geppg_ou", {{"algorithm", "gep_pg"}, {"noise", "ou"}}},
        {"cmc_geppg_ou_decreasing", {{"algorithm", "gep_pg"}, {"noise", "ou_decreasing"}}},
        {"cmc_rppg", {{"algorithm", "rp_pg"}, {"noise", "param"}}},
    };
    return p;
}

} // namespace

std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (const auto& [n, _] : presets()) names.push_back(n);
    return names;
}

bool is_preset(const std::string& name) {
    const auto& p = presets();
    return std::any_of(p.begin(), p.end(), [&](const auto& e) { return e.first == name; });
}

RunConfig preset(const std::string& name) {
    for (const auto& [n, entries] : presets()) {
        if (n != name) continue;
        RunConfig c;
        for (const auto& [k, v] : entries) c.set(k, v);
        return c;
    }
    throw InputDomainError("unknown preset '" + name + "'");
}

RunConfig load(const std::string& preset_or_path) {
    if (is_preset(preset_or_path)) return preset(preset_or_path);
    std::ifstream in(preset_or_path);
    if (!in) {
        std::string names;
        for (const auto& n : preset_names()) names += " " + n;
        throw InputDomainError("'" + preset_or_path + "' is neither a readable file nor a preset (presets:" + names + ")");
    }
    RunConfig c;
    apply_text(c, in);
    return c;
}

pipeline::ExperimentPlan to_plan(const RunConfig& c) {
    auto integer = [&](const std::string& k) { return static_cast<Index>(csv::parse_int(c.get(k))); };
    auto real = [&](const std::string& k) { return csv::parse_double(c.get(k)); };
    auto boolean = [&](const std::string& k) { return c.get(k) == "true"; };

    pipeline::ExperimentPlan p;
    p.algorithm = pipeline::algorithm_from_string(c.get("algorithm"));
    p.environment = c.get("environment");
    p.filler = pipeline::filler_kind_from_string(c.get("filler"));
    p.filler_episodes = integer("filler_episodes");
    p.total_steps = integer("total_steps");
    p.master_seed = csv::parse_uint(c.get("master_seed"));
    p.seeds = parse_seed_list(c.get("seeds"));
    p.absolute_episodes = integer("absolute_episodes");
    p.checkpoints = pipeline::checkpoint_policy_from_string(c.get("checkpoints"));
    p.threads = integer("threads");

    p.noise.kind = ddpg::noise_kind_from_string(c.get("noise"));
    p.noise.ou_theta = real("ou_theta");
    p.noise.ou_sigma = real("ou_sigma");
    p.noise.ou_dt = real("ou_dt");
    p.noise.ou_sigma_start = real("ou_sigma_start");
    p.noise.param_sigma = real("param_sigma");
    p.noise.param_adaptive = boolean("param_adaptive");
    p.noise.param_target_distance = real("param_target_distance");

    p.ddpg.gamma = real("gamma");
    p.ddpg.tau = real("tau");
    p.ddpg.batch_size = integer("batch_size");
    p.ddpg.actor_lr = real("actor_lr");
    p.ddpg.critic_lr = real("critic_lr");
    p.ddpg.buffer_capacity = integer("buffer_capacity");
    p.ddpg.eval_episodes = integer("eval_episodes");
    p.ddpg.scale_observations = boolean("scale_observations");

    p.gep.policy = gep::policy_kind_from_string(c.get("gep_policy"));
    p.gep.bootstrap_episodes = integer("gep_bootstrap_episodes");
    p.gep.perturb_sigma = real("gep_perturb_sigma");
    p.gep.k = integer("gep_k");
    p.validate();
    return p;
}

RunConfig from_plan(const pipeline::ExperimentPlan& p, const std::string& output_dir) {
    auto num = [](double x) { return csv::format_double(x); };
    RunConfig c;
    c.set("algorithm", pipeline::to_string(p.algorithm));
    c.set("environment", p.environment);
    c.set("filler", pipeline::to_string(p.filler));
    c.set("filler_episodes", std::to_string(p.filler_episodes));
    c.set("total_steps", std::to_string(p.total_steps));
    c.set("master_seed", std::to_string(p.master_seed));
    std::string seeds;
    for (auto s : p.seeds) seeds += (seeds.empty() ? "" : ",") + std::to_string(s);
    c.set("seeds", seeds);
    c.set("absolute_episodes", std::to_string(p.absolute_episodes));
    c.set("checkpoints", pipeline::to_string(p.checkpoints));
    c.set("threads", std::to_string(p.threads));
    c.set("output_dir", output_dir);

    c.set("noise", ddpg::to_string(p.noise.kind));
    c.set("ou_theta", num(p.noise.ou_theta));
    c.set("ou_sigma", num(p.noise.ou_sigma));
    c.set("ou_dt", num(p.noise.ou_dt));
    c.set("ou_sigma_start", num(p.noise.ou_sigma_start));
    c.set("param_sigma", num(p.noise.param_sigma));
    c.set("param_adaptive", p.noise.param_adaptive ? "true" : "false");
    c.set("param_target_distance", num(p.noise.param_target_distance));

    c.set("gamma", num(p.ddpg.gamma));
    c.set("tau", num(p.ddpg.tau));
    c.set("batch_size", std::to_string(p.ddpg.batch_size));
    c.set("actor_lr", num(p.ddpg.actor_lr));
    c.set("critic_lr", num(p.ddpg.critic_lr));
    c.set("buffer_capacity", std::to_string(p.ddpg.buffer_capacity));
    c.set("eval_episodes", std::to_string(p.ddpg.eval_episodes));
    c.set("scale_observations", p.ddpg.scale_observations ? "true" : "false");

    c.set("gep_policy", gep::to_string(p.gep.policy));
    c.set("gep_bootstrap_episodes", std::to_string(p.gep.bootstrap_episodes));
    c.set("gep_perturb_sigma", num(p.gep.perturb_sigma));
    c.set("gep_k", std::to_string(p.gep.k));
    return c;
}

} // namespace geppg::config
