#ifndef GEPPG_CONFIG_HPP
#define GEPPG_CONFIG_HPP

#include "geppg/pipeline.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace geppg::config {

/// Malformed or unknown configuration entry; `line` is 0 for overrides.
class ConfigError : public InputDomainError {
public:
    ConfigError(const std::string& key, int line, const std::string& message);

    const std::string& key() const { return key_; }
    int line() const { return line_; }

private:
    std::string key_;
    int line_;
};

/**
 * Flat `key = value` run configuration. Every known key is always present
 * (defaults filled in), values are stored in canonical form, and keys are
 * iterated in sorted order, so equal configurations print identically.
 */
class RunConfig {
public:
    RunConfig();

    /// Validates and canonicalizes `value`; unknown keys throw ConfigError.
    void set(const std::string& key, const std::string& value, int line = 0);
    const std::string& get(const std::string& key) const;

    const std::map<std::string, std::string>& values() const { return values_; }

    /// `key = value` lines in key order.
    std::string canonical_text() const;
    /// Hash of the keys that affect results (output location and thread count excluded).
    std::string content_hash() const;

    static const std::vector<std::string>& keys();
    static bool is_semantic(const std::string& key);

private:
    std::map<std::string, std::string> values_;
};

/// Applies `key = value` lines; `#` starts a comment.
void apply_text(RunConfig& config, std::istream& is);
/// Applies one `key=value` override.
void apply_override(RunConfig& config, const std::string& assignment);

/// Names of built-in configurations.
std::vector<std::string> preset_names();
bool is_preset(const std::string& name);
RunConfig preset(const std::string& name);

/// A preset name or a path to a config file (applied over the defaults).
RunConfig load(const std::string& preset_or_path);

pipeline::ExperimentPlan to_plan(const RunConfig& config);
RunConfig from_plan(const pipeline::ExperimentPlan& plan, const std::string& output_dir = "");

/// "0,1,5" or "a..b" (inclusive).
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

} // namespace geppg::config

#endif
