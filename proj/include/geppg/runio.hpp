#ifndef GEPPG_RUNIO_HPP
#define GEPPG_RUNIO_HPP

#include "geppg/csv.hpp"
#include "geppg/gep.hpp"
#include "geppg/runlog.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace geppg::runio {

/// Per-eval learning curve. Summary fields (first goal, step counts, phase
/// boundary) and `meta` go into `# key=value` header lines.
csv::Table runlog_table(const RunLog& log, const std::map<std::string, std::string>& meta);
/// One row per evaluation episode.
csv::Table evals_table(const RunLog& log, const std::map<std::string, std::string>& meta);
csv::Table archive_table(const gep::Archive& archive, const gep::OutcomeSpaceSpec& spec,
                         const std::map<std::string, std::string>& meta);

struct LoadedRun {
    std::filesystem::path directory;
    std::map<std::string, std::string> meta;
    RunLog log;
    /// Normalized outcomes, one column per archive entry.
    std::optional<MatrixXd> archive_outcomes;
    std::optional<double> absolute_metric;
    std::optional<double> final_metric;
};

/// Reads a seed directory written by run_experiment. With `load_policies`,
/// every record whose checkpoint exists gets its controller attached.
LoadedRun load_seed_dir(const std::filesystem::path& dir, bool load_policies = false);

} // namespace geppg::runio

#endif
