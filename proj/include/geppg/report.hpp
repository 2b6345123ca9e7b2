#ifndef GEPPG_REPORT_HPP
#define GEPPG_REPORT_HPP

#include "geppg/csv.hpp"
#include "geppg/pipeline.hpp"
#include "geppg/runio.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace geppg::report {

/// The completed seeds of one experiment directory.
struct RunGroup {
    std::string label;
    std::filesystem::path directory;
    pipeline::Manifest manifest;
    std::vector<runio::LoadedRun> runs;
    /// One line per skipped seed.
    std::vector<std::string> warnings;

    std::vector<double> absolute_metrics() const;
    std::vector<double> final_metrics() const;
};

/// Loads a run directory; seeds that failed or lack output files are skipped
/// with a warning. Missing absolute metrics are recomputed from checkpoints.
RunGroup load_group(const std::filesystem::path& dir);

/// Throws InputDomainError when the groups were run on different environments.
void check_environments(const std::vector<RunGroup>& groups);

// ---------------------------------------------------------------------------
// Analysis

struct AnalysisReport {
    csv::Table metrics;
    csv::Table comparisons;
    csv::Table diversity;
    csv::Table correlation;
};

/// Metric table per group, pairwise comparisons (both tests, both metrics),
/// archive diversity where archives exist, and the absolute/final correlation.
AnalysisReport analyze(const std::vector<RunGroup>& groups, Rng& rng, double alpha = 0.05, Index resamples = 10'000);

/// Fixed-width rendering of a table for terminal output.
std::string format_table(const csv::Table& t);

// ---------------------------------------------------------------------------
// Plots

enum class PlotKind { learning_curve, histogram, first_goal_histogram, correlation_scatter };

std::string to_string(PlotKind k);
PlotKind plot_kind_from_string(const std::string& s);

struct PlotOutput {
    csv::Table data;
    std::string svg;
    std::vector<std::string> notes;
};

/// Nearest multiple of `resolution` (halves round up).
Index snap_step(Index step, Index resolution);

/**
 * Mean and standard error across seeds against env steps. Evaluation steps
 * are snapped to the `resolution` grid; groups whose grids differ are
 * resampled to the coarsest one (holding the last value) and a note is added.
 */
PlotOutput learning_curve(const std::vector<RunGroup>& groups, Index resolution = 2000);
PlotOutput histogram(const std::vector<RunGroup>& groups, Index bins = 10);
PlotOutput first_goal_histogram(const std::vector<RunGroup>& groups, Index horizon = 50'000, Index bin_width = 5000);
PlotOutput correlation_scatter(const std::vector<RunGroup>& groups);

PlotOutput make_plot(PlotKind kind, const std::vector<RunGroup>& groups);

} // namespace geppg::report

#endif
