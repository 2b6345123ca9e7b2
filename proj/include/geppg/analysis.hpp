#ifndef GEPPG_ANALYSIS_HPP
#define GEPPG_ANALYSIS_HPP

#include "geppg/runlog.hpp"

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace geppg::analysis {

// ---------------------------------------------------------------------------
// Special functions

/// Regularized incomplete beta I_x(a, b) (Boost.Math).
double regularized_incomplete_beta(double a, double b, double x);

/// Two-sided tail probability P(|T| >= |t|) for Student's t with `dof` degrees of freedom.
double student_t_two_sided_p(double t, double dof);

// ---------------------------------------------------------------------------
// Tests

struct TTestResult {
    double t = 0.0;
    double p = 1.0;
    double dof = 0.0;
};

/// Welch two-sample t-test, two-sided. Both samples with zero variance and
/// equal means give t = 0, p = 1; zero variance with different means throws.
TTestResult t_test(std::span<const double> a, std::span<const double> b);

struct BootstrapResult {
    double mean_diff = 0.0;
    double lo = 0.0;
    double hi = 0.0;

    bool significant() const { return lo > 0.0 || hi < 0.0; }
};

/// Percentile bootstrap of mean(a) - mean(b): each group resampled with
/// replacement, 2.5 / 97.5 percentiles of the resampled differences
/// (linear interpolation between order statistics).
BootstrapResult bootstrap_ci(std::span<const double> a, std::span<const double> b, Rng& rng,
                             Index resamples = 10'000, double confidence = 0.95);

struct ComparisonReport {
    double t_statistic = 0.0;
    double t_p_value = 1.0;
    double bootstrap_mean_diff = 0.0;
    double bootstrap_lo = 0.0;
    double bootstrap_hi = 0.0;
    bool t_significant = false;
    bool bootstrap_significant = false;
};

ComparisonReport compare(std::span<const double> a, std::span<const double> b, Rng& rng, double alpha = 0.05,
                         Index resamples = 10'000);

struct PearsonResult {
    double r = 0.0;
    double p = 1.0;
    double slope = 0.0;
    double intercept = 0.0;
};

/// Sample Pearson correlation with two-sided p-value and least-squares line y = slope x + intercept.
PearsonResult pearson(std::span<const double> x, std::span<const double> y);

struct SplitVariability {
    double t_test_percent = 0.0;
    double bootstrap_percent = 0.0;
};

/// Repeatedly splits 40 randomly chosen runs into two disjoint groups of 20
/// and reports the percentage of splits each test flags as significant.
SplitVariability split_variability(std::span<const double> runs, Rng& rng, Index splits = 1000,
                                   Index group_size = 20, double alpha = 0.05, Index resamples = 10'000);

// ---------------------------------------------------------------------------
// Performance metrics

/// Index of the record with the highest mean return; earliest on ties.
Index best_record_index(const std::vector<EvalRecord>& evals);

/// Best checkpoint re-evaluated over `episodes` noiseless episodes; returns the mean.
double absolute_metric(const std::vector<EvalRecord>& evals, const Environment& env, std::uint64_t seed,
                       Index episodes = 100);

/// Mean of the per-episode returns of the last `window` records.
double final_metric(const std::vector<EvalRecord>& evals, Index window = 10);

// ---------------------------------------------------------------------------
// Diversity of outcomes / observations (points are columns in [0, 1]^d)

/// Expected mean 1-NN distance of n uniform points in [0, 1]^d, Monte Carlo
/// over `repetitions` draws with a fixed seed, cached per (n, d).
double uniform_nn_baseline(Index n, Index d, Index repetitions = 200);

/// Mean distance to the k nearest neighbours, normalized by the uniform 1-NN baseline.
double knn_diversity(const MatrixXd& points, Index k);

struct CellMetrics {
    double coverage = 0.0;
    double entropy = 0.0;
    Index total_cells = 0;
    Index occupied_cells = 0;
};

/// Regular grid with `cells_per_dim` cells along each axis.
CellMetrics cell_metrics(const MatrixXd& points, Index cells_per_dim);

/// Grid whose total cell count is as close as possible to the number of
/// points: cells_per_dim = max(1, round(n^(1/d))).
CellMetrics cell_metrics_auto(const MatrixXd& points);

/// Population standard deviation of each row, averaged across rows.
double observation_diversity(const MatrixXd& observations);

} // namespace geppg::analysis

#endif
