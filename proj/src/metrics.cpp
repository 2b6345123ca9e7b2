#include "geppg/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>
#include <unordered_map>

namespace geppg::analysis {

Index best_record_index(const std::vector<EvalRecord>& evals) {
    if (evals.empty()) throw InputDomainError("best_record_index: empty evaluation history");
    Index best = 0;
    for (Index i = 1; i < static_cast<Index>(evals.size()); ++i) {
        if (evals[static_cast<std::size_t>(i)].mean_return > evals[static_cast<std::size_t>(best)].mean_return) {
            best = i;
        }
    }
    return best;
}

double absolute_metric(const std::vector<EvalRecord>& evals, const Environment& env, std::uint64_t seed,
                       Index episodes) {
    const EvalRecord& best = evals[static_cast<std::size_t>(best_record_index(evals))];
    if (!best.policy) {
        throw StateError("absolute_metric: no checkpoint for the record at step " + std::to_string(best.env_step));
    }
    Rng rng = make_stream(seed, Stream::analysis);
    return evaluate_controller(env, *best.policy, episodes, rng).mean();
}

double final_metric(const std::vector<EvalRecord>& evals, Index window) {
    const auto n = static_cast<Index>(evals.size());
    if (n < window) {
        throw InputDomainError("final_metric: need " + std::to_string(window) + " evaluation records, got " +
                               std::to_string(n) + " (short by " + std::to_string(window - n) + ")");
    }
    double sum = 0.0;
    Index count = 0;
    for (Index i = n - window; i < n; ++i) {
        const EvalRecord& r = evals[static_cast<std::size_t>(i)];
        if (r.returns.empty()) {
            sum += r.mean_return * static_cast<double>(r.episodes);
            count += r.episodes;
        } else {
            for (double v : r.returns) sum += v;
            count += static_cast<Index>(r.returns.size());
        }
    }
    if (count == 0) throw InputDomainError("final_metric: records hold no episodes");
    return sum / static_cast<double>(count);
}

// ---------------------------------------------------------------------------
// Diversity

namespace {

// Mean over points of the mean distance to their k nearest other points.
double mean_knn_distance(const MatrixXd& points, Index k) {
    const Index n = points.cols();
    std::vector<double> d(static_cast<std::size_t>(n - 1));
    double total = 0.0;
    for (Index i = 0; i < n; ++i) {
        std::size_t m = 0;
        for (Index j = 0; j < n; ++j) {
            if (j != i) d[m++] = (points.col(i) - points.col(j)).squaredNorm();
        }
        const auto kk = static_cast<std::ptrdiff_t>(k);
        std::nth_element(d.begin(), d.begin() + (kk - 1), d.end());
        double s = 0.0;
        for (std::ptrdiff_t q = 0; q < kk; ++q) s += std::sqrt(d[static_cast<std::size_t>(q)]);
        total += s / static_cast<double>(k);
    }
    return total / static_cast<double>(n);
}

} // namespace

double uniform_nn_baseline(Index n, Index d, Index repetitions) {
    if (n < 2 || d < 1 || repetitions < 1) throw InputDomainError("uniform_nn_baseline: need n >= 2, d >= 1");

    static std::mutex mutex;
    static std::map<std::tuple<Index, Index, Index>, double> cache;
    const auto key = std::make_tuple(n, d, repetitions);
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }

    Rng rng(mix_seed(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(d)));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double total = 0.0;
    MatrixXd pts(d, n);
    for (Index r = 0; r < repetitions; ++r) {
        for (Index j = 0; j < n; ++j) {
            for (Index i = 0; i < d; ++i) pts(i, j) = unit(rng);
        }
        total += mean_knn_distance(pts, 1);
    }
    const double value = total / static_cast<double>(repetitions);

    std::lock_guard lock(mutex);
    cache.emplace(key, value);
    return value;
}

double knn_diversity(const MatrixXd& points, Index k) {
    if (k < 1) throw InputDomainError("knn_diversity: k must be >= 1");
    if (points.cols() < k + 1) {
        throw InputDomainError("knn_diversity: need at least k + 1 = " + std::to_string(k + 1) + " points");
    }
    return mean_knn_distance(points, k) / uniform_nn_baseline(points.cols(), points.rows());
}

CellMetrics cell_metrics(const MatrixXd& points, Index cells_per_dim) {
    if (points.cols() == 0) throw InputDomainError("cell_metrics: no points");
    if (cells_per_dim < 1) throw InputDomainError("cell_metrics: cells_per_dim must be >= 1");
    const Index d = points.rows();
    if (static_cast<double>(d) * std::log2(static_cast<double>(cells_per_dim)) > 62.0) {
        throw InputDomainError("cell_metrics: grid too large");
    }

    std::unordered_map<std::uint64_t, Index> counts;
    for (Index j = 0; j < points.cols(); ++j) {
        std::uint64_t cell = 0;
        for (Index i = 0; i < d; ++i) {
            const double x = std::clamp(points(i, j), 0.0, 1.0);
            const auto c = std::min<Index>(cells_per_dim - 1, static_cast<Index>(x * static_cast<double>(cells_per_dim)));
            cell = cell * static_cast<std::uint64_t>(cells_per_dim) + static_cast<std::uint64_t>(c);
        }
        ++counts[cell];
    }

    CellMetrics m;
    m.total_cells = 1;
    for (Index i = 0; i < d; ++i) m.total_cells *= cells_per_dim;
    m.occupied_cells = static_cast<Index>(counts.size());
    m.coverage = static_cast<double>(m.occupied_cells) / static_cast<double>(m.total_cells);

    // Sum in cell order so the result does not depend on hash iteration order.
    std::vector<std::pair<std::uint64_t, Index>> sorted(counts.begin(), counts.end());
    std::sort(sorted.begin(), sorted.end());
    // H = ln n - (1/n) sum c ln c; equal occupancy is exactly ln(occupied).
    const bool uniform = std::all_of(sorted.begin(), sorted.end(),
                                     [&](const auto& e) { return e.second == sorted.front().second; });
    if (uniform) {
        m.entropy = std::log(static_cast<double>(m.occupied_cells));
    } else {
        const auto n = static_cast<double>(points.cols());
        double s = 0.0;
        for (const auto& [cell, count] : sorted) {
            const auto c = static_cast<double>(count);
            s += c * std::log(c);
        }
        m.entropy = std::max(0.0, std::log(n) - s / n);
    }
    return m;
}

CellMetrics cell_metrics_auto(const MatrixXd& points) {
    if (points.cols() == 0 || points.rows() == 0) throw InputDomainError("cell_metrics: no points");
    const double per_dim = std::pow(static_cast<double>(points.cols()), 1.0 / static_cast<double>(points.rows()));
    return cell_metrics(points, std::max<Index>(1, static_cast<Index>(std::llround(per_dim))));
}

double observation_diversity(const MatrixXd& observations) {
    if (observations.cols() == 0 || observations.rows() == 0) {
        throw InputDomainError("observation_diversity: no observations");
    }
    const VectorXd mean = observations.rowwise().mean();
    const VectorXd var = (observations.colwise() - mean).rowwise().squaredNorm() / static_cast<double>(observations.cols());
    return var.cwiseSqrt().mean();
}

} // namespace geppg::analysis
