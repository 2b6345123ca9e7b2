#include "geppg/analysis.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace geppg::analysis {

namespace {

double mean_of(std::span<const double> x) {
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

// Unbiased sample variance.
double variance_of(std::span<const double> x, double m) {
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return ss / static_cast<double>(x.size() - 1);
}

} // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw InputDomainError("regularized_incomplete_beta: a, b must be > 0");
    if (!(x >= 0.0 && x <= 1.0)) throw InputDomainError("regularized_incomplete_beta: x must lie in [0, 1]");
    return boost::math::ibeta(a, b, x);
}

double student_t_two_sided_p(double t, double dof) {
    if (!(dof > 0.0)) throw InputDomainError("student_t_two_sided_p: dof must be > 0");
    if (std::isnan(t)) throw InputDomainError("student_t_two_sided_p: t is NaN");
    if (std::isinf(t)) return 0.0;
    // I_{dof / (dof + t^2)}(dof / 2, 1 / 2) keeps full precision far in the tail.
    return boost::math::ibeta(0.5 * dof, 0.5, dof / (dof + t * t));
}

TTestResult t_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2) throw InputDomainError("t_test: each sample needs at least 2 values");
    const double ma = mean_of(a);
    const double mb = mean_of(b);
    const double va = variance_of(a, ma) / static_cast<double>(a.size());
    const double vb = variance_of(b, mb) / static_cast<double>(b.size());

    if (va + vb == 0.0) {
        if (ma == mb) return {0.0, 1.0, static_cast<double>(a.size() + b.size() - 2)};
        throw InputDomainError("t_test: both samples have zero variance but different means");
    }
    TTestResult r;
    r.t = (ma - mb) / std::sqrt(va + vb);
    r.dof = (va + vb) * (va + vb) /
            (va * va / static_cast<double>(a.size() - 1) + vb * vb / static_cast<double>(b.size() - 1));
    r.p = student_t_two_sided_p(r.t, r.dof);
    return r;
}

BootstrapResult bootstrap_ci(std::span<const double> a, std::span<const double> b, Rng& rng, Index resamples,
                             double confidence) {
    if (a.empty() || b.empty()) throw InputDomainError("bootstrap_ci: samples must be non-empty");
    if (resamples < 2) throw InputDomainError("bootstrap_ci: need at least 2 resamples");
    if (!(confidence > 0.0 && confidence < 1.0)) throw InputDomainError("bootstrap_ci: confidence must lie in (0, 1)");

    std::uniform_int_distribution<std::size_t> pick_a(0, a.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_b(0, b.size() - 1);
    std::vector<double> diffs(static_cast<std::size_t>(resamples));
    for (double& d : diffs) {
        double sa = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) sa += a[pick_a(rng)];
        double sb = 0.0;
        for (std::size_t i = 0; i < b.size(); ++i) sb += b[pick_b(rng)];
        d = sa / static_cast<double>(a.size()) - sb / static_cast<double>(b.size());
    }
    std::sort(diffs.begin(), diffs.end());

    auto percentile = [&](double q) {
        const double pos = q * static_cast<double>(diffs.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const std::size_t hi = std::min(lo + 1, diffs.size() - 1);
        const double frac = pos - static_cast<double>(lo);
        return diffs[lo] + frac * (diffs[hi] - diffs[lo]);
    };
    const double tail = 0.5 * (1.0 - confidence);
    return {mean_of(a) - mean_of(b), percentile(tail), percentile(1.0 - tail)};
}

ComparisonReport compare(std::span<const double> a, std::span<const double> b, Rng& rng, double alpha,
                         Index resamples) {
    const TTestResult t = t_test(a, b);
    const BootstrapResult bs = bootstrap_ci(a, b, rng, resamples, 1.0 - alpha);
    ComparisonReport r;
    r.t_statistic = t.t;
    r.t_p_value = t.p;
    r.t_significant = t.p <= alpha;
    r.bootstrap_mean_diff = bs.mean_diff;
    r.bootstrap_lo = bs.lo;
    r.bootstrap_hi = bs.hi;
    r.bootstrap_significant = bs.significant();
    return r;
}

PearsonResult pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw InputDomainError("pearson: samples must have equal length");
    if (x.size() < 3) throw InputDomainError("pearson: need at least 3 pairs");
    const double mx = mean_of(x);
    const double my = mean_of(y);
    double sxx = 0.0;
    double syy = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) throw InputDomainError("pearson: zero variance");

    PearsonResult r;
    r.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
    r.slope = sxy / sxx;
    r.intercept = my - r.slope * mx;
    const double dof = static_cast<double>(x.size() - 2);
    if (std::abs(r.r) == 1.0) {
        r.p = 0.0;
    } else {
        const double t = r.r * std::sqrt(dof / (1.0 - r.r * r.r));
        r.p = student_t_two_sided_p(t, dof);
    }
    return r;
}

SplitVariability split_variability(std::span<const double> runs, Rng& rng, Index splits, Index group_size,
                                   double alpha, Index resamples) {
    const auto needed = static_cast<std::size_t>(2 * group_size);
    if (runs.size() < needed) {
        throw InputDomainError("split_variability: need at least " + std::to_string(needed) + " runs, got " +
                               std::to_string(runs.size()));
    }
    if (splits < 1) throw InputDomainError("split_variability: splits must be >= 1");

    std::vector<std::size_t> order(runs.size());
    std::vector<double> g1(static_cast<std::size_t>(group_size));
    std::vector<double> g2(static_cast<std::size_t>(group_size));
    Index t_hits = 0;
    Index bs_hits = 0;
    for (Index s = 0; s < splits; ++s) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t i = 0; i < g1.size(); ++i) {
            g1[i] = runs[order[i]];
            g2[i] = runs[order[i + g1.size()]];
        }
        const ComparisonReport r = compare(g1, g2, rng, alpha, resamples);
        t_hits += r.t_significant ? 1 : 0;
        bs_hits += r.bootstrap_significant ? 1 : 0;
    }
    const double scale = 100.0 / static_cast<double>(splits);
    return {scale * static_cast<double>(t_hits), scale * static_cast<double>(bs_hits)};
}

} // namespace geppg::analysis
