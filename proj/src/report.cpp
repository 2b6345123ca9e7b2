#include "geppg/report.hpp"

#include "geppg/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>

namespace geppg::report {

using csv::format_double;

namespace {

double mean_of(const std::vector<double>& x) {
    return x.empty() ? std::nan("") : std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

/// Standard error of the mean with the unbiased sample deviation; 0 for one value.
double sem_of(const std::vector<double>& x) {
    if (x.size() < 2) return x.empty() ? std::nan("") : 0.0;
    const double m = mean_of(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(x.size() - 1) / static_cast<double>(x.size()));
}

std::string config_value(const pipeline::Manifest& m, const std::string& key, const std::string& fallback = "") {
    for (const auto& [k, v] : m.config) {
        if (k == key) return v;
    }
    return fallback;
}

} // namespace

std::vector<double> RunGroup::absolute_metrics() const {
    std::vector<double> out;
    for (const auto& r : runs) {
        if (r.absolute_metric) out.push_back(*r.absolute_metric);
    }
    return out;
}

std::vector<double> RunGroup::final_metrics() const {
    std::vector<double> out;
    for (const auto& r : runs) {
        if (r.final_metric) out.push_back(*r.final_metric);
    }
    return out;
}

RunGroup load_group(const std::filesystem::path& dir) {
    RunGroup g;
    g.directory = dir;
    g.label = dir.filename().empty() ? dir.parent_path().filename().string() : dir.filename().string();
    g.manifest = pipeline::read_manifest(dir / "manifest.json");

    const auto env = make_environment(config_value(g.manifest, "environment", "cmc"));
    const std::uint64_t master = csv::parse_uint(config_value(g.manifest, "master_seed", "0"));
    const Index absolute_episodes = csv::parse_int(config_value(g.manifest, "absolute_episodes", "100"));

    for (const pipeline::SeedStatus& s : g.manifest.seeds) {
        if (s.status != "ok") {
            g.warnings.push_back("skipping " + s.directory + ": status " + s.status +
                                 (s.error.empty() ? "" : " (" + s.error + ")"));
            continue;
        }
        try {
            runio::LoadedRun run = runio::load_seed_dir(dir / s.directory);
            if (!run.absolute_metric && !run.log.evals.empty()) {
                run = runio::load_seed_dir(dir / s.directory, true);
                run.absolute_metric =
                    analysis::absolute_metric(run.log.evals, *env, run_seed(master, s.seed), absolute_episodes);
            }
            if (!run.final_metric && run.log.evals.size() >= 10) run.final_metric = analysis::final_metric(run.log.evals);
            run.meta["seed"] = std::to_string(s.seed);
            g.runs.push_back(std::move(run));
        } catch (const std::exception& e) {
            g.warnings.push_back("skipping " + s.directory + ": " + e.what());
        }
    }
    return g;
}

void check_environments(const std::vector<RunGroup>& groups) {
    for (const RunGroup& g : groups) {
        if (g.manifest.environment_hash != groups.front().manifest.environment_hash) {
            throw InputDomainError("refusing to pool runs from different environments: " + groups.front().label + " (" +
                                   groups.front().manifest.environment_hash + ") vs " + g.label + " (" +
                                   g.manifest.environment_hash + ")");
        }
    }
}

// ---------------------------------------------------------------------------
// Analysis

AnalysisReport analyze(const std::vector<RunGroup>& groups, Rng& rng, double alpha, Index resamples) {
    check_environments(groups);
    AnalysisReport rep;

    rep.metrics.header = {"label",        "algorithm",  "noise",         "config_hash", "seeds",
                          "absolute_mean", "absolute_sem", "final_mean", "final_sem",   "goal_fraction",
                          "first_goal_mean"};
    for (const RunGroup& g : groups) {
        std::vector<double> first;
        for (const auto& r : g.runs) {
            if (r.log.first_goal_step) first.push_back(static_cast<double>(*r.log.first_goal_step));
        }
        const auto abs = g.absolute_metrics();
        const auto fin = g.final_metrics();
        const double n = static_cast<double>(g.runs.size());
        rep.metrics.rows.push_back({g.label, config_value(g.manifest, "algorithm"), config_value(g.manifest, "noise"),
                                    g.manifest.config_hash, std::to_string(g.runs.size()), format_double(mean_of(abs)),
                                    format_double(sem_of(abs)), format_double(mean_of(fin)), format_double(sem_of(fin)),
                                    format_double(n > 0 ? static_cast<double>(first.size()) / n : std::nan("")),
                                    format_double(mean_of(first))});
    }

    rep.comparisons.header = {"label_a",        "label_b",          "metric",
                              "t_statistic",    "t_p_value",        "t_significant",
                              "bootstrap_mean_diff", "bootstrap_ci_lo", "bootstrap_ci_hi",
                              "bootstrap_significant"};
    for (std::size_t i = 0; i < groups.size(); ++i) {
        for (std::size_t j = i + 1; j < groups.size(); ++j) {
            for (const std::string metric : {"absolute", "final"}) {
                const auto a = metric == "absolute" ? groups[i].absolute_metrics() : groups[i].final_metrics();
                const auto b = metric == "absolute" ? groups[j].absolute_metrics() : groups[j].final_metrics();
                if (a.size() < 2 || b.size() < 2) continue;
                analysis::ComparisonReport c;
                try {
                    c = analysis::compare(a, b, rng, alpha, resamples);
                } catch (const InputDomainError&) {
                    continue;  // both samples constant and different: no test applies
                }
                rep.comparisons.rows.push_back({groups[i].label, groups[j].label, metric, format_double(c.t_statistic),
                                                format_double(c.t_p_value), c.t_significant ? "1" : "0",
                                                format_double(c.bootstrap_mean_diff), format_double(c.bootstrap_lo),
                                                format_double(c.bootstrap_hi), c.bootstrap_significant ? "1" : "0"});
            }
        }
    }

    rep.diversity.header = {"label", "archives", "knn_diversity_1", "knn_diversity_5", "coverage", "entropy"};
    for (const RunGroup& g : groups) {
        std::vector<double> k1, k5, cov, ent;
        for (const auto& r : g.runs) {
            if (!r.archive_outcomes || r.archive_outcomes->cols() < 2) continue;
            const MatrixXd& pts = *r.archive_outcomes;
            k1.push_back(analysis::knn_diversity(pts, 1));
            if (pts.cols() >= 6) k5.push_back(analysis::knn_diversity(pts, 5));
            const auto cells = analysis::cell_metrics_auto(pts);
            cov.push_back(cells.coverage);
            ent.push_back(cells.entropy);
        }
        if (k1.empty()) continue;
        rep.diversity.rows.push_back({g.label, std::to_string(k1.size()), format_double(mean_of(k1)),
                                      format_double(mean_of(k5)), format_double(mean_of(cov)),
                                      format_double(mean_of(ent))});
    }

    rep.correlation.header = {"label", "n", "pearson_r", "p_value", "slope", "intercept"};
    std::vector<double> all_final, all_abs;
    auto add_row = [&](const std::string& label, const std::vector<double>& x, const std::vector<double>& y) {
        try {
            const auto p = analysis::pearson(x, y);
            rep.correlation.rows.push_back({label, std::to_string(x.size()), format_double(p.r), format_double(p.p),
                                            format_double(p.slope), format_double(p.intercept)});
        } catch (const InputDomainError&) {
            // fewer than 3 pairs or a constant metric
        }
    };
    for (const RunGroup& g : groups) {
        std::vector<double> x, y;
        for (const auto& r : g.runs) {
            if (r.final_metric && r.absolute_metric) {
                x.push_back(*r.final_metric);
                y.push_back(*r.absolute_metric);
            }
        }
        all_final.insert(all_final.end(), x.begin(), x.end());
        all_abs.insert(all_abs.end(), y.begin(), y.end());
        add_row(g.label, x, y);
    }
    if (groups.size() > 1) add_row("all", all_final, all_abs);
    return rep;
}

std::string format_table(const csv::Table& t) {
    std::vector<std::size_t> width(t.header.size());
    for (std::size_t c = 0; c < t.header.size(); ++c) width[c] = t.header[c].size();
    auto shown = [](const std::string& s) {
        // Trim long decimals for the terminal; files keep full precision.
        if (s.size() <= 10 || s.find_first_not_of("-0123456789.e+") != std::string::npos) return s;
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6g", csv::parse_double(s));
        return std::string(buf);
    };
    for (const auto& r : t.rows) {
        for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], shown(r[c]).size());
    }
    std::ostringstream os;
    auto line = [&](const std::vector<std::string>& r, bool format) {
        for (std::size_t c = 0; c < r.size(); ++c) {
            const std::string s = format ? shown(r[c]) : r[c];
            os << (c ? "  " : "") << s << std::string(width[c] - s.size(), ' ');
        }
        os << '\n';
    };
    line(t.header, false);
    for (const auto& r : t.rows) line(r, true);
    return os.str();
}

// ---------------------------------------------------------------------------
// Plots

std::string to_string(PlotKind k) {
    switch (k) {
    case PlotKind::learning_curve: return "learning_curve";
    case PlotKind::histogram: return "histogram";
    case PlotKind::first_goal_histogram: return "first_goal_histogram";
    case PlotKind::correlation_scatter: return "correlation_scatter";
    }
    return "?";
}

PlotKind plot_kind_from_string(const std::string& s) {
    for (PlotKind k : {PlotKind::learning_curve, PlotKind::histogram, PlotKind::first_goal_histogram,
                       PlotKind::correlation_scatter}) {
        if (to_string(k) == s) return k;
    }
    throw InputDomainError("unknown plot kind '" + s + "'");
}

Index snap_step(Index step, Index resolution) {
    if (resolution < 1) throw InputDomainError("snap_step: resolution must be >= 1");
    return (step + resolution / 2) / resolution * resolution;
}

namespace {

const char* const palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"};

const char* colour(std::size_t i) { return palette[i % (sizeof palette / sizeof palette[0])]; }

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

/// Minimal SVG canvas with a linear data-to-pixel map and labelled axes.
class Canvas {
public:
    Canvas(double x0, double x1, double y0, double y1, const std::string& title, const std::string& xlabel,
           const std::string& ylabel) {
        if (!(x1 > x0)) x1 = x0 + 1.0;
        if (!(y1 > y0)) y1 = y0 + 1.0;
        x0_ = x0, x1_ = x1, y0_ = y0, y1_ = y1;
        out_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 "
             << W << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
        out_ << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        out_ << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
        out_ << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
             << "\" stroke=\"black\"/>\n";
        out_ << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B
             << "\" stroke=\"black\"/>\n";
        for (int i = 0; i <= 4; ++i) {
            const double xv = x0_ + (x1_ - x0_) * i / 4.0;
            const double yv = y0_ + (y1_ - y0_) * i / 4.0;
            out_ << "<text x=\"" << num(px(xv)) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">" << tick(xv)
                 << "</text>\n";
            out_ << "<text x=\"" << L - 6 << "\" y=\"" << num(py(yv) + 4) << "\" text-anchor=\"end\">" << tick(yv)
                 << "</text>\n";
        }
        out_ << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 8 << "\" text-anchor=\"middle\">" << xlabel
             << "</text>\n";
        out_ << "<text x=\"14\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
             << (T + H - B) / 2 << ")\">" << ylabel << "</text>\n";
    }

    double px(double x) const { return L + (x - x0_) / (x1_ - x0_) * (W - L - R); }
    double py(double y) const { return H - B - (y - y0_) / (y1_ - y0_) * (H - T - B); }

    void polyline(const std::vector<std::pair<double, double>>& pts, const char* stroke) {
        out_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& [x, y] : pts) out_ << num(px(x)) << ',' << num(py(y)) << ' ';
        out_ << "\"/>\n";
    }
    void polygon(const std::vector<std::pair<double, double>>& pts, const char* fill) {
        out_ << "<polygon fill=\"" << fill << "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
        for (const auto& [x, y] : pts) out_ << num(px(x)) << ',' << num(py(y)) << ' ';
        out_ << "\"/>\n";
    }
    void rect(double xa, double xb, double ya, double yb, const char* fill) {
        out_ << "<rect x=\"" << num(px(xa)) << "\" y=\"" << num(py(yb)) << "\" width=\"" << num(px(xb) - px(xa))
             << "\" height=\"" << num(py(ya) - py(yb)) << "\" fill=\"" << fill << "\" fill-opacity=\"0.6\"/>\n";
    }
    void circle(double x, double y, const char* fill) {
        out_ << "<circle cx=\"" << num(px(x)) << "\" cy=\"" << num(py(y)) << "\" r=\"3\" fill=\"" << fill << "\"/>\n";
    }
    void legend(const std::vector<std::string>& labels) {
        for (std::size_t i = 0; i < labels.size(); ++i) {
            const int y = T + 14 * static_cast<int>(i);
            out_ << "<rect x=\"" << W - R - 150 << "\" y=\"" << y << "\" width=\"10\" height=\"10\" fill=\"" << colour(i)
                 << "\"/>\n";
            out_ << "<text x=\"" << W - R - 135 << "\" y=\"" << y + 9 << "\">" << labels[i] << "</text>\n";
        }
    }
    std::string finish() {
        out_ << "</svg>\n";
        return out_.str();
    }

private:
    static std::string tick(double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.4g", v);
        return buf;
    }

    static constexpr int W = 720, H = 440, L = 70, R = 20, T = 36, B = 44;
    double x0_ = 0, x1_ = 1, y0_ = 0, y1_ = 1;
    std::ostringstream out_;
};

void require_runs(const std::vector<RunGroup>& groups) {
    const bool any = std::any_of(groups.begin(), groups.end(), [](const RunGroup& g) { return !g.runs.empty(); });
    if (!any) throw InputDomainError("no completed runs to plot");
}

std::vector<std::string> labels_of(const std::vector<RunGroup>& groups) {
    std::vector<std::string> l;
    for (const auto& g : groups) l.push_back(g.label);
    return l;
}

// Most frequent spacing between consecutive snapped evaluation steps.
Index group_spacing(const std::vector<std::map<Index, double>>& series, Index resolution) {
    std::map<Index, Index> counts;
    for (const auto& s : series) {
        for (auto it = s.begin(); it != s.end() && std::next(it) != s.end(); ++it) {
            ++counts[std::next(it)->first - it->first];
        }
    }
    Index best = resolution;
    Index best_count = 0;
    for (const auto& [gap, c] : counts) {
        if (c > best_count) best = gap, best_count = c;
    }
    return std::max(best, resolution);
}

} // namespace

PlotOutput learning_curve(const std::vector<RunGroup>& groups, Index resolution) {
    require_runs(groups);
    check_environments(groups);
    PlotOutput out;

    std::vector<std::vector<std::map<Index, double>>> series(groups.size());
    Index spacing = resolution;
    Index last_step = 0;
    std::vector<Index> spacings;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        for (const auto& r : groups[g].runs) {
            std::map<Index, double> s;
            for (const EvalRecord& e : r.log.evals) s[snap_step(e.env_step, resolution)] = e.mean_return;
            if (!s.empty()) last_step = std::max(last_step, s.rbegin()->first);
            series[g].push_back(std::move(s));
        }
        spacings.push_back(group_spacing(series[g], resolution));
        spacing = std::max(spacing, spacings.back());
    }
    if (std::any_of(spacings.begin(), spacings.end(), [&](Index s) { return s != spacing; })) {
        out.notes.push_back("step grids differ; resampled to the coarsest grid of " + std::to_string(spacing) + " steps");
    }

    out.data.header = {"env_step"};
    for (const auto& g : groups) {
        out.data.header.push_back(g.label + "_mean");
        out.data.header.push_back(g.label + "_sem");
        out.data.header.push_back(g.label + "_n");
    }
    std::vector<std::vector<std::pair<double, double>>> mean_pts(groups.size()), lo_pts(groups.size()),
        hi_pts(groups.size());
    double ymin = HUGE_VAL, ymax = -HUGE_VAL;
    for (Index step = spacing; step <= last_step; step += spacing) {
        std::vector<std::string> row{std::to_string(step)};
        for (std::size_t g = 0; g < groups.size(); ++g) {
            std::vector<double> vals;
            for (const auto& s : series[g]) {
                if (s.empty() || s.rbegin()->first < step) continue;
                auto it = s.upper_bound(step);
                if (it == s.begin()) continue;
                vals.push_back(std::prev(it)->second);
            }
            const double m = mean_of(vals);
            const double e = sem_of(vals);
            row.push_back(format_double(m));
            row.push_back(format_double(e));
            row.push_back(std::to_string(vals.size()));
            if (!vals.empty()) {
                mean_pts[g].emplace_back(step, m);
                lo_pts[g].emplace_back(step, m - e);
                hi_pts[g].emplace_back(step, m + e);
                ymin = std::min(ymin, m - e);
                ymax = std::max(ymax, m + e);
            }
        }
        out.data.rows.push_back(std::move(row));
    }
    if (out.data.rows.empty()) throw InputDomainError("no evaluation records to plot");

    Canvas c(0.0, static_cast<double>(last_step), ymin, ymax, "Learning curves (mean and SEM)", "environment steps",
             "evaluation return");
    for (std::size_t g = 0; g < groups.size(); ++g) {
        if (mean_pts[g].empty()) continue;
        std::vector<std::pair<double, double>> band = hi_pts[g];
        band.insert(band.end(), lo_pts[g].rbegin(), lo_pts[g].rend());
        c.polygon(band, colour(g));
        c.polyline(mean_pts[g], colour(g));
    }
    c.legend(labels_of(groups));
    out.svg = c.finish();
    return out;
}

PlotOutput histogram(const std::vector<RunGroup>& groups, Index bins) {
    require_runs(groups);
    if (bins < 1) throw InputDomainError("histogram: bins must be >= 1");
    double lo = HUGE_VAL, hi = -HUGE_VAL;
    for (const auto& g : groups) {
        for (double v : g.absolute_metrics()) lo = std::min(lo, v), hi = std::max(hi, v);
    }
    if (!(lo <= hi)) throw InputDomainError("no absolute metrics to plot");
    if (lo == hi) lo -= 0.5, hi += 0.5;
    const double width = (hi - lo) / static_cast<double>(bins);

    PlotOutput out;
    out.data.header = {"label", "bin_lo", "bin_hi", "count"};
    Index max_count = 0;
    std::vector<std::vector<Index>> counts(groups.size(), std::vector<Index>(static_cast<std::size_t>(bins), 0));
    for (std::size_t g = 0; g < groups.size(); ++g) {
        for (double v : groups[g].absolute_metrics()) {
            const auto b = std::min<Index>(bins - 1, static_cast<Index>((v - lo) / width));
            max_count = std::max(max_count, ++counts[g][static_cast<std::size_t>(b)]);
        }
        for (Index b = 0; b < bins; ++b) {
            out.data.rows.push_back({groups[g].label, format_double(lo + width * static_cast<double>(b)),
                                     format_double(lo + width * static_cast<double>(b + 1)),
                                     std::to_string(counts[g][static_cast<std::size_t>(b)])});
        }
    }

    Canvas c(lo, hi, 0.0, static_cast<double>(max_count), "Absolute metric across seeds", "absolute metric", "runs");
    const double slot = width / static_cast<double>(groups.size());
    for (std::size_t g = 0; g < groups.size(); ++g) {
        for (Index b = 0; b < bins; ++b) {
            const double x = lo + width * static_cast<double>(b) + slot * static_cast<double>(g);
            c.rect(x, x + slot, 0.0, static_cast<double>(counts[g][static_cast<std::size_t>(b)]), colour(g));
        }
    }
    c.legend(labels_of(groups));
    out.svg = c.finish();
    return out;
}

PlotOutput first_goal_histogram(const std::vector<RunGroup>& groups, Index horizon, Index bin_width) {
    require_runs(groups);
    if (bin_width < 1 || horizon < bin_width) throw InputDomainError("first_goal_histogram: invalid binning");
    const Index bins = (horizon + bin_width - 1) / bin_width;

    PlotOutput out;
    out.data.header = {"label", "bin_lo", "bin_hi", "count"};
    std::vector<std::vector<Index>> counts(groups.size(), std::vector<Index>(static_cast<std::size_t>(bins + 1), 0));
    Index max_count = 0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        Index reached = 0;
        for (const auto& r : groups[g].runs) {
            Index b = bins;  // not reached within the horizon
            if (r.log.first_goal_step && *r.log.first_goal_step <= horizon) {
                b = std::min<Index>(bins - 1, (*r.log.first_goal_step - 1) / bin_width);
                ++reached;
            }
            max_count = std::max(max_count, ++counts[g][static_cast<std::size_t>(b)]);
        }
        for (Index b = 0; b <= bins; ++b) {
            out.data.rows.push_back({groups[g].label, std::to_string(b * bin_width),
                                     b < bins ? std::to_string(std::min(horizon, (b + 1) * bin_width)) : "inf",
                                     std::to_string(counts[g][static_cast<std::size_t>(b)])});
        }
        const double pct = groups[g].runs.empty()
                               ? 0.0
                               : 100.0 * static_cast<double>(reached) / static_cast<double>(groups[g].runs.size());
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s: goal reached within %lld steps in %.1f%% of %zu runs",
                      groups[g].label.c_str(), static_cast<long long>(horizon), pct, groups[g].runs.size());
        out.notes.emplace_back(buf);
    }

    // The last slot, one bin wide, holds the runs that never reached the goal in time.
    Canvas c(0.0, static_cast<double>((bins + 1) * bin_width), 0.0, static_cast<double>(max_count),
             "Steps to first goal (last bin: not reached)", "environment steps", "runs");
    const double slot = static_cast<double>(bin_width) / static_cast<double>(groups.size());
    for (std::size_t g = 0; g < groups.size(); ++g) {
        for (Index b = 0; b <= bins; ++b) {
            const double x = static_cast<double>(b * bin_width) + slot * static_cast<double>(g);
            c.rect(x, x + slot, 0.0, static_cast<double>(counts[g][static_cast<std::size_t>(b)]), colour(g));
        }
    }
    c.legend(labels_of(groups));
    out.svg = c.finish();
    return out;
}

PlotOutput correlation_scatter(const std::vector<RunGroup>& groups) {
    require_runs(groups);
    PlotOutput out;
    out.data.header = {"label", "seed", "final_metric", "absolute_metric"};
    std::vector<double> xs, ys;
    std::vector<std::size_t> owner;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        for (const auto& r : groups[g].runs) {
            if (!r.final_metric || !r.absolute_metric) continue;
            const auto seed = r.meta.find("seed");
            out.data.rows.push_back({groups[g].label, seed == r.meta.end() ? "" : seed->second,
                                     format_double(*r.final_metric),
                                     format_double(*r.absolute_metric)});
            xs.push_back(*r.final_metric);
            ys.push_back(*r.absolute_metric);
            owner.push_back(g);
        }
    }
    if (xs.empty()) throw InputDomainError("no runs with both metrics to plot");

    std::optional<analysis::PearsonResult> fit;
    try {
        fit = analysis::pearson(xs, ys);
        out.data.meta["pearson_r"] = format_double(fit->r);
        out.data.meta["p_value"] = format_double(fit->p);
        out.data.meta["slope"] = format_double(fit->slope);
        out.data.meta["intercept"] = format_double(fit->intercept);
    } catch (const InputDomainError& e) {
        out.notes.push_back(std::string("no fitted line: ") + e.what());
    }

    const auto [xmin, xmax] = std::minmax_element(xs.begin(), xs.end());
    const auto [ymin, ymax] = std::minmax_element(ys.begin(), ys.end());
    const double lo = std::min(*xmin, *ymin);
    const double hi = std::max(*xmax, *ymax);
    Canvas c(lo, hi, lo, hi, "Absolute vs final metric", "final metric", "absolute metric");
    for (std::size_t i = 0; i < xs.size(); ++i) c.circle(xs[i], ys[i], colour(owner[i]));
    if (fit) c.polyline({{lo, fit->slope * lo + fit->intercept}, {hi, fit->slope * hi + fit->intercept}}, "black");
    c.legend(labels_of(groups));
    out.svg = c.finish();
    return out;
}

PlotOutput make_plot(PlotKind kind, const std::vector<RunGroup>& groups) {
    switch (kind) {
    case PlotKind::learning_curve: return learning_curve(groups);
    case PlotKind::histogram: return histogram(groups);
    case PlotKind::first_goal_histogram: return first_goal_histogram(groups);
    case PlotKind::correlation_scatter: return correlation_scatter(groups);
    }
    throw InputDomainError("unknown plot kind");
}

} // namespace geppg::report
