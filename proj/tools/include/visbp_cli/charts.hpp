#pragma once

// Static SVG charts. Every renderer takes CSV tables as written by the
// commands, so a chart can always be rebuilt from its CSV.

#include <string>
#include <vector>

#include "visbp_cli/table.hpp"

namespace visbp::cli {

struct Series {
    std::string name;
    std::vector<std::pair<double, double>> points;
};

struct BarGroup {
    std::string label;
    std::vector<double> values;  ///< one per series name
};

struct ScatterPoint {
    std::string label;
    double x{};
    double y{};
    bool highlight{false};
};

struct HistogramBin {
    double lo{};
    double hi{};
    double count{};
};

struct Box {
    std::string label;
    double low{};
    double q1{};
    double median{};
    double q3{};
    double high{};
};

[[nodiscard]] std::string bar_chart(const std::string& title, const std::string& y_label,
                                    const std::vector<std::string>& series_names,
                                    const std::vector<BarGroup>& groups);
[[nodiscard]] std::string line_chart(const std::string& title, const std::string& x_label,
                                     const std::string& y_label, const std::vector<Series>& series);
[[nodiscard]] std::string scatter_chart(const std::string& title, const std::string& x_label,
                                        const std::string& y_label,
                                        const std::vector<ScatterPoint>& points);
[[nodiscard]] std::string histogram_chart(const std::string& title, const std::string& x_label,
                                          const std::vector<std::string>& series_names,
                                          const std::vector<std::vector<HistogramBin>>& series);
[[nodiscard]] std::string boxplot_chart(const std::string& title, const std::string& y_label,
                                        const std::vector<Box>& boxes);

// Table-driven renderers used by the commands and by `visbp render`.

/// summary.csv -> CBS bars, one group per delta.
[[nodiscard]] std::string render_cbs(const Table& summary);
/// summary.csv -> average Rscore against delta, one line per algorithm.
[[nodiscard]] std::string render_rscore(const Table& summary);
/// summary.csv + pareto.csv -> scatter of one delta with the front highlighted.
[[nodiscard]] std::string render_pareto(const Table& summary, const Table& pareto,
                                        const std::string& delta);
/// latency_histogram.csv -> overlaid histograms per algorithm.
[[nodiscard]] std::string render_latency_histogram(const Table& histogram);
/// latency_boxplot.csv -> one box per algorithm.
[[nodiscard]] std::string render_latency_boxplot(const Table& boxplot);
/// timing.csv -> histogram of one event ("dt1" .. "dt4") with `bin_secs` wide bins.
[[nodiscard]] std::string render_timing(const Table& timing, const std::string& event,
                                        double bin_secs);

}  // namespace visbp::cli
