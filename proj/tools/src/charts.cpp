#include "visbp_cli/charts.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "visbp/errors.hpp"

namespace visbp::cli {

namespace {

constexpr double kWidth = 820;
constexpr double kHeight = 480;
constexpr double kLeft = 70;
constexpr double kRight = 190;
constexpr double kTop = 40;
constexpr double kBottom = 60;

const std::vector<std::string> kPalette{"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                        "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
                                        "#393b79", "#637939", "#8c6d31", "#843c39", "#7b4173",
                                        "#3182bd", "#e6550d", "#31a354", "#756bb1", "#636363"};

const std::string& color(std::size_t i) { return kPalette[i % kPalette.size()]; }

std::string f2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

// Evenly spaced "nice" tick values covering [lo, hi].
std::vector<double> ticks(double lo, double hi, int target = 5) {
    if (!(hi > lo)) hi = lo + 1.0;
    const double raw = (hi - lo) / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
        step = m * mag;
        if (step >= raw) break;
    }
    std::vector<double> out;
    for (double v = std::floor(lo / step) * step; v <= hi + step * 1e-9; v += step) {
        out.push_back(std::abs(v) < step * 1e-9 ? 0.0 : v);
    }
    return out;
}

class Canvas {
public:
    Canvas(const std::string& title, double x0, double x1, double y0, double y1)
        : x0_(x0), x1_(x1 > x0 ? x1 : x0 + 1.0), y0_(y0), y1_(y1 > y0 ? y1 : y0 + 1.0) {
        os_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
            << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight
            << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
            << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
            << "<text x=\"" << f2(kLeft) << "\" y=\"24\" font-size=\"15\">" << escape(title)
            << "</text>\n";
    }

    double px(double x) const { return kLeft + (x - x0_) / (x1_ - x0_) * plot_w(); }
    double py(double y) const { return kTop + plot_h() - (y - y0_) / (y1_ - y0_) * plot_h(); }
    static double plot_w() { return kWidth - kLeft - kRight; }
    static double plot_h() { return kHeight - kTop - kBottom; }

    void axes(const std::string& x_label, const std::string& y_label, bool x_ticks = true) {
        const double bottom = kTop + plot_h();
        os_ << "<line x1=\"" << f2(kLeft) << "\" y1=\"" << f2(bottom) << "\" x2=\"" << f2(kLeft + plot_w())
            << "\" y2=\"" << f2(bottom) << "\" stroke=\"black\"/>\n"
            << "<line x1=\"" << f2(kLeft) << "\" y1=\"" << f2(kTop) << "\" x2=\"" << f2(kLeft)
            << "\" y2=\"" << f2(bottom) << "\" stroke=\"black\"/>\n";
        for (double v : ticks(y0_, y1_)) {
            if (v < y0_ - 1e-12 || v > y1_ + 1e-12) continue;
            os_ << "<line x1=\"" << f2(kLeft - 4) << "\" y1=\"" << f2(py(v)) << "\" x2=\"" << f2(kLeft + plot_w())
                << "\" y2=\"" << f2(py(v)) << "\" stroke=\"#e0e0e0\"/>\n"
                << "<text x=\"" << f2(kLeft - 6) << "\" y=\"" << f2(py(v) + 4)
                << "\" text-anchor=\"end\">" << tick_label(v) << "</text>\n";
        }
        if (x_ticks) {
            for (double v : ticks(x0_, x1_)) {
                if (v < x0_ - 1e-12 || v > x1_ + 1e-12) continue;
                os_ << "<line x1=\"" << f2(px(v)) << "\" y1=\"" << f2(bottom) << "\" x2=\"" << f2(px(v))
                    << "\" y2=\"" << f2(bottom + 4) << "\" stroke=\"black\"/>\n"
                    << "<text x=\"" << f2(px(v)) << "\" y=\"" << f2(bottom + 18)
                    << "\" text-anchor=\"middle\">" << tick_label(v) << "</text>\n";
            }
        }
        os_ << "<text x=\"" << f2(kLeft + plot_w() / 2) << "\" y=\"" << f2(kHeight - 14)
            << "\" text-anchor=\"middle\">" << escape(x_label) << "</text>\n"
            << "<text transform=\"translate(16," << f2(kTop + plot_h() / 2)
            << ") rotate(-90)\" text-anchor=\"middle\">" << escape(y_label) << "</text>\n";
    }

    void legend(const std::vector<std::string>& names) {
        const double x = kWidth - kRight + 16;
        for (std::size_t i = 0; i < names.size(); ++i) {
            const double y = kTop + 10 + 18.0 * static_cast<double>(i);
            os_ << "<rect x=\"" << f2(x) << "\" y=\"" << f2(y - 9) << "\" width=\"12\" height=\"12\" fill=\""
                << color(i) << "\"/>\n"
                << "<text x=\"" << f2(x + 18) << "\" y=\"" << f2(y + 2) << "\">" << escape(names[i])
                << "</text>\n";
        }
    }

    std::ostringstream& out() { return os_; }
    std::string finish() {
        os_ << "</svg>\n";
        return os_.str();
    }

private:
    double x0_, x1_, y0_, y1_;
    std::ostringstream os_;
};

std::pair<double, double> padded(double lo, double hi) {
    if (!(hi > lo)) return {lo - 0.5, hi + 0.5};
    const double pad = (hi - lo) * 0.05;
    return {lo - pad, hi + pad};
}

}  // namespace

std::string bar_chart(const std::string& title, const std::string& y_label,
                      const std::vector<std::string>& series_names, const std::vector<BarGroup>& groups) {
    double hi = 0.0;
    for (const auto& g : groups) {
        for (double v : g.values) hi = std::max(hi, v);
    }
    Canvas c(title, 0.0, static_cast<double>(std::max<std::size_t>(groups.size(), 1)), 0.0,
             hi > 0.0 ? hi * 1.05 : 1.0);
    c.axes("", y_label, false);
    const double slot = Canvas::plot_w() / static_cast<double>(std::max<std::size_t>(groups.size(), 1));
    const double bar = slot * 0.8 / static_cast<double>(std::max<std::size_t>(series_names.size(), 1));
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const double gx = kLeft + slot * static_cast<double>(g) + slot * 0.1;
        for (std::size_t s = 0; s < groups[g].values.size() && s < series_names.size(); ++s) {
            const double v = groups[g].values[s];
            const double top = c.py(v);
            c.out() << "<rect x=\"" << f2(gx + bar * static_cast<double>(s)) << "\" y=\"" << f2(top)
                    << "\" width=\"" << f2(bar) << "\" height=\"" << f2(c.py(0.0) - top) << "\" fill=\""
                    << color(s) << "\"><title>" << escape(series_names[s]) << ": " << tick_label(v)
                    << "</title></rect>\n";
        }
        c.out() << "<text x=\"" << f2(kLeft + slot * (static_cast<double>(g) + 0.5)) << "\" y=\""
                << f2(kTop + Canvas::plot_h() + 18) << "\" text-anchor=\"middle\">"
                << escape(groups[g].label) << "</text>\n";
    }
    c.legend(series_names);
    return c.finish();
}

std::string line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                       const std::vector<Series>& series) {
    double xlo = INFINITY, xhi = -INFINITY, ylo = 0.0, yhi = -INFINITY;
    for (const auto& s : series) {
        for (const auto& [x, y] : s.points) {
            xlo = std::min(xlo, x);
            xhi = std::max(xhi, x);
            ylo = std::min(ylo, y);
            yhi = std::max(yhi, y);
        }
    }
    if (!std::isfinite(xlo)) xlo = 0.0, xhi = 1.0, yhi = 1.0;
    Canvas c(title, xlo, xhi, ylo, yhi > ylo ? yhi * 1.05 : ylo + 1.0);
    c.axes(x_label, y_label);
    std::vector<std::string> names;
    for (std::size_t i = 0; i < series.size(); ++i) {
        names.push_back(series[i].name);
        std::string pts;
        for (const auto& [x, y] : series[i].points) pts += f2(c.px(x)) + "," + f2(c.py(y)) + " ";
        c.out() << "<polyline fill=\"none\" stroke=\"" << color(i) << "\" stroke-width=\"1.5\" points=\""
                << pts << "\"/>\n";
        for (const auto& [x, y] : series[i].points) {
            c.out() << "<circle cx=\"" << f2(c.px(x)) << "\" cy=\"" << f2(c.py(y)) << "\" r=\"2.5\" fill=\""
                    << color(i) << "\"/>\n";
        }
    }
    c.legend(names);
    return c.finish();
}

std::string scatter_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                          const std::vector<ScatterPoint>& points) {
    double xlo = INFINITY, xhi = -INFINITY, ylo = INFINITY, yhi = -INFINITY;
    for (const auto& p : points) {
        xlo = std::min(xlo, p.x);
        xhi = std::max(xhi, p.x);
        ylo = std::min(ylo, p.y);
        yhi = std::max(yhi, p.y);
    }
    if (points.empty()) xlo = ylo = 0.0, xhi = yhi = 1.0;
    const auto [x0, x1] = padded(xlo, xhi);
    const auto [y0, y1] = padded(ylo, yhi);
    Canvas c(title, x0, x1, y0, y1);
    c.axes(x_label, y_label);
    std::vector<std::pair<double, double>> front;
    for (const auto& p : points) {
        if (p.highlight) front.emplace_back(p.x, p.y);
    }
    std::sort(front.begin(), front.end());
    if (front.size() > 1) {
        std::string pts;
        for (const auto& [x, y] : front) pts += f2(c.px(x)) + "," + f2(c.py(y)) + " ";
        c.out() << "<polyline fill=\"none\" stroke=\"#d62728\" stroke-dasharray=\"4 3\" points=\"" << pts
                << "\"/>\n";
    }
    for (const auto& p : points) {
        const char* fill = p.highlight ? "#d62728" : "#1f77b4";
        c.out() << "<circle cx=\"" << f2(c.px(p.x)) << "\" cy=\"" << f2(c.py(p.y)) << "\" r=\"4\" fill=\""
                << fill << "\"/>\n"
                << "<text x=\"" << f2(c.px(p.x) + 6) << "\" y=\"" << f2(c.py(p.y) - 6) << "\" font-size=\"10\">"
                << escape(p.label) << "</text>\n";
    }
    return c.finish();
}

std::string histogram_chart(const std::string& title, const std::string& x_label,
                            const std::vector<std::string>& series_names,
                            const std::vector<std::vector<HistogramBin>>& series) {
    double xlo = INFINITY, xhi = -INFINITY, yhi = 0.0;
    for (const auto& bins : series) {
        for (const auto& b : bins) {
            xlo = std::min(xlo, b.lo);
            xhi = std::max(xhi, b.hi);
            yhi = std::max(yhi, b.count);
        }
    }
    if (!std::isfinite(xlo)) xlo = 0.0, xhi = 1.0;
    Canvas c(title, xlo, xhi, 0.0, yhi > 0.0 ? yhi * 1.05 : 1.0);
    c.axes(x_label, "count");
    const bool overlay = series.size() > 1;
    for (std::size_t i = 0; i < series.size(); ++i) {
        for (const auto& b : series[i]) {
            if (!(b.count > 0.0)) continue;
            const double top = c.py(b.count);
            c.out() << "<rect x=\"" << f2(c.px(b.lo)) << "\" y=\"" << f2(top) << "\" width=\""
                    << f2(c.px(b.hi) - c.px(b.lo)) << "\" height=\"" << f2(c.py(0.0) - top) << "\" fill=\""
                    << color(i) << "\" fill-opacity=\"" << (overlay ? "0.45" : "0.85") << "\"/>\n";
        }
    }
    c.legend(series_names);
    return c.finish();
}

std::string boxplot_chart(const std::string& title, const std::string& y_label, const std::vector<Box>& boxes) {
    double hi = 0.0;
    for (const auto& b : boxes) hi = std::max(hi, b.high);
    Canvas c(title, 0.0, static_cast<double>(std::max<std::size_t>(boxes.size(), 1)), 0.0,
             hi > 0.0 ? hi * 1.05 : 1.0);
    c.axes("", y_label, false);
    const double slot = Canvas::plot_w() / static_cast<double>(std::max<std::size_t>(boxes.size(), 1));
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        const Box& b = boxes[i];
        const double cx = kLeft + slot * (static_cast<double>(i) + 0.5);
        const double w = slot * 0.5;
        auto hline = [&](double y, double half) {
            c.out() << "<line x1=\"" << f2(cx - half) << "\" y1=\"" << f2(c.py(y)) << "\" x2=\"" << f2(cx + half)
                    << "\" y2=\"" << f2(c.py(y)) << "\" stroke=\"black\"/>\n";
        };
        c.out() << "<line x1=\"" << f2(cx) << "\" y1=\"" << f2(c.py(b.low)) << "\" x2=\"" << f2(cx)
                << "\" y2=\"" << f2(c.py(b.high)) << "\" stroke=\"black\"/>\n"
                << "<rect x=\"" << f2(cx - w / 2) << "\" y=\"" << f2(c.py(b.q3)) << "\" width=\"" << f2(w)
                << "\" height=\"" << f2(c.py(b.q1) - c.py(b.q3)) << "\" fill=\"" << color(i)
                << "\" stroke=\"black\"/>\n";
        hline(b.low, w / 4);
        hline(b.high, w / 4);
        hline(b.median, w / 2);
        c.out() << "<text x=\"" << f2(cx) << "\" y=\"" << f2(kTop + Canvas::plot_h() + 18)
                << "\" text-anchor=\"middle\" font-size=\"10\">" << escape(b.label) << "</text>\n";
    }
    return c.finish();
}

// ------------------------------------------------------------ from tables

namespace {

// Distinct values of a column in first-seen order.
std::vector<std::string> distinct(const Table& t, const std::string& col) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    const std::size_t c = t.column(col);
    for (const auto& r : t.rows) {
        if (seen.insert(r[c]).second) out.push_back(r[c]);
    }
    return out;
}

}  // namespace

std::string render_cbs(const Table& summary) {
    const auto deltas = distinct(summary, "delta");
    const auto algorithms = distinct(summary, "algorithm");
    std::vector<BarGroup> groups;
    for (const auto& d : deltas) {
        BarGroup g{"delta " + d, std::vector<double>(algorithms.size(), 0.0)};
        for (std::size_t r = 0; r < summary.rows.size(); ++r) {
            if (summary.text(r, "delta") != d) continue;
            const auto it = std::find(algorithms.begin(), algorithms.end(), summary.text(r, "algorithm"));
            g.values[static_cast<std::size_t>(it - algorithms.begin())] = summary.number(r, "cbs");
        }
        groups.push_back(std::move(g));
    }
    return bar_chart("Cardinal bin score", "CBS", algorithms, groups);
}

std::string render_rscore(const Table& summary) {
    const auto algorithms = distinct(summary, "algorithm");
    std::vector<Series> series;
    for (const auto& a : algorithms) {
        Series s{a, {}};
        for (std::size_t r = 0; r < summary.rows.size(); ++r) {
            if (summary.text(r, "algorithm") == a) {
                s.points.emplace_back(summary.number(r, "delta"), summary.number(r, "avg_rscore"));
            }
        }
        std::sort(s.points.begin(), s.points.end());
        series.push_back(std::move(s));
    }
    return line_chart("Average Rscore by delta", "delta (% of C)", "average Rscore", series);
}

std::string render_pareto(const Table& summary, const Table& pareto, const std::string& delta) {
    std::set<std::string> front;
    for (std::size_t r = 0; r < pareto.rows.size(); ++r) {
        if (pareto.text(r, "delta") == delta) front.insert(pareto.text(r, "algorithm"));
    }
    std::vector<ScatterPoint> points;
    for (std::size_t r = 0; r < summary.rows.size(); ++r) {
        if (summary.text(r, "delta") != delta) continue;
        const std::string& a = summary.text(r, "algorithm");
        points.push_back({a, summary.number(r, "cbs"), summary.number(r, "avg_rscore"), front.count(a) != 0});
    }
    return scatter_chart("Pareto front, delta " + delta, "CBS", "average Rscore", points);
}

std::string render_latency_histogram(const Table& histogram) {
    const auto algorithms = distinct(histogram, "algorithm");
    std::vector<std::vector<HistogramBin>> series;
    for (const auto& a : algorithms) {
        std::vector<HistogramBin> bins;
        for (std::size_t r = 0; r < histogram.rows.size(); ++r) {
            if (histogram.text(r, "algorithm") != a) continue;
            bins.push_back({histogram.number(r, "bin_lo"), histogram.number(r, "bin_hi"),
                            histogram.number(r, "count")});
        }
        series.push_back(std::move(bins));
    }
    return histogram_chart("Positive latency samples", "latency (s)", algorithms, series);
}

std::string render_latency_boxplot(const Table& boxplot) {
    std::vector<Box> boxes;
    for (std::size_t r = 0; r < boxplot.rows.size(); ++r) {
        boxes.push_back({boxplot.text(r, "algorithm"), boxplot.number(r, "min"), boxplot.number(r, "q1"),
                         boxplot.number(r, "median"), boxplot.number(r, "q3"), boxplot.number(r, "max")});
    }
    return boxplot_chart("Positive latency by algorithm", "latency (s)", boxes);
}

std::string render_timing(const Table& timing, const std::string& event, double bin_secs) {
    if (!(bin_secs > 0.0)) throw InputError("histogram bin width must be positive");
    std::map<long long, double> counts;
    for (std::size_t r = 0; r < timing.rows.size(); ++r) {
        if (timing.text(r, "event") != event) continue;
        counts[static_cast<long long>(std::floor(timing.number(r, "duration") / bin_secs))] += 1.0;
    }
    std::vector<HistogramBin> bins;
    for (const auto& [b, n] : counts) {
        bins.push_back({static_cast<double>(b) * bin_secs, static_cast<double>(b + 1) * bin_secs, n});
    }
    return histogram_chart(event + " durations", "seconds", {event}, {bins});
}

}  // namespace visbp::cli
