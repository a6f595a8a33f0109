#include "visbp/metrics.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>

#include "visbp/errors.hpp"

namespace visbp {

double rscore(const MigrationReport& report, const SpeedMap& s, double capacity) {
    if (!(capacity > 0.0)) throw InputError("capacity must be positive");
    double sum = 0.0;
    for (PartitionId j : report.rebalanced) sum += s[j];
    return sum / capacity;
}

std::map<std::string, double> cbs(const std::map<std::string, std::vector<std::size_t>>& per_iteration,
                                  std::size_t iterations) {
    if (per_iteration.empty()) throw InputError("cbs needs at least one algorithm");
    if (iterations == 0) throw InputError("cbs needs at least one iteration");
    for (const auto& [name, bins] : per_iteration) {
        if (bins.size() != iterations) {
            throw InputError("algorithm '" + name + "' has " + std::to_string(bins.size()) +
                             " entries, expected " + std::to_string(iterations));
        }
        if (std::find(bins.begin(), bins.end(), std::size_t{0}) != bins.end()) {
            throw InputError("algorithm '" + name + "' reports zero bins");
        }
    }
    std::vector<std::size_t> best(iterations, std::numeric_limits<std::size_t>::max());
    for (const auto& [name, bins] : per_iteration) {
        for (std::size_t i = 0; i < iterations; ++i) best[i] = std::min(best[i], bins[i]);
    }
    std::map<std::string, double> out;
    for (const auto& [name, bins] : per_iteration) {
        double sum = 0.0;
        for (std::size_t i = 0; i < iterations; ++i) {
            sum += static_cast<double>(bins[i] - best[i]) / static_cast<double>(best[i]);
        }
        out[name] = sum / static_cast<double>(iterations);
    }
    return out;
}

double avg_rscore(std::span<const double> rscores) {
    if (rscores.empty()) throw InputError("average of an empty Rscore list");
    return std::accumulate(rscores.begin(), rscores.end(), 0.0) / static_cast<double>(rscores.size());
}

bool dominates(const ParetoPoint& a, const ParetoPoint& b) noexcept {
    return a.cbs <= b.cbs && a.avg_rscore <= b.avg_rscore &&
           (a.cbs < b.cbs || a.avg_rscore < b.avg_rscore);
}

std::vector<ParetoPoint> pareto_front(std::span<const ParetoPoint> points) {
    std::vector<ParetoPoint> front;
    for (const auto& p : points) {
        const bool beaten = std::any_of(points.begin(), points.end(),
                                        [&p](const ParetoPoint& q) { return dominates(q, p); });
        if (!beaten) front.push_back(p);
    }
    std::stable_sort(front.begin(), front.end(), [](const ParetoPoint& a, const ParetoPoint& b) {
        if (a.cbs != b.cbs) return a.cbs < b.cbs;
        if (a.avg_rscore != b.avg_rscore) return a.avg_rscore < b.avg_rscore;
        return a.algorithm < b.algorithm;
    });
    return front;
}

std::size_t brute_force_opt(const SpeedMap& s, double capacity) {
    constexpr std::size_t kMaxItems = 12;
    validate_speeds(s, capacity);
    const std::size_t n = s.size();
    if (n > kMaxItems) {
        throw InputError("exhaustive search is limited to " + std::to_string(kMaxItems) + " items");
    }
    if (n == 0) return 0;

    // Looser than the packers' test so the oracle never reports more bins
    // than a heuristic that found a packing with a different summation order.
    const double limit = capacity * (1.0 + 1e-12);
    std::vector<double> items(s.values().begin(), s.values().end());
    std::sort(items.begin(), items.end(), std::greater<>());

    std::size_t best = n;
    std::vector<double> loads;
    loads.reserve(n);
    // Each item goes into an existing bin or the next new one: this walks every
    // set partition of the items exactly once.
    std::function<void(std::size_t)> search = [&](std::size_t k) {
        if (loads.size() >= best) return;
        if (k == n) {
            best = loads.size();
            return;
        }
        for (std::size_t b = 0; b < loads.size(); ++b) {
            if (loads[b] + items[k] <= limit) {
                loads[b] += items[k];
                search(k + 1);
                loads[b] -= items[k];
            }
        }
        loads.push_back(items[k]);
        search(k + 1);
        loads.pop_back();
    };
    search(0);
    return best;
}

std::vector<AlgorithmSummary> summarize(const std::map<std::string, std::vector<IterationMetrics>>& runs) {
    if (runs.empty()) throw InputError("nothing to summarize");
    const std::size_t n = runs.begin()->second.size();
    std::map<std::string, std::vector<std::size_t>> bins;
    for (const auto& [name, metrics] : runs) {
        auto& b = bins[name];
        for (const auto& m : metrics) b.push_back(m.bins_used);
    }
    const auto scores = cbs(bins, n);
    std::vector<AlgorithmSummary> out;
    for (const auto& [name, metrics] : runs) {
        std::vector<double> rs;
        double bin_sum = 0.0;
        for (const auto& m : metrics) {
            rs.push_back(m.rscore);
            bin_sum += static_cast<double>(m.bins_used);
        }
        out.push_back({name, scores.at(name), avg_rscore(rs), bin_sum / static_cast<double>(n)});
    }
    return out;
}

}  // namespace visbp
