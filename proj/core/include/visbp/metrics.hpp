#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "visbp/model.hpp"

namespace visbp {

struct IterationMetrics {
    std::string algorithm;
    std::size_t iteration{};
    std::size_t bins_used{};
    double rscore{};
};

struct AlgorithmSummary {
    std::string algorithm;
    double cbs{};
    double avg_rscore{};
    double avg_bins{};
};

struct ParetoPoint {
    std::string algorithm;
    double cbs{};
    double avg_rscore{};
};

/// Rebalance cost of one iteration: the write speed of every migrated
/// partition, in units of bin capacity. Arrivals and departures cost nothing.
[[nodiscard]] double rscore(const MigrationReport& report, const SpeedMap& s, double capacity);

/// Cardinal bin score per algorithm: the mean over iterations of the relative
/// excess of its bin count over the best algorithm of that iteration.
/// Throws InputError on an empty set, a wrong length, or a zero count.
[[nodiscard]] std::map<std::string, double> cbs(
    const std::map<std::string, std::vector<std::size_t>>& per_iteration, std::size_t iterations);

/// Arithmetic mean. Throws InputError on an empty list.
[[nodiscard]] double avg_rscore(std::span<const double> rscores);

/// true when a is no worse than b in both objectives and better in one.
[[nodiscard]] bool dominates(const ParetoPoint& a, const ParetoPoint& b) noexcept;

/// Non-dominated points (both objectives minimized), sorted by cbs, then
/// avg_rscore, then name. Exact duplicates are all kept.
[[nodiscard]] std::vector<ParetoPoint> pareto_front(std::span<const ParetoPoint> points);

/// Exact minimum bin count by exhaustive search. Limited to 12 items.
[[nodiscard]] std::size_t brute_force_opt(const SpeedMap& s, double capacity);

/// CBS, mean Rscore and mean bin count for every algorithm in `runs`, where
/// each run holds that algorithm's per-iteration metrics in iteration order.
[[nodiscard]] std::vector<AlgorithmSummary> summarize(
    const std::map<std::string, std::vector<IterationMetrics>>& runs);

}  // namespace visbp
