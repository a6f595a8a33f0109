#include "visbp/latency.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>

#include "visbp/errors.hpp"

namespace visbp {

namespace {

// Number of t >= 0 with t * stride < total.
std::size_t sample_count(double total, double stride) {
    if (!(total > 0.0)) return 0;
    auto n = static_cast<std::size_t>(std::ceil(total / stride));
    while (n > 0 && static_cast<double>(n - 1) * stride >= total) --n;
    while (static_cast<double>(n) * stride < total) ++n;
    return n;
}

// First t in [0, n) where pred(t) is false, for a pred that is true on a
// prefix.
template <typename Pred>
std::size_t partition_point(std::size_t n, Pred pred) {
    std::size_t lo = 0;
    std::size_t hi = n;
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (pred(mid)) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    return lo;
}

// Samples of `s` in (0, x].
std::size_t count_in_range(const LatencySeries& s, double x) {
    if (s.count == 0 || !(x > 0.0)) return 0;
    if (s.slope >= 0.0) {
        const std::size_t at_most_x = partition_point(s.count, [&](std::size_t t) { return s.at(t) <= x; });
        const std::size_t zero = partition_point(s.count, [&](std::size_t t) { return s.at(t) <= 0.0; });
        return at_most_x - zero;
    }
    const std::size_t positive = partition_point(s.count, [&](std::size_t t) { return s.at(t) > 0.0; });
    const std::size_t above_x = partition_point(s.count, [&](std::size_t t) { return s.at(t) > x; });
    return positive - above_x;
}

std::size_t count_positive(const LatencySeries& s) {
    return count_in_range(s, std::numeric_limits<double>::infinity());
}

double series_max(const LatencySeries& s) {
    if (s.count == 0) return 0.0;
    return std::max(s.at(0), s.at(s.count - 1));
}

}  // namespace

void LatencyConfig::validate() const {
    if (!(consumer_capacity > 0.0)) throw InputError("consumer capacity must be positive");
    if (!(iteration_secs > 0.0)) throw InputError("iteration length must be positive");
    if (!(rebalance_secs >= 0.0 && rebalance_secs < iteration_secs)) {
        throw InputError("rebalance time must lie in [0, iteration length)");
    }
    if (!(sample_stride >= 1.0)) throw InputError("sample stride must be at least one byte");
}

double bin_capacity_bound(double real_capacity, double iteration_secs, double rebalance_secs) {
    if (!(iteration_secs > 0.0) || !(rebalance_secs >= 0.0) || !(rebalance_secs < iteration_secs)) {
        throw InputError("need 0 <= rebalance_secs < iteration_secs");
    }
    return (iteration_secs - rebalance_secs) * real_capacity / iteration_secs;
}

const char* to_string(QueueKind k) noexcept {
    return k == QueueKind::Fixed ? "fixed" : "rebalanced";
}

QueueSets partition_queues(const AssignmentMatrix& prev, const AssignmentMatrix& next, ConsumerId c) {
    if (prev.consumers() != next.consumers() || prev.partitions() != next.partitions()) {
        throw StructuralError("assignment dimensions differ");
    }
    QueueSets q;
    for (std::size_t j = 0; j < next.partitions(); ++j) {
        const PartitionId p{j};
        if (!next.assigned(c, p)) continue;
        if (prev.assigned(c, p)) {
            q.fixed.push_back(p);
        } else {
            q.rebalanced.push_back(p);
        }
    }
    return q;
}

double LatencySeries::at(std::size_t t) const noexcept {
    return std::max(slope * byte_index(t) + intercept, 0.0);
}

std::vector<LatencySample> IterationLatency::samples() const {
    std::vector<LatencySample> out;
    for (const auto& s : series) {
        for (std::size_t t = 0; t < s.count; ++t) {
            out.push_back({s.consumer, s.iteration, s.kind, s.byte_index(t), s.at(t)});
        }
    }
    return out;
}

IterationLatency iteration_latency(const AssignmentMatrix& prev, const AssignmentMatrix& next,
                                   const SpeedMap& s, const LatencyConfig& cfg,
                                   const std::map<ConsumerId, double>& carried) {
    cfg.validate();
    if (s.size() != next.partitions()) throw StructuralError("speed map does not match assignment");
    const double cbar = cfg.consumer_capacity;
    IterationLatency out;
    for (ConsumerId c : next.used_consumers()) {
        const QueueSets sets = partition_queues(prev, next, c);
        QueueModel q;
        q.consumer = c;
        q.iteration = next.iteration();
        for (PartitionId j : sets.fixed) q.w_fixed += s[j];
        for (PartitionId j : sets.rebalanced) q.w_rebalanced += s[j];
        q.r_fixed = q.w_rebalanced == 0.0 ? cbar : std::min(cbar, q.w_fixed);
        q.r_rebalanced = cbar - q.r_fixed;
        q.t_fixed = cfg.iteration_secs * q.w_fixed;
        q.t_rebalanced = cfg.iteration_secs * q.w_rebalanced;
        if (const auto it = carried.find(c); it != carried.end()) q.carried_in = it->second;

        if (q.w_fixed > 0.0) {
            LatencySeries f{c, q.iteration, QueueKind::Fixed, 1.0 / q.r_fixed - 1.0 / q.w_fixed,
                            q.carried_in, cfg.sample_stride, sample_count(q.t_fixed, cfg.sample_stride)};
            q.carried_out = std::max(f.slope * q.t_fixed + f.intercept, 0.0);
            out.series.push_back(f);
        }
        if (q.w_rebalanced > 0.0) {
            if (!(q.r_rebalanced > 0.0)) {
                throw ModelDegenerate("consumer " + std::to_string(c.index) + " at iteration " +
                                      std::to_string(q.iteration) +
                                      " has migrated-in load but no spare read capacity");
            }
            out.series.push_back({c, q.iteration, QueueKind::Rebalanced,
                                  1.0 / q.r_rebalanced - 1.0 / q.w_rebalanced, cfg.rebalance_secs,
                                  cfg.sample_stride, sample_count(q.t_rebalanced, cfg.sample_stride)});
        }
        out.carried[c] = q.carried_out;
        out.queues.push_back(q);
    }
    return out;
}

void LatencyDistribution::add(const LatencySeries& series) {
    total_ += series.count;
    positive_ += count_positive(series);
    max_ = std::max(max_, series_max(series));
    series_.push_back(series);
}

void LatencyDistribution::add(const std::vector<LatencySeries>& series) {
    for (const auto& s : series) add(s);
}

std::size_t LatencyDistribution::count_positive_at_most(double x) const {
    std::size_t n = 0;
    for (const auto& s : series_) n += count_in_range(s, x);
    return n;
}

double LatencyDistribution::percentile(double p) const {
    if (positive_ == 0) return 0.0;
    if (!(p >= 0.0 && p <= 100.0)) throw InputError("percentile must lie in [0, 100]");
    const double exact = p / 100.0 * static_cast<double>(positive_);
    auto rank = static_cast<std::size_t>(std::ceil(exact - 1e-9));
    rank = std::clamp<std::size_t>(rank, 1, positive_);

    // Smallest positive double x with count(<= x) >= rank. Positive doubles
    // order the same way as their bit patterns, so bisect on the bits.
    std::uint64_t lo = std::bit_cast<std::uint64_t>(std::numeric_limits<double>::denorm_min());
    std::uint64_t hi = std::bit_cast<std::uint64_t>(max_);
    while (lo < hi) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        if (count_positive_at_most(std::bit_cast<double>(mid)) >= rank) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    return std::bit_cast<double>(lo);
}

std::vector<std::size_t> LatencyDistribution::histogram(const std::vector<double>& edges) const {
    std::vector<std::size_t> counts;
    if (edges.size() < 2) return counts;
    std::size_t below = count_positive_at_most(edges.front());
    for (std::size_t b = 1; b < edges.size(); ++b) {
        const std::size_t upto = count_positive_at_most(edges[b]);
        counts.push_back(upto - below);
        below = upto;
    }
    return counts;
}

LatencyReport run_latency_experiment(const MeasurementStream& stream, const AlgorithmSpec& assigner,
                                     const LatencyConfig& cfg) {
    cfg.validate();
    if (stream.length() == 0) throw InputError("empty stream");
    const bool kafka = assigner.kind == AlgorithmKind::Kafka;
    if (!kafka) {
        const double bound = bin_capacity_bound(cfg.consumer_capacity, cfg.iteration_secs, cfg.rebalance_secs);
        if (assigner.capacity() > bound * (1.0 + 1e-12)) {
            throw InputError("bin capacity " + std::to_string(assigner.capacity()) +
                             " exceeds the drain bound " + std::to_string(bound) +
                             " for real capacity " + std::to_string(cfg.consumer_capacity));
        }
    }

    LatencyReport report;
    report.algorithm = assigner.name;
    report.iterations = stream.length();
    const std::size_t n = stream.partition_count();
    Assigner runner(assigner);
    AssignmentMatrix prev(n, n);
    std::map<ConsumerId, double> carried;
    double consumers = 0.0;
    for (const SpeedMap& s : stream.measurements) {
        const AssignmentMatrix& next = runner.next(s);
        const AssignmentMatrix& before = kafka ? next : prev;
        auto step = iteration_latency(before, next, s, cfg, carried);
        report.distribution.add(step.series);
        carried = std::move(step.carried);
        consumers += static_cast<double>(next.bins_used());
        prev = next;
    }
    report.avg_consumers = consumers / static_cast<double>(stream.length());
    return report;
}

}  // namespace visbp
