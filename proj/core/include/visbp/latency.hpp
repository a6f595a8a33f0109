#pragma once

// Analytical per-byte latency model. Each consumer splits the data it must
// read into a fixed queue (partitions it already held) and a rebalanced queue
// (partitions that just moved in and cannot be read until the rebalance
// finishes). Latency grows linearly in the byte index with slope
// 1/read_rate - 1/write_rate and is floored at zero.

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "visbp/algorithms.hpp"
#include "visbp/model.hpp"

namespace visbp {

struct LatencyConfig {
    double consumer_capacity{1.2};  ///< real maximum consumption rate, bytes/s
    double iteration_secs{30.0};
    double rebalance_secs{5.0};
    double sample_stride{1.0};  ///< bytes between emitted samples

    /// Throws InputError unless capacity > 0, 0 <= rebalance < iteration, stride >= 1.
    void validate() const;
};

/// Largest bin capacity for which a consumer that receives a full bin of
/// migrated partitions still drains its rebalanced queue within the
/// iteration: C = (iteration - rebalance) / iteration * real_capacity.
[[nodiscard]] double bin_capacity_bound(double real_capacity, double iteration_secs,
                                        double rebalance_secs);

enum class QueueKind { Fixed, Rebalanced };

[[nodiscard]] const char* to_string(QueueKind k) noexcept;

struct QueueSets {
    std::vector<PartitionId> fixed;       ///< held at k-1 and still held at k
    std::vector<PartitionId> rebalanced;  ///< newly assigned to the consumer at k
};

[[nodiscard]] QueueSets partition_queues(const AssignmentMatrix& prev, const AssignmentMatrix& next,
                                         ConsumerId c);

/// Rates and volumes of one consumer in one iteration.
struct QueueModel {
    ConsumerId consumer;
    std::size_t iteration{};
    double w_fixed{};        ///< production into the fixed queue, bytes/s
    double w_rebalanced{};   ///< production into the rebalanced queue, bytes/s
    double r_fixed{};        ///< read rate of the fixed queue
    double r_rebalanced{};   ///< read rate of the rebalanced queue
    double t_fixed{};        ///< bytes produced into the fixed queue this iteration
    double t_rebalanced{};   ///< bytes produced into the rebalanced queue
    double carried_in{};     ///< latency of the fixed queue's last byte at k-1
    double carried_out{};    ///< latency of the fixed queue's last byte at k
};

struct LatencySample {
    ConsumerId consumer;
    std::size_t iteration{};
    QueueKind kind{QueueKind::Fixed};
    double byte_index{};
    double latency{};
};

/// Samples L(t) = max(slope * t * stride + intercept, 0) for t in [0, count).
struct LatencySeries {
    ConsumerId consumer;
    std::size_t iteration{};
    QueueKind kind{QueueKind::Fixed};
    double slope{};      ///< seconds per byte
    double intercept{};  ///< seconds
    double stride{1.0};
    std::size_t count{};

    [[nodiscard]] double byte_index(std::size_t t) const noexcept {
        return static_cast<double>(t) * stride;
    }
    [[nodiscard]] double at(std::size_t t) const noexcept;
};

struct IterationLatency {
    std::vector<QueueModel> queues;
    std::vector<LatencySeries> series;
    std::map<ConsumerId, double> carried;  ///< end-of-iteration fixed-queue latency

    /// Every sample of every series, in series order.
    [[nodiscard]] std::vector<LatencySample> samples() const;
};

/// Latency of every consumer used in `next`. carried maps a consumer to the
/// latency its fixed queue ended the previous iteration with; missing entries
/// count as 0. Throws ModelDegenerate when a consumer with migrated-in load
/// has no read capacity left for it.
[[nodiscard]] IterationLatency iteration_latency(const AssignmentMatrix& prev,
                                                 const AssignmentMatrix& next, const SpeedMap& s,
                                                 const LatencyConfig& cfg,
                                                 const std::map<ConsumerId, double>& carried);

/// Distribution of the positive samples of many series, answered exactly
/// without materializing the samples.
class LatencyDistribution {
public:
    void add(const LatencySeries& series);
    void add(const std::vector<LatencySeries>& series);

    [[nodiscard]] std::size_t total_samples() const noexcept { return total_; }
    [[nodiscard]] std::size_t positive_samples() const noexcept { return positive_; }

    /// Number of samples with 0 < latency <= x.
    [[nodiscard]] std::size_t count_positive_at_most(double x) const;
    /// Nearest-rank percentile (p in [0, 100]) of the positive samples; 0 when there are none.
    [[nodiscard]] double percentile(double p) const;
    [[nodiscard]] double max() const noexcept { return max_; }
    /// Counts of positive samples in (edges[b], edges[b+1]].
    [[nodiscard]] std::vector<std::size_t> histogram(const std::vector<double>& edges) const;

    [[nodiscard]] const std::vector<LatencySeries>& series() const noexcept { return series_; }

private:
    std::vector<LatencySeries> series_;
    std::size_t total_{0};
    std::size_t positive_{0};
    double max_{0.0};
};

struct LatencyReport {
    std::string algorithm;
    std::size_t iterations{};
    double avg_consumers{};
    LatencyDistribution distribution;

    [[nodiscard]] std::size_t positive_samples() const noexcept {
        return distribution.positive_samples();
    }
    [[nodiscard]] double p50() const { return distribution.percentile(50); }
    [[nodiscard]] double p90() const { return distribution.percentile(90); }
    [[nodiscard]] double p99() const { return distribution.percentile(99); }
};

/// Runs an assignment algorithm over the stream and accumulates the latency
/// of every byte. Packers re-pack every iteration against their own previous
/// output; Kafka's assignment is fixed and all its partitions sit in the fixed
/// queue from the first iteration. Packer capacity must not exceed
/// bin_capacity_bound.
[[nodiscard]] LatencyReport run_latency_experiment(const MeasurementStream& stream,
                                                   const AlgorithmSpec& assigner,
                                                   const LatencyConfig& cfg);

}  // namespace visbp
