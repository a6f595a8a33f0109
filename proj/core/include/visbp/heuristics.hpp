#pragma once

// Packing heuristics. Every packer here produces a |P| x |P| assignment
// (one potential consumer per partition) whose rows keep their identity
// across iterations.

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "visbp/model.hpp"

namespace visbp {

enum class FitStrategy { NextFit, FirstFit, WorstFit, BestFit };
enum class SortMode { None, Decreasing };
enum class ConsumerSortStrategy { CumulativeWriteSpeed, MaxPartitionWriteSpeed };

[[nodiscard]] std::string_view to_string(FitStrategy f) noexcept;

struct PackerConfig {
    FitStrategy fit{FitStrategy::FirstFit};
    SortMode sort{SortMode::Decreasing};
    bool adapted{false};  ///< open the partition's previous consumer when possible
    double capacity{1.0};
};

struct ModifiedConfig {
    FitStrategy fit{FitStrategy::WorstFit};  ///< WorstFit or BestFit only
    ConsumerSortStrategy consumer_sort{ConsumerSortStrategy::CumulativeWriteSpeed};
    double capacity{1.0};
};

/// Bin openings recorded by pack_classic, for checking the Any Fit rule.
struct PackTrace {
    struct Opening {
        PartitionId item;
        ConsumerId bin;
        double item_size{};
        std::vector<double> open_loads;  ///< loads of bins that were open just before
    };
    std::vector<Opening> openings;
};

/// min{i : y_i = 0}. Throws CapacityExhausted when every consumer is used.
[[nodiscard]] ConsumerId lowest_unused_consumer(std::span<const std::uint8_t> y);

/// The consumer holding j in prev. Throws NotFound when j is unassigned.
[[nodiscard]] ConsumerId previous_consumer(PartitionId j, const AssignmentMatrix& prev);

/// Consumer to open for j: its previous consumer if that one is still unused,
/// otherwise the lowest unused one. prev may be null (first iteration).
[[nodiscard]] ConsumerId choose_bin_to_open(PartitionId j, const AssignmentMatrix* prev,
                                            std::span<const std::uint8_t> y);

[[nodiscard]] AssignmentMatrix pack_classic(const PackerConfig& cfg, const SpeedMap& s,
                                            const AssignmentMatrix* prev,
                                            PackTrace* trace = nullptr);

/// Modified Any Fit: migrate the smallest partitions of each previous consumer
/// into bins that already exist, recreate the consumer for the rest, and pack
/// whatever is left decreasing with the configured fit.
[[nodiscard]] AssignmentMatrix pack_modified(const ModifiedConfig& cfg, const SpeedMap& s,
                                             const AssignmentMatrix& prev,
                                             std::span<const PartitionId> unassigned);

/// Equal-count round robin: position q of `partitions` goes to consumer
/// q mod n_consumers. Ignores speeds entirely. The matrix has one row per
/// partition, so n_consumers must lie in [1, partitions.size()].
[[nodiscard]] AssignmentMatrix kafka_assign(std::size_t n_consumers,
                                            std::span<const PartitionId> partitions);

/// 0..count-1, optionally shuffled with a seeded Fisher-Yates pass.
[[nodiscard]] std::vector<PartitionId> partition_order(std::size_t count,
                                                       std::optional<std::uint64_t> shuffle_seed = {});

}  // namespace visbp
