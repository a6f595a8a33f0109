#pragma once

// Named assignment algorithms ("ffd", "bfd-adapted", "mwf", "kafka_15", ...)
// and a stateful runner that feeds each packer its own previous output.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "visbp/heuristics.hpp"
#include "visbp/model.hpp"

namespace visbp {

enum class AlgorithmKind { Classic, Modified, Kafka };

struct AlgorithmSpec {
    std::string name;
    AlgorithmKind kind{AlgorithmKind::Classic};
    PackerConfig classic{};
    ModifiedConfig modified{};
    std::size_t kafka_consumers{0};
    std::optional<std::uint64_t> kafka_shuffle_seed{};

    [[nodiscard]] double capacity() const noexcept;
};

/// Parses nf, nfd, ff, ffd, wf, wfd, bf, bfd (optionally suffixed with
/// "-adapted"), mwf, mbf, mwfp, mbfp, and kafka_N / kd_N.
/// Throws InputError for unknown names.
[[nodiscard]] AlgorithmSpec parse_algorithm(std::string_view name, double capacity);

/// The adapted form of a classic algorithm; other kinds are returned as is.
[[nodiscard]] AlgorithmSpec with_adaptation(AlgorithmSpec spec);

[[nodiscard]] std::vector<std::string> classic_algorithm_names();
[[nodiscard]] std::vector<std::string> adapted_algorithm_names();
[[nodiscard]] std::vector<std::string> modified_algorithm_names();

/// One packing step. prev is the assignment of the previous iteration, or null
/// at the first one.
[[nodiscard]] AssignmentMatrix assign_once(const AlgorithmSpec& spec, const SpeedMap& s,
                                           const AssignmentMatrix* prev);

/// Runs an algorithm over successive measurements. Kafka assignments are
/// computed once and then held fixed.
class Assigner {
public:
    explicit Assigner(AlgorithmSpec spec) : spec_(std::move(spec)) {}

    /// Returns X(t_k) for the next measurement.
    const AssignmentMatrix& next(const SpeedMap& s);

    [[nodiscard]] const AlgorithmSpec& spec() const noexcept { return spec_; }
    [[nodiscard]] const AssignmentMatrix* current() const noexcept {
        return current_ ? &*current_ : nullptr;
    }

private:
    AlgorithmSpec spec_;
    std::optional<AssignmentMatrix> current_;
};

}  // namespace visbp
