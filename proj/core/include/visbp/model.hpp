#pragma once

// Core value types of the variable-item-size bin packing (VISBP) model:
// partitions are items sized by their write speed, consumers are bins of
// capacity C, and an assignment is a binary consumer x partition matrix.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace visbp {

struct PartitionId {
    std::size_t index{};
    auto operator<=>(const PartitionId&) const = default;
};

/// Row index of the assignment matrix. The same index at k-1 and k is the
/// same consumer.
struct ConsumerId {
    std::size_t index{};
    auto operator<=>(const ConsumerId&) const = default;
};

/// Per-partition write speeds (bytes/s) measured at iteration k.
class SpeedMap {
public:
    SpeedMap() = default;
    SpeedMap(std::vector<double> speeds, std::size_t iteration);

    [[nodiscard]] std::size_t size() const noexcept { return speeds_.size(); }
    [[nodiscard]] std::size_t iteration() const noexcept { return iteration_; }
    [[nodiscard]] double operator[](PartitionId j) const { return speeds_.at(j.index); }
    [[nodiscard]] std::span<const double> values() const noexcept { return speeds_; }
    [[nodiscard]] double total() const noexcept;
    [[nodiscard]] double max() const noexcept;

    bool operator==(const SpeedMap&) const = default;

private:
    std::vector<double> speeds_;
    std::size_t iteration_{};
};

/// Throws InputError when a speed is negative, not finite, or larger than C.
void validate_speeds(const SpeedMap& s, double capacity);

/// A sequence of measurements plus the parameters that produced it.
struct MeasurementStream {
    double capacity{1.0};
    double delta{0.0};
    std::uint64_t seed{0};
    std::string init{"uniform"};
    std::string generator{};
    std::size_t clamp_count{0};
    std::vector<SpeedMap> measurements;

    [[nodiscard]] std::size_t partition_count() const noexcept {
        return measurements.empty() ? 0 : measurements.front().size();
    }
    [[nodiscard]] std::size_t length() const noexcept { return measurements.size(); }
};

/// Binary matrix X (|B| x |P|) plus the usage vector y.
class AssignmentMatrix {
public:
    AssignmentMatrix() = default;
    AssignmentMatrix(std::size_t consumers, std::size_t partitions, std::size_t iteration = 0);

    [[nodiscard]] std::size_t consumers() const noexcept { return consumers_; }
    [[nodiscard]] std::size_t partitions() const noexcept { return partitions_; }
    [[nodiscard]] std::size_t iteration() const noexcept { return iteration_; }
    void set_iteration(std::size_t k) noexcept { iteration_ = k; }

    [[nodiscard]] bool assigned(ConsumerId i, PartitionId j) const;
    [[nodiscard]] bool used(ConsumerId i) const;
    [[nodiscard]] std::span<const std::uint8_t> usage() const noexcept { return y_; }

    /// Sets x_ij = 1 and y_i = 1. Does not clear other rows of column j.
    void assign(ConsumerId i, PartitionId j);
    void unassign(ConsumerId i, PartitionId j);
    void set_used(ConsumerId i, bool used);

    /// The unique consumer holding j, nullopt when the column is empty.
    /// Throws InvariantViolation if the column holds more than one 1.
    [[nodiscard]] std::optional<ConsumerId> owner(PartitionId j) const;
    [[nodiscard]] std::vector<PartitionId> partitions_of(ConsumerId i) const;
    [[nodiscard]] std::vector<ConsumerId> used_consumers() const;
    [[nodiscard]] std::size_t bins_used() const noexcept;
    [[nodiscard]] bool is_zero() const noexcept;
    [[nodiscard]] double load(ConsumerId i, const SpeedMap& s) const;

    /// Equality ignores the iteration stamp.
    bool operator==(const AssignmentMatrix& other) const noexcept;

private:
    [[nodiscard]] std::size_t cell(ConsumerId i, PartitionId j) const;

    std::size_t consumers_{};
    std::size_t partitions_{};
    std::size_t iteration_{};
    std::vector<std::uint8_t> x_;
    std::vector<std::uint8_t> y_;
};

/// X(t_k) - X(t_{k-1}); entries in {-1, 0, 1}.
class DeltaMatrix {
public:
    DeltaMatrix(std::size_t consumers, std::size_t partitions, std::size_t iteration);

    [[nodiscard]] std::size_t consumers() const noexcept { return consumers_; }
    [[nodiscard]] std::size_t partitions() const noexcept { return partitions_; }
    [[nodiscard]] std::size_t iteration() const noexcept { return iteration_; }
    [[nodiscard]] int at(ConsumerId i, PartitionId j) const;
    void set(ConsumerId i, PartitionId j, int value);
    [[nodiscard]] bool is_zero() const noexcept;

private:
    std::size_t consumers_{};
    std::size_t partitions_{};
    std::size_t iteration_{};
    std::vector<std::int8_t> d_;
};

/// Classification of the non-zero columns of a DeltaMatrix.
struct MigrationReport {
    std::vector<PartitionId> rebalanced;  ///< column holds both +1 and -1
    std::vector<PartitionId> arrivals;    ///< single +1
    std::vector<PartitionId> departures;  ///< single -1
};

struct ValidationReport {
    bool coverage_ok{true};  ///< every column sums to exactly 1
    bool capacity_ok{true};  ///< sum_j s_j x_ij <= C y_i for every row
    bool usage_ok{true};     ///< x_ij = 1 implies y_i = 1
    std::vector<PartitionId> uncovered;
    std::vector<ConsumerId> overloaded;
    std::vector<ConsumerId> unmarked;

    [[nodiscard]] bool ok() const noexcept { return coverage_ok && capacity_ok && usage_ok; }
    [[nodiscard]] std::string describe() const;
};

/// Relative slack used when comparing consumer loads against C, to absorb
/// summation-order rounding.
inline constexpr double kCapacityRelTol = 1e-9;

[[nodiscard]] DeltaMatrix compute_delta(const AssignmentMatrix& prev, const AssignmentMatrix& next);
[[nodiscard]] MigrationReport classify_migrations(const DeltaMatrix& delta);
[[nodiscard]] ValidationReport validate_assignment(const AssignmentMatrix& a, const SpeedMap& s,
                                                   double capacity);

}  // namespace visbp
