#pragma once

#include <cstdint>
#include <string_view>

#include "visbp/model.hpp"

namespace visbp {

enum class InitMode { UniformRandom, AllZero, HalfCapacity, FullCapacity };

[[nodiscard]] std::string_view to_string(InitMode m) noexcept;
/// Accepts uniform, zero, half, full. Throws InputError otherwise.
[[nodiscard]] InitMode parse_init_mode(std::string_view name);

struct StreamConfig {
    std::size_t partitions{32};
    std::size_t iterations{500};
    double delta{5.0};  ///< percent of C, in [0, 100]
    double capacity{1.0};
    InitMode init{InitMode::UniformRandom};
    std::uint64_t seed{0};
};

/// Random-walk write speeds: s_j(t_1) from the init mode, then
/// s_j(t_k) = clamp(s_j(t_{k-1}) + u * C / 100, 0, C) with u uniform in
/// [-delta, delta], drawn per partition in ascending id order. Upper clamps
/// are counted in MeasurementStream::clamp_count. Iterations are numbered
/// from 1.
[[nodiscard]] MeasurementStream generate_stream(const StreamConfig& cfg);

/// Multiplies every speed and the capacity by `factor` (> 0).
[[nodiscard]] MeasurementStream scale_stream(const MeasurementStream& stream, double factor);

}  // namespace visbp
