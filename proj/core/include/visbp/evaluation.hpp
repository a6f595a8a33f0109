#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "visbp/algorithms.hpp"
#include "visbp/metrics.hpp"
#include "visbp/model.hpp"

namespace visbp {

/// Runs one algorithm over every measurement of a stream and records bins and
/// Rscore per iteration. Iteration 1 is diffed against the all-zero matrix.
[[nodiscard]] std::vector<IterationMetrics> evaluate_stream(const AlgorithmSpec& spec,
                                                            const MeasurementStream& stream);

/// evaluate_stream for several algorithms, keyed by algorithm name.
/// Runs on `workers` threads; the result never depends on scheduling.
[[nodiscard]] std::map<std::string, std::vector<IterationMetrics>> evaluate_all(
    std::span<const AlgorithmSpec> specs, const MeasurementStream& stream, unsigned workers = 1);

}  // namespace visbp
