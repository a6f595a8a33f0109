#pragma once

// Stream file format (UTF-8 CSV):
//
//   # visbp-stream v1
//   # generator: mt19937_64/u53
//   # capacity: 1
//   # delta: 25
//   # seed: 7
//   # init: uniform
//   # partitions: 32
//   # iterations: 500
//   # clamp_count: 3
//   iteration,partition,bytes_per_sec
//   1,0,0.41702200470257400
//   ...
//
// Rows are sorted by (iteration, partition); iterations count from 1 and every
// iteration lists every partition. Speeds are written with 17 significant
// digits so a file round-trips to the exact in-memory stream.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "visbp/model.hpp"

namespace visbp {

/// printf("%.*g") with the given number of significant digits.
[[nodiscard]] std::string format_number(double value, int significant_digits = 9);

void write_stream(std::ostream& os, const MeasurementStream& stream);
void write_stream_file(const std::filesystem::path& path, const MeasurementStream& stream);

/// Throws InputError on malformed content or speeds outside [0, C].
/// capacity_override replaces (or supplies) the header capacity.
[[nodiscard]] MeasurementStream read_stream(std::istream& is,
                                            std::optional<double> capacity_override = {});
[[nodiscard]] MeasurementStream read_stream_file(const std::filesystem::path& path,
                                                 std::optional<double> capacity_override = {});

}  // namespace visbp
