#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace visbp::cli {

/// FNV-1a, 64 bit.
[[nodiscard]] std::uint64_t fnv1a64(std::string_view bytes) noexcept;
/// FNV-1a of a file's bytes as 16 lowercase hex digits.
[[nodiscard]] std::string file_digest(const std::filesystem::path& path);

/// Reproducibility record written next to a command's outputs.
struct Manifest {
    std::string command;
    std::map<std::string, std::string> config;  ///< flag name -> value as given
    std::uint64_t seed{0};
    std::vector<std::filesystem::path> inputs;
    std::vector<std::filesystem::path> outputs;  ///< digested relative to the manifest's directory

    /// Writes JSON with the digests of every input and output file.
    void write(const std::filesystem::path& path) const;
};

}  // namespace visbp::cli
