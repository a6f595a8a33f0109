#include "visbp_cli/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <iterator>

#include <nlohmann/json.hpp>

#include "visbp/errors.hpp"
#include "visbp/random.hpp"

namespace visbp::cli {

namespace {
constexpr const char* kArtifactVersion = "visbp 0.1.0";
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string file_digest(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw InputError("cannot read " + path.string());
    const std::string bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

void Manifest::write(const std::filesystem::path& path) const {
    nlohmann::json j;
    j["command"] = command;
    j["config"] = config;
    j["seed"] = seed;
    j["version"] = kArtifactVersion;
    j["rng"] = Rng::kName;
    j["digest"] = "fnv1a64";
    nlohmann::json in = nlohmann::json::array();
    for (const auto& p : inputs) in.push_back({{"path", p.generic_string()}, {"digest", file_digest(p)}});
    j["inputs"] = in;
    const auto dir = path.parent_path();
    nlohmann::json out = nlohmann::json::array();
    for (const auto& p : outputs) {
        out.push_back({{"path", p.generic_string()}, {"digest", file_digest(dir / p)}});
    }
    j["outputs"] = out;
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InputError("cannot open " + path.string() + " for writing");
    os << j.dump(2) << '\n';
}

}  // namespace visbp::cli
