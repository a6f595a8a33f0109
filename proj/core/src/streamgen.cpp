#include "visbp/streamgen.hpp"

#include <algorithm>
#include <cmath>

#include "visbp/errors.hpp"
#include "visbp/random.hpp"

namespace visbp {

std::string_view to_string(InitMode m) noexcept {
    switch (m) {
        case InitMode::UniformRandom: return "uniform";
        case InitMode::AllZero: return "zero";
        case InitMode::HalfCapacity: return "half";
        case InitMode::FullCapacity: return "full";
    }
    return "uniform";
}

InitMode parse_init_mode(std::string_view name) {
    if (name == "uniform") return InitMode::UniformRandom;
    if (name == "zero") return InitMode::AllZero;
    if (name == "half") return InitMode::HalfCapacity;
    if (name == "full") return InitMode::FullCapacity;
    throw InputError("unknown init mode '" + std::string(name) + "' (uniform, zero, half, full)");
}

MeasurementStream generate_stream(const StreamConfig& cfg) {
    if (cfg.partitions == 0) throw InputError("a stream needs at least one partition");
    if (cfg.iterations == 0) throw InputError("a stream needs at least one iteration");
    if (!(cfg.capacity > 0.0) || !std::isfinite(cfg.capacity)) {
        throw InputError("capacity must be positive");
    }
    if (!(cfg.delta >= 0.0 && cfg.delta <= 100.0)) throw InputError("delta must lie in [0, 100]");

    MeasurementStream stream;
    stream.capacity = cfg.capacity;
    stream.delta = cfg.delta;
    stream.seed = cfg.seed;
    stream.init = std::string(to_string(cfg.init));
    stream.generator = Rng::kName;
    stream.measurements.reserve(cfg.iterations);

    Rng rng(cfg.seed);
    const double c = cfg.capacity;
    std::vector<double> speeds(cfg.partitions);
    for (double& v : speeds) {
        switch (cfg.init) {
            case InitMode::UniformRandom: v = rng.uniform01() * c; break;
            case InitMode::AllZero: v = 0.0; break;
            case InitMode::HalfCapacity: v = 0.5 * c; break;
            case InitMode::FullCapacity: v = c; break;
        }
    }
    stream.measurements.emplace_back(speeds, 1);

    for (std::size_t k = 2; k <= cfg.iterations; ++k) {
        for (double& v : speeds) {
            const double step = rng.uniform(-cfg.delta, cfg.delta) / 100.0 * c;
            double next = std::max(0.0, v + step);
            if (next > c) {
                next = c;
                ++stream.clamp_count;
            }
            v = next;
        }
        stream.measurements.emplace_back(speeds, k);
    }
    return stream;
}

MeasurementStream scale_stream(const MeasurementStream& stream, double factor) {
    if (!(factor > 0.0) || !std::isfinite(factor)) throw InputError("scale factor must be positive");
    MeasurementStream out = stream;
    out.capacity = stream.capacity * factor;
    for (auto& m : out.measurements) {
        std::vector<double> v(m.values().begin(), m.values().end());
        for (double& x : v) x *= factor;
        m = SpeedMap(std::move(v), m.iteration());
    }
    return out;
}

}  // namespace visbp
