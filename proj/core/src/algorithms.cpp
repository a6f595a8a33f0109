#include "visbp/algorithms.hpp"

#include <array>
#include <charconv>

#include "visbp/errors.hpp"

namespace visbp {

namespace {

struct ClassicEntry {
    std::string_view name;
    FitStrategy fit;
    SortMode sort;
};

constexpr std::array<ClassicEntry, 8> kClassic{{
    {"nf", FitStrategy::NextFit, SortMode::None},
    {"nfd", FitStrategy::NextFit, SortMode::Decreasing},
    {"ff", FitStrategy::FirstFit, SortMode::None},
    {"ffd", FitStrategy::FirstFit, SortMode::Decreasing},
    {"wf", FitStrategy::WorstFit, SortMode::None},
    {"wfd", FitStrategy::WorstFit, SortMode::Decreasing},
    {"bf", FitStrategy::BestFit, SortMode::None},
    {"bfd", FitStrategy::BestFit, SortMode::Decreasing},
}};

struct ModifiedEntry {
    std::string_view name;
    FitStrategy fit;
    ConsumerSortStrategy sort;
};

constexpr std::array<ModifiedEntry, 4> kModified{{
    {"mwf", FitStrategy::WorstFit, ConsumerSortStrategy::CumulativeWriteSpeed},
    {"mbf", FitStrategy::BestFit, ConsumerSortStrategy::CumulativeWriteSpeed},
    {"mwfp", FitStrategy::WorstFit, ConsumerSortStrategy::MaxPartitionWriteSpeed},
    {"mbfp", FitStrategy::BestFit, ConsumerSortStrategy::MaxPartitionWriteSpeed},
}};

constexpr std::string_view kAdaptedSuffix = "-adapted";

}  // namespace

double AlgorithmSpec::capacity() const noexcept {
    switch (kind) {
        case AlgorithmKind::Classic: return classic.capacity;
        case AlgorithmKind::Modified: return modified.capacity;
        case AlgorithmKind::Kafka: return classic.capacity;
    }
    return classic.capacity;
}

AlgorithmSpec parse_algorithm(std::string_view name, double capacity) {
    if (!(capacity > 0.0)) throw InputError("bin capacity must be positive");
    AlgorithmSpec spec;
    spec.name = std::string(name);
    spec.classic.capacity = capacity;
    spec.modified.capacity = capacity;

    std::string_view base = name;
    bool adapted = false;
    if (base.size() > kAdaptedSuffix.size() && base.ends_with(kAdaptedSuffix)) {
        base.remove_suffix(kAdaptedSuffix.size());
        adapted = true;
    }
    for (const auto& e : kClassic) {
        if (e.name == base) {
            spec.kind = AlgorithmKind::Classic;
            spec.classic.fit = e.fit;
            spec.classic.sort = e.sort;
            spec.classic.adapted = adapted;
            return spec;
        }
    }
    if (!adapted) {
        for (const auto& e : kModified) {
            if (e.name == base) {
                spec.kind = AlgorithmKind::Modified;
                spec.modified.fit = e.fit;
                spec.modified.consumer_sort = e.sort;
                return spec;
            }
        }
        for (std::string_view prefix : {std::string_view{"kafka_"}, std::string_view{"kd_"}}) {
            if (base.starts_with(prefix)) {
                const std::string_view digits = base.substr(prefix.size());
                std::size_t n = 0;
                const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
                if (ec != std::errc{} || ptr != digits.data() + digits.size() || n == 0) {
                    throw InputError("bad kafka consumer count in '" + std::string(name) + "'");
                }
                spec.kind = AlgorithmKind::Kafka;
                spec.kafka_consumers = n;
                spec.name = "kafka_" + std::to_string(n);
                return spec;
            }
        }
    }
    throw InputError("unknown algorithm '" + std::string(name) + "'");
}

AlgorithmSpec with_adaptation(AlgorithmSpec spec) {
    if (spec.kind == AlgorithmKind::Classic && !spec.classic.adapted) {
        spec.classic.adapted = true;
        spec.name += kAdaptedSuffix;
    }
    return spec;
}

std::vector<std::string> classic_algorithm_names() {
    std::vector<std::string> out;
    for (const auto& e : kClassic) out.emplace_back(e.name);
    return out;
}

std::vector<std::string> adapted_algorithm_names() {
    std::vector<std::string> out;
    for (const auto& e : kClassic) out.push_back(std::string(e.name) + std::string(kAdaptedSuffix));
    return out;
}

std::vector<std::string> modified_algorithm_names() {
    std::vector<std::string> out;
    for (const auto& e : kModified) out.emplace_back(e.name);
    return out;
}

AssignmentMatrix assign_once(const AlgorithmSpec& spec, const SpeedMap& s,
                             const AssignmentMatrix* prev) {
    switch (spec.kind) {
        case AlgorithmKind::Classic:
            return pack_classic(spec.classic, s, prev);
        case AlgorithmKind::Modified: {
            if (prev != nullptr) {
                std::vector<PartitionId> missing;
                for (std::size_t j = 0; j < s.size(); ++j) {
                    if (!prev->owner(PartitionId{j})) missing.push_back(PartitionId{j});
                }
                return pack_modified(spec.modified, s, *prev, missing);
            }
            const AssignmentMatrix empty(s.size(), s.size());
            const auto all = partition_order(s.size());
            return pack_modified(spec.modified, s, empty, all);
        }
        case AlgorithmKind::Kafka: {
            auto out = kafka_assign(spec.kafka_consumers,
                                    partition_order(s.size(), spec.kafka_shuffle_seed));
            out.set_iteration(s.iteration());
            return out;
        }
    }
    throw InputError("unhandled algorithm kind");
}

const AssignmentMatrix& Assigner::next(const SpeedMap& s) {
    if (spec_.kind == AlgorithmKind::Kafka && current_) {
        current_->set_iteration(s.iteration());
        return *current_;
    }
    current_ = assign_once(spec_, s, current_ ? &*current_ : nullptr);
    return *current_;
}

}  // namespace visbp
