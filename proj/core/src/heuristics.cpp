#include "visbp/heuristics.hpp"

#include <algorithm>
#include <numeric>
#include <optional>

#include "visbp/errors.hpp"
#include "visbp/random.hpp"

namespace visbp {

std::string_view to_string(FitStrategy f) noexcept {
    switch (f) {
        case FitStrategy::NextFit: return "next-fit";
        case FitStrategy::FirstFit: return "first-fit";
        case FitStrategy::WorstFit: return "worst-fit";
        case FitStrategy::BestFit: return "best-fit";
    }
    return "?";
}

namespace {

// Bins of one packing run, kept in the order they were opened. Position in
// this list is the "left to right" order the fit rules scan; with adaptation
// it differs from the consumer index.
class BinList {
public:
    BinList(FitStrategy fit, double capacity) : fit_(fit), capacity_(capacity) {}

    struct Bin {
        ConsumerId id;
        double load{};
    };

    [[nodiscard]] bool fits(const Bin& b, double size) const { return b.load + size <= capacity_; }

    /// Position of the bin chosen by the fit rule, or nullopt if none fits.
    [[nodiscard]] std::optional<std::size_t> select(double size) const {
        if (bins_.empty()) return std::nullopt;
        if (fit_ == FitStrategy::NextFit) {
            const std::size_t last = bins_.size() - 1;
            return fits(bins_[last], size) ? std::optional<std::size_t>{last} : std::nullopt;
        }
        std::optional<std::size_t> best;
        for (std::size_t q = 0; q < bins_.size(); ++q) {
            if (!fits(bins_[q], size)) continue;
            if (fit_ == FitStrategy::FirstFit) return q;
            if (!best) {
                best = q;
                continue;
            }
            // Strict comparisons keep the earliest bin on ties.
            if (fit_ == FitStrategy::BestFit && bins_[q].load > bins_[*best].load) best = q;
            if (fit_ == FitStrategy::WorstFit && bins_[q].load < bins_[*best].load) best = q;
        }
        return best;
    }

    /// Loads of the bins currently open (only the last one under NextFit).
    [[nodiscard]] std::vector<double> open_loads() const {
        std::vector<double> out;
        if (bins_.empty()) return out;
        if (fit_ == FitStrategy::NextFit) {
            out.push_back(bins_.back().load);
        } else {
            for (const auto& b : bins_) out.push_back(b.load);
        }
        return out;
    }

    std::size_t open(ConsumerId id) {
        bins_.push_back(Bin{id, 0.0});
        return bins_.size() - 1;
    }

    [[nodiscard]] std::optional<std::size_t> find(ConsumerId id) const {
        for (std::size_t q = 0; q < bins_.size(); ++q) {
            if (bins_[q].id == id) return q;
        }
        return std::nullopt;
    }

    Bin& operator[](std::size_t q) { return bins_[q]; }
    const Bin& operator[](std::size_t q) const { return bins_[q]; }

private:
    FitStrategy fit_;
    double capacity_;
    std::vector<Bin> bins_;
};

// Decreasing by speed; stable so ties keep ascending partition id.
void sort_decreasing(std::vector<PartitionId>& items, const SpeedMap& s) {
    std::stable_sort(items.begin(), items.end(),
                     [&s](PartitionId a, PartitionId b) { return s[a] > s[b]; });
}

void require_capacity(double capacity) {
    if (!(capacity > 0.0)) throw InputError("bin capacity must be positive");
}

}  // namespace

ConsumerId lowest_unused_consumer(std::span<const std::uint8_t> y) {
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] == 0) return ConsumerId{i};
    }
    throw CapacityExhausted("all " + std::to_string(y.size()) + " consumers are already in use");
}

ConsumerId previous_consumer(PartitionId j, const AssignmentMatrix& prev) {
    const auto owner = prev.owner(j);
    if (!owner) {
        throw NotFound("partition " + std::to_string(j.index) +
                       " has no consumer in the previous assignment");
    }
    return *owner;
}

ConsumerId choose_bin_to_open(PartitionId j, const AssignmentMatrix* prev,
                              std::span<const std::uint8_t> y) {
    if (prev != nullptr) {
        if (const auto owner = prev->owner(j); owner && owner->index < y.size() &&
                                               y[owner->index] == 0) {
            return *owner;
        }
    }
    return lowest_unused_consumer(y);
}

AssignmentMatrix pack_classic(const PackerConfig& cfg, const SpeedMap& s,
                              const AssignmentMatrix* prev, PackTrace* trace) {
    require_capacity(cfg.capacity);
    validate_speeds(s, cfg.capacity);
    const std::size_t n = s.size();
    if (prev != nullptr && prev->partitions() != n) {
        throw StructuralError("previous assignment does not match the number of partitions");
    }

    std::vector<PartitionId> order(n);
    for (std::size_t j = 0; j < n; ++j) order[j] = PartitionId{j};
    if (cfg.sort == SortMode::Decreasing) sort_decreasing(order, s);

    AssignmentMatrix out(n, n, s.iteration());
    BinList bins(cfg.fit, cfg.capacity);
    for (PartitionId j : order) {
        const double size = s[j];
        auto q = bins.select(size);
        if (!q) {
            const ConsumerId id = cfg.adapted ? choose_bin_to_open(j, prev, out.usage())
                                              : lowest_unused_consumer(out.usage());
            if (trace != nullptr) {
                trace->openings.push_back({j, id, size, bins.open_loads()});
            }
            q = bins.open(id);
            out.set_used(id, true);
        }
        bins[*q].load += size;
        out.assign(bins[*q].id, j);
    }
    return out;
}

AssignmentMatrix pack_modified(const ModifiedConfig& cfg, const SpeedMap& s,
                               const AssignmentMatrix& prev,
                               std::span<const PartitionId> unassigned) {
    require_capacity(cfg.capacity);
    if (cfg.fit != FitStrategy::WorstFit && cfg.fit != FitStrategy::BestFit) {
        throw InputError("modified any fit supports only worst-fit and best-fit");
    }
    validate_speeds(s, cfg.capacity);
    const std::size_t n = s.size();
    if (prev.partitions() != n) {
        throw StructuralError("previous assignment does not match the number of partitions");
    }

    std::vector<PartitionId> pending(unassigned.begin(), unassigned.end());
    for (PartitionId p : pending) {
        if (p.index >= n) throw InputError("unassigned partition id out of range");
        if (prev.owner(p)) {
            throw InputError("partition " + std::to_string(p.index) +
                             " is listed as unassigned but has a previous consumer");
        }
    }

    // Previous consumers sorted biggest to smallest under the current speeds.
    struct Prior {
        ConsumerId id;
        double key{};
        std::vector<PartitionId> held;
    };
    std::vector<Prior> prior;
    for (std::size_t i = 0; i < prev.consumers(); ++i) {
        Prior c{ConsumerId{i}, 0.0, prev.partitions_of(ConsumerId{i})};
        if (c.held.empty()) continue;
        for (PartitionId j : c.held) {
            c.key = cfg.consumer_sort == ConsumerSortStrategy::CumulativeWriteSpeed
                        ? c.key + s[j]
                        : std::max(c.key, s[j]);
        }
        prior.push_back(std::move(c));
    }
    std::stable_sort(prior.begin(), prior.end(),
                     [](const Prior& a, const Prior& b) { return a.key > b.key; });

    AssignmentMatrix out(n, n, s.iteration());
    BinList bins(cfg.fit, cfg.capacity);
    auto place = [&](std::size_t q, PartitionId j) {
        bins[q].load += s[j];
        out.assign(bins[q].id, j);
    };

    for (Prior& c : prior) {
        std::vector<PartitionId> pset = std::move(c.held);
        sort_decreasing(pset, s);

        // Smallest first into bins that already exist.
        while (!pset.empty()) {
            const PartitionId p = pset.back();
            const auto q = bins.select(s[p]);
            if (!q) break;
            place(*q, p);
            pset.pop_back();
        }
        if (pset.empty()) continue;

        auto home = bins.find(c.id);
        if (!home) {
            home = bins.open(c.id);
            out.set_used(c.id, true);
        }
        // Biggest first into the recreated consumer.
        std::size_t placed = 0;
        for (; placed < pset.size(); ++placed) {
            if (!bins.fits(bins[*home], s[pset[placed]])) break;
            place(*home, pset[placed]);
        }
        pending.insert(pending.end(), pset.begin() + static_cast<std::ptrdiff_t>(placed), pset.end());
    }

    std::sort(pending.begin(), pending.end());
    sort_decreasing(pending, s);
    for (PartitionId p : pending) {
        auto q = bins.select(s[p]);
        if (!q) {
            const ConsumerId id = lowest_unused_consumer(out.usage());
            q = bins.open(id);
            out.set_used(id, true);
        }
        place(*q, p);
    }

    for (std::size_t j = 0; j < n; ++j) {
        if (!out.owner(PartitionId{j})) {
            throw InputError("partition " + std::to_string(j) +
                             " is neither in the previous assignment nor in the unassigned set");
        }
    }
    return out;
}

AssignmentMatrix kafka_assign(std::size_t n_consumers, std::span<const PartitionId> partitions) {
    const std::size_t n = partitions.size();
    if (n_consumers == 0) throw InputError("kafka assignment needs at least one consumer");
    if (n_consumers > n) {
        throw InputError("kafka assignment with " + std::to_string(n_consumers) +
                         " consumers exceeds the " + std::to_string(n) + " partitions");
    }
    AssignmentMatrix out(n, n);
    for (std::size_t q = 0; q < n; ++q) {
        if (partitions[q].index >= n) throw InputError("partition id out of range");
        out.assign(ConsumerId{q % n_consumers}, partitions[q]);
    }
    return out;
}

std::vector<PartitionId> partition_order(std::size_t count, std::optional<std::uint64_t> shuffle_seed) {
    std::vector<PartitionId> order(count);
    for (std::size_t j = 0; j < count; ++j) order[j] = PartitionId{j};
    if (shuffle_seed) {
        Rng rng(*shuffle_seed);
        for (std::size_t i = count; i > 1; --i) {
            std::swap(order[i - 1], order[rng.below(i)]);
        }
    }
    return order;
}

}  // namespace visbp
