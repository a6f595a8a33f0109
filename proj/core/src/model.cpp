#include "visbp/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "visbp/errors.hpp"

namespace visbp {

SpeedMap::SpeedMap(std::vector<double> speeds, std::size_t iteration)
    : speeds_(std::move(speeds)), iteration_(iteration) {}

double SpeedMap::total() const noexcept {
    return std::accumulate(speeds_.begin(), speeds_.end(), 0.0);
}

double SpeedMap::max() const noexcept {
    return speeds_.empty() ? 0.0 : *std::max_element(speeds_.begin(), speeds_.end());
}

void validate_speeds(const SpeedMap& s, double capacity) {
    if (!(capacity > 0.0) || !std::isfinite(capacity)) {
        throw InputError("capacity must be a positive finite number");
    }
    for (std::size_t j = 0; j < s.size(); ++j) {
        const double v = s[PartitionId{j}];
        if (!std::isfinite(v) || v < 0.0) {
            std::ostringstream os;
            os << "partition " << j << " has invalid speed " << v << " at iteration "
               << s.iteration();
            throw InputError(os.str());
        }
        if (v > capacity) {
            std::ostringstream os;
            os << "partition " << j << " speed " << v << " exceeds bin capacity " << capacity
               << " at iteration " << s.iteration();
            throw InputError(os.str());
        }
    }
}

AssignmentMatrix::AssignmentMatrix(std::size_t consumers, std::size_t partitions,
                                   std::size_t iteration)
    : consumers_(consumers),
      partitions_(partitions),
      iteration_(iteration),
      x_(consumers * partitions, 0),
      y_(consumers, 0) {}

std::size_t AssignmentMatrix::cell(ConsumerId i, PartitionId j) const {
    if (i.index >= consumers_ || j.index >= partitions_) {
        throw StructuralError("assignment index out of range");
    }
    return i.index * partitions_ + j.index;
}

bool AssignmentMatrix::assigned(ConsumerId i, PartitionId j) const { return x_[cell(i, j)] != 0; }

bool AssignmentMatrix::used(ConsumerId i) const {
    if (i.index >= consumers_) throw StructuralError("consumer index out of range");
    return y_[i.index] != 0;
}

void AssignmentMatrix::assign(ConsumerId i, PartitionId j) {
    x_[cell(i, j)] = 1;
    y_[i.index] = 1;
}

void AssignmentMatrix::unassign(ConsumerId i, PartitionId j) { x_[cell(i, j)] = 0; }

void AssignmentMatrix::set_used(ConsumerId i, bool used) {
    if (i.index >= consumers_) throw StructuralError("consumer index out of range");
    y_[i.index] = used ? 1 : 0;
}

std::optional<ConsumerId> AssignmentMatrix::owner(PartitionId j) const {
    if (j.index >= partitions_) throw StructuralError("partition index out of range");
    std::optional<ConsumerId> found;
    for (std::size_t i = 0; i < consumers_; ++i) {
        if (x_[i * partitions_ + j.index] != 0) {
            if (found) {
                throw InvariantViolation("partition " + std::to_string(j.index) +
                                         " is assigned to more than one consumer");
            }
            found = ConsumerId{i};
        }
    }
    return found;
}

std::vector<PartitionId> AssignmentMatrix::partitions_of(ConsumerId i) const {
    std::vector<PartitionId> out;
    for (std::size_t j = 0; j < partitions_; ++j) {
        if (x_[cell(i, PartitionId{j})] != 0) out.push_back(PartitionId{j});
    }
    return out;
}

std::vector<ConsumerId> AssignmentMatrix::used_consumers() const {
    std::vector<ConsumerId> out;
    for (std::size_t i = 0; i < consumers_; ++i) {
        if (y_[i] != 0) out.push_back(ConsumerId{i});
    }
    return out;
}

std::size_t AssignmentMatrix::bins_used() const noexcept {
    return static_cast<std::size_t>(std::count(y_.begin(), y_.end(), std::uint8_t{1}));
}

bool AssignmentMatrix::is_zero() const noexcept {
    return std::all_of(x_.begin(), x_.end(), [](auto v) { return v == 0; }) &&
           std::all_of(y_.begin(), y_.end(), [](auto v) { return v == 0; });
}

double AssignmentMatrix::load(ConsumerId i, const SpeedMap& s) const {
    if (s.size() != partitions_) throw StructuralError("speed map size does not match assignment");
    double sum = 0.0;
    for (std::size_t j = 0; j < partitions_; ++j) {
        if (x_[cell(i, PartitionId{j})] != 0) sum += s[PartitionId{j}];
    }
    return sum;
}

bool AssignmentMatrix::operator==(const AssignmentMatrix& other) const noexcept {
    return consumers_ == other.consumers_ && partitions_ == other.partitions_ && x_ == other.x_ &&
           y_ == other.y_;
}

DeltaMatrix::DeltaMatrix(std::size_t consumers, std::size_t partitions, std::size_t iteration)
    : consumers_(consumers),
      partitions_(partitions),
      iteration_(iteration),
      d_(consumers * partitions, 0) {}

int DeltaMatrix::at(ConsumerId i, PartitionId j) const {
    if (i.index >= consumers_ || j.index >= partitions_) {
        throw StructuralError("delta index out of range");
    }
    return d_[i.index * partitions_ + j.index];
}

void DeltaMatrix::set(ConsumerId i, PartitionId j, int value) {
    if (i.index >= consumers_ || j.index >= partitions_) {
        throw StructuralError("delta index out of range");
    }
    if (value < -1 || value > 1) throw InvariantViolation("delta entries must be -1, 0 or 1");
    d_[i.index * partitions_ + j.index] = static_cast<std::int8_t>(value);
}

bool DeltaMatrix::is_zero() const noexcept {
    return std::all_of(d_.begin(), d_.end(), [](auto v) { return v == 0; });
}

DeltaMatrix compute_delta(const AssignmentMatrix& prev, const AssignmentMatrix& next) {
    if (prev.consumers() != next.consumers() || prev.partitions() != next.partitions()) {
        std::ostringstream os;
        os << "cannot diff a " << prev.consumers() << "x" << prev.partitions()
           << " assignment against a " << next.consumers() << "x" << next.partitions() << " one";
        throw StructuralError(os.str());
    }
    DeltaMatrix d(next.consumers(), next.partitions(), next.iteration());
    for (std::size_t i = 0; i < next.consumers(); ++i) {
        for (std::size_t j = 0; j < next.partitions(); ++j) {
            const ConsumerId c{i};
            const PartitionId p{j};
            d.set(c, p, static_cast<int>(next.assigned(c, p)) - static_cast<int>(prev.assigned(c, p)));
        }
    }
    return d;
}

MigrationReport classify_migrations(const DeltaMatrix& delta) {
    MigrationReport report;
    for (std::size_t j = 0; j < delta.partitions(); ++j) {
        int plus = 0;
        int minus = 0;
        for (std::size_t i = 0; i < delta.consumers(); ++i) {
            const int v = delta.at(ConsumerId{i}, PartitionId{j});
            plus += v == 1;
            minus += v == -1;
        }
        if (plus > 1 || minus > 1) {
            throw InvariantViolation("delta column " + std::to_string(j) + " has " +
                                     std::to_string(plus) + " (+1) and " + std::to_string(minus) +
                                     " (-1) entries");
        }
        if (plus == 1 && minus == 1) {
            report.rebalanced.push_back(PartitionId{j});
        } else if (plus == 1) {
            report.arrivals.push_back(PartitionId{j});
        } else if (minus == 1) {
            report.departures.push_back(PartitionId{j});
        }
    }
    return report;
}

ValidationReport validate_assignment(const AssignmentMatrix& a, const SpeedMap& s, double capacity) {
    ValidationReport r;
    if (s.size() != a.partitions()) {
        throw StructuralError("speed map has " + std::to_string(s.size()) +
                              " partitions, assignment has " + std::to_string(a.partitions()));
    }
    for (std::size_t j = 0; j < a.partitions(); ++j) {
        int column = 0;
        for (std::size_t i = 0; i < a.consumers(); ++i) {
            column += a.assigned(ConsumerId{i}, PartitionId{j});
        }
        if (column != 1) {
            r.coverage_ok = false;
            r.uncovered.push_back(PartitionId{j});
        }
    }
    const double limit = capacity * (1.0 + kCapacityRelTol);
    for (std::size_t i = 0; i < a.consumers(); ++i) {
        const ConsumerId c{i};
        const auto held = a.partitions_of(c);
        if (!held.empty() && !a.used(c)) {
            r.usage_ok = false;
            r.unmarked.push_back(c);
        }
        const double allowed = a.used(c) ? limit : 0.0;
        if (!held.empty() && a.load(c, s) > allowed) {
            r.capacity_ok = false;
            r.overloaded.push_back(c);
        }
    }
    return r;
}

std::string ValidationReport::describe() const {
    std::ostringstream os;
    if (ok()) return "valid";
    if (!coverage_ok) {
        os << "coverage failed for partitions";
        for (auto p : uncovered) os << ' ' << p.index;
        os << "; ";
    }
    if (!capacity_ok) {
        os << "capacity exceeded on consumers";
        for (auto c : overloaded) os << ' ' << c.index;
        os << "; ";
    }
    if (!usage_ok) {
        os << "unused consumers holding partitions";
        for (auto c : unmarked) os << ' ' << c.index;
    }
    return os.str();
}

}  // namespace visbp
