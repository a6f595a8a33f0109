#include "visbp/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "visbp/errors.hpp"

namespace visbp {

std::vector<IterationMetrics> evaluate_stream(const AlgorithmSpec& spec, const MeasurementStream& stream) {
    std::vector<IterationMetrics> out;
    out.reserve(stream.length());
    const std::size_t n = stream.partition_count();
    Assigner assigner(spec);
    AssignmentMatrix prev(n, n);
    for (const SpeedMap& s : stream.measurements) {
        const AssignmentMatrix& next = assigner.next(s);
        const auto report = classify_migrations(compute_delta(prev, next));
        out.push_back({spec.name, s.iteration(), next.bins_used(), rscore(report, s, spec.capacity())});
        prev = next;
    }
    return out;
}

std::map<std::string, std::vector<IterationMetrics>> evaluate_all(std::span<const AlgorithmSpec> specs,
                                                                   const MeasurementStream& stream,
                                                                   unsigned workers) {
    std::vector<std::vector<IterationMetrics>> results(specs.size());
    std::vector<std::exception_ptr> errors(specs.size());
    std::atomic<std::size_t> cursor{0};
    auto work = [&] {
        for (std::size_t i = cursor++; i < specs.size(); i = cursor++) {
            try {
                results[i] = evaluate_stream(specs[i], stream);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned threads = std::clamp<unsigned>(workers, 1, static_cast<unsigned>(std::max<std::size_t>(specs.size(), 1)));
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work);
    work();
    pool.clear();
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    std::map<std::string, std::vector<IterationMetrics>> out;
    for (std::size_t i = 0; i < specs.size(); ++i) {
        if (!out.emplace(specs[i].name, std::move(results[i])).second) {
            throw InputError("algorithm '" + specs[i].name + "' listed twice");
        }
    }
    return out;
}

}  // namespace visbp
