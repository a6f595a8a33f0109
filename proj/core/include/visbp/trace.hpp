#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "visbp/model.hpp"

namespace visbp::sim {

enum class TraceKind {
    Measurement,    ///< controller received a load measurement
    Phase,          ///< controller entered a state (detail holds the name)
    CreateRequest,  ///< controller asked for a new consumer
    ConsumerReady,  ///< consumer finished starting up
    SendStop,       ///< controller -> consumer: stop consuming a partition
    SendStart,      ///< controller -> consumer: start consuming a partition
    AckStop,        ///< controller received the consumer's stop acknowledgement
    AckStart,       ///< controller received the consumer's start acknowledgement
    ConsumeStop,    ///< consumer stopped reading a partition
    ConsumeStart,   ///< consumer started reading a partition
    Delete,         ///< controller removed an idle consumer
    Fault,          ///< an acknowledgement timed out
};

[[nodiscard]] std::string_view to_string(TraceKind k) noexcept;
[[nodiscard]] TraceKind parse_trace_kind(std::string_view name);

struct TraceEvent {
    double time{};
    std::string actor;  ///< "controller" or "consumer-<i>"
    TraceKind kind{TraceKind::Phase};
    std::optional<PartitionId> partition;
    std::optional<ConsumerId> consumer;
    std::string detail;
};

struct TraceCheck {
    std::size_t mutual_exclusion_violations{0};
    std::size_t start_before_stop_ack{0};
    std::size_t out_of_order_times{0};
    std::vector<std::string> messages;

    [[nodiscard]] bool ok() const noexcept {
        return mutual_exclusion_violations == 0 && start_before_stop_ack == 0 &&
               out_of_order_times == 0;
    }
};

/// Scans a trace for two consumers reading the same partition at once, for a
/// start sent while another consumer still held the partition without an
/// acknowledged stop, and for timestamps going backwards.
[[nodiscard]] TraceCheck check_trace(std::span<const TraceEvent> trace);

}  // namespace visbp::sim
