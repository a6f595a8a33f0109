#include "visbp/trace.hpp"

#include <array>
#include <map>
#include <sstream>

#include "visbp/errors.hpp"

namespace visbp::sim {

namespace {

constexpr std::array<std::pair<TraceKind, std::string_view>, 12> kNames{{
    {TraceKind::Measurement, "measurement"},
    {TraceKind::Phase, "phase"},
    {TraceKind::CreateRequest, "create_request"},
    {TraceKind::ConsumerReady, "consumer_ready"},
    {TraceKind::SendStop, "send_stop"},
    {TraceKind::SendStart, "send_start"},
    {TraceKind::AckStop, "ack_stop"},
    {TraceKind::AckStart, "ack_start"},
    {TraceKind::ConsumeStop, "consume_stop"},
    {TraceKind::ConsumeStart, "consume_start"},
    {TraceKind::Delete, "delete"},
    {TraceKind::Fault, "fault"},
}};

}  // namespace

std::string_view to_string(TraceKind k) noexcept {
    for (const auto& [kind, name] : kNames) {
        if (kind == k) return name;
    }
    return "?";
}

TraceKind parse_trace_kind(std::string_view name) {
    for (const auto& [kind, n] : kNames) {
        if (n == name) return kind;
    }
    throw InputError("unknown trace event '" + std::string(name) + "'");
}

TraceCheck check_trace(std::span<const TraceEvent> trace) {
    TraceCheck check;
    std::map<PartitionId, ConsumerId> reading;    // consumer-side truth
    std::map<PartitionId, ConsumerId> confirmed;  // holder as acknowledged to the controller
    double last = 0.0;
    bool first = true;
    for (const auto& e : trace) {
        if (!first && e.time < last) {
            ++check.out_of_order_times;
            check.messages.push_back("time goes backwards at " + std::to_string(e.time));
        }
        first = false;
        last = e.time;
        if (!e.partition || !e.consumer) continue;
        const PartitionId p = *e.partition;
        const ConsumerId c = *e.consumer;
        switch (e.kind) {
            case TraceKind::ConsumeStart: {
                const auto it = reading.find(p);
                if (it != reading.end() && it->second != c) {
                    ++check.mutual_exclusion_violations;
                    std::ostringstream os;
                    os << "t=" << e.time << ": partition " << p.index << " read by consumers "
                       << it->second.index << " and " << c.index;
                    check.messages.push_back(os.str());
                }
                reading[p] = c;
                break;
            }
            case TraceKind::ConsumeStop:
                if (const auto it = reading.find(p); it != reading.end() && it->second == c) {
                    reading.erase(it);
                }
                break;
            case TraceKind::SendStart: {
                const auto it = confirmed.find(p);
                if (it != confirmed.end() && it->second != c) {
                    ++check.start_before_stop_ack;
                    std::ostringstream os;
                    os << "t=" << e.time << ": start of partition " << p.index << " sent to consumer "
                       << c.index << " before consumer " << it->second.index << " acknowledged a stop";
                    check.messages.push_back(os.str());
                }
                break;
            }
            case TraceKind::AckStart:
                confirmed[p] = c;
                break;
            case TraceKind::AckStop:
                if (const auto it = confirmed.find(p); it != confirmed.end() && it->second == c) {
                    confirmed.erase(it);
                }
                break;
            default:
                break;
        }
    }
    return check;
}

}  // namespace visbp::sim
