#include "visbp/brokersim.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <set>

#include "visbp/errors.hpp"

namespace visbp::sim {

void SimClock::advance_to(double t) {
    if (t < now_) {
        throw InvariantViolation("clock moved backwards from " + std::to_string(now_) + " to " +
                                 std::to_string(t));
    }
    now_ = t;
}

// ---------------------------------------------------------------- monitor

std::optional<double> estimate_write_speed(std::span<const SizeSample> samples, double window) {
    if (samples.empty()) return std::nullopt;
    const SizeSample& last = samples.back();
    const SizeSample* first = nullptr;
    std::size_t kept = 0;
    for (const auto& s : samples) {
        if (s.timestamp < last.timestamp - window) continue;
        if (first == nullptr) first = &s;
        ++kept;
    }
    if (kept < 2 || !(last.timestamp > first->timestamp)) return std::nullopt;
    return (last.cumulative_bytes - first->cumulative_bytes) / (last.timestamp - first->timestamp);
}

WriteSpeedMonitor::WriteSpeedMonitor(std::size_t partitions, double window)
    : window_(window), samples_(partitions) {
    if (!(window > 0.0)) throw InputError("monitor window must be positive");
}

void WriteSpeedMonitor::record(const SizeSample& sample) {
    auto& q = samples_.at(sample.partition.index);
    if (!q.empty() && (sample.timestamp < q.back().timestamp ||
                       sample.cumulative_bytes < q.back().cumulative_bytes)) {
        throw InputError("size samples of partition " + std::to_string(sample.partition.index) +
                         " go backwards");
    }
    q.push_back(sample);
    while (q.front().timestamp < sample.timestamp - window_) q.pop_front();
}

std::optional<double> WriteSpeedMonitor::estimate(PartitionId p) const {
    const auto& q = samples_.at(p.index);
    if (q.size() < 2) return std::nullopt;
    const double dt = q.back().timestamp - q.front().timestamp;
    if (!(dt > 0.0)) return std::nullopt;
    return (q.back().cumulative_bytes - q.front().cumulative_bytes) / dt;
}

std::optional<double> WriteSpeedMonitor::window_start(PartitionId p) const {
    const auto& q = samples_.at(p.index);
    if (q.empty()) return std::nullopt;
    return q.front().timestamp;
}

std::size_t WriteSpeedMonitor::retained(PartitionId p) const {
    return samples_.at(p.index).size();
}

// ------------------------------------------------------------- controller

std::string_view to_string(Phase p) noexcept {
    switch (p) {
        case Phase::Sentinel: return "sentinel";
        case Phase::ReassignAlgorithm: return "reassign";
        case Phase::GroupManagement: return "group_management";
        case Phase::Synchronize: return "synchronize";
    }
    return "?";
}

std::string_view to_string(ActionKind k) noexcept {
    switch (k) {
        case ActionKind::Create: return "create";
        case ActionKind::Stop: return "stop";
        case ActionKind::Start: return "start";
        case ActionKind::Delete: return "delete";
    }
    return "?";
}

std::vector<Action> diff_actions(const AssignmentMatrix& current, const AssignmentMatrix& target) {
    if (current.consumers() != target.consumers() || current.partitions() != target.partitions()) {
        throw StructuralError("assignment dimensions differ");
    }
    std::vector<Action> creates, stops, starts, deletes;
    for (std::size_t i = 0; i < target.consumers(); ++i) {
        const ConsumerId c{i};
        const bool before = !current.partitions_of(c).empty();
        const bool after = !target.partitions_of(c).empty();
        if (after && !before) creates.push_back({ActionKind::Create, c, std::nullopt});
        if (before && !after) deletes.push_back({ActionKind::Delete, c, std::nullopt});
    }
    for (std::size_t j = 0; j < target.partitions(); ++j) {
        const PartitionId p{j};
        const auto from = current.owner(p);
        const auto to = target.owner(p);
        if (from == to) continue;
        if (from) stops.push_back({ActionKind::Stop, *from, p});
        if (to) starts.push_back({ActionKind::Start, *to, p});
    }
    auto by_consumer = [](const Action& a, const Action& b) {
        return a.consumer != b.consumer ? a.consumer < b.consumer : a.partition < b.partition;
    };
    std::stable_sort(stops.begin(), stops.end(), by_consumer);
    std::stable_sort(starts.begin(), starts.end(), by_consumer);
    std::vector<Action> out;
    for (auto* group : {&creates, &stops, &starts, &deletes}) {
        out.insert(out.end(), group->begin(), group->end());
    }
    return out;
}

ControllerState initial_controller_state(std::size_t partitions) {
    ControllerState s;
    s.perceived = AssignmentMatrix(partitions, partitions);
    return s;
}

bool exit_condition(const ControllerState& state, double time, const ControllerConfig& cfg) {
    if (!state.load) return false;
    const SpeedMap& s = *state.load;
    for (std::size_t j = 0; j < state.perceived.partitions(); ++j) {
        if (!state.perceived.owner(PartitionId{j})) return true;
    }
    const double limit = cfg.packer.capacity() * (1.0 + kCapacityRelTol);
    for (ConsumerId c : state.perceived.used_consumers()) {
        if (state.perceived.load(c, s) > limit) return true;
    }
    if (cfg.reeval_secs) {
        if (!state.last_evaluation || time >= *state.last_evaluation + *cfg.reeval_secs) return true;
    }
    return false;
}

namespace {

void reassign(ControllerStep& out, double time, const ControllerConfig& cfg) {
    ControllerState& st = out.state;
    out.path.push_back(Phase::ReassignAlgorithm);
    const SpeedMap& s = *st.load;
    AssignmentMatrix target =
        assign_once(cfg.packer, s, st.perceived.is_zero() ? nullptr : &st.perceived);
    target.set_iteration(s.iteration());
    st.last_evaluation = time;
    out.reassigned = true;

    out.path.push_back(Phase::GroupManagement);
    out.actions = diff_actions(st.perceived, target);
    out.path.push_back(Phase::Synchronize);
    if (out.actions.empty()) {
        st.perceived = target;
        st.target.reset();
        st.pending.clear();
        st.phase = Phase::Sentinel;
        out.path.push_back(Phase::Sentinel);
        return;
    }
    ++st.reconfigurations;
    st.target = std::move(target);
    st.pending = out.actions;
    st.phase = Phase::Synchronize;
}

}  // namespace

ControllerStep controller_step(ControllerState state, const ControllerInput& input,
                               const ControllerConfig& cfg) {
    ControllerStep out;
    out.state = std::move(state);
    ControllerState& st = out.state;

    if (const auto* m = std::get_if<MonitorInput>(&input)) {
        if (m->speeds.size() != st.perceived.partitions()) {
            throw StructuralError("measurement has " + std::to_string(m->speeds.size()) +
                                  " partitions, controller manages " +
                                  std::to_string(st.perceived.partitions()));
        }
        st.load = m->speeds;
        if (st.phase == Phase::Sentinel && exit_condition(st, m->time, cfg)) {
            reassign(out, m->time, cfg);
        }
    } else if (const auto* t = std::get_if<TimerInput>(&input)) {
        if (st.phase == Phase::Sentinel && exit_condition(st, t->time, cfg)) {
            reassign(out, t->time, cfg);
        }
    } else {
        const auto& sync = std::get<SyncInput>(input);
        if (st.phase != Phase::Synchronize) {
            throw ProtocolViolation(std::string("synchronize input in phase ") +
                                    std::string(to_string(st.phase)));
        }
        if (st.target && !(sync.actual == *st.target)) ++st.mismatches;
        st.perceived = sync.actual;
        if (st.target) st.perceived.set_iteration(st.target->iteration());
        st.target.reset();
        st.pending.clear();
        st.phase = Phase::Sentinel;
        out.path.push_back(Phase::Sentinel);
    }
    return out;
}

// --------------------------------------------------------------- consumers

void ConsumerParams::validate() const {
    if (!(batch_bytes > 0.0)) throw InputError("batch size must be positive");
    if (!(wait_secs > 0.0)) throw InputError("wait time must be positive");
    if (!(read_rate > 0.0)) throw InputError("consumer read rate must be positive");
}

std::vector<PartitionId> ConsumerSim::consuming() const {
    std::vector<PartitionId> out;
    for (const auto& [p, st] : partitions) {
        if (st == PartitionState::Consuming) out.push_back(p);
    }
    return out;
}

BrokerQueues::BrokerQueues(std::size_t partitions, bool saturated)
    : saturated_(saturated),
      rate_(partitions, 0.0),
      produced_at_(partitions, 0.0),
      updated_at_(partitions, 0.0),
      consumed_(partitions, 0.0) {}

void BrokerQueues::set_rates(std::span<const double> bytes_per_sec, double time) {
    if (bytes_per_sec.size() != rate_.size()) throw StructuralError("rate table size mismatch");
    for (std::size_t j = 0; j < rate_.size(); ++j) {
        produced_at_[j] = produced(PartitionId{j}, time);
        updated_at_[j] = time;
        rate_[j] = bytes_per_sec[j];
    }
}

double BrokerQueues::produced(PartitionId p, double time) const {
    const std::size_t j = p.index;
    return produced_at_.at(j) + rate_.at(j) * std::max(0.0, time - updated_at_.at(j));
}

double BrokerQueues::backlog(PartitionId p, double time) const {
    if (saturated_) return std::numeric_limits<double>::infinity();
    return std::max(0.0, produced(p, time) - consumed_.at(p.index));
}

CycleOutcome consumer_cycle(ConsumerSim& c, BrokerQueues& broker, double start) {
    const ConsumerParams& prm = c.params;
    const auto parts = c.consuming();
    CycleOutcome out;
    out.start = start;
    if (parts.empty()) {
        out.fetch_secs = prm.wait_secs;
    } else if (broker.saturated()) {
        out.bytes = prm.batch_bytes;
    } else {
        double available = 0.0;
        double rate = 0.0;
        for (PartitionId p : parts) {
            available += broker.backlog(p, start);
            rate += broker.rate(p);
        }
        if (available >= prm.batch_bytes) {
            out.bytes = prm.batch_bytes;
        } else if (rate > 0.0) {
            out.fetch_secs = std::min((prm.batch_bytes - available) / rate, prm.wait_secs);
            out.bytes = std::min(prm.batch_bytes, available + rate * out.fetch_secs);
        } else {
            out.fetch_secs = prm.wait_secs;
            out.bytes = available;
        }
        double remaining = out.bytes;
        for (PartitionId p : parts) {
            const double take =
                std::min(remaining, broker.backlog(p, start) + broker.rate(p) * out.fetch_secs);
            broker.consume(p, take);
            remaining -= take;
        }
    }
    out.end = start + out.fetch_secs + out.bytes / prm.read_rate;
    c.cycle_start = start;
    c.cycle_end = out.end;
    ++c.cycles;
    return out;
}

// ----------------------------------------------------------------- startup

void CreationDelayProfile::validate() const {
    if (!(body_weight >= 0.0 && body_weight <= 1.0)) throw InputError("body weight must lie in [0, 1]");
    if (!(body_min >= 0.0 && body_min <= body_max)) throw InputError("need 0 <= body_min <= body_max");
    if (!(tail_max > body_max)) throw InputError("tail maximum must exceed body maximum");
    if (!(tail_shape > 0.0)) throw InputError("tail shape must be positive");
}

double sample_creation_delay(Rng& rng, const CreationDelayProfile& profile) {
    const double u = rng.uniform01();
    if (u < profile.body_weight) return rng.uniform(profile.body_min, profile.body_max);
    // Inverse CDF of the Pareto law truncated to (L, H].
    const double lo = profile.body_max;
    const double hi = profile.tail_max;
    const double a = profile.tail_shape;
    const double v = rng.uniform01_open_low();
    const double x = lo * std::pow(1.0 - v * (1.0 - std::pow(lo / hi, a)), -1.0 / a);
    return std::clamp(x, std::nextafter(lo, hi), hi);
}

// ----------------------------------------------------------------- cluster

ClusterSim::ClusterSim(std::size_t partitions, ConsumerParams params, bool saturated,
                       double transport_secs, std::vector<TraceEvent>* trace)
    : partitions_(partitions),
      params_(params),
      transport_(transport_secs),
      trace_(trace),
      broker_(partitions, saturated) {
    params_.validate();
    if (!(transport_secs >= 0.0)) throw InputError("transport delay must be non-negative");
}

void ClusterSim::push(double time, EventType type, ConsumerId c, std::uint64_t gen,
                      std::size_t payload) {
    events_.push(Event{time, seq_++, type, c, gen, payload});
}

void ClusterSim::log(double time, ConsumerId actor, TraceKind kind, std::optional<PartitionId> p,
                     std::optional<ConsumerId> c) {
    if (trace_ != nullptr) {
        trace_->push_back({time, "consumer-" + std::to_string(actor.index), kind, p, c, {}});
    }
}

void ClusterSim::log_controller(double time, TraceKind kind, std::optional<PartitionId> p,
                                std::optional<ConsumerId> c) {
    if (trace_ != nullptr) trace_->push_back({time, "controller", kind, p, c, {}});
}

void ClusterSim::schedule_rates(double time, std::vector<double> bytes_per_sec) {
    if (time < clock_.now()) throw InvariantViolation("rate change scheduled in the past");
    if (bytes_per_sec.size() != partitions_) throw StructuralError("rate table size mismatch");
    rate_tables_.push_back(std::move(bytes_per_sec));
    push(time, EventType::Rates, ConsumerId{}, 0, rate_tables_.size() - 1);
}

void ClusterSim::create_consumer(ConsumerId id, double ready_at) {
    if (id.index >= partitions_) throw StructuralError("consumer id out of range");
    if (consumers_.count(id) != 0) {
        throw InvariantViolation("consumer " + std::to_string(id.index) + " already exists");
    }
    if (ready_at < clock_.now()) throw InvariantViolation("consumer ready time lies in the past");
    ConsumerSim c;
    c.id = id;
    c.params = params_;
    c.generation = ++generation_;
    consumers_.emplace(id, c);
    log_controller(clock_.now(), TraceKind::CreateRequest, std::nullopt, id);
    push(ready_at, EventType::Ready, id, c.generation, 0);
}

void ClusterSim::delete_consumer(ConsumerId id) {
    const auto it = consumers_.find(id);
    if (it == consumers_.end()) throw NotFound("no consumer " + std::to_string(id.index));
    if (!it->second.consuming().empty()) {
        throw ProtocolViolation("consumer " + std::to_string(id.index) +
                                " deleted while still reading partitions");
    }
    consumers_.erase(it);
    log_controller(clock_.now(), TraceKind::Delete, std::nullopt, id);
}

void ClusterSim::seed_assignment(const AssignmentMatrix& x) {
    if (x.partitions() != partitions_) throw StructuralError("assignment size mismatch");
    for (std::size_t j = 0; j < partitions_; ++j) {
        const PartitionId p{j};
        const auto owner = x.owner(p);
        if (!owner) continue;
        const auto it = consumers_.find(*owner);
        if (it == consumers_.end()) throw NotFound("no consumer " + std::to_string(owner->index));
        it->second.partitions[p] = PartitionState::Consuming;
        log(clock_.now(), *owner, TraceKind::ConsumeStart, p, *owner);
    }
}

const ConsumerSim& ClusterSim::consumer(ConsumerId id) const {
    const auto it = consumers_.find(id);
    if (it == consumers_.end()) throw NotFound("no consumer " + std::to_string(id.index));
    return it->second;
}

void ClusterSim::advance_to(double time) {
    while (!events_.empty() && events_.top().time <= time) {
        const Event e = events_.top();
        events_.pop();
        clock_.advance_to(e.time);
        handle(e);
    }
    clock_.advance_to(time);
}

void ClusterSim::handle(const Event& e) {
    switch (e.type) {
        case EventType::Rates:
            broker_.set_rates(rate_tables_.at(e.payload), e.time);
            return;
        case EventType::Ready: {
            const auto it = consumers_.find(e.consumer);
            if (it == consumers_.end() || it->second.generation != e.generation) return;
            it->second.running = true;
            log(e.time, e.consumer, TraceKind::ConsumerReady, std::nullopt, e.consumer);
            begin_cycle(it->second, e.time);
            return;
        }
        case EventType::CycleEnd: {
            const auto it = consumers_.find(e.consumer);
            if (it == consumers_.end() || it->second.generation != e.generation) return;
            end_cycle(it->second, e.time);
            return;
        }
        case EventType::Ack: {
            const Ack a = acks_.at(e.payload);
            log_controller(e.time, a.kind == ActionKind::Stop ? TraceKind::AckStop : TraceKind::AckStart,
                           a.partition, a.consumer);
            if (!protocol_) return;
            Protocol& pr = *protocol_;
            --pr.outstanding;
            pr.last_ack = e.time;
            if (a.kind == ActionKind::Stop) {
                if (const auto h = pr.holder.find(a.partition);
                    h != pr.holder.end() && h->second == a.consumer) {
                    pr.holder.erase(h);
                }
                if (const auto w = pr.waiting.find(a.partition); w != pr.waiting.end()) {
                    const ConsumerId next = w->second;
                    pr.waiting.erase(w);
                    send(ActionKind::Start, next, a.partition);
                }
            } else {
                pr.holder[a.partition] = a.consumer;
            }
            return;
        }
    }
}

void ClusterSim::begin_cycle(ConsumerSim& c, double start) {
    const bool loaded = !c.consuming().empty();
    const CycleOutcome out = consumer_cycle(c, broker_, start);
    if (loaded) cycle_durations_.push_back(out.end - out.start);
    push(out.end, EventType::CycleEnd, c.id, c.generation, 0);
}

void ClusterSim::end_cycle(ConsumerSim& c, double time) {
    while (!c.inbox.empty() && c.inbox.front().arrives_at <= time) {
        const MetadataMessage m = c.inbox.front();
        c.inbox.pop_front();
        if (m.kind == ActionKind::Start) {
            c.partitions[m.partition] = PartitionState::Consuming;
            log(time, c.id, TraceKind::ConsumeStart, m.partition, c.id);
        } else {
            const auto it = c.partitions.find(m.partition);
            if (it != c.partitions.end() && it->second == PartitionState::Consuming) {
                it->second = PartitionState::Stopped;
                log(time, c.id, TraceKind::ConsumeStop, m.partition, c.id);
            }
        }
        acks_.push_back({m.kind, m.partition, c.id});
        push(time + transport_, EventType::Ack, c.id, c.generation, acks_.size() - 1);
    }
    begin_cycle(c, time);
}

void ClusterSim::send(ActionKind kind, ConsumerId c, PartitionId p) {
    const auto it = consumers_.find(c);
    if (it == consumers_.end()) {
        throw ProtocolViolation("message for missing consumer " + std::to_string(c.index));
    }
    if (kind == ActionKind::Start && protocol_) {
        const auto h = protocol_->holder.find(p);
        if (h != protocol_->holder.end() && h->second != c) {
            throw ProtocolViolation("start of partition " + std::to_string(p.index) +
                                    " sent to consumer " + std::to_string(c.index) +
                                    " while consumer " + std::to_string(h->second.index) +
                                    " has not acknowledged a stop");
        }
    }
    const double now = clock_.now();
    log_controller(now, kind == ActionKind::Stop ? TraceKind::SendStop : TraceKind::SendStart, p, c);
    it->second.inbox.push_back({kind, p, now, now + transport_});
    if (protocol_) ++protocol_->outstanding;
}

ProtocolOutcome ClusterSim::run_protocol(std::span<const Action> actions, double timeout) {
    if (!(timeout > 0.0)) throw InputError("acknowledgement timeout must be positive");
    ProtocolOutcome out;
    out.started = clock_.now();
    out.finished = out.started;
    protocol_.emplace();
    for (const auto& [id, c] : consumers_) {
        for (PartitionId p : c.consuming()) protocol_->holder[p] = id;
    }
    std::set<PartitionId> stopping;
    for (const Action& a : actions) {
        if (a.kind == ActionKind::Stop && a.partition) stopping.insert(*a.partition);
    }
    try {
        for (const Action& a : actions) {
            if (!a.partition) continue;
            if (a.kind == ActionKind::Stop) {
                send(ActionKind::Stop, a.consumer, *a.partition);
                ++out.messages;
            }
        }
        for (const Action& a : actions) {
            if (!a.partition || a.kind != ActionKind::Start) continue;
            ++out.messages;
            if (stopping.count(*a.partition) != 0) {
                protocol_->waiting[*a.partition] = a.consumer;
            } else {
                send(ActionKind::Start, a.consumer, *a.partition);
            }
        }
        const double deadline = out.started + timeout;
        while (protocol_->outstanding > 0 || !protocol_->waiting.empty()) {
            if (events_.empty() || events_.top().time > deadline) break;
            const Event e = events_.top();
            events_.pop();
            clock_.advance_to(e.time);
            handle(e);
        }
        if (protocol_->outstanding > 0 || !protocol_->waiting.empty()) {
            out.completed = false;
            advance_to(deadline);
            log_controller(clock_.now(), TraceKind::Fault, std::nullopt, std::nullopt);
            out.finished = clock_.now();
        } else if (out.messages > 0) {
            out.finished = protocol_->last_ack;
        }
    } catch (...) {
        protocol_.reset();
        throw;
    }
    protocol_.reset();
    return out;
}

AssignmentMatrix ClusterSim::assignment() const {
    AssignmentMatrix x(partitions_, partitions_);
    for (const auto& [id, c] : consumers_) {
        for (PartitionId p : c.consuming()) x.assign(id, p);
    }
    return x;
}

// -------------------------------------------------------------- simulation

namespace {

constexpr std::array<std::string_view, 4> kTimingNames{"dt1", "dt2", "dt3", "dt4"};

}  // namespace

std::string_view to_string(TimingEvent e) noexcept {
    return kTimingNames.at(static_cast<std::size_t>(e));
}

TimingEvent parse_timing_event(std::string_view name) {
    for (std::size_t i = 0; i < kTimingNames.size(); ++i) {
        if (kTimingNames[i] == name) return static_cast<TimingEvent>(i);
    }
    throw InputError("unknown timing event '" + std::string(name) + "'");
}

void SimConfig::validate() const {
    consumer.validate();
    creation.validate();
    if (!(speed_scale > 0.0)) throw InputError("speed scale must be positive");
    if (!(measurement_period > 0.0)) throw InputError("measurement period must be positive");
    if (reeval_secs && !(*reeval_secs >= 0.0)) throw InputError("re-evaluation period must be non-negative");
    if (!(compute_base_secs >= 0.0 && compute_per_partition_secs >= 0.0 && create_request_secs >= 0.0)) {
        throw InputError("controller costs must be non-negative");
    }
    if (!(transport_secs >= 0.0)) throw InputError("transport delay must be non-negative");
    if (!(ack_timeout_secs > 0.0)) throw InputError("acknowledgement timeout must be positive");
    if (!(monitor_window > 0.0 && monitor_poll_secs > 0.0)) {
        throw InputError("monitor window and poll interval must be positive");
    }
}

std::vector<MonitorOutput> simulate_monitor(const MeasurementStream& stream, const SimConfig& cfg) {
    cfg.validate();
    const std::size_t n = stream.partition_count();
    const std::size_t len = stream.length();
    const double period = cfg.measurement_period;
    // Cumulative bytes produced by partition j before iteration k starts.
    std::vector<std::vector<double>> cum(len + 1, std::vector<double>(n, 0.0));
    for (std::size_t k = 0; k < len; ++k) {
        for (std::size_t j = 0; j < n; ++j) {
            cum[k + 1][j] = cum[k][j] + stream.measurements[k][PartitionId{j}] * cfg.speed_scale * period;
        }
    }
    auto produced = [&](std::size_t j, double t) {
        const auto k = std::min(static_cast<std::size_t>(std::floor(t / period)), len - 1);
        const double since = t - static_cast<double>(k) * period;
        return cum[k][j] + stream.measurements[k][PartitionId{j}] * cfg.speed_scale * since;
    };

    WriteSpeedMonitor monitor(n, cfg.monitor_window);
    std::vector<MonitorOutput> out;
    std::size_t tick = 0;
    for (std::size_t k = 0; k < len; ++k) {
        const double begin = static_cast<double>(k) * period;
        for (;; ++tick) {
            const double t = static_cast<double>(tick) * cfg.monitor_poll_secs;
            for (std::size_t j = 0; j < n; ++j) monitor.record({PartitionId{j}, produced(j, t), t});
            if (t < begin) continue;
            bool settled = true;
            for (std::size_t j = 0; j < n && settled; ++j) {
                const PartitionId p{j};
                settled = monitor.retained(p) >= 2 && *monitor.window_start(p) >= begin;
            }
            if (!settled) continue;
            std::vector<double> speeds(n);
            for (std::size_t j = 0; j < n; ++j) {
                speeds[j] = std::clamp(*monitor.estimate(PartitionId{j}) / cfg.speed_scale, 0.0,
                                       stream.capacity);
            }
            out.push_back({t, t - begin, SpeedMap(std::move(speeds), k + 1)});
            ++tick;
            break;
        }
    }
    return out;
}

namespace {

class Simulation {
public:
    Simulation(const MeasurementStream& stream, const SimConfig& cfg)
        : stream_(stream),
          cfg_(cfg),
          ccfg_{cfg.packer, cfg.reeval_secs},
          n_(stream.partition_count()),
          rng_(mix_seed(cfg.seed, 0x5157)),
          cluster_(n_, cfg.consumer, cfg.saturated, cfg.transport_secs, &result_.trace),
          state_(initial_controller_state(n_)) {}

    SimResult run() {
        const double period = cfg_.measurement_period;
        for (std::size_t k = 0; k < stream_.length(); ++k) {
            const auto& s = stream_.measurements[k];
            std::vector<double> rates(n_);
            for (std::size_t j = 0; j < n_; ++j) rates[j] = s[PartitionId{j}] * cfg_.speed_scale;
            cluster_.schedule_rates(static_cast<double>(k) * period, std::move(rates));
        }

        std::vector<MonitorOutput> inputs;
        if (cfg_.monitor == MonitorMode::Live) {
            inputs = simulate_monitor(stream_, cfg_);
        } else {
            for (std::size_t k = 0; k < stream_.length(); ++k) {
                inputs.push_back({static_cast<double>(k) * period, 0.0, stream_.measurements[k]});
            }
        }

        double free_at = 0.0;
        for (std::size_t k = 0; k < inputs.size(); ++k) {
            const MonitorOutput& in = inputs[k];
            if (cfg_.reeval_secs && *cfg_.reeval_secs > 0.0) {
                while (state_.last_evaluation) {
                    const double due = std::max(*state_.last_evaluation + *cfg_.reeval_secs, free_at);
                    if (due >= in.published_at) break;
                    const double before = *state_.last_evaluation;
                    free_at = step(TimerInput{due}, due, state_.load->iteration());
                    if (*state_.last_evaluation == before) break;
                }
            }
            const double t = std::max(in.published_at, free_at);
            result_.timings.push_back({TimingEvent::Monitor, in.convergence_secs, k + 1});
            cluster_.advance_to(t);
            result_.trace.push_back({t, "controller", TraceKind::Measurement, std::nullopt,
                                     std::nullopt, std::to_string(in.speeds.iteration())});
            free_at = step(MonitorInput{in.speeds, t}, t, in.speeds.iteration());
        }
        cluster_.advance_to(std::max(cluster_.now(), static_cast<double>(stream_.length()) * period));

        result_.cycle_durations = cluster_.loaded_cycle_durations();
        result_.mismatches = state_.mismatches;
        result_.end_time = cluster_.now();
        return std::move(result_);
    }

private:
    void phase(double t, Phase p) {
        result_.trace.push_back({t, "controller", TraceKind::Phase, std::nullopt, std::nullopt,
                                 std::string(to_string(p))});
    }

    double step(const ControllerInput& input, double t, std::size_t iteration) {
        cluster_.advance_to(t);
        const AssignmentMatrix before = state_.perceived;
        const auto wall_start = std::chrono::steady_clock::now();
        ControllerStep out = controller_step(std::move(state_), input, ccfg_);
        const auto wall = std::chrono::steady_clock::now() - wall_start;
        state_ = std::move(out.state);
        if (!out.reassigned) return t;

        const SpeedMap& load = *state_.load;
        const AssignmentMatrix& target = state_.target ? *state_.target : state_.perceived;
        const MigrationReport report = classify_migrations(compute_delta(before, target));
        result_.metrics.push_back({cfg_.packer.name, load.iteration(), target.bins_used(),
                                   rscore(report, load, cfg_.packer.capacity())});
        result_.rebalanced_partitions += report.rebalanced.size();

        const double compute = cfg_.compute_cost == ComputeCost::Measured
                                   ? std::chrono::duration<double>(wall).count()
                                   : cfg_.compute_base_secs +
                                         cfg_.compute_per_partition_secs * static_cast<double>(n_);
        std::size_t creates = 0;
        for (const Action& a : out.actions) creates += a.kind == ActionKind::Create ? 1 : 0;
        const double dt2 = compute + cfg_.create_request_secs * static_cast<double>(creates);
        result_.timings.push_back({TimingEvent::Compute, dt2, iteration});
        phase(t, Phase::ReassignAlgorithm);
        t += compute;
        cluster_.advance_to(t);
        phase(t, Phase::GroupManagement);

        if (out.actions.empty()) {
            phase(t, Phase::Synchronize);
            phase(t, Phase::Sentinel);
            return t;
        }
        ++result_.reconfigurations;

        double ready = t;
        for (const Action& a : out.actions) {
            if (a.kind != ActionKind::Create) continue;
            t += cfg_.create_request_secs;
            cluster_.advance_to(t);
            const double delay = sample_creation_delay(rng_, cfg_.creation);
            cluster_.create_consumer(a.consumer, t + delay);
            result_.timings.push_back({TimingEvent::Startup, delay, iteration});
            ready = std::max(ready, t + delay);
        }
        cluster_.advance_to(std::max(ready, t));

        std::vector<Action> moves;
        for (const Action& a : out.actions) {
            if (a.kind == ActionKind::Stop || a.kind == ActionKind::Start) moves.push_back(a);
        }
        if (!moves.empty()) {
            const ProtocolOutcome po = cluster_.run_protocol(moves, cfg_.ack_timeout_secs);
            result_.timings.push_back({TimingEvent::Propagation, po.duration(), iteration});
            if (!po.completed) ++result_.faults;
        }
        for (const Action& a : out.actions) {
            if (a.kind != ActionKind::Delete) continue;
            if (cluster_.exists(a.consumer) && cluster_.consumer(a.consumer).consuming().empty()) {
                cluster_.delete_consumer(a.consumer);
            }
        }

        const double done = cluster_.now();
        phase(done, Phase::Synchronize);
        ControllerStep sync = controller_step(std::move(state_), SyncInput{cluster_.assignment(), done}, ccfg_);
        state_ = std::move(sync.state);
        phase(done, Phase::Sentinel);
        return done;
    }

    const MeasurementStream& stream_;
    SimConfig cfg_;
    ControllerConfig ccfg_;
    std::size_t n_;
    Rng rng_;
    SimResult result_;
    ClusterSim cluster_;
    ControllerState state_;
};

}  // namespace

SimResult run_simulation(const MeasurementStream& stream, const SimConfig& cfg) {
    cfg.validate();
    if (stream.length() == 0) throw InputError("empty stream");
    Simulation sim(stream, cfg);
    return sim.run();
}

}  // namespace visbp::sim
