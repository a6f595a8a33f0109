#pragma once

// Discrete-event simulation of the autoscaler: a monitor that estimates write
// speeds, a controller state machine that repacks and rewires the consumer
// group, consumers that only read their metadata queue between fetch cycles,
// and the synchronous stop/ack/start protocol between them.

#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "visbp/algorithms.hpp"
#include "visbp/metrics.hpp"
#include "visbp/model.hpp"
#include "visbp/random.hpp"
#include "visbp/trace.hpp"

namespace visbp::sim {

class SimClock {
public:
    [[nodiscard]] double now() const noexcept { return now_; }
    /// Throws InvariantViolation when t lies in the past.
    void advance_to(double t);

private:
    double now_{0.0};
};

// ---------------------------------------------------------------- monitor

struct SizeSample {
    PartitionId partition;
    double cumulative_bytes{};
    double timestamp{};
};

/// Average write speed over the samples no older than `window` seconds before
/// the newest one. nullopt when fewer than two samples remain or they share a
/// timestamp.
[[nodiscard]] std::optional<double> estimate_write_speed(std::span<const SizeSample> samples,
                                                         double window);

/// Per-partition sliding windows of size samples.
class WriteSpeedMonitor {
public:
    WriteSpeedMonitor(std::size_t partitions, double window);

    /// Throws InputError when time or byte count goes backwards for a partition.
    void record(const SizeSample& sample);
    [[nodiscard]] std::optional<double> estimate(PartitionId p) const;
    /// Oldest retained timestamp of a partition's window.
    [[nodiscard]] std::optional<double> window_start(PartitionId p) const;
    [[nodiscard]] std::size_t retained(PartitionId p) const;

private:
    double window_;
    std::vector<std::deque<SizeSample>> samples_;
};

// ------------------------------------------------------------- controller

enum class Phase { Sentinel, ReassignAlgorithm, GroupManagement, Synchronize };

[[nodiscard]] std::string_view to_string(Phase p) noexcept;

enum class ActionKind { Create, Stop, Start, Delete };

[[nodiscard]] std::string_view to_string(ActionKind k) noexcept;

struct Action {
    ActionKind kind{ActionKind::Create};
    ConsumerId consumer;
    std::optional<PartitionId> partition;

    bool operator==(const Action&) const = default;
};

/// Creates, then stops, then starts, then deletes, each in ascending ids.
[[nodiscard]] std::vector<Action> diff_actions(const AssignmentMatrix& current,
                                               const AssignmentMatrix& target);

struct ControllerConfig {
    AlgorithmSpec packer;
    /// Repack when this long has passed since the last repack. 0 repacks on
    /// every input; nullopt disables the timer.
    std::optional<double> reeval_secs{30.0};
};

struct ControllerState {
    Phase phase{Phase::Sentinel};
    AssignmentMatrix perceived;
    std::optional<SpeedMap> load;
    std::optional<AssignmentMatrix> target;
    std::vector<Action> pending;
    std::optional<double> last_evaluation;
    std::size_t reconfigurations{0};
    std::size_t mismatches{0};  ///< Synchronize found the group differing from the target
};

[[nodiscard]] ControllerState initial_controller_state(std::size_t partitions);

struct MonitorInput {
    SpeedMap speeds;
    double time{};
};
struct TimerInput {
    double time{};
};
/// The group's actual assignment once the protocol finished or gave up.
struct SyncInput {
    AssignmentMatrix actual;
    double time{};
};
using ControllerInput = std::variant<MonitorInput, TimerInput, SyncInput>;

struct ControllerStep {
    ControllerState state;
    std::vector<Action> actions;  ///< emitted by GroupManagement on this step
    std::vector<Phase> path;      ///< phases entered on this step, in order
    bool reassigned{false};       ///< the packer ran on this step
};

/// True when some partition is unassigned, some consumer's perceived load
/// exceeds C, or the re-evaluation timer has elapsed.
[[nodiscard]] bool exit_condition(const ControllerState& state, double time,
                                  const ControllerConfig& cfg);

/// One transition of the controller. Monitor input in Sentinel updates the
/// perceived load and, when an exit condition holds, runs the packer, diffs
/// against the perceived assignment and moves to Synchronize. An empty diff
/// passes straight back to Sentinel. SyncInput reconciles the perceived
/// assignment with the actual one. Throws ProtocolViolation for SyncInput
/// outside Synchronize.
[[nodiscard]] ControllerStep controller_step(ControllerState state, const ControllerInput& input,
                                             const ControllerConfig& cfg);

// --------------------------------------------------------------- consumers

struct ConsumerParams {
    double batch_bytes{5e6};
    double wait_secs{1.0};
    double read_rate{2e6};  ///< bytes/s of processing

    void validate() const;
};

enum class PartitionState { Consuming, Stopped };

struct MetadataMessage {
    ActionKind kind{ActionKind::Start};  ///< Start or Stop
    PartitionId partition;
    double sent_at{};
    double arrives_at{};
};

struct ConsumerSim {
    ConsumerId id;
    ConsumerParams params;
    std::map<PartitionId, PartitionState> partitions;
    std::deque<MetadataMessage> inbox;
    bool running{false};
    double cycle_start{};
    double cycle_end{};
    std::uint64_t generation{0};
    std::size_t cycles{0};

    [[nodiscard]] std::vector<PartitionId> consuming() const;
};

/// Production and consumption bookkeeping for every partition.
class BrokerQueues {
public:
    BrokerQueues(std::size_t partitions, bool saturated);

    void set_rates(std::span<const double> bytes_per_sec, double time);
    [[nodiscard]] double rate(PartitionId p) const { return rate_.at(p.index); }
    [[nodiscard]] double produced(PartitionId p, double time) const;
    [[nodiscard]] double backlog(PartitionId p, double time) const;
    void consume(PartitionId p, double bytes) { consumed_.at(p.index) += bytes; }
    [[nodiscard]] bool saturated() const noexcept { return saturated_; }
    [[nodiscard]] std::size_t size() const noexcept { return rate_.size(); }

private:
    bool saturated_;
    std::vector<double> rate_;
    std::vector<double> produced_at_;
    std::vector<double> updated_at_;
    std::vector<double> consumed_;
};

struct CycleOutcome {
    double start{};
    double fetch_secs{};
    double bytes{};
    double end{};
};

/// Plans the cycle starting at `start`: fetch until BATCH_SIZE bytes are
/// available or WAIT_TIME_SECS passes, then process the fetched bytes at the
/// consumer's read rate. Fetched bytes are removed from the broker queues.
/// Production during the fetch is taken at the rates in force at `start`.
CycleOutcome consumer_cycle(ConsumerSim& c, BrokerQueues& broker, double start);

// ----------------------------------------------------------------- startup

struct CreationDelayProfile {
    double body_weight{0.88};
    double body_min{10.0};
    double body_max{50.0};
    double tail_max{500.0};
    double tail_shape{1.5};  ///< bounded Pareto exponent on (body_max, tail_max]

    void validate() const;
};

/// Consumer start-up time: uniform on [body_min, body_max] with probability
/// body_weight, otherwise bounded Pareto on (body_max, tail_max].
[[nodiscard]] double sample_creation_delay(Rng& rng, const CreationDelayProfile& profile);

// ----------------------------------------------------------------- cluster

struct ProtocolOutcome {
    double started{};
    double finished{};
    bool completed{true};
    std::size_t messages{0};

    [[nodiscard]] double duration() const noexcept { return finished - started; }
};

/// Consumers, broker queues and the message transport on one timeline.
class ClusterSim {
public:
    ClusterSim(std::size_t partitions, ConsumerParams params, bool saturated, double transport_secs,
               std::vector<TraceEvent>* trace);

    [[nodiscard]] double now() const noexcept { return clock_.now(); }

    /// Production rates (bytes/s) taking effect at `time`.
    void schedule_rates(double time, std::vector<double> bytes_per_sec);
    /// Adds consumer `id`, which starts cycling at `ready_at`.
    void create_consumer(ConsumerId id, double ready_at);
    /// Removes an idle consumer. Throws ProtocolViolation if it still reads a partition.
    void delete_consumer(ConsumerId id);
    /// Puts partitions straight into consuming state, bypassing the protocol.
    void seed_assignment(const AssignmentMatrix& x);

    /// Processes every event up to and including `time`.
    void advance_to(double time);

    /// Sends the Stop/Start actions from now on: for a moved partition the
    /// start goes out only after the old consumer acknowledged the stop.
    /// Returns when every acknowledgement arrived or `timeout` elapsed.
    /// Throws ProtocolViolation if a start would go out while another
    /// consumer still holds the partition.
    ProtocolOutcome run_protocol(std::span<const Action> actions, double timeout);

    /// Actual assignment: x_ij = 1 when consumer i reads partition j.
    [[nodiscard]] AssignmentMatrix assignment() const;
    [[nodiscard]] bool exists(ConsumerId id) const { return consumers_.count(id) != 0; }
    [[nodiscard]] const ConsumerSim& consumer(ConsumerId id) const;
    [[nodiscard]] const std::vector<double>& loaded_cycle_durations() const noexcept {
        return cycle_durations_;
    }
    [[nodiscard]] const BrokerQueues& broker() const noexcept { return broker_; }

private:
    enum class EventType { Rates, Ready, CycleEnd, Ack };
    struct Event {
        double time{};
        std::uint64_t seq{};
        EventType type{EventType::Rates};
        ConsumerId consumer;
        std::uint64_t generation{};
        std::size_t payload{};  ///< rate table or ack index
        bool operator>(const Event& o) const noexcept {
            return time != o.time ? time > o.time : seq > o.seq;
        }
    };
    struct Ack {
        ActionKind kind{};
        PartitionId partition;
        ConsumerId consumer;
    };
    struct Protocol {
        std::map<PartitionId, ConsumerId> holder;    // acknowledged owner
        std::map<PartitionId, ConsumerId> waiting;   // start to send after the stop ack
        std::size_t outstanding{0};
        double last_ack{};
    };

    void push(double time, EventType type, ConsumerId c, std::uint64_t gen, std::size_t payload);
    void handle(const Event& e);
    void begin_cycle(ConsumerSim& c, double start);
    void end_cycle(ConsumerSim& c, double time);
    void send(ActionKind kind, ConsumerId c, PartitionId p);
    void log(double time, ConsumerId actor, TraceKind kind, std::optional<PartitionId> p,
             std::optional<ConsumerId> c);
    void log_controller(double time, TraceKind kind, std::optional<PartitionId> p,
                        std::optional<ConsumerId> c);

    std::size_t partitions_;
    ConsumerParams params_;
    double transport_;
    std::vector<TraceEvent>* trace_;
    SimClock clock_;
    BrokerQueues broker_;
    std::map<ConsumerId, ConsumerSim> consumers_;
    std::priority_queue<Event, std::vector<Event>, std::greater<>> events_;
    std::uint64_t seq_{0};
    std::uint64_t generation_{0};
    std::vector<std::vector<double>> rate_tables_;
    std::vector<Ack> acks_;
    std::optional<Protocol> protocol_;
    std::vector<double> cycle_durations_;
};

// -------------------------------------------------------------- simulation

enum class TimingEvent { Monitor, Compute, Startup, Propagation };

/// "dt1" .. "dt4".
[[nodiscard]] std::string_view to_string(TimingEvent e) noexcept;
[[nodiscard]] TimingEvent parse_timing_event(std::string_view name);

struct TimingRecord {
    TimingEvent event{TimingEvent::Monitor};
    double duration{};
    std::size_t iteration{};
};

enum class MonitorMode { StreamFed, Live };
enum class ComputeCost { Modeled, Measured };

struct SimConfig {
    AlgorithmSpec packer;
    double speed_scale{1.6e6};  ///< bytes/s per unit of stream speed
    ConsumerParams consumer{};
    bool saturated{false};      ///< every partition always has a full batch waiting
    double measurement_period{30.0};
    std::optional<double> reeval_secs{30.0};
    ComputeCost compute_cost{ComputeCost::Modeled};
    double compute_base_secs{0.002};
    double compute_per_partition_secs{0.0001};
    double create_request_secs{0.01};
    CreationDelayProfile creation{};
    double transport_secs{0.05};
    double ack_timeout_secs{120.0};
    MonitorMode monitor{MonitorMode::StreamFed};
    double monitor_window{30.0};
    double monitor_poll_secs{1.0};
    std::uint64_t seed{0};

    void validate() const;
};

struct SimResult {
    std::vector<TimingRecord> timings;
    std::vector<TraceEvent> trace;
    std::vector<IterationMetrics> metrics;  ///< one per repack, in order
    std::vector<double> cycle_durations;    ///< cycles of consumers reading at least one partition
    std::size_t reconfigurations{0};        ///< repacks that changed the assignment
    std::size_t rebalanced_partitions{0};   ///< partitions moved between consumers, summed
    std::size_t faults{0};
    std::size_t mismatches{0};
    double end_time{};
};

/// When the monitor publishes each measurement and what it reports.
struct MonitorOutput {
    double published_at{};
    double convergence_secs{};
    SpeedMap speeds;
};

/// Replays the stream as production and polls it with a WriteSpeedMonitor.
/// Measurement k is published at the first poll whose window holds only
/// samples taken after iteration k began. Speeds are reported in stream units,
/// clamped to [0, C].
[[nodiscard]] std::vector<MonitorOutput> simulate_monitor(const MeasurementStream& stream,
                                                          const SimConfig& cfg);

/// Drives the controller with the stream's measurements, one per period, and
/// runs every resulting reconfiguration through the cluster.
[[nodiscard]] SimResult run_simulation(const MeasurementStream& stream, const SimConfig& cfg);

}  // namespace visbp::sim
