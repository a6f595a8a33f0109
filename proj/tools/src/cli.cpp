#include "visbp_cli/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "visbp/algorithms.hpp"
#include "visbp/brokersim.hpp"
#include "visbp/errors.hpp"
#include "visbp/evaluation.hpp"
#include "visbp/latency.hpp"
#include "visbp/metrics.hpp"
#include "visbp/stream_io.hpp"
#include "visbp/streamgen.hpp"
#include "visbp/trace.hpp"
#include "visbp_cli/charts.hpp"
#include "visbp_cli/manifest.hpp"
#include "visbp_cli/table.hpp"

namespace fs = std::filesystem;

namespace visbp::cli {

namespace {

struct Common {
    std::uint64_t seed{0};
    std::string out_dir{"."};
    std::string format{"csv+svg"};
    bool no_charts{false};

    [[nodiscard]] bool charts() const { return format == "csv+svg" && !no_charts; }
};

void add_common(CLI::App* app, Common& c) {
    app->add_option("--seed", c.seed, "random seed")->capture_default_str();
    app->add_option("--out-dir", c.out_dir, "directory for output files")->capture_default_str();
    app->add_option("--format", c.format, "csv or csv+svg")
        ->check(CLI::IsMember({"csv", "csv+svg"}))
        ->capture_default_str();
    app->add_flag("--no-charts", c.no_charts, "write CSV only");
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::map<std::string, std::string> echo_config(const CLI::App* app) {
    std::map<std::string, std::string> out;
    for (const CLI::Option* opt : app->get_options()) {
        const std::string name = opt->get_name();
        if (name == "--help" || name.empty()) continue;
        std::string value;
        if (opt->count() > 0) {
            const auto& results = opt->results();
            for (std::size_t i = 0; i < results.size(); ++i) value += (i ? "," : "") + results[i];
        } else {
            value = opt->get_default_str();
        }
        out[name] = value;
    }
    return out;
}

fs::path prepare_out_dir(const Common& c) {
    fs::path dir(c.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw InputError("cannot create output directory " + c.out_dir);
    return dir;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InputError("cannot open " + path.string() + " for writing");
    os << text;
}

std::vector<AlgorithmSpec> parse_algorithm_list(const std::string& list, double capacity, bool adapted) {
    std::vector<std::string> names;
    for (const auto& item : split(list, ',')) {
        auto append = [&](const std::vector<std::string>& v) { names.insert(names.end(), v.begin(), v.end()); };
        if (item == "all") {
            append(classic_algorithm_names());
            append(adapted_algorithm_names());
            append(modified_algorithm_names());
        } else if (item == "classic") {
            append(classic_algorithm_names());
        } else if (item == "adapted") {
            append(adapted_algorithm_names());
        } else if (item == "modified") {
            append(modified_algorithm_names());
        } else {
            names.push_back(item);
        }
    }
    if (names.empty()) throw UsageError("no algorithms given");
    std::vector<AlgorithmSpec> out;
    std::set<std::string> seen;
    for (const auto& n : names) {
        AlgorithmSpec spec;
        try {
            spec = parse_algorithm(n, capacity);
        } catch (const InputError& e) {
            throw UsageError(e.what());
        }
        if (adapted) spec = with_adaptation(spec);
        if (seen.insert(spec.name).second) out.push_back(std::move(spec));
    }
    return out;
}

std::vector<std::size_t> parse_counts(const std::string& text) {
    std::vector<std::size_t> out;
    auto to_count = [&](const std::string& s) -> std::size_t {
        try {
            std::size_t used = 0;
            const unsigned long long v = std::stoull(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return static_cast<std::size_t>(v);
        } catch (const std::exception&) {
            throw UsageError("'" + s + "' is not a consumer count");
        }
    };
    for (const auto& item : split(text, ',')) {
        const auto dash = item.find('-');
        if (dash == std::string::npos) {
            out.push_back(to_count(item));
            continue;
        }
        const std::size_t lo = to_count(trim(item.substr(0, dash)));
        const std::size_t hi = to_count(trim(item.substr(dash + 1)));
        if (hi < lo) throw UsageError("empty consumer range '" + item + "'");
        for (std::size_t n = lo; n <= hi; ++n) out.push_back(n);
    }
    return out;
}

// ------------------------------------------------------------- gen-stream

struct GenArgs {
    std::size_t partitions{32};
    std::size_t iterations{500};
    double delta{5.0};
    double capacity{1.0};
    std::string init{"uniform"};
    std::string output;
};

int cmd_gen_stream(const GenArgs& a, const Common& c, const CLI::App* app, std::ostream& out) {
    StreamConfig cfg;
    cfg.partitions = a.partitions;
    cfg.iterations = a.iterations;
    cfg.delta = a.delta;
    cfg.capacity = a.capacity;
    try {
        cfg.init = parse_init_mode(a.init);
    } catch (const InputError& e) {
        throw UsageError(e.what());
    }
    cfg.seed = c.seed;
    const MeasurementStream stream = generate_stream(cfg);

    fs::path path = a.output.empty() ? prepare_out_dir(c) / "stream.csv" : fs::path(a.output);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    write_stream_file(path, stream);

    Manifest m;
    m.command = "gen-stream";
    m.config = echo_config(app);
    m.seed = c.seed;
    m.outputs = {path.filename()};
    m.write(fs::path(path.string() + ".manifest.json"));

    out << "partitions=" << stream.partition_count() << " iterations=" << stream.length()
        << " delta=" << num(stream.delta) << " clamp_count=" << stream.clamp_count
        << " rows=" << stream.partition_count() * stream.length() << " -> " << path.generic_string() << '\n';
    return kSuccess;
}

// ------------------------------------------------------------------- pack

struct PackArgs {
    std::string stream;
    std::string algorithm;
    std::size_t iteration{1};
    std::optional<double> capacity;
};

int cmd_pack(const PackArgs& a, const Common& c, const CLI::App* app, std::ostream& out, std::ostream& err) {
    const MeasurementStream stream = read_stream_file(a.stream, a.capacity);
    const AlgorithmSpec spec = parse_algorithm_list(a.algorithm, stream.capacity, false).front();
    if (a.iteration < 1 || a.iteration > stream.length()) {
        throw UsageError("--iteration must lie in [1, " + std::to_string(stream.length()) + "]");
    }
    Assigner runner(spec);
    AssignmentMatrix prev(stream.partition_count(), stream.partition_count());
    for (std::size_t k = 1; k < a.iteration; ++k) prev = runner.next(stream.measurements[k - 1]);
    const SpeedMap& s = stream.measurements[a.iteration - 1];
    const AssignmentMatrix x = runner.next(s);
    const MigrationReport report = classify_migrations(compute_delta(prev, x));

    Table t{{"iteration", "consumer", "partition", "bytes_per_sec"}, {}};
    for (ConsumerId i : x.used_consumers()) {
        for (PartitionId j : x.partitions_of(i)) {
            t.add({std::to_string(a.iteration), std::to_string(i.index), std::to_string(j.index), num(s[j])});
        }
    }
    const fs::path dir = prepare_out_dir(c);
    write_csv_file(dir / "assignment.csv", t);
    Manifest m;
    m.command = "pack";
    m.config = echo_config(app);
    m.seed = c.seed;
    m.inputs = {a.stream};
    m.outputs = {"assignment.csv"};
    m.write(dir / "manifest.json");

    out << spec.name << " iteration=" << a.iteration << " bins=" << x.bins_used()
        << " rscore=" << num(rscore(report, s, spec.capacity())) << '\n';
    if (spec.kind != AlgorithmKind::Kafka) {
        const ValidationReport v = validate_assignment(x, s, spec.capacity());
        if (!v.ok()) {
            err << "invalid assignment: " << v.describe() << '\n';
            return kInvariantViolation;
        }
    }
    return kSuccess;
}

// --------------------------------------------------------------- evaluate

struct EvalArgs {
    std::vector<std::string> streams;
    std::string algorithms{"all"};
    bool adapted{false};
    std::optional<double> capacity;
    unsigned workers{0};
};

int cmd_evaluate(const EvalArgs& a, const Common& c, const CLI::App* app, std::ostream& out) {
    struct Loaded {
        double delta;
        std::string label;
        MeasurementStream stream;
    };
    std::vector<Loaded> loaded;
    for (const auto& path : a.streams) {
        MeasurementStream s = read_stream_file(path, a.capacity);
        loaded.push_back({s.delta, num(s.delta), std::move(s)});
    }
    std::stable_sort(loaded.begin(), loaded.end(),
                     [](const Loaded& x, const Loaded& y) { return x.delta < y.delta; });
    for (std::size_t i = 1; i < loaded.size(); ++i) {
        if (loaded[i].label == loaded[i - 1].label) {
            throw UsageError("two streams share delta " + loaded[i].label);
        }
    }
    // Unknown names are a usage error even when no stream would be read.
    parse_algorithm_list(a.algorithms, 1.0, a.adapted);
    const unsigned workers = a.workers > 0 ? a.workers : std::max(1u, std::thread::hardware_concurrency());

    Table per{{"delta", "iteration", "algorithm", "bins", "rscore"}, {}};
    Table summary{{"delta", "algorithm", "cbs", "avg_rscore", "avg_bins"}, {}};
    Table pareto{{"delta", "algorithm", "cbs", "avg_rscore"}, {}};
    for (const Loaded& l : loaded) {
        const auto specs = parse_algorithm_list(a.algorithms, l.stream.capacity, a.adapted);
        const auto runs = evaluate_all(specs, l.stream, workers);
        for (std::size_t k = 0; k < l.stream.length(); ++k) {
            for (const auto& spec : specs) {
                const IterationMetrics& m = runs.at(spec.name).at(k);
                per.add({l.label, std::to_string(m.iteration), m.algorithm, std::to_string(m.bins_used),
                         num(m.rscore)});
            }
        }
        const auto sums = summarize(runs);
        std::map<std::string, AlgorithmSummary> by_name;
        for (const auto& s : sums) by_name[s.algorithm] = s;
        std::vector<ParetoPoint> points;
        for (const auto& spec : specs) {
            const AlgorithmSummary& s = by_name.at(spec.name);
            summary.add({l.label, s.algorithm, num(s.cbs), num(s.avg_rscore), num(s.avg_bins)});
            points.push_back({s.algorithm, s.cbs, s.avg_rscore});
        }
        for (const auto& p : pareto_front(points)) {
            pareto.add({l.label, p.algorithm, num(p.cbs), num(p.avg_rscore)});
        }
        out << "delta=" << l.label << " iterations=" << l.stream.length() << " algorithms=" << specs.size()
            << '\n';
    }

    const fs::path dir = prepare_out_dir(c);
    std::vector<fs::path> outputs{"per_iteration.csv", "summary.csv", "pareto.csv"};
    write_csv_file(dir / "per_iteration.csv", per);
    write_csv_file(dir / "summary.csv", summary);
    write_csv_file(dir / "pareto.csv", pareto);
    if (c.charts()) {
        const Table s2 = read_csv_file(dir / "summary.csv");
        const Table p2 = read_csv_file(dir / "pareto.csv");
        write_text(dir / "cbs.svg", render_cbs(s2));
        write_text(dir / "rscore.svg", render_rscore(s2));
        outputs.insert(outputs.end(), {"cbs.svg", "rscore.svg"});
        for (const Loaded& l : loaded) {
            const std::string name = "pareto_delta" + l.label + ".svg";
            write_text(dir / name, render_pareto(s2, p2, l.label));
            outputs.emplace_back(name);
        }
    }
    Manifest m;
    m.command = "evaluate";
    m.config = echo_config(app);
    m.seed = c.seed;
    m.inputs.assign(a.streams.begin(), a.streams.end());
    m.outputs = outputs;
    m.write(dir / "manifest.json");
    return kSuccess;
}

// ---------------------------------------------------------------- latency

struct LatencyArgs {
    std::string stream;
    std::string algorithms{"mwf"};
    std::string kafka;
    double consumer_capacity{1.2};
    double iteration_secs{30.0};
    double rebalance_secs{5.0};
    double scale{1.0};
    double stride{1.0};
    std::size_t hist_bins{40};
};

int cmd_latency(const LatencyArgs& a, const Common& c, const CLI::App* app, std::ostream& out) {
    const MeasurementStream raw = read_stream_file(a.stream);
    const MeasurementStream stream = a.scale == 1.0 ? raw : scale_stream(raw, a.scale);
    std::vector<AlgorithmSpec> specs;
    if (!trim(a.algorithms).empty() && trim(a.algorithms) != "none") {
        specs = parse_algorithm_list(a.algorithms, stream.capacity, false);
    }
    if (!a.kafka.empty()) {
        for (std::size_t n : parse_counts(a.kafka)) {
            if (n == 0 || n > stream.partition_count()) {
                throw UsageError("kafka_" + std::to_string(n) + " needs between 1 and " +
                                 std::to_string(stream.partition_count()) + " consumers");
            }
            specs.push_back(parse_algorithm("kafka_" + std::to_string(n), stream.capacity));
        }
    }
    for (const auto& s : specs) {
        if (s.kind == AlgorithmKind::Kafka && s.kafka_consumers > stream.partition_count()) {
            throw UsageError(s.name + " has more consumers than the stream has partitions");
        }
    }
    if (specs.empty()) throw UsageError("no algorithms given");
    if (a.hist_bins == 0) throw UsageError("--hist-bins must be positive");

    LatencyConfig cfg;
    cfg.consumer_capacity = a.consumer_capacity * a.scale;
    cfg.iteration_secs = a.iteration_secs;
    cfg.rebalance_secs = a.rebalance_secs;
    cfg.sample_stride = a.stride;
    try {
        cfg.validate();
    } catch (const InputError& e) {
        throw UsageError(e.what());
    }

    std::vector<LatencyReport> reports;
    double top = 0.0;
    for (const auto& spec : specs) {
        reports.push_back(run_latency_experiment(stream, spec, cfg));
        top = std::max(top, reports.back().distribution.max());
    }

    Table summary{{"algorithm", "avg_consumers", "samples", "positive_samples", "p50", "p90", "p99", "max"}, {}};
    Table hist{{"algorithm", "bin_lo", "bin_hi", "count"}, {}};
    Table box{{"algorithm", "min", "q1", "median", "q3", "max"}, {}};
    std::vector<double> edges;
    const double width = top > 0.0 ? top / static_cast<double>(a.hist_bins) : 1.0;
    for (std::size_t b = 0; b <= a.hist_bins; ++b) edges.push_back(width * static_cast<double>(b));
    if (top > 0.0) edges.back() = top;
    for (const auto& r : reports) {
        const auto& d = r.distribution;
        summary.add({r.algorithm, num(r.avg_consumers), std::to_string(d.total_samples()),
                     std::to_string(d.positive_samples()), num(r.p50()), num(r.p90()), num(r.p99()),
                     num(d.max())});
        const auto counts = d.histogram(edges);
        for (std::size_t b = 0; b < counts.size(); ++b) {
            hist.add({r.algorithm, num(edges[b]), num(edges[b + 1]), std::to_string(counts[b])});
        }
        box.add({r.algorithm, num(d.percentile(0)), num(d.percentile(25)), num(d.percentile(50)),
                 num(d.percentile(75)), num(d.max())});
        out << r.algorithm << " avg_consumers=" << num(r.avg_consumers) << " positive=" << d.positive_samples()
            << " p90=" << num(r.p90()) << '\n';
    }

    const fs::path dir = prepare_out_dir(c);
    std::vector<fs::path> outputs{"latency_summary.csv", "latency_histogram.csv", "latency_boxplot.csv"};
    write_csv_file(dir / "latency_summary.csv", summary);
    write_csv_file(dir / "latency_histogram.csv", hist);
    write_csv_file(dir / "latency_boxplot.csv", box);
    if (c.charts()) {
        write_text(dir / "latency_histogram.svg",
                   render_latency_histogram(read_csv_file(dir / "latency_histogram.csv")));
        write_text(dir / "latency_boxplot.svg", render_latency_boxplot(read_csv_file(dir / "latency_boxplot.csv")));
        outputs.insert(outputs.end(), {"latency_histogram.svg", "latency_boxplot.svg"});
    }
    Manifest m;
    m.command = "latency";
    m.config = echo_config(app);
    m.seed = c.seed;
    m.inputs = {a.stream};
    m.outputs = outputs;
    m.write(dir / "manifest.json");
    return kSuccess;
}

// --------------------------------------------------------------- simulate

struct SimArgs {
    std::string stream;
    std::string algorithm{"mwf"};
    double batch_bytes{5e6};
    double wait_secs{1.0};
    double read_rate{2e6};
    double speed_scale{1.6e6};
    bool saturated{false};
    double period{30.0};
    std::string reeval{"30"};
    std::string monitor{"stream"};
    double window{30.0};
    double poll{1.0};
    double transport{0.05};
    double ack_timeout{120.0};
    double create_cost{0.01};
    std::string compute{"modeled"};
    double body_weight{0.88};
};

int cmd_simulate(const SimArgs& a, const Common& c, const CLI::App* app, std::ostream& out,
                 std::ostream& err) {
    const MeasurementStream stream = read_stream_file(a.stream);
    sim::SimConfig cfg;
    cfg.packer = parse_algorithm_list(a.algorithm, stream.capacity, false).front();
    cfg.speed_scale = a.speed_scale;
    cfg.consumer = {a.batch_bytes, a.wait_secs, a.read_rate};
    cfg.saturated = a.saturated;
    cfg.measurement_period = a.period;
    if (a.reeval == "off") {
        cfg.reeval_secs.reset();
    } else {
        try {
            cfg.reeval_secs = std::stod(a.reeval);
        } catch (const std::exception&) {
            throw UsageError("--reeval takes seconds or 'off'");
        }
    }
    cfg.monitor = a.monitor == "live" ? sim::MonitorMode::Live : sim::MonitorMode::StreamFed;
    cfg.monitor_window = a.window;
    cfg.monitor_poll_secs = a.poll;
    cfg.transport_secs = a.transport;
    cfg.ack_timeout_secs = a.ack_timeout;
    cfg.create_request_secs = a.create_cost;
    cfg.compute_cost = a.compute == "measured" ? sim::ComputeCost::Measured : sim::ComputeCost::Modeled;
    cfg.creation.body_weight = a.body_weight;
    cfg.seed = c.seed;
    try {
        cfg.validate();
    } catch (const InputError& e) {
        throw UsageError(e.what());
    }

    const sim::SimResult r = sim::run_simulation(stream, cfg);
    const sim::TraceCheck check = sim::check_trace(r.trace);

    Table timing{{"event", "duration", "iteration"}, {}};
    for (const auto& t : r.timings) {
        timing.add({std::string(sim::to_string(t.event)), num(t.duration), std::to_string(t.iteration)});
    }
    Table trace{{"time", "actor", "event", "partition", "consumer", "detail"}, {}};
    for (const auto& e : r.trace) {
        trace.add({num(e.time), e.actor, std::string(sim::to_string(e.kind)),
                   e.partition ? std::to_string(e.partition->index) : "",
                   e.consumer ? std::to_string(e.consumer->index) : "", e.detail});
    }
    Table metrics{{"iteration", "algorithm", "bins", "rscore"}, {}};
    for (const auto& m : r.metrics) {
        metrics.add({std::to_string(m.iteration), m.algorithm, std::to_string(m.bins_used), num(m.rscore)});
    }
    std::vector<double> cycles = r.cycle_durations;
    std::sort(cycles.begin(), cycles.end());
    const double cycle_median = cycles.empty() ? 0.0 : cycles[cycles.size() / 2];
    Table summary{{"key", "value"}, {}};
    summary.add({"reconfigurations", std::to_string(r.reconfigurations)});
    summary.add({"rebalanced_partitions", std::to_string(r.rebalanced_partitions)});
    summary.add({"faults", std::to_string(r.faults)});
    summary.add({"mismatches", std::to_string(r.mismatches)});
    summary.add({"median_cycle_secs", num(cycle_median)});
    summary.add({"mutual_exclusion_violations", std::to_string(check.mutual_exclusion_violations)});
    summary.add({"start_before_stop_ack", std::to_string(check.start_before_stop_ack)});
    summary.add({"end_time", num(r.end_time)});

    const fs::path dir = prepare_out_dir(c);
    std::vector<fs::path> outputs{"timing.csv", "trace.csv", "sim_metrics.csv", "sim_summary.csv"};
    write_csv_file(dir / "timing.csv", timing);
    write_csv_file(dir / "trace.csv", trace);
    write_csv_file(dir / "sim_metrics.csv", metrics);
    write_csv_file(dir / "sim_summary.csv", summary);
    if (c.charts()) {
        const Table t2 = read_csv_file(dir / "timing.csv");
        const std::vector<std::pair<std::string, double>> bins{
            {"dt1", 1.0}, {"dt2", 0.005}, {"dt3", 10.0}, {"dt4", 0.5}};
        for (const auto& [event, width] : bins) {
            const std::string name = "timing_" + event + ".svg";
            write_text(dir / name, render_timing(t2, event, width));
            outputs.emplace_back(name);
        }
    }
    Manifest m;
    m.command = "simulate";
    m.config = echo_config(app);
    m.seed = c.seed;
    m.inputs = {a.stream};
    m.outputs = outputs;
    m.write(dir / "manifest.json");

    out << cfg.packer.name << " reconfigurations=" << r.reconfigurations
        << " rebalanced=" << r.rebalanced_partitions << " faults=" << r.faults
        << " median_cycle=" << num(cycle_median) << " trace=" << (check.ok() ? "ok" : "VIOLATIONS") << '\n';
    if (!check.ok() || r.mismatches > 0) {
        for (const auto& msg : check.messages) err << msg << '\n';
        if (r.mismatches > 0) err << r.mismatches << " synchronize mismatches\n";
        return kInvariantViolation;
    }
    return kSuccess;
}

// ----------------------------------------------------------------- render

struct RenderArgs {
    std::string kind;
    std::vector<std::string> inputs;
    std::string delta;
    std::string event{"dt4"};
    double bin{0.5};
    std::string output;
};

int cmd_render(const RenderArgs& a) {
    std::vector<Table> t;
    for (const auto& p : a.inputs) t.push_back(read_csv_file(p));
    auto need = [&](std::size_t n) {
        if (t.size() != n) throw UsageError("--kind " + a.kind + " takes " + std::to_string(n) + " --input files");
    };
    std::string svg;
    if (a.kind == "cbs") {
        need(1);
        svg = render_cbs(t[0]);
    } else if (a.kind == "rscore") {
        need(1);
        svg = render_rscore(t[0]);
    } else if (a.kind == "pareto") {
        need(2);
        if (a.delta.empty()) throw UsageError("--kind pareto needs --delta");
        svg = render_pareto(t[0], t[1], a.delta);
    } else if (a.kind == "latency-histogram") {
        need(1);
        svg = render_latency_histogram(t[0]);
    } else if (a.kind == "latency-boxplot") {
        need(1);
        svg = render_latency_boxplot(t[0]);
    } else {
        need(1);
        svg = render_timing(t[0], a.event, a.bin);
    }
    write_text(a.output, svg);
    return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Partition-to-consumer assignment experiments", "visbp"};
    app.require_subcommand(1);
    Common common;

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen-stream", "generate a random-walk measurement stream");
    add_common(gen_cmd, common);
    gen_cmd->add_option("--partitions", gen.partitions)->capture_default_str()->check(CLI::PositiveNumber);
    gen_cmd->add_option("--iterations", gen.iterations)->capture_default_str()->check(CLI::PositiveNumber);
    gen_cmd->add_option("--delta", gen.delta, "max step, percent of capacity")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 100.0));
    gen_cmd->add_option("--capacity", gen.capacity)->capture_default_str()->check(CLI::PositiveNumber);
    gen_cmd->add_option("--init", gen.init, "uniform, zero, half or full")
        ->capture_default_str()
        ->check(CLI::IsMember({"uniform", "zero", "half", "full"}));
    gen_cmd->add_option("-o,--output", gen.output, "stream file (default <out-dir>/stream.csv)");

    PackArgs pack;
    auto* pack_cmd = app.add_subcommand("pack", "assign one measurement of a stream");
    add_common(pack_cmd, common);
    pack_cmd->add_option("--stream", pack.stream)->required()->check(CLI::ExistingFile);
    pack_cmd->add_option("--algorithm", pack.algorithm)->required();
    pack_cmd->add_option("--iteration", pack.iteration)->capture_default_str();
    pack_cmd->add_option("--capacity", pack.capacity, "override the stream's capacity");

    EvalArgs eval;
    auto* eval_cmd = app.add_subcommand("evaluate", "bins, Rscore, CBS and Pareto front per algorithm");
    add_common(eval_cmd, common);
    eval_cmd->add_option("--stream", eval.streams, "stream files, one per delta")->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("--algorithms", eval.algorithms, "comma list; all, classic, adapted, modified")
        ->capture_default_str();
    eval_cmd->add_flag("--adapted", eval.adapted, "use the adapted form of classic algorithms");
    eval_cmd->add_option("--capacity", eval.capacity, "override the streams' capacity");
    eval_cmd->add_option("--workers", eval.workers, "threads (0 = all cores)")->capture_default_str();

    LatencyArgs lat;
    auto* lat_cmd = app.add_subcommand("latency", "per-byte latency distribution per algorithm");
    add_common(lat_cmd, common);
    lat_cmd->add_option("--stream", lat.stream)->required()->check(CLI::ExistingFile);
    lat_cmd->add_option("--algorithms", lat.algorithms, "comma list of packers, or none")->capture_default_str();
    lat_cmd->add_option("--kafka", lat.kafka, "Kafka consumer counts, e.g. 10-32 or 15,20");
    lat_cmd->add_option("--consumer-capacity", lat.consumer_capacity, "real read rate, stream units")
        ->capture_default_str();
    lat_cmd->add_option("--iteration-secs", lat.iteration_secs)->capture_default_str();
    lat_cmd->add_option("--rebalance-secs", lat.rebalance_secs)->capture_default_str();
    lat_cmd->add_option("--scale", lat.scale, "multiply speeds and capacities")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    lat_cmd->add_option("--stride", lat.stride, "bytes between samples")->capture_default_str();
    lat_cmd->add_option("--hist-bins", lat.hist_bins)->capture_default_str();

    SimArgs sa;
    auto* sim_cmd = app.add_subcommand("simulate", "discrete-event run of the autoscaler");
    add_common(sim_cmd, common);
    sim_cmd->add_option("--stream", sa.stream)->required()->check(CLI::ExistingFile);
    sim_cmd->add_option("--algorithm", sa.algorithm)->capture_default_str();
    sim_cmd->add_option("--batch-bytes", sa.batch_bytes)->capture_default_str();
    sim_cmd->add_option("--wait-secs", sa.wait_secs)->capture_default_str();
    sim_cmd->add_option("--read-rate", sa.read_rate, "consumer processing rate, bytes/s")->capture_default_str();
    sim_cmd->add_option("--speed-scale", sa.speed_scale, "bytes/s per stream unit")->capture_default_str();
    sim_cmd->add_flag("--saturated", sa.saturated, "partitions always hold a full batch");
    sim_cmd->add_option("--period", sa.period, "seconds between measurements")->capture_default_str();
    sim_cmd->add_option("--reeval", sa.reeval, "re-evaluation period in seconds, or off")->capture_default_str();
    sim_cmd->add_option("--monitor", sa.monitor, "stream or live")
        ->capture_default_str()
        ->check(CLI::IsMember({"stream", "live"}));
    sim_cmd->add_option("--window", sa.window, "monitor window, seconds")->capture_default_str();
    sim_cmd->add_option("--poll", sa.poll, "monitor poll interval, seconds")->capture_default_str();
    sim_cmd->add_option("--transport", sa.transport, "metadata message delay, seconds")->capture_default_str();
    sim_cmd->add_option("--ack-timeout", sa.ack_timeout)->capture_default_str();
    sim_cmd->add_option("--create-cost", sa.create_cost, "seconds per create request")->capture_default_str();
    sim_cmd->add_option("--compute", sa.compute, "modeled or measured")
        ->capture_default_str()
        ->check(CLI::IsMember({"modeled", "measured"}));
    sim_cmd->add_option("--startup-body-weight", sa.body_weight, "share of fast consumer start-ups")
        ->capture_default_str();

    RenderArgs ra;
    auto* render_cmd = app.add_subcommand("render", "rebuild a chart from CSV");
    render_cmd->add_option("--kind", ra.kind)
        ->required()
        ->check(CLI::IsMember({"cbs", "rscore", "pareto", "latency-histogram", "latency-boxplot", "timing"}));
    render_cmd->add_option("--input", ra.inputs)->required()->check(CLI::ExistingFile);
    render_cmd->add_option("--delta", ra.delta);
    render_cmd->add_option("--event", ra.event)->capture_default_str();
    render_cmd->add_option("--bin", ra.bin)->capture_default_str();
    render_cmd->add_option("-o,--output", ra.output)->required();

    std::vector<std::string> argv_store{"visbp"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& s : argv_store) argv.push_back(s.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsageError;
    }

    try {
        if (gen_cmd->parsed()) return cmd_gen_stream(gen, common, gen_cmd, out);
        if (pack_cmd->parsed()) return cmd_pack(pack, common, pack_cmd, out, err);
        if (eval_cmd->parsed()) return cmd_evaluate(eval, common, eval_cmd, out);
        if (lat_cmd->parsed()) return cmd_latency(lat, common, lat_cmd, out);
        if (sim_cmd->parsed()) return cmd_simulate(sa, common, sim_cmd, out, err);
        if (render_cmd->parsed()) return cmd_render(ra);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsageError;
    } catch (const InvariantViolation& e) {
        err << "invariant violation: " << e.what() << '\n';
        return kInvariantViolation;
    } catch (const Error& e) {
        err << "input error: " << e.what() << '\n';
        return kInputError;
    } catch (const fs::filesystem_error& e) {
        err << "input error: " << e.what() << '\n';
        return kInputError;
    }
    err << "usage error: no command\n";
    return kUsageError;
}

}  // namespace visbp::cli
