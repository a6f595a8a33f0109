#include "visbp/stream_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

#include "visbp/errors.hpp"

namespace visbp {

namespace {

constexpr std::string_view kMagic = "visbp-stream v1";
constexpr std::string_view kHeader = "iteration,partition,bytes_per_sec";

std::string trim(std::string_view v) {
    const auto b = v.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = v.find_last_not_of(" \t\r");
    return std::string(v.substr(b, e - b + 1));
}

double parse_double(const std::string& text, std::size_t line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw InputError("line " + std::to_string(line) + ": '" + text + "' is not a number");
    }
}

std::uint64_t parse_uint(const std::string& text, std::size_t line) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw InputError("line " + std::to_string(line) + ": '" + text +
                         "' is not a non-negative integer");
    }
    return v;
}

}  // namespace

std::string format_number(double value, int significant_digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", significant_digits, value);
    return buf;
}

void write_stream(std::ostream& os, const MeasurementStream& stream) {
    os << "# " << kMagic << '\n'
       << "# generator: " << stream.generator << '\n'
       << "# capacity: " << format_number(stream.capacity, 17) << '\n'
       << "# delta: " << format_number(stream.delta, 17) << '\n'
       << "# seed: " << stream.seed << '\n'
       << "# init: " << stream.init << '\n'
       << "# partitions: " << stream.partition_count() << '\n'
       << "# iterations: " << stream.length() << '\n'
       << "# clamp_count: " << stream.clamp_count << '\n'
       << kHeader << '\n';
    for (const SpeedMap& s : stream.measurements) {
        for (std::size_t j = 0; j < s.size(); ++j) {
            os << s.iteration() << ',' << j << ',' << format_number(s[PartitionId{j}], 17) << '\n';
        }
    }
}

void write_stream_file(const std::filesystem::path& path, const MeasurementStream& stream) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InputError("cannot open " + path.string() + " for writing");
    write_stream(os, stream);
    if (!os) throw InputError("failed writing " + path.string());
}

MeasurementStream read_stream(std::istream& is, std::optional<double> capacity_override) {
    MeasurementStream stream;
    stream.capacity = std::nan("");
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;

    std::vector<double> current;
    std::size_t current_iteration = 0;
    std::size_t partitions = 0;
    auto flush = [&](std::size_t at_line) {
        if (current_iteration == 0) return;
        if (stream.measurements.empty()) {
            partitions = current.size();
        } else if (current.size() != partitions) {
            throw InputError("line " + std::to_string(at_line) + ": iteration " +
                             std::to_string(current_iteration) + " lists " +
                             std::to_string(current.size()) + " partitions, expected " +
                             std::to_string(partitions));
        }
        stream.measurements.emplace_back(std::move(current), current_iteration);
        current.clear();
    };

    while (std::getline(is, line)) {
        ++line_no;
        const std::string text = trim(line);
        if (text.empty()) continue;
        if (text.front() == '#') {
            const std::string body = trim(std::string_view(text).substr(1));
            const auto colon = body.find(':');
            if (colon == std::string::npos) continue;
            const std::string key = trim(std::string_view(body).substr(0, colon));
            const std::string value = trim(std::string_view(body).substr(colon + 1));
            if (key == "capacity") stream.capacity = parse_double(value, line_no);
            else if (key == "delta") stream.delta = parse_double(value, line_no);
            else if (key == "seed") stream.seed = parse_uint(value, line_no);
            else if (key == "init") stream.init = value;
            else if (key == "generator") stream.generator = value;
            else if (key == "clamp_count") stream.clamp_count = parse_uint(value, line_no);
            continue;
        }
        if (!header_seen) {
            if (text != kHeader) {
                throw InputError("line " + std::to_string(line_no) + ": expected header '" +
                                 std::string(kHeader) + "'");
            }
            header_seen = true;
            continue;
        }
        std::stringstream row(text);
        std::string f1, f2, f3, extra;
        if (!std::getline(row, f1, ',') || !std::getline(row, f2, ',') || !std::getline(row, f3, ',') ||
            std::getline(row, extra, ',')) {
            throw InputError("line " + std::to_string(line_no) + ": expected 3 fields");
        }
        const auto k = static_cast<std::size_t>(parse_uint(trim(f1), line_no));
        const auto j = static_cast<std::size_t>(parse_uint(trim(f2), line_no));
        const double v = parse_double(trim(f3), line_no);
        if (k != current_iteration) {
            if (k != current_iteration + 1) {
                throw InputError("line " + std::to_string(line_no) + ": iteration " +
                                 std::to_string(k) + " out of order");
            }
            flush(line_no);
            current_iteration = k;
        }
        if (j != current.size()) {
            throw InputError("line " + std::to_string(line_no) + ": partition " + std::to_string(j) +
                             " out of order");
        }
        current.push_back(v);
    }
    flush(line_no);

    if (!header_seen || stream.measurements.empty()) throw InputError("stream file has no data rows");
    if (capacity_override) stream.capacity = *capacity_override;
    if (std::isnan(stream.capacity)) {
        throw InputError("stream file has no '# capacity:' line and none was given");
    }
    for (const SpeedMap& s : stream.measurements) validate_speeds(s, stream.capacity);
    return stream;
}

MeasurementStream read_stream_file(const std::filesystem::path& path,
                                   std::optional<double> capacity_override) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw InputError("cannot open stream file " + path.string());
    return read_stream(is, capacity_override);
}

}  // namespace visbp
