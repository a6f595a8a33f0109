#include "visbp_cli/table.hpp"

#include <fstream>
#include <sstream>

#include "visbp/errors.hpp"
#include "visbp/stream_io.hpp"

namespace visbp::cli {

std::size_t Table::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw InputError("table has no column '" + name + "'");
}

const std::string& Table::text(std::size_t row, const std::string& name) const {
    return rows.at(row).at(column(name));
}

double Table::number(std::size_t row, const std::string& name) const {
    const std::string& v = text(row, name);
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw InputError("column '" + name + "' holds non-number '" + v + "'");
    }
}

void Table::add(std::vector<std::string> row) {
    if (row.size() != header.size()) throw StructuralError("row width differs from header");
    rows.push_back(std::move(row));
}

void write_csv(std::ostream& os, const Table& t) {
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) os << ',';
            os << cells[i];
        }
        os << '\n';
    };
    line(t.header);
    for (const auto& r : t.rows) line(r);
}

void write_csv_file(const std::filesystem::path& path, const Table& t) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InputError("cannot open " + path.string() + " for writing");
    write_csv(os, t);
    if (!os) throw InputError("failed writing " + path.string());
}

Table read_csv(std::istream& is) {
    Table t;
    std::string line;
    bool header = true;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        if (header) {
            t.header = std::move(cells);
            header = false;
        } else {
            if (cells.size() != t.header.size()) {
                throw InputError("csv row has " + std::to_string(cells.size()) + " fields, header has " +
                                 std::to_string(t.header.size()));
            }
            t.rows.push_back(std::move(cells));
        }
    }
    if (header) throw InputError("csv input is empty");
    return t;
}

Table read_csv_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw InputError("cannot open " + path.string());
    return read_csv(is);
}

std::string num(double v) { return format_number(v, 9); }

}  // namespace visbp::cli
