#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace visbp::cli {

/// A CSV table held as text, so that rendering from a file and from memory
/// see exactly the same values.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of a header column. Throws InputError when absent.
    [[nodiscard]] std::size_t column(const std::string& name) const;
    [[nodiscard]] double number(std::size_t row, const std::string& name) const;
    [[nodiscard]] const std::string& text(std::size_t row, const std::string& name) const;
    void add(std::vector<std::string> row);
};

void write_csv(std::ostream& os, const Table& t);
void write_csv_file(const std::filesystem::path& path, const Table& t);

/// Plain comma-separated values; no quoting, '#' lines are skipped.
[[nodiscard]] Table read_csv(std::istream& is);
[[nodiscard]] Table read_csv_file(const std::filesystem::path& path);

/// 9 significant digits.
[[nodiscard]] std::string num(double v);

}  // namespace visbp::cli
