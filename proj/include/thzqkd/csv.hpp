#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace thzqkd {

using Cell = std::variant<double, std::int64_t, std::string>;

struct Table {
  std::vector<std::pair<std::string, std::string>> metadata;  // "# key: value" lines
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  // Index of a column; throws DomainError if missing.
  std::size_t column(std::string_view name) const;
};

// Shortest round-trip representation, '.' decimal separator, scientific
// notation for 0 < |x| < 1e-3.
std::string format_number(double x);

std::string to_csv(const Table& table);
// Throws Error with the path on I/O failure.
void write_csv(const Table& table, const std::filesystem::path& path);

// Numeric-looking fields come back as double, everything else as string.
Table parse_csv(std::string_view text);

double cell_as_double(const Cell& cell);
std::string cell_as_string(const Cell& cell);

// Self-contained matplotlib script that reads `csv_path` and plots y_column
// against x_column, one line per distinct value of group_column (if the
// table has it).
std::string plot_script(const Table& table, const std::filesystem::path& csv_path,
                        std::string_view x_column, std::string_view y_column,
                        std::string_view group_column = "method", bool log_x = false,
                        bool log_y = false);
void emit_plot_script(const Table& table, const std::filesystem::path& csv_path,
                      const std::filesystem::path& script_path, std::string_view x_column,
                      std::string_view y_column, std::string_view group_column = "method",
                      bool log_x = false, bool log_y = false);

}  // namespace thzqkd
