#include "thzqkd/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "thzqkd/error.hpp"

namespace thzqkd {

namespace {

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string render(const Cell& cell) {
  if (const auto* d = std::get_if<double>(&cell)) return format_number(*d);
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return std::to_string(*i);
  return quote(std::get<std::string>(cell));
}

bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

// Splits one logical record; `pos` advances past the line terminator.
std::vector<std::string> split_record(std::string_view text, std::size_t& pos, bool& quoted_any) {
  std::vector<std::string> fields;
  std::string cur;
  bool in_quotes = false;
  quoted_any = false;
  while (pos < text.size()) {
    const char c = text[pos++];
    if (in_quotes) {
      if (c == '"') {
        if (pos < text.size() && text[pos] == '"') {
          cur += '"';
          ++pos;
        } else {
          in_quotes = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      in_quotes = true;
      quoted_any = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c == '\n') {
      break;
    } else if (c != '\r') {
      cur += c;
    }
  }
  if (in_quotes) throw DomainError("csv: unterminated quoted field");
  fields.push_back(std::move(cur));
  return fields;
}

std::string python_string(std::string_view s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\\' || c == '\'') out += '\\';
    out += c;
  }
  return out + "'";
}

}  // namespace

std::size_t Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  throw DomainError("table has no column '" + std::string(name) + "'");
}

std::string format_number(double x) {
  char buf[64];
  const bool tiny = x != 0.0 && std::abs(x) < 1e-3;
  auto res = tiny ? std::to_chars(buf, buf + sizeof buf, x, std::chars_format::scientific)
                  : std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string to_csv(const Table& table) {
  std::ostringstream o;
  for (const auto& [k, v] : table.metadata) o << "# " << k << ": " << v << "\n";
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    o << (i ? "," : "") << quote(table.columns[i]);
  }
  o << "\n";
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) {
      throw DomainError("to_csv: row width " + std::to_string(row.size()) + " does not match " +
                        std::to_string(table.columns.size()) + " columns");
    }
    for (std::size_t i = 0; i < row.size(); ++i) o << (i ? "," : "") << render(row[i]);
    o << "\n";
  }
  return o.str();
}

void write_csv(const Table& table, const std::filesystem::path& path) {
  const std::string text = to_csv(table);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error("write to " + path.string() + " failed");
}

Table parse_csv(std::string_view text) {
  Table t;
  std::size_t pos = 0;
  while (pos < text.size() && text[pos] == '#') {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos + 1, end - pos - 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty() && line.front() == ' ') line.remove_prefix(1);
    const std::size_t colon = line.find(": ");
    if (colon == std::string_view::npos) {
      t.metadata.emplace_back(std::string(line), "");
    } else {
      t.metadata.emplace_back(std::string(line.substr(0, colon)), std::string(line.substr(colon + 2)));
    }
    pos = end + 1;
  }
  if (pos >= text.size()) return t;
  bool quoted = false;
  t.columns = split_record(text, pos, quoted);
  while (pos < text.size()) {
    const auto fields = split_record(text, pos, quoted);
    if (fields.size() == 1 && fields[0].empty() && !quoted) continue;
    if (fields.size() != t.columns.size()) {
      throw DomainError("csv: row has " + std::to_string(fields.size()) + " fields, expected " +
                        std::to_string(t.columns.size()));
    }
    std::vector<Cell> row;
    for (const auto& f : fields) {
      double v = 0.0;
      if (!quoted && parse_double(f, v)) {
        row.emplace_back(v);
      } else {
        row.emplace_back(f);
      }
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

double cell_as_double(const Cell& cell) {
  if (const auto* d = std::get_if<double>(&cell)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return static_cast<double>(*i);
  double v = 0.0;
  if (parse_double(std::get<std::string>(cell), v)) return v;
  throw DomainError("cell '" + std::get<std::string>(cell) + "' is not numeric");
}

std::string cell_as_string(const Cell& cell) {
  if (const auto* s = std::get_if<std::string>(&cell)) return *s;
  if (const auto* d = std::get_if<double>(&cell)) return format_number(*d);
  return std::to_string(std::get<std::int64_t>(cell));
}

std::string plot_script(const Table& table, const std::filesystem::path& csv_path,
                        std::string_view x_column, std::string_view y_column,
                        std::string_view group_column, bool log_x, bool log_y) {
  table.column(x_column);
  table.column(y_column);
  bool grouped = false;
  for (const auto& c : table.columns) grouped = grouped || c == group_column;

  std::ostringstream o;
  o << "#!/usr/bin/env python3\n"
    << "import csv\n"
    << "import sys\n"
    << "\n"
    << "import matplotlib\n"
    << "matplotlib.use('Agg')\n"
    << "import matplotlib.pyplot as plt\n"
    << "\n"
    << "CSV = " << python_string(csv_path.string()) << "\n"
    << "X = " << python_string(x_column) << "\n"
    << "Y = " << python_string(y_column) << "\n"
    << "GROUP = " << (grouped ? python_string(group_column) : std::string("None")) << "\n"
    << "\n"
    << "\n"
    << "def number(s):\n"
    << "    try:\n"
    << "        return float(s)\n"
    << "    except ValueError:\n"
    << "        return None\n"
    << "\n"
    << "\n"
    << "with open(CSV, newline='') as f:\n"
    << "    rows = list(csv.DictReader(line for line in f if not line.startswith('#')))\n"
    << "\n"
    << "series = {}\n"
    << "for r in rows:\n"
    << "    x, y = number(r[X]), number(r[Y])\n"
    << "    if x is None or y is None:\n"
    << "        continue\n"
    << "    key = r[GROUP] if GROUP else Y\n"
    << "    series.setdefault(key, ([], []))\n"
    << "    series[key][0].append(x)\n"
    << "    series[key][1].append(y)\n"
    << "\n"
    << "fig, ax = plt.subplots()\n"
    << "for name, (xs, ys) in series.items():\n"
    << "    ax.plot(xs, ys, label=name)\n"
    << (log_x ? "ax.set_xscale('log')\n" : "")
    << (log_y ? "ax.set_yscale('log')\n" : "")
    << "ax.set_xlabel(X)\n"
    << "ax.set_ylabel(Y)\n"
    << "ax.grid(True, which='both', alpha=0.3)\n"
    << "if len(series) > 1:\n"
    << "    ax.legend()\n"
    << "out = sys.argv[1] if len(sys.argv) > 1 else CSV.rsplit('.', 1)[0] + '.png'\n"
    << "fig.savefig(out, dpi=150, bbox_inches='tight')\n";
  return o.str();
}

void emit_plot_script(const Table& table, const std::filesystem::path& csv_path,
                      const std::filesystem::path& script_path, std::string_view x_column,
                      std::string_view y_column, std::string_view group_column, bool log_x,
                      bool log_y) {
  const std::string text =
      plot_script(table, csv_path, x_column, y_column, group_column, log_x, log_y);
  std::ofstream out(script_path, std::ios::binary);
  if (!out) throw Error("cannot open " + script_path.string() + " for writing");
  out << text;
  if (!out) throw Error("write to " + script_path.string() + " failed");
}

}  // namespace thzqkd
