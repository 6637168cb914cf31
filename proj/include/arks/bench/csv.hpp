#pragma once

#include <charconv>
#include <cstddef>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "arks/errors.hpp"

namespace arks::bench {

enum class ColumnType { integer, real, optional_real, text };

struct Column {
  std::string name;
  ColumnType type;
};

struct CsvSchema {
  std::string file;
  std::vector<Column> columns;

  std::string header() const {
    std::string h;
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (i) h += ',';
      h += columns[i].name;
    }
    return h;
  }
};

inline const CsvSchema& rank_history_schema() {
  static const CsvSchema s{"rank_history.csv",
                           {{"t", ColumnType::real},
                            {"rank_before_trunc", ColumnType::integer},
                            {"rank_after_trunc", ColumnType::integer},
                            {"basis_size_x", ColumnType::integer},
                            {"basis_size_y", ColumnType::integer},
                            {"krylov_iters", ColumnType::integer},
                            {"gmres_iters", ColumnType::integer},
                            {"residual", ColumnType::real}}};
  return s;
}

inline const CsvSchema& convergence_schema() {
  static const CsvSchema s{"convergence.csv",
                           {{"integrator", ColumnType::text},
                            {"n", ColumnType::integer},
                            {"dt", ColumnType::real},
                            {"lambda_d", ColumnType::real},
                            {"l1_error", ColumnType::real},
                            {"observed_order", ColumnType::optional_real}}};
  return s;
}

inline const CsvSchema& complexity_schema() {
  static const CsvSchema s{"complexity.csv",
                           {{"n", ColumnType::integer},
                            {"dt", ColumnType::real},
                            {"wall_time_s", ColumnType::optional_real},
                            {"max_rank", ColumnType::integer}}};
  return s;
}

inline const CsvSchema& gmres_scaling_schema() {
  static const CsvSchema s{"gmres_scaling.csv",
                           {{"rank", ColumnType::integer}, {"solve_time_s", ColumnType::optional_real}}};
  return s;
}

inline const CsvSchema& gmres_schema() {
  static const CsvSchema s{"gmres.csv",
                           {{"n", ColumnType::integer},
                            {"preconditioned", ColumnType::integer},
                            {"iteration", ColumnType::integer},
                            {"residual", ColumnType::real}}};
  return s;
}

// Shortest representation that parses back to the same double.
inline std::string format_real(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

inline std::string format_optional(const std::optional<double>& v) { return v ? format_real(*v) : std::string(); }

using CsvRow = std::vector<std::string>;

inline std::string to_csv(const CsvSchema& schema, const std::vector<CsvRow>& rows) {
  std::string out = schema.header() + '\n';
  for (const auto& row : rows) {
    if (row.size() != schema.columns.size()) throw Error(schema.file + ": row has the wrong number of cells");
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += row[i];
    }
    out += '\n';
  }
  return out;
}

inline void write_csv(const std::string& path, const CsvSchema& schema, const std::vector<CsvRow>& rows) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path + " for writing");
  f << to_csv(schema, rows);
  if (!f) throw Error("failed writing " + path);
}

struct CsvCell {
  std::string text;
  std::optional<double> real;
  long long integer = 0;
};

struct CsvTable {
  std::vector<std::vector<CsvCell>> rows;

  double real(std::size_t row, std::size_t col) const { return rows.at(row).at(col).real.value(); }
  long long integer(std::size_t row, std::size_t col) const { return rows.at(row).at(col).integer; }
};

namespace detail {

inline std::vector<std::string> split_line(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t p = line.find(',', start);
    cells.emplace_back(line.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return cells;
}

}  // namespace detail

// Parses text produced for the schema, checking the header and every cell type.
inline CsvTable parse_csv(const std::string& text, const CsvSchema& schema) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != schema.header())
    throw Error(schema.file + ": header does not match '" + schema.header() + "'");
  CsvTable table;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const auto cells = detail::split_line(line);
    if (cells.size() != schema.columns.size())
      throw Error(schema.file + ":" + std::to_string(lineno) + ": expected " + std::to_string(schema.columns.size()) +
                  " cells");
    std::vector<CsvCell> row;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      CsvCell c{cells[i], std::nullopt, 0};
      const char* b = cells[i].data();
      const char* e = b + cells[i].size();
      const auto bad = [&]() {
        return Error(schema.file + ":" + std::to_string(lineno) + ": bad value '" + cells[i] + "' in column " +
                     schema.columns[i].name);
      };
      switch (schema.columns[i].type) {
        case ColumnType::integer: {
          const auto r = std::from_chars(b, e, c.integer);
          if (r.ec != std::errc() || r.ptr != e || cells[i].empty()) throw bad();
          break;
        }
        case ColumnType::optional_real:
          if (cells[i].empty()) break;
          [[fallthrough]];
        case ColumnType::real: {
          double v = 0.0;
          const auto r = std::from_chars(b, e, v);
          if (r.ec != std::errc() || r.ptr != e || cells[i].empty()) throw bad();
          c.real = v;
          break;
        }
        case ColumnType::text:
          if (cells[i].empty()) throw bad();
          break;
      }
      row.push_back(std::move(c));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

inline CsvTable read_csv(const std::string& path, const CsvSchema& schema) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_csv(ss.str(), schema);
}

}  // namespace arks::bench
