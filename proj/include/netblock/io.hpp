#pragma once

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "netblock/adjacency.hpp"
#include "netblock/errors.hpp"
#include "netblock/layout.hpp"
#include "netblock/linalg.hpp"

namespace netblock {

inline constexpr const char* kToolVersion = "0.1.0";

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

// Strict finite-double parse; the whole cell must be consumed.
inline std::optional<double> parse_double(const std::string& cell) {
  if (cell.empty()) return std::nullopt;
  const char* begin = cell.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end != begin + cell.size()) return std::nullopt;
  if (!std::isfinite(v)) return std::nullopt;
  return v;
}

inline std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

}  // namespace detail

// Sidecar layout file: one `region_name,width` line per region, in column
// order.
inline RegionLayout read_layout_csv(const std::string& path) {
  RegionLayout layout;
  std::size_t row = 0;
  for (const std::string& raw : detail::read_lines(path)) {
    ++row;
    const std::string line = detail::trim(raw);
    if (line.empty()) continue;
    const std::vector<std::string> cells = detail::split_csv_line(line);
    if (cells.size() != 2)
      throw ParseError(row, 1, path + ": expected `name,width` at line " +
                                   std::to_string(row));
    const std::optional<double> w = detail::parse_double(cells[1]);
    if (!w || *w < 1.0 || *w != static_cast<double>(static_cast<std::size_t>(*w)))
      throw ParseError(row, 2, path + ": bad region width at line " +
                                   std::to_string(row));
    layout.names.push_back(cells[0]);
    layout.widths.push_back(static_cast<std::size_t>(*w));
  }
  layout.validate();
  return layout;
}

// Numeric CSV, rows = scans, columns = components. An optional header row
// is auto-detected by its first cell failing to parse as a number.
inline Matrix read_numeric_csv(const std::string& path) {
  const std::vector<std::string> lines = detail::read_lines(path);
  std::vector<std::vector<double>> rows;
  std::size_t cols = 0;
  std::size_t line_no = 0;
  bool first_data_row = true;
  for (const std::string& raw : lines) {
    ++line_no;
    if (detail::trim(raw).empty()) continue;
    const std::vector<std::string> cells = detail::split_csv_line(raw);
    if (first_data_row && !detail::parse_double(cells[0]).has_value()) {
      first_data_row = false;  // header row
      continue;
    }
    first_data_row = false;
    std::vector<double> row(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const std::optional<double> v = detail::parse_double(cells[c]);
      if (!v)
        throw ParseError(line_no, c + 1,
                         path + ": non-numeric or non-finite value at row " +
                             std::to_string(line_no) + ", column " +
                             std::to_string(c + 1));
      row[c] = *v;
    }
    if (rows.empty()) {
      cols = row.size();
    } else if (row.size() != cols) {
      throw ParseError(line_no, 1,
                       path + ": row " + std::to_string(line_no) + " has " +
                           std::to_string(row.size()) + " columns, expected " +
                           std::to_string(cols));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw EmptyInput(path + ": no data rows");

  Matrix m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
  return m;
}

inline std::vector<ComponentPanel> split_by_layout(const Matrix& data,
                                                   const RegionLayout& layout) {
  if (layout.total_columns() != data.cols())
    throw LayoutMismatch("layout widths sum to " +
                         std::to_string(layout.total_columns()) + " but data has " +
                         std::to_string(data.cols()) + " columns");
  std::vector<ComponentPanel> panels;
  panels.reserve(layout.p());
  std::size_t offset = 0;
  for (const std::size_t q : layout.widths) {
    ComponentPanel panel(data.rows(), q);
    for (std::size_t k = 0; k < data.rows(); ++k)
      for (std::size_t j = 0; j < q; ++j) panel(k, j) = data(k, offset + j);
    offset += q;
    panels.push_back(std::move(panel));
  }
  return panels;
}

inline std::pair<std::vector<ComponentPanel>, RegionLayout> read_panel_csv(
    const std::string& data_path, const std::string& layout_path) {
  const RegionLayout layout = read_layout_csv(layout_path);
  const Matrix data = read_numeric_csv(data_path);
  std::vector<ComponentPanel> panels = split_by_layout(data, layout);
  for (const ComponentPanel& panel : panels) panel.validate();
  return {std::move(panels), layout};
}

struct PreprocessOptions {
  bool detrend = false;
  bool whiten = false;
  std::optional<double> pca_fraction;  // e.g. 0.9
};

// De-meaning always happens; de-trending, AR(1) whitening and per-region
// PCA are opt-in, applied in that order. Whitened columns get re-centered
// so the PCA precondition holds.
inline std::vector<ComponentPanel> preprocess(const std::vector<ComponentPanel>& panels,
                                              const PreprocessOptions& options) {
  std::vector<ComponentPanel> out;
  out.reserve(panels.size());
  for (const ComponentPanel& panel : panels) {
    ComponentPanel work = options.detrend ? center_and_detrend(panel) : center(panel);
    if (options.whiten) {
      work = ar1_whiten(work).first;
      work = center(work);
    }
    if (options.pca_fraction) {
      const PcaSummary pca = pca_summarize(work, *options.pca_fraction);
      work = pca.components;
    }
    out.push_back(std::move(work));
  }
  return out;
}

// 0/1 grid, one row per region, cells separated by spaces.
inline std::string format_adjacency_grid(const Adjacency& adj) {
  std::string out;
  for (std::size_t s = 0; s < adj.p(); ++s) {
    for (std::size_t t = 0; t < adj.p(); ++t) {
      if (t) out += ' ';
      out += adj(s, t) ? '1' : '0';
    }
    out += '\n';
  }
  return out;
}

inline Adjacency read_adjacency_grid(const std::string& path) {
  std::vector<std::vector<int>> rows;
  std::size_t line_no = 0;
  for (const std::string& raw : detail::read_lines(path)) {
    ++line_no;
    const std::string line = detail::trim(raw);
    if (line.empty()) continue;
    std::vector<int> row;
    std::stringstream ss(line);
    std::string tok;
    while (ss >> tok) {
      if (tok == "0") {
        row.push_back(0);
      } else if (tok == "1") {
        row.push_back(1);
      } else {
        throw ParseError(line_no, row.size() + 1,
                         path + ": adjacency cells must be 0 or 1");
      }
    }
    rows.push_back(std::move(row));
  }
  const std::size_t p = rows.size();
  if (p < 2) throw EmptyInput(path + ": adjacency needs at least 2 regions");
  for (std::size_t s = 0; s < p; ++s)
    if (rows[s].size() != p)
      throw ParseError(s + 1, 1, path + ": adjacency grid is not square");
  Adjacency adj(p);
  for (std::size_t s = 0; s < p; ++s) {
    if (rows[s][s] != 0)
      throw DomainError(path + ": adjacency diagonal must be zero");
    for (std::size_t t = s + 1; t < p; ++t) {
      if (rows[s][t] != rows[t][s])
        throw DomainError(path + ": adjacency grid is not symmetric");
      adj.set(s, t, rows[s][t] == 1);
    }
  }
  return adj;
}

}  // namespace netblock
