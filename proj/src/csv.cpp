#include "csv.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hwave::cli {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : out_(path, std::ios::binary | std::ios::trunc), path_(path), ncol_(header.size()) {
  if (!out_) throw ConfigError("cannot write '" + path + "'");
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << '\n';
}

void CsvWriter::put(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) {
    out_ << format_double(*d);
  } else if (const auto* n = std::get_if<long long>(&c)) {
    out_ << *n;
  } else {
    const std::string& s = std::get<std::string>(c);
    if (s.find_first_of(",\"\n") == std::string::npos) {
      out_ << s;
    } else {
      out_ << '"';
      for (char ch : s) out_ << (ch == '"' ? "\"\"" : std::string(1, ch));
      out_ << '"';
    }
  }
}

void CsvWriter::row(const std::vector<Cell>& cells) {
  if (cells.size() != ncol_) throw Error("csv: row width does not match the header of " + path_);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    put(cells[i]);
  }
  out_ << '\n';
}

void CsvWriter::close() {
  out_.close();
  if (out_.fail()) throw NumericError("csv: failed writing '" + path_ + "'");
}

Table read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("'" + path + "' is empty");
  {
    std::istringstream hs(line);
    std::string col;
    while (std::getline(hs, col, ',')) t.columns.push_back(col);
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw ConfigError(path + ":" + std::to_string(lineno) + ": '" + cell + "' is not a number");
      }
    }
    if (row.size() != t.columns.size())
      throw ConfigError(path + ":" + std::to_string(lineno) + ": wrong number of columns");
    t.rows.push_back(std::move(row));
  }
  return t;
}

void write_field(const std::string& path, const SpaceTimeField& u) {
  CsvWriter w(path, {"t", "r", "u"});
  for (std::size_t i = 0; i < u.nt(); ++i)
    for (std::size_t j = 0; j < u.nr(); ++j) w.row({u.t_grid[i], u.r_grid[j], u.at(i, j)});
  w.close();
}

SpaceTimeField read_field(const std::string& path) {
  const Table tab = read_csv(path);
  if (tab.columns != std::vector<std::string>{"t", "r", "u"})
    throw ConfigError("'" + path + "': expected the columns t,r,u");
  if (tab.rows.empty()) throw ConfigError("'" + path + "': no rows");
  SpaceTimeField f;
  for (const auto& row : tab.rows) {
    if (f.t_grid.empty() || row[0] != f.t_grid.back()) f.t_grid.push_back(row[0]);
    if (f.t_grid.size() == 1) f.r_grid.push_back(row[1]);
    f.values.push_back(row[2]);
  }
  if (f.values.size() != f.t_grid.size() * f.r_grid.size())
    throw ConfigError("'" + path + "': rows do not form a t-major rectangular grid");
  for (std::size_t k = 0; k < tab.rows.size(); ++k)
    if (tab.rows[k][1] != f.r_grid[k % f.r_grid.size()])
      throw ConfigError("'" + path + "': rows do not form a t-major rectangular grid");
  try {
    f.validate();
  } catch (const Error& e) {
    throw ConfigError("'" + path + "': " + e.what());
  }
  return f;
}

}  // namespace hwave::cli
