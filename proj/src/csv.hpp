#pragma once

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <string>
#include <variant>
#include <vector>

#include "hwave/errors.hpp"
#include "hwave/field.hpp"

namespace hwave::cli {

/// Numbers with 17 significant digits, LF line endings, header first.
class CsvWriter {
 public:
  using Cell = std::variant<double, long long, std::string>;

  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  void row(const std::vector<Cell>& cells);
  void close();

 private:
  void put(const Cell& c);
  std::ofstream out_;
  std::string path_;
  std::size_t ncol_;
};

std::string format_double(double v);

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

/// Header row plus numeric rows.
Table read_csv(const std::string& path);

/// Long format (t, r, u), t-major, as written by write_field.
void write_field(const std::string& path, const SpaceTimeField& u);
SpaceTimeField read_field(const std::string& path);

}  // namespace hwave::cli
