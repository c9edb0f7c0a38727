/** \file sweep.cpp */
#include "nlpbem/sweep.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "nlpbem/errors.hpp"

namespace nlpbem {

void SweepTable::add_row(double x, std::vector<double> values) {
  if (!std::isfinite(x))
    throw Error("SweepTable::add_row: non-finite abscissa");
  if (!abscissa.empty() && !(x > abscissa.back()))
    throw Error("SweepTable::add_row: abscissa must be strictly increasing");
  for (double v : values)
    if (!std::isfinite(v))
      throw Error("SweepTable::add_row: non-finite value");
  if (!columns.empty() && values.size() != columns.size() - 1)
    throw Error("SweepTable::add_row: row width does not match column count");
  abscissa.push_back(x);
  rows.push_back(std::move(values));
}

namespace {

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_tsv(const SweepTable& table, const std::filesystem::path& path) {
  if (table.abscissa.size() != table.rows.size())
    throw Error("write_tsv: abscissa/row count mismatch");
  const size_t nval = table.columns.empty() ? 0 : table.columns.size() - 1;
  std::string out;
  out.reserve(64 + table.size() * 48);
  out += "#";
  for (size_t c = 0; c < table.columns.size(); ++c) {
    out += (c == 0) ? " " : "\t";
    out += table.columns[c];
  }
  out += "\n";
  for (size_t i = 0; i < table.size(); ++i) {
    const double x = table.abscissa[i];
    if (!std::isfinite(x))
      throw Error("write_tsv: non-finite abscissa at row " + std::to_string(i));
    if (i > 0 && !(x > table.abscissa[i - 1]))
      throw Error("write_tsv: abscissa not strictly increasing at row " +
                  std::to_string(i));
    if (table.rows[i].size() != nval)
      throw Error("write_tsv: row width mismatch at row " + std::to_string(i));
    out += format_value(x);
    for (double v : table.rows[i]) {
      if (!std::isfinite(v))
        throw Error("write_tsv: non-finite value at row " + std::to_string(i));
      out += "\t";
      out += format_value(v);
    }
    out += "\n";
  }
  std::FILE* f = std::fopen(path.string().c_str(), "wb");
  if (!f) throw Error("write_tsv: cannot open " + path.string());
  const size_t written = std::fwrite(out.data(), 1, out.size(), f);
  const int rc = std::fclose(f);
  if (written != out.size() || rc != 0)
    throw Error("write_tsv: short write to " + path.string());
}

}  // namespace nlpbem
