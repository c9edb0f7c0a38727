/** \file sweep.hpp
 *  \brief Numeric sweep tables and their deterministic TSV serialization.
 */
#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace nlpbem {

/// Column-named table of (abscissa, values...) rows.  The abscissa must be
/// strictly increasing and every entry finite; add_row rejects violations
/// immediately and the TSV writer re-checks before serializing.
struct SweepTable {
  std::vector<std::string> columns;        ///< first entry names the abscissa
  std::vector<double> abscissa;
  std::vector<std::vector<double>> rows;   ///< per-abscissa value tuples

  /// \throws Error on non-finite input, non-increasing abscissa, or a row
  ///         width that disagrees with a non-empty column list.
  void add_row(double x, std::vector<double> values);
  size_t size() const { return abscissa.size(); }
};

/// Writes a '#'-headed, tab-separated, LF-terminated file with 17 significant
/// digits; identical tables produce byte-identical files.
/// \throws Error when the table violates its invariants or the file cannot
///         be written.
void write_tsv(const SweepTable& table, const std::filesystem::path& path);

}  // namespace nlpbem
