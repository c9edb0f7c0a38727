/** \file dump.hpp
 *  Binary serialization of dense complex operators.
 *
 *  Layout: 8-byte magic "NLPBEM01", then rows and cols as little-endian
 *  uint64, then rows*cols complex<double> entries in row-major order.
 */
#pragma once

#include <Eigen/Core>
#include <filesystem>

namespace nlpbem {

void write_operator(const Eigen::MatrixXcd& A, const std::filesystem::path& path);
Eigen::MatrixXcd read_operator(const std::filesystem::path& path);

}  // namespace nlpbem
