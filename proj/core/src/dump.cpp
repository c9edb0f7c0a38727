/** \file dump.cpp */
#include "nlpbem/dump.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <memory>

#include "nlpbem/errors.hpp"

namespace nlpbem {

namespace {

constexpr char kMagic[8] = {'N', 'L', 'P', 'B', 'E', 'M', '0', '1'};

static_assert(std::endian::native == std::endian::little,
              "operator dumps assume a little-endian host");

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

void write_operator(const Eigen::MatrixXcd& A,
                    const std::filesystem::path& path) {
  FilePtr f(std::fopen(path.string().c_str(), "wb"));
  if (!f) throw Error("write_operator: cannot open " + path.string());
  const std::uint64_t rows = static_cast<std::uint64_t>(A.rows());
  const std::uint64_t cols = static_cast<std::uint64_t>(A.cols());
  bool ok = std::fwrite(kMagic, 1, sizeof(kMagic), f.get()) == sizeof(kMagic);
  ok = ok && std::fwrite(&rows, sizeof(rows), 1, f.get()) == 1;
  ok = ok && std::fwrite(&cols, sizeof(cols), 1, f.get()) == 1;
  // Entries are row-major on disk; Eigen stores column-major, so write the
  // transpose's contiguous buffer.
  Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic,
                Eigen::RowMajor>
      rm = A;
  const size_t n = static_cast<size_t>(rm.size());
  ok = ok && (n == 0 ||
              std::fwrite(rm.data(), sizeof(std::complex<double>), n,
                          f.get()) == n);
  if (!ok) throw Error("write_operator: short write to " + path.string());
}

Eigen::MatrixXcd read_operator(const std::filesystem::path& path) {
  FilePtr f(std::fopen(path.string().c_str(), "rb"));
  if (!f) throw Error("read_operator: cannot open " + path.string());
  char magic[8];
  if (std::fread(magic, 1, sizeof(magic), f.get()) != sizeof(magic) ||
      std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw Error("read_operator: bad magic in " + path.string());
  std::uint64_t rows = 0, cols = 0;
  if (std::fread(&rows, sizeof(rows), 1, f.get()) != 1 ||
      std::fread(&cols, sizeof(cols), 1, f.get()) != 1)
    throw Error("read_operator: truncated header in " + path.string());
  if (rows > (1u << 20) || cols > (1u << 20))
    throw Error("read_operator: implausible dimensions in " + path.string());
  Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic,
                Eigen::RowMajor>
      rm(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  const size_t n = static_cast<size_t>(rm.size());
  if (n > 0 &&
      std::fread(rm.data(), sizeof(std::complex<double>), n, f.get()) != n)
    throw Error("read_operator: truncated payload in " + path.string());
  return rm;
}

}  // namespace nlpbem
