#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "nlpbem/dump.hpp"
#include "nlpbem/errors.hpp"
#include "nlpbem/mesh.hpp"
#include "nlpbem/sweep.hpp"

namespace fs = std::filesystem;
using nlpbem::read_operator;
using nlpbem::SweepTable;
using nlpbem::write_operator;
using nlpbem::write_tsv;
namespace bem = nlpbem::bem;

static std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

static fs::path tmpdir() {
  auto d = fs::temp_directory_path() / "nlpbem_io_test";
  fs::create_directories(d);
  return d;
}

TEST_CASE("sweep table enforces its invariants") {
  SweepTable t;
  t.columns = {"x", "y"};
  t.add_row(0.5, {1.0});
  t.add_row(0.7, {2.0});
  CHECK_THROWS_AS(t.add_row(0.7, {3.0}), nlpbem::Error);   // not increasing
  CHECK_THROWS_AS(t.add_row(0.6, {3.0}), nlpbem::Error);   // goes backwards
  CHECK_THROWS_AS(t.add_row(0.9, {std::nan("")}), nlpbem::Error);
  CHECK_THROWS_AS(t.add_row(1.0, {1.0, 2.0}), nlpbem::Error);  // arity
  CHECK(t.size() == 2);
}

TEST_CASE("tsv files are deterministic, LF-only, and 17-digit") {
  SweepTable t;
  t.columns = {"omega_hat", "value"};
  t.add_row(0.1, {1.0 / 3.0});
  t.add_row(0.2, {2.0 / 3.0});
  t.add_row(0.30000000000000004, {1e-300});
  const auto p1 = tmpdir() / "a.tsv", p2 = tmpdir() / "b.tsv";
  write_tsv(t, p1);
  write_tsv(t, p2);
  const std::string a = slurp(p1), b = slurp(p2);
  CHECK(a == b);
  CHECK(a.find('\r') == std::string::npos);
  CHECK(a.substr(0, 1) == "#");
  CHECK(a.find("omega_hat\tvalue") != std::string::npos);
  CHECK(a.find("0.33333333333333331") != std::string::npos);
  CHECK(a.back() == '\n');
  // every written number parses back to the identical double
  std::istringstream lines(a);
  std::string line;
  std::getline(lines, line);  // header
  std::getline(lines, line);
  std::istringstream fields(line);
  double x = 0, v = 0;
  fields >> x >> v;
  CHECK(x == 0.1);
  CHECK(v == 1.0 / 3.0);
}

TEST_CASE("operator dump roundtrip and format header") {
  std::mt19937 rng(42);
  std::normal_distribution<double> nd;
  Eigen::MatrixXcd a(7, 5);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      a(i, j) = std::complex<double>(nd(rng), nd(rng));
  const auto p = tmpdir() / "op.bin";
  write_operator(a, p);
  const std::string raw = slurp(p);
  REQUIRE(raw.size() == 8 + 16 + 7 * 5 * 16);
  CHECK(raw.substr(0, 8) == "NLPBEM01");
  Eigen::MatrixXcd b = read_operator(p);
  REQUIRE(b.rows() == 7);
  REQUIRE(b.cols() == 5);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("operator dump rejects corrupt files") {
  const auto good = tmpdir() / "good.bin";
  write_operator(Eigen::MatrixXcd::Identity(3, 3), good);
  const std::string raw = slurp(good);

  const auto bad_magic = tmpdir() / "bad_magic.bin";
  {
    std::ofstream out(bad_magic, std::ios::binary);
    std::string r = raw;
    r[0] = 'X';
    out << r;
  }
  CHECK_THROWS_AS(read_operator(bad_magic), nlpbem::Error);

  const auto truncated = tmpdir() / "trunc.bin";
  {
    std::ofstream out(truncated, std::ios::binary);
    out << raw.substr(0, raw.size() - 7);
  }
  CHECK_THROWS_AS(read_operator(truncated), nlpbem::Error);
  CHECK_THROWS_AS(read_operator(tmpdir() / "missing.bin"), nlpbem::Error);
}

TEST_CASE("icosphere geometry") {
  CHECK(bem::build_icosphere(0).n() == 20);
  CHECK(bem::build_icosphere(2).n() == 320);
  auto m = bem::build_icosphere(3);
  CHECK(m.n() == 1280);
  const double vol = bem::signed_volume(m);
  CHECK(std::abs(vol - 4.0 * M_PI / 3.0) < 0.02 * 4.0 * M_PI / 3.0);
  CHECK(std::abs(m.areas.sum() - 4.0 * M_PI) < 0.01 * 4.0 * M_PI);
  for (Eigen::Index i = 0; i < m.n(); ++i) {
    CHECK(m.centroids.row(i).dot(m.normals.row(i)) > 0.0);  // outward
    CHECK(std::abs(m.normals.row(i).norm() - 1.0) < 1e-12);
    CHECK(m.centroids.row(i).norm() < 1.0);   // chords lie inside the sphere
    CHECK(m.centroids.row(i).norm() > 0.9);
  }
  // vertices are on the unit sphere
  for (Eigen::Index v = 0; v < m.vertices.rows(); ++v)
    CHECK(std::abs(m.vertices.row(v).norm() - 1.0) < 1e-12);
}

TEST_CASE("mesh save/load roundtrip is exact") {
  auto m = bem::build_icosphere(1);
  const auto p = tmpdir() / "ico1.off";
  bem::save_mesh(m, p);
  auto r = bem::load_mesh(p);
  REQUIRE(r.n() == m.n());
  REQUIRE(r.vertices.rows() == m.vertices.rows());
  CHECK((r.vertices - m.vertices).cwiseAbs().maxCoeff() == 0.0);
  CHECK((r.triangles - m.triangles).cwiseAbs().maxCoeff() == 0);
  CHECK_FALSE(r.flipped_on_load);
}

TEST_CASE("inward-oriented input is flipped on load") {
  auto m = bem::build_icosphere(0);
  for (Eigen::Index i = 0; i < m.n(); ++i)
    std::swap(m.triangles(i, 0), m.triangles(i, 1));
  const auto p = tmpdir() / "flipped.off";
  {
    std::ofstream out(p);
    out << "OFF\n" << m.vertices.rows() << " " << m.n() << " 0\n";
    for (Eigen::Index v = 0; v < m.vertices.rows(); ++v)
      out << m.vertices(v, 0) << " " << m.vertices(v, 1) << " " << m.vertices(v, 2) << "\n";
    for (Eigen::Index i = 0; i < m.n(); ++i)
      out << "3 " << m.triangles(i, 0) << " " << m.triangles(i, 1) << " "
          << m.triangles(i, 2) << "\n";
  }
  auto r = bem::load_mesh(p);
  CHECK(r.flipped_on_load);
  CHECK(bem::signed_volume(r) > 0.0);
}

TEST_CASE("defective meshes are rejected") {
  auto base = bem::build_icosphere(0);

  SUBCASE("open surface") {
    bem::TriMesh m;
    m.vertices = base.vertices;
    m.triangles = base.triangles.topRows(19);
    CHECK_THROWS_AS(bem::finalize_mesh(m), nlpbem::MeshError);
  }
  SUBCASE("duplicated face breaks manifoldness") {
    bem::TriMesh m;
    m.vertices = base.vertices;
    m.triangles.resize(21, 3);
    m.triangles.topRows(20) = base.triangles;
    m.triangles.row(20) = base.triangles.row(0);
    CHECK_THROWS_AS(bem::finalize_mesh(m), nlpbem::MeshError);
  }
  SUBCASE("degenerate triangle") {
    bem::TriMesh m;
    m.vertices = base.vertices;
    m.triangles = base.triangles;
    m.triangles(0, 1) = m.triangles(0, 0);
    CHECK_THROWS_AS(bem::finalize_mesh(m), nlpbem::MeshError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(bem::load_mesh(tmpdir() / "nope.off"), nlpbem::MeshError);
  }
  SUBCASE("malformed header") {
    const auto p = tmpdir() / "garbage.off";
    std::ofstream(p) << "NOTOFF\n1 2 3\n";
    CHECK_THROWS_AS(bem::load_mesh(p), nlpbem::MeshError);
  }
}
