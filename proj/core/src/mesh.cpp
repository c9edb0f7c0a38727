/** \file mesh.cpp */
#include "nlpbem/mesh.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "nlpbem/errors.hpp"

namespace nlpbem::bem {

namespace {

using Vec3 = Eigen::RowVector3d;

void check_topology(const TriMesh& mesh) {
  const Eigen::Index nv = mesh.vertices.rows();
  // Directed-edge census: a closed, consistently oriented 2-manifold has
  // every undirected edge used exactly twice, once in each direction.
  std::map<std::pair<int, int>, int> directed;
  for (Eigen::Index f = 0; f < mesh.n(); ++f) {
    int idx[3] = {mesh.triangles(f, 0), mesh.triangles(f, 1),
                  mesh.triangles(f, 2)};
    for (int e = 0; e < 3; ++e) {
      if (idx[e] < 0 || idx[e] >= nv)
        throw MeshError("mesh: triangle references vertex out of range");
      if (idx[e] == idx[(e + 1) % 3])
        throw MeshError("mesh: triangle repeats a vertex");
    }
    for (int e = 0; e < 3; ++e) {
      const auto key = std::make_pair(idx[e], idx[(e + 1) % 3]);
      if (++directed[key] > 1)
        throw MeshError("mesh: inconsistent orientation or non-manifold edge");
    }
  }
  for (const auto& [edge, count] : directed) {
    const auto rev = std::make_pair(edge.second, edge.first);
    auto it = directed.find(rev);
    if (it == directed.end())
      throw MeshError("mesh: surface is not closed (boundary edge)");
    (void)count;
    (void)it;
  }
}

}  // namespace

double signed_volume(const TriMesh& mesh) {
  double vol = 0.0;
  for (Eigen::Index f = 0; f < mesh.n(); ++f) {
    const Vec3 a = mesh.vertices.row(mesh.triangles(f, 0));
    const Vec3 b = mesh.vertices.row(mesh.triangles(f, 1));
    const Vec3 c = mesh.vertices.row(mesh.triangles(f, 2));
    vol += a.cross(b).dot(c);
  }
  return vol / 6.0;
}

void finalize_mesh(TriMesh& mesh) {
  if (mesh.n() < 4) throw MeshError("mesh: too few triangles for a closed surface");
  check_topology(mesh);
  const Eigen::Index m = mesh.n();
  mesh.normals.resize(m, 3);
  mesh.centroids.resize(m, 3);
  mesh.areas.resize(m);
  for (Eigen::Index f = 0; f < m; ++f) {
    const Vec3 a = mesh.vertices.row(mesh.triangles(f, 0));
    const Vec3 b = mesh.vertices.row(mesh.triangles(f, 1));
    const Vec3 c = mesh.vertices.row(mesh.triangles(f, 2));
    const Vec3 cr = (b - a).cross(c - a);
    const double two_area = cr.norm();
    mesh.areas[f] = 0.5 * two_area;
    mesh.normals.row(f) = (two_area > 0.0) ? (cr / two_area).eval() : cr;
    mesh.centroids.row(f) = (a + b + c) / 3.0;
  }
  const double mean_area = mesh.areas.mean();
  for (Eigen::Index f = 0; f < m; ++f)
    if (!(mesh.areas[f] > 1e-12 * mean_area))
      throw MeshError("mesh: degenerate triangle");
  if (signed_volume(mesh) <= 0.0)
    throw MeshError("mesh: windings are not outward oriented");
}

TriMesh build_icosphere(int level) {
  if (level < 0 || level > 6)
    throw DomainError("build_icosphere: level must be in [0, 6]");
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> verts = {
      {-1, t, 0},  {1, t, 0},   {-1, -t, 0}, {1, -t, 0},
      {0, -1, t},  {0, 1, t},   {0, -1, -t}, {0, 1, -t},
      {t, 0, -1},  {t, 0, 1},   {-t, 0, -1}, {-t, 0, 1}};
  for (auto& v : verts) v.normalize();
  std::vector<std::array<int, 3>> faces = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

  for (int lev = 0; lev < level; ++lev) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      Vec3 m = (verts[a] + verts[b]).normalized();
      verts.push_back(m);
      const int idx = static_cast<int>(verts.size()) - 1;
      midpoint.emplace(key, idx);
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(faces.size() * 4);
    for (const auto& f : faces) {
      const int m01 = mid(f[0], f[1]);
      const int m12 = mid(f[1], f[2]);
      const int m20 = mid(f[2], f[0]);
      next.push_back({f[0], m01, m20});
      next.push_back({f[1], m12, m01});
      next.push_back({f[2], m20, m12});
      next.push_back({m01, m12, m20});
    }
    faces = std::move(next);
  }

  TriMesh mesh;
  mesh.vertices.resize(static_cast<Eigen::Index>(verts.size()), 3);
  for (size_t i = 0; i < verts.size(); ++i) mesh.vertices.row(i) = verts[i];
  mesh.triangles.resize(static_cast<Eigen::Index>(faces.size()), 3);
  for (size_t i = 0; i < faces.size(); ++i)
    mesh.triangles.row(i) << faces[i][0], faces[i][1], faces[i][2];
  finalize_mesh(mesh);
  return mesh;
}

TriMesh load_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("load_mesh: cannot open " + path.string());
  auto next_line = [&](std::string& line) {
    while (std::getline(in, line)) {
      const auto pos = line.find('#');
      if (pos != std::string::npos) line.erase(pos);
      if (line.find_first_not_of(" \t\r\n") != std::string::npos) return true;
    }
    return false;
  };

  std::string line;
  if (!next_line(line)) throw MeshError("load_mesh: empty file " + path.string());
  {
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag != "OFF")
      throw MeshError("load_mesh: missing OFF header in " + path.string());
    std::string rest;
    if (ss >> rest)
      throw MeshError("load_mesh: unexpected tokens after OFF header");
  }
  if (!next_line(line)) throw MeshError("load_mesh: missing counts line");
  long nv = 0, nf = 0, ne = 0;
  {
    std::istringstream ss(line);
    if (!(ss >> nv >> nf >> ne) || nv <= 0 || nf <= 0)
      throw MeshError("load_mesh: bad counts line");
  }
  TriMesh mesh;
  mesh.vertices.resize(nv, 3);
  for (long i = 0; i < nv; ++i) {
    if (!next_line(line)) throw MeshError("load_mesh: truncated vertex list");
    std::istringstream ss(line);
    double x, y, z;
    if (!(ss >> x >> y >> z)) throw MeshError("load_mesh: bad vertex line");
    mesh.vertices.row(i) << x, y, z;
  }
  mesh.triangles.resize(nf, 3);
  for (long i = 0; i < nf; ++i) {
    if (!next_line(line)) throw MeshError("load_mesh: truncated face list");
    std::istringstream ss(line);
    int cnt, a, b, c;
    if (!(ss >> cnt >> a >> b >> c) || cnt != 3)
      throw MeshError("load_mesh: only triangular faces are supported");
    mesh.triangles.row(i) << a, b, c;
  }

  check_topology(mesh);
  if (signed_volume(mesh) < 0.0) {
    mesh.triangles.col(1).swap(mesh.triangles.col(2));
    mesh.flipped_on_load = true;
  }
  finalize_mesh(mesh);
  return mesh;
}

void save_mesh(const TriMesh& mesh, const std::filesystem::path& path) {
  std::FILE* f = std::fopen(path.string().c_str(), "wb");
  if (!f) throw Error("save_mesh: cannot open " + path.string());
  std::fprintf(f, "OFF\n%lld %lld 0\n",
               static_cast<long long>(mesh.vertices.rows()),
               static_cast<long long>(mesh.n()));
  for (Eigen::Index i = 0; i < mesh.vertices.rows(); ++i)
    std::fprintf(f, "%.17g %.17g %.17g\n", mesh.vertices(i, 0),
                 mesh.vertices(i, 1), mesh.vertices(i, 2));
  for (Eigen::Index i = 0; i < mesh.n(); ++i)
    std::fprintf(f, "3 %d %d %d\n", mesh.triangles(i, 0),
                 mesh.triangles(i, 1), mesh.triangles(i, 2));
  if (std::fclose(f) != 0) throw Error("save_mesh: write failure");
}

}  // namespace nlpbem::bem
