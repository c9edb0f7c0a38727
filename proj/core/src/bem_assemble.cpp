/** \file bem_assemble.cpp */
#include "nlpbem/bem_assemble.hpp"

#include <array>
#include <cmath>
#include <vector>

#include "nlpbem/errors.hpp"

namespace nlpbem::bem {

namespace {

using Vec3 = Eigen::RowVector3d;
constexpr cplx kI{0.0, 1.0};
constexpr double kFourPi = 4.0 * M_PI;

// Barycentric coordinates of the degree-2 rule (edge midpoints, equal
// weights A/3).
const std::array<Vec3, 3>& midpoint_bary() {
  static const std::array<Vec3, 3> table = {
      Vec3(0.5, 0.5, 0.0), Vec3(0.0, 0.5, 0.5), Vec3(0.5, 0.0, 0.5)};
  return table;
}

// Centroids of three levels of uniform 4-way subdivision (64 congruent
// subtriangles, equal weights A/64) for nearly singular integrands.
const std::vector<Vec3>& subdivision_bary() {
  static const std::vector<Vec3> table = [] {
    struct T {
      Vec3 a, b, c;
    };
    std::vector<T> tris = {{Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)}};
    for (int lev = 0; lev < 3; ++lev) {
      std::vector<T> next;
      next.reserve(tris.size() * 4);
      for (const auto& t : tris) {
        const Vec3 ab = 0.5 * (t.a + t.b), bc = 0.5 * (t.b + t.c),
                   ca = 0.5 * (t.c + t.a);
        next.push_back({t.a, ab, ca});
        next.push_back({t.b, bc, ab});
        next.push_back({t.c, ca, bc});
        next.push_back({ab, bc, ca});
      }
      tris = std::move(next);
    }
    std::vector<Vec3> out;
    out.reserve(tris.size());
    for (const auto& t : tris) out.push_back((t.a + t.b + t.c) / 3.0);
    return out;
  }();
  return table;
}

struct TriangleNodes {
  std::vector<Vec3> far;    // 3 nodes, weight area/3
  std::vector<Vec3> fine;   // 64 nodes, weight area/64
};

std::vector<TriangleNodes> precompute_nodes(const TriMesh& mesh) {
  std::vector<TriangleNodes> nodes(static_cast<size_t>(mesh.n()));
  const auto& mb = midpoint_bary();
  const auto& sb = subdivision_bary();
  for (Eigen::Index f = 0; f < mesh.n(); ++f) {
    const Vec3 a = mesh.vertices.row(mesh.triangles(f, 0));
    const Vec3 b = mesh.vertices.row(mesh.triangles(f, 1));
    const Vec3 c = mesh.vertices.row(mesh.triangles(f, 2));
    auto& tn = nodes[static_cast<size_t>(f)];
    tn.far.reserve(mb.size());
    for (const auto& w : mb) tn.far.push_back(w[0] * a + w[1] * b + w[2] * c);
    tn.fine.reserve(sb.size());
    for (const auto& w : sb) tn.fine.push_back(w[0] * a + w[1] * b + w[2] * c);
  }
  return nodes;
}

// Adjacency: triangles sharing at least one vertex need the fine rule.
std::vector<std::vector<int>> vertex_incidence(const TriMesh& mesh) {
  std::vector<std::vector<int>> inc(static_cast<size_t>(mesh.vertices.rows()));
  for (Eigen::Index f = 0; f < mesh.n(); ++f)
    for (int e = 0; e < 3; ++e)
      inc[static_cast<size_t>(mesh.triangles(f, e))].push_back(
          static_cast<int>(f));
  return inc;
}

// Exact integral of 1/|x - y| over a planar triangle from its own centroid:
// sum over edges of d * (asinh(b/d) - asinh(a/d)) with d the in-plane
// distance from the centroid to the edge line and a, b the signed endpoint
// abscissae along the edge measured from the foot of the perpendicular.
double self_inverse_distance_integral(const Vec3& a, const Vec3& b,
                                      const Vec3& c) {
  const Vec3 ctr = (a + b + c) / 3.0;
  const Vec3 v[3] = {a, b, c};
  double total = 0.0;
  for (int e = 0; e < 3; ++e) {
    const Vec3 p = v[e], q = v[(e + 1) % 3];
    const Vec3 u = (q - p).normalized();
    const Vec3 foot = p + ((ctr - p).dot(u)) * u;
    const double d = (ctr - foot).norm();
    if (d <= 0.0) continue;
    const double sa = (p - foot).dot(u);
    const double sb = (q - foot).dot(u);
    total += d * (std::asinh(sb / d) - std::asinh(sa / d));
  }
  return total;
}

struct SmoothVals {
  cplx G1;    // regular remainder of the single-layer kernel, / k^2
  cplx G1p;   // its radial derivative
  cplx dG1;   // d/dk of G1
  cplx dG1p;  // d/dk of G1p
};

// Bounded kernels:
//   G1(r)  = -(E - 1 - ikr) / (4 pi k^2 r),          E = exp(ikr)
//   G1p(r) = -(E (ikr - 1) + 1) / (4 pi k^2 r^2)
// with convergent series used when |kr| is small enough for the closed
// forms to cancel.
SmoothVals smooth_gamma(cplx k, double r, bool with_d) {
  SmoothVals out;
  const cplx kr = k * r;
  if (std::abs(kr) < 1e-2) {
    const cplx q = kI * k;
    // factorial-damped power series; 8 terms reach machine precision here
    cplx g1 = 0, g1p = 0, dg1 = 0, dg1p = 0;
    cplx qpow = 1.0;       // q^m
    cplx qpow_prev = 0.0;  // q^(m-1)
    double rpow = 1.0;     // r^m
    double fact = 2.0;     // (m+2)!
    for (int m = 0; m <= 8; ++m) {
      g1 += qpow * rpow * r / fact;
      g1p += double(m + 1) * qpow * rpow / fact;
      if (with_d && m >= 1) {
        dg1 += double(m) * qpow_prev * rpow * r / fact;
        dg1p += double(m) * double(m + 1) * qpow_prev * rpow / fact;
      }
      qpow_prev = qpow;
      qpow *= q;
      rpow *= r;
      fact *= (m + 3);
    }
    out.G1 = g1 / kFourPi;
    out.G1p = g1p / kFourPi;
    out.dG1 = kI * dg1 / kFourPi;
    out.dG1p = kI * dg1p / kFourPi;
    return out;
  }
  const cplx E = std::exp(kI * kr);
  const cplx k2 = k * k, k3 = k2 * k;
  out.G1 = -(E - 1.0 - kI * kr) / (kFourPi * k2 * r);
  out.G1p = -(E * (kI * kr - 1.0) + 1.0) / (kFourPi * k2 * r * r);
  if (with_d) {
    out.dG1 = -kI * (E - 1.0) / (kFourPi * k2) +
              (E - 1.0 - kI * kr) / (2.0 * M_PI * k3 * r);
    out.dG1p = E / (kFourPi * k) +
               (E * (kI * kr - 1.0) + 1.0) / (2.0 * M_PI * k3 * r * r);
  }
  return out;
}

}  // namespace

StaticOperators assemble_static(const TriMesh& mesh) {
  const Eigen::Index n = mesh.n();
  if (n == 0) throw AssemblyError("assemble_static: empty mesh");
  StaticOperators ops;
  ops.S.resize(n, n);
  ops.Kstar.resize(n, n);
  const auto nodes = precompute_nodes(mesh);
  const auto inc = vertex_incidence(mesh);

  std::vector<char> near_flag(static_cast<size_t>(n), 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    std::vector<int> near_list;
    for (int e = 0; e < 3; ++e)
      for (int t : inc[static_cast<size_t>(mesh.triangles(i, e))])
        if (!near_flag[static_cast<size_t>(t)]) {
          near_flag[static_cast<size_t>(t)] = 1;
          near_list.push_back(t);
        }

    const Vec3 xi = mesh.centroids.row(i);
    const Vec3 nu = mesh.normals.row(i);
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;  // diagonal handled below
      const auto& tn = nodes[static_cast<size_t>(j)];
      const bool fine = near_flag[static_cast<size_t>(j)] != 0;
      const auto& pts = fine ? tn.fine : tn.far;
      const double w = mesh.areas[j] / static_cast<double>(pts.size());
      double s = 0.0, ks = 0.0;
      for (const auto& y : pts) {
        const Vec3 dvec = xi - y;
        const double r = dvec.norm();
        s += 1.0 / r;
        ks += nu.dot(dvec) / (r * r * r);
      }
      ops.S(i, j) = -w * s / kFourPi;
      ops.Kstar(i, j) = w * ks / kFourPi;
    }
    {
      const Vec3 a = mesh.vertices.row(mesh.triangles(i, 0));
      const Vec3 b = mesh.vertices.row(mesh.triangles(i, 1));
      const Vec3 c = mesh.vertices.row(mesh.triangles(i, 2));
      ops.S(i, i) = -self_inverse_distance_integral(a, b, c) / kFourPi;
    }
    // Diagonal of K*: enforce the exact constant-density identity
    // K*[1] = 1/2 row by row.
    double row = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i) row += ops.Kstar(i, j);
    ops.Kstar(i, i) = 0.5 - row;

    for (int t : near_list) near_flag[static_cast<size_t>(t)] = 0;
  }
  return ops;
}

SmoothBlocks assemble_smooth(const TriMesh& mesh, cplx k,
                             bool with_derivatives) {
  const Eigen::Index n = mesh.n();
  if (n == 0) throw AssemblyError("assemble_smooth: empty mesh");
  SmoothBlocks blocks;
  blocks.S1.resize(n, n);
  blocks.K1.resize(n, n);
  if (with_derivatives) {
    blocks.dS1.resize(n, n);
    blocks.dK1.resize(n, n);
  }
  const auto nodes = precompute_nodes(mesh);
  const auto inc = vertex_incidence(mesh);

  std::vector<char> near_flag(static_cast<size_t>(n), 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    std::vector<int> near_list;
    for (int e = 0; e < 3; ++e)
      for (int t : inc[static_cast<size_t>(mesh.triangles(i, e))])
        if (!near_flag[static_cast<size_t>(t)]) {
          near_flag[static_cast<size_t>(t)] = 1;
          near_list.push_back(t);
        }

    const Vec3 xi = mesh.centroids.row(i);
    const Vec3 nu = mesh.normals.row(i);
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto& tn = nodes[static_cast<size_t>(j)];
      const bool fine = near_flag[static_cast<size_t>(j)] != 0 || j == i;
      const auto& pts = fine ? tn.fine : tn.far;
      const double w = mesh.areas[j] / static_cast<double>(pts.size());
      cplx s1 = 0, k1 = 0, ds1 = 0, dk1 = 0;
      const bool normal_term = (j != i);  // nu.(x-y) = 0 on the own plane
      for (const auto& y : pts) {
        const Vec3 dvec = xi - y;
        const double r = dvec.norm();
        const SmoothVals g = smooth_gamma(k, r, with_derivatives);
        s1 += g.G1;
        ds1 += g.dG1;
        if (normal_term) {
          const double proj = nu.dot(dvec) / r;
          k1 += g.G1p * proj;
          dk1 += g.dG1p * proj;
        }
      }
      blocks.S1(i, j) = w * s1;
      blocks.K1(i, j) = w * k1;
      if (with_derivatives) {
        blocks.dS1(i, j) = w * ds1;
        blocks.dK1(i, j) = w * dk1;
      }
    }
    for (int t : near_list) near_flag[static_cast<size_t>(t)] = 0;
  }
  return blocks;
}

HelmholtzOperators assemble_helmholtz(const TriMesh& mesh, cplx k) {
  const StaticOperators st = assemble_static(mesh);
  const SmoothBlocks sm = assemble_smooth(mesh, k, false);
  HelmholtzOperators out;
  const Eigen::Index n = mesh.n();
  const Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(n);
  const Eigen::RowVectorXcd wrow = mesh.areas.transpose().cast<cplx>();
  out.Sk = st.S.cast<cplx>() - (kI * k / kFourPi) * (ones * wrow) +
           k * k * sm.S1;
  out.Kstar_k = st.Kstar.cast<cplx>() + k * k * sm.K1;
  return out;
}

Eigen::VectorXcd eval_single_layer(
    const TriMesh& mesh, cplx k, const Eigen::VectorXcd& density,
    const Eigen::Matrix<double, Eigen::Dynamic, 3>& points) {
  if (density.size() != mesh.n())
    throw DomainError("eval_single_layer: density size mismatch");
  const auto nodes = precompute_nodes(mesh);
  // Longest-edge diameters decide when the fine rule is needed.
  Eigen::VectorXd diam(mesh.n());
  for (Eigen::Index f = 0; f < mesh.n(); ++f) {
    const Vec3 a = mesh.vertices.row(mesh.triangles(f, 0));
    const Vec3 b = mesh.vertices.row(mesh.triangles(f, 1));
    const Vec3 c = mesh.vertices.row(mesh.triangles(f, 2));
    diam[f] = std::max({(a - b).norm(), (b - c).norm(), (c - a).norm()});
  }
  Eigen::VectorXcd out(points.rows());
  for (Eigen::Index p = 0; p < points.rows(); ++p) {
    const Vec3 x = points.row(p);
    cplx acc = 0;
    for (Eigen::Index j = 0; j < mesh.n(); ++j) {
      const auto& tn = nodes[static_cast<size_t>(j)];
      const bool fine = (x - Vec3(mesh.centroids.row(j))).norm() <
                        3.0 * diam[j];
      const auto& pts = fine ? tn.fine : tn.far;
      const double w = mesh.areas[j] / static_cast<double>(pts.size());
      cplx s = 0;
      for (const auto& y : pts) {
        const double r = (x - y).norm();
        s += -std::exp(kI * k * r) / (kFourPi * r);
      }
      acc += w * s * density[j];
    }
    out[p] = acc;
  }
  return out;
}

}  // namespace nlpbem::bem
