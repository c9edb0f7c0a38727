/** \file nep_beyn.cpp */
#include "nlpbem/nep_beyn.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <random>
#include <utility>

#include "nlpbem/errors.hpp"
#include "nlpbem/lapack.hpp"

namespace nlpbem::nep {

namespace {

constexpr cplx kI{0.0, 1.0};

struct Node {
  cplx z;
  cplx w;       // trapezoid weight at the working resolution
  cplx w_half;  // weight on the embedded half-resolution grid (0 if absent)
};

// Composite trapezoid nodes on the rectangle perimeter, nodes per side
// proportional to side length and rounded to even counts so that every other
// node forms a valid half-resolution trapezoid rule of the same contour.
// Corner weights are shared by both adjacent sides.
std::vector<Node> contour_nodes(const ContourRect& c, int n_quad) {
  if (!(c.re_hi > c.re_lo) || !(c.im_hi > c.im_lo))
    throw DomainError("beyn_solve: empty contour rectangle");
  const cplx corner[4] = {cplx(c.re_lo, c.im_lo), cplx(c.re_hi, c.im_lo),
                          cplx(c.re_hi, c.im_hi), cplx(c.re_lo, c.im_hi)};
  const double wlen = c.re_hi - c.re_lo, hlen = c.im_hi - c.im_lo;
  const double len[4] = {wlen, hlen, wlen, hlen};
  const double perim = 2.0 * (wlen + hlen);
  int ns[4];
  for (int s = 0; s < 4; ++s) {
    const long half = std::max(1ll, std::llround(0.5 * n_quad * len[s] / perim));
    ns[s] = static_cast<int>(2 * half);
  }
  cplx step[4];
  for (int s = 0; s < 4; ++s)
    step[s] = (corner[(s + 1) % 4] - corner[s]) / double(ns[s]);

  std::vector<Node> nodes;
  for (int s = 0; s < 4; ++s) {
    const int prev = (s + 3) % 4;
    nodes.push_back({corner[s], 0.5 * (step[s] + step[prev]),
                     step[s] + step[prev]});
    for (int j = 1; j < ns[s]; ++j)
      nodes.push_back({corner[s] + double(j) * step[s], step[s],
                       (j % 2 == 0) ? 2.0 * step[s] : cplx(0.0)});
  }
  return nodes;
}

Eigen::MatrixXcd deterministic_probe(Eigen::Index n, Eigen::Index p,
                                     std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  auto u = [&gen]() {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;  // [0, 1)
  };
  Eigen::MatrixXcd V(n, p);
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      V(i, j) = cplx(2.0 * u() - 1.0, 2.0 * u() - 1.0);
  return V;
}

struct Moments {
  Eigen::MatrixXcd A0, A1;
  double noise = 0.0;   // || A0 - A0_halfgrid ||: quadrature-error scale
  double tnorm = 0.0;   // max over nodes of ||T(z)||: pencil magnitude scale
};

Moments accumulate_moments(const PencilOperator& op, const ContourRect& contour,
                           int n_quad, const Eigen::MatrixXcd& V) {
  const Eigen::Index n = op.size();
  const Eigen::Index p = V.cols();
  Moments m;
  m.A0 = Eigen::MatrixXcd::Zero(n, p);
  m.A1 = Eigen::MatrixXcd::Zero(n, p);
  Eigen::MatrixXcd A0h = Eigen::MatrixXcd::Zero(n, p);
  for (const auto& node : contour_nodes(contour, n_quad)) {
    Eigen::MatrixXcd Y;
    try {
      Eigen::MatrixXcd Tz = op.T(node.z);
      m.tnorm = std::max(m.tnorm, Tz.norm());
      la::ComplexLU lu(std::move(Tz));
      Y = lu.solve(V);
    } catch (const AssemblyError&) {
      throw ContourError("beyn_solve: pencil singular on the contour");
    }
    const cplx cw = node.w / (2.0 * M_PI * kI);
    m.A0.noalias() += cw * Y;
    m.A1.noalias() += (cw * node.z) * Y;
    if (node.w_half != cplx(0.0))
      A0h.noalias() += (node.w_half / (2.0 * M_PI * kI)) * Y;
  }
  m.noise = (m.A0 - A0h).norm();
  return m;
}

struct Candidate {
  cplx z;
  Eigen::VectorXcd vec;
  double residual = 0.0;
};

struct MomentResult {
  std::vector<Candidate> inside;
  bool ambiguous = false;   // rank not certifiable at this probe width
  bool any_signal = false;  // moments rise above the quadrature noise
  double tnorm = 0.0;
  double ratio = 0.0;       // sigma_max(A0) / quadrature-noise estimate
};

double residual_of(const PencilOperator& op, cplx z,
                   const Eigen::VectorXcd& vec, double tnorm) {
  const Eigen::MatrixXcd Tz = op.T(z);
  const double scale = std::max({Tz.norm(), 1e-3 * tnorm, 1e-300});
  return (Tz * vec).norm() / scale;
}

// One Beyn pass: contour moments, noise-aware rank reveal, small eigenproblem.
MomentResult moment_pass(const PencilOperator& op, const ContourRect& contour,
                         const BeynParams& params, Eigen::Index p,
                         int n_quad) {
  const Eigen::Index n = op.size();
  const Eigen::MatrixXcd V = deterministic_probe(n, p, params.seed);
  const Moments mom = accumulate_moments(op, contour, n_quad, V);

  MomentResult out;
  out.tnorm = mom.tnorm;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(
      mom.A0, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd sv = svd.singularValues();
  out.ratio = sv[0] / std::max(mom.noise, 1e-300);
  // The half-grid comparison bounds the trapezoid error of A0; moments at or
  // below that level are indistinguishable from an empty contour.
  out.any_signal = sv[0] > 3.0 * mom.noise && sv[0] > 0.0;
  if (!out.any_signal) return out;

  const double floor = std::max(params.rank_tol * sv[0], mom.noise);
  Eigen::Index r = 0;
  while (r < p && sv[r] > floor) ++r;
  if (r == 0) {
    out.any_signal = false;
    return out;
  }
  const bool saturated = (r == p);
  const bool gap_ok =
      !saturated && sv[r - 1] >= 10.0 * std::max(sv[r], 1e-300);
  out.ambiguous = saturated || !gap_ok;

  const Eigen::MatrixXcd Ur = svd.matrixU().leftCols(r);
  const Eigen::MatrixXcd Wr = svd.matrixV().leftCols(r);
  const Eigen::VectorXd sr = sv.head(r);
  Eigen::MatrixXcd Bmat = Ur.adjoint() * mom.A1 * Wr;
  for (Eigen::Index j = 0; j < r; ++j) Bmat.col(j) /= sr[j];

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> eig(Bmat);
  if (eig.info() != Eigen::Success)
    throw Error("beyn_solve: dense eigensolver failed on the reduced block");

  for (Eigen::Index j = 0; j < r; ++j) {
    const cplx z = eig.eigenvalues()[j];
    if (!contour.contains(z)) continue;
    Candidate cand;
    cand.z = z;
    cand.vec = Ur * eig.eigenvectors().col(j);
    cand.vec /= cand.vec.norm();
    cand.residual = residual_of(op, z, cand.vec, mom.tnorm);
    out.inside.push_back(std::move(cand));
  }
  return out;
}

struct Cluster {
  cplx z_mean;
  std::vector<Candidate> members;
  double best_residual = 1e300;
};

std::vector<Cluster> cluster_candidates(std::vector<Candidate> cands,
                                        double tol) {
  std::sort(cands.begin(), cands.end(), [](const auto& a, const auto& b) {
    return std::make_pair(a.z.real(), a.z.imag()) <
           std::make_pair(b.z.real(), b.z.imag());
  });
  std::vector<Cluster> clusters;
  for (auto& c : cands) {
    Cluster* home = nullptr;
    for (auto& cl : clusters)
      if (std::abs(cl.z_mean - c.z) <= tol) {
        home = &cl;
        break;
      }
    if (!home) {
      clusters.push_back({});
      home = &clusters.back();
      home->z_mean = c.z;
    }
    home->best_residual = std::min(home->best_residual, c.residual);
    home->members.push_back(std::move(c));
    cplx acc = 0;
    for (const auto& m : home->members) acc += m.z;
    home->z_mean = acc / double(home->members.size());
  }
  return clusters;
}

// Bordered Newton correction of a candidate; returns the polished z.  The
// border vector is the initial eigenvector approximation.
cplx polish_root(const PencilOperator& op, cplx z0,
                 const Eigen::VectorXcd& psi0, const BeynParams& params) {
  const Eigen::Index n = op.size();
  Eigen::VectorXcd psi = psi0;
  cplx z = z0;
  for (int it = 0; it < params.newton_max_iter; ++it) {
    Eigen::MatrixXcd T, dT;
    op.T_and_dT(z, T, dT);
    Eigen::MatrixXcd J(n + 1, n + 1);
    J.topLeftCorner(n, n) = T;
    J.topRightCorner(n, 1) = dT * psi;
    J.bottomLeftCorner(1, n) = psi0.adjoint();
    J(n, n) = 0.0;
    Eigen::VectorXcd F(n + 1);
    F.head(n) = T * psi;
    F[n] = psi0.dot(psi) - 1.0;
    Eigen::VectorXcd delta;
    try {
      la::ComplexLU lu(std::move(J));
      delta = lu.solve((-F).eval());
    } catch (const AssemblyError&) {
      throw NonConvergenceError(
          "beyn_solve: bordered correction became singular", z);
    }
    psi += delta.head(n);
    z += delta[n];
    if (std::abs(delta[n]) <= params.newton_tol * std::max(1.0, std::abs(z)))
      return z;
  }
  throw NonConvergenceError("beyn_solve: root correction did not converge", z);
}

Eigen::MatrixXcd thin_q(const Eigen::MatrixXcd& A) {
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(A);
  return qr.householderQ() *
         Eigen::MatrixXcd::Identity(A.rows(), A.cols());
}

}  // namespace

Eigen::MatrixXcd DiagonalPencil::T(cplx z) const {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(size(), size());
  for (Eigen::Index i = 0; i < size(); ++i)
    out(i, i) = value_(labels_[static_cast<size_t>(i)], z, h_);
  return out;
}

Eigen::MatrixXcd DiagonalPencil::dT(cplx z) const {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(size(), size());
  for (Eigen::Index i = 0; i < size(); ++i)
    out(i, i) = derivative_(labels_[static_cast<size_t>(i)], z, h_);
  return out;
}

PoleKind classify_pole(cplx z, double axis_tol) {
  if (std::abs(z.real()) <= axis_tol && z.imag() > axis_tol)
    return PoleKind::Surface;
  if (std::abs(z.imag()) <= axis_tol && z.real() > axis_tol)
    return PoleKind::Bulk;
  if (z.imag() < -axis_tol) return PoleKind::Scattering;
  return PoleKind::Artifact;
}

std::vector<Pole> beyn_solve(const PencilOperator& op,
                             const ContourRect& contour,
                             const BeynParams& params) {
  if (params.n_quad < 32)
    throw DomainError("beyn_solve: n_quad must be at least 32");
  if (params.probe_cols < 1)
    throw DomainError("beyn_solve: probe_cols must be positive");
  const Eigen::Index n = op.size();
  const Eigen::Index p = std::min<Eigen::Index>(params.probe_cols, n);

  if (params.check_quadrature) {
    const Eigen::MatrixXcd V = deterministic_probe(n, p, params.seed);
    const Moments coarse = accumulate_moments(op, contour, params.n_quad, V);
    const Moments fine = accumulate_moments(op, contour, 2 * params.n_quad, V);
    const double ref = std::max(fine.A0.norm(), 1e-300);
    if ((fine.A0 - coarse.A0).norm() / ref > params.quadrature_tol)
      throw ContourError(
          "beyn_solve: moments not converged under quadrature doubling; a "
          "pole is too close to the contour");
  }

  // Trapezoid moments on a rectangle lose accuracy when a pole sits within a
  // few node spacings of a side; refine the node count until the moments rise
  // well clear of their own half-grid error estimate (or the budget is spent,
  // after which the noise gate below has the final say).
  constexpr int kMaxQuad = 2048;
  int nq = params.n_quad;
  MomentResult mr = moment_pass(op, contour, params, p, nq);
  while (mr.ratio < 30.0 && 2 * nq <= kMaxQuad) {
    nq *= 2;
    mr = moment_pass(op, contour, params, p, nq);
  }
  if (!mr.any_signal) return {};
  if (mr.ambiguous && p < n) {
    const Eigen::Index p2 = std::min<Eigen::Index>(2 * p, n);
    MomentResult retry = moment_pass(op, contour, params, p2, nq);
    if (!retry.any_signal) return {};
    if (retry.ambiguous && p2 < n)
      throw RankAmbiguityError(
          "beyn_solve: no clear singular-value gap at doubled probe width; "
          "the contour may enclose more poles than probe columns");
    mr = std::move(retry);
  }

  // Skip polishing only for clear artifacts (residual at the pencil scale);
  // everything plausible is polished and judged by where Newton lands.
  std::vector<Candidate> kept;
  for (auto& c : mr.inside)
    if (c.residual < 0.5) kept.push_back(std::move(c));
  if (kept.empty()) return {};

  std::vector<Candidate> polished;
  for (auto& c : kept) {
    cplx z_star;
    try {
      z_star = polish_root(op, c.z, c.vec, params);
    } catch (const NonConvergenceError&) {
      if (c.residual < 1e-6) throw;  // a well-resolved pole failed to polish
      continue;                      // marginal artifact: drop
    }
    if (!contour.contains(z_star)) continue;  // walked out: not ours
    c.z = z_star;
    polished.push_back(std::move(c));
  }
  if (polished.empty()) return {};

  // Degenerate poles arrive as one candidate per eigenvector direction, all
  // landing on the same polished root: cluster after polishing.
  const auto clusters = cluster_candidates(std::move(polished), params.dedup_tol);
  const Eigen::VectorXd w = op.weights();

  std::vector<Pole> poles;
  for (const auto& cl : clusters) {
    const int m = static_cast<int>(cl.members.size());
    const cplx z_star = cl.z_mean;

    // Vector refresh by inverse iteration on one factorization at z_star
    // (and its transpose for the left block), then re-orthogonalization.
    Eigen::MatrixXcd T, dT;
    op.T_and_dT(z_star, T, dT);
    Eigen::MatrixXcd R0(n, m), L0(n, m);
    for (int j = 0; j < m; ++j)
      R0.col(j) = cl.members[static_cast<size_t>(j)].vec;
    L0 = deterministic_probe(n, m, params.seed ^ 0x9e3779b97f4a7c15ull);
    Eigen::MatrixXcd R, L;
    try {
      la::ComplexLU lu(T);
      R = thin_q(lu.solve(R0));
      R = thin_q(lu.solve(R));
      L = thin_q(lu.solve_transposed(L0));
      L = thin_q(lu.solve_transposed(L));
    } catch (const AssemblyError&) {
      // Exactly singular: nudge off the root by one part in 1e12.
      const cplx z_eps = z_star + 1e-12 * std::max(1.0, std::abs(z_star));
      la::ComplexLU lu(op.T(z_eps));
      R = thin_q(lu.solve(R0));
      L = thin_q(lu.solve_transposed(L0));
    }

    // Bilinear pairing against dT decides simplicity and fixes the
    // normalization <left_i, dT right_j> = delta_ij.
    const Eigen::MatrixXcd dTR = dT * R;
    const Eigen::MatrixXcd G = L.transpose() * dTR;
    Eigen::JacobiSVD<Eigen::MatrixXcd> gsvd(G);
    const double smin = gsvd.singularValues().minCoeff();
    const double smax = gsvd.singularValues().maxCoeff();
    const bool simple = smax > 0.0 && smin >= 1e-10 * smax;

    Pole pole;
    pole.z = z_star;
    pole.degeneracy = m;
    pole.simple = simple;
    pole.kind = classify_pole(z_star, params.axis_tol);
    pole.right = R;
    Eigen::MatrixXcd Lphys = w.cwiseInverse().asDiagonal() * L;
    if (simple) {
      const Eigen::MatrixXcd Gt = G.transpose();
      Lphys = Lphys * Gt.partialPivLu().solve(
                          Eigen::MatrixXcd::Identity(m, m));
    }
    pole.left = Lphys;
    pole.residual =
        (T * R).norm() / std::max({T.norm(), 1e-3 * mr.tnorm, 1e-300});
    poles.push_back(std::move(pole));
  }

  // Order by (Re, Im) with the real part bucketed at 1e-12 so that roots
  // sitting on the imaginary axis (real part = rounding noise) tie on Re and
  // order by Im instead of by the noise.
  std::sort(poles.begin(), poles.end(), [](const Pole& a, const Pole& b) {
    const long long qa = std::llround(a.z.real() / 1e-12);
    const long long qb = std::llround(b.z.real() / 1e-12);
    return std::make_pair(qa, a.z.imag()) < std::make_pair(qb, b.z.imag());
  });
  return poles;
}

}  // namespace nlpbem::nep
