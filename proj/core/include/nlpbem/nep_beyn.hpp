/** \file nep_beyn.hpp
 *  Contour-integral nonlinear eigensolver on an abstract operator pencil.
 */
#pragma once

#include <Eigen/Core>
#include <complex>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace nlpbem::nep {

using cplx = std::complex<double>;

/** Matrix-valued analytic function T(z) with an inner-product weight.
 *  Eigenvector pairings use the weighted bilinear form
 *  <u, v> = sum_i w_i u_i v_i (no conjugation). */
class PencilOperator {
 public:
  virtual ~PencilOperator() = default;
  virtual Eigen::Index size() const = 0;
  virtual Eigen::MatrixXcd T(cplx z) const = 0;
  virtual Eigen::MatrixXcd dT(cplx z) const = 0;
  /** One call producing both; override when a shared assembly is cheaper. */
  virtual void T_and_dT(cplx z, Eigen::MatrixXcd& t, Eigen::MatrixXcd& dt) const {
    t = T(z);
    dt = dT(z);
  }
  virtual Eigen::VectorXd weights() const {
    return Eigen::VectorXd::Ones(size());
  }
};

/** Pencil given by an explicit diagonal: entry d owns value(z, d) with its
 *  derivative; used for separable geometries where the pencil decouples. */
class DiagonalPencil : public PencilOperator {
 public:
  using Fn = cplx (*)(int label, cplx z, double h);
  DiagonalPencil(std::vector<int> labels, double h, Fn value, Fn derivative)
      : labels_(std::move(labels)), h_(h), value_(value), derivative_(derivative) {}
  Eigen::Index size() const override {
    return static_cast<Eigen::Index>(labels_.size());
  }
  Eigen::MatrixXcd T(cplx z) const override;
  Eigen::MatrixXcd dT(cplx z) const override;
  const std::vector<int>& labels() const { return labels_; }

 private:
  std::vector<int> labels_;
  double h_;
  Fn value_;
  Fn derivative_;
};

/** Dense pencil built from caller-supplied callables (test harnesses). */
class MatrixPencil : public PencilOperator {
 public:
  using Fn = std::function<Eigen::MatrixXcd(cplx)>;
  MatrixPencil(Eigen::Index n, Fn t, Fn dt)
      : n_(n), t_(std::move(t)), dt_(std::move(dt)) {}
  Eigen::Index size() const override { return n_; }
  Eigen::MatrixXcd T(cplx z) const override { return t_(z); }
  Eigen::MatrixXcd dT(cplx z) const override { return dt_(z); }

 private:
  Eigen::Index n_;
  Fn t_;
  Fn dt_;
};

struct ContourRect {
  double re_lo = 0.0, re_hi = 0.0;
  double im_lo = 0.0, im_hi = 0.0;
  bool contains(cplx z) const {
    return z.real() > re_lo && z.real() < re_hi && z.imag() > im_lo &&
           z.imag() < im_hi;
  }
  double diameter() const {
    return std::max(re_hi - re_lo, im_hi - im_lo);
  }
};

struct BeynParams {
  int n_quad = 32;          // trapezoid nodes on the contour (>= 32)
  double rank_tol = 1e-8;   // singular-value cutoff relative to sigma_max
  int probe_cols = 8;       // columns of the random probe block
  std::uint64_t seed = 20240901ull;
  double dedup_tol = 1e-6;  // candidate clustering radius
  double newton_tol = 1e-11;
  int newton_max_iter = 50;
  double axis_tol = 1e-6;   // pole classification band around the axes
  bool check_quadrature = false;  // re-run at doubled n_quad and compare
  double quadrature_tol = 1e-6;
};

enum class PoleKind { Surface, Bulk, Scattering, Artifact };

struct Pole {
  cplx z;
  int degeneracy = 1;
  bool simple = true;
  PoleKind kind = PoleKind::Artifact;
  Eigen::MatrixXcd right;  // size x degeneracy, columns are eigenvectors
  Eigen::MatrixXcd left;   // size x degeneracy, normalized so that
                           // <left_i, dT(z) right_m> = delta_im
  double residual = 0.0;   // ||T(z) right|| / scale at return
};

std::vector<Pole> beyn_solve(const PencilOperator& op, const ContourRect& contour,
                             const BeynParams& params = {});

PoleKind classify_pole(cplx z, double axis_tol);

}  // namespace nlpbem::nep
