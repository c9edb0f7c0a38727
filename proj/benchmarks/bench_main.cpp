// Microbenchmarks for the dense hot paths: operator assembly, dispersion
// evaluation, pencil evaluation, and the factorization behind each contour
// node of the eigensolver.
#include <benchmark/benchmark.h>

#include <complex>
#include <memory>

#include "nlpbem/bem_assemble.hpp"
#include "nlpbem/bem_pencil.hpp"
#include "nlpbem/lapack.hpp"
#include "nlpbem/mesh.hpp"
#include "nlpbem/sphere_oracle.hpp"

namespace bem = nlpbem::bem;
namespace sph = nlpbem::sphere;
using cplx = std::complex<double>;

static void BM_AssembleStatic(benchmark::State& state) {
  auto mesh = bem::build_icosphere(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto ops = bem::assemble_static(mesh);
    benchmark::DoNotOptimize(ops.S.data());
  }
  state.SetComplexityN(mesh.n());
}
BENCHMARK(BM_AssembleStatic)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

static void BM_AssembleHelmholtz(benchmark::State& state) {
  auto mesh = bem::build_icosphere(static_cast<int>(state.range(0)));
  const cplx k(0.0, 16.0);
  for (auto _ : state) {
    auto ops = bem::assemble_helmholtz(mesh, k);
    benchmark::DoNotOptimize(ops.Sk.data());
  }
}
BENCHMARK(BM_AssembleHelmholtz)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

static void BM_DispersionEval(benchmark::State& state) {
  const int ell = static_cast<int>(state.range(0));
  const cplx z(0.0, 0.8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sph::lambda_ell(ell, z, 0.02));
  }
}
BENCHMARK(BM_DispersionEval)->Arg(1)->Arg(10)->Arg(100);

static void BM_DispersionRoots(benchmark::State& state) {
  const int ell = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto roots = sph::dispersion_roots(ell, 0.02);
    benchmark::DoNotOptimize(roots.data());
  }
}
BENCHMARK(BM_DispersionRoots)->Arg(1)->Arg(8)->Unit(benchmark::kMicrosecond);

static void BM_PencilEval(benchmark::State& state) {
  auto mesh = bem::build_icosphere(static_cast<int>(state.range(0)));
  bem::PencilEvaluator ev(mesh, 0.05);
  const cplx z(0.01, 0.82);
  for (auto _ : state) {
    auto t = ev.lambda_tilde(z);
    benchmark::DoNotOptimize(t.data());
  }
}
BENCHMARK(BM_PencilEval)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

static void BM_ContourNodeSolve(benchmark::State& state) {
  auto mesh = bem::build_icosphere(static_cast<int>(state.range(0)));
  bem::PencilEvaluator ev(mesh, 0.05);
  const cplx z(0.05, 0.8);
  const Eigen::MatrixXcd t = ev.lambda_tilde(z);
  const Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Random(t.rows(), 8);
  for (auto _ : state) {
    nlpbem::la::ComplexLU lu(t);
    auto x = lu.solve(rhs);
    benchmark::DoNotOptimize(x.data());
  }
}
BENCHMARK(BM_ContourNodeSolve)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
