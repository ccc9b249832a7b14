// Serial reference kernels against the OpenMP ones.
#include <omp.h>

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>

#include "dlrk/advection.hpp"
#include "dlrk/collision.hpp"
#include "dlrk/experiment.hpp"

using namespace dlrk;

namespace {

double seconds(const std::function<void()>& fn, int reps) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / reps;
}

}  // namespace

int main() {
  std::printf("threads: %d\n", omp_get_max_threads());
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0.0, 1.0);

  for (Index n : {16, 32}) {
    const VelocityGrid vg = VelocityGrid::make(2, n, 8.4);
    const KernelModes modes = KernelModes::build(n, 8.4, 8.4);
    const Vector f = bkw_profile(vg, 2.0);
    const Vector g = bkw_profile(vg, 3.0);
    const double fast = seconds([&] { q_bilinear(g, f, modes); }, n == 16 ? 200 : 20);
    const double ref = seconds([&] { q_bilinear_reference(g, f, vg, 8.4); }, 1);
    const double err = (q_bilinear(g, f, modes) - q_bilinear_reference(g, f, vg, 8.4)).cwiseAbs().maxCoeff();
    std::printf("q_bilinear n_v=%-3lld fast %.3e s  reference %.3e s  speedup %.1fx  max diff %.2e\n",
                static_cast<long long>(n), fast, ref, ref / fast, err);
  }

  const SpatialGrid xg = SpatialGrid::make(100, 0.0, 1.0, Boundary::Periodic);
  const VelocityGrid vg = VelocityGrid::make(2, 32, 8.4);
  Matrix f(xg.n_x, vg.size());
  for (Index i = 0; i < f.size(); ++i) f.data()[i] = U(rng);
  const double par = seconds([&] { muscl_transport_full(f, 1e-4, xg, vg); }, 10);
  const double ser = seconds([&] { muscl_transport_full_reference(f, 1e-4, xg, vg); }, 10);
  const double diff =
      (muscl_transport_full(f, 1e-4, xg, vg) - muscl_transport_full_reference(f, 1e-4, xg, vg)).cwiseAbs().maxCoeff();
  std::printf("muscl 100x32^2       parallel %.3e s  reference %.3e s  speedup %.1fx  max diff %.2e\n", par, ser,
              ser / par, diff);
  return 0;
}
