// Timing comparison of the OpenMP kernels against the serial reference
// implementation. The per-index work is identical under both policies, so the
// summary scalars must match bitwise; the table flags any mismatch.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "tonelli/conjugate.hpp"
#include "tonelli/fixtures.hpp"
#include "tonelli/genfun.hpp"
#include "tonelli/manifold.hpp"
#include "tonelli/parallel.hpp"

using namespace tonelli;

namespace {

double time_call(const std::function<double()>& fn, double* value) {
  auto start = std::chrono::steady_clock::now();
  *value = fn();
  std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  return elapsed.count();
}

void report_row(const char* name, double serial_s, double openmp_s, double serial_value,
                double openmp_value) {
  bool match = std::memcmp(&serial_value, &openmp_value, sizeof(double)) == 0;
  double speedup = openmp_s > 0 ? serial_s / openmp_s : 0.0;
  std::printf("%-28s %10.3fs %10.3fs %8.2fx   %s\n", name, serial_s, openmp_s, speedup,
              match ? "values match" : "VALUES DIFFER");
}

}  // namespace

int main(int argc, char** argv) {
  bool quick = false;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--quick") == 0) quick = true;

#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads %d\n", omp_get_max_threads());
#else
  std::printf("built without OpenMP; both columns run the serial path\n");
#endif
  std::printf("%-28s %11s %11s %9s\n", "kernel", "serial", "openmp", "speedup");

  {
    FixtureOptions fopts;
    fopts.grid_resolution = quick ? 16 : 40;
    Fixture fx = make_fixture("helical-torus", fopts);
    const ParamSubmanifold& m = *fx.manifold;
    double vs = 0, vp = 0;
    double ts = time_call([&] { return analyze_grid(m, {}, ExecPolicy::Serial).max_defect; }, &vs);
    double tp = time_call([&] { return analyze_grid(m, {}, ExecPolicy::OpenMP).max_defect; }, &vp);
    report_row("grid analysis", ts, tp, vs, vp);
  }

  {
    Fixture fx = make_fixture("separatrix-torus");
    double T = quick ? 5.0 : 20.0;
    auto count = [&](ExecPolicy policy) {
      auto scans = conjugate_scan_batch(fx.hamiltonian, fx.scan_seeds, T, 0.05, {}, policy);
      double total = 0;
      for (const auto& s : scans) total += static_cast<double>(s.zeros.size());
      return total;
    };
    double vs = 0, vp = 0;
    double ts = time_call([&] { return count(ExecPolicy::Serial); }, &vs);
    double tp = time_call([&] { return count(ExecPolicy::OpenMP); }, &vp);
    report_row("conjugate scan batch", ts, tp, vs, vp);
  }

  {
    ExtensionMap em = make_extension(make_sine_map(2, 0.05));
    int samples = quick ? 16 : 64;
    double vs = 0, vp = 0;
    double ts = time_call(
        [&] { return symplecticity_residual(em, samples, 0.4, 7, 1e-6, ExecPolicy::Serial); },
        &vs);
    double tp = time_call(
        [&] { return symplecticity_residual(em, samples, 0.4, 7, 1e-6, ExecPolicy::OpenMP); },
        &vp);
    report_row("symplecticity residual", ts, tp, vs, vp);
  }

  return 0;
}
