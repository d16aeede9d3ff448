// Serial vs OpenMP timings for one wiring step and for a trial ensemble.
//   bench_wiring [repeats]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>

#include <omp.h>

#include "lcc/driver.hpp"
#include "lcc/experiment.hpp"

using namespace lcc;

namespace {

double best_of(int repeats, const std::function<void()>& fn) {
  double best = 1e300;
  for (int i = 0; i < repeats; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

struct Case {
  const char* label;
  std::size_t n, k;
  Engine engine;
  std::size_t s, m;
  bool bounded;
};

}  // namespace

int main(int argc, char** argv) {
  const int repeats = argc > 1 ? std::atoi(argv[1]) : 3;
  std::printf("threads: %d\n", omp_get_max_threads());
  std::printf("%-28s %10s %10s %8s %s\n", "case", "serial_s", "omp_s", "speedup", "same");

  const Case cases[] = {
      {"step dmp 64x4 S=2", 64, 4, Engine::Dmp, 2, 1, false},
      {"step beam 64x4 S=3 M=10", 64, 4, Engine::Beam, 3, 10, true},
      {"step exhaustive 16x2 S=3", 16, 2, Engine::Exhaustive, 3, 1, true},
  };
  for (const auto& c : cases) {
    const auto target = gaussian_matrix(c.n, c.k, 1);
    // a codebook a few steps in, so rows are not trivially aligned
    DriverConfig warm;
    warm.total_steps = 2;
    const auto pre = decompose(target, warm);
    const auto codebook = reconstruct(pre.decomposition);
    SolverConfig cfg;
    cfg.s_terms = c.s;
    cfg.memory = c.m;
    if (c.bounded) cfg.coeff_set = CoeffSet(-40, 3);
    WiringMatrix a = WiringMatrix::identity(c.n), b = WiringMatrix::identity(c.n);
    const double ts = best_of(repeats, [&] { a = wiring_step_serial(target, codebook, cfg, c.engine); });
    const double tp = best_of(repeats, [&] { b = wiring_step(target, codebook, cfg, c.engine); });
    std::printf("%-28s %10.4f %10.4f %8.2f %s\n", c.label, ts, tp, ts / tp, a == b ? "yes" : "NO");
  }

  ExperimentSpec spec;
  spec.n = 16;
  spec.k = 4;
  spec.trials = 16;
  spec.driver.total_steps = 8;
  spec.driver.engine = Engine::Beam;
  spec.driver.solver.s_terms = 3;
  spec.driver.solver.memory = 5;
  spec.driver.solver.coeff_set = CoeffSet(-40, 3);
  ExperimentResult rs, rp;
  const double ts = best_of(repeats, [&] { rs = run_experiment_serial(spec); });
  const double tp = best_of(repeats, [&] { rp = run_experiment(spec); });
  std::printf("%-28s %10.4f %10.4f %8.2f %s\n", "ensemble beam 16x4 x16", ts, tp, ts / tp,
              results_csv(rs) == results_csv(rp) ? "yes" : "NO");
  return 0;
}
