#pragma once

#include <optional>
#include <vector>

#include "lcc/core.hpp"
#include "lcc/metrics.hpp"
#include "lcc/solvers.hpp"

namespace lcc {

/// Solves every row of A_target against codebook c. Rows run in parallel
/// (OpenMP) and are assembled by index, so the result does not depend on
/// scheduling.
WiringMatrix wiring_step(const DenseMatrix& target, const DenseMatrix& c, const SolverConfig& cfg, Engine engine);

/// Single-threaded reference for wiring_step.
WiringMatrix wiring_step_serial(const DenseMatrix& target, const DenseMatrix& c, const SolverConfig& cfg,
                                Engine engine);

struct DriverConfig {
  std::size_t total_steps = 0;
  std::size_t warmup_steps = 2;
  std::size_t warmup_s = 2;
  /// Alphabet of the warm-up DMP steps; empty means unbounded powers of two.
  std::optional<CoeffSet> warmup_coeff_set;
  Engine engine = Engine::Dmp;
  SolverConfig solver;
  /// Stop early once the SQNR reaches this many dB (total_steps stays the cap).
  std::optional<double> target_db;
  bool parallel = true;

  void validate() const;
};

struct TraceRow {
  std::size_t step = 0;
  Sqnr sqnr;
  long long nominal_adds = 0;
  long long effective_adds = 0;
};

struct DecomposeResult {
  Decomposition decomposition;
  std::vector<TraceRow> trace;  // step 0 (C0) first
};

/// Sequential factorisation from C0 = I_{NxK}: warm-up DMP steps, then the
/// configured engine, with C_i = W_i C_{i-1} after each step.
DecomposeResult decompose(const DenseMatrix& a, const DriverConfig& driver);

}  // namespace lcc
