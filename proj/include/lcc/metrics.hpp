#pragma once

#include <optional>
#include <vector>

#include "lcc/core.hpp"

namespace lcc {

/// Signal-to-quantisation-noise ratio. A zero error is reported as `exact`
/// rather than as an infinite ratio.
struct Sqnr {
  bool exact = false;
  double ratio = 0.0;

  static Sqnr exact_match() { return {true, 0.0}; }
  /// 10 log10(ratio); nullopt when exact.
  std::optional<double> db() const;
  /// ">= threshold", with exact counting as reached.
  bool reaches_db(double threshold) const { return exact || *db() >= threshold; }
};

/// ||A||_F^2 / ||A - P||_F^2. Throws SpecError when A is all zero.
Sqnr sqnr(const DenseMatrix& a, const DenseMatrix& p);
/// Same ratio from precomputed squared norms.
Sqnr sqnr_from_energies(double signal, double error);

struct CostReport {
  long long nominal_adds = 0;    // sum over steps of N (S_i - 1)
  long long effective_adds = 0;  // sum over rows of max(0, nonzero terms - 1)
};

CostReport cost(const Decomposition& d);
CostReport step_cost(const WiringMatrix& w);

struct CsdExpansion {
  std::vector<Pow2Coeff> digits;  // in the order chosen, largest first
  double quantized = 0.0;
};

/// Greedy signed-digit quantiser: round the residual to the nearest power of
/// two (lower one on a tie), `digits` times.
CsdExpansion csd_quantize(double value, std::size_t digits);

}  // namespace lcc
