#pragma once

// Kernels shared by the row solvers. Candidate residuals are always formed as
// sum_k (r_k - v * c_k)^2 in index order so that two solvers walking the same
// path produce bit-identical values.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "lcc/core.hpp"

namespace lcc::detail {

inline double dot(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

inline double residual_after(std::span<const double> r, std::span<const double> c, double v) noexcept {
  double s = 0.0;
  for (std::size_t k = 0; k < r.size(); ++k) {
    const double d = r[k] - v * c[k];
    s += d * d;
  }
  return s;
}

inline void subtract_scaled(std::span<double> r, std::span<const double> c, double v) noexcept {
  for (std::size_t k = 0; k < r.size(); ++k) r[k] = r[k] - v * c[k];
}

/// Squared norms of the codebook rows.
inline std::vector<double> row_norms2(const DenseMatrix& c) {
  std::vector<double> out(c.rows());
  for (std::size_t j = 0; j < c.rows(); ++j) out[j] = squared_norm(c.row(j));
  return out;
}

/// The one or two signed powers of two bracketing alpha (sign of alpha),
/// clamped to the representable exponent range. Empty for alpha == 0.
inline void bracketing_pow2(double alpha, std::vector<Pow2Coeff>& out) {
  out.clear();
  if (alpha == 0.0 || !std::isfinite(alpha)) return;
  const int sign = alpha < 0 ? -1 : 1;
  int e = 0;
  const double m = std::frexp(std::fabs(alpha), &e);
  auto clamp = [](int x) {
    return x < Pow2Coeff::kMinExponent ? Pow2Coeff::kMinExponent
                                       : (x > Pow2Coeff::kMaxExponent ? Pow2Coeff::kMaxExponent : x);
  };
  const int lo = clamp(e - 1);
  out.push_back(Pow2Coeff::make(sign, lo));
  if (m != 0.5) {
    const int hi = clamp(e);
    if (hi != lo) out.push_back(Pow2Coeff::make(sign, hi));
  }
}

// Chosen terms as a row: zeros dropped, sorted by compare_terms.
inline WiringRow sorted_row(std::vector<Term> terms) {
  std::erase_if(terms, [](const Term& t) { return t.coeff.is_zero(); });
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return compare_terms(a, b) < 0; });
  return WiringRow(std::move(terms));
}

}  // namespace lcc::detail
