#include "lcc/metrics.hpp"

#include <cmath>

namespace lcc {

std::optional<double> Sqnr::db() const {
  if (exact) return std::nullopt;
  return 10.0 * std::log10(ratio);
}

Sqnr sqnr_from_energies(double signal, double error) {
  if (!(signal > 0.0)) throw SpecError("SQNR is undefined for an all-zero target matrix");
  if (error == 0.0) return Sqnr::exact_match();
  return {false, signal / error};
}

Sqnr sqnr(const DenseMatrix& a, const DenseMatrix& p) {
  if (a.rows() != p.rows() || a.cols() != p.cols())
    throw StructuralError("SQNR needs matrices of the same shape");
  return sqnr_from_energies(squared_norm(a.data()), squared_distance(a.data(), p.data()));
}

CostReport step_cost(const WiringMatrix& w) {
  CostReport r;
  r.nominal_adds = static_cast<long long>(w.size()) * (static_cast<long long>(w.s_terms()) - 1);
  for (const auto& row : w.rows()) {
    const auto nz = static_cast<long long>(row.nonzero_terms());
    if (nz > 1) r.effective_adds += nz - 1;
  }
  return r;
}

CostReport cost(const Decomposition& d) {
  CostReport total;
  for (const auto& step : d.steps()) {
    const auto c = step_cost(step);
    total.nominal_adds += c.nominal_adds;
    total.effective_adds += c.effective_adds;
  }
  return total;
}

CsdExpansion csd_quantize(double value, std::size_t digits) {
  if (digits < 1) throw SpecError("CSD quantisation needs at least one digit");
  if (!std::isfinite(value)) throw SpecError("CSD quantisation needs a finite value");
  CsdExpansion out;
  double residual = value;
  for (std::size_t d = 0; d < digits && residual != 0.0; ++d) {
    int e = 0;
    const double mag = std::fabs(residual);
    const double m = std::frexp(mag, &e);
    int exponent = e - 1;
    if (m != 0.5) {
      const double lo = std::ldexp(1.0, e - 1), hi = std::ldexp(1.0, e);
      if (hi - mag < mag - lo) exponent = e;
    }
    if (exponent < Pow2Coeff::kMinExponent || exponent > Pow2Coeff::kMaxExponent) break;
    const auto digit = Pow2Coeff::make(residual < 0 ? -1 : 1, exponent);
    out.digits.push_back(digit);
    out.quantized += digit.value();
    residual = value - out.quantized;
  }
  return out;
}

}  // namespace lcc
