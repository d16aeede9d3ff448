#include "lcc/core.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace lcc {

BudgetError::BudgetError(double estimate, double cap, const std::string& context)
    : Error((context.empty() ? std::string{} : context + ": ") +
            "exhaustive search work estimate " + std::to_string(estimate) + " exceeds cap " +
            std::to_string(cap)),
      estimate_(estimate),
      cap_(cap) {}

// ---------------------------------------------------------------------------
// DenseMatrix

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols)
    : DenseMatrix(rows, cols, std::vector<double>(rows * cols, 0.0)) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (rows_ == 0 || cols_ == 0) throw StructuralError("matrix dimensions must be positive");
  if (data_.size() != rows_ * cols_)
    throw StructuralError("matrix data length " + std::to_string(data_.size()) + " != " +
                          std::to_string(rows_) + "x" + std::to_string(cols_));
  for (double v : data_)
    if (!std::isfinite(v)) throw SpecError("matrix entries must be finite");
}

DenseMatrix DenseMatrix::augmented_identity(std::size_t rows, std::size_t cols) {
  std::vector<double> data(rows * cols, 0.0);
  for (std::size_t i = 0; i < std::min(rows, cols); ++i) data[i * cols + i] = 1.0;
  return {rows, cols, std::move(data)};
}

std::vector<double> DenseMatrix::multiply(std::span<const double> x) const {
  if (x.size() != cols_) throw StructuralError("vector length does not match matrix columns");
  std::vector<double> y(rows_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < cols_; ++c) acc += data_[r * cols_ + c] * x[c];
    y[r] = acc;
  }
  return y;
}

// ---------------------------------------------------------------------------
// Pow2Coeff / CoeffSet

Pow2Coeff Pow2Coeff::make(int sign, int exponent) {
  if (sign != 1 && sign != -1) throw SpecError("power-of-two sign must be +1 or -1");
  if (exponent < kMinExponent || exponent > kMaxExponent)
    throw SpecError("power-of-two exponent " + std::to_string(exponent) + " out of range");
  return {sign, exponent};
}

std::optional<Pow2Coeff> Pow2Coeff::from_value(double v) {
  if (v == 0.0) return zero();
  if (!std::isfinite(v)) return std::nullopt;
  int e = 0;
  const double m = std::frexp(std::fabs(v), &e);
  if (m != 0.5) return std::nullopt;
  const int exponent = e - 1;
  if (exponent < kMinExponent || exponent > kMaxExponent) return std::nullopt;
  return Pow2Coeff{v < 0 ? -1 : 1, exponent};
}

double Pow2Coeff::value() const noexcept {
  return sign_ == 0 ? 0.0 : std::ldexp(static_cast<double>(sign_), exponent_);
}

CoeffSet::CoeffSet(int min_exponent, int max_exponent, bool include_zero)
    : min_exponent_(min_exponent), max_exponent_(max_exponent), include_zero_(include_zero) {
  if (min_exponent > max_exponent) throw SpecError("coefficient set needs min_exponent <= max_exponent");
  if (min_exponent < Pow2Coeff::kMinExponent || max_exponent > Pow2Coeff::kMaxExponent)
    throw SpecError("coefficient set exponents out of range");
}

bool CoeffSet::contains(const Pow2Coeff& c) const noexcept {
  if (c.is_zero()) return include_zero_;
  return c.exponent() >= min_exponent_ && c.exponent() <= max_exponent_;
}

std::vector<Pow2Coeff> CoeffSet::members() const {
  std::vector<Pow2Coeff> out;
  out.reserve(size());
  for (int e = max_exponent_; e >= min_exponent_; --e) out.push_back(Pow2Coeff::make(-1, e));
  if (include_zero_) out.push_back(Pow2Coeff::zero());
  for (int e = min_exponent_; e <= max_exponent_; ++e) out.push_back(Pow2Coeff::make(1, e));
  return out;
}

// ---------------------------------------------------------------------------
// Terms and rows

std::strong_ordering compare_terms(const Term& a, const Term& b) noexcept {
  if (auto c = a.col <=> b.col; c != 0) return c;
  const bool az = a.coeff.is_zero(), bz = b.coeff.is_zero();
  if (az || bz) return bz <=> az;
  if (auto c = a.coeff.exponent() <=> b.coeff.exponent(); c != 0) return c;
  // positive first
  return b.coeff.sign() <=> a.coeff.sign();
}

bool term_list_less(std::span<const Term> a, std::span<const Term> b) noexcept {
  return std::lexicographical_compare_three_way(a.begin(), a.end(), b.begin(), b.end(),
                                                compare_terms) < 0;
}

std::size_t WiringRow::nonzero_terms() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(terms_.begin(), terms_.end(), [](const Term& t) { return !t.coeff.is_zero(); }));
}

std::vector<double> WiringRow::dense(std::size_t n) const {
  std::vector<double> omega(n, 0.0);
  for (const auto& t : terms_) {
    if (t.col >= n) throw StructuralError("wiring term column " + std::to_string(t.col) + " out of range");
    omega[t.col] += t.coeff.value();
  }
  return omega;
}

WiringRow WiringRow::canonical() const {
  // column -> (exponent -> digit sum); digits are then carried into
  // non-adjacent form, which is unique for a given value.
  std::map<std::uint32_t, std::map<int, long long>> digits;
  for (const auto& t : terms_) {
    if (t.coeff.is_zero()) continue;
    digits[t.col][t.coeff.exponent()] += t.coeff.sign();
  }
  std::vector<Term> out;
  for (auto& [col, by_exp] : digits) {
    while (!by_exp.empty()) {
      auto it = by_exp.begin();
      const int e = it->first;
      const long long d = it->second;
      by_exp.erase(it);
      if (d == 0) continue;
      long long z = 0;
      if (d % 2 != 0) {
        // value mod 4 at this position includes the next digit up
        const auto up = by_exp.find(e + 1);
        const long long next = up == by_exp.end() ? 0 : up->second;
        const long long m = (((d + 2 * next) % 4) + 4) % 4;
        z = (m == 1) ? 1 : -1;
        out.push_back({col, Pow2Coeff::make(static_cast<int>(z), e)});
      }
      const long long carry = (d - z) / 2;
      if (carry != 0) by_exp[e + 1] += carry;
    }
  }
  std::sort(out.begin(), out.end(), [](const Term& a, const Term& b) { return compare_terms(a, b) < 0; });
  return WiringRow(std::move(out));
}

// ---------------------------------------------------------------------------
// WiringMatrix / Decomposition

WiringMatrix::WiringMatrix(std::vector<WiringRow> rows, std::size_t source_dim, std::size_t s_terms)
    : rows_(std::move(rows)), source_dim_(source_dim), s_terms_(s_terms) {
  if (s_terms_ == 0) throw SpecError("wiring step needs S >= 1");
  for (std::size_t n = 0; n < rows_.size(); ++n) {
    const auto terms = rows_[n].terms();
    if (terms.size() > s_terms_)
      throw StructuralError("wiring row " + std::to_string(n) + " has " + std::to_string(terms.size()) +
                            " terms, more than S=" + std::to_string(s_terms_));
    for (const auto& t : terms)
      if (t.col >= source_dim_)
        throw StructuralError("wiring row " + std::to_string(n) + " references column " +
                              std::to_string(t.col) + " of " + std::to_string(source_dim_));
  }
}

WiringMatrix WiringMatrix::identity(std::size_t n) {
  std::vector<WiringRow> rows;
  rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    rows.emplace_back(std::vector<Term>{{static_cast<std::uint32_t>(i), Pow2Coeff::make(1, 0)}});
  return {std::move(rows), n, 1};
}

Decomposition::Decomposition(std::size_t n, std::size_t k, std::vector<WiringMatrix> steps)
    : n_(n), k_(k), steps_(std::move(steps)) {
  if (n_ == 0 || k_ == 0) throw StructuralError("decomposition dimensions must be positive");
  for (std::size_t i = 0; i < steps_.size(); ++i) {
    if (steps_[i].size() != n_ || steps_[i].source_dim() != n_)
      throw StructuralError("wiring step " + std::to_string(i + 1) + " is " +
                            std::to_string(steps_[i].size()) + "x" + std::to_string(steps_[i].source_dim()) +
                            ", expected " + std::to_string(n_) + "x" + std::to_string(n_));
  }
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

// Distinct columns of omega in ascending order with their summed coefficient.
std::vector<std::pair<std::uint32_t, double>> column_sums(const WiringRow& omega) {
  std::vector<std::pair<std::uint32_t, double>> sums;
  for (const auto& t : omega.terms()) {
    if (t.coeff.is_zero()) continue;
    auto it = std::find_if(sums.begin(), sums.end(), [&](const auto& p) { return p.first == t.col; });
    if (it == sums.end())
      sums.emplace_back(t.col, t.coeff.value());
    else
      it->second += t.coeff.value();
  }
  std::sort(sums.begin(), sums.end());
  return sums;
}

}  // namespace

std::vector<double> row_combination(const WiringRow& omega, const DenseMatrix& c) {
  std::vector<double> p(c.cols(), 0.0);
  for (const auto& [col, w] : column_sums(omega)) {
    if (col >= c.rows()) throw StructuralError("wiring term column out of codebook range");
    if (w == 0.0) continue;
    const auto src = c.row(col);
    for (std::size_t k = 0; k < p.size(); ++k) p[k] = p[k] + w * src[k];
  }
  return p;
}

DenseMatrix apply_wiring(const WiringMatrix& w, const DenseMatrix& c) {
  if (w.source_dim() != c.rows())
    throw StructuralError("wiring source dimension " + std::to_string(w.source_dim()) +
                          " does not match codebook rows " + std::to_string(c.rows()));
  std::vector<double> data;
  data.reserve(w.size() * c.cols());
  for (const auto& row : w.rows()) {
    const auto p = row_combination(row, c);
    data.insert(data.end(), p.begin(), p.end());
  }
  return {w.size(), c.cols(), std::move(data)};
}

DenseMatrix reconstruct(const Decomposition& d) {
  DenseMatrix p = DenseMatrix::augmented_identity(d.n(), d.k());
  for (const auto& step : d.steps()) p = apply_wiring(step, p);
  return p;
}

std::vector<double> apply(const Decomposition& d, std::span<const double> x) {
  if (x.size() != d.k())
    throw StructuralError("input length " + std::to_string(x.size()) + " != K=" + std::to_string(d.k()));
  std::vector<double> v(d.n(), 0.0);
  for (std::size_t i = 0; i < std::min(d.n(), d.k()); ++i) v[i] = x[i];
  for (const auto& step : d.steps()) {
    std::vector<double> next(d.n(), 0.0);
    for (std::size_t n = 0; n < d.n(); ++n) {
      double acc = 0.0;
      for (const auto& [col, w] : column_sums(step.row(n))) acc = acc + w * v[col];
      next[n] = acc;
    }
    v = std::move(next);
  }
  return v;
}

double squared_norm(std::span<const double> v) noexcept {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return s;
}

double row_residual_squared(std::span<const double> a_n, const WiringRow& omega, const DenseMatrix& c) {
  if (a_n.size() != c.cols())
    throw StructuralError("target row length " + std::to_string(a_n.size()) + " != codebook width " +
                          std::to_string(c.cols()));
  return squared_distance(a_n, row_combination(omega, c));
}

double row_residual(std::span<const double> a_n, const WiringRow& omega, const DenseMatrix& c) {
  return std::sqrt(row_residual_squared(a_n, omega, c));
}

}  // namespace lcc
