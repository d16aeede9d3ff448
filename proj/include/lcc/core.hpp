#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lcc/error.hpp"

namespace lcc {

/// Row-major real matrix with finite entries. Immutable once built.
class DenseMatrix {
 public:
  DenseMatrix(std::size_t rows, std::size_t cols);
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  /// N x K matrix with ones on the leading diagonal.
  static DenseMatrix augmented_identity(std::size_t rows, std::size_t cols);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }
  std::span<const double> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const double> data() const noexcept { return data_; }

  /// Dense product this * x.
  std::vector<double> multiply(std::span<const double> x) const;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

/// Zero or sign * 2^exponent, with the exponent kept inside the normal range
/// of binary64 so the value is always exact.
class Pow2Coeff {
 public:
  static constexpr int kMinExponent = -1000;
  static constexpr int kMaxExponent = 1000;

  constexpr Pow2Coeff() = default;

  static constexpr Pow2Coeff zero() { return {}; }
  static Pow2Coeff make(int sign, int exponent);
  /// Exact inverse of value(); nullopt unless v is 0 or a signed power of two in range.
  static std::optional<Pow2Coeff> from_value(double v);

  bool is_zero() const noexcept { return sign_ == 0; }
  int sign() const noexcept { return sign_; }
  int exponent() const noexcept { return exponent_; }
  double value() const noexcept;

  friend bool operator==(const Pow2Coeff&, const Pow2Coeff&) = default;

 private:
  constexpr Pow2Coeff(int sign, int exponent) : sign_(sign), exponent_(exponent) {}

  int sign_ = 0;
  int exponent_ = 0;
};

/// Finite alphabet {+-2^e : min <= e <= max}, optionally with 0.
class CoeffSet {
 public:
  CoeffSet(int min_exponent, int max_exponent, bool include_zero = true);

  int min_exponent() const noexcept { return min_exponent_; }
  int max_exponent() const noexcept { return max_exponent_; }
  bool include_zero() const noexcept { return include_zero_; }

  std::size_t size() const noexcept {
    return 2 * static_cast<std::size_t>(max_exponent_ - min_exponent_ + 1) + (include_zero_ ? 1 : 0);
  }
  bool contains(const Pow2Coeff& c) const noexcept;
  /// Members in ascending numeric order.
  std::vector<Pow2Coeff> members() const;

  friend bool operator==(const CoeffSet&, const CoeffSet&) = default;

 private:
  int min_exponent_;
  int max_exponent_;
  bool include_zero_;
};

struct Term {
  std::uint32_t col = 0;
  Pow2Coeff coeff;

  friend bool operator==(const Term&, const Term&) = default;
};

/// Ordering used for every tie-break: column, then exponent, then positive
/// before negative. Zero coefficients sort first within a column.
std::strong_ordering compare_terms(const Term& a, const Term& b) noexcept;
bool term_list_less(std::span<const Term> a, std::span<const Term> b) noexcept;

/// Sparse wiring row: a list of (column, coefficient) terms. Repeated columns
/// are allowed and add up in the dense expansion.
class WiringRow {
 public:
  WiringRow() = default;
  explicit WiringRow(std::vector<Term> terms) : terms_(std::move(terms)) {}

  std::span<const Term> terms() const noexcept { return terms_; }
  std::size_t nonzero_terms() const noexcept;

  /// Length-n dense expansion.
  std::vector<double> dense(std::size_t n) const;

  /// Canonical form: per column, the non-adjacent signed-digit form of the
  /// column's exact sum, sorted by compare_terms. Two rows have equal dense
  /// expansions iff their canonical forms are equal.
  WiringRow canonical() const;

  friend bool operator==(const WiringRow&, const WiringRow&) = default;

 private:
  std::vector<Term> terms_;
};

/// One factor W_i: n rows over a codebook with source_dim rows. s_terms is the
/// nominal term budget S the step was designed with.
class WiringMatrix {
 public:
  WiringMatrix(std::vector<WiringRow> rows, std::size_t source_dim, std::size_t s_terms);

  static WiringMatrix identity(std::size_t n);

  std::size_t size() const noexcept { return rows_.size(); }
  std::size_t source_dim() const noexcept { return source_dim_; }
  std::size_t s_terms() const noexcept { return s_terms_; }
  const WiringRow& row(std::size_t n) const { return rows_.at(n); }
  std::span<const WiringRow> rows() const noexcept { return rows_; }

  friend bool operator==(const WiringMatrix&, const WiringMatrix&) = default;

 private:
  std::vector<WiringRow> rows_;
  std::size_t source_dim_;
  std::size_t s_terms_;
};

/// P = W_I ... W_1 C0 with C0 the N x K augmented identity.
class Decomposition {
 public:
  Decomposition(std::size_t n, std::size_t k, std::vector<WiringMatrix> steps = {});

  std::size_t n() const noexcept { return n_; }
  std::size_t k() const noexcept { return k_; }
  std::span<const WiringMatrix> steps() const noexcept { return steps_; }

  friend bool operator==(const Decomposition&, const Decomposition&) = default;

 private:
  std::size_t n_;
  std::size_t k_;
  std::vector<WiringMatrix> steps_;
};

/// omega * C for one wiring row, accumulated over distinct columns in
/// ascending order starting from +0. Every residual in the library goes
/// through this order.
std::vector<double> row_combination(const WiringRow& omega, const DenseMatrix& c);

/// W * C, row by row via row_combination.
DenseMatrix apply_wiring(const WiringMatrix& w, const DenseMatrix& c);

DenseMatrix reconstruct(const Decomposition& d);
std::vector<double> apply(const Decomposition& d, std::span<const double> x);

double squared_norm(std::span<const double> v) noexcept;
/// ||a - b||^2 accumulated in index order.
double squared_distance(std::span<const double> a, std::span<const double> b) noexcept;

/// ||a_n - omega C||_2.
double row_residual(std::span<const double> a_n, const WiringRow& omega, const DenseMatrix& c);
double row_residual_squared(std::span<const double> a_n, const WiringRow& omega, const DenseMatrix& c);

}  // namespace lcc
