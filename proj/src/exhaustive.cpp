// Exact search over all S-term combinations.
//
// Combinations are enumerated as multisets (column-major, non-decreasing) so
// each one is visited once up to permutation. The first S-2 terms are
// enumerated explicitly with incrementally maintained partial sums. The last
// two terms are solved per column pair:
//
//  * the final coefficient enters the residual quadratically, so only the two
//    alphabet members bracketing its continuous optimum can win;
//  * for the second-to-last coefficient, ||P_perp(c3) (v - i2 c2)||^2 is a
//    convex lower bound, so the walk outward from its minimiser stops once the
//    bound exceeds the incumbent.
//
// Estimates use the Gram matrix; every candidate that could beat the incumbent
// is re-evaluated exactly in the same column order as row_combination so the
// returned optimum is bit-comparable with any other evaluation of that row.

#include <algorithm>
#include <cmath>
#include <limits>

#include "lcc/solvers.hpp"
#include "row_search.hpp"

namespace lcc {
namespace {

constexpr double kRelTol = 1e-9;

struct Prefix {
  std::vector<double> base;  // combination over columns before cur_col
  std::vector<double> full;  // base + alpha * c[cur_col]
  long cur_col = -1;
  double alpha = 0.0;
  std::vector<Term> terms;
};

struct PairSum {
  double sum;
  double x;
  double y;
};

class ExhaustiveSearch {
 public:
  ExhaustiveSearch(std::span<const double> a, const DenseMatrix& c, const SolverConfig& cfg)
      : a_(a), c_(c), s_terms_(cfg.s_terms), include_zero_(cfg.coeff_set->include_zero()), k_(c.cols()) {
    for (const auto& m : cfg.coeff_set->members()) values_.push_back(m.value());
    for (double v : values_)
      if (v != 0.0) nonzero_.push_back(v);

    const auto norms = detail::row_norms2(c);
    for (std::size_t j = 0; j < c.rows(); ++j)
      if (norms[j] > 0.0) active_.push_back(j);
    const std::size_t na = active_.size();
    gram_.assign(na * na, 0.0);
    for (std::size_t p = 0; p < na; ++p)
      for (std::size_t q = 0; q < na; ++q) gram_[p * na + q] = detail::dot(c.row(active_[p]), c.row(active_[q]));

    if (s_terms_ >= 2) {
      for (std::size_t i = 0; i < values_.size(); ++i)
        for (std::size_t j = i; j < values_.size(); ++j) sums_.push_back({values_[i] + values_[j], values_[i], values_[j]});
      std::sort(sums_.begin(), sums_.end(), [](const PairSum& l, const PairSum& r) { return l.sum < r.sum; });
      sums_.erase(std::unique(sums_.begin(), sums_.end(),
                              [](const PairSum& l, const PairSum& r) { return l.sum == r.sum; }),
                  sums_.end());
    }
    scratch_.resize(k_);
  }

  WiringRow run() {
    if (active_.empty()) return {};
    Prefix root;
    root.base.assign(k_, 0.0);
    root.full.assign(k_, 0.0);
    if (include_zero_) consider(root.full, [&] { return root.terms; });
    if (s_terms_ == 1) {
      finish_one(root);
    } else {
      std::vector<Prefix> stack(s_terms_ - 1, root);
      enumerate(0, 0, stack);
    }
    return best_row_;
  }

 private:
  // Prefix "pairs": index 0 is the zero coefficient when admissible, then
  // (active column, nonzero value) in column-major order.
  std::size_t pair_count() const { return (include_zero_ ? 1 : 0) + active_.size() * nonzero_.size(); }

  void enumerate(std::size_t depth, std::size_t start, std::vector<Prefix>& stack) {
    const Prefix& cur = stack[depth];
    if (depth + 2 == s_terms_) {
      finish_two(cur);
      return;
    }
    Prefix& next = stack[depth + 1];
    const std::size_t offset = include_zero_ ? 1 : 0;
    for (std::size_t idx = start; idx < pair_count(); ++idx) {
      next.terms = cur.terms;
      if (idx < offset) {
        next.base = cur.base;
        next.full = cur.full;
        next.cur_col = cur.cur_col;
        next.alpha = cur.alpha;
      } else {
        const std::size_t slot = (idx - offset) / nonzero_.size();
        const double v = nonzero_[(idx - offset) % nonzero_.size()];
        const std::size_t col = active_[slot];
        const auto cj = c_.row(col);
        if (static_cast<long>(col) == cur.cur_col) {
          next.base = cur.base;
          next.alpha = cur.alpha + v;
        } else {
          next.base = cur.full;
          next.alpha = v;
        }
        next.cur_col = static_cast<long>(col);
        next.full.resize(k_);
        for (std::size_t k = 0; k < k_; ++k) next.full[k] = next.base[k] + next.alpha * cj[k];
        next.terms.push_back(make_term(col, v));
      }
      enumerate(depth + 1, idx, stack);
    }
  }

  static Term make_term(std::size_t col, double v) {
    return {static_cast<std::uint32_t>(col), *Pow2Coeff::from_value(v)};
  }

  template <class TermsFn>
  void consider(std::span<const double> p, TermsFn&& terms) {
    const double sq = squared_distance(a_, p);
    if (sq < best_sq_) {
      best_sq_ = sq;
      best_row_ = detail::sorted_row(terms());
      best_key_ = best_row_.canonical();
    } else if (sq == best_sq_) {
      WiringRow row = detail::sorted_row(terms());
      WiringRow key = row.canonical();
      if (term_list_less(key.terms(), best_key_.terms())) {
        best_key_ = std::move(key);
        best_row_ = std::move(row);
      }
    }
  }

  // Positions in `sorted` of the members bracketing x.
  template <class Range, class Proj>
  static std::pair<std::size_t, std::size_t> bracket(const Range& sorted, double x, Proj proj) {
    auto it = std::lower_bound(sorted.begin(), sorted.end(), x,
                               [&](const auto& e, double v) { return proj(e) < v; });
    const std::size_t hi = static_cast<std::size_t>(it - sorted.begin());
    const std::size_t lo = hi == 0 ? 0 : hi - 1;
    return {lo, std::min(hi, sorted.size() - 1)};
  }

  void finish_one(const Prefix& p) {
    std::vector<double> r(k_);
    for (std::size_t k = 0; k < k_; ++k) r[k] = a_[k] - p.full[k];
    for (std::size_t col : active_) {
      const auto cj = c_.row(col);
      const double alpha = detail::dot(r, cj) / squared_norm(cj);
      const auto [lo, hi] = bracket(values_, alpha, [](double v) { return v; });
      for (std::size_t i = lo; i <= hi; ++i) {
        const double v = values_[i];
        for (std::size_t k = 0; k < k_; ++k) scratch_[k] = p.full[k] + v * cj[k];
        consider(scratch_, [&] {
          auto t = p.terms;
          if (v != 0.0) t.push_back(make_term(col, v));
          return t;
        });
      }
    }
  }

  double gram(std::size_t p, std::size_t q) const { return gram_[p * active_.size() + q]; }

  void finish_two(const Prefix& p) {
    const std::size_t na = active_.size();
    std::vector<double> v(k_);
    for (std::size_t k = 0; k < k_; ++k) v[k] = a_[k] - p.full[k];
    const double vv = squared_norm(v);
    std::vector<double> d(na);
    for (std::size_t q = 0; q < na; ++q) d[q] = detail::dot(v, c_.row(active_[q]));

    std::size_t first = 0;
    while (first < na && static_cast<long>(active_[first]) < p.cur_col) ++first;
    for (std::size_t s2 = first; s2 < na; ++s2) {
      same_column(p, s2, vv, d[s2]);
      for (std::size_t s3 = s2 + 1; s3 < na; ++s3) distinct_pair(p, s2, s3, vv, d[s2], d[s3]);
    }
  }

  // Both remaining terms on one column: the column coefficient ranges over
  // the pairwise sums of the alphabet.
  void same_column(const Prefix& p, std::size_t s2, double vv, double d2) {
    const double g22 = gram(s2, s2);
    const std::size_t col = active_[s2];
    const auto cj = c_.row(col);
    const bool merge = static_cast<long>(col) == p.cur_col;
    const auto [lo, hi] = bracket(sums_, d2 / g22, [](const PairSum& e) { return e.sum; });
    for (std::size_t i = lo; i <= hi; ++i) {
      const PairSum& ps = sums_[i];
      const double est = vv - 2.0 * ps.sum * d2 + ps.sum * ps.sum * g22;
      if (est > best_sq_ + kRelTol * (vv + ps.sum * ps.sum * g22 + best_sq_)) continue;
      if (merge) {
        const double w = p.alpha + ps.sum;
        for (std::size_t k = 0; k < k_; ++k) scratch_[k] = p.base[k] + w * cj[k];
      } else {
        for (std::size_t k = 0; k < k_; ++k) scratch_[k] = p.full[k] + ps.sum * cj[k];
      }
      consider(scratch_, [&] {
        auto t = p.terms;
        if (ps.x != 0.0) t.push_back(make_term(col, ps.x));
        if (ps.y != 0.0) t.push_back(make_term(col, ps.y));
        return t;
      });
    }
  }

  void distinct_pair(const Prefix& p, std::size_t s2, std::size_t s3, double vv, double d2, double d3) {
    const double g22 = gram(s2, s2), g23 = gram(s2, s3), g33 = gram(s3, s3);
    const double h = g22 - g23 * g23 / g33;
    const double g = d2 - g23 * d3 / g33;
    const double q0 = vv - d3 * d3 / g33;

    auto bound_exceeded = [&](double i2) {
      const double lb = q0 - 2.0 * i2 * g + i2 * i2 * h;
      return lb > best_sq_ + kRelTol * (vv + i2 * i2 * g22 + best_sq_);
    };

    const std::size_t nv = values_.size();
    if (h > 1e-6 * g22) {
      const auto mid = static_cast<std::size_t>(std::lower_bound(values_.begin(), values_.end(), g / h) - values_.begin());
      for (std::size_t i = mid; i < nv; ++i) {
        if (bound_exceeded(values_[i])) break;
        visit(p, s2, s3, values_[i], vv, d2, d3);
      }
      for (std::size_t i = mid; i-- > 0;) {
        if (bound_exceeded(values_[i])) break;
        visit(p, s2, s3, values_[i], vv, d2, d3);
      }
    } else {
      // Nearly parallel columns: the bound is flat, fall back to a full scan.
      for (std::size_t i = 0; i < nv; ++i) visit(p, s2, s3, values_[i], vv, d2, d3);
    }
  }

  void visit(const Prefix& p, std::size_t s2, std::size_t s3, double i2, double vv, double d2, double d3) {
    const double g22 = gram(s2, s2), g23 = gram(s2, s3), g33 = gram(s3, s3);
    const auto [lo, hi] = bracket(values_, (d3 - i2 * g23) / g33, [](double v) { return v; });
    const std::size_t col2 = active_[s2], col3 = active_[s3];
    const auto c2 = c_.row(col2), c3 = c_.row(col3);
    for (std::size_t i = lo; i <= hi; ++i) {
      const double i3 = values_[i];
      const double est = vv - 2.0 * i2 * d2 - 2.0 * i3 * d3 + i2 * i2 * g22 + 2.0 * i2 * i3 * g23 + i3 * i3 * g33;
      if (est > best_sq_ + kRelTol * (vv + i2 * i2 * g22 + i3 * i3 * g33 + best_sq_)) continue;
      if (static_cast<long>(col2) == p.cur_col) {
        const double w = p.alpha + i2;
        for (std::size_t k = 0; k < k_; ++k) scratch_[k] = p.base[k] + w * c2[k];
      } else {
        for (std::size_t k = 0; k < k_; ++k) scratch_[k] = p.full[k] + i2 * c2[k];
      }
      for (std::size_t k = 0; k < k_; ++k) scratch_[k] = scratch_[k] + i3 * c3[k];
      consider(scratch_, [&] {
        auto t = p.terms;
        if (i2 != 0.0) t.push_back(make_term(col2, i2));
        if (i3 != 0.0) t.push_back(make_term(col3, i3));
        return t;
      });
    }
  }

  std::span<const double> a_;
  const DenseMatrix& c_;
  std::size_t s_terms_;
  bool include_zero_;
  std::size_t k_;

  std::vector<double> values_;   // alphabet, ascending (zero included if admissible)
  std::vector<double> nonzero_;  // alphabet without zero, ascending
  std::vector<std::size_t> active_;
  std::vector<double> gram_;
  std::vector<PairSum> sums_;
  std::vector<double> scratch_;

  double best_sq_ = std::numeric_limits<double>::infinity();
  WiringRow best_key_;
  WiringRow best_row_;
};

}  // namespace

WiringRow exhaustive_row(std::span<const double> a_n, const DenseMatrix& c, const SolverConfig& cfg) {
  cfg.validate(Engine::Exhaustive);
  if (a_n.size() != c.cols())
    throw StructuralError("target row length " + std::to_string(a_n.size()) + " != codebook width " +
                          std::to_string(c.cols()));
  const double estimate = exhaustive_work_estimate(c.rows(), cfg);
  if (estimate > cfg.work_cap) throw BudgetError(estimate, cfg.work_cap);
  return ExhaustiveSearch(a_n, c, cfg).run();
}

}  // namespace lcc
