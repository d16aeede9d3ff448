#pragma once

#include <optional>
#include <span>
#include <string_view>

#include "lcc/core.hpp"

namespace lcc {

enum class Engine { Dmp, Exhaustive, Beam };

std::string_view engine_name(Engine e) noexcept;
Engine parse_engine(std::string_view name);

/// Per-row solver settings. An empty coeff_set means the unbounded
/// power-of-two alphabet (DMP and beam only); the exhaustive engine requires
/// a finite set.
struct SolverConfig {
  std::size_t s_terms = 2;
  std::optional<CoeffSet> coeff_set;
  std::size_t memory = 1;
  double work_cap = 1e10;

  void validate(Engine engine) const;
  /// True when the single term (n, +2^0) is admissible.
  bool identity_admissible() const noexcept;
};

/// Discrete matching pursuit: S greedy single-component updates.
WiringRow dmp_row(std::span<const double> a_n, const DenseMatrix& c, const SolverConfig& cfg);

/// Global minimiser of ||a_n - omega C|| over all S-term combinations drawn
/// from cfg.coeff_set. Throws BudgetError when N^S |A|^S exceeds cfg.work_cap.
WiringRow exhaustive_row(std::span<const double> a_n, const DenseMatrix& c, const SolverConfig& cfg);

/// Reduced-state search keeping the cfg.memory best distinct vectors per
/// iteration. memory == 1 reproduces dmp_row.
WiringRow beam_row(std::span<const double> a_n, const DenseMatrix& c, const SolverConfig& cfg);

WiringRow solve_row(Engine engine, std::span<const double> a_n, const DenseMatrix& c, const SolverConfig& cfg);

/// N^S * |A|^S; the unbounded alphabet is not enumerable and yields +inf.
double exhaustive_work_estimate(std::size_t n, const SolverConfig& cfg);

}  // namespace lcc
