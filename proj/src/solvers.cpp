#include "lcc/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "row_search.hpp"

namespace lcc {

std::string_view engine_name(Engine e) noexcept {
  switch (e) {
    case Engine::Dmp: return "dmp";
    case Engine::Exhaustive: return "exhaustive";
    case Engine::Beam: return "beam";
  }
  return "?";
}

Engine parse_engine(std::string_view name) {
  if (name == "dmp") return Engine::Dmp;
  if (name == "exhaustive") return Engine::Exhaustive;
  if (name == "beam") return Engine::Beam;
  throw SpecError("unknown engine '" + std::string(name) + "' (expected dmp|exhaustive|beam)");
}

void SolverConfig::validate(Engine engine) const {
  if (s_terms < 1) throw SpecError("S must be >= 1");
  if (memory < 1) throw SpecError("beam memory M must be >= 1");
  if (engine == Engine::Exhaustive && !coeff_set)
    throw SpecError("the exhaustive engine needs a finite coefficient set");
  if (!(work_cap > 0)) throw SpecError("work budget must be positive");
}

bool SolverConfig::identity_admissible() const noexcept {
  return !coeff_set || coeff_set->contains(Pow2Coeff::make(1, 0));
}

double exhaustive_work_estimate(std::size_t n, const SolverConfig& cfg) {
  if (!cfg.coeff_set) return std::numeric_limits<double>::infinity();
  const double s = static_cast<double>(cfg.s_terms);
  return std::pow(static_cast<double>(n), s) * std::pow(static_cast<double>(cfg.coeff_set->size()), s);
}

namespace {

void check_shapes(std::span<const double> a_n, const DenseMatrix& c) {
  if (a_n.size() != c.cols())
    throw StructuralError("target row length " + std::to_string(a_n.size()) + " != codebook width " +
                          std::to_string(c.cols()));
}

// Nonzero coefficients tried on column j given the current residual.
class CandidateSource {
 public:
  CandidateSource(const SolverConfig& cfg, const DenseMatrix& c)
      : c_(c), norms_(detail::row_norms2(c)) {
    if (cfg.coeff_set) {
      for (const auto& m : cfg.coeff_set->members())
        if (!m.is_zero()) restricted_.push_back(m);
      bounded_ = true;
    }
  }

  bool usable(std::size_t j) const noexcept { return norms_[j] > 0.0; }

  std::span<const Pow2Coeff> for_column(std::size_t j, std::span<const double> r) {
    if (bounded_) return restricted_;
    detail::bracketing_pow2(detail::dot(r, c_.row(j)) / norms_[j], scratch_);
    return scratch_;
  }

 private:
  const DenseMatrix& c_;
  std::vector<double> norms_;
  std::vector<Pow2Coeff> restricted_;
  std::vector<Pow2Coeff> scratch_;
  bool bounded_ = false;
};

}  // namespace

WiringRow dmp_row(std::span<const double> a_n, const DenseMatrix& c, const SolverConfig& cfg) {
  cfg.validate(Engine::Dmp);
  check_shapes(a_n, c);
  CandidateSource source(cfg, c);

  std::vector<double> r(a_n.begin(), a_n.end());
  double current = squared_norm(r);
  std::vector<Term> terms;

  for (std::size_t s = 0; s < cfg.s_terms; ++s) {
    bool found = false;
    Term best;
    double best_sq = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < c.rows(); ++j) {
      if (!source.usable(j)) continue;
      const auto cj = c.row(j);
      for (const auto& coeff : source.for_column(j, r)) {
        const double sq = detail::residual_after(r, cj, coeff.value());
        const Term t{static_cast<std::uint32_t>(j), coeff};
        if (!found || sq < best_sq || (sq == best_sq && compare_terms(t, best) < 0)) {
          found = true;
          best = t;
          best_sq = sq;
        }
      }
    }
    if (!found || !(best_sq < current)) break;
    detail::subtract_scaled(r, c.row(best.col), best.coeff.value());
    current = best_sq;
    terms.push_back(best);
  }
  return detail::sorted_row(std::move(terms));
}

namespace {

struct BeamState {
  std::vector<Term> path;  // terms in the order they were added
  WiringRow key;           // canonical form, identifies the dense vector
  std::vector<double> r;   // a_n - omega C
  double sq = 0.0;
};

bool state_less(const BeamState& a, const BeamState& b) {
  if (a.sq != b.sq) return a.sq < b.sq;
  return term_list_less(a.key.terms(), b.key.terms());
}

// Appends states from `sorted` (ascending by state_less) to `out` until it
// holds `limit` entries, skipping dense duplicates.
void take_distinct(std::vector<BeamState>& sorted, std::vector<BeamState>& out, std::size_t limit) {
  for (auto& st : sorted) {
    if (out.size() >= limit) break;
    const bool dup = std::any_of(out.begin(), out.end(), [&](const BeamState& o) { return o.key == st.key; });
    if (!dup) out.push_back(std::move(st));
  }
}

struct Child {
  double sq;
  std::uint32_t col;
  Pow2Coeff coeff;
};

}  // namespace

WiringRow beam_row(std::span<const double> a_n, const DenseMatrix& c, const SolverConfig& cfg) {
  cfg.validate(Engine::Beam);
  check_shapes(a_n, c);
  CandidateSource source(cfg, c);
  const std::size_t m = cfg.memory;

  // Omega starts as M copies of the zero vector, i.e. one distinct state.
  std::vector<BeamState> omega;
  {
    BeamState zero;
    zero.r.assign(a_n.begin(), a_n.end());
    zero.sq = squared_norm(zero.r);
    omega.push_back(std::move(zero));
  }

  std::vector<Child> children;
  for (std::size_t s = 0; s < cfg.s_terms; ++s) {
    std::vector<BeamState> pool;
    for (const auto& parent : omega) {
      children.clear();
      for (std::size_t j = 0; j < c.rows(); ++j) {
        if (!source.usable(j)) continue;
        const auto cj = c.row(j);
        for (const auto& coeff : source.for_column(j, parent.r)) {
          const double sq = detail::residual_after(parent.r, cj, coeff.value());
          // A change that does not move the residual counts as no change.
          if (sq == parent.sq) continue;
          children.push_back({sq, static_cast<std::uint32_t>(j), coeff});
        }
      }

      // Top-M of {parent} U children; children of one parent are mutually
      // distinct and distinct from the parent, so no dedup is needed here.
      std::vector<BeamState> local;
      const auto by_sq = [](const Child& x, const Child& y) { return x.sq < y.sq; };
      double cutoff = std::numeric_limits<double>::infinity();
      if (children.size() > m) {
        std::nth_element(children.begin(), children.begin() + static_cast<std::ptrdiff_t>(m - 1),
                         children.end(), by_sq);
        cutoff = children[m - 1].sq;
      }
      for (const auto& ch : children) {
        if (ch.sq > cutoff) continue;
        BeamState st;
        st.path = parent.path;
        st.path.push_back({ch.col, ch.coeff});
        st.key = WiringRow(st.path).canonical();
        st.r = parent.r;
        detail::subtract_scaled(st.r, c.row(ch.col), ch.coeff.value());
        st.sq = ch.sq;
        local.push_back(std::move(st));
      }
      local.push_back(parent);
      std::sort(local.begin(), local.end(), state_less);
      if (local.size() > m) local.resize(m);
      for (auto& st : local) pool.push_back(std::move(st));
    }
    std::sort(pool.begin(), pool.end(), state_less);
    std::vector<BeamState> next;
    take_distinct(pool, next, m);
    omega = std::move(next);
  }
  return detail::sorted_row(omega.front().path);
}

WiringRow solve_row(Engine engine, std::span<const double> a_n, const DenseMatrix& c, const SolverConfig& cfg) {
  switch (engine) {
    case Engine::Dmp: return dmp_row(a_n, c, cfg);
    case Engine::Exhaustive: return exhaustive_row(a_n, c, cfg);
    case Engine::Beam: return beam_row(a_n, c, cfg);
  }
  throw SpecError("unknown engine");
}

}  // namespace lcc
