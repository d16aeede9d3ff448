#include <doctest.h>

#include <cmath>
#include <random>

#include "lcc/solvers.hpp"
#include "oracles.hpp"

using namespace lcc;

namespace {

SolverConfig config(std::size_t s, std::optional<CoeffSet> set, std::size_t m = 1) {
  SolverConfig cfg;
  cfg.s_terms = s;
  cfg.coeff_set = set;
  cfg.memory = m;
  return cfg;
}

void check_admissible(const WiringRow& row, const SolverConfig& cfg, std::size_t n) {
  CHECK(row.terms().size() <= cfg.s_terms);
  for (const auto& t : row.terms()) {
    CHECK(t.col < n);
    if (cfg.coeff_set) CHECK(cfg.coeff_set->contains(t.coeff));
  }
}

}  // namespace

TEST_CASE("engine names") {
  CHECK(parse_engine("dmp") == Engine::Dmp);
  CHECK(parse_engine("beam") == Engine::Beam);
  CHECK(parse_engine("exhaustive") == Engine::Exhaustive);
  CHECK(engine_name(Engine::Beam) == "beam");
  CHECK_THROWS_AS(parse_engine("greedy"), SpecError);
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(config(0, std::nullopt).validate(Engine::Dmp), SpecError);
  CHECK_THROWS_AS(config(2, std::nullopt, 0).validate(Engine::Beam), SpecError);
  CHECK_THROWS_AS(config(2, std::nullopt).validate(Engine::Exhaustive), SpecError);
  CHECK_NOTHROW(config(2, CoeffSet(-2, 2)).validate(Engine::Exhaustive));
  CHECK(config(2, std::nullopt).identity_admissible());
  CHECK(config(2, CoeffSet(-2, 2)).identity_admissible());
  CHECK_FALSE(config(2, CoeffSet(1, 2)).identity_admissible());
}

TEST_CASE("exhaustive matches ordered tuple enumeration") {
  std::mt19937_64 rng(2024);
  struct Case {
    std::size_t n, k, s;
    int lo, hi;
    bool zero;
    int count;
  };
  const Case cases[] = {
      {3, 2, 1, -2, 1, true, 40},  {4, 2, 2, -2, 1, true, 40},  {4, 3, 2, -1, 1, false, 30},
      {3, 2, 3, -2, 1, true, 25},  {3, 2, 3, -1, 1, false, 25}, {4, 2, 3, -1, 0, true, 15},
      {3, 2, 4, -1, 0, true, 6},   {3, 1, 4, -1, 1, false, 4},  {5, 2, 2, -3, 2, true, 20},
  };
  for (const auto& cs : cases) {
    const CoeffSet set(cs.lo, cs.hi, cs.zero);
    const auto cfg = config(cs.s, set);
    for (int i = 0; i < cs.count; ++i) {
      const auto c = oracle::random_matrix(cs.n, cs.k, rng);
      const auto a = oracle::random_vector(cs.k, rng);
      const auto row = exhaustive_row(a, c, cfg);
      check_admissible(row, cfg, cs.n);
      const double got = row_residual(a, row, c);
      const double want = oracle::naive_exhaustive_min(a, c, cs.s, set);
      CAPTURE(cs.n);
      CAPTURE(cs.s);
      CHECK(got == want);
    }
  }
}

TEST_CASE("single-term search spaces coincide") {
  std::mt19937_64 rng(41);
  const CoeffSet set(-3, 2, true);
  for (int i = 0; i < 50; ++i) {
    const auto c = oracle::random_matrix(5, 2, rng);
    const auto a = oracle::random_vector(2, rng);
    CHECK(exhaustive_row(a, c, config(1, set)) == dmp_row(a, c, config(1, set)));
  }
}

TEST_CASE("targets inside the span are hit exactly") {
  std::mt19937_64 rng(43);
  const auto c = oracle::random_matrix(4, 3, rng);
  std::vector<double> a(3);
  for (std::size_t k = 0; k < 3; ++k) a[k] = std::ldexp(c(0, k), -3) - std::ldexp(c(2, k), 1);
  const auto row = exhaustive_row(a, c, config(2, CoeffSet(-4, 2)));
  CHECK(row_residual(a, row, c) == 0.0);
  CHECK(row == WiringRow({{0, Pow2Coeff::make(1, -3)}, {2, Pow2Coeff::make(-1, 1)}}));

  for (Engine e : {Engine::Dmp, Engine::Beam, Engine::Exhaustive}) {
    const auto r3 = solve_row(e, c.row(3), c, config(1, CoeffSet(-2, 2), 4));
    CHECK(r3 == WiringRow({{3, Pow2Coeff::make(1, 0)}}));
  }
}

TEST_CASE("exhaustive handles degenerate codebooks") {
  std::mt19937_64 rng(3);
  const CoeffSet set(-2, 2);
  // parallel columns and a duplicated row
  const DenseMatrix c(4, 2, {1.0, 2.0, 2.0, 4.0, 1.0, 2.0, -0.5, 0.25});
  for (std::size_t s = 1; s <= 3; ++s) {
    const auto cfg = config(s, set);
    for (int i = 0; i < 10; ++i) {
      const auto a = oracle::random_vector(2, rng);
      CHECK(row_residual(a, exhaustive_row(a, c, cfg), c) == oracle::naive_exhaustive_min(a, c, s, set));
    }
  }
  const DenseMatrix zeros(3, 2);
  const std::vector<double> a{1.0, -2.0};
  for (Engine e : {Engine::Dmp, Engine::Beam, Engine::Exhaustive}) {
    const auto row = solve_row(e, a, zeros, config(2, set, 3));
    CHECK(row_residual(a, row, zeros) == doctest::Approx(std::sqrt(5.0)));
  }
  CHECK(dmp_row(a, zeros, config(2, set)).terms().empty());
}

TEST_CASE("exhaustive budget") {
  const auto cfg = config(3, CoeffSet(-40, 3));
  CHECK(exhaustive_work_estimate(32, cfg) == doctest::Approx(std::pow(32.0 * 89.0, 3)));
  CHECK(exhaustive_work_estimate(32, config(3, std::nullopt)) == INFINITY);
  std::mt19937_64 rng(1);
  const auto c = oracle::random_matrix(32, 4, rng);
  const auto a = oracle::random_vector(4, rng);
  try {
    exhaustive_row(a, c, cfg);
    FAIL("expected a budget error");
  } catch (const BudgetError& e) {
    CHECK(e.estimate() > e.cap());
    CHECK(e.cap() == 1e10);
  }
  auto roomy = cfg;
  roomy.work_cap = 1e11;
  CHECK_NOTHROW(exhaustive_row(a, oracle::random_matrix(4, 4, rng), roomy));
}

TEST_CASE("dmp matches brute-force greedy on a finite alphabet") {
  std::mt19937_64 rng(99);
  const CoeffSet set(-4, 2, true);
  for (std::size_t s = 1; s <= 4; ++s) {
    const auto cfg = config(s, set);
    for (int i = 0; i < 50; ++i) {
      const auto c = oracle::random_matrix(6, 2, rng);
      const auto a = oracle::random_vector(2, rng);
      const auto row = dmp_row(a, c, cfg);
      check_admissible(row, cfg, 6);
      CHECK(row.dense(6) == oracle::brute_dmp(a, c, s, set));
    }
  }
}

TEST_CASE("unbounded dmp matches brute force over a wide window") {
  std::mt19937_64 rng(5);
  const CoeffSet window(-80, 20, true);
  for (std::size_t s = 1; s <= 3; ++s) {
    for (int i = 0; i < 40; ++i) {
      const auto c = oracle::random_matrix(5, 3, rng);
      const auto a = oracle::random_vector(3, rng);
      const auto row = dmp_row(a, c, config(s, std::nullopt));
      CHECK(row.dense(5) == oracle::brute_dmp(a, c, s, window));
    }
  }
}

TEST_CASE("dmp never increases the residual and skips hopeless steps") {
  const auto c = DenseMatrix::augmented_identity(2, 2);
  const std::vector<double> a{1.0, 0.0};
  const auto row = dmp_row(a, c, config(5, std::nullopt));
  CHECK(row.terms().size() == 1);
  CHECK(row_residual(a, row, c) == 0.0);
  const std::vector<double> zero{0.0, 0.0};
  CHECK(dmp_row(zero, c, config(3, CoeffSet(-2, 2))).terms().empty());
}

TEST_CASE("beam with memory one reproduces dmp") {
  std::mt19937_64 rng(17);
  for (const std::optional<CoeffSet>& set : {std::optional<CoeffSet>{}, std::optional<CoeffSet>{CoeffSet(-6, 2)}}) {
    for (std::size_t s = 1; s <= 4; ++s) {
      for (int i = 0; i < 40; ++i) {
        const auto c = oracle::random_matrix(8, 3, rng);
        const auto a = oracle::random_vector(3, rng);
        const auto d = dmp_row(a, c, config(s, set));
        const auto b = beam_row(a, c, config(s, set, 1));
        CHECK(b == d);
        CHECK(row_residual(a, b, c) == row_residual(a, d, c));
      }
    }
  }
}

TEST_CASE("wide beam on a tiny instance is no worse than dmp") {
  std::mt19937_64 rng(31);
  const CoeffSet set(-1, 1, true);
  for (int i = 0; i < 30; ++i) {
    const auto c = oracle::random_matrix(3, 2, rng);
    const auto a = oracle::random_vector(2, rng);
    for (std::size_t s = 1; s <= 4; ++s) {
      const double b = row_residual(a, beam_row(a, c, config(s, set, 3 * set.size())), c);
      CHECK(b <= row_residual(a, dmp_row(a, c, config(s, set)), c));
    }
  }
}

TEST_CASE("exhaustive <= beam <= dmp for S <= 2") {
  std::mt19937_64 rng(23);
  const CoeffSet set(-2, 2, true);
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = 2 + i % 5, k = 1 + i % 3, s = 1 + i % 2, m = std::size_t{1} << (i % 4);
    const auto c = oracle::random_matrix(n, k, rng);
    const auto a = oracle::random_vector(k, rng);
    const double e = row_residual(a, exhaustive_row(a, c, config(s, set)), c);
    const auto beam = beam_row(a, c, config(s, set, m));
    check_admissible(beam, config(s, set, m), n);
    const double b = row_residual(a, beam, c);
    const double d = row_residual(a, dmp_row(a, c, config(s, set)), c);
    CHECK(e <= b);
    CHECK(b <= d);
  }
}

TEST_CASE("exhaustive lower-bounds beam for longer rows") {
  std::mt19937_64 rng(29);
  const CoeffSet set(-3, 1, true);
  for (int i = 0; i < 30; ++i) {
    const auto c = oracle::random_matrix(4, 2, rng);
    const auto a = oracle::random_vector(2, rng);
    const double e = row_residual(a, exhaustive_row(a, c, config(3, set)), c);
    for (std::size_t m : {1, 2, 5, 10}) CHECK(e <= row_residual(a, beam_row(a, c, config(3, set, m)), c));
  }
}

TEST_CASE("solvers reject mismatched shapes") {
  const auto c = DenseMatrix::augmented_identity(3, 2);
  const std::vector<double> a{1.0, 2.0, 3.0};
  for (Engine e : {Engine::Dmp, Engine::Beam, Engine::Exhaustive})
    CHECK_THROWS_AS(solve_row(e, a, c, config(2, CoeffSet(-1, 1))), StructuralError);
}
