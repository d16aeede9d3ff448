#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "lcc/driver.hpp"
#include "lcc/experiment.hpp"
#include "oracles.hpp"

using namespace lcc;

namespace {

DriverConfig dmp_driver(std::size_t steps, std::size_t s = 2) {
  DriverConfig d;
  d.total_steps = steps;
  d.warmup_steps = 0;
  d.engine = Engine::Dmp;
  d.solver.s_terms = s;
  return d;
}

}  // namespace

// Values below come from tests/oracle/dmp_reference.py run on the same
// generated matrices.
TEST_CASE("first step residuals match the reference") {
  const auto a = gaussian_matrix(8, 2, 11);
  const double first_row[] = {0.11488167137263523, 2.0813784947308394};
  CHECK(a(0, 0) == first_row[0]);
  CHECK(a(0, 1) == first_row[1]);
  CHECK(a(7, 1) == -0.3875451948395064);

  const double expected[] = {0.08200512166242178, 0.09925135327820146, 0.10586224006230267, 0.00589671506376689,
                             0.038236453664113185, 0.019690914680723766, 0.4542162087503986, 0.26297177904823};
  const auto res = decompose(a, dmp_driver(1));
  REQUIRE(res.decomposition.steps().size() == 1);
  const auto c0 = DenseMatrix::augmented_identity(8, 2);
  for (std::size_t n = 0; n < 8; ++n) {
    CAPTURE(n);
    CHECK(row_residual(a.row(n), res.decomposition.steps()[0].row(n), c0) ==
          doctest::Approx(expected[n]).epsilon(1e-12));
  }
  CHECK(*res.trace[1].sqnr.db() == doctest::Approx(14.715208113567366).epsilon(1e-12));
}

TEST_CASE("ten step trace matches the reference") {
  const auto a = gaussian_matrix(16, 2, 5);
  const auto res = decompose(a, dmp_driver(10));
  REQUIRE(res.trace.size() == 11);
  CHECK(*res.trace[1].sqnr.db() == doctest::Approx(16.661481721335704).epsilon(1e-12));
  CHECK(*res.trace[10].sqnr.db() == doctest::Approx(158.75703395577463).epsilon(1e-9));
  for (std::size_t i = 1; i < res.trace.size(); ++i) CHECK(*res.trace[i].sqnr.db() > *res.trace[i - 1].sqnr.db());
  CHECK(res.trace[10].nominal_adds == 160);
}

TEST_CASE("reconstruction agrees with the trace") {
  const auto a = gaussian_matrix(12, 3, 8);
  const auto res = decompose(a, dmp_driver(6, 3));
  const auto p = reconstruct(res.decomposition);
  const auto last = sqnr(a, p);
  CHECK(last.ratio == doctest::Approx(res.trace.back().sqnr.ratio).epsilon(1e-12));
  const auto dense = oracle::dense_product(res.decomposition);
  CHECK(oracle::frobenius_distance(dense, p) <= 1e-9 * std::sqrt(squared_norm(p.data())));
}

TEST_CASE("row permutation permutes the wiring rows") {
  const auto a = gaussian_matrix(10, 2, 4);
  std::vector<std::size_t> perm(10);
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(1);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<double> data;
  for (std::size_t n = 0; n < 10; ++n)
    for (std::size_t k = 0; k < 2; ++k) data.push_back(a(perm[n], k));
  const DenseMatrix b(10, 2, data);
  // within one step against the same codebook, each row is independent
  const auto c = gaussian_matrix(10, 2, 77);
  for (Engine e : {Engine::Dmp, Engine::Beam, Engine::Exhaustive}) {
    SolverConfig cfg;
    cfg.s_terms = 2;
    cfg.coeff_set = CoeffSet(-6, 2);
    cfg.memory = 4;
    const auto wa = wiring_step(a, c, cfg, e);
    const auto wb = wiring_step(b, c, cfg, e);
    for (std::size_t n = 0; n < 10; ++n) CHECK(wb.row(n) == wa.row(perm[n]));
  }
}

TEST_CASE("parallel and serial steps agree") {
  const auto a = gaussian_matrix(24, 3, 9);
  const auto c = gaussian_matrix(24, 3, 10);
  for (Engine e : {Engine::Dmp, Engine::Beam, Engine::Exhaustive}) {
    SolverConfig cfg;
    cfg.s_terms = 2;
    cfg.coeff_set = CoeffSet(-8, 2);
    cfg.memory = 5;
    CHECK(wiring_step(a, c, cfg, e) == wiring_step_serial(a, c, cfg, e));
  }
  auto d = dmp_driver(5);
  const auto par = decompose(a, d);
  d.parallel = false;
  const auto ser = decompose(a, d);
  CHECK(par.decomposition == ser.decomposition);
}

TEST_CASE("error never grows when the identity row is admissible") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const auto a = gaussian_matrix(8, 2, seed);
    DriverConfig d;
    d.total_steps = 6;
    d.warmup_steps = 2;
    d.engine = seed % 2 ? Engine::Beam : Engine::Exhaustive;
    d.solver.s_terms = 2;
    d.solver.coeff_set = CoeffSet(-10, 2);
    d.solver.memory = 3;
    const auto res = decompose(a, d);
    for (std::size_t i = 1; i < res.trace.size(); ++i) CHECK(res.trace[i].sqnr.ratio >= res.trace[i - 1].sqnr.ratio);
  }
}

TEST_CASE("zero steps and exact targets") {
  const auto a = gaussian_matrix(4, 2, 3);
  const auto res = decompose(a, dmp_driver(0));
  CHECK(res.decomposition.steps().empty());
  REQUIRE(res.trace.size() == 1);
  CHECK(res.trace[0].nominal_adds == 0);
  CHECK(reconstruct(res.decomposition) == DenseMatrix::augmented_identity(4, 2));

  const auto id = DenseMatrix::augmented_identity(5, 3);
  const auto exact = decompose(id, dmp_driver(3));
  CHECK(exact.trace[0].sqnr.exact);
  CHECK(exact.trace.back().sqnr.exact);
}

TEST_CASE("target dB stops early") {
  const auto a = gaussian_matrix(16, 2, 5);
  auto d = dmp_driver(10);
  d.target_db = 40.0;
  const auto res = decompose(a, d);
  CHECK(res.trace.back().sqnr.reaches_db(40.0));
  CHECK(res.trace.size() < 11);
  CHECK_FALSE(res.trace[res.trace.size() - 2].sqnr.reaches_db(40.0));
}

TEST_CASE("driver validation and errors") {
  auto d = dmp_driver(1);
  d.warmup_steps = 2;
  CHECK_THROWS_AS(decompose(gaussian_matrix(4, 2, 1), d), SpecError);
  DriverConfig ex;
  ex.total_steps = 1;
  ex.warmup_steps = 0;
  ex.engine = Engine::Exhaustive;
  ex.solver.s_terms = 3;
  ex.solver.coeff_set = CoeffSet(-40, 3);
  CHECK_THROWS_AS(decompose(gaussian_matrix(32, 4, 1), ex), BudgetError);
  SolverConfig cfg;
  CHECK_THROWS_AS(wiring_step(gaussian_matrix(4, 2, 1), gaussian_matrix(3, 2, 1), cfg, Engine::Dmp), StructuralError);
}
