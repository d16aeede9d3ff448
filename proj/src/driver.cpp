#include "lcc/driver.hpp"

#include <exception>
#include <string>

namespace lcc {
namespace {

void check_step_inputs(const DenseMatrix& target, const DenseMatrix& c, const SolverConfig& cfg, Engine engine) {
  if (target.rows() != c.rows() || target.cols() != c.cols())
    throw StructuralError("target is " + std::to_string(target.rows()) + "x" + std::to_string(target.cols()) +
                          " but codebook is " + std::to_string(c.rows()) + "x" + std::to_string(c.cols()));
  cfg.validate(engine);
  if (engine == Engine::Exhaustive) {
    const double estimate = exhaustive_work_estimate(c.rows(), cfg);
    if (estimate > cfg.work_cap) throw BudgetError(estimate, cfg.work_cap, "wiring step");
  }
}

[[noreturn]] void rethrow_for_row(std::size_t row, const std::exception_ptr& err) {
  const std::string where = "row " + std::to_string(row) + ": ";
  try {
    std::rethrow_exception(err);
  } catch (const BudgetError& e) {
    throw BudgetError(e.estimate(), e.cap(), "row " + std::to_string(row));
  } catch (const StructuralError& e) {
    throw StructuralError(where + e.what());
  } catch (const SpecError& e) {
    throw SpecError(where + e.what());
  }
}

WiringMatrix assemble(std::vector<WiringRow> rows, const std::vector<std::exception_ptr>& errors,
                      const DenseMatrix& c, const SolverConfig& cfg) {
  for (std::size_t n = 0; n < errors.size(); ++n)
    if (errors[n]) rethrow_for_row(n, errors[n]);
  return {std::move(rows), c.rows(), cfg.s_terms};
}

}  // namespace

WiringMatrix wiring_step(const DenseMatrix& target, const DenseMatrix& c, const SolverConfig& cfg, Engine engine) {
  check_step_inputs(target, c, cfg, engine);
  const auto n = static_cast<long>(target.rows());
  std::vector<WiringRow> rows(target.rows());
  std::vector<std::exception_ptr> errors(target.rows());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    try {
      rows[i] = solve_row(engine, target.row(i), c, cfg);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  return assemble(std::move(rows), errors, c, cfg);
}

WiringMatrix wiring_step_serial(const DenseMatrix& target, const DenseMatrix& c, const SolverConfig& cfg,
                                Engine engine) {
  check_step_inputs(target, c, cfg, engine);
  std::vector<WiringRow> rows(target.rows());
  std::vector<std::exception_ptr> errors(target.rows());
  for (std::size_t i = 0; i < target.rows(); ++i) {
    try {
      rows[i] = solve_row(engine, target.row(i), c, cfg);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  return assemble(std::move(rows), errors, c, cfg);
}

void DriverConfig::validate() const {
  if (warmup_steps > total_steps)
    throw SpecError("warm-up steps (" + std::to_string(warmup_steps) + ") exceed total steps (" +
                    std::to_string(total_steps) + ")");
  if (warmup_steps > 0 && warmup_s < 1) throw SpecError("warm-up S must be >= 1");
  if (total_steps > warmup_steps) solver.validate(engine);
}

DecomposeResult decompose(const DenseMatrix& a, const DriverConfig& driver) {
  driver.validate();
  const double signal = squared_norm(a.data());

  SolverConfig warm;
  warm.s_terms = driver.warmup_s;
  warm.coeff_set = driver.warmup_coeff_set;
  warm.work_cap = driver.solver.work_cap;

  DenseMatrix codebook = DenseMatrix::augmented_identity(a.rows(), a.cols());
  double error = squared_distance(a.data(), codebook.data());
  std::vector<WiringMatrix> steps;
  std::vector<TraceRow> trace;
  trace.push_back({0, sqnr_from_energies(signal, error), 0, 0});

  CostReport total;
  for (std::size_t i = 1; i <= driver.total_steps; ++i) {
    if (driver.target_db && trace.back().sqnr.reaches_db(*driver.target_db)) break;
    const bool warmup = i <= driver.warmup_steps;
    const Engine engine = warmup ? Engine::Dmp : driver.engine;
    const SolverConfig& cfg = warmup ? warm : driver.solver;

    WiringMatrix w = driver.parallel ? wiring_step(a, codebook, cfg, engine)
                                     : wiring_step_serial(a, codebook, cfg, engine);
    DenseMatrix next = apply_wiring(w, codebook);
    const double next_error = squared_distance(a.data(), next.data());
    if (cfg.identity_admissible() && next_error > error * (1.0 + 1e-9))
      throw ConsistencyError("wiring step " + std::to_string(i) + " increased the squared error from " +
                             std::to_string(error) + " to " + std::to_string(next_error));

    const auto c = step_cost(w);
    total.nominal_adds += c.nominal_adds;
    total.effective_adds += c.effective_adds;
    trace.push_back({i, sqnr_from_energies(signal, next_error), total.nominal_adds, total.effective_adds});

    steps.push_back(std::move(w));
    codebook = std::move(next);
    error = next_error;
  }
  return {Decomposition(a.rows(), a.cols(), std::move(steps)), std::move(trace)};
}

}  // namespace lcc
