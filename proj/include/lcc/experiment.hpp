#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "lcc/driver.hpp"

namespace lcc {

/// Deterministic N(0,1) source: std::mt19937_64 (fully specified by the
/// standard) seeded with splitmix64(seed), 53-bit uniforms, Box-Muller.
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed);
  double next();

 private:
  double uniform();  // in (0, 1]

  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Row-major N x K matrix of i.i.d. N(0,1) entries.
DenseMatrix gaussian_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed);

/// Seed of trial t in an ensemble with base seed s.
std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial) noexcept;

struct ExperimentSpec {
  std::size_t n = 16;
  std::size_t k = 2;
  std::uint64_t seed = 1;
  std::size_t trials = 1;
  /// When set, the single matrix in this file replaces the Gaussian ensemble.
  std::optional<std::filesystem::path> input;
  DriverConfig driver;

  void validate() const;
};

struct ResultRow {
  std::size_t trial = 0;
  std::size_t step = 0;
  long long nominal_adds = 0;
  long long effective_adds = 0;
  Sqnr sqnr;
};

struct AggregateRow {
  std::size_t step = 0;
  long long nominal_adds = 0;
  std::size_t trials = 0;        // trials that reached this step
  std::size_t exact_trials = 0;  // of those, exact reconstructions
  std::optional<double> mean_db;  // mean over the non-exact trials, in dB
};

struct ExperimentResult {
  ExperimentSpec spec;
  std::vector<ResultRow> rows;  // sorted by (trial, step)
  std::vector<AggregateRow> aggregate;
};

/// Decomposes every trial (in parallel) and aggregates per step.
ExperimentResult run_experiment(const ExperimentSpec& spec);
/// Single-threaded reference for run_experiment.
ExperimentResult run_experiment_serial(const ExperimentSpec& spec);

std::vector<AggregateRow> aggregate_rows(const std::vector<ResultRow>& rows);

/// trial,step,engine,S,M,cumulative_nominal_adds,cumulative_effective_adds,sqnr_db
std::string results_csv(const ExperimentResult& r);
/// Metadata comment lines, then engine,S,M,step,cumulative_nominal_adds,trials,exact_trials,mean_sqnr_db
std::string aggregate_csv(const ExperimentResult& r);

/// One engine curve read back from an aggregate CSV.
struct Curve {
  std::size_t n = 0;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  std::string ensemble;
  std::string engine;
  std::size_t s_terms = 0;
  std::size_t memory = 0;
  std::vector<AggregateRow> points;
};

Curve parse_aggregate_csv(std::string_view text);

struct GainRow {
  std::size_t n = 0;
  std::size_t k = 0;
  std::string engine;
  std::size_t s_terms = 0;
  std::size_t memory = 0;
  std::optional<double> gain_adds_pct;  // headline: matched cumulative nominal adds
  std::optional<double> gain_step_pct;  // matched step index
  std::size_t points = 0;
  std::string status;  // "ok" or "threshold unreached"
};

/// Relative dB-SQNR gain of `engine` over `baseline`, averaged over the
/// points where the baseline is at or above threshold_db. The adds-matched
/// gain interpolates the baseline linearly in cumulative nominal adds.
GainRow compare_curves(const Curve& baseline, const Curve& engine, double threshold_db = 47.0);

/// The first DMP curve is the baseline; every curve (baseline included) gets a row.
std::vector<GainRow> compare_report(const std::vector<Curve>& curves, double threshold_db = 47.0);
std::string gain_table_csv(const std::vector<GainRow>& rows);

}  // namespace lcc
