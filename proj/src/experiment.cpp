#include "lcc/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <map>
#include <sstream>

#include "lcc/io.hpp"

namespace lcc {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

GaussianSource::GaussianSource(std::uint64_t seed) : engine_(splitmix64(seed)) {}

double GaussianSource::uniform() {
  return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
}

double GaussianSource::next() {
  if (spare_) {
    const double v = *spare_;
    spare_.reset();
    return v;
  }
  const double radius = std::sqrt(-2.0 * std::log(uniform()));
  const double angle = 2.0 * M_PI * uniform();
  spare_ = radius * std::sin(angle);
  return radius * std::cos(angle);
}

DenseMatrix gaussian_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  GaussianSource src(seed);
  std::vector<double> data(rows * cols);
  for (double& v : data) v = src.next();
  return {rows, cols, std::move(data)};
}

std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial) noexcept {
  return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(trial) + 0x5eedULL));
}

void ExperimentSpec::validate() const {
  if (trials < 1) throw SpecError("trials must be >= 1");
  if (!input && (n < 1 || k < 1)) throw SpecError("shape must be positive");
  driver.validate();
}

namespace {

DenseMatrix trial_matrix(const ExperimentSpec& spec, std::size_t trial, const std::optional<DenseMatrix>& file_matrix) {
  if (file_matrix) return *file_matrix;
  return gaussian_matrix(spec.n, spec.k, trial_seed(spec.seed, trial));
}

std::vector<ResultRow> trace_rows(std::size_t trial, const std::vector<TraceRow>& trace) {
  std::vector<ResultRow> out;
  for (const auto& t : trace) out.push_back({trial, t.step, t.nominal_adds, t.effective_adds, t.sqnr});
  return out;
}

ExperimentResult run(const ExperimentSpec& spec, bool parallel) {
  spec.validate();
  ExperimentResult result{spec, {}, {}};
  std::optional<DenseMatrix> file_matrix;
  std::size_t trials = spec.trials;
  if (spec.input) {
    file_matrix = io::matrix_from_csv(io::read_file(*spec.input));
    result.spec.n = file_matrix->rows();
    result.spec.k = file_matrix->cols();
    result.spec.trials = trials = 1;
  }
  DriverConfig driver = spec.driver;
  driver.parallel = false;

  std::vector<std::vector<ResultRow>> per_trial(trials);
  std::vector<std::exception_ptr> errors(trials);
  const auto body = [&](std::size_t t) {
    try {
      per_trial[t] = trace_rows(t, decompose(trial_matrix(spec, t, file_matrix), driver).trace);
    } catch (...) {
      errors[t] = std::current_exception();
    }
  };
  if (parallel) {
    const auto count = static_cast<long>(trials);
#pragma omp parallel for schedule(dynamic)
    for (long t = 0; t < count; ++t) body(static_cast<std::size_t>(t));
  } else {
    for (std::size_t t = 0; t < trials; ++t) body(t);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  for (auto& rows : per_trial) result.rows.insert(result.rows.end(), rows.begin(), rows.end());
  result.aggregate = aggregate_rows(result.rows);
  return result;
}

std::string sqnr_field(const Sqnr& s) { return s.exact ? "exact" : io::format_double(*s.db()); }

std::size_t reported_memory(const DriverConfig& d) { return d.engine == Engine::Beam ? d.solver.memory : 1; }

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec) { return run(spec, true); }
ExperimentResult run_experiment_serial(const ExperimentSpec& spec) { return run(spec, false); }

std::vector<AggregateRow> aggregate_rows(const std::vector<ResultRow>& rows) {
  std::map<std::size_t, AggregateRow> by_step;
  std::map<std::size_t, double> sums;
  for (const auto& r : rows) {
    auto& agg = by_step[r.step];
    agg.step = r.step;
    agg.nominal_adds = r.nominal_adds;
    ++agg.trials;
    if (r.sqnr.exact)
      ++agg.exact_trials;
    else
      sums[r.step] += *r.sqnr.db();
  }
  std::vector<AggregateRow> out;
  for (auto& [step, agg] : by_step) {
    if (agg.trials > agg.exact_trials) agg.mean_db = sums[step] / static_cast<double>(agg.trials - agg.exact_trials);
    out.push_back(agg);
  }
  return out;
}

std::string results_csv(const ExperimentResult& r) {
  const auto& d = r.spec.driver;
  std::ostringstream os;
  os << "trial,step,engine,S,M,cumulative_nominal_adds,cumulative_effective_adds,sqnr_db\n";
  for (const auto& row : r.rows)
    os << row.trial << ',' << row.step << ',' << engine_name(d.engine) << ',' << d.solver.s_terms << ','
       << reported_memory(d) << ',' << row.nominal_adds << ',' << row.effective_adds << ',' << sqnr_field(row.sqnr)
       << '\n';
  return os.str();
}

std::string aggregate_csv(const ExperimentResult& r) {
  const auto& s = r.spec;
  const auto& d = s.driver;
  std::ostringstream os;
  os << "# n=" << s.n << '\n'
     << "# k=" << s.k << '\n'
     << "# seed=" << s.seed << '\n'
     << "# trials=" << s.trials << '\n'
     << "# ensemble=" << (s.input ? "file" : "gaussian") << '\n'
     << "# averaging=mean-of-db\n"
     << "# warmup_steps=" << d.warmup_steps << " warmup_s=" << d.warmup_s << '\n';
  if (d.solver.coeff_set)
    os << "# exponents=" << d.solver.coeff_set->min_exponent() << ".." << d.solver.coeff_set->max_exponent()
       << " zero=" << (d.solver.coeff_set->include_zero() ? 1 : 0) << '\n';
  else
    os << "# exponents=unbounded\n";
  os << "engine,S,M,step,cumulative_nominal_adds,trials,exact_trials,mean_sqnr_db\n";
  for (const auto& a : r.aggregate) {
    os << engine_name(d.engine) << ',' << d.solver.s_terms << ',' << reported_memory(d) << ',' << a.step << ','
       << a.nominal_adds << ',' << a.trials << ',' << a.exact_trials << ','
       << (a.mean_db ? io::format_double(*a.mean_db) : std::string("exact")) << '\n';
  }
  return os.str();
}

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  while (true) {
    const auto p = s.find(sep);
    out.push_back(s.substr(0, p));
    if (p == std::string_view::npos) break;
    s = s.substr(p + 1);
  }
  return out;
}

template <class T>
T to_number(std::string_view s, const char* what) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw IoError(std::string("aggregate CSV: bad ") + what + " '" + std::string(s) + "'");
  return v;
}

}  // namespace

Curve parse_aggregate_csv(std::string_view text) {
  Curve c;
  bool header = false;
  for (auto line : split(text, '\n')) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (line.front() == '#') {
      for (auto kv : split(line.substr(1), ' ')) {
        const auto eq = kv.find('=');
        if (eq == std::string_view::npos) continue;
        const auto key = kv.substr(0, eq), value = kv.substr(eq + 1);
        if (key == "n") c.n = to_number<std::size_t>(value, "n");
        else if (key == "k") c.k = to_number<std::size_t>(value, "k");
        else if (key == "seed") c.seed = to_number<std::uint64_t>(value, "seed");
        else if (key == "trials") c.trials = to_number<std::size_t>(value, "trials");
        else if (key == "ensemble") c.ensemble = std::string(value);
      }
      continue;
    }
    if (!header) {
      if (line != "engine,S,M,step,cumulative_nominal_adds,trials,exact_trials,mean_sqnr_db")
        throw IoError("aggregate CSV: unexpected header '" + std::string(line) + "'");
      header = true;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 8) throw IoError("aggregate CSV: expected 8 fields in '" + std::string(line) + "'");
    if (c.engine.empty()) {
      c.engine = std::string(f[0]);
      c.s_terms = to_number<std::size_t>(f[1], "S");
      c.memory = to_number<std::size_t>(f[2], "M");
    }
    AggregateRow a;
    a.step = to_number<std::size_t>(f[3], "step");
    a.nominal_adds = to_number<long long>(f[4], "adds");
    a.trials = to_number<std::size_t>(f[5], "trials");
    a.exact_trials = to_number<std::size_t>(f[6], "exact_trials");
    if (f[7] != "exact") a.mean_db = to_number<double>(f[7], "mean_sqnr_db");
    c.points.push_back(a);
  }
  if (!header) throw IoError("aggregate CSV: missing header");
  return c;
}

namespace {

// Points every trial reached, with a finite mean.
std::vector<AggregateRow> complete_points(const Curve& c) {
  std::size_t full = 0;
  for (const auto& p : c.points) full = std::max(full, p.trials);
  std::vector<AggregateRow> out;
  for (const auto& p : c.points)
    if (p.trials == full && p.mean_db) out.push_back(p);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.nominal_adds < b.nominal_adds; });
  return out;
}

std::optional<double> interpolate(const std::vector<AggregateRow>& pts, long long x) {
  if (pts.empty() || x < pts.front().nominal_adds || x > pts.back().nominal_adds) return std::nullopt;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].nominal_adds == x) {
      // With several points at the same cost, take the most refined one.
      std::size_t j = i;
      while (j + 1 < pts.size() && pts[j + 1].nominal_adds == x) ++j;
      return *pts[j].mean_db;
    }
    if (pts[i].nominal_adds > x) {
      const auto& lo = pts[i - 1];
      const auto& hi = pts[i];
      const double t = static_cast<double>(x - lo.nominal_adds) / static_cast<double>(hi.nominal_adds - lo.nominal_adds);
      return *lo.mean_db + t * (*hi.mean_db - *lo.mean_db);
    }
  }
  return std::nullopt;
}

}  // namespace

GainRow compare_curves(const Curve& baseline, const Curve& engine, double threshold_db) {
  GainRow g{engine.n, engine.k, engine.engine, engine.s_terms, engine.memory, std::nullopt, std::nullopt, 0, "ok"};
  const auto base = complete_points(baseline);
  const auto eng = complete_points(engine);
  const bool reached = std::any_of(base.begin(), base.end(), [&](const auto& p) { return *p.mean_db >= threshold_db; });
  if (!reached) {
    g.status = "threshold unreached";
    return g;
  }

  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& p : eng) {
    if (p.step == 0) continue;
    const auto yb = interpolate(base, p.nominal_adds);
    if (!yb || *yb < threshold_db) continue;
    sum += (*p.mean_db - *yb) / *yb;
    ++count;
  }
  if (count) g.gain_adds_pct = 100.0 * sum / static_cast<double>(count);
  g.points = count;

  sum = 0.0;
  count = 0;
  for (const auto& p : eng) {
    auto it = std::find_if(base.begin(), base.end(), [&](const auto& b) { return b.step == p.step; });
    if (p.step == 0 || it == base.end() || *it->mean_db < threshold_db) continue;
    sum += (*p.mean_db - *it->mean_db) / *it->mean_db;
    ++count;
  }
  if (count) g.gain_step_pct = 100.0 * sum / static_cast<double>(count);
  if (!g.gain_adds_pct) g.status = "no overlap";
  return g;
}

std::vector<GainRow> compare_report(const std::vector<Curve>& curves, double threshold_db) {
  auto it = std::find_if(curves.begin(), curves.end(), [](const Curve& c) { return c.engine == "dmp"; });
  if (it == curves.end()) throw SpecError("compare needs a DMP baseline curve");
  for (const auto& c : curves) {
    if (c.n != it->n || c.k != it->k) throw SpecError("compared curves have different matrix shapes");
    if (c.seed != it->seed || c.ensemble != it->ensemble)
      throw SpecError("compared curves come from different ensembles");
  }
  std::vector<GainRow> rows;
  for (const auto& c : curves) rows.push_back(compare_curves(*it, c, threshold_db));
  return rows;
}

std::string gain_table_csv(const std::vector<GainRow>& rows) {
  auto opt = [](const std::optional<double>& v) { return v ? io::format_double(*v) : std::string(); };
  std::ostringstream os;
  os << "n,k,engine,S,M,gain_adds_matched_pct,gain_step_matched_pct,points,status\n";
  for (const auto& r : rows)
    os << r.n << ',' << r.k << ',' << r.engine << ',' << r.s_terms << ',' << r.memory << ',' << opt(r.gain_adds_pct)
       << ',' << opt(r.gain_step_pct) << ',' << r.points << ',' << r.status << '\n';
  return os.str();
}

}  // namespace lcc
