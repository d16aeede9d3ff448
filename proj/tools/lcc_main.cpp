// lcc: command-line front end for the decomposition library.
//
// Exit codes: 0 ok, 1 failure (e.g. verify-ir mismatch), 2 budget refusal,
// 3 I/O error, 4 invalid arguments or configuration.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lcc/codegen.hpp"
#include "lcc/driver.hpp"
#include "lcc/experiment.hpp"
#include "lcc/io.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitBudget = 2;
constexpr int kExitIo = 3;
constexpr int kExitSpec = 4;

struct SolverFlags {
  std::string engine = "dmp";
  std::size_t s_terms = 2;
  std::size_t memory = 1;
  std::optional<int> exp_min;
  std::optional<int> exp_max;
  bool no_zero = false;
  bool unbounded = false;
  std::size_t warmup_steps = 2;
  std::size_t warmup_s = 2;
  std::size_t steps = 10;
  std::optional<double> target_db;
  double budget = 1e10;

  void attach(CLI::App* app) {
    app->add_option("--engine", engine, "Row solver after warm-up")
        ->check(CLI::IsMember({"dmp", "exhaustive", "beam"}));
    app->add_option("--s-terms", s_terms, "Terms per wiring row (S)");
    app->add_option("--memory", memory, "Beam memory M");
    app->add_option("--exp-min", exp_min, "Smallest coefficient exponent (default -40)");
    app->add_option("--exp-max", exp_max, "Largest coefficient exponent (default 3)");
    app->add_flag("--no-zero-coeff", no_zero, "Exclude 0 from the coefficient set");
    app->add_flag("--unbounded", unbounded, "Use all powers of two (dmp and beam only)");
    app->add_option("--warmup-steps", warmup_steps, "Leading DMP steps");
    app->add_option("--warmup-s", warmup_s, "S of the warm-up steps");
    app->add_option("--steps", steps, "Number of wiring steps (cap when --target-db is set)");
    app->add_option("--target-db", target_db, "Stop once the SQNR reaches this value");
    app->add_option("--budget", budget, "Work cap for the exhaustive engine");
  }

  lcc::DriverConfig driver() const {
    lcc::DriverConfig d;
    d.engine = lcc::parse_engine(engine);
    d.total_steps = steps;
    // Fewer steps than the warm-up simply means the run ends inside it.
    d.warmup_steps = std::min(warmup_steps, steps);
    d.warmup_s = warmup_s;
    d.target_db = target_db;
    d.solver.s_terms = s_terms;
    d.solver.memory = memory;
    d.solver.work_cap = budget;
    const bool explicit_set = exp_min || exp_max || no_zero;
    if (unbounded) {
      if (explicit_set) throw lcc::SpecError("--unbounded conflicts with --exp-min/--exp-max/--no-zero-coeff");
      if (d.engine == lcc::Engine::Exhaustive) throw lcc::SpecError("the exhaustive engine needs a finite set");
    } else if (d.engine != lcc::Engine::Dmp || explicit_set) {
      d.solver.coeff_set = lcc::CoeffSet(exp_min.value_or(-40), exp_max.value_or(3), !no_zero);
    }
    d.validate();
    return d;
  }
};

void emit(const std::optional<std::string>& out, const std::string& content) {
  if (out && *out != "-")
    lcc::io::write_file(*out, content);
  else
    std::cout << content;
}

std::string trace_csv(const std::vector<lcc::TraceRow>& trace) {
  std::string s = "step,cumulative_nominal_adds,cumulative_effective_adds,sqnr_db\n";
  for (const auto& t : trace)
    s += std::to_string(t.step) + ',' + std::to_string(t.nominal_adds) + ',' + std::to_string(t.effective_adds) +
         ',' + (t.sqnr.exact ? std::string("exact") : lcc::io::format_double(*t.sqnr.db())) + '\n';
  return s;
}

// Flat key=value config: keys are long option names without "--". Values
// already given on the command line win.
std::vector<std::string> merge_config(std::vector<std::string> args, CLI::App& app) {
  std::optional<std::string> path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (!path || args.empty()) return args;

  CLI::App* sub = nullptr;
  for (auto* s : app.get_subcommands({}))
    if (s->get_name() == args.front()) sub = s;
  if (!sub) return args;

  auto given = [&](const std::string& flag) {
    return std::any_of(args.begin(), args.end(), [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
  };
  std::vector<std::string> injected;
  std::istringstream in(lcc::io::read_file(*path));
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = CLI::detail::trim_copy(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw lcc::SpecError("config line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = CLI::detail::trim_copy(line.substr(0, eq));
    const std::string value = CLI::detail::trim_copy(line.substr(eq + 1));
    const std::string flag = "--" + key;
    const CLI::Option* opt = sub->get_option_no_throw(flag);
    if (!opt) {
      std::cerr << "lcc: config key '" << key << "' does not apply to '" << sub->get_name() << "', ignored\n";
      continue;
    }
    if (given(flag)) continue;
    if (opt->get_expected_min() == 0) {
      if (value == "true" || value == "1" || value.empty()) injected.push_back(flag);
      continue;
    }
    injected.push_back(flag);
    std::istringstream vs(value);
    for (std::string tok; vs >> tok;) injected.push_back(tok);
  }
  args.insert(args.begin() + 1, injected.begin(), injected.end());
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linear computation coding: shift-add decompositions of constant matrices", "lcc"};
  app.require_subcommand(1);

  std::vector<std::size_t> shape{16, 2};
  std::uint64_t seed = 1;
  std::size_t trials = 1;
  std::optional<std::string> out, input, agg_out, program;
  SolverFlags flags;
  double threshold_db = 47.0;
  std::vector<std::string> aggregates;
  std::size_t samples = 1000;

  auto add_shape = [&](CLI::App* s) {
    s->add_option("--shape", shape, "Matrix shape N K")->expected(2);
    s->add_option("--seed", seed, "Ensemble seed");
  };

  auto* gen = app.add_subcommand("generate", "Write a Gaussian test matrix as CSV");
  add_shape(gen);
  gen->add_option("--out", out, "Output CSV (stdout if omitted)");

  auto* dec = app.add_subcommand("decompose", "Decompose one matrix and write its JSON decomposition");
  add_shape(dec);
  dec->add_option("--input", input, "Matrix CSV (a Gaussian matrix from --shape/--seed if omitted)");
  dec->add_option("--out", out, "Decomposition JSON (stdout if omitted)");
  dec->add_option("--trace", agg_out, "Write the per-step trace CSV here");
  flags.attach(dec);

  auto* run = app.add_subcommand("run", "Run an ensemble experiment and write result CSVs");
  add_shape(run);
  run->add_option("--trials", trials, "Number of Gaussian matrices");
  run->add_option("--input", input, "Use the matrix in this CSV instead of a Gaussian ensemble");
  run->add_option("--out", out, "Per-trial results CSV")->required();
  run->add_option("--agg-out", agg_out, "Aggregate CSV (default: <out>.agg.csv)");
  flags.attach(run);

  auto* cmp = app.add_subcommand("compare", "Gain table of aggregate CSVs against the DMP baseline");
  cmp->add_option("aggregates", aggregates, "Aggregate CSVs from 'run'")->required();
  cmp->add_option("--threshold-db", threshold_db, "Baseline SQNR threshold");
  cmp->add_option("--out", out, "Gain table CSV (stdout if omitted)");

  auto* emit_ir = app.add_subcommand("emit-ir", "Emit the shift-add program of a decomposition");
  emit_ir->add_option("--input", input, "Decomposition JSON")->required();
  emit_ir->add_option("--out", out, "Program .sap (stdout if omitted)");

  auto* verify = app.add_subcommand("verify-ir", "Check a shift-add program against its decomposition");
  verify->add_option("--program", program, "Program .sap")->required();
  verify->add_option("--input", input, "Decomposition JSON")->required();
  verify->add_option("--samples", samples, "Random input vectors to test");
  verify->add_option("--seed", seed, "Seed for the test vectors");

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = merge_config(std::move(args), app);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitSpec;
  } catch (const lcc::IoError& e) {
    std::cerr << "lcc: " << e.what() << '\n';
    return kExitIo;
  } catch (const lcc::Error& e) {
    std::cerr << "lcc: " << e.what() << '\n';
    return kExitSpec;
  }

  try {
    if (*gen) {
      emit(out, lcc::io::matrix_to_csv(lcc::gaussian_matrix(shape[0], shape[1], seed)));
    } else if (*dec) {
      const auto a = input ? lcc::io::matrix_from_csv(lcc::io::read_file(*input))
                           : lcc::gaussian_matrix(shape[0], shape[1], seed);
      const auto result = lcc::decompose(a, flags.driver());
      emit(out, lcc::io::decomposition_to_json(result.decomposition));
      const auto trace = trace_csv(result.trace);
      if (agg_out)
        lcc::io::write_file(*agg_out, trace);
      else
        std::cerr << trace;
    } else if (*run) {
      lcc::ExperimentSpec spec;
      spec.n = shape[0];
      spec.k = shape[1];
      spec.seed = seed;
      spec.trials = trials;
      if (input) spec.input = fs::path(*input);
      spec.driver = flags.driver();
      const auto result = lcc::run_experiment(spec);
      lcc::io::write_file(*out, lcc::results_csv(result));
      lcc::io::write_file(agg_out.value_or(*out + ".agg.csv"), lcc::aggregate_csv(result));
    } else if (*cmp) {
      std::vector<lcc::Curve> curves;
      for (const auto& path : aggregates) curves.push_back(lcc::parse_aggregate_csv(lcc::io::read_file(path)));
      emit(out, lcc::gain_table_csv(lcc::compare_report(curves, threshold_db)));
    } else if (*emit_ir) {
      const auto d = lcc::io::decomposition_from_json(lcc::io::read_file(*input));
      emit(out, lcc::export_text(lcc::emit(d)));
    } else if (*verify) {
      const auto d = lcc::io::decomposition_from_json(lcc::io::read_file(*input));
      const auto p = lcc::parse_text(lcc::io::read_file(*program));
      if (p.n_inputs() != d.k() || p.n_outputs() != d.n()) {
        std::cout << "FAIL shape: program " << p.n_inputs() << "->" << p.n_outputs() << ", decomposition "
                  << d.k() << "->" << d.n() << '\n';
        return kExitFailure;
      }
      lcc::GaussianSource src(seed);
      double worst = 0.0;
      for (std::size_t s = 0; s < samples; ++s) {
        std::vector<double> x(d.k());
        for (double& v : x) v = src.next();
        const auto want = lcc::apply(d, x);
        const auto got = lcc::interpret(p, x);
        const double err = std::sqrt(lcc::squared_distance(want, got));
        worst = std::max(worst, err / (1.0 + std::sqrt(lcc::squared_norm(want))));
      }
      const bool ok = worst <= 1e-9;
      std::cout << (ok ? "OK" : "FAIL") << " samples=" << samples << " max_rel_error=" << worst
                << " adds=" << p.add_count() << '\n';
      return ok ? kExitOk : kExitFailure;
    }
  } catch (const lcc::BudgetError& e) {
    std::cerr << "lcc: " << e.what() << '\n';
    return kExitBudget;
  } catch (const lcc::IoError& e) {
    std::cerr << "lcc: " << e.what() << '\n';
    return kExitIo;
  } catch (const lcc::SpecError& e) {
    std::cerr << "lcc: " << e.what() << '\n';
    return kExitSpec;
  } catch (const lcc::StructuralError& e) {
    std::cerr << "lcc: " << e.what() << '\n';
    return kExitSpec;
  } catch (const std::exception& e) {
    std::cerr << "lcc: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}
