// Command-line front end: model files in, reports and sweep CSVs out.
//
// Exit codes: 0 success, 1 usage/parse error, 2 invalid model, 3 model not
// stable, 4 numerical failure.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "matchq/matchq.hpp"

namespace {

constexpr const char* kVersion = "1.0.0";
constexpr int kSchemaVersion = 1;

constexpr int kExitUsage = 1;
constexpr int kExitInvalidModel = 2;
constexpr int kExitNotStable = 3;
constexpr int kExitNumerical = 4;

struct CliError {
  int code;
  std::string message;
};

matchq::ParsedModel load_model(const std::string& path,
                               const std::optional<std::pair<double, double>>& theta_override,
                               const std::optional<double>& epsilon_override) {
  matchq::ParsedModel parsed = [&] {
    try {
      return matchq::load_model_file(path);
    } catch (const matchq::ParseError& e) {
      throw CliError{kExitUsage, e.what()};
    } catch (const matchq::MapValidationError& e) {
      throw CliError{kExitInvalidModel, e.what()};
    } catch (const matchq::Error& e) {
      throw CliError{kExitInvalidModel, e.what()};
    }
  }();
  if (theta_override) {
    parsed.model = matchq::QueueModel(parsed.model.map_a(), parsed.model.map_b(),
                                      theta_override->first, theta_override->second);
  }
  if (epsilon_override) parsed.solver.epsilon = *epsilon_override;
  return parsed;
}

std::string fmt(double v, int precision) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << v;
  return os.str();
}

std::string fmt_full(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

struct SolveOutput {
  matchq::PerformanceReport perf;
  double mean_xi = 0.0;
};

SolveOutput run_solver(const matchq::QueueModel& model, const matchq::SolverConfig& cfg) {
  try {
    const matchq::TruncatedStationarySolution sol = matchq::solve(model, cfg);
    SolveOutput out;
    out.perf = matchq::report(sol);
    out.mean_xi = matchq::build_bound(model, sol).mean_xi;
    return out;
  } catch (const matchq::NotStableError& e) {
    throw CliError{kExitNotStable, e.what()};
  } catch (const matchq::Error& e) {
    throw CliError{kExitNumerical, e.what()};
  }
}

void print_solve_human(const SolveOutput& out, int precision) {
  const auto& r = out.perf;
  std::cout << "stationary performance measures\n"
            << "  P{no A-customers}      " << fmt(r.p_no_a, precision) << "\n"
            << "  P{no B-customers}      " << fmt(r.p_no_b, precision) << "\n"
            << "  P{system empty}        " << fmt(r.p_empty, precision) << "\n"
            << "  E[A-queue length]      " << fmt(r.mean_q_a, precision) << "\n"
            << "  E[B-queue length]      " << fmt(r.mean_q_b, precision) << "\n"
            << "  E[Q] (composite)       " << fmt(r.mean_q_composite, precision) << "\n"
            << "  E[|level|]             " << fmt(r.mean_q_total_abs, precision) << "\n"
            << "  E[level difference]    " << fmt(r.mean_level_diff, precision) << "\n"
            << "  E[sojourn bound xi_A]  " << fmt(out.mean_xi, precision) << "\n"
            << "  truncation level K*    " << r.k_star << "\n"
            << "  tail mass              " << std::setprecision(3) << std::scientific
            << r.tail_mass << std::defaultfloat << "\n";
}

std::vector<double> parse_axis_values(const std::string& text) {
  // "a:b:step" inclusive range, or comma-separated list
  std::vector<double> vals;
  if (text.find(':') != std::string::npos) {
    double a, b, step;
    char c1, c2;
    std::istringstream is(text);
    if (!(is >> a >> c1 >> b >> c2 >> step) || c1 != ':' || c2 != ':' || step <= 0)
      throw CliError{kExitUsage, "bad axis range '" + text + "', expected start:stop:step"};
    for (double v = a; v <= b + 1e-12 * step; v += step) vals.push_back(v);
  } else {
    std::istringstream is(text);
    std::string tok;
    while (std::getline(is, tok, ',')) {
      try {
        vals.push_back(std::stod(tok));
      } catch (...) {
        throw CliError{kExitUsage, "bad axis value '" + tok + "'"};
      }
    }
  }
  if (vals.empty()) throw CliError{kExitUsage, "axis has no values"};
  for (double v : vals)
    if (!(v > 0)) throw CliError{kExitUsage, "axis values must be positive"};
  return vals;
}

struct Axis {
  std::string name;  // theta1 or theta2
  std::vector<double> values;
};

Axis parse_axis(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos)
    throw CliError{kExitUsage, "bad --axis '" + spec + "', expected name=values"};
  Axis ax;
  ax.name = spec.substr(0, eq);
  if (ax.name != "theta1" && ax.name != "theta2")
    throw CliError{kExitUsage, "axis parameter must be theta1 or theta2"};
  ax.values = parse_axis_values(spec.substr(eq + 1));
  return ax;
}

const std::vector<std::string> kAllMeasures = {
    "p_no_a",          "p_no_b",          "p_empty",        "mean_q_a",
    "mean_q_b",        "mean_q_composite", "mean_q_total_abs", "mean_level_diff",
    "mean_xi",         "k_star",          "tail_mass"};

double measure_value(const std::string& name, const SolveOutput& out) {
  const auto& r = out.perf;
  if (name == "p_no_a") return r.p_no_a;
  if (name == "p_no_b") return r.p_no_b;
  if (name == "p_empty") return r.p_empty;
  if (name == "mean_q_a") return r.mean_q_a;
  if (name == "mean_q_b") return r.mean_q_b;
  if (name == "mean_q_composite") return r.mean_q_composite;
  if (name == "mean_q_total_abs") return r.mean_q_total_abs;
  if (name == "mean_level_diff") return r.mean_level_diff;
  if (name == "mean_xi") return out.mean_xi;
  if (name == "k_star") return r.k_star;
  if (name == "tail_mass") return r.tail_mass;
  throw CliError{kExitUsage, "unknown measure '" + name + "'"};
}

int run_sweep(const matchq::ParsedModel& parsed, const Axis& axis1,
              const std::optional<Axis>& axis2, const std::vector<std::string>& measures,
              const std::string& out_path, unsigned threads) {
  struct GridPoint {
    double theta1, theta2;
  };
  std::vector<GridPoint> grid;
  const matchq::QueueModel& base = parsed.model;
  auto theta_pair = [&](const std::string& name, double v, double t1, double t2) {
    return name == "theta1" ? std::pair<double, double>{v, t2}
                            : std::pair<double, double>{t1, v};
  };
  if (axis2) {
    for (double v1 : axis1.values)
      for (double v2 : axis2->values) {
        auto [t1, t2] = theta_pair(axis1.name, v1, base.theta1(), base.theta2());
        std::tie(t1, t2) = theta_pair(axis2->name, v2, t1, t2);
        grid.push_back({t1, t2});
      }
  } else {
    for (double v1 : axis1.values) {
      auto [t1, t2] = theta_pair(axis1.name, v1, base.theta1(), base.theta2());
      grid.push_back({t1, t2});
    }
  }

  std::vector<std::string> rows(grid.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= grid.size()) return;
      std::ostringstream row;
      row << fmt_full(grid[i].theta1) << "," << fmt_full(grid[i].theta2);
      try {
        matchq::QueueModel m(base.map_a(), base.map_b(), grid[i].theta1, grid[i].theta2);
        const SolveOutput out = run_solver(m, parsed.solver);
        for (const auto& name : measures) row << "," << fmt_full(measure_value(name, out));
      } catch (...) {
        for (std::size_t k = 0; k < measures.size(); ++k) row << ",error";
      }
      rows[i] = row.str();
    }
  };
  const unsigned n_threads =
      std::min<unsigned>(std::max(1u, threads), static_cast<unsigned>(grid.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw CliError{kExitUsage, "cannot open output file " + out_path};
    os = &file;
  }
  *os << "theta1,theta2";
  for (const auto& name : measures) *os << "," << name;
  *os << "\n";
  for (const auto& row : rows) *os << row << "\n";
  return 0;
}

void print_sim_human(const matchq::SimReport& rep, int precision) {
  auto line = [&](const char* label, const matchq::Estimate& e) {
    std::cout << "  " << label << fmt(e.value, precision) << " +- "
              << fmt(e.half_width, precision) << "\n";
  };
  std::cout << "simulation estimates (95% batch-means intervals)\n";
  line("P{no A-customers}      ", rep.p_no_a);
  line("P{no B-customers}      ", rep.p_no_b);
  line("P{system empty}        ", rep.p_empty);
  line("E[A-queue length]      ", rep.mean_q_a);
  line("E[B-queue length]      ", rep.mean_q_b);
  line("E[Q] (composite)       ", rep.mean_q_composite);
  line("E[|level|]             ", rep.mean_q_total_abs);
  line("E[level difference]    ", rep.mean_level_diff);
  line("E[A sojourn time]      ", rep.mean_wait_a);
  std::cout << "  abandonment fraction A " << fmt(rep.abandon_frac_a, precision) << "\n"
            << "  abandonment fraction B " << fmt(rep.abandon_frac_b, precision) << "\n"
            << "  events                 " << rep.events << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"matched-queue performance analysis"};
  app.require_subcommand(1);

  std::string model_path;
  std::vector<double> theta_flag;
  std::optional<double> epsilon_flag;
  int precision = 4;
  bool as_json = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("model", model_path, "model file (JSON)")->required();
    cmd->add_option("--theta", theta_flag, "override impatience rates: theta1 theta2")
        ->expected(2);
    cmd->add_option("--precision", precision, "printed decimal places");
  };

  auto* cmd_classify = app.add_subcommand("classify", "stability classification");
  add_common(cmd_classify);

  auto* cmd_solve = app.add_subcommand("solve", "stationary solve and report");
  add_common(cmd_solve);
  cmd_solve->add_flag("--json", as_json, "machine-readable output");
  double epsilon_opt = -1.0;
  cmd_solve->add_option("--epsilon", epsilon_opt, "tail-mass stop threshold");

  auto* cmd_sweep = app.add_subcommand("sweep", "parameter sweep to CSV");
  add_common(cmd_sweep);
  std::vector<std::string> axis_specs;
  std::string out_path;
  std::string measures_flag;
  unsigned threads = std::thread::hardware_concurrency();
  cmd_sweep->add_option("--axis", axis_specs,
                        "sweep axis, e.g. theta1=0.2:1.4:0.2 (repeat for a grid)")
      ->required();
  cmd_sweep->add_option("--out", out_path, "output CSV path (default: stdout)");
  cmd_sweep->add_option("--measures", measures_flag, "comma-separated measure list");
  cmd_sweep->add_option("--threads", threads, "worker threads");
  double sweep_epsilon = -1.0;
  cmd_sweep->add_option("--epsilon", sweep_epsilon, "tail-mass stop threshold");

  auto* cmd_simulate = app.add_subcommand("simulate", "discrete-event simulation");
  add_common(cmd_simulate);
  double horizon = 1e6, warmup = 1e4;
  std::uint64_t seed = 1;
  int batches = 20;
  bool compare = false;
  bool sim_json = false;
  cmd_simulate->add_option("--horizon", horizon, "simulated time span");
  cmd_simulate->add_option("--warmup", warmup, "discarded prefix time");
  cmd_simulate->add_option("--seed", seed, "random seed");
  cmd_simulate->add_option("--batches", batches, "batch count for intervals");
  cmd_simulate->add_flag("--compare", compare, "also run the solver and compare");
  cmd_simulate->add_flag("--json", sim_json, "machine-readable output");

  auto* cmd_version = app.add_subcommand("version", "print version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    std::optional<std::pair<double, double>> theta_override;
    if (!theta_flag.empty()) theta_override = {theta_flag[0], theta_flag[1]};

    if (cmd_version->parsed()) {
      std::cout << "matchq " << kVersion << "\n";
      return 0;
    }

    if (cmd_classify->parsed()) {
      const auto parsed = load_model(model_path, theta_override, std::nullopt);
      const matchq::RecurrenceClass cls = matchq::classify(parsed.model);
      std::cout << matchq::to_string(cls.tag) << " (" << cls.rationale << ")\n";
      return 0;
    }

    if (cmd_solve->parsed()) {
      std::optional<double> eps;
      if (epsilon_opt > 0) eps = epsilon_opt;
      const auto parsed = load_model(model_path, theta_override, eps);
      const SolveOutput out = run_solver(parsed.model, parsed.solver);
      if (as_json) {
        nlohmann::json j = matchq::to_json(out.perf);
        j["mean_xi"] = out.mean_xi;
        j["schema_version"] = kSchemaVersion;
        std::cout << j.dump(2) << "\n";
      } else {
        print_solve_human(out, precision);
      }
      return 0;
    }

    if (cmd_sweep->parsed()) {
      std::optional<double> eps;
      if (sweep_epsilon > 0) eps = sweep_epsilon;
      const auto parsed = load_model(model_path, theta_override, eps);
      if (axis_specs.empty() || axis_specs.size() > 2)
        throw CliError{kExitUsage, "sweep needs one or two --axis options"};
      const Axis ax1 = parse_axis(axis_specs[0]);
      std::optional<Axis> ax2;
      if (axis_specs.size() == 2) ax2 = parse_axis(axis_specs[1]);
      std::vector<std::string> measures = kAllMeasures;
      if (!measures_flag.empty()) {
        measures.clear();
        std::istringstream is(measures_flag);
        std::string tok;
        while (std::getline(is, tok, ',')) measures.push_back(tok);
        for (const auto& m : measures)
          if (std::find(kAllMeasures.begin(), kAllMeasures.end(), m) == kAllMeasures.end())
            throw CliError{kExitUsage, "unknown measure '" + m + "'"};
      }
      return run_sweep(parsed, ax1, ax2, measures, out_path, threads);
    }

    if (cmd_simulate->parsed()) {
      const auto parsed = load_model(model_path, theta_override, std::nullopt);
      matchq::SimConfig cfg;
      cfg.horizon = horizon;
      cfg.warmup = warmup;
      cfg.seed = seed;
      cfg.batches = batches;
      matchq::SimReport rep;
      try {
        rep = matchq::simulate(parsed.model, cfg);
      } catch (const matchq::ConfigError& e) {
        throw CliError{kExitUsage, e.what()};
      }
      if (sim_json) {
        nlohmann::json j = matchq::to_json(rep);
        j["schema_version"] = kSchemaVersion;
        if (compare) {
          const SolveOutput out = run_solver(parsed.model, parsed.solver);
          j["solver"] = matchq::to_json(out.perf);
          j["solver"]["mean_xi"] = out.mean_xi;
        }
        std::cout << j.dump(2) << "\n";
        return 0;
      }
      print_sim_human(rep, precision);
      if (compare) {
        const SolveOutput out = run_solver(parsed.model, parsed.solver);
        std::cout << "\nsolver comparison (|difference| vs 3x half-width)\n";
        struct Row {
          const char* label;
          double solver_value;
          matchq::Estimate sim;
        };
        const Row rows[] = {
            {"P{no A-customers}      ", out.perf.p_no_a, rep.p_no_a},
            {"P{no B-customers}      ", out.perf.p_no_b, rep.p_no_b},
            {"P{system empty}        ", out.perf.p_empty, rep.p_empty},
            {"E[A-queue length]      ", out.perf.mean_q_a, rep.mean_q_a},
            {"E[B-queue length]      ", out.perf.mean_q_b, rep.mean_q_b},
            {"E[Q] (composite)       ", out.perf.mean_q_composite, rep.mean_q_composite},
            {"E[level difference]    ", out.perf.mean_level_diff, rep.mean_level_diff},
        };
        bool all_ok = true;
        for (const Row& r : rows) {
          const double diff = std::abs(r.solver_value - r.sim.value);
          const bool ok = diff <= 3.0 * r.sim.half_width + 1e-6;
          all_ok = all_ok && ok;
          std::cout << "  " << r.label << fmt(r.solver_value, precision) << " vs "
                    << fmt(r.sim.value, precision) << " +- " << fmt(r.sim.half_width, precision)
                    << (ok ? "  agree" : "  DISAGREE") << "\n";
        }
        std::cout << "  E[sojourn bound xi_A]  " << fmt(out.mean_xi, precision)
                  << " >= sim E[A sojourn] " << fmt(rep.mean_wait_a.value, precision)
                  << ((rep.mean_wait_a.value <=
                       out.mean_xi + 3.0 * rep.mean_wait_a.half_width)
                          ? "  bound holds"
                          : "  BOUND VIOLATED")
                  << "\n";
        if (!all_ok) return kExitNumerical;
      }
      return 0;
    }
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const matchq::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return 0;
}
