// Command-line front end: single runs as JSON, sweep / conditional-bias /
// scatter / CI-profile campaigns as CSV, resonance detection, and an SVG
// heatmap renderer. All outputs are deterministic for a fixed seed and flag
// set, independent of --threads.
//
// Exit codes: 0 success, 2 flag validation, 3 runtime diagnostic, 4 I/O.

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "iqae/csv.hpp"
#include "iqae/harness.hpp"
#include "iqae/svg.hpp"
#include "iqae/version.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitFlags = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitIo = 4;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Writes the document to the path, or to stdout for "-".
void write_output(const std::string& path, const std::string& content) {
  if (path == "-" || path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw IoError("write to '" + path + "' failed");
}

std::string read_file(const std::string& path, std::ifstream& stream) {
  stream.open(path);
  if (!stream) throw IoError("cannot open '" + path + "' for reading");
  return path;
}

json config_json(const iqae::IqaeConfig& cfg) {
  return json{{"epsilon", cfg.epsilon},
              {"alpha", cfg.alpha},
              {"n_shot", cfg.n_shot},
              {"r_min", cfg.r_min},
              {"max_rounds", cfg.max_rounds}};
}

json seed_plan_json(std::uint64_t master_seed) {
  return json{{"master_seed", master_seed},
              {"rng", iqae::kRngName},
              {"derivation", iqae::kStreamDerivation}};
}

struct CommonFlags {
  iqae::IqaeConfig config;
  std::uint64_t seed = 0;
  int threads = iqae::hardware_threads();
  std::string out = "-";
};

void add_config_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--epsilon", flags.config.epsilon, "Target accuracy on a")
      ->check(CLI::Range(std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0)))
      ->capture_default_str();
  cmd->add_option("--alpha", flags.config.alpha, "Failure budget")
      ->check(CLI::Range(std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0)))
      ->capture_default_str();
  cmd->add_option("--n-shot", flags.config.n_shot, "Shots per batch")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--r-min", flags.config.r_min, "Minimum K growth ratio")
      ->check(CLI::Range(std::nextafter(1.0, 2.0), 1e9))
      ->capture_default_str();
}

void add_io_flags(CLI::App* cmd, CommonFlags& flags, bool with_threads = true) {
  cmd->add_option("--seed", flags.seed, "Master seed")->capture_default_str();
  cmd->add_option("--out", flags.out, "Output path ('-' for stdout)")
      ->capture_default_str();
  if (with_threads) {
    cmd->add_option("--threads", flags.threads, "Worker threads")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  }
}

std::vector<double> linspace(double lo, double hi, std::int64_t points) {
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(points));
  if (points == 1) {
    grid.push_back(lo);
    return grid;
  }
  for (std::int64_t i = 0; i < points; ++i) {
    grid.push_back(lo + (hi - lo) * double(i) / double(points - 1));
  }
  return grid;
}

json round_json(const iqae::RoundTrace& t) {
  json j{{"index", t.index},
         {"k", t.k},
         {"quadrant", t.quadrant},
         {"alpha_i", t.alpha_i},
         {"shots", t.shots},
         {"hits", t.hits},
         {"a_hat_k", t.a_hat_k},
         {"a_hat", t.a_hat},
         {"ci_a", {t.ci_a.lo, t.ci_a.hi}},
         {"ci_theta", {t.ci_theta.lo, t.ci_theta.hi}},
         {"delta_a", t.delta_a},
         {"grover_calls", t.grover_calls},
         {"exit", iqae::to_string(t.exit)}};
  if (t.exit == iqae::RoundExit::kNextK) j["next_k"] = t.next_k;
  return j;
}

int cmd_run(const CommonFlags& flags, double a, bool mitigate) {
  iqae::Xoshiro256pp rng = iqae::derive_stream(flags.seed, 0);
  const iqae::BernoulliOracle oracle(a);
  iqae::RunResult result = mitigate
                               ? iqae::run_mitigated(flags.config, oracle, rng)
                               : iqae::run_iqae(flags.config, oracle, rng);
  iqae::annotate(result, a, flags.config.epsilon);

  json rounds = json::array();
  for (const auto& t : result.rounds) rounds.push_back(round_json(t));
  json doc{
      {"version", iqae::kVersion},
      {"command", "run"},
      {"config", config_json(flags.config)},
      {"oracle", {{"type", "bernoulli"}, {"a", a}}},
      {"seed_plan", seed_plan_json(flags.seed)},
      {"task_index", 0},
      {"mitigated", result.mitigated},
      {"result",
       {{"a_hat", result.a_hat},
        {"error", result.error},
        {"success", result.success},
        {"k_fin", result.k_fin},
        {"n_fin", result.n_fin},
        {"r_fin", result.r_fin},
        {"f_fin", result.f_fin},
        {"total_grover_calls", result.total_grover_calls},
        {"final_round_grover_calls", result.final_round_grover_calls},
        {"state_preparations", result.ledger.state_preparations},
        {"rounds", rounds}}}};
  if (result.mitigated) {
    doc["result"]["reexec"] = {{"shots", result.reexec_shots},
                               {"hits", result.reexec_hits}};
  }
  write_output(flags.out, doc.dump(2) + "\n");
  return kExitOk;
}

int cmd_sweep(const CommonFlags& flags, double a_min, double a_max,
              std::int64_t points, std::int64_t runs, bool mitigate) {
  const std::vector<double> grid = linspace(a_min, a_max, points);
  const std::vector<iqae::BiasRow> rows = iqae::sweep_bias(
      grid, flags.config, runs, mitigate, flags.seed, flags.threads);
  std::string csv =
      "a,n_run,mean_error,stderr,biased_flag,success_rate,mean_queries,"
      "mean_final_round_queries,mitigated\n";
  for (const iqae::BiasRow& row : rows) {
    csv += iqae::format_double(row.a) + ',' + std::to_string(row.n_run) + ',' +
           iqae::format_double(row.mean_error) + ',' +
           iqae::format_double(row.std_error) + ',' +
           (row.biased ? "1" : "0") + ',' +
           iqae::format_double(row.success_rate) + ',' +
           iqae::format_double(row.mean_queries) + ',' +
           iqae::format_double(row.mean_final_round_queries) + ',' +
           (row.mitigated ? "1" : "0") + '\n';
  }
  write_output(flags.out, csv);
  return kExitOk;
}

int cmd_cond_bias(const CommonFlags& flags, double a,
                  const std::vector<std::int64_t>& k_list,
                  std::int64_t f_points, std::int64_t runs,
                  double nan_threshold) {
  const std::vector<double> f_grid = linspace(0.0, 1.0, f_points);
  const std::vector<iqae::CondBiasCell> cells =
      iqae::cond_bias_grid(k_list, f_grid, a, runs, flags.config, flags.seed,
                           flags.threads, nan_threshold);
  std::string csv = "k_fin,f_fin,a_tilde,n_end,b_tilde,reason\n";
  for (const iqae::CondBiasCell& cell : cells) {
    csv += std::to_string(cell.k_fin) + ',' + iqae::format_double(cell.f_fin) +
           ',' + iqae::format_double(cell.a_tilde) + ',' +
           std::to_string(cell.n_end) + ',' +
           iqae::format_double(cell.b_tilde) + ',' +
           iqae::to_string(cell.status) + '\n';
  }
  write_output(flags.out, csv);
  return kExitOk;
}

int cmd_scatter(const CommonFlags& flags, double a, std::int64_t runs) {
  const std::vector<iqae::RunSummary> records =
      iqae::scatter_kfin_ffin(a, flags.config, runs, flags.seed, flags.threads);
  std::string csv =
      "run_id,a_hat,error,k_fin,f_fin,N_fin,R_fin,total_queries,rounds,"
      "success\n";
  for (const iqae::RunSummary& r : records) {
    csv += std::to_string(r.run_id) + ',' + iqae::format_double(r.a_hat) + ',' +
           iqae::format_double(r.error) + ',' + std::to_string(r.k_fin) + ',' +
           iqae::format_double(r.f_fin) + ',' + std::to_string(r.n_fin) + ',' +
           std::to_string(r.r_fin) + ',' +
           std::to_string(r.total_grover_calls) + ',' +
           std::to_string(r.rounds) + ',' + (r.success ? "1" : "0") + '\n';
  }
  write_output(flags.out, csv);
  return kExitOk;
}

int cmd_ci_profile(const CommonFlags& flags, std::int64_t k, std::int64_t n,
                   double a) {
  const std::int64_t big_k = 2 * k + 1;
  const double alpha_i = iqae::round_alpha(
      double(big_k), iqae::k_max(flags.config.epsilon), flags.config.alpha);
  const std::int64_t quadrant = static_cast<std::int64_t>(std::floor(
      double(big_k) * iqae::theta_of_amplitude(a) / iqae::kHalfPi));
  const iqae::RoundParams params{k, alpha_i, iqae::max_shots(alpha_i),
                                 quadrant};
  std::string csv = "a_hat,a_lo,a_hi,delta_a\n";
  for (std::int64_t n1 = 0; n1 <= n; ++n1) {
    const iqae::CountEstimate est = iqae::ci_from_counts(n1, n, params);
    csv += iqae::format_double(est.a_hat) + ',' +
           iqae::format_double(est.ci_a.lo) + ',' +
           iqae::format_double(est.ci_a.hi) + ',' +
           iqae::format_double(est.delta_a) + '\n';
  }
  write_output(flags.out, csv);
  return kExitOk;
}

int cmd_resonance(const CommonFlags& flags, double a, std::int64_t m_max) {
  const iqae::Resonance res = iqae::detect_resonance(a, m_max);
  json doc{{"l", res.l}, {"m", res.m}, {"delta", res.delta}};
  write_output(flags.out, doc.dump() + "\n");
  return kExitOk;
}

int cmd_render(const CommonFlags& flags, const std::string& table_path,
               const std::string& scatter_path, const std::string& title) {
  std::ifstream table_file;
  read_file(table_path, table_file);
  const iqae::CsvTable table = iqae::read_csv(table_file);
  const std::size_t k_col = table.column("k_fin");
  const std::size_t f_col = table.column("f_fin");
  const std::size_t b_col = table.column("b_tilde");
  std::vector<iqae::HeatCell> cells;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const std::size_t line = i + 2;  // header is line 1
    const auto& row = table.rows[i];
    cells.push_back({iqae::parse_csv_double(row[k_col], line),
                     iqae::parse_csv_double(row[f_col], line),
                     iqae::parse_csv_double(row[b_col], line)});
  }

  std::vector<iqae::ScatterPoint> points;
  if (!scatter_path.empty()) {
    std::ifstream scatter_file;
    read_file(scatter_path, scatter_file);
    const iqae::CsvTable scatter = iqae::read_csv(scatter_file);
    const std::size_t sk = scatter.column("k_fin");
    const std::size_t sf = scatter.column("f_fin");
    for (std::size_t i = 0; i < scatter.rows.size(); ++i) {
      const std::size_t line = i + 2;
      const auto& row = scatter.rows[i];
      points.push_back({iqae::parse_csv_double(row[sk], line),
                        iqae::parse_csv_double(row[sf], line)});
    }
  }
  write_output(flags.out, iqae::render_heatmap_svg(cells, points, title));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"iqae-lab: classical simulation laboratory for iterative "
               "quantum amplitude estimation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(iqae::kVersion));

  // run
  CommonFlags run_flags;
  double run_a = 0.5;
  bool run_mitigate = false;
  CLI::App* run = app.add_subcommand("run", "One estimation run, JSON output");
  run->add_option("--a", run_a, "True amplitude")
      ->required()
      ->check(CLI::Range(0.0, 1.0));
  run->add_flag("--mitigate", run_mitigate, "Re-execute the final round");
  add_config_flags(run, run_flags);
  add_io_flags(run, run_flags, /*with_threads=*/false);

  // sweep
  CommonFlags sweep_flags;
  double sweep_min = 0.001, sweep_max = 0.999;
  std::int64_t sweep_points = 201, sweep_runs = 10000;
  bool sweep_mitigate = false;
  CLI::App* sweep = app.add_subcommand("sweep", "Bias sweep over amplitudes, CSV output");
  sweep->add_option("--a-min", sweep_min, "Grid start")
      ->check(CLI::Range(std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0)))
      ->capture_default_str();
  sweep->add_option("--a-max", sweep_max, "Grid end")
      ->check(CLI::Range(std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0)))
      ->capture_default_str();
  sweep->add_option("--points", sweep_points, "Grid points")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sweep->add_option("--runs", sweep_runs, "Runs per grid point")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sweep->add_flag("--mitigate", sweep_mitigate, "Re-execute the final round");
  add_config_flags(sweep, sweep_flags);
  add_io_flags(sweep, sweep_flags);

  // cond-bias
  CommonFlags cond_flags;
  double cond_a = 0.2505;
  std::vector<std::int64_t> cond_k{200, 300, 400, 500};
  std::int64_t cond_f_points = 51, cond_runs = 10000;
  double cond_nan_threshold = 0.1;
  CLI::App* cond = app.add_subcommand(
      "cond-bias", "Conditional bias with (k_fin, f_fin) pinned, CSV output");
  cond->add_option("--a", cond_a, "Baseline amplitude")
      ->check(CLI::Range(std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0)))
      ->capture_default_str();
  cond->add_option("--k-list", cond_k,
                   "Grover numbers (space or comma separated)")
      ->delimiter(',')
      ->capture_default_str();
  cond->add_option("--f-points", cond_f_points, "f grid points over [0,1]")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cond->add_option("--runs", cond_runs, "Rounds per cell")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cond->add_option("--nan-threshold", cond_nan_threshold,
                   "Minimum terminating fraction for a defined cell")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  add_config_flags(cond, cond_flags);
  add_io_flags(cond, cond_flags);

  // scatter
  CommonFlags scatter_flags;
  double scatter_a = 0.2505;
  std::int64_t scatter_runs = 10000;
  CLI::App* scatter = app.add_subcommand(
      "scatter", "Per-run (k_fin, f_fin) records, CSV output");
  scatter->add_option("--a", scatter_a, "True amplitude")
      ->required()
      ->check(CLI::Range(std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0)));
  scatter->add_option("--runs", scatter_runs, "Number of runs")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_config_flags(scatter, scatter_flags);
  add_io_flags(scatter, scatter_flags);

  // ci-profile
  CommonFlags ci_flags;
  std::int64_t ci_k = 200, ci_n = 100;
  double ci_a = 0.2505;
  CLI::App* ci = app.add_subcommand(
      "ci-profile", "Confidence interval profile over achievable estimates");
  ci->add_option("--k", ci_k, "Grover number")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  ci->add_option("--n", ci_n, "Shots")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  ci->add_option("--a", ci_a, "Reference amplitude fixing the quadrant")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  add_config_flags(ci, ci_flags);
  add_io_flags(ci, ci_flags, /*with_threads=*/false);

  // resonance
  CommonFlags res_flags;
  double res_a = 0.2505;
  std::int64_t res_m_max = 64;
  CLI::App* res = app.add_subcommand(
      "resonance", "Best rational approximation of theta_a, JSON output");
  res->add_option("--a", res_a, "Amplitude")
      ->required()
      ->check(CLI::Range(std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0)));
  res->add_option("--m-max", res_m_max, "Largest denominator")
      ->check(CLI::Range(std::int64_t(2), std::int64_t(1) << 40))
      ->capture_default_str();
  add_io_flags(res, res_flags, /*with_threads=*/false);

  // render
  CommonFlags render_flags;
  std::string render_table, render_scatter, render_title;
  CLI::App* render = app.add_subcommand(
      "render", "SVG heatmap from a cond-bias CSV, optional scatter overlay");
  render->add_option("--table", render_table, "cond-bias CSV path")->required();
  render->add_option("--scatter", render_scatter, "scatter CSV path");
  render->add_option("--title", render_title, "Plot title");
  add_io_flags(render, render_flags, /*with_threads=*/false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitFlags;
  }

  try {
    if (run->parsed()) return cmd_run(run_flags, run_a, run_mitigate);
    if (sweep->parsed()) {
      if (sweep_min > sweep_max) {
        std::cerr << "--a-min must not exceed --a-max\n";
        return kExitFlags;
      }
      return cmd_sweep(sweep_flags, sweep_min, sweep_max, sweep_points,
                       sweep_runs, sweep_mitigate);
    }
    if (cond->parsed()) {
      for (std::int64_t k : cond_k) {
        if (k < 0) {
          std::cerr << "--k-list entries must be >= 0\n";
          return kExitFlags;
        }
      }
      return cmd_cond_bias(cond_flags, cond_a, cond_k, cond_f_points,
                           cond_runs, cond_nan_threshold);
    }
    if (scatter->parsed())
      return cmd_scatter(scatter_flags, scatter_a, scatter_runs);
    if (ci->parsed()) return cmd_ci_profile(ci_flags, ci_k, ci_n, ci_a);
    if (res->parsed()) return cmd_resonance(res_flags, res_a, res_m_max);
    if (render->parsed())
      return cmd_render(render_flags, render_table, render_scatter,
                        render_title);
    std::cerr << "no subcommand\n";
    return kExitFlags;
  } catch (const iqae::CsvParseError& e) {
    std::cerr << "csv error: " << e.what() << "\n";
    return kExitIo;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const iqae::RoundLimitExceeded& e) {
    std::cerr << "runtime diagnostic: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::domain_error& e) {
    std::cerr << "invalid parameter: " << e.what() << "\n";
    return kExitFlags;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
