#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "trade/apple_tasting.hpp"
#include "trade/harness.hpp"
#include "trade/verify.hpp"

namespace {

using trade::Rng;

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<std::int64_t> parse_horizons(const std::string& text) {
  std::vector<std::int64_t> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) out.push_back(std::stoll(tok));
  return out;
}

// "csv"/"json" explicitly, else inferred from the output extension.
std::string resolve_format(const std::string& fmt, const std::string& path) {
  if (!fmt.empty()) return fmt;
  auto dot = path.rfind('.');
  if (dot != std::string::npos && path.substr(dot) == ".csv") return "csv";
  return "json";
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-")
    std::cout << text;
  else
    trade::write_file(path, text);
}

int cmd_run(const std::string& config_path, std::uint64_t seed,
            const std::string& out, const std::string& format) {
  trade::RunConfig cfg = trade::run_config_from_json_string(slurp(config_path));
  trade::RunRecord rec = trade::run_episode(cfg, seed);
  std::string fmt = resolve_format(format, out);
  emit(fmt == "csv" ? trade::run_record_csv(rec) : trade::run_record_json(rec),
       out);
  std::fprintf(stderr, "T=%lld regret=%.17g oracle=%.17g payoff=%.17g\n",
               static_cast<long long>(rec.horizon), rec.regret,
               rec.oracle_value, rec.cum_payoff);
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& horizons,
              int seeds, std::uint64_t master_seed, const std::string& out,
              const std::string& format, int workers) {
  trade::RunConfig cfg = trade::run_config_from_json_string(slurp(config_path));
  auto hs = parse_horizons(horizons);
  trade::SweepResult res = trade::sweep(cfg, hs, seeds, master_seed, workers);
  std::string fmt = resolve_format(format, out);
  emit(fmt == "csv" ? trade::sweep_csv(res) : trade::sweep_json(res), out);
  if (res.degenerate)
    std::fprintf(stderr, "degenerate: mean regret within stderr of zero\n");
  else
    std::fprintf(stderr, "slope=%.6g intercept=%.6g\n", res.slope,
                 res.intercept);
  return 0;
}

int cmd_verify(const std::string& suite) {
  trade::VerifyReport rep = trade::verify_suite(suite);
  for (const auto& c : rep.checks)
    std::printf("%-55s %s  (%s)\n", c.name.c_str(),
                c.pass ? "PASS" : "FAIL", c.detail.c_str());
  std::printf("%zu checks, %s\n", rep.checks.size(),
              rep.all_pass() ? "all passed" : "FAILURES PRESENT");
  return rep.all_pass() ? 0 : 1;
}

int cmd_oracle(const std::string& adversary_path, int resolution) {
  trade::AdversarySpec spec =
      trade::adversary_from_json_string(slurp(adversary_path));
  auto best = trade::best_fixed_price(spec, resolution);
  auto smooth = trade::check_smoothness(spec);
  double mass = trade::total_mass(spec);
  std::printf("best_price %.17g\n", best.first);
  std::printf("best_value %.17g\n", best.second);
  std::printf("sup_density %.17g\n", smooth.sup_density);
  std::printf("sigma %.17g\n", spec.sigma);
  std::printf("smooth %s\n", smooth.ok ? "true" : "false");
  std::printf("total_mass %.17g\n", mass);
  return 0;
}

int cmd_mat(const std::string& config_path, const std::string& out) {
  nlohmann::json j = nlohmann::json::parse(slurp(config_path));
  std::int64_t horizon = j.value("T", std::int64_t{0});
  int big_k = j.value("K", 0);
  if (big_k <= 0) {
    if (horizon <= 0)
      throw std::invalid_argument("mat config needs K or T");
    big_k = static_cast<int>(trade::ceil_root(horizon, 4));
  }
  if (horizon <= 0) throw std::invalid_argument("mat config needs T");

  trade::MatPolicy policy;
  std::string pol = j.value("policy", std::string("explore_then_commit"));
  if (pol == "uniform_explore")
    policy.kind = trade::MatPolicyKind::UniformExplore;
  else if (pol == "explore_then_commit")
    policy.kind = trade::MatPolicyKind::ExploreThenCommit;
  else if (pol == "always_commit")
    policy.kind = trade::MatPolicyKind::AlwaysCommit;
  else
    throw std::invalid_argument("unknown mat policy: " + pol);
  policy.budget = j.value("budget", std::int64_t{0});

  int seeds = j.value("seeds", 20);
  std::uint64_t master = j.value("seed", std::uint64_t{1});

  bool uniform_scenario = true;
  int fixed_scenario = 0;
  if (j.contains("scenario") && j["scenario"].is_number_integer()) {
    uniform_scenario = false;
    fixed_scenario = j["scenario"].get<int>();
  }

  double mean = 0.0, var = 0.0;
  std::vector<double> regrets;
  for (int s = 0; s < seeds; ++s) {
    Rng rng(trade::split_seed(master, static_cast<std::uint64_t>(s)));
    int scenario = uniform_scenario
                       ? static_cast<int>(rng.index(big_k + 1))
                       : fixed_scenario;
    trade::MatInstance inst = trade::MatInstance::make(big_k, scenario);
    auto res = trade::run_mat_episode(inst, policy, horizon, rng);
    regrets.push_back(res.regret);
    mean += res.regret;
  }
  mean /= seeds;
  for (double r : regrets) var += (r - mean) * (r - mean);
  double se = seeds > 1 ? std::sqrt(var / (seeds - 1) / seeds) : 0.0;

  char buf[256];
  std::snprintf(buf, sizeof buf,
                "{\n  \"K\": %d,\n  \"T\": %lld,\n  \"seeds\": %d,\n"
                "  \"mean_regret\": %.17g,\n  \"stderr\": %.17g\n}\n",
                big_k, static_cast<long long>(horizon), seeds, mean, se);
  emit(buf, out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation harness for repeated bilateral trade"};
  app.require_subcommand(1);

  std::string config_path, out, format, suite = "all", adversary_path;
  std::string horizons;
  std::uint64_t seed = 1;
  int seeds = 20, resolution = 10000, workers = 0;

  auto* run = app.add_subcommand("run", "Play one episode");
  run->add_option("--config", config_path, "JSON run config")->required();
  run->add_option("--seed", seed, "master seed");
  run->add_option("--out", out, "output path ('-' for stdout)");
  run->add_option("--format", format, "csv or json");

  auto* sweep = app.add_subcommand("sweep", "Regret vs horizon sweep");
  sweep->add_option("--config", config_path, "JSON run config")->required();
  sweep->add_option("--horizons", horizons, "comma-separated horizons")
      ->required();
  sweep->add_option("--seeds", seeds, "seeds per horizon");
  sweep->add_option("--seed", seed, "master seed");
  sweep->add_option("--out", out, "output path ('-' for stdout)");
  sweep->add_option("--format", format, "csv or json");
  sweep->add_option("--workers", workers,
                    "worker threads (default: TRADESIM_WORKERS or cores)");

  auto* verify = app.add_subcommand("verify", "Run invariant checks");
  verify->add_option("--suite", suite,
                     "core|adversaries|estimator|learners|mat|harness|all");

  auto* oracle = app.add_subcommand("oracle", "Best fixed price of a spec");
  oracle->add_option("--adversary", adversary_path, "JSON adversary spec")
      ->required();
  oracle->add_option("--resolution", resolution, "price grid resolution");

  auto* mat = app.add_subcommand("mat", "Multi-apple-tasting episodes");
  mat->add_option("--config", config_path, "JSON mat config")->required();
  mat->add_option("--out", out, "output path ('-' for stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, seed, out, format);
    if (sweep->parsed())
      return cmd_sweep(config_path, horizons, seeds, seed, out, format,
                       workers);
    if (verify->parsed()) return cmd_verify(suite);
    if (oracle->parsed()) return cmd_oracle(adversary_path, resolution);
    if (mat->parsed()) return cmd_mat(config_path, out);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
