// Command-line front end: run, sweep, verify, bench.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "menurec/bench.hpp"
#include "menurec/error.hpp"
#include "menurec/models.hpp"

namespace fs = std::filesystem;
using namespace menurec;

namespace {

enum Exit { ok = 0, failure = 1, config = 2, resource = 3, protocol = 4 };

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::configuration:
    case ErrorKind::invalid_input:
    case ErrorKind::invalid_model:
    case ErrorKind::infeasible_parameters:
    case ErrorKind::infeasible_set:
      return config;
    case ErrorKind::resource_limit:
      return resource;
    case ErrorKind::protocol_violation:
    case ErrorKind::contract_violation:
      return protocol;
    default:
      return failure;
  }
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open config '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigurationError("cannot parse '" + path + "': " + e.what());
  }
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ResourceLimit("cannot write '" + p.string() + "'");
  return out;
}

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ResourceLimit("cannot create '" + dir.string() + "': " + ec.message());
}

struct Common {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  int threads = 0;
};

ExperimentConfig load(const Common& c) {
  auto cfg = ExperimentConfig::from_json(read_json(c.config_path));
  if (c.seed) cfg.seeds = {*c.seed};
  return cfg;
}

int cmd_run(const Common& c) {
  auto cfg = load(c);
  cfg.horizons.clear();
  const PreferenceModel model = build_model(cfg.model);
  const auto cell = run_cell(cfg, model, cfg.horizon, cfg.seeds.front());
  const fs::path dir(c.out_dir);
  prepare_dir(dir);
  if (cfg.write_traces) {
    auto out = open_out(dir / "trace.txt");
    write_trace(out, cell.run.trace);
  }
  {
    auto out = open_out(dir / "report.csv");
    write_report_csv(out, std::span<const RegretReport>(&cell.report, 1));
  }
  const std::vector<CellResult> cells{cell};
  const auto summary = summarize(cfg, cells);
  auto out = open_out(dir / "summary.txt");
  write_summary(out, summary);
  write_summary(std::cout, summary);
  return Exit::ok;
}

int cmd_sweep(const Common& c) {
  const auto cfg = load(c);
  const auto cells = run_sweep(cfg, c.threads);
  const fs::path dir(c.out_dir);
  prepare_dir(dir);
  std::vector<RegretReport> all;
  std::map<std::size_t, std::vector<RegretReport>> by_h;
  for (const auto& cell : cells) {
    all.push_back(cell.report);
    by_h[cell.horizon].push_back(cell.report);
    if (cfg.write_traces) {
      prepare_dir(dir / "traces");
      auto out = open_out(dir / "traces" /
                          ("trace_T" + std::to_string(cell.horizon) + "_s" +
                           std::to_string(cell.seed) + ".txt"));
      write_trace(out, cell.run.trace);
    }
  }
  {
    auto out = open_out(dir / "report.csv");
    write_report_csv(out, all);
  }
  for (const auto& [h, reps] : by_h) {
    auto out = open_out(dir / ("report_T" + std::to_string(h) + ".csv"));
    write_report_csv(out, reps);
  }
  const auto summary = summarize(cfg, cells);
  auto out = open_out(dir / "summary.txt");
  write_summary(out, summary);
  write_summary(std::cout, summary);
  return Exit::ok;
}

int cmd_verify(const Common& c, double resolution, bool serial) {
  const auto j = read_json(c.config_path);
  const PreferenceModel model = build_model(j.contains("model") ? j.at("model") : j);
  const ClassSpec spec = ClassSpec::declared(model);
  const auto rep = serial ? verify_class_serial(model, spec, resolution)
                          : verify_class(model, spec, resolution);
  std::map<std::string, std::string> kv;
  kv["family"] = model.family();
  kv["class"] = rep.class_name;
  kv["grid_size"] = std::to_string(rep.grid_size);
  kv["max_violation"] = format_number(rep.max_violation);
  kv["range_violation"] = format_number(rep.range_violation);
  kv["sum_violation"] = format_number(rep.sum_violation);
  kv["sigma_violation"] = format_number(rep.sigma_violation);
  kv["lipschitz_violation"] = format_number(rep.lipschitz_violation);
  kv["empirical_lipschitz"] = format_number(rep.empirical_lipschitz);
  kv["passed"] = rep.passed() ? "true" : "false";
  std::string w;
  for (double v : rep.witness_vector) w += (w.empty() ? "" : ",") + format_number(v);
  kv["witness"] = w;
  write_summary(std::cout, kv);
  return rep.passed() ? Exit::ok : Exit::failure;
}

int cmd_bench(const Common& c) {
  const auto cfg = load(c);
  const PreferenceModel model = build_model(cfg.model);
  const Benchmark bench = build_benchmark(cfg.benchmark, model, cfg.k);
  const Seeds seeds = Seeds::from_master(cfg.seeds.front());
  std::map<std::string, std::string> kv;
  kv["benchmark"] = bench.name();
  kv["benchmark_is_upper_bound"] = bench.is_upper_bound() ? "true" : "false";
  std::vector<std::size_t> hs = cfg.horizons.empty() ? std::vector<std::size_t>{cfg.horizon} : cfg.horizons;
  for (std::size_t h : hs) {
    const auto rewards = build_rewards(cfg.rewards, model.n(), seeds.rewards, h);
    const auto res = bench.evaluate(rewards.cumulative_expected(h));
    const std::string tag = "_T" + std::to_string(h);
    kv["value" + tag] = format_number(res.value);
    if (!res.point.empty()) {
      std::string p;
      for (double v : res.point) p += (p.empty() ? "" : ",") + format_number(v);
      kv["point" + tag] = p;
    }
    if (res.menu) kv["menu" + tag] = res.menu->to_string();
  }
  const fs::path dir(c.out_dir);
  prepare_dir(dir);
  auto out = open_out(dir / "benchmark.txt");
  write_summary(out, kv);
  write_summary(std::cout, kv);
  return Exit::ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Recommendation-under-adaptive-preferences simulator"};
  app.require_subcommand(1);
  Common common;
  double resolution = 0.05;
  bool serial = false;

  auto add_common = [&](CLI::App* sub, bool with_out) {
    sub->add_option("-c,--config", common.config_path, "JSON config file")->required();
    if (with_out) sub->add_option("-o,--out", common.out_dir, "output directory");
    sub->add_option("-s,--seed", common.seed, "override the seed list with one seed");
  };
  auto* run = app.add_subcommand("run", "run one config at its horizon and first seed");
  add_common(run, true);
  auto* sweep = app.add_subcommand("sweep", "run every (horizon, seed) cell");
  add_common(sweep, true);
  sweep->add_option("-j,--threads", common.threads, "worker threads (0: OpenMP default)");
  auto* verify = app.add_subcommand("verify", "grid check of the model's declared class");
  verify->add_option("-c,--config", common.config_path, "JSON config or model spec")->required();
  verify->add_option("-r,--resolution", resolution, "simplex grid resolution");
  verify->add_flag("--serial", serial, "use the single-threaded scan");
  auto* bench = app.add_subcommand("bench", "benchmark values only");
  add_common(bench, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? Exit::ok : Exit::config;
  }

  try {
    if (*run) return cmd_run(common);
    if (*sweep) return cmd_sweep(common);
    if (*verify) return cmd_verify(common, resolution, serial);
    if (*bench) return cmd_bench(common);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return Exit::failure;
  }
  return Exit::failure;
}
