// SPDX-License-Identifier: Apache-2.0
//
// dpmss: run, compare and inspect deadline-aware OFDMA schedulers.

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dpmss/experiment.hpp"

namespace {

struct Flags {
  std::string use_case = "UC4";
  std::string scheduler = "lsds";
  int bandwidth = 40;
  std::string channel = "ideal";
  std::vector<int> mcs_map;
  std::uint64_t seed = 1;
  dpmss::Micros horizon = 200000;
  dpmss::Micros txop = 4000;
  dpmss::Micros grid = 0;
  int reps = 1;
  bool force = false;
  std::string fixed_config;
  std::string slotted_ru;
  int window_slots = 10;
  std::string offsets = "zero";
  double be_load = 0.0;
  int be_nodes = 3;
  bool no_runtime = false;
  std::string out_dir;
};

void add_workload_flags(CLI::App* app, Flags& f) {
  app->add_option("--use-case", f.use_case, "UC1, UC2, UC3 or UC4")->capture_default_str();
  app->add_option("--bandwidth", f.bandwidth, "Channel width in MHz: 20, 40, 80, 160")->capture_default_str();
  app->add_option("--channel", f.channel, "ideal, slightly_poor, moderately_poor, very_poor")->capture_default_str();
  app->add_option("--mcs-map", f.mcs_map, "MCS per channel quality, best to worst (4 values)")->delimiter(',')->expected(4);
  app->add_option("--seed", f.seed, "Workload seed")->capture_default_str();
  app->add_option("--horizon-us", f.horizon, "Simulation horizon")->capture_default_str();
  app->add_option("--txop-us", f.txop, "Maximum batch duration")->capture_default_str();
  app->add_option("--grid-us", f.grid, "Local-search grid step (0: symbol-aligned default)")->capture_default_str();
  app->add_flag("--force", f.force, "Run even below the use case's minimum bandwidth");
  app->add_option("--fixed-config", f.fixed_config, "LSDSF RU configuration, e.g. 8x52+2x26");
  app->add_option("--slotted-ru", f.slotted_ru, "Equal RU set for slotted schedulers, e.g. 18x26");
  app->add_option("--window-slots", f.window_slots, "Slotted heuristic window")->capture_default_str();
  app->add_option("--offsets", f.offsets, "Station phase offsets: zero or random")->capture_default_str();
  app->add_option("--be-load-mbps", f.be_load, "Best-effort load for the overlay (0: off)")->capture_default_str();
  app->add_option("--be-nodes", f.be_nodes, "Best-effort stations")->capture_default_str();
  app->add_flag("--no-runtime", f.no_runtime, "Write NA for runtime so reruns are byte-identical");
  app->add_option("--out-dir", f.out_dir, "Directory for jobs.txt, schedule.txt, report.json, metrics.csv");
}

dpmss::ExperimentConfig to_config(const Flags& f, const std::string& scheduler) {
  dpmss::ExperimentConfig c;
  c.use_case = dpmss::parse_use_case(f.use_case);
  c.scheduler = dpmss::parse_scheduler(scheduler);
  c.bandwidth_mhz = f.bandwidth;
  c.channel = dpmss::parse_channel(f.channel);
  if (!f.mcs_map.empty()) std::copy(f.mcs_map.begin(), f.mcs_map.end(), c.mcs_map.begin());
  c.seed = f.seed;
  c.horizon = f.horizon;
  c.txop = f.txop;
  c.grid = f.grid;
  c.reps = f.reps;
  c.force = f.force;
  c.fixed_config = f.fixed_config;
  c.slotted_ru = f.slotted_ru;
  c.window_slots = f.window_slots;
  c.offsets = dpmss::parse_offsets(f.offsets);
  c.be_load_mbps = f.be_load;
  c.be_nodes = f.be_nodes;
  c.record_runtime = !f.no_runtime;
  return c;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string part; std::getline(ss, part, ',');)
    if (!part.empty()) out.push_back(part);
  return out;
}

int cmd_run(const Flags& f) {
  const auto c = to_config(f, f.scheduler);
  std::optional<std::filesystem::path> dir;
  if (!f.out_dir.empty()) dir = f.out_dir;
  const auto res = dpmss::run_experiment(c, dir);
  dpmss::write_metrics_csv(std::cout, res.rows);
  if (c.reps > 1) {
    std::cout << '\n';
    dpmss::write_summary_csv(std::cout, res.summary);
  }
  for (const auto& r : res.runs) {
    for (const auto& v : r.report.violations)
      std::cerr << "seed " << r.seed << ": " << v.kind << " (batch " << v.batch << ", job " << v.job << "): " << v.detail
                << '\n';
    if (r.best_effort)
      std::cerr << "seed " << r.seed << ": best-effort satisfaction " << dpmss::fixed_str(r.best_effort->satisfaction, 4)
                << ", utilization " << dpmss::fixed_str(r.best_effort->utilization, 4) << '\n';
  }
  return res.clean() ? 0 : 1;
}

int cmd_compare(const Flags& f, const std::string& schedulers) {
  std::vector<dpmss::ExperimentConfig> configs;
  for (const auto& s : split(schedulers)) configs.push_back(to_config(f, s));
  const auto cmp = dpmss::compare(configs);
  std::cout << cmp.table() << '\n';
  dpmss::write_metrics_csv(std::cout, cmp.rows);
  if (!f.out_dir.empty()) {
    std::filesystem::create_directories(f.out_dir);
    std::ofstream os(std::filesystem::path(f.out_dir) / "compare.csv");
    dpmss::write_metrics_csv(os, cmp.rows);
  }
  bool clean = true;
  for (const auto& r : cmp.runs) clean = clean && r.clean();
  return clean ? 0 : 1;
}

int cmd_configs(int mhz) {
  const auto& cat = dpmss::ConfigSpace::catalog(dpmss::channel_width_from_mhz(mhz)).configs();
  std::cout << "id,rus,tones,config\n";
  for (std::size_t i = 0; i < cat.size(); ++i)
    std::cout << i << ',' << cat[i].total_rus() << ',' << cat[i].total_tones() << ',' << cat[i].to_string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deadline-aware OFDMA scheduling experiments"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI file with [run] and [compare] sections; flags override it");
  Flags f;

  auto* run = app.add_subcommand("run", "Run one scheduler and write metrics and artifacts");
  add_workload_flags(run, f);
  run->add_option("--scheduler", f.scheduler, "lsds, lsdsf, edf, lrf, nlrf, slotted_optimal, slotted_heuristic")
      ->capture_default_str();
  run->add_option("--reps", f.reps, "Repetitions over consecutive seeds")->capture_default_str();

  std::string schedulers = "lsds,lsdsf,edf,lrf,nlrf";
  auto* cmp = app.add_subcommand("compare", "Run several schedulers on one workload");
  add_workload_flags(cmp, f);
  cmp->add_option("--schedulers", schedulers, "Comma-separated scheduler list")->capture_default_str();

  int mhz = 40;
  auto* cfg = app.add_subcommand("configs", "List the legal RU configurations of a channel width");
  cfg->add_option("--bandwidth", mhz, "Channel width in MHz")->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(f);
    if (*cmp) return cmd_compare(f, schedulers);
    if (*cfg) return cmd_configs(mhz);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
