// SPDX-License-Identifier: Apache-2.0
//
// Experiment pipeline: workload -> scheduler -> validator -> metrics, with
// on-disk artifacts, repetition aggregation and scheduler comparison.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "dpmss/best_effort.hpp"
#include "dpmss/ofdma.hpp"
#include "dpmss/simulator.hpp"
#include "dpmss/workload.hpp"
#include "json.hpp"

namespace dpmss {

struct ExperimentConfig {
  UseCase use_case = UseCase::UC4;
  SchedulerKind scheduler = SchedulerKind::Lsds;
  int bandwidth_mhz = 40;
  ChannelQuality channel = ChannelQuality::Ideal;
  std::array<int, 4> mcs_map = ChannelScenario{}.mcs_map;
  std::uint64_t seed = 1;
  Micros horizon = 200000;
  Micros txop = 4000;
  Micros grid = 0;  // <= 0: default for the scenario's PHY
  int reps = 1;
  bool force = false;
  std::string fixed_config;  // LSDSF, e.g. "8x52+2x26"; empty: default
  std::string slotted_ru;    // slotted schedulers, e.g. "18x26"; empty: all 26-tone RUs
  int window_slots = 10;
  OffsetPolicy offsets = OffsetPolicy::Zero;
  double be_load_mbps = 0.0;  // > 0 runs the best-effort overlay
  int be_nodes = 3;
  bool record_runtime = true;  // false prints NA so reruns are byte-identical

  ChannelWidth width() const { return channel_width_from_mhz(bandwidth_mhz); }

  ChannelScenario scenario() const {
    ChannelScenario s;
    s.quality = channel;
    s.mcs_map = mcs_map;
    return s;
  }

  void validate() const {
    const ChannelWidth w = width();
    if (bandwidth_mhz < minimum_bandwidth_mhz(use_case) && !force)
      throw std::invalid_argument(to_string(use_case) + " at " + std::to_string(bandwidth_mhz) +
                                  " MHz cannot carry its load; use --bandwidth " +
                                  std::to_string(minimum_bandwidth_mhz(use_case)) + " or pass --force");
    scenario().validate();
    if (horizon <= 0) throw std::invalid_argument("horizon must be positive");
    if (txop <= 0) throw std::invalid_argument("TXOP must be positive");
    if (grid < 0) throw std::invalid_argument("grid step must be positive");
    if (grid > 0 && grid > txop) throw std::invalid_argument("grid step exceeds the TXOP");
    if (reps < 1) throw std::invalid_argument("repetitions must be >= 1");
    if (window_slots < 1) throw std::invalid_argument("window must cover at least one slot");
    if (be_load_mbps < 0.0) throw std::invalid_argument("best-effort load must be non-negative");
    if (be_nodes < 1) throw std::invalid_argument("best-effort overlay needs at least one node");
    if (!fixed_config.empty()) parse_configuration(fixed_config, w);
    if (!slotted_ru.empty()) equal_ru_set(parse_configuration(slotted_ru, w));
  }

  SchedulerOptions scheduler_options() const {
    SchedulerOptions o;
    o.width = width();
    o.horizon = horizon;
    o.txop = txop;
    o.grid = grid;
    if (!fixed_config.empty()) o.fixed_config = parse_configuration(fixed_config, o.width);
    if (!slotted_ru.empty()) o.slotted_ru = equal_ru_set(parse_configuration(slotted_ru, o.width));
    o.window_slots = window_slots;
    return o;
  }

  JobSet workload(std::uint64_t s) const {
    StationOffsets off;
    off.policy = offsets;
    off.seed = s;
    return load_use_case(use_case, horizon, s, off);
  }
};

inline std::string to_string(OffsetPolicy p) { return p == OffsetPolicy::Zero ? "zero" : "random"; }

inline OffsetPolicy parse_offsets(const std::string& s) {
  if (s == "zero") return OffsetPolicy::Zero;
  if (s == "random") return OffsetPolicy::Random;
  throw std::invalid_argument("unknown offset policy '" + s + "' (expected zero or random)");
}

struct MetricsRow {
  std::string use_case;
  std::string scheduler;
  int bandwidth_mhz = 0;
  std::string channel;
  std::uint64_t seed = 0;
  double profit_ratio = 0.0;
  double drop_pct = 0.0;
  std::optional<double> critical_drop_pct;
  std::optional<double> runtime_ms;
};

inline const char* kMetricsHeader =
    "use_case,scheduler,bandwidth_mhz,channel,seed,profit_ratio,drop_pct,critical_drop_pct,runtime_ms";

inline std::string fixed_str(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

inline std::string csv_row(const MetricsRow& r) {
  std::ostringstream os;
  os << r.use_case << ',' << r.scheduler << ',' << r.bandwidth_mhz << ',' << r.channel << ',' << r.seed << ','
     << fixed_str(r.profit_ratio, 6) << ',' << fixed_str(r.drop_pct, 4) << ','
     << (r.critical_drop_pct ? fixed_str(*r.critical_drop_pct, 4) : "NA") << ','
     << (r.runtime_ms ? fixed_str(*r.runtime_ms, 3) : "NA");
  return os.str();
}

inline void write_metrics_csv(std::ostream& os, const std::vector<MetricsRow>& rows) {
  os << kMetricsHeader << '\n';
  for (const auto& r : rows) os << csv_row(r) << '\n';
}

struct RunOutcome {
  ExperimentConfig config;
  std::uint64_t seed = 0;
  JobSet jobs;
  SimulationReport report;
  std::optional<BestEffortResult> best_effort;
  MetricsRow row;

  bool clean() const { return report.violations.empty() && (!best_effort || best_effort->violations.empty()); }
};

/// One seeded run. Errors name the failing stage.
inline RunOutcome run_once(const ExperimentConfig& c, std::uint64_t seed) {
  RunOutcome out;
  out.config = c;
  out.seed = seed;
  try {
    out.jobs = c.workload(seed);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("workload stage: ") + e.what());
  }
  try {
    out.report = run_scenario(out.jobs, c.scheduler, c.scenario(), c.scheduler_options());
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("scheduler stage: ") + e.what());
  }
  if (c.be_load_mbps > 0.0) {
    try {
      BestEffortConfig be;
      be.nodes = c.be_nodes;
      be.load_mbps = c.be_load_mbps;
      be.seed = seed;
      be.grid = c.grid;
      be.txop = c.txop;
      be.round_us = c.txop;
      out.best_effort = best_effort_overlay(out.jobs, out.report.schedule, c.width(), out.report.phy, be);
    } catch (const std::exception& e) {
      throw std::runtime_error(std::string("best-effort stage: ") + e.what());
    }
  }
  auto& r = out.row;
  r.use_case = to_string(c.use_case);
  r.scheduler = to_string(c.scheduler);
  r.bandwidth_mhz = c.bandwidth_mhz;
  r.channel = to_string(c.channel);
  r.seed = seed;
  r.profit_ratio = out.report.profit_ratio();
  r.drop_pct = out.report.drop_pct();
  r.critical_drop_pct = out.report.critical_drop_pct();
  if (c.record_runtime) r.runtime_ms = out.report.runtime_ms;
  return out;
}

inline nlohmann::json report_json(const RunOutcome& o) {
  using nlohmann::json;
  const auto& c = o.config;
  const auto& r = o.report;
  json j;
  const Micros grid = c.grid > 0 ? c.grid : default_grid_us(r.phy);
  j["config"] = {{"use_case", to_string(c.use_case)},
                 {"scheduler", to_string(c.scheduler)},
                 {"bandwidth_mhz", c.bandwidth_mhz},
                 {"channel", to_string(c.channel)},
                 {"mcs", r.phy.mcs},
                 {"seed", o.seed},
                 {"horizon_us", c.horizon},
                 {"txop_us", c.txop},
                 {"grid_us", grid},
                 {"offsets", to_string(c.offsets)}};
  if (!c.fixed_config.empty()) j["config"]["fixed_config"] = c.fixed_config;
  if (!c.slotted_ru.empty()) j["config"]["slotted_ru"] = c.slotted_ru;
  j["metrics"] = {{"profit_ratio", r.profit_ratio()},
                  {"drop_pct", r.drop_pct()},
                  {"critical_drop_pct", r.critical_drop_pct() ? json(*r.critical_drop_pct()) : json(nullptr)},
                  {"runtime_ms", c.record_runtime ? json(r.runtime_ms) : json(nullptr)},
                  {"profit_total", r.profit_total},
                  {"profit_delivered", r.profit_delivered}};
  j["jobs"] = {{"total", o.jobs.jobs.size()},
               {"delivered", r.delivered.size()},
               {"dropped", r.dropped.size()},
               {"unservable", r.unservable.size()},
               {"critical_total", r.critical_total},
               {"critical_dropped", r.critical_dropped}};
  j["batches"] = r.schedule.batches.size();
  json apps = json::array();
  for (const auto& a : r.per_app)
    apps.push_back({{"name", a.name},
                    {"generated", a.generated},
                    {"delivered", a.delivered},
                    {"dropped", a.dropped},
                    {"profit_offered", a.profit_offered},
                    {"profit_delivered", a.profit_delivered}});
  j["per_app"] = apps;
  json viol = json::array();
  for (const auto& v : r.violations)
    viol.push_back({{"kind", v.kind}, {"batch", v.batch}, {"job", v.job}, {"machine", v.machine}, {"detail", v.detail}});
  j["violations"] = viol;
  if (o.best_effort) {
    const auto& b = *o.best_effort;
    j["best_effort"] = {{"load_mbps", c.be_load_mbps},
                        {"nodes", c.be_nodes},
                        {"packets", b.packets.size()},
                        {"delivered", b.delivered},
                        {"satisfaction", b.satisfaction},
                        {"utilization", b.utilization},
                        {"threshold", b.threshold},
                        {"violations", b.violations.size()}};
  }
  return j;
}

/// Writes jobs.txt, schedule.txt and report.json for one run into `dir`.
inline void write_run_artifacts(const RunOutcome& o, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_jobs_file((dir / "jobs.txt").string(), o.jobs);
  write_schedule_file((dir / "schedule.txt").string(), o.best_effort ? o.best_effort->schedule : o.report.schedule);
  std::ofstream js(dir / "report.json");
  if (!js) throw std::runtime_error("cannot write " + (dir / "report.json").string());
  js << report_json(o).dump(2) << '\n';
}

/// Worker count: hardware concurrency, capped by DPMSS_THREADS.
inline unsigned worker_count(std::size_t tasks) {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("DPMSS_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(tasks, 1)));
}

/// Runs `fn(i)` for i in [0, n) on a small worker pool; the first error is rethrown.
template <class Fn>
void parallel_for(std::size_t n, Fn fn) {
  const unsigned workers = worker_count(n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

struct Summary {
  std::string metric;
  std::size_t n = 0;
  double mean = 0.0;
  std::optional<double> ci95;  // half-width; absent for a single sample
};

/// Mean and Student-t 95% confidence half-width.
inline Summary summarize(const std::string& metric, const std::vector<double>& xs) {
  Summary s;
  s.metric = metric;
  s.n = xs.size();
  if (xs.empty()) return s;
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(xs.size());
  if (xs.size() < 2) return s;
  double ss = 0.0;
  for (double x : xs) ss += (x - s.mean) * (x - s.mean);
  const double sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  const boost::math::students_t dist(static_cast<double>(xs.size() - 1));
  s.ci95 = boost::math::quantile(boost::math::complement(dist, 0.025)) * sd / std::sqrt(static_cast<double>(xs.size()));
  return s;
}

inline std::vector<Summary> summarize_rows(std::vector<MetricsRow> rows) {
  std::sort(rows.begin(), rows.end(), [](const MetricsRow& a, const MetricsRow& b) { return a.seed < b.seed; });
  std::vector<double> pr, dp, cd, rt;
  for (const auto& r : rows) {
    pr.push_back(r.profit_ratio);
    dp.push_back(r.drop_pct);
    if (r.critical_drop_pct) cd.push_back(*r.critical_drop_pct);
    if (r.runtime_ms) rt.push_back(*r.runtime_ms);
  }
  std::vector<Summary> out{summarize("profit_ratio", pr), summarize("drop_pct", dp)};
  if (!cd.empty()) out.push_back(summarize("critical_drop_pct", cd));
  if (!rt.empty()) out.push_back(summarize("runtime_ms", rt));
  return out;
}

inline void write_summary_csv(std::ostream& os, const std::vector<Summary>& s) {
  os << "metric,n,mean,ci95\n";
  for (const auto& x : s)
    os << x.metric << ',' << x.n << ',' << fixed_str(x.mean, 6) << ',' << (x.ci95 ? fixed_str(*x.ci95, 6) : "NA") << '\n';
}

struct ExperimentResult {
  std::vector<RunOutcome> runs;  // sorted by seed
  std::vector<MetricsRow> rows;
  std::vector<Summary> summary;

  bool clean() const {
    return std::all_of(runs.begin(), runs.end(), [](const RunOutcome& r) { return r.clean(); });
  }
};

/// Runs every repetition (seeds seed .. seed + reps - 1) and, when `out_dir`
/// is set, writes the artifacts. A single repetition writes straight into
/// `out_dir`; several get one `seed-N` subdirectory each plus summary.csv.
inline ExperimentResult run_experiment(const ExperimentConfig& c, const std::optional<std::filesystem::path>& out_dir = {}) {
  c.validate();
  ExperimentResult res;
  res.runs.resize(static_cast<std::size_t>(c.reps));
  parallel_for(res.runs.size(), [&](std::size_t i) { res.runs[i] = run_once(c, c.seed + i); });
  for (const auto& r : res.runs) res.rows.push_back(r.row);
  res.summary = summarize_rows(res.rows);
  if (out_dir) {
    std::filesystem::create_directories(*out_dir);
    if (c.reps == 1) {
      write_run_artifacts(res.runs.front(), *out_dir);
    } else {
      for (const auto& r : res.runs) write_run_artifacts(r, *out_dir / ("seed-" + std::to_string(r.seed)));
      std::ofstream ss(*out_dir / "summary.csv");
      write_summary_csv(ss, res.summary);
    }
    std::ofstream ms(*out_dir / "metrics.csv");
    if (!ms) throw std::runtime_error("cannot write " + (*out_dir / "metrics.csv").string());
    write_metrics_csv(ms, res.rows);
  }
  return res;
}

struct Comparison {
  std::vector<RunOutcome> runs;
  std::vector<MetricsRow> rows;

  std::string table() const {
    std::ostringstream os;
    os << std::left << std::setw(20) << "scheduler" << std::right << std::setw(14) << "profit_ratio" << std::setw(10)
       << "drop_%" << std::setw(12) << "critical_%" << std::setw(14) << "runtime_ms" << '\n';
    for (const auto& r : rows)
      os << std::left << std::setw(20) << r.scheduler << std::right << std::setw(14) << fixed_str(r.profit_ratio, 4)
         << std::setw(10) << fixed_str(r.drop_pct, 2) << std::setw(12)
         << (r.critical_drop_pct ? fixed_str(*r.critical_drop_pct, 2) : "NA") << std::setw(14)
         << (r.runtime_ms ? fixed_str(*r.runtime_ms, 1) : "NA") << '\n';
    return os.str();
  }
};

/// Runs each configuration once on the shared workload.
inline Comparison compare(const std::vector<ExperimentConfig>& configs) {
  if (configs.size() < 2) throw std::invalid_argument("compare needs at least two configurations");
  const auto& f = configs.front();
  for (const auto& c : configs) {
    c.validate();
    if (c.use_case != f.use_case || c.seed != f.seed || c.horizon != f.horizon || c.offsets != f.offsets)
      throw std::invalid_argument("compare needs one workload: use case, seed, horizon and offsets must match");
  }
  Comparison out;
  out.runs.resize(configs.size());
  parallel_for(configs.size(), [&](std::size_t i) { out.runs[i] = run_once(configs[i], configs[i].seed); });
  for (const auto& r : out.runs) out.rows.push_back(r.row);
  return out;
}

}  // namespace dpmss
