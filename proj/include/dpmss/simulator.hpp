// SPDX-License-Identifier: Apache-2.0
//
// Schedule validation, the scheduler registry and channel scenarios.

#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dpmss/benchmarks.hpp"
#include "dpmss/local_search.hpp"
#include "dpmss/ofdma.hpp"
#include "dpmss/schedule.hpp"
#include "dpmss/slotted.hpp"
#include "dpmss/workload.hpp"

namespace dpmss {

struct Violation {
  std::string kind;  // interval_length, empty_interval, illegal_config, bandwidth, unknown_machine,
                     // unknown_job, machine_reuse, admissibility, conflict, job_reuse, profit_mismatch
  int batch = -1;
  int job = -1;
  int machine = -1;
  std::string detail;
};

namespace detail {

inline bool fits_some_configuration(const RuConfiguration& cfg) {
  for (const auto& c : ConfigSpace::catalog(cfg.channel_width).configs()) {
    bool ok = true;
    for (std::size_t k = 0; k < kNumToneClasses && ok; ++k) ok = cfg.counts[k] <= c.counts[k];
    if (ok) return true;
  }
  return false;
}

}  // namespace detail

/// Every constraint a feasible schedule must meet. An empty result means feasible.
inline std::vector<Violation> validate_schedule(const Schedule& s, const JobSet& jobs, ChannelWidth width,
                                                const PhyProfile& phy, Micros txop) {
  std::vector<Violation> out;
  const auto& catalog = ConfigSpace::catalog(width).configs();
  const int n = static_cast<int>(jobs.jobs.size());
  std::vector<int> used_in(static_cast<std::size_t>(n), -1);
  double profit = 0.0;
  for (std::size_t bi = 0; bi < s.batches.size(); ++bi) {
    const auto& b = s.batches[bi];
    const int bidx = static_cast<int>(bi);
    const Interval& iv = b.interval;
    if (iv.end <= iv.start) out.push_back({"empty_interval", bidx, -1, -1, "interval end must follow start"});
    if (iv.length() > txop) out.push_back({"interval_length", bidx, -1, -1, "interval longer than TXOP"});

    bool legal = b.config.channel_width == width;
    if (legal) {
      if (b.config_id >= 0) {
        legal = static_cast<std::size_t>(b.config_id) < catalog.size() &&
                catalog[static_cast<std::size_t>(b.config_id)].counts == b.config.counts;
      } else {
        legal = detail::fits_some_configuration(b.config);
      }
    }
    if (!legal) out.push_back({"illegal_config", bidx, -1, -1, b.config.to_string()});
    if (b.config.total_tones() > budget_tones(width)) out.push_back({"bandwidth", bidx, -1, -1, "RU tones exceed budget"});

    const int machines = b.config.total_rus();
    std::vector<int> machine_use(static_cast<std::size_t>(std::max(machines, 0)), 0);
    for (const auto& a : b.assignments) {
      bool ok = true;
      if (a.machine < 0 || a.machine >= machines) {
        out.push_back({"unknown_machine", bidx, a.job, a.machine, "machine not in configuration"});
        ok = false;
      } else if (++machine_use[static_cast<std::size_t>(a.machine)] > 1) {
        out.push_back({"machine_reuse", bidx, a.job, a.machine, "machine carries more than one job"});
      }
      if (a.job < 0 || a.job >= n) {
        out.push_back({"unknown_job", bidx, a.job, a.machine, "job id out of range"});
        continue;
      }
      auto& first = used_in[static_cast<std::size_t>(a.job)];
      if (first >= 0) {
        out.push_back({"job_reuse", bidx, a.job, a.machine, "job also in batch " + std::to_string(first)});
      } else {
        first = bidx;
        profit += jobs.jobs[static_cast<std::size_t>(a.job)].profit;
      }
      if (!ok) continue;
      const Job& j = jobs.jobs[static_cast<std::size_t>(a.job)];
      const Micros p = tx_duration(j.size, b.config.machine_class(a.machine), phy);
      if (!admissible(j, p, iv)) {
        out.push_back({"admissibility", bidx, a.job, a.machine,
                       "job " + std::to_string(a.job) + " released " + std::to_string(j.release) + ", deadline " +
                           std::to_string(j.deadline) + ", needs " + std::to_string(p) + " us in [" +
                           std::to_string(iv.start) + ", " + std::to_string(iv.end) + "]"});
      }
    }
  }
  std::vector<std::size_t> order(s.batches.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return s.batches[a].interval.start < s.batches[b].interval.start; });
  for (std::size_t x = 0; x < order.size(); ++x) {
    for (std::size_t y = x + 1; y < order.size(); ++y) {
      const auto& a = s.batches[order[x]].interval;
      const auto& b = s.batches[order[y]].interval;
      if (b.start > a.end) break;
      out.push_back({"conflict", static_cast<int>(order[y]), -1, -1,
                     "overlaps batch " + std::to_string(order[x])});
    }
  }
  if (std::fabs(profit - s.total_profit) > 1e-6 * std::max(1.0, std::fabs(profit)))
    out.push_back({"profit_mismatch", -1, -1, -1, "recorded total profit differs from the scheduled jobs"});
  return out;
}

// ---- scheduler registry ------------------------------------------------------

enum class SchedulerKind { Lsds, Lsdsf, Edf, Lrf, Nlrf, SlottedOptimal, SlottedHeuristic };

inline constexpr std::array<SchedulerKind, 7> kAllSchedulers = {
    SchedulerKind::Lsds, SchedulerKind::Lsdsf,          SchedulerKind::Edf,
    SchedulerKind::Lrf,  SchedulerKind::Nlrf,           SchedulerKind::SlottedOptimal,
    SchedulerKind::SlottedHeuristic};

inline std::string to_string(SchedulerKind k) {
  switch (k) {
    case SchedulerKind::Lsds: return "lsds";
    case SchedulerKind::Lsdsf: return "lsdsf";
    case SchedulerKind::Edf: return "edf";
    case SchedulerKind::Lrf: return "lrf";
    case SchedulerKind::Nlrf: return "nlrf";
    case SchedulerKind::SlottedOptimal: return "slotted_optimal";
    case SchedulerKind::SlottedHeuristic: return "slotted_heuristic";
  }
  return "?";
}

inline SchedulerKind parse_scheduler(const std::string& s) {
  for (auto k : kAllSchedulers)
    if (to_string(k) == s) return k;
  throw std::invalid_argument("unknown scheduler '" + s +
                              "' (expected lsds, lsdsf, edf, lrf, nlrf, slotted_optimal, slotted_heuristic)");
}

struct SchedulerOptions {
  ChannelWidth width = ChannelWidth::MHz40;
  Micros horizon = 0;  // <= 0: the job set's horizon
  Micros txop = 4000;
  Micros grid = 0;
  std::optional<RuConfiguration> fixed_config;  // LSDSF; default: most 26-tone RUs
  std::optional<EqualRuSet> slotted_ru;         // default: all 26-tone RUs
  Micros slot_us = 1000;
  int window_slots = 10;
};

inline LocalSearchParams local_params(const SchedulerOptions& o) { return {o.horizon, o.txop, o.grid}; }

inline Schedule run_scheduler(SchedulerKind kind, const JobSet& jobs, const PhyProfile& phy, const SchedulerOptions& o) {
  switch (kind) {
    case SchedulerKind::Lsds: return lsds(jobs, o.width, phy, local_params(o)).schedule;
    case SchedulerKind::Lsdsf:
      return lsdsf(jobs, o.fixed_config.value_or(default_fixed_configuration(o.width)), phy, local_params(o)).schedule;
    case SchedulerKind::Edf: return greedy_benchmark(BenchmarkKind::EDF, jobs, o.width, phy, local_params(o)).schedule;
    case SchedulerKind::Lrf: return greedy_benchmark(BenchmarkKind::LRF, jobs, o.width, phy, local_params(o)).schedule;
    case SchedulerKind::Nlrf: return greedy_benchmark(BenchmarkKind::NLRF, jobs, o.width, phy, local_params(o)).schedule;
    case SchedulerKind::SlottedOptimal:
    case SchedulerKind::SlottedHeuristic: {
      SlottedOptions so;
      so.slot_us = o.slot_us;
      so.width = o.width;
      so.phy = phy;
      so.txop = o.txop;
      const EqualRuSet ru = o.slotted_ru.value_or(EqualRuSet{RuToneClass::Ru26, max_ru_counts(o.width)[0]});
      JobSet view = jobs;
      if (o.horizon > 0) view.horizon = o.horizon;
      return slotted_schedule(view, ru, so, kind == SchedulerKind::SlottedOptimal ? 0 : o.window_slots);
    }
  }
  throw std::invalid_argument("unknown scheduler");
}

// ---- channel scenarios -------------------------------------------------------

enum class ChannelQuality { Ideal = 0, SlightlyPoor, ModeratelyPoor, VeryPoor };

inline constexpr std::array<ChannelQuality, 4> kAllQualities = {ChannelQuality::Ideal, ChannelQuality::SlightlyPoor,
                                                                 ChannelQuality::ModeratelyPoor, ChannelQuality::VeryPoor};

inline std::string to_string(ChannelQuality q) {
  switch (q) {
    case ChannelQuality::Ideal: return "ideal";
    case ChannelQuality::SlightlyPoor: return "slightly_poor";
    case ChannelQuality::ModeratelyPoor: return "moderately_poor";
    case ChannelQuality::VeryPoor: return "very_poor";
  }
  return "?";
}

inline ChannelQuality parse_channel(const std::string& s) {
  for (auto q : kAllQualities)
    if (to_string(q) == s) return q;
  if (s == "slightly") return ChannelQuality::SlightlyPoor;
  if (s == "moderately") return ChannelQuality::ModeratelyPoor;
  if (s == "very") return ChannelQuality::VeryPoor;
  throw std::invalid_argument("unknown channel quality '" + s + "' (expected ideal, slightly_poor, moderately_poor, very_poor)");
}

struct ChannelScenario {
  ChannelQuality quality = ChannelQuality::Ideal;
  /// MCS per quality, best to worst.
  std::array<int, 4> mcs_map = {11, 9, 7, 0};

  int mcs() const { return mcs_map[static_cast<std::size_t>(quality)]; }

  void validate() const {
    if (mcs_map[0] != 11) throw std::invalid_argument("ideal channel must use MCS 11");
    for (std::size_t k = 1; k < mcs_map.size(); ++k)
      if (mcs_map[k] > mcs_map[k - 1] || mcs_map[k] < 0)
        throw std::invalid_argument("MCS map must not increase as the channel worsens");
  }
};

struct AppCounters {
  std::string name;
  int generated = 0;
  int delivered = 0;
  int dropped = 0;
  double profit_offered = 0.0;
  double profit_delivered = 0.0;
};

struct SimulationReport {
  std::string scheduler;
  ChannelQuality quality = ChannelQuality::Ideal;
  PhyProfile phy{};
  Schedule schedule;
  std::vector<int> delivered;
  std::vector<int> dropped;
  std::vector<int> unservable;  // dropped jobs no schedule could deliver
  std::vector<AppCounters> per_app;
  std::vector<Violation> violations;
  double runtime_ms = 0.0;

  double profit_total = 0.0;
  double profit_delivered = 0.0;
  int critical_total = 0;
  int critical_dropped = 0;
  int critical_unservable = 0;
  bool critical_breakdown = false;

  double profit_ratio() const { return profit_total > 0.0 ? profit_delivered / profit_total : 1.0; }
  /// Drop percentages leave out unservable jobs on both sides.
  double drop_pct() const {
    const auto n = delivered.size() + dropped.size() - unservable.size();
    return n ? 100.0 * static_cast<double>(dropped.size() - unservable.size()) / static_cast<double>(n) : 0.0;
  }
  std::optional<double> critical_drop_pct() const {
    const int n = critical_total - critical_unservable;
    if (!critical_breakdown || n <= 0) return std::nullopt;
    return 100.0 * (critical_dropped - critical_unservable) / n;
  }
};

/// Marks jobs that cannot be delivered under the scheduler's time
/// discretization even alone on the widest RU of the channel: released too
/// close to the horizon or to their own deadline.
inline std::vector<char> unservable_mask(const JobSet& jobs, SchedulerKind kind, const PhyProfile& phy,
                                         const SchedulerOptions& o) {
  const RuCounts maxc = max_ru_counts(o.width);
  RuToneClass widest = RuToneClass::Ru26;
  for (std::size_t k = 0; k < kNumToneClasses; ++k)
    if (maxc[k] > 0) widest = tone_class_at(k);
  const Micros horizon = o.horizon > 0 ? o.horizon : jobs.horizon;
  std::vector<char> out(jobs.jobs.size(), 0);
  if (kind == SchedulerKind::SlottedOptimal || kind == SchedulerKind::SlottedHeuristic) {
    SlottedOptions so;
    so.slot_us = o.slot_us;
    so.phy = phy;
    const int n_slots = static_cast<int>(horizon / o.slot_us);
    for (std::size_t i = 0; i < out.size(); ++i) {
      const auto [lo, hi] = detail::slot_range(jobs.jobs[i], widest, so, 0, n_slots);
      out[i] = lo > hi;
    }
    return out;
  }
  const Micros g = o.grid > 0 ? o.grid : default_grid_us(phy);
  const Micros T = horizon / g;
  const Micros delta = std::min(o.txop / g, T);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Job& j = jobs.jobs[i];
    const Micros p = tx_duration(j.size, widest, phy);
    const Micros t = (j.release + g - 1) / g;
    out[i] = !(t < T && p <= std::min(delta, T - t) * g - 1 && t * g + p <= j.deadline);
  }
  return out;
}

/// Tallies delivered and dropped jobs of an already validated schedule.
inline void tally(SimulationReport& r, const JobSet& jobs, const std::vector<char>& unservable = {}) {
  std::vector<char> got(jobs.jobs.size(), 0);
  for (int j : r.schedule.scheduled_jobs)
    if (j >= 0 && static_cast<std::size_t>(j) < got.size()) got[static_cast<std::size_t>(j)] = 1;
  std::size_t napps = jobs.apps.size();
  for (const auto& j : jobs.jobs) napps = std::max(napps, static_cast<std::size_t>(j.app) + 1);
  r.per_app.assign(napps, {});
  for (std::size_t a = 0; a < jobs.apps.size(); ++a) r.per_app[a].name = jobs.apps[a].name;
  r.delivered.clear();
  r.dropped.clear();
  r.unservable.clear();
  r.profit_total = r.profit_delivered = 0.0;
  r.critical_total = r.critical_dropped = r.critical_unservable = 0;
  r.critical_breakdown = jobs.has_critical_breakdown();
  for (const auto& j : jobs.jobs) {
    auto& c = r.per_app[static_cast<std::size_t>(j.app)];
    ++c.generated;
    c.profit_offered += j.profit;
    r.profit_total += j.profit;
    if (j.critical) ++r.critical_total;
    if (got[static_cast<std::size_t>(j.id)]) {
      r.delivered.push_back(j.id);
      ++c.delivered;
      c.profit_delivered += j.profit;
      r.profit_delivered += j.profit;
    } else {
      r.dropped.push_back(j.id);
      ++c.dropped;
      if (j.critical) ++r.critical_dropped;
      if (!unservable.empty() && unservable[static_cast<std::size_t>(j.id)]) {
        r.unservable.push_back(j.id);
        if (j.critical) ++r.critical_unservable;
      }
    }
  }
}

/// Runs one scheduler on `jobs` under the scenario's MCS, validates the result
/// and scores it. Jobs not scheduled by their deadline count as dropped.
inline SimulationReport run_scenario(const JobSet& jobs, SchedulerKind kind, const ChannelScenario& channel,
                                     const SchedulerOptions& opts, PhyProfile base = {}) {
  channel.validate();
  SimulationReport r;
  r.scheduler = to_string(kind);
  r.quality = channel.quality;
  r.phy = base;
  r.phy.mcs = channel.mcs();
  ConfigSpace::catalog(opts.width);  // built once per process; kept out of the timing
  const auto t0 = std::chrono::steady_clock::now();
  try {
    r.schedule = run_scheduler(kind, jobs, r.phy, opts);
  } catch (const std::exception& e) {
    throw std::runtime_error("scheduler " + r.scheduler + " failed: " + e.what());
  }
  r.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  r.violations = validate_schedule(r.schedule, jobs, opts.width, r.phy, opts.txop);
  tally(r, jobs, unservable_mask(jobs, kind, r.phy, opts));
  return r;
}

}  // namespace dpmss
