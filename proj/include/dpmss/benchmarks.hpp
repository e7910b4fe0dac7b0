// SPDX-License-Identifier: Apache-2.0
//
// Round-based greedy benchmarks: EDF, LRF and NLRF. Each round sorts the
// pending jobs by a metric, hands the first M jobs to the M RUs of a
// configuration (largest RU first), and keeps the configuration with the
// highest round profit.

#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dpmss/local_search.hpp"
#include "dpmss/ofdma.hpp"
#include "dpmss/schedule.hpp"
#include "dpmss/workload.hpp"

namespace dpmss {

enum class BenchmarkKind { EDF, LRF, NLRF };

inline std::string to_string(BenchmarkKind k) {
  switch (k) {
    case BenchmarkKind::EDF: return "edf";
    case BenchmarkKind::LRF: return "lrf";
    case BenchmarkKind::NLRF: return "nlrf";
  }
  return "?";
}

/// Priority of a pending job; larger runs first. `remaining` is the time left
/// to the deadline, `sent`/`generated` the per-application counters.
inline double benchmark_metric(BenchmarkKind kind, double profit, Micros remaining, std::int64_t sent,
                               std::int64_t generated) {
  const double rem = static_cast<double>(std::max<Micros>(remaining, 1));
  switch (kind) {
    case BenchmarkKind::EDF: return -rem;
    case BenchmarkKind::LRF: return profit / rem;
    case BenchmarkKind::NLRF:
      return (profit / rem) / (static_cast<double>(sent + 1) / static_cast<double>(generated + 1));
  }
  return 0.0;
}

struct BenchmarkResult {
  Schedule schedule;
  std::int64_t rounds = 0;
};

inline BenchmarkResult greedy_benchmark(BenchmarkKind kind, const JobSet& jobs, ChannelWidth width, const PhyProfile& phy,
                                        const LocalSearchParams& params = {}) {
  phy.validate();
  const Micros g = params.grid > 0 ? params.grid : default_grid_us(phy);
  const Micros horizon = params.horizon > 0 ? params.horizon : jobs.horizon;
  if (params.txop < g) throw std::invalid_argument("TXOP shorter than one grid step");
  const int T = static_cast<int>(horizon / g);
  const int delta = std::min(static_cast<int>(params.txop / g), T);
  const auto& space = ConfigSpace::catalog(width);

  // RU classes of each configuration, largest first.
  std::vector<std::vector<int>> ru_order(space.size());
  for (std::size_t c = 0; c < space.size(); ++c) {
    for (std::size_t k = kNumToneClasses; k-- > 0;)
      for (int q = 0; q < space[c].counts[k]; ++q) ru_order[c].push_back(static_cast<int>(k));
  }
  int top = 0;
  for (std::size_t k = 0; k < kNumToneClasses; ++k)
    if (space.relaxed_counts()[k] > 0) top = static_cast<int>(k);

  const std::size_t n = jobs.jobs.size();
  std::vector<std::array<Micros, kNumToneClasses>> dur(n);
  std::vector<int> rg(n);
  for (std::size_t i = 0; i < n; ++i) {
    dur[i] = tx_durations(jobs.jobs[i].size, phy);
    rg[i] = static_cast<int>((jobs.jobs[i].release + g - 1) / g);
  }
  std::vector<int> by_release(n);
  for (std::size_t i = 0; i < n; ++i) by_release[i] = static_cast<int>(i);
  std::stable_sort(by_release.begin(), by_release.end(),
                   [&](int a, int b) { return rg[static_cast<std::size_t>(a)] < rg[static_cast<std::size_t>(b)]; });

  std::size_t napps = jobs.apps.size();
  for (const auto& j : jobs.jobs) napps = std::max(napps, static_cast<std::size_t>(j.app) + 1);
  std::vector<std::int64_t> sent(napps, 0), generated(napps, 0);

  BenchmarkResult out;
  std::vector<int> pending;
  std::vector<double> key(n, 0.0);
  std::size_t ptr = 0;
  int t = 0;
  while (t < T) {
    const Micros t1 = static_cast<Micros>(t) * g;
    while (ptr < n && rg[static_cast<std::size_t>(by_release[ptr])] <= t) {
      const int j = by_release[ptr++];
      ++generated[static_cast<std::size_t>(jobs.jobs[static_cast<std::size_t>(j)].app)];
      pending.push_back(j);
    }
    std::erase_if(pending, [&](int j) {
      const auto u = static_cast<std::size_t>(j);
      return t1 + dur[u][static_cast<std::size_t>(top)] > jobs.jobs[u].deadline;
    });
    if (pending.empty()) {
      if (ptr >= n) break;
      t = std::max(t + 1, rg[static_cast<std::size_t>(by_release[ptr])]);
      continue;
    }
    for (int j : pending) {
      const auto& job = jobs.jobs[static_cast<std::size_t>(j)];
      const auto a = static_cast<std::size_t>(job.app);
      key[static_cast<std::size_t>(j)] = benchmark_metric(kind, job.profit, job.deadline - t1, sent[a], generated[a]);
    }
    std::sort(pending.begin(), pending.end(), [&](int a, int b) {
      const auto ua = static_cast<std::size_t>(a), ub = static_cast<std::size_t>(b);
      if (key[ua] != key[ub]) return key[ua] > key[ub];
      if (jobs.jobs[ua].station != jobs.jobs[ub].station) return jobs.jobs[ua].station < jobs.jobs[ub].station;
      return a < b;
    });

    const Micros max_len = static_cast<Micros>(std::min(delta, T - t)) * g - 1;
    double best = 0.0;
    int best_c = -1;
    for (std::size_t c = 0; c < space.size(); ++c) {
      const auto& rus = ru_order[c];
      double w = 0.0;
      const std::size_t m = std::min(rus.size(), pending.size());
      for (std::size_t q = 0; q < m; ++q) {
        const auto u = static_cast<std::size_t>(pending[q]);
        const Micros p = dur[u][static_cast<std::size_t>(rus[q])];
        if (p <= max_len && t1 + p <= jobs.jobs[u].deadline) w += jobs.jobs[u].profit;
      }
      if (w > best) {
        best = w;
        best_c = static_cast<int>(c);
      }
    }
    ++out.rounds;
    if (best_c < 0) {
      ++t;
      continue;
    }
    const auto& rus = ru_order[static_cast<std::size_t>(best_c)];
    const int total = static_cast<int>(rus.size());
    Batch batch;
    batch.config = space[static_cast<std::size_t>(best_c)];
    batch.config_id = best_c;
    Micros longest = 0;
    std::vector<char> sent_now(pending.size(), 0);
    const std::size_t m = std::min(rus.size(), pending.size());
    for (std::size_t q = 0; q < m; ++q) {
      const auto u = static_cast<std::size_t>(pending[q]);
      const Micros p = dur[u][static_cast<std::size_t>(rus[q])];
      if (p <= max_len && t1 + p <= jobs.jobs[u].deadline) {
        batch.assignments.push_back({pending[q], total - 1 - static_cast<int>(q)});
        longest = std::max(longest, p);
        sent_now[q] = 1;
        ++sent[static_cast<std::size_t>(jobs.jobs[u].app)];
      }
    }
    const int len = static_cast<int>(longest / g + 1);
    batch.interval = {t1, static_cast<Micros>(t + len) * g - 1};
    out.schedule.batches.push_back(std::move(batch));
    std::vector<int> rest;
    for (std::size_t q = 0; q < pending.size(); ++q)
      if (!sent_now[q]) rest.push_back(pending[q]);
    pending.swap(rest);
    t += len;
  }
  finalize(out.schedule, jobs);
  return out;
}

}  // namespace dpmss
