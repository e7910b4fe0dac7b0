// SPDX-License-Identifier: Apache-2.0
//
// Exhaustive optimum for tiny instances: every batch start and length on the
// grid, every job subset, every assignment. Used as a test oracle.

#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "dpmss/ofdma.hpp"
#include "dpmss/schedule.hpp"
#include "dpmss/workload.hpp"

namespace dpmss {

struct BruteForceParams {
  Micros grid = 16;
  int horizon_units = 12;  // T
  int txop_units = 4;      // delta
  std::int64_t max_states = 10'000'000;
};

namespace detail {

/// Can every job of `subset` get its own machine of `classes` within `iv`?
inline bool assignable(const std::vector<const Job*>& subset, const std::vector<int>& classes, const Interval& iv,
                       const PhyProfile& phy, std::size_t at, std::vector<char>& taken) {
  if (at == subset.size()) return true;
  const Job& j = *subset[at];
  for (std::size_t m = 0; m < classes.size(); ++m) {
    if (taken[m]) continue;
    if (!admissible(j, tx_duration(j.size, tone_class_at(static_cast<std::size_t>(classes[m])), phy), iv)) continue;
    taken[m] = 1;
    const bool ok = assignable(subset, classes, iv, phy, at + 1, taken);
    taken[m] = 0;
    if (ok) return true;
  }
  return false;
}

}  // namespace detail

/// True optimum of the batch scheduling problem where each batch may use any
/// one of `machine_sets` (a single entry is the fixed-machine case).
inline double brute_force_optimal(const JobSet& jobs, const std::vector<RuCounts>& machine_sets, const PhyProfile& phy,
                                  const BruteForceParams& p) {
  const std::size_t n = jobs.jobs.size();
  if (n == 0) return 0.0;
  if (n > 20) throw std::invalid_argument("brute force limited to 20 jobs");
  const int T = p.horizon_units;
  const int delta = std::min(p.txop_units, T);
  const std::int64_t masks = std::int64_t{1} << n;
  if (static_cast<std::int64_t>(T + 2) * masks > p.max_states)
    throw std::invalid_argument("brute force state space exceeds guard");

  std::vector<std::vector<int>> class_lists;
  for (const auto& counts : machine_sets) {
    std::vector<int> cl;
    for (std::size_t k = 0; k < kNumToneClasses; ++k)
      for (int q = 0; q < counts[k]; ++q) cl.push_back(static_cast<int>(k));
    class_lists.push_back(cl);
  }
  std::vector<double> w(static_cast<std::size_t>(masks), 0.0);
  for (std::int64_t s = 1; s < masks; ++s) {
    const int low = __builtin_ctzll(static_cast<unsigned long long>(s));
    w[static_cast<std::size_t>(s)] = w[static_cast<std::size_t>(s & (s - 1))] + jobs.jobs[static_cast<std::size_t>(low)].profit;
  }

  // feasible[t][len] = every subset that fits the cells t .. t + len - 1.
  std::vector<std::vector<std::vector<std::int64_t>>> feasible(static_cast<std::size_t>(T + 1),
                                                               std::vector<std::vector<std::int64_t>>(static_cast<std::size_t>(delta + 1)));
  for (int t = 0; t <= T; ++t) {
    for (int len = 1; len <= delta && t + len <= T; ++len) {
      const Interval iv{static_cast<Micros>(t) * p.grid, static_cast<Micros>(t + len) * p.grid - 1};
      for (std::int64_t s = 1; s < masks; ++s) {
        std::vector<const Job*> subset;
        for (std::size_t k = 0; k < n; ++k)
          if (s & (std::int64_t{1} << k)) subset.push_back(&jobs.jobs[k]);
        for (const auto& cl : class_lists) {
          if (subset.size() > cl.size()) continue;
          std::vector<char> taken(cl.size(), 0);
          if (detail::assignable(subset, cl, iv, phy, 0, taken)) {
            feasible[static_cast<std::size_t>(t)][static_cast<std::size_t>(len)].push_back(s);
            break;
          }
        }
      }
    }
  }

  // best[t][mask]: most profit from batches starting at or after t, jobs in mask used.
  std::vector<std::vector<double>> best(static_cast<std::size_t>(T + 2), std::vector<double>(static_cast<std::size_t>(masks), 0.0));
  for (int t = T; t >= 0; --t) {
    auto& row = best[static_cast<std::size_t>(t)];
    const auto& next = best[static_cast<std::size_t>(t + 1)];
    for (std::int64_t mask = 0; mask < masks; ++mask) {
      double v = next[static_cast<std::size_t>(mask)];
      for (int len = 1; len <= delta && t + len <= T; ++len) {
        const auto& after = best[static_cast<std::size_t>(t + len)];
        for (std::int64_t s : feasible[static_cast<std::size_t>(t)][static_cast<std::size_t>(len)]) {
          if (s & mask) continue;
          v = std::max(v, w[static_cast<std::size_t>(s)] + after[static_cast<std::size_t>(mask | s)]);
        }
      }
      row[static_cast<std::size_t>(mask)] = v;
    }
  }
  return best[0][0];
}

inline double brute_force_optimal(const JobSet& jobs, const std::vector<Machine>& machines, const BruteForceParams& p) {
  if (machines.empty()) return 0.0;
  RuCounts counts{};
  for (const auto& m : machines) {
    if (!(m.phy == machines.front().phy)) throw std::invalid_argument("machines must share one PHY profile");
    ++counts[class_index(m.tone_class)];
  }
  return brute_force_optimal(jobs, std::vector<RuCounts>{counts}, machines.front().phy, p);
}

}  // namespace dpmss
