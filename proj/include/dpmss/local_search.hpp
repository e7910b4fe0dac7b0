// SPDX-License-Identifier: Apache-2.0
//
// Local-search deadline schedulers: LSDSF (fixed RU configuration) and LSDS
// (configuration searched per interval).

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "dpmss/matching.hpp"
#include "dpmss/ofdma.hpp"
#include "dpmss/schedule.hpp"
#include "dpmss/workload.hpp"

namespace dpmss {

/// Smallest whole number of OFDM symbols lasting at least 100 us, rounded up
/// to the microsecond, plus 1 us. A batch of l cells spans [t*g, (t+l)*g - 1],
/// so every cell still carries the full symbol count.
inline Micros default_grid_us(const PhyProfile& phy) {
  const std::int64_t sym = phy.symbol_duration_ns();
  const std::int64_t k = (100000 + sym - 1) / sym;
  return (k * sym + 999) / 1000 + 1;
}

struct LocalSearchParams {
  Micros horizon = 0;  // <= 0: use the job set's horizon
  Micros txop = 4000;
  Micros grid = 0;  // <= 0: default_grid_us(phy)
};

struct LocalSearchTrace {
  Micros grid = 0;
  int horizon_units = 0;  // T on the grid
  int txop_units = 0;     // delta on the grid
  std::int64_t intervals = 0;
  std::int64_t commits = 0;
  std::vector<double> committed;  // weight of each committed batch
  std::vector<double> evicted;    // weight evicted by that commit
};

struct LocalSearchResult {
  Schedule schedule;
  LocalSearchTrace trace;
};

namespace detail {

class LocalSearchEngine {
 public:
  // Fixed configuration (LSDSF).
  LocalSearchEngine(const JobSet& jobs, const RuConfiguration& fixed, int fixed_id, const PhyProfile& phy,
                    const LocalSearchParams& params)
      : jobs_(jobs), phy_(phy), fixed_(fixed), fixed_id_(fixed_id), space_(nullptr) {
    init(params, fixed.counts);
  }

  // Searched configuration (LSDS).
  LocalSearchEngine(const JobSet& jobs, const ConfigSpace& space, const PhyProfile& phy, const LocalSearchParams& params)
      : jobs_(jobs), phy_(phy), fixed_id_(-1), space_(&space) {
    init(params, space.relaxed_counts());
  }

  LocalSearchResult run() {
    const int n = static_cast<int>(jobs_.jobs.size());
    sched_.assign(static_cast<std::size_t>(n), -1);
    for (int len = 1; len <= delta_; ++len) pass(len);
    LocalSearchResult out;
    out.trace = trace_;
    for (const auto& b : batches_) {
      if (!b.alive) continue;
      Batch batch;
      batch.interval = {static_cast<Micros>(b.t1) * grid_, static_cast<Micros>(b.t2) * grid_ - 1};
      if (space_) {
        batch.config = (*space_)[static_cast<std::size_t>(b.config_index)];
        batch.config_id = find_configuration_id(ConfigSpace::catalog(batch.config.channel_width).configs(), batch.config);
      } else {
        batch.config = fixed_;
        batch.config_id = fixed_id_;
      }
      for (std::size_t q = 0; q < b.jobs.size(); ++q) batch.assignments.push_back({b.jobs[q], b.machines[q]});
      out.schedule.batches.push_back(std::move(batch));
    }
    finalize(out.schedule, jobs_);
    return out;
  }

 private:
  struct LiveBatch {
    int t1 = 0;
    int t2 = 0;
    double weight = 0.0;
    int config_index = 0;
    std::vector<int> jobs;
    std::vector<int> machines;
    bool alive = true;
  };

  void init(const LocalSearchParams& params, const RuCounts& present) {
    present_ = present;
    grid_ = params.grid > 0 ? params.grid : default_grid_us(phy_);
    const Micros horizon = params.horizon > 0 ? params.horizon : jobs_.horizon;
    if (horizon <= 0) throw std::invalid_argument("local search needs a positive horizon");
    if (params.txop < grid_) throw std::invalid_argument("TXOP shorter than one grid step");
    T_ = static_cast<int>(horizon / grid_);
    delta_ = std::min(static_cast<int>(params.txop / grid_), T_);
    trace_.grid = grid_;
    trace_.horizon_units = T_;
    trace_.txop_units = delta_;

    const std::size_t n = jobs_.jobs.size();
    dur_.resize(n);
    rg_.resize(n);
    pbest_.resize(n);
    int top = -1;
    for (std::size_t k = 0; k < kNumToneClasses; ++k)
      if (present_[k] > 0) top = static_cast<int>(k);
    std::map<std::int64_t, std::array<Micros, kNumToneClasses>> cache;
    for (std::size_t i = 0; i < n; ++i) {
      const Job& j = jobs_.jobs[i];
      auto it = cache.find(j.size);
      if (it == cache.end()) it = cache.emplace(j.size, tx_durations(j.size, phy_)).first;
      dur_[i] = it->second;
      rg_[i] = static_cast<int>((j.release + grid_ - 1) / grid_);
      pbest_[i] = top >= 0 ? dur_[i][static_cast<std::size_t>(top)] : std::numeric_limits<Micros>::max();
    }
    by_rank_.resize(n);
    for (std::size_t i = 0; i < n; ++i) by_rank_[i] = static_cast<int>(i);
    std::sort(by_rank_.begin(), by_rank_.end(),
              [&](int a, int b) { return priority_before(jobs_.jobs[static_cast<std::size_t>(a)], jobs_.jobs[static_cast<std::size_t>(b)]); });
    rank_.resize(n);
    for (std::size_t r = 0; r < n; ++r) rank_[static_cast<std::size_t>(by_rank_[r])] = static_cast<int>(r);
    by_release_ = by_rank_;
    std::stable_sort(by_release_.begin(), by_release_.end(),
                     [&](int a, int b) { return rg_[static_cast<std::size_t>(a)] < rg_[static_cast<std::size_t>(b)]; });
    cap_ = suffix_counts(present_);
  }

  bool usable(int j, int t, int len) const {
    const auto u = static_cast<std::size_t>(j);
    const Job& job = jobs_.jobs[u];
    return job.profit > 0.0 && pbest_[u] <= static_cast<Micros>(len) * grid_ - 1 &&
           static_cast<Micros>(t) * grid_ + pbest_[u] <= job.deadline;
  }

  void pass(int len) {
    std::set<int> active;
    std::size_t ptr = 0;
    const Micros room_len = static_cast<Micros>(len) * grid_ - 1;
    std::vector<Candidate> cands;
    std::vector<int> conflicting;
    for (int t = 0; t + len <= T_; ++t) {
      while (ptr < by_release_.size() && rg_[static_cast<std::size_t>(by_release_[ptr])] <= t) {
        const int j = by_release_[ptr++];
        if (sched_[static_cast<std::size_t>(j)] < 0 && usable(j, t, len)) active.insert(rank_[static_cast<std::size_t>(j)]);
      }
      ++trace_.intervals;
      if (active.empty()) continue;

      // Max-Profit on the fixed (or relaxed) machine set, in priority order.
      const Micros t1 = static_cast<Micros>(t) * grid_;
      cands.clear();
      int used[kNumToneClasses] = {0, 0, 0, 0, 0, 0};
      int count = 0;
      double weight = 0.0;
      for (auto it = active.begin(); it != active.end() && count < cap_[0];) {
        const int j = by_rank_[static_cast<std::size_t>(*it)];
        const auto u = static_cast<std::size_t>(j);
        const Job& job = jobs_.jobs[u];
        if (t1 + pbest_[u] > job.deadline) {
          it = active.erase(it);
          continue;
        }
        ++it;
        const int c = min_class(dur_[u], std::min(room_len, job.deadline - t1), present_);
        if (c < 0) continue;
        bool ok = true;
        for (int k = 0; k <= c; ++k)
          if (used[k] + 1 > cap_[static_cast<std::size_t>(k)]) {
            ok = false;
            break;
          }
        if (!ok) continue;
        for (int k = 0; k <= c; ++k) ++used[k];
        ++count;
        weight += job.profit;
        cands.push_back({j, job.profit, c});
      }
      if (cands.empty()) continue;

      conflicting.clear();
      double conflict_weight = 0.0;
      for (auto it = by_start_.lower_bound(t + len); it != by_start_.begin();) {
        --it;
        const auto& b = batches_[static_cast<std::size_t>(it->second)];
        if (b.t1 < t - delta_) break;
        if (b.t2 > t) {
          conflicting.push_back(it->second);
          conflict_weight += b.weight;
        }
      }
      if (!weight_less(2.0 * conflict_weight, weight)) continue;

      LiveBatch nb;
      nb.t1 = t;
      nb.t2 = t + len;
      std::vector<int> cmins;
      if (space_) {
        const auto best = search_configs(*space_, cands, weight);
        if (!weight_less(2.0 * conflict_weight, best.weight)) continue;
        nb.config_index = best.index;
        nb.weight = best.weight;
        for (int i : best.picked) {
          nb.jobs.push_back(cands[static_cast<std::size_t>(i)].job);
          cmins.push_back(cands[static_cast<std::size_t>(i)].cmin);
        }
        nb.machines = assign_nested(cmins, (*space_)[static_cast<std::size_t>(best.index)].counts);
      } else {
        nb.weight = weight;
        for (const auto& c : cands) {
          nb.jobs.push_back(c.job);
          cmins.push_back(c.cmin);
        }
        nb.machines = assign_nested(cmins, fixed_.counts);
      }

      for (int bi : conflicting) {
        auto& b = batches_[static_cast<std::size_t>(bi)];
        b.alive = false;
        by_start_.erase(b.t1);
        for (int j : b.jobs) {
          sched_[static_cast<std::size_t>(j)] = -1;
          if (rg_[static_cast<std::size_t>(j)] <= t && usable(j, t, len)) active.insert(rank_[static_cast<std::size_t>(j)]);
        }
      }
      const int idx = static_cast<int>(batches_.size());
      for (int j : nb.jobs) {
        sched_[static_cast<std::size_t>(j)] = idx;
        active.erase(rank_[static_cast<std::size_t>(j)]);
      }
      ++trace_.commits;
      trace_.committed.push_back(nb.weight);
      trace_.evicted.push_back(conflict_weight);
      by_start_[nb.t1] = idx;
      batches_.push_back(std::move(nb));
    }
  }

  const JobSet& jobs_;
  PhyProfile phy_;
  RuConfiguration fixed_;
  int fixed_id_;
  const ConfigSpace* space_;
  RuCounts present_{};
  SuffixCounts cap_{};
  Micros grid_ = 0;
  int T_ = 0;
  int delta_ = 0;
  std::vector<std::array<Micros, kNumToneClasses>> dur_;
  std::vector<int> rg_;
  std::vector<Micros> pbest_;
  std::vector<int> by_rank_, rank_, by_release_;
  std::vector<int> sched_;
  std::vector<LiveBatch> batches_;
  std::map<int, int> by_start_;
  LocalSearchTrace trace_;
};

}  // namespace detail

/// LSDSF on a fixed RU multiset. `fixed` need not be a complete legal
/// configuration; machine ids in the schedule are canonical indices of `fixed`.
inline LocalSearchResult lsdsf(const JobSet& jobs, const RuConfiguration& fixed, const PhyProfile& phy,
                               const LocalSearchParams& params = {}) {
  phy.validate();
  const int id = find_configuration_id(ConfigSpace::catalog(fixed.channel_width).configs(), fixed);
  return detail::LocalSearchEngine(jobs, fixed, id, phy, params).run();
}

/// LSDSF on an explicit machine list sharing one PHY profile. The schedule
/// refers to machines by canonical index (tone class ascending, then list order).
inline LocalSearchResult lsdsf(const JobSet& jobs, const std::vector<Machine>& machines, ChannelWidth width,
                               const LocalSearchParams& params = {}) {
  if (machines.empty()) throw std::invalid_argument("LSDSF needs at least one machine");
  RuConfiguration cfg;
  cfg.channel_width = width;
  for (const auto& m : machines) {
    if (!(m.phy == machines.front().phy)) throw std::invalid_argument("LSDSF machines must share one PHY profile");
    ++cfg.counts[class_index(m.tone_class)];
  }
  return lsdsf(jobs, cfg, machines.front().phy, params);
}

inline LocalSearchResult lsds(const JobSet& jobs, const ConfigSpace& space, const PhyProfile& phy,
                              const LocalSearchParams& params = {}) {
  phy.validate();
  return detail::LocalSearchEngine(jobs, space, phy, params).run();
}

inline LocalSearchResult lsds(const JobSet& jobs, ChannelWidth width, const PhyProfile& phy,
                              const LocalSearchParams& params = {}) {
  return lsds(jobs, ConfigSpace::catalog(width), phy, params);
}

/// The LSDSF default: the legal configuration with the most 26-tone RUs.
inline RuConfiguration default_fixed_configuration(ChannelWidth width) {
  const auto& cat = ConfigSpace::catalog(width).configs();
  return *std::max_element(cat.begin(), cat.end(), [](const RuConfiguration& a, const RuConfiguration& b) {
    return a.count(RuToneClass::Ru26) < b.count(RuToneClass::Ru26);
  });
}

}  // namespace dpmss
