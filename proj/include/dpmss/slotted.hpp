// SPDX-License-Identifier: Apache-2.0
//
// Slotted schedulers over equal-size RUs: the full-window optimal matcher and
// its fixed-window heuristic. Time is divided into slots of `slot_us`; every
// RU carries at most one packet per slot.

#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "dpmss/matching.hpp"
#include "dpmss/ofdma.hpp"
#include "dpmss/schedule.hpp"
#include "dpmss/workload.hpp"

namespace dpmss {

/// Periodic application on the slot grid: one packet per node every
/// `period_slots`, usable from its arrival slot a through slot a + deadline_slots.
struct SlottedApp {
  int period_slots = 1;
  std::int64_t size = 1;
  int deadline_slots = 0;
  double profit = 1.0;
  int node_count = 1;
  int offset_slots = 0;
  std::string name;
};

struct EqualRuSet {
  RuToneClass tone = RuToneClass::Ru26;
  int count = 1;
};

struct SlottedOptions {
  Micros slot_us = 1000;
  ChannelWidth width = ChannelWidth::MHz40;
  PhyProfile phy{};
  Micros txop = 4000;
  int max_lcm_slots = 10000;
};

/// The equal-RU set of a configuration that splits the channel into RUs of a
/// single class; rejects mixed configurations.
inline EqualRuSet equal_ru_set(const RuConfiguration& cfg) {
  EqualRuSet out;
  int kinds = 0;
  for (auto c : kAllToneClasses) {
    if (cfg.count(c) > 0) {
      ++kinds;
      out = {c, cfg.count(c)};
    }
  }
  if (kinds != 1) throw std::invalid_argument("slotted schedulers need equal-size RUs, got " + cfg.to_string());
  return out;
}

/// Every slot-arrival of `apps` in [start_slot, start_slot + n_slots) as a job
/// set. A packet arriving in slot a has release a*slot and deadline
/// (a + deadline_slots + 1)*slot.
inline JobSet slotted_job_set(const std::vector<SlottedApp>& apps, int start_slot, int n_slots, Micros slot_us) {
  JobSet set;
  set.horizon = static_cast<Micros>(start_slot + n_slots) * slot_us;
  int station = 0;
  std::vector<Job> all;
  for (std::size_t a = 0; a < apps.size(); ++a) {
    const auto& app = apps[a];
    if (app.period_slots < 1 || app.deadline_slots < 0 || app.node_count < 1 || app.size <= 0)
      throw std::invalid_argument("bad slotted application " + app.name);
    ApplicationProfile p;
    p.name = app.name.empty() ? "A" + std::to_string(a) : app.name;
    p.gen_rate = 1e6 / static_cast<double>(app.period_slots * slot_us);
    p.size = SizeSpec::fixed(app.size);
    p.deadline_ms = static_cast<double>((app.deadline_slots + 1) * slot_us) / 1000.0;
    p.profit = app.profit;
    p.node_count = app.node_count;
    set.apps.push_back(p);
    for (int s = 0; s < app.node_count; ++s) {
      for (int slot = start_slot + app.offset_slots; slot < start_slot + n_slots; slot += app.period_slots) {
        Job j;
        j.station = station + s;
        j.app = static_cast<int>(a);
        j.release = static_cast<Micros>(slot) * slot_us;
        j.deadline = static_cast<Micros>(slot + app.deadline_slots + 1) * slot_us;
        j.profit = app.profit;
        j.size = app.size;
        all.push_back(j);
      }
      set.station_app.push_back(static_cast<int>(a));
    }
    station += app.node_count;
  }
  std::stable_sort(all.begin(), all.end(), [](const Job& x, const Job& y) {
    if (x.release != y.release) return x.release < y.release;
    if (x.station != y.station) return x.station < y.station;
    return x.app < y.app;
  });
  for (std::size_t k = 0; k < all.size(); ++k) all[k].id = static_cast<int>(k);
  set.jobs = std::move(all);
  mark_critical(set);
  return set;
}

inline int slotted_lcm(const std::vector<SlottedApp>& apps, int limit) {
  long long l = 1;
  for (const auto& a : apps) {
    l = std::lcm(l, static_cast<long long>(a.period_slots));
    if (l > limit)
      throw std::invalid_argument("period LCM exceeds " + std::to_string(limit) +
                                  " slots; use the windowed heuristic instead");
  }
  return static_cast<int>(l);
}

namespace detail {

/// Slots [lo, hi] in which the job fits on one RU of `tone`, clipped to [begin, end).
inline std::pair<int, int> slot_range(const Job& j, RuToneClass tone, const SlottedOptions& o, int begin, int end) {
  const Micros p = tx_duration(j.size, tone, o.phy);
  const Micros d = o.slot_us;
  if (p > d - 1) return {1, 0};
  const int lo = std::max(begin, static_cast<int>((j.release + d - 1) / d));
  // s*d + p <= min(s*d + d - 1, deadline)
  const Micros last = j.deadline - p;
  if (last < 0) return {1, 0};
  const int hi = std::min(end - 1, static_cast<int>(last / d));
  return {lo, hi};
}

/// Max-weight assignment of jobs to (slot, RU) pairs where each job may use
/// any slot in a contiguous range. Exact: greedy by profit over a transversal
/// matroid, with augmenting paths across slots for the independence test.
class SlotPacker {
 public:
  SlotPacker(int begin, int end, int capacity)
      : begin_(begin), end_(end), cap_(capacity), slot_jobs_(static_cast<std::size_t>(std::max(0, end - begin))) {}

  bool insert(int job, int lo, int hi) {
    if (lo > hi) return false;
    range_[job] = {lo, hi};
    const int n = end_ - begin_;
    std::vector<int> parent_slot(static_cast<std::size_t>(n), -2), mover(static_cast<std::size_t>(n), -1);
    std::vector<int> next(static_cast<std::size_t>(n) + 1);
    std::iota(next.begin(), next.end(), 0);
    auto find = [&](int s) {
      while (next[static_cast<std::size_t>(s)] != s) {
        next[static_cast<std::size_t>(s)] = next[static_cast<std::size_t>(next[static_cast<std::size_t>(s)])];
        s = next[static_cast<std::size_t>(s)];
      }
      return s;
    };
    std::vector<int> queue;
    auto visit_range = [&](int who, int a, int b, int from) {
      for (int s = find(a - begin_); s <= b - begin_; s = find(s)) {
        parent_slot[static_cast<std::size_t>(s)] = from;
        mover[static_cast<std::size_t>(s)] = who;
        next[static_cast<std::size_t>(s)] = s + 1;
        queue.push_back(s);
      }
    };
    visit_range(job, lo, hi, -1);
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      const int s = queue[qi];
      auto& here = slot_jobs_[static_cast<std::size_t>(s)];
      if (static_cast<int>(here.size()) < cap_) {
        // Shift movers along the path back to the new job.
        int cur = s;
        while (cur >= 0) {
          const int who = mover[static_cast<std::size_t>(cur)];
          const int from = parent_slot[static_cast<std::size_t>(cur)];
          slot_jobs_[static_cast<std::size_t>(cur)].push_back(who);
          if (from >= 0) {
            auto& src = slot_jobs_[static_cast<std::size_t>(from)];
            src.erase(std::find(src.begin(), src.end(), who));
          }
          cur = from;
        }
        return true;
      }
      for (int other : here) {
        const auto [a, b] = range_.at(other);
        visit_range(other, a, b, s);
      }
    }
    range_.erase(job);
    return false;
  }

  const std::vector<int>& jobs_at(int slot) const { return slot_jobs_[static_cast<std::size_t>(slot - begin_)]; }

 private:
  int begin_, end_, cap_;
  std::vector<std::vector<int>> slot_jobs_;
  std::map<int, std::pair<int, int>> range_;
};

}  // namespace detail

/// Assigns jobs of `jobs` (skipping `excluded`) to slots [begin, end) on the
/// equal RUs, maximizing total profit. One batch per used slot, spanning
/// [s*slot, s*slot + slot - 1].
inline Schedule solve_slotted(const JobSet& jobs, EqualRuSet ru, const SlottedOptions& o, int begin, int end,
                              const std::vector<char>& excluded = {}) {
  if (o.slot_us - 1 > o.txop) throw std::invalid_argument("slot longer than TXOP");
  const RuConfiguration cfg = smallest_covering_configuration(o.width, ru.tone, ru.count);
  const int cfg_id = find_configuration_id(ConfigSpace::catalog(o.width).configs(), cfg);
  int base = 0;
  for (std::size_t k = 0; k < class_index(ru.tone); ++k) base += cfg.counts[k];

  std::vector<int> order;
  for (const auto& j : jobs.jobs) {
    if (!excluded.empty() && excluded[static_cast<std::size_t>(j.id)]) continue;
    if (j.profit > 0.0) order.push_back(j.id);
  }
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return detail::priority_before(jobs.jobs[static_cast<std::size_t>(a)], jobs.jobs[static_cast<std::size_t>(b)]);
  });
  detail::SlotPacker packer(begin, end, ru.count);
  for (int id : order) {
    const auto [lo, hi] = detail::slot_range(jobs.jobs[static_cast<std::size_t>(id)], ru.tone, o, begin, end);
    packer.insert(id, lo, hi);
  }
  Schedule s;
  for (int slot = begin; slot < end; ++slot) {
    auto here = packer.jobs_at(slot);
    if (here.empty()) continue;
    std::sort(here.begin(), here.end());
    Batch b;
    b.interval = {static_cast<Micros>(slot) * o.slot_us, static_cast<Micros>(slot) * o.slot_us + o.slot_us - 1};
    b.config = cfg;
    b.config_id = cfg_id;
    for (std::size_t q = 0; q < here.size(); ++q) b.assignments.push_back({here[q], base + static_cast<int>(q)});
    s.batches.push_back(std::move(b));
  }
  finalize(s, jobs);
  return s;
}

/// The packet / (slot, RU) bipartite graph over slots [begin, end): an edge
/// joins a packet to every RU of every slot in its window, weighted by profit.
inline BipartiteInstance slotted_bipartite_graph(const JobSet& jobs, EqualRuSet ru, const SlottedOptions& o, int begin,
                                                 int end, const std::vector<char>& excluded = {}) {
  BipartiteInstance g;
  for (int s = begin; s < end; ++s)
    for (int r = 0; r < ru.count; ++r) g.right.push_back(s * ru.count + r);
  for (const auto& j : jobs.jobs) {
    if (!excluded.empty() && excluded[static_cast<std::size_t>(j.id)]) continue;
    g.left.push_back(j.id);
    const auto [lo, hi] = detail::slot_range(j, ru.tone, o, begin, end);
    for (int s = lo; s <= hi; ++s)
      for (int r = 0; r < ru.count; ++r) g.edges.push_back({j.id, s * ru.count + r, j.profit});
  }
  return g;
}

struct SlottedResult {
  JobSet jobs;
  Schedule schedule;
  int slots = 0;
  double dropped_profit = 0.0;
};

/// Optimal schedule over one period-LCM window starting at `start_slot`.
inline SlottedResult slotted_optimal(const std::vector<SlottedApp>& apps, EqualRuSet ru, int start_slot = 0,
                                     const SlottedOptions& o = {}) {
  SlottedResult r;
  r.slots = slotted_lcm(apps, o.max_lcm_slots);
  r.jobs = slotted_job_set(apps, start_slot, r.slots, o.slot_us);
  r.schedule = solve_slotted(r.jobs, ru, o, start_slot, start_slot + r.slots);
  r.dropped_profit = r.jobs.total_profit() - r.schedule.total_profit;
  return r;
}

/// One heuristic invocation: schedules slots [start, start + window_n) for the
/// jobs not yet in `record`, then adds the scheduled ones to `record`.
inline Schedule slotted_heuristic(const JobSet& jobs, EqualRuSet ru, int start_slot, int window_n,
                                  std::set<int>& record, const SlottedOptions& o = {}) {
  if (window_n < 1) throw std::invalid_argument("window must cover at least one slot");
  std::vector<char> excluded(jobs.jobs.size(), 0);
  for (int id : record)
    if (id >= 0 && static_cast<std::size_t>(id) < excluded.size()) excluded[static_cast<std::size_t>(id)] = 1;
  auto s = solve_slotted(jobs, ru, o, start_slot, start_slot + window_n, excluded);
  record.insert(s.scheduled_jobs.begin(), s.scheduled_jobs.end());
  return s;
}

/// Repeated heuristic invocations covering `n_slots` (default: one LCM window).
inline SlottedResult run_slotted_heuristic(const std::vector<SlottedApp>& apps, EqualRuSet ru, int window_n,
                                           int start_slot = 0, int n_slots = 0, const SlottedOptions& o = {}) {
  SlottedResult r;
  r.slots = n_slots > 0 ? n_slots : slotted_lcm(apps, o.max_lcm_slots);
  r.jobs = slotted_job_set(apps, start_slot, r.slots, o.slot_us);
  std::set<int> record;
  for (int s = start_slot; s < start_slot + r.slots; s += window_n) {
    auto part = slotted_heuristic(r.jobs, ru, s, std::min(window_n, start_slot + r.slots - s), record, o);
    for (auto& b : part.batches) r.schedule.batches.push_back(std::move(b));
  }
  finalize(r.schedule, r.jobs);
  r.dropped_profit = r.jobs.total_profit() - r.schedule.total_profit;
  return r;
}

/// Slotted scheduling of an arbitrary job set over its horizon. `window_n` <= 0
/// solves the whole horizon at once.
inline Schedule slotted_schedule(const JobSet& jobs, EqualRuSet ru, const SlottedOptions& o, int window_n = 0) {
  const int n_slots = static_cast<int>(jobs.horizon / o.slot_us);
  if (window_n <= 0) return solve_slotted(jobs, ru, o, 0, n_slots);
  Schedule all;
  std::set<int> record;
  for (int s = 0; s < n_slots; s += window_n) {
    auto part = slotted_heuristic(jobs, ru, s, std::min(window_n, n_slots - s), record, o);
    for (auto& b : part.batches) all.batches.push_back(std::move(b));
  }
  finalize(all, jobs);
  return all;
}

}  // namespace dpmss
