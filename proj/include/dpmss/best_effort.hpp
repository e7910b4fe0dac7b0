// SPDX-License-Identifier: Apache-2.0
//
// Best-effort traffic on top of a committed factory schedule. Best-effort
// packets only take RUs the factory schedule leaves free, either inside a
// factory batch or in batches of their own placed in idle time. A packet that
// waits gains priority every round, approaching the critical threshold.

#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dpmss/local_search.hpp"
#include "dpmss/matching.hpp"
#include "dpmss/ofdma.hpp"
#include "dpmss/schedule.hpp"
#include "dpmss/simulator.hpp"
#include "dpmss/workload.hpp"

namespace dpmss {

/// One escalation step toward `threshold`.
inline double escalate_profit(double p, double threshold) { return (p + threshold) / 2.0; }

/// Profit after `rounds` escalation steps.
inline double profit_after(double p, double threshold, int rounds) {
  for (int k = 0; k < rounds; ++k) p = escalate_profit(p, threshold);
  return p;
}

struct BestEffortConfig {
  int nodes = 3;
  double load_mbps = 20.0;  // mean offered load over all nodes
  std::int64_t packet_bytes = 1500;
  Micros round_us = 4000;
  double initial_profit = 1.0;
  double threshold = 0.0;  // <= 0: the maximum factory profit
  std::uint64_t seed = 1;
  Micros grid = 0;  // <= 0: default_grid_us(phy)
  Micros txop = 4000;

  void validate() const {
    if (nodes < 1) throw std::invalid_argument("best-effort overlay needs at least one node");
    if (!(load_mbps >= 0.0)) throw std::invalid_argument("offered load must be non-negative");
    if (packet_bytes <= 0) throw std::invalid_argument("best-effort packet size must be positive");
    if (round_us <= 0) throw std::invalid_argument("round length must be positive");
    if (!(initial_profit > 0.0)) throw std::invalid_argument("initial best-effort profit must be positive");
  }
};

struct BestEffortPacket {
  int id = 0;
  int station = 0;
  Micros arrival = 0;
  int arrival_round = 0;
  std::int64_t size = 0;
  double profit = 0.0;  // profit when delivered, or after the last round otherwise
  int delivered_round = -1;
  int job = -1;  // id in the combined job set once delivered
};

struct BestEffortResult {
  JobSet jobs;        // factory jobs first (same ids), then delivered best-effort packets
  Schedule schedule;  // factory batches plus best-effort assignments and batches
  std::vector<BestEffortPacket> packets;
  int factory_jobs = 0;
  double threshold = 0.0;
  double offered_bits = 0.0;
  double delivered_bits = 0.0;
  double satisfaction = 1.0;
  double utilization = 0.0;  // best-effort RU-time over channel RU-time
  int delivered = 0;
  std::vector<Violation> violations;
};

/// Poisson best-effort arrivals; the per-node rate splits the mean load evenly.
inline std::vector<BestEffortPacket> best_effort_packets(const BestEffortConfig& c, Micros horizon, int first_station) {
  c.validate();
  std::vector<BestEffortPacket> out;
  if (c.load_mbps <= 0.0) return out;
  ApplicationProfile p;
  p.name = "best effort";
  p.gen_rate = c.load_mbps * 1e6 / (static_cast<double>(c.nodes) * 8.0 * static_cast<double>(c.packet_bytes));
  p.size = SizeSpec::fixed(c.packet_bytes);
  p.deadline_ms = static_cast<double>(horizon) / 1000.0;
  p.node_count = c.nodes;
  p.arrival = ArrivalKind::Poisson;
  for (const auto& j : generate_poisson(p, horizon, c.seed, first_station)) {
    BestEffortPacket b;
    b.id = static_cast<int>(out.size());
    b.station = j.station;
    b.arrival = j.release;
    b.arrival_round = static_cast<int>(j.release / c.round_us);
    b.size = j.size;
    b.profit = c.initial_profit;
    out.push_back(b);
  }
  return out;
}

namespace detail {

class OverlayBuilder {
 public:
  OverlayBuilder(const JobSet& factory, const BestEffortConfig& c, ChannelWidth width, const PhyProfile& phy)
      : c_(c), width_(width), phy_(phy), horizon_(factory.horizon) {
    grid_ = c.grid > 0 ? c.grid : default_grid_us(phy);
    max_cells_ = static_cast<int>(std::max<Micros>(1, c.txop / grid_));
  }

  double priority(const BestEffortPacket& p, Micros at) const {
    const int round = static_cast<int>(at / c_.round_us);
    return profit_after(c_.initial_profit, threshold, std::max(0, round - p.arrival_round - 1));
  }

  // Pending packets released by `at`, best first.
  std::vector<int> pending(Micros at) const {
    std::vector<int> out;
    for (const auto& p : packets)
      if (p.delivered_round < 0 && p.arrival <= at) out.push_back(p.id);
    std::stable_sort(out.begin(), out.end(), [&](int a, int b) {
      const double pa = priority(packets[static_cast<std::size_t>(a)], at);
      const double pb = priority(packets[static_cast<std::size_t>(b)], at);
      return pa > pb;
    });
    return out;
  }

  void deliver(int id, Micros at, Batch& batch, int machine, RuToneClass cls) {
    auto& p = packets[static_cast<std::size_t>(id)];
    p.profit = priority(p, at);
    p.delivered_round = static_cast<int>(at / c_.round_us);
    Job j;
    j.id = static_cast<int>(jobs.jobs.size());
    j.station = p.station;
    j.app = be_app;
    j.release = p.arrival;
    j.deadline = horizon_;
    j.profit = p.profit;
    j.size = p.size;
    jobs.jobs.push_back(j);
    p.job = j.id;
    batch.assignments.push_back({j.id, machine});
    ru_time += static_cast<double>(tones(cls)) * static_cast<double>(tx_duration(p.size, cls, phy_));
  }

  // Free RUs of a factory batch, largest first, each to the best pending packet that fits.
  void fill_batch(Batch& b) {
    const int total = b.config.total_rus();
    std::vector<char> used(static_cast<std::size_t>(total), 0);
    for (const auto& a : b.assignments)
      if (a.machine >= 0 && a.machine < total) used[static_cast<std::size_t>(a.machine)] = 1;
    auto queue = pending(b.interval.start);
    if (queue.empty()) return;
    std::vector<char> taken(queue.size(), 0);
    for (int m = total - 1; m >= 0; --m) {
      if (used[static_cast<std::size_t>(m)]) continue;
      const RuToneClass cls = b.config.machine_class(m);
      for (std::size_t q = 0; q < queue.size(); ++q) {
        if (taken[q]) continue;
        const auto& p = packets[static_cast<std::size_t>(queue[q])];
        if (b.interval.start + tx_duration(p.size, cls, phy_) > b.interval.end) continue;
        taken[q] = 1;
        deliver(p.id, b.interval.start, b, m, cls);
        break;
      }
    }
  }

  // Best-effort batches in the idle span [from, to], packed left to right.
  void fill_gap(Micros from, Micros to, std::vector<Batch>& out) {
    Micros s = from;
    while (s + grid_ - 1 <= to) {
      auto queue = pending(s);
      if (queue.empty()) {
        // jump to the next arrival
        Micros next = horizon_;
        for (const auto& p : packets)
          if (p.delivered_round < 0 && p.arrival > s) next = std::min(next, p.arrival);
        if (next >= horizon_) return;
        s = std::max(s + 1, next);
        continue;
      }
      std::vector<Job> cands;
      for (int id : queue) {
        const auto& p = packets[static_cast<std::size_t>(id)];
        Job j;
        j.id = id;
        j.release = p.arrival;
        j.deadline = horizon_;
        j.profit = priority(p, s);
        j.size = p.size;
        cands.push_back(j);
      }
      const int cells = static_cast<int>(std::min<Micros>(max_cells_, (to - s + 1) / grid_));
      ConfigSearchResult best;
      int best_len = 0;
      double best_rate = 0.0;
      for (int len = 1; len <= cells; ++len) {
        const Interval iv{s, s + len * grid_ - 1};
        auto r = lsds_config_search(cands, iv, width_, phy_);
        const double rate = r.matching.total_weight / len;
        const bool all_fit = r.jobs.size() == cands.size();
        if (weight_less(best_rate, rate)) {
          best_rate = rate;
          best_len = len;
          best = std::move(r);
        }
        if (all_fit && best_len > 0) break;
      }
      if (best_len == 0) {
        s += grid_;
        continue;
      }
      Batch b;
      b.interval = {s, s + best_len * grid_ - 1};
      b.config = best.config;
      b.config_id = best.config_id;
      for (const auto& [id, m] : best.matching.pairs) deliver(id, s, b, m, b.config.machine_class(m));
      s = b.interval.end + 1;
      out.push_back(std::move(b));
    }
  }

  const BestEffortConfig& c_;
  ChannelWidth width_;
  PhyProfile phy_;
  Micros horizon_;
  Micros grid_ = 0;
  int max_cells_ = 1;
  double threshold = 0.0;
  int be_app = 0;
  JobSet jobs;
  std::vector<BestEffortPacket> packets;
  double ru_time = 0.0;
};

}  // namespace detail

/// Overlays best-effort traffic on a feasible factory schedule. Factory
/// assignments are never moved; the combined schedule is validated.
inline BestEffortResult best_effort_overlay(const JobSet& factory, const Schedule& base, ChannelWidth width,
                                            const PhyProfile& phy, const BestEffortConfig& config = {}) {
  config.validate();
  if (factory.horizon <= 0) throw std::invalid_argument("best-effort overlay needs a positive horizon");
  detail::OverlayBuilder ob(factory, config, width, phy);
  double max_profit = 0.0;
  for (const auto& j : factory.jobs) max_profit = std::max(max_profit, j.profit);
  for (const auto& a : factory.apps) max_profit = std::max(max_profit, a.profit);
  ob.threshold = config.threshold > 0.0 ? config.threshold : max_profit;
  if (ob.threshold < config.initial_profit) ob.threshold = config.initial_profit;

  int first_station = 0;
  for (const auto& j : factory.jobs) first_station = std::max(first_station, j.station + 1);
  first_station = std::max(first_station, static_cast<int>(factory.station_app.size()));

  ob.jobs = factory;
  ob.be_app = static_cast<int>(ob.jobs.apps.size());
  ApplicationProfile be;
  be.name = "best effort";
  be.size = SizeSpec::fixed(config.packet_bytes);
  be.deadline_ms = static_cast<double>(factory.horizon) / 1000.0;
  be.profit = config.initial_profit;
  be.node_count = config.nodes;
  be.arrival = ArrivalKind::Poisson;
  ob.jobs.apps.push_back(be);
  for (int k = 0; k < config.nodes; ++k) ob.jobs.station_app.push_back(ob.be_app);
  ob.packets = best_effort_packets(config, factory.horizon, first_station);

  std::vector<Batch> batches = base.batches;
  std::sort(batches.begin(), batches.end(),
            [](const Batch& a, const Batch& b) { return a.interval.start < b.interval.start; });
  std::vector<Batch> extra;
  Micros cursor = 0;
  for (auto& b : batches) {
    if (b.interval.start - 1 >= cursor) ob.fill_gap(cursor, b.interval.start - 1, extra);
    ob.fill_batch(b);
    cursor = std::max(cursor, b.interval.end + 1);
  }
  if (cursor <= factory.horizon - 1) ob.fill_gap(cursor, factory.horizon - 1, extra);

  BestEffortResult out;
  out.factory_jobs = static_cast<int>(factory.jobs.size());
  out.threshold = ob.threshold;
  out.schedule.batches = std::move(batches);
  for (auto& b : extra) out.schedule.batches.push_back(std::move(b));
  out.jobs = std::move(ob.jobs);
  finalize(out.schedule, out.jobs);
  out.packets = std::move(ob.packets);
  for (const auto& p : out.packets) {
    out.offered_bits += 8.0 * static_cast<double>(p.size);
    if (p.delivered_round >= 0) {
      ++out.delivered;
      out.delivered_bits += 8.0 * static_cast<double>(p.size);
    }
  }
  out.satisfaction = out.offered_bits > 0.0 ? out.delivered_bits / out.offered_bits : 1.0;
  out.utilization = ob.ru_time / (static_cast<double>(budget_tones(width)) * static_cast<double>(factory.horizon));
  out.violations = validate_schedule(out.schedule, out.jobs, width, phy, config.txop);
  return out;
}

}  // namespace dpmss
