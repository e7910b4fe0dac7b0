// SPDX-License-Identifier: Apache-2.0
//
// Schedules the UC-4 factory workload on a 40 MHz channel with LSDS and the
// three greedy benchmarks, then overlays 20 Mbps of best-effort traffic on the
// LSDS schedule.

#include <cstdio>

#include "dpmss/best_effort.hpp"
#include "dpmss/simulator.hpp"

int main() {
  using namespace dpmss;
  const JobSet jobs = load_use_case(UseCase::UC4, 200000, 1);
  SchedulerOptions opts;
  opts.width = ChannelWidth::MHz40;

  std::printf("%zu jobs over %lld us\n", jobs.jobs.size(), static_cast<long long>(jobs.horizon));
  for (auto kind : {SchedulerKind::Lsds, SchedulerKind::Edf, SchedulerKind::Lrf, SchedulerKind::Nlrf}) {
    const auto r = run_scenario(jobs, kind, ChannelScenario{}, opts);
    const auto crit = r.critical_drop_pct();
    std::printf("%-5s profit ratio %.4f  drops %.2f%%  critical drops %.2f%%  violations %zu\n", r.scheduler.c_str(),
                r.profit_ratio(), r.drop_pct(), crit ? *crit : 0.0, r.violations.size());
  }

  const auto base = lsds(jobs, opts.width, PhyProfile{}).schedule;
  const auto be = best_effort_overlay(jobs, base, opts.width, PhyProfile{}, BestEffortConfig{});
  std::printf("best effort: %d of %zu packets, satisfaction %.3f, utilization %.3f, violations %zu\n", be.delivered,
              be.packets.size(), be.satisfaction, be.utilization, be.violations.size());
  return 0;
}
