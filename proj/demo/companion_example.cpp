// SPDX-License-Identifier: Apache-2.0
//
// Three periodic applications on two equal RUs: the windowed heuristic with a
// one-slot window sacrifices the cheapest packet, a two-slot window and the
// full-period matcher deliver everything.

#include <cstdio>
#include <vector>

#include "dpmss/slotted.hpp"

int main() {
  using namespace dpmss;
  // <period, size, deadline, profit> in slots and bytes
  const std::vector<SlottedApp> apps = {
      {2, 10, 0, 1.0, 1, 0, "A0"},
      {2, 30, 1, 2.0, 1, 0, "A1"},
      {2, 100, 1, 3.0, 1, 0, "A2"},
  };
  const EqualRuSet ru{RuToneClass::Ru242, 2};

  const auto opt = slotted_optimal(apps, ru);
  std::printf("optimal over %d slots: dropped profit %.0f\n", opt.slots, opt.dropped_profit);
  for (int window : {1, 2}) {
    const auto h = run_slotted_heuristic(apps, ru, window);
    std::printf("heuristic, window %d: dropped profit %.0f\n", window, h.dropped_profit);
  }

  std::printf("\noptimal assignment:\n");
  for (const auto& b : opt.schedule.batches)
    for (const auto& a : b.assignments) {
      const auto& j = opt.jobs.jobs[static_cast<std::size_t>(a.job)];
      std::printf("  slot %lld  RU %d  %s (profit %.0f)\n", static_cast<long long>(b.interval.start / 1000), a.machine,
                  opt.jobs.apps[static_cast<std::size_t>(j.app)].name.c_str(), j.profit);
    }
  return 0;
}
