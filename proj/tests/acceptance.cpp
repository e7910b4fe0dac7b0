// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <mutex>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "dpmss/best_effort.hpp"
#include "dpmss/brute_force.hpp"
#include "dpmss/experiment.hpp"
#include "dpmss/matching.hpp"
#include "dpmss/simulator.hpp"
#include "dpmss/slotted.hpp"

using namespace dpmss;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

ChannelWidth width_for(UseCase uc) { return uc == UseCase::UC3 ? ChannelWidth::MHz160 : ChannelWidth::MHz40; }

// ---- 1: feasibility ---------------------------------------------------------

Outcome feasibility() {
  // 4 use cases x 50 seeds, every scheduler on each instance, 20 ms horizons.
  const auto t0 = Clock::now();
  const std::vector<UseCase> ucs = {UseCase::UC1, UseCase::UC2, UseCase::UC3, UseCase::UC4};
  const int seeds = 50;
  std::atomic<int> bad{0}, runs{0};
  std::mutex mu;
  std::string first;
  parallel_for(ucs.size() * seeds, [&](std::size_t i) {
    const UseCase uc = ucs[i / seeds];
    const auto seed = static_cast<std::uint64_t>(i % seeds) + 1;
    const auto jobs = load_use_case(uc, 20000, seed);
    SchedulerOptions o;
    o.width = width_for(uc);
    for (auto k : kAllSchedulers) {
      const auto s = run_scheduler(k, jobs, PhyProfile{}, o);
      const auto v = validate_schedule(s, jobs, o.width, PhyProfile{}, o.txop);
      ++runs;
      if (!v.empty()) {
        ++bad;
        std::lock_guard<std::mutex> lock(mu);
        if (first.empty()) first = to_string(uc) + "/" + to_string(k) + "/seed " + std::to_string(seed) + ": " + v[0].kind;
      }
    }
  });
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = bad == 0 && secs < 300.0;
  o.detail = std::to_string(ucs.size() * seeds) + " instances, " + std::to_string(runs.load()) + " schedules, " +
             std::to_string(bad.load()) + " with violations, " + fmt("%.1f s", secs) + (first.empty() ? "" : "; " + first);
  return o;
}

// ---- 2: matching oracle -----------------------------------------------------

double exhaustive_matching(const std::vector<std::vector<double>>& w, const std::vector<int>& bw, int budget) {
  const std::size_t L = w.size(), R = bw.size();
  const double none = -1e300;
  std::vector<double> cur(std::size_t{1} << R, none);
  cur[0] = 0.0;
  for (std::size_t l = 0; l < L; ++l) {
    auto next = cur;
    for (std::size_t m = 0; m < cur.size(); ++m) {
      if (cur[m] == none) continue;
      for (std::size_t r = 0; r < R; ++r)
        if (!((m >> r) & 1u) && w[l][r] >= 0.0)
          next[m | (std::size_t{1} << r)] = std::max(next[m | (std::size_t{1} << r)], cur[m] + w[l][r]);
    }
    cur.swap(next);
  }
  double best = 0.0;
  for (std::size_t m = 0; m < cur.size(); ++m) {
    if (cur[m] == none) continue;
    int used = 0;
    for (std::size_t r = 0; r < R; ++r)
      if ((m >> r) & 1u) used += bw[r];
    if (budget < 0 || used <= budget) best = std::max(best, cur[m]);
  }
  return best;
}

Outcome matching_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<int> n(1, 8), pct(0, 99), wi(1, 20), bwi(0, 3), budget(26, 900);
  const int widths[] = {26, 52, 106, 242};
  int mismatches = 0, budgeted = 0;
  for (int it = 0; it < 1000; ++it) {
    BipartiteInstance g;
    const int L = n(rng), R = n(rng), density = pct(rng);
    for (int i = 0; i < L; ++i) g.left.push_back(i);
    for (int i = 0; i < R; ++i) g.right.push_back(i);
    std::vector<std::vector<double>> w(static_cast<std::size_t>(L), std::vector<double>(static_cast<std::size_t>(R), -1.0));
    for (int l = 0; l < L; ++l)
      for (int r = 0; r < R; ++r)
        if (pct(rng) < density) {
          const double x = it % 2 ? wi(rng) : wi(rng) / 7.0;
          g.edges.push_back({l, r, x});
          w[static_cast<std::size_t>(l)][static_cast<std::size_t>(r)] = x;
        }
    std::vector<int> bw;
    for (int r = 0; r < R; ++r) bw.push_back(widths[bwi(rng)]);
    if (std::fabs(max_weight_matching(g).total_weight - exhaustive_matching(w, bw, -1)) > 1e-9) ++mismatches;
    if (R <= 6) {
      const int B = budget(rng);
      g.budget = BipartiteBudget{bw, B};
      ++budgeted;
      if (std::fabs(budgeted_max_weight_matching(g, B).total_weight - exhaustive_matching(w, bw, B)) > 1e-9) ++mismatches;
    }
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && secs < 60.0, "1000 instances (" + std::to_string(budgeted) + " budgeted), " +
                                               std::to_string(mismatches) + " mismatches, " + fmt("%.1f s", secs)};
}

// ---- 3: approximation bound -------------------------------------------------

Outcome approximation_bound() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> nj(1, 6), nm(1, 3), cls(0, 3), prof(1, 9);
  std::uniform_int_distribution<Micros> rel(0, 200), win(20, 240);
  std::uniform_int_distribution<std::int64_t> size(5, 400);
  const LocalSearchParams lp{240, 80, 20};
  const BruteForceParams bp{20, 12, 4};
  int instances = 0, violations = 0, errors = 0;
  double worst = 0.0;
  for (int it = 0; it < 600; ++it) {
    JobSet s;
    s.horizon = 240;
    const int n = nj(rng);
    for (int i = 0; i < n; ++i) {
      Job j;
      j.id = i;
      j.release = rel(rng);
      j.deadline = std::min<Micros>(240, j.release + win(rng));
      j.size = size(rng);
      j.profit = prof(rng);
      s.jobs.push_back(j);
    }
    RuCounts counts{};
    const int m = nm(rng);
    for (int i = 0; i < m; ++i) ++counts[static_cast<std::size_t>(cls(rng))];
    try {
      const auto r = lsdsf(s, RuConfiguration{counts, ChannelWidth::MHz80}, PhyProfile{}, lp);
      const double opt = brute_force_optimal(s, std::vector<RuCounts>{counts}, PhyProfile{}, bp);
      ++instances;
      if (12.0 * r.schedule.total_profit < opt - 1e-9) ++violations;
      if (opt > 0.0) worst = std::max(worst, opt / std::max(r.schedule.total_profit, 1e-12));
    } catch (const std::exception&) {
      ++errors;
    }
  }
  const double secs = seconds_since(t0);
  return {instances >= 500 && violations == 0 && errors == 0 && secs < 300.0,
          std::to_string(instances) + " micro-instances, " + std::to_string(violations) + " bound violations, " +
              std::to_string(errors) + " exceptions, worst opt/lsdsf " + fmt("%.3f", worst) + ", " + fmt("%.1f s", secs)};
}

// ---- 4: companion example ---------------------------------------------------

Outcome companion() {
  const std::vector<SlottedApp> apps = {{2, 10, 0, 1.0, 1, 0, "A0"}, {2, 30, 1, 2.0, 1, 0, "A1"}, {2, 100, 1, 3.0, 1, 0, "A2"}};
  const EqualRuSet ru{RuToneClass::Ru242, 2};
  const double w1 = run_slotted_heuristic(apps, ru, 1).dropped_profit;
  const double w2 = run_slotted_heuristic(apps, ru, 2).dropped_profit;
  const double opt = slotted_optimal(apps, ru).dropped_profit;
  return {w1 == 1.0 && w2 == 0.0 && opt == 0.0,
          "window 1 loses " + fmt("%g", w1) + ", window 2 loses " + fmt("%g", w2) + ", optimal loses " + fmt("%g", opt)};
}

// ---- 5: UC-4 headline -------------------------------------------------------

Outcome uc4_headline() {
  const auto jobs = load_use_case(UseCase::UC4, 200000, 1);
  SchedulerOptions o;
  o.width = ChannelWidth::MHz40;
  const auto l = run_scenario(jobs, SchedulerKind::Lsds, ChannelScenario{}, o);
  const double lcrit = l.critical_drop_pct().value_or(0.0);
  bool pass = l.violations.empty() && l.profit_ratio() >= 0.99 && lcrit == 0.0;
  std::string d = "lsds ratio " + fmt("%.4f", l.profit_ratio()) + ", critical drop " + fmt("%.2f%%", lcrit) + "; benchmark critical drop";
  for (auto k : {SchedulerKind::Edf, SchedulerKind::Lrf, SchedulerKind::Nlrf}) {
    const auto r = run_scenario(jobs, k, ChannelScenario{}, o);
    const double c = r.critical_drop_pct().value_or(0.0);
    pass = pass && r.violations.empty() && std::fabs(c - 18.0) <= 8.0;
    d += " " + to_string(k) + " " + fmt("%.2f%%", c);
  }
  d += " (expected 18 +- 8)";
  return {pass, d};
}

// ---- 6: dominance -----------------------------------------------------------

Outcome dominance() {
  const auto t0 = Clock::now();
  const std::vector<UseCase> ucs = {UseCase::UC1, UseCase::UC2, UseCase::UC3, UseCase::UC4};
  std::vector<std::tuple<UseCase, std::uint64_t>> matrix;
  for (auto uc : ucs)
    for (std::uint64_t seed = 1; seed <= 3; ++seed) matrix.emplace_back(uc, seed);
  std::mutex mu;
  std::string first;
  std::atomic<int> fixed_runs{0}, failures{0};
  for (const auto& [uc, seed] : matrix) {
    const auto jobs = load_use_case(uc, 200000, seed);
    SchedulerOptions o;
    o.width = width_for(uc);
    const double l = run_scheduler(SchedulerKind::Lsds, jobs, PhyProfile{}, o).total_profit;
    auto note = [&](const std::string& who, double v) {
      ++failures;
      std::lock_guard<std::mutex> lock(mu);
      if (first.empty())
        first = to_string(uc) + "/seed " + std::to_string(seed) + ": " + who + " " + fmt("%.1f", v) + " > lsds " + fmt("%.1f", l);
    };
    for (auto k : {SchedulerKind::Edf, SchedulerKind::Lrf, SchedulerKind::Nlrf}) {
      const double v = run_scheduler(k, jobs, PhyProfile{}, o).total_profit;
      if (v > l + 1e-9) note(to_string(k), v);
    }
    const auto& cat = ConfigSpace::catalog(o.width).configs();
    parallel_for(cat.size(), [&](std::size_t c) {
      SchedulerOptions f = o;
      f.fixed_config = cat[c];
      const double v = run_scheduler(SchedulerKind::Lsdsf, jobs, PhyProfile{}, f).total_profit;
      ++fixed_runs;
      if (v > l + 1e-9) note("lsdsf " + cat[c].to_string(), v);
    });
  }
  return {failures == 0, std::to_string(matrix.size()) + " (use case, seed) pairs, " + std::to_string(fixed_runs.load()) +
                             " fixed-configuration runs, " + std::to_string(failures.load()) + " losses, " +
                             fmt("%.1f s", seconds_since(t0)) + (first.empty() ? "" : "; " + first)};
}

// ---- 7: poor-channel monotonicity ----------------------------------------------

Outcome poor_channel() {
  const auto jobs = load_use_case(UseCase::UC3, 200000, 1);
  SchedulerOptions o;
  o.width = ChannelWidth::MHz160;
  std::vector<SimulationReport> rs;
  for (auto q : kAllQualities) {
    ChannelScenario ch;
    ch.quality = q;
    rs.push_back(run_scenario(jobs, SchedulerKind::Lsds, ch, o));
  }
  auto crit = [&](std::size_t i) { return rs[i].critical_drop_pct().value_or(0.0); };
  bool pass = crit(1) == 0.0 && crit(2) == 0.0 && crit(3) > 0.0;
  bool monotone = true;
  for (std::size_t i = 1; i < rs.size(); ++i) {
    pass = pass && rs[i].violations.empty();
    const std::set<int> better(rs[i - 1].delivered.begin(), rs[i - 1].delivered.end());
    for (int j : rs[i].delivered) monotone = monotone && better.count(j);
  }
  pass = pass && monotone;
  std::string d = "critical drop";
  for (std::size_t i = 0; i < rs.size(); ++i) d += " " + to_string(kAllQualities[i]) + " " + fmt("%.2f%%", crit(i));
  d += "; delivered";
  for (const auto& r : rs) d += " " + std::to_string(r.delivered.size());
  d += monotone ? ", nested" : ", not nested";
  return {pass, d};
}

// ---- 8: best-effort overlay ------------------------------------------------------

Outcome best_effort() {
  const auto jobs = load_use_case(UseCase::UC4, 200000, 1);
  const auto base = lsds(jobs, ChannelWidth::MHz40, PhyProfile{}).schedule;
  BestEffortConfig c;
  c.load_mbps = 20;
  const auto be = best_effort_overlay(jobs, base, ChannelWidth::MHz40, PhyProfile{}, c);
  using Key = std::tuple<Micros, Micros, int, int>;
  std::set<Key> before, after;
  for (const auto& b : base.batches)
    for (const auto& a : b.assignments) before.insert({b.interval.start, b.interval.end, a.job, a.machine});
  for (const auto& b : be.schedule.batches)
    for (const auto& a : b.assignments)
      if (a.job < be.factory_jobs) after.insert({b.interval.start, b.interval.end, a.job, a.machine});
  double top = 0.0;
  for (const auto& p : be.packets) top = std::max(top, p.profit);
  const bool same = before == after;
  const bool bounded = top <= be.threshold + 1e-12;
  return {same && bounded && be.violations.empty() && be.satisfaction >= 0.9,
          std::string("factory assignments ") + (same ? "unchanged" : "CHANGED") + ", max escalated profit " +
              fmt("%.3f", top) + " <= threshold " + fmt("%.0f", be.threshold) + ", satisfaction " +
              fmt("%.4f", be.satisfaction) + " (" + std::to_string(be.delivered) + "/" + std::to_string(be.packets.size()) +
              " packets), " + std::to_string(be.violations.size()) + " violations"};
}

// ---- 9: runtime -------------------------------------------------------------

Outcome runtime() {
  const auto jobs = load_use_case(UseCase::UC2, 200000, 1);
  SchedulerOptions o;
  o.width = ChannelWidth::MHz40;
  const auto r = run_scenario(jobs, SchedulerKind::Lsds, ChannelScenario{}, o);
  return {r.runtime_ms < 10000.0 && r.violations.empty(),
          "lsds on UC2 at 40 MHz: " + fmt("%.1f ms", r.runtime_ms) + ", " + std::to_string(jobs.jobs.size()) + " jobs"};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"AC1 feasibility", feasibility},       {"AC2 matching oracle", matching_oracle},
      {"AC3 12-approximation", approximation_bound}, {"AC4 companion example", companion},
      {"AC5 UC-4 headline", uc4_headline},    {"AC6 dominance", dominance},
      {"AC7 poor channels", poor_channel},    {"AC8 best-effort overlay", best_effort},
      {"AC9 runtime", runtime},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("[%s] %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
