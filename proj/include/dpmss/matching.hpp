// SPDX-License-Identifier: Apache-2.0
//
// Maximum-weight bipartite matching, its bandwidth-budgeted variant, the
// per-interval Max-Profit job selection and the RU configuration search.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dpmss/ofdma.hpp"
#include "dpmss/schedule.hpp"
#include "dpmss/workload.hpp"

namespace dpmss {

struct Edge {
  int left = 0;
  int right = 0;
  double weight = 0.0;
};

struct BipartiteBudget {
  /// Bandwidth of each right vertex, aligned with BipartiteInstance::right.
  std::vector<int> bandwidth;
  int total = 0;
};

struct BipartiteInstance {
  std::vector<int> left;
  std::vector<int> right;
  std::vector<Edge> edges;
  std::optional<BipartiteBudget> budget;

  void validate() const {
    std::set<int> l(left.begin(), left.end());
    std::set<int> r(right.begin(), right.end());
    if (l.size() != left.size() || r.size() != right.size()) throw std::invalid_argument("duplicate vertex id");
    std::set<std::pair<int, int>> seen;
    for (const auto& e : edges) {
      if (!l.count(e.left) || !r.count(e.right)) throw std::invalid_argument("edge endpoint not in graph");
      if (!(e.weight >= 0.0) || !std::isfinite(e.weight)) throw std::invalid_argument("edge weight must be >= 0");
      if (!seen.emplace(e.left, e.right).second) throw std::invalid_argument("duplicate edge");
    }
    if (budget && budget->bandwidth.size() != right.size())
      throw std::invalid_argument("budget bandwidth list must align with right vertices");
  }
};

struct Matching {
  std::vector<std::pair<int, int>> pairs;  // (left id, right id), sorted
  double total_weight = 0.0;
};

namespace detail {

inline bool weight_less(double a, double b) { return a < b - 1e-9 * std::max(1.0, std::fabs(b)); }

/// Minimum-cost assignment of every row to a distinct column (rows <= cols),
/// successive shortest paths with potentials. Returns the column of each row.
inline std::vector<int> hungarian(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  if (n == 0) return {};
  const int m = static_cast<int>(cost[0].size());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0), v(static_cast<std::size_t>(m) + 1, 0.0);
  std::vector<int> p(static_cast<std::size_t>(m) + 1, 0), way(static_cast<std::size_t>(m) + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(m) + 1, inf);
    std::vector<char> used(static_cast<std::size_t>(m) + 1, 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = p[static_cast<std::size_t>(j0)];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = cost[static_cast<std::size_t>(i0 - 1)][static_cast<std::size_t>(j - 1)] -
                           u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= m; ++j)
    if (p[static_cast<std::size_t>(j)] != 0) row_to_col[static_cast<std::size_t>(p[static_cast<std::size_t>(j)] - 1)] = j - 1;
  return row_to_col;
}

}  // namespace detail

/// Maximum total weight matching (not necessarily maximum cardinality).
/// Zero-weight pairs are left out. Deterministic for a given instance.
inline Matching max_weight_matching(const BipartiteInstance& inst) {
  inst.validate();
  Matching out;
  if (inst.edges.empty()) return out;
  std::map<int, std::size_t> li, ri;
  for (std::size_t k = 0; k < inst.left.size(); ++k) li[inst.left[k]] = k;
  for (std::size_t k = 0; k < inst.right.size(); ++k) ri[inst.right[k]] = k;
  const bool transpose = inst.left.size() > inst.right.size();
  const std::size_t rows = transpose ? inst.right.size() : inst.left.size();
  const std::size_t cols = transpose ? inst.left.size() : inst.right.size();
  std::vector<std::vector<double>> cost(rows, std::vector<double>(cols, 0.0));
  std::vector<std::vector<char>> is_edge(rows, std::vector<char>(cols, 0));
  for (const auto& e : inst.edges) {
    const std::size_t a = li[e.left], b = ri[e.right];
    const std::size_t r = transpose ? b : a, c = transpose ? a : b;
    cost[r][c] = -e.weight;
    is_edge[r][c] = 1;
  }
  const auto assign = detail::hungarian(cost);
  for (std::size_t r = 0; r < rows; ++r) {
    const int c = assign[r];
    if (c < 0 || !is_edge[r][static_cast<std::size_t>(c)] || !(-cost[r][static_cast<std::size_t>(c)] > 0.0)) continue;
    const std::size_t l = transpose ? static_cast<std::size_t>(c) : r;
    const std::size_t m = transpose ? r : static_cast<std::size_t>(c);
    out.pairs.emplace_back(inst.left[l], inst.right[m]);
  }
  std::sort(out.pairs.begin(), out.pairs.end());
  for (const auto& e : inst.edges) {
    if (std::binary_search(out.pairs.begin(), out.pairs.end(), std::make_pair(e.left, e.right))) out.total_weight += e.weight;
  }
  return out;
}

/// Maximum-weight matching whose matched right vertices fit in bandwidth B.
/// Exact: enumerates the maximal budget-feasible machine subsets, so it is
/// limited to small machine counts.
inline Matching budgeted_max_weight_matching(const BipartiteInstance& inst, int B) {
  inst.validate();
  if (!inst.budget) throw std::invalid_argument("budgeted matching needs per-machine bandwidths");
  const std::size_t R = inst.right.size();
  if (R > 16) throw std::invalid_argument("budgeted matching is exact only up to 16 machines");
  const auto& bw = inst.budget->bandwidth;
  Matching best;
  bool have = false;
  for (std::uint32_t mask = 0; mask < (1u << R); ++mask) {
    long used = 0;
    for (std::size_t k = 0; k < R; ++k)
      if (mask & (1u << k)) used += bw[k];
    if (used > B) continue;
    bool maximal = true;
    for (std::size_t k = 0; k < R && maximal; ++k)
      if (!(mask & (1u << k)) && used + bw[k] <= B) maximal = false;
    if (!maximal) continue;
    BipartiteInstance sub;
    sub.left = inst.left;
    for (std::size_t k = 0; k < R; ++k)
      if (mask & (1u << k)) sub.right.push_back(inst.right[k]);
    std::set<int> keep(sub.right.begin(), sub.right.end());
    for (const auto& e : inst.edges)
      if (keep.count(e.right)) sub.edges.push_back(e);
    auto m = max_weight_matching(sub);
    if (!have || detail::weight_less(best.total_weight, m.total_weight)) {
      best = std::move(m);
      have = true;
    }
  }
  return best;
}

namespace detail {

/// Candidate of a nested (chain) admissibility structure: the job may use any
/// machine whose class index is >= cmin.
struct Candidate {
  int job = 0;
  double weight = 0.0;
  int cmin = 0;
};

inline constexpr int kUnbounded = std::numeric_limits<int>::max() / 4;

/// Greedy maximum-weight selection over candidates in priority order under
/// suffix capacities `cap` (Hall's condition on a chain). Only the classes in
/// `mask` are checked; every candidate's cmin must lie in `mask`.
inline double nested_greedy(const std::vector<Candidate>& cands, const SuffixCounts& cap, unsigned mask,
                            std::vector<int>* picked = nullptr) {
  int levels[kNumToneClasses];
  int nlev = 0;
  for (std::size_t k = 0; k < kNumToneClasses; ++k)
    if (mask & (1u << k)) levels[nlev++] = static_cast<int>(k);
  int used[kNumToneClasses] = {0, 0, 0, 0, 0, 0};
  const int total = nlev > 0 ? cap[static_cast<std::size_t>(levels[0])] : 0;
  int count = 0;
  double w = 0.0;
  if (picked) picked->clear();
  for (std::size_t i = 0; i < cands.size() && count < total; ++i) {
    const int c = cands[i].cmin;
    bool ok = true;
    for (int q = 0; q < nlev && levels[q] <= c; ++q) {
      if (used[levels[q]] + 1 > cap[static_cast<std::size_t>(levels[q])]) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    for (int q = 0; q < nlev && levels[q] <= c; ++q) ++used[levels[q]];
    ++count;
    w += cands[i].weight;
    if (picked) picked->push_back(static_cast<int>(i));
  }
  return w;
}

/// Places selected jobs (given their cmin) on canonical machine ids of a
/// configuration: most constrained first, each on the lowest free class that
/// admits it.
inline std::vector<int> assign_nested(const std::vector<int>& cmins, const RuCounts& counts) {
  std::array<int, kNumToneClasses> base{}, next{};
  for (std::size_t k = 1; k < kNumToneClasses; ++k) base[k] = base[k - 1] + counts[k - 1];
  std::vector<std::size_t> order(cmins.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return cmins[a] > cmins[b]; });
  std::vector<int> machine(cmins.size(), -1);
  for (std::size_t i : order) {
    for (std::size_t k = static_cast<std::size_t>(cmins[i]); k < kNumToneClasses; ++k) {
      if (next[k] < counts[k]) {
        machine[i] = base[k] + next[k]++;
        break;
      }
    }
    if (machine[i] < 0) throw std::logic_error("nested assignment failed: selection violates capacities");
  }
  return machine;
}

inline bool priority_before(const Job& a, const Job& b) {
  if (a.profit != b.profit) return a.profit > b.profit;
  return a.id < b.id;
}

/// Smallest class in `present` whose duration fits `room`, or -1.
inline int min_class(const std::array<Micros, kNumToneClasses>& dur, Micros room, const RuCounts& present) {
  for (std::size_t k = 0; k < kNumToneClasses; ++k)
    if (present[k] > 0 && dur[k] <= room) return static_cast<int>(k);
  return -1;
}

struct SearchOutcome {
  int index = 0;  // position in the ConfigSpace
  double weight = 0.0;
  std::vector<int> picked;  // indices into the pruned candidate list
};

/// Stage 2 of the configuration search: the first configuration (space order)
/// reaching the maximum greedy weight on the pruned candidates `pruned`, which
/// must be in priority order. `bound` is an upper bound on any configuration's
/// weight (the stage-1 weight), used for early exit.
inline SearchOutcome search_configs(const ConfigSpace& space, const std::vector<Candidate>& pruned, double bound) {
  SearchOutcome out;
  if (pruned.empty()) return out;
  unsigned mask = 0;
  for (const auto& c : pruned) mask |= 1u << c.cmin;
  int lowest = 0;
  while (!(mask & (1u << lowest))) ++lowest;
  std::vector<double> prefix(pruned.size() + 1, 0.0);
  for (std::size_t i = 0; i < pruned.size(); ++i) prefix[i + 1] = prefix[i] + pruned[i].weight;
  double best = -1.0;
  const ConfigSpace::Projection* best_proj = nullptr;
  for (const auto& proj : space.projections(mask)) {
    const auto n = std::min<std::size_t>(static_cast<std::size_t>(proj.key[static_cast<std::size_t>(lowest)]), pruned.size());
    if (!weight_less(best, prefix[n])) continue;
    const double v = nested_greedy(pruned, proj.key, mask);
    if (weight_less(best, v)) {
      best = v;
      best_proj = &proj;
      if (!weight_less(best, bound)) break;
    }
  }
  if (best_proj == nullptr) return out;
  out.index = best_proj->first;
  out.weight = nested_greedy(pruned, best_proj->key, mask, &out.picked);
  return out;
}

}  // namespace detail

struct MaxProfitResult {
  Matching matching;      // (job id, machine id)
  std::vector<int> jobs;  // matched job ids, sorted
};

/// Max-Profit: the maximum-profit set of candidates admissible in `iv`, each on
/// a distinct machine. When every machine shares one PHY profile, admissible
/// machine sets are nested by rate and a greedy pass is exact; otherwise the
/// general matcher is used.
inline MaxProfitResult max_profit(const std::vector<Job>& candidates, const Interval& iv,
                                  const std::vector<Machine>& machines) {
  MaxProfitResult out;
  if (candidates.empty() || machines.empty() || iv.end <= iv.start) return out;
  bool uniform = true;
  for (const auto& m : machines) {
    if (!(m.phy == machines.front().phy)) uniform = false;
    if (!(m.rate > 0.0)) throw std::invalid_argument("machine rate must be positive");
  }
  if (!uniform) {
    BipartiteInstance g;
    for (const auto& j : candidates) g.left.push_back(j.id);
    for (const auto& m : machines) g.right.push_back(m.id);
    for (const auto& j : candidates)
      for (const auto& m : machines)
        if (j.profit > 0.0 && admissible(j, tx_duration(j.size, m), iv)) g.edges.push_back({j.id, m.id, j.profit});
    out.matching = max_weight_matching(g);
  } else {
    const PhyProfile& phy = machines.front().phy;
    RuCounts counts{};
    std::array<std::vector<int>, kNumToneClasses> ids;
    for (const auto& m : machines) {
      ++counts[class_index(m.tone_class)];
      ids[class_index(m.tone_class)].push_back(m.id);
    }
    for (auto& v : ids) std::sort(v.begin(), v.end());
    std::vector<const Job*> order;
    for (const auto& j : candidates) order.push_back(&j);
    std::sort(order.begin(), order.end(), [](const Job* a, const Job* b) { return detail::priority_before(*a, *b); });
    std::vector<detail::Candidate> cands;
    for (const Job* j : order) {
      if (!(j->profit > 0.0) || j->release > iv.start) continue;
      const Micros room = std::min(iv.end, j->deadline) - iv.start;
      if (room <= 0) continue;
      const int c = detail::min_class(tx_durations(j->size, phy), room, counts);
      if (c >= 0) cands.push_back({j->id, j->profit, c});
    }
    std::vector<int> picked;
    detail::nested_greedy(cands, suffix_counts(counts), (1u << kNumToneClasses) - 1, &picked);
    std::vector<int> cmins;
    for (int i : picked) cmins.push_back(cands[static_cast<std::size_t>(i)].cmin);
    const auto slots = detail::assign_nested(cmins, counts);
    std::array<int, kNumToneClasses> base{};
    for (std::size_t k = 1; k < kNumToneClasses; ++k) base[k] = base[k - 1] + counts[k - 1];
    for (std::size_t q = 0; q < picked.size(); ++q) {
      const auto& c = cands[static_cast<std::size_t>(picked[q])];
      const int slot = slots[q];
      std::size_t k = kNumToneClasses - 1;
      while (slot < base[k]) --k;
      out.matching.pairs.emplace_back(c.job, ids[k][static_cast<std::size_t>(slot - base[k])]);
      out.matching.total_weight += c.weight;
    }
    std::sort(out.matching.pairs.begin(), out.matching.pairs.end());
  }
  for (const auto& [j, m] : out.matching.pairs) out.jobs.push_back(j);
  std::sort(out.jobs.begin(), out.jobs.end());
  return out;
}

struct ConfigSearchResult {
  int index = 0;       // position in the searched space
  int config_id = -1;  // catalog id for the channel width, -1 if not a catalog member
  RuConfiguration config;
  Matching matching;  // (job id, canonical machine id of `config`)
  std::vector<int> jobs;
  double relaxed_weight = 0.0;  // stage-1 weight on the relaxed machine set
};

/// Two-stage configuration search. Stage 1 runs Max-Profit on the relaxed
/// machine set (per-class maximum over the space) and keeps its selection as
/// the candidate pool. Stage 2 finds, over every configuration of the space,
/// the maximum Max-Profit weight on that pool; ties go to the earlier
/// configuration (fewer RUs, then lexicographic for catalog spaces).
inline ConfigSearchResult lsds_config_search(const std::vector<Job>& candidates, const Interval& iv,
                                             const ConfigSpace& space, const PhyProfile& phy) {
  ConfigSearchResult out;
  out.config = space[0];
  out.config_id = find_configuration_id(ConfigSpace::catalog(space.width()).configs(), out.config);
  if (iv.end <= iv.start) return out;
  std::vector<const Job*> order;
  for (const auto& j : candidates) order.push_back(&j);
  std::sort(order.begin(), order.end(), [](const Job* a, const Job* b) { return detail::priority_before(*a, *b); });
  const RuCounts& relaxed = space.relaxed_counts();
  std::vector<detail::Candidate> cands;
  for (const Job* j : order) {
    if (!(j->profit > 0.0) || j->release > iv.start) continue;
    const Micros room = std::min(iv.end, j->deadline) - iv.start;
    if (room <= 0) continue;
    const int c = detail::min_class(tx_durations(j->size, phy), room, relaxed);
    if (c >= 0) cands.push_back({j->id, j->profit, c});
  }
  std::vector<int> picked;
  out.relaxed_weight = detail::nested_greedy(cands, suffix_counts(relaxed), (1u << kNumToneClasses) - 1, &picked);
  std::vector<detail::Candidate> pruned;
  for (int i : picked) pruned.push_back(cands[static_cast<std::size_t>(i)]);
  const auto best = detail::search_configs(space, pruned, out.relaxed_weight);
  out.index = best.index;
  out.config = space[static_cast<std::size_t>(best.index)];
  out.config_id = find_configuration_id(ConfigSpace::catalog(space.width()).configs(), out.config);
  std::vector<int> cmins;
  for (int i : best.picked) cmins.push_back(pruned[static_cast<std::size_t>(i)].cmin);
  const auto slots = detail::assign_nested(cmins, out.config.counts);
  for (std::size_t q = 0; q < best.picked.size(); ++q) {
    const auto& c = pruned[static_cast<std::size_t>(best.picked[q])];
    out.matching.pairs.emplace_back(c.job, slots[q]);
    out.matching.total_weight += c.weight;
    out.jobs.push_back(c.job);
  }
  std::sort(out.matching.pairs.begin(), out.matching.pairs.end());
  std::sort(out.jobs.begin(), out.jobs.end());
  return out;
}

inline ConfigSearchResult lsds_config_search(const std::vector<Job>& candidates, const Interval& iv, ChannelWidth width,
                                             const PhyProfile& phy) {
  return lsds_config_search(candidates, iv, ConfigSpace::catalog(width), phy);
}

}  // namespace dpmss
