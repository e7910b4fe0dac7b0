// SPDX-License-Identifier: Apache-2.0
//
// RU tone classes, the legal RU configuration space of an 802.11ax channel,
// and the PHY timing model that turns payload bytes into airtime.

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace dpmss {

/// Time on the integer microsecond grid.
using Micros = std::int64_t;

inline constexpr std::size_t kNumToneClasses = 6;

enum class RuToneClass : std::uint8_t { Ru26 = 0, Ru52, Ru106, Ru242, Ru484, Ru996 };

inline constexpr std::array<RuToneClass, kNumToneClasses> kAllToneClasses = {
    RuToneClass::Ru26,  RuToneClass::Ru52,  RuToneClass::Ru106,
    RuToneClass::Ru242, RuToneClass::Ru484, RuToneClass::Ru996};

constexpr std::size_t class_index(RuToneClass c) { return static_cast<std::size_t>(c); }

constexpr RuToneClass tone_class_at(std::size_t index) { return kAllToneClasses.at(index); }

constexpr int tones(RuToneClass c) {
  constexpr std::array<int, kNumToneClasses> kTones = {26, 52, 106, 242, 484, 996};
  return kTones[class_index(c)];
}

/// Data subcarriers per RU (pilots and DC excluded).
constexpr int data_subcarriers(RuToneClass c) {
  constexpr std::array<int, kNumToneClasses> kData = {24, 48, 102, 234, 468, 980};
  return kData[class_index(c)];
}

inline RuToneClass tone_class_from_tones(int t) {
  for (auto c : kAllToneClasses) {
    if (tones(c) == t) return c;
  }
  throw std::invalid_argument("unknown RU tone count: " + std::to_string(t));
}

enum class ChannelWidth : int { MHz20 = 20, MHz40 = 40, MHz80 = 80, MHz160 = 160 };

constexpr int to_mhz(ChannelWidth w) { return static_cast<int>(w); }

inline ChannelWidth channel_width_from_mhz(int mhz) {
  switch (mhz) {
    case 20: return ChannelWidth::MHz20;
    case 40: return ChannelWidth::MHz40;
    case 80: return ChannelWidth::MHz80;
    case 160: return ChannelWidth::MHz160;
    default: throw std::invalid_argument("unsupported channel width: " + std::to_string(mhz) + " MHz");
  }
}

/// Bandwidth budget B in tones: the tone count of the root RU(s) of the channel.
constexpr int budget_tones(ChannelWidth w) {
  switch (w) {
    case ChannelWidth::MHz20: return 242;
    case ChannelWidth::MHz40: return 484;
    case ChannelWidth::MHz80: return 996;
    case ChannelWidth::MHz160: return 2 * 996;
  }
  return 0;
}

using RuCounts = std::array<int, kNumToneClasses>;

/// Maximum number of RUs of each class per channel width (802.11ax RU table,
/// base counts without the "+n 26-tone" remainders).
inline RuCounts max_ru_counts(ChannelWidth w) {
  switch (w) {
    case ChannelWidth::MHz20: return {9, 4, 2, 1, 0, 0};
    case ChannelWidth::MHz40: return {18, 8, 4, 2, 1, 0};
    case ChannelWidth::MHz80: return {37, 16, 8, 4, 2, 1};
    case ChannelWidth::MHz160: return {74, 32, 16, 8, 4, 2};
  }
  throw std::invalid_argument("unsupported channel width");
}

/// MCS / guard-interval selection shared by all stations.
struct PhyProfile {
  int mcs = 11;
  int guard_interval_ns = 3200;
  /// Fixed per-transmission overhead added to every airtime (trigger frame, SIFS).
  Micros overhead_us = 0;

  int symbol_duration_ns() const { return 12800 + guard_interval_ns; }

  void validate() const {
    if (mcs < 0 || mcs > 11) throw std::invalid_argument("MCS must be in [0, 11]");
    if (guard_interval_ns != 800 && guard_interval_ns != 1600 && guard_interval_ns != 3200)
      throw std::invalid_argument("guard interval must be 800, 1600 or 3200 ns");
    if (overhead_us < 0) throw std::invalid_argument("overhead must be non-negative");
  }

  friend bool operator==(const PhyProfile&, const PhyProfile&) = default;
};

namespace detail {

struct McsEntry {
  int bits_per_subcarrier;
  int code_num;
  int code_den;
};

inline constexpr std::array<McsEntry, 12> kMcsTable = {{
    {1, 1, 2},   // BPSK 1/2
    {2, 1, 2},   // QPSK 1/2
    {2, 3, 4},   // QPSK 3/4
    {4, 1, 2},   // 16-QAM 1/2
    {4, 3, 4},   // 16-QAM 3/4
    {6, 2, 3},   // 64-QAM 2/3
    {6, 3, 4},   // 64-QAM 3/4
    {6, 5, 6},   // 64-QAM 5/6
    {8, 3, 4},   // 256-QAM 3/4
    {8, 5, 6},   // 256-QAM 5/6
    {10, 3, 4},  // 1024-QAM 3/4
    {10, 5, 6},  // 1024-QAM 5/6
}};

}  // namespace detail

/// Coded data bits carried by one OFDM symbol, as an exact fraction num/den.
struct BitsPerSymbol {
  std::int64_t num;
  std::int64_t den;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

inline BitsPerSymbol bits_per_symbol(RuToneClass c, const PhyProfile& phy) {
  phy.validate();
  const auto& m = detail::kMcsTable[static_cast<std::size_t>(phy.mcs)];
  return {static_cast<std::int64_t>(data_subcarriers(c)) * m.bits_per_subcarrier * m.code_num, m.code_den};
}

/// Effective PHY rate of one RU in bits per microsecond (= Mbps), single stream.
inline double phy_rate(RuToneClass c, const PhyProfile& phy) {
  const auto bps = bits_per_symbol(c, phy);
  return bps.value() / (phy.symbol_duration_ns() / 1000.0);
}

/// One RU instance.
struct Machine {
  int id = 0;
  RuToneClass tone_class = RuToneClass::Ru26;
  int bandwidth = 26;
  double rate = 0.0;
  PhyProfile phy{};
};

inline Machine make_machine(int id, RuToneClass c, const PhyProfile& phy) {
  return Machine{id, c, tones(c), phy_rate(c, phy), phy};
}

/// Airtime of a payload on an RU class: whole OFDM symbols, rounded up to the
/// microsecond grid, plus the configured overhead.
inline Micros tx_duration(std::int64_t payload_bytes, RuToneClass c, const PhyProfile& phy) {
  if (payload_bytes <= 0) throw std::invalid_argument("payload must be positive");
  const auto bps = bits_per_symbol(c, phy);
  const std::int64_t bits = payload_bytes * 8;
  const std::int64_t symbols = (bits * bps.den + bps.num - 1) / bps.num;
  const std::int64_t ns = symbols * phy.symbol_duration_ns();
  return (ns + 999) / 1000 + phy.overhead_us;
}

inline Micros tx_duration(std::int64_t payload_bytes, const Machine& m) {
  if (!(m.rate > 0.0)) throw std::invalid_argument("machine rate must be positive");
  return tx_duration(payload_bytes, m.tone_class, m.phy);
}

/// Airtime of a payload on each of the six classes, indexed by class.
inline std::array<Micros, kNumToneClasses> tx_durations(std::int64_t payload_bytes, const PhyProfile& phy) {
  std::array<Micros, kNumToneClasses> out{};
  for (auto c : kAllToneClasses) out[class_index(c)] = tx_duration(payload_bytes, c, phy);
  return out;
}

/// A multiset of RU classes used by one transmission.
struct RuConfiguration {
  RuCounts counts{};
  ChannelWidth channel_width = ChannelWidth::MHz20;

  int count(RuToneClass c) const { return counts[class_index(c)]; }

  int total_rus() const {
    int n = 0;
    for (int c : counts) n += c;
    return n;
  }

  int total_tones() const {
    int t = 0;
    for (auto c : kAllToneClasses) t += count(c) * tones(c);
    return t;
  }

  /// Canonical machine list: classes ascending, ids 0..n-1.
  std::vector<Machine> machines(const PhyProfile& phy) const {
    std::vector<Machine> out;
    out.reserve(static_cast<std::size_t>(total_rus()));
    for (auto c : kAllToneClasses) {
      for (int k = 0; k < count(c); ++k) out.push_back(make_machine(static_cast<int>(out.size()), c, phy));
    }
    return out;
  }

  /// Tone class of canonical machine id.
  RuToneClass machine_class(int machine_id) const {
    int base = 0;
    for (auto c : kAllToneClasses) {
      if (machine_id < base + count(c)) return c;
      base += count(c);
    }
    throw std::out_of_range("machine id outside configuration");
  }

  /// e.g. "8x52+2x26" (largest class first).
  std::string to_string() const {
    std::string s;
    for (std::size_t k = kNumToneClasses; k-- > 0;) {
      if (counts[k] == 0) continue;
      if (!s.empty()) s += '+';
      s += std::to_string(counts[k]) + "x" + std::to_string(tones(tone_class_at(k)));
    }
    return s.empty() ? "empty" : s;
  }

  friend bool operator==(const RuConfiguration&, const RuConfiguration&) = default;
};

/// Parses "8x52+2x26" style strings.
inline RuConfiguration parse_configuration(const std::string& text, ChannelWidth width) {
  RuConfiguration cfg;
  cfg.channel_width = width;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto plus = text.find('+', pos);
    if (plus == std::string::npos) plus = text.size();
    const std::string term = text.substr(pos, plus - pos);
    const auto x = term.find('x');
    if (x == std::string::npos) throw std::invalid_argument("bad RU term '" + term + "', expected NxTONES");
    const int n = std::stoi(term.substr(0, x));
    const int t = std::stoi(term.substr(x + 1));
    if (n < 0) throw std::invalid_argument("negative RU count in '" + term + "'");
    cfg.counts[class_index(tone_class_from_tones(t))] += n;
    pos = plus + 1;
  }
  return cfg;
}

namespace detail {

inline RuCounts add_counts(const RuCounts& a, const RuCounts& b) {
  RuCounts r{};
  for (std::size_t k = 0; k < kNumToneClasses; ++k) r[k] = a[k] + b[k];
  return r;
}

inline RuCounts unit_counts(RuToneClass c) {
  RuCounts r{};
  r[class_index(c)] = 1;
  return r;
}

using CountSet = std::set<RuCounts>;

inline CountSet pair_sum(const CountSet& a, const CountSet& b, const RuCounts& extra) {
  CountSet out;
  for (const auto& x : a)
    for (const auto& y : b) out.insert(add_counts(add_counts(x, y), extra));
  return out;
}

/// Every multiset reachable from one RU of class c by the split grammar:
/// 996 -> 484+484+26, 484 -> 242+242, 242 -> 106+106+26, 106 -> 52+52, 52 -> 26+26.
inline CountSet split_closure(RuToneClass c) {
  CountSet out{unit_counts(c)};
  const RuCounts none{};
  switch (c) {
    case RuToneClass::Ru26: break;
    case RuToneClass::Ru52: {
      auto s = split_closure(RuToneClass::Ru26);
      out.merge(pair_sum(s, s, none));
      break;
    }
    case RuToneClass::Ru106: {
      auto s = split_closure(RuToneClass::Ru52);
      out.merge(pair_sum(s, s, none));
      break;
    }
    case RuToneClass::Ru242: {
      auto s = split_closure(RuToneClass::Ru106);
      out.merge(pair_sum(s, s, unit_counts(RuToneClass::Ru26)));
      break;
    }
    case RuToneClass::Ru484: {
      auto s = split_closure(RuToneClass::Ru242);
      out.merge(pair_sum(s, s, none));
      break;
    }
    case RuToneClass::Ru996: {
      auto s = split_closure(RuToneClass::Ru484);
      out.merge(pair_sum(s, s, unit_counts(RuToneClass::Ru26)));
      break;
    }
  }
  return out;
}

inline bool canonical_less(const RuConfiguration& a, const RuConfiguration& b) {
  const int ra = a.total_rus();
  const int rb = b.total_rus();
  if (ra != rb) return ra < rb;
  return a.counts < b.counts;
}

}  // namespace detail

/// All legal RU configurations of a channel, in canonical order: fewer RUs
/// first, then lexicographic on the per-class counts (26-tone count first).
/// A configuration's index in this list is its configuration id.
inline std::vector<RuConfiguration> enumerate_configurations(ChannelWidth width) {
  detail::CountSet sets;
  switch (width) {
    case ChannelWidth::MHz20: sets = detail::split_closure(RuToneClass::Ru242); break;
    case ChannelWidth::MHz40: sets = detail::split_closure(RuToneClass::Ru484); break;
    case ChannelWidth::MHz80: sets = detail::split_closure(RuToneClass::Ru996); break;
    case ChannelWidth::MHz160: {
      // 80+80: two independent 996-tone roots.
      auto s = detail::split_closure(RuToneClass::Ru996);
      sets = detail::pair_sum(s, s, RuCounts{});
      break;
    }
    default: throw std::invalid_argument("unsupported channel width");
  }
  std::vector<RuConfiguration> out;
  out.reserve(sets.size());
  for (const auto& c : sets) out.push_back(RuConfiguration{c, width});
  std::sort(out.begin(), out.end(), detail::canonical_less);
  return out;
}

inline std::vector<RuConfiguration> enumerate_configurations(int mhz) {
  return enumerate_configurations(channel_width_from_mhz(mhz));
}

/// Configuration id of cfg among the legal configurations of its width, or -1.
inline int find_configuration_id(const std::vector<RuConfiguration>& catalog, const RuConfiguration& cfg) {
  const auto it = std::lower_bound(catalog.begin(), catalog.end(), cfg, detail::canonical_less);
  if (it == catalog.end() || it->counts != cfg.counts) return -1;
  return static_cast<int>(it - catalog.begin());
}

/// Legal configuration with the fewest RUs that contains `count` RUs of class c.
inline RuConfiguration smallest_covering_configuration(ChannelWidth width, RuToneClass c, int count) {
  for (const auto& cfg : enumerate_configurations(width)) {
    if (cfg.count(c) >= count) return cfg;
  }
  throw std::invalid_argument("no legal configuration holds " + std::to_string(count) + " RUs of " +
                              std::to_string(tones(c)) + " tones at " + std::to_string(to_mhz(width)) + " MHz");
}

/// Per-class suffix counts: entry k is the number of RUs whose class is >= k.
using SuffixCounts = std::array<int, kNumToneClasses>;

inline SuffixCounts suffix_counts(const RuCounts& counts) {
  SuffixCounts s{};
  int acc = 0;
  for (std::size_t k = kNumToneClasses; k-- > 0;) {
    acc += counts[k];
    s[k] = acc;
  }
  return s;
}

/// A list of RU configurations searched by the schedulers, in tie-break order,
/// with per-level-mask projection tables used to evaluate many configurations
/// at once. For a set of tone classes `mask`, two configurations whose suffix
/// counts agree on the classes in `mask` are interchangeable for any job set
/// whose minimum admissible classes all lie in `mask`.
class ConfigSpace {
 public:
  struct Projection {
    SuffixCounts key{};  // zero outside the mask
    int first = 0;       // first configuration (list order) with this projection
  };

  explicit ConfigSpace(std::vector<RuConfiguration> configs) : configs_(std::move(configs)) {
    if (configs_.empty()) throw std::invalid_argument("configuration space is empty");
    width_ = configs_.front().channel_width;
    for (const auto& c : configs_) {
      for (std::size_t k = 0; k < kNumToneClasses; ++k) relaxed_[k] = std::max(relaxed_[k], c.counts[k]);
      suffix_.push_back(suffix_counts(c.counts));
    }
    for (unsigned mask = 1; mask < (1u << kNumToneClasses); ++mask) {
      std::map<SuffixCounts, int> seen;
      for (std::size_t i = 0; i < configs_.size(); ++i) {
        SuffixCounts key{};
        for (std::size_t k = 0; k < kNumToneClasses; ++k)
          if (mask & (1u << k)) key[k] = suffix_[i][k];
        seen.emplace(key, static_cast<int>(i));
      }
      auto& out = projections_[mask];
      for (const auto& [key, first] : seen) out.push_back({key, first});
      std::sort(out.begin(), out.end(), [](const Projection& a, const Projection& b) { return a.first < b.first; });
    }
  }

  static const ConfigSpace& catalog(ChannelWidth w) {
    static const ConfigSpace s20(enumerate_configurations(ChannelWidth::MHz20));
    static const ConfigSpace s40(enumerate_configurations(ChannelWidth::MHz40));
    static const ConfigSpace s80(enumerate_configurations(ChannelWidth::MHz80));
    static const ConfigSpace s160(enumerate_configurations(ChannelWidth::MHz160));
    switch (w) {
      case ChannelWidth::MHz20: return s20;
      case ChannelWidth::MHz40: return s40;
      case ChannelWidth::MHz80: return s80;
      case ChannelWidth::MHz160: return s160;
    }
    throw std::invalid_argument("unsupported channel width");
  }

  ChannelWidth width() const { return width_; }
  std::size_t size() const { return configs_.size(); }
  const std::vector<RuConfiguration>& configs() const { return configs_; }
  const RuConfiguration& operator[](std::size_t i) const { return configs_[i]; }
  const SuffixCounts& suffix(std::size_t i) const { return suffix_[i]; }
  /// Per-class maximum over the space (the relaxed machine set).
  const RuCounts& relaxed_counts() const { return relaxed_; }
  const std::vector<Projection>& projections(unsigned mask) const { return projections_.at(mask); }

 private:
  std::vector<RuConfiguration> configs_;
  std::vector<SuffixCounts> suffix_;
  RuCounts relaxed_{};
  ChannelWidth width_ = ChannelWidth::MHz20;
  std::array<std::vector<Projection>, (1u << kNumToneClasses)> projections_{};
};

}  // namespace dpmss
