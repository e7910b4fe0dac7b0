// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <set>
#include <vector>

#include "dpmss/local_search.hpp"
#include "dpmss/ofdma.hpp"

using namespace dpmss;

namespace {

using Counts = std::array<int, 6>;

// Positional oracle: an RU of class k covers a fixed run of 26-tone slots.
// Every exact cover of the slots of one 20 MHz sub-band is a legal layout.
struct Placed {
  int cls;
  unsigned mask;
};

std::vector<Placed> layout20() {
  std::vector<Placed> out;
  for (int i = 0; i < 9; ++i) out.push_back({0, 1u << i});
  for (int i : {0, 2, 5, 7}) out.push_back({1, 3u << i});
  out.push_back({2, 0xFu});
  out.push_back({2, 0xFu << 5});
  out.push_back({3, 0x1FFu});
  return out;
}

void covers(const std::vector<Placed>& rus, unsigned full, unsigned used, Counts acc, std::set<Counts>& out) {
  if (used == full) {
    out.insert(acc);
    return;
  }
  int first = 0;
  while (used & (1u << first)) ++first;
  for (const auto& r : rus) {
    if (!(r.mask & (1u << first)) || (r.mask & used)) continue;
    Counts next = acc;
    ++next[static_cast<std::size_t>(r.cls)];
    covers(rus, full, used | r.mask, next, out);
  }
}

std::set<Counts> sumset(const std::set<Counts>& a, const std::set<Counts>& b, Counts extra) {
  std::set<Counts> out;
  for (const auto& x : a)
    for (const auto& y : b) {
      Counts z = extra;
      for (std::size_t k = 0; k < 6; ++k) z[k] += x[k] + y[k];
      out.insert(z);
    }
  return out;
}

std::set<Counts> oracle_counts(int mhz) {
  std::set<Counts> s20;
  covers(layout20(), 0x1FFu, 0, Counts{}, s20);
  auto s40 = sumset(s20, s20, Counts{});
  s40.insert(Counts{0, 0, 0, 0, 1, 0});
  auto s80 = sumset(s40, s40, Counts{1, 0, 0, 0, 0, 0});  // center 26-tone RU
  s80.insert(Counts{0, 0, 0, 0, 0, 1});
  switch (mhz) {
    case 20: return s20;
    case 40: return s40;
    case 80: return s80;
    default: return sumset(s80, s80, Counts{});
  }
}

}  // namespace

TEST(Configurations, CountsMatchPositionalTilings) {
  const std::vector<std::pair<int, std::size_t>> frozen = {{20, 10}, {40, 36}, {80, 202}, {160, 1827}};
  for (const auto& [mhz, n] : frozen) {
    const auto oracle = oracle_counts(mhz);
    ASSERT_EQ(oracle.size(), n) << mhz << " MHz";
    const auto cat = enumerate_configurations(mhz);
    EXPECT_EQ(cat.size(), n) << mhz << " MHz";
    std::set<Counts> got;
    for (const auto& c : cat) got.insert(c.counts);
    EXPECT_EQ(got, oracle) << mhz << " MHz";
  }
}

TEST(Configurations, EveryConfigurationFitsTheBudget) {
  for (int mhz : {20, 40, 80, 160}) {
    const auto w = channel_width_from_mhz(mhz);
    const auto maxc = max_ru_counts(w);
    for (const auto& c : ConfigSpace::catalog(w).configs()) {
      EXPECT_LE(c.total_tones(), budget_tones(w));
      for (std::size_t k = 0; k < kNumToneClasses; ++k) EXPECT_LE(c.counts[k], maxc[k]);
    }
  }
}

TEST(Configurations, CanonicalOrderFewerRusFirst) {
  const auto& cat = ConfigSpace::catalog(ChannelWidth::MHz40).configs();
  EXPECT_EQ(cat.front().to_string(), "1x484");
  EXPECT_EQ(cat.back().to_string(), "18x26");
  for (std::size_t i = 1; i < cat.size(); ++i) EXPECT_LE(cat[i - 1].total_rus(), cat[i].total_rus());
}

TEST(Configurations, ParseRoundTripAndLookup) {
  const auto cfg = parse_configuration("8x52+2x26", ChannelWidth::MHz40);
  EXPECT_EQ(cfg.count(RuToneClass::Ru52), 8);
  EXPECT_EQ(cfg.count(RuToneClass::Ru26), 2);
  EXPECT_EQ(cfg.to_string(), "8x52+2x26");
  EXPECT_EQ(cfg.total_tones(), 8 * 52 + 2 * 26);
  const auto& cat = ConfigSpace::catalog(ChannelWidth::MHz40).configs();
  const int id = find_configuration_id(cat, cfg);
  ASSERT_GE(id, 0);
  EXPECT_EQ(cat[static_cast<std::size_t>(id)], cfg);
  EXPECT_EQ(find_configuration_id(cat, parse_configuration("3x242", ChannelWidth::MHz40)), -1);
  EXPECT_THROW(parse_configuration("8y52", ChannelWidth::MHz40), std::invalid_argument);
  EXPECT_THROW(parse_configuration("2x100", ChannelWidth::MHz40), std::invalid_argument);
}

TEST(Configurations, CanonicalMachinesAscendByClass) {
  const auto cfg = parse_configuration("1x242+1x106+2x26+1x52", ChannelWidth::MHz40);
  const auto ms = cfg.machines(PhyProfile{});
  ASSERT_EQ(ms.size(), 5u);
  const std::vector<int> bw = {26, 26, 52, 106, 242};
  for (std::size_t i = 0; i < ms.size(); ++i) {
    EXPECT_EQ(ms[i].id, static_cast<int>(i));
    EXPECT_EQ(ms[i].bandwidth, bw[i]);
    EXPECT_EQ(tones(cfg.machine_class(static_cast<int>(i))), bw[i]);
  }
  EXPECT_THROW(cfg.machine_class(5), std::out_of_range);
}

TEST(Phy, RatesMatchDataSubcarrierFormula) {
  // rate = data subcarriers * bits/subcarrier * code rate / symbol time
  PhyProfile phy;
  EXPECT_NEAR(phy_rate(RuToneClass::Ru996, phy), 980.0 * 10 * 5 / 6 / 16.0, 1e-9);
  EXPECT_NEAR(phy_rate(RuToneClass::Ru996, phy), 510.4, 0.05);
  phy.mcs = 0;
  EXPECT_NEAR(phy_rate(RuToneClass::Ru26, phy), 0.75, 1e-12);
  // 0.8 us guard interval reproduces the familiar 600.5 Mbps 80 MHz MCS 11 figure.
  PhyProfile short_gi;
  short_gi.guard_interval_ns = 800;
  EXPECT_NEAR(phy_rate(RuToneClass::Ru996, short_gi), 600.5, 0.05);
  short_gi.mcs = 0;
  EXPECT_NEAR(phy_rate(RuToneClass::Ru26, short_gi), 0.88, 0.01);
}

TEST(Phy, RateGrowsWithRuSizeAndMcs) {
  for (int mcs = 0; mcs <= 11; ++mcs) {
    PhyProfile phy;
    phy.mcs = mcs;
    for (std::size_t k = 1; k < kNumToneClasses; ++k)
      EXPECT_LT(phy_rate(tone_class_at(k - 1), phy), phy_rate(tone_class_at(k), phy));
    if (mcs > 0) {
      PhyProfile lower = phy;
      lower.mcs = mcs - 1;
      EXPECT_LT(phy_rate(RuToneClass::Ru26, lower), phy_rate(RuToneClass::Ru26, phy));
    }
  }
}

TEST(Phy, DurationsAreWholeSymbols) {
  PhyProfile phy;
  // 800 bits / 200 bits per symbol = 4 symbols of 16 us.
  EXPECT_EQ(tx_duration(100, RuToneClass::Ru26, phy), 64);
  // 12000 bits / 1950 bits per symbol -> 7 symbols.
  EXPECT_EQ(tx_duration(1500, RuToneClass::Ru242, phy), 112);
  // One bit over a symbol boundary costs a whole symbol.
  EXPECT_EQ(tx_duration(25, RuToneClass::Ru26, phy), 16);
  EXPECT_EQ(tx_duration(26, RuToneClass::Ru26, phy), 32);
  phy.overhead_us = 10;
  EXPECT_EQ(tx_duration(100, RuToneClass::Ru26, phy), 74);
  phy.overhead_us = 0;
  phy.guard_interval_ns = 800;  // 13.6 us symbols round up
  EXPECT_EQ(tx_duration(100, RuToneClass::Ru26, phy), 55);
  EXPECT_THROW(tx_duration(0, RuToneClass::Ru26, PhyProfile{}), std::invalid_argument);
}

TEST(Phy, RejectsBadProfiles) {
  PhyProfile phy;
  phy.mcs = 12;
  EXPECT_THROW(phy.validate(), std::invalid_argument);
  phy.mcs = 5;
  phy.guard_interval_ns = 400;
  EXPECT_THROW(phy.validate(), std::invalid_argument);
  EXPECT_THROW(channel_width_from_mhz(60), std::invalid_argument);
}

TEST(Phy, DefaultGridHoldsSevenSymbols) {
  EXPECT_EQ(default_grid_us(PhyProfile{}), 113);
  PhyProfile gi08;
  gi08.guard_interval_ns = 800;
  // 8 symbols of 13.6 us = 108.8 us -> 109, plus 1.
  EXPECT_EQ(default_grid_us(gi08), 110);
}

TEST(ConfigSpace, RelaxedCountsArePerClassMaxima) {
  const auto& s = ConfigSpace::catalog(ChannelWidth::MHz80);
  const auto maxc = max_ru_counts(ChannelWidth::MHz80);
  EXPECT_EQ(s.relaxed_counts(), maxc);
}

TEST(ConfigSpace, ProjectionsKeepFirstRepresentative) {
  const auto& s = ConfigSpace::catalog(ChannelWidth::MHz20);
  for (unsigned mask = 1; mask < 64; ++mask) {
    std::set<SuffixCounts> seen;
    for (const auto& p : s.projections(mask)) {
      EXPECT_TRUE(seen.insert(p.key).second);
      SuffixCounts key{};
      for (std::size_t k = 0; k < kNumToneClasses; ++k)
        if (mask & (1u << k)) key[k] = s.suffix(static_cast<std::size_t>(p.first))[k];
      EXPECT_EQ(key, p.key);
      for (int i = 0; i < p.first; ++i) {
        SuffixCounts other{};
        for (std::size_t k = 0; k < kNumToneClasses; ++k)
          if (mask & (1u << k)) other[k] = s.suffix(static_cast<std::size_t>(i))[k];
        EXPECT_NE(other, p.key);
      }
    }
  }
}
