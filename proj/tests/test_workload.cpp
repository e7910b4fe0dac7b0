// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "dpmss/workload.hpp"

using namespace dpmss;

TEST(Workload, ControlTrafficJobsPerStation) {
  const auto set = load_use_case(UseCase::UC2, 200000, 1);
  // 937.5 packets/s -> 1066.67 us, rounded to 1067 us; arrivals at 0, 1067, ... below 200 ms.
  const Micros period = 1067;
  const int expected = static_cast<int>((200000 + period - 1) / period);
  ASSERT_EQ(expected, 188);
  std::map<int, int> per_station;
  for (const auto& j : set.jobs)
    if (set.apps[static_cast<std::size_t>(j.app)].name == "Control traffic") ++per_station[j.station];
  ASSERT_EQ(per_station.size(), 20u);
  for (const auto& [s, n] : per_station) EXPECT_EQ(n, expected) << "station " << s;
}

TEST(Workload, PeriodicReleasesFollowThePeriod) {
  ApplicationProfile p{"p", 1000, SizeSpec::fixed(100), 0.5, 3, 2, ArrivalKind::Periodic};
  const auto jobs = generate_periodic(p, 10000, {}, 5, 0);
  ASSERT_EQ(jobs.size(), 20u);
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    EXPECT_EQ(jobs[k].id, static_cast<int>(k));
    EXPECT_EQ(jobs[k].release, static_cast<Micros>(k / 2) * 1000);
    EXPECT_EQ(jobs[k].station, 5 + static_cast<int>(k % 2));
    EXPECT_EQ(jobs[k].deadline, jobs[k].release + 500);
    EXPECT_EQ(jobs[k].profit, 3.0);
  }
}

TEST(Workload, DeadlinesClipToHorizon) {
  ApplicationProfile p{"p", 100, SizeSpec::fixed(100), 50, 1, 1, ArrivalKind::Periodic};
  const auto jobs = generate_periodic(p, 25000, {}, 0, 0);
  ASSERT_EQ(jobs.size(), 3u);
  for (const auto& j : jobs) EXPECT_EQ(j.deadline, 25000);
}

TEST(Workload, RandomOffsetsStayInsideOnePeriod) {
  ApplicationProfile p{"p", 500, SizeSpec::fixed(10), 1, 1, 50, ArrivalKind::Periodic};
  const auto jobs = generate_periodic(p, 20000, StationOffsets{OffsetPolicy::Random, 7}, 0, 0);
  std::map<int, Micros> first;
  for (const auto& j : jobs)
    if (!first.count(j.station)) first[j.station] = j.release;
  ASSERT_EQ(first.size(), 50u);
  std::set<Micros> distinct;
  for (const auto& [s, r] : first) {
    EXPECT_GE(r, 0);
    EXPECT_LT(r, 2000);
    distinct.insert(r);
  }
  EXPECT_GT(distinct.size(), 1u);
}

TEST(Workload, UniformSizesStayInRange) {
  const auto set = load_use_case(UseCase::UC1, 20000, 3);
  for (const auto& j : set.jobs) {
    const auto& s = set.apps[static_cast<std::size_t>(j.app)].size;
    EXPECT_GE(j.size, s.min_bytes);
    EXPECT_LE(j.size, s.max_bytes);
  }
}

TEST(Workload, PoissonCountMatchesRate) {
  const auto set = load_use_case(UseCase::UC3, 200000, 1);
  // 40 stations at 4000 packets/s for 0.2 s: mean 32000, sd ~179.
  const double n = static_cast<double>(set.jobs.size());
  EXPECT_NEAR(n, 32000.0, 5 * std::sqrt(32000.0));
  for (const auto& j : set.jobs) {
    EXPECT_GE(j.release, 0);
    EXPECT_LT(j.release, 200000);
  }
}

TEST(Workload, SeedsAreDeterministic) {
  for (auto uc : {UseCase::UC1, UseCase::UC3}) {
    const auto a = load_use_case(uc, 20000, 11);
    const auto b = load_use_case(uc, 20000, 11);
    const auto c = load_use_case(uc, 20000, 12);
    EXPECT_EQ(a.jobs, b.jobs);
    EXPECT_NE(a.jobs, c.jobs);
  }
}

TEST(Workload, IdsFollowReleaseOrder) {
  const auto set = load_use_case(UseCase::UC4, 200000, 1);
  ASSERT_NO_THROW(set.validate());
  for (std::size_t k = 1; k < set.jobs.size(); ++k) {
    const auto& a = set.jobs[k - 1];
    const auto& b = set.jobs[k];
    EXPECT_TRUE(a.release < b.release || (a.release == b.release && a.station <= b.station));
  }
}

TEST(Workload, CriticalMeansHighestProfit) {
  const auto uc2 = load_use_case(UseCase::UC2, 20000, 1);
  EXPECT_TRUE(uc2.has_critical_breakdown());
  for (const auto& j : uc2.jobs) EXPECT_EQ(j.critical, j.profit == 160.0);
  const auto uc4 = load_use_case(UseCase::UC4, 200000, 1);
  int critical = 0;
  for (const auto& j : uc4.jobs) {
    EXPECT_EQ(j.critical, j.profit == 50.0);
    critical += j.critical;
  }
  EXPECT_GT(critical, 0);
}

TEST(Workload, StationsNumberedPerProfile) {
  const auto set = load_use_case(UseCase::UC4, 1000, 1);
  int total = 0;
  for (const auto& a : set.apps) total += a.node_count;
  ASSERT_EQ(static_cast<int>(set.station_app.size()), total);
  for (const auto& j : set.jobs) EXPECT_EQ(set.station_app[static_cast<std::size_t>(j.station)], j.app);
}

TEST(Workload, MinimumBandwidth) {
  EXPECT_EQ(minimum_bandwidth_mhz(UseCase::UC3), 160);
  EXPECT_EQ(minimum_bandwidth_mhz(UseCase::UC1), 20);
  EXPECT_EQ(parse_use_case("uc-2"), UseCase::UC2);
  EXPECT_THROW(parse_use_case("UC5"), std::invalid_argument);
}

TEST(Workload, JobsFileRoundTrip) {
  const auto set = load_use_case(UseCase::UC1, 5000, 2);
  std::stringstream ss;
  write_jobs(ss, set);
  const auto back = read_jobs(ss);
  EXPECT_EQ(back.jobs, set.jobs);
  EXPECT_EQ(back.horizon, set.horizon);
  EXPECT_EQ(back.seed, set.seed);
}

TEST(Workload, RejectsBadProfiles) {
  ApplicationProfile p{"bad", 0, SizeSpec::fixed(1), 1, 1, 1, ArrivalKind::Periodic};
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p.gen_rate = 1;
  p.size = SizeSpec::uniform(10, 5);
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p.size = SizeSpec::fixed(1);
  p.node_count = 0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}
