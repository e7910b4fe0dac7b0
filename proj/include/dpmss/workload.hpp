// SPDX-License-Identifier: Apache-2.0
//
// Application profiles, factory use cases and job-set generation.

#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dpmss/ofdma.hpp"

namespace dpmss {

enum class ArrivalKind { Periodic, Poisson };

/// Payload size in bytes, either fixed (min == max) or uniform on [min, max].
struct SizeSpec {
  std::int64_t min_bytes = 1;
  std::int64_t max_bytes = 1;

  static SizeSpec fixed(std::int64_t b) { return {b, b}; }
  static SizeSpec uniform(std::int64_t lo, std::int64_t hi) { return {lo, hi}; }
  bool is_fixed() const { return min_bytes == max_bytes; }
};

struct ApplicationProfile {
  std::string name;
  /// Packets per second emitted by each station running this application.
  double gen_rate = 1.0;
  SizeSpec size{};
  double deadline_ms = 1.0;
  double profit = 1.0;
  int node_count = 1;
  ArrivalKind arrival = ArrivalKind::Periodic;

  Micros deadline_us() const { return static_cast<Micros>(std::llround(deadline_ms * 1000.0)); }

  void validate() const {
    if (!(gen_rate > 0.0) || !std::isfinite(gen_rate)) throw std::invalid_argument(name + ": gen_rate must be > 0");
    if (!(profit >= 0.0)) throw std::invalid_argument(name + ": profit must be >= 0");
    if (deadline_us() <= 0) throw std::invalid_argument(name + ": deadline must be > 0");
    if (node_count < 1) throw std::invalid_argument(name + ": node_count must be >= 1");
    if (size.min_bytes <= 0 || size.max_bytes < size.min_bytes)
      throw std::invalid_argument(name + ": bad size range");
  }
};

struct Job {
  int id = 0;
  int station = 0;
  int app = 0;
  Micros release = 0;
  Micros deadline = 0;  // absolute
  double profit = 0.0;
  std::int64_t size = 1;
  bool critical = false;

  friend bool operator==(const Job&, const Job&) = default;
};

/// Jobs plus the metadata needed to replay or score them. Job ids equal their
/// index in `jobs`.
struct JobSet {
  std::vector<Job> jobs;
  Micros horizon = 0;
  std::uint64_t seed = 0;
  std::vector<ApplicationProfile> apps;
  std::vector<int> station_app;

  double total_profit() const {
    double s = 0.0;
    for (const auto& j : jobs) s += j.profit;
    return s;
  }

  /// True when the profits are not all equal, i.e. "critical" singles out a subset.
  bool has_critical_breakdown() const {
    if (jobs.empty()) return false;
    for (const auto& j : jobs)
      if (j.profit != jobs.front().profit) return true;
    return false;
  }

  void validate() const {
    for (std::size_t k = 0; k < jobs.size(); ++k) {
      const auto& j = jobs[k];
      if (j.id != static_cast<int>(k)) throw std::invalid_argument("job ids must equal their index");
      if (j.release < 0 || j.release >= j.deadline)
        throw std::invalid_argument("job " + std::to_string(j.id) + ": release must precede deadline");
      if (j.size <= 0) throw std::invalid_argument("job " + std::to_string(j.id) + ": size must be positive");
      if (!(j.profit >= 0.0)) throw std::invalid_argument("job " + std::to_string(j.id) + ": negative profit");
    }
  }
};

enum class OffsetPolicy { Zero, Random };

struct StationOffsets {
  OffsetPolicy policy = OffsetPolicy::Zero;
  std::uint64_t seed = 0;
};

namespace detail {

/// Uniform double in [0, 1) from the top 53 bits; portable across standard libraries.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Uniform integer on [lo, hi] by rejection; portable across standard libraries.
inline std::int64_t uniform_int(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(rng());
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % span;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return lo + static_cast<std::int64_t>(x % span);
}

inline std::int64_t draw_size(const SizeSpec& s, std::mt19937_64& rng) {
  return s.is_fixed() ? s.min_bytes : uniform_int(rng, s.min_bytes, s.max_bytes);
}

inline void sort_and_number(std::vector<Job>& jobs) {
  std::stable_sort(jobs.begin(), jobs.end(), [](const Job& a, const Job& b) {
    if (a.release != b.release) return a.release < b.release;
    return a.station < b.station;
  });
  for (std::size_t k = 0; k < jobs.size(); ++k) jobs[k].id = static_cast<int>(k);
}

inline Job make_job(const ApplicationProfile& p, int app, int station, Micros release, Micros horizon,
                    std::int64_t size) {
  Job j;
  j.station = station;
  j.app = app;
  j.release = release;
  j.deadline = std::min(release + p.deadline_us(), horizon);
  j.profit = p.profit;
  j.size = size;
  return j;
}

}  // namespace detail

inline Micros period_us(const ApplicationProfile& p) {
  const double period = 1e6 / p.gen_rate;
  if (period < 1.0) throw std::invalid_argument(p.name + ": period below 1 us");
  return static_cast<Micros>(std::llround(period));
}

/// Periodic arrivals for every station of `profile`. Stations are numbered from
/// `first_station`; deadlines past the horizon are clipped to it. Sizes are drawn
/// from `rng` when the profile has a size range.
inline std::vector<Job> generate_periodic(const ApplicationProfile& profile, Micros horizon,
                                          StationOffsets offsets = {}, int first_station = 0, int app = 0,
                                          std::mt19937_64* size_rng = nullptr) {
  profile.validate();
  if (horizon <= 0) throw std::invalid_argument("horizon must be positive");
  const Micros period = period_us(profile);
  std::mt19937_64 offset_rng(offsets.seed ^ 0x9e3779b97f4a7c15ULL);
  std::mt19937_64 local_rng(offsets.seed);
  std::mt19937_64& rng = size_rng ? *size_rng : local_rng;
  std::vector<Job> jobs;
  for (int s = 0; s < profile.node_count; ++s) {
    Micros offset = 0;
    if (offsets.policy == OffsetPolicy::Random) offset = detail::uniform_int(offset_rng, 0, std::min(period, horizon) - 1);
    for (Micros t = offset; t < horizon; t += period) {
      jobs.push_back(detail::make_job(profile, app, first_station + s, t, horizon, detail::draw_size(profile.size, rng)));
    }
  }
  detail::sort_and_number(jobs);
  return jobs;
}

/// Poisson arrivals per station with mean inter-arrival 1e6/gen_rate us,
/// floored to the microsecond grid.
inline std::vector<Job> generate_poisson(const ApplicationProfile& profile, Micros horizon, std::uint64_t seed,
                                         int first_station = 0, int app = 0) {
  profile.validate();
  if (horizon <= 0) throw std::invalid_argument("horizon must be positive");
  std::mt19937_64 rng(seed);
  const double mean = 1e6 / profile.gen_rate;
  std::vector<Job> jobs;
  for (int s = 0; s < profile.node_count; ++s) {
    double t = 0.0;
    while (true) {
      t += -std::log1p(-detail::uniform01(rng)) * mean;
      if (!(t < static_cast<double>(horizon))) break;
      jobs.push_back(detail::make_job(profile, app, first_station + s, static_cast<Micros>(t), horizon,
                                      detail::draw_size(profile.size, rng)));
    }
  }
  detail::sort_and_number(jobs);
  return jobs;
}

enum class UseCase { UC1 = 1, UC2, UC3, UC4 };

inline std::string to_string(UseCase uc) { return "UC" + std::to_string(static_cast<int>(uc)); }

inline UseCase parse_use_case(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  s.erase(std::remove(s.begin(), s.end(), '-'), s.end());
  if (s == "UC1" || s == "1") return UseCase::UC1;
  if (s == "UC2" || s == "2") return UseCase::UC2;
  if (s == "UC3" || s == "3") return UseCase::UC3;
  if (s == "UC4" || s == "4") return UseCase::UC4;
  throw std::invalid_argument("unknown use case '" + s + "' (expected UC1..UC4)");
}

inline std::vector<ApplicationProfile> use_case_profiles(UseCase uc) {
  using A = ArrivalKind;
  switch (uc) {
    case UseCase::UC1:
      return {
          {"Profile 1", 4000, SizeSpec::uniform(64, 128), 0.25, 10, 10, A::Periodic},
          {"Profile 2", 2000, SizeSpec::uniform(128, 256), 0.5, 10, 10, A::Periodic},
          {"Profile 3", 1000, SizeSpec::uniform(256, 512), 1, 10, 10, A::Periodic},
          {"Profile 4", 500, SizeSpec::uniform(512, 1024), 2, 10, 10, A::Periodic},
          {"Profile 5", 250, SizeSpec::uniform(1024, 1522), 4, 10, 10, A::Periodic},
      };
    case UseCase::UC2:
      return {
          {"Smart meters", 1.25, SizeSpec::fixed(100), 16, 10, 15, A::Periodic},
          {"Status info", 2.5, SizeSpec::fixed(100), 16, 20, 15, A::Periodic},
          {"Reporting & logging", 0.75, SizeSpec::fixed(500), 1000, 30, 15, A::Periodic},
          {"Data polling", 1, SizeSpec::fixed(500), 16, 10, 15, A::Periodic},
          {"Control traffic", 937.5, SizeSpec::fixed(100), 16, 160, 20, A::Periodic},
          {"Video surveillance", 2000, SizeSpec::fixed(1500), 1000, 10, 10, A::Periodic},
      };
    case UseCase::UC3:
      // The table rate is per application; it is split evenly over the 10 nodes.
      return {
          {"Motion control", 40000.0 / 10, SizeSpec::fixed(50), 1, 30, 10, A::Poisson},
          {"Collaborative AGV", 40000.0 / 10, SizeSpec::fixed(50), 4, 20, 10, A::Poisson},
          {"Robotic control", 40000.0 / 10, SizeSpec::fixed(50), 10, 30, 10, A::Poisson},
          {"Asset/process monitoring", 40000.0 / 10, SizeSpec::fixed(50), 100, 5, 10, A::Poisson},
      };
    case UseCase::UC4:
      return {
          {"Size inspection by line camera", 1, SizeSpec::fixed(30000), 5000, 30, 3, A::Periodic},
          {"Detect defect state", 10, SizeSpec::fixed(500), 500, 50, 4, A::Periodic},
          {"Sensing for managing AC", 0.016, SizeSpec::fixed(64), 6000, 45, 1, A::Periodic},
          {"Preventive maintenance", 0.02, SizeSpec::fixed(30), 1000, 50, 2, A::Periodic},
          {"Monitoring of equipment", 1, SizeSpec::fixed(20), 1000, 30, 2, A::Periodic},
          {"Counting number of wrench operations", 0.016, SizeSpec::fixed(64), 100, 40, 10, A::Periodic},
          {"Movement analysis wireless beacon", 2, SizeSpec::fixed(4000), 4000, 10, 6, A::Periodic},
          {"Racking assets information", 1, SizeSpec::fixed(200), 1000, 15, 20, A::Periodic},
          {"Tracking parts, stock RFID tag", 0.028, SizeSpec::fixed(1000), 1000, 45, 10, A::Periodic},
          {"Techniques, knowhow from experts video", 50, SizeSpec::fixed(24000), 200000, 1, 1, A::Periodic},
      };
  }
  throw std::invalid_argument("unknown use case");
}

/// Smallest channel width that can carry the use case's offered load.
inline int minimum_bandwidth_mhz(UseCase uc) { return uc == UseCase::UC3 ? 160 : 20; }

/// Sets `critical` on every job whose profit equals the maximum profit of the set.
inline void mark_critical(JobSet& set) {
  double best = 0.0;
  for (const auto& a : set.apps) best = std::max(best, a.profit);
  for (const auto& j : set.jobs) best = std::max(best, j.profit);
  for (auto& j : set.jobs) j.critical = (j.profit == best);
}

/// Builds a job set from arbitrary profiles. Stations are numbered consecutively
/// in profile order.
inline JobSet build_job_set(const std::vector<ApplicationProfile>& apps, Micros horizon, std::uint64_t seed,
                            StationOffsets offsets = {}) {
  JobSet set;
  set.horizon = horizon;
  set.seed = seed;
  set.apps = apps;
  std::mt19937_64 size_rng(seed);
  std::vector<Job> all;
  int station = 0;
  for (std::size_t a = 0; a < apps.size(); ++a) {
    const auto& p = apps[a];
    std::vector<Job> part;
    if (p.arrival == ArrivalKind::Periodic) {
      StationOffsets o = offsets;
      o.seed = offsets.seed + a;
      part = generate_periodic(p, horizon, o, station, static_cast<int>(a), &size_rng);
    } else {
      part = generate_poisson(p, horizon, seed * 1000003ULL + a, station, static_cast<int>(a));
    }
    all.insert(all.end(), part.begin(), part.end());
    for (int s = 0; s < p.node_count; ++s) set.station_app.push_back(static_cast<int>(a));
    station += p.node_count;
  }
  detail::sort_and_number(all);
  set.jobs = std::move(all);
  mark_critical(set);
  return set;
}

inline JobSet load_use_case(UseCase uc, Micros horizon = 200000, std::uint64_t seed = 1, StationOffsets offsets = {}) {
  if (offsets.policy == OffsetPolicy::Random && offsets.seed == 0) offsets.seed = seed;
  return build_job_set(use_case_profiles(uc), horizon, seed, offsets);
}

// ---- jobs.txt ---------------------------------------------------------------

inline void write_jobs(std::ostream& os, const JobSet& set) {
  os << "# horizon_us " << set.horizon << "\n";
  os << "# seed " << set.seed << "\n";
  for (std::size_t a = 0; a < set.apps.size(); ++a) {
    const auto& p = set.apps[a];
    os << "# app " << a << " profit " << p.profit << " deadline_us " << p.deadline_us() << " name " << p.name << "\n";
  }
  for (std::size_t s = 0; s < set.station_app.size(); ++s) os << "# station " << s << " app " << set.station_app[s] << "\n";
  os << "# id station release_us deadline_us profit size_bytes critical\n";
  std::ostringstream line;
  line.precision(17);
  for (const auto& j : set.jobs) {
    line.str("");
    line << j.id << ' ' << j.station << ' ' << j.release << ' ' << j.deadline << ' ' << j.profit << ' ' << j.size << ' '
         << (j.critical ? 1 : 0) << '\n';
    os << line.str();
  }
}

inline JobSet read_jobs(std::istream& is) {
  JobSet set;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    if (line[0] == '#') {
      std::string hash, key;
      ss >> hash >> key;
      if (key == "horizon_us") {
        ss >> set.horizon;
      } else if (key == "seed") {
        ss >> set.seed;
      } else if (key == "app") {
        ApplicationProfile p;
        std::size_t idx = 0;
        std::string w;
        Micros dl = 0;
        ss >> idx >> w >> p.profit >> w >> dl >> w;
        std::getline(ss >> std::ws, p.name);
        p.deadline_ms = static_cast<double>(dl) / 1000.0;
        if (set.apps.size() <= idx) set.apps.resize(idx + 1);
        set.apps[idx] = p;
      } else if (key == "station") {
        std::size_t s = 0;
        std::string w;
        int a = 0;
        ss >> s >> w >> a;
        if (set.station_app.size() <= s) set.station_app.resize(s + 1, 0);
        set.station_app[s] = a;
      }
      continue;
    }
    Job j;
    int crit = 0;
    if (!(ss >> j.id >> j.station >> j.release >> j.deadline >> j.profit >> j.size >> crit))
      throw std::invalid_argument("jobs: malformed line " + std::to_string(lineno));
    j.critical = crit != 0;
    if (j.station >= 0 && static_cast<std::size_t>(j.station) < set.station_app.size())
      j.app = set.station_app[static_cast<std::size_t>(j.station)];
    set.jobs.push_back(j);
  }
  set.validate();
  return set;
}

inline void write_jobs_file(const std::string& path, const JobSet& set) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  write_jobs(os, set);
}

inline JobSet read_jobs_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path);
  return read_jobs(is);
}

}  // namespace dpmss
