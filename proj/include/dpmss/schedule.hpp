// SPDX-License-Identifier: Apache-2.0
//
// Intervals, batches and schedules, plus the schedule.txt line format.

#pragma once

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dpmss/ofdma.hpp"
#include "dpmss/workload.hpp"

namespace dpmss {

/// Closed interval [start, end] in microseconds.
struct Interval {
  Micros start = 0;
  Micros end = 0;

  Micros length() const { return end - start; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Closed intervals conflict when they share any point, endpoints included.
inline bool conflicts(const Interval& a, const Interval& b) { return a.start <= b.end && b.start <= a.end; }

/// Job j may run on an RU needing `duration` inside `iv`.
inline bool admissible(const Job& j, Micros duration, const Interval& iv) {
  return j.release <= iv.start && iv.start + duration <= std::min(iv.end, j.deadline);
}

struct Assignment {
  int job = 0;
  int machine = 0;  // canonical index into the batch configuration's machine list
  friend bool operator==(const Assignment&, const Assignment&) = default;
};

/// One synchronized transmission. `config_id` indexes the catalog of the channel
/// width, or is -1 when `config` is an arbitrary RU multiset (a fixed machine
/// list that is only part of a legal configuration).
struct Batch {
  Interval interval;
  int config_id = -1;
  RuConfiguration config;
  std::vector<Assignment> assignments;

  double profit(const JobSet& jobs) const {
    double w = 0.0;
    for (const auto& a : assignments) w += jobs.jobs.at(static_cast<std::size_t>(a.job)).profit;
    return w;
  }
};

struct Schedule {
  std::vector<Batch> batches;
  std::vector<int> scheduled_jobs;
  double total_profit = 0.0;
};

/// Sorts batches by start and assignments by machine, then recomputes the job
/// set and total profit.
inline void finalize(Schedule& s, const JobSet& jobs) {
  std::sort(s.batches.begin(), s.batches.end(),
            [](const Batch& a, const Batch& b) { return a.interval.start < b.interval.start; });
  s.scheduled_jobs.clear();
  s.total_profit = 0.0;
  for (auto& b : s.batches) {
    std::sort(b.assignments.begin(), b.assignments.end(), [](const Assignment& x, const Assignment& y) {
      return x.machine != y.machine ? x.machine < y.machine : x.job < y.job;
    });
    for (const auto& a : b.assignments) s.scheduled_jobs.push_back(a.job);
  }
  std::sort(s.scheduled_jobs.begin(), s.scheduled_jobs.end());
  for (std::size_t i = 0; i < s.scheduled_jobs.size(); ++i)
    if (i == 0 || s.scheduled_jobs[i] != s.scheduled_jobs[i - 1])
      s.total_profit += jobs.jobs.at(static_cast<std::size_t>(s.scheduled_jobs[i])).profit;
}

// ---- schedule.txt -----------------------------------------------------------

inline void write_schedule(std::ostream& os, const Schedule& s) {
  os << "# batch_idx t1_us t2_us config_id job_id machine_id\n";
  for (std::size_t b = 0; b < s.batches.size(); ++b) {
    const auto& batch = s.batches[b];
    os << "# batch " << b << " config " << batch.config.to_string() << " width " << to_mhz(batch.config.channel_width)
       << "\n";
    for (const auto& a : batch.assignments) {
      os << b << ' ' << batch.interval.start << ' ' << batch.interval.end << ' ' << batch.config_id << ' ' << a.job << ' '
         << a.machine << '\n';
    }
  }
}

/// Reads schedule.txt. Configurations come from the "# batch" comment lines
/// when present, otherwise from the catalog of `width` by config id.
inline Schedule read_schedule(std::istream& is, ChannelWidth width, const JobSet& jobs) {
  Schedule s;
  std::map<std::size_t, RuConfiguration> declared;
  const auto& catalog = ConfigSpace::catalog(width);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    if (line[0] == '#') {
      std::string hash, key, cfg_word, cfg, width_word;
      std::size_t idx = 0;
      int mhz = to_mhz(width);
      ss >> hash >> key;
      if (key != "batch") continue;
      ss >> idx >> cfg_word >> cfg >> width_word >> mhz;
      declared[idx] = cfg == "empty" ? RuConfiguration{{}, channel_width_from_mhz(mhz)}
                                     : parse_configuration(cfg, channel_width_from_mhz(mhz));
      continue;
    }
    std::size_t b = 0;
    Interval iv;
    int config_id = -1;
    Assignment a;
    if (!(ss >> b >> iv.start >> iv.end >> config_id >> a.job >> a.machine))
      throw std::invalid_argument("schedule: malformed line " + std::to_string(lineno));
    if (s.batches.size() <= b) s.batches.resize(b + 1);
    auto& batch = s.batches[b];
    if (batch.assignments.empty()) {
      batch.interval = iv;
      batch.config_id = config_id;
      if (auto it = declared.find(b); it != declared.end()) {
        batch.config = it->second;
      } else if (config_id >= 0 && static_cast<std::size_t>(config_id) < catalog.size()) {
        batch.config = catalog[static_cast<std::size_t>(config_id)];
      } else {
        throw std::invalid_argument("schedule: batch " + std::to_string(b) + " has no configuration");
      }
    } else if (!(batch.interval == iv) || batch.config_id != config_id) {
      throw std::invalid_argument("schedule: inconsistent batch header on line " + std::to_string(lineno));
    }
    batch.assignments.push_back(a);
  }
  finalize(s, jobs);
  return s;
}

inline void write_schedule_file(const std::string& path, const Schedule& s) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  write_schedule(os, s);
}

}  // namespace dpmss
