// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dpmss/experiment.hpp"
#include "json.hpp"

using namespace dpmss;

namespace {

ExperimentConfig small(SchedulerKind k = SchedulerKind::Lsds) {
  ExperimentConfig c;
  c.use_case = UseCase::UC4;
  c.scheduler = k;
  c.horizon = 30000;
  return c;
}

std::string csv(const std::vector<MetricsRow>& rows) {
  std::ostringstream os;
  write_metrics_csv(os, rows);
  return os.str();
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("dpmss-test-" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST(Experiment, RefusesUc3BelowItsBandwidth) {
  ExperimentConfig c = small();
  c.use_case = UseCase::UC3;
  c.bandwidth_mhz = 40;
  try {
    c.validate();
    FAIL() << "expected refusal";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("--bandwidth 160"), std::string::npos);
  }
  c.force = true;
  EXPECT_NO_THROW(c.validate());
  c.force = false;
  c.bandwidth_mhz = 160;
  EXPECT_NO_THROW(c.validate());
}

TEST(Experiment, RejectsBadSettings) {
  auto c = small();
  c.reps = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = small();
  c.fixed_config = "3x242";
  EXPECT_NO_THROW(c.validate());  // parses; legality is the validator's concern
  c.fixed_config = "3y242";
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = small();
  c.slotted_ru = "1x242+2x106";
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = small();
  c.bandwidth_mhz = 30;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  EXPECT_THROW(parse_offsets("late"), std::invalid_argument);
}

TEST(Experiment, CsvRowFormat) {
  MetricsRow r{"UC4", "lsds", 40, "ideal", 3, 0.5, 12.25, std::nullopt, 1.5};
  EXPECT_EQ(csv_row(r), "UC4,lsds,40,ideal,3,0.500000,12.2500,NA,1.500");
  r.critical_drop_pct = 0.0;
  r.runtime_ms.reset();
  EXPECT_EQ(csv_row(r), "UC4,lsds,40,ideal,3,0.500000,12.2500,0.0000,NA");
  EXPECT_EQ(csv({}), std::string(kMetricsHeader) + "\n");
}

TEST(Experiment, SummaryUsesStudentT) {
  // Sample 1..5: mean 3, sd sqrt(2.5), t(0.975, 4) = 2.776445.
  const auto s = summarize("x", {1, 2, 3, 4, 5});
  EXPECT_EQ(s.n, 5u);
  EXPECT_DOUBLE_EQ(s.mean, 3.0);
  ASSERT_TRUE(s.ci95.has_value());
  EXPECT_NEAR(*s.ci95, 2.776445 * std::sqrt(2.5) / std::sqrt(5.0), 1e-5);
  EXPECT_FALSE(summarize("x", {4}).ci95.has_value());
  EXPECT_EQ(summarize("x", {}).n, 0u);
}

TEST(Experiment, RerunsAreByteIdenticalWithoutRuntime) {
  auto c = small(SchedulerKind::Lsds);
  c.record_runtime = false;
  c.reps = 2;
  const auto a = run_experiment(c);
  const auto b = run_experiment(c);
  EXPECT_EQ(csv(a.rows), csv(b.rows));
  EXPECT_EQ(csv(a.rows).find("NA\n") != std::string::npos, true);
  std::ostringstream sa, sb;
  write_schedule(sa, a.runs[0].report.schedule);
  write_schedule(sb, b.runs[0].report.schedule);
  EXPECT_EQ(sa.str(), sb.str());
}

TEST(Experiment, RepetitionsUseConsecutiveSeeds) {
  auto c = small(SchedulerKind::Edf);
  c.seed = 7;
  c.reps = 3;
  c.use_case = UseCase::UC1;
  const auto r = run_experiment(c);
  ASSERT_EQ(r.runs.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(r.runs[i].seed, 7 + i);
    EXPECT_EQ(r.rows[i].seed, 7 + i);
    EXPECT_EQ(r.runs[i].jobs.jobs, load_use_case(UseCase::UC1, c.horizon, 7 + i).jobs);
  }
  ASSERT_GE(r.summary.size(), 2u);
  EXPECT_EQ(r.summary[0].metric, "profit_ratio");
  EXPECT_EQ(r.summary[0].n, 3u);
}

TEST(Experiment, WritesArtifacts) {
  const auto dir = scratch("artifacts");
  auto c = small();
  c.be_load_mbps = 20;
  const auto res = run_experiment(c, dir);
  ASSERT_TRUE(res.clean());
  for (const char* f : {"jobs.txt", "schedule.txt", "report.json", "metrics.csv"})
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  const auto j = nlohmann::json::parse(slurp(dir / "report.json"));
  EXPECT_EQ(j["config"]["scheduler"], "lsds");
  EXPECT_EQ(j["config"]["grid_us"], 113);
  EXPECT_EQ(j["jobs"]["total"], res.runs[0].jobs.jobs.size());
  EXPECT_TRUE(j["violations"].empty());
  EXPECT_TRUE(j.contains("best_effort"));
  // The written artifacts replay: jobs and the combined schedule validate clean.
  const auto jobs = read_jobs_file((dir / "jobs.txt").string());
  EXPECT_EQ(jobs.jobs, res.runs[0].jobs.jobs);
  const auto& be = *res.runs[0].best_effort;
  std::ifstream ss(dir / "schedule.txt");
  const auto sched = read_schedule(ss, ChannelWidth::MHz40, be.jobs);
  EXPECT_EQ(sched.scheduled_jobs, be.schedule.scheduled_jobs);
  EXPECT_TRUE(validate_schedule(sched, be.jobs, ChannelWidth::MHz40, res.runs[0].report.phy, c.txop).empty());
  std::filesystem::remove_all(dir);
}

TEST(Experiment, SeedDirectoriesForRepetitions) {
  const auto dir = scratch("reps");
  auto c = small();
  c.reps = 2;
  c.record_runtime = false;
  run_experiment(c, dir);
  EXPECT_TRUE(std::filesystem::exists(dir / "seed-1" / "report.json"));
  EXPECT_TRUE(std::filesystem::exists(dir / "seed-2" / "schedule.txt"));
  const auto summary = slurp(dir / "summary.csv");
  EXPECT_EQ(summary.rfind("metric,n,mean,ci95\n", 0), 0u);
  const auto metrics = slurp(dir / "metrics.csv");
  EXPECT_EQ(std::count(metrics.begin(), metrics.end(), '\n'), 3);
  std::filesystem::remove_all(dir);
}

TEST(Experiment, CompareSharesOneWorkload) {
  std::vector<ExperimentConfig> cs;
  for (auto k : {SchedulerKind::Lsds, SchedulerKind::Edf, SchedulerKind::Lsdsf}) cs.push_back(small(k));
  const auto cmp = compare(cs);
  ASSERT_EQ(cmp.rows.size(), 3u);
  for (const auto& r : cmp.runs) EXPECT_EQ(r.jobs.jobs, cmp.runs[0].jobs.jobs);
  EXPECT_NE(cmp.table().find("lsdsf"), std::string::npos);
  cs[1].seed = 2;
  EXPECT_THROW(compare(cs), std::invalid_argument);
  EXPECT_THROW(compare({small()}), std::invalid_argument);
}

TEST(Experiment, StageErrorsAreNamed) {
  auto c = small(SchedulerKind::Lsds);
  c.txop = 50;  // shorter than one grid cell
  try {
    run_once(c, 1);
    FAIL() << "expected failure";
  } catch (const std::runtime_error& e) {
    EXPECT_EQ(std::string(e.what()).rfind("scheduler stage", 0), 0u);
  }
}

TEST(Experiment, WorkerCountHonoursEnvironment) {
  ::setenv("DPMSS_THREADS", "1", 1);
  EXPECT_EQ(worker_count(10), 1u);
  ::unsetenv("DPMSS_THREADS");
  EXPECT_GE(worker_count(10), 1u);
  EXPECT_EQ(worker_count(1), 1u);
}
