// Copyright 2026 The grobust Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "grobust/experiment.h"

#include <filesystem>

#include <gtest/gtest.h>

#include "grobust/config.h"
#include "grobust/report.h"

namespace grobust {
namespace {

ExperimentSpec TinySpec(const std::string& tag) {
  return ParseConfigText("[experiment]\ntag = " + tag +
                         "\nmethods = erm, qdiv\nseeds = 0, 1\n"
                         "alphas = 3, 9\nnoise_rates = 0, 0.2\n"
                         "[data]\nn_per_class = 60\nd_spurious = 5\n"
                         "test_per_class = 40\n[train]\nepochs = 3\n");
}

TEST(ExpandRunsTest, OneRunPerMethodAndSweepValue) {
  EXPECT_EQ(ExpandRuns(TinySpec("table1")).size(), 2u);
  const auto alpha = ExpandRuns(TinySpec("alpha_sweep"));
  ASSERT_EQ(alpha.size(), 4u);
  EXPECT_EQ(alpha[1].tag, "alpha=9");
  EXPECT_EQ(alpha[1].config.mix.alpha, 9.0);
  const auto noise = ExpandRuns(TinySpec("noise_sweep"));
  ASSERT_EQ(noise.size(), 4u);
  EXPECT_EQ(noise[3].flip_rate, 0.2);
  EXPECT_EQ(noise[3].tag, "noise=0.2");
  const auto ablation = ExpandRuns(TinySpec("mix_ablation"));
  ASSERT_EQ(ablation.size(), 3u);
  EXPECT_EQ(ablation[2].label, "qdiv_nomix");
  EXPECT_EQ(ablation[2].config.mix.mix_fraction, 0.0);
  const auto shift = ExpandRuns(TinySpec("shift_eval"));
  EXPECT_EQ(shift[0].eval_shifts.size(), 3u);
}

TEST(SeedDataTest, TestSetIsDisjointDraw) {
  const ExperimentSpec spec = TinySpec("table1");
  const SeedData a = MakeSeedData(spec, 0);
  EXPECT_EQ(a.train.size(), 120u);
  EXPECT_EQ(a.test.size(), 80u);
  EXPECT_NE(a.train.features.row(0), a.test.features.row(0));
  const SeedData b = MakeSeedData(spec, 0);
  EXPECT_EQ(a.test.features, b.test.features);
}

TEST(RunExperimentTest, RowsCoverEveryRunAndAreDeterministic) {
  const ExperimentSpec spec = TinySpec("shift_eval");
  const auto rows = RunExperiment(spec);
  // 2 methods x 2 seeds x (in_dist + 3 shifts).
  EXPECT_EQ(rows.size(), 16u);
  for (const MetricsRow& r : rows) EXPECT_TRUE(r.ok) << r.error;
  EXPECT_EQ(FormatMetricsCsv(rows), FormatMetricsCsv(RunExperiment(spec)));
}

TEST(RunExperimentTest, FailingRunBecomesErrorRow) {
  ExperimentSpec spec = TinySpec("table1");
  spec.train.lr = 1e300;
  const auto rows = RunExperiment(spec);
  ASSERT_EQ(rows.size(), 4u);
  for (const MetricsRow& r : rows) {
    EXPECT_FALSE(r.ok);
    EXPECT_FALSE(r.error.empty());
  }
}

TEST(RunExperimentTest, OutputsAreWritten) {
  const auto dir = std::filesystem::temp_directory_path() / "grobust_exp";
  std::filesystem::remove_all(dir);
  WriteExperimentOutputs(RunExperiment(TinySpec("table1")), dir.string());
  for (const char* f : {"metrics.csv", "metrics.json", "summary.md", "timing.csv"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  }
}

}  // namespace
}  // namespace grobust
