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

#include "grobust/report.h"

#include <cmath>
#include <filesystem>

#include <gtest/gtest.h>

#include "grobust/error.h"

namespace grobust {
namespace {

std::vector<MetricsRow> SampleRows() {
  std::vector<MetricsRow> rows;
  for (int s = 0; s < 3; ++s) {
    MetricsRow r;
    r.method = "erm";
    r.seed = s;
    r.tag = "in_dist";
    r.average = 0.9 + 0.01 * s;
    r.robust = 0.1 * (s + 1);
    r.per_group = {0.95, r.robust, std::nan(""), 1.0 / 3.0};
    r.secs = 1.5;
    rows.push_back(r);
  }
  MetricsRow bad;
  bad.method = "qdiv";
  bad.seed = 1;
  bad.tag = "noise=0.1";
  bad.ok = false;
  bad.error = "non-finite parameters, at epoch 3";
  rows.push_back(bad);
  return rows;
}

void ExpectSameRows(const std::vector<MetricsRow>& a,
                    const std::vector<MetricsRow>& b) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].method, b[i].method);
    EXPECT_EQ(a[i].seed, b[i].seed);
    EXPECT_EQ(a[i].tag, b[i].tag);
    EXPECT_EQ(a[i].ok, b[i].ok);
    if (!a[i].ok) continue;
    EXPECT_EQ(a[i].average, b[i].average);
    EXPECT_EQ(a[i].robust, b[i].robust);
    ASSERT_EQ(a[i].per_group.size(), b[i].per_group.size());
    for (std::size_t g = 0; g < a[i].per_group.size(); ++g) {
      if (std::isnan(a[i].per_group[g])) {
        EXPECT_TRUE(std::isnan(b[i].per_group[g]));
      } else {
        EXPECT_EQ(a[i].per_group[g], b[i].per_group[g]);
      }
    }
  }
}

TEST(ReportTest, CsvRoundTripIsExact) {
  const auto rows = SampleRows();
  const std::string text = FormatMetricsCsv(rows);
  ExpectSameRows(rows, ParseMetricsCsv(text));
  EXPECT_EQ(FormatMetricsCsv(ParseMetricsCsv(text)), text);
  EXPECT_EQ(text.find("1.5"), std::string::npos);  // no timing column
}

TEST(ReportTest, JsonRoundTripIsExact) {
  const auto rows = SampleRows();
  ExpectSameRows(rows, ParseMetricsJson(FormatMetricsJson(rows)));
}

TEST(ReportTest, FailedRunsKeepTheirMessage) {
  const auto back = ParseMetricsCsv(FormatMetricsCsv(SampleRows()));
  EXPECT_FALSE(back[3].ok);
  EXPECT_NE(back[3].error.find("non-finite"), std::string::npos);
}

TEST(ReportTest, SummaryUsesMedianOverSuccessfulRuns) {
  const auto lines = Summarize(SampleRows());
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(lines[0].method, "erm");
  EXPECT_EQ(lines[0].succeeded, 3u);
  EXPECT_NEAR(lines[0].robust_median, 0.2, 1e-15);
  EXPECT_NEAR(lines[0].robust_min, 0.1, 1e-15);
  EXPECT_EQ(lines[1].succeeded, 0u);
  EXPECT_EQ(lines[1].total, 1u);
  const std::string md = FormatMarkdown(SampleRows());
  EXPECT_NE(md.find("| erm |"), std::string::npos);
  EXPECT_NE(md.find("0/1"), std::string::npos);
}

TEST(ReportTest, MedianOfEvenCountAveragesMiddle) {
  EXPECT_EQ(Median({4, 1, 3, 2}), 2.5);
  EXPECT_EQ(Median({5}), 5.0);
  EXPECT_TRUE(std::isnan(Median({})));
}

TEST(ReportTest, MalformedCsvIsRejected) {
  EXPECT_THROW(ParseMetricsCsv("a,b\n1,2\n"), DataError);
  EXPECT_THROW(ParseMetricsJson("{not json"), DataError);
}

TEST(ReportTest, FilesRoundTripThroughEveryFormat) {
  const auto dir = std::filesystem::temp_directory_path() / "grobust_report";
  std::filesystem::create_directories(dir);
  const auto rows = SampleRows();
  EmitReport(rows, ReportFormat::kCsv, (dir / "m.csv").string());
  EmitReport(rows, ReportFormat::kJson, (dir / "m.json").string());
  ExpectSameRows(rows, LoadReport((dir / "m.csv").string(), ReportFormat::kCsv));
  ExpectSameRows(rows, LoadReport((dir / "m.json").string(), ReportFormat::kJson));
  EXPECT_THROW(ReadTextFile((dir / "missing").string()), Error);
}

}  // namespace
}  // namespace grobust
