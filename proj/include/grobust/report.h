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

// Metric rows and their csv / json / markdown renderings.

#ifndef GROBUST_REPORT_H_
#define GROBUST_REPORT_H_

#include <cstdint>
#include <string>
#include <vector>

namespace grobust {

struct MetricsRow {
  std::string method;
  std::uint64_t seed = 0;
  std::string tag;
  double average = 0.0;
  double robust = 0.0;
  std::vector<double> per_group;  // NaN marks an empty group
  double secs = 0.0;
  bool ok = true;
  std::string error;
};

enum class ReportFormat { kCsv, kJson, kMarkdown };

std::string ReportFormatName(ReportFormat format);
ReportFormat ParseReportFormat(const std::string& name);

// Column order: method, seed, tag, avg, robust, group_0.., status. Wall
// clock is kept out of this file so reruns are byte-identical; see
// FormatTimingCsv.
std::string FormatMetricsCsv(const std::vector<MetricsRow>& rows);
std::vector<MetricsRow> ParseMetricsCsv(const std::string& text);

std::string FormatTimingCsv(const std::vector<MetricsRow>& rows);

std::string FormatMetricsJson(const std::vector<MetricsRow>& rows);
std::vector<MetricsRow> ParseMetricsJson(const std::string& text);

struct SummaryLine {
  std::string method;
  std::string tag;
  std::size_t succeeded = 0;
  std::size_t total = 0;
  double average_median = 0.0, average_min = 0.0, average_max = 0.0;
  double robust_median = 0.0, robust_min = 0.0, robust_max = 0.0;
};

// One line per (method, tag) in first-appearance order; statistics over
// successful runs only.
std::vector<SummaryLine> Summarize(const std::vector<MetricsRow>& rows);

double Median(std::vector<double> values);

// Markdown table of the summary plus the per-run failures, if any.
std::string FormatMarkdown(const std::vector<MetricsRow>& rows);

// Writes `rows` to `path` in the given format. Throws DataError when the
// file cannot be written.
void EmitReport(const std::vector<MetricsRow>& rows, ReportFormat format,
                const std::string& path);
std::vector<MetricsRow> LoadReport(const std::string& path,
                                   ReportFormat format);

void WriteTextFile(const std::string& path, const std::string& text);
std::string ReadTextFile(const std::string& path);

}  // namespace grobust

#endif  // GROBUST_REPORT_H_
