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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "grobust/error.h"

namespace grobust {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string Num(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string Pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", 100.0 * v);
  return buf;
}

std::string CleanMessage(std::string s) {
  for (char& ch : s) {
    if (ch == ',' || ch == '\n' || ch == '\r' || ch == '|') ch = ';';
  }
  return s;
}

std::vector<std::string> SplitCells(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

double CellDouble(const std::string& cell, std::size_t row) {
  if (cell.empty()) return kNaN;
  double v = 0.0;
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
    throw DataError("metrics row " + std::to_string(row) + ": bad number '" +
                    cell + "'");
  }
  return v;
}

std::size_t GroupColumns(const std::vector<MetricsRow>& rows) {
  std::size_t m = 0;
  for (const MetricsRow& r : rows) m = std::max(m, r.per_group.size());
  return m;
}

}  // namespace

std::string ReportFormatName(ReportFormat format) {
  switch (format) {
    case ReportFormat::kCsv:
      return "csv";
    case ReportFormat::kJson:
      return "json";
    case ReportFormat::kMarkdown:
      return "markdown";
  }
  return "unknown";
}

ReportFormat ParseReportFormat(const std::string& name) {
  if (name == "csv") return ReportFormat::kCsv;
  if (name == "json") return ReportFormat::kJson;
  if (name == "markdown" || name == "md") return ReportFormat::kMarkdown;
  throw InvalidArgument("unknown report format '" + name +
                        "' (expected csv, json or markdown)");
}

std::string FormatMetricsCsv(const std::vector<MetricsRow>& rows) {
  const std::size_t m = GroupColumns(rows);
  std::string out = "method,seed,tag,avg,robust";
  for (std::size_t g = 0; g < m; ++g) out += ",group_" + std::to_string(g);
  out += ",status\n";
  for (const MetricsRow& r : rows) {
    out += r.method + "," + std::to_string(r.seed) + "," + r.tag + ",";
    if (r.ok) {
      out += Num(r.average) + "," + Num(r.robust);
    } else {
      out += ",";
    }
    for (std::size_t g = 0; g < m; ++g) {
      out += ",";
      if (r.ok && g < r.per_group.size()) out += Num(r.per_group[g]);
    }
    out += r.ok ? ",ok\n" : ",error: " + CleanMessage(r.error) + "\n";
  }
  return out;
}

std::vector<MetricsRow> ParseMetricsCsv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw DataError("metrics csv is empty");
  const std::vector<std::string> header = SplitCells(line);
  if (header.size() < 6 || header[0] != "method" || header[1] != "seed" ||
      header[2] != "tag" || header[3] != "avg" || header[4] != "robust" ||
      header.back() != "status") {
    throw DataError("metrics csv has an unexpected header");
  }
  const std::size_t m = header.size() - 6;
  std::vector<MetricsRow> rows;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const std::vector<std::string> cells = SplitCells(line);
    if (cells.size() != header.size()) {
      throw DataError("metrics row " + std::to_string(row) +
                      ": wrong number of cells");
    }
    MetricsRow r;
    r.method = cells[0];
    const auto res = std::from_chars(cells[1].data(),
                                     cells[1].data() + cells[1].size(), r.seed);
    if (res.ec != std::errc()) {
      throw DataError("metrics row " + std::to_string(row) + ": bad seed");
    }
    r.tag = cells[2];
    const std::string& status = cells.back();
    r.ok = status == "ok";
    if (!r.ok) {
      const std::string prefix = "error: ";
      r.error = status.rfind(prefix, 0) == 0 ? status.substr(prefix.size())
                                              : status;
      rows.push_back(std::move(r));
      continue;
    }
    r.average = CellDouble(cells[3], row);
    r.robust = CellDouble(cells[4], row);
    for (std::size_t g = 0; g < m; ++g) {
      r.per_group.push_back(CellDouble(cells[5 + g], row));
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string FormatTimingCsv(const std::vector<MetricsRow>& rows) {
  std::string out = "method,seed,tag,secs\n";
  char buf[64];
  for (const MetricsRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.3f", r.secs);
    out += r.method + "," + std::to_string(r.seed) + "," + r.tag + "," + buf +
           "\n";
  }
  return out;
}

std::string FormatMetricsJson(const std::vector<MetricsRow>& rows) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const MetricsRow& r : rows) {
    nlohmann::ordered_json j;
    j["method"] = r.method;
    j["seed"] = r.seed;
    j["tag"] = r.tag;
    j["average"] = r.ok ? nlohmann::ordered_json(r.average)
                     : nlohmann::ordered_json(nullptr);
    j["robust"] = r.ok ? nlohmann::ordered_json(r.robust)
                    : nlohmann::ordered_json(nullptr);
    nlohmann::ordered_json groups = nlohmann::ordered_json::array();
    for (double v : r.per_group) {
      groups.push_back(std::isnan(v) ? nlohmann::ordered_json(nullptr)
                                     : nlohmann::ordered_json(v));
    }
    j["per_group"] = groups;
    j["secs"] = r.secs;
    j["ok"] = r.ok;
    j["error"] = r.error;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

std::vector<MetricsRow> ParseMetricsJson(const std::string& text) {
  std::vector<MetricsRow> rows;
  try {
    const nlohmann::json arr = nlohmann::json::parse(text);
    if (!arr.is_array()) throw DataError("metrics json must be an array");
    for (const auto& j : arr) {
      MetricsRow r;
      r.method = j.at("method").get<std::string>();
      r.seed = j.at("seed").get<std::uint64_t>();
      r.tag = j.at("tag").get<std::string>();
      r.ok = j.at("ok").get<bool>();
      r.error = j.value("error", std::string());
      r.secs = j.value("secs", 0.0);
      if (r.ok) {
        r.average = j.at("average").get<double>();
        r.robust = j.at("robust").get<double>();
      }
      for (const auto& v : j.at("per_group")) {
        r.per_group.push_back(v.is_null() ? kNaN : v.get<double>());
      }
      rows.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("metrics json: ") + e.what());
  }
  return rows;
}

double Median(std::vector<double> values) {
  if (values.empty()) return kNaN;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<SummaryLine> Summarize(const std::vector<MetricsRow>& rows) {
  std::vector<SummaryLine> out;
  std::vector<std::vector<double>> avgs, robs;
  std::map<std::pair<std::string, std::string>, std::size_t> index;
  for (const MetricsRow& r : rows) {
    const auto key = std::make_pair(r.method, r.tag);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, out.size()).first;
      SummaryLine line;
      line.method = r.method;
      line.tag = r.tag;
      out.push_back(line);
      avgs.emplace_back();
      robs.emplace_back();
    }
    SummaryLine& line = out[it->second];
    ++line.total;
    if (!r.ok) continue;
    ++line.succeeded;
    avgs[it->second].push_back(r.average);
    robs[it->second].push_back(r.robust);
  }
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (avgs[k].empty()) {
      out[k].average_median = out[k].average_min = out[k].average_max = kNaN;
      out[k].robust_median = out[k].robust_min = out[k].robust_max = kNaN;
      continue;
    }
    out[k].average_median = Median(avgs[k]);
    out[k].average_min = *std::min_element(avgs[k].begin(), avgs[k].end());
    out[k].average_max = *std::max_element(avgs[k].begin(), avgs[k].end());
    out[k].robust_median = Median(robs[k]);
    out[k].robust_min = *std::min_element(robs[k].begin(), robs[k].end());
    out[k].robust_max = *std::max_element(robs[k].begin(), robs[k].end());
  }
  return out;
}

std::string FormatMarkdown(const std::vector<MetricsRow>& rows) {
  std::string out =
      "| method | tag | runs ok | average % median (min-max) | robust % median "
      "(min-max) |\n|---|---|---|---|---|\n";
  for (const SummaryLine& s : Summarize(rows)) {
    out += "| " + s.method + " | " + s.tag + " | " +
           std::to_string(s.succeeded) + "/" + std::to_string(s.total) + " | ";
    if (s.succeeded == 0) {
      out += "n/a | n/a |\n";
      continue;
    }
    out += Pct(s.average_median) + " (" + Pct(s.average_min) + "-" +
           Pct(s.average_max) + ") | " + Pct(s.robust_median) + " (" +
           Pct(s.robust_min) + "-" + Pct(s.robust_max) + ") |\n";
  }
  bool header = false;
  for (const MetricsRow& r : rows) {
    if (r.ok) continue;
    if (!header) {
      out += "\nFailed runs:\n\n";
      header = true;
    }
    out += "- " + r.method + " seed " + std::to_string(r.seed) + " (" + r.tag +
           "): " + CleanMessage(r.error) + "\n";
  }
  return out;
}

void WriteTextFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << text;
  if (!out) throw DataError("error writing '" + path + "'");
}

std::string ReadTextFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void EmitReport(const std::vector<MetricsRow>& rows, ReportFormat format,
                const std::string& path) {
  if (rows.empty()) throw InvalidArgument("report needs at least one row");
  switch (format) {
    case ReportFormat::kCsv:
      WriteTextFile(path, FormatMetricsCsv(rows));
      return;
    case ReportFormat::kJson:
      WriteTextFile(path, FormatMetricsJson(rows));
      return;
    case ReportFormat::kMarkdown:
      WriteTextFile(path, FormatMarkdown(rows));
      return;
  }
}

std::vector<MetricsRow> LoadReport(const std::string& path,
                                   ReportFormat format) {
  const std::string text = ReadTextFile(path);
  switch (format) {
    case ReportFormat::kCsv:
      return ParseMetricsCsv(text);
    case ReportFormat::kJson:
      return ParseMetricsJson(text);
    case ReportFormat::kMarkdown:
      break;
  }
  throw InvalidArgument("markdown reports cannot be loaded");
}

}  // namespace grobust
