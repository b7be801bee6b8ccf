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

#include "grobust/datasets.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "grobust/error.h"
#include "grobust/random.h"

namespace grobust {
namespace {

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    if (!cell.empty() && cell.back() == '\r') cell.pop_back();
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string Trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

double ParseDouble(const std::string& cell, std::size_t row,
                   const std::string& column) {
  const std::string t = Trim(cell);
  double value = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw DataError("csv row " + std::to_string(row) + " column '" + column +
                    "': cannot parse '" + cell + "' as a number");
  }
  return value;
}

int ParseInt(const std::string& cell, std::size_t row,
             const std::string& column) {
  const std::string t = Trim(cell);
  int value = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw DataError("csv row " + std::to_string(row) + " column '" + column +
                    "': cannot parse '" + cell + "' as an integer");
  }
  return value;
}

}  // namespace

std::size_t GroupAssignment::MinorityCount() const {
  std::size_t count = 0;
  for (int h : hard) count += (h == kMinority);
  return count;
}

GroupAssignment AssignmentFromProbabilities(const Eigen::VectorXd& p_minority) {
  GroupAssignment out;
  out.p_minority = p_minority;
  out.hard.resize(static_cast<std::size_t>(p_minority.size()));
  for (Eigen::Index i = 0; i < p_minority.size(); ++i) {
    out.hard[static_cast<std::size_t>(i)] =
        p_minority(i) > 0.5 ? kMinority : kMajority;
  }
  return out;
}

void Dataset::Validate() const {
  const std::size_t n = labels.size();
  if (static_cast<std::size_t>(features.rows()) != n) {
    throw DataError("dataset has " + std::to_string(features.rows()) +
                    " feature rows but " + std::to_string(n) + " labels");
  }
  if (num_classes < 2) throw DataError("dataset needs at least 2 classes");
  for (int y : labels) {
    if (y < 0 || y >= num_classes) {
      throw DataError("label " + std::to_string(y) + " outside [0, " +
                      std::to_string(num_classes) + ")");
    }
  }
  if (true_group) {
    if (true_group->size() != n) throw DataError("group column length differs");
    for (int g : *true_group) {
      if (g < 0 || g >= group_count) {
        throw DataError("group " + std::to_string(g) + " outside [0, " +
                        std::to_string(group_count) + ")");
      }
    }
  }
  if (spurious_attr) {
    if (spurious_attr->size() != n) throw DataError("attr column length differs");
    for (std::size_t i = 0; i < n; ++i) {
      const int a = (*spurious_attr)[i];
      if (a != 0 && a != 1) throw DataError("attr values must be 0 or 1");
      if (true_group && (*true_group)[i] != a * num_classes + labels[i]) {
        throw DataError("row " + std::to_string(i) +
                        ": group != attr * C + label");
      }
    }
  }
}

void GeneratorSpec::Validate() const {
  if (n_per_class < 1) throw InvalidArgument("n_per_class must be >= 1");
  if (d_core < 1 || d_spurious < 1) {
    throw InvalidArgument("feature dimensions must be >= 1");
  }
  if (!(bias_rate >= 0.0 && bias_rate <= 1.0)) {
    throw InvalidArgument("bias_rate must lie in [0, 1]");
  }
  if (!(noise >= 0.0)) throw InvalidArgument("noise must be >= 0");
  if (!std::isfinite(core_strength) || !std::isfinite(spurious_strength)) {
    throw InvalidArgument("signal strengths must be finite");
  }
}

Dataset GenerateBiased(const GeneratorSpec& spec) {
  spec.Validate();
  const int n = 2 * spec.n_per_class;
  const int d = spec.d_core + spec.d_spurious;
  Rng rng = MakeRng(spec.seed, "generate");
  Dataset data;
  data.num_classes = 2;
  data.group_count = 4;
  data.features.resize(n, d);
  data.labels.resize(n);
  data.true_group = std::vector<int>(n);
  data.spurious_attr = std::vector<int>(n);
  const double core_mean = spec.core_strength / std::sqrt(spec.d_core);
  const double sp_mean = spec.spurious_strength / std::sqrt(spec.d_spurious);
  for (int i = 0; i < n; ++i) {
    const int y = i < spec.n_per_class ? 0 : 1;
    const double p_attr = y == 0 ? spec.bias_rate : 1.0 - spec.bias_rate;
    const int a = UniformUnit(rng) < p_attr ? 1 : 0;
    for (int k = 0; k < spec.d_core; ++k) {
      data.features(i, k) =
          (2 * y - 1) * core_mean + spec.noise * StandardNormal(rng);
    }
    for (int k = 0; k < spec.d_spurious; ++k) {
      data.features(i, spec.d_core + k) =
          (2 * a - 1) * sp_mean + spec.noise * StandardNormal(rng);
    }
    data.labels[i] = y;
    (*data.spurious_attr)[i] = a;
    (*data.true_group)[i] = a * 2 + y;
  }
  return data;
}

std::string ShiftName(Shift shift) {
  switch (shift) {
    case Shift::kNone:
      return "in_dist";
    case Shift::kAttrFlip:
      return "attr_flip";
    case Shift::kAttrBalance:
      return "attr_balance";
    case Shift::kCoreOnly:
      return "core_only";
  }
  return "unknown";
}

Shift ParseShift(const std::string& name) {
  if (name == "in_dist" || name == "none") return Shift::kNone;
  if (name == "attr_flip") return Shift::kAttrFlip;
  if (name == "attr_balance") return Shift::kAttrBalance;
  if (name == "core_only") return Shift::kCoreOnly;
  throw InvalidArgument("unknown shift '" + name +
                        "' (expected attr_flip, attr_balance or core_only)");
}

Dataset ShiftTestset(const GeneratorSpec& spec, Shift shift) {
  GeneratorSpec shifted = spec;
  switch (shift) {
    case Shift::kNone:
      return GenerateBiased(spec);
    case Shift::kAttrFlip:
      shifted.bias_rate = 1.0 - spec.bias_rate;
      return GenerateBiased(shifted);
    case Shift::kAttrBalance:
      shifted.bias_rate = 0.5;
      return GenerateBiased(shifted);
    case Shift::kCoreOnly: {
      Dataset data = GenerateBiased(spec);
      data.features.rightCols(spec.d_spurious).setZero();
      return data;
    }
  }
  throw InvalidArgument("unknown shift");
}

Dataset InjectLabelNoise(const Dataset& data, double flip_rate,
                         std::uint64_t seed) {
  if (!(flip_rate >= 0.0 && flip_rate <= 0.5)) {
    throw InvalidArgument("flip_rate must lie in [0, 0.5]");
  }
  Dataset out = data;
  if (flip_rate == 0.0) return out;
  Rng rng = MakeRng(seed, "label_noise");
  const int c = data.num_classes;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (UniformUnit(rng) >= flip_rate) continue;
    const int old = out.labels[i];
    int next = static_cast<int>(UniformIndex(rng, c - 1));
    if (next >= old) ++next;
    out.labels[i] = next;
    if (out.true_group) {
      const int attr = out.spurious_attr ? (*out.spurious_attr)[i]
                                         : (*out.true_group)[i] / c;
      (*out.true_group)[i] = attr * c + next;
    }
  }
  return out;
}

std::vector<std::size_t> FlippedIndices(const Dataset& before,
                                        const Dataset& after) {
  if (before.size() != after.size()) {
    throw DimensionError("FlippedIndices: datasets differ in size");
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < before.size(); ++i) {
    if (before.labels[i] != after.labels[i]) out.push_back(i);
  }
  return out;
}

Dataset LoadCsv(const std::string& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || Trim(line).empty()) {
    throw DataError("'" + path + "' is empty");
  }
  const std::vector<std::string> header = SplitCsvLine(line);
  std::vector<std::size_t> feature_cols;
  int label_col = -1, group_col = -1, attr_col = -1;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string name = Trim(header[c]);
    if (name == schema.label_column) {
      label_col = static_cast<int>(c);
    } else if (name == schema.group_column) {
      group_col = static_cast<int>(c);
    } else if (name == schema.attr_column) {
      attr_col = static_cast<int>(c);
    } else if (name.rfind(schema.feature_prefix, 0) == 0) {
      feature_cols.push_back(c);
    } else {
      throw DataError("'" + path + "': unknown column '" + name + "'");
    }
  }
  if (label_col < 0) {
    throw DataError("'" + path + "': missing column '" + schema.label_column +
                    "'");
  }
  if (feature_cols.empty()) {
    throw DataError("'" + path + "': no feature columns");
  }

  std::vector<std::vector<double>> rows;
  std::vector<int> labels, groups, attrs;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (Trim(line).empty()) continue;
    const std::vector<std::string> cells = SplitCsvLine(line);
    if (cells.size() != header.size()) {
      throw DataError("csv row " + std::to_string(row) + ": expected " +
                      std::to_string(header.size()) + " cells, got " +
                      std::to_string(cells.size()));
    }
    std::vector<double> feats;
    feats.reserve(feature_cols.size());
    for (std::size_t c : feature_cols) {
      feats.push_back(ParseDouble(cells[c], row, Trim(header[c])));
    }
    rows.push_back(std::move(feats));
    labels.push_back(ParseInt(cells[label_col], row, schema.label_column));
    if (group_col >= 0) {
      groups.push_back(ParseInt(cells[group_col], row, schema.group_column));
    }
    if (attr_col >= 0) {
      attrs.push_back(ParseInt(cells[attr_col], row, schema.attr_column));
    }
  }
  if (rows.empty()) throw DataError("'" + path + "' has no data rows");

  Dataset data;
  data.features.resize(static_cast<Eigen::Index>(rows.size()),
                       static_cast<Eigen::Index>(feature_cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t k = 0; k < rows[i].size(); ++k) {
      data.features(static_cast<Eigen::Index>(i),
                    static_cast<Eigen::Index>(k)) = rows[i][k];
    }
  }
  data.labels = std::move(labels);
  int max_label = 0;
  for (int y : data.labels) max_label = std::max(max_label, y);
  data.num_classes =
      schema.num_classes > 0 ? schema.num_classes : std::max(2, max_label + 1);
  if (group_col >= 0) {
    data.true_group = std::move(groups);
    int max_group = 0;
    for (int g : *data.true_group) max_group = std::max(max_group, g);
    data.group_count = schema.group_count > 0
                           ? schema.group_count
                           : std::max(2 * data.num_classes, max_group + 1);
  }
  if (attr_col >= 0) data.spurious_attr = std::move(attrs);
  data.Validate();
  return data;
}

void WriteCsv(const Dataset& data, const std::string& path) {
  data.Validate();
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw DataError("cannot write '" + path + "'");
  for (int k = 0; k < data.dim(); ++k) std::fprintf(f, "feat_%d,", k);
  std::fputs("label", f);
  if (data.true_group) std::fputs(",group", f);
  if (data.spurious_attr) std::fputs(",attr", f);
  std::fputc('\n', f);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    for (int k = 0; k < data.dim(); ++k) {
      std::fprintf(f, "%.17g,", data.features(r, k));
    }
    std::fprintf(f, "%d", data.labels[i]);
    if (data.true_group) std::fprintf(f, ",%d", (*data.true_group)[i]);
    if (data.spurious_attr) std::fprintf(f, ",%d", (*data.spurious_attr)[i]);
    std::fputc('\n', f);
  }
  if (std::fclose(f) != 0) throw DataError("error writing '" + path + "'");
}

ContingencyTable GroupCounts(const Dataset& data,
                             const GroupAssignment* assignment) {
  const std::size_t c = static_cast<std::size_t>(data.num_classes);
  if (assignment) {
    if (assignment->size() != data.size()) {
      throw DimensionError("GroupCounts: assignment size differs from data");
    }
    ContingencyTable table(2, std::vector<std::size_t>(c, 0));
    for (std::size_t i = 0; i < data.size(); ++i) {
      ++table[assignment->hard[i]][data.labels[i]];
    }
    return table;
  }
  if (!data.true_group) {
    throw DataError("GroupCounts: no group labels and no assignment");
  }
  ContingencyTable table(static_cast<std::size_t>(data.group_count),
                         std::vector<std::size_t>(c, 0));
  for (std::size_t i = 0; i < data.size(); ++i) {
    ++table[(*data.true_group)[i]][data.labels[i]];
  }
  return table;
}

std::vector<bool> TrueMinorityMask(const Dataset& data) {
  if (!data.true_group) throw DataError("TrueMinorityMask: no group labels");
  const ContingencyTable table = GroupCounts(data);
  const int c = data.num_classes;
  // Within each label, the attribute cell with fewer members is the minority.
  std::vector<bool> minority_group(table.size(), false);
  for (int y = 0; y < c; ++y) {
    std::size_t largest = 0;
    for (std::size_t g = 0; g < table.size(); ++g) {
      largest = std::max(largest, table[g][y]);
    }
    for (std::size_t g = 0; g < table.size(); ++g) {
      if (static_cast<int>(g) % c == y && table[g][y] < largest) {
        minority_group[g] = true;
      }
    }
  }
  std::vector<bool> out(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    out[i] = minority_group[(*data.true_group)[i]];
  }
  return out;
}

}  // namespace grobust
