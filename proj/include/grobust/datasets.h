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

// Synthetic spurious-correlation data, label noise, shifted test sets and
// CSV input/output.
//
// Group ids follow g = attr * C + label throughout the library.

#ifndef GROBUST_DATASETS_H_
#define GROBUST_DATASETS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "grobust/assignment.h"

namespace grobust {

struct Dataset {
  Eigen::MatrixXd features;  // [n x d]
  std::vector<int> labels;
  std::optional<std::vector<int>> true_group;
  std::optional<std::vector<int>> spurious_attr;
  int num_classes = 2;
  int group_count = 0;  // m; 0 when no group labels are present

  std::size_t size() const { return labels.size(); }
  int dim() const { return static_cast<int>(features.cols()); }

  // Throws DataError when columns disagree or ids are out of range.
  void Validate() const;
};

struct GeneratorSpec {
  int n_per_class = 2000;
  int d_core = 5;
  int d_spurious = 50;
  double bias_rate = 0.95;
  double core_strength = 1.3;
  double spurious_strength = 10.0;
  double noise = 1.0;
  std::uint64_t seed = 0;

  void Validate() const;
};

// Two classes. Label 0 carries the spurious attribute with probability
// bias_rate, label 1 with probability 1 - bias_rate. Columns are the core
// block followed by the spurious block.
Dataset GenerateBiased(const GeneratorSpec& spec);

enum class Shift { kNone, kAttrFlip, kAttrBalance, kCoreOnly };

std::string ShiftName(Shift shift);
Shift ParseShift(const std::string& name);

Dataset ShiftTestset(const GeneratorSpec& spec, Shift shift);

// Each label is replaced, with probability flip_rate, by a uniformly chosen
// different class. Group ids are recomputed from the new labels.
Dataset InjectLabelNoise(const Dataset& data, double flip_rate,
                         std::uint64_t seed);

// Indices where the two label vectors differ.
std::vector<std::size_t> FlippedIndices(const Dataset& before,
                                        const Dataset& after);

struct CsvSchema {
  std::string label_column = "label";
  std::string group_column = "group";
  std::string attr_column = "attr";
  std::string feature_prefix = "feat_";
  int num_classes = 0;  // 0: one more than the largest label
  int group_count = 0;  // 0: derived from num_classes when groups exist
};

Dataset LoadCsv(const std::string& path, const CsvSchema& schema = {});
void WriteCsv(const Dataset& data, const std::string& path);

// counts[g][y]. Rows are true groups, or the two estimated sides when an
// assignment is supplied.
using ContingencyTable = std::vector<std::vector<std::size_t>>;
ContingencyTable GroupCounts(const Dataset& data,
                             const GroupAssignment* assignment = nullptr);

// True minority membership under the attr * C + label convention for the
// two-class generator: attribute and label agree.
std::vector<bool> TrueMinorityMask(const Dataset& data);

}  // namespace grobust

#endif  // GROBUST_DATASETS_H_
