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

// Line-oriented experiment configuration:
//
//   # comment
//   [experiment]
//   tag = table1
//   seeds = 0, 1, 2
//   [data]
//   bias_rate = 0.95
//   [train]
//   epochs = 30
//
// Every key is optional except experiment.tag; unknown keys are errors.

#ifndef GROBUST_CONFIG_H_
#define GROBUST_CONFIG_H_

#include <cstdint>
#include <string>
#include <vector>

#include "grobust/datasets.h"
#include "grobust/dro.h"

namespace grobust {

enum class ExperimentTag {
  kTable1,
  kAlphaSweep,
  kMixAblation,
  kNoiseSweep,
  kShiftEval
};

std::string ExperimentTagName(ExperimentTag tag);
ExperimentTag ParseExperimentTag(const std::string& name);

struct ExperimentSpec {
  ExperimentTag tag = ExperimentTag::kTable1;
  GeneratorSpec data;  // seed is replaced per run
  int test_per_class = 5000;
  std::string train_csv;  // optional external data instead of the generator
  std::string test_csv;
  TrainConfig train;  // method and seed are replaced per run
  std::vector<Method> methods;
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  std::vector<double> alphas = {1, 3, 5, 7, 9, 11, 13};
  std::vector<double> noise_rates = {0.0, 0.1, 0.2, 0.3};
  std::vector<Shift> shifts = {Shift::kAttrFlip, Shift::kAttrBalance,
                               Shift::kCoreOnly};
  std::string output_dir;

  void Validate() const;
};

// Methods run by each experiment when the config does not list any.
std::vector<Method> DefaultMethods(ExperimentTag tag);

// Throws ConfigError naming the key and line.
ExperimentSpec ParseConfigText(const std::string& text);
ExperimentSpec ParseConfig(const std::string& path);

// Emits every field; ParseConfigText(EmitConfig(s)) == s.
std::string EmitConfig(const ExperimentSpec& spec);

bool SameSpec(const ExperimentSpec& a, const ExperimentSpec& b);

}  // namespace grobust

#endif  // GROBUST_CONFIG_H_
