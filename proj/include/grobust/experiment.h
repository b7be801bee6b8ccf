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

// Experiment orchestration: expands a spec into (configuration, seed) runs,
// trains, evaluates and collects metric rows.

#ifndef GROBUST_EXPERIMENT_H_
#define GROBUST_EXPERIMENT_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "grobust/config.h"
#include "grobust/datasets.h"
#include "grobust/dro.h"
#include "grobust/report.h"

namespace grobust {

struct RunPlan {
  std::string label;  // method column, e.g. "qdiv" or "qdiv_nomix"
  std::string tag;    // dataset / sweep column, e.g. "in_dist", "alpha=7"
  TrainConfig config;
  double flip_rate = 0.0;
  std::vector<Shift> eval_shifts;  // extra test sets (shift_eval)
};

std::vector<RunPlan> ExpandRuns(const ExperimentSpec& spec);

struct SeedData {
  Dataset train;
  Dataset test;
  GeneratorSpec test_spec;
};

// Generated (or loaded) train / test data for one seed. The test draw uses
// a seed derived from, but distinct from, the training seed.
SeedData MakeSeedData(const ExperimentSpec& spec, std::uint64_t seed);

std::string FormatTag(const std::string& key, double value);

using ProgressFn = std::function<void(const MetricsRow&)>;

// Failed runs become rows with ok = false; nothing is dropped.
std::vector<MetricsRow> RunExperiment(const ExperimentSpec& spec,
                                      const ProgressFn& progress = nullptr);

// Writes metrics.csv, metrics.json, summary.md and timing.csv into `dir`.
void WriteExperimentOutputs(const std::vector<MetricsRow>& rows,
                            const std::string& dir);

}  // namespace grobust

#endif  // GROBUST_EXPERIMENT_H_
