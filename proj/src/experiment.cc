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

#include <chrono>
#include <cstdio>
#include <filesystem>

#include "grobust/error.h"
#include "grobust/random.h"

namespace grobust {
namespace {

MetricsRow RowFromEval(const RunPlan& plan, std::uint64_t seed,
                       const std::string& tag, const EvalResult& ev) {
  MetricsRow row;
  row.method = plan.label;
  row.seed = seed;
  row.tag = tag;
  row.average = ev.average;
  row.robust = ev.robust;
  row.per_group = ev.per_group;
  return row;
}

}  // namespace

std::string FormatTag(const std::string& key, double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s=%g", key.c_str(), value);
  return buf;
}

std::vector<RunPlan> ExpandRuns(const ExperimentSpec& spec) {
  std::vector<RunPlan> plans;
  auto base = [&](Method method) {
    RunPlan plan;
    plan.label = MethodName(method);
    plan.tag = ShiftName(Shift::kNone);
    plan.config = spec.train;
    plan.config.method = method;
    return plan;
  };
  switch (spec.tag) {
    case ExperimentTag::kTable1:
      for (Method m : spec.methods) plans.push_back(base(m));
      break;
    case ExperimentTag::kShiftEval:
      for (Method m : spec.methods) {
        RunPlan plan = base(m);
        plan.eval_shifts = spec.shifts;
        plans.push_back(plan);
      }
      break;
    case ExperimentTag::kAlphaSweep:
      for (Method m : spec.methods) {
        for (double alpha : spec.alphas) {
          RunPlan plan = base(m);
          plan.config.mix.alpha = alpha;
          plan.tag = FormatTag("alpha", alpha);
          plans.push_back(plan);
        }
      }
      break;
    case ExperimentTag::kMixAblation:
      for (Method m : spec.methods) {
        plans.push_back(base(m));
        if (m == Method::kQDiversity) {
          RunPlan plan = base(m);
          plan.label = "qdiv_nomix";
          plan.config.mix.mix_fraction = 0.0;
          plans.push_back(plan);
        }
      }
      break;
    case ExperimentTag::kNoiseSweep:
      for (double rate : spec.noise_rates) {
        for (Method m : spec.methods) {
          RunPlan plan = base(m);
          plan.flip_rate = rate;
          plan.tag = FormatTag("noise", rate);
          plans.push_back(plan);
        }
      }
      break;
  }
  return plans;
}

SeedData MakeSeedData(const ExperimentSpec& spec, std::uint64_t seed) {
  SeedData out;
  if (!spec.train_csv.empty()) {
    out.train = LoadCsv(spec.train_csv);
    out.test = LoadCsv(spec.test_csv);
    out.test_spec = spec.data;
    return out;
  }
  GeneratorSpec train_spec = spec.data;
  train_spec.seed = seed;
  out.train = GenerateBiased(train_spec);
  out.test_spec = spec.data;
  out.test_spec.n_per_class = spec.test_per_class;
  out.test_spec.seed = DeriveSeed(seed, "test_split");
  out.test = GenerateBiased(out.test_spec);
  return out;
}

std::vector<MetricsRow> RunExperiment(const ExperimentSpec& spec,
                                      const ProgressFn& progress) {
  spec.Validate();
  const std::vector<RunPlan> plans = ExpandRuns(spec);
  std::vector<MetricsRow> rows;
  auto emit = [&](MetricsRow row) {
    if (progress) progress(row);
    rows.push_back(std::move(row));
  };
  for (std::uint64_t seed : spec.seeds) {
    SeedData data;
    std::string data_error;
    try {
      data = MakeSeedData(spec, seed);
    } catch (const std::exception& e) {
      data_error = e.what();
    }
    for (const RunPlan& plan : plans) {
      const auto start = std::chrono::steady_clock::now();
      std::vector<MetricsRow> produced;
      try {
        if (!data_error.empty()) throw DataError(data_error);
        TrainConfig cfg = plan.config;
        cfg.seed = seed;
        const Dataset train =
            plan.flip_rate > 0.0
                ? InjectLabelNoise(data.train, plan.flip_rate,
                                   DeriveSeed(seed, "label_noise"))
                : data.train;
        const TrainResult result = Train(train, cfg, TrainOptions{&data.test});
        produced.push_back(
            RowFromEval(plan, seed, plan.tag, Evaluate(result.theta, data.test)));
        for (Shift shift : plan.eval_shifts) {
          const Dataset shifted = ShiftTestset(data.test_spec, shift);
          produced.push_back(RowFromEval(plan, seed, ShiftName(shift),
                                         Evaluate(result.theta, shifted)));
        }
      } catch (const std::exception& e) {
        produced.clear();
        MetricsRow row;
        row.method = plan.label;
        row.seed = seed;
        row.tag = plan.tag;
        row.ok = false;
        row.error = e.what();
        produced.push_back(row);
      }
      const double secs = std::chrono::duration<double>(
                              std::chrono::steady_clock::now() - start)
                              .count();
      for (MetricsRow& row : produced) {
        row.secs = secs;
        emit(std::move(row));
      }
    }
  }
  return rows;
}

void WriteExperimentOutputs(const std::vector<MetricsRow>& rows,
                            const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DataError("cannot create '" + dir + "': " + ec.message());
  const std::filesystem::path base(dir);
  EmitReport(rows, ReportFormat::kCsv, (base / "metrics.csv").string());
  EmitReport(rows, ReportFormat::kJson, (base / "metrics.json").string());
  EmitReport(rows, ReportFormat::kMarkdown, (base / "summary.md").string());
  WriteTextFile((base / "timing.csv").string(), FormatTimingCsv(rows));
}

}  // namespace grobust
