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

// grobust command line: generate | train | evaluate | experiment | report.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "grobust/config.h"
#include "grobust/datasets.h"
#include "grobust/dro.h"
#include "grobust/error.h"
#include "grobust/experiment.h"
#include "grobust/margin.h"
#include "grobust/model_io.h"
#include "grobust/report.h"

namespace fs = std::filesystem;
using namespace grobust;

namespace {

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string method;
  std::string model;
  std::string data;
  std::string train_csv;
  std::string input;
  std::string format = "markdown";
};

void EnsureDir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create '" + dir + "': " + ec.message());
}

std::string FormatEval(const EvalResult& ev) {
  std::string out = "avg " + std::to_string(ev.average) + " robust " +
                    std::to_string(ev.robust) + " groups";
  for (double g : ev.per_group) out += " " + std::to_string(g);
  return out;
}

int RunGenerate(const Options& opt) {
  const ExperimentSpec spec = ParseConfig(opt.config);
  const std::uint64_t seed = opt.seed.value_or(spec.seeds.front());
  EnsureDir(opt.out);
  const SeedData data = MakeSeedData(spec, seed);
  const fs::path base(opt.out);
  WriteCsv(data.train, (base / "train.csv").string());
  WriteCsv(data.test, (base / "test.csv").string());
  for (Shift shift : spec.shifts) {
    WriteCsv(ShiftTestset(data.test_spec, shift),
             (base / ("test_" + ShiftName(shift) + ".csv")).string());
  }
  std::printf("wrote %zu train and %zu test rows to %s\n", data.train.size(),
              data.test.size(), opt.out.c_str());
  return 0;
}

int RunTrain(const Options& opt) {
  const ExperimentSpec spec = ParseConfig(opt.config);
  TrainConfig cfg = spec.train;
  cfg.method = opt.method.empty() ? spec.methods.front() : ParseMethod(opt.method);
  cfg.seed = opt.seed.value_or(spec.seeds.front());
  std::optional<SeedData> generated;
  Dataset train;
  if (!opt.train_csv.empty()) {
    train = LoadCsv(opt.train_csv);
  } else {
    generated = MakeSeedData(spec, cfg.seed);
    train = generated->train;
  }
  TrainOptions options;
  if (generated) options.monitor = &generated->test;
  const TrainResult result = Train(train, cfg, options);
  EnsureDir(opt.out);
  const fs::path base(opt.out);
  SaveModel(result.theta, (base / "model.txt").string());
  if (result.phi) SaveModel(*result.phi, (base / "assigner.txt").string());

  std::string history = "epoch,avg,robust,group_losses,q\n";
  for (const EpochRecord& rec : result.history) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,", rec.epoch,
                  rec.average_accuracy, rec.robust_accuracy);
    history += buf;
    for (Eigen::Index g = 0; g < rec.group_losses.size(); ++g) {
      std::snprintf(buf, sizeof(buf), "%s%.17g", g ? " " : "",
                    rec.group_losses(g));
      history += buf;
    }
    history += ",";
    for (Eigen::Index g = 0; g < rec.q.size(); ++g) {
      std::snprintf(buf, sizeof(buf), "%s%.17g", g ? " " : "", rec.q(g));
      history += buf;
    }
    history += "\n";
  }
  WriteTextFile((base / "history.csv").string(), history);
  for (const std::string& line : result.log) std::printf("%s\n", line.c_str());
  if (generated) {
    std::printf("%s seed %llu test: %s\n", MethodName(cfg.method).c_str(),
                static_cast<unsigned long long>(cfg.seed),
                FormatEval(Evaluate(result.theta, generated->test)).c_str());
  }
  return 0;
}

int RunEvaluate(const Options& opt) {
  const Model theta = LoadModel(opt.model);
  const Dataset data = LoadCsv(opt.data);
  const EvalResult ev = Evaluate(theta, data);
  std::printf("%s\n", FormatEval(ev).c_str());
  if (theta.architecture() == Architecture::kLinear) {
    const MarginProbeResult probe = MarginProbe(theta, data);
    std::printf("margin majority %.6f minority %.6f\n", probe.majority,
                probe.minority);
  }
  if (!opt.out.empty()) {
    MetricsRow row;
    row.method = fs::path(opt.model).stem().string();
    row.tag = fs::path(opt.data).stem().string();
    row.average = ev.average;
    row.robust = ev.robust;
    row.per_group = ev.per_group;
    EmitReport({row}, ReportFormat::kCsv, opt.out);
  }
  return 0;
}

int RunExperimentVerb(const Options& opt) {
  ExperimentSpec spec = ParseConfig(opt.config);
  if (opt.seed) spec.seeds = {*opt.seed};
  if (!opt.method.empty()) spec.methods = {ParseMethod(opt.method)};
  const std::string out = opt.out.empty() ? spec.output_dir : opt.out;
  if (out.empty()) {
    throw ConfigError("output", 0, "no output directory (use --out)");
  }
  const std::vector<MetricsRow> rows =
      RunExperiment(spec, [](const MetricsRow& row) {
        if (row.ok) {
          std::fprintf(stderr, "%-12s seed %-3llu %-14s avg %.3f robust %.3f (%.1fs)\n",
                       row.method.c_str(),
                       static_cast<unsigned long long>(row.seed),
                       row.tag.c_str(), row.average, row.robust, row.secs);
        } else {
          std::fprintf(stderr, "%-12s seed %-3llu %-14s FAILED: %s\n",
                       row.method.c_str(),
                       static_cast<unsigned long long>(row.seed),
                       row.tag.c_str(), row.error.c_str());
        }
      });
  WriteExperimentOutputs(rows, out);
  std::printf("%s", FormatMarkdown(rows).c_str());
  for (const MetricsRow& row : rows) {
    if (!row.ok) return 1;
  }
  return 0;
}

int RunReport(const Options& opt) {
  const std::string ext = fs::path(opt.input).extension().string();
  const ReportFormat in_format =
      ext == ".json" ? ReportFormat::kJson : ReportFormat::kCsv;
  const std::vector<MetricsRow> rows = LoadReport(opt.input, in_format);
  const ReportFormat out_format = ParseReportFormat(opt.format);
  if (opt.out.empty()) {
    switch (out_format) {
      case ReportFormat::kCsv:
        std::printf("%s", FormatMetricsCsv(rows).c_str());
        break;
      case ReportFormat::kJson:
        std::printf("%s", FormatMetricsJson(rows).c_str());
        break;
      case ReportFormat::kMarkdown:
        std::printf("%s", FormatMarkdown(rows).c_str());
        break;
    }
  } else {
    EmitReport(rows, out_format, opt.out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Group-robust training experiments on synthetic data"};
  app.require_subcommand(1);
  Options opt;

  auto add_seed = [&](CLI::App* sub) {
    sub->add_option_function<std::uint64_t>(
        "--seed", [&](const std::uint64_t& s) { opt.seed = s; },
        "Run seed (overrides the config)");
  };

  CLI::App* generate = app.add_subcommand("generate", "Write train/test CSVs");
  generate->add_option("--config", opt.config, "Config file")->required();
  generate->add_option("--out", opt.out, "Output directory")->required();
  add_seed(generate);

  CLI::App* train = app.add_subcommand("train", "Train one model");
  train->add_option("--config", opt.config, "Config file")->required();
  train->add_option("--out", opt.out, "Output directory")->required();
  train->add_option("--method", opt.method,
                    "erm, oracle_dro, cvar, jtt or qdiv");
  train->add_option("--train", opt.train_csv, "Training CSV instead of the generator");
  add_seed(train);

  CLI::App* evaluate = app.add_subcommand("evaluate", "Evaluate a saved model");
  evaluate->add_option("--model", opt.model, "Model file")->required();
  evaluate->add_option("--data", opt.data, "CSV with group column")->required();
  evaluate->add_option("--out", opt.out, "Optional metrics CSV");

  CLI::App* experiment =
      app.add_subcommand("experiment", "Run a configured experiment");
  experiment->add_option("--config", opt.config, "Config file")->required();
  experiment->add_option("--out", opt.out, "Output directory");
  experiment->add_option("--method", opt.method, "Restrict to one method");
  add_seed(experiment);

  CLI::App* report = app.add_subcommand("report", "Convert a metrics file");
  report->add_option("--in", opt.input, "metrics .csv or .json")->required();
  report->add_option("--format", opt.format, "csv, json or markdown");
  report->add_option("--out", opt.out, "Output file (stdout if omitted)");

  CLI11_PARSE(app, argc, argv);
  try {
    if (generate->parsed()) return RunGenerate(opt);
    if (train->parsed()) return RunTrain(opt);
    if (evaluate->parsed()) return RunEvaluate(opt);
    if (experiment->parsed()) return RunExperimentVerb(opt);
    if (report->parsed()) return RunReport(opt);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
