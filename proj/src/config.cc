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

#include "grobust/config.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "grobust/error.h"

namespace grobust {
namespace {

std::string Trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> SplitList(const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) {
    item = Trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string FormatDouble(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct Context {
  std::string key;
  int line;
};

double ToDouble(const std::string& s, const Context& ctx) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size() ||
      !std::isfinite(v)) {
    throw ConfigError(ctx.key, ctx.line, "expected a number, got '" + s + "'");
  }
  return v;
}

long long ToInt(const std::string& s, const Context& ctx) {
  long long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ConfigError(ctx.key, ctx.line,
                      "expected an integer, got '" + s + "'");
  }
  return v;
}

std::uint64_t ToSeed(const std::string& s, const Context& ctx) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ConfigError(ctx.key, ctx.line,
                      "expected a nonnegative integer, got '" + s + "'");
  }
  return v;
}

template <typename T, typename Parse>
T ParseEnum(const std::string& s, const Context& ctx, Parse parse) {
  try {
    return parse(s);
  } catch (const InvalidArgument& e) {
    throw ConfigError(ctx.key, ctx.line, e.what());
  }
}

void Range(bool ok, const Context& ctx, const std::string& what) {
  if (!ok) throw ConfigError(ctx.key, ctx.line, "out of range: " + what);
}

using Setter = std::function<void(ExperimentSpec&, const std::string&,
                                  const Context&)>;
using Getter = std::function<std::string(const ExperimentSpec&)>;

struct Field {
  std::string section;
  std::string key;
  Setter set;
  Getter get;
};

template <typename T>
std::string JoinWith(const std::vector<T>& items,
                     const std::function<std::string(const T&)>& fmt) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    out += fmt(items[i]);
  }
  return out;
}

Field IntField(const std::string& section, const std::string& key,
               std::function<int&(ExperimentSpec&)> ref, long long lo,
               long long hi) {
  return {section, key,
          [=](ExperimentSpec& s, const std::string& v, const Context& ctx) {
            const long long x = ToInt(v, ctx);
            Range(x >= lo && x <= hi, ctx,
                  "must lie in [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "]");
            ref(s) = static_cast<int>(x);
          },
          [=](const ExperimentSpec& s) {
            return std::to_string(ref(const_cast<ExperimentSpec&>(s)));
          }};
}

Field DoubleField(const std::string& section, const std::string& key,
                  std::function<double&(ExperimentSpec&)> ref,
                  std::function<bool(double)> ok, const std::string& what) {
  return {section, key,
          [=](ExperimentSpec& s, const std::string& v, const Context& ctx) {
            const double x = ToDouble(v, ctx);
            Range(ok(x), ctx, what);
            ref(s) = x;
          },
          [=](const ExperimentSpec& s) {
            return FormatDouble(ref(const_cast<ExperimentSpec&>(s)));
          }};
}

Field StringField(const std::string& section, const std::string& key,
                  std::function<std::string&(ExperimentSpec&)> ref) {
  return {section, key,
          [=](ExperimentSpec& s, const std::string& v, const Context&) {
            ref(s) = v;
          },
          [=](const ExperimentSpec& s) {
            return ref(const_cast<ExperimentSpec&>(s));
          }};
}

const std::vector<Field>& Fields() {
  static const std::vector<Field> fields = [] {
    const double kBig = 1e9;
    std::vector<Field> f;
    // [experiment]
    f.push_back(
        {"experiment", "tag",
         [](ExperimentSpec& s, const std::string& v, const Context& ctx) {
           s.tag = ParseEnum<ExperimentTag>(v, ctx, ParseExperimentTag);
         },
         [](const ExperimentSpec& s) { return ExperimentTagName(s.tag); }});
    f.push_back(
        {"experiment", "methods",
         [](ExperimentSpec& s, const std::string& v, const Context& ctx) {
           s.methods.clear();
           for (const std::string& item : SplitList(v)) {
             s.methods.push_back(ParseEnum<Method>(item, ctx, ParseMethod));
           }
           Range(!s.methods.empty(), ctx, "list must not be empty");
         },
         [](const ExperimentSpec& s) {
           return JoinWith<Method>(s.methods, MethodName);
         }});
    f.push_back(
        {"experiment", "seeds",
         [](ExperimentSpec& s, const std::string& v, const Context& ctx) {
           s.seeds.clear();
           for (const std::string& item : SplitList(v)) {
             s.seeds.push_back(ToSeed(item, ctx));
           }
           Range(!s.seeds.empty(), ctx, "at least one seed is required");
         },
         [](const ExperimentSpec& s) {
           return JoinWith<std::uint64_t>(
               s.seeds, [](const std::uint64_t& x) { return std::to_string(x); });
         }});
    f.push_back(
        {"experiment", "alphas",
         [](ExperimentSpec& s, const std::string& v, const Context& ctx) {
           s.alphas.clear();
           for (const std::string& item : SplitList(v)) {
             const double a = ToDouble(item, ctx);
             Range(a > 0.0, ctx, "alpha values must be > 0");
             s.alphas.push_back(a);
           }
           Range(!s.alphas.empty(), ctx, "list must not be empty");
         },
         [](const ExperimentSpec& s) {
           return JoinWith<double>(s.alphas, FormatDouble);
         }});
    f.push_back(
        {"experiment", "noise_rates",
         [](ExperimentSpec& s, const std::string& v, const Context& ctx) {
           s.noise_rates.clear();
           for (const std::string& item : SplitList(v)) {
             const double r = ToDouble(item, ctx);
             Range(r >= 0.0 && r <= 0.5, ctx, "flip rates must lie in [0, 0.5]");
             s.noise_rates.push_back(r);
           }
           Range(!s.noise_rates.empty(), ctx, "list must not be empty");
         },
         [](const ExperimentSpec& s) {
           return JoinWith<double>(s.noise_rates, FormatDouble);
         }});
    f.push_back(
        {"experiment", "shifts",
         [](ExperimentSpec& s, const std::string& v, const Context& ctx) {
           s.shifts.clear();
           for (const std::string& item : SplitList(v)) {
             s.shifts.push_back(ParseEnum<Shift>(item, ctx, ParseShift));
           }
         },
         [](const ExperimentSpec& s) {
           return JoinWith<Shift>(s.shifts, ShiftName);
         }});
    f.push_back(StringField("experiment", "output",
                            [](ExperimentSpec& s) -> std::string& {
                              return s.output_dir;
                            }));
    // [data]
    f.push_back(IntField("data", "n_per_class",
                         [](ExperimentSpec& s) -> int& {
                           return s.data.n_per_class;
                         },
                         1, 100000000));
    f.push_back(IntField("data", "d_core",
                         [](ExperimentSpec& s) -> int& { return s.data.d_core; },
                         1, 100000));
    f.push_back(IntField("data", "d_spurious",
                         [](ExperimentSpec& s) -> int& {
                           return s.data.d_spurious;
                         },
                         1, 100000));
    f.push_back(IntField("data", "test_per_class",
                         [](ExperimentSpec& s) -> int& {
                           return s.test_per_class;
                         },
                         1, 100000000));
    f.push_back(DoubleField(
        "data", "bias_rate",
        [](ExperimentSpec& s) -> double& { return s.data.bias_rate; },
        [](double x) { return x >= 0.0 && x <= 1.0; }, "must lie in [0, 1]"));
    f.push_back(DoubleField(
        "data", "core_strength",
        [](ExperimentSpec& s) -> double& { return s.data.core_strength; },
        [=](double x) { return std::abs(x) < kBig; }, "magnitude too large"));
    f.push_back(DoubleField(
        "data", "spurious_strength",
        [](ExperimentSpec& s) -> double& { return s.data.spurious_strength; },
        [=](double x) { return std::abs(x) < kBig; }, "magnitude too large"));
    f.push_back(DoubleField(
        "data", "noise", [](ExperimentSpec& s) -> double& { return s.data.noise; },
        [](double x) { return x >= 0.0; }, "must be >= 0"));
    f.push_back(StringField("data", "train_csv",
                            [](ExperimentSpec& s) -> std::string& {
                              return s.train_csv;
                            }));
    f.push_back(StringField("data", "test_csv",
                            [](ExperimentSpec& s) -> std::string& {
                              return s.test_csv;
                            }));
    // [train]
    auto positive = [](double x) { return x > 0.0; };
    auto nonneg = [](double x) { return x >= 0.0; };
    f.push_back(IntField("train", "epochs",
                         [](ExperimentSpec& s) -> int& { return s.train.epochs; },
                         1, 1000000));
    f.push_back(IntField("train", "batch_size",
                         [](ExperimentSpec& s) -> int& {
                           return s.train.batch_size;
                         },
                         1, 100000000));
    f.push_back(DoubleField("train", "lr",
                            [](ExperimentSpec& s) -> double& { return s.train.lr; },
                            positive, "must be > 0"));
    f.push_back(DoubleField(
        "train", "weight_decay",
        [](ExperimentSpec& s) -> double& { return s.train.weight_decay; },
        nonneg, "must be >= 0"));
    f.push_back(
        {"train", "architecture",
         [](ExperimentSpec& s, const std::string& v, const Context& ctx) {
           s.train.architecture =
               ParseEnum<Architecture>(v, ctx, ParseArchitecture);
         },
         [](const ExperimentSpec& s) {
           return ArchitectureName(s.train.architecture);
         }});
    f.push_back(IntField("train", "hidden_units",
                         [](ExperimentSpec& s) -> int& {
                           return s.train.hidden_units;
                         },
                         1, 100000));
    f.push_back(DoubleField(
        "train", "init_scale",
        [](ExperimentSpec& s) -> double& { return s.train.init_scale; }, nonneg,
        "must be >= 0"));
    f.push_back(DoubleField(
        "train", "q_step",
        [](ExperimentSpec& s) -> double& { return s.train.q_step; }, positive,
        "must be > 0"));
    f.push_back(
        {"train", "group_mode",
         [](ExperimentSpec& s, const std::string& v, const Context& ctx) {
           s.train.group_mode = ParseEnum<GroupMode>(v, ctx, ParseGroupMode);
         },
         [](const ExperimentSpec& s) {
           return GroupModeName(s.train.group_mode);
         }});
    f.push_back(DoubleField(
        "train", "assigner_lr",
        [](ExperimentSpec& s) -> double& { return s.train.assigner_lr; },
        positive, "must be > 0"));
    f.push_back(IntField("train", "assigner_steps",
                         [](ExperimentSpec& s) -> int& {
                           return s.train.assigner_steps;
                         },
                         0, 1000000));
    f.push_back(DoubleField(
        "train", "beta", [](ExperimentSpec& s) -> double& { return s.train.beta; },
        nonneg, "must be >= 0"));
    f.push_back(DoubleField(
        "train", "assigner_prior",
        [](ExperimentSpec& s) -> double& { return s.train.assigner_prior; },
        [](double x) { return x > 0.0 && x < 1.0; }, "must lie in (0, 1)"));
    f.push_back(
        {"train", "assigner_objective",
         [](ExperimentSpec& s, const std::string& v, const Context& ctx) {
           s.train.assigner_objective =
               ParseEnum<AssignerObjective>(v, ctx, ParseAssignerObjective);
         },
         [](const ExperimentSpec& s) {
           return AssignerObjectiveName(s.train.assigner_objective);
         }});
    f.push_back(
        {"train", "assigner_features",
         [](ExperimentSpec& s, const std::string& v, const Context& ctx) {
           s.train.assigner_features =
               ParseEnum<AssignerFeatures>(v, ctx, ParseAssignerFeatures);
         },
         [](const ExperimentSpec& s) {
           return AssignerFeaturesName(s.train.assigner_features);
         }});
    f.push_back(DoubleField(
        "train", "alpha",
        [](ExperimentSpec& s) -> double& { return s.train.mix.alpha; }, positive,
        "must be > 0"));
    f.push_back(DoubleField(
        "train", "mix_fraction",
        [](ExperimentSpec& s) -> double& { return s.train.mix.mix_fraction; },
        [](double x) { return x >= 0.0 && x <= 1.0; }, "must lie in [0, 1]"));
    f.push_back(DoubleField(
        "train", "cvar_alpha",
        [](ExperimentSpec& s) -> double& { return s.train.cvar_alpha; },
        [](double x) { return x > 0.0 && x <= 1.0; }, "must lie in (0, 1]"));
    f.push_back(IntField("train", "jtt_epochs",
                         [](ExperimentSpec& s) -> int& {
                           return s.train.jtt_epochs;
                         },
                         1, 1000000));
    f.push_back(DoubleField(
        "train", "jtt_upweight",
        [](ExperimentSpec& s) -> double& { return s.train.jtt_upweight; },
        [](double x) { return x >= 1.0; }, "must be >= 1"));
    return f;
  }();
  return fields;
}

}  // namespace

std::string ExperimentTagName(ExperimentTag tag) {
  switch (tag) {
    case ExperimentTag::kTable1:
      return "table1";
    case ExperimentTag::kAlphaSweep:
      return "alpha_sweep";
    case ExperimentTag::kMixAblation:
      return "mix_ablation";
    case ExperimentTag::kNoiseSweep:
      return "noise_sweep";
    case ExperimentTag::kShiftEval:
      return "shift_eval";
  }
  return "unknown";
}

ExperimentTag ParseExperimentTag(const std::string& name) {
  if (name == "table1") return ExperimentTag::kTable1;
  if (name == "alpha_sweep") return ExperimentTag::kAlphaSweep;
  if (name == "mix_ablation") return ExperimentTag::kMixAblation;
  if (name == "noise_sweep") return ExperimentTag::kNoiseSweep;
  if (name == "shift_eval") return ExperimentTag::kShiftEval;
  throw InvalidArgument("unknown experiment tag '" + name + "'");
}

std::vector<Method> DefaultMethods(ExperimentTag tag) {
  switch (tag) {
    case ExperimentTag::kTable1:
    case ExperimentTag::kShiftEval:
      return {Method::kErm, Method::kCvar, Method::kJtt, Method::kOracleDro,
              Method::kQDiversity};
    case ExperimentTag::kAlphaSweep:
    case ExperimentTag::kMixAblation:
      return {Method::kQDiversity};
    case ExperimentTag::kNoiseSweep:
      return {Method::kJtt, Method::kQDiversity};
  }
  return {};
}

void ExperimentSpec::Validate() const {
  if (seeds.empty()) throw ConfigError("seeds", 0, "at least one seed");
  if (train_csv.empty() != test_csv.empty()) {
    throw ConfigError("train_csv", 0,
                      "train_csv and test_csv must be given together");
  }
  try {
    data.Validate();
    TrainConfig probe = train;
    probe.method = Method::kJtt;
    probe.Validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError("", 0, e.what());
  }
}

ExperimentSpec ParseConfigText(const std::string& text) {
  ExperimentSpec spec;
  std::map<std::string, const Field*> index;
  for (const Field& f : Fields()) index[f.section + "." + f.key] = &f;

  std::set<std::string> seen;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  bool methods_given = false;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    const auto hash = s.find_first_of("#;");
    if (hash != std::string::npos) s = s.substr(0, hash);
    s = Trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') {
        throw ConfigError("", line, "malformed section header '" + s + "'");
      }
      section = Trim(s.substr(1, s.size() - 2));
      if (section != "experiment" && section != "data" && section != "train") {
        throw ConfigError("", line, "unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("", line, "expected 'key = value', got '" + s + "'");
    }
    const std::string key = Trim(s.substr(0, eq));
    const std::string value = Trim(s.substr(eq + 1));
    if (section.empty()) {
      throw ConfigError(key, line, "key appears before any [section]");
    }
    const std::string full = section + "." + key;
    const auto it = index.find(full);
    if (it == index.end()) {
      throw ConfigError(key, line, "unknown key in [" + section + "]");
    }
    if (!seen.insert(full).second) {
      throw ConfigError(key, line, "duplicate key");
    }
    it->second->set(spec, value, Context{key, line});
    if (full == "experiment.methods") methods_given = true;
  }
  if (!seen.count("experiment.tag")) {
    throw ConfigError("tag", 0, "missing required key [experiment] tag");
  }
  if (!methods_given) spec.methods = DefaultMethods(spec.tag);
  spec.Validate();
  return spec;
}

ExperimentSpec ParseConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", 0, "cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseConfigText(buffer.str());
}

std::string EmitConfig(const ExperimentSpec& spec) {
  std::string out;
  std::string section;
  for (const Field& f : Fields()) {
    if (f.section != section) {
      if (!section.empty()) out += "\n";
      section = f.section;
      out += "[" + section + "]\n";
    }
    const std::string value = f.get(spec);
    if (value.empty()) continue;  // optional strings and empty lists
    out += f.key + " = " + value + "\n";
  }
  return out;
}

bool SameSpec(const ExperimentSpec& a, const ExperimentSpec& b) {
  return EmitConfig(a) == EmitConfig(b);
}

}  // namespace grobust
