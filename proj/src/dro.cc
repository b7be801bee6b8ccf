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

#include "grobust/dro.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "grobust/error.h"
#include "grobust/random.h"

namespace grobust {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Model InitTheta(const Dataset& data, const TrainConfig& cfg) {
  Rng rng = MakeRng(cfg.seed, "theta_init");
  return Model::Random(cfg.architecture, data.dim(), data.num_classes, rng,
                       cfg.init_scale, cfg.hidden_units);
}

Rng ShuffleStream(const TrainConfig& cfg) {
  return MakeRng(cfg.seed, "shuffle");
}

std::vector<std::size_t> Permutation(std::size_t n, Rng& rng) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = n; i > 1; --i) {
    std::swap(perm[i - 1], perm[UniformIndex(rng, i)]);
  }
  return perm;
}

// One shuffled pass of mini-batch SGD. `weights_for` maps the batch rows and
// their targets to nonnegative sample weights.
template <typename WeightFn>
void SgdEpoch(Model& theta, const Eigen::MatrixXd& features,
              const Eigen::MatrixXd& targets, const TrainConfig& cfg,
              Rng& shuffle, WeightFn weights_for) {
  const std::size_t n = static_cast<std::size_t>(features.rows());
  const std::vector<std::size_t> perm = Permutation(n, shuffle);
  const std::size_t bs = static_cast<std::size_t>(cfg.batch_size);
  for (std::size_t start = 0; start < n; start += bs) {
    const std::size_t stop = std::min(n, start + bs);
    const std::vector<std::size_t> idx(perm.begin() + start,
                                       perm.begin() + stop);
    const Eigen::Index b = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd xb(b, features.cols());
    Eigen::MatrixXd tb(b, targets.cols());
    for (Eigen::Index r = 0; r < b; ++r) {
      xb.row(r) = features.row(static_cast<Eigen::Index>(idx[r]));
      tb.row(r) = targets.row(static_cast<Eigen::Index>(idx[r]));
    }
    const Eigen::VectorXd w = weights_for(idx, xb, tb);
    if (!(w.sum() > 0.0)) continue;
    Model grad = LossGradient(theta, xb, tb, w);
    AddWeightDecay(theta, cfg.weight_decay, grad);
    theta = SgdStep(theta, grad, cfg.lr);
  }
}

EpochRecord Record(int epoch, const Model& theta, const Dataset& monitor) {
  EpochRecord rec;
  rec.epoch = epoch;
  if (monitor.true_group) {
    const EvalResult ev = Evaluate(theta, monitor);
    rec.average_accuracy = ev.average;
    rec.robust_accuracy = ev.robust;
  } else {
    const std::vector<int> pred =
        ArgmaxRows(Forward(theta, monitor.features).logits);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
      correct += pred[i] == monitor.labels[i];
    }
    rec.average_accuracy =
        static_cast<double>(correct) / static_cast<double>(pred.size());
    rec.robust_accuracy = kNaN;
  }
  return rec;
}

const Dataset& MonitorOf(const Dataset& data, const TrainOptions& options) {
  return options.monitor ? *options.monitor : data;
}

void CheckFiniteModel(const Model& theta, int epoch) {
  if (!theta.AllFinite()) {
    throw NonFiniteError("non-finite parameters after epoch " +
                         std::to_string(epoch));
  }
}

// Trains with fixed per-example weights (ERM when all are one).
TrainResult TrainWeighted(const Dataset& data, const TrainConfig& cfg,
                          const Eigen::VectorXd& sample_weights, int epochs,
                          const TrainOptions& options) {
  TrainResult result;
  result.theta = InitTheta(data, cfg);
  Rng shuffle = ShuffleStream(cfg);
  const Eigen::MatrixXd targets = OneHot(data.labels, data.num_classes);
  for (int epoch = 0; epoch < epochs; ++epoch) {
    SgdEpoch(result.theta, data.features, targets, cfg, shuffle,
             [&](const std::vector<std::size_t>& idx, const Eigen::MatrixXd&,
                 const Eigen::MatrixXd&) {
               Eigen::VectorXd w(static_cast<Eigen::Index>(idx.size()));
               for (std::size_t r = 0; r < idx.size(); ++r) {
                 w(static_cast<Eigen::Index>(r)) =
                     sample_weights(static_cast<Eigen::Index>(idx[r]));
               }
               return w;
             });
    CheckFiniteModel(result.theta, epoch);
    EpochRecord rec = Record(epoch, result.theta, MonitorOf(data, options));
    if (data.true_group) {
      rec.group_losses = GroupLosses(result.theta, data, *data.true_group,
                                     data.group_count)
                             .losses;
    }
    result.history.push_back(std::move(rec));
  }
  return result;
}

// Shared by group DRO and Q-Diversity: full-data group losses, one q update
// (empty groups frozen), then one SGD pass with weights q_g / batch count_g.
void DroEpoch(Model& theta, const Eigen::MatrixXd& features,
              const Eigen::MatrixXd& targets, const std::vector<int>& ids,
              int m, GroupWeights& q, const TrainConfig& cfg, Rng& shuffle,
              EpochRecord& rec) {
  const Eigen::VectorXd per_example =
      PerExampleLoss(Forward(theta, features), targets);
  const GroupLossResult groups = GroupLossesFromPerExample(per_example, ids, m);
  q = UpdateQ(q, groups.losses, cfg.q_step, &groups.empty);
  rec.group_losses = groups.losses;
  rec.q = q.q;
  std::vector<int> counts(static_cast<std::size_t>(m));
  SgdEpoch(theta, features, targets, cfg, shuffle,
           [&](const std::vector<std::size_t>& idx, const Eigen::MatrixXd&,
               const Eigen::MatrixXd&) {
             std::fill(counts.begin(), counts.end(), 0);
             for (std::size_t i : idx) ++counts[ids[i]];
             Eigen::VectorXd w(static_cast<Eigen::Index>(idx.size()));
             for (std::size_t r = 0; r < idx.size(); ++r) {
               const int g = ids[idx[r]];
               w(static_cast<Eigen::Index>(r)) = q.q(g) / counts[g];
             }
             return w;
           });
}

// Group id of the minority cell holding label y, for the oracle group mode.
std::vector<int> OracleMinorityCells(const Dataset& data,
                                     const std::vector<bool>& minority) {
  std::vector<int> cells(static_cast<std::size_t>(data.num_classes), -1);
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (minority[i]) cells[data.labels[i]] = (*data.true_group)[i];
  }
  return cells;
}

}  // namespace

std::string MethodName(Method method) {
  switch (method) {
    case Method::kErm:
      return "erm";
    case Method::kOracleDro:
      return "oracle_dro";
    case Method::kCvar:
      return "cvar";
    case Method::kJtt:
      return "jtt";
    case Method::kQDiversity:
      return "qdiv";
  }
  return "unknown";
}

Method ParseMethod(const std::string& name) {
  if (name == "erm") return Method::kErm;
  if (name == "oracle_dro") return Method::kOracleDro;
  if (name == "cvar") return Method::kCvar;
  if (name == "jtt") return Method::kJtt;
  if (name == "qdiv") return Method::kQDiversity;
  throw InvalidArgument("unknown method '" + name +
                        "' (expected erm, oracle_dro, cvar, jtt or qdiv)");
}

void TrainConfig::Validate() const {
  if (epochs < 1) throw InvalidArgument("epochs must be >= 1");
  if (batch_size < 1) throw InvalidArgument("batch_size must be >= 1");
  if (!(lr > 0.0)) throw InvalidArgument("lr must be > 0");
  if (!(weight_decay >= 0.0)) throw InvalidArgument("weight_decay must be >= 0");
  if (!(init_scale >= 0.0)) throw InvalidArgument("init_scale must be >= 0");
  if (hidden_units < 1) throw InvalidArgument("hidden_units must be >= 1");
  if (!(q_step > 0.0)) throw InvalidArgument("q_step must be > 0");
  if (!(assigner_lr > 0.0)) throw InvalidArgument("assigner_lr must be > 0");
  if (assigner_steps < 0) throw InvalidArgument("assigner_steps must be >= 0");
  if (!(beta >= 0.0)) throw InvalidArgument("beta must be >= 0");
  if (!(assigner_prior > 0.0 && assigner_prior < 1.0)) {
    throw InvalidArgument("assigner_prior must lie in (0, 1)");
  }
  mix.Validate();
  if (!(cvar_alpha > 0.0 && cvar_alpha <= 1.0)) {
    throw InvalidArgument("cvar_alpha must lie in (0, 1]");
  }
  if (jtt_epochs < 1) throw InvalidArgument("jtt_epochs must be >= 1");
  if (!(jtt_upweight >= 1.0)) throw InvalidArgument("jtt_upweight must be >= 1");
  if (method == Method::kJtt && jtt_epochs >= epochs) {
    throw InvalidArgument("jtt_epochs must be smaller than epochs");
  }
}

EvalResult Evaluate(const Model& theta, const Dataset& data) {
  if (!data.true_group) throw DataError("evaluate needs true group labels");
  const std::vector<int> pred =
      ArgmaxRows(Forward(theta, data.features).logits);
  const std::size_t m = static_cast<std::size_t>(data.group_count);
  std::vector<std::size_t> correct(m, 0);
  EvalResult out;
  out.group_sizes.assign(m, 0);
  std::size_t total_correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const int g = (*data.true_group)[i];
    const bool ok = pred[i] == data.labels[i];
    ++out.group_sizes[g];
    correct[g] += ok;
    total_correct += ok;
  }
  out.average =
      static_cast<double>(total_correct) / static_cast<double>(data.size());
  out.robust = 1.0;
  out.per_group.assign(m, kNaN);
  for (std::size_t g = 0; g < m; ++g) {
    if (out.group_sizes[g] == 0) continue;
    out.per_group[g] = static_cast<double>(correct[g]) /
                       static_cast<double>(out.group_sizes[g]);
    out.robust = std::min(out.robust, out.per_group[g]);
  }
  return out;
}

std::vector<std::size_t> TopLossIndices(const Eigen::VectorXd& losses,
                                        double alpha) {
  const std::size_t n = static_cast<std::size_t>(losses.size());
  const std::size_t k = std::min(
      n, static_cast<std::size_t>(std::ceil(alpha * static_cast<double>(n))));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return losses(static_cast<Eigen::Index>(a)) >
                            losses(static_cast<Eigen::Index>(b));
                   });
  order.resize(k);
  return order;
}

TrainResult TrainErm(const Dataset& data, const TrainConfig& cfg,
                     const TrainOptions& options) {
  cfg.Validate();
  data.Validate();
  return TrainWeighted(
      data, cfg, Eigen::VectorXd::Ones(static_cast<Eigen::Index>(data.size())),
      cfg.epochs, options);
}

TrainResult TrainOracleDro(const Dataset& data, const TrainConfig& cfg,
                           const TrainOptions& options) {
  cfg.Validate();
  data.Validate();
  if (!data.true_group) throw DataError("oracle DRO needs true group labels");
  TrainResult result;
  result.theta = InitTheta(data, cfg);
  Rng shuffle = ShuffleStream(cfg);
  const Eigen::MatrixXd targets = OneHot(data.labels, data.num_classes);
  GroupWeights q = GroupWeights::Uniform(data.group_count);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    EpochRecord rec;
    DroEpoch(result.theta, data.features, targets, *data.true_group,
             data.group_count, q, cfg, shuffle, rec);
    CheckFiniteModel(result.theta, epoch);
    EpochRecord eval = Record(epoch, result.theta, MonitorOf(data, options));
    eval.group_losses = std::move(rec.group_losses);
    eval.q = std::move(rec.q);
    result.history.push_back(std::move(eval));
  }
  return result;
}

TrainResult TrainCvar(const Dataset& data, const TrainConfig& cfg,
                      const TrainOptions& options) {
  cfg.Validate();
  data.Validate();
  TrainResult result;
  result.theta = InitTheta(data, cfg);
  Rng shuffle = ShuffleStream(cfg);
  const Eigen::MatrixXd targets = OneHot(data.labels, data.num_classes);
  const double up = 1.0 / cfg.cvar_alpha;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    SgdEpoch(result.theta, data.features, targets, cfg, shuffle,
             [&](const std::vector<std::size_t>& idx,
                 const Eigen::MatrixXd& xb, const Eigen::MatrixXd& tb) {
               const Eigen::VectorXd losses =
                   PerExampleLoss(Forward(result.theta, xb), tb);
               Eigen::VectorXd w =
                   Eigen::VectorXd::Zero(static_cast<Eigen::Index>(idx.size()));
               for (std::size_t r : TopLossIndices(losses, cfg.cvar_alpha)) {
                 w(static_cast<Eigen::Index>(r)) = up;
               }
               return w;
             });
    CheckFiniteModel(result.theta, epoch);
    EpochRecord rec = Record(epoch, result.theta, MonitorOf(data, options));
    if (data.true_group) {
      rec.group_losses = GroupLosses(result.theta, data, *data.true_group,
                                     data.group_count)
                             .losses;
    }
    result.history.push_back(std::move(rec));
  }
  return result;
}

TrainResult TrainJtt(const Dataset& data, const TrainConfig& cfg,
                     const TrainOptions& options) {
  cfg.Validate();
  data.Validate();
  const Eigen::VectorXd ones =
      Eigen::VectorXd::Ones(static_cast<Eigen::Index>(data.size()));
  const TrainResult identify =
      TrainWeighted(data, cfg, ones, cfg.jtt_epochs, TrainOptions{&data});
  const std::vector<int> pred =
      ArgmaxRows(Forward(identify.theta, data.features).logits);
  Eigen::VectorXd weights = ones;
  std::vector<std::size_t> errors;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (pred[i] != data.labels[i]) {
      errors.push_back(i);
      weights(static_cast<Eigen::Index>(i)) = cfg.jtt_upweight;
    }
  }
  TrainResult result = TrainWeighted(data, cfg, weights, cfg.epochs, options);
  if (errors.empty()) {
    result.log.push_back("jtt: empty error set, second phase is plain ERM");
  }
  result.log.push_back("jtt: error set size " + std::to_string(errors.size()));
  result.error_set = std::move(errors);
  return result;
}

TrainResult TrainQDiversity(const Dataset& data, const TrainConfig& cfg,
                            const TrainOptions& options) {
  cfg.Validate();
  data.Validate();
  const bool oracle = cfg.group_mode == GroupMode::kOracle;
  const int c = data.num_classes;
  const int m = GroupCountFor(cfg.group_mode, data);

  TrainResult result;
  result.theta = InitTheta(data, cfg);
  Rng shuffle = ShuffleStream(cfg);
  Rng phi_rng = MakeRng(cfg.seed, "assigner_init");
  Rng mix_rng = MakeRng(cfg.seed, "mixing");
  const Eigen::MatrixXd targets = OneHot(data.labels, c);
  GroupWeights q = GroupWeights::Uniform(m);

  Model phi;
  AssignerLossOptions assigner_options;
  assigner_options.beta = cfg.beta;
  assigner_options.objective = cfg.assigner_objective;
  assigner_options.features = cfg.assigner_features;
  assigner_options.group_mode = cfg.group_mode;

  GroupAssignment assignment;
  std::vector<int> ids;
  std::vector<int> oracle_cells;
  if (oracle) {
    // The assigner is replaced by the true partition.
    const std::vector<bool> minority = TrueMinorityMask(data);
    Eigen::VectorXd p(static_cast<Eigen::Index>(data.size()));
    for (std::size_t i = 0; i < data.size(); ++i) {
      p(static_cast<Eigen::Index>(i)) = minority[i] ? 1.0 : 0.0;
    }
    assignment = AssignmentFromProbabilities(p);
    ids = *data.true_group;
    oracle_cells = OracleMinorityCells(data, minority);
  } else {
    phi = InitAssigner(data.dim(), c, cfg.assigner_features, phi_rng,
                       cfg.assigner_prior, cfg.init_scale);
  }

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (!oracle) {
      // Modeling round: theta frozen.
      const Eigen::VectorXd per_example =
          PerExampleLoss(Forward(result.theta, data.features), targets);
      for (int step = 0; step < cfg.assigner_steps; ++step) {
        try {
          const AssignerLossResult res =
              AssignerLoss(phi, per_example, data, q, assigner_options);
          phi = SgdStep(phi, res.gradient, cfg.assigner_lr);
        } catch (const DegenerateAssignmentError& e) {
          result.log.push_back("epoch " + std::to_string(epoch) +
                               ": degenerate assignment (" + e.what() +
                               "), assigner reinitialized");
          phi = InitAssigner(data.dim(), c, cfg.assigner_features, phi_rng,
                             cfg.assigner_prior, cfg.init_scale);
          break;
        }
      }
      assignment = Assign(phi, data, cfg.assigner_features);
      ids = AssignedGroupIds(assignment, data.labels, c, cfg.group_mode);
    }

    // Predicting round: phi frozen.
    Eigen::MatrixXd features = data.features;
    Eigen::MatrixXd soft_targets = targets;
    std::vector<int> all_ids = ids;
    if (cfg.mix.mix_fraction > 0.0) {
      try {
        const MixedBatch mixed =
            BuildMixedGroups(data, assignment, cfg.mix, mix_rng);
        const Eigen::Index n = features.rows();
        const Eigen::Index k = static_cast<Eigen::Index>(mixed.size());
        features.conservativeResize(n + k, Eigen::NoChange);
        soft_targets.conservativeResize(n + k, Eigen::NoChange);
        features.bottomRows(k) = mixed.features;
        soft_targets.bottomRows(k) = mixed.soft_labels;
        for (std::size_t t = 0; t < mixed.size(); ++t) {
          const int label = mixed.group_ids[t] - kMinority * c;
          switch (cfg.group_mode) {
            case GroupMode::kGhatByLabel:
              all_ids.push_back(mixed.group_ids[t]);
              break;
            case GroupMode::kGhat:
              all_ids.push_back(kMinority);
              break;
            case GroupMode::kOracle:
              all_ids.push_back(oracle_cells[label] >= 0 ? oracle_cells[label]
                                                         : label);
              break;
          }
        }
      } catch (const EmptyMinorityError&) {
        result.log.push_back("epoch " + std::to_string(epoch) +
                             ": no minority examples, mixing skipped");
      }
    }

    EpochRecord rec;
    DroEpoch(result.theta, features, soft_targets, all_ids, m, q, cfg,
             shuffle, rec);
    CheckFiniteModel(result.theta, epoch);
    EpochRecord eval = Record(epoch, result.theta, MonitorOf(data, options));
    eval.group_losses = std::move(rec.group_losses);
    eval.q = std::move(rec.q);
    result.history.push_back(std::move(eval));
  }
  if (!oracle) {
    result.assignment = Assign(phi, data, cfg.assigner_features);
    result.phi = std::move(phi);
  } else {
    result.assignment = std::move(assignment);
  }
  return result;
}

TrainResult Train(const Dataset& data, const TrainConfig& cfg,
                  const TrainOptions& options) {
  switch (cfg.method) {
    case Method::kErm:
      return TrainErm(data, cfg, options);
    case Method::kOracleDro:
      return TrainOracleDro(data, cfg, options);
    case Method::kCvar:
      return TrainCvar(data, cfg, options);
    case Method::kJtt:
      return TrainJtt(data, cfg, options);
    case Method::kQDiversity:
      return TrainQDiversity(data, cfg, options);
  }
  throw InvalidArgument("unknown method");
}

}  // namespace grobust
