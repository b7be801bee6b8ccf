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

#include "grobust/assigner.h"

#include <cmath>

#include "grobust/error.h"

namespace grobust {
namespace {

constexpr double kMassFloor = 1e-12;

double Kl(const Eigen::VectorXd& p, const Eigen::VectorXd& r) {
  double kl = 0.0;
  for (Eigen::Index c = 0; c < p.size(); ++c) {
    if (p(c) <= 0.0) continue;
    if (r(c) <= 0.0) {
      throw InvalidArgument("balance loss: conditional mass on class " +
                            std::to_string(c) + " which has P(y) = 0");
    }
    kl += p(c) * std::log(p(c) / r(c));
  }
  return kl;
}

}  // namespace

std::string AssignerFeaturesName(AssignerFeatures mode) {
  return mode == AssignerFeatures::kConcat ? "concat" : "label_conditioned";
}

AssignerFeatures ParseAssignerFeatures(const std::string& name) {
  if (name == "concat") return AssignerFeatures::kConcat;
  if (name == "label_conditioned") return AssignerFeatures::kLabelConditioned;
  throw InvalidArgument("unknown assigner features '" + name +
                        "' (expected concat or label_conditioned)");
}

std::string AssignerObjectiveName(AssignerObjective objective) {
  return objective == AssignerObjective::kAdversarial ? "adversarial"
                                                      : "cooperative";
}

AssignerObjective ParseAssignerObjective(const std::string& name) {
  if (name == "adversarial") return AssignerObjective::kAdversarial;
  if (name == "cooperative") return AssignerObjective::kCooperative;
  throw InvalidArgument("unknown assigner objective '" + name +
                        "' (expected adversarial or cooperative)");
}

int AssignerInputDim(int d, int num_classes, AssignerFeatures mode) {
  return mode == AssignerFeatures::kConcat ? d + num_classes
                                           : d * num_classes + num_classes;
}

Eigen::MatrixXd AssignerInput(const Dataset& data, AssignerFeatures mode) {
  const int d = data.dim();
  const int c = data.num_classes;
  const Eigen::Index n = static_cast<Eigen::Index>(data.size());
  Eigen::MatrixXd out =
      Eigen::MatrixXd::Zero(n, AssignerInputDim(d, c, mode));
  for (Eigen::Index i = 0; i < n; ++i) {
    const int y = data.labels[static_cast<std::size_t>(i)];
    if (mode == AssignerFeatures::kConcat) {
      out.row(i).head(d) = data.features.row(i);
      out(i, d + y) = 1.0;
    } else {
      out.row(i).segment(y * d, d) = data.features.row(i);
      out(i, d * c + y) = 1.0;
    }
  }
  return out;
}

Model InitAssigner(int d, int num_classes, AssignerFeatures mode, Rng& rng,
                   double prior, double init_scale) {
  if (!(prior > 0.0 && prior < 1.0)) {
    throw InvalidArgument("assigner prior must lie in (0, 1)");
  }
  Model phi = Model::Random(Architecture::kLinear,
                            AssignerInputDim(d, num_classes, mode), 2, rng,
                            init_scale);
  phi.layers()[0].bias(kMinority) = std::log(prior / (1.0 - prior));
  phi.layers()[0].bias(kMajority) = 0.0;
  return phi;
}

GroupAssignment Assign(const Model& phi, const Dataset& data,
                       AssignerFeatures mode) {
  const int expected = AssignerInputDim(data.dim(), data.num_classes, mode);
  if (phi.input_dim() != expected || phi.num_classes() != 2) {
    throw DimensionError("assign: assigner expects width " +
                         std::to_string(phi.input_dim()) + " with " +
                         std::to_string(phi.num_classes()) +
                         " outputs, data gives width " +
                         std::to_string(expected) + " and 2 sides");
  }
  const PredictionBatch pred = Forward(phi, AssignerInput(data, mode));
  return AssignmentFromProbabilities(pred.probabilities.col(kMinority));
}

LabelMarginals ConditionalLabelMarginals(const GroupAssignment& assignment,
                                         const std::vector<int>& labels,
                                         int num_classes) {
  const std::size_t n = labels.size();
  if (n == 0) throw InvalidArgument("marginals need at least one example");
  if (static_cast<std::size_t>(assignment.p_minority.size()) != n) {
    throw DimensionError("marginals: assignment size differs from labels");
  }
  LabelMarginals out;
  out.given_majority = Eigen::VectorXd::Zero(num_classes);
  out.given_minority = Eigen::VectorXd::Zero(num_classes);
  out.overall = Eigen::VectorXd::Zero(num_classes);
  double maj_mass = 0.0, min_mass = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = assignment.p_minority(static_cast<Eigen::Index>(i));
    const int y = labels[i];
    out.given_minority(y) += p;
    out.given_majority(y) += 1.0 - p;
    out.overall(y) += 1.0;
    min_mass += p;
    maj_mass += 1.0 - p;
  }
  if (maj_mass <= kMassFloor || min_mass <= kMassFloor) {
    throw DegenerateAssignmentError(
        "assignment puts no mass on the " +
        std::string(maj_mass <= kMassFloor ? "majority" : "minority") +
        " side");
  }
  out.given_majority /= maj_mass;
  out.given_minority /= min_mass;
  out.overall /= static_cast<double>(n);
  return out;
}

double BalanceLoss(const LabelMarginals& marginals) {
  return Kl(marginals.given_majority, marginals.overall) +
         Kl(marginals.given_minority, marginals.overall);
}

AssignerLossResult AssignerLoss(const Model& phi,
                                const Eigen::VectorXd& per_example,
                                const Dataset& data, const GroupWeights& q,
                                const AssignerLossOptions& options) {
  if (options.group_mode == GroupMode::kOracle) {
    throw InvalidArgument("assigner loss needs a ghat-based group mode");
  }
  if (!(options.beta >= 0.0)) throw InvalidArgument("beta must be >= 0");
  q.Validate();
  const std::size_t n = data.size();
  const int c = data.num_classes;
  if (static_cast<std::size_t>(per_example.size()) != n) {
    throw DimensionError("assigner loss: per-example losses differ from n");
  }
  const int m = GroupCountFor(options.group_mode, data);
  if (q.q.size() != m) {
    throw DimensionError("assigner loss: q has " + std::to_string(q.q.size()) +
                         " entries, expected " + std::to_string(m));
  }

  const Eigen::MatrixXd input = AssignerInput(data, options.features);
  const PredictionBatch pred = Forward(phi, input);
  const GroupAssignment assignment =
      AssignmentFromProbabilities(pred.probabilities.col(kMinority));
  const LabelMarginals marginals =
      ConditionalLabelMarginals(assignment, data.labels, c);

  const double sign =
      options.objective == AssignerObjective::kCooperative ? 1.0 : -1.0;
  const Eigen::MatrixXd membership =
      SoftMembership(assignment, data.labels, c, options.group_mode);
  const GroupLossResult groups =
      SoftGroupLossesFromPerExample(per_example, membership);

  AssignerLossResult out;
  // d loss / d p_minority(i)
  Eigen::VectorXd dp = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (int g = 0; g < m; ++g) {
    if (groups.empty[g]) continue;
    out.group_term += q.q(g) * groups.losses(g);
    const int side = options.group_mode == GroupMode::kGhat ? g : g / c;
    const double ds = side == kMinority ? 1.0 : -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (options.group_mode == GroupMode::kGhatByLabel &&
          data.labels[i] != g % c) {
        continue;
      }
      const auto r = static_cast<Eigen::Index>(i);
      dp(r) += sign * q.q(g) * ds * (per_example(r) - groups.losses(g)) /
               groups.mass(g);
    }
  }

  out.balance_term = BalanceLoss(marginals);
  if (options.beta > 0.0) {
    double maj_mass = 0.0, min_mass = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double p = assignment.p_minority(static_cast<Eigen::Index>(i));
      min_mass += p;
      maj_mass += 1.0 - p;
    }
    // dKL/dcond_c = log(cond_c / P(c)) + 1; dcond_c/dmass_i = (1[y_i=c] -
    // cond_c) / M. Classes with zero conditional mass contribute a finite
    // one-sided derivative only through the -cond_c term, which vanishes.
    auto kl_grad = [&](const Eigen::VectorXd& cond) {
      Eigen::VectorXd gc(c);
      for (int k = 0; k < c; ++k) {
        gc(k) = cond(k) > 0.0 ? std::log(cond(k) / marginals.overall(k)) + 1.0
                              : 0.0;
      }
      return gc;
    };
    const Eigen::VectorXd g_min = kl_grad(marginals.given_minority);
    const Eigen::VectorXd g_maj = kl_grad(marginals.given_majority);
    const double dot_min = g_min.dot(marginals.given_minority);
    const double dot_maj = g_maj.dot(marginals.given_majority);
    for (std::size_t i = 0; i < n; ++i) {
      const int y = data.labels[i];
      const double d_min = (g_min(y) - dot_min) / min_mass;
      const double d_maj = (g_maj(y) - dot_maj) / maj_mass;
      dp(static_cast<Eigen::Index>(i)) += options.beta * (d_min - d_maj);
    }
  }
  out.loss = sign * out.group_term + options.beta * out.balance_term;

  // p_minority = softmax(z)_0, so dp/dz_0 = p(1-p) = -dp/dz_1.
  Eigen::MatrixXd logit_grad(static_cast<Eigen::Index>(n), 2);
  for (Eigen::Index i = 0; i < logit_grad.rows(); ++i) {
    const double p = assignment.p_minority(i);
    const double s = dp(i) * p * (1.0 - p);
    logit_grad(i, kMinority) = s;
    logit_grad(i, kMajority) = -s;
  }
  out.gradient = Backward(phi, input, logit_grad);
  return out;
}

AssignerLossResult AssignerLoss(const Model& phi, const Model& theta,
                                const Dataset& data, const GroupWeights& q,
                                const AssignerLossOptions& options) {
  const PredictionBatch pred = Forward(theta, data.features);
  return AssignerLoss(phi,
                      PerExampleLoss(pred, OneHot(data.labels,
                                                  data.num_classes)),
                      data, q, options);
}

double AssignmentBalancedAccuracy(const GroupAssignment& assignment,
                                  const std::vector<bool>& true_minority) {
  if (assignment.size() != true_minority.size()) {
    throw DimensionError("balanced accuracy: size mismatch");
  }
  double tp = 0, pos = 0, tn = 0, neg = 0;
  for (std::size_t i = 0; i < true_minority.size(); ++i) {
    const bool predicted = assignment.hard[i] == kMinority;
    if (true_minority[i]) {
      ++pos;
      tp += predicted;
    } else {
      ++neg;
      tn += !predicted;
    }
  }
  if (pos == 0 || neg == 0) {
    throw InvalidArgument("balanced accuracy needs both classes present");
  }
  return 0.5 * (tp / pos + tn / neg);
}

}  // namespace grobust
