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

#include "grobust/group_losses.h"

#include <cmath>
#include <limits>

#include "grobust/error.h"

namespace grobust {

std::string GroupModeName(GroupMode mode) {
  switch (mode) {
    case GroupMode::kGhatByLabel:
      return "ghat_by_label";
    case GroupMode::kGhat:
      return "ghat";
    case GroupMode::kOracle:
      return "oracle";
  }
  return "unknown";
}

GroupMode ParseGroupMode(const std::string& name) {
  if (name == "ghat_by_label") return GroupMode::kGhatByLabel;
  if (name == "ghat") return GroupMode::kGhat;
  if (name == "oracle") return GroupMode::kOracle;
  throw InvalidArgument("unknown group mode '" + name +
                        "' (expected ghat_by_label, ghat or oracle)");
}

int GroupCountFor(GroupMode mode, const Dataset& data) {
  switch (mode) {
    case GroupMode::kGhatByLabel:
      return 2 * data.num_classes;
    case GroupMode::kGhat:
      return 2;
    case GroupMode::kOracle:
      if (!data.true_group) {
        throw DataError("oracle group mode needs true group labels");
      }
      return data.group_count;
  }
  return 0;
}

GroupWeights GroupWeights::Uniform(int m) {
  if (m < 1) throw InvalidArgument("group count must be >= 1");
  return {Eigen::VectorXd::Constant(m, 1.0 / m)};
}

void GroupWeights::Validate(double tol) const {
  if (q.size() == 0) throw InvalidArgument("empty group weight vector");
  if ((q.array() < 0.0).any() || !q.allFinite()) {
    throw InvalidArgument("group weights must be finite and nonnegative");
  }
  if (std::abs(q.sum() - 1.0) > tol) {
    throw InvalidArgument("group weights must sum to 1");
  }
}

GroupLossResult GroupLossesFromPerExample(const Eigen::VectorXd& per_example,
                                          const std::vector<int>& group_ids,
                                          int m) {
  if (static_cast<std::size_t>(per_example.size()) != group_ids.size()) {
    throw DimensionError("group_losses: " + std::to_string(group_ids.size()) +
                         " group ids for " +
                         std::to_string(per_example.size()) + " losses");
  }
  GroupLossResult out;
  out.losses = Eigen::VectorXd::Zero(m);
  out.mass = Eigen::VectorXd::Zero(m);
  for (std::size_t i = 0; i < group_ids.size(); ++i) {
    const int g = group_ids[i];
    if (g < 0 || g >= m) {
      throw InvalidArgument("group id " + std::to_string(g) + " outside [0, " +
                            std::to_string(m) + ")");
    }
    out.losses(g) += per_example(static_cast<Eigen::Index>(i));
    out.mass(g) += 1.0;
  }
  out.empty.resize(m);
  for (int g = 0; g < m; ++g) {
    out.empty[g] = out.mass(g) == 0.0;
    if (!out.empty[g]) out.losses(g) /= out.mass(g);
  }
  return out;
}

GroupLossResult GroupLosses(const Model& theta, const Dataset& data,
                            const std::vector<int>& group_ids, int m) {
  const PredictionBatch pred = Forward(theta, data.features);
  return GroupLossesFromPerExample(
      PerExampleLoss(pred, OneHot(data.labels, data.num_classes)), group_ids,
      m);
}

Eigen::MatrixXd SoftMembership(const GroupAssignment& assignment,
                               const std::vector<int>& labels, int num_classes,
                               GroupMode mode) {
  if (assignment.size() != labels.size() ||
      static_cast<std::size_t>(assignment.p_minority.size()) != labels.size()) {
    throw DimensionError("soft membership: assignment size differs from labels");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(labels.size());
  if (mode == GroupMode::kGhat) {
    Eigen::MatrixXd w(n, 2);
    w.col(kMinority) = assignment.p_minority;
    w.col(kMajority) = 1.0 - assignment.p_minority.array();
    return w;
  }
  if (mode != GroupMode::kGhatByLabel) {
    throw InvalidArgument("soft membership needs a ghat-based group mode");
  }
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, 2 * num_classes);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int y = labels[static_cast<std::size_t>(i)];
    const double p = assignment.p_minority(i);
    w(i, kMinority * num_classes + y) = p;
    w(i, kMajority * num_classes + y) = 1.0 - p;
  }
  return w;
}

GroupLossResult SoftGroupLossesFromPerExample(
    const Eigen::VectorXd& per_example, const Eigen::MatrixXd& membership) {
  if (membership.rows() != per_example.size()) {
    throw DimensionError("soft_group_losses: membership rows differ from n");
  }
  const Eigen::Index m = membership.cols();
  GroupLossResult out;
  out.losses = Eigen::VectorXd::Zero(m);
  out.mass = Eigen::VectorXd::Zero(m);
  out.empty.resize(static_cast<std::size_t>(m));
  for (Eigen::Index g = 0; g < m; ++g) {
    double num = 0.0, den = 0.0;
    for (Eigen::Index i = 0; i < per_example.size(); ++i) {
      num += membership(i, g) * per_example(i);
      den += membership(i, g);
    }
    out.mass(g) = den;
    out.empty[static_cast<std::size_t>(g)] = den < 1e-9;
    if (den >= 1e-9) out.losses(g) = num / den;
  }
  return out;
}

GroupLossResult SoftGroupLosses(const Model& theta, const Dataset& data,
                                const GroupAssignment& assignment,
                                GroupMode mode) {
  const PredictionBatch pred = Forward(theta, data.features);
  return SoftGroupLossesFromPerExample(
      PerExampleLoss(pred, OneHot(data.labels, data.num_classes)),
      SoftMembership(assignment, data.labels, data.num_classes, mode));
}

std::vector<int> AssignedGroupIds(const GroupAssignment& assignment,
                                  const std::vector<int>& labels,
                                  int num_classes, GroupMode mode) {
  if (assignment.size() != labels.size()) {
    throw DimensionError("assignment size differs from labels");
  }
  std::vector<int> ids(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (mode == GroupMode::kGhatByLabel) {
      ids[i] = assignment.hard[i] * num_classes + labels[i];
    } else if (mode == GroupMode::kGhat) {
      ids[i] = assignment.hard[i];
    } else {
      throw InvalidArgument("assigned ids need a ghat-based group mode");
    }
  }
  return ids;
}

GroupWeights UpdateQ(const GroupWeights& q, const Eigen::VectorXd& losses,
                     double q_step, const std::vector<bool>* frozen) {
  const Eigen::Index m = q.q.size();
  if (losses.size() != m) {
    throw DimensionError("update_q: " + std::to_string(losses.size()) +
                         " losses for " + std::to_string(m) + " groups");
  }
  if (frozen && static_cast<Eigen::Index>(frozen->size()) != m) {
    throw DimensionError("update_q: frozen mask has the wrong length");
  }
  if (!losses.allFinite()) throw NonFiniteError("update_q: non-finite loss");
  if (!(q_step > 0.0)) throw InvalidArgument("update_q: q_step must be > 0");
  auto is_frozen = [&](Eigen::Index j) {
    return frozen && (*frozen)[static_cast<std::size_t>(j)];
  };

  double frozen_mass = 0.0;
  double top = -std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < m; ++j) {
    if (is_frozen(j)) {
      frozen_mass += q.q(j);
    } else if (q.q(j) > 0.0) {
      top = std::max(top, q_step * losses(j));
    }
  }
  GroupWeights out = q;
  if (!std::isfinite(top)) return out;  // nothing free to move

  Eigen::VectorXd raw = Eigen::VectorXd::Zero(m);
  double total = 0.0;
  for (Eigen::Index j = 0; j < m; ++j) {
    if (is_frozen(j)) continue;
    raw(j) = q.q(j) * std::exp(q_step * losses(j) - top);
    total += raw(j);
  }
  const double free_mass = 1.0 - frozen_mass;
  for (Eigen::Index j = 0; j < m; ++j) {
    if (!is_frozen(j)) out.q(j) = raw(j) / total * free_mass;
  }
  return out;
}

}  // namespace grobust
