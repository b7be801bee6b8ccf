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

#include <gtest/gtest.h>

#include "grobust/error.h"
#include "oracles.h"

namespace grobust {
namespace {

Eigen::VectorXd RandomLosses(Rng& rng, int n) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = std::abs(StandardNormal(rng)) * 2.0;
  return v;
}

GroupAssignment RandomAssignment(Rng& rng, int n) {
  Eigen::VectorXd p(n);
  for (int i = 0; i < n; ++i) p(i) = UniformUnit(rng);
  return AssignmentFromProbabilities(p);
}

std::vector<double> ToStd(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

TEST(GroupLossesTest, MatchesScalarOracleOnTinyInstances) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const int n = 10 + static_cast<int>(seed * 2);
    const Dataset data = oracle::TinyDataset(seed, n, 3, 2);
    Rng rng = MakeRng(seed, "theta_init");
    const Model theta = Model::Random(Architecture::kLinear, 3, 2, rng, 0.5);
    const GroupLossResult got =
        GroupLosses(theta, data, *data.true_group, data.group_count);
    const auto per = oracle::PerExampleLoss(
        oracle::Probabilities(theta, data.features), OneHot(data.labels, 2));
    const auto want = oracle::GroupLosses(per, *data.true_group, 4);
    for (int g = 0; g < 4; ++g) {
      EXPECT_EQ(got.empty[g], want.empty[g]);
      EXPECT_NEAR(got.losses(g), want.losses[g], 1e-12);
    }
  }
}

TEST(GroupLossesTest, SingleGroupEqualsMean) {
  Rng rng = MakeRng(1, "generate");
  const Eigen::VectorXd l = RandomLosses(rng, 30);
  const GroupLossResult r =
      GroupLossesFromPerExample(l, std::vector<int>(30, 0), 1);
  EXPECT_NEAR(r.losses(0), l.mean(), 1e-12);
}

TEST(GroupLossesTest, EmptyGroupIsFlaggedAndZero) {
  const Eigen::VectorXd l = Eigen::VectorXd::Constant(3, 2.0);
  const GroupLossResult r = GroupLossesFromPerExample(l, {0, 0, 2}, 3);
  EXPECT_TRUE(r.empty[1]);
  EXPECT_EQ(r.losses(1), 0.0);
  EXPECT_FALSE(r.empty[0]);
  EXPECT_EQ(r.mass(0), 2.0);
}

TEST(GroupLossesTest, OutOfRangeIdThrows) {
  const Eigen::VectorXd l = Eigen::VectorXd::Ones(2);
  EXPECT_THROW(GroupLossesFromPerExample(l, {0, 5}, 2), InvalidArgument);
  EXPECT_THROW(GroupLossesFromPerExample(l, {0}, 2), DimensionError);
}

TEST(SoftGroupLossesTest, MatchesScalarOracleOnTinyInstances) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const int n = 8 + static_cast<int>(seed * 2);
    for (int c : {2, 3}) {
      const Dataset data = oracle::TinyDataset(seed, n, 2, c);
      Rng rng = MakeRng(seed, "assigner_init");
      const Eigen::VectorXd per = RandomLosses(rng, n);
      const GroupAssignment a = RandomAssignment(rng, n);
      const GroupLossResult got =
          SoftGroupLossesFromPerExample(per, SoftMembership(a, data.labels, c,
                                                            GroupMode::kGhatByLabel));
      const auto want =
          oracle::SoftGroupLosses(ToStd(per), ToStd(a.p_minority), data.labels, c);
      for (int g = 0; g < 2 * c; ++g) {
        EXPECT_EQ(got.empty[g], want.empty[g]);
        EXPECT_NEAR(got.losses(g), want.losses[g], 1e-12);
      }
    }
  }
}

TEST(SoftGroupLossesTest, HardAssignmentsMatchHardGroupLosses) {
  Rng rng = MakeRng(4, "generate");
  const Dataset data = oracle::TinyDataset(4, 40, 2, 2);
  const Eigen::VectorXd per = RandomLosses(rng, 40);
  Eigen::VectorXd p(40);
  for (int i = 0; i < 40; ++i) p(i) = (i % 3 == 0) ? 1.0 : 0.0;
  const GroupAssignment a = AssignmentFromProbabilities(p);
  const GroupLossResult soft = SoftGroupLossesFromPerExample(
      per, SoftMembership(a, data.labels, 2, GroupMode::kGhatByLabel));
  const GroupLossResult hard = GroupLossesFromPerExample(
      per, AssignedGroupIds(a, data.labels, 2, GroupMode::kGhatByLabel), 4);
  for (int g = 0; g < 4; ++g) EXPECT_NEAR(soft.losses(g), hard.losses(g), 1e-12);
}

TEST(SoftGroupLossesTest, ConstantProbabilityGivesLabelMeans) {
  Rng rng = MakeRng(5, "generate");
  const Dataset data = oracle::TinyDataset(5, 30, 2, 2);
  const Eigen::VectorXd per = RandomLosses(rng, 30);
  const GroupAssignment a =
      AssignmentFromProbabilities(Eigen::VectorXd::Constant(30, 0.3));
  const GroupLossResult r = SoftGroupLossesFromPerExample(
      per, SoftMembership(a, data.labels, 2, GroupMode::kGhatByLabel));
  for (int y = 0; y < 2; ++y) {
    double s = 0;
    int k = 0;
    for (int i = 0; i < 30; ++i) {
      if (data.labels[i] == y) {
        s += per(i);
        ++k;
      }
    }
    EXPECT_NEAR(r.losses(y), s / k, 1e-12);
    EXPECT_NEAR(r.losses(2 + y), s / k, 1e-12);
  }
}

TEST(AssignedGroupIdsTest, TieGoesToMajority) {
  const GroupAssignment a =
      AssignmentFromProbabilities(Eigen::Vector3d(0.5, 0.51, 0.49));
  EXPECT_EQ(a.hard, (std::vector<int>{kMajority, kMinority, kMajority}));
  const std::vector<int> ids =
      AssignedGroupIds(a, {1, 0, 1}, 2, GroupMode::kGhatByLabel);
  EXPECT_EQ(ids, (std::vector<int>{3, 0, 3}));
  EXPECT_EQ(AssignedGroupIds(a, {1, 0, 1}, 2, GroupMode::kGhat),
            (std::vector<int>{1, 0, 1}));
}

TEST(UpdateQTest, StaysOnSimplexOverManyRandomSteps) {
  Rng rng = MakeRng(11, "generate");
  for (int m : {2, 4, 7}) {
    GroupWeights q = GroupWeights::Uniform(m);
    for (int step = 0; step < 1000; ++step) {
      const Eigen::VectorXd l = RandomLosses(rng, m) * 5.0;
      q = UpdateQ(q, l, 0.01 + UniformUnit(rng));
      ASSERT_NEAR(q.q.sum(), 1.0, 1e-9);
      ASSERT_GE(q.q.minCoeff(), 0.0);
    }
  }
}

TEST(UpdateQTest, EqualLossesLeaveQUnchanged) {
  GroupWeights q;
  q.q = Eigen::Vector4d(0.1, 0.2, 0.3, 0.4);
  const GroupWeights r = UpdateQ(q, Eigen::Vector4d::Constant(1.7), 0.5);
  EXPECT_LE((r.q - q.q).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(UpdateQTest, HigherLossGainsMass) {
  const GroupWeights q = GroupWeights::Uniform(3);
  const GroupWeights r = UpdateQ(q, Eigen::Vector3d(0.1, 2.0, 0.5), 0.1);
  EXPECT_GT(r.q(1), q.q(1));
  EXPECT_LT(r.q(0), q.q(0));
}

TEST(UpdateQTest, MatchesExponentiatedGradientFormula) {
  GroupWeights q;
  q.q = Eigen::Vector3d(0.2, 0.5, 0.3);
  const Eigen::Vector3d l(0.3, 1.1, 0.7);
  const GroupWeights r = UpdateQ(q, l, 0.7);
  double z = 0;
  for (int j = 0; j < 3; ++j) z += q.q(j) * std::exp(0.7 * l(j));
  for (int j = 0; j < 3; ++j) {
    EXPECT_NEAR(r.q(j), q.q(j) * std::exp(0.7 * l(j)) / z, 1e-15);
  }
}

TEST(UpdateQTest, HugeLossesDoNotOverflow) {
  const GroupWeights r =
      UpdateQ(GroupWeights::Uniform(2), Eigen::Vector2d(1e6, 0.0), 1.0);
  EXPECT_NEAR(r.q(0), 1.0, 1e-12);
  EXPECT_TRUE(r.q.allFinite());
}

TEST(UpdateQTest, FrozenGroupsKeepTheirMass) {
  GroupWeights q = GroupWeights::Uniform(4);
  const std::vector<bool> frozen = {false, true, false, false};
  q = UpdateQ(q, Eigen::Vector4d(3.0, 9.0, 0.1, 0.2), 1.0, &frozen);
  EXPECT_EQ(q.q(1), 0.25);
  EXPECT_NEAR(q.q.sum(), 1.0, 1e-12);
}

TEST(UpdateQTest, RejectsBadInput) {
  const GroupWeights q = GroupWeights::Uniform(2);
  EXPECT_THROW(UpdateQ(q, Eigen::Vector3d::Zero(), 0.1), DimensionError);
  EXPECT_THROW(UpdateQ(q, Eigen::Vector2d(NAN, 0), 0.1), NonFiniteError);
  EXPECT_THROW(UpdateQ(q, Eigen::Vector2d::Zero(), 0.0), InvalidArgument);
}

TEST(GroupWeightsTest, ValidateRejectsOffSimplex) {
  GroupWeights q;
  q.q = Eigen::Vector2d(0.6, 0.6);
  EXPECT_THROW(q.Validate(), InvalidArgument);
  q.q = Eigen::Vector2d(1.2, -0.2);
  EXPECT_THROW(q.Validate(), InvalidArgument);
  EXPECT_NO_THROW(GroupWeights::Uniform(5).Validate());
}

}  // namespace
}  // namespace grobust
