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

#include "grobust/datasets.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "grobust/dro.h"
#include "grobust/error.h"
#include "grobust/report.h"

namespace grobust {
namespace {

std::string TempPath(const std::string& name) {
  return (std::filesystem::temp_directory_path() /
          ("grobust_datasets_" + name))
      .string();
}

double AttrLabelCorrelation(const Dataset& data) {
  const double n = static_cast<double>(data.size());
  double ma = 0, my = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    ma += (*data.spurious_attr)[i];
    my += data.labels[i];
  }
  ma /= n;
  my /= n;
  double cov = 0, va = 0, vy = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double a = (*data.spurious_attr)[i] - ma;
    const double y = data.labels[i] - my;
    cov += a * y;
    va += a * a;
    vy += y * y;
  }
  return cov / std::sqrt(va * vy);
}

TEST(GenerateTest, UnbiasedRateHasNoCorrelation) {
  GeneratorSpec spec;
  spec.bias_rate = 0.5;
  spec.n_per_class = 2000;
  EXPECT_LE(std::abs(AttrLabelCorrelation(GenerateBiased(spec))), 0.05);
}

TEST(GenerateTest, MinorityCellsAreAboutFivePercent) {
  GeneratorSpec spec;
  spec.n_per_class = 2000;
  const ContingencyTable t = GroupCounts(GenerateBiased(spec));
  // g = attr * 2 + y: label 0 without attr is group 0, label 1 with attr 3.
  EXPECT_NEAR(t[0][0] / 2000.0, 0.05, 0.02);
  EXPECT_NEAR(t[3][1] / 2000.0, 0.05, 0.02);
  EXPECT_NEAR(t[2][0] / 2000.0, 0.95, 0.02);
  EXPECT_NEAR(t[1][1] / 2000.0, 0.95, 0.02);
}

TEST(GenerateTest, ClassesAreExactlyBalancedAndGroupsConsistent) {
  GeneratorSpec spec;
  spec.n_per_class = 321;
  const Dataset data = GenerateBiased(spec);
  int ones = 0;
  for (int y : data.labels) ones += y;
  EXPECT_EQ(ones, 321);
  EXPECT_EQ(data.size(), 642u);
  EXPECT_EQ(data.dim(), spec.d_core + spec.d_spurious);
  for (std::size_t i = 0; i < data.size(); ++i) {
    EXPECT_EQ((*data.true_group)[i],
              (*data.spurious_attr)[i] * 2 + data.labels[i]);
  }
}

TEST(GenerateTest, SameSeedIsByteIdentical) {
  GeneratorSpec spec;
  spec.n_per_class = 200;
  spec.seed = 42;
  WriteCsv(GenerateBiased(spec), TempPath("a.csv"));
  WriteCsv(GenerateBiased(spec), TempPath("b.csv"));
  EXPECT_EQ(ReadTextFile(TempPath("a.csv")), ReadTextFile(TempPath("b.csv")));
  spec.seed = 43;
  WriteCsv(GenerateBiased(spec), TempPath("c.csv"));
  EXPECT_NE(ReadTextFile(TempPath("a.csv")), ReadTextFile(TempPath("c.csv")));
}

TEST(GenerateTest, ErmCollapsesOnMinorityGroups) {
  GeneratorSpec spec;
  spec.seed = 3;
  const Dataset train = GenerateBiased(spec);
  GeneratorSpec test_spec = spec;
  test_spec.seed = 1003;
  const TrainResult result = TrainErm(train, TrainConfig{});
  const EvalResult ev = Evaluate(result.theta, GenerateBiased(test_spec));
  EXPECT_LT(ev.robust, 0.20);
  EXPECT_GT(ev.average, 0.85);
}

TEST(GenerateTest, InvalidSpecsAreRejected) {
  GeneratorSpec spec;
  spec.bias_rate = 1.5;
  EXPECT_THROW(GenerateBiased(spec), InvalidArgument);
  spec = {};
  spec.d_core = 0;
  EXPECT_THROW(GenerateBiased(spec), InvalidArgument);
  spec = {};
  spec.noise = -1.0;
  EXPECT_THROW(GenerateBiased(spec), InvalidArgument);
}

TEST(LabelNoiseTest, ZeroRateIsIdentity) {
  GeneratorSpec spec;
  spec.n_per_class = 100;
  const Dataset data = GenerateBiased(spec);
  const Dataset same = InjectLabelNoise(data, 0.0, 5);
  EXPECT_EQ(same.labels, data.labels);
  EXPECT_EQ(*same.true_group, *data.true_group);
}

TEST(LabelNoiseTest, FlipFractionMatchesRate) {
  GeneratorSpec spec;
  spec.n_per_class = 5000;
  const Dataset data = GenerateBiased(spec);
  for (double rate : {0.2, 0.5}) {
    const Dataset noisy = InjectLabelNoise(data, rate, 17);
    std::size_t diff = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      diff += data.labels[i] != noisy.labels[i];
    }
    EXPECT_NEAR(diff / 10000.0, rate, 0.02);
    EXPECT_EQ(FlippedIndices(data, noisy).size(), diff);
    EXPECT_EQ(noisy.size(), data.size());
    EXPECT_EQ(noisy.dim(), data.dim());
    EXPECT_EQ(noisy.num_classes, data.num_classes);
    EXPECT_NO_THROW(noisy.Validate());
  }
}

TEST(LabelNoiseTest, MultiClassFlipsToADifferentClass) {
  Dataset data;
  data.num_classes = 3;
  data.features = Eigen::MatrixXd::Zero(3000, 1);
  data.labels.assign(3000, 1);
  const Dataset noisy = InjectLabelNoise(data, 0.3, 2);
  std::size_t to0 = 0, to2 = 0;
  for (int y : noisy.labels) {
    to0 += y == 0;
    to2 += y == 2;
  }
  EXPECT_NEAR(to0 / 3000.0, 0.15, 0.02);
  EXPECT_NEAR(to2 / 3000.0, 0.15, 0.02);
}

TEST(LabelNoiseTest, RateOutsideRangeIsRejected) {
  Dataset data = GenerateBiased(GeneratorSpec{});
  EXPECT_THROW(InjectLabelNoise(data, 0.6, 1), InvalidArgument);
  EXPECT_THROW(InjectLabelNoise(data, -0.1, 1), InvalidArgument);
}

TEST(ShiftTest, AttrBalanceRemovesCorrelation) {
  GeneratorSpec spec;
  EXPECT_LE(std::abs(AttrLabelCorrelation(ShiftTestset(spec, Shift::kAttrBalance))),
            0.05);
}

TEST(ShiftTest, CoreOnlyZeroesSpuriousBlock) {
  GeneratorSpec spec;
  const Dataset data = ShiftTestset(spec, Shift::kCoreOnly);
  EXPECT_EQ(data.features.rightCols(spec.d_spurious).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_GT(data.features.leftCols(spec.d_core).cwiseAbs().maxCoeff(), 0.0);
}

TEST(ShiftTest, CoreOnlyMakesSpuriousProbeChance) {
  GeneratorSpec spec;
  const Dataset data = ShiftTestset(spec, Shift::kCoreOnly);
  // Probe that reads only the spurious block: predicts label 0 when the
  // block points toward the attribute.
  Model probe = Model::Zeros(Architecture::kLinear, data.dim(), 2);
  for (int k = 0; k < spec.d_spurious; ++k) {
    probe.layers()[0].weight(0, spec.d_core + k) = 1.0;
  }
  const EvalResult ev = Evaluate(probe, data);
  EXPECT_NEAR(ev.average, 0.5, 0.03);
}

TEST(ShiftTest, AttrFlipSwapsGroupRoles) {
  GeneratorSpec spec;
  const ContingencyTable train = GroupCounts(GenerateBiased(spec));
  const ContingencyTable flipped = GroupCounts(ShiftTestset(spec, Shift::kAttrFlip));
  // Majority cells in training are groups 2 (y=0) and 1 (y=1).
  EXPECT_GT(train[2][0], train[0][0]);
  EXPECT_LT(flipped[2][0], flipped[0][0]);
  EXPECT_GT(train[1][1], train[3][1]);
  EXPECT_LT(flipped[1][1], flipped[3][1]);
}

TEST(ShiftTest, UnknownShiftName) {
  EXPECT_THROW(ParseShift("rotate"), InvalidArgument);
  EXPECT_EQ(ParseShift("attr_flip"), Shift::kAttrFlip);
}

TEST(CsvTest, HandwrittenFileRoundTrips) {
  const std::string path = TempPath("hand.csv");
  {
    std::ofstream out(path);
    out << "feat_0,feat_1,label,group,attr\n"
        << "0.5,-1.25,0,2,1\n"
        << "1e-3,2,1,1,0\n"
        << "3.75,0,1,3,1\n";
  }
  const Dataset data = LoadCsv(path);
  ASSERT_EQ(data.size(), 3u);
  EXPECT_EQ(data.features(0, 1), -1.25);
  EXPECT_EQ(data.features(1, 0), 1e-3);
  EXPECT_EQ(data.labels, (std::vector<int>{0, 1, 1}));
  EXPECT_EQ(*data.true_group, (std::vector<int>{2, 1, 3}));
  EXPECT_EQ(*data.spurious_attr, (std::vector<int>{1, 0, 1}));
  WriteCsv(data, TempPath("hand2.csv"));
  const Dataset again = LoadCsv(TempPath("hand2.csv"));
  EXPECT_EQ(again.features, data.features);
}

TEST(CsvTest, MissingGroupColumnLeavesGroupsAbsent) {
  const std::string path = TempPath("nogroup.csv");
  {
    std::ofstream out(path);
    out << "feat_0,label\n1,0\n2,1\n";
  }
  const Dataset data = LoadCsv(path);
  EXPECT_FALSE(data.true_group.has_value());
  EXPECT_THROW(GroupCounts(data), DataError);
}

TEST(CsvTest, GeneratedDatasetRoundTripsExactly) {
  GeneratorSpec spec;
  spec.n_per_class = 150;
  spec.seed = 9;
  const Dataset data = GenerateBiased(spec);
  WriteCsv(data, TempPath("gen.csv"));
  const Dataset back = LoadCsv(TempPath("gen.csv"));
  EXPECT_EQ(back.features, data.features);
  EXPECT_EQ(back.labels, data.labels);
  EXPECT_EQ(*back.true_group, *data.true_group);
  EXPECT_EQ(*back.spurious_attr, *data.spurious_attr);
  EXPECT_EQ(back.group_count, data.group_count);
}

TEST(CsvTest, ErrorsNameRowAndColumn) {
  const std::string path = TempPath("bad.csv");
  {
    std::ofstream out(path);
    out << "feat_0,feat_1,label\n1,2,0\n3,oops,1\n";
  }
  try {
    LoadCsv(path);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("row 3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("feat_1"), std::string::npos) << msg;
  }
  {
    std::ofstream out(path);
    out << "feat_0,feat_1\n1,2\n";
  }
  EXPECT_THROW(LoadCsv(path), DataError);
  {
    std::ofstream out(path);
  }
  EXPECT_THROW(LoadCsv(path), DataError);
  EXPECT_THROW(LoadCsv(TempPath("does_not_exist.csv")), DataError);
}

TEST(GroupCountsTest, SingleGroupHasOneNonzeroCell) {
  Dataset data;
  data.features = Eigen::MatrixXd::Zero(4, 1);
  data.labels = {0, 0, 0, 0};
  data.true_group = std::vector<int>{0, 0, 0, 0};
  data.group_count = 4;
  const ContingencyTable t = GroupCounts(data);
  std::size_t nonzero = 0;
  for (const auto& row : t) {
    for (std::size_t v : row) nonzero += v > 0;
  }
  EXPECT_EQ(nonzero, 1u);
  EXPECT_EQ(t[0][0], 4u);
}

TEST(GroupCountsTest, MatchesConstructionProbabilities) {
  GeneratorSpec spec;
  spec.n_per_class = 2000;
  const ContingencyTable t = GroupCounts(GenerateBiased(spec));
  // Expected cells (1900, 100, 100, 1900) within 2% of the class size.
  EXPECT_NEAR(static_cast<double>(t[2][0]), 1900.0, 40.0);
  EXPECT_NEAR(static_cast<double>(t[0][0]), 100.0, 40.0);
  EXPECT_NEAR(static_cast<double>(t[3][1]), 100.0, 40.0);
  EXPECT_NEAR(static_cast<double>(t[1][1]), 1900.0, 40.0);
  std::size_t total = 0;
  for (const auto& row : t) {
    for (std::size_t v : row) total += v;
  }
  EXPECT_EQ(total, 4000u);
}

TEST(GroupCountsTest, AssignmentRowsSumToN) {
  GeneratorSpec spec;
  spec.n_per_class = 50;
  const Dataset data = GenerateBiased(spec);
  Eigen::VectorXd p(100);
  for (int i = 0; i < 100; ++i) p(i) = (i % 3) / 2.0;
  const GroupAssignment a = AssignmentFromProbabilities(p);
  const ContingencyTable t = GroupCounts(data, &a);
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t[0][0] + t[0][1] + t[1][0] + t[1][1], 100u);
}

TEST(MinorityMaskTest, MarksCellsWhereAttrAgreesWithLabel) {
  GeneratorSpec spec;
  const Dataset data = GenerateBiased(spec);
  const std::vector<bool> mask = TrueMinorityMask(data);
  for (std::size_t i = 0; i < data.size(); ++i) {
    EXPECT_EQ(mask[i], (*data.spurious_attr)[i] == data.labels[i]);
  }
}

}  // namespace
}  // namespace grobust
