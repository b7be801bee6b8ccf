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

#include "grobust/margin.h"

#include <cmath>

#include <gtest/gtest.h>

#include "grobust/error.h"

namespace grobust {
namespace {

Dataset LineData() {
  Dataset data;
  data.num_classes = 2;
  data.features.resize(4, 2);
  data.features << -3, 0,
                   -1, 5,
                    2, 0,
                    0.5, -4;
  data.labels = {0, 0, 1, 1};
  return data;
}

TEST(MarginTest, SignedDistanceToDecisionBoundary) {
  Model m = Model::Zeros(Architecture::kLinear, 2, 2);
  // logit_1 - logit_0 = 2 x0, boundary x0 = 0, norm of w1 - w0 is 2.
  m.layers()[0].weight(1, 0) = 1.0;
  m.layers()[0].weight(0, 0) = -1.0;
  const std::vector<double> got = SignedMargins(m, LineData());
  const std::vector<double> want = {3.0, 1.0, 2.0, 0.5};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(got[i], want[i], 1e-12);
}

TEST(MarginTest, MisclassifiedPointsAreNegative) {
  Model m = Model::Zeros(Architecture::kLinear, 2, 2);
  m.layers()[0].weight(1, 0) = -1.0;
  const std::vector<double> got = SignedMargins(m, LineData());
  for (double v : got) EXPECT_LT(v, 0.0);
}

TEST(MarginTest, ProbeSplitsSides) {
  Model m = Model::Zeros(Architecture::kLinear, 2, 2);
  m.layers()[0].weight(1, 0) = 1.0;
  const MarginProbeResult r =
      MarginProbe(m, LineData(), {false, true, false, true});
  EXPECT_NEAR(r.majority, 2.0, 1e-12);
  EXPECT_NEAR(r.minority, 0.5, 1e-12);
  EXPECT_NEAR(r.majority_mean, 2.5, 1e-12);
  EXPECT_NEAR(r.minority_mean, 0.75, 1e-12);
  EXPECT_THROW(MarginProbe(m, LineData(), {false, false, false, false}),
               InvalidArgument);
}

TEST(MarginTest, HiddenLayerModelsAreUnsupported) {
  Dataset data = LineData();
  const Model m = Model::Zeros(Architecture::kOneHidden, 2, 2, 4);
  try {
    SignedMargins(m, data);
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("unsupported architecture"),
              std::string::npos);
  }
}

}  // namespace
}  // namespace grobust
