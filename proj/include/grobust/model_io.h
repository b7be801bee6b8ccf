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

#ifndef GROBUST_MODEL_IO_H_
#define GROBUST_MODEL_IO_H_

#include <string>

#include "grobust/diffmodel.h"

namespace grobust {

// Plain-text format with 17 significant digits; loading restores the exact
// parameters.
void SaveModel(const Model& model, const std::string& path);
Model LoadModel(const std::string& path);

}  // namespace grobust

#endif  // GROBUST_MODEL_IO_H_
