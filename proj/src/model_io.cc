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

#include "grobust/model_io.h"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "grobust/error.h"

namespace grobust {

void SaveModel(const Model& model, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw DataError("cannot write '" + path + "'");
  std::fprintf(f, "grobust-model 1\n");
  std::fprintf(f, "architecture %s\n",
               ArchitectureName(model.architecture()).c_str());
  std::fprintf(f, "input_dim %d\n", model.input_dim());
  std::fprintf(f, "num_classes %d\n", model.num_classes());
  std::fprintf(f, "hidden_units %d\n",
               model.architecture() == Architecture::kOneHidden
                   ? model.hidden_units()
                   : 0);
  const Eigen::VectorXd values = model.Flatten();
  std::fprintf(f, "parameters %ld\n", static_cast<long>(values.size()));
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    std::fprintf(f, "%.17g\n", values(i));
  }
  if (std::fclose(f) != 0) throw DataError("error writing '" + path + "'");
}

Model LoadModel(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  auto expect = [&](const std::string& key) {
    std::string word;
    if (!(in >> word) || word != key) {
      throw DataError("'" + path + "': expected '" + key + "'");
    }
  };
  expect("grobust-model");
  int version = 0;
  in >> version;
  if (version != 1) throw DataError("'" + path + "': unsupported version");
  std::string arch_name;
  int input_dim = 0, num_classes = 0, hidden = 0;
  long count = 0;
  expect("architecture");
  in >> arch_name;
  expect("input_dim");
  in >> input_dim;
  expect("num_classes");
  in >> num_classes;
  expect("hidden_units");
  in >> hidden;
  expect("parameters");
  in >> count;
  if (!in) throw DataError("'" + path + "': malformed header");
  const Architecture arch = ParseArchitecture(arch_name);
  Model model = Model::Zeros(arch, input_dim, num_classes,
                             arch == Architecture::kOneHidden ? hidden : 32);
  if (count != static_cast<long>(model.NumParameters())) {
    throw DataError("'" + path + "': parameter count does not match shape");
  }
  Eigen::VectorXd values(count);
  for (long i = 0; i < count; ++i) {
    std::string token;
    if (!(in >> token)) throw DataError("'" + path + "': truncated parameters");
    try {
      values(i) = std::stod(token);
    } catch (const std::exception&) {
      throw DataError("'" + path + "': bad parameter '" + token + "'");
    }
  }
  model.Unflatten(values);
  return model;
}

}  // namespace grobust
