// Copyright 2026 The boxekg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <fstream>
#include <sstream>

#include "boxekg/errors.hpp"
#include "boxekg/model.hpp"
#include "json.hpp"

namespace boxekg {
namespace {

using nlohmann::json;

json tensor_to_json(const Matrix& m) {
  json t;
  t["rows"] = m.rows();
  t["cols"] = m.cols();
  t["data"] = std::vector<double>(m.data(), m.data() + m.size());
  return t;
}

void tensor_from_json(const json& t, const std::string& name, Matrix& m) {
  const auto rows = t.at("rows").get<Eigen::Index>();
  const auto cols = t.at("cols").get<Eigen::Index>();
  if (rows != m.rows() || cols != m.cols()) {
    throw DataError("checkpoint dimension mismatch: tensor " + name + " is " +
                    std::to_string(rows) + "x" + std::to_string(cols) + ", expected " +
                    std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
  const auto data = t.at("data").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(data.size()) != rows * cols) {
    throw DataError("checkpoint tensor " + name + " has wrong element count");
  }
  std::copy(data.begin(), data.end(), m.data());
}

}  // namespace

void save_model(const std::filesystem::path& path, const ModelParams& model,
                const Vocabulary& vocab) {
  if (vocab.num_entities() != model.num_entities() ||
      vocab.num_classes() != model.num_classes() ||
      vocab.num_relations() != model.num_relations()) {
    throw DimensionError("save_model: vocabulary does not match model shape");
  }
  json j;
  j["format"] = "boxekg-checkpoint";
  j["version"] = kCheckpointVersion;
  j["kind"] = "model";
  const auto& c = model.config;
  j["config"] = {{"dim", c.dim},
                 {"norm", static_cast<int>(c.norm)},
                 {"mode", to_string(c.mode)},
                 {"embedding_scale", c.embedding_scale},
                 {"hidden", c.hidden},
                 {"feature_dim", c.feature_dim}};
  j["vocab"] = {{"entities", vocab.entities()},
                {"classes", vocab.classes()},
                {"relations", vocab.relations()}};
  json tensors = json::object();
  model.for_each_tensor(
      [&](const std::string& name, const Matrix& m) { tensors[name] = tensor_to_json(m); });
  j["tensors"] = std::move(tensors);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint " + path.string());
  out << j.dump() << "\n";
}

LoadedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw DataError("corrupt checkpoint " + path.string() + ": " + e.what());
  }
  try {
    if (j.at("format") != "boxekg-checkpoint") throw DataError("not a boxekg checkpoint");
    if (j.at("version").get<int>() != kCheckpointVersion) {
      throw DataError("checkpoint version " + std::to_string(j.at("version").get<int>()) +
                      " unsupported (expected " + std::to_string(kCheckpointVersion) + ")");
    }
    if (j.at("kind") != "model") throw DataError("checkpoint does not hold a model");
    const auto& jc = j.at("config");
    ModelConfig c;
    c.dim = jc.at("dim").get<std::size_t>();
    const int norm = jc.at("norm").get<int>();
    if (norm != 1 && norm != 2) throw DataError("checkpoint has invalid norm");
    c.norm = static_cast<NormOrder>(norm);
    const auto mode = jc.at("mode").get<std::string>();
    if (mode == "boxe") {
      c.mode = ModelMode::kBoxE;
    } else if (mode == "mlp-boxe") {
      c.mode = ModelMode::kMlpBoxE;
    } else {
      throw DataError("checkpoint has unknown mode '" + mode + "'");
    }
    c.embedding_scale = jc.at("embedding_scale").get<double>();
    c.hidden = jc.at("hidden").get<std::vector<std::size_t>>();
    c.feature_dim = jc.at("feature_dim").get<std::size_t>();
    try {
      c.check();
    } catch (const UsageError& e) {
      throw DataError(std::string("checkpoint config invalid: ") + e.what());
    }

    const auto& jv = j.at("vocab");
    LoadedModel out;
    out.vocab = Vocabulary::from_names(jv.at("entities").get<std::vector<std::string>>(),
                                       jv.at("classes").get<std::vector<std::string>>(),
                                       jv.at("relations").get<std::vector<std::string>>());
    out.params = init_model(out.vocab.num_entities(), out.vocab.num_classes(),
                            out.vocab.num_relations(), c, 0);
    const auto& jt = j.at("tensors");
    std::size_t seen = 0;
    out.params.for_each_tensor([&](const std::string& name, Matrix& m) {
      if (!jt.contains(name)) throw DataError("checkpoint is missing tensor " + name);
      tensor_from_json(jt.at(name), name, m);
      ++seen;
    });
    if (seen != jt.size()) throw DataError("checkpoint has unexpected tensors");
    return out;
  } catch (const json::exception& e) {
    throw DataError("corrupt checkpoint " + path.string() + ": " + e.what());
  }
}

}  // namespace boxekg
