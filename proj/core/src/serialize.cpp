#include "rfrboost/serialize.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rfrboost/errors.hpp"

namespace rfrboost {

namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;

json mat_to_json(const Matrix& m) {
  json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(i, c));
  }
  j["data"] = std::move(data);
  return j;
}

Matrix mat_from_json(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto& data = j.at("data");
  if (static_cast<Eigen::Index>(data.size()) != rows * cols) {
    throw ConfigError("model document: matrix payload size mismatch");
  }
  Matrix m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = data[k++].get<double>();
  }
  return m;
}

json vec_to_json(const Vector& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Vector vec_from_json(const json& j) {
  Vector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

json rowvec_to_json(const RowVector& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

RowVector rowvec_from_json(const json& j) {
  RowVector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

std::string loss_name(LossKind kind) {
  switch (kind) {
    case LossKind::Mse: return "mse";
    case LossKind::Bce: return "bce";
    case LossKind::Cce: return "cce";
  }
  return "mse";
}

LossKind loss_from_name(const std::string& name) {
  if (name == "mse") return LossKind::Mse;
  if (name == "bce") return LossKind::Bce;
  if (name == "cce") return LossKind::Cce;
  throw ConfigError("model document: unknown loss '" + name + "'");
}

std::string structure_name(SandwichStructure s) {
  switch (s) {
    case SandwichStructure::Scalar: return "scalar";
    case SandwichStructure::Diagonal: return "diagonal";
    case SandwichStructure::Dense: return "dense";
  }
  return "dense";
}

SandwichStructure structure_from_name(const std::string& name) {
  if (name == "scalar") return SandwichStructure::Scalar;
  if (name == "diagonal") return SandwichStructure::Diagonal;
  if (name == "dense") return SandwichStructure::Dense;
  throw ConfigError("model document: unknown structure '" + name + "'");
}

std::string scheme_name(FeatureScheme s) {
  return s == FeatureScheme::Iid ? "iid" : "swim";
}

FeatureScheme scheme_from_name(const std::string& name) {
  if (name == "iid") return FeatureScheme::Iid;
  if (name == "swim") return FeatureScheme::Swim;
  throw ConfigError("model document: unknown feature scheme '" + name + "'");
}

std::string phi0_name(Phi0Kind k) {
  switch (k) {
    case Phi0Kind::Identity: return "identity";
    case Phi0Kind::RandomProjection: return "random_projection";
    case Phi0Kind::RandomFeatures: return "random_features";
  }
  return "identity";
}

Phi0Kind phi0_from_name(const std::string& name) {
  if (name == "identity") return Phi0Kind::Identity;
  if (name == "random_projection") return Phi0Kind::RandomProjection;
  if (name == "random_features") return Phi0Kind::RandomFeatures;
  throw ConfigError("model document: unknown initial map '" + name + "'");
}

json layer_to_json(const RandomFeatureLayer& layer) {
  json j;
  j["weights"] = mat_to_json(layer.weights);
  j["biases"] = vec_to_json(layer.biases);
  return j;
}

RandomFeatureLayer layer_from_json(const json& j) {
  RandomFeatureLayer layer;
  layer.weights = mat_from_json(j.at("weights"));
  layer.biases = vec_from_json(j.at("biases"));
  return layer;
}

json norm_to_json(const NormStats& norm) {
  json j;
  j["mean"] = rowvec_to_json(norm.mean);
  j["scale"] = rowvec_to_json(norm.scale);
  return j;
}

NormStats norm_from_json(const json& j) {
  NormStats norm;
  norm.mean = rowvec_from_json(j.at("mean"));
  norm.scale = rowvec_from_json(j.at("scale"));
  return norm;
}

json config_to_json(const TrainConfig& cfg) {
  json j;
  j["layers"] = cfg.layers;
  j["eta"] = cfg.eta;
  j["lambda_w"] = cfg.lambda_w;
  j["lambda_a"] = cfg.lambda_a;
  j["features_per_block"] = cfg.features_per_block;
  j["structure"] = structure_name(cfg.structure);
  j["scheme"] = scheme_name(cfg.scheme);
  j["feature_scale"] = cfg.feature_scale;
  j["seed"] = cfg.seed;
  j["feature_norm"] = cfg.feature_norm;
  j["hidden_dim"] = cfg.hidden_dim;
  return j;
}

TrainConfig config_from_json(const json& j) {
  TrainConfig cfg;
  cfg.layers = j.at("layers").get<int>();
  cfg.eta = j.at("eta").get<double>();
  cfg.lambda_w = j.at("lambda_w").get<double>();
  cfg.lambda_a = j.at("lambda_a").get<double>();
  cfg.features_per_block = j.at("features_per_block").get<int>();
  cfg.structure = structure_from_name(j.at("structure").get<std::string>());
  cfg.scheme = scheme_from_name(j.at("scheme").get<std::string>());
  cfg.feature_scale = j.at("feature_scale").get<double>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.feature_norm = j.at("feature_norm").get<bool>();
  cfg.hidden_dim = j.at("hidden_dim").get<int>();
  return cfg;
}

}  // namespace

std::string serialize_model(const BoostedModel& model) {
  json j;
  j["format"] = "rfrboost-model";
  j["version"] = kFormatVersion;
  j["loss"] = loss_name(model.loss);
  j["input_dim"] = model.input_dim;
  j["representation_dim"] = model.representation_dim;
  j["config"] = config_to_json(model.config);

  json phi0;
  phi0["kind"] = phi0_name(model.phi0.kind);
  if (model.phi0.kind == Phi0Kind::RandomProjection) {
    phi0["projection"] = mat_to_json(model.phi0.projection);
  } else if (model.phi0.kind == Phi0Kind::RandomFeatures) {
    phi0["layer"] = layer_to_json(model.phi0.layer);
    if (model.phi0.norm) phi0["norm"] = norm_to_json(*model.phi0.norm);
  }
  j["phi0"] = std::move(phi0);

  json blocks = json::array();
  for (const ResidualBlock& block : model.blocks) {
    json b;
    b["structure"] = structure_name(block.structure);
    b["layer"] = layer_to_json(block.layer);
    b["step"] = block.step;
    switch (block.structure) {
      case SandwichStructure::Scalar:
        b["coeff"] = std::get<double>(block.coeff);
        break;
      case SandwichStructure::Diagonal:
        b["coeff"] = vec_to_json(std::get<Vector>(block.coeff));
        break;
      case SandwichStructure::Dense:
        b["coeff"] = mat_to_json(std::get<Matrix>(block.coeff));
        break;
    }
    if (block.norm) b["norm"] = norm_to_json(*block.norm);
    blocks.push_back(std::move(b));
  }
  j["blocks"] = std::move(blocks);

  json head;
  head["W"] = mat_to_json(model.head.W);
  head["b"] = rowvec_to_json(model.head.b);
  j["head"] = std::move(head);

  j["risk_trace"] = model.risk_trace;
  return j.dump(2);
}

BoostedModel deserialize_model(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("model document: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != "rfrboost-model") {
      throw ConfigError("model document: unrecognized format tag");
    }
    if (j.at("version").get<int>() != kFormatVersion) {
      throw ConfigError("model document: unsupported version");
    }

    BoostedModel model;
    model.loss = loss_from_name(j.at("loss").get<std::string>());
    model.input_dim = j.at("input_dim").get<int>();
    model.representation_dim = j.at("representation_dim").get<int>();
    model.config = config_from_json(j.at("config"));

    const json& phi0 = j.at("phi0");
    model.phi0.kind = phi0_from_name(phi0.at("kind").get<std::string>());
    if (model.phi0.kind == Phi0Kind::RandomProjection) {
      model.phi0.projection = mat_from_json(phi0.at("projection"));
    } else if (model.phi0.kind == Phi0Kind::RandomFeatures) {
      model.phi0.layer = layer_from_json(phi0.at("layer"));
      if (phi0.contains("norm")) model.phi0.norm = norm_from_json(phi0.at("norm"));
    }

    for (const json& b : j.at("blocks")) {
      ResidualBlock block;
      block.structure = structure_from_name(b.at("structure").get<std::string>());
      block.layer = layer_from_json(b.at("layer"));
      block.step = b.at("step").get<double>();
      switch (block.structure) {
        case SandwichStructure::Scalar:
          block.coeff = b.at("coeff").get<double>();
          break;
        case SandwichStructure::Diagonal:
          block.coeff = vec_from_json(b.at("coeff"));
          break;
        case SandwichStructure::Dense:
          block.coeff = mat_from_json(b.at("coeff"));
          break;
      }
      if (b.contains("norm")) block.norm = norm_from_json(b.at("norm"));
      model.blocks.push_back(std::move(block));
    }

    model.head.W = mat_from_json(j.at("head").at("W"));
    model.head.b = rowvec_from_json(j.at("head").at("b"));
    model.risk_trace = j.at("risk_trace").get<std::vector<double>>();
    return model;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("model document: ") + e.what());
  }
}

void save_model(const BoostedModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IngestError("cannot open '" + path + "' for writing");
  out << serialize_model(model) << '\n';
  if (!out) throw IngestError("failed writing model to '" + path + "'");
}

BoostedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_model(buf.str());
}

}  // namespace rfrboost
