// Copyright 2026 The Report Triage Authors
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

#include "triage/model.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "triage/error.h"
#include "triage/rng.h"

namespace triage {
namespace {

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kAdamEpsilon = 1e-8;
constexpr int kModelFormatVersion = 1;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

double dot(std::span<const double> weights, const SparseVector& x) {
  double z = 0.0;
  for (std::size_t k = 0; k < x.nnz(); ++k) z += weights[x.index[k]] * x.value[k];
  return z;
}

// log(1 + e^z) without overflow.
double softplus(double z) {
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

// Mean BCE over n examples, computed from logits so that it stays exact for
// saturated outputs; adds the analytic gradient into `grad` when given.
template <typename FeatureOf, typename LabelsOf>
double loss_and_gradient(const TrainedModel& model, std::size_t n,
                         FeatureOf feature_of, LabelsOf labels_of,
                         Gradient* grad) {
  const std::size_t n_classes = model.n_classes();
  const double scale = 1.0 / (static_cast<double>(n) * n_classes);
  double total = 0.0;
  std::vector<double> logits(n_classes);
  for (std::size_t i = 0; i < n; ++i) {
    const SparseVector& x = feature_of(i);
    const std::span<const std::uint8_t> y = labels_of(i);
    double row_loss = 0.0;
    for (std::size_t c = 0; c < n_classes; ++c) {
      logits[c] = dot(model.weights.row(c), x) + model.bias[c];
      row_loss += softplus(logits[c]) - (y[c] ? logits[c] : 0.0);
    }
    total += row_loss / static_cast<double>(n_classes);
    if (grad == nullptr) continue;
    for (std::size_t c = 0; c < n_classes; ++c) {
      const double delta = (sigmoid(logits[c]) - static_cast<double>(y[c])) * scale;
      auto row = grad->weights.row(c);
      for (std::size_t k = 0; k < x.nnz(); ++k) {
        row[x.index[k]] += delta * x.value[k];
      }
      grad->bias[c] += delta;
    }
  }
  return total / static_cast<double>(n);
}

void check_rows(const TrainedModel& model,
                std::span<const SparseVector> features,
                const LabelMatrix& labels, std::span<const std::size_t> rows) {
  if (labels.cols() != model.n_classes()) {
    throw ValidationError("label width does not match the model's classes");
  }
  for (std::size_t r : rows) {
    if (r >= features.size() || r >= labels.rows()) {
      throw ValidationError("row index out of range");
    }
  }
  if (rows.empty()) throw ValidationError("empty batch");
}

SparseVector apply_dropout(const SparseVector& x, double rate, Rng& rng) {
  if (rate <= 0.0) return x;
  SparseVector out;
  const double keep_scale = 1.0 / (1.0 - rate);
  for (std::size_t k = 0; k < x.nnz(); ++k) {
    if (rng.uniform() >= rate) {
      out.index.push_back(x.index[k]);
      out.value.push_back(x.value[k] * keep_scale);
    }
  }
  return out;
}

void check_compatible(const TrainedModel& model, const DimensionView& view,
                      const EncoderBackend& encoder) {
  if (view.dimension != model.dimension || view.classes != model.classes) {
    throw ValidationError("model for '" +
                          std::string(dimension_key(model.dimension)) +
                          "' does not match the view's taxonomy");
  }
  if (encoder.dimension() != model.feature_dim) {
    throw ValidationError("encoder width " +
                          std::to_string(encoder.dimension()) +
                          " differs from model feature_dim " +
                          std::to_string(model.feature_dim));
  }
}

}  // namespace

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ValidationError("learning_rate must be positive");
  }
  if (epochs < 1 || batch_size_train < 1 || batch_size_test < 1 ||
      feature_dim < 1) {
    throw ValidationError(
        "epochs, batch sizes and feature_dim must be at least 1");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) {
    throw ValidationError("dropout must lie in [0, 1)");
  }
  if (augment) augment->validate();
}

TrainConfig TrainConfig::from_json(const Json& j) {
  TrainConfig cfg;
  cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
  cfg.epochs = j.value("epochs", cfg.epochs);
  cfg.batch_size_train = j.value("batch_size_train", cfg.batch_size_train);
  cfg.batch_size_test = j.value("batch_size_test", cfg.batch_size_test);
  cfg.dropout = j.value("dropout", cfg.dropout);
  cfg.feature_dim = j.value("feature_dim", cfg.feature_dim);
  cfg.seed = j.value("seed", cfg.seed);
  if (const auto it = j.find("augment"); it != j.end() && !it->is_null()) {
    cfg.augment = AugmentConfig::from_json(*it);
  }
  cfg.validate();
  return cfg;
}

Json TrainConfig::to_json() const {
  Json j;
  j["learning_rate"] = learning_rate;
  j["epochs"] = epochs;
  j["batch_size_train"] = batch_size_train;
  j["batch_size_test"] = batch_size_test;
  j["dropout"] = dropout;
  j["feature_dim"] = feature_dim;
  j["seed"] = seed;
  j["augment"] = augment ? augment->to_json() : Json(nullptr);
  return j;
}

TrainConfig reference_fine_tuning_config(Dimension d) {
  TrainConfig cfg;
  switch (d) {
    case Dimension::kSubject:
      cfg.batch_size_train = 41;
      cfg.batch_size_test = 68;
      cfg.learning_rate = 1.217e-5;
      cfg.epochs = 144;
      cfg.dropout = 0.448;
      break;
    case Dimension::kCriminality:
      cfg.batch_size_train = 167;
      cfg.batch_size_test = 39;
      cfg.learning_rate = 4.634e-5;
      cfg.epochs = 116;
      cfg.dropout = 0.218;
      break;
    case Dimension::kDamage:
      cfg.batch_size_train = 54;
      cfg.batch_size_test = 171;
      cfg.learning_rate = 5.804e-5;
      cfg.epochs = 10;
      cfg.dropout = 0.485;
      break;
  }
  return cfg;
}

TrainConfig reference_augmentation_config(Dimension d) {
  TrainConfig cfg;
  AugmentConfig aug;
  switch (d) {
    case Dimension::kSubject:
      cfg.batch_size_train = 75;
      cfg.batch_size_test = 212;
      cfg.learning_rate = 3.569e-6;
      cfg.epochs = 140;
      cfg.dropout = 0.247;
      aug.adr = 0.098;
      aug.af = 4.354;
      break;
    case Dimension::kCriminality:
      cfg.batch_size_train = 221;
      cfg.batch_size_test = 89;
      cfg.learning_rate = 8.399e-6;
      cfg.epochs = 13;
      cfg.dropout = 0.435;
      aug.adr = 0.061;
      aug.af = 8.77;
      break;
    case Dimension::kDamage:
      cfg.batch_size_train = 200;
      cfg.batch_size_test = 169;
      cfg.learning_rate = 1.212e-5;
      cfg.epochs = 91;
      cfg.dropout = 0.498;
      aug.adr = 0.856;
      aug.af = 1.532;
      break;
  }
  cfg.augment = aug;
  return cfg;
}

HashingEncoder::HashingEncoder(std::size_t feature_dim)
    : feature_dim_(feature_dim) {
  if (feature_dim == 0) throw ValidationError("feature_dim must be positive");
}

SparseVector HashingEncoder::encode(std::string_view /*id*/,
                                    std::string_view text) const {
  return featurize(tokenize(text), feature_dim_);
}

PrecomputedEncoder PrecomputedEncoder::load(const std::filesystem::path& path) {
  return parse(read_file(path));
}

PrecomputedEncoder PrecomputedEncoder::parse(std::string_view jsonl) {
  PrecomputedEncoder encoder;
  std::size_t line_no = 0;
  std::istringstream in{std::string(jsonl)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::exception& e) {
      throw ParseError(std::string("malformed embedding: ") + e.what(), line_no);
    }
    if (!j.is_object() || !j.contains("id") || !j["id"].is_string() ||
        !j.contains("vector") || !j["vector"].is_array()) {
      throw ParseError("embedding needs string 'id' and array 'vector'",
                       line_no);
    }
    const auto values = j["vector"].get<std::vector<double>>();
    if (encoder.dimension_ == 0) encoder.dimension_ = values.size();
    if (values.empty() || values.size() != encoder.dimension_) {
      throw ValidationError("line " + std::to_string(line_no) +
                            ": embedding width " +
                            std::to_string(values.size()) + " != " +
                            std::to_string(encoder.dimension_));
    }
    SparseVector v;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!std::isfinite(values[i])) {
        throw ValidationError("line " + std::to_string(line_no) +
                              ": non-finite embedding value");
      }
      if (values[i] != 0.0) {
        v.index.push_back(static_cast<std::uint32_t>(i));
        v.value.push_back(values[i]);
      }
    }
    const auto id = j["id"].get<std::string>();
    if (!encoder.vectors_.emplace(id, std::move(v)).second) {
      throw ValidationError("line " + std::to_string(line_no) +
                            ": duplicate embedding id '" + id + "'");
    }
  }
  if (encoder.dimension_ == 0) throw ValidationError("no embeddings found");
  return encoder;
}

SparseVector PrecomputedEncoder::encode(std::string_view id,
                                        std::string_view /*text*/) const {
  const auto it = vectors_.find(std::string(id));
  if (it == vectors_.end()) {
    throw ValidationError("no precomputed embedding for report '" +
                          std::string(id) + "'");
  }
  return it->second;
}

Json TrainedModel::to_json() const {
  Json j;
  j["format"] = "report-triage-model";
  j["version"] = kModelFormatVersion;
  j["dimension"] = dimension_key(dimension);
  j["classes"] = classes;
  j["feature_dim"] = feature_dim;
  j["encoder"] = encoder;
  j["config"] = config.to_json();
  j["bias"] = bias;
  Json rows = Json::array();
  for (std::size_t c = 0; c < weights.rows(); ++c) {
    const auto row = weights.row(c);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  j["weights"] = std::move(rows);
  j["loss_trace"] = loss_trace;
  return j;
}

TrainedModel TrainedModel::from_json(const Json& j) {
  if (j.value("format", "") != "report-triage-model") {
    throw ParseError("not a report-triage model file");
  }
  if (j.value("version", 0) != kModelFormatVersion) {
    throw ParseError("unsupported model version " +
                     std::to_string(j.value("version", 0)));
  }
  TrainedModel m;
  try {
    m.dimension = parse_dimension(j.at("dimension").get<std::string>());
    m.classes = j.at("classes").get<std::vector<std::string>>();
    m.feature_dim = j.at("feature_dim").get<std::size_t>();
    m.encoder = j.value("encoder", "hashing");
    m.config = TrainConfig::from_json(j.at("config"));
    m.bias = j.at("bias").get<std::vector<double>>();
    m.loss_trace = j.value("loss_trace", std::vector<double>{});
    const auto& rows = j.at("weights");
    if (rows.size() != m.classes.size() || m.bias.size() != m.classes.size()) {
      throw ValidationError("weights/bias do not match the class list");
    }
    m.weights = Matrix<double>(m.classes.size(), m.feature_dim);
    for (std::size_t c = 0; c < rows.size(); ++c) {
      const auto values = rows[c].get<std::vector<double>>();
      if (values.size() != m.feature_dim) {
        throw ValidationError("weight row width != feature_dim");
      }
      std::copy(values.begin(), values.end(), m.weights.row(c).begin());
    }
  } catch (const Json::exception& e) {
    throw ParseError(std::string("invalid model file: ") + e.what());
  }
  for (double w : m.weights.data()) {
    if (!std::isfinite(w)) throw ValidationError("model has non-finite weights");
  }
  return m;
}

void TrainedModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << to_json().dump() << '\n';
}

TrainedModel TrainedModel::load(const std::filesystem::path& path) {
  try {
    return from_json(Json::parse(read_file(path)));
  } catch (const Json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

TrainedModel initial_model(Dimension dimension,
                           std::vector<std::string> classes,
                           std::size_t feature_dim, std::uint64_t seed) {
  TrainedModel m;
  m.dimension = dimension;
  m.classes = std::move(classes);
  m.feature_dim = feature_dim;
  m.weights = Matrix<double>(m.classes.size(), feature_dim);
  m.bias.assign(m.classes.size(), 0.0);
  Rng rng(seed);
  for (double& w : m.weights.data()) w = 0.01 * rng.normal();
  return m;
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

std::vector<double> forward(const TrainedModel& model,
                            const SparseVector& features) {
  for (std::uint32_t index : features.index) {
    if (index >= model.feature_dim) {
      throw ValidationError("feature index " + std::to_string(index) +
                            " outside feature_dim " +
                            std::to_string(model.feature_dim));
    }
  }
  std::vector<double> probs(model.n_classes());
  for (std::size_t c = 0; c < probs.size(); ++c) {
    probs[c] = sigmoid(dot(model.weights.row(c), features) + model.bias[c]);
  }
  return probs;
}

double bce_loss(std::span<const double> probs,
                std::span<const std::uint8_t> labels) {
  if (probs.size() != labels.size()) {
    throw ValidationError("bce_loss: " + std::to_string(probs.size()) +
                          " probabilities vs " + std::to_string(labels.size()) +
                          " labels");
  }
  if (probs.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p =
        std::clamp(probs[i], kProbabilityEpsilon, 1.0 - kProbabilityEpsilon);
    sum -= labels[i] ? std::log(p) : std::log(1.0 - p);
  }
  return sum / static_cast<double>(probs.size());
}

double batch_loss(const TrainedModel& model,
                  std::span<const SparseVector> features,
                  const LabelMatrix& labels,
                  std::span<const std::size_t> rows) {
  check_rows(model, features, labels, rows);
  return loss_and_gradient(
      model, rows.size(),
      [&](std::size_t i) -> const SparseVector& { return features[rows[i]]; },
      [&](std::size_t i) { return labels.row(rows[i]); }, nullptr);
}

Gradient batch_gradient(const TrainedModel& model,
                        std::span<const SparseVector> features,
                        const LabelMatrix& labels,
                        std::span<const std::size_t> rows) {
  check_rows(model, features, labels, rows);
  Gradient grad{Matrix<double>(model.n_classes(), model.feature_dim),
                std::vector<double>(model.n_classes(), 0.0)};
  loss_and_gradient(
      model, rows.size(),
      [&](std::size_t i) -> const SparseVector& { return features[rows[i]]; },
      [&](std::size_t i) { return labels.row(rows[i]); }, &grad);
  return grad;
}

std::vector<SparseVector> encode_view(const DimensionView& view,
                                      const EncoderBackend& encoder) {
  std::vector<SparseVector> out;
  out.reserve(view.size());
  for (std::size_t r = 0; r < view.size(); ++r) {
    out.push_back(encoder.encode(view.ids[r], view.texts[r]));
  }
  return out;
}

TrainedModel train(const DimensionView& view, const TrainConfig& cfg,
                   const EncoderBackend& encoder) {
  cfg.validate();
  if (view.empty()) throw TrainingError("cannot train on an empty view");
  const DimensionView data =
      cfg.augment ? augment_dataset(view, *cfg.augment) : view;
  const auto features = encode_view(data, encoder);

  TrainedModel model =
      initial_model(view.dimension, view.classes, encoder.dimension(),
                    derive_seed(cfg.seed, "init"));
  model.config = cfg;
  model.encoder = encoder.name();
  const std::size_t n_classes = model.n_classes();
  const std::size_t width = model.feature_dim;

  Matrix<double> m_w(n_classes, width), v_w(n_classes, width);
  std::vector<double> m_b(n_classes, 0.0), v_b(n_classes, 0.0);
  Gradient grad{Matrix<double>(n_classes, width),
                std::vector<double>(n_classes, 0.0)};

  Rng order_rng(derive_seed(cfg.seed, "batches"));
  Rng dropout_rng(derive_seed(cfg.seed, "dropout"));
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<SparseVector> batch;
  std::size_t step = 0;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    order_rng.shuffle(order.begin(), order.end());
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size();
         start += cfg.batch_size_train) {
      const std::size_t end =
          std::min(order.size(), start + cfg.batch_size_train);
      batch.clear();
      for (std::size_t i = start; i < end; ++i) {
        batch.push_back(apply_dropout(features[order[i]], cfg.dropout,
                                      dropout_rng));
      }
      std::fill(grad.weights.data().begin(), grad.weights.data().end(), 0.0);
      std::fill(grad.bias.begin(), grad.bias.end(), 0.0);
      const double loss = loss_and_gradient(
          model, batch.size(),
          [&](std::size_t i) -> const SparseVector& { return batch[i]; },
          [&](std::size_t i) { return data.labels.row(order[start + i]); },
          &grad);
      if (!std::isfinite(loss)) {
        throw TrainingError("non-finite loss at epoch " +
                            std::to_string(epoch + 1) + " (learning_rate " +
                            std::to_string(cfg.learning_rate) + ")");
      }
      loss_sum += loss * static_cast<double>(batch.size());

      ++step;
      const double correction1 = 1.0 - std::pow(kBeta1, step);
      const double correction2 = 1.0 - std::pow(kBeta2, step);
      auto adam = [&](double& param, double& m, double& v, double g) {
        m = kBeta1 * m + (1.0 - kBeta1) * g;
        v = kBeta2 * v + (1.0 - kBeta2) * g * g;
        param -= cfg.learning_rate * (m / correction1) /
                 (std::sqrt(v / correction2) + kAdamEpsilon);
      };
      auto w = model.weights.data();
      auto gw = grad.weights.data();
      auto mw = m_w.data();
      auto vw = v_w.data();
      for (std::size_t i = 0; i < w.size(); ++i) adam(w[i], mw[i], vw[i], gw[i]);
      for (std::size_t c = 0; c < n_classes; ++c) {
        adam(model.bias[c], m_b[c], v_b[c], grad.bias[c]);
      }
    }
    const double epoch_loss = loss_sum / static_cast<double>(order.size());
    if (!std::isfinite(epoch_loss)) {
      throw TrainingError("non-finite loss at epoch " +
                          std::to_string(epoch + 1));
    }
    model.loss_trace.push_back(epoch_loss);
  }
  for (double w : model.weights.data()) {
    if (!std::isfinite(w)) throw TrainingError("training produced non-finite weights");
  }
  return model;
}

TrainedModel train(const DimensionView& view, const TrainConfig& cfg) {
  return train(view, cfg, HashingEncoder(cfg.feature_dim));
}

ScoreMatrix predict(const TrainedModel& model, const DimensionView& view,
                    const EncoderBackend& encoder, std::size_t batch_size) {
  check_compatible(model, view, encoder);
  if (batch_size == 0) throw ValidationError("batch size must be positive");
  ScoreMatrix scores(view.size(), model.n_classes());
  for (std::size_t start = 0; start < view.size(); start += batch_size) {
    const std::size_t end = std::min(view.size(), start + batch_size);
    for (std::size_t r = start; r < end; ++r) {
      const auto probs = forward(model, encoder.encode(view.ids[r], view.texts[r]));
      std::copy(probs.begin(), probs.end(), scores.row(r).begin());
    }
  }
  return scores;
}

ScoreMatrix predict(const TrainedModel& model, const DimensionView& view,
                    const EncoderBackend& encoder) {
  return predict(model, view, encoder, model.config.batch_size_test);
}

}  // namespace triage
