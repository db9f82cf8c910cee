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

#ifndef TRIAGE_MODEL_H_
#define TRIAGE_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "triage/augment.h"
#include "triage/corpus.h"
#include "triage/json.h"
#include "triage/matrix.h"
#include "triage/text.h"

namespace triage {

// Probabilities are clamped to [kProbabilityEpsilon, 1 - kProbabilityEpsilon]
// before taking logs.
inline constexpr double kProbabilityEpsilon = 1e-7;

struct TrainConfig {
  double learning_rate = 0.01;
  std::size_t epochs = 30;
  std::size_t batch_size_train = 32;
  std::size_t batch_size_test = 64;
  // Input-feature dropout rate in [0, 1).
  double dropout = 0.1;
  // Hashed feature space; ignored when an external encoder fixes the width.
  std::size_t feature_dim = 8192;
  std::uint64_t seed = 0;
  std::optional<AugmentConfig> augment;

  // Throws ValidationError.
  void validate() const;

  static TrainConfig from_json(const Json& j);
  Json to_json() const;
  bool operator==(const TrainConfig&) const = default;
};

// Best fine-tuning hyperparameters reported per dimension (no augmentation).
TrainConfig reference_fine_tuning_config(Dimension d);
// Best hyperparameters reported per dimension with augmentation (ADR, AF).
TrainConfig reference_augmentation_config(Dimension d);

// Maps a report to a fixed-width feature vector. Implementations must be
// deterministic and safe to call concurrently.
class EncoderBackend {
 public:
  virtual ~EncoderBackend() = default;
  virtual std::size_t dimension() const = 0;
  virtual SparseVector encode(std::string_view id,
                              std::string_view text) const = 0;
  // Recorded in saved models.
  virtual std::string name() const = 0;
};

// Native encoder: tokenize + featurize.
class HashingEncoder : public EncoderBackend {
 public:
  explicit HashingEncoder(std::size_t feature_dim);
  std::size_t dimension() const override { return feature_dim_; }
  SparseVector encode(std::string_view id,
                      std::string_view text) const override;
  std::string name() const override { return "hashing"; }

 private:
  std::size_t feature_dim_;
};

// Looks vectors up by report id from a file of precomputed embeddings, one
// JSON object per line: {"id": str, "vector": [float, ...]}. This is how
// external transformer encoders plug in offline.
class PrecomputedEncoder : public EncoderBackend {
 public:
  static PrecomputedEncoder load(const std::filesystem::path& path);
  static PrecomputedEncoder parse(std::string_view jsonl);

  std::size_t dimension() const override { return dimension_; }
  // Throws ValidationError for an id without an embedding.
  SparseVector encode(std::string_view id,
                      std::string_view text) const override;
  std::string name() const override { return "precomputed"; }

 private:
  std::size_t dimension_ = 0;
  std::unordered_map<std::string, SparseVector> vectors_;
};

// One independent linear layer with per-class sigmoid outputs.
struct TrainedModel {
  Dimension dimension = Dimension::kSubject;
  std::vector<std::string> classes;
  std::size_t feature_dim = 0;
  Matrix<double> weights;  // classes x feature_dim
  std::vector<double> bias;
  TrainConfig config;
  std::string encoder = "hashing";
  // Mean training loss per epoch.
  std::vector<double> loss_trace;

  std::size_t n_classes() const { return classes.size(); }

  Json to_json() const;
  static TrainedModel from_json(const Json& j);
  void save(const std::filesystem::path& path) const;
  static TrainedModel load(const std::filesystem::path& path);
};

// Untrained model: weights ~ N(0, 0.01^2) from `seed`, zero biases.
TrainedModel initial_model(Dimension dimension,
                           std::vector<std::string> classes,
                           std::size_t feature_dim, std::uint64_t seed);

double sigmoid(double z);

// Per-class probabilities sigmoid(w_c . x + b_c). Throws ValidationError if
// an index in `features` is outside the model's feature space.
std::vector<double> forward(const TrainedModel& model,
                            const SparseVector& features);

// Mean over classes of -[y ln p + (1 - y) ln(1 - p)] with clamped p.
// Throws ValidationError on a length mismatch.
double bce_loss(std::span<const double> probs,
                std::span<const std::uint8_t> labels);

struct Gradient {
  Matrix<double> weights;
  std::vector<double> bias;
};

// Mean BCE over `rows` of (features, labels) and its analytic gradient with
// respect to weights and biases.
double batch_loss(const TrainedModel& model,
                  std::span<const SparseVector> features,
                  const LabelMatrix& labels, std::span<const std::size_t> rows);
Gradient batch_gradient(const TrainedModel& model,
                        std::span<const SparseVector> features,
                        const LabelMatrix& labels,
                        std::span<const std::size_t> rows);

// Encodes every text of `view` in row order.
std::vector<SparseVector> encode_view(const DimensionView& view,
                                      const EncoderBackend& encoder);

// Mini-batch Adam (beta1 0.9, beta2 0.999, eps 1e-8) on BCE with inverted
// input dropout. When cfg.augment is set the view is augmented first.
// Throws TrainingError on an empty view or a non-finite loss.
TrainedModel train(const DimensionView& view, const TrainConfig& cfg,
                   const EncoderBackend& encoder);
// Uses a HashingEncoder of width cfg.feature_dim.
TrainedModel train(const DimensionView& view, const TrainConfig& cfg);

// One row of sigmoid scores per report. Rows are computed independently, so
// the result does not depend on `batch_size`. Throws ValidationError if the
// view's dimension or classes differ from the model's.
ScoreMatrix predict(const TrainedModel& model, const DimensionView& view,
                    const EncoderBackend& encoder, std::size_t batch_size);
ScoreMatrix predict(const TrainedModel& model, const DimensionView& view,
                    const EncoderBackend& encoder);

}  // namespace triage

#endif  // TRIAGE_MODEL_H_
