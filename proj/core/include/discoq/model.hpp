// Copyright 2025 The discoq authors
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

#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "discoq/dataset.hpp"
#include "discoq/simulator.hpp"

namespace discoq {

enum class EncoderKind : std::uint8_t { Mhe, Angle, Amplitude };
enum class Alignment : std::uint8_t { TrainableBox, Widen };

std::string_view encoder_name(EncoderKind e);
EncoderKind encoder_from_name(std::string_view s);
std::string_view alignment_name(Alignment a);
Alignment alignment_from_name(std::string_view s);

/// Owner key of the shared image-box parameter block.
inline constexpr const char* kImageBoxOwner = "IMG_BOX";

struct MatcherConfig {
  EncoderKind encoder = EncoderKind::Mhe;
  Alignment alignment = Alignment::TrainableBox;
  int layers = 3;
  int box_layers = 1;
  int noun_qubits = 1;
  int pca_dim = 9;           // angle encoding: PCA features = qubits
  int amplitude_qubits = 12; // amplitude encoding register width
  GateKind entangler = GateKind::CRz;

  /// Width of the image register after state preparation.
  int image_qubits() const;
  /// Sentence wire width: 1 under the trainable box, the image width when
  /// the sentence space is widened to match it.
  int sentence_qubits() const;
  void validate() const;
};

/// Assembles caption circuits and image states into matching scores and the
/// contrastive loss. Caption circuits and per-record image preparations are
/// cached; all caches are safe for concurrent readers.
class QuantumMatcher {
 public:
  explicit QuantumMatcher(MatcherConfig config);

  const MatcherConfig& config() const { return config_; }
  ParameterRegistry& registry() { return registry_; }
  const ParameterRegistry& registry() const { return registry_; }

  /// Fits the feature pipeline (PCA + angle rescaling) on the training
  /// records. Required before scoring for the angle/amplitude encoders.
  void fit(std::span<const CaptionRecord> train_records);
  /// Restores a previously fitted pipeline (checkpoint loading).
  void set_pca(PcaModel pca) { pca_ = std::move(pca); }
  void set_scaler(AngleScaler scaler) { scaler_ = std::move(scaler); }
  const std::optional<PcaModel>& pca() const { return pca_; }
  const std::optional<AngleScaler>& scaler() const { return scaler_; }

  const Circuit& caption_circuit(const std::string& caption) const;
  Circuit image_prep_circuit(const FeatureVector& features) const;
  /// Trainable IQP block appended after image preparation; postselects all
  /// but the last image qubit. Only present under TrainableBox alignment.
  const Circuit& box_circuit() const;

  StateVector caption_state(const std::string& caption,
                            const ParameterVector& params) const;
  StateVector image_state(const FeatureVector& features,
                          const ParameterVector& params) const;
  /// Record-keyed variant that reuses the cached preparation stage.
  StateVector image_state(const CaptionRecord& record,
                          const ParameterVector& params) const;

  /// |<caption|image>|^2 of the two normalized output states.
  double score(const std::string& caption, const FeatureVector& features,
               const ParameterVector& params) const;

  /// Contrastive loss -ln clamp(p+) - ln clamp(1 - p-) over the record's
  /// positive and negative captions.
  double loss(const CaptionRecord& record, const ParameterVector& params) const;
  struct LossGrad {
    double loss = 0.0;
    std::vector<double> grad;
  };
  LossGrad loss_grad(const CaptionRecord& record,
                     const ParameterVector& params) const;

  int parameter_count() const { return registry_.size(); }
  /// Distinct trainable parameters referenced by one caption's circuit.
  int caption_parameter_count(const std::string& caption) const;

  /// Compiles every task caption (and, under TrainableBox, the box) so the
  /// registry is complete and later lookups are read-only.
  void precompile_captions();
  /// Runs and caches the constant state-preparation stage per record id.
  void precompute_image_states(std::span<const CaptionRecord> records) const;

  ParameterVector init_params(std::mt19937_64& rng) const;

 private:
  const StateVector& prep_state(const std::string& record_id,
                                const FeatureVector& features) const;
  StateVector prep_state_uncached(const FeatureVector& features) const;

  MatcherConfig config_;
  mutable ParameterRegistry registry_;
  std::optional<PcaModel> pca_;
  std::optional<AngleScaler> scaler_;

  mutable std::mutex caption_mutex_;
  mutable std::unordered_map<std::string, std::unique_ptr<Circuit>> captions_;
  mutable std::mutex image_mutex_;
  mutable std::unordered_map<std::string, std::unique_ptr<StateVector>>
      image_states_;
  mutable std::once_flag box_once_;
  mutable std::unique_ptr<Circuit> box_;
};

/// Helper shared by the quantum and classical pipelines.
double contrastive_bce(double p_pos, double p_neg);

/// Classical DisCoCat baseline: one vector per shape, one d x d matrix per
/// relation, Copy-Subj composition subj (.) (Rel . obj). Parameters live in
/// one flat vector so the optimizer can treat both model families alike.
class ClassicalModel {
 public:
  explicit ClassicalModel(int dim);

  int dim() const { return dim_; }
  int parameter_count() const { return static_cast<int>(params_.size()); }
  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }

  std::span<double> noun(Shape s);
  std::span<const double> noun(Shape s) const;
  std::span<double> relation(Relation r);  // row-major d x d
  std::span<const double> relation(Relation r) const;

  /// i.i.d. Gaussian init, mean 0, sd 0.1.
  void init(std::mt19937_64& rng);

 private:
  int dim_;
  std::vector<double> params_;  // 4 noun vectors then 2 relation matrices
};

/// subj (.) (Rel . obj): elementwise product of the subject vector with the
/// matrix-vector product.
std::vector<double> classical_sentence_vec(const ClassicalModel& m,
                                           Shape subject, Relation relation,
                                           Shape object);
/// <image | sentence_vec>, the raw matching score.
double classical_score(const ClassicalModel& m, std::span<const double> image,
                       Shape subject, Relation relation, Shape object);
/// -log sigma(<m|pos>) - log sigma(-<m|neg>).
double classical_loss(const ClassicalModel& m, std::span<const double> image,
                      const CaptionTriple& pos, const CaptionTriple& neg);
struct ClassicalLossGrad {
  double loss = 0.0;
  std::vector<double> grad;  // same layout as ClassicalModel::params()
};
ClassicalLossGrad classical_loss_grad(const ClassicalModel& m,
                                      std::span<const double> image,
                                      const CaptionTriple& pos,
                                      const CaptionTriple& neg);

}  // namespace discoq
