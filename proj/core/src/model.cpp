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

#include "discoq/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "discoq/errors.hpp"

namespace discoq {

namespace {

constexpr double kClampLo = 1e-9;
constexpr double kClampHi = 1.0 - 1e-9;

double clamp_prob(double p) { return std::clamp(p, kClampLo, kClampHi); }
bool clamp_active(double p) { return p <= kClampLo || p >= kClampHi; }

double sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// log(1 + exp(x)) without overflow; -log sigmoid(x) = softplus(-x).
double softplus(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

}  // namespace

std::string_view encoder_name(EncoderKind e) {
  switch (e) {
    case EncoderKind::Mhe:
      return "mhe";
    case EncoderKind::Angle:
      return "angle";
    case EncoderKind::Amplitude:
      return "amplitude";
  }
  throw ValidationError("unknown encoder kind");
}

EncoderKind encoder_from_name(std::string_view s) {
  if (s == "mhe") return EncoderKind::Mhe;
  if (s == "angle") return EncoderKind::Angle;
  if (s == "amplitude") return EncoderKind::Amplitude;
  throw ValidationError("unknown encoder name: " + std::string(s));
}

std::string_view alignment_name(Alignment a) {
  return a == Alignment::TrainableBox ? "box" : "widen";
}

Alignment alignment_from_name(std::string_view s) {
  if (s == "box") return Alignment::TrainableBox;
  if (s == "widen") return Alignment::Widen;
  throw ValidationError("unknown alignment name: " + std::string(s));
}

int MatcherConfig::image_qubits() const {
  switch (encoder) {
    case EncoderKind::Mhe:
      return 3;  // 8-dim multi-hot vector, amplitude-loaded
    case EncoderKind::Angle:
      return pca_dim;
    case EncoderKind::Amplitude:
      return amplitude_qubits;
  }
  throw ValidationError("unknown encoder kind");
}

int MatcherConfig::sentence_qubits() const {
  return alignment == Alignment::TrainableBox ? 1 : image_qubits();
}

void MatcherConfig::validate() const {
  if (layers < 1) throw ValidationError("layers must be >= 1");
  if (box_layers < 1) throw ValidationError("box_layers must be >= 1");
  if (noun_qubits < 1) throw ValidationError("noun_qubits must be >= 1");
  if (encoder == EncoderKind::Angle && pca_dim < 2) {
    throw ValidationError("angle encoding needs pca_dim >= 2");
  }
  if (amplitude_qubits < 1 || amplitude_qubits > kMaxQubits) {
    throw ValidationError("amplitude_qubits out of range");
  }
  if (entangler != GateKind::CRz && entangler != GateKind::CRx) {
    throw ValidationError("entangler must be CRz or CRx");
  }
}

QuantumMatcher::QuantumMatcher(MatcherConfig config)
    : config_(std::move(config)) {
  config_.validate();
}

void QuantumMatcher::fit(std::span<const CaptionRecord> train_records) {
  if (config_.encoder != EncoderKind::Angle) return;
  if (train_records.empty()) {
    throw ValidationError("fit needs training records");
  }
  std::vector<std::vector<double>> data;
  data.reserve(train_records.size());
  for (const auto& r : train_records) data.push_back(r.features.values);
  pca_ = pca_fit(data, config_.pca_dim);
  std::vector<std::vector<double>> projected;
  projected.reserve(data.size());
  for (const auto& row : data) projected.push_back(pca_apply(*pca_, row));
  scaler_ = AngleScaler::fit(projected);
}

const Circuit& QuantumMatcher::caption_circuit(
    const std::string& caption) const {
  {
    std::lock_guard<std::mutex> lock(caption_mutex_);
    auto it = captions_.find(caption);
    if (it != captions_.end()) return *it->second;
  }
  Derivation d = parse(caption, Lexicon::builtin());
  Diagram diag = diagram_from_derivation(d);
  AnsatzConfig cfg;
  cfg.qubits = {{BasicType::Noun, config_.noun_qubits},
                {BasicType::Prep, 1},
                {BasicType::Sentence, config_.sentence_qubits()}};
  cfg.layers = config_.layers;
  cfg.entangler = config_.entangler;
  auto compiled = std::make_unique<Circuit>(compile(diag, cfg, registry_));
  std::lock_guard<std::mutex> lock(caption_mutex_);
  auto [it, inserted] = captions_.emplace(caption, std::move(compiled));
  return *it->second;
}

Circuit QuantumMatcher::image_prep_circuit(
    const FeatureVector& features) const {
  switch (config_.encoder) {
    case EncoderKind::Mhe:
      return amplitude_encode(features.values, 3);
    case EncoderKind::Angle: {
      if (!pca_ || !scaler_) {
        throw ValidationError("angle encoder not fitted; call fit() first");
      }
      const std::vector<double> projected =
          pca_apply(*pca_, features.values);
      return angle_encode(projected, *scaler_);
    }
    case EncoderKind::Amplitude:
      return amplitude_encode(features.values, config_.amplitude_qubits);
  }
  throw ValidationError("unknown encoder kind");
}

const Circuit& QuantumMatcher::box_circuit() const {
  if (config_.alignment != Alignment::TrainableBox) {
    throw ValidationError("box circuit only exists under box alignment");
  }
  std::call_once(box_once_, [this] {
    const int k = config_.image_qubits();
    std::vector<int> qubits;
    for (int q = 0; q < k; ++q) qubits.push_back(q);
    auto box = std::make_unique<Circuit>();
    box->n_qubits = k;
    box->gates = word_circuit(kImageBoxOwner, qubits, config_.box_layers,
                              config_.entangler, registry_);
    // Close the IQP sandwich with a trailing Hadamard wall. Without it the
    // box's diagonal entanglers only phase amplitudes whose control qubit
    // is postselected to 0, so every box parameter would be discarded by
    // the box's own postselection.
    if (k >= 2) {
      for (int q = 0; q < k; ++q) box->gates.push_back({GateKind::H, q});
    }
    for (int q = 0; q + 1 < k; ++q) box->postselect[q] = 0;
    box->output_qubits = {k - 1};
    box->validate();
    box_ = std::move(box);
  });
  return *box_;
}

StateVector QuantumMatcher::prep_state_uncached(
    const FeatureVector& features) const {
  return run(image_prep_circuit(features), ParameterVector());
}

const StateVector& QuantumMatcher::prep_state(
    const std::string& record_id, const FeatureVector& features) const {
  {
    std::lock_guard<std::mutex> lock(image_mutex_);
    auto it = image_states_.find(record_id);
    if (it != image_states_.end()) return *it->second;
  }
  auto state = std::make_unique<StateVector>(prep_state_uncached(features));
  std::lock_guard<std::mutex> lock(image_mutex_);
  auto [it, inserted] = image_states_.emplace(record_id, std::move(state));
  return *it->second;
}

void QuantumMatcher::precompute_image_states(
    std::span<const CaptionRecord> records) const {
  for (const auto& r : records) prep_state(r.id, r.features);
}

void QuantumMatcher::precompile_captions() {
  for (const auto& triple : enumerate_captions()) {
    caption_circuit(triple.caption());
  }
  if (config_.alignment == Alignment::TrainableBox) box_circuit();
}

StateVector QuantumMatcher::caption_state(const std::string& caption,
                                          const ParameterVector& params) const {
  return run(caption_circuit(caption), params);
}

StateVector QuantumMatcher::image_state(const FeatureVector& features,
                                        const ParameterVector& params) const {
  StateVector prep = prep_state_uncached(features);
  if (config_.alignment == Alignment::Widen) return prep;
  return run(box_circuit(), params, prep);
}

StateVector QuantumMatcher::image_state(const CaptionRecord& record,
                                        const ParameterVector& params) const {
  const StateVector& prep = prep_state(record.id, record.features);
  if (config_.alignment == Alignment::Widen) return prep;
  return run(box_circuit(), params, prep);
}

double QuantumMatcher::score(const std::string& caption,
                             const FeatureVector& features,
                             const ParameterVector& params) const {
  return overlap(caption_state(caption, params),
                 image_state(features, params));
}

double contrastive_bce(double p_pos, double p_neg) {
  return -std::log(clamp_prob(p_pos)) - std::log(clamp_prob(1.0 - p_neg));
}

double QuantumMatcher::loss(const CaptionRecord& record,
                            const ParameterVector& params) const {
  const StateVector& prep = prep_state(record.id, record.features);
  StateVector image = config_.alignment == Alignment::Widen
                          ? prep
                          : run(box_circuit(), params, prep);
  const double p_pos = overlap(caption_state(record.caption, params), image);
  const double p_neg =
      overlap(caption_state(record.neg_caption, params), image);
  return contrastive_bce(p_pos, p_neg);
}

QuantumMatcher::LossGrad QuantumMatcher::loss_grad(
    const CaptionRecord& record, const ParameterVector& params) const {
  const StateVector& prep = prep_state(record.id, record.features);

  // The image side enters overlap_grad as a circuit with the cached
  // preparation as the initial state: the trainable box under box
  // alignment, an empty pass-through under widen.
  Circuit passthrough;
  const Circuit* image_circuit = nullptr;
  if (config_.alignment == Alignment::TrainableBox) {
    image_circuit = &box_circuit();
  } else {
    passthrough.n_qubits = config_.image_qubits();
    for (int q = 0; q < passthrough.n_qubits; ++q) {
      passthrough.output_qubits.push_back(q);
    }
    image_circuit = &passthrough;
  }

  const OverlapGrad pos = overlap_grad(caption_circuit(record.caption),
                                       *image_circuit, params, nullptr, &prep);
  const OverlapGrad neg = overlap_grad(caption_circuit(record.neg_caption),
                                       *image_circuit, params, nullptr, &prep);

  LossGrad out;
  out.loss = contrastive_bce(pos.value, neg.value);
  out.grad.assign(params.values().size(), 0.0);
  const double dpos =
      clamp_active(pos.value) ? 0.0 : -1.0 / clamp_prob(pos.value);
  const double dneg = clamp_active(1.0 - neg.value)
                          ? 0.0
                          : 1.0 / clamp_prob(1.0 - neg.value);
  for (std::size_t m = 0; m < out.grad.size(); ++m) {
    out.grad[m] = dpos * pos.grad[m] + dneg * neg.grad[m];
  }
  return out;
}

int QuantumMatcher::caption_parameter_count(const std::string& caption) const {
  return circuit_parameter_count(caption_circuit(caption));
}

ParameterVector QuantumMatcher::init_params(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> uniform(0.0, 2.0 * std::numbers::pi);
  std::vector<double> values(static_cast<std::size_t>(registry_.size()));
  for (double& v : values) v = uniform(rng);
  return ParameterVector(std::move(values));
}

ClassicalModel::ClassicalModel(int dim) : dim_(dim) {
  if (dim < 1) throw ValidationError("classical model dim must be >= 1");
  params_.assign(static_cast<std::size_t>(4 * dim + 2 * dim * dim), 0.0);
}

std::span<double> ClassicalModel::noun(Shape s) {
  const std::size_t offset =
      static_cast<std::size_t>(s) * static_cast<std::size_t>(dim_);
  return {params_.data() + offset, static_cast<std::size_t>(dim_)};
}

std::span<const double> ClassicalModel::noun(Shape s) const {
  const std::size_t offset =
      static_cast<std::size_t>(s) * static_cast<std::size_t>(dim_);
  return {params_.data() + offset, static_cast<std::size_t>(dim_)};
}

std::span<double> ClassicalModel::relation(Relation r) {
  const std::size_t offset =
      static_cast<std::size_t>(4 * dim_) +
      static_cast<std::size_t>(r) * static_cast<std::size_t>(dim_ * dim_);
  return {params_.data() + offset, static_cast<std::size_t>(dim_ * dim_)};
}

std::span<const double> ClassicalModel::relation(Relation r) const {
  const std::size_t offset =
      static_cast<std::size_t>(4 * dim_) +
      static_cast<std::size_t>(r) * static_cast<std::size_t>(dim_ * dim_);
  return {params_.data() + offset, static_cast<std::size_t>(dim_ * dim_)};
}

void ClassicalModel::init(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 0.1);
  for (double& p : params_) p = gauss(rng);
}

std::vector<double> classical_sentence_vec(const ClassicalModel& m,
                                           Shape subject, Relation relation,
                                           Shape object) {
  const int d = m.dim();
  const auto subj = m.noun(subject);
  const auto obj = m.noun(object);
  const auto rel = m.relation(relation);
  std::vector<double> out(static_cast<std::size_t>(d), 0.0);
  for (int i = 0; i < d; ++i) {
    double rel_obj = 0.0;
    for (int j = 0; j < d; ++j) {
      rel_obj += rel[static_cast<std::size_t>(i * d + j)] *
                 obj[static_cast<std::size_t>(j)];
    }
    out[static_cast<std::size_t>(i)] =
        subj[static_cast<std::size_t>(i)] * rel_obj;
  }
  return out;
}

double classical_score(const ClassicalModel& m, std::span<const double> image,
                       Shape subject, Relation relation, Shape object) {
  if (static_cast<int>(image.size()) != m.dim()) {
    throw ValidationError("image vector dimension mismatch");
  }
  const auto svec = classical_sentence_vec(m, subject, relation, object);
  double sum = 0.0;
  for (std::size_t i = 0; i < svec.size(); ++i) sum += image[i] * svec[i];
  return sum;
}

double classical_loss(const ClassicalModel& m, std::span<const double> image,
                      const CaptionTriple& pos, const CaptionTriple& neg) {
  const double a =
      classical_score(m, image, pos.subject, pos.relation, pos.object);
  const double b =
      classical_score(m, image, neg.subject, neg.relation, neg.object);
  return softplus(-a) + softplus(b);
}

namespace {

// Adds d/dparams of <image | subj (.) (Rel obj)> scaled by `weight`.
void accumulate_score_grad(const ClassicalModel& m,
                           std::span<const double> image,
                           const CaptionTriple& t, double weight,
                           ClassicalModel& grad) {
  const int d = m.dim();
  const auto subj = m.noun(t.subject);
  const auto obj = m.noun(t.object);
  const auto rel = m.relation(t.relation);
  auto g_subj = grad.noun(t.subject);
  auto g_obj = grad.noun(t.object);
  auto g_rel = grad.relation(t.relation);

  for (int i = 0; i < d; ++i) {
    double rel_obj = 0.0;
    for (int j = 0; j < d; ++j) {
      rel_obj += rel[static_cast<std::size_t>(i * d + j)] *
                 obj[static_cast<std::size_t>(j)];
    }
    const double mi = image[static_cast<std::size_t>(i)];
    const double si = subj[static_cast<std::size_t>(i)];
    g_subj[static_cast<std::size_t>(i)] += weight * mi * rel_obj;
    for (int j = 0; j < d; ++j) {
      g_rel[static_cast<std::size_t>(i * d + j)] +=
          weight * mi * si * obj[static_cast<std::size_t>(j)];
      g_obj[static_cast<std::size_t>(j)] +=
          weight * mi * si * rel[static_cast<std::size_t>(i * d + j)];
    }
  }
}

}  // namespace

ClassicalLossGrad classical_loss_grad(const ClassicalModel& m,
                                      std::span<const double> image,
                                      const CaptionTriple& pos,
                                      const CaptionTriple& neg) {
  const double a =
      classical_score(m, image, pos.subject, pos.relation, pos.object);
  const double b =
      classical_score(m, image, neg.subject, neg.relation, neg.object);

  ClassicalLossGrad out;
  out.loss = softplus(-a) + softplus(b);

  ClassicalModel grad(m.dim());
  accumulate_score_grad(m, image, pos, sigmoid(a) - 1.0, grad);
  accumulate_score_grad(m, image, neg, sigmoid(b), grad);
  out.grad = grad.params();
  return out;
}

}  // namespace discoq
