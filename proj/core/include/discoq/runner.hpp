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

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "discoq/model.hpp"

namespace discoq {

/// Worker cap from DISCOQ_THREADS (0 or unset = hardware concurrency).
int worker_count();
/// Runs fn(0..n-1) on up to worker_count() threads; exceptions propagate.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

struct OptimizerConfig {
  enum class Kind : std::uint8_t { Adam, Sgd };
  Kind kind = Kind::Adam;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam with optional plain-SGD fallback, over a flat parameter vector.
class Optimizer {
 public:
  Optimizer(OptimizerConfig config, double lr, int n_params);
  void step(std::vector<double>& params, std::span<const double> grad);

 private:
  OptimizerConfig config_;
  double lr_;
  long t_ = 0;
  std::vector<double> m_, v_;
};

struct TrainConfig {
  enum class ModelKind : std::uint8_t { Quantum, Classical };

  ModelKind model = ModelKind::Quantum;
  MatcherConfig matcher;   // quantum settings
  int classical_dim = 0;   // 0 = infer from the feature dimension
  int epochs = 100;
  double lr = 0.001;
  int batch = 8;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4};
  OptimizerConfig optimizer;
  std::string data_path;
  std::string features_csv;  // companion CSV for features_ref datasets
  std::string label;         // report row label; defaulted when empty

  void validate() const;
  std::string default_label() const;
  static TrainConfig from_json_file(const std::string& path);
  static TrainConfig from_json_text(const std::string& text);
  std::string to_json_text() const;
};

struct SplitMetrics {
  int records = 0;
  int image_correct = 0;
  int pair_correct = 0;  // out of 2 * records

  double image_accuracy() const {
    return records ? static_cast<double>(image_correct) / records : 0.0;
  }
  double pair_accuracy() const {
    return records ? static_cast<double>(pair_correct) / (2.0 * records) : 0.0;
  }
};

struct EvalReport {
  std::map<Split, SplitMetrics> by_split;
  const SplitMetrics& split(Split s) const;
};

/// Buckets records by their split; prediction is the higher-scoring caption
/// (ties incorrect), pair counting thresholds each (image, caption) score.
EvalReport evaluate_scores(
    std::span<const CaptionRecord> records,
    const std::function<std::pair<double, double>(const CaptionRecord&)>&
        scorer,
    double pair_threshold);

EvalReport evaluate_quantum(const QuantumMatcher& matcher,
                            const ParameterVector& params,
                            std::span<const CaptionRecord> records);
EvalReport evaluate_classical(const ClassicalModel& model,
                              std::span<const CaptionRecord> records);

struct SeedResult {
  std::uint64_t seed = 0;
  std::vector<double> epoch_loss;        // mean train loss per epoch
  std::vector<EvalReport> epoch_metrics; // accuracies after every epoch
  EvalReport final_metrics;
  std::vector<double> final_params;
};

struct RunReport {
  TrainConfig config;
  std::vector<SeedResult> seeds;
  std::uint64_t selected_seed = 0;
  int parameter_count = 0;
  int caption_parameter_count = 0;  // quantum only
  double wall_clock_sec = 0.0;

  const SeedResult& selected() const;
  std::string to_json_text() const;
};

RunReport train(const TrainConfig& config,
                std::span<const CaptionRecord> records);
RunReport train(const TrainConfig& config);  // loads config.data_path

/// Serialized model state: registry slot values for the quantum family,
/// noun/relation arrays for the classical one, plus the config echo.
struct Checkpoint {
  TrainConfig config;
  std::vector<ParameterSlotInfo> slots;
  std::vector<double> slot_values;
  std::optional<PcaModel> pca;
  std::optional<AngleScaler> scaler;
  int classical_dim = 0;
  std::vector<double> classical_params;
};

Checkpoint make_checkpoint(const RunReport& report,
                           const QuantumMatcher* matcher);
void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);
EvalReport evaluate_checkpoint(const Checkpoint& ckpt,
                               std::span<const CaptionRecord> records);

/// Command line entry: subcommands gen-data, train, eval, report, selftest.
/// Returns 0 on success, 1 on validation failure, 2 on usage errors.
int cli(int argc, const char* const* argv);

}  // namespace discoq
