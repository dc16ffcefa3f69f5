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

#include "discoq/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <memory>
#include <mutex>
#include <numeric>
#include <thread>

#include "discoq/errors.hpp"
#include "discoq/rng.hpp"
#include "json.hpp"

namespace discoq {

int worker_count() {
  const char* env = std::getenv("DISCOQ_THREADS");
  long n = 0;
  if (env != nullptr && *env != '\0') n = std::strtol(env, nullptr, 10);
  if (n <= 0) n = static_cast<long>(std::thread::hardware_concurrency());
  return static_cast<int>(std::max(1L, n));
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(worker_count()), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

Optimizer::Optimizer(OptimizerConfig config, double lr, int n_params)
    : config_(config),
      lr_(lr),
      m_(static_cast<std::size_t>(n_params), 0.0),
      v_(static_cast<std::size_t>(n_params), 0.0) {}

void Optimizer::step(std::vector<double>& params,
                     std::span<const double> grad) {
  if (params.size() != m_.size() || grad.size() != m_.size()) {
    throw ValidationError("optimizer size mismatch");
  }
  if (config_.kind == OptimizerConfig::Kind::Sgd) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      params[i] -= lr_ * grad[i];
    }
    return;
  }
  ++t_;
  const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = config_.beta1 * m_[i] + (1.0 - config_.beta1) * grad[i];
    v_[i] = config_.beta2 * v_[i] + (1.0 - config_.beta2) * grad[i] * grad[i];
    const double mhat = m_[i] / bc1;
    const double vhat = v_[i] / bc2;
    params[i] -= lr_ * mhat / (std::sqrt(vhat) + config_.eps);
  }
}

void TrainConfig::validate() const {
  if (epochs < 0) throw ValidationError("epochs must be >= 0");
  if (batch < 1) throw ValidationError("batch must be >= 1");
  if (!(lr > 0.0)) throw ValidationError("lr must be > 0");
  if (seeds.empty()) throw ValidationError("seeds must be non-empty");
  if (model == ModelKind::Quantum) matcher.validate();
  if (model == ModelKind::Classical && classical_dim < 0) {
    throw ValidationError("classical_dim must be >= 0");
  }
}

std::string TrainConfig::default_label() const {
  if (model == ModelKind::Classical) return "Classic-DisCoCat";
  std::string out = "Quantum-";
  out += matcher.encoder == EncoderKind::Mhe ? "MHE" : "CLIP";
  out += ' ';
  out += std::string(encoder_name(matcher.encoder)) + "/" +
         std::string(alignment_name(matcher.alignment));
  return out;
}

namespace {

nlohmann::ordered_json optimizer_to_json(const OptimizerConfig& o) {
  return {{"kind", o.kind == OptimizerConfig::Kind::Adam ? "adam" : "sgd"},
          {"beta1", o.beta1},
          {"beta2", o.beta2},
          {"eps", o.eps}};
}

OptimizerConfig optimizer_from_json(const nlohmann::json& j) {
  OptimizerConfig o;
  const std::string kind = j.value("kind", "adam");
  if (kind == "adam") {
    o.kind = OptimizerConfig::Kind::Adam;
  } else if (kind == "sgd") {
    o.kind = OptimizerConfig::Kind::Sgd;
  } else {
    throw ValidationError("unknown optimizer kind: " + kind);
  }
  o.beta1 = j.value("beta1", o.beta1);
  o.beta2 = j.value("beta2", o.beta2);
  o.eps = j.value("eps", o.eps);
  return o;
}

nlohmann::ordered_json matcher_to_json(const MatcherConfig& m) {
  return {{"encoder", std::string(encoder_name(m.encoder))},
          {"alignment", std::string(alignment_name(m.alignment))},
          {"layers", m.layers},
          {"box_layers", m.box_layers},
          {"noun_qubits", m.noun_qubits},
          {"pca_dim", m.pca_dim},
          {"amplitude_qubits", m.amplitude_qubits},
          {"entangler", m.entangler == GateKind::CRz ? "crz" : "crx"}};
}

MatcherConfig matcher_from_json(const nlohmann::json& j) {
  MatcherConfig m;
  if (j.contains("encoder")) {
    m.encoder = encoder_from_name(j.at("encoder").get<std::string>());
  }
  if (j.contains("alignment")) {
    m.alignment = alignment_from_name(j.at("alignment").get<std::string>());
  }
  m.layers = j.value("layers", m.layers);
  m.box_layers = j.value("box_layers", m.box_layers);
  m.noun_qubits = j.value("noun_qubits", m.noun_qubits);
  m.pca_dim = j.value("pca_dim", m.pca_dim);
  m.amplitude_qubits = j.value("amplitude_qubits", m.amplitude_qubits);
  const std::string ent = j.value("entangler", "crz");
  if (ent == "crz") {
    m.entangler = GateKind::CRz;
  } else if (ent == "crx") {
    m.entangler = GateKind::CRx;
  } else {
    throw ValidationError("unknown entangler: " + ent);
  }
  return m;
}

nlohmann::ordered_json config_to_json(const TrainConfig& c) {
  nlohmann::ordered_json j;
  j["model"] =
      c.model == TrainConfig::ModelKind::Quantum ? "quantum" : "classical";
  j["matcher"] = matcher_to_json(c.matcher);
  j["classical_dim"] = c.classical_dim;
  j["epochs"] = c.epochs;
  j["lr"] = c.lr;
  j["batch"] = c.batch;
  j["seeds"] = c.seeds;
  j["optimizer"] = optimizer_to_json(c.optimizer);
  j["data"] = c.data_path;
  j["features"] = c.features_csv;
  j["label"] = c.label;
  return j;
}

TrainConfig config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  const std::string model = j.value("model", "quantum");
  if (model == "quantum") {
    c.model = TrainConfig::ModelKind::Quantum;
  } else if (model == "classical") {
    c.model = TrainConfig::ModelKind::Classical;
  } else {
    throw ValidationError("unknown model kind: " + model);
  }
  if (j.contains("matcher")) c.matcher = matcher_from_json(j.at("matcher"));
  c.classical_dim = j.value("classical_dim", c.classical_dim);
  c.epochs = j.value("epochs", c.epochs);
  c.lr = j.value("lr", c.lr);
  c.batch = j.value("batch", c.batch);
  if (j.contains("seeds")) {
    c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  }
  if (j.contains("optimizer")) {
    c.optimizer = optimizer_from_json(j.at("optimizer"));
  }
  c.data_path = j.value("data", c.data_path);
  c.features_csv = j.value("features", c.features_csv);
  c.label = j.value("label", c.label);
  return c;
}

nlohmann::ordered_json metrics_to_json(const EvalReport& e) {
  nlohmann::ordered_json j;
  for (const auto& [split, m] : e.by_split) {
    j[std::string(split_name(split))] = {
        {"records", m.records},
        {"image_accuracy", m.image_accuracy()},
        {"pair_accuracy", m.pair_accuracy()}};
  }
  return j;
}

}  // namespace

TrainConfig TrainConfig::from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad config JSON: ") + e.what());
  }
  return config_from_json(j);
}

TrainConfig TrainConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return from_json_text(text);
}

std::string TrainConfig::to_json_text() const {
  return config_to_json(*this).dump(2);
}

const SplitMetrics& EvalReport::split(Split s) const {
  static const SplitMetrics empty;
  auto it = by_split.find(s);
  return it == by_split.end() ? empty : it->second;
}

EvalReport evaluate_scores(
    std::span<const CaptionRecord> records,
    const std::function<std::pair<double, double>(const CaptionRecord&)>&
        scorer,
    double pair_threshold) {
  std::vector<std::pair<double, double>> scores(records.size());
  parallel_for(records.size(),
               [&](std::size_t i) { scores[i] = scorer(records[i]); });

  EvalReport report;
  for (std::size_t i = 0; i < records.size(); ++i) {
    SplitMetrics& m = report.by_split[records[i].split];
    m.records += 1;
    const auto [pos, neg] = scores[i];
    if (pos > neg) m.image_correct += 1;  // ties count as incorrect
    if (pos > pair_threshold) m.pair_correct += 1;
    if (!(neg > pair_threshold)) m.pair_correct += 1;
  }
  return report;
}

EvalReport evaluate_quantum(const QuantumMatcher& matcher,
                            const ParameterVector& params,
                            std::span<const CaptionRecord> records) {
  // One state per distinct caption; records only differ on the image side.
  std::map<std::string, StateVector> caption_states;
  for (const auto& r : records) {
    caption_states.try_emplace(r.caption);
    caption_states.try_emplace(r.neg_caption);
  }
  for (auto& [caption, state] : caption_states) {
    state = matcher.caption_state(caption, params);
  }
  return evaluate_scores(
      records,
      [&](const CaptionRecord& r) {
        const StateVector image = matcher.image_state(r, params);
        return std::make_pair(overlap(caption_states.at(r.caption), image),
                              overlap(caption_states.at(r.neg_caption), image));
      },
      /*pair_threshold=*/0.5);
}

EvalReport evaluate_classical(const ClassicalModel& model,
                              std::span<const CaptionRecord> records) {
  return evaluate_scores(
      records,
      [&](const CaptionRecord& r) {
        const CaptionTriple pos{r.subject, r.relation, r.object};
        const CaptionTriple neg = pos.swapped();
        return std::make_pair(
            classical_score(model, r.features.values, pos.subject,
                            pos.relation, pos.object),
            classical_score(model, r.features.values, neg.subject,
                            neg.relation, neg.object));
      },
      /*pair_threshold=*/0.0);
}

namespace {

// Model-family-independent view of one trainable model. The fit loop owns
// the flat parameter vector; sync() publishes it before any parallel reads.
struct Objective {
  int n_params = 0;
  std::function<std::vector<double>(std::mt19937_64&)> init;
  std::function<void(std::span<const double>)> sync;
  std::function<std::pair<double, std::vector<double>>(const CaptionRecord&)>
      loss_grad;
  std::function<EvalReport(std::span<const CaptionRecord>)> evaluate;
};

SeedResult fit_seed(const Objective& obj, const TrainConfig& config,
                    std::uint64_t seed,
                    std::span<const CaptionRecord> all_records,
                    std::span<const CaptionRecord> train_records) {
  SeedResult result;
  result.seed = seed;

  std::mt19937_64 init_rng = substream(seed, "init");
  std::vector<double> params = obj.init(init_rng);
  if (static_cast<int>(params.size()) != obj.n_params) {
    throw ValidationError("objective init returned wrong parameter count");
  }
  obj.sync(params);

  Optimizer optimizer(config.optimizer, config.lr, obj.n_params);
  std::mt19937_64 shuffle_rng = substream(seed, "shuffle");
  std::vector<std::size_t> order(train_records.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double loss_sum = 0.0;
    const std::size_t batch_size = static_cast<std::size_t>(config.batch);
    for (std::size_t start = 0, batch_index = 0; start < order.size();
         start += batch_size, ++batch_index) {
      const std::size_t count = std::min(batch_size, order.size() - start);
      std::vector<std::pair<double, std::vector<double>>> results(count);
      parallel_for(count, [&](std::size_t k) {
        results[k] = obj.loss_grad(train_records[order[start + k]]);
      });

      double batch_loss = 0.0;
      std::vector<double> grad(static_cast<std::size_t>(obj.n_params), 0.0);
      for (std::size_t k = 0; k < count; ++k) {  // fixed reduction order
        batch_loss += results[k].first;
        const auto& g = results[k].second;
        for (std::size_t m = 0; m < grad.size(); ++m) grad[m] += g[m];
      }
      for (double& g : grad) g /= static_cast<double>(count);

      if (!std::isfinite(batch_loss)) {
        std::size_t worst = 0;
        double best = -1.0;
        for (std::size_t m = 0; m < grad.size(); ++m) {
          const double a = std::isnan(grad[m])
                               ? std::numeric_limits<double>::infinity()
                               : std::abs(grad[m]);
          if (a > best) {
            best = a;
            worst = m;
          }
        }
        throw Error("non-finite loss at epoch " + std::to_string(epoch) +
                    ", batch " + std::to_string(batch_index) +
                    "; largest gradient at slot " + std::to_string(worst));
      }

      loss_sum += batch_loss;
      optimizer.step(params, grad);
      obj.sync(params);
    }
    result.epoch_loss.push_back(loss_sum /
                                static_cast<double>(train_records.size()));
    result.epoch_metrics.push_back(obj.evaluate(all_records));
  }

  result.final_metrics = result.epoch_metrics.empty()
                             ? obj.evaluate(all_records)
                             : result.epoch_metrics.back();
  result.final_params = params;
  return result;
}

int feature_dim(std::span<const CaptionRecord> records) {
  const std::size_t d = records[0].features.values.size();
  for (const auto& r : records) {
    if (r.features.values.size() != d) {
      throw ValidationError("records have inconsistent feature dimensions");
    }
  }
  return static_cast<int>(d);
}

}  // namespace

const SeedResult& RunReport::selected() const {
  for (const auto& s : seeds) {
    if (s.seed == selected_seed) return s;
  }
  throw ValidationError("run report has no selected seed");
}

std::string RunReport::to_json_text() const {
  nlohmann::ordered_json j;
  j["config"] = config_to_json(config);
  j["label"] = config.label.empty() ? config.default_label() : config.label;
  j["parameter_count"] = parameter_count;
  j["caption_parameter_count"] = caption_parameter_count;
  j["selected_seed"] = selected_seed;
  j["selected"] = metrics_to_json(selected().final_metrics);
  j["seeds"] = nlohmann::ordered_json::array();
  for (const auto& s : seeds) {
    nlohmann::ordered_json js;
    js["seed"] = s.seed;
    js["epoch_loss"] = s.epoch_loss;
    js["epochs"] = nlohmann::ordered_json::array();
    for (const auto& e : s.epoch_metrics) js["epochs"].push_back(metrics_to_json(e));
    js["final"] = metrics_to_json(s.final_metrics);
    j["seeds"].push_back(std::move(js));
  }
  j["wall_clock_sec"] = wall_clock_sec;
  return j.dump(2);
}

RunReport train(const TrainConfig& config,
                std::span<const CaptionRecord> records) {
  config.validate();
  if (records.empty()) throw ValidationError("no records to train on");
  const auto t0 = std::chrono::steady_clock::now();

  const std::vector<CaptionRecord> train_records =
      records_for_split(records, Split::Train);
  if (train_records.empty()) {
    throw ValidationError("dataset has no train records");
  }

  RunReport report;
  report.config = config;

  Objective obj;
  std::shared_ptr<QuantumMatcher> matcher;
  std::shared_ptr<ParameterVector> qparams;
  std::shared_ptr<ClassicalModel> cmodel;

  if (config.model == TrainConfig::ModelKind::Quantum) {
    matcher = std::make_shared<QuantumMatcher>(config.matcher);
    matcher->fit(train_records);
    matcher->precompile_captions();
    matcher->precompute_image_states(records);
    qparams =
        std::make_shared<ParameterVector>(ParameterVector::zeros(
            matcher->parameter_count()));
    obj.n_params = matcher->parameter_count();
    obj.init = [matcher](std::mt19937_64& rng) {
      return matcher->init_params(rng).values();
    };
    obj.sync = [qparams](std::span<const double> p) {
      qparams->values().assign(p.begin(), p.end());
    };
    obj.loss_grad = [matcher, qparams](const CaptionRecord& r) {
      auto lg = matcher->loss_grad(r, *qparams);
      return std::make_pair(lg.loss, std::move(lg.grad));
    };
    obj.evaluate = [matcher, qparams](std::span<const CaptionRecord> recs) {
      return evaluate_quantum(*matcher, *qparams, recs);
    };
    report.parameter_count = matcher->parameter_count();
    report.caption_parameter_count =
        matcher->caption_parameter_count(enumerate_captions()[0].caption());
  } else {
    const int dim =
        config.classical_dim > 0 ? config.classical_dim : feature_dim(records);
    cmodel = std::make_shared<ClassicalModel>(dim);
    obj.n_params = cmodel->parameter_count();
    obj.init = [dim](std::mt19937_64& rng) {
      ClassicalModel m(dim);
      m.init(rng);
      return m.params();
    };
    obj.sync = [cmodel](std::span<const double> p) {
      cmodel->params().assign(p.begin(), p.end());
    };
    obj.loss_grad = [cmodel](const CaptionRecord& r) {
      const CaptionTriple pos{r.subject, r.relation, r.object};
      auto lg = classical_loss_grad(*cmodel, r.features.values, pos,
                                    pos.swapped());
      return std::make_pair(lg.loss, std::move(lg.grad));
    };
    obj.evaluate = [cmodel](std::span<const CaptionRecord> recs) {
      return evaluate_classical(*cmodel, recs);
    };
    report.parameter_count = cmodel->parameter_count();
    report.caption_parameter_count = 0;
  }

  for (std::uint64_t seed : config.seeds) {
    report.seeds.push_back(
        fit_seed(obj, config, seed, records, train_records));
  }

  // Report the seed with the best OOD validation accuracy; ties go to the
  // lowest seed.
  std::size_t best = 0;
  for (std::size_t i = 1; i < report.seeds.size(); ++i) {
    const double acc_i =
        report.seeds[i].final_metrics.split(Split::OodVal).image_accuracy();
    const double acc_b =
        report.seeds[best].final_metrics.split(Split::OodVal).image_accuracy();
    if (acc_i > acc_b ||
        (acc_i == acc_b &&
         report.seeds[i].seed < report.seeds[best].seed)) {
      best = i;
    }
  }
  report.selected_seed = report.seeds[best].seed;

  report.wall_clock_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return report;
}

RunReport train(const TrainConfig& config) {
  if (config.data_path.empty()) {
    throw ValidationError("train config has no data path");
  }
  const auto records = read_jsonl(config.data_path, config.features_csv);
  return train(config, records);
}

namespace {

nlohmann::ordered_json pca_to_json(const PcaModel& m) {
  return {{"mean", m.mean},
          {"components", m.components},
          {"explained_variance", m.explained_variance}};
}

PcaModel pca_from_json(const nlohmann::json& j) {
  PcaModel m;
  m.mean = j.at("mean").get<std::vector<double>>();
  m.components = j.at("components").get<std::vector<std::vector<double>>>();
  m.explained_variance =
      j.at("explained_variance").get<std::vector<double>>();
  return m;
}

}  // namespace

Checkpoint make_checkpoint(const RunReport& report,
                           const QuantumMatcher* matcher) {
  Checkpoint ckpt;
  ckpt.config = report.config;
  const SeedResult& sel = report.selected();
  if (report.config.model == TrainConfig::ModelKind::Quantum) {
    if (matcher == nullptr) {
      throw ValidationError("quantum checkpoint needs the matcher");
    }
    ckpt.slots = matcher->registry().slots();
    ckpt.slot_values = sel.final_params;
    if (matcher->pca()) ckpt.pca = *matcher->pca();
    if (matcher->scaler()) ckpt.scaler = *matcher->scaler();
  } else {
    ckpt.classical_params = sel.final_params;
    const double n = static_cast<double>(sel.final_params.size());
    // 4d + 2d^2 = n  =>  d from the positive root.
    ckpt.classical_dim =
        static_cast<int>(std::lround((-4.0 + std::sqrt(16.0 + 8.0 * n)) / 4.0));
  }
  return ckpt;
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  nlohmann::ordered_json j;
  j["config"] = config_to_json(ckpt.config);
  if (ckpt.config.model == TrainConfig::ModelKind::Quantum) {
    j["slots"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < ckpt.slots.size(); ++i) {
      const auto& s = ckpt.slots[i];
      j["slots"].push_back({{"id", s.id},
                            {"owner", s.owner},
                            {"position", s.position},
                            {"value", ckpt.slot_values.at(
                                          static_cast<std::size_t>(s.id))}});
    }
    if (ckpt.pca) j["pca"] = pca_to_json(*ckpt.pca);
    if (ckpt.scaler) {
      j["scaler"] = {{"mins", ckpt.scaler->mins}, {"maxs", ckpt.scaler->maxs}};
    }
  } else {
    ClassicalModel m(ckpt.classical_dim);
    m.params() = ckpt.classical_params;
    j["dim"] = ckpt.classical_dim;
    nlohmann::ordered_json nouns;
    for (Shape s : kAllShapes) {
      const auto v = m.noun(s);
      nouns[std::string(shape_name(s))] =
          std::vector<double>(v.begin(), v.end());
    }
    j["nouns"] = std::move(nouns);
    nlohmann::ordered_json rels;
    for (Relation r : kAllRelations) {
      const auto v = m.relation(r);
      rels[std::string(relation_name(r))] =
          std::vector<double>(v.begin(), v.end());
    }
    j["relations"] = std::move(rels);
  }
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write checkpoint: " + path);
  out << j.dump(2) << '\n';
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open checkpoint: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("bad checkpoint JSON in " + path + ": " + e.what());
  }
  Checkpoint ckpt;
  ckpt.config = config_from_json(j.at("config"));
  if (ckpt.config.model == TrainConfig::ModelKind::Quantum) {
    for (const auto& js : j.at("slots")) {
      ParameterSlotInfo info;
      info.id = js.at("id").get<int>();
      info.owner = js.at("owner").get<std::string>();
      info.position = js.at("position").get<int>();
      ckpt.slots.push_back(info);
      const std::size_t id = static_cast<std::size_t>(info.id);
      if (ckpt.slot_values.size() <= id) ckpt.slot_values.resize(id + 1, 0.0);
      ckpt.slot_values[id] = js.at("value").get<double>();
    }
    if (j.contains("pca")) ckpt.pca = pca_from_json(j.at("pca"));
    if (j.contains("scaler")) {
      AngleScaler s;
      s.mins = j.at("scaler").at("mins").get<std::vector<double>>();
      s.maxs = j.at("scaler").at("maxs").get<std::vector<double>>();
      ckpt.scaler = std::move(s);
    }
  } else {
    ckpt.classical_dim = j.at("dim").get<int>();
    ClassicalModel m(ckpt.classical_dim);
    for (Shape s : kAllShapes) {
      const auto v = j.at("nouns")
                         .at(std::string(shape_name(s)))
                         .get<std::vector<double>>();
      std::copy(v.begin(), v.end(), m.noun(s).begin());
    }
    for (Relation r : kAllRelations) {
      const auto v = j.at("relations")
                         .at(std::string(relation_name(r)))
                         .get<std::vector<double>>();
      std::copy(v.begin(), v.end(), m.relation(r).begin());
    }
    ckpt.classical_params = m.params();
  }
  return ckpt;
}

EvalReport evaluate_checkpoint(const Checkpoint& ckpt,
                               std::span<const CaptionRecord> records) {
  if (ckpt.config.model == TrainConfig::ModelKind::Classical) {
    ClassicalModel model(ckpt.classical_dim);
    model.params() = ckpt.classical_params;
    return evaluate_classical(model, records);
  }

  QuantumMatcher matcher(ckpt.config.matcher);
  if (ckpt.pca) matcher.set_pca(*ckpt.pca);
  if (ckpt.scaler) matcher.set_scaler(*ckpt.scaler);
  matcher.precompile_captions();
  matcher.precompute_image_states(records);

  // Slot ids may be assigned in a different order than at save time; match
  // blocks by (owner, position).
  ParameterVector params = ParameterVector::zeros(matcher.parameter_count());
  std::map<std::pair<std::string, int>, int> lookup;
  for (const auto& info : matcher.registry().slots()) {
    lookup[{info.owner, info.position}] = info.id;
  }
  for (const auto& info : ckpt.slots) {
    auto it = lookup.find({info.owner, info.position});
    if (it == lookup.end()) {
      throw ValidationError("checkpoint slot has no counterpart: " +
                            info.owner + "[" + std::to_string(info.position) +
                            "]");
    }
    params.set(it->second,
               ckpt.slot_values.at(static_cast<std::size_t>(info.id)));
  }
  return evaluate_quantum(matcher, params, records);
}

}  // namespace discoq
