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

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "CLI11.hpp"
#include "discoq/errors.hpp"
#include "discoq/rng.hpp"
#include "discoq/runner.hpp"
#include "json.hpp"

namespace discoq {

namespace {

int run_gen_data(const std::string& out_path, const std::string& source,
                 std::uint64_t seed, double sigma, int images, int holdout,
                 const std::string& split_path,
                 const std::string& features_in,
                 const std::string& features_out, int clip_dim,
                 double cluster_sigma) {
  SplitSpec spec =
      split_path.empty() ? SplitSpec::default_split() : SplitSpec::load(split_path);

  DatasetConfig config;
  config.seed = seed;
  config.noise_sigma = sigma;
  config.images_per_caption = images;
  config.id_val_holdout = holdout;
  config.clip_dim = clip_dim;
  config.cluster_sigma = cluster_sigma;
  if (source == "mhe") {
    config.source = DatasetConfig::Source::MheNoisy;
  } else if (source == "clip") {
    if (features_in.empty()) {
      config.source = DatasetConfig::Source::SyntheticClip;
    } else {
      config.source = DatasetConfig::Source::ExternalCsv;
      config.features_csv = features_in;
    }
  } else {
    throw ValidationError("unknown source: " + source +
                          " (expected mhe or clip)");
  }

  const auto records = generate(spec, config);
  write_jsonl(records, out_path, features_out);

  std::map<Split, int> counts;
  for (const auto& r : records) counts[r.split] += 1;
  std::cerr << "wrote " << records.size() << " records to " << out_path;
  for (const auto& [split, n] : counts) {
    std::cerr << "  " << split_name(split) << "=" << n;
  }
  std::cerr << '\n';
  return 0;
}

struct TrainCliOptions {
  TrainConfig config;
  std::string report_out;
  std::string checkpoint_out;
};

int run_train(const TrainCliOptions& opts) {
  const TrainConfig& config = opts.config;
  config.validate();
  const auto records = read_jsonl(config.data_path, config.features_csv);

  RunReport report;
  std::shared_ptr<QuantumMatcher> matcher;
  if (config.model == TrainConfig::ModelKind::Quantum) {
    // Train through the library entry point, then rebuild the matcher for
    // checkpointing with the identical deterministic registry layout.
    report = train(config, records);
    matcher = std::make_shared<QuantumMatcher>(config.matcher);
    matcher->fit(records_for_split(records, Split::Train));
    matcher->precompile_captions();
    std::cerr << "trainable parameters: " << report.parameter_count
              << " total, " << report.caption_parameter_count
              << " per caption\n";
  } else {
    report = train(config, records);
    std::cerr << "trainable parameters: " << report.parameter_count
              << " total\n";
  }
  for (const auto& s : report.seeds) {
    std::cerr << "seed " << s.seed << ": train "
              << s.final_metrics.split(Split::Train).image_accuracy()
              << ", ood_val "
              << s.final_metrics.split(Split::OodVal).image_accuracy()
              << ", ood_test "
              << s.final_metrics.split(Split::OodTest).image_accuracy()
              << '\n';
  }
  std::cerr << "selected seed: " << report.selected_seed << '\n';

  const std::string json = report.to_json_text();
  std::cout << json << '\n';
  if (!opts.report_out.empty()) {
    std::ofstream out(opts.report_out);
    if (!out) throw ValidationError("cannot write report: " + opts.report_out);
    out << json << '\n';
  }
  if (!opts.checkpoint_out.empty()) {
    save_checkpoint(make_checkpoint(report, matcher.get()),
                    opts.checkpoint_out);
  }
  return 0;
}

int run_eval(const std::string& checkpoint_path, const std::string& data_path,
             const std::string& features_csv, const std::string& split) {
  const Checkpoint ckpt = load_checkpoint(checkpoint_path);
  auto records = read_jsonl(data_path, features_csv);
  if (split != "all") {
    records = records_for_split(records, split_from_name(split));
    if (records.empty()) {
      throw ValidationError("no records in split " + split);
    }
  }
  const EvalReport report = evaluate_checkpoint(ckpt, records);
  char buf[160];
  for (const auto& [s, m] : report.by_split) {
    std::snprintf(buf, sizeof(buf),
                  "%s: accuracy %.4f (pair %.4f) over %d records\n",
                  std::string(split_name(s)).c_str(), m.image_accuracy(),
                  m.pair_accuracy(), m.records);
    std::cout << buf;
  }
  return 0;
}

struct ReportRow {
  std::string label;
  double train = 0.0, valid = 0.0, test = 0.0;
  double train_pair = 0.0, valid_pair = 0.0, test_pair = 0.0;
  double id_val = 0.0;
};

ReportRow read_report_row(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open report: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("bad report JSON in " + path + ": " + e.what());
  }
  ReportRow row;
  row.label = j.value("label", path);
  const auto& sel = j.at("selected");
  auto get = [&sel](const char* split, const char* field) {
    return sel.contains(split) ? sel.at(split).value(field, 0.0) : 0.0;
  };
  row.train = get("train", "image_accuracy");
  row.valid = get("ood_val", "image_accuracy");
  row.test = get("ood_test", "image_accuracy");
  row.id_val = get("id_val", "image_accuracy");
  row.train_pair = get("train", "pair_accuracy");
  row.valid_pair = get("ood_val", "pair_accuracy");
  row.test_pair = get("ood_test", "pair_accuracy");
  return row;
}

int run_report(const std::vector<std::string>& inputs,
               const std::string& csv_out) {
  std::vector<ReportRow> rows;
  rows.reserve(inputs.size());
  for (const auto& path : inputs) rows.push_back(read_report_row(path));

  std::size_t width = std::string("Model").size();
  for (const auto& r : rows) width = std::max(width, r.label.size());

  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-*s  %8s  %8s  %8s\n",
                static_cast<int>(width), "Model", "Train", "Valid", "Test");
  std::cout << buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%-*s  %7.2f%%  %7.2f%%  %7.2f%%\n",
                  static_cast<int>(width), r.label.c_str(), 100.0 * r.train,
                  100.0 * r.valid, 100.0 * r.test);
    std::cout << buf;
  }

  if (!csv_out.empty()) {
    std::ofstream out(csv_out);
    if (!out) throw ValidationError("cannot write CSV: " + csv_out);
    out << "model,train,id_val,ood_val,ood_test,train_pair,ood_val_pair,"
           "ood_test_pair\n";
    for (const auto& r : rows) {
      std::snprintf(buf, sizeof(buf), "%s,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n",
                    r.label.c_str(), r.train, r.id_val, r.valid, r.test,
                    r.train_pair, r.valid_pair, r.test_pair);
      out << buf;
    }
  }
  return 0;
}

bool close_to(double a, double b, double tol) { return std::abs(a - b) <= tol; }

int run_selftest() {
  int failures = 0;
  auto check = [&failures](const char* name, bool ok) {
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << name << '\n';
    if (!ok) ++failures;
  };

  // Grammar: every task caption reduces to s with two cups.
  {
    bool ok = true;
    const Lexicon lex = Lexicon::builtin();
    for (const auto& triple : enumerate_captions()) {
      try {
        const Derivation d = parse(triple.caption(), lex);
        ok = ok && d.is_sentence() && d.cups.size() == 2;
      } catch (const Error&) {
        ok = false;
      }
    }
    check("grammar: 24 captions reduce to s with 2 cups", ok);
  }

  // Snake equations.
  {
    bool ok = true;
    for (int dim : {1, 2, 3, 4, 8}) ok = ok && snake_check(dim);
    check("diagrams: snake equations at dims 1,2,3,4,8", ok);
  }

  // Cup effect behaves like the inner-product pairing.
  {
    ParameterRegistry reg;
    Circuit cup;
    cup.n_qubits = 2;
    const CupEffect eff = cup_effect(0, 1);
    cup.gates = eff.gates;
    cup.postselect = {{0, 0}, {1, 0}};
    ParameterVector none;
    auto success_for = [&](std::initializer_list<double> amp_list) {
      StateVector init;
      init.n_qubits = 2;
      for (double a : amp_list) init.amplitudes.emplace_back(a, 0.0);
      return run(cup, none, init).success_prob;
    };
    const double inv = 1.0 / std::numbers::sqrt2;
    bool ok = close_to(success_for({1, 0, 0, 0}), 0.5, 1e-12) &&
              close_to(success_for({inv, 0, 0, inv}), 1.0, 1e-12) &&
              close_to(success_for({inv, inv, 0, 0}), 0.25, 1e-12);
    bool threw = false;
    try {
      success_for({0, 1, 0, 0});
    } catch (const SimulationError&) {
      threw = true;  // orthogonal to the pairing: probability 0
    }
    check("ansatz: cup effect matches the pairing", ok && threw);
  }

  // Analytic gradient of a single-rotation overlap.
  {
    ParameterRegistry reg;
    const auto ids = reg.block("probe", 3);
    Circuit rx;
    rx.n_qubits = 1;
    rx.output_qubits = {0};
    rx.gates.push_back({GateKind::Rx, 0, -1, ids[0]});
    Circuit zero;
    zero.n_qubits = 1;
    zero.output_qubits = {0};
    ParameterVector p(std::vector<double>{std::numbers::pi / 2.0, 0.0, 0.0});
    const OverlapGrad g = overlap_grad(rx, zero, p);
    check("simulator: d/dt |<0|Rx(t)|0>|^2 = -1/2 at t = pi/2",
          close_to(g.value, 0.5, 1e-12) && close_to(g.grad[0], -0.5, 1e-12));
  }

  // Amplitude encoding round trip.
  {
    std::mt19937_64 rng = substream(7, "selftest");
    std::normal_distribution<double> gauss(0.0, 1.0);
    bool ok = true;
    for (int len : {8, 100}) {
      std::vector<double> v(static_cast<std::size_t>(len));
      for (double& x : v) x = gauss(rng);
      const Circuit prep = amplitude_encode(v);
      const StateVector sv = run(prep, ParameterVector());
      double norm2 = 0.0;
      for (double x : v) norm2 += x * x;
      const double inv_norm = 1.0 / std::sqrt(norm2);
      for (std::size_t i = 0; i < sv.amplitudes.size(); ++i) {
        const double want = i < v.size() ? v[i] * inv_norm : 0.0;
        ok = ok && std::abs(sv.amplitudes[i] - std::complex<double>(want)) <
                       1e-10;
      }
    }
    check("encoders: amplitude round trip within 1e-10", ok);
  }

  // Multi-hot table.
  {
    const FeatureVector left = mhe(Shape::Cube, Relation::Left, Shape::Sphere);
    const FeatureVector right =
        mhe(Shape::Cube, Relation::Right, Shape::Sphere);
    const std::vector<double> want_left{0, 0, 1, 0, 0, 1, 0, 0};
    const std::vector<double> want_right{0, 1, 0, 0, 0, 0, 1, 0};
    check("encoders: multi-hot table",
          left.values == want_left && right.values == want_right);
  }

  std::cout << (failures == 0 ? "selftest passed\n" : "selftest FAILED\n");
  return failures == 0 ? 0 : 1;
}

}  // namespace

int cli(int argc, const char* const* argv) {
  CLI::App app{
      "discoq: compositional caption-image matching with variational "
      "quantum circuits"};
  app.require_subcommand(1);

  // gen-data
  auto* gen = app.add_subcommand(
      "gen-data", "Generate the caption/image dataset as JSON Lines");
  std::string gen_out, gen_source = "mhe", gen_split, gen_features_in,
              gen_features_out;
  std::uint64_t gen_seed = 1;
  double gen_sigma = 0.1, gen_cluster_sigma = 0.05;
  int gen_images = 20, gen_holdout = 2, gen_clip_dim = 512;
  gen->add_option("--out", gen_out, "Output JSONL path")->required();
  gen->add_option("--source", gen_source, "Feature source: mhe or clip");
  gen->add_option("--seed", gen_seed, "Root seed");
  gen->add_option("--sigma", gen_sigma, "MHE Gaussian noise sigma (0 = none)");
  gen->add_option("--images", gen_images, "Images per caption");
  gen->add_option("--holdout", gen_holdout,
                  "Train-caption images held out for in-distribution "
                  "validation");
  gen->add_option("--split", gen_split, "Split spec JSON (default built-in)");
  gen->add_option("--features", gen_features_in,
                  "External feature CSV (clip source)");
  gen->add_option("--features-out", gen_features_out,
                  "Write features to this CSV and reference them");
  gen->add_option("--clip-dim", gen_clip_dim, "Synthetic feature dimension");
  gen->add_option("--cluster-sigma", gen_cluster_sigma,
                  "Synthetic within-cluster sigma");

  // train
  auto* tr = app.add_subcommand("train", "Train a model and emit a report");
  TrainCliOptions topts;
  std::string tr_model = "quantum", tr_encoder = "mhe", tr_alignment = "box",
              tr_optimizer = "adam", tr_config_path;
  tr->add_option("--config", tr_config_path,
                 "JSON config file (flags override)");
  auto* o_data = tr->add_option("--data", topts.config.data_path,
                                "Dataset JSONL path");
  auto* o_features = tr->add_option("--features", topts.config.features_csv,
                                    "Feature CSV for features_ref datasets");
  auto* o_model = tr->add_option("--model", tr_model, "quantum or classical");
  auto* o_encoder =
      tr->add_option("--encoder", tr_encoder, "mhe, angle or amplitude");
  auto* o_alignment =
      tr->add_option("--alignment", tr_alignment, "box or widen");
  auto* o_epochs = tr->add_option("--epochs", topts.config.epochs, "Epochs");
  auto* o_lr = tr->add_option("--lr", topts.config.lr, "Learning rate");
  auto* o_batch = tr->add_option("--batch", topts.config.batch, "Batch size");
  std::vector<std::uint64_t> tr_seeds;
  auto* o_seeds = tr->add_option("--seeds", tr_seeds, "Seeds, comma separated")
                      ->delimiter(',');
  auto* o_opt =
      tr->add_option("--optimizer", tr_optimizer, "adam or sgd");
  auto* o_layers =
      tr->add_option("--layers", topts.config.matcher.layers, "IQP layers");
  auto* o_box_layers = tr->add_option(
      "--box-layers", topts.config.matcher.box_layers, "Image box layers");
  auto* o_noun_qubits = tr->add_option(
      "--noun-qubits", topts.config.matcher.noun_qubits, "Qubits per noun");
  auto* o_pca = tr->add_option("--pca-dim", topts.config.matcher.pca_dim,
                               "PCA features for the angle encoder");
  auto* o_amp =
      tr->add_option("--amplitude-qubits", topts.config.matcher.amplitude_qubits,
                     "Register width for the amplitude encoder");
  auto* o_cdim = tr->add_option("--classical-dim", topts.config.classical_dim,
                                "Classical model dimension (0 = infer)");
  auto* o_label =
      tr->add_option("--label", topts.config.label, "Report row label");
  tr->add_option("--out", topts.report_out, "Write the report JSON here too");
  tr->add_option("--checkpoint", topts.checkpoint_out,
                 "Write the trained model checkpoint");

  // eval
  auto* ev = app.add_subcommand("eval", "Evaluate a checkpoint on a dataset");
  std::string ev_ckpt, ev_data, ev_features, ev_split = "ood_test";
  ev->add_option("--checkpoint", ev_ckpt, "Checkpoint JSON")->required();
  ev->add_option("--data", ev_data, "Dataset JSONL")->required();
  ev->add_option("--features", ev_features, "Feature CSV for features_ref");
  ev->add_option("--split", ev_split,
                 "train, id_val, ood_val, ood_test or all");

  // report
  auto* rp = app.add_subcommand(
      "report", "Render accuracy tables from one or more train reports");
  std::vector<std::string> rp_inputs;
  std::string rp_csv;
  rp->add_option("--in", rp_inputs, "Report JSON files")->required();
  rp->add_option("--csv", rp_csv, "Also write a CSV table");

  // selftest
  auto* st = app.add_subcommand(
      "selftest", "Run the built-in oracle checks (grammar, snakes, "
                  "gradients, encodings)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*gen) {
      return run_gen_data(gen_out, gen_source, gen_seed, gen_sigma,
                          gen_images, gen_holdout, gen_split, gen_features_in,
                          gen_features_out, gen_clip_dim, gen_cluster_sigma);
    }
    if (*tr) {
      TrainConfig base;
      if (!tr_config_path.empty()) {
        base = TrainConfig::from_json_file(tr_config_path);
      }
      // Flags override config-file values only when given explicitly.
      if (o_model->count()) {
        if (tr_model == "quantum") {
          base.model = TrainConfig::ModelKind::Quantum;
        } else if (tr_model == "classical") {
          base.model = TrainConfig::ModelKind::Classical;
        } else {
          throw ValidationError("unknown model: " + tr_model);
        }
      }
      if (o_encoder->count()) {
        base.matcher.encoder = encoder_from_name(tr_encoder);
      }
      if (o_alignment->count()) {
        base.matcher.alignment = alignment_from_name(tr_alignment);
      }
      if (o_epochs->count()) base.epochs = topts.config.epochs;
      if (o_lr->count()) base.lr = topts.config.lr;
      if (o_batch->count()) base.batch = topts.config.batch;
      if (o_seeds->count()) base.seeds = tr_seeds;
      if (o_opt->count()) {
        if (tr_optimizer == "adam") {
          base.optimizer.kind = OptimizerConfig::Kind::Adam;
        } else if (tr_optimizer == "sgd") {
          base.optimizer.kind = OptimizerConfig::Kind::Sgd;
        } else {
          throw ValidationError("unknown optimizer: " + tr_optimizer);
        }
      }
      if (o_layers->count()) base.matcher.layers = topts.config.matcher.layers;
      if (o_box_layers->count()) {
        base.matcher.box_layers = topts.config.matcher.box_layers;
      }
      if (o_noun_qubits->count()) {
        base.matcher.noun_qubits = topts.config.matcher.noun_qubits;
      }
      if (o_pca->count()) base.matcher.pca_dim = topts.config.matcher.pca_dim;
      if (o_amp->count()) {
        base.matcher.amplitude_qubits = topts.config.matcher.amplitude_qubits;
      }
      if (o_cdim->count()) base.classical_dim = topts.config.classical_dim;
      if (o_label->count()) base.label = topts.config.label;
      if (o_data->count()) base.data_path = topts.config.data_path;
      if (o_features->count()) base.features_csv = topts.config.features_csv;
      if (base.data_path.empty()) {
        throw ValidationError("train needs --data or a config with one");
      }
      TrainCliOptions merged = topts;
      merged.config = base;
      return run_train(merged);
    }
    if (*ev) return run_eval(ev_ckpt, ev_data, ev_features, ev_split);
    if (*rp) return run_report(rp_inputs, rp_csv);
    if (*st) return run_selftest();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace discoq
