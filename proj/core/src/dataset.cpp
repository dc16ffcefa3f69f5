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

#include "discoq/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "discoq/errors.hpp"
#include "discoq/rng.hpp"
#include "json.hpp"

namespace discoq {

std::string_view split_name(Split s) {
  switch (s) {
    case Split::Train:
      return "train";
    case Split::IdVal:
      return "id_val";
    case Split::OodVal:
      return "ood_val";
    case Split::OodTest:
      return "ood_test";
  }
  throw ValidationError("unknown split");
}

Split split_from_name(std::string_view s) {
  if (s == "train") return Split::Train;
  if (s == "id_val") return Split::IdVal;
  if (s == "ood_val") return Split::OodVal;
  if (s == "ood_test") return Split::OodTest;
  throw ValidationError("unknown split name: " + std::string(s));
}

std::string CaptionTriple::caption() const {
  std::string out(shape_name(subject));
  out += ' ';
  out += relation_word(relation);
  out += ' ';
  out += shape_name(object);
  return out;
}

const std::vector<CaptionTriple>& enumerate_captions() {
  static const std::vector<CaptionTriple> captions = [] {
    std::vector<CaptionTriple> out;
    for (Shape s : kAllShapes) {
      for (Shape o : kAllShapes) {
        if (s == o) continue;
        for (Relation r : kAllRelations) out.push_back({s, r, o});
      }
    }
    std::sort(out.begin(), out.end(),
              [](const CaptionTriple& a, const CaptionTriple& b) {
                return a.caption() < b.caption();
              });
    return out;
  }();
  return captions;
}

int caption_index(const std::string& caption) {
  const auto& all = enumerate_captions();
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (all[i].caption() == caption) return static_cast<int>(i);
  }
  throw ValidationError("not a task caption: " + caption);
}

SplitSpec SplitSpec::default_split() {
  // Train pairs up both captions of a scene ("A isLeftOf B" with
  // "B isRightOf A") for five scenes, so the relation-swap equivalence is
  // learnable from composition; the held-out splits probe novel
  // combinations of the same vocabulary.
  std::map<std::string, Split> labels;
  const char* train[] = {
      "cube isLeftOf sphere",      "sphere isRightOf cube",
      "sphere isLeftOf cone",      "cone isRightOf sphere",
      "cone isLeftOf cylinder",    "cylinder isRightOf cone",
      "cylinder isLeftOf cube",    "cube isRightOf cylinder",
      "sphere isLeftOf cylinder",  "cylinder isRightOf sphere",
      "cone isLeftOf cube"};
  const char* ood_val[] = {
      "cube isRightOf cone", "sphere isLeftOf cube", "cone isLeftOf sphere",
      "cylinder isLeftOf cone", "cube isLeftOf cylinder"};
  const char* ood_test[] = {
      "cube isLeftOf cone",      "cone isRightOf cube",
      "cube isRightOf sphere",   "sphere isRightOf cone",
      "cone isRightOf cylinder", "cylinder isRightOf cube",
      "cylinder isLeftOf sphere", "sphere isRightOf cylinder"};
  for (const char* c : train) labels[c] = Split::Train;
  for (const char* c : ood_val) labels[c] = Split::OodVal;
  for (const char* c : ood_test) labels[c] = Split::OodTest;
  SplitSpec spec = from_labels(std::move(labels));
  return spec;
}

SplitSpec SplitSpec::from_labels(std::map<std::string, Split> labels) {
  SplitSpec spec;
  spec.labels_ = std::move(labels);
  spec.validate();
  return spec;
}

SplitSpec SplitSpec::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open split file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("bad split JSON in " + path + ": " + e.what());
  }
  if (!j.is_object()) {
    throw ValidationError("split file must hold a JSON object: " + path);
  }
  std::map<std::string, Split> labels;
  for (const auto& [caption, label] : j.items()) {
    if (!label.is_string()) {
      throw ValidationError("split label for '" + caption +
                            "' must be a string");
    }
    labels[caption] = split_from_name(label.get<std::string>());
  }
  return from_labels(std::move(labels));
}

Split SplitSpec::caption_split(const std::string& caption) const {
  auto it = labels_.find(caption);
  if (it == labels_.end()) {
    throw ValidationError("caption not covered by split spec: " + caption);
  }
  return it->second;
}

void SplitSpec::validate() const {
  std::vector<std::string> problems;
  const auto& all = enumerate_captions();
  for (const auto& triple : all) {
    if (labels_.find(triple.caption()) == labels_.end()) {
      problems.push_back("missing caption: " + triple.caption());
    }
  }
  for (const auto& [caption, label] : labels_) {
    bool known = false;
    for (const auto& triple : all) {
      if (triple.caption() == caption) {
        known = true;
        break;
      }
    }
    if (!known) problems.push_back("unknown caption: " + caption);
    if (label == Split::IdVal) {
      problems.push_back(
          "caption '" + caption +
          "' labeled id_val; in-distribution validation is drawn from "
          "held-out train-caption images, not caption labels");
    }
  }

  std::set<Shape> train_shapes;
  std::set<Relation> train_relations;
  int n_train = 0;
  for (const auto& triple : all) {
    auto it = labels_.find(triple.caption());
    if (it == labels_.end() || it->second != Split::Train) continue;
    ++n_train;
    train_shapes.insert(triple.subject);
    train_shapes.insert(triple.object);
    train_relations.insert(triple.relation);
  }
  if (n_train == 0) {
    problems.push_back("no train captions");
  } else {
    for (Shape s : kAllShapes) {
      if (!train_shapes.count(s)) {
        problems.push_back(std::string("shape never occurs in train: ") +
                           std::string(shape_name(s)));
      }
    }
    for (Relation r : kAllRelations) {
      if (!train_relations.count(r)) {
        problems.push_back(std::string("relation never occurs in train: ") +
                           std::string(relation_name(r)));
      }
    }
  }

  if (!problems.empty()) {
    std::string msg = "invalid split spec:";
    for (const auto& p : problems) msg += "\n  - " + p;
    throw ValidationError(msg);
  }
}

std::vector<CaptionRecord> generate(const SplitSpec& spec,
                                    const DatasetConfig& config) {
  spec.validate();
  if (config.images_per_caption < 1) {
    throw ValidationError("images_per_caption must be >= 1");
  }
  if (config.id_val_holdout < 0 ||
      config.id_val_holdout >= config.images_per_caption) {
    throw ValidationError("id_val_holdout must be in [0, images_per_caption)");
  }

  std::map<std::string, FeatureVector> external;
  if (config.source == DatasetConfig::Source::ExternalCsv) {
    if (config.features_csv.empty()) {
      throw ValidationError("external feature source needs features_csv");
    }
    external = load_features(config.features_csv);
  }

  const auto& all = enumerate_captions();
  std::vector<CaptionRecord> records;
  records.reserve(all.size() *
                  static_cast<std::size_t>(config.images_per_caption));
  for (std::size_t ci = 0; ci < all.size(); ++ci) {
    const CaptionTriple& triple = all[ci];
    const Split caption_label = spec.caption_split(triple.caption());
    const FeatureVector base =
        mhe(triple.subject, triple.relation, triple.object);
    std::mt19937_64 noise_rng =
        substream(config.seed, "noise", static_cast<std::uint64_t>(ci));

    for (int ii = 0; ii < config.images_per_caption; ++ii) {
      CaptionRecord rec;
      rec.id = std::to_string(ci) + "_" + std::to_string(ii);
      rec.subject = triple.subject;
      rec.object = triple.object;
      rec.relation = triple.relation;
      rec.caption = triple.caption();
      rec.neg_caption = triple.swapped().caption();
      rec.split = caption_label;
      if (caption_label == Split::Train &&
          ii >= config.images_per_caption - config.id_val_holdout) {
        rec.split = Split::IdVal;
      }
      switch (config.source) {
        case DatasetConfig::Source::MheNoisy:
          rec.features = add_noise(base, config.noise_sigma, noise_rng);
          break;
        case DatasetConfig::Source::SyntheticClip:
          rec.features = synthetic_clip_feature(
              static_cast<int>(ci), ii, config.seed, config.clip_dim,
              config.cluster_sigma);
          break;
        case DatasetConfig::Source::ExternalCsv: {
          auto it = external.find(rec.id);
          if (it == external.end()) {
            throw ValidationError("feature file has no row for id " + rec.id);
          }
          rec.features = it->second;
          break;
        }
      }
      records.push_back(std::move(rec));
    }
  }
  return records;
}

void write_jsonl(std::span<const CaptionRecord> records,
                 const std::string& path, const std::string& features_csv) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write dataset file: " + path);

  if (!features_csv.empty()) {
    std::vector<std::pair<std::string, FeatureVector>> rows;
    rows.reserve(records.size());
    for (const auto& r : records) rows.emplace_back(r.id, r.features);
    save_features(rows, features_csv);
  }

  for (const auto& r : records) {
    nlohmann::ordered_json j;
    j["id"] = r.id;
    j["subject"] = shape_name(r.subject);
    j["object"] = shape_name(r.object);
    j["relation"] = relation_name(r.relation);
    j["caption"] = r.caption;
    j["neg_caption"] = r.neg_caption;
    j["split"] = split_name(r.split);
    if (features_csv.empty()) {
      j["features"] = r.features.values;
    } else {
      j["features_ref"] = r.id;
    }
    out << j.dump() << '\n';
  }
}

std::vector<CaptionRecord> read_jsonl(const std::string& path,
                                      const std::string& features_csv) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open dataset file: " + path);

  std::map<std::string, FeatureVector> external;
  if (!features_csv.empty()) external = load_features(features_csv);

  std::vector<CaptionRecord> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("dataset line " + std::to_string(line_no) + ": " +
                            e.what());
    }
    CaptionRecord r;
    try {
      r.id = j.at("id").get<std::string>();
      r.subject = shape_from_name(j.at("subject").get<std::string>());
      r.object = shape_from_name(j.at("object").get<std::string>());
      r.relation = relation_from_name(j.at("relation").get<std::string>());
      r.caption = j.at("caption").get<std::string>();
      r.neg_caption = j.at("neg_caption").get<std::string>();
      r.split = split_from_name(j.at("split").get<std::string>());
      if (j.contains("features")) {
        r.features.values = j.at("features").get<std::vector<double>>();
        r.features.source = FeatureVector::Source::External;
      } else if (j.contains("features_ref")) {
        const std::string ref = j.at("features_ref").get<std::string>();
        auto it = external.find(ref);
        if (it == external.end()) {
          throw ValidationError("features_ref '" + ref +
                                "' not found; pass the feature CSV");
        }
        r.features = it->second;
      } else {
        throw ValidationError("record has neither features nor features_ref");
      }
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("dataset line " + std::to_string(line_no) + ": " +
                            e.what());
    }
    if (r.features.values.empty()) {
      throw ValidationError("dataset line " + std::to_string(line_no) +
                            ": empty features");
    }
    records.push_back(std::move(r));
  }
  if (records.empty()) {
    throw ValidationError("dataset file has no records: " + path);
  }
  return records;
}

std::vector<CaptionRecord> records_for_split(
    std::span<const CaptionRecord> records, Split split) {
  std::vector<CaptionRecord> out;
  for (const auto& r : records) {
    if (r.split == split) out.push_back(r);
  }
  return out;
}

}  // namespace discoq
