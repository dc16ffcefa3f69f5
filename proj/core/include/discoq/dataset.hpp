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

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "discoq/encoders.hpp"

namespace discoq {

enum class Split : std::uint8_t { Train, IdVal, OodVal, OodTest };

std::string_view split_name(Split s);
Split split_from_name(std::string_view s);

struct CaptionTriple {
  Shape subject = Shape::Cube;
  Relation relation = Relation::Left;
  Shape object = Shape::Sphere;

  std::string caption() const;  // e.g. "cube isLeftOf sphere"
  CaptionTriple swapped() const { return {subject, opposite(relation), object}; }
};

/// All 4 x 3 x 2 = 24 task triples in canonical order (sorted by caption).
const std::vector<CaptionTriple>& enumerate_captions();
/// Index of a caption in the canonical order; throws if unknown.
int caption_index(const std::string& caption);

struct CaptionRecord {
  std::string id;  // "<caption_index>_<image_index>"
  Shape subject = Shape::Cube;
  Shape object = Shape::Sphere;
  Relation relation = Relation::Left;
  std::string caption;
  std::string neg_caption;
  Split split = Split::Train;
  FeatureVector features;
};

/// Caption-level split assignment over {train, ood_val, ood_test}. The
/// in-distribution validation records come from held-out images of train
/// captions, not from this map.
class SplitSpec {
 public:
  static SplitSpec default_split();
  static SplitSpec from_labels(std::map<std::string, Split> labels);
  /// Loads a JSON object mapping caption -> split label.
  static SplitSpec load(const std::string& path);

  Split caption_split(const std::string& caption) const;
  const std::map<std::string, Split>& labels() const { return labels_; }
  /// Checks all structural constraints and throws ValidationError listing
  /// every violation.
  void validate() const;

 private:
  std::map<std::string, Split> labels_;
};

struct DatasetConfig {
  enum class Source : std::uint8_t { MheNoisy, SyntheticClip, ExternalCsv };

  Source source = Source::MheNoisy;
  double noise_sigma = 0.1;
  int images_per_caption = 20;
  int id_val_holdout = 2;  // train-caption images routed to id_val
  std::uint64_t seed = 1;
  int clip_dim = 512;
  double cluster_sigma = 0.05;
  std::string features_csv;  // required for Source::ExternalCsv
};

std::vector<CaptionRecord> generate(const SplitSpec& spec,
                                    const DatasetConfig& config);

/// JSON Lines dataset file, one record per line. When `features_csv` is
/// non-empty the features are written there and records carry a
/// `features_ref` instead of inline arrays.
void write_jsonl(std::span<const CaptionRecord> records,
                 const std::string& path,
                 const std::string& features_csv = "");
std::vector<CaptionRecord> read_jsonl(const std::string& path,
                                      const std::string& features_csv = "");

std::vector<CaptionRecord> records_for_split(
    std::span<const CaptionRecord> records, Split split);

}  // namespace discoq
