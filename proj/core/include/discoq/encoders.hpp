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

#include <array>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "discoq/ansatz.hpp"

namespace discoq {

/// Task shapes, in the one-hot table order.
enum class Shape : std::uint8_t { Cylinder, Sphere, Cube, Cone };
enum class Relation : std::uint8_t { Left, Right };

inline constexpr std::array<Shape, 4> kAllShapes = {
    Shape::Cylinder, Shape::Sphere, Shape::Cube, Shape::Cone};
inline constexpr std::array<Relation, 2> kAllRelations = {Relation::Left,
                                                          Relation::Right};

std::string_view shape_name(Shape s);       // "cylinder", ...
Shape shape_from_name(std::string_view s);
std::string_view relation_name(Relation r);  // "left" / "right"
Relation relation_from_name(std::string_view s);
std::string_view relation_word(Relation r);  // "isLeftOf" / "isRightOf"
Relation opposite(Relation r);

struct FeatureVector {
  enum class Source : std::uint8_t { Mhe, External };

  std::vector<double> values;
  Source source = Source::External;
};

/// One-hot shape code: cylinder [1,0,0,0], sphere [0,1,0,0],
/// cube [0,0,1,0], cone [0,0,0,1].
std::array<double, 4> ohe(Shape s);

/// 8-dim multi-hot caption/image vector: the left-of vector concatenates
/// (subject, object) one-hots, the right-of vector (object, subject).
FeatureVector mhe(Shape subject, Relation relation, Shape object);

/// Adds i.i.d. zero-mean Gaussian noise with the given standard deviation.
FeatureVector add_noise(const FeatureVector& v, double sigma,
                        std::mt19937_64& rng);

struct PcaModel {
  std::vector<double> mean;                     // length d
  std::vector<std::vector<double>> components;  // k rows of length d
  std::vector<double> explained_variance;      // descending

  int input_dim() const { return static_cast<int>(mean.size()); }
  int output_dim() const { return static_cast<int>(components.size()); }
};

/// Top-k principal components via the iterated, deflated power method
/// (tolerance 1e-10, at most 1e4 iterations per component). Components are
/// sign-normalized so their first nonzero entry is positive.
PcaModel pca_fit(const std::vector<std::vector<double>>& data, int k);
std::vector<double> pca_apply(const PcaModel& m, std::span<const double> v);

/// Exact state preparation: pads to the next power of two, normalizes, and
/// emits a network of Ry rotations and CNOTs whose output amplitudes equal
/// v / ||v||. The overload with `n_qubits` pads to 2^n_qubits instead.
Circuit amplitude_encode(std::span<const double> v);
Circuit amplitude_encode(std::span<const double> v, int n_qubits);

/// Per-feature min-max statistics mapping the training range onto [0, pi].
struct AngleScaler {
  std::vector<double> mins;
  std::vector<double> maxs;

  static AngleScaler fit(const std::vector<std::vector<double>>& data);
  std::vector<double> rescale(std::span<const double> v) const;
};

/// Constant-angle encoding: H on every qubit, then one entangling CRz per
/// ring pair (i, i+1 mod n) carrying the rescaled feature i.
Circuit angle_encode(std::span<const double> v, const AngleScaler& scaler);

/// CSV feature file: header `id,f0,f1,...`, one row per id, full
/// round-trip float precision.
std::map<std::string, FeatureVector> load_features(const std::string& path);
void save_features(
    std::span<const std::pair<std::string, FeatureVector>> rows,
    const std::string& path);

/// Synthetic stand-in for externally produced embedding vectors: one
/// Gaussian cluster center per caption, instances scattered around it.
FeatureVector synthetic_clip_feature(int caption_index, int image_index,
                                     std::uint64_t seed, int dim = 512,
                                     double cluster_sigma = 0.05);

}  // namespace discoq
