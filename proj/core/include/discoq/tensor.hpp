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

#include <span>
#include <vector>

namespace discoq {

/// Small dense real tensor, row-major. Rank 0 holds a single scalar.
class Tensor {
 public:
  Tensor() : data_(1, 0.0) {}
  explicit Tensor(std::vector<int> shape);
  static Tensor scalar(double value);

  int rank() const { return static_cast<int>(shape_.size()); }
  const std::vector<int>& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }

  double& at(std::span<const int> index);
  double at(std::span<const int> index) const;
  double& operator[](std::size_t flat) { return data_[flat]; }
  double operator[](std::size_t flat) const { return data_[flat]; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  /// Tensor product; the other tensor's axes are appended after this one's.
  Tensor product(const Tensor& other) const;
  /// Sums over a pair of equal-dimension axes (the inner-product pairing).
  Tensor trace_axes(int a, int b) const;
  /// Reorders axes: output axis k is input axis perm[k].
  Tensor transpose(std::span<const int> perm) const;

  bool allclose(const Tensor& other, double tol) const;

 private:
  std::size_t flat_index(std::span<const int> index) const;

  std::vector<int> shape_;
  std::vector<double> data_;
};

}  // namespace discoq
