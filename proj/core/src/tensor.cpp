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

#include "discoq/tensor.hpp"

#include <cmath>
#include <cstddef>

#include "discoq/errors.hpp"

namespace discoq {

namespace {

std::size_t shape_size(const std::vector<int>& shape) {
  std::size_t n = 1;
  for (int d : shape) {
    if (d <= 0) throw ValidationError("tensor dimensions must be positive");
    n *= static_cast<std::size_t>(d);
  }
  return n;
}

}  // namespace

Tensor::Tensor(std::vector<int> shape)
    : shape_(std::move(shape)), data_(shape_size(shape_), 0.0) {}

Tensor Tensor::scalar(double value) {
  Tensor t;
  t.data_[0] = value;
  return t;
}

std::size_t Tensor::flat_index(std::span<const int> index) const {
  if (index.size() != shape_.size()) {
    throw ValidationError("tensor index rank mismatch");
  }
  std::size_t flat = 0;
  for (std::size_t k = 0; k < shape_.size(); ++k) {
    if (index[k] < 0 || index[k] >= shape_[k]) {
      throw ValidationError("tensor index out of range");
    }
    flat = flat * static_cast<std::size_t>(shape_[k]) +
           static_cast<std::size_t>(index[k]);
  }
  return flat;
}

double& Tensor::at(std::span<const int> index) {
  return data_[flat_index(index)];
}

double Tensor::at(std::span<const int> index) const {
  return data_[flat_index(index)];
}

Tensor Tensor::product(const Tensor& other) const {
  std::vector<int> shape = shape_;
  shape.insert(shape.end(), other.shape_.begin(), other.shape_.end());
  Tensor out(std::move(shape));
  const std::size_t nb = other.data_.size();
  for (std::size_t i = 0; i < data_.size(); ++i) {
    const double a = data_[i];
    for (std::size_t j = 0; j < nb; ++j) {
      out.data_[i * nb + j] = a * other.data_[j];
    }
  }
  return out;
}

Tensor Tensor::trace_axes(int a, int b) const {
  if (a == b || a < 0 || b < 0 || a >= rank() || b >= rank()) {
    throw ValidationError("trace_axes requires two distinct valid axes");
  }
  if (a > b) std::swap(a, b);
  if (shape_[static_cast<std::size_t>(a)] !=
      shape_[static_cast<std::size_t>(b)]) {
    throw ValidationError("trace_axes dimensions differ");
  }
  const int d = shape_[static_cast<std::size_t>(a)];

  std::vector<int> out_shape;
  for (int k = 0; k < rank(); ++k) {
    if (k != a && k != b) out_shape.push_back(shape_[static_cast<std::size_t>(k)]);
  }
  Tensor out(std::move(out_shape));

  std::vector<int> idx(static_cast<std::size_t>(rank()), 0);
  std::vector<int> out_idx(out.shape_.size(), 0);
  const std::size_t n_out = out.data_.size();
  for (std::size_t f = 0; f < n_out; ++f) {
    // Unrank the output index, then sum over the paired axis value.
    std::size_t rem = f;
    for (int k = static_cast<int>(out.shape_.size()) - 1; k >= 0; --k) {
      out_idx[static_cast<std::size_t>(k)] =
          static_cast<int>(rem % static_cast<std::size_t>(
                                     out.shape_[static_cast<std::size_t>(k)]));
      rem /= static_cast<std::size_t>(out.shape_[static_cast<std::size_t>(k)]);
    }
    int oi = 0;
    for (int k = 0; k < rank(); ++k) {
      if (k == a || k == b) continue;
      idx[static_cast<std::size_t>(k)] = out_idx[static_cast<std::size_t>(oi++)];
    }
    double sum = 0.0;
    for (int v = 0; v < d; ++v) {
      idx[static_cast<std::size_t>(a)] = v;
      idx[static_cast<std::size_t>(b)] = v;
      sum += at(idx);
    }
    out.data_[f] = sum;
  }
  return out;
}

Tensor Tensor::transpose(std::span<const int> perm) const {
  if (static_cast<int>(perm.size()) != rank()) {
    throw ValidationError("transpose permutation rank mismatch");
  }
  std::vector<int> out_shape(perm.size());
  for (std::size_t k = 0; k < perm.size(); ++k) {
    out_shape[k] = shape_[static_cast<std::size_t>(perm[k])];
  }
  Tensor out(std::move(out_shape));

  std::vector<int> out_idx(perm.size(), 0);
  std::vector<int> in_idx(perm.size(), 0);
  for (std::size_t f = 0; f < out.data_.size(); ++f) {
    std::size_t rem = f;
    for (int k = static_cast<int>(perm.size()) - 1; k >= 0; --k) {
      out_idx[static_cast<std::size_t>(k)] =
          static_cast<int>(rem % static_cast<std::size_t>(
                                     out.shape_[static_cast<std::size_t>(k)]));
      rem /= static_cast<std::size_t>(out.shape_[static_cast<std::size_t>(k)]);
    }
    for (std::size_t k = 0; k < perm.size(); ++k) {
      in_idx[static_cast<std::size_t>(perm[k])] = out_idx[k];
    }
    out.data_[f] = at(in_idx);
  }
  return out;
}

bool Tensor::allclose(const Tensor& other, double tol) const {
  if (shape_ != other.shape_) return false;
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (std::abs(data_[i] - other.data_[i]) > tol) return false;
  }
  return true;
}

}  // namespace discoq
