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

#include "discoq/diagram.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "discoq/errors.hpp"
#include "json.hpp"

namespace discoq {

void Diagram::validate() const {
  const int n_wires = static_cast<int>(wires.size());
  std::vector<int> owner(wires.size(), -1);
  for (std::size_t b = 0; b < boxes.size(); ++b) {
    const Box& box = boxes[b];
    if (box.wires.size() != box.type.size()) {
      throw ValidationError("box '" + box.word +
                            "' wire count does not match its type");
    }
    for (std::size_t k = 0; k < box.wires.size(); ++k) {
      const int w = box.wires[k];
      if (w < 0 || w >= n_wires) {
        throw ValidationError("box wire id out of range");
      }
      if (owner[static_cast<std::size_t>(w)] != -1) {
        throw ValidationError("wire appears on more than one box");
      }
      owner[static_cast<std::size_t>(w)] = static_cast<int>(b);
      if (wires[static_cast<std::size_t>(w)] != box.type.factors()[k]) {
        throw ValidationError("wire type does not match box factor");
      }
    }
  }
  for (int w = 0; w < n_wires; ++w) {
    if (owner[static_cast<std::size_t>(w)] == -1) {
      throw ValidationError("wire belongs to no box");
    }
  }

  std::vector<int> cup_count(wires.size(), 0);
  for (const auto& [a, b] : cups) {
    if (a < 0 || a >= n_wires || b < 0 || b >= n_wires || a == b) {
      throw ValidationError("cup endpoints invalid");
    }
    cup_count[static_cast<std::size_t>(a)] += 1;
    cup_count[static_cast<std::size_t>(b)] += 1;
    const SimpleType& ta = wires[static_cast<std::size_t>(std::min(a, b))];
    const SimpleType& tb = wires[static_cast<std::size_t>(std::max(a, b))];
    if (!contracts(ta, tb)) {
      throw ValidationError("cup wires are not mutually adjoint");
    }
  }
  for (int c : cup_count) {
    if (c > 1) throw ValidationError("wire used by more than one cup");
  }
  // Planarity: with wire ids laid out left to right, no two cups may cross.
  for (std::size_t i = 0; i < cups.size(); ++i) {
    const auto [a1, b1] = std::minmax(cups[i].first, cups[i].second);
    for (std::size_t j = i + 1; j < cups.size(); ++j) {
      const auto [a2, b2] = std::minmax(cups[j].first, cups[j].second);
      const bool crossing = (a1 < a2 && a2 < b1 && b1 < b2) ||
                            (a2 < a1 && a1 < b2 && b2 < b1);
      if (crossing) throw ValidationError("cups cross");
    }
  }
  for (int w : outputs) {
    if (w < 0 || w >= n_wires) throw ValidationError("output wire invalid");
    if (cup_count[static_cast<std::size_t>(w)] != 0) {
      throw ValidationError("output wire is cupped");
    }
  }
}

std::string Diagram::to_json() const {
  nlohmann::ordered_json j;
  j["boxes"] = nlohmann::ordered_json::array();
  for (const Box& b : boxes) {
    j["boxes"].push_back({{"word", b.word},
                          {"type", b.type.str()},
                          {"wires", b.wires}});
  }
  j["wires"] = nlohmann::ordered_json::array();
  for (const SimpleType& w : wires) j["wires"].push_back(w.str());
  j["cups"] = nlohmann::ordered_json::array();
  for (const auto& [a, b] : cups) j["cups"].push_back({a, b});
  j["outputs"] = outputs;
  return j.dump();
}

Diagram diagram_from_derivation(const Derivation& d) {
  Diagram diag;
  diag.wires = d.flattened();
  int next = 0;
  for (const TypedWord& w : d.input) {
    Box box;
    box.word = w.word;
    box.type = w.type;
    for (std::size_t k = 0; k < w.type.size(); ++k) box.wires.push_back(next++);
    diag.boxes.push_back(std::move(box));
  }
  diag.cups = d.cups;
  diag.outputs = d.open_factors();
  diag.validate();
  return diag;
}

Tensor contract(const Diagram& diag, const TensorAssignment& assign) {
  // Check coverage and per-wire dimensions first so errors can name wires.
  for (const Box& box : diag.boxes) {
    auto it = assign.tensors.find(box.word);
    if (it == assign.tensors.end()) {
      throw ValidationError("no tensor assigned to word '" + box.word + "'");
    }
    const Tensor& t = it->second;
    if (t.rank() != static_cast<int>(box.type.size())) {
      throw ValidationError("tensor rank mismatch for word '" + box.word +
                            "'");
    }
    for (std::size_t k = 0; k < box.wires.size(); ++k) {
      const BasicType base = box.type.factors()[k].base;
      auto dim_it = assign.dims.find(base);
      if (dim_it == assign.dims.end() || dim_it->second <= 0) {
        throw ValidationError("missing dimension for basic type");
      }
      if (t.shape()[k] != dim_it->second) {
        throw ValidationError(
            "dimension mismatch on wire " + std::to_string(box.wires[k]) +
            " of word '" + box.word + "'");
      }
    }
  }

  // Multiply every box in, tracking which wire each axis carries.
  Tensor working = Tensor::scalar(1.0);
  std::vector<int> axis_wire;
  for (const Box& box : diag.boxes) {
    working = working.product(assign.tensors.at(box.word));
    axis_wire.insert(axis_wire.end(), box.wires.begin(), box.wires.end());
  }

  // Sum out cups in stored order.
  for (const auto& [wa, wb] : diag.cups) {
    const auto pa = std::find(axis_wire.begin(), axis_wire.end(), wa);
    const auto pb = std::find(axis_wire.begin(), axis_wire.end(), wb);
    if (pa == axis_wire.end() || pb == axis_wire.end()) {
      throw ValidationError("cup endpoint not present among open axes");
    }
    const int ia = static_cast<int>(pa - axis_wire.begin());
    const int ib = static_cast<int>(pb - axis_wire.begin());
    working = working.trace_axes(ia, ib);
    const int lo = std::min(ia, ib), hi = std::max(ia, ib);
    axis_wire.erase(axis_wire.begin() + hi);
    axis_wire.erase(axis_wire.begin() + lo);
  }

  // Reorder remaining axes to the diagram's output order.
  if (axis_wire.size() != diag.outputs.size()) {
    throw ValidationError("leftover axes do not match diagram outputs");
  }
  std::vector<int> perm;
  perm.reserve(diag.outputs.size());
  for (int w : diag.outputs) {
    const auto p = std::find(axis_wire.begin(), axis_wire.end(), w);
    if (p == axis_wire.end()) {
      throw ValidationError("output wire missing after contraction");
    }
    perm.push_back(static_cast<int>(p - axis_wire.begin()));
  }
  return working.transpose(perm);
}

namespace {

// Snake instance: a basis-state box and a cap box (identity matrix) joined
// by one cup, leaving one open wire. The four variants cover both cap wire
// orders and both sides of the input wire.
Tensor snake_column(int variant, int dim, int k) {
  const SimpleType a{BasicType::Noun, 0};
  const SimpleType al{BasicType::Noun, -1};
  const SimpleType ar{BasicType::Noun, +1};

  Tensor basis(std::vector<int>{dim});
  basis.data()[static_cast<std::size_t>(k)] = 1.0;
  Tensor cap(std::vector<int>{dim, dim});
  for (int i = 0; i < dim; ++i) {
    cap.data()[static_cast<std::size_t>(i * dim + i)] = 1.0;
  }

  Diagram diag;
  auto add_box = [&diag](const std::string& word, std::vector<SimpleType> ts) {
    Box b;
    b.word = word;
    std::vector<SimpleType> copy = ts;
    b.type = PregroupType(std::move(copy));
    for (std::size_t i = 0; i < ts.size(); ++i) {
      b.wires.push_back(static_cast<int>(diag.wires.size()));
      diag.wires.push_back(ts[i]);
    }
    diag.boxes.push_back(std::move(b));
  };

  switch (variant) {
    case 0:  // state(A), cap(A^r, A); cup joins A with A^r.
      add_box("state", {a});
      add_box("cap", {ar, a});
      diag.cups = {{0, 1}};
      diag.outputs = {2};
      break;
    case 1:  // cap(A, A^l), state(A); cup joins A^l with A.
      add_box("cap", {a, al});
      add_box("state", {a});
      diag.cups = {{1, 2}};
      diag.outputs = {0};
      break;
    case 2:  // state(A^l), cap(A, A^l); cup joins A^l with A.
      add_box("state", {al});
      add_box("cap", {a, al});
      diag.cups = {{0, 1}};
      diag.outputs = {2};
      break;
    case 3:  // cap(A^r, A), state(A^r); cup joins A with A^r.
      add_box("cap", {ar, a});
      add_box("state", {ar});
      diag.cups = {{1, 2}};
      diag.outputs = {0};
      break;
    default:
      throw ValidationError("bad snake variant");
  }
  diag.validate();

  TensorAssignment assign;
  assign.dims[BasicType::Noun] = dim;
  assign.tensors["state"] = basis;
  assign.tensors["cap"] = cap;
  return contract(diag, assign);
}

}  // namespace

bool snake_check(int dim) {
  if (dim < 1) throw ValidationError("snake_check requires dim >= 1");
  constexpr double kTol = 1e-12;
  for (int variant = 0; variant < 4; ++variant) {
    for (int k = 0; k < dim; ++k) {
      const Tensor col = snake_column(variant, dim, k);
      for (int i = 0; i < dim; ++i) {
        const double expected = (i == k) ? 1.0 : 0.0;
        if (std::abs(col.data()[static_cast<std::size_t>(i)] - expected) >
            kTol) {
          return false;
        }
      }
    }
  }
  return true;
}

}  // namespace discoq
