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

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "discoq/pregroup.hpp"
#include "discoq/tensor.hpp"

namespace discoq {

struct Box {
  std::string word;
  PregroupType type;
  std::vector<int> wires;
};

/// String diagram in state form: one box per word state, one wire per type
/// factor, cups pairing contracted wires, open wires as ordered outputs.
struct Diagram {
  std::vector<Box> boxes;
  std::vector<SimpleType> wires;  // index = wire id
  std::vector<std::pair<int, int>> cups;
  std::vector<int> outputs;

  /// Checks structural invariants (wire ownership, cup typing, planarity).
  void validate() const;
  /// Debug serialization used by golden tests; no stability promise.
  std::string to_json() const;
};

Diagram diagram_from_derivation(const Derivation& d);

/// Word tensors plus one dimension per basic type. Left/right dual wires
/// share the base type's dimension (self-dual spaces).
struct TensorAssignment {
  std::map<BasicType, int> dims;
  std::map<std::string, Tensor> tensors;
};

/// Contracts the diagram over the assignment: boxes are multiplied in
/// left-to-right, then cups are summed out in stored order. The result
/// carries one axis per output wire.
Tensor contract(const Diagram& diag, const TensorAssignment& assign);

/// Builds the four snake diagrams at the given dimension as contract
/// instances and checks each against the identity to 1e-12.
bool snake_check(int dim);

}  // namespace discoq
