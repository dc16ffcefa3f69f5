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
#include <map>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "discoq/diagram.hpp"
#include "discoq/pregroup.hpp"

namespace discoq {

enum class GateKind { H, Rx, Ry, Rz, CRx, CRz, CNOT };

std::string_view gate_name(GateKind k);

struct Gate {
  GateKind kind = GateKind::H;
  int target = 0;
  int control = -1;   // -1 = uncontrolled
  int slot = -1;      // >= 0 references a trainable parameter
  double angle = 0.0; // constant angle, used when slot < 0

  bool is_controlled() const { return control >= 0; }
  bool is_rotation() const {
    return kind == GateKind::Rx || kind == GateKind::Ry ||
           kind == GateKind::Rz || kind == GateKind::CRx ||
           kind == GateKind::CRz;
  }
};

struct ParameterSlotInfo {
  int id = 0;
  std::string owner;
  int position = 0;
};

/// Hands out trainable parameter slots in per-word blocks. A word's block is
/// created once and every circuit mentioning the word reuses the same ids.
/// Slot creation is mutually exclusive; reads after compilation are safe
/// from any thread.
class ParameterRegistry {
 public:
  ParameterRegistry() = default;
  ParameterRegistry(const ParameterRegistry&) = delete;
  ParameterRegistry& operator=(const ParameterRegistry&) = delete;

  /// Returns the word's slot ids, allocating them on first use. Throws
  /// ValidationError when the word was previously registered with a
  /// different block size.
  std::vector<int> block(const std::string& owner, int count);

  int size() const;
  ParameterSlotInfo info(int id) const;
  std::vector<ParameterSlotInfo> slots() const;

 private:
  mutable std::mutex mutex_;
  std::vector<ParameterSlotInfo> slots_;
  std::map<std::string, std::vector<int>> blocks_;
};

/// Compiled circuit: ordered gates, postselected qubits (required bit is
/// always 0 here), and the open output qubits.
struct Circuit {
  int n_qubits = 0;
  std::vector<Gate> gates;
  std::map<int, int> postselect;
  std::vector<int> output_qubits;

  void validate() const;
  /// Line-oriented text dump used by golden tests: header
  /// `qubits=N postselect=q:b,...` then one `GATE q[,q2] [angle|slot:id]`
  /// per line.
  std::string dump() const;
  /// Unique slot ids referenced by any gate, ascending.
  std::vector<int> referenced_slots() const;
};

/// Number of distinct trainable parameters the circuit references.
int circuit_parameter_count(const Circuit& c);

struct AnsatzConfig {
  std::map<BasicType, int> qubits = {{BasicType::Noun, 1},
                                     {BasicType::Prep, 1},
                                     {BasicType::Sentence, 1}};
  int layers = 3;
  GateKind entangler = GateKind::CRz;
};

/// IQP word state on the given qubits: a single qubit gets the Euler block
/// Rx·Rz·Rx (3 slots, independent of layers); m >= 2 qubits get `layers`
/// repetitions of H on every qubit followed by an entangling rotation on
/// each adjacent pair (m-1 slots per layer).
std::vector<Gate> word_circuit(const std::string& word,
                               std::span<const int> qubits, int layers,
                               GateKind entangler, ParameterRegistry& registry);

struct CupEffect {
  std::vector<Gate> gates;
  std::array<int, 2> postselect_qubits;
};

/// Bell effect implementing a cup: CNOT(qa -> qb), H(qa), then postselect
/// both qubits on 0. Equals the inner-product pairing up to 1/sqrt(2).
CupEffect cup_effect(int qa, int qb);

/// Compiles a diagram: contiguous qubit blocks per wire left-to-right, each
/// word's circuit on its wires' qubits, then one cup effect per cup qubit
/// pair. Output qubits are those of the open wires.
Circuit compile(const Diagram& diag, const AnsatzConfig& config,
                ParameterRegistry& registry);

}  // namespace discoq
