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

#include "discoq/ansatz.hpp"

#include <algorithm>
#include <cstdio>

#include "discoq/errors.hpp"

namespace discoq {

std::string_view gate_name(GateKind k) {
  switch (k) {
    case GateKind::H:
      return "H";
    case GateKind::Rx:
      return "RX";
    case GateKind::Ry:
      return "RY";
    case GateKind::Rz:
      return "RZ";
    case GateKind::CRx:
      return "CRX";
    case GateKind::CRz:
      return "CRZ";
    case GateKind::CNOT:
      return "CNOT";
  }
  throw ValidationError("unknown gate kind");
}

std::vector<int> ParameterRegistry::block(const std::string& owner,
                                          int count) {
  if (count <= 0) throw ValidationError("slot block size must be positive");
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = blocks_.find(owner);
  if (it != blocks_.end()) {
    if (static_cast<int>(it->second.size()) != count) {
      throw ValidationError("word '" + owner +
                            "' re-registered with a different slot count");
    }
    return it->second;
  }
  std::vector<int> ids;
  ids.reserve(static_cast<std::size_t>(count));
  for (int pos = 0; pos < count; ++pos) {
    const int id = static_cast<int>(slots_.size());
    slots_.push_back({id, owner, pos});
    ids.push_back(id);
  }
  blocks_.emplace(owner, ids);
  return ids;
}

int ParameterRegistry::size() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return static_cast<int>(slots_.size());
}

ParameterSlotInfo ParameterRegistry::info(int id) const {
  std::lock_guard<std::mutex> lock(mutex_);
  if (id < 0 || id >= static_cast<int>(slots_.size())) {
    throw ValidationError("slot id out of range");
  }
  return slots_[static_cast<std::size_t>(id)];
}

std::vector<ParameterSlotInfo> ParameterRegistry::slots() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return slots_;
}

void Circuit::validate() const {
  std::vector<int> seen(static_cast<std::size_t>(n_qubits), 0);
  auto check_qubit = [this](int q) {
    if (q < 0 || q >= n_qubits) throw ValidationError("qubit out of range");
  };
  for (const Gate& g : gates) {
    check_qubit(g.target);
    if (g.is_controlled()) {
      check_qubit(g.control);
      if (g.control == g.target) {
        throw ValidationError("gate control equals target");
      }
    }
    if (g.slot >= 0 && !g.is_rotation()) {
      throw ValidationError("only rotation gates may carry slots");
    }
  }
  for (const auto& [q, bit] : postselect) {
    check_qubit(q);
    if (bit != 0 && bit != 1) throw ValidationError("postselect bit invalid");
    seen[static_cast<std::size_t>(q)] += 1;
  }
  for (int q : output_qubits) {
    check_qubit(q);
    seen[static_cast<std::size_t>(q)] += 1;
  }
  for (int c : seen) {
    if (c != 1) {
      throw ValidationError(
          "postselect and output qubits must partition the register");
    }
  }
}

std::string Circuit::dump() const {
  std::string out = "qubits=" + std::to_string(n_qubits) + " postselect=";
  bool first = true;
  for (const auto& [q, bit] : postselect) {
    if (!first) out += ',';
    out += std::to_string(q) + ':' + std::to_string(bit);
    first = false;
  }
  out += '\n';
  char buf[64];
  for (const Gate& g : gates) {
    out += gate_name(g.kind);
    out += ' ';
    if (g.is_controlled()) {
      out += std::to_string(g.control) + ',' + std::to_string(g.target);
    } else {
      out += std::to_string(g.target);
    }
    if (g.is_rotation()) {
      if (g.slot >= 0) {
        out += " slot:" + std::to_string(g.slot);
      } else {
        std::snprintf(buf, sizeof(buf), " %.17g", g.angle);
        out += buf;
      }
    }
    out += '\n';
  }
  return out;
}

std::vector<int> Circuit::referenced_slots() const {
  std::vector<int> ids;
  for (const Gate& g : gates) {
    if (g.slot >= 0) ids.push_back(g.slot);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

int circuit_parameter_count(const Circuit& c) {
  return static_cast<int>(c.referenced_slots().size());
}

std::vector<Gate> word_circuit(const std::string& word,
                               std::span<const int> qubits, int layers,
                               GateKind entangler,
                               ParameterRegistry& registry) {
  if (qubits.empty()) throw ValidationError("word circuit needs qubits");
  if (layers < 1) throw ValidationError("layers must be >= 1");
  if (entangler != GateKind::CRz && entangler != GateKind::CRx) {
    throw ValidationError("entangler must be CRz or CRx");
  }
  const int m = static_cast<int>(qubits.size());
  std::vector<Gate> gates;

  if (m == 1) {
    const auto ids = registry.block(word, 3);
    gates.push_back({GateKind::Rx, qubits[0], -1, ids[0]});
    gates.push_back({GateKind::Rz, qubits[0], -1, ids[1]});
    gates.push_back({GateKind::Rx, qubits[0], -1, ids[2]});
    return gates;
  }

  const auto ids = registry.block(word, layers * (m - 1));
  int next = 0;
  for (int layer = 0; layer < layers; ++layer) {
    for (int k = 0; k < m; ++k) {
      gates.push_back({GateKind::H, qubits[static_cast<std::size_t>(k)]});
    }
    for (int k = 0; k + 1 < m; ++k) {
      gates.push_back({entangler, qubits[static_cast<std::size_t>(k + 1)],
                       qubits[static_cast<std::size_t>(k)],
                       ids[static_cast<std::size_t>(next++)]});
    }
  }
  return gates;
}

CupEffect cup_effect(int qa, int qb) {
  if (qa == qb) throw ValidationError("cup effect needs distinct qubits");
  CupEffect eff;
  eff.gates.push_back({GateKind::CNOT, qb, qa});
  eff.gates.push_back({GateKind::H, qa});
  eff.postselect_qubits = {qa, qb};
  return eff;
}

Circuit compile(const Diagram& diag, const AnsatzConfig& config,
                ParameterRegistry& registry) {
  diag.validate();
  if (config.layers < 1) throw ValidationError("layers must be >= 1");

  // Contiguous qubit block per wire, in wire id order.
  std::vector<std::vector<int>> wire_qubits(diag.wires.size());
  int next = 0;
  for (std::size_t w = 0; w < diag.wires.size(); ++w) {
    auto it = config.qubits.find(diag.wires[w].base);
    if (it == config.qubits.end() || it->second < 1) {
      throw ValidationError(
          std::string("no qubit count for basic type '") +
          basic_type_char(diag.wires[w].base) + "'");
    }
    for (int k = 0; k < it->second; ++k) wire_qubits[w].push_back(next++);
  }

  Circuit c;
  c.n_qubits = next;
  for (const Box& box : diag.boxes) {
    std::vector<int> qs;
    for (int w : box.wires) {
      const auto& wq = wire_qubits[static_cast<std::size_t>(w)];
      qs.insert(qs.end(), wq.begin(), wq.end());
    }
    auto gates =
        word_circuit(box.word, qs, config.layers, config.entangler, registry);
    c.gates.insert(c.gates.end(), gates.begin(), gates.end());
  }
  for (const auto& [wa, wb] : diag.cups) {
    const auto& qa = wire_qubits[static_cast<std::size_t>(wa)];
    const auto& qb = wire_qubits[static_cast<std::size_t>(wb)];
    if (qa.size() != qb.size()) {
      throw ValidationError("cup joins wires of different qubit widths");
    }
    for (std::size_t k = 0; k < qa.size(); ++k) {
      CupEffect eff = cup_effect(qa[k], qb[k]);
      c.gates.insert(c.gates.end(), eff.gates.begin(), eff.gates.end());
      c.postselect[eff.postselect_qubits[0]] = 0;
      c.postselect[eff.postselect_qubits[1]] = 0;
    }
  }
  for (int w : diag.outputs) {
    const auto& wq = wire_qubits[static_cast<std::size_t>(w)];
    c.output_qubits.insert(c.output_qubits.end(), wq.begin(), wq.end());
  }
  c.validate();
  return c;
}

}  // namespace discoq
