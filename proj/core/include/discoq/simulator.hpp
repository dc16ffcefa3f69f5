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

#include <complex>
#include <iosfwd>
#include <vector>

#include "discoq/ansatz.hpp"

namespace discoq {

/// Exact dense state over `n_qubits` qubits. Qubit 0 is the most
/// significant bit of the amplitude index. After a run the amplitudes are
/// normalized and `success_prob` holds the pre-normalization squared norm
/// surviving postselection.
struct StateVector {
  int n_qubits = 0;
  std::vector<std::complex<double>> amplitudes;
  double success_prob = 1.0;

  static StateVector zero_state(int n_qubits);
  double norm() const;
};

/// Trainable angles, indexed by slot id.
class ParameterVector {
 public:
  ParameterVector() = default;
  explicit ParameterVector(std::vector<double> values)
      : values_(std::move(values)) {}
  static ParameterVector zeros(int n) {
    return ParameterVector(std::vector<double>(static_cast<std::size_t>(n)));
  }

  double at(int slot) const;
  void set(int slot, double value);
  int size() const { return static_cast<int>(values_.size()); }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> values_;
};

/// Applies the circuit to |0...0> (or `initial`), zeroes amplitudes failing
/// postselection, records the surviving squared norm, renormalizes, and
/// returns the state reduced to the output qubits.
///
/// Conventions: Rz(t) = diag(e^{-it/2}, e^{+it/2}); Rx(t) = cos(t/2) I
/// - i sin(t/2) X; Ry(t) = cos(t/2) I - i sin(t/2) Y; controlled rotations
/// act on the target when the control is 1.
StateVector run(const Circuit& c, const ParameterVector& params);
StateVector run(const Circuit& c, const ParameterVector& params,
                const StateVector& initial);

/// Squared magnitude of the inner product of two normalized states.
double overlap(const StateVector& a, const StateVector& b);

struct OverlapGrad {
  double value = 0.0;
  std::vector<double> grad;  // indexed by slot id, sized like the params
};

/// Overlap of run(a) and run(b) together with its exact gradient for every
/// slot, computed with the adjoint method: gates are replayed backward with
/// analytic rotation derivatives, and the postselection renormalization is
/// differentiated through the surviving-norm terms.
OverlapGrad overlap_grad(const Circuit& a, const Circuit& b,
                         const ParameterVector& params,
                         const StateVector* initial_a = nullptr,
                         const StateVector* initial_b = nullptr);

/// CSV amplitude dump (index,re,im) for debugging.
void dump_amplitudes(const StateVector& sv, std::ostream& os);

/// Hard cap on simulated register width.
inline constexpr int kMaxQubits = 24;

}  // namespace discoq
