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

#include "discoq/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "discoq/errors.hpp"

namespace discoq {

namespace {

using cplx = std::complex<double>;

std::size_t qubit_mask(int n_qubits, int q) {
  return std::size_t{1} << (n_qubits - 1 - q);  // qubit 0 is the MSB
}

double resolve_angle(const Gate& g, const ParameterVector& params) {
  if (g.slot < 0) return g.angle;
  return params.at(g.slot);
}

// Applies a 2x2 matrix (row-major u00,u01,u10,u11) to the target qubit,
// restricted to the control-1 subspace when a control is present.
void apply_two_by_two(std::vector<cplx>& amps, int n, int target, int control,
                      const std::array<cplx, 4>& u) {
  const std::size_t tmask = qubit_mask(n, target);
  const std::size_t cmask = control >= 0 ? qubit_mask(n, control) : 0;
  const std::size_t size = amps.size();
  for (std::size_t i = 0; i < size; ++i) {
    if (i & tmask) continue;
    if (cmask && !(i & cmask)) continue;
    const std::size_t j = i | tmask;
    const cplx x = amps[i];
    const cplx y = amps[j];
    amps[i] = u[0] * x + u[1] * y;
    amps[j] = u[2] * x + u[3] * y;
  }
}

std::array<cplx, 4> gate_matrix(const Gate& g, double angle, bool inverse) {
  const double t = inverse ? -angle : angle;
  const double c = std::cos(t / 2.0);
  const double s = std::sin(t / 2.0);
  constexpr double kInvSqrt2 = 0.70710678118654752440;
  switch (g.kind) {
    case GateKind::H:
      return {cplx(kInvSqrt2), cplx(kInvSqrt2), cplx(kInvSqrt2),
              cplx(-kInvSqrt2)};
    case GateKind::Rx:
    case GateKind::CRx:
      return {cplx(c), cplx(0, -s), cplx(0, -s), cplx(c)};
    case GateKind::Ry:
      return {cplx(c), cplx(-s), cplx(s), cplx(c)};
    case GateKind::Rz:
    case GateKind::CRz:
      return {cplx(c, -s), cplx(0), cplx(0), cplx(c, s)};
    case GateKind::CNOT:
      return {cplx(0), cplx(1), cplx(1), cplx(0)};
  }
  throw SimulationError("unknown gate kind");
}

void apply_gate(std::vector<cplx>& amps, int n, const Gate& g,
                const ParameterVector& params, bool inverse) {
  apply_two_by_two(amps, n, g.target, g.control,
                   gate_matrix(g, resolve_angle(g, params), inverse));
}

// out = G |in> where G is the rotation generator (X, Y or Z, projected onto
// the control-1 subspace for controlled rotations).
void apply_generator(const std::vector<cplx>& in, std::vector<cplx>& out,
                     int n, const Gate& g) {
  const std::size_t tmask = qubit_mask(n, g.target);
  const std::size_t cmask = g.control >= 0 ? qubit_mask(n, g.control) : 0;
  std::fill(out.begin(), out.end(), cplx(0));
  const std::size_t size = in.size();
  switch (g.kind) {
    case GateKind::Rx:
    case GateKind::CRx:
      for (std::size_t i = 0; i < size; ++i) {
        if (cmask && !(i & cmask)) continue;
        out[i] = in[i ^ tmask];
      }
      break;
    case GateKind::Ry:
      for (std::size_t i = 0; i < size; ++i) {
        if (cmask && !(i & cmask)) continue;
        out[i] = (i & tmask) ? cplx(0, 1) * in[i ^ tmask]
                             : cplx(0, -1) * in[i ^ tmask];
      }
      break;
    case GateKind::Rz:
    case GateKind::CRz:
      for (std::size_t i = 0; i < size; ++i) {
        if (cmask && !(i & cmask)) continue;
        out[i] = (i & tmask) ? -in[i] : in[i];
      }
      break;
    default:
      throw SimulationError("gate has no rotation generator");
  }
}

cplx inner(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  cplx sum(0);
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::conj(a[i]) * b[i];
  return sum;
}

struct OutputPattern {
  std::size_t base = 0;                 // postselected bits at required value
  std::vector<std::size_t> out_masks;   // mask per output qubit, MSB first
};

OutputPattern output_pattern(const Circuit& c) {
  OutputPattern p;
  for (const auto& [q, bit] : c.postselect) {
    if (bit) p.base |= qubit_mask(c.n_qubits, q);
  }
  p.out_masks.reserve(c.output_qubits.size());
  for (int q : c.output_qubits) p.out_masks.push_back(qubit_mask(c.n_qubits, q));
  return p;
}

std::size_t full_index(const OutputPattern& p, std::size_t reduced) {
  std::size_t idx = p.base;
  const std::size_t m = p.out_masks.size();
  for (std::size_t j = 0; j < m; ++j) {
    if (reduced & (std::size_t{1} << (m - 1 - j))) idx |= p.out_masks[j];
  }
  return idx;
}

std::vector<cplx> extract_reduced(const std::vector<cplx>& amps,
                                  const Circuit& c) {
  const OutputPattern p = output_pattern(c);
  std::vector<cplx> reduced(std::size_t{1} << c.output_qubits.size());
  for (std::size_t r = 0; r < reduced.size(); ++r) {
    reduced[r] = amps[full_index(p, r)];
  }
  return reduced;
}

std::vector<cplx> embed_reduced(const std::vector<cplx>& reduced,
                                const Circuit& c) {
  const OutputPattern p = output_pattern(c);
  std::vector<cplx> full(std::size_t{1} << c.n_qubits, cplx(0));
  for (std::size_t r = 0; r < reduced.size(); ++r) {
    full[full_index(p, r)] = reduced[r];
  }
  return full;
}

// Zeroes amplitudes violating the postselection; returns surviving norm^2.
double project(std::vector<cplx>& amps, const Circuit& c) {
  if (c.postselect.empty()) {
    double norm2 = 0.0;
    for (const cplx& a : amps) norm2 += std::norm(a);
    return norm2;
  }
  std::size_t mask = 0, want = 0;
  for (const auto& [q, bit] : c.postselect) {
    const std::size_t m = qubit_mask(c.n_qubits, q);
    mask |= m;
    if (bit) want |= m;
  }
  double norm2 = 0.0;
  for (std::size_t i = 0; i < amps.size(); ++i) {
    if ((i & mask) == want) {
      norm2 += std::norm(amps[i]);
    } else {
      amps[i] = cplx(0);
    }
  }
  return norm2;
}

struct Execution {
  std::vector<cplx> full;       // state after all gates
  std::vector<cplx> projected;  // postselection applied, unnormalized
  std::vector<cplx> reduced;    // output-qubit amplitudes, unnormalized
  double success = 1.0;
};

Execution execute(const Circuit& c, const ParameterVector& params,
                  const StateVector* initial) {
  if (c.n_qubits < 1 || c.n_qubits > kMaxQubits) {
    throw SimulationError("circuit qubit count out of supported range");
  }
  Execution e;
  if (initial != nullptr) {
    if (initial->n_qubits != c.n_qubits ||
        initial->amplitudes.size() != (std::size_t{1} << c.n_qubits)) {
      throw SimulationError("initial state size mismatch");
    }
    e.full = initial->amplitudes;
  } else {
    e.full.assign(std::size_t{1} << c.n_qubits, cplx(0));
    e.full[0] = cplx(1);
  }
  for (const Gate& g : c.gates) {
    apply_gate(e.full, c.n_qubits, g, params, /*inverse=*/false);
  }
  e.projected = e.full;
  e.success = project(e.projected, c);
  if (!(e.success > 0.0)) {
    throw SimulationError("degenerate postselection: success probability 0");
  }
  e.reduced = extract_reduced(e.projected, c);
  return e;
}

// Accumulates, for every trainable gate of the circuit, the quantities
//   dK[slot]  += <lambda_g | (-i/2) G_j | phi_j>
//   dS[slot]  += 2 Re <lambda_s | (-i/2) G_j | phi_j>
// by replaying the gates backward. phi enters as the state after all gates,
// lambda_g / lambda_s as the fixed left-hand vectors.
void adjoint_sweep(const Circuit& c, const ParameterVector& params,
                   std::vector<cplx> phi, std::vector<cplx> lambda_g,
                   std::vector<cplx> lambda_s, std::vector<cplx>& dK,
                   std::vector<double>& dS) {
  int first_trainable = -1;
  for (std::size_t j = 0; j < c.gates.size(); ++j) {
    if (c.gates[j].slot >= 0) {
      first_trainable = static_cast<int>(j);
      break;
    }
  }
  if (first_trainable < 0) return;

  std::vector<cplx> tmp(phi.size());
  for (int j = static_cast<int>(c.gates.size()) - 1; j >= first_trainable;
       --j) {
    const Gate& g = c.gates[static_cast<std::size_t>(j)];
    if (g.slot >= 0) {
      apply_generator(phi, tmp, c.n_qubits, g);
      const cplx half(0, -0.5);
      dK[static_cast<std::size_t>(g.slot)] += half * inner(lambda_g, tmp);
      dS[static_cast<std::size_t>(g.slot)] +=
          2.0 * std::real(half * inner(lambda_s, tmp));
    }
    apply_gate(phi, c.n_qubits, g, params, /*inverse=*/true);
    apply_gate(lambda_g, c.n_qubits, g, params, /*inverse=*/true);
    apply_gate(lambda_s, c.n_qubits, g, params, /*inverse=*/true);
  }
}

}  // namespace

StateVector StateVector::zero_state(int n_qubits) {
  StateVector sv;
  sv.n_qubits = n_qubits;
  sv.amplitudes.assign(std::size_t{1} << n_qubits, cplx(0));
  sv.amplitudes[0] = cplx(1);
  return sv;
}

double StateVector::norm() const {
  double norm2 = 0.0;
  for (const cplx& a : amplitudes) norm2 += std::norm(a);
  return std::sqrt(norm2);
}

double ParameterVector::at(int slot) const {
  if (slot < 0 || slot >= size()) {
    throw SimulationError("missing value for parameter slot " +
                          std::to_string(slot));
  }
  return values_[static_cast<std::size_t>(slot)];
}

void ParameterVector::set(int slot, double value) {
  if (slot < 0 || slot >= size()) {
    throw SimulationError("missing value for parameter slot " +
                          std::to_string(slot));
  }
  values_[static_cast<std::size_t>(slot)] = value;
}

namespace {

StateVector run_impl(const Circuit& c, const ParameterVector& params,
                     const StateVector* initial) {
  Execution e = execute(c, params, initial);
  StateVector out;
  out.n_qubits = static_cast<int>(c.output_qubits.size());
  out.success_prob = e.success;
  const double scale = 1.0 / std::sqrt(e.success);
  out.amplitudes = std::move(e.reduced);
  for (cplx& a : out.amplitudes) a *= scale;
  return out;
}

}  // namespace

StateVector run(const Circuit& c, const ParameterVector& params) {
  return run_impl(c, params, nullptr);
}

StateVector run(const Circuit& c, const ParameterVector& params,
                const StateVector& initial) {
  return run_impl(c, params, &initial);
}

double overlap(const StateVector& a, const StateVector& b) {
  if (a.amplitudes.size() != b.amplitudes.size()) {
    throw SimulationError("overlap size mismatch");
  }
  return std::norm(inner(a.amplitudes, b.amplitudes));
}

OverlapGrad overlap_grad(const Circuit& a, const Circuit& b,
                         const ParameterVector& params,
                         const StateVector* initial_a,
                         const StateVector* initial_b) {
  Execution ea = execute(a, params, initial_a);
  Execution eb = execute(b, params, initial_b);
  if (ea.reduced.size() != eb.reduced.size()) {
    throw SimulationError("overlap size mismatch");
  }

  const cplx g = inner(ea.reduced, eb.reduced);  // unnormalized overlap
  const double sa = ea.success;
  const double sb = eb.success;
  const double value = std::norm(g) / (sa * sb);

  OverlapGrad out;
  out.value = value;
  out.grad.assign(params.values().size(), 0.0);

  const std::size_t n_slots = out.grad.size();
  std::vector<cplx> dK_a(n_slots, cplx(0)), dK_b(n_slots, cplx(0));
  std::vector<double> dS_a(n_slots, 0.0), dS_b(n_slots, 0.0);

  // Side a: d<ra|rb> = conj(dK) with lambda_g = embed_a(rb).
  adjoint_sweep(a, params, ea.full, embed_reduced(eb.reduced, a), ea.projected,
                dK_a, dS_a);
  // Side b: d<ra|rb> = dK directly with lambda_g = embed_b(ra).
  adjoint_sweep(b, params, eb.full, embed_reduced(ea.reduced, b), eb.projected,
                dK_b, dS_b);

  for (std::size_t m = 0; m < n_slots; ++m) {
    const cplx dg = std::conj(dK_a[m]) + dK_b[m];
    double d = 2.0 * std::real(std::conj(g) * dg) / (sa * sb);
    d -= value * (dS_a[m] / sa + dS_b[m] / sb);
    out.grad[m] = d;
  }
  return out;
}

void dump_amplitudes(const StateVector& sv, std::ostream& os) {
  os << "index,re,im\n";
  char buf[96];
  for (std::size_t i = 0; i < sv.amplitudes.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g\n", i,
                  sv.amplitudes[i].real(), sv.amplitudes[i].imag());
    os << buf;
  }
}

}  // namespace discoq
