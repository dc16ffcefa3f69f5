#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace discoq::testing {

CMatrix identity_matrix(std::size_t n) {
  CMatrix m(n, std::vector<cplx>(n, cplx(0)));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = cplx(1);
  return m;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  const std::size_t ar = a.size(), ac = a[0].size();
  const std::size_t br = b.size(), bc = b[0].size();
  CMatrix out(ar * br, std::vector<cplx>(ac * bc, cplx(0)));
  for (std::size_t i = 0; i < ar; ++i) {
    for (std::size_t j = 0; j < ac; ++j) {
      for (std::size_t k = 0; k < br; ++k) {
        for (std::size_t l = 0; l < bc; ++l) {
          out[i * br + k][j * bc + l] = a[i][j] * b[k][l];
        }
      }
    }
  }
  return out;
}

CMatrix matmul(const CMatrix& a, const CMatrix& b) {
  const std::size_t n = a.size(), m = b[0].size(), k = b.size();
  CMatrix out(n, std::vector<cplx>(m, cplx(0)));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const cplx aip = a[i][p];
      if (aip == cplx(0)) continue;
      for (std::size_t j = 0; j < m; ++j) out[i][j] += aip * b[p][j];
    }
  }
  return out;
}

std::vector<cplx> matvec(const CMatrix& m, const std::vector<cplx>& v) {
  std::vector<cplx> out(m.size(), cplx(0));
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < v.size(); ++j) out[i] += m[i][j] * v[j];
  }
  return out;
}

namespace {

CMatrix two_by_two(const Gate& g, double t) {
  const double c = std::cos(t / 2.0), s = std::sin(t / 2.0);
  const double inv = 1.0 / std::sqrt(2.0);
  switch (g.kind) {
    case GateKind::H:
      return {{cplx(inv), cplx(inv)}, {cplx(inv), cplx(-inv)}};
    case GateKind::Rx:
    case GateKind::CRx:
      return {{cplx(c), cplx(0, -s)}, {cplx(0, -s), cplx(c)}};
    case GateKind::Ry:
      return {{cplx(c), cplx(-s)}, {cplx(s), cplx(c)}};
    case GateKind::Rz:
    case GateKind::CRz:
      return {{cplx(c, -s), cplx(0)}, {cplx(0), cplx(c, s)}};
    case GateKind::CNOT:
      return {{cplx(0), cplx(1)}, {cplx(1), cplx(0)}};
  }
  throw std::runtime_error("oracle: unknown gate");
}

CMatrix chain(int n_qubits, int position, const CMatrix& factor) {
  CMatrix out{{cplx(1)}};
  for (int q = 0; q < n_qubits; ++q) {
    out = kron(out, q == position ? factor : identity_matrix(2));
  }
  return out;
}

CMatrix controlled_chain(int n_qubits, int control, int target,
                         const CMatrix& u) {
  const CMatrix p0{{cplx(1), cplx(0)}, {cplx(0), cplx(0)}};
  const CMatrix p1{{cplx(0), cplx(0)}, {cplx(0), cplx(1)}};
  CMatrix keep{{cplx(1)}}, act{{cplx(1)}};
  for (int q = 0; q < n_qubits; ++q) {
    keep = kron(keep, q == control ? p0 : identity_matrix(2));
    act = kron(act,
               q == control ? p1 : (q == target ? u : identity_matrix(2)));
  }
  CMatrix out = keep;
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (std::size_t j = 0; j < out.size(); ++j) out[i][j] += act[i][j];
  }
  return out;
}

}  // namespace

CMatrix gate_unitary(const Gate& g, int n_qubits,
                     const ParameterVector& params) {
  const double angle = g.slot >= 0 ? params.at(g.slot) : g.angle;
  const CMatrix u = two_by_two(g, angle);
  if (g.control < 0) return chain(n_qubits, g.target, u);
  return controlled_chain(n_qubits, g.control, g.target, u);
}

StateVector dense_run(const Circuit& c, const ParameterVector& params,
                      const std::vector<cplx>& initial) {
  std::vector<cplx> state = initial;
  for (const Gate& g : c.gates) {
    state = matvec(gate_unitary(g, c.n_qubits, params), state);
  }
  // Postselect by explicit bit checks (qubit 0 = most significant bit).
  double success = 0.0;
  for (std::size_t i = 0; i < state.size(); ++i) {
    bool keep = true;
    for (const auto& [q, bit] : c.postselect) {
      const std::size_t mask = std::size_t{1} << (c.n_qubits - 1 - q);
      if (static_cast<int>((i & mask) != 0) != bit) keep = false;
    }
    if (keep) {
      success += std::norm(state[i]);
    } else {
      state[i] = cplx(0);
    }
  }
  if (success <= 0.0) throw std::runtime_error("oracle: probability 0");

  StateVector out;
  out.n_qubits = static_cast<int>(c.output_qubits.size());
  out.success_prob = success;
  const std::size_t m = c.output_qubits.size();
  out.amplitudes.assign(std::size_t{1} << m, cplx(0));
  const double scale = 1.0 / std::sqrt(success);
  for (std::size_t r = 0; r < out.amplitudes.size(); ++r) {
    std::size_t idx = 0;
    for (const auto& [q, bit] : c.postselect) {
      if (bit) idx |= std::size_t{1} << (c.n_qubits - 1 - q);
    }
    for (std::size_t j = 0; j < m; ++j) {
      if (r & (std::size_t{1} << (m - 1 - j))) {
        idx |= std::size_t{1} << (c.n_qubits - 1 - c.output_qubits[j]);
      }
    }
    out.amplitudes[r] = state[idx] * scale;
  }
  return out;
}

StateVector dense_run(const Circuit& c, const ParameterVector& params) {
  std::vector<cplx> initial(std::size_t{1} << c.n_qubits, cplx(0));
  initial[0] = cplx(1);
  return dense_run(c, params, initial);
}

Tensor brute_contract(const Diagram& diag, const TensorAssignment& assign) {
  const std::size_t n_wires = diag.wires.size();
  std::vector<int> wire_dim(n_wires, 0);
  for (std::size_t w = 0; w < n_wires; ++w) {
    wire_dim[w] = assign.dims.at(diag.wires[w].base);
  }

  std::vector<int> out_shape;
  for (int w : diag.outputs) {
    out_shape.push_back(wire_dim[static_cast<std::size_t>(w)]);
  }
  Tensor result(out_shape);

  std::vector<int> index(n_wires, 0);
  for (;;) {
    // delta per cup
    bool alive = true;
    for (const auto& [a, b] : diag.cups) {
      if (index[static_cast<std::size_t>(a)] !=
          index[static_cast<std::size_t>(b)]) {
        alive = false;
        break;
      }
    }
    if (alive) {
      double factor = 1.0;
      for (const Box& box : diag.boxes) {
        std::vector<int> bidx;
        for (int w : box.wires) bidx.push_back(index[static_cast<std::size_t>(w)]);
        factor *= assign.tensors.at(box.word).at(bidx);
      }
      std::vector<int> oidx;
      for (int w : diag.outputs) oidx.push_back(index[static_cast<std::size_t>(w)]);
      result.at(oidx) += factor;
    }

    // next assignment
    std::size_t k = 0;
    for (; k < n_wires; ++k) {
      index[k] += 1;
      if (index[k] < wire_dim[k]) break;
      index[k] = 0;
    }
    if (k == n_wires) break;
  }
  return result;
}

std::vector<std::pair<double, std::vector<double>>> jacobi_eigen(
    std::vector<std::vector<double>> m) {
  const std::size_t n = m.size();
  std::vector<std::vector<double>> v(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) off += m[i][j] * m[i][j];
    }
    if (off < 1e-24) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(m[p][q]) < 1e-18) continue;
        const double theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double mkp = m[k][p], mkq = m[k][q];
          m[k][p] = c * mkp - s * mkq;
          m[k][q] = s * mkp + c * mkq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double mpk = m[p][k], mqk = m[q][k];
          m[p][k] = c * mpk - s * mqk;
          m[q][k] = s * mpk + c * mqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::pair<double, std::vector<double>>> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> vec(n);
    for (std::size_t k = 0; k < n; ++k) vec[k] = v[k][i];
    out.emplace_back(m[i][i], std::move(vec));
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  return out;
}

double finite_difference(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> at, std::size_t index, double h) {
  at[index] += h;
  const double plus = f(at);
  at[index] -= 2.0 * h;
  const double minus = f(at);
  return (plus - minus) / (2.0 * h);
}

}  // namespace discoq::testing
