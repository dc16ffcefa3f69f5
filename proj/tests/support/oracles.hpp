// Test-side oracles, independent of the library's implementation paths:
// a dense matrix-product simulator, a nested-loop tensor contraction, a
// Jacobi eigensolver, and central finite differences.
#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "discoq/diagram.hpp"
#include "discoq/simulator.hpp"

namespace discoq::testing {

using cplx = std::complex<double>;
using CMatrix = std::vector<std::vector<cplx>>;  // row-major dense

CMatrix identity_matrix(std::size_t n);
CMatrix kron(const CMatrix& a, const CMatrix& b);
CMatrix matmul(const CMatrix& a, const CMatrix& b);
std::vector<cplx> matvec(const CMatrix& m, const std::vector<cplx>& v);

/// Full 2^n x 2^n unitary of one gate, built by Kronecker products.
CMatrix gate_unitary(const Gate& g, int n_qubits,
                     const ParameterVector& params);

/// Runs the circuit through dense matrix products, applies postselection
/// and renormalization, and reduces to the output qubits. Returns the same
/// shape of result as discoq::run.
StateVector dense_run(const Circuit& c, const ParameterVector& params);
StateVector dense_run(const Circuit& c, const ParameterVector& params,
                      const std::vector<cplx>& initial);

/// Exhaustive nested-loop contraction: sums over every wire index with an
/// explicit Kronecker delta per cup.
Tensor brute_contract(const Diagram& diag, const TensorAssignment& assign);

/// Cyclic Jacobi eigendecomposition of a symmetric matrix; returns
/// (eigenvalue, eigenvector) pairs sorted by descending eigenvalue.
std::vector<std::pair<double, std::vector<double>>> jacobi_eigen(
    std::vector<std::vector<double>> m);

/// Central finite difference of a scalar function of one parameter vector.
double finite_difference(const std::function<double(const std::vector<double>&)>& f,
                         std::vector<double> at, std::size_t index, double h);

}  // namespace discoq::testing
