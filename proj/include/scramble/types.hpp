// Core value types shared by all modules: the system/environment split and
// the dense complex-matrix aliases used throughout.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>

namespace scramble {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

// Qubit bipartition. Joint-space indices are system-major: i = k*d_e + e.
struct SubsystemSplit {
  int n_s = 0;  // system qubits
  int n_e = 0;  // environment qubits
  Index d_s = 1;
  Index d_e = 1;
  Index d = 1;

  static SubsystemSplit qubits(int n_s, int n_e);
};

// Dense-diagonalization size guard (default 4096, override via SCRAMBLE_MAX_DIM).
Index max_dense_dim();
void check_dense_dim(Index dim);

}  // namespace scramble
