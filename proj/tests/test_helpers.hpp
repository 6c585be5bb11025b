#pragma once

#include <cmath>
#include <stdexcept>

#include "aeicp/linalg.hpp"
#include "aeicp/rng.hpp"

namespace aeicp::testing {

inline DenseMatrix random_matrix(int rows, int cols, Xoshiro256pp& rng) {
  DenseMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.uniform_pm1();
  return m;
}

// Orthonormal Q from modified Gram-Schmidt on a random square matrix.
inline DenseMatrix random_orthogonal(int n, Xoshiro256pp& rng) {
  DenseMatrix a = random_matrix(n, n, rng);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < j; ++k) {
      double proj = 0.0;
      for (int i = 0; i < n; ++i) proj += a(i, j) * a(i, k);
      for (int i = 0; i < n; ++i) a(i, j) -= proj * a(i, k);
    }
    double norm = 0.0;
    for (int i = 0; i < n; ++i) norm += a(i, j) * a(i, j);
    norm = std::sqrt(norm);
    if (norm < 1e-8) throw std::runtime_error("degenerate random basis");
    for (int i = 0; i < n; ++i) a(i, j) /= norm;
  }
  return a;
}

// Q diag(d) Q^T
inline DenseMatrix spectral_assemble(const DenseMatrix& q, const Vector& d) {
  const int n = q.rows;
  DenseMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += q(i, k) * d[k] * q(j, k);
      m(i, j) = s;
    }
  return m;
}

}  // namespace aeicp::testing
