#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace aeicp {

using Vector = std::vector<double>;

// Dense row-major matrix. Dense storage is used throughout: the largest
// instances this project targets are around n = 1000, where O(n^3) kernels
// are perfectly tractable and keep the code free of sparse bookkeeping.
struct DenseMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;  // row-major, rows*cols entries

  DenseMatrix() = default;
  DenseMatrix(int r, int c)
      : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

  double& operator()(int i, int j) {
    return data[static_cast<std::size_t>(i) * cols + j];
  }
  double operator()(int i, int j) const {
    return data[static_cast<std::size_t>(i) * cols + j];
  }

  bool square() const { return rows == cols; }

  static DenseMatrix identity(int n);
};

bool all_finite(const Vector& v);
bool all_finite(const DenseMatrix& m);

double dot(const Vector& a, const Vector& b);
double nrm2(const Vector& a);
double nrm_inf(const Vector& a);
// y += alpha * x
void axpy(double alpha, const Vector& x, Vector& y);

Vector matvec(const DenseMatrix& m, const Vector& x);    // m * x
Vector matvec_t(const DenseMatrix& m, const Vector& x);  // m^T * x
DenseMatrix transpose(const DenseMatrix& m);
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix symmetrized(const DenseMatrix& m);  // (m + m^T)/2

// All eigenvalues of (m + m^T)/2 in ascending order, computed with cyclic
// Jacobi rotations. `tol` is the absolute accuracy of the eigenvalues
// (Weyl: the error is bounded by the remaining off-diagonal norm).
Vector sym_eigenvalues(const DenseMatrix& m, double tol = 1e-12);

// Smallest eigenvalue of (m + m^T)/2 to absolute accuracy `tol`.
double lambda_min_sym(const DenseMatrix& m, double tol = 1e-10);

// Largest absolute eigenvalue of (m + m^T)/2.
double spectral_norm_sym(const DenseMatrix& m, double tol = 1e-10);

// Singular values via one-sided Jacobi, descending.
Vector singular_values(const DenseMatrix& m);

// sigma_max / sigma_min. Returns +inf when sigma_min sits below the
// machine-noise floor max(rows, cols) * eps * sigma_max.
double cond_number(const DenseMatrix& m);

// Symmetric indefinite LDL^T factorization with Bunch-Kaufman partial
// pivoting (the dsytf2/dsytrs scheme), dense, lower triangle referenced.
// Handles the saddle-point KKT systems of the interior-point solver,
// where plain Cholesky/LDL would break on the zero (2,2) block.
class LdlFactor {
 public:
  explicit LdlFactor(DenseMatrix k);

  // False when a pivot collapsed below n*eps*max|K|; solves against such a
  // factorization are unreliable and callers should regularize and retry.
  bool ok() const { return ok_; }

  void solve(Vector& b) const;  // overwrites b with K^{-1} b

 private:
  int n_ = 0;
  DenseMatrix a_;
  std::vector<int> ipiv_;  // LAPACK convention: >0 one 1x1, <0 pair of a 2x2
  bool ok_ = true;
};

}  // namespace aeicp
