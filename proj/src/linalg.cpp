#include "aeicp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace aeicp {

DenseMatrix DenseMatrix::identity(int n) {
  DenseMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

bool all_finite(const Vector& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

bool all_finite(const DenseMatrix& m) { return all_finite(m.data); }

double dot(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double nrm2(const Vector& a) { return std::sqrt(dot(a, a)); }

double nrm_inf(const Vector& a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::fabs(x));
  return m;
}

void axpy(double alpha, const Vector& x, Vector& y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

Vector matvec(const DenseMatrix& m, const Vector& x) {
  Vector y(m.rows, 0.0);
  for (int i = 0; i < m.rows; ++i) {
    const double* row = m.data.data() + static_cast<std::size_t>(i) * m.cols;
    double s = 0.0;
    for (int j = 0; j < m.cols; ++j) s += row[j] * x[j];
    y[i] = s;
  }
  return y;
}

Vector matvec_t(const DenseMatrix& m, const Vector& x) {
  Vector y(m.cols, 0.0);
  for (int i = 0; i < m.rows; ++i) {
    const double* row = m.data.data() + static_cast<std::size_t>(i) * m.cols;
    const double xi = x[i];
    for (int j = 0; j < m.cols; ++j) y[j] += row[j] * xi;
  }
  return y;
}

DenseMatrix transpose(const DenseMatrix& m) {
  DenseMatrix t(m.cols, m.rows);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) t(j, i) = m(i, j);
  return t;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols != b.rows) throw std::invalid_argument("matmul: shape mismatch");
  DenseMatrix c(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i)
    for (int k = 0; k < a.cols; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < b.cols; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

DenseMatrix symmetrized(const DenseMatrix& m) {
  if (!m.square()) throw std::invalid_argument("symmetrized: matrix not square");
  DenseMatrix s(m.rows, m.cols);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) s(i, j) = 0.5 * (m(i, j) + m(j, i));
  return s;
}

namespace {

double offdiag_fro(const DenseMatrix& a) {
  double s = 0.0;
  for (int p = 0; p < a.rows; ++p)
    for (int q = p + 1; q < a.cols; ++q) s += 2.0 * a(p, q) * a(p, q);
  return std::sqrt(s);
}

}  // namespace

Vector sym_eigenvalues(const DenseMatrix& m, double tol) {
  if (!m.square()) throw std::invalid_argument("sym_eigenvalues: matrix not square");
  if (!all_finite(m)) throw std::invalid_argument("sym_eigenvalues: non-finite entries");
  DenseMatrix a = symmetrized(m);
  const int n = a.rows;
  if (n == 0) return {};
  if (n == 1) return {a(0, 0)};

  double anorm = 0.0;
  for (double x : a.data) anorm = std::max(anorm, std::fabs(x));
  const double stop = std::max(tol, 4.0 * n * anorm * std::numeric_limits<double>::epsilon());

  for (int sweep = 0; sweep < 64; ++sweep) {
    if (offdiag_fro(a) <= stop) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        const double small = std::numeric_limits<double>::epsilon() *
                             (std::fabs(a(p, p)) + std::fabs(a(q, q)));
        if (std::fabs(apq) <= small) {
          continue;
        }
        const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const double app = a(p, p), aqq = a(q, q);
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = a(q, p) = 0.0;
        for (int i = 0; i < n; ++i) {
          if (i == p || i == q) continue;
          const double aip = a(i, p), aiq = a(i, q);
          a(i, p) = a(p, i) = c * aip - s * aiq;
          a(i, q) = a(q, i) = s * aip + c * aiq;
        }
      }
    }
  }

  Vector ev(n);
  for (int i = 0; i < n; ++i) ev[i] = a(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

double lambda_min_sym(const DenseMatrix& m, double tol) {
  return sym_eigenvalues(m, tol).front();
}

double spectral_norm_sym(const DenseMatrix& m, double tol) {
  const Vector ev = sym_eigenvalues(m, tol);
  return std::max(std::fabs(ev.front()), std::fabs(ev.back()));
}

Vector singular_values(const DenseMatrix& m) {
  if (!all_finite(m)) throw std::invalid_argument("singular_values: non-finite entries");
  // One-sided Jacobi orthogonalizes the columns; work on the taller shape.
  const DenseMatrix w = (m.rows >= m.cols) ? m : transpose(m);
  const int rows = w.rows, n = w.cols;
  if (n == 0) return {};
  std::vector<Vector> col(n, Vector(rows));
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < rows; ++i) col[j][i] = w(i, j);

  const double eps = std::numeric_limits<double>::epsilon();
  for (int sweep = 0; sweep < 64; ++sweep) {
    bool converged = true;
    for (int i = 0; i < n - 1; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const double alpha = dot(col[i], col[i]);
        const double beta = dot(col[j], col[j]);
        const double gamma = dot(col[i], col[j]);
        if (std::fabs(gamma) <= 16.0 * eps * std::sqrt(alpha * beta) || gamma == 0.0)
          continue;
        converged = false;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (int r = 0; r < rows; ++r) {
          const double vi = col[i][r], vj = col[j][r];
          col[i][r] = c * vi - s * vj;
          col[j][r] = s * vi + c * vj;
        }
      }
    }
    if (converged) break;
  }

  Vector sv(n);
  for (int j = 0; j < n; ++j) sv[j] = nrm2(col[j]);
  std::sort(sv.begin(), sv.end(), std::greater<double>());
  return sv;
}

double cond_number(const DenseMatrix& m) {
  if (!m.square()) throw std::invalid_argument("cond_number: matrix not square");
  const Vector sv = singular_values(m);
  if (sv.empty()) return 1.0;
  const double smax = sv.front();
  const double smin = sv.back();
  const double floor = std::max(m.rows, m.cols) *
                       std::numeric_limits<double>::epsilon() * smax;
  if (smax == 0.0 || smin <= floor) return std::numeric_limits<double>::infinity();
  return smax / smin;
}

// ---------------------------------------------------------------------------
// Bunch-Kaufman LDL^T (lower variant, mirrors LAPACK dsytf2/dsytrs).

LdlFactor::LdlFactor(DenseMatrix k) : n_(k.rows), a_(std::move(k)), ipiv_(n_, 0) {
  if (!a_.square()) throw std::invalid_argument("LdlFactor: matrix not square");
  const int n = n_;
  DenseMatrix& a = a_;
  const double alpha = (1.0 + std::sqrt(17.0)) / 8.0;

  // Bunch-Kaufman bounds element growth, so small pivots are legitimate in
  // badly scaled saddle systems; only pivots a division cannot survive are
  // flagged, callers decide whether to regularize.
  const double tiny = std::numeric_limits<double>::min();

  int kcol = 0;
  while (kcol < n) {
    int kstep = 1;
    int kp = kcol;
    const double absakk = std::fabs(a(kcol, kcol));
    int imax = kcol;
    double colmax = 0.0;
    if (kcol < n - 1) {
      for (int i = kcol + 1; i < n; ++i) {
        const double v = std::fabs(a(i, kcol));
        if (v > colmax) {
          colmax = v;
          imax = i;
        }
      }
    }

    if (std::max(absakk, colmax) == 0.0) {
      ok_ = false;  // exactly singular column
      ipiv_[kcol] = kcol;
      ++kcol;
      continue;
    }

    if (absakk >= alpha * colmax) {
      kp = kcol;
    } else {
      double rowmax = 0.0;
      for (int j = kcol; j < imax; ++j) rowmax = std::max(rowmax, std::fabs(a(imax, j)));
      for (int i = imax + 1; i < n; ++i) rowmax = std::max(rowmax, std::fabs(a(i, imax)));
      if (absakk >= alpha * colmax * (colmax / rowmax)) {
        kp = kcol;
      } else if (std::fabs(a(imax, imax)) >= alpha * rowmax) {
        kp = imax;
      } else {
        kp = imax;
        kstep = 2;
      }
    }

    const int kk = kcol + kstep - 1;
    if (kp != kk) {
      for (int i = kp + 1; i < n; ++i) std::swap(a(i, kk), a(i, kp));
      for (int j = kk + 1; j < kp; ++j) std::swap(a(j, kk), a(kp, j));
      std::swap(a(kk, kk), a(kp, kp));
      if (kstep == 2) std::swap(a(kcol + 1, kcol), a(kp, kcol));
    }

    if (kstep == 1) {
      const double d = a(kcol, kcol);
      if (std::fabs(d) < tiny) ok_ = false;
      if (kcol < n - 1 && d != 0.0) {
        const double r1 = 1.0 / d;
        for (int j = kcol + 1; j < n; ++j) {
          const double cj = r1 * a(j, kcol);
          if (cj != 0.0)
            for (int i = j; i < n; ++i) a(i, j) -= a(i, kcol) * cj;
        }
        for (int i = kcol + 1; i < n; ++i) a(i, kcol) *= r1;
      }
      ipiv_[kcol] = kp;
    } else {
      const double d21 = a(kcol + 1, kcol);
      if (std::fabs(d21) < tiny) ok_ = false;
      if (kcol < n - 2 && d21 != 0.0) {
        const double d11 = a(kcol + 1, kcol + 1) / d21;
        const double d22 = a(kcol, kcol) / d21;
        const double t = 1.0 / (d11 * d22 - 1.0);
        const double d21t = t / d21;
        for (int j = kcol + 2; j < n; ++j) {
          const double wk = d21t * (d11 * a(j, kcol) - a(j, kcol + 1));
          const double wkp1 = d21t * (d22 * a(j, kcol + 1) - a(j, kcol));
          for (int i = j; i < n; ++i)
            a(i, j) -= a(i, kcol) * wk + a(i, kcol + 1) * wkp1;
          a(j, kcol) = wk;
          a(j, kcol + 1) = wkp1;
        }
      }
      ipiv_[kcol] = -(kp + 1);
      ipiv_[kcol + 1] = -(kp + 1);
    }
    kcol += kstep;
  }
}

void LdlFactor::solve(Vector& b) const {
  const int n = n_;
  const DenseMatrix& a = a_;

  // Solve L*D*y = P*b.
  int k = 0;
  while (k < n) {
    if (ipiv_[k] >= 0) {
      const int kp = ipiv_[k];
      if (kp != k) std::swap(b[k], b[kp]);
      for (int i = k + 1; i < n; ++i) b[i] -= a(i, k) * b[k];
      b[k] /= a(k, k);
      ++k;
    } else {
      const int kp = -ipiv_[k] - 1;
      if (kp != k + 1) std::swap(b[k + 1], b[kp]);
      for (int i = k + 2; i < n; ++i) b[i] -= a(i, k) * b[k] + a(i, k + 1) * b[k + 1];
      const double akm1k = a(k + 1, k);
      const double akm1 = a(k, k) / akm1k;
      const double ak = a(k + 1, k + 1) / akm1k;
      const double denom = akm1 * ak - 1.0;
      const double bkm1 = b[k] / akm1k;
      const double bk = b[k + 1] / akm1k;
      b[k] = (ak * bkm1 - bk) / denom;
      b[k + 1] = (akm1 * bk - bkm1) / denom;
      k += 2;
    }
  }

  // Solve L^T*x = y, undoing the interchanges on the way back.
  k = n - 1;
  while (k >= 0) {
    if (ipiv_[k] >= 0) {
      double s = b[k];
      for (int i = k + 1; i < n; ++i) s -= a(i, k) * b[i];
      b[k] = s;
      const int kp = ipiv_[k];
      if (kp != k) std::swap(b[k], b[kp]);
      --k;
    } else {
      double sk = b[k], skm1 = b[k - 1];
      for (int i = k + 1; i < n; ++i) {
        sk -= a(i, k) * b[i];
        skm1 -= a(i, k - 1) * b[i];
      }
      b[k] = sk;
      b[k - 1] = skm1;
      const int kp = -ipiv_[k] - 1;
      if (kp != k) std::swap(b[k], b[kp]);
      k -= 2;
    }
  }
}

}  // namespace aeicp
