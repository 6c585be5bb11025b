#include "aeicp/formulations.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aeicp {

const char* to_string(FormKind kind) {
  switch (kind) {
    case FormKind::DCP1: return "dcp1";
    case FormKind::DCP2: return "dcp2";
    case FormKind::DCP3: return "dcp3";
  }
  return "?";
}

int DcPoint::flat_size(FormKind kind, int n) {
  switch (kind) {
    case FormKind::DCP1: return 3 * n + 1;
    case FormKind::DCP2: return 2 * n + 1;
    case FormKind::DCP3: return 3 * n;
  }
  return 0;
}

DcPoint DcPoint::zeros(FormKind kind, int n) {
  DcPoint p;
  p.kind = kind;
  p.n = n;
  p.flat.assign(flat_size(kind, n), 0.0);
  return p;
}

namespace {

void check_same(const DcPoint& a, const DcPoint& b) {
  if (a.kind != b.kind || a.n != b.n)
    throw std::invalid_argument("DcPoint arithmetic: kind/dimension mismatch");
}

void check_point(const Formulation& form, const DcPoint& X) {
  if (X.kind != form.kind || X.n != form.n())
    throw std::invalid_argument("formulation: point does not match (kind or n)");
}

double sq(double v) { return v * v; }

}  // namespace

DcPoint combine(const DcPoint& a, double ca, const DcPoint& b, double cb) {
  check_same(a, b);
  DcPoint out = a;
  for (std::size_t i = 0; i < out.flat.size(); ++i)
    out.flat[i] = ca * a.flat[i] + cb * b.flat[i];
  return out;
}

void add_scaled(DcPoint& a, double c, const DcPoint& b) {
  check_same(a, b);
  for (std::size_t i = 0; i < a.flat.size(); ++i) a.flat[i] += c * b.flat[i];
}

double dot(const DcPoint& a, const DcPoint& b) {
  check_same(a, b);
  return dot(a.flat, b.flat);
}

double dist(const DcPoint& a, const DcPoint& b) {
  check_same(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.flat.size(); ++i) s += sq(a.flat[i] - b.flat[i]);
  return std::sqrt(s);
}

Formulation make_formulation(const AeicpInstance& inst, FormKind kind, double rho,
                             const LpSolveFn& lp) {
  if (rho < 0.0) throw std::invalid_argument("make_formulation: rho must be >= 0");
  Formulation form;
  form.kind = kind;
  form.inst = &inst;
  form.rho = rho;
  if (kind == FormKind::DCP3) {
    if (!lp)
      throw std::invalid_argument("make_formulation: DCP3 needs an LP solver for eta");
    form.eta = eta_for_dcp3(inst, lp);
  }
  return form;
}

double eta_for_dcp3(const AeicpInstance& inst, const LpSolveFn& lp) {
  const int n = inst.n;
  // maximize e'y over C3 = {(x,y,w) >= 0 : w = Bx - Ay, e'x = 1}.
  LpSpec spec;
  Formulation c3;
  c3.kind = FormKind::DCP3;
  c3.inst = &inst;
  equality_rows(c3, spec.aeq, spec.beq);
  spec.cost.assign(3 * n, 0.0);
  for (int i = 0; i < n; ++i) spec.cost[n + i] = -1.0;
  spec.lb_mask.resize(3 * n);
  for (int i = 0; i < 3 * n; ++i) spec.lb_mask[i] = i;

  const LpSolution sol = lp(spec);
  if (!sol.ok)
    throw std::runtime_error("eta_for_dcp3: LP for M failed (" + sol.message + ")");
  const double m = -sol.objective;
  return 3.2 + 20.0 * n * m * m;
}

void equality_rows(const Formulation& form, DenseMatrix& aeq, Vector& beq) {
  const int n = form.n();
  const DenseMatrix& A = form.inst->A;
  const DenseMatrix& B = form.inst->B;
  switch (form.kind) {
    case FormKind::DCP1: {
      aeq = DenseMatrix(n + 2, 3 * n + 1);
      beq.assign(n + 2, 0.0);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          aeq(i, j) = B(i, j);
          aeq(i, n + j) = -A(i, j);
        }
        aeq(i, 2 * n + i) = -1.0;
      }
      for (int j = 0; j < n; ++j) aeq(n, j) = 1.0;
      beq[n] = 1.0;
      for (int j = 0; j < n; ++j) aeq(n + 1, n + j) = 1.0;
      aeq(n + 1, 3 * n) = -1.0;
      break;
    }
    case FormKind::DCP2: {
      aeq = DenseMatrix(2, 2 * n + 1);
      beq.assign(2, 0.0);
      for (int j = 0; j < n; ++j) aeq(0, j) = 1.0;
      beq[0] = 1.0;
      for (int j = 0; j < n; ++j) aeq(1, n + j) = 1.0;
      aeq(1, 2 * n) = -1.0;
      break;
    }
    case FormKind::DCP3: {
      aeq = DenseMatrix(n + 1, 3 * n);
      beq.assign(n + 1, 0.0);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          aeq(i, j) = B(i, j);
          aeq(i, n + j) = -A(i, j);
        }
        aeq(i, 2 * n + i) = -1.0;
      }
      for (int j = 0; j < n; ++j) aeq(n, j) = 1.0;
      beq[n] = 1.0;
      break;
    }
  }
}

// --------------------------------------------------------------------------
// Objective values.

namespace {

// Shared quartic core on (x, y, z) of the DCP1/DCP2 decompositions:
//   G_core = |y|^2 + (t_pm^2 + t_mp^2)/16 + (z^2 + |x|^2)^2 / 2
//   H_core = (t_pp^2 + t_mm^2)/16 + (z^4 + |x|^4)/2
// with t_pm = (z+1)^2 + |y-x|^2, t_mp = (z-1)^2 + |y+x|^2,
//      t_pp = (z+1)^2 + |y+x|^2, t_mm = (z-1)^2 + |y-x|^2.
struct QuarticCore {
  double nx2, ny2, nypx2, nymx2, z;
  double t_pm, t_mp, t_pp, t_mm;
};

QuarticCore core_terms(const DcPoint& X) {
  QuarticCore c{};
  const auto x = X.x();
  const auto y = X.y();
  c.z = X.z();
  for (int i = 0; i < X.n; ++i) {
    c.nx2 += sq(x[i]);
    c.ny2 += sq(y[i]);
    c.nypx2 += sq(y[i] + x[i]);
    c.nymx2 += sq(y[i] - x[i]);
  }
  c.t_pm = sq(c.z + 1.0) + c.nymx2;
  c.t_mp = sq(c.z - 1.0) + c.nypx2;
  c.t_pp = sq(c.z + 1.0) + c.nypx2;
  c.t_mm = sq(c.z - 1.0) + c.nymx2;
  return c;
}

double g_core(const QuarticCore& c) {
  return c.ny2 + (sq(c.t_pm) + sq(c.t_mp)) / 16.0 + sq(c.z * c.z + c.nx2) / 2.0;
}

double h_core(const QuarticCore& c) {
  return (sq(c.t_pp) + sq(c.t_mm)) / 16.0 + (sq(sq(c.z)) + sq(c.nx2)) / 2.0;
}

// Gradient of H_core into the x/y/z blocks of `out` (accumulates).
void add_grad_h_core(const DcPoint& X, const QuarticCore& c, DcPoint& out) {
  const auto x = X.x();
  const auto y = X.y();
  auto gx = out.x();
  auto gy = out.y();
  for (int i = 0; i < X.n; ++i) {
    const double xpy = x[i] + y[i];
    const double xmy = x[i] - y[i];
    gx[i] += c.t_pp * xpy / 4.0 + c.t_mm * xmy / 4.0 + 2.0 * c.nx2 * x[i];
    gy[i] += c.t_pp * xpy / 4.0 - c.t_mm * xmy / 4.0;
  }
  out.z() += c.t_pp * (c.z + 1.0) / 4.0 + c.t_mm * (c.z - 1.0) / 4.0 +
             2.0 * c.z * c.z * c.z;
}

double rho_half_norm2(const Formulation& form, const DcPoint& X) {
  return 0.5 * form.rho * dot(X.flat, X.flat);
}

void check_dcp3_domain(const Formulation& form, const DcPoint& X) {
  double nx2 = 0.0;
  for (double v : X.x()) nx2 += v * v;
  // Never triggered on the e'x = 1 affine hull, where |x| >= 1/sqrt(n).
  if (nx2 < 1.0 / (4.0 * form.n()))
    throw std::domain_error("DCP3: |x| below 1/(2 sqrt(n)); objective undefined");
}

}  // namespace

double f_value(const Formulation& form, const DcPoint& X) {
  check_point(form, X);
  const int n = X.n;
  const auto x = X.x();
  const auto y = X.y();
  switch (form.kind) {
    case FormKind::DCP1: {
      const auto w = X.w();
      const double z = X.z();
      double s = 0.0, xw = 0.0;
      for (int i = 0; i < n; ++i) {
        s += sq(y[i] - z * x[i]);
        xw += x[i] * w[i];
      }
      return s + xw;
    }
    case FormKind::DCP2: {
      const double z = X.z();
      const Vector bx = matvec(form.inst->B, X.x_vec());
      const Vector ay = matvec(form.inst->A, X.y_vec());
      double s = 0.0, xw = 0.0;
      for (int i = 0; i < n; ++i) {
        s += sq(y[i] - z * x[i]);
        xw += x[i] * (bx[i] - ay[i]);
      }
      return s + xw;
    }
    case FormKind::DCP3: {
      check_dcp3_domain(form, X);
      const auto w = X.w();
      double ny2 = 0.0, xw = 0.0, xy = 0.0, nx2 = 0.0;
      for (int i = 0; i < n; ++i) {
        ny2 += sq(y[i]);
        xw += x[i] * w[i];
        xy += x[i] * y[i];
        nx2 += sq(x[i]);
      }
      return ny2 + xw - sq(xy) / nx2;
    }
  }
  return 0.0;
}

DcPoint grad_f(const Formulation& form, const DcPoint& X) {
  check_point(form, X);
  const int n = X.n;
  DcPoint g = DcPoint::zeros(form.kind, n);
  const auto x = X.x();
  const auto y = X.y();
  switch (form.kind) {
    case FormKind::DCP1: {
      const auto w = X.w();
      const double z = X.z();
      auto gx = g.x();
      auto gy = g.y();
      auto gw = g.w();
      double gz = 0.0;
      for (int i = 0; i < n; ++i) {
        const double r = z * x[i] - y[i];
        gx[i] = 2.0 * z * r + w[i];
        gy[i] = -2.0 * r;
        gw[i] = x[i];
        gz += 2.0 * x[i] * r;
      }
      g.z() = gz;
      break;
    }
    case FormKind::DCP2: {
      const double z = X.z();
      const DenseMatrix& A = form.inst->A;
      const DenseMatrix& B = form.inst->B;
      const Vector xv = X.x_vec();
      const Vector yv = X.y_vec();
      const Vector bx = matvec(B, xv);
      const Vector btx = matvec_t(B, xv);
      const Vector ay = matvec(A, yv);
      const Vector atx = matvec_t(A, xv);
      auto gx = g.x();
      auto gy = g.y();
      double gz = 0.0;
      for (int i = 0; i < n; ++i) {
        const double r = z * x[i] - y[i];
        gx[i] = 2.0 * z * r + bx[i] + btx[i] - ay[i];
        gy[i] = -2.0 * r - atx[i];
        gz += 2.0 * x[i] * r;
      }
      g.z() = gz;
      break;
    }
    case FormKind::DCP3: {
      check_dcp3_domain(form, X);
      const auto w = X.w();
      double xy = 0.0, nx2 = 0.0;
      for (int i = 0; i < n; ++i) {
        xy += x[i] * y[i];
        nx2 += sq(x[i]);
      }
      const double q = xy / nx2;
      auto gx = g.x();
      auto gy = g.y();
      auto gw = g.w();
      for (int i = 0; i < n; ++i) {
        gx[i] = w[i] - 2.0 * q * y[i] + 2.0 * q * q * x[i];
        gy[i] = 2.0 * y[i] - 2.0 * q * x[i];
        gw[i] = x[i];
      }
      break;
    }
  }
  return g;
}

double g_value(const Formulation& form, const DcPoint& X) {
  check_point(form, X);
  const int n = X.n;
  const auto x = X.x();
  switch (form.kind) {
    case FormKind::DCP1: {
      const QuarticCore c = core_terms(X);
      const auto w = X.w();
      double xpw2 = 0.0;
      for (int i = 0; i < n; ++i) xpw2 += sq(x[i] + w[i]);
      return g_core(c) + xpw2 / 4.0 + rho_half_norm2(form, X);
    }
    case FormKind::DCP2: {
      const QuarticCore c = core_terms(X);
      const Vector xv = X.x_vec();
      const Vector bx = matvec(form.inst->B, xv);
      const Vector ay = matvec(form.inst->A, X.y_vec());
      double xbx = 0.0, xmay2 = 0.0;
      for (int i = 0; i < n; ++i) {
        xbx += x[i] * bx[i];
        xmay2 += sq(x[i] - ay[i]);
      }
      return g_core(c) + xbx + xmay2 / 4.0 + rho_half_norm2(form, X);
    }
    case FormKind::DCP3: {
      const auto y = X.y();
      const auto w = X.w();
      double ny2 = 0.0, nx2 = 0.0, xpw2 = 0.0;
      for (int i = 0; i < n; ++i) {
        ny2 += sq(y[i]);
        nx2 += sq(x[i]);
        xpw2 += sq(x[i] + w[i]);
      }
      const double eta = form.eta;
      return (1.0 + eta / 2.0) * ny2 + eta / 2.0 * nx2 + xpw2 / 4.0 +
             rho_half_norm2(form, X);
    }
  }
  return 0.0;
}

double h_value(const Formulation& form, const DcPoint& X) {
  check_point(form, X);
  const int n = X.n;
  const auto x = X.x();
  switch (form.kind) {
    case FormKind::DCP1: {
      const QuarticCore c = core_terms(X);
      const auto w = X.w();
      double xmw2 = 0.0;
      for (int i = 0; i < n; ++i) xmw2 += sq(x[i] - w[i]);
      return h_core(c) + xmw2 / 4.0 + rho_half_norm2(form, X);
    }
    case FormKind::DCP2: {
      const QuarticCore c = core_terms(X);
      const Vector ay = matvec(form.inst->A, X.y_vec());
      double xpay2 = 0.0;
      for (int i = 0; i < n; ++i) xpay2 += sq(x[i] + ay[i]);
      return h_core(c) + xpay2 / 4.0 + rho_half_norm2(form, X);
    }
    case FormKind::DCP3: {
      check_dcp3_domain(form, X);
      const auto y = X.y();
      const auto w = X.w();
      double ny2 = 0.0, nx2 = 0.0, xmw2 = 0.0, xy = 0.0;
      for (int i = 0; i < n; ++i) {
        ny2 += sq(y[i]);
        nx2 += sq(x[i]);
        xmw2 += sq(x[i] - w[i]);
        xy += x[i] * y[i];
      }
      return form.eta / 2.0 * (nx2 + ny2) + sq(xy) / nx2 + xmw2 / 4.0 +
             rho_half_norm2(form, X);
    }
  }
  return 0.0;
}

DcPoint grad_H(const Formulation& form, const DcPoint& X) {
  check_point(form, X);
  const int n = X.n;
  DcPoint g = DcPoint::zeros(form.kind, n);
  const auto x = X.x();
  const auto y = X.y();
  switch (form.kind) {
    case FormKind::DCP1: {
      const QuarticCore c = core_terms(X);
      add_grad_h_core(X, c, g);
      const auto w = X.w();
      auto gx = g.x();
      auto gw = g.w();
      for (int i = 0; i < n; ++i) {
        gx[i] += (x[i] - w[i]) / 2.0;
        gw[i] += (w[i] - x[i]) / 2.0;
      }
      break;
    }
    case FormKind::DCP2: {
      const QuarticCore c = core_terms(X);
      add_grad_h_core(X, c, g);
      const DenseMatrix& A = form.inst->A;
      const Vector ay = matvec(A, X.y_vec());
      Vector aypx(n);
      for (int i = 0; i < n; ++i) aypx[i] = ay[i] + x[i];
      const Vector at_aypx = matvec_t(A, aypx);
      auto gx = g.x();
      auto gy = g.y();
      for (int i = 0; i < n; ++i) {
        gx[i] += (x[i] + ay[i]) / 2.0;
        gy[i] += at_aypx[i] / 2.0;
      }
      break;
    }
    case FormKind::DCP3: {
      check_dcp3_domain(form, X);
      const auto w = X.w();
      double xy = 0.0, nx2 = 0.0;
      for (int i = 0; i < n; ++i) {
        xy += x[i] * y[i];
        nx2 += sq(x[i]);
      }
      const double q = xy / nx2;
      const double eta = form.eta;
      auto gx = g.x();
      auto gy = g.y();
      auto gw = g.w();
      for (int i = 0; i < n; ++i) {
        gx[i] = eta * x[i] + 2.0 * q * y[i] - 2.0 * q * q * x[i] + (x[i] - w[i]) / 2.0;
        gy[i] = eta * y[i] + 2.0 * q * x[i];
        gw[i] = (w[i] - x[i]) / 2.0;
      }
      break;
    }
  }
  return g;
}

std::vector<int> active_set(const Formulation& form, const DcPoint& X,
                            double eps_act) {
  check_point(form, X);
  std::vector<int> idx;
  for (int i = 0; i < X.size(); ++i)
    if (std::fabs(X.flat[i]) <= eps_act) idx.push_back(i);
  if (form.kind == FormKind::DCP2) {
    const Vector bx = matvec(form.inst->B, X.x_vec());
    const Vector ay = matvec(form.inst->A, X.y_vec());
    for (int i = 0; i < X.n; ++i)
      if (std::fabs(bx[i] - ay[i]) <= eps_act) idx.push_back(2 * X.n + 1 + i);
  }
  return idx;
}

bool is_feasible(const Formulation& form, const DcPoint& X, double tol) {
  check_point(form, X);
  const int n = X.n;
  const double xscale = 1.0 + nrm_inf(X.flat);
  for (double v : X.flat)
    if (v < -tol * xscale || !std::isfinite(v)) return false;

  // Equality rows are judged by backward error: the violation relative to
  // the magnitude of the terms entering the row. This accepts subproblem
  // solutions that are feasible to the solver tolerance on any data scale.
  Vector row_mag(n, 1.0);
  const DenseMatrix& A = form.inst->A;
  const DenseMatrix& B = form.inst->B;
  const auto x = X.x();
  const auto y = X.y();
  Vector bx(n, 0.0), ay(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double mag = 1.0;
    double sb = 0.0, sa = 0.0;
    for (int j = 0; j < n; ++j) {
      sb += B(i, j) * x[j];
      sa += A(i, j) * y[j];
      mag += std::fabs(B(i, j) * x[j]) + std::fabs(A(i, j) * y[j]);
    }
    bx[i] = sb;
    ay[i] = sa;
    row_mag[i] = mag;
  }
  double ex = 0.0, ey = 0.0;
  for (double v : x) ex += v;
  for (double v : y) ey += v;

  if (std::fabs(ex - 1.0) > tol * xscale) return false;
  switch (form.kind) {
    case FormKind::DCP1: {
      if (std::fabs(ey - X.z()) > tol * xscale) return false;
      const auto w = X.w();
      for (int i = 0; i < n; ++i)
        if (std::fabs(w[i] - (bx[i] - ay[i])) > tol * (row_mag[i] + std::fabs(w[i])))
          return false;
      break;
    }
    case FormKind::DCP2: {
      if (std::fabs(ey - X.z()) > tol * xscale) return false;
      for (int i = 0; i < n; ++i)
        if (bx[i] - ay[i] < -tol * row_mag[i]) return false;
      break;
    }
    case FormKind::DCP3: {
      const auto w = X.w();
      for (int i = 0; i < n; ++i)
        if (std::fabs(w[i] - (bx[i] - ay[i])) > tol * (row_mag[i] + std::fabs(w[i])))
          return false;
      break;
    }
  }
  return true;
}

DcPoint initial_point(const Formulation& form, const Vector& x0, const Vector& y0) {
  const int n = form.n();
  if (static_cast<int>(x0.size()) != n || static_cast<int>(y0.size()) != n)
    throw std::invalid_argument("initial_point: dimension mismatch");
  double ex = 0.0;
  for (double v : x0) {
    if (v < 0.0) throw std::invalid_argument("initial_point: x0 must be nonnegative");
    ex += v;
  }
  if (std::fabs(ex - 1.0) > 1e-10)
    throw std::invalid_argument("initial_point: x0 off the unit simplex");
  for (double v : y0)
    if (v < 0.0) throw std::invalid_argument("initial_point: y0 must be nonnegative");

  DcPoint p = DcPoint::zeros(form.kind, n);
  std::copy(x0.begin(), x0.end(), p.x().begin());
  std::copy(y0.begin(), y0.end(), p.y().begin());
  double ey = 0.0;
  for (double v : y0) ey += v;
  if (p.has_w()) {
    const Vector bx = matvec(form.inst->B, x0);
    const Vector ay = matvec(form.inst->A, y0);
    auto w = p.w();
    for (int i = 0; i < n; ++i) w[i] = bx[i] - ay[i];
  }
  if (p.has_z()) p.z() = ey;
  return p;
}

Extraction extract_solution(const Formulation& form, const DcPoint& X) {
  check_point(form, X);
  Extraction out;
  out.x = X.x_vec();
  constexpr double kZFloor = 1e-12;
  if (form.kind == FormKind::DCP3) {
    double ny = 0.0, nx = 0.0;
    for (double v : X.y()) ny += v * v;
    for (double v : X.x()) nx += v * v;
    if (ny <= 0.0) {
      out.degenerate = true;
      return out;
    }
    out.lambda = std::sqrt(nx / ny);
  } else {
    const double z = X.z();
    if (z <= kZFloor) {
      out.degenerate = true;
      return out;
    }
    out.lambda = 1.0 / z;
  }
  return out;
}

DenseMatrix phi_hessian(const Vector& x, const Vector& y) {
  const int n = static_cast<int>(x.size());
  double nx2 = 0.0, xy = 0.0;
  for (int i = 0; i < n; ++i) {
    nx2 += sq(x[i]);
    xy += x[i] * y[i];
  }
  if (nx2 == 0.0) throw std::domain_error("phi_hessian: x must be nonzero");
  const double nx4 = nx2 * nx2;
  const double nx6 = nx4 * nx2;

  DenseMatrix h(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      // d2/dx2 = 2/|x|^2 yy' + 8(x'y)^2/|x|^6 xx' - 2(x'y)^2/|x|^4 I
      //          - 4(x'y)/|x|^4 (xy' + yx')
      double hxx = 2.0 / nx2 * y[i] * y[j] + 8.0 * sq(xy) / nx6 * x[i] * x[j] -
                   4.0 * xy / nx4 * (x[i] * y[j] + y[i] * x[j]);
      if (i == j) hxx -= 2.0 * sq(xy) / nx4;
      h(i, j) = hxx;
      // d2 phi / dx_i dy_j = (2/|x|^2) y_i x_j + (2 x'y/|x|^2) delta_ij
      //                      - (4 x'y/|x|^4) x_i x_j
      double hxy = 2.0 / nx2 * y[i] * x[j] - 4.0 * xy / nx4 * x[i] * x[j];
      if (i == j) hxy += 2.0 * xy / nx2;
      h(i, n + j) = hxy;
      h(n + j, i) = hxy;
      // d2/dy2 = 2/|x|^2 xx'
      h(n + i, n + j) = 2.0 / nx2 * x[i] * x[j];
    }
  }
  return h;
}

}  // namespace aeicp
