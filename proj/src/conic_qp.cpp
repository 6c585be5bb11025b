#include "aeicp/conic_qp.hpp"

#include <cmath>
#include <stdexcept>

namespace aeicp {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::MaxIter: return "maxiter";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
  }
  return "?";
}

namespace {

// term coef*(v_i + v_j)^2 into 1/2 v'Qv
void add_pair_square(DenseMatrix& q, int i, int j, double coef) {
  q(i, i) += 2.0 * coef;
  q(j, j) += 2.0 * coef;
  q(i, j) += 2.0 * coef;
  q(j, i) += 2.0 * coef;
}

// The six epigraph constraints of the DCP1/DCP2 reformulation, in the fixed
// order (u_x, u_z, u_{z+1}, u_{z-1}, u_{y+x}, u_{y-x}).
void add_u_block(ConicQp& qp, int n, int x0, int y0, int zi, int u0) {
  const int N = qp.dim;
  // surrogate quartics on u
  add_pair_square(qp.Q, u0 + 2, u0 + 5, 1.0 / 16.0);  // (u_{z+1} + u_{y-x})^2/16
  add_pair_square(qp.Q, u0 + 3, u0 + 4, 1.0 / 16.0);  // (u_{z-1} + u_{y+x})^2/16
  add_pair_square(qp.Q, u0 + 1, u0 + 0, 1.0 / 2.0);   // (u_z + u_x)^2/2

  auto selector = [&](int rows) { return DenseMatrix(rows, N); };

  {  // |x|^2 <= u_x
    QuadCon c;
    c.P = selector(n);
    for (int i = 0; i < n; ++i) c.P(i, x0 + i) = 1.0;
    c.p.assign(n, 0.0);
    c.d.assign(N, 0.0);
    c.d[u0 + 0] = 1.0;
    qp.quad_cons.push_back(std::move(c));
  }
  {  // z^2 <= u_z
    QuadCon c;
    c.P = selector(1);
    c.P(0, zi) = 1.0;
    c.p.assign(1, 0.0);
    c.d.assign(N, 0.0);
    c.d[u0 + 1] = 1.0;
    qp.quad_cons.push_back(std::move(c));
  }
  {  // (z+1)^2 <= u_{z+1}
    QuadCon c;
    c.P = selector(1);
    c.P(0, zi) = 1.0;
    c.p.assign(1, 1.0);
    c.d.assign(N, 0.0);
    c.d[u0 + 2] = 1.0;
    qp.quad_cons.push_back(std::move(c));
  }
  {  // (z-1)^2 <= u_{z-1}
    QuadCon c;
    c.P = selector(1);
    c.P(0, zi) = 1.0;
    c.p.assign(1, -1.0);
    c.d.assign(N, 0.0);
    c.d[u0 + 3] = 1.0;
    qp.quad_cons.push_back(std::move(c));
  }
  {  // |y+x|^2 <= u_{y+x}
    QuadCon c;
    c.P = selector(n);
    for (int i = 0; i < n; ++i) {
      c.P(i, x0 + i) = 1.0;
      c.P(i, y0 + i) = 1.0;
    }
    c.p.assign(n, 0.0);
    c.d.assign(N, 0.0);
    c.d[u0 + 4] = 1.0;
    qp.quad_cons.push_back(std::move(c));
  }
  {  // |y-x|^2 <= u_{y-x}
    QuadCon c;
    c.P = selector(n);
    for (int i = 0; i < n; ++i) {
      c.P(i, y0 + i) = 1.0;
      c.P(i, x0 + i) = -1.0;
    }
    c.p.assign(n, 0.0);
    c.d.assign(N, 0.0);
    c.d[u0 + 5] = 1.0;
    qp.quad_cons.push_back(std::move(c));
  }
}

}  // namespace

ConicQp build_subproblem(const Formulation& form, const DcPoint& xi) {
  if (xi.kind != form.kind || xi.n != form.n())
    throw std::invalid_argument("build_subproblem: xi does not match the formulation");
  const int n = form.n();
  const DenseMatrix& A = form.inst->A;
  const DenseMatrix& B = form.inst->B;
  const double rho = form.rho;

  ConicQp qp;
  switch (form.kind) {
    case FormKind::DCP1: {
      // v = (x, y, w, z, u) in R^{3n+7}
      const int N = 3 * n + 7;
      const int x0 = 0, y0 = n, w0 = 2 * n, zi = 3 * n, u0 = 3 * n + 1;
      qp.dim = N;
      qp.iterate_dim = 3 * n + 1;
      qp.Q = DenseMatrix(N, N);
      for (int i = 0; i < n; ++i) {
        qp.Q(y0 + i, y0 + i) += 2.0;                      // |y|^2
        add_pair_square(qp.Q, x0 + i, w0 + i, 1.0 / 4.0);  // |x+w|^2/4
      }
      add_u_block(qp, n, x0, y0, zi, u0);
      for (int i = 0; i <= 3 * n; ++i) qp.Q(i, i) += rho;

      DenseMatrix rows;
      Vector rhs;
      equality_rows(form, rows, rhs);
      qp.aeq = DenseMatrix(rows.rows, N);
      for (int i = 0; i < rows.rows; ++i)
        for (int j = 0; j < rows.cols; ++j) qp.aeq(i, j) = rows(i, j);
      qp.beq = rhs;
      qp.lb_mask.resize(3 * n + 1);
      for (int i = 0; i <= 3 * n; ++i) qp.lb_mask[i] = i;
      break;
    }
    case FormKind::DCP2: {
      // v = (x, y, z, u, s) in R^{3n+7}; s are the slack rows of Bx - Ay >= 0
      const int N = 3 * n + 7;
      const int x0 = 0, y0 = n, zi = 2 * n, u0 = 2 * n + 1, s0 = 2 * n + 7;
      qp.dim = N;
      qp.iterate_dim = 2 * n + 1;
      qp.Q = DenseMatrix(N, N);
      for (int i = 0; i < n; ++i) qp.Q(y0 + i, y0 + i) += 2.0;  // |y|^2
      // x'Bx
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) qp.Q(x0 + i, x0 + j) += B(i, j) + B(j, i);
      // |x - Ay|^2/4: Hessian 1/2 [[I, -A], [-A', A'A]]
      for (int i = 0; i < n; ++i) {
        qp.Q(x0 + i, x0 + i) += 0.5;
        for (int j = 0; j < n; ++j) {
          qp.Q(x0 + i, y0 + j) -= 0.5 * A(i, j);
          qp.Q(y0 + j, x0 + i) -= 0.5 * A(i, j);
        }
      }
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double s = 0.0;
          for (int k = 0; k < n; ++k) s += A(k, i) * A(k, j);
          qp.Q(y0 + i, y0 + j) += 0.5 * s;
        }
      add_u_block(qp, n, x0, y0, zi, u0);
      for (int i = 0; i <= 2 * n; ++i) qp.Q(i, i) += rho;

      // Bx - Ay - s = 0; e'x = 1; e'y - z = 0
      qp.aeq = DenseMatrix(n + 2, N);
      qp.beq.assign(n + 2, 0.0);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          qp.aeq(i, x0 + j) = B(i, j);
          qp.aeq(i, y0 + j) = -A(i, j);
        }
        qp.aeq(i, s0 + i) = -1.0;
      }
      for (int j = 0; j < n; ++j) qp.aeq(n, x0 + j) = 1.0;
      qp.beq[n] = 1.0;
      for (int j = 0; j < n; ++j) qp.aeq(n + 1, y0 + j) = 1.0;
      qp.aeq(n + 1, zi) = -1.0;

      for (int i = 0; i <= 2 * n; ++i) qp.lb_mask.push_back(i);
      for (int i = 0; i < n; ++i) qp.lb_mask.push_back(s0 + i);
      break;
    }
    case FormKind::DCP3: {
      // plain QP over (x, y, w)
      const int N = 3 * n;
      qp.dim = N;
      qp.iterate_dim = N;
      qp.Q = DenseMatrix(N, N);
      const double eta = form.eta;
      for (int i = 0; i < n; ++i) {
        qp.Q(n + i, n + i) += 2.0 + eta;                  // (1 + eta/2)|y|^2
        qp.Q(i, i) += eta;                                // (eta/2)|x|^2
        add_pair_square(qp.Q, i, 2 * n + i, 1.0 / 4.0);   // |x+w|^2/4
      }
      for (int i = 0; i < N; ++i) qp.Q(i, i) += rho;
      equality_rows(form, qp.aeq, qp.beq);
      qp.lb_mask.resize(N);
      for (int i = 0; i < N; ++i) qp.lb_mask[i] = i;
      break;
    }
  }
  set_linearization(qp, form, xi);
  return qp;
}

void set_linearization(ConicQp& qp, const Formulation& form, const DcPoint& xi) {
  if (xi.size() != qp.iterate_dim)
    throw std::invalid_argument("set_linearization: xi does not match the subproblem");
  (void)form;
  qp.c_lin.assign(qp.dim, 0.0);
  for (int i = 0; i < qp.iterate_dim; ++i) qp.c_lin[i] = -xi.flat[i];
}

}  // namespace aeicp
