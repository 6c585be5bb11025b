#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "aeicp/conic_qp.hpp"

namespace aeicp {

namespace {

double max_abs(const Vector& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

double data_scale(const ConicQp& qp) {
  double s = max_abs(qp.Q.data);
  s = std::max(s, max_abs(qp.c_lin));
  s = std::max(s, max_abs(qp.aeq.data));
  s = std::max(s, max_abs(qp.beq));
  for (const auto& qc : qp.quad_cons) {
    s = std::max(s, max_abs(qc.P.data));
    s = std::max(s, max_abs(qc.p));
    s = std::max(s, max_abs(qc.d));
    s = std::max(s, std::fabs(qc.r));
  }
  return 1.0 + s;
}

// Cholesky attempt used only to validate that Q is PSD.
bool chol_ok(DenseMatrix a, double shift) {
  const int n = a.rows;
  for (int i = 0; i < n; ++i) a(i, i) += shift;
  for (int j = 0; j < n; ++j) {
    double d = a(j, j);
    for (int k = 0; k < j; ++k) d -= a(j, k) * a(j, k);
    if (!(d > 0.0)) return false;
    d = std::sqrt(d);
    a(j, j) = d;
    for (int i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (int k = 0; k < j; ++k) s -= a(i, k) * a(j, k);
      a(i, j) = s / d;
    }
  }
  return true;
}

void validate(const ConicQp& qp) {
  const int N = qp.dim;
  if (qp.Q.rows != N || qp.Q.cols != N || static_cast<int>(qp.c_lin.size()) != N)
    throw std::invalid_argument("conic qp: objective dimension mismatch");
  if (qp.aeq.rows != static_cast<int>(qp.beq.size()) ||
      (qp.aeq.rows > 0 && qp.aeq.cols != N))
    throw std::invalid_argument("conic qp: equality dimension mismatch");
  for (int i : qp.lb_mask)
    if (i < 0 || i >= N) throw std::invalid_argument("conic qp: bad lb index");
  for (const auto& qc : qp.quad_cons) {
    if (qc.P.cols != N || static_cast<int>(qc.p.size()) != qc.P.rows ||
        static_cast<int>(qc.d.size()) != N)
      throw std::invalid_argument("conic qp: quadratic constraint dimension mismatch");
  }
  double asym = 0.0, qmax = 0.0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      asym = std::max(asym, std::fabs(qp.Q(i, j) - qp.Q(j, i)));
      qmax = std::max(qmax, std::fabs(qp.Q(i, j)));
    }
  if (asym > 1e-12 * (1.0 + qmax))
    throw std::invalid_argument("conic qp: Q is not symmetric");
  if (!chol_ok(qp.Q, 1e-9 * (1.0 + qmax)))
    throw std::invalid_argument("conic qp: Q is not positive semidefinite");
}

struct QuadEval {
  Vector pvp;    // P v + p
  Vector grad;   // d - 2 P'(P v + p)
  double value;  // d'v + r - |P v + p|^2
};

QuadEval eval_quad(const QuadCon& qc, const Vector& v) {
  QuadEval e;
  e.pvp = matvec(qc.P, v);
  for (std::size_t i = 0; i < e.pvp.size(); ++i) e.pvp[i] += qc.p[i];
  const Vector pt = matvec_t(qc.P, e.pvp);
  e.grad = qc.d;
  for (std::size_t i = 0; i < e.grad.size(); ++i) e.grad[i] -= 2.0 * pt[i];
  e.value = dot(qc.d, v) + qc.r - dot(e.pvp, e.pvp);
  return e;
}

double step_to_boundary(const Vector& w, const Vector& dw) {
  double a = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < w.size(); ++i)
    if (dw[i] < 0.0) a = std::min(a, -w[i] / dw[i]);
  return a;
}

double masked_step(const Vector& v, const Vector& dv, const std::vector<int>& mask) {
  double a = std::numeric_limits<double>::infinity();
  for (int i : mask)
    if (dv[i] < 0.0) a = std::min(a, -v[i] / dv[i]);
  return a;
}

}  // namespace

SolverResult solve(const ConicQp& qp, double tol, int max_iter) {
  validate(qp);
  const int N = qp.dim;
  const int me = qp.aeq.rows;
  const int m = static_cast<int>(qp.quad_cons.size());
  const std::vector<int>& L = qp.lb_mask;
  const int nl = static_cast<int>(L.size());
  const double scale = data_scale(qp);

  // Gram matrices P'P, fixed across iterations.
  std::vector<DenseMatrix> gram(m);
  for (int j = 0; j < m; ++j)
    gram[j] = matmul(transpose(qp.quad_cons[j].P), qp.quad_cons[j].P);

  // Start: ones, with epigraph-style variables pushed up until every
  // quadratic constraint has slack >= 1 at the start.
  Vector v(N, 1.0);
  for (int j = 0; j < m; ++j) {
    const QuadEval e = eval_quad(qp.quad_cons[j], v);
    if (e.value < 1.0) {
      int best = -1;
      double dmax = 1e-12;
      for (int i = 0; i < N; ++i)
        if (qp.quad_cons[j].d[i] > dmax) {
          dmax = qp.quad_cons[j].d[i];
          best = i;
        }
      if (best >= 0) v[best] += (1.0 - e.value) / dmax;
    }
  }
  Vector s(m, 1.0);
  for (int j = 0; j < m; ++j)
    s[j] = std::max(eval_quad(qp.quad_cons[j], v).value, 1.0);
  Vector lam(m, 1.0), y(me, 0.0);
  Vector z(nl, 1.0);  // duals of v_i >= 0, indexed like L

  SolverResult best;
  best.v = v;
  best.kkt_residual = std::numeric_limits<double>::infinity();
  best.status = SolveStatus::MaxIter;

  int stall = 0;
  int diverge = 0;
  double best_seen = std::numeric_limits<double>::infinity();

  std::vector<QuadEval> qe(m);
  const int kkt_n = N + me;

  for (int it = 0; it <= max_iter; ++it) {
    for (int j = 0; j < m; ++j) qe[j] = eval_quad(qp.quad_cons[j], v);

    // Residuals.
    Vector rd = matvec(qp.Q, v);
    for (int i = 0; i < N; ++i) rd[i] += qp.c_lin[i];
    if (me > 0) {
      const Vector aty = matvec_t(qp.aeq, y);
      for (int i = 0; i < N; ++i) rd[i] -= aty[i];
    }
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < N; ++i) rd[i] -= lam[j] * qe[j].grad[i];
    for (int k = 0; k < nl; ++k) rd[L[k]] -= z[k];

    Vector rp(me, 0.0);
    if (me > 0) {
      rp = matvec(qp.aeq, v);
      for (int i = 0; i < me; ++i) rp[i] -= qp.beq[i];
    }
    Vector rg(m);
    for (int j = 0; j < m; ++j) rg[j] = qe[j].value - s[j];

    double compl_max = 0.0, compl_sum = 0.0, bound_viol = 0.0;
    Vector vl(nl);
    for (int k = 0; k < nl; ++k) {
      vl[k] = v[L[k]];
      compl_max = std::max(compl_max, std::fabs(z[k] * vl[k]));
      compl_sum += z[k] * vl[k];
      bound_viol = std::max(bound_viol, -std::min(vl[k], 0.0));
    }
    for (int j = 0; j < m; ++j) {
      compl_max = std::max(compl_max, std::fabs(lam[j] * s[j]));
      compl_sum += lam[j] * s[j];
      bound_viol = std::max(bound_viol, -std::min(s[j], 0.0));
    }

    const double prim_res = std::max(max_abs(rp), max_abs(rg));
    const double kkt = std::max({max_abs(rd), prim_res, compl_max, compl_sum,
                                 bound_viol}) /
                       scale;

    double obj = 0.5 * dot(v, matvec(qp.Q, v)) + dot(qp.c_lin, v);
    if (kkt < best.kkt_residual) {
      best.v = v;
      best.obj = obj;
      best.kkt_residual = kkt;
      best.iterations = it;
    }

    if (kkt <= tol) {
      best.status = SolveStatus::Optimal;
      return best;
    }
    if (it == max_iter) break;

    // Divergence heuristics: the subproblems built by this project are
    // feasible by construction, so these paths flag construction bugs or
    // genuinely unbounded/infeasible ad-hoc inputs.
    const double vmax = max_abs(v);
    double dualmax = std::max(max_abs(y), std::max(max_abs(lam), max_abs(z)));
    if (vmax > 1e10 * scale) {
      best.status = SolveStatus::Unbounded;
      return best;
    }
    if (dualmax > 1e10 * scale && prim_res / scale > 100.0 * tol) {
      best.status = SolveStatus::Infeasible;
      return best;
    }
    if (!std::isfinite(kkt)) break;
    if (kkt > 10.0 * best_seen) {
      // merit divergence; 30 in a row classifies the problem
      if (++diverge >= 30) {
        if (prim_res / scale > 1e3 * tol && dualmax > 1e4) {
          best.status = SolveStatus::Infeasible;
          return best;
        }
        break;
      }
    } else {
      diverge = 0;
    }
    if (kkt > 0.999 * best_seen) {
      if (++stall >= 60) break;  // floored; report the best iterate
    } else {
      stall = 0;
      best_seen = kkt;
    }

    const double mu = (nl + m > 0) ? compl_sum / (nl + m) : 0.0;

    // Reduced KKT matrix [[M, Aeq'], [Aeq, 0]] with
    // M = Q + sum_j 2 lam_j P_j'P_j + diag(z/v on L) + sum_j (lam_j/s_j) J_j J_j'.
    DenseMatrix K(kkt_n, kkt_n);
    for (int i = 0; i < N; ++i)
      for (int c = 0; c < N; ++c) K(i, c) = qp.Q(i, c);
    for (int j = 0; j < m; ++j) {
      const double w2 = 2.0 * lam[j];
      for (int i = 0; i < N; ++i)
        for (int c = 0; c < N; ++c) K(i, c) += w2 * gram[j](i, c);
      const double wj = lam[j] / s[j];
      for (int i = 0; i < N; ++i) {
        const double gi = qe[j].grad[i];
        if (gi == 0.0) continue;
        for (int c = 0; c < N; ++c) K(i, c) += wj * gi * qe[j].grad[c];
      }
    }
    for (int k = 0; k < nl; ++k) K(L[k], L[k]) += z[k] / vl[k];
    for (int r = 0; r < me; ++r)
      for (int c = 0; c < N; ++c) {
        K(N + r, c) = qp.aeq(r, c);
        K(c, N + r) = qp.aeq(r, c);
      }

    LdlFactor fac(K);
    if (!fac.ok()) {
      DenseMatrix kr = K;
      const double reg = 1e-11 * scale;
      for (int i = 0; i < N; ++i) kr(i, i) += reg;
      for (int i = N; i < kkt_n; ++i) kr(i, i) -= reg;
      fac = LdlFactor(std::move(kr));
      if (!fac.ok()) break;  // hopeless; report best iterate
    }

    auto kkt_solve = [&](const Vector& rhs) {
      Vector sol = rhs;
      fac.solve(sol);
      // one step of iterative refinement against the true K
      Vector res = rhs;
      for (int i = 0; i < kkt_n; ++i) {
        double ki = 0.0;
        const double* row = K.data.data() + static_cast<std::size_t>(i) * kkt_n;
        for (int c = 0; c < kkt_n; ++c) ki += row[c] * sol[c];
        res[i] -= ki;
      }
      fac.solve(res);
      for (int i = 0; i < kkt_n; ++i) sol[i] += res[i];
      return sol;
    };

    auto direction = [&](const Vector& rzv, const Vector& rls, const Vector& rgc) {
      Vector rhs(kkt_n, 0.0);
      for (int i = 0; i < N; ++i) rhs[i] = -rd[i];
      for (int k = 0; k < nl; ++k) rhs[L[k]] -= rzv[k] / vl[k];
      for (int j = 0; j < m; ++j) {
        const double coef = (lam[j] * rgc[j] + rls[j]) / s[j];
        for (int i = 0; i < N; ++i) rhs[i] -= coef * qe[j].grad[i];
      }
      for (int r = 0; r < me; ++r) rhs[N + r] = -rp[r];
      Vector sol = kkt_solve(rhs);

      struct Dir {
        Vector dv, dy, dlam, ds, dz;
      } d;
      d.dv.assign(sol.begin(), sol.begin() + N);
      d.dy.resize(me);
      for (int r = 0; r < me; ++r) d.dy[r] = -sol[N + r];
      d.dlam.resize(m);
      d.ds.resize(m);
      for (int j = 0; j < m; ++j) {
        const double jdv = dot(qe[j].grad, d.dv);
        d.dlam[j] = -(lam[j] * rgc[j] + rls[j]) / s[j] - (lam[j] / s[j]) * jdv;
        d.ds[j] = -(rls[j] + s[j] * d.dlam[j]) / lam[j];
      }
      d.dz.resize(nl);
      for (int k = 0; k < nl; ++k)
        d.dz[k] = -(rzv[k] + z[k] * d.dv[L[k]]) / vl[k];
      return d;
    };

    // Pure equality problem: plain Newton step.
    if (nl + m == 0) {
      auto d = direction({}, {}, {});
      for (int i = 0; i < N; ++i) v[i] += d.dv[i];
      for (int r = 0; r < me; ++r) y[r] += d.dy[r];
      continue;
    }

    // Predictor.
    Vector rzv(nl), rls(m);
    for (int k = 0; k < nl; ++k) rzv[k] = z[k] * vl[k];
    for (int j = 0; j < m; ++j) rls[j] = lam[j] * s[j];
    auto aff = direction(rzv, rls, rg);

    double ap = std::min(1.0, std::min(masked_step(v, aff.dv, L),
                                       step_to_boundary(s, aff.ds)));
    double ad = std::min(1.0, std::min(step_to_boundary(z, aff.dz),
                                       step_to_boundary(lam, aff.dlam)));
    double mu_aff = 0.0;
    for (int k = 0; k < nl; ++k)
      mu_aff += (z[k] + ad * aff.dz[k]) * (vl[k] + ap * aff.dv[L[k]]);
    for (int j = 0; j < m; ++j)
      mu_aff += (lam[j] + ad * aff.dlam[j]) * (s[j] + ap * aff.ds[j]);
    mu_aff /= (nl + m);
    double sigma = std::pow(std::max(mu_aff, 0.0) / mu, 3.0);
    sigma = std::clamp(sigma, 1e-8, 1.0 - 1e-8);
    // Keep the path from collapsing far below the target: products near
    // zero with residuals outstanding make the scaling matrix pure noise.
    const double mu_min = 1e-3 * tol * scale;
    if (sigma * mu < mu_min)
      sigma = std::clamp(mu_min / mu, sigma, 1.0 - 1e-8);

    // Corrector (with second-order correction of the quadratic constraints).
    Vector rg_c = rg;
    for (int j = 0; j < m; ++j) {
      const Vector pdv = matvec(qp.quad_cons[j].P, aff.dv);
      rg_c[j] -= dot(pdv, pdv);
    }
    for (int k = 0; k < nl; ++k)
      rzv[k] = z[k] * vl[k] + aff.dz[k] * aff.dv[L[k]] - sigma * mu;
    for (int j = 0; j < m; ++j)
      rls[j] = lam[j] * s[j] + aff.dlam[j] * aff.ds[j] - sigma * mu;
    auto dir = direction(rzv, rls, rg_c);

    // Fraction-to-boundary relaxes toward 1 as the path converges; a
    // fixed 0.995 would strangle the endgame two decades above the floor.
    const double mun = mu / scale;
    const double tau = std::clamp(1.0 - 1e3 * mun, 0.995, 0.99995);
    ap = std::min(1.0, tau * std::min(masked_step(v, dir.dv, L),
                                      step_to_boundary(s, dir.ds)));
    ad = std::min(1.0, tau * std::min(step_to_boundary(z, dir.dz),
                                      step_to_boundary(lam, dir.dlam)));
    if (!std::isfinite(ap)) ap = 1.0;
    if (!std::isfinite(ad)) ad = 1.0;

    for (int i = 0; i < N; ++i) v[i] += ap * dir.dv[i];
    for (int j = 0; j < m; ++j) s[j] += ap * dir.ds[j];
    for (int r = 0; r < me; ++r) y[r] += ad * dir.dy[r];
    for (int j = 0; j < m; ++j) lam[j] += ad * dir.dlam[j];
    for (int k = 0; k < nl; ++k) z[k] += ad * dir.dz[k];
  }

  best.status = best.status == SolveStatus::Optimal ? best.status : SolveStatus::MaxIter;
  return best;
}

SolverResult solve_lp(const DenseMatrix& aeq, const Vector& beq, const Vector& c_lin,
                      const std::vector<int>& lb_mask, double tol, int max_iter) {
  ConicQp qp;
  qp.dim = static_cast<int>(c_lin.size());
  qp.Q = DenseMatrix(qp.dim, qp.dim);
  qp.c_lin = c_lin;
  qp.aeq = aeq;
  qp.beq = beq;
  qp.lb_mask = lb_mask;
  qp.iterate_dim = qp.dim;
  return solve(qp, tol, max_iter);
}

LpSolveFn make_lp_solver(int max_iter) {
  return [max_iter](const LpSpec& spec) {
    LpSolution out;
    SolverResult res =
        solve_lp(spec.aeq, spec.beq, spec.cost, spec.lb_mask, spec.tol, max_iter);
    out.ok = res.status == SolveStatus::Optimal;
    out.message = to_string(res.status);
    out.v = std::move(res.v);
    out.objective = res.obj;
    return out;
  };
}

}  // namespace aeicp
