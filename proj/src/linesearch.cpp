#include "aeicp/linesearch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace aeicp {

namespace {

void polish_and_push(std::vector<double>& roots, double r, double a, double b,
                     double c, double d) {
  for (int step = 0; step < 2; ++step) {
    const double p = ((a * r + b) * r + c) * r + d;
    const double dp = (3.0 * a * r + 2.0 * b) * r + c;
    if (dp == 0.0) break;
    const double next = r - p / dp;
    if (!std::isfinite(next)) break;
    r = next;
  }
  for (double existing : roots)
    if (std::fabs(existing - r) <= 1e-8 * (1.0 + std::fabs(r))) return;
  roots.push_back(r);
}

}  // namespace

std::vector<double> cubic_real_roots(double a, double b, double c, double d) {
  const double scale = std::max({std::fabs(a), std::fabs(b), std::fabs(c), std::fabs(d)});
  if (scale == 0.0)
    throw std::invalid_argument("cubic_real_roots: all coefficients are zero");

  std::vector<double> roots;
  if (std::fabs(a) <= 1e-14 * scale) {
    // quadratic b x^2 + c x + d
    if (std::fabs(b) <= 1e-14 * scale) {
      if (std::fabs(c) > 1e-14 * scale) roots.push_back(-d / c);
      // constant: no roots
      return roots;
    }
    const double disc = c * c - 4.0 * b * d;
    if (disc < 0.0) return roots;
    const double sq = std::sqrt(disc);
    const double q = -0.5 * (c + (c >= 0.0 ? sq : -sq));
    polish_and_push(roots, q / b, 0.0, b, c, d);
    if (q != 0.0) polish_and_push(roots, d / q, 0.0, b, c, d);
    else polish_and_push(roots, 0.0, 0.0, b, c, d);
    std::sort(roots.begin(), roots.end());
    return roots;
  }

  // Depressed form t^3 + P t + Q with x = t - b/(3a).
  const double bn = b / a, cn = c / a, dn = d / a;
  const double shift = bn / 3.0;
  const double P = cn - bn * bn / 3.0;
  const double Q = 2.0 * bn * bn * bn / 27.0 - bn * cn / 3.0 + dn;
  const double disc = 0.25 * Q * Q + P * P * P / 27.0;

  if (disc <= 0.0 && P < 0.0) {
    // Three real roots: trigonometric branch, better conditioned than the
    // radical form when the roots are close.
    const double mcoef = 2.0 * std::sqrt(-P / 3.0);
    const double arg = std::clamp(-4.0 * Q / (mcoef * mcoef * mcoef), -1.0, 1.0);
    const double phi = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k) {
      const double t =
          mcoef * std::cos(phi - 2.0 * std::numbers::pi * k / 3.0);
      polish_and_push(roots, t - shift, a, b, c, d);
    }
  } else if (P == 0.0 && Q == 0.0) {
    polish_and_push(roots, -shift, a, b, c, d);
  } else {
    const double sq = std::sqrt(std::max(disc, 0.0));
    const double u3 = (Q >= 0.0) ? (-0.5 * Q - sq) : (-0.5 * Q + sq);
    const double u = std::cbrt(u3);
    const double t = (u == 0.0) ? 0.0 : u - P / (3.0 * u);
    polish_and_push(roots, t - shift, a, b, c, d);
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

QuarticCoeffs quartic_coeffs(const Formulation& form, const DcPoint& V,
                             const DcPoint& D) {
  if (form.kind == FormKind::DCP3)
    throw std::invalid_argument(
        "quartic_coeffs: DCP3 is not polynomial along a line (use armijo)");
  if (V.kind != form.kind || D.kind != form.kind || V.n != D.n)
    throw std::invalid_argument("quartic_coeffs: mismatched points");
  const int n = V.n;

  // DCP2 reduces to the DCP1 coefficients with the w blocks replaced by
  // B(.)_x - A(.)_y.
  Vector vw(n), dw(n);
  if (form.kind == FormKind::DCP1) {
    std::copy(V.w().begin(), V.w().end(), vw.begin());
    std::copy(D.w().begin(), D.w().end(), dw.begin());
  } else {
    const Vector bvx = matvec(form.inst->B, V.x_vec());
    const Vector avy = matvec(form.inst->A, V.y_vec());
    const Vector bdx = matvec(form.inst->B, D.x_vec());
    const Vector ady = matvec(form.inst->A, D.y_vec());
    for (int i = 0; i < n; ++i) {
      vw[i] = bvx[i] - avy[i];
      dw[i] = bdx[i] - ady[i];
    }
  }

  const auto vx = V.x();
  const auto vy = V.y();
  const auto dx = D.x();
  const auto dy = D.y();
  const double vz = V.z();
  const double dz = D.z();

  // r(alpha) = (Vy - Vz Vx) + alpha (Dy - Dz Vx - Vz Dx) - alpha^2 Dz Dx
  double r0r0 = 0.0, r0r1 = 0.0, r1r1 = 0.0, r0dx = 0.0, r1dx = 0.0;
  double ndx2 = 0.0, vxvw = 0.0, vxdw = 0.0, vwdx = 0.0, dxdw = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r0 = vy[i] - vz * vx[i];
    const double r1 = dy[i] - dz * vx[i] - vz * dx[i];
    r0r0 += r0 * r0;
    r0r1 += r0 * r1;
    r1r1 += r1 * r1;
    r0dx += r0 * dx[i];
    r1dx += r1 * dx[i];
    ndx2 += dx[i] * dx[i];
    vxvw += vx[i] * vw[i];
    vxdw += vx[i] * dw[i];
    vwdx += vw[i] * dx[i];
    dxdw += dx[i] * dw[i];
  }

  QuarticCoeffs q;
  q.a1 = 4.0 * dz * dz * ndx2;
  q.a2 = -6.0 * dz * r1dx;
  q.a3 = 2.0 * (r1r1 + dxdw - 2.0 * dz * r0dx);
  q.a4 = 2.0 * r0r1 + vwdx + vxdw;
  q.a5 = vxvw + r0r0;
  return q;
}

double max_feasible_step(const Formulation& form, const DcPoint& V, const DcPoint& D) {
  if (V.kind != form.kind || D.kind != form.kind || V.n != D.n)
    throw std::invalid_argument("max_feasible_step: mismatched points");
  const int n = V.n;

  // D must preserve the equality constraints (it is a difference of two
  // feasible points); anything else indicates a broken caller. The scale
  // covers V as well: boosted iterates carry ppb-level manifold drift from
  // the solver tolerance, which is not a construction error.
  DenseMatrix aeq;
  Vector beq;
  equality_rows(form, aeq, beq);
  const Vector ad = matvec(aeq, D.flat);
  const double dscale =
      1.0 + nrm_inf(aeq.data) * (nrm_inf(D.flat) + nrm_inf(V.flat) + 1.0);
  if (nrm_inf(ad) > 1e-8 * dscale)
    throw std::logic_error("max_feasible_step: D leaves the equality null space");

  double alpha = std::numeric_limits<double>::infinity();
  for (int i = 0; i < V.size(); ++i)
    if (D.flat[i] < 0.0) alpha = std::min(alpha, -V.flat[i] / D.flat[i]);

  if (form.kind == FormKind::DCP2) {
    const Vector bvx = matvec(form.inst->B, V.x_vec());
    const Vector avy = matvec(form.inst->A, V.y_vec());
    const Vector bdx = matvec(form.inst->B, D.x_vec());
    const Vector ady = matvec(form.inst->A, D.y_vec());
    for (int i = 0; i < n; ++i) {
      const double slope = bdx[i] - ady[i];
      if (slope < 0.0) alpha = std::min(alpha, -(bvx[i] - avy[i]) / slope);
    }
  }
  return std::max(alpha, 0.0);
}

ExactSearchResult exact_linesearch(const Formulation& form, const DcPoint& V,
                                   const DcPoint& D, double alpha_cap) {
  if (form.kind == FormKind::DCP3)
    throw std::invalid_argument("exact_linesearch: unsupported for DCP3");
  ExactSearchResult out;
  out.point = V;
  if (!(alpha_cap > 0.0)) {
    out.alpha = 0.0;
    return out;
  }

  const QuarticCoeffs q = quartic_coeffs(form, V, D);
  std::vector<double> candidates{0.0};
  if (std::isfinite(alpha_cap)) candidates.push_back(alpha_cap);
  const double cscale =
      std::max({std::fabs(q.a1), std::fabs(q.a2), std::fabs(q.a3), std::fabs(q.a4)});
  if (cscale > 0.0) {
    for (double r : cubic_real_roots(q.a1, q.a2, q.a3, q.a4))
      if (r > 0.0 && r <= alpha_cap) candidates.push_back(r);
  }

  double best_alpha = 0.0;
  double best_f = f_value(form, V);
  for (double alpha : candidates) {
    if (alpha == 0.0) continue;
    const DcPoint trial = combine(V, 1.0, D, alpha);
    const double ftrial = f_value(form, trial);
    if (ftrial < best_f) {
      best_f = ftrial;
      best_alpha = alpha;
    }
  }
  out.alpha = best_alpha;
  if (best_alpha != 0.0) out.point = combine(V, 1.0, D, best_alpha);
  return out;
}

DcPoint armijo(const Formulation& form, const DcPoint& V, const DcPoint& D,
               double alpha_cap, const ArmijoParams& params) {
  const double dnorm = nrm2(D.flat);
  if (dnorm == 0.0) return V;
  const double fv = f_value(form, V);
  const double d2 = dnorm * dnorm;

  double alpha = std::min(params.alpha0, alpha_cap);
  if (!(alpha > 0.0)) return V;
  while (alpha > params.eps_ls / dnorm) {
    const DcPoint trial = combine(V, 1.0, D, alpha);
    bool ok = is_feasible(form, trial, 1e-8);
    if (ok && form.kind == FormKind::DCP3) {
      // keep the rational term well defined before evaluating
      double nx2 = 0.0;
      for (double v : trial.x()) nx2 += v * v;
      ok = nx2 >= 1.0 / (4.0 * form.n());
    }
    if (ok) {
      const double delta = fv - f_value(form, trial) - params.sigma * alpha * alpha * d2;
      if (delta >= 0.0) return trial;
    }
    alpha *= params.beta;
  }
  return V;
}

}  // namespace aeicp
