#include "aeicp/instances.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "aeicp/rng.hpp"

namespace aeicp {

namespace {

double norm_negative_part(const Vector& v) {
  double s = 0.0;
  for (double x : v) {
    const double neg = std::min(x, 0.0);
    s += neg * neg;
  }
  return std::sqrt(s);
}

}  // namespace

AeicpInstance make_instance(DenseMatrix A, DenseMatrix B, std::string label,
                            double mu) {
  if (!A.square() || !B.square() || A.rows != B.rows)
    throw std::invalid_argument("make_instance: A and B must be square with equal order");
  if (!all_finite(A) || !all_finite(B))
    throw std::invalid_argument("make_instance: non-finite entries");
  if (lambda_min_sym(A) <= 0.0)
    throw std::invalid_argument("make_instance: A + A' is not positive definite");
  if (lambda_min_sym(B) <= 0.0)
    throw std::invalid_argument("make_instance: B + B' is not positive definite");
  AeicpInstance inst;
  inst.n = A.rows;
  inst.A = std::move(A);
  inst.B = std::move(B);
  inst.mu = mu;
  inst.label = std::move(label);
  return inst;
}

AeicpInstance gen_rand_instance(int n, uint64_t seed) {
  if (n < 2) throw std::invalid_argument("gen_rand_instance: n must be >= 2");
  Xoshiro256pp rng(seed);
  DenseMatrix t(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) t(i, j) = rng.uniform_pm1();

  // Shift just past PD: the margin 0.1 keeps cond(A) small.
  // lambda_min of T + T' is twice the symmetrized smallest eigenvalue.
  const double lmin = 2.0 * lambda_min_sym(t);
  const double mu = std::fabs(std::min(0.0, lmin)) + 0.1;
  for (int i = 0; i < n; ++i) t(i, i) += mu;

  DenseMatrix b(n, n);
  for (int i = 0; i < n; ++i) {
    b(i, i) = 10.0;
    for (int j = std::max(0, i - 4); j <= std::min(n - 1, i + 4); ++j)
      if (j != i) b(i, j) = -1.0;
  }
  return make_instance(std::move(t), std::move(b),
                       "rand" + std::to_string(n) + "_s" + std::to_string(seed), mu);
}

AeicpInstance build_nep_instance(const DenseMatrix& a_raw, const std::string& label) {
  if (!a_raw.square())
    throw std::invalid_argument("build_nep_instance: matrix must be square");
  if (!all_finite(a_raw))
    throw std::invalid_argument("build_nep_instance: non-finite entries");
  const int n = a_raw.rows;
  // lambda_min of A + A' is twice the symmetrized smallest eigenvalue.
  const double lmin = 2.0 * lambda_min_sym(a_raw);
  const double mu = std::fabs(std::min(0.0, lmin)) + 1.0;
  DenseMatrix a = a_raw;
  for (int i = 0; i < n; ++i) a(i, i) += mu;
  return make_instance(std::move(a), DenseMatrix::identity(n), label, mu);
}

SolutionReport feasibility_report(const AeicpInstance& inst, const Vector& x_in,
                                  double f_final) {
  if (static_cast<int>(x_in.size()) != inst.n)
    throw std::invalid_argument("feasibility_report: dimension mismatch");
  if (nrm_inf(x_in) == 0.0)
    throw std::invalid_argument("feasibility_report: x must be nonzero");

  Vector x = x_in;
  double sum = 0.0;
  for (double v : x) sum += v;
  if (sum > 0.0)
    for (double& v : x) v /= sum;

  const Vector ax = matvec(inst.A, x);
  const Vector bx = matvec(inst.B, x);
  const double xbx = dot(x, bx);
  if (xbx <= 0.0)
    throw std::runtime_error("feasibility_report: x'Bx <= 0 (B not PD?)");
  const double lambda = dot(x, ax) / xbx;

  Vector w(inst.n);
  for (int i = 0; i < inst.n; ++i) w[i] = lambda * bx[i] - ax[i];

  const double residual =
      norm_negative_part(x) + norm_negative_part(w) + std::fabs(dot(w, x));

  SolutionReport rep;
  rep.x = std::move(x);
  rep.lambda = lambda;
  rep.w = std::move(w);
  const double lg = std::log10(std::max(residual, 1e-300));
  rep.c = (lg == 0.0) ? 0.0 : -lg;  // avoid the -0.0 artifact at residual 1
  rep.f = f_final;
  return rep;
}

double aeicp_residual(const AeicpInstance& inst, const Vector& x, double lambda) {
  const Vector ax = matvec(inst.A, x);
  const Vector bx = matvec(inst.B, x);
  double worst = 0.0;
  double xw = 0.0;
  double sum = 0.0;
  for (int i = 0; i < inst.n; ++i) {
    const double wi = lambda * bx[i] - ax[i];
    worst = std::max(worst, -std::min(x[i], 0.0));
    worst = std::max(worst, -std::min(wi, 0.0));
    xw += x[i] * wi;
    sum += x[i];
  }
  worst = std::max(worst, std::fabs(xw));
  worst = std::max(worst, std::fabs(sum - 1.0));
  return worst;
}

TwoByTwoSolutions enumerate_2x2_solutions(const AeicpInstance& inst) {
  if (inst.n != 2)
    throw std::invalid_argument("enumerate_2x2_solutions: oracle is limited to n = 2");
  const DenseMatrix& A = inst.A;
  const DenseMatrix& B = inst.B;
  TwoByTwoSolutions out;
  constexpr double kTol = 1e-10;

  auto push_if_solution = [&](Vector x, double lambda) {
    if (aeicp_residual(inst, x, lambda) > kTol) return;
    for (const auto& [xs, ls] : out.solutions)
      if (std::fabs(ls - lambda) <= 1e-9 && std::fabs(xs[0] - x[0]) <= 1e-9) return;
    out.solutions.emplace_back(std::move(x), lambda);
  };

  // Singleton supports: x = e_i forces w_i = 0, hence lambda = A_ii / B_ii.
  for (int i = 0; i < 2; ++i) {
    if (B(i, i) == 0.0) continue;
    const double lambda = A(i, i) / B(i, i);
    Vector x{0.0, 0.0};
    x[i] = 1.0;
    push_if_solution(std::move(x), lambda);
  }

  // Full support: w = 0, so (A - lambda*B) x = 0 with x > 0 on the simplex.
  // det(A - lambda*B) is quadratic in lambda.
  const double qa = B(0, 0) * B(1, 1) - B(0, 1) * B(1, 0);
  const double qb = -(A(0, 0) * B(1, 1) + A(1, 1) * B(0, 0) - A(0, 1) * B(1, 0) -
                      A(1, 0) * B(0, 1));
  const double qc = A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0);

  std::vector<double> lambdas;
  const double scale = std::max({std::fabs(qa), std::fabs(qb), std::fabs(qc)});
  if (scale == 0.0) {
    // det(A - lambda*B) == 0 identically; only happens with singular data,
    // which make_instance rejects.
    return out;
  }
  if (std::fabs(qa) <= 1e-14 * scale) {
    if (std::fabs(qb) > 1e-14 * scale) lambdas.push_back(-qc / qb);
  } else {
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc >= 0.0) {
      const double sq = std::sqrt(disc);
      const double q = -0.5 * (qb + (qb >= 0.0 ? sq : -sq));
      lambdas.push_back(q / qa);
      if (q != 0.0) lambdas.push_back(qc / q);
      else lambdas.push_back(0.0);
    }
  }

  for (double lambda : lambdas) {
    const double m00 = A(0, 0) - lambda * B(0, 0);
    const double m01 = A(0, 1) - lambda * B(0, 1);
    const double m10 = A(1, 0) - lambda * B(1, 0);
    const double m11 = A(1, 1) - lambda * B(1, 1);
    const double mmax = std::max({std::fabs(m00), std::fabs(m01), std::fabs(m10),
                                  std::fabs(m11)});
    const double ascale = std::max(1.0, std::max(nrm_inf(A.data), nrm_inf(B.data)));
    if (mmax <= 1e-12 * ascale) {
      // A - lambda*B vanishes: every simplex point is an eigenvector.
      out.interior_family = true;
      push_if_solution({1.0, 0.0}, lambda);
      push_if_solution({0.0, 1.0}, lambda);
      continue;
    }
    // Null vector from the better-conditioned row.
    Vector x(2);
    if (std::max(std::fabs(m00), std::fabs(m01)) >=
        std::max(std::fabs(m10), std::fabs(m11))) {
      x = {-m01, m00};
    } else {
      x = {-m11, m10};
    }
    const double s = x[0] + x[1];
    if (std::fabs(s) <= 1e-14 * (std::fabs(x[0]) + std::fabs(x[1]))) continue;
    x[0] /= s;
    x[1] /= s;
    if (x[0] < 1e-9 || x[1] < 1e-9) continue;  // boundary: singleton case covers it
    push_if_solution(std::move(x), lambda);
  }

  std::sort(out.solutions.begin(), out.solutions.end(),
            [](const auto& a, const auto& b) { return a.second < b.second; });
  return out;
}

}  // namespace aeicp
