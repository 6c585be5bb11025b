#pragma once

#include <vector>

#include "aeicp/formulations.hpp"

namespace aeicp {

// f(V + alpha D) = a1/4 a^4 + a2/3 a^3 + a3/2 a^2 + a4 a + a5 for DCP1/DCP2.
// a1 = 4 Dz^2 |Dx|^2 >= 0 by construction.
struct QuarticCoeffs {
  double a1 = 0.0, a2 = 0.0, a3 = 0.0, a4 = 0.0, a5 = 0.0;

  double eval(double alpha) const {
    return ((a1 / 4.0 * alpha + a2 / 3.0) * alpha + a3 / 2.0) * alpha * alpha +
           a4 * alpha + a5;
  }
  // derivative a1 a^3 + a2 a^2 + a3 a + a4
  double slope(double alpha) const {
    return ((a1 * alpha + a2) * alpha + a3) * alpha + a4;
  }
};

// All real roots of a x^3 + b x^2 + c x + d, ascending and deduplicated.
// Leading coefficients below 1e-14 * max|coef| degrade to the quadratic /
// linear case. Three-real-root cubics go through the trigonometric form of
// the Cardano-Tartaglia solution; every root gets two Newton polish steps.
// Throws when all four coefficients vanish.
std::vector<double> cubic_real_roots(double a, double b, double c, double d);

// Line coefficients of f along V + alpha D (DCP1/DCP2 only; the DCP3
// objective is not polynomial along a line).
QuarticCoeffs quartic_coeffs(const Formulation& form, const DcPoint& V,
                             const DcPoint& D);

// Largest alpha keeping every nonnegativity constraint (and the DCP2 slack
// rows) satisfied from V along D; +inf when no component decreases.
// D must lie in the equality null space (checked).
double max_feasible_step(const Formulation& form, const DcPoint& V, const DcPoint& D);

struct ArmijoParams {
  double beta = 0.5;     // stepsize reduction factor
  double sigma = 1e-4;
  double eps_ls = 1e-8;  // loop ends once alpha <= eps_ls/|D|
  double alpha0 = 10.0;  // initial stepsize cap
};

struct ExactSearchResult {
  double alpha = 0.0;
  DcPoint point;
};

// argmin of the quartic over {0, min(alpha_k, alpha_cap)} plus the real
// roots of its derivative clipped to that interval; f never increases.
ExactSearchResult exact_linesearch(const Formulation& form, const DcPoint& V,
                                   const DcPoint& D, double alpha_cap);

// Armijo backtracking: first alpha in alpha0, beta*alpha0, ... with
// alpha > eps_ls/|D| satisfying f(V+aD) <= f(V) - sigma a^2 |D|^2 and
// feasibility; returns V unchanged if the loop exhausts.
DcPoint armijo(const Formulation& form, const DcPoint& V, const DcPoint& D,
               double alpha_cap, const ArmijoParams& params);

}  // namespace aeicp
