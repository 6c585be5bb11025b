#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "aeicp/linalg.hpp"

namespace aeicp {

// One AEiCP problem: find x != 0 and lambda with
//   w = lambda*B*x - A*x,  x >= 0,  w >= 0,  x'w = 0.
// A and B are kept positive definite (in the x'Mx > 0 sense), which both
// generators below guarantee by shifting; `mu` records the applied shift.
struct AeicpInstance {
  DenseMatrix A;
  DenseMatrix B;
  int n = 0;
  double mu = 0.0;
  std::string label;
};

// Validates dimensions and positive definiteness of A+A' and B+B'.
AeicpInstance make_instance(DenseMatrix A, DenseMatrix B, std::string label,
                            double mu = 0.0);

// Random instance: T has i.i.d. entries uniform on [-1,1] (row-major fill
// from a xoshiro256++ stream seeded by `seed`), A = T + mu*I with
// mu = |min{0, lambda_min(T+T')}| + 0.1, and B is the banded matrix with
// B_ii = 10 and B_ij = -1 for 0 < |i-j| <= 4.
AeicpInstance gen_rand_instance(int n, uint64_t seed);

// NEP-style instance: B = I and A = A_raw + mu*I with
// mu = |min{0, lambda_min(A_raw + A_raw')}| + 1.
AeicpInstance build_nep_instance(const DenseMatrix& a_raw, const std::string& label);

struct SolutionReport {
  Vector x;       // rescaled to e'x = 1 when e'x > 0
  double lambda;  // Rayleigh quotient x'Ax / x'Bx
  Vector w;       // lambda*B*x - A*x
  double c;       // -log10(|[x]_-| + |[w]_-| + |w'x|), capped at 300
  double f;       // final objective value handed in by the caller
};

// Recomputes the feasibility measure from scratch; never trusts solver-side
// caching. Throws on x = 0 (and on x'Bx <= 0, which Hypothesis-1 instances
// cannot produce for x != 0).
SolutionReport feasibility_report(const AeicpInstance& inst, const Vector& x,
                                  double f_final);

// max(neg(x), neg(w), |x'w|, |e'x - 1|) with w = lambda*B*x - A*x; the
// verification residual used by the 2x2 oracle and its tests.
double aeicp_residual(const AeicpInstance& inst, const Vector& x, double lambda);

struct TwoByTwoSolutions {
  // Simplex-normalized eigenvectors with their complementary eigenvalues.
  std::vector<std::pair<Vector, double>> solutions;
  // Set when A - lambda*B vanishes identically for some lambda, so every
  // simplex point solves; the two vertices are still listed above.
  bool interior_family = false;
};

// Brute-force support enumeration for n = 2 (supports {1}, {2}, {1,2});
// every returned pair satisfies aeicp_residual <= 1e-10.
TwoByTwoSolutions enumerate_2x2_solutions(const AeicpInstance& inst);

}  // namespace aeicp
