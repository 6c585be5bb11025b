#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "aeicp/instances.hpp"

namespace aeicp {

enum class FormKind { DCP1, DCP2, DCP3 };

const char* to_string(FormKind kind);

// Iterate of one DC formulation, stored flat:
//   DCP1: (x, y, w, z)  length 3n+1
//   DCP2: (x, y, z)     length 2n+1
//   DCP3: (x, y, w)     length 3n
struct DcPoint {
  FormKind kind = FormKind::DCP1;
  int n = 0;
  Vector flat;

  static DcPoint zeros(FormKind kind, int n);
  static int flat_size(FormKind kind, int n);

  int size() const { return static_cast<int>(flat.size()); }

  std::span<const double> x() const { return {flat.data(), static_cast<std::size_t>(n)}; }
  std::span<double> x() { return {flat.data(), static_cast<std::size_t>(n)}; }
  std::span<const double> y() const { return {flat.data() + n, static_cast<std::size_t>(n)}; }
  std::span<double> y() { return {flat.data() + n, static_cast<std::size_t>(n)}; }

  bool has_w() const { return kind != FormKind::DCP2; }
  std::span<const double> w() const { return {flat.data() + 2 * n, static_cast<std::size_t>(n)}; }
  std::span<double> w() { return {flat.data() + 2 * n, static_cast<std::size_t>(n)}; }

  bool has_z() const { return kind != FormKind::DCP3; }
  double z() const { return flat[kind == FormKind::DCP2 ? 2 * n : 3 * n]; }
  double& z() { return flat[kind == FormKind::DCP2 ? 2 * n : 3 * n]; }

  Vector x_vec() const { return Vector(x().begin(), x().end()); }
  Vector y_vec() const { return Vector(y().begin(), y().end()); }
};

// ca*a + cb*b (same kind and dimension)
DcPoint combine(const DcPoint& a, double ca, const DcPoint& b, double cb);
void add_scaled(DcPoint& a, double c, const DcPoint& b);  // a += c*b
double dot(const DcPoint& a, const DcPoint& b);
double dist(const DcPoint& a, const DcPoint& b);

// A tiny LP interface so this module can compute the DCP3 curvature bound
// without depending on the convex solver (which depends on this module).
struct LpSpec {
  DenseMatrix aeq;
  Vector beq;
  Vector cost;                // minimize cost'v
  std::vector<int> lb_mask;   // indices with v_i >= 0
  double tol = 1e-8;
};
struct LpSolution {
  bool ok = false;
  std::string message;
  Vector v;
  double objective = 0.0;
};
using LpSolveFn = std::function<LpSolution(const LpSpec&)>;

struct Formulation {
  FormKind kind = FormKind::DCP1;
  const AeicpInstance* inst = nullptr;
  double rho = 0.1;  // strong-convexity augmentation added to both components
  double eta = 0.0;  // DCP3 only

  int n() const { return inst->n; }
};

// For DCP3 an LP solver is required (eta comes from an LP bound).
Formulation make_formulation(const AeicpInstance& inst, FormKind kind, double rho,
                             const LpSolveFn& lp = nullptr);

// eta = 3.2 + 20*n*M^2 with M = max{e'y : (x,y,w) in C3}.
double eta_for_dcp3(const AeicpInstance& inst, const LpSolveFn& lp);

// Equality-constraint data of the feasible set (shared by the subproblem
// builder, the eta LP, and feasibility checks):
//   DCP1: [B -A -I 0]v = 0, e'x = 1, e'y - z = 0   over (x,y,w,z)
//   DCP2: e'x = 1, e'y - z = 0                     over (x,y,z); B x - A y >= 0
//   DCP3: [B -A -I]v = 0, e'x = 1                  over (x,y,w)
void equality_rows(const Formulation& form, DenseMatrix& aeq, Vector& beq);

// Unregularized objective f = g - h (the rho terms cancel).
double f_value(const Formulation& form, const DcPoint& X);
DcPoint grad_f(const Formulation& form, const DcPoint& X);

// DC components including the rho/2 |X|^2 augmentation on both sides.
double g_value(const Formulation& form, const DcPoint& X);
double h_value(const Formulation& form, const DcPoint& X);

// Gradient of the H component *without* the rho augmentation; callers form
// the linearization vector xi = rho*X + grad_H(X) (plus inertial terms).
DcPoint grad_H(const Formulation& form, const DcPoint& X);

// Indices (0-based) of components within eps_act of zero. For DCP2 the set
// also covers the n slack rows B x - A y at offsets 2n+1..3n.
std::vector<int> active_set(const Formulation& form, const DcPoint& X,
                            double eps_act = 1e-8);

bool is_feasible(const Formulation& form, const DcPoint& X, double tol);

// Packs (x0, y0) into the formulation's start point:
//   DCP1: (x0, y0, B x0 - A y0, e'y0); DCP2 drops w; DCP3 drops z.
DcPoint initial_point(const Formulation& form, const Vector& x0, const Vector& y0);

struct Extraction {
  Vector x;
  double lambda = 0.0;
  bool degenerate = false;  // z below 1e-12 (DCP1/2) or y = 0 (DCP3)
};

// lambda = 1/z for DCP1/DCP2, |x|/|y| for DCP3. Degenerate points are
// reported, not fatal; harness code falls back to the Rayleigh quotient.
Extraction extract_solution(const Formulation& form, const DcPoint& X);

// Hessian of phi(x,y) = (x'y)^2/|x|^2 as a symmetric 2n x 2n matrix in the
// (x, y) ordering; used to validate the eta curvature bound by sampling.
DenseMatrix phi_hessian(const Vector& x, const Vector& y);

}  // namespace aeicp
