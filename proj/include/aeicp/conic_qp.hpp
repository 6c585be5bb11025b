#pragma once

#include <string>
#include <vector>

#include "aeicp/formulations.hpp"

namespace aeicp {

// One convex quadratic inequality |P v + p|^2 <= d'v + r.
struct QuadCon {
  DenseMatrix P;
  Vector p;
  Vector d;
  double r = 0.0;
};

// Convex subproblem in the solver's canonical shape:
//   min  1/2 v'Qv + c'v
//   s.t. Aeq v = beq,  v_i >= 0 (i in lb_mask),  quad_cons.
// The first `iterate_dim` variables are the formulation iterate; the rest
// are reformulation extras (the u epigraph block, DCP2 slack rows).
struct ConicQp {
  int dim = 0;
  DenseMatrix Q;  // symmetric PSD
  Vector c_lin;
  DenseMatrix aeq;
  Vector beq;
  std::vector<int> lb_mask;
  std::vector<QuadCon> quad_cons;
  int iterate_dim = 0;
};

enum class SolveStatus { Optimal, MaxIter, Infeasible, Unbounded };

const char* to_string(SolveStatus s);

struct SolverResult {
  Vector v;
  double obj = 0.0;
  double kkt_residual = 0.0;  // scaled by 1 + |data|, inf-norm
  int iterations = 0;
  SolveStatus status = SolveStatus::MaxIter;
};

// Builds the per-iteration convex subproblem for the linearization vector
// xi = rho*X^k + grad_H(X^k) (+ inertial terms): the QP/QCQP reformulation
// for DCP1/DCP2 (six epigraph constraints on u), a plain QP for DCP3.
// Constraint data does not depend on xi; set_linearization swaps the
// linear term so one skeleton serves a whole run.
ConicQp build_subproblem(const Formulation& form, const DcPoint& xi);
void set_linearization(ConicQp& qp, const Formulation& form, const DcPoint& xi);

// Primal-dual path-following interior-point method (Mehrotra
// predictor-corrector); one solver covers the LP, QP and QCQP shapes.
// status == Optimal guarantees kkt_residual <= tol.
SolverResult solve(const ConicQp& qp, double tol = 1e-8, int max_iter = 100);

SolverResult solve_lp(const DenseMatrix& aeq, const Vector& beq, const Vector& c_lin,
                      const std::vector<int>& lb_mask, double tol = 1e-8,
                      int max_iter = 100);

// Adapter for modules that take the LP solver by injection.
LpSolveFn make_lp_solver(int max_iter = 100);

}  // namespace aeicp
