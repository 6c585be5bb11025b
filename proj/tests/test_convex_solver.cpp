#include <cmath>

#include "aeicp/conic_qp.hpp"
#include "doctest.h"
#include "reference_solvers.hpp"
#include "test_helpers.hpp"

using namespace aeicp;
using namespace aeicp::testing;

namespace {

Formulation formulation_for(const AeicpInstance& inst, FormKind kind,
                            double rho = 0.1) {
  return make_formulation(inst, kind, rho,
                          kind == FormKind::DCP3 ? make_lp_solver() : LpSolveFn());
}

DcPoint linearization_at(const Formulation& form, const DcPoint& X) {
  DcPoint xi = grad_H(form, X);
  add_scaled(xi, form.rho, X);
  return xi;
}

}  // namespace

TEST_CASE("subproblem structure") {
  AeicpInstance inst = gen_rand_instance(2, 9);
  SUBCASE("dcp1 counts: 13 variables, 4 equality rows, 6 quadratic constraints") {
    Formulation form = formulation_for(inst, FormKind::DCP1);
    ConicQp qp = build_subproblem(form, DcPoint::zeros(FormKind::DCP1, 2));
    CHECK(qp.dim == 13);
    CHECK(qp.aeq.rows == 4);
    CHECK(qp.quad_cons.size() == 6);
    CHECK(qp.iterate_dim == 7);
    CHECK(qp.lb_mask.size() == 7);
  }
  SUBCASE("dcp3 is a plain QP") {
    Formulation form = formulation_for(inst, FormKind::DCP3);
    ConicQp qp = build_subproblem(form, DcPoint::zeros(FormKind::DCP3, 2));
    CHECK(qp.quad_cons.empty());
    CHECK(qp.dim == 6);
    CHECK(qp.iterate_dim == 6);
    CHECK(qp.aeq.rows == 3);
  }
  SUBCASE("constraint data does not depend on the linearization point") {
    Formulation form = formulation_for(inst, FormKind::DCP1);
    DcPoint a = DcPoint::zeros(FormKind::DCP1, 2);
    DcPoint b = DcPoint::zeros(FormKind::DCP1, 2);
    b.x()[0] = 1.0;
    b.z() = 2.0;
    ConicQp qa = build_subproblem(form, linearization_at(form, a));
    ConicQp qb = build_subproblem(form, linearization_at(form, b));
    CHECK(qa.aeq.data == qb.aeq.data);
    CHECK(qa.beq == qb.beq);
    CHECK(qa.Q.data == qb.Q.data);
    REQUIRE(qa.quad_cons.size() == qb.quad_cons.size());
    for (std::size_t j = 0; j < qa.quad_cons.size(); ++j) {
      CHECK(qa.quad_cons[j].P.data == qb.quad_cons[j].P.data);
      CHECK(qa.quad_cons[j].d == qb.quad_cons[j].d);
    }
    CHECK(qa.c_lin != qb.c_lin);
  }
}

TEST_CASE("solve: simplex-constrained least norm") {
  // min |v|^2 s.t. e'v = 1, v >= 0 -> uniform vector
  const int n = 4;
  ConicQp qp;
  qp.dim = n;
  qp.iterate_dim = n;
  qp.Q = DenseMatrix(n, n);
  for (int i = 0; i < n; ++i) qp.Q(i, i) = 2.0;
  qp.c_lin.assign(n, 0.0);
  qp.aeq = DenseMatrix(1, n);
  for (int i = 0; i < n; ++i) qp.aeq(0, i) = 1.0;
  qp.beq = {1.0};
  for (int i = 0; i < n; ++i) qp.lb_mask.push_back(i);
  SolverResult res = solve(qp, 1e-8, 100);
  REQUIRE(res.status == SolveStatus::Optimal);
  CHECK(res.kkt_residual <= 1e-8);
  for (int i = 0; i < n; ++i) CHECK(res.v[i] == doctest::Approx(0.25).epsilon(1e-6));
}

TEST_CASE("solve: epigraph constraint is tight at the optimum") {
  // min u s.t. x = 1, x^2 <= u  ->  (x, u) = (1, 1)
  ConicQp qp;
  qp.dim = 2;
  qp.iterate_dim = 2;
  qp.Q = DenseMatrix(2, 2);
  qp.c_lin = {0.0, 1.0};
  qp.aeq = DenseMatrix(1, 2);
  qp.aeq(0, 0) = 1.0;
  qp.beq = {1.0};
  QuadCon qc;
  qc.P = DenseMatrix(1, 2);
  qc.P(0, 0) = 1.0;
  qc.p = {0.0};
  qc.d = {0.0, 1.0};
  qc.r = 0.0;
  qp.quad_cons.push_back(std::move(qc));
  SolverResult res = solve(qp, 1e-8, 100);
  REQUIRE(res.status == SolveStatus::Optimal);
  CHECK(res.v[0] == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(res.v[1] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("solve_lp basics") {
  SUBCASE("max x over x + y = 1") {
    DenseMatrix aeq(1, 2);
    aeq(0, 0) = 1.0;
    aeq(0, 1) = 1.0;
    SolverResult res = solve_lp(aeq, {1.0}, {-1.0, 0.0}, {0, 1});
    REQUIRE(res.status == SolveStatus::Optimal);
    CHECK(res.v[0] == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(-res.obj == doctest::Approx(1.0).epsilon(1e-7));
  }
  SUBCASE("unbounded ray detected") {
    DenseMatrix aeq(0, 1);
    SolverResult res = solve_lp(aeq, {}, {-1.0}, {0});
    CHECK(res.status == SolveStatus::Unbounded);
  }
  SUBCASE("infeasible equality detected") {
    DenseMatrix aeq(1, 1);
    aeq(0, 0) = 1.0;
    SolverResult res = solve_lp(aeq, {-1.0}, {0.0}, {0});
    CHECK(res.status == SolveStatus::Infeasible);
  }
  SUBCASE("eta LP value for the n=1 hand instance") {
    // max y s.t. 10x - 2y - w = 0, x = 1  ->  y = 5
    DenseMatrix aeq(2, 3);
    aeq(0, 0) = 10.0;
    aeq(0, 1) = -2.0;
    aeq(0, 2) = -1.0;
    aeq(1, 0) = 1.0;
    SolverResult res = solve_lp(aeq, {0.0, 1.0}, {0.0, -1.0, 0.0}, {0, 1, 2});
    REQUIRE(res.status == SolveStatus::Optimal);
    CHECK(-res.obj == doctest::Approx(5.0).epsilon(1e-7));
  }
}

TEST_CASE("solve is deterministic bit for bit") {
  AeicpInstance inst = gen_rand_instance(3, 21);
  Formulation form = formulation_for(inst, FormKind::DCP1);
  DcPoint X = initial_point(form, {0.5, 0.25, 0.25}, {0.1, 0.2, 0.3});
  ConicQp qp = build_subproblem(form, linearization_at(form, X));
  SolverResult a = solve(qp, 1e-8, 100);
  SolverResult b = solve(qp, 1e-8, 100);
  REQUIRE(a.status == SolveStatus::Optimal);
  CHECK(a.v == b.v);
  CHECK(a.obj == b.obj);
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("QP1/QP2 epigraph tightness at engine-style solves") {
  Xoshiro256pp rng(2718);
  for (FormKind kind : {FormKind::DCP1, FormKind::DCP2}) {
    AeicpInstance inst = gen_rand_instance(4, 33);
    Formulation form = formulation_for(inst, kind);
    const int n = inst.n;
    Vector x0(n), y0(n);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      x0[i] = 0.1 + rng.uniform01();
      sum += x0[i];
    }
    for (int i = 0; i < n; ++i) x0[i] /= sum;
    for (int i = 0; i < n; ++i) y0[i] = rng.uniform01();
    DcPoint X = initial_point(form, x0, y0);
    ConicQp qp = build_subproblem(form, linearization_at(form, X));
    SolverResult res = solve(qp, 1e-8, 100);
    REQUIRE(res.status == SolveStatus::Optimal);
    CHECK(res.kkt_residual <= 1e-8);

    // u must equal its defining square within 1e-6 (Thm 4.1/4.2 tightness)
    const int zi = (kind == FormKind::DCP1) ? 3 * n : 2 * n;
    const int u0 = zi + 1;
    const auto& v = res.v;
    double nx2 = 0.0, nypx2 = 0.0, nymx2 = 0.0;
    for (int i = 0; i < n; ++i) {
      nx2 += v[i] * v[i];
      nypx2 += (v[n + i] + v[i]) * (v[n + i] + v[i]);
      nymx2 += (v[n + i] - v[i]) * (v[n + i] - v[i]);
    }
    const double z = v[zi];
    CHECK(std::fabs(v[u0 + 0] - nx2) <= 1e-6);
    CHECK(std::fabs(v[u0 + 1] - z * z) <= 1e-6);
    CHECK(std::fabs(v[u0 + 2] - (z + 1.0) * (z + 1.0)) <= 1e-6);
    CHECK(std::fabs(v[u0 + 3] - (z - 1.0) * (z - 1.0)) <= 1e-6);
    CHECK(std::fabs(v[u0 + 4] - nypx2) <= 1e-6);
    CHECK(std::fabs(v[u0 + 5] - nymx2) <= 1e-6);
  }
}

TEST_CASE("QP1 optimum matches a projected-gradient solve of CP1") {
  Xoshiro256pp rng(314);
  for (uint64_t seed : {1ull, 2ull}) {
    AeicpInstance inst = gen_rand_instance(3, seed);
    Formulation form = formulation_for(inst, FormKind::DCP1);
    const int n = inst.n;
    Vector x0(n), y0(n);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      x0[i] = 0.1 + rng.uniform01();
      sum += x0[i];
    }
    for (int i = 0; i < n; ++i) x0[i] /= sum;
    for (int i = 0; i < n; ++i) y0[i] = 0.5 * rng.uniform01();
    DcPoint X = initial_point(form, x0, y0);
    const DcPoint xi = linearization_at(form, X);

    ConicQp qp = build_subproblem(form, xi);
    SolverResult res = solve(qp, 1e-8, 100);
    REQUIRE(res.status == SolveStatus::Optimal);
    DcPoint qp_block = DcPoint::zeros(form.kind, n);
    std::copy(res.v.begin(), res.v.begin() + qp.iterate_dim, qp_block.flat.begin());

    DcPoint ref = projected_gradient_reference(form, xi, X);
    const double obj_qp = g_value(form, qp_block) - dot(qp_block, xi);
    const double obj_ref = g_value(form, ref) - dot(ref, xi);
    CHECK(std::fabs(obj_qp - obj_ref) <= 1e-6 * (1.0 + std::fabs(obj_ref)));
  }
}

TEST_CASE("rejects malformed problems") {
  ConicQp qp;
  qp.dim = 2;
  qp.iterate_dim = 2;
  qp.Q = DenseMatrix(2, 2);
  qp.Q(0, 1) = 1.0;  // asymmetric
  qp.c_lin = {0.0, 0.0};
  qp.aeq = DenseMatrix(0, 0);
  CHECK_THROWS(solve(qp));
  qp.Q(1, 0) = 1.0;  // symmetric but indefinite (eigenvalues +-1)
  CHECK_THROWS(solve(qp));
}
