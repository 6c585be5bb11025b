// Acceptance suite: each numbered criterion prints one PASS/FAIL line with a
// short detail string; the exit status is the number of failed criteria.
//
// Lyapunov/monotonicity monitors start at k = 1: the shared starting point
// X^0 = (x0, y0, B x0 - A y0, e'y0) may sit outside the feasible set, which
// exempts the first transition (the descent guarantees cover the generated
// sequence from the first subproblem solution on).

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "aeicp/bench.hpp"
#include "aeicp/linesearch.hpp"
#include "aeicp/matrix_market.hpp"
#include "reference_solvers.hpp"
#include "test_helpers.hpp"

using namespace aeicp;
using namespace aeicp::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  double seconds = 0.0;
};

double now_minus(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

DcPoint random_point(const Formulation& form, Xoshiro256pp& rng) {
  const int n = form.n();
  DcPoint p = DcPoint::zeros(form.kind, n);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    p.x()[i] = 0.05 + rng.uniform01();
    sum += p.x()[i];
  }
  for (int i = 0; i < n; ++i) p.x()[i] /= sum;
  for (int i = 0; i < n; ++i) p.y()[i] = rng.uniform01();
  if (p.has_w())
    for (int i = 0; i < n; ++i) p.w()[i] = 2.0 * rng.uniform01();
  if (p.has_z()) p.z() = 2.0 * rng.uniform01();
  return p;
}

DcPoint fd_gradient(const Formulation& form, const DcPoint& X,
                    double (*fn)(const Formulation&, const DcPoint&)) {
  DcPoint g = DcPoint::zeros(form.kind, form.n());
  DcPoint probe = X;
  for (int i = 0; i < X.size(); ++i) {
    const double h = 1e-5 * (1.0 + std::fabs(X.flat[i]));
    const double saved = probe.flat[i];
    probe.flat[i] = saved + h;
    const double fp = fn(form, probe);
    probe.flat[i] = saved - h;
    const double fm = fn(form, probe);
    probe.flat[i] = saved;
    g.flat[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

double rel_gap(const DcPoint& got, const DcPoint& want) {
  double scale = 1.0, worst = 0.0;
  for (double v : want.flat) scale = std::max(scale, std::fabs(v));
  for (int i = 0; i < got.size(); ++i)
    worst = std::max(worst, std::fabs(got.flat[i] - want.flat[i]));
  return worst / scale;
}

Formulation formulation_for(const AeicpInstance& inst, FormKind kind,
                            double rho = 0.1) {
  return make_formulation(inst, kind, rho,
                          kind == FormKind::DCP3 ? make_lp_solver() : LpSolveFn());
}

Vector safe_simplex(const AeicpInstance& inst, Xoshiro256pp& rng) {
  const int n = inst.n;
  Vector x(n);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    x[i] = 0.05 + rng.uniform01();
    sum += x[i];
  }
  for (int i = 0; i < n; ++i) x[i] /= sum;
  for (int mix = 0; mix < 60; ++mix) {
    const Vector bx = matvec(inst.B, x);
    double worst = 0.0;
    for (double v : bx) worst = std::min(worst, v);
    if (worst > 0.0) break;
    for (int i = 0; i < n; ++i) x[i] = 0.5 * (x[i] + 1.0 / n);
  }
  return x;
}

Vector shrink_to_feasible_y(const AeicpInstance& inst, const Vector& x, Vector y) {
  for (int shrink = 0; shrink < 80; ++shrink) {
    const Vector bx = matvec(inst.B, x);
    const Vector ay = matvec(inst.A, y);
    bool ok = true;
    for (int i = 0; i < inst.n; ++i)
      if (bx[i] - ay[i] < 0.0) ok = false;
    if (ok) break;
    for (double& v : y) v *= 0.5;
  }
  return y;
}

void draw_start(int n, uint64_t seed, Vector& x0, Vector& y0) {
  Xoshiro256pp rng(seed);
  x0.resize(n);
  y0.resize(n);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    x0[i] = rng.uniform01();
    sum += x0[i];
  }
  for (int i = 0; i < n; ++i) x0[i] /= sum;
  for (int i = 0; i < n; ++i) y0[i] = rng.uniform01();
}

char buf_detail[256];

// --------------------------------------------------------------------------

Outcome criterion_gradients() {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  AeicpInstance inst = gen_rand_instance(6, 20240601);
  Xoshiro256pp rng(11);
  double worst = 0.0;
  for (FormKind kind : {FormKind::DCP1, FormKind::DCP2, FormKind::DCP3}) {
    Formulation form = formulation_for(inst, kind);
    for (int t = 0; t < 100; ++t) {
      DcPoint X = random_point(form, rng);
      worst = std::max(worst, rel_gap(fd_gradient(form, X, &f_value), grad_f(form, X)));
      DcPoint gh = fd_gradient(form, X, &h_value);
      add_scaled(gh, -form.rho, X);
      worst = std::max(worst, rel_gap(gh, grad_H(form, X)));
    }
  }
  out.seconds = now_minus(t0);
  out.pass = worst <= 1e-6 && out.seconds < 30.0;
  std::snprintf(buf_detail, sizeof buf_detail,
                "max relative FD gap %.2e over 100 points x 3 formulations", worst);
  out.detail = buf_detail;
  return out;
}

Outcome criterion_dc_identity() {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  AeicpInstance inst = gen_rand_instance(5, 77);
  Xoshiro256pp rng(13);
  double worst_id = 0.0;
  double worst_conv = -1e300;
  for (FormKind kind : {FormKind::DCP1, FormKind::DCP2, FormKind::DCP3}) {
    Formulation form = formulation_for(inst, kind);
    for (int t = 0; t < 1000; ++t) {
      DcPoint X = random_point(form, rng);
      const double f = f_value(form, X);
      worst_id = std::max(worst_id,
                          std::fabs(g_value(form, X) - h_value(form, X) - f) /
                              (1.0 + std::fabs(f)));
    }
    for (int t = 0; t < 1000; ++t) {
      DcPoint a = random_point(form, rng);
      DcPoint b = random_point(form, rng);
      DcPoint mid = combine(a, 0.5, b, 0.5);
      const double d2 = dist(a, b) * dist(a, b);
      const double slack = form.rho / 8.0 * d2;
      worst_conv = std::max(
          worst_conv, g_value(form, mid) -
                          (0.5 * (g_value(form, a) + g_value(form, b)) - slack));
      worst_conv = std::max(
          worst_conv, h_value(form, mid) -
                          (0.5 * (h_value(form, a) + h_value(form, b)) - slack));
    }
  }
  out.seconds = now_minus(t0);
  out.pass = worst_id <= 1e-10 && worst_conv <= 1e-10;
  std::snprintf(buf_detail, sizeof buf_detail,
                "identity gap %.2e, midpoint-convexity excess %.2e", worst_id,
                worst_conv);
  out.detail = buf_detail;
  return out;
}

Outcome criterion_eta() {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  // hand value first: n=1, A=[2], B=[10] -> M = 5, eta = 503.2
  AeicpInstance hand;
  hand.n = 1;
  hand.A = DenseMatrix(1, 1);
  hand.A(0, 0) = 2.0;
  hand.B = DenseMatrix(1, 1);
  hand.B(0, 0) = 10.0;
  const double eta_hand = eta_for_dcp3(hand, make_lp_solver());
  bool ok = std::fabs(eta_hand - 503.2) <= 1e-6;

  double worst_ratio = 0.0;
  int sampled = 0;
  for (uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
    AeicpInstance inst = gen_rand_instance(10, seed);
    Formulation form = formulation_for(inst, FormKind::DCP3);
    Xoshiro256pp rng(seed * 7 + 1);
    int found = 0;
    for (int t = 0; t < 4000 && found < 1000; ++t) {
      Vector x = safe_simplex(inst, rng);
      Vector y(inst.n);
      for (int i = 0; i < inst.n; ++i) y[i] = rng.uniform01();
      y = shrink_to_feasible_y(inst, x, y);
      const Vector bx = matvec(inst.B, x);
      const Vector ay = matvec(inst.A, y);
      bool feas = true;
      for (int i = 0; i < inst.n; ++i)
        if (bx[i] - ay[i] < 0.0) feas = false;
      if (!feas) continue;
      ++found;
      worst_ratio = std::max(
          worst_ratio, spectral_norm_sym(phi_hessian(x, y)) / form.eta);
    }
    sampled += found;
    if (found < 1000) ok = false;
  }
  if (worst_ratio > 1.0) ok = false;
  out.seconds = now_minus(t0);
  out.pass = ok;
  std::snprintf(buf_detail, sizeof buf_detail,
                "eta(hand)=%.10g, max |H_phi|/eta = %.3f over %d feasible points",
                eta_hand, worst_ratio, sampled);
  out.detail = buf_detail;
  return out;
}

Outcome criterion_subproblem_solver() {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  double worst_kkt = 0.0, worst_tight = 0.0;
  int solves = 0, failures = 0;
  for (uint64_t seed = 0; seed < 10; ++seed) {
    AeicpInstance inst = gen_rand_instance(10, derive_seed(2024, 2 * seed));
    Vector x0, y0;
    draw_start(10, derive_seed(2024, 2 * seed + 1), x0, y0);
    for (FormKind kind : {FormKind::DCP1, FormKind::DCP2, FormKind::DCP3}) {
      Formulation form = formulation_for(inst, kind);
      DcPoint X = initial_point(form, x0, y0);
      ConicQp qp = build_subproblem(form, DcPoint::zeros(kind, 10));
      for (int k = 0; k < 25; ++k) {
        DcPoint xi = grad_H(form, X);
        add_scaled(xi, form.rho, X);
        set_linearization(qp, form, xi);
        SolverResult sub = solve(qp, 1e-8, 100);
        ++solves;
        if (sub.status != SolveStatus::Optimal) {
          ++failures;
          continue;
        }
        worst_kkt = std::max(worst_kkt, sub.kkt_residual);
        if (kind != FormKind::DCP3) {
          const int n = 10;
          const int zi = (kind == FormKind::DCP1) ? 3 * n : 2 * n;
          const int u0 = zi + 1;
          const auto& v = sub.v;
          double nx2 = 0.0, nypx2 = 0.0, nymx2 = 0.0;
          for (int i = 0; i < n; ++i) {
            nx2 += v[i] * v[i];
            nypx2 += (v[n + i] + v[i]) * (v[n + i] + v[i]);
            nymx2 += (v[n + i] - v[i]) * (v[n + i] - v[i]);
          }
          const double z = v[zi];
          const double gaps[6] = {std::fabs(v[u0 + 0] - nx2),
                                  std::fabs(v[u0 + 1] - z * z),
                                  std::fabs(v[u0 + 2] - (z + 1) * (z + 1)),
                                  std::fabs(v[u0 + 3] - (z - 1) * (z - 1)),
                                  std::fabs(v[u0 + 4] - nypx2),
                                  std::fabs(v[u0 + 5] - nymx2)};
          for (double g : gaps) worst_tight = std::max(worst_tight, g);
        }
        std::copy(sub.v.begin(), sub.v.begin() + qp.iterate_dim, X.flat.begin());
      }
    }
  }

  // QP1 against a projected-gradient reference on small instances
  double worst_obj_gap = 0.0;
  for (int n : {3, 5}) {
    AeicpInstance inst = gen_rand_instance(n, 7 + n);
    Formulation form = formulation_for(inst, FormKind::DCP1);
    Vector x0, y0;
    draw_start(n, 100 + n, x0, y0);
    for (double& v : y0) v *= 0.5;
    DcPoint X = initial_point(form, x0, y0);
    DcPoint xi = grad_H(form, X);
    add_scaled(xi, form.rho, X);
    ConicQp qp = build_subproblem(form, xi);
    SolverResult sub = solve(qp, 1e-8, 100);
    if (sub.status != SolveStatus::Optimal) {
      ++failures;
      continue;
    }
    DcPoint block = DcPoint::zeros(form.kind, n);
    std::copy(sub.v.begin(), sub.v.begin() + qp.iterate_dim, block.flat.begin());
    DcPoint ref = projected_gradient_reference(form, xi, X);
    const double obj_qp = g_value(form, block) - dot(block, xi);
    const double obj_ref = g_value(form, ref) - dot(ref, xi);
    worst_obj_gap = std::max(
        worst_obj_gap, std::fabs(obj_qp - obj_ref) / (1.0 + std::fabs(obj_ref)));
  }

  out.seconds = now_minus(t0);
  out.pass = failures == 0 && worst_kkt <= 1e-8 && worst_tight <= 1e-6 &&
             worst_obj_gap <= 1e-6;
  std::snprintf(buf_detail, sizeof buf_detail,
                "%d solves, %d failures, max kkt %.2e, max |u - square| %.2e, "
                "QP1-vs-CP1 gap %.2e",
                solves, failures, worst_kkt, worst_tight, worst_obj_gap);
  out.detail = buf_detail;
  return out;
}

Outcome criterion_exact_linesearch() {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  Xoshiro256pp rng(31415);
  double worst = -1e300;
  int pairs = 0;
  for (FormKind kind : {FormKind::DCP1, FormKind::DCP2}) {
    AeicpInstance inst = gen_rand_instance(3, 606);
    Formulation form = formulation_for(inst, kind);
    while (pairs < (kind == FormKind::DCP1 ? 100 : 200)) {
      // feasible V, null-space D
      Vector x = safe_simplex(inst, rng);
      Vector y(3);
      for (int i = 0; i < 3; ++i) y[i] = rng.uniform01();
      y = shrink_to_feasible_y(inst, x, y);
      DcPoint V = initial_point(form, x, y);
      Vector dx(3), dy(3);
      double dxsum = 0.0;
      for (int i = 0; i < 3; ++i) {
        dx[i] = rng.uniform_pm1();
        dxsum += dx[i];
      }
      for (int i = 0; i < 3; ++i) dx[i] -= dxsum / 3.0;
      for (int i = 0; i < 3; ++i) dy[i] = rng.uniform_pm1();
      DcPoint D = DcPoint::zeros(kind, 3);
      std::copy(dx.begin(), dx.end(), D.x().begin());
      std::copy(dy.begin(), dy.end(), D.y().begin());
      double dysum = 0.0;
      for (double v : dy) dysum += v;
      D.z() = dysum;
      if (D.has_w()) {
        const Vector bdx = matvec(inst.B, dx);
        const Vector ady = matvec(inst.A, dy);
        for (int i = 0; i < 3; ++i) D.w()[i] = bdx[i] - ady[i];
      }
      const double cap = std::min(max_feasible_step(form, V, D), 10.0);
      if (!(cap > 1e-6) || !std::isfinite(cap)) continue;
      ++pairs;
      auto res = exact_linesearch(form, V, D, cap);
      double best = std::numeric_limits<double>::infinity();
      for (int g = 0; g <= 100000; ++g)
        best = std::min(best, f_value(form, combine(V, 1.0, D, cap * g / 100000.0)));
      worst = std::max(worst, f_value(form, res.point) - best);
    }
  }
  out.seconds = now_minus(t0);
  out.pass = worst <= 1e-8;
  std::snprintf(buf_detail, sizeof buf_detail,
                "max excess over the 1e5-point grid: %.2e on %d pairs", worst, pairs);
  out.detail = buf_detail;
  return out;
}

struct GridCell {
  FormKind kind;
  Variant variant;
  int problem;
  RunResult result;
  bool failed = false;
};

Outcome criterion_monitors_and_trends(std::vector<GridCell>& grid_out) {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();

  const std::vector<Variant> variants = {
      Variant::DCA,   Variant::BDCAe,   Variant::BDCAa, Variant::ADCA,
      Variant::InDCA, Variant::HDCA_LI, Variant::HDCA_NI};
  const std::vector<FormKind> kinds = {FormKind::DCP1, FormKind::DCP2,
                                       FormKind::DCP3};

  ExperimentSpec spec;
  spec.dataset = RandSet{10, 10, 20240809};
  std::vector<BenchProblem> problems = build_problems(spec);

  std::vector<Formulation> forms(problems.size() * kinds.size());
  const LpSolveFn lp = make_lp_solver();
  for (std::size_t p = 0; p < problems.size(); ++p)
    for (std::size_t fi = 0; fi < kinds.size(); ++fi)
      forms[p * kinds.size() + fi] =
          make_formulation(problems[p].inst, kinds[fi], 0.1, lp);

  std::vector<GridCell> grid(problems.size() * kinds.size() * variants.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= grid.size()) return;
      const std::size_t p = idx / (kinds.size() * variants.size());
      const std::size_t rem = idx % (kinds.size() * variants.size());
      const std::size_t fi = rem / variants.size();
      const std::size_t vi = rem % variants.size();
      GridCell& cell = grid[idx];
      cell.kind = kinds[fi];
      cell.variant = variants[vi];
      cell.problem = static_cast<int>(p);
      DcaConfig cfg;
      cfg.variant = variants[vi];
      cfg.max_iter = 200;
      cfg.eps_stop = 0.0;           // fixed-iteration protocol
      cfg.subproblem_tol = 3e-12;   // descent monitors need tight gaps
      cfg.subproblem_max_iter = 400;
      try {
        cell.result = run(problems[p].inst, forms[p * kinds.size() + fi], cfg,
                          problems[p].x0, problems[p].y0);
        cell.failed = cell.result.status == RunStatus::SubproblemFailure;
      } catch (const std::exception& e) {
        cell.failed = true;
        std::fprintf(stderr, "[grid] %s %s %s: %s\n",
                     problems[p].inst.label.c_str(), to_string(kinds[fi]),
                     to_string(variants[vi]), e.what());
      }
    }
  };
  const unsigned jobs =
      std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  int failures = 0;
  double worst_mono = -1e300, worst_li = -1e300, worst_ni = -1e300;
  for (const GridCell& cell : grid) {
    if (cell.failed) {
      ++failures;
      continue;
    }
    const auto& tr = cell.result.trace;
    if (cell.variant == Variant::DCA || cell.variant == Variant::BDCAe ||
        cell.variant == Variant::BDCAa) {
      for (std::size_t k = 2; k < tr.size(); ++k)
        worst_mono = std::max(worst_mono, tr[k].f - tr[k - 1].f);
    }
    if (cell.variant == Variant::HDCA_LI) {
      const double rho_sum = 0.2;
      const double gamma = rho_sum / 122.0;
      const double coef = (rho_sum - gamma * 122.0) / 242.0;
      for (std::size_t k = 1; k + 1 < tr.size(); ++k) {
        const double sn = tr[k].step_norm;
        worst_li = std::max(worst_li, tr[k + 1].E - (tr[k].E - coef * sn * sn));
      }
    }
    if (cell.variant == Variant::HDCA_NI) {
      const int q = 10;
      const double delta = (1.0 - 0.99 * 0.99) * 0.2 / 4.0;
      const int last = static_cast<int>(tr.size()) - 1;
      auto window_energy = [&](int k) {
        double e = -1e300;
        for (int t = std::max(0, k - q); t <= k; ++t) e = std::max(e, tr[t].E);
        return e;
      };
      for (int k = 1; k + 1 + q <= last; ++k) {
        double min_step2 = 1e300;
        for (int t = k; t <= k + q; ++t)
          min_step2 = std::min(min_step2, tr[t].step_norm * tr[t].step_norm);
        worst_ni = std::max(worst_ni, window_energy(k + 1 + q) -
                                          (window_energy(k) - delta * min_step2));
      }
    }
  }

  out.seconds = now_minus(t0);
  out.pass = failures == 0 && worst_mono <= 1e-10 && worst_li <= 1e-8 &&
             worst_ni <= 1e-8;
  std::snprintf(buf_detail, sizeof buf_detail,
                "%d failed runs, worst monotone excess %.2e, Thm-2.4 excess %.2e, "
                "Thm-2.5 excess %.2e",
                failures, worst_mono, worst_li, worst_ni);
  out.detail = buf_detail;
  grid_out = std::move(grid);
  return out;
}

Outcome criterion_trends(const std::vector<GridCell>& grid) {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = !grid.empty();
  std::string detail;
  for (FormKind kind : {FormKind::DCP1, FormKind::DCP2, FormKind::DCP3}) {
    double mean[7] = {0, 0, 0, 0, 0, 0, 0};
    int counts[7] = {0, 0, 0, 0, 0, 0, 0};
    for (const GridCell& cell : grid) {
      if (cell.kind != kind || cell.failed) continue;
      const int vi = static_cast<int>(cell.variant);
      mean[vi] += cell.result.trace.back().f;
      ++counts[vi];
    }
    for (int vi = 0; vi < 7; ++vi) {
      if (counts[vi] != 10) ok = false;
      if (counts[vi] > 0) mean[vi] /= counts[vi];
    }
    const double dca = mean[static_cast<int>(Variant::DCA)];
    const double ni = mean[static_cast<int>(Variant::HDCA_NI)];
    if (!(ni <= dca)) ok = false;
    for (int vi = 0; vi < 7; ++vi)
      if (!(mean[vi] <= 1.05 * dca)) ok = false;
    char frag[96];
    std::snprintf(frag, sizeof frag, " %s: dca %.2e, hdca-ni %.2e;",
                  to_string(kind), dca, ni);
    detail += frag;
  }
  out.seconds = now_minus(t0);
  out.pass = ok;
  out.detail = "mean final f -" + detail;
  return out;
}

Outcome criterion_solvable_2x2() {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  DenseMatrix a(2, 2);
  a(0, 0) = 2.0;
  a(1, 1) = 1.0;
  AeicpInstance inst = make_instance(std::move(a), DenseMatrix::identity(2), "d21");
  Formulation form = formulation_for(inst, FormKind::DCP1);
  int hits = 0;
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    Vector x0, y0;
    draw_start(2, seed, x0, y0);
    DcaConfig cfg;
    cfg.variant = Variant::DCA;
    cfg.max_iter = 600;
    cfg.eps_stop = 1e-12;
    cfg.subproblem_tol = 1e-11;
    RunResult res = run(inst, form, cfg, x0, y0);
    if (res.trace.back().f > 1e-6) continue;
    Extraction e = extract_solution(form, res.final_point);
    if (e.degenerate) continue;
    const double err = std::min(std::fabs(e.lambda - 1.0), std::fabs(e.lambda - 2.0));
    if (err <= 1e-4) ++hits;
  }
  out.seconds = now_minus(t0);
  out.pass = hits >= 7 && out.seconds < 5.0;
  std::snprintf(buf_detail, sizeof buf_detail,
                "%d/10 starts reached f <= 1e-6 with lambda in {1,2} +- 1e-4 "
                "(%.2f s)",
                hits, out.seconds);
  out.detail = buf_detail;
  return out;
}

Outcome criterion_counterexample() {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  AeicpInstance inst;
  inst.n = 2;
  inst.A = DenseMatrix(2, 2);
  inst.A(0, 0) = -1.0;
  inst.A(0, 1) = 1.0;
  inst.A(1, 0) = -2.0;
  inst.A(1, 1) = 2.0;
  inst.B = DenseMatrix::identity(2);
  SolutionReport rep = feasibility_report(inst, {0.0, 1.0}, 0.0);
  out.seconds = now_minus(t0);
  out.pass = rep.lambda == 2.0 && rep.w[0] == -1.0 && rep.w[1] == 0.0 && rep.c == 0.0;
  std::snprintf(buf_detail, sizeof buf_detail,
                "lambda=%g w=[%g,%g] c=%g (all exact)", rep.lambda, rep.w[0],
                rep.w[1], rep.c);
  out.detail = buf_detail;
  return out;
}

Outcome criterion_pd_shift() {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  DenseMatrix a(2, 2);
  a(0, 0) = 2.0;
  a(0, 1) = 0.3;
  a(1, 0) = -0.1;
  a(1, 1) = 1.0;
  DenseMatrix b = DenseMatrix::identity(2);
  b(0, 0) = 1.5;
  b(0, 1) = 0.2;
  b(1, 0) = 0.2;
  double worst = 0.0;
  bool ok = true;
  AeicpInstance base = make_instance(a, b, "base");
  TwoByTwoSolutions ref = enumerate_2x2_solutions(base);
  if (ref.solutions.empty()) ok = false;
  for (double mu : {0.5, 1.0, 2.0}) {
    DenseMatrix shifted = a;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) shifted(i, j) += mu * b(i, j);
    AeicpInstance inst = make_instance(shifted, b, "shifted");
    TwoByTwoSolutions got = enumerate_2x2_solutions(inst);
    if (got.solutions.size() != ref.solutions.size()) ok = false;
    for (const auto& [x, lambda] : ref.solutions)
      worst = std::max(worst, aeicp_residual(inst, x, lambda + mu));
    for (const auto& [x, lambda] : got.solutions)
      worst = std::max(worst, aeicp_residual(base, x, lambda - mu));
  }
  out.seconds = now_minus(t0);
  out.pass = ok && worst <= 1e-9;
  std::snprintf(buf_detail, sizeof buf_detail,
                "max shifted-pair residual %.2e over mu in {0.5, 1, 2}", worst);
  out.detail = buf_detail;
  return out;
}

Outcome criterion_matrix_market() {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  // round trip
  Xoshiro256pp rng(17);
  DenseMatrix m = random_matrix(5, 4, rng);
  m(2, 1) = 0.0;
  m(0, 3) = 3.5;
  std::ostringstream first;
  save_matrix_market(m, first);
  std::istringstream back1(first.str());
  DenseMatrix loaded = load_matrix_market(back1);
  if (loaded.data != m.data) ok = false;
  std::ostringstream second;
  save_matrix_market(loaded, second);
  if (first.str() != second.str()) ok = false;

  // NEP preprocessing hand examples
  AeicpInstance e1 = build_nep_instance(DenseMatrix::identity(3), "eye");
  if (std::fabs(e1.mu - 1.0) > 1e-12 || std::fabs(e1.A(0, 0) - 2.0) > 1e-12)
    ok = false;
  DenseMatrix d(2, 2);
  d(0, 0) = -3.0;
  d(1, 1) = 1.0;
  AeicpInstance e2 = build_nep_instance(d, "diag");
  if (std::fabs(e2.mu - 7.0) > 1e-12 || std::fabs(e2.A(0, 0) - 4.0) > 1e-12 ||
      std::fabs(e2.A(1, 1) - 8.0) > 1e-12)
    ok = false;
  AeicpInstance e3 = build_nep_instance(DenseMatrix(2, 2), "zero");
  if (std::fabs(e3.mu - 1.0) > 1e-12 || std::fabs(e3.A(0, 0) - 1.0) > 1e-12)
    ok = false;

  out.seconds = now_minus(t0);
  out.pass = ok;
  out.detail = "round trip exact; mu formula on the three hand instances";
  return out;
}

}  // namespace

int main() {
  struct Entry {
    const char* name;
    Outcome outcome;
  };
  std::vector<Entry> entries;
  std::vector<GridCell> grid;

  entries.push_back({"01 gradient suite (FD, 1e-6 rel)", criterion_gradients()});
  entries.push_back({"02 DC identity + midpoint convexity", criterion_dc_identity()});
  entries.push_back({"03 eta curvature bound (Prop-3.2 style)", criterion_eta()});
  entries.push_back({"04 subproblem solver (kkt/tightness/reference)",
                     criterion_subproblem_solver()});
  entries.push_back({"05 exact line search vs 1e5-point grid",
                     criterion_exact_linesearch()});
  Outcome monitors = criterion_monitors_and_trends(grid);
  entries.push_back({"06 descent and Lyapunov monitors on RAND(10) grid", monitors});
  entries.push_back({"07 solvable 2x2: DCA reaches the eigenvalue set",
                     criterion_solvable_2x2()});
  entries.push_back({"08 stationary-point counterexample, bit-exact",
                     criterion_counterexample()});
  entries.push_back({"09 trend reproduction on RAND(10)", criterion_trends(grid)});
  entries.push_back({"10 PD-shift equivalence via the 2x2 oracle",
                     criterion_pd_shift()});
  entries.push_back({"11 matrix market round trip + NEP shift",
                     criterion_matrix_market()});

  int failures = 0;
  for (const auto& [name, outcome] : entries) {
    std::printf("criterion %s [%s] (%.1fs) %s\n", name,
                outcome.pass ? "PASS" : "FAIL", outcome.seconds,
                outcome.detail.c_str());
    if (!outcome.pass) ++failures;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(entries.size()) - failures,
              entries.size());
  return failures;
}
