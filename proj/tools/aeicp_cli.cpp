// Command-line harness: dataset generation, single solves, benchmark grids
// and a quick self-check. Exit codes: 0 ok, 1 usage, 2 IO, 3 solver failure.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "aeicp/bench.hpp"
#include "aeicp/matrix_market.hpp"
#include "aeicp/rng.hpp"

using namespace aeicp;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

bool parse_formulations(const std::string& arg, std::vector<FormKind>& out) {
  out.clear();
  std::string lowered = arg;
  std::transform(lowered.begin(), lowered.end(), lowered.begin(), ::tolower);
  if (lowered == "all") {
    out = {FormKind::DCP1, FormKind::DCP2, FormKind::DCP3};
    return true;
  }
  for (const auto& tok : split_csv(lowered)) {
    if (tok == "dcp1") out.push_back(FormKind::DCP1);
    else if (tok == "dcp2") out.push_back(FormKind::DCP2);
    else if (tok == "dcp3") out.push_back(FormKind::DCP3);
    else return false;
  }
  return !out.empty();
}

bool parse_variants(const std::string& arg, std::vector<Variant>& out) {
  out.clear();
  std::string lowered = arg;
  std::transform(lowered.begin(), lowered.end(), lowered.begin(), ::tolower);
  if (lowered == "all") {
    out = {Variant::DCA,   Variant::BDCAe,   Variant::BDCAa, Variant::ADCA,
           Variant::InDCA, Variant::HDCA_LI, Variant::HDCA_NI};
    return true;
  }
  for (const auto& tok : split_csv(lowered)) {
    auto v = variant_from_string(tok);
    if (!v) return false;
    out.push_back(*v);
  }
  return !out.empty();
}

struct CommonOpts {
  double rho = 0.1;
  double alpha_bar = 10.0;
  int q = 10;
  double beta_bar = 0.99;
  int maxit = 200;
  double tol = 1e-8;
  double subproblem_tol = 1e-8;
  bool conservative = false;
  double gamma = -1.0;  // <0 keeps the variant default
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--rho", o.rho, "strong-convexity augmentation (default 0.1)");
  cmd->add_option("--alpha-bar", o.alpha_bar, "line-search stepsize cap (default 10)");
  cmd->add_option("--q", o.q, "window length for ADCA/HDCA-NI (default 10)");
  cmd->add_option("--beta-bar", o.beta_bar, "extrapolation cap (default 0.99)");
  cmd->add_option("--maxit", o.maxit, "outer iteration cap (default 200)");
  cmd->add_option("--tol", o.tol,
                  "stopping tolerance |f_{k+1}-f_k| <= (1+|f|)tol; 0 runs "
                  "exactly maxit iterations");
  cmd->add_option("--subproblem-tol", o.subproblem_tol,
                  "interior-point KKT tolerance (default 1e-8)");
  cmd->add_option("--gamma", o.gamma, "inertial stepsize override (InDCA/HDCA-LI)");
  cmd->add_flag("--conservative", o.conservative,
                "apply the inertial force only from k >= 2");
}

DcaConfig make_config(const CommonOpts& o) {
  DcaConfig cfg;
  cfg.rho = o.rho;
  cfg.alpha_bar = o.alpha_bar;
  cfg.q = o.q;
  cfg.beta_bar = o.beta_bar;
  cfg.max_iter = o.maxit;
  cfg.eps_stop = o.tol;
  cfg.subproblem_tol = o.subproblem_tol;
  cfg.conservative_inertia = o.conservative;
  if (o.gamma >= 0.0) cfg.gamma = o.gamma;
  return cfg;
}

int cmd_gen(int n, int count, uint64_t seed, const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    std::cerr << "cannot create '" << out_dir << "': " << ec.message() << "\n";
    return 2;
  }
  try {
    for (int i = 0; i < count; ++i) {
      AeicpInstance inst = gen_rand_instance(n, derive_seed(seed, 2 * i));
      std::string stem = "rand" + std::to_string(n) + "_" +
                         (i < 10 ? "0" : "") + std::to_string(i);
      save_matrix_market_file(inst.A, out_dir + "/" + stem + "_A.mtx");
      save_matrix_market_file(inst.B, out_dir + "/" + stem + "_B.mtx");
      std::cout << stem << " mu=" << format_double(inst.mu)
                << " cond_A=" << format_double(cond_number(inst.A)) << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  return 0;
}

int cmd_solve(const std::string& formulation, const std::string& variant, int n,
              uint64_t seed, const std::string& matrix, const CommonOpts& opts,
              const std::string& trace_path) {
  std::vector<FormKind> forms;
  std::vector<Variant> variants;
  if (!parse_formulations(formulation, forms) || forms.size() != 1) {
    std::cerr << "--formulation must be one of dcp1|dcp2|dcp3\n";
    return 1;
  }
  if (!parse_variants(variant, variants) || variants.size() != 1) {
    std::cerr << "--variant must name one DCA-type algorithm\n";
    return 1;
  }

  AeicpInstance inst;
  try {
    if (!matrix.empty()) {
      inst = build_nep_instance(load_matrix_market_file(matrix),
                                fs::path(matrix).stem().string());
    } else {
      inst = gen_rand_instance(n, derive_seed(seed, 0));
    }
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  Xoshiro256pp rng(derive_seed(seed, 1));
  Vector x0(inst.n), y0(inst.n);
  double sum = 0.0;
  for (int i = 0; i < inst.n; ++i) {
    x0[i] = rng.uniform01();
    sum += x0[i];
  }
  for (int i = 0; i < inst.n; ++i) x0[i] /= sum;
  for (int i = 0; i < inst.n; ++i) y0[i] = rng.uniform01();

  DcaConfig cfg = make_config(opts);
  cfg.variant = variants[0];
  try {
    Formulation form = make_formulation(inst, forms[0], cfg.rho, make_lp_solver());
    RunResult res = run(inst, form, cfg, x0, y0);
    const SolutionReport& rep = res.report;
    std::cout << "problem=" << inst.label << " formulation=" << to_string(forms[0])
              << " variant=" << to_string(variants[0])
              << " status=" << to_string(res.status)
              << " iters=" << res.trace.back().k
              << " f=" << format_double(res.trace.back().f)
              << " c=" << format_double(rep.c)
              << " lambda=" << format_double(rep.lambda)
              << " cpu_s=" << format_double(res.trace.back().wallclock) << "\n";
    if (!trace_path.empty()) emit_trace(res.trace, trace_path);
    return res.status == RunStatus::SubproblemFailure ? 3 : 0;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 3;
  }
}

int cmd_check() {
  int failures = 0;
  auto report = [&](const char* name, bool ok) {
    std::cout << (ok ? "PASS " : "FAIL ") << name << "\n";
    if (!ok) ++failures;
  };

  // matrix market round trip on a generated instance
  try {
    AeicpInstance inst = gen_rand_instance(6, 123);
    std::ostringstream buf;
    save_matrix_market(inst.A, buf);
    std::istringstream back(buf.str());
    DenseMatrix a2 = load_matrix_market(back);
    report("matrix-market round trip", a2.data == inst.A.data);
  } catch (const std::exception&) {
    report("matrix-market round trip", false);
  }

  // DC identity across formulations
  try {
    AeicpInstance inst = gen_rand_instance(5, 7);
    bool ok = true;
    Xoshiro256pp rng(3);
    for (FormKind kind : {FormKind::DCP1, FormKind::DCP2, FormKind::DCP3}) {
      Formulation form = make_formulation(inst, kind, 0.1, make_lp_solver());
      for (int t = 0; t < 200; ++t) {
        DcPoint p = DcPoint::zeros(kind, 5);
        double sum = 0.0;
        for (int i = 0; i < 5; ++i) {
          p.x()[i] = 0.05 + rng.uniform01();
          sum += p.x()[i];
        }
        for (int i = 0; i < 5; ++i) p.x()[i] /= sum;
        for (int i = 0; i < 5; ++i) p.y()[i] = rng.uniform01();
        if (p.has_w())
          for (int i = 0; i < 5; ++i) p.w()[i] = rng.uniform01();
        if (p.has_z()) p.z() = rng.uniform01();
        const double f = f_value(form, p);
        if (std::fabs(g_value(form, p) - h_value(form, p) - f) >
            1e-10 * (1.0 + std::fabs(f)))
          ok = false;
      }
    }
    report("dc identity g - h = f", ok);
  } catch (const std::exception&) {
    report("dc identity g - h = f", false);
  }

  // 2x2 oracle and the PD shift
  try {
    DenseMatrix a(2, 2);
    a(0, 0) = 2.0;
    a(1, 1) = 1.0;
    AeicpInstance inst = make_instance(a, DenseMatrix::identity(2), "d21");
    auto sols = enumerate_2x2_solutions(inst);
    bool ok = sols.solutions.size() == 2;
    DenseMatrix shifted = a;
    shifted(0, 0) += 1.0;
    shifted(1, 1) += 1.0;
    AeicpInstance inst2 = make_instance(shifted, DenseMatrix::identity(2), "d21s");
    for (const auto& [x, lambda] : sols.solutions)
      if (aeicp_residual(inst2, x, lambda + 1.0) > 1e-9) ok = false;
    report("2x2 oracle + PD shift", ok);
  } catch (const std::exception&) {
    report("2x2 oracle + PD shift", false);
  }

  // subproblem solver sanity
  try {
    DenseMatrix aeq(1, 2);
    aeq(0, 0) = 1.0;
    aeq(0, 1) = 1.0;
    SolverResult lp = solve_lp(aeq, {1.0}, {-1.0, 0.0}, {0, 1});
    report("interior-point LP", lp.status == SolveStatus::Optimal &&
                                    std::fabs(lp.v[0] - 1.0) < 1e-6);
  } catch (const std::exception&) {
    report("interior-point LP", false);
  }

  // one monotone DCA run
  try {
    AeicpInstance inst = gen_rand_instance(5, 99);
    Formulation form = make_formulation(inst, FormKind::DCP1, 0.1);
    DcaConfig cfg;
    cfg.max_iter = 30;
    cfg.subproblem_tol = 1e-10;
    Xoshiro256pp rng(1);
    Vector x0(5), y0(5);
    double sum = 0.0;
    for (int i = 0; i < 5; ++i) {
      x0[i] = rng.uniform01();
      sum += x0[i];
    }
    for (int i = 0; i < 5; ++i) x0[i] /= sum;
    for (int i = 0; i < 5; ++i) y0[i] = rng.uniform01();
    RunResult res = run(inst, form, cfg, x0, y0);
    bool ok = true;
    for (std::size_t k = 2; k < res.trace.size(); ++k)
      if (res.trace[k].f > res.trace[k - 1].f + 1e-10) ok = false;
    report("dca descent", ok);
  } catch (const std::exception&) {
    report("dca descent", false);
  }

  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DC programming solvers for the asymmetric eigenvalue "
               "complementarity problem"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "write RAND instances as Matrix Market pairs");
  int gen_n = 10, gen_count = 10;
  uint64_t gen_seed = 42;
  std::string gen_out = "instances";
  gen->add_option("--n", gen_n, "problem order (default 10)");
  gen->add_option("--count", gen_count, "instances to generate (default 10)");
  gen->add_option("--seed", gen_seed, "base seed (default 42)");
  gen->add_option("--out", gen_out, "output directory");

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "run one problem and variant");
  std::string sv_form = "dcp1", sv_variant = "dca", sv_matrix, sv_trace;
  int sv_n = 10;
  uint64_t sv_seed = 42;
  CommonOpts sv_opts;
  solve_cmd->add_option("--formulation", sv_form, "dcp1|dcp2|dcp3");
  solve_cmd->add_option("--variant", sv_variant,
                        "dca|bdcae|bdcaa|adca|indca|hdca-li|hdca-ni");
  solve_cmd->add_option("--n", sv_n, "RAND problem order");
  solve_cmd->add_option("--seed", sv_seed, "seed for the instance and start");
  solve_cmd->add_option("--matrix", sv_matrix,
                        "Matrix Market file (solved as a NEP instance, B = I)");
  solve_cmd->add_option("--trace", sv_trace, "write the per-iteration trace CSV");
  add_common(solve_cmd, sv_opts);

  // bench
  auto* bench = app.add_subcommand("bench",
                                   "full (problem x formulation x variant) grid");
  std::string bn_forms = "all", bn_variants = "all", bn_nep_dir, bn_out = "bench_out";
  int bn_n = 10, bn_count = 10, bn_jobs = 1;
  uint64_t bn_seed = 42;
  CommonOpts bn_opts;
  bench->add_option("--n", bn_n, "RAND problem order (default 10)");
  bench->add_option("--count", bn_count, "RAND instances (default 10)");
  bench->add_option("--seed", bn_seed, "base seed (default 42)");
  bench->add_option("--nep-dir", bn_nep_dir,
                    "directory of .mtx files (replaces the RAND dataset)");
  bench->add_option("--formulations", bn_forms, "comma list or 'all'");
  bench->add_option("--variants", bn_variants, "comma list or 'all'");
  bench->add_option("--out", bn_out, "output directory");
  bench->add_option("--jobs", bn_jobs, "parallel grid cells (default 1)");
  add_common(bench, bn_opts);

  // check
  app.add_subcommand("check", "run the quick invariant suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (gen->parsed()) return cmd_gen(gen_n, gen_count, gen_seed, gen_out);
  if (solve_cmd->parsed())
    return cmd_solve(sv_form, sv_variant, sv_n, sv_seed, sv_matrix, sv_opts, sv_trace);
  if (bench->parsed()) {
    ExperimentSpec spec;
    if (!bn_nep_dir.empty()) spec.dataset = NepDir{bn_nep_dir, bn_seed};
    else spec.dataset = RandSet{bn_n, bn_count, bn_seed};
    if (!parse_formulations(bn_forms, spec.formulations)) {
      std::cerr << "bad --formulations\n";
      return 1;
    }
    if (!parse_variants(bn_variants, spec.variants)) {
      std::cerr << "bad --variants\n";
      return 1;
    }
    spec.cfg = make_config(bn_opts);
    spec.out_dir = bn_out;
    spec.jobs = bn_jobs;
    return run_experiment(spec);
  }
  return cmd_check();
}
