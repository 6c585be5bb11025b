#include "aeicp/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "aeicp/matrix_market.hpp"
#include "aeicp/rng.hpp"

namespace fs = std::filesystem;

namespace aeicp {

std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, p);
}

namespace {

std::string zero_pad(int v, int width) {
  std::string s = std::to_string(v);
  while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
  return s;
}

void draw_initial_point(int n, uint64_t seed, Vector& x0, Vector& y0) {
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

}  // namespace

std::vector<BenchProblem> build_problems(const ExperimentSpec& spec,
                                         int* io_failures) {
  std::vector<BenchProblem> problems;
  int failures = 0;
  if (const auto* rand = std::get_if<RandSet>(&spec.dataset)) {
    for (int i = 0; i < rand->count; ++i) {
      BenchProblem p;
      p.inst = gen_rand_instance(rand->n, derive_seed(rand->base_seed, 2 * i));
      p.inst.label = "rand" + std::to_string(rand->n) + "_" + zero_pad(i, 2);
      draw_initial_point(rand->n, derive_seed(rand->base_seed, 2 * i + 1), p.x0, p.y0);
      p.cond_a = cond_number(p.inst.A);
      problems.push_back(std::move(p));
    }
  } else {
    const auto& nep = std::get<NepDir>(spec.dataset);
    std::vector<fs::path> files;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(nep.path, ec))
      if (entry.is_regular_file() && entry.path().extension() == ".mtx")
        files.push_back(entry.path());
    if (ec) {
      std::cerr << "cannot read directory '" << nep.path << "': " << ec.message()
                << "\n";
      ++failures;
    }
    std::sort(files.begin(), files.end());
    int idx = 0;
    for (const auto& file : files) {
      try {
        BenchProblem p;
        p.inst = build_nep_instance(load_matrix_market_file(file.string()),
                                    file.stem().string());
        draw_initial_point(p.inst.n, derive_seed(nep.base_seed, 2 * idx + 1), p.x0,
                           p.y0);
        p.cond_a = cond_number(p.inst.A);
        problems.push_back(std::move(p));
      } catch (const std::exception& e) {
        std::cerr << "skipping '" << file.string() << "': " << e.what() << "\n";
        ++failures;
      }
      ++idx;
    }
  }
  if (io_failures) *io_failures = failures;
  return problems;
}

void emit_trace(const std::vector<TraceRecord>& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << "k,f,E,step_norm,d_norm,gamma_k,accepted_extrapolation,wallclock_s\n";
  for (const auto& r : trace) {
    out << r.k << ',' << format_double(r.f) << ',' << format_double(r.E) << ','
        << format_double(r.step_norm) << ',' << format_double(r.d_norm) << ','
        << format_double(r.gamma_k) << ',' << (r.accepted_extrapolation ? 1 : 0)
        << ',' << format_double(r.wallclock) << '\n';
  }
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

void emit_aggregate(const std::vector<AggregateRow>& rows,
                    const std::vector<Variant>& variants, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << "problem,cond_A";
  for (Variant v : variants)
    out << ',' << to_string(v) << "_f," << to_string(v) << "_c," << to_string(v)
        << "_cpu";
  out << '\n';
  for (const auto& row : rows) {
    out << row.problem << ',' << format_double(row.cond_a);
    for (const auto& cell : row.cells)
      out << ',' << format_double(cell.f) << ',' << format_double(cell.c) << ','
          << format_double(cell.cpu_s);
    out << '\n';
  }
  if (!rows.empty()) {
    const std::size_t ncells = rows.front().cells.size();
    out << "avg,";
    double cond_avg = 0.0;
    for (const auto& row : rows) cond_avg += row.cond_a;
    out << format_double(cond_avg / rows.size());
    for (std::size_t j = 0; j < ncells; ++j) {
      double f = 0.0, c = 0.0, cpu = 0.0;
      for (const auto& row : rows) {
        f += row.cells[j].f;
        c += row.cells[j].c;
        cpu += row.cells[j].cpu_s;
      }
      const double m = static_cast<double>(rows.size());
      out << ',' << format_double(f / m) << ',' << format_double(c / m) << ','
          << format_double(cpu / m);
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

namespace {

struct CellResult {
  bool solver_failure = false;
  AggregateCell cell;
  std::string report_line;
  std::vector<TraceRecord> trace;
  std::string trace_path;
};

}  // namespace

int run_experiment(const ExperimentSpec& spec) {
  if (spec.formulations.empty() || spec.variants.empty()) {
    std::cerr << "nothing to run: empty formulation or variant set\n";
    return 1;
  }
  std::error_code ec;
  fs::create_directories(spec.out_dir, ec);
  if (ec) {
    std::cerr << "cannot create '" << spec.out_dir << "': " << ec.message() << "\n";
    return 2;
  }

  int io_failures = 0;
  std::vector<BenchProblem> problems = build_problems(spec, &io_failures);
  if (problems.empty()) {
    std::cerr << "no problems to run\n";
    return io_failures > 0 ? 2 : 1;
  }

  const LpSolveFn lp = make_lp_solver(spec.cfg.subproblem_max_iter);

  // Formulations per (problem, kind); DCP3's eta needs one LP per problem.
  struct FormCell {
    bool ok = false;
    Formulation form;
    std::string error;
  };
  std::vector<std::vector<FormCell>> forms(problems.size());
  for (std::size_t p = 0; p < problems.size(); ++p) {
    forms[p].resize(spec.formulations.size());
    for (std::size_t fi = 0; fi < spec.formulations.size(); ++fi) {
      try {
        forms[p][fi].form = make_formulation(problems[p].inst, spec.formulations[fi],
                                             spec.cfg.rho, lp);
        forms[p][fi].ok = true;
      } catch (const std::exception& e) {
        forms[p][fi].error = e.what();
      }
    }
  }

  const std::size_t nv = spec.variants.size();
  const std::size_t cells_per_problem = spec.formulations.size() * nv;
  std::vector<CellResult> results(problems.size() * cells_per_problem);

  std::atomic<std::size_t> next{0};
  const std::size_t total = results.size();
  auto worker = [&] {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= total) return;
      const std::size_t p = idx / cells_per_problem;
      const std::size_t rem = idx % cells_per_problem;
      const std::size_t fi = rem / nv;
      const std::size_t vi = rem % nv;
      const BenchProblem& prob = problems[p];
      CellResult& out = results[idx];
      const FormKind kind = spec.formulations[fi];
      const Variant variant = spec.variants[vi];
      out.trace_path = spec.out_dir + "/trace_" + prob.inst.label + "_" +
                       to_string(kind) + "_" + to_string(variant) + ".csv";
      std::ostringstream line;
      line << prob.inst.label << ',' << format_double(prob.cond_a) << ','
           << to_string(kind) << ',' << to_string(variant);
      if (!forms[p][fi].ok) {
        out.solver_failure = true;
        line << ",formulation-error,nan,nan,nan,0,0";
        out.report_line = line.str();
        continue;
      }
      DcaConfig cfg = spec.cfg;
      cfg.variant = variant;
      // Inertial variants on NEP matrices run the conservative strategy:
      // the deferred force rescues ill-conditioned instances at a small
      // cost in f.
      if (std::holds_alternative<NepDir>(spec.dataset) &&
          (variant == Variant::InDCA || variant == Variant::HDCA_LI ||
           variant == Variant::HDCA_NI))
        cfg.conservative_inertia = true;
      try {
        const auto t0 = std::chrono::steady_clock::now();
        RunResult run_out = run(prob.inst, forms[p][fi].form, cfg, prob.x0, prob.y0);
        const double cpu =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
        const double f_final = run_out.trace.back().f;
        const SolutionReport rep = feasibility_report(
            prob.inst, Vector(run_out.final_point.x().begin(),
                              run_out.final_point.x().end()),
            f_final);
        out.cell = AggregateCell{f_final, rep.c, cpu};
        out.trace = std::move(run_out.trace);
        out.solver_failure = run_out.status == RunStatus::SubproblemFailure;
        line << ',' << to_string(run_out.status) << ',' << format_double(f_final)
             << ',' << format_double(rep.c) << ',' << format_double(rep.lambda)
             << ',' << (out.trace.empty() ? 0 : out.trace.back().k) << ','
             << format_double(cpu);
      } catch (const std::exception& e) {
        out.solver_failure = true;
        line << ",error,nan,nan,nan,0,0";
        std::cerr << prob.inst.label << '/' << to_string(kind) << '/'
                  << to_string(variant) << ": " << e.what() << "\n";
      }
      out.report_line = line.str();
    }
  };

  const int jobs = std::max(1, spec.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  bool solver_failure = false;
  try {
    std::ofstream report(spec.out_dir + "/report.csv");
    if (!report) throw std::runtime_error("cannot open report.csv");
    report << "problem,cond_A,formulation,variant,status,f,c,lambda,iterations,"
              "cpu_s\n";
    for (const auto& r : results) {
      report << r.report_line << '\n';
      if (r.solver_failure) solver_failure = true;
      if (!r.trace.empty()) emit_trace(r.trace, r.trace_path);
    }
    if (!report) throw std::runtime_error("write failed for report.csv");

    for (std::size_t fi = 0; fi < spec.formulations.size(); ++fi) {
      std::vector<AggregateRow> rows;
      for (std::size_t p = 0; p < problems.size(); ++p) {
        AggregateRow row;
        row.problem = problems[p].inst.label;
        row.cond_a = problems[p].cond_a;
        for (std::size_t vi = 0; vi < nv; ++vi)
          row.cells.push_back(
              results[p * cells_per_problem + fi * nv + vi].cell);
        rows.push_back(std::move(row));
      }
      emit_aggregate(rows, spec.variants,
                     spec.out_dir + "/aggregate_" +
                         std::string(to_string(spec.formulations[fi])) + ".csv");
    }
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  if (solver_failure) return 3;
  if (io_failures > 0) return 2;
  return 0;
}

}  // namespace aeicp
