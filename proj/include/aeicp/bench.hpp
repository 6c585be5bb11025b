#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "aeicp/engine.hpp"

namespace aeicp {

struct RandSet {
  int n = 10;
  int count = 10;
  uint64_t base_seed = 42;
};

struct NepDir {
  std::string path;
  uint64_t base_seed = 42;  // seeds the shared initial points
};

struct ExperimentSpec {
  std::variant<RandSet, NepDir> dataset;
  std::vector<FormKind> formulations;
  std::vector<Variant> variants;
  DcaConfig cfg;
  std::string out_dir;
  int jobs = 1;
};

struct BenchProblem {
  AeicpInstance inst;
  Vector x0;  // shared across every (formulation, variant) cell
  Vector y0;
  double cond_a = 0.0;
};

// Materializes the dataset with its per-problem shared starting points.
// Unreadable NEP files produce a diagnostic on stderr and are skipped;
// `io_failures` counts them.
std::vector<BenchProblem> build_problems(const ExperimentSpec& spec,
                                         int* io_failures = nullptr);

// Full (problem x formulation x variant) grid: one trace file and one
// report line per cell, one aggregate per formulation with an avg row.
// NEP datasets run the inertial variants (InDCA, HDCA-LI, HDCA-NI) with
// the conservative strategy (force deferred to k >= 2).
// Returns 0 on success, 1 on usage errors, 2 on IO failures, 3 when at
// least one cell reported a solver failure.
int run_experiment(const ExperimentSpec& spec);

void emit_trace(const std::vector<TraceRecord>& trace, const std::string& path);

struct AggregateCell {
  double f = 0.0;
  double c = 0.0;
  double cpu_s = 0.0;
};

struct AggregateRow {
  std::string problem;
  double cond_a = 0.0;
  std::vector<AggregateCell> cells;  // one per variant, harness order
};

void emit_aggregate(const std::vector<AggregateRow>& rows,
                    const std::vector<Variant>& variants, const std::string& path);

// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

}  // namespace aeicp
