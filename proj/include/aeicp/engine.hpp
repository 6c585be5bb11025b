#pragma once

#include <optional>
#include <string>
#include <vector>

#include "aeicp/conic_qp.hpp"
#include "aeicp/linesearch.hpp"

namespace aeicp {

enum class Variant { DCA, BDCAe, BDCAa, ADCA, InDCA, HDCA_LI, HDCA_NI };

const char* to_string(Variant v);
std::optional<Variant> variant_from_string(const std::string& name);

struct DcaConfig {
  Variant variant = Variant::DCA;
  double rho = 0.1;        // strong-convexity augmentation (rho_g = rho_h = rho)
  double alpha_bar = 10.0; // line-search stepsize cap
  int q = 10;              // window length for ADCA / HDCA-NI
  double beta_bar = 0.99;  // extrapolation cap for HDCA-NI
  // Inertial stepsize for InDCA / HDCA-LI; when unset the defaults are
  // gamma = rho (InDCA) and gamma = 2*rho/(1+(1+alpha_bar)^2) (HDCA-LI).
  std::optional<double> gamma;
  int max_iter = 200;
  double eps_stop = 1e-8;  // |f_{k+1}-f_k| <= (1+|f_{k+1}|)*eps_stop; 0 disables
  // Apply the inertial force only from k >= 2 on (helps ill-conditioned
  // DCP3 instances at a small cost in f).
  bool conservative_inertia = false;
  // Force v^k = x^k in ADCA / HDCA-NI; the extrapolated-candidate test is
  // then never passed and both variants reduce to their inertia-free base.
  bool disable_extrapolation = false;
  // Skip the boosting line search (BDCA / HDCA-LI take the plain DCA step).
  bool disable_linesearch = false;
  // Switch the HDCA-NI window to q = 0 once beta_k first hits beta_bar.
  bool ni_switch_q0 = false;
  ArmijoParams armijo;
  double subproblem_tol = 1e-8;
  int subproblem_max_iter = 100;
};

// Nesterov extrapolation state: theta is theta_{k+1} after a step (or 1
// after a restart), beta is beta_k = (theta_k - 1)/theta_{k+1} clipped to
// beta_bar. Clipping restarts the recursion from theta = 1.
struct ThetaState {
  double theta = 1.0;
  double beta = 0.0;
};

ThetaState theta_beta_next(const ThetaState& state, double beta_bar);

// Upper endpoint of the admissible inertial range for HDCA-NI:
// ((rho_g+rho_h)(1-beta_k^2) - 4 delta)/(3 - beta_k^2), always in
// [0, rho_g+rho_h).
double gamma_hdca_ni(double beta_k, double rho_sum, double delta);

// Lyapunov energy attached to an iterate: HDCA-LI uses the 2(1+alpha_bar)^2
// denominator, HDCA-NI the per-term denominator 4 (window max is taken by
// the caller); every other variant reports plain f.
double energy(Variant variant, double f_k, double step_norm, double gamma_k,
              const DcaConfig& cfg);

struct TraceRecord {
  int k = 0;
  double f = 0.0;
  double E = 0.0;
  double step_norm = 0.0;  // |X^k - X^{k-1}| over the flattened iterate
  double d_norm = 0.0;     // |Z^k - X^k| (line-search variants)
  double gamma_k = 0.0;
  bool accepted_extrapolation = false;
  double wallclock = 0.0;  // seconds since the run started
};

enum class RunStatus { Converged, MaxIter, SubproblemFailure };

const char* to_string(RunStatus s);

struct RunResult {
  std::vector<TraceRecord> trace;
  DcPoint final_point;
  SolutionReport report;
  RunStatus status = RunStatus::MaxIter;
  int subproblem_iterations = 0;  // total interior-point iterations
};

// Runs the configured DCA-type variant from the shared starting point
// (x0 on the unit simplex, y0 >= 0). The trace holds the initial point at
// k = 0 followed by one record per outer iteration.
RunResult run(const AeicpInstance& inst, const Formulation& form,
              const DcaConfig& cfg, const Vector& x0, const Vector& y0);

}  // namespace aeicp
