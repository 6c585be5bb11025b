#include "aeicp/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace aeicp {

const char* to_string(Variant v) {
  switch (v) {
    case Variant::DCA: return "dca";
    case Variant::BDCAe: return "bdcae";
    case Variant::BDCAa: return "bdcaa";
    case Variant::ADCA: return "adca";
    case Variant::InDCA: return "indca";
    case Variant::HDCA_LI: return "hdca-li";
    case Variant::HDCA_NI: return "hdca-ni";
  }
  return "?";
}

std::optional<Variant> variant_from_string(const std::string& name) {
  if (name == "dca") return Variant::DCA;
  if (name == "bdcae") return Variant::BDCAe;
  if (name == "bdcaa") return Variant::BDCAa;
  if (name == "adca") return Variant::ADCA;
  if (name == "indca") return Variant::InDCA;
  if (name == "hdca-li" || name == "hdcali") return Variant::HDCA_LI;
  if (name == "hdca-ni" || name == "hdcani") return Variant::HDCA_NI;
  return std::nullopt;
}

const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Converged: return "converged";
    case RunStatus::MaxIter: return "maxiter";
    case RunStatus::SubproblemFailure: return "subproblem-failure";
  }
  return "?";
}

ThetaState theta_beta_next(const ThetaState& state, double beta_bar) {
  if (state.theta < 1.0)
    throw std::invalid_argument("theta_beta_next: theta must be >= 1");
  ThetaState next;
  const double theta_next =
      (1.0 + std::sqrt(1.0 + 4.0 * state.theta * state.theta)) / 2.0;
  next.beta = (state.theta - 1.0) / theta_next;
  next.theta = theta_next;
  if (next.beta > beta_bar) {
    next.beta = beta_bar;
    next.theta = 1.0;  // restart the recursion
  }
  return next;
}

double gamma_hdca_ni(double beta_k, double rho_sum, double delta) {
  const double g =
      (rho_sum * (1.0 - beta_k * beta_k) - 4.0 * delta) / (3.0 - beta_k * beta_k);
  return std::max(g, 0.0);
}

double energy(Variant variant, double f_k, double step_norm, double gamma_k,
              const DcaConfig& cfg) {
  const double rho_sum = 2.0 * cfg.rho;
  switch (variant) {
    case Variant::HDCA_LI: {
      const double denom = 2.0 * (1.0 + cfg.alpha_bar) * (1.0 + cfg.alpha_bar);
      return f_k + (rho_sum - gamma_k) / denom * step_norm * step_norm;
    }
    case Variant::HDCA_NI:
      return f_k + (rho_sum - gamma_k) / 4.0 * step_norm * step_norm;
    default:
      return f_k;
  }
}

namespace {

bool subset(const std::vector<int>& a, const std::vector<int>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

double resolve_gamma(const DcaConfig& cfg) {
  const double rho_sum = 2.0 * cfg.rho;
  switch (cfg.variant) {
    case Variant::InDCA: {
      const double g = cfg.gamma.value_or(cfg.rho);
      if (g < 0.0 || g > rho_sum)
        throw std::invalid_argument("InDCA: gamma must lie in [0, rho_g+rho_h]");
      return g;
    }
    case Variant::HDCA_LI: {
      const double cap =
          rho_sum / (1.0 + (1.0 + cfg.alpha_bar) * (1.0 + cfg.alpha_bar));
      const double g = cfg.gamma.value_or(cap);
      if (g < 0.0 || g > cap * (1.0 + 1e-12))
        throw std::invalid_argument(
            "HDCA-LI: gamma must lie in [0, (rho_g+rho_h)/(1+(1+alpha_bar)^2)]");
      return g;
    }
    default:
      return 0.0;
  }
}

}  // namespace

RunResult run(const AeicpInstance& inst, const Formulation& form,
              const DcaConfig& cfg, const Vector& x0, const Vector& y0) {
  if (form.inst != &inst)
    throw std::invalid_argument("run: formulation built for a different instance");
  if (cfg.max_iter < 1) throw std::invalid_argument("run: max_iter must be >= 1");
  if (cfg.rho < 0.0) throw std::invalid_argument("run: rho must be >= 0");
  if (!(cfg.alpha_bar > 0.0) || !std::isfinite(cfg.alpha_bar))
    throw std::invalid_argument("run: alpha_bar must be positive and finite");
  if (cfg.beta_bar <= 0.0 || cfg.beta_bar >= 1.0)
    throw std::invalid_argument("run: beta_bar must lie in (0,1)");
  if (cfg.q < 0) throw std::invalid_argument("run: q must be >= 0");

  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  };

  const Variant variant = cfg.variant;
  const bool uses_linesearch = (variant == Variant::BDCAe ||
                                variant == Variant::BDCAa ||
                                variant == Variant::HDCA_LI) &&
                               !cfg.disable_linesearch;
  // Exact search needs the quartic line restriction, which DCP3's rational
  // objective does not admit; BDCAe and HDCA-LI degrade to Armijo there.
  const bool exact_search = (variant == Variant::BDCAe ||
                             variant == Variant::HDCA_LI) &&
                            form.kind != FormKind::DCP3;
  const double rho_sum = 2.0 * cfg.rho;
  const double delta = (1.0 - cfg.beta_bar * cfg.beta_bar) * rho_sum / 4.0;
  const double gamma_fixed = resolve_gamma(cfg);

  DcPoint X = initial_point(form, x0, y0);
  DcPoint X_prev = X;

  RunResult out;
  out.status = RunStatus::MaxIter;

  double f_cur = f_value(form, X);
  std::vector<double> f_hist{f_cur};     // ADCA window
  std::vector<double> ni_terms;          // HDCA-NI per-term energies
  std::vector<double> ni_gammas;
  ThetaState theta;
  int q_eff = cfg.q;

  out.trace.push_back(TraceRecord{0, f_cur, energy(variant, f_cur, 0.0, gamma_fixed, cfg),
                                  0.0, 0.0, gamma_fixed, false, elapsed()});

  // Constraint data is iteration-independent; build the skeleton once and
  // swap only the linear term.
  ConicQp qp = build_subproblem(form, DcPoint::zeros(form.kind, form.n()));

  int consecutive_failures = 0;

  for (int k = 0; k < cfg.max_iter; ++k) {
    const double step_prev = dist(X, X_prev);
    DcPoint diff = combine(X, 1.0, X_prev, -1.0);

    DcPoint lin_point = X;
    double gamma_k = 0.0;
    bool accepted = false;

    switch (variant) {
      case Variant::DCA:
      case Variant::BDCAe:
      case Variant::BDCAa:
        break;
      case Variant::InDCA:
      case Variant::HDCA_LI:
        gamma_k = (cfg.conservative_inertia && k < 2) ? 0.0 : gamma_fixed;
        break;
      case Variant::ADCA: {
        theta = theta_beta_next(theta, 1.0);  // Nesterov recursion, no clipping
        if (!cfg.disable_extrapolation && theta.beta > 0.0) {
          DcPoint v = combine(X, 1.0 + theta.beta, X_prev, -theta.beta);
          const int lo = std::max(0, k - q_eff);
          double wmax = f_hist[lo];
          for (int t = lo + 1; t <= k; ++t) wmax = std::max(wmax, f_hist[t]);
          const double fv = f_value(form, v);
          if (fv <= wmax) {
            lin_point = std::move(v);
            accepted = true;
          }
        }
        break;
      }
      case Variant::HDCA_NI: {
        theta = theta_beta_next(theta, cfg.beta_bar);
        if (cfg.ni_switch_q0 && theta.beta >= cfg.beta_bar) q_eff = 0;
        gamma_k = (cfg.conservative_inertia && k < 2)
                      ? 0.0
                      : gamma_hdca_ni(theta.beta, rho_sum, delta);
        const double term_k =
            f_cur + (rho_sum - gamma_k) / 4.0 * step_prev * step_prev;
        ni_terms.push_back(term_k);
        ni_gammas.push_back(gamma_k);
        out.trace[k].E = term_k;       // per-term energy of iterate x^k
        out.trace[k].gamma_k = gamma_k;
        if (!cfg.disable_extrapolation && theta.beta > 0.0) {
          DcPoint v = combine(X, 1.0 + theta.beta, X_prev, -theta.beta);
          const int lo = std::max(0, k - q_eff);
          double wmax = ni_terms[lo];
          for (int t = lo + 1; t <= k; ++t) wmax = std::max(wmax, ni_terms[t]);
          if (is_feasible(form, v, 1e-9)) {
            const double ev =
                f_value(form, v) + (rho_sum - gamma_k) / 4.0 * step_prev * step_prev;
            if (ev <= wmax) {
              lin_point = std::move(v);
              accepted = true;
            }
          }
        }
        break;
      }
    }

    // Linearization vector xi = rho*V + grad_H(V) + gamma*(X - X_prev).
    DcPoint xi = grad_H(form, lin_point);
    add_scaled(xi, cfg.rho, lin_point);
    if (gamma_k != 0.0) add_scaled(xi, gamma_k, diff);

    set_linearization(qp, form, xi);
    SolverResult sub = solve(qp, cfg.subproblem_tol, cfg.subproblem_max_iter);
    out.subproblem_iterations += sub.iterations;
    if (sub.status != SolveStatus::Optimal) {
      if (++consecutive_failures >= 2) {
        out.status = RunStatus::SubproblemFailure;
        break;
      }
    } else {
      consecutive_failures = 0;
    }

    DcPoint Z = DcPoint::zeros(form.kind, form.n());
    std::copy(sub.v.begin(), sub.v.begin() + qp.iterate_dim, Z.flat.begin());

    DcPoint X_next = Z;
    const double d_norm = dist(Z, X);
    if (uses_linesearch && d_norm > 0.0) {
      DcPoint D = combine(Z, 1.0, X, -1.0);
      std::vector<int> act_z = active_set(form, Z);
      std::vector<int> act_x = active_set(form, X);
      if (subset(act_z, act_x) && dot(grad_f(form, Z), D) < 0.0) {
        const double cap = std::min(max_feasible_step(form, Z, D), cfg.alpha_bar);
        if (exact_search) {
          X_next = exact_linesearch(form, Z, D, cap).point;
        } else {
          X_next = armijo(form, Z, D, cap, cfg.armijo);
        }
      }
    }

    const double f_next = f_value(form, X_next);
    const double step = dist(X_next, X);
    X_prev = std::move(X);
    X = std::move(X_next);

    f_hist.push_back(f_next);
    out.trace.push_back(TraceRecord{k + 1, f_next,
                                    energy(variant, f_next, step, gamma_k, cfg),
                                    step, d_norm, gamma_k, accepted, elapsed()});

    const bool both_finite = std::isfinite(f_next) && std::isfinite(f_cur);
    if (cfg.eps_stop > 0.0 && both_finite &&
        std::fabs(f_next - f_cur) <= (1.0 + std::fabs(f_next)) * cfg.eps_stop) {
      f_cur = f_next;
      out.status = RunStatus::Converged;
      break;
    }
    f_cur = f_next;
  }

  // HDCA-NI: the last iterate's per-term energy needs the gamma the next
  // iteration would have chosen; extend the recursion once to fill it in.
  if (variant == Variant::HDCA_NI && !out.trace.empty()) {
    const int last = static_cast<int>(out.trace.size()) - 1;
    if (last >= static_cast<int>(ni_terms.size())) {
      const ThetaState th = theta_beta_next(theta, cfg.beta_bar);
      const double g =
          (cfg.conservative_inertia && last < 2)
              ? 0.0
              : gamma_hdca_ni(th.beta, rho_sum, delta);
      const double sn = out.trace[last].step_norm;
      out.trace[last].gamma_k = g;
      out.trace[last].E = out.trace[last].f + (rho_sum - g) / 4.0 * sn * sn;
    }
  }

  out.final_point = X;
  out.report = feasibility_report(inst, Vector(X.x().begin(), X.x().end()), f_cur);
  return out;
}

}  // namespace aeicp
