#include "wpbc/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wpbc {

namespace {

constexpr double kLn2 = 0.6931471805599453;
constexpr double kTimeEps = 1e-12;  // a slot below this is treated as unallocated
constexpr double kCoefEps = 1e-300;

double log2_1p(double x) { return std::log1p(x) / kLn2; }

/// Intersects `iv` with { t >= 0 : k * t in [lo_q, hi_q] }. Returns false when
/// the window is empty (k == 0 with a positive lower demand).
bool intersect_linear_window(Interval& iv, double k, double lo_q, double hi_q) {
  if (k > kCoefEps) {
    iv.lo = std::max(iv.lo, lo_q / k);
    iv.hi = std::min(iv.hi, hi_q / k);
    return true;
  }
  return lo_q <= 1e-15;  // quantity is identically zero
}

struct LogTerm {
  double coef;   // multiplies log2(1 + slope * t)
  double slope;
};

}  // namespace

DevicePins DevicePins::none(const Network& net) {
  DevicePins p;
  p.theta.assign(net.pwpds.size(), false);
  p.tau.assign(net.hwpds.size(), false);
  return p;
}

bool DevicePins::any() const {
  return std::any_of(theta.begin(), theta.end(), [](bool b) { return b; }) ||
         std::any_of(tau.begin(), tau.end(), [](bool b) { return b; });
}

void Interval::clamp_to(double a, double b) {
  lo = std::max(lo, a);
  hi = std::min(hi, b);
}

std::optional<Interval> price_interval(const Network& net, const CostModel& cost, double beta,
                                       const Schedule& sched, const ScheduleMask& mask,
                                       const DevicePins& pins) {
  const double two_a = 2.0 * cost.a_m;
  Interval t{0.0, two_a * cost.p_s_max};  // t = p_l - b_m

  if (mask.active) {
    auto harvest_windows = [&](const NetworkDevice& nd, double window, double active_time) {
      const double k_energy = nd.dev.harvest_efficiency * nd.coef.g_bd * window / two_a;
      if (!intersect_linear_window(t, k_energy, nd.dev.e_min, nd.dev.e_max)) return false;
      if (active_time > kTimeEps) {
        if (!intersect_linear_window(t, k_energy / active_time, nd.dev.p_tx_min,
                                     nd.dev.p_tx_max)) {
          return false;
        }
      }
      return true;
    };
    for (std::size_t a = 0; a < net.awpds.size(); ++a) {
      if (!harvest_windows(net.awpds[a], beta, sched.nu[a])) return std::nullopt;
    }
    for (std::size_t h = 0; h < net.hwpds.size(); ++h) {
      if (!harvest_windows(net.hwpds[h], beta - sched.tau[h], sched.mu[h])) return std::nullopt;
    }
  }
  if (mask.backscatter) {
    auto snr_floor = [&](const NetworkDevice& nd, double bs_time, bool pinned) {
      if (pinned || bs_time <= kTimeEps) return;
      t.lo = std::max(t.lo, two_a * nd.dev.snr_min / *nd.coef.kappa);
    };
    for (std::size_t p = 0; p < net.pwpds.size(); ++p) {
      snr_floor(net.pwpds[p], sched.theta[p], pins.theta[p]);
    }
    for (std::size_t h = 0; h < net.hwpds.size(); ++h) {
      snr_floor(net.hwpds[h], sched.tau[h], pins.tau[h]);
    }
  }
  if (!t.valid()) return std::nullopt;
  return Interval{cost.b_m + t.lo, cost.b_m + t.hi};
}

std::optional<Interval> beta_interval(const Network& net, const CostModel& cost, double p_s,
                                      const Schedule& sched, const ScheduleMask& mask) {
  (void)cost;
  Interval iv{sched.backscatter_total(), 1.0 - sched.active_total()};
  iv.clamp_to(0.0, 1.0);

  if (mask.active) {
    // Windows are on the harvest span: beta for AWPDs, beta - tau_h for HWPDs.
    auto harvest_windows = [&](const NetworkDevice& nd, double shift, double active_time) {
      const double k = nd.dev.harvest_efficiency * nd.coef.g_bd * p_s;
      Interval span{iv.lo - shift, iv.hi - shift};
      if (!intersect_linear_window(span, k, nd.dev.e_min, nd.dev.e_max)) return false;
      if (active_time > kTimeEps) {
        if (!intersect_linear_window(span, k / active_time, nd.dev.p_tx_min, nd.dev.p_tx_max)) {
          return false;
        }
      }
      iv.lo = std::max(iv.lo, span.lo + shift);
      iv.hi = std::min(iv.hi, span.hi + shift);
      return true;
    };
    for (std::size_t a = 0; a < net.awpds.size(); ++a) {
      if (!harvest_windows(net.awpds[a], 0.0, sched.nu[a])) return std::nullopt;
    }
    for (std::size_t h = 0; h < net.hwpds.size(); ++h) {
      if (!harvest_windows(net.hwpds[h], sched.tau[h], sched.mu[h])) return std::nullopt;
    }
  }
  if (!iv.valid()) return std::nullopt;
  return iv;
}

std::function<double(double)> build_price_objective(const Network& net, const CostModel& cost,
                                                    double beta_prev,
                                                    const Schedule& sched_prev) {
  const double two_a = 2.0 * cost.a_m;
  const double p_r = cost.price_per_bit;
  std::vector<LogTerm> terms;

  for (std::size_t p = 0; p < net.pwpds.size(); ++p) {
    if (sched_prev.theta[p] > kTimeEps) {
      terms.push_back({p_r * net.env.bandwidth_backscatter * sched_prev.theta[p],
                       *net.pwpds[p].coef.kappa / two_a});
    }
  }
  for (std::size_t a = 0; a < net.awpds.size(); ++a) {
    const double nu = sched_prev.nu[a];
    if (nu > kTimeEps) {
      terms.push_back({p_r * net.env.bandwidth_active * nu,
                       *net.awpds[a].coef.delta * beta_prev / (two_a * nu)});
    }
  }
  for (std::size_t h = 0; h < net.hwpds.size(); ++h) {
    const auto& nd = net.hwpds[h];
    const double tau = sched_prev.tau[h], mu = sched_prev.mu[h];
    if (tau > kTimeEps) {
      terms.push_back({p_r * net.env.bandwidth_backscatter * tau, *nd.coef.kappa / two_a});
    }
    if (mu > kTimeEps) {
      terms.push_back({p_r * net.env.bandwidth_active * mu,
                       *nd.coef.delta * (beta_prev - tau) / (two_a * mu)});
    }
  }
  const double b_m = cost.b_m;
  return [terms = std::move(terms), b_m, two_a, beta_prev](double p_l) {
    double g = -beta_prev * p_l * (p_l - b_m) / two_a;
    for (const LogTerm& t : terms) g += t.coef * log2_1p(t.slope * (p_l - b_m));
    return g;
  };
}

std::function<double(double)> build_beta_objective(const Network& net, const CostModel& cost,
                                                   double p_l, const Schedule& sched_prev) {
  const double two_a = 2.0 * cost.a_m;
  const double p_r = cost.price_per_bit;
  const double t = std::max(0.0, p_l - cost.b_m);

  double constant = 0.0;  // backscatter revenue, fixed at this block
  for (std::size_t p = 0; p < net.pwpds.size(); ++p) {
    constant += p_r * net.env.bandwidth_backscatter * sched_prev.theta[p] *
                log2_1p(*net.pwpds[p].coef.kappa * t / two_a);
  }
  struct ShiftedLog {
    double coef, slope, shift;
  };
  std::vector<ShiftedLog> terms;
  for (std::size_t a = 0; a < net.awpds.size(); ++a) {
    const double nu = sched_prev.nu[a];
    if (nu > kTimeEps) {
      terms.push_back({p_r * net.env.bandwidth_active * nu,
                       *net.awpds[a].coef.delta * t / (two_a * nu), 0.0});
    }
  }
  for (std::size_t h = 0; h < net.hwpds.size(); ++h) {
    const auto& nd = net.hwpds[h];
    const double tau = sched_prev.tau[h], mu = sched_prev.mu[h];
    constant += p_r * net.env.bandwidth_backscatter * tau * log2_1p(*nd.coef.kappa * t / two_a);
    if (mu > kTimeEps) {
      terms.push_back({p_r * net.env.bandwidth_active * mu, *nd.coef.delta * t / (two_a * mu),
                       tau});
    }
  }
  const double cost_rate = p_l * t / two_a;  // c6_hat
  return [terms = std::move(terms), constant, cost_rate](double beta) {
    double g = constant - cost_rate * beta;
    for (const ShiftedLog& s : terms) g += s.coef * log2_1p(s.slope * (beta - s.shift));
    return g;
  };
}

Schedule ScheduleProblem::to_schedule(const Eigen::VectorXd& x) const {
  Schedule s = Schedule::zeros(nu_idx.size(), theta_idx.size(), tau_idx.size());
  auto fill = [&](const std::vector<int>& idx, std::vector<double>& out) {
    for (std::size_t i = 0; i < idx.size(); ++i) {
      if (idx[i] >= 0) out[i] = std::max(0.0, x[idx[i]]);
    }
  };
  fill(theta_idx, s.theta);
  fill(nu_idx, s.nu);
  fill(tau_idx, s.tau);
  fill(mu_idx, s.mu);
  return s;
}

Eigen::VectorXd ScheduleProblem::from_schedule(const Schedule& s) const {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(dim);
  auto fill = [&](const std::vector<int>& idx, const std::vector<double>& in) {
    for (std::size_t i = 0; i < idx.size(); ++i) {
      if (idx[i] >= 0) x[idx[i]] = in[i];
    }
  };
  fill(theta_idx, s.theta);
  fill(nu_idx, s.nu);
  fill(tau_idx, s.tau);
  fill(mu_idx, s.mu);
  return x;
}

ScheduleProblem build_schedule_problem(const Network& net, double price_per_bit, double p_s,
                                       double beta, const ScheduleMask& mask,
                                       const DevicePins& pins, double cost_constant) {
  const std::size_t P = net.pwpds.size(), A = net.awpds.size(), H = net.hwpds.size();
  ScheduleProblem prob;
  prob.theta_idx.assign(P, -1);
  prob.nu_idx.assign(A, -1);
  prob.tau_idx.assign(H, -1);
  prob.mu_idx.assign(H, -1);

  int next = 0;
  if (mask.backscatter && p_s > kTimeEps) {
    // Tolerate rounding at the decode threshold: optimal prices often sit
    // exactly on the corner where kappa * p_s == snr_min, and dropping the
    // device there would discard its entire rate.
    auto decodes = [p_s](const NetworkDevice& nd) {
      return *nd.coef.kappa * p_s >= nd.dev.snr_min * (1.0 - 1e-9);
    };
    for (std::size_t p = 0; p < P; ++p) {
      if (!pins.theta[p] && decodes(net.pwpds[p])) prob.theta_idx[p] = next++;
    }
    for (std::size_t h = 0; h < H; ++h) {
      if (!pins.tau[h] && decodes(net.hwpds[h])) prob.tau_idx[h] = next++;
    }
  }
  if (mask.active && p_s > kTimeEps) {
    for (std::size_t a = 0; a < A; ++a) prob.nu_idx[a] = next++;
    for (std::size_t h = 0; h < H; ++h) prob.mu_idx[h] = next++;
  }
  prob.dim = next;
  prob.constraints = LinearConstraintSet(prob.dim);
  if (prob.dim == 0) {
    prob.objective = ConcaveObjective{
        [cost_constant](const Eigen::VectorXd&) { return cost_constant; },
        [](const Eigen::VectorXd& x) { return Eigen::VectorXd::Zero(x.size()).eval(); },
        [](const Eigen::VectorXd& x) {
          return Eigen::MatrixXd::Zero(x.size(), x.size()).eval();
        }};
    return prob;
  }

  auto& cons = prob.constraints;
  for (Eigen::Index i = 0; i < prob.dim; ++i) cons.add_single(i, -1.0, 0.0);  // x >= 0

  {  // emit window: sum theta + sum tau <= beta
    Eigen::VectorXd row = Eigen::VectorXd::Zero(prob.dim);
    bool nonempty = false;
    for (int i : prob.theta_idx) if (i >= 0) { row[i] = 1.0; nonempty = true; }
    for (int i : prob.tau_idx) if (i >= 0) { row[i] = 1.0; nonempty = true; }
    if (nonempty) cons.add(row, beta);
  }
  {  // sleep window: sum nu + sum mu <= 1 - beta
    Eigen::VectorXd row = Eigen::VectorXd::Zero(prob.dim);
    bool nonempty = false;
    for (int i : prob.nu_idx) if (i >= 0) { row[i] = 1.0; nonempty = true; }
    for (int i : prob.mu_idx) if (i >= 0) { row[i] = 1.0; nonempty = true; }
    if (nonempty) cons.add(row, 1.0 - beta);
  }
  for (std::size_t h = 0; h < H; ++h) {
    if (prob.tau_idx[h] >= 0) cons.add_single(prob.tau_idx[h], 1.0, beta);  // tau_h <= beta
  }

  if (mask.active && p_s > kTimeEps) {
    for (std::size_t a = 0; a < A; ++a) {
      const auto& nd = net.awpds[a];
      const double energy = nd.dev.harvest_efficiency * nd.coef.g_bd * beta * p_s;
      // Harvested energy is schedule-independent for AWPDs; the window is
      // verified here and the power bounds become linear rows in nu.
      if (energy < nd.dev.e_min - 1e-12 || energy > nd.dev.e_max + 1e-12) {
        throw FeasibilityError("AWPD harvested energy outside [e_min, e_max] at fixed (p_l, beta)");
      }
      const int i = prob.nu_idx[a];
      cons.add_single(i, nd.dev.p_tx_min, energy);   // p_tx >= p_tx_min
      cons.add_single(i, -nd.dev.p_tx_max, -energy); // p_tx <= p_tx_max, forces nu >= E/p_max
    }
    for (std::size_t h = 0; h < H; ++h) {
      const auto& nd = net.hwpds[h];
      const double k = nd.dev.harvest_efficiency * nd.coef.g_bd * p_s;  // dE/d(window)
      const int it = prob.tau_idx[h];
      const int im = prob.mu_idx[h];
      // E_h = k (beta - tau_h); rows stay linear whether tau_h is free or pinned at 0.
      const double tau_fixed = 0.0;
      const double e_at_tau0 = k * (beta - tau_fixed);
      Eigen::VectorXd row;
      // p_tx_min * mu <= E_h
      row = Eigen::VectorXd::Zero(prob.dim);
      row[im] = nd.dev.p_tx_min;
      if (it >= 0) row[it] = k;
      cons.add(row, e_at_tau0);
      // E_h <= p_tx_max * mu
      row = Eigen::VectorXd::Zero(prob.dim);
      row[im] = -nd.dev.p_tx_max;
      if (it >= 0) row[it] = -k;
      cons.add(row, -e_at_tau0);
      // e_min <= E_h <= e_max
      if (it >= 0) {
        cons.add_single(it, k, k * beta - nd.dev.e_min);
        cons.add_single(it, -k, nd.dev.e_max - k * beta);
      } else if (e_at_tau0 < nd.dev.e_min - 1e-12 || e_at_tau0 > nd.dev.e_max + 1e-12) {
        throw FeasibilityError("HWPD harvested energy outside [e_min, e_max] at fixed (p_l, beta)");
      }
    }
  }

  // Objective pieces. Linear rates for backscatter slots; x*log2(1+c/x)
  // kernels for active slots; the HWPD (tau, mu) pair couples through the
  // shrinking harvest window.
  struct LinTerm { int idx; double coef; };
  struct XlogTerm { int idx; double k; double c; };           // k * x * log2(1 + c/x)
  struct PairTerm { int it, im; double k, a, w; };            // k * mu * log2(1 + (a - w tau)/mu)
  std::vector<LinTerm> lin;
  std::vector<XlogTerm> xlog;
  std::vector<PairTerm> pair;

  const double rb = price_per_bit * net.env.bandwidth_backscatter;
  const double ra = price_per_bit * net.env.bandwidth_active;
  for (std::size_t p = 0; p < P; ++p) {
    if (prob.theta_idx[p] >= 0) {
      lin.push_back({prob.theta_idx[p], rb * log2_1p(*net.pwpds[p].coef.kappa * p_s)});
    }
  }
  for (std::size_t a = 0; a < A; ++a) {
    if (prob.nu_idx[a] >= 0) {
      xlog.push_back({prob.nu_idx[a], ra, *net.awpds[a].coef.delta * beta * p_s});
    }
  }
  for (std::size_t h = 0; h < H; ++h) {
    const auto& nd = net.hwpds[h];
    const int it = prob.tau_idx[h];
    const int im = prob.mu_idx[h];
    if (it >= 0) lin.push_back({it, rb * log2_1p(*nd.coef.kappa * p_s)});
    if (im >= 0) {
      const double w = *nd.coef.delta * p_s;
      if (it >= 0) {
        pair.push_back({it, im, ra, w * beta, w});
      } else {
        xlog.push_back({im, ra, w * beta});
      }
    }
  }

  prob.objective.value = [lin, xlog, pair, cost_constant](const Eigen::VectorXd& x) {
    double v = cost_constant;
    for (const auto& t : lin) v += t.coef * x[t.idx];
    for (const auto& t : xlog) v += t.k * xlog_term(std::max(x[t.idx], 0.0), t.c);
    for (const auto& t : pair) {
      const double u = std::max(t.a - t.w * x[t.it], 0.0);
      v += t.k * xlog_term(std::max(x[t.im], 0.0), u);
    }
    return v;
  };
  prob.objective.gradient = [lin, xlog, pair](const Eigen::VectorXd& x) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(x.size());
    for (const auto& t : lin) g[t.idx] += t.coef;
    for (const auto& t : xlog) g[t.idx] += t.k * xlog_term_dx(x[t.idx], t.c);
    for (const auto& t : pair) {
      const double mu = x[t.im];
      const double u = t.a - t.w * x[t.it];
      g[t.im] += t.k / kLn2 * (std::log1p(u / mu) - u / (mu + u));
      g[t.it] += -t.w * t.k / kLn2 * mu / (mu + u);
    }
    return g;
  };
  prob.objective.hessian = [xlog, pair](const Eigen::VectorXd& x) {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(x.size(), x.size());
    for (const auto& t : xlog) {
      const double v = x[t.idx];
      h(t.idx, t.idx) += -t.k * t.c * t.c / (kLn2 * v * (v + t.c) * (v + t.c));
    }
    for (const auto& t : pair) {
      const double mu = x[t.im];
      const double u = t.a - t.w * x[t.it];
      const double den = (mu + u) * (mu + u);
      h(t.it, t.it) += -t.k * t.w * t.w / kLn2 * mu / den;
      h(t.im, t.im) += -t.k / kLn2 * u * u / (mu * den);
      const double cross = -t.k * t.w / kLn2 * u / den;
      h(t.it, t.im) += cross;
      h(t.im, t.it) += cross;
    }
    return h;
  };
  return prob;
}

std::optional<Schedule> solve_schedule_for_power(const Network& net, double price_per_bit,
                                                 double p_s, double beta,
                                                 const ScheduleMask& mask, const DevicePins& pins,
                                                 const Schedule& incumbent) {
  if (p_s <= kTimeEps) return incumbent;  // all rates vanish; nothing to allocate
  ScheduleProblem prob;
  try {
    prob = build_schedule_problem(net, price_per_bit, p_s, beta, mask, pins, 0.0);
  } catch (const FeasibilityError&) {
    return std::nullopt;
  }
  if (prob.dim == 0) return Schedule::zeros(net.awpds.size(), net.pwpds.size(), net.hwpds.size());

  Eigen::VectorXd start = prob.from_schedule(incumbent);
  if (!prob.constraints.feasible(start, 1e-9)) {
    auto interior = find_interior_point(prob.constraints, start);
    if (!interior) return std::nullopt;
    start = *interior;
  }
  Eigen::VectorXd x;
  try {
    x = concave_max_linear(prob.objective, prob.constraints, start);
  } catch (const FeasibilityError&) {
    return std::nullopt;
  }
  // Guard against a numerically worse point than the incumbent.
  if (prob.constraints.feasible(prob.from_schedule(incumbent), 1e-12) &&
      prob.objective.value(prob.from_schedule(incumbent)) > prob.objective.value(x)) {
    return incumbent;
  }
  return prob.to_schedule(x);
}

std::optional<Schedule> solve_schedule_step(double p_l, double beta, const Network& net,
                                            const CostModel& cost, const ScheduleMask& mask,
                                            const DevicePins& pins, const Schedule& incumbent) {
  const double p_s = follower_best_response(p_l, cost).power;
  return solve_schedule_for_power(net, cost.price_per_bit, p_s, beta, mask, pins, incumbent);
}

namespace {

/// Golden-section maximization with the flat-objective tie broken toward the
/// lower bound and a monotonicity safeguard against the incumbent.
double maximize_scalar(const std::function<double(double)>& f, const Interval& iv,
                       double incumbent, double tol) {
  // Interval::valid() tolerates hi < lo by up to 1e-15; collapse to a point.
  ScalarResult res = golden_section_max({f, iv.lo, std::max(iv.lo, iv.hi), tol});
  double x = res.x, v = res.value;
  const double flo = f(iv.lo);
  if (flo >= v - 1e-12 * (1.0 + std::abs(v))) {
    x = iv.lo;
    v = flo;
  }
  if (incumbent >= iv.lo - 1e-12 && incumbent <= iv.hi + 1e-12) {
    const double fi = f(std::clamp(incumbent, iv.lo, iv.hi));
    if (fi > v) return std::clamp(incumbent, iv.lo, iv.hi);
  }
  return x;
}

}  // namespace

std::optional<double> solve_price_step(const Network& net, const CostModel& cost, double p_l_prev,
                                       double beta_prev, const Schedule& sched_prev,
                                       const ScheduleMask& mask, const DevicePins& pins,
                                       const SolveOptions& opts) {
  auto iv = price_interval(net, cost, beta_prev, sched_prev, mask, pins);
  if (!iv) return std::nullopt;
  auto g = build_price_objective(net, cost, beta_prev, sched_prev);
  return maximize_scalar(g, *iv, p_l_prev, opts.scalar_tol);
}

std::optional<double> solve_beta_step(const Network& net, const CostModel& cost, double p_l,
                                      double beta_prev, const Schedule& sched_prev,
                                      const ScheduleMask& mask, const SolveOptions& opts) {
  auto iv = beta_interval(net, cost, follower_best_response(p_l, cost).power, sched_prev, mask);
  if (!iv) return std::nullopt;
  auto g = build_beta_objective(net, cost, p_l, sched_prev);
  return maximize_scalar(g, *iv, beta_prev, opts.scalar_tol);
}

Eigen::Vector2d q_from_price_beta(double p_l, double beta, const CostModel& cost) {
  const double t = p_l - cost.b_m;
  return {0.5 * t * (1.0 + beta), 0.5 * t * (1.0 - beta)};
}

std::pair<double, double> price_beta_from_q(const Eigen::Vector2d& q, double fallback_beta,
                                            const CostModel& cost) {
  const double sum = q[0] + q[1];
  if (sum <= 1e-15) return {cost.b_m, fallback_beta};  // no-trade corner
  return {cost.b_m + sum, (q[0] - q[1]) / sum};
}

std::optional<JointProblem> build_joint_subproblem(double p_l_prev, double beta_prev,
                                                   const Schedule& sched_prev, const Network& net,
                                                   const CostModel& cost, const ScheduleMask& mask,
                                                   const DevicePins& pins,
                                                   const SolveOptions& opts) {
  JointProblem jp;
  jp.t_bs = sched_prev.backscatter_total();
  jp.t_at = sched_prev.active_total();
  if (jp.t_bs + jp.t_at > 1.0 + 1e-9) {
    throw FeasibilityError("joint subproblem: incumbent schedule exceeds the unit frame");
  }

  const double two_a = 2.0 * cost.a_m;
  LinearConstraintSet cons(2);
  auto row2 = [&](double c1, double c2, double b) {
    Eigen::VectorXd r(2);
    r << c1, c2;
    cons.add(r, b);
  };
  row2(0.0, -1.0, 0.0);                 // q2 >= 0
  row2(-1.0, 1.0, 0.0);                 // q2 <= q1
  row2(1.0, 1.0, two_a * cost.p_s_max); // q1 + q2 <= 2 a_m P_S^max
  // Fractional time rows cleared of the (q1 + q2) denominator.
  row2(-(1.0 - jp.t_bs), 1.0 + jp.t_bs, 0.0);   // beta >= T_bs
  row2(jp.t_at, -(2.0 - jp.t_at), 0.0);         // 1 - beta >= T_at

  if (mask.active) {
    auto harvest_rows = [&](const NetworkDevice& nd, double tau, double active_time) {
      const double w = nd.dev.harvest_efficiency * nd.coef.g_bd / two_a;
      const double c1 = w * (1.0 - tau), c2 = -w * (1.0 + tau);  // E = c1 q1 + c2 q2
      row2(-c1, -c2, -nd.dev.e_min);
      row2(c1, c2, nd.dev.e_max);
      if (active_time > kTimeEps) {
        row2(-c1 / active_time, -c2 / active_time, -nd.dev.p_tx_min);
        row2(c1 / active_time, c2 / active_time, nd.dev.p_tx_max);
      }
    };
    for (std::size_t a = 0; a < net.awpds.size(); ++a) {
      harvest_rows(net.awpds[a], 0.0, sched_prev.nu[a]);
    }
    for (std::size_t h = 0; h < net.hwpds.size(); ++h) {
      harvest_rows(net.hwpds[h], sched_prev.tau[h], sched_prev.mu[h]);
    }
  }
  if (mask.backscatter) {
    auto snr_row = [&](const NetworkDevice& nd, double bs_time, bool pinned) {
      if (pinned || bs_time <= kTimeEps) return;
      const double e = *nd.coef.kappa / two_a;
      row2(-e, -e, -nd.dev.snr_min);
    };
    for (std::size_t p = 0; p < net.pwpds.size(); ++p) {
      snr_row(net.pwpds[p], sched_prev.theta[p], pins.theta[p]);
    }
    for (std::size_t h = 0; h < net.hwpds.size(); ++h) {
      snr_row(net.hwpds[h], sched_prev.tau[h], pins.tau[h]);
    }
  }

  // Q_ccav: log terms linear in q plus the concave part of the cost.
  struct QLog { double coef, a1, a2; };
  std::vector<QLog> logs;
  const double rb = cost.price_per_bit * net.env.bandwidth_backscatter;
  const double ra = cost.price_per_bit * net.env.bandwidth_active;
  for (std::size_t p = 0; p < net.pwpds.size(); ++p) {
    const double theta = sched_prev.theta[p];
    if (theta > kTimeEps) {
      const double e = *net.pwpds[p].coef.kappa / two_a;
      logs.push_back({rb * theta, e, e});
    }
  }
  for (std::size_t a = 0; a < net.awpds.size(); ++a) {
    const double nu = sched_prev.nu[a];
    if (nu > kTimeEps) {
      const double e = *net.awpds[a].coef.delta / (two_a * nu);
      logs.push_back({ra * nu, e, -e});
    }
  }
  for (std::size_t h = 0; h < net.hwpds.size(); ++h) {
    const auto& nd = net.hwpds[h];
    const double tau = sched_prev.tau[h], mu = sched_prev.mu[h];
    if (tau > kTimeEps) {
      const double e = *nd.coef.kappa / two_a;
      logs.push_back({rb * tau, e, e});
    }
    if (mu > kTimeEps) {
      const double e = *nd.coef.delta / (two_a * mu);
      logs.push_back({ra * mu, e * (1.0 - tau), -e * (1.0 + tau)});
    }
  }
  const double b_m = cost.b_m;

  if (jp.t_bs + jp.t_at >= 1.0 - 1e-9) {
    // beta is pinned at its incumbent value; optimize along q = slice * s.
    jp.pinned_beta = true;
    jp.slice = Eigen::Vector2d(0.5 * (1.0 + beta_prev), 0.5 * (1.0 - beta_prev));
    LinearConstraintSet reduced(1);
    for (std::size_t i = 0; i < cons.size(); ++i) {
      // The fractional-time rows cancel along the slice up to rounding of
      // the incumbent totals; genuine coefficients are far larger than 1e-9.
      const double c = cons.rows[i].dot(jp.slice);
      if (std::abs(c) > 1e-9) {
        reduced.add_single(0, c, cons.bounds[i]);
      } else if (cons.bounds[i] < -1e-12) {
        throw FeasibilityError("joint subproblem: slice violates a pinned constraint");
      }
    }
    struct SliceLog { double coef, slope; };
    std::vector<SliceLog> slogs;
    slogs.reserve(logs.size());
    for (const auto& t : logs) slogs.push_back({t.coef, t.a1 * jp.slice[0] + t.a2 * jp.slice[1]});
    // Quadratic cost along the slice: -(beta s^2 + b_m beta s) / (2 a_m),
    // concave, so the convex part is identically zero.
    const double qa = beta_prev / two_a;
    jp.dc.concave.value = [slogs, qa, b_m](const Eigen::VectorXd& x) {
      const double s = x[0];
      double v = -qa * (s * s + b_m * s);
      for (const auto& t : slogs) v += t.coef * log2_1p(t.slope * s);
      return v;
    };
    jp.dc.concave.gradient = [slogs, qa, b_m](const Eigen::VectorXd& x) {
      const double s = x[0];
      Eigen::VectorXd g(1);
      g[0] = -qa * (2.0 * s + b_m);
      for (const auto& t : slogs) g[0] += t.coef * t.slope / (kLn2 * (1.0 + t.slope * s));
      return g;
    };
    jp.dc.concave.hessian = [slogs, qa](const Eigen::VectorXd& x) {
      const double s = x[0];
      Eigen::MatrixXd h(1, 1);
      h(0, 0) = -2.0 * qa;
      for (const auto& t : slogs) {
        const double arg = 1.0 + t.slope * s;
        h(0, 0) -= t.coef * t.slope * t.slope / (kLn2 * arg * arg);
      }
      return h;
    };
    jp.dc.convex_value = [](const Eigen::VectorXd&) { return 0.0; };
    jp.dc.convex_gradient = [](const Eigen::VectorXd&) {
      return Eigen::VectorXd::Zero(1).eval();
    };
    jp.dc.constraints = std::move(reduced);
    Eigen::VectorXd start(1);
    start[0] = std::max(0.0, p_l_prev - cost.b_m);
    jp.dc.start = start;
    jp.dc.tolerance = opts.tol_cccp;
    return jp;
  }

  jp.dc.concave.value = [logs, b_m, two_a](const Eigen::VectorXd& q) {
    double v = -(q[0] * q[0] + b_m * q[0]) / two_a;
    for (const auto& t : logs) v += t.coef * log2_1p(t.a1 * q[0] + t.a2 * q[1]);
    return v;
  };
  jp.dc.concave.gradient = [logs, b_m, two_a](const Eigen::VectorXd& q) {
    Eigen::VectorXd g(2);
    g << -(2.0 * q[0] + b_m) / two_a, 0.0;
    for (const auto& t : logs) {
      const double den = kLn2 * (1.0 + t.a1 * q[0] + t.a2 * q[1]);
      g[0] += t.coef * t.a1 / den;
      g[1] += t.coef * t.a2 / den;
    }
    return g;
  };
  jp.dc.concave.hessian = [logs, two_a](const Eigen::VectorXd& q) {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2, 2);
    h(0, 0) = -2.0 / two_a;
    for (const auto& t : logs) {
      const double arg = 1.0 + t.a1 * q[0] + t.a2 * q[1];
      const double s = -t.coef / (kLn2 * arg * arg);
      h(0, 0) += s * t.a1 * t.a1;
      h(0, 1) += s * t.a1 * t.a2;
      h(1, 0) += s * t.a1 * t.a2;
      h(1, 1) += s * t.a2 * t.a2;
    }
    return h;
  };
  jp.dc.convex_value = [b_m, two_a](const Eigen::VectorXd& q) {
    return (q[1] * q[1] + b_m * q[1]) / two_a;
  };
  jp.dc.convex_gradient = [b_m, two_a](const Eigen::VectorXd& q) {
    Eigen::VectorXd g(2);
    g << 0.0, (2.0 * q[1] + b_m) / two_a;
    return g;
  };
  jp.dc.constraints = std::move(cons);
  jp.dc.start = q_from_price_beta(p_l_prev, beta_prev, cost);
  jp.dc.tolerance = opts.tol_cccp;
  return jp;
}

namespace {

double utility_of(const Network& net, const CostModel& cost, const LeaderStrategy& s) {
  return leader_utility(s, net, cost, follower_best_response(s.price, cost).power);
}

/// Stationarity residual of grad Q_hat against the active constraint rows
/// (least squares multipliers, negative ones clamped to zero).
double kkt_residual(const DcProblem& dc, const Eigen::VectorXd& v) {
  Eigen::VectorXd g = dc.concave.gradient(v) + dc.convex_gradient(v);
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < dc.constraints.size(); ++i) {
    const double scale = 1.0 + std::abs(dc.constraints.bounds[i]);
    if (dc.constraints.slack(i, v) <= 1e-6 * scale) active.push_back(i);
  }
  const double gnorm = std::max(1.0, g.lpNorm<Eigen::Infinity>());
  if (active.empty()) return g.lpNorm<Eigen::Infinity>() / gnorm;

  Eigen::MatrixXd at(v.size(), active.size());
  for (std::size_t j = 0; j < active.size(); ++j) at.col(j) = dc.constraints.rows[active[j]];
  // KKT for maximization over a.x <= b: grad = +sum y_i a_i with y >= 0
  // (the objective can only increase by leaving the feasible set).
  Eigen::VectorXd y = at.colPivHouseholderQr().solve(g);
  y = y.cwiseMax(0.0);
  return (g - at * y).lpNorm<Eigen::Infinity>() / gnorm;
}

GameOutcome no_trade_outcome(const Network& net, std::vector<double> trace, bool converged) {
  GameOutcome out;
  out.strategy.schedule = Schedule::zeros(net.awpds.size(), net.pwpds.size(), net.hwpds.size());
  out.negotiated = false;
  out.converged = converged;
  out.trace = std::move(trace);
  out.iterations = out.trace.empty() ? 0 : static_cast<int>(out.trace.size()) - 1;
  return out;
}

}  // namespace

GameOutcome finalize_outcome(const Network& net, const CostModel& cost,
                             const LeaderStrategy& strategy, std::vector<double> trace,
                             bool converged) {
  GameOutcome out;
  out.strategy = strategy;
  out.converged = converged;
  out.trace = std::move(trace);
  out.iterations = out.trace.empty() ? 0 : static_cast<int>(out.trace.size()) - 1;
  const double p_s = follower_best_response(strategy.price, cost).power;
  const double u = utility_of(net, cost, strategy);
  if (u <= 0.0) {
    out.negotiated = false;
    out.p_s_star = 0.0;
    return out;
  }
  out.negotiated = true;
  out.p_s_star = p_s;
  out.u_leader = u;
  out.u_follower = follower_utility(p_s, strategy.price, strategy.beta, cost);
  out.u_social = social_welfare(net, cost, p_s, strategy.beta, strategy.schedule);
  return out;
}

Schedule equal_split_schedule(const Network& net, double beta, const ScheduleMask& mask,
                              const DevicePins& pins) {
  const std::size_t P = net.pwpds.size(), A = net.awpds.size(), H = net.hwpds.size();
  Schedule sched = Schedule::zeros(A, P, H);
  if (mask.backscatter) {
    std::size_t n_bs = 0;
    for (std::size_t p = 0; p < P; ++p) n_bs += pins.theta[p] ? 0 : 1;
    for (std::size_t h = 0; h < H; ++h) n_bs += pins.tau[h] ? 0 : 1;
    if (n_bs > 0) {
      const double slot = beta / static_cast<double>(n_bs);
      for (std::size_t p = 0; p < P; ++p) sched.theta[p] = pins.theta[p] ? 0.0 : slot;
      for (std::size_t h = 0; h < H; ++h) sched.tau[h] = pins.tau[h] ? 0.0 : slot;
    }
  }
  if (mask.active && A + H > 0) {
    const double slot = (1.0 - beta) / static_cast<double>(A + H);
    for (std::size_t a = 0; a < A; ++a) sched.nu[a] = slot;
    for (std::size_t h = 0; h < H; ++h) sched.mu[h] = slot;
  }
  return sched;
}

std::optional<LeaderStrategy> default_initial_strategy(const Network& net, const CostModel& cost,
                                                       const ScheduleMask& mask,
                                                       DevicePins* pins_out) {
  const std::size_t P = net.pwpds.size(), H = net.hwpds.size();
  DevicePins pins = DevicePins::none(net);
  const double beta = 0.5;

  // Backscatter device with the highest SNR price floor; -1/-1 if none left.
  auto worst_device = [&](const DevicePins& p_in) -> std::pair<int, int> {
    double worst_floor = -1.0;
    int worst_p = -1, worst_h = -1;
    if (mask.backscatter) {
      for (std::size_t p = 0; p < P; ++p) {
        if (p_in.theta[p]) continue;
        const double floor = net.pwpds[p].dev.snr_min / *net.pwpds[p].coef.kappa;
        if (floor > worst_floor) { worst_floor = floor; worst_p = static_cast<int>(p); worst_h = -1; }
      }
      for (std::size_t h = 0; h < H; ++h) {
        if (p_in.tau[h]) continue;
        const double floor = net.hwpds[h].dev.snr_min / *net.hwpds[h].coef.kappa;
        if (floor > worst_floor) { worst_floor = floor; worst_h = static_cast<int>(h); worst_p = -1; }
      }
    }
    return {worst_p, worst_h};
  };
  auto shed = [](DevicePins& p_in, std::pair<int, int> idx) {
    if (idx.first >= 0) p_in.theta[idx.first] = true;
    else p_in.tau[idx.second] = true;
  };
  // Best leader utility reachable by the price block alone from this start.
  auto best_price_utility = [&](const Schedule& sched,
                                const DevicePins& p_in) -> std::optional<std::pair<double, double>> {
    auto iv = price_interval(net, cost, beta, sched, mask, p_in);
    if (!iv) return std::nullopt;
    auto g = build_price_objective(net, cost, beta, sched);
    const ScalarResult r = golden_section_max({g, iv->lo, std::max(iv->lo, iv->hi), 1e-9});
    return std::make_pair(r.value, r.x);
  };

  // Walk the shed order from "keep everything" to "all backscatter pinned",
  // dropping the highest-floor device each round, and keep the pin set with the
  // best reachable utility. One probe at a time is not enough: when several
  // devices share the same floor, shedding pays off only once all are gone.
  struct Candidate {
    DevicePins pins;
    Schedule sched;
    double utility = 0.0;
    double price = 0.0;
    bool found = false;
  };
  Candidate best;
  while (true) {
    Schedule sched = equal_split_schedule(net, beta, mask, pins);
    if (auto cur = best_price_utility(sched, pins);
        cur && (!best.found || cur->first > best.utility + 1e-12)) {
      best = {pins, std::move(sched), cur->first, cur->second, true};
    }
    const auto idx = worst_device(pins);
    if (idx.first < 0 && idx.second < 0) break;
    shed(pins, idx);
  }
  if (!best.found) {
    if (pins_out) *pins_out = pins;
    return std::nullopt;  // no pin set admits a feasible price window
  }
  if (pins_out) *pins_out = best.pins;
  LeaderStrategy s;
  s.price = best.price;
  s.beta = beta;
  s.schedule = std::move(best.sched);
  return s;
}

namespace {

GameOutcome pa_solve_impl(const Network& net, const CostModel& cost, const LeaderStrategy& init,
                          const SolveOptions& opts, const ScheduleMask& mask,
                          const DevicePins& pins) {
  LeaderStrategy cur = init;
  std::vector<double> trace{utility_of(net, cost, cur)};

  bool converged = false;
  for (int n = 1; n <= opts.max_outer; ++n) {
    auto p = solve_price_step(net, cost, cur.price, cur.beta, cur.schedule, mask, pins, opts);
    if (!p) return no_trade_outcome(net, std::move(trace), true);
    cur.price = *p;
    auto b = solve_beta_step(net, cost, cur.price, cur.beta, cur.schedule, mask, opts);
    if (!b) return no_trade_outcome(net, std::move(trace), true);
    cur.beta = *b;
    auto s = solve_schedule_step(cur.price, cur.beta, net, cost, mask, pins, cur.schedule);
    if (!s) return no_trade_outcome(net, std::move(trace), true);
    cur.schedule = *s;

    const double u = utility_of(net, cost, cur);
    const double prev = trace.back();
    trace.push_back(u);
    if (std::abs(u - prev) < opts.tol_outer) {
      converged = true;
      break;
    }
  }
  return finalize_outcome(net, cost, cur, std::move(trace), converged);
}

GameOutcome ja_solve_impl(const Network& net, const CostModel& cost, const LeaderStrategy& init,
                          const SolveOptions& opts, const ScheduleMask& mask,
                          const DevicePins& pins, JaDiagnostics* diag) {
  LeaderStrategy cur = init;
  std::vector<double> trace{utility_of(net, cost, cur)};

  bool converged = false;
  for (int n = 1; n <= opts.max_outer; ++n) {
    std::optional<JointProblem> jp;
    try {
      jp = build_joint_subproblem(cur.price, cur.beta, cur.schedule, net, cost, mask, pins, opts);
    } catch (const FeasibilityError&) {
      return no_trade_outcome(net, std::move(trace), true);
    }
    CccpResult inner;
    try {
      inner = cccp_solve(jp->dc);
    } catch (const FeasibilityError&) {
      return no_trade_outcome(net, std::move(trace), true);
    }
    if (diag) {
      diag->inner_traces.push_back(inner.trace);
      diag->kkt_residuals.push_back(kkt_residual(jp->dc, inner.point));
    }
    const auto [p_new, beta_new] = price_beta_from_q(jp->q_of(inner.point), cur.beta, cost);
    LeaderStrategy cand = cur;
    cand.price = p_new;
    cand.beta = beta_new;
    if (utility_of(net, cost, cand) >= utility_of(net, cost, cur)) {
      cur = cand;
    }
    auto s = solve_schedule_step(cur.price, cur.beta, net, cost, mask, pins, cur.schedule);
    if (!s) return no_trade_outcome(net, std::move(trace), true);
    cur.schedule = *s;

    const double u = utility_of(net, cost, cur);
    const double prev = trace.back();
    trace.push_back(u);
    if (std::abs(u - prev) < opts.tol_outer) {
      converged = true;
      break;
    }
  }
  return finalize_outcome(net, cost, cur, std::move(trace), converged);
}

}  // namespace

GameOutcome pa_solve(const Network& net, const CostModel& cost, const SolveOptions& opts,
                     const ScheduleMask& mask) {
  DevicePins pins = DevicePins::none(net);
  auto init = default_initial_strategy(net, cost, mask, &pins);
  if (!init) return no_trade_outcome(net, {}, true);
  return pa_solve_impl(net, cost, *init, opts, mask, pins);
}

GameOutcome pa_solve_from(const Network& net, const CostModel& cost, const LeaderStrategy& init,
                          const SolveOptions& opts, const ScheduleMask& mask) {
  return pa_solve_impl(net, cost, init, opts, mask, DevicePins::none(net));
}

GameOutcome ja_solve(const Network& net, const CostModel& cost, const SolveOptions& opts,
                     const ScheduleMask& mask, JaDiagnostics* diag) {
  DevicePins pins = DevicePins::none(net);
  auto init = default_initial_strategy(net, cost, mask, &pins);
  if (!init) return no_trade_outcome(net, {}, true);
  return ja_solve_impl(net, cost, *init, opts, mask, pins, diag);
}

GameOutcome ja_solve_from(const Network& net, const CostModel& cost, const LeaderStrategy& init,
                          const SolveOptions& opts, const ScheduleMask& mask,
                          JaDiagnostics* diag) {
  return ja_solve_impl(net, cost, init, opts, mask, DevicePins::none(net), diag);
}

}  // namespace wpbc
