#include "qst/runtime_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "qst/errors.hpp"

namespace qst {

void LightConeConstants::validate() const {
  for (double c : {c_pnorm, c_op, v, beta_op, c_frob}) {
    if (!(c > 0.0) || !std::isfinite(c)) {
      throw ValidationError("light-cone constants must be positive and finite");
    }
  }
}

void RuntimeQuery::validate() const {
  if (sites < 2) throw ValidationError("runtime query: L must be >= 2");
  if (k < 0 || k > sites - 1) throw ValidationError("runtime query: need 0 <= k <= L-1");
  if (!(alpha > 0.0)) throw ValidationError("runtime query: alpha must be positive");
  if (!(delta > 0.0) || delta > 2.0) throw ValidationError("runtime query: delta must lie in (0, 2]");
  if (distance < 0.0 || !std::isfinite(distance)) {
    throw ValidationError("runtime query: distance must be nonnegative");
  }
  if (r() < 1.0) throw ValidationError("runtime query: distance must be >= 1");
  constants.validate();
}

double r_of_r(double r, double alpha) {
  if (!(alpha > 1.5)) throw DomainError("R(r) is only available for alpha > 3/2");
  if (!(r > 1.0)) throw DomainError("R(r) needs r > 1");
  if (alpha < 2.5) return std::pow(r, alpha - 1.5);
  if (alpha == 2.5) return r / std::pow(std::log(r), 1.5);
  return r;
}

double pnorm_light_cone_time(const RuntimeQuery& q, SchattenP p) {
  q.validate();
  if (p.is_infinite() || p.value() < 2.0) {
    throw DomainError("p-norm light cone needs finite p >= 2, got " + p.to_string());
  }
  return q.delta * r_of_r(q.r(), q.alpha) / (std::sqrt(p.value()) * q.constants.c_pnorm);
}

LightConeTime opnorm_light_cone_time(const RuntimeQuery& q) {
  q.validate();
  const double a = q.alpha;
  const double r = q.r();
  const auto& c = q.constants;
  if (!(a > 1.0)) throw DomainError("operator-norm light cone needs alpha > 1");
  if (a == 2.0 || a == 3.0) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "operator-norm light cone undefined at branch boundary alpha = %g", a);
    throw DomainError(buf);
  }
  LightConeTime out;
  if (a < 2.0) {
    // A negative value is no constraint.
    out.time = std::max(0.0, a * std::log(r) + std::log(q.delta));
    out.branch = "log";
  } else if (a < 3.0) {
    out.time = c.c_op * std::pow(r, (a - 2.0) / c.beta_op) * std::pow(q.delta, 1.0 / c.beta_op);
    out.branch = "power";
  } else {
    out.time = r / c.v;
    out.branch = "linear";
    out.asymptotic = true;
  }
  return out;
}

LightConeTime frobenius_light_cone_time(const RuntimeQuery& q) {
  q.validate();
  const double a = q.alpha;
  const double r = q.r();
  if (!(a > 1.0)) throw DomainError("Frobenius light cone needs alpha > 1");
  LightConeTime out;
  double g = 0.0;
  if (a < 2.0) {
    g = std::pow(r, a - 1.0);
    out.branch = "power";
  } else {
    if (!(r > 1.0)) throw DomainError("Frobenius light cone needs r > 1 for alpha >= 2");
    const double lr = std::log(r);
    g = a == 2.0 ? r / (lr * lr) : r / lr;
    out.branch = a == 2.0 ? "log2" : "log";
  }
  out.time = q.delta * q.delta * q.constants.c_frob * g;
  return out;
}

double optimal_p(int sites, int k) {
  if (sites < 1 || k < 0 || k > sites - 1) throw ValidationError("optimal_p: need 0 <= k <= L-1");
  return std::max(2.0, kCPrime * (sites - k - 1));
}

double optimal_p_oracle(int sites, int k, const PGrid& grid) {
  if (sites < 1 || k < 0 || k > sites - 1) {
    throw ValidationError("optimal_p_oracle: need 0 <= k <= L-1");
  }
  if (!(grid.p_min >= 2.0) || !(grid.p_max > grid.p_min) || !(grid.coarse_step > 0.0) ||
      !(grid.fine_step > 0.0)) {
    throw ValidationError("optimal_p_oracle: bad grid");
  }
  const double m = static_cast<double>(k - sites + 1);
  // log of 2^(m/p) / sqrt(p)
  auto h = [m](double p) { return m * std::log(2.0) / p - 0.5 * std::log(p); };
  auto scan = [&](double lo, double hi, double step) {
    double best_p = lo;
    double best_h = h(lo);
    const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
    for (long j = 1; j <= n; ++j) {
      const double p = lo + static_cast<double>(j) * step;
      const double v = h(p);
      if (v > best_h) {
        best_h = v;
        best_p = p;
      }
    }
    return best_p;
  };
  const double coarse = scan(grid.p_min, grid.p_max, grid.coarse_step);
  const double lo = std::max(grid.p_min, coarse - grid.coarse_step);
  const double hi = std::min(grid.p_max, coarse + grid.coarse_step);
  return scan(lo, hi, grid.fine_step);
}

RuntimeBounds runtime_lower_bound(const RuntimeQuery& q) {
  q.validate();
  RuntimeBounds out;
  const int gap = q.sites - q.k - 1;
  out.closed_form_p = q.k <= q.sites - 1 - 2.0 / kCPrime;
  out.p_star = out.closed_form_p ? optimal_p(q.sites, q.k) : optimal_p_oracle(q.sites, q.k);

  RuntimeQuery sub = q;
  if (q.alpha > 1.5 && q.r() > 1.0) {
    sub.delta = std::max(2.0 * std::pow(2.0, -gap / out.p_star), std::numeric_limits<double>::min());
    out.t_pnorm = pnorm_light_cone_time(sub, SchattenP(out.p_star));
  } else {
    out.notes.push_back("p-norm light cone needs alpha > 3/2 and r > 1");
  }

  sub.delta = 2.0;
  try {
    out.t_op = opnorm_light_cone_time(sub);
  } catch (const DomainError& e) {
    out.notes.push_back(e.what());
  }

  // Large gaps underflow; the smallest normal double stands in for zero.
  sub.delta = std::max(2.0 * std::pow(2.0, -gap / 2.0), std::numeric_limits<double>::min());
  try {
    out.t_frob = frobenius_light_cone_time(sub).time;
  } catch (const DomainError& e) {
    out.notes.push_back(e.what());
  }

  bool any = false;
  for (const auto& t : {out.t_pnorm, out.t_op ? std::optional<double>(out.t_op->time) : std::nullopt,
                        out.t_frob}) {
    if (t) {
      out.best = any ? std::max(out.best, *t) : *t;
      any = true;
    }
  }
  if (!any) throw DomainError("no light cone applies at this alpha");
  return out;
}

}  // namespace qst
