#pragma once

// Light-cone minimum times for power-law interactions in 1-D, the optimal Schatten index,
// and the resulting runtime lower bounds for robust transfer.

#include <optional>
#include <string>
#include <vector>

#include "qst/tensor.hpp"

namespace qst {

struct LightConeConstants {
  double c_pnorm = 1.0;
  double c_op = 1.0;
  double v = 1.0;
  double beta_op = 1.0;
  double c_frob = 1.0;

  void validate() const;
};

// 2 ln 2.
inline constexpr double kCPrime = 1.3862943611198906;

struct RuntimeQuery {
  int sites = 2;
  // Transfer distance r; 0 means r = L.
  double distance = 0.0;
  // |S| = 2^k.
  int k = 0;
  double alpha = 2.0;
  double delta = 2.0;
  LightConeConstants constants;

  double r() const { return distance > 0.0 ? distance : static_cast<double>(sites); }
  void validate() const;
};

// r^(alpha - 3/2) for 3/2 < alpha < 5/2, r / ln^(3/2) r at 5/2, r above.
double r_of_r(double r, double alpha);

// delta R(r) / (sqrt(p) C). Requires finite p >= 2.
double pnorm_light_cone_time(const RuntimeQuery& q, SchattenP p);

struct LightConeTime {
  double time = 0.0;
  std::string branch;
  // Set when the returned value is the linear-cone limit r / v rather than an exact inversion.
  bool asymptotic = false;
};

LightConeTime opnorm_light_cone_time(const RuntimeQuery& q);
LightConeTime frobenius_light_cone_time(const RuntimeQuery& q);

// max{2, 2 ln 2 (L - k - 1)}.
double optimal_p(int sites, int k);

struct PGrid {
  double p_min = 2.0;
  double p_max = 200.0;
  double coarse_step = 1e-2;
  double fine_step = 1e-4;
};

// Argmax of 2^((k - L + 1)/p) / sqrt(p) by grid search: a coarse scan, then a fine scan around
// the coarse winner.
double optimal_p_oracle(int sites, int k, const PGrid& grid = {});

struct RuntimeBounds {
  double p_star = 2.0;
  bool closed_form_p = true;
  std::optional<double> t_pnorm;
  std::optional<LightConeTime> t_op;
  std::optional<double> t_frob;
  double best = 0.0;
  // Why a branch is missing.
  std::vector<std::string> notes;
};

// Each light cone fed with the smallest commutator norm a robust protocol must reach:
// p-norm at p_star with delta = 2 * 2^((k - L + 1)/p_star), operator norm with delta = 2,
// Frobenius with delta = 2 * 2^((k - L + 1)/2). Branches outside their validity range are left
// empty; throws DomainError if none applies.
RuntimeBounds runtime_lower_bound(const RuntimeQuery& q);

}  // namespace qst
