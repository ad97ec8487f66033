#pragma once

// Convergence bound of FedAvg under a bounded-distance poisoning attacker and the
// stabilised optimality gap.

#include <cmath>
#include <string>

#include "gaepoison/core/error.hpp"

namespace gaepoison::analysis {

/// Theorem constants. The learning-rate condition eta <= 1/L is not checked (L is unknown here).
struct BoundParams {
  double Theta = 1.0;  // F(w_g(0)) - F(w_g*)
  double rho = 0.1;    // PL constant
  double eta = 0.01;
  double L_c = 1.0;    // Lipschitz constant of the local losses
  double D = 1.0;      // total data size, attacker included
  double D_a = 0.0;    // attacker's claimed size
  double F_max = 1.0;
  double d_T = 1.0;
};

inline void check_sizes(const BoundParams& p) {
  if (!(p.D > p.D_a)) throw config_error("bound requires D > D_a (D=" + std::to_string(p.D) + ", D_a=" + std::to_string(p.D_a) + ")");
  if (p.D_a < 0.0) throw config_error("D_a must be non-negative");
}

inline double zeta(const BoundParams& p) {
  check_sizes(p);
  const double ratio = p.D / (p.D - p.D_a);  // exactly 1 without an attacker
  return 1.0 - p.rho * p.eta * (ratio * ratio);
}

/// Per-round additive term rho eta D D_a F_max / (D - D_a)^2.
inline double attack_drift(const BoundParams& p) {
  check_sizes(p);
  const double r = p.D - p.D_a;
  return p.rho * p.eta * (p.D / r) * (p.D_a / r) * p.F_max;
}

/// The bound only contracts for zeta in (0, 1).
inline bool bound_is_vacuous(const BoundParams& p) {
  const double z = zeta(p);
  return !(z > 0.0 && z < 1.0);
}

inline double convergence_bound(const BoundParams& p, int t) {
  if (t < 0) throw contract_error("bound evaluated at negative t");
  const double z = zeta(p);
  if (z == 1.0)
    throw numeric_error("zeta = 1 (rho*eta*D^2 = 0): geometric factor 1/(1 - zeta) is undefined");
  if (t == 0) return p.Theta;
  const double zt = std::pow(z, t);
  return p.Theta * zt + (1.0 - zt) / (1.0 - z) * attack_drift(p);
}

/// t -> infinity value of convergence_bound when zeta is in (0, 1).
inline double bound_limit(const BoundParams& p) {
  const double z = zeta(p);
  if (z == 1.0) throw numeric_error("zeta = 1: bound limit undefined");
  return attack_drift(p) / (1.0 - z);
}

/// Gap the attacked training is claimed to stabilise at: 2 D_a L_c d_T / (D - D_a).
inline double asymptotic_gap(const BoundParams& p) {
  check_sizes(p);
  return 2.0 * p.D_a * p.L_c * p.d_T / (p.D - p.D_a);
}

}  // namespace gaepoison::analysis
