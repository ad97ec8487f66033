#pragma once

// Central finite-difference check of gcn_backprop on the reconstruction log-likelihood.

#include <algorithm>
#include <cmath>

#include "gaepoison/attack/gae.hpp"

namespace gradcheck {

using namespace gaepoison;
using namespace gaepoison::attack;

struct Problem {
  Matrix A;
  Matrix Z0;
  Matrix targets;
  Matrix mask;  // may be empty
};

inline double phi(const GaeModel& g, const Problem& p) {
  return recon_loglik(decode(gcn_forward(g, p.A, p.Z0, p.mask).Z).A_hat, p.targets);
}

/// Normwise relative error max|analytic - fd| / max|fd| over all weights of both layers.
inline double max_relative_error(const GaeModel& g, const Problem& p, double h = 1e-6) {
  const GcnCache cache = gcn_forward(g, p.A, p.Z0, p.mask);
  const GaeGradients an = gcn_backprop(g, cache, recon_loglik_grad(decode(cache.Z).A_hat, p.targets));
  double err = 0.0, scale = 0.0;
  auto sweep = [&](Matrix GaeModel::*w, const Matrix& analytic) {
    for (Eigen::Index i = 0; i < analytic.size(); ++i) {
      GaeModel plus = g, minus = g;
      (plus.*w).data()[i] += h;
      (minus.*w).data()[i] -= h;
      const double fd = (phi(plus, p) - phi(minus, p)) / (2.0 * h);
      err = std::max(err, std::abs(analytic.data()[i] - fd));
      scale = std::max(scale, std::abs(fd));
    }
  };
  sweep(&GaeModel::W1, an.dW1);
  sweep(&GaeModel::W2, an.dW2);
  return err / std::max(scale, 1e-300);
}

}  // namespace gradcheck
