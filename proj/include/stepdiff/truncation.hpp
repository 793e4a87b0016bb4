#pragma once

#include <Eigen/Dense>

#include "stepdiff/errors.hpp"

namespace stepdiff {

/// Canonical truncation: the radial ramp h(x) = x rho(|x|) with
/// rho = 1 on [0, 1/K], rho = 0 on [K, inf), linear in between. Satisfies
/// h(x) = x near 0, compact support, and |h(x)| <= min(|x|, K).
struct TruncationFn {
    int dim = 1;
    double K = 2.0;

    double ramp(double r) const {
        if (r <= 1.0 / K) return 1.0;
        if (r >= K) return 0.0;
        return (K - r) / (K - 1.0 / K);
    }

    Eigen::VectorXd operator()(const Eigen::VectorXd& x) const {
        return x * ramp(x.norm());
    }
};

/// K must exceed 1 (the ramp slope is 1/(K - 1/K)). Default K = 2.
TruncationFn make_canonical_truncation(int dim, double K);

/// (c |x| - 1)_+ /\ 1, a continuous surrogate for the indicator 1{|x| > 1/c}.
double g_c(const Eigen::VectorXd& x, double c);

}  // namespace stepdiff
