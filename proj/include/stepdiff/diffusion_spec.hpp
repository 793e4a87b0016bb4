#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>

#include "stepdiff/errors.hpp"
#include "stepdiff/rng.hpp"

namespace stepdiff {

/// Coefficient pair (drift, dispersion) of a limit SDE
///   dX_t = beta(t, X_t) dt + gamma(t, X_t) dW_t
/// together with an initial-law sampler and caller attestations.
struct DiffusionSpec {
    int d = 1;  // state dimension
    int r = 1;  // driving-noise dimension

    // In-place evaluation keeps per-step allocations out of hot loops.
    std::function<void(double t, const Eigen::VectorXd& x, Eigen::VectorXd& out)> beta;
    std::function<void(double t, const Eigen::VectorXd& x, Eigen::MatrixXd& out)> gamma;
    std::function<void(RngStream&, Eigen::VectorXd& out)> initial;

    bool time_homogeneous = true;
    // Caller's attestation that the SDE has a unique weak solution from every
    // start point; nothing here can verify it.
    bool uniqueness_asserted = true;
    std::string name;

    Eigen::VectorXd beta_at(double t, const Eigen::VectorXd& x) const {
        Eigen::VectorXd out(d);
        beta(t, x, out);
        return out;
    }
    Eigen::MatrixXd gamma_at(double t, const Eigen::VectorXd& x) const {
        Eigen::MatrixXd out(d, r);
        gamma(t, x, out);
        return out;
    }
};

/// beta = 0, gamma = 0 in the given dimensions; initial point mass at 0.
DiffusionSpec make_spec_zero(int d, int r);

/// d = r = 1, beta = 0, gamma = scale (a scaled Wiener process).
DiffusionSpec make_spec_scaled_wiener(double scale);

/// d = r = 1 mean-reverting linear drift: beta(t,x) = -rate * x, gamma = sigma.
DiffusionSpec make_spec_ou(double rate, double sigma);

/// d = r = 1 square-root dispersion: beta = drift, gamma(t,x) = sigma * sqrt(x_+).
/// Weak uniqueness is not asserted for every parameter choice.
DiffusionSpec make_spec_sqrt(double drift, double sigma);

/// Replace the initial law by a point mass / a product Gaussian.
DiffusionSpec with_point_initial(DiffusionSpec spec, const Eigen::VectorXd& x0);
DiffusionSpec with_gaussian_initial(DiffusionSpec spec, const Eigen::VectorXd& mean,
                                    const Eigen::VectorXd& sd);

}  // namespace stepdiff
