#pragma once

#include <Eigen/Dense>

#include <vector>

#include "stepdiff/diffusion_spec.hpp"
#include "stepdiff/integrand.hpp"
#include "stepdiff/rng.hpp"

namespace stepdiff {

/// Uniform simulation grid of mesh delta on [0, T]; the last step is clipped
/// to end exactly at T.
struct SdeGrid {
    double delta = 1e-3;
    double T = 1.0;
    long steps = 1000;  // number of increments; steps+1 grid values

    static SdeGrid make(double delta, double T);
    double time(long m) const { return m == steps ? T : static_cast<double>(m) * delta; }
    double step_size(long m) const { return time(m + 1) - time(m); }
    /// Grid index whose time is nearest to t.
    long index_at(double t) const;
};

/// One weak-solution sample path of the limit SDE on an SdeGrid.
struct SdePath {
    int dim = 1;
    SdeGrid grid;
    Eigen::MatrixXd values;  // dim x (steps+1)
    RngKey seed;

    Eigen::MatrixXd::ConstColXpr at(long m) const { return values.col(m); }
    Eigen::MatrixXd::ConstColXpr at_time(double t) const { return values.col(grid.index_at(t)); }
};

/// Explicit Euler scheme
///   X_0 ~ initial law,  X_{m+1} = X_m + beta(t_m, X_m) dt + gamma(t_m, X_m) sqrt(dt) Z_m,
/// with Z_m i.i.d. standard normal r-vectors. Weak order 1.
SdePath euler_maruyama(const DiffusionSpec& spec, double delta, double T, RngStream rng);

/// Jointly simulated (U, V, Y): one driving noise, V_m the limit functional
/// of U at t_m, Y advanced by the left-point rule
/// Y_{m+1} = Y_m + V_m (x) (U_{m+1} - U_m).
struct CoupledLimit {
    SdePath u;
    Eigen::MatrixXd v;  // p  x (steps+1)
    Eigen::MatrixXd y;  // pd x (steps+1)
};

CoupledLimit coupled_limit(const DiffusionSpec& spec, const Integrand& f, double delta, double T,
                           RngStream rng);

/// Path-parallel ensemble of Euler paths; path i uses the stream
/// seed_schedule(master_seed, i, Limit). Results are independent of workers.
std::vector<SdePath> simulate_limit_ensemble(const DiffusionSpec& spec, double delta, double T,
                                             int num_paths, std::uint64_t master_seed,
                                             int workers);
std::vector<SdePath> simulate_limit_ensemble_serial(const DiffusionSpec& spec, double delta,
                                                    double T, int num_paths,
                                                    std::uint64_t master_seed);

}  // namespace stepdiff
