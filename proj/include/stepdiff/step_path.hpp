#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "stepdiff/errors.hpp"
#include "stepdiff/rng.hpp"

namespace stepdiff {

/// Uniform grid {0, 1/n, 2/n, ...} truncated at horizon T.
struct TimeGrid {
    long n = 1;       // mesh parameter, grid points k/n
    double T = 1.0;   // horizon
    long count = 1;   // floor(n T)

    static TimeGrid make(long n, double T) {
        if (n < 1) throw DomainError("TimeGrid: n must be >= 1");
        if (!(T > 0.0)) throw DomainError("TimeGrid: T must be > 0");
        return TimeGrid{n, T, static_cast<long>(std::floor(static_cast<double>(n) * T))};
    }

    double mesh() const { return 1.0 / static_cast<double>(n); }
    double point(long j) const { return static_cast<double>(j) / static_cast<double>(n); }

    /// Piece index holding time t: floor(n t), clamped to count at t == T.
    long index_at(double t) const {
        if (t < 0.0 || t > T) throw DomainError("TimeGrid: t outside [0, T]");
        const long j = static_cast<long>(std::floor(static_cast<double>(n) * t));
        return j > count ? count : j;
    }

    bool operator==(const TimeGrid&) const = default;
};

/// Piecewise-constant cadlag path on a TimeGrid. Column j holds the value on
/// [j/n, (j+1)/n); evaluation at t reads column floor(n t).
class StepPath {
public:
    StepPath(int dim, TimeGrid grid, Eigen::MatrixXd values)
        : dim_(dim), grid_(grid), values_(std::move(values)) {
        if (dim_ < 1) throw DomainError("StepPath: dim must be >= 1");
        if (values_.rows() != dim_ || values_.cols() != grid_.count + 1)
            throw ContractViolation("StepPath: values must be dim x (count+1)");
    }

    int dim() const { return dim_; }
    const TimeGrid& grid() const { return grid_; }
    const Eigen::MatrixXd& values() const { return values_; }

    /// Value on piece j.
    Eigen::MatrixXd::ConstColXpr piece(long j) const { return values_.col(j); }

    /// Cadlag evaluation at t in [0, T].
    Eigen::MatrixXd::ConstColXpr eval(double t) const { return values_.col(grid_.index_at(t)); }

private:
    int dim_;
    TimeGrid grid_;
    Eigen::MatrixXd values_;  // dim x (count+1)
};

/// Cumulative-sum path from a row of increments U_0..U_count
/// (columns of `increments`); piece j carries U_0 + ... + U_j.
StepPath build_step_path(const Eigen::MatrixXd& increments, const TimeGrid& grid);
StepPath build_step_path(const std::vector<Eigen::VectorXd>& increments, const TimeGrid& grid);

/// Finite differences of consecutive piece values; inverse of build_step_path
/// up to floating cancellation.
Eigen::MatrixXd path_increments(const StepPath& path);

/// A family of step paths of one law, one per reproducible stream.
struct PathEnsemble {
    int dim = 1;
    TimeGrid grid;
    std::vector<StepPath> paths;
    std::vector<RngKey> seeds;  // one per path; each path reproducible from its seed alone

    void validate() const {
        if (paths.size() != seeds.size())
            throw ContractViolation("PathEnsemble: one seed record per path required");
        for (const auto& p : paths)
            if (p.dim() != dim || !(p.grid() == grid))
                throw ContractViolation("PathEnsemble: all paths must share dim and grid");
    }
};

/// A path (vector- or matrix-valued) recorded at an increasing, possibly
/// repeating list of sample times. Repeated times carry left limit then value.
struct SampledPath {
    std::vector<double> times;
    std::vector<Eigen::MatrixXd> values;
};

/// Samples a step path at every piece endpoint from both sides:
/// (0, v0), (1/n, v0), (1/n, v1), (2/n, v1), ... up to min(T, grid.T).
SampledPath sample_with_left_limits(const StepPath& path, double T);

/// sup over shared sample points of the entrywise-Euclidean (Frobenius) norm
/// of f - g. Grids must agree exactly.
double sup_norm_diff(const SampledPath& f, const SampledPath& g);

/// Integral over [0, t] of s -> integrand(s, path(s)) by the per-piece
/// midpoint rule (exact whenever the integrand is constant in s on pieces).
/// The integrand returns a vector or matrix; the result has the same shape.
template <typename Integrand>
auto piecewise_time_integral(Integrand&& integrand, const StepPath& path, double t) {
    const TimeGrid& g = path.grid();
    if (t < 0.0 || t > g.T) throw DomainError("piecewise_time_integral: t outside [0, T]");
    const double mesh = g.mesh();
    const long full = static_cast<long>(std::floor(static_cast<double>(g.n) * t));
    using Value = std::decay_t<decltype(integrand(0.0, path.piece(0)).eval())>;
    Value acc = integrand(0.5 * mesh, path.piece(0)).eval();
    acc.setZero();
    for (long j = 0; j < full; ++j) {
        acc += mesh * integrand((static_cast<double>(j) + 0.5) * mesh, path.piece(j));
    }
    const double t_full = static_cast<double>(full) * mesh;
    if (t > t_full) {
        const long j = full > g.count ? g.count : full;
        acc += (t - t_full) * integrand(0.5 * (t_full + t), path.piece(j));
    }
    return acc;
}

}  // namespace stepdiff
