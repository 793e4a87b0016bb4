#pragma once

#include <Eigen/Dense>

#include <memory>
#include <string>
#include <vector>

#include "stepdiff/diffusion_spec.hpp"
#include "stepdiff/errors.hpp"
#include "stepdiff/gaussian_moments.hpp"
#include "stepdiff/rng.hpp"
#include "stepdiff/step_path.hpp"
#include "stepdiff/truncation.hpp"

namespace stepdiff {

/// Everything the built-in models need to know about the realized past of a
/// row: the index of the increment about to be sampled, the running sum of
/// all previous increments (the current step-path value), and the last
/// increment. Custom models requiring richer state can derive and extend.
struct RowHistory {
    long k = 0;               // index of the increment about to be sampled
    Eigen::VectorXd prefix;   // U_0 + ... + U_{k-1}
    Eigen::VectorXd last;     // U_{k-1}
};

/// One row (U_k)_k of a triangular array: a sampler plus exact
/// conditional-moment oracles with respect to the natural filtration.
/// All oracle answers are functions of the history only; they never see the
/// increment about to be sampled.
///
/// Instances are immutable and safe to share across worker threads.
class ArrayModel {
public:
    virtual ~ArrayModel() = default;

    int dim() const { return dim_; }
    long n() const { return n_; }
    const std::string& name() const { return name_; }

    // --- conditional-moment oracles -------------------------------------
    virtual void cond_mean(const RowHistory& h, Eigen::VectorXd& out) const = 0;
    virtual void cond_cov(const RowHistory& h, Eigen::MatrixXd& out) const = 0;
    /// E(|U_k|^2 1{|U_k| > theta} | F_{k-1})
    virtual double cond_lindeberg(const RowHistory& h, double theta) const = 0;
    /// P(|U_k| > theta | F_{k-1})
    virtual double cond_tail(const RowHistory& h, double theta) const = 0;
    /// False when cond_lindeberg / cond_tail return conservative upper bounds
    /// rather than exact values (multivariate norm tails).
    virtual bool lindeberg_exact() const { return true; }

    // --- truncated conditional moments (scalar models only) --------------
    /// Whether cond_ramp_moments is available. Only scalar models with
    /// Gaussian or discrete conditional laws provide closed forms.
    virtual bool has_truncated_moments() const { return false; }
    /// Moments of U rho(c |U|) under the conditional law, for the radial ramp
    /// of `trunc`. c = 1 gives the moments of h(U_k); c > 1 arises when the
    /// ramp is composed with a linear stacking of norm c.
    virtual RampMoments cond_ramp_moments(const RowHistory& h, const TruncationFn& trunc,
                                          double c) const;

    // --- sampling ---------------------------------------------------------
    /// U_0: a draw from the model's initial law.
    virtual void sample_initial(RngStream& rng, Eigen::VectorXd& out) const = 0;
    /// U_k given the history; advances the stream.
    virtual void sample_next(const RowHistory& h, RngStream& rng, Eigen::VectorXd& out) const = 0;

    // value-returning conveniences
    Eigen::VectorXd cond_mean(const RowHistory& h) const {
        Eigen::VectorXd v(dim_);
        cond_mean(h, v);
        return v;
    }
    Eigen::MatrixXd cond_cov(const RowHistory& h) const {
        Eigen::MatrixXd m(dim_, dim_);
        cond_cov(h, m);
        return m;
    }

protected:
    ArrayModel(int dim, long n, std::string name) : dim_(dim), n_(n), name_(std::move(name)) {
        if (dim_ < 1) throw DomainError("ArrayModel: dim must be >= 1");
        if (n_ < 1) throw DomainError("ArrayModel: n must be >= 1");
    }

private:
    int dim_;
    long n_;
    std::string name_;
};

enum class ScaleLaw { Normal, Rademacher, Uniform };
enum class NoiseLaw { Normal, Rademacher };

/// Scaled i.i.d. increments U_k = xi_k / sqrt(n) with E xi = 0, Var xi = Sigma.
/// Lindeberg/tail oracles are exact for Normal with d = 1 or isotropic Sigma,
/// and for Rademacher/Uniform with d = 1; Uniform with d > 1 uses conservative
/// bounds. Normal with anisotropic Sigma in d > 1 is rejected.
std::shared_ptr<ArrayModel> model_lindeberg_iid(int d, ScaleLaw law, const Eigen::MatrixXd& Sigma,
                                                long n);
std::shared_ptr<ArrayModel> model_lindeberg_iid(int d, ScaleLaw law, long n);

/// Scalar triple-pattern array: U_0 = 0 and, per fresh standard normal eta_j,
///   U_{3j-2} = eta_j / sqrt(n),  U_{3j-1} = eta_j / sqrt(n),  U_{3j} = -eta_j / sqrt(n).
/// Drift-free with long-run dispersion 1/sqrt(3); the canonical case in which
/// step processes converge but their stochastic integrals acquire a drift.
std::shared_ptr<ArrayModel> model_nongood_triple(long n);

/// Generic array targeting a DiffusionSpec:
///   U_k = beta(k/n, S_{k-1}) / n + gamma(k/n, S_{k-1}) xi_k / sqrt(n),
/// with S the running prefix sum and xi the chosen unit noise. Norm tails are
/// exact for d = 1 and for Rademacher noise (enumeration); multivariate
/// Normal tails are conservative upper bounds.
std::shared_ptr<ArrayModel> model_euler_array(DiffusionSpec spec, NoiseLaw noise, long n);

/// One sampled row with its oracle transcript. Oracle values at index k are
/// evaluated on the realized history before U_k is drawn.
struct RowSample {
    Eigen::MatrixXd increments;              // d x (count+1): U_0..U_count
    Eigen::MatrixXd path_values;             // d x (count+1): prefix sums
    Eigen::MatrixXd cond_means;              // d x count, column k-1 = E(U_k | F_{k-1})
    std::vector<Eigen::MatrixXd> cond_covs;  // count entries

    /// History handle as it stood before sampling U_k (1 <= k <= count).
    RowHistory history_at(long k) const;
};

RowSample sample_row(const ArrayModel& model, const TimeGrid& grid, RngStream rng);

/// Increment-only sampling (no transcript); same draws as sample_row.
Eigen::MatrixXd sample_row_increments(const ArrayModel& model, const TimeGrid& grid,
                                      RngStream rng);

}  // namespace stepdiff
