#pragma once

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "stepdiff/diffusion_spec.hpp"
#include "stepdiff/errors.hpp"
#include "stepdiff/step_path.hpp"

namespace stepdiff {

/// Kronecker product of two vectors: component (i-1)d + j of the result is
/// v_i u_j (row-blocks of v). |v (x) u| = |v| |u|.
void kron_into(const Eigen::VectorXd& v, const Eigen::VectorXd& u, Eigen::VectorXd& out);
Eigen::VectorXd kron(const Eigen::VectorXd& v, const Eigen::VectorXd& u);

/// An integrand family: per-row functionals psi_{n,k} turning the first k+1
/// increments into a p-vector V_k, together with the limit functional Psi
/// acting on paths. Both are evaluated incrementally; per-path state is
/// externalized so one Integrand instance serves many paths concurrently.
class Integrand {
public:
    virtual ~Integrand() = default;

    int input_dim() const { return d_; }
    int output_dim() const { return p_; }
    const std::string& name() const { return name_; }

    struct State {
        virtual ~State() = default;
    };

    /// State for the prelimit family; feed increments U_0, U_1, ... in order.
    virtual std::unique_ptr<State> new_state() const = 0;
    /// V_k from the next increment; k must advance 0, 1, 2, ...
    virtual void prelimit_step(State& s, long k, const Eigen::VectorXd& u_k,
                               Eigen::VectorXd& v_k) const = 0;

    /// State for the limit functional applied to a sampled path; feed
    /// (t, alpha(t)) at increasing times.
    virtual std::unique_ptr<State> new_limit_state() const = 0;
    virtual void limit_step(State& s, double t, const Eigen::VectorXd& x,
                            Eigen::VectorXd& w) const = 0;

protected:
    Integrand(int d, int p, std::string name) : d_(d), p_(p), name_(std::move(name)) {
        if (d_ < 1 || p_ < 1) throw DomainError("Integrand: dimensions must be >= 1");
    }

private:
    int d_;
    int p_;
    std::string name_;
};

/// psi_{n,k}(u_0,...,u_k) = u_0 + ... + u_k and Psi = identity on paths;
/// the stochastic integral of the path against itself.
std::shared_ptr<Integrand> integrand_identity(int d);

/// V_k for every k from a full row of increments (columns U_0..U_count).
Eigen::MatrixXd prelimit_sequence(const Integrand& f, const Eigen::MatrixXd& increments);

/// The prelimit functional applied to an arbitrary path alpha on a grid:
/// value at piece j is psi_{n,j}(alpha(0), alpha(1/n)-alpha(0), ...,
/// alpha(j/n)-alpha((j-1)/n)). For alpha a step path built from its own
/// increments this reproduces the V_k sequence.
Eigen::MatrixXd prelimit_on_grid(const Integrand& f,
                                 const std::function<Eigen::VectorXd(double)>& alpha,
                                 const TimeGrid& grid);

/// Psi applied to a sampled path (times strictly increasing).
Eigen::MatrixXd limit_on_samples(const Integrand& f, const std::vector<double>& times,
                                 const Eigen::MatrixXd& values);

/// Y with piece value sum_{k<=j} V_{k-1} (x) (U_k), the stochastic integral
/// of the step process V- against the step process U. Exact finite sums.
StepPath step_stochastic_integral(const StepPath& v, const StepPath& u);

/// Coefficient maps of the augmented pair (U, Y): the drift stacks
/// beta over psi (x) beta, the dispersion stacks gamma over the row-block
/// scaling of gamma by psi. psi is the limit-functional value at s, supplied
/// by the caller.
struct StackedCoefficients {
    int d = 1, r = 1, p = 1;
    const DiffusionSpec* spec = nullptr;

    void beta(double s, const Eigen::VectorXd& x, const Eigen::VectorXd& psi,
              Eigen::VectorXd& out) const;
    void gamma(double s, const Eigen::VectorXd& x, const Eigen::VectorXd& psi,
               Eigen::MatrixXd& out) const;
};

StackedCoefficients stacked_coefficients(const DiffusionSpec& spec, const Integrand& f);

/// Conditional moments of the stacked increment [U; V (x) U] given the
/// realized V: with A = [I; V (x) I], mean = A m and cov = A Sigma A^T are
/// exact; the Lindeberg and tail transforms use the composite threshold
/// |U| (1 + |V|) > theta, so lindeberg(theta) = (1+|V|^2) L(theta/(1+|V|))
/// and tail(theta) = base_tail(theta/(1+|V|)).
struct StackedMoments {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
    std::function<double(double)> lindeberg;
    std::function<double(double)> tail;
};

StackedMoments stacked_conditional_moments(const Eigen::VectorXd& m, const Eigen::MatrixXd& Sigma,
                                           std::function<double(double)> base_lindeberg,
                                           std::function<double(double)> base_tail,
                                           const Eigen::VectorXd& v);

/// Builds the stacking matrix A = [I_d; V (x) I_d] ((d + pd) x d).
Eigen::MatrixXd stacking_matrix(const Eigen::VectorXd& v, int d);

/// sup-norm gaps between a sequence of sampled paths and a sampled limit;
/// a falsification utility for candidate integrand families.
struct LuReport {
    std::vector<double> sups;
    bool nonincreasing = true;
};

LuReport lu_convergence_check(const std::vector<SampledPath>& fns, const SampledPath& limit);

}  // namespace stepdiff
