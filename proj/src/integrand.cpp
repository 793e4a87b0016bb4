#include "stepdiff/integrand.hpp"

namespace stepdiff {

void kron_into(const Eigen::VectorXd& v, const Eigen::VectorXd& u, Eigen::VectorXd& out) {
    const long p = v.size(), d = u.size();
    out.resize(p * d);
    for (long i = 0; i < p; ++i) out.segment(i * d, d) = v(i) * u;
}

Eigen::VectorXd kron(const Eigen::VectorXd& v, const Eigen::VectorXd& u) {
    Eigen::VectorXd out;
    kron_into(v, u, out);
    return out;
}

namespace {

/// Running prefix sum: V_k = U_0 + ... + U_k; Psi = identity.
class IdentityIntegrand final : public Integrand {
public:
    explicit IdentityIntegrand(int d) : Integrand(d, d, "identity") {}

    struct SumState final : State {
        Eigen::VectorXd sum;
        long next_k = 0;
    };

    std::unique_ptr<State> new_state() const override { return std::make_unique<SumState>(); }

    void prelimit_step(State& s, long k, const Eigen::VectorXd& u_k,
                       Eigen::VectorXd& v_k) const override {
        auto& st = static_cast<SumState&>(s);
        if (k != st.next_k) throw ContractViolation("identity integrand: steps must be in order");
        if (k == 0) {
            st.sum = u_k;
        } else {
            st.sum += u_k;
        }
        ++st.next_k;
        v_k = st.sum;
    }

    std::unique_ptr<State> new_limit_state() const override {
        return std::make_unique<SumState>();
    }

    void limit_step(State&, double, const Eigen::VectorXd& x,
                    Eigen::VectorXd& w) const override {
        w = x;
    }
};

}  // namespace

std::shared_ptr<Integrand> integrand_identity(int d) {
    return std::make_shared<IdentityIntegrand>(d);
}

Eigen::MatrixXd prelimit_sequence(const Integrand& f, const Eigen::MatrixXd& increments) {
    if (increments.rows() != f.input_dim())
        throw ContractViolation("prelimit_sequence: increment dimension mismatch");
    Eigen::MatrixXd v(f.output_dim(), increments.cols());
    auto state = f.new_state();
    Eigen::VectorXd buf(f.output_dim());
    for (long k = 0; k < increments.cols(); ++k) {
        f.prelimit_step(*state, k, increments.col(k), buf);
        v.col(k) = buf;
    }
    return v;
}

Eigen::MatrixXd prelimit_on_grid(const Integrand& f,
                                 const std::function<Eigen::VectorXd(double)>& alpha,
                                 const TimeGrid& grid) {
    Eigen::MatrixXd inc(f.input_dim(), grid.count + 1);
    Eigen::VectorXd prev = alpha(0.0);
    if (prev.size() != f.input_dim())
        throw ContractViolation("prelimit_on_grid: path dimension mismatch");
    inc.col(0) = prev;
    for (long j = 1; j <= grid.count; ++j) {
        Eigen::VectorXd cur = alpha(grid.point(j));
        inc.col(j) = cur - prev;
        prev = std::move(cur);
    }
    return prelimit_sequence(f, inc);
}

Eigen::MatrixXd limit_on_samples(const Integrand& f, const std::vector<double>& times,
                                 const Eigen::MatrixXd& values) {
    if (static_cast<long>(times.size()) != values.cols())
        throw ContractViolation("limit_on_samples: times/values mismatch");
    if (values.rows() != f.input_dim())
        throw ContractViolation("limit_on_samples: path dimension mismatch");
    Eigen::MatrixXd w(f.output_dim(), values.cols());
    auto state = f.new_limit_state();
    Eigen::VectorXd buf(f.output_dim());
    for (long j = 0; j < values.cols(); ++j) {
        f.limit_step(*state, times[static_cast<std::size_t>(j)], values.col(j), buf);
        w.col(j) = buf;
    }
    return w;
}

StepPath step_stochastic_integral(const StepPath& v, const StepPath& u) {
    if (!(v.grid() == u.grid()))
        throw ContractViolation("step_stochastic_integral: integrand and integrator grids differ");
    const long count = u.grid().count;
    const int p = v.dim(), d = u.dim();
    Eigen::MatrixXd y(p * d, count + 1);
    y.col(0).setZero();
    Eigen::VectorXd term(p * d);
    Eigen::VectorXd du(d);
    for (long k = 1; k <= count; ++k) {
        du = u.piece(k) - u.piece(k - 1);
        kron_into(v.piece(k - 1), du, term);
        y.col(k) = y.col(k - 1) + term;
    }
    return StepPath(p * d, u.grid(), std::move(y));
}

void StackedCoefficients::beta(double s, const Eigen::VectorXd& x, const Eigen::VectorXd& psi,
                               Eigen::VectorXd& out) const {
    static thread_local Eigen::VectorXd b;
    spec->beta(s, x, b);
    out.resize(d + p * d);
    out.head(d) = b;
    for (int i = 0; i < p; ++i) out.segment(d + i * d, d) = psi(i) * b;
}

void StackedCoefficients::gamma(double s, const Eigen::VectorXd& x, const Eigen::VectorXd& psi,
                                Eigen::MatrixXd& out) const {
    static thread_local Eigen::MatrixXd g;
    spec->gamma(s, x, g);
    out.resize(d + p * d, r);
    out.topRows(d) = g;
    for (int i = 0; i < p; ++i) out.middleRows(d + i * d, d) = psi(i) * g;
}

StackedCoefficients stacked_coefficients(const DiffusionSpec& spec, const Integrand& f) {
    if (f.input_dim() != spec.d)
        throw ConfigError("stacked_coefficients: integrand input dimension != spec.d");
    return StackedCoefficients{spec.d, spec.r, f.output_dim(), &spec};
}

Eigen::MatrixXd stacking_matrix(const Eigen::VectorXd& v, int d) {
    const long p = v.size();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d + p * d, d);
    a.topRows(d).setIdentity();
    for (long i = 0; i < p; ++i)
        a.middleRows(d + i * d, d) = v(i) * Eigen::MatrixXd::Identity(d, d);
    return a;
}

StackedMoments stacked_conditional_moments(const Eigen::VectorXd& m, const Eigen::MatrixXd& Sigma,
                                           std::function<double(double)> base_lindeberg,
                                           std::function<double(double)> base_tail,
                                           const Eigen::VectorXd& v) {
    const int d = static_cast<int>(m.size());
    if (Sigma.rows() != d || Sigma.cols() != d)
        throw ContractViolation("stacked_conditional_moments: Sigma must be d x d");
    const Eigen::MatrixXd a = stacking_matrix(v, d);
    StackedMoments out;
    out.mean = a * m;
    out.cov = a * Sigma * a.transpose();
    const double scale = 1.0 + v.norm();
    const double factor = 1.0 + v.squaredNorm();
    out.lindeberg = [factor, scale, L = std::move(base_lindeberg)](double theta) {
        return factor * L(theta / scale);
    };
    out.tail = [scale, t = std::move(base_tail)](double theta) { return t(theta / scale); };
    return out;
}

LuReport lu_convergence_check(const std::vector<SampledPath>& fns, const SampledPath& limit) {
    LuReport report;
    report.sups.reserve(fns.size());
    for (const auto& f : fns) report.sups.push_back(sup_norm_diff(f, limit));
    for (std::size_t i = 1; i < report.sups.size(); ++i)
        if (report.sups[i] > report.sups[i - 1]) report.nonincreasing = false;
    return report;
}

}  // namespace stepdiff
