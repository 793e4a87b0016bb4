#include "stepdiff/array_model.hpp"

#include <cmath>
#include <sstream>

namespace stepdiff {

namespace {

constexpr double kUniformHalfWidth = 1.7320508075688772;  // sqrt(3): unit variance

/// E[xi^2 1{|xi| > a}] for xi ~ Uniform[-b, b], b = sqrt(3).
double uniform_m2_tail(double a) {
    const double b = kUniformHalfWidth;
    if (a >= b) return 0.0;
    if (a < 0.0) a = 0.0;
    return (b * b * b - a * a * a) / (3.0 * b);
}

/// P(|xi| > a) for the same law.
double uniform_tail(double a) {
    const double b = kUniformHalfWidth;
    if (a >= b) return 0.0;
    if (a < 0.0) a = 0.0;
    return 1.0 - a / b;
}

std::string render_state(long k, const Eigen::VectorXd& x) {
    std::ostringstream os;
    os << "k=" << k << " state=[";
    for (long i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x(i);
    os << "]";
    return os.str();
}

// ---------------------------------------------------------------------------
// Scaled i.i.d. increments
// ---------------------------------------------------------------------------

class LindebergIidModel final : public ArrayModel {
public:
    LindebergIidModel(int d, ScaleLaw law, const Eigen::MatrixXd& Sigma, long n)
        : ArrayModel(d, n, "lindeberg_iid"), law_(law), sigma_(Sigma) {
        if (Sigma.rows() != d || Sigma.cols() != d)
            throw ConfigError("lindeberg_iid: Sigma must be d x d");
        if ((Sigma - Sigma.transpose()).cwiseAbs().maxCoeff() >
            1e-12 * std::max(1.0, Sigma.cwiseAbs().maxCoeff()))
            throw ConfigError("lindeberg_iid: Sigma must be symmetric");

        if (law_ != ScaleLaw::Normal) {
            // Rademacher/Uniform are unit-variance product laws; only Sigma = I
            // is meaningful there.
            if ((Sigma - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-12)
                throw ConfigError("lindeberg_iid: non-normal laws require Sigma = I");
            isotropic_ = true;
            iso_var_ = 1.0;
            transform_ = Eigen::MatrixXd::Identity(d, d);
            return;
        }

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Sigma);
        if (es.info() != Eigen::Success)
            throw ConfigError("lindeberg_iid: eigendecomposition of Sigma failed");
        const double max_ev = es.eigenvalues().maxCoeff();
        if (es.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, max_ev))
            throw ConfigError("lindeberg_iid: Sigma must be positive semidefinite");
        Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
        transform_ = es.eigenvectors() * ev.cwiseSqrt().asDiagonal() *
                     es.eigenvectors().transpose();

        iso_var_ = Sigma(0, 0);
        isotropic_ = true;
        for (int i = 0; i < d && isotropic_; ++i) {
            for (int j = 0; j < d; ++j) {
                const double want = (i == j) ? iso_var_ : 0.0;
                if (std::abs(Sigma(i, j) - want) > 1e-14 * std::max(1.0, iso_var_)) {
                    isotropic_ = false;
                    break;
                }
            }
        }
        if (d > 1 && !isotropic_)
            throw ConfigError(
                "lindeberg_iid: normal law with anisotropic Sigma has no closed-form "
                "norm tails in d > 1; not supported");
    }

    void cond_mean(const RowHistory&, Eigen::VectorXd& out) const override {
        out.setZero(dim());
    }

    void cond_cov(const RowHistory&, Eigen::MatrixXd& out) const override {
        out = sigma_ / static_cast<double>(n());
    }

    double cond_lindeberg(const RowHistory&, double theta) const override {
        const double nn = static_cast<double>(n());
        const double root_n = std::sqrt(nn);
        switch (law_) {
            case ScaleLaw::Normal:
                if (dim() == 1) {
                    return gaussian_truncated_square(0.0, std::sqrt(iso_var_ / nn), theta);
                } else {
                    const double x = theta * theta * nn / iso_var_;
                    return (iso_var_ / nn) * chi_square_partial_mean(dim(), x);
                }
            case ScaleLaw::Rademacher: {
                const double norm = std::sqrt(static_cast<double>(dim()) / nn);
                return (norm > theta) ? static_cast<double>(dim()) / nn : 0.0;
            }
            case ScaleLaw::Uniform: {
                if (dim() == 1) return uniform_m2_tail(theta * root_n) / nn;
                const double a = theta * root_n / std::sqrt(static_cast<double>(dim()));
                const double d = static_cast<double>(dim());
                const double bound = (d / nn) * (uniform_m2_tail(a) + (d - 1.0) * uniform_tail(a));
                return std::min(bound, d / nn);
            }
        }
        return 0.0;
    }

    double cond_tail(const RowHistory&, double theta) const override {
        const double nn = static_cast<double>(n());
        const double root_n = std::sqrt(nn);
        switch (law_) {
            case ScaleLaw::Normal:
                if (dim() == 1) return gaussian_abs_tail(0.0, std::sqrt(iso_var_ / nn), theta);
                return chi_square_sf(dim(), theta * theta * nn / iso_var_);
            case ScaleLaw::Rademacher:
                return (std::sqrt(static_cast<double>(dim()) / nn) > theta) ? 1.0 : 0.0;
            case ScaleLaw::Uniform: {
                if (dim() == 1) return uniform_tail(theta * root_n);
                const double a = theta * root_n / std::sqrt(static_cast<double>(dim()));
                return std::min(1.0, dim() * uniform_tail(a));
            }
        }
        return 0.0;
    }

    bool lindeberg_exact() const override {
        return dim() == 1 || law_ == ScaleLaw::Normal || law_ == ScaleLaw::Rademacher;
    }

    bool has_truncated_moments() const override {
        return dim() == 1 && law_ != ScaleLaw::Uniform;
    }

    RampMoments cond_ramp_moments(const RowHistory& h, const TruncationFn& trunc,
                                  double c) const override {
        if (!has_truncated_moments()) return ArrayModel::cond_ramp_moments(h, trunc, c);
        const double v = 1.0 / std::sqrt(static_cast<double>(n()));
        if (law_ == ScaleLaw::Normal)
            return gaussian_ramp_moments(0.0, std::sqrt(iso_var_) * v, trunc.K, c);
        const RampMoments plus = point_ramp_moments(v, trunc.K, c);
        const RampMoments minus = point_ramp_moments(-v, trunc.K, c);
        return {0.5 * (plus.mean + minus.mean), 0.5 * (plus.second + minus.second)};
    }

    void sample_initial(RngStream&, Eigen::VectorXd& out) const override {
        out.setZero(dim());
    }

    void sample_next(const RowHistory&, RngStream& rng, Eigen::VectorXd& out) const override {
        out.resize(dim());
        const double root_n = std::sqrt(static_cast<double>(n()));
        switch (law_) {
            case ScaleLaw::Normal: {
                static thread_local Eigen::VectorXd z;
                z.resize(dim());
                for (int i = 0; i < dim(); ++i) z(i) = rng.normal();
                if (isotropic_) {
                    out = (std::sqrt(iso_var_) / root_n) * z;
                } else {
                    out.noalias() = transform_ * z / root_n;
                }
                break;
            }
            case ScaleLaw::Rademacher:
                for (int i = 0; i < dim(); ++i) out(i) = rng.sign() / root_n;
                break;
            case ScaleLaw::Uniform:
                for (int i = 0; i < dim(); ++i)
                    out(i) = kUniformHalfWidth * (2.0 * rng.uniform01() - 1.0) / root_n;
                break;
        }
    }

private:
    ScaleLaw law_;
    Eigen::MatrixXd sigma_;
    Eigen::MatrixXd transform_;  // B with B B^T = Sigma
    bool isotropic_ = false;
    double iso_var_ = 1.0;
};

// ---------------------------------------------------------------------------
// Scalar triple-pattern array (fresh / repeat / negate)
// ---------------------------------------------------------------------------

class NongoodTripleModel final : public ArrayModel {
public:
    explicit NongoodTripleModel(long n) : ArrayModel(1, n, "nongood_triple") {}

    void cond_mean(const RowHistory& h, Eigen::VectorXd& out) const override {
        out.resize(1);
        switch (h.k % 3) {
            case 1: out(0) = 0.0; break;
            case 2: out(0) = h.last(0); break;
            default: out(0) = -h.last(0); break;
        }
    }

    void cond_cov(const RowHistory& h, Eigen::MatrixXd& out) const override {
        out.resize(1, 1);
        out(0, 0) = (h.k % 3 == 1) ? 1.0 / static_cast<double>(n()) : 0.0;
    }

    double cond_lindeberg(const RowHistory& h, double theta) const override {
        if (h.k % 3 == 1)
            return gaussian_truncated_square(0.0, 1.0 / std::sqrt(static_cast<double>(n())), theta);
        const double v = h.last(0);
        return (std::abs(v) > theta) ? v * v : 0.0;
    }

    double cond_tail(const RowHistory& h, double theta) const override {
        if (h.k % 3 == 1)
            return gaussian_abs_tail(0.0, 1.0 / std::sqrt(static_cast<double>(n())), theta);
        return (std::abs(h.last(0)) > theta) ? 1.0 : 0.0;
    }

    bool has_truncated_moments() const override { return true; }

    RampMoments cond_ramp_moments(const RowHistory& h, const TruncationFn& trunc,
                                  double c) const override {
        switch (h.k % 3) {
            case 1:
                return gaussian_ramp_moments(0.0, 1.0 / std::sqrt(static_cast<double>(n())),
                                             trunc.K, c);
            case 2: return point_ramp_moments(h.last(0), trunc.K, c);
            default: return point_ramp_moments(-h.last(0), trunc.K, c);
        }
    }

    void sample_initial(RngStream&, Eigen::VectorXd& out) const override { out.setZero(1); }

    void sample_next(const RowHistory& h, RngStream& rng, Eigen::VectorXd& out) const override {
        out.resize(1);
        switch (h.k % 3) {
            case 1: out(0) = rng.normal() / std::sqrt(static_cast<double>(n())); break;
            case 2: out(0) = h.last(0); break;
            default: out(0) = -h.last(0); break;
        }
    }
};

// ---------------------------------------------------------------------------
// Generic array targeting a DiffusionSpec
// ---------------------------------------------------------------------------

class EulerArrayModel final : public ArrayModel {
public:
    EulerArrayModel(DiffusionSpec spec, NoiseLaw noise, long n)
        : ArrayModel(spec.d, n, "euler_array"), spec_(std::move(spec)), noise_(noise) {
        if (!spec_.beta || !spec_.gamma || !spec_.initial)
            throw ConfigError("euler_array: spec must provide beta, gamma and initial");
        if (noise_ == NoiseLaw::Rademacher && spec_.r > 16)
            throw ConfigError("euler_array: rademacher enumeration limited to r <= 16");
    }

    void cond_mean(const RowHistory& h, Eigen::VectorXd& out) const override {
        eval_beta(h, out);
        out /= static_cast<double>(n());
    }

    void cond_cov(const RowHistory& h, Eigen::MatrixXd& out) const override {
        static thread_local Eigen::MatrixXd g;
        eval_gamma(h, g);
        out.noalias() = g * g.transpose() / static_cast<double>(n());
    }

    double cond_lindeberg(const RowHistory& h, double theta) const override {
        return tail_or_lindeberg(h, theta, false);
    }

    double cond_tail(const RowHistory& h, double theta) const override {
        return tail_or_lindeberg(h, theta, true);
    }

    bool lindeberg_exact() const override {
        return dim() == 1 || noise_ == NoiseLaw::Rademacher;
    }

    bool has_truncated_moments() const override { return dim() == 1; }

    RampMoments cond_ramp_moments(const RowHistory& h, const TruncationFn& trunc,
                                  double c) const override {
        if (dim() != 1) return ArrayModel::cond_ramp_moments(h, trunc, c);
        static thread_local Eigen::VectorXd b;
        static thread_local Eigen::MatrixXd g;
        eval_beta(h, b);
        eval_gamma(h, g);
        const double m = b(0) / static_cast<double>(n());
        if (noise_ == NoiseLaw::Normal) {
            double s2 = 0.0;
            for (long j = 0; j < g.cols(); ++j) s2 += g(0, j) * g(0, j);
            const double s = std::sqrt(s2 / static_cast<double>(n()));
            if (s > 0.0) return gaussian_ramp_moments(m, s, trunc.K, c);
            return point_ramp_moments(m, trunc.K, c);
        }
        // Rademacher: enumerate sign vectors.
        const int r = spec_.r;
        const double root_n = std::sqrt(static_cast<double>(n()));
        double mean = 0.0, second = 0.0;
        const long total = 1L << r;
        for (long mask = 0; mask < total; ++mask) {
            double v = m;
            for (int j = 0; j < r; ++j)
                v += ((mask >> j) & 1 ? 1.0 : -1.0) * g(0, j) / root_n;
            const RampMoments pm = point_ramp_moments(v, trunc.K, c);
            mean += pm.mean;
            second += pm.second;
        }
        return {mean / static_cast<double>(total), second / static_cast<double>(total)};
    }

    void sample_initial(RngStream& rng, Eigen::VectorXd& out) const override {
        spec_.initial(rng, out);
        if (!out.allFinite())
            throw ModelRuntimeError("euler_array: non-finite initial draw", 0);
    }

    void sample_next(const RowHistory& h, RngStream& rng, Eigen::VectorXd& out) const override {
        static thread_local Eigen::VectorXd b;
        static thread_local Eigen::MatrixXd g;
        static thread_local Eigen::VectorXd xi;
        eval_beta(h, b);
        eval_gamma(h, g);
        xi.resize(spec_.r);
        for (int j = 0; j < spec_.r; ++j)
            xi(j) = (noise_ == NoiseLaw::Normal) ? rng.normal() : rng.sign();
        const double nn = static_cast<double>(n());
        out.resize(dim());
        out = b / nn;
        out.noalias() += g * xi / std::sqrt(nn);
    }

private:
    void eval_beta(const RowHistory& h, Eigen::VectorXd& out) const {
        spec_.beta(static_cast<double>(h.k) / static_cast<double>(n()), h.prefix, out);
        if (out.size() != dim() || !out.allFinite())
            throw ModelRuntimeError("euler_array: non-finite drift at " +
                                        render_state(h.k, h.prefix),
                                    h.k);
    }

    void eval_gamma(const RowHistory& h, Eigen::MatrixXd& out) const {
        spec_.gamma(static_cast<double>(h.k) / static_cast<double>(n()), h.prefix, out);
        if (out.rows() != dim() || out.cols() != spec_.r || !out.allFinite())
            throw ModelRuntimeError("euler_array: non-finite dispersion at " +
                                        render_state(h.k, h.prefix),
                                    h.k);
    }

    double tail_or_lindeberg(const RowHistory& h, double theta, bool want_tail) const {
        static thread_local Eigen::VectorXd b;
        static thread_local Eigen::MatrixXd g;
        eval_beta(h, b);
        eval_gamma(h, g);
        const double nn = static_cast<double>(n());

        if (noise_ == NoiseLaw::Rademacher) {
            // Exact enumeration over the 2^r sign vectors.
            const int r = spec_.r;
            const long total = 1L << r;
            const double root_n = std::sqrt(nn);
            double acc = 0.0;
            static thread_local Eigen::VectorXd v;
            for (long mask = 0; mask < total; ++mask) {
                v = b / nn;
                for (int j = 0; j < r; ++j)
                    v += ((mask >> j) & 1 ? 1.0 : -1.0) * g.col(j) / root_n;
                const double nrm = v.norm();
                if (nrm > theta) acc += want_tail ? 1.0 : nrm * nrm;
            }
            return acc / static_cast<double>(total);
        }

        // Normal noise: U ~ N(m, C) with m = beta/n, C = gamma gamma^T / n.
        if (dim() == 1) {
            const double m = b(0) / nn;
            double s2 = 0.0;
            for (long j = 0; j < g.cols(); ++j) s2 += g(0, j) * g(0, j);
            const double s = std::sqrt(s2 / nn);
            return want_tail ? gaussian_abs_tail(m, s, theta)
                             : gaussian_truncated_square(m, s, theta);
        }

        // d > 1: conservative union bound on the norm event |U| > theta,
        // component thresholds theta / sqrt(d).
        static thread_local Eigen::VectorXd m;
        static thread_local Eigen::MatrixXd C;
        m = b / nn;
        C.noalias() = g * g.transpose() / nn;
        const double comp = theta / std::sqrt(static_cast<double>(dim()));
        double tail_bound = 0.0;
        for (int i = 0; i < dim(); ++i)
            tail_bound += gaussian_abs_tail(m(i), std::sqrt(std::max(C(i, i), 0.0)), comp);
        tail_bound = std::min(tail_bound, 1.0);
        if (want_tail) return tail_bound;

        const double second = C.trace() + m.squaredNorm();
        const double fourth = second * second + 2.0 * (C * C).trace() +
                              4.0 * m.dot(C * m);
        // Cauchy-Schwarz: E[|U|^2 1{|U|>theta}] <= sqrt(E|U|^4 P(|U|>theta)).
        return std::min(second, std::sqrt(fourth * tail_bound));
    }

    DiffusionSpec spec_;
    NoiseLaw noise_;
};

}  // namespace

RampMoments ArrayModel::cond_ramp_moments(const RowHistory&, const TruncationFn&, double) const {
    throw CapabilityError("model '" + name_ +
                          "' does not provide truncated conditional moments; "
                          "use an untruncated variant");
}

std::shared_ptr<ArrayModel> model_lindeberg_iid(int d, ScaleLaw law, const Eigen::MatrixXd& Sigma,
                                                long n) {
    return std::make_shared<LindebergIidModel>(d, law, Sigma, n);
}

std::shared_ptr<ArrayModel> model_lindeberg_iid(int d, ScaleLaw law, long n) {
    return model_lindeberg_iid(d, law, Eigen::MatrixXd::Identity(d, d), n);
}

std::shared_ptr<ArrayModel> model_nongood_triple(long n) {
    return std::make_shared<NongoodTripleModel>(n);
}

std::shared_ptr<ArrayModel> model_euler_array(DiffusionSpec spec, NoiseLaw noise, long n) {
    return std::make_shared<EulerArrayModel>(std::move(spec), noise, n);
}

RowHistory RowSample::history_at(long k) const {
    if (k < 1 || k >= increments.cols())
        throw ContractViolation("RowSample::history_at: k out of range");
    RowHistory h;
    h.k = k;
    h.prefix = path_values.col(k - 1);
    h.last = increments.col(k - 1);
    return h;
}

RowSample sample_row(const ArrayModel& model, const TimeGrid& grid, RngStream rng) {
    const int d = model.dim();
    const long count = grid.count;
    RowSample out;
    out.increments.resize(d, count + 1);
    out.path_values.resize(d, count + 1);
    out.cond_means.resize(d, count);
    out.cond_covs.resize(static_cast<std::size_t>(count));

    Eigen::VectorXd u(d), mean_buf(d);
    Eigen::MatrixXd cov_buf(d, d);
    RowHistory h;
    model.sample_initial(rng, u);
    out.increments.col(0) = u;
    out.path_values.col(0) = u;
    h.k = 1;
    h.prefix = u;
    h.last = u;
    for (long k = 1; k <= count; ++k) {
        model.cond_mean(h, mean_buf);
        model.cond_cov(h, cov_buf);
        out.cond_means.col(k - 1) = mean_buf;
        out.cond_covs[static_cast<std::size_t>(k - 1)] = cov_buf;
        model.sample_next(h, rng, u);
        out.increments.col(k) = u;
        out.path_values.col(k) = out.path_values.col(k - 1) + u;
        h.k = k + 1;
        h.prefix = out.path_values.col(k);
        h.last = u;
    }
    return out;
}

Eigen::MatrixXd sample_row_increments(const ArrayModel& model, const TimeGrid& grid,
                                      RngStream rng) {
    const int d = model.dim();
    const long count = grid.count;
    Eigen::MatrixXd inc(d, count + 1);
    Eigen::VectorXd u(d);
    RowHistory h;
    model.sample_initial(rng, u);
    inc.col(0) = u;
    h.k = 1;
    h.prefix = u;
    h.last = u;
    for (long k = 1; k <= count; ++k) {
        model.sample_next(h, rng, u);
        inc.col(k) = u;
        h.k = k + 1;
        h.prefix += u;
        h.last = u;
    }
    return inc;
}

}  // namespace stepdiff
