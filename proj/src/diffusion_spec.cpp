#include "stepdiff/diffusion_spec.hpp"

#include <cmath>

namespace stepdiff {

namespace {

std::function<void(RngStream&, Eigen::VectorXd&)> zero_initial(int d) {
    return [d](RngStream&, Eigen::VectorXd& out) {
        out.setZero(d);
    };
}

}  // namespace

DiffusionSpec make_spec_zero(int d, int r) {
    if (d < 1 || r < 1) throw DomainError("make_spec_zero: dimensions must be >= 1");
    DiffusionSpec s;
    s.d = d;
    s.r = r;
    s.beta = [d](double, const Eigen::VectorXd&, Eigen::VectorXd& out) { out.setZero(d); };
    s.gamma = [d, r](double, const Eigen::VectorXd&, Eigen::MatrixXd& out) { out.setZero(d, r); };
    s.initial = zero_initial(d);
    s.name = "zero";
    return s;
}

DiffusionSpec make_spec_scaled_wiener(double scale) {
    DiffusionSpec s;
    s.d = 1;
    s.r = 1;
    s.beta = [](double, const Eigen::VectorXd&, Eigen::VectorXd& out) { out.setZero(1); };
    s.gamma = [scale](double, const Eigen::VectorXd&, Eigen::MatrixXd& out) {
        out.resize(1, 1);
        out(0, 0) = scale;
    };
    s.initial = zero_initial(1);
    s.name = "scaled_wiener";
    return s;
}

DiffusionSpec make_spec_ou(double rate, double sigma) {
    DiffusionSpec s;
    s.d = 1;
    s.r = 1;
    s.beta = [rate](double, const Eigen::VectorXd& x, Eigen::VectorXd& out) {
        out.resize(1);
        out(0) = -rate * x(0);
    };
    s.gamma = [sigma](double, const Eigen::VectorXd&, Eigen::MatrixXd& out) {
        out.resize(1, 1);
        out(0, 0) = sigma;
    };
    s.initial = zero_initial(1);
    s.name = "ou";
    return s;
}

DiffusionSpec make_spec_sqrt(double drift, double sigma) {
    DiffusionSpec s;
    s.d = 1;
    s.r = 1;
    s.beta = [drift](double, const Eigen::VectorXd&, Eigen::VectorXd& out) {
        out.resize(1);
        out(0) = drift;
    };
    s.gamma = [sigma](double, const Eigen::VectorXd& x, Eigen::MatrixXd& out) {
        out.resize(1, 1);
        out(0, 0) = sigma * std::sqrt(std::max(x(0), 0.0));
    };
    s.initial = zero_initial(1);
    s.uniqueness_asserted = false;
    s.name = "sqrt";
    return s;
}

DiffusionSpec with_point_initial(DiffusionSpec spec, const Eigen::VectorXd& x0) {
    if (x0.size() != spec.d) throw ContractViolation("with_point_initial: dimension mismatch");
    Eigen::VectorXd v = x0;
    spec.initial = [v](RngStream&, Eigen::VectorXd& out) { out = v; };
    return spec;
}

DiffusionSpec with_gaussian_initial(DiffusionSpec spec, const Eigen::VectorXd& mean,
                                    const Eigen::VectorXd& sd) {
    if (mean.size() != spec.d || sd.size() != spec.d)
        throw ContractViolation("with_gaussian_initial: dimension mismatch");
    Eigen::VectorXd m = mean, s = sd;
    spec.initial = [m, s](RngStream& rng, Eigen::VectorXd& out) {
        out.resize(m.size());
        for (long i = 0; i < m.size(); ++i) out(i) = m(i) + s(i) * rng.normal();
    };
    return spec;
}

}  // namespace stepdiff
