#include "stepdiff/gaussian_moments.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <limits>
#include <numbers>

#include "stepdiff/errors.hpp"

namespace stepdiff {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779399461;

/// z^j phi(z), with the convention 0 at infinite z.
double zj_pdf(double z, int j) {
    if (std::isinf(z)) return 0.0;
    double zj = 1.0;
    for (int i = 0; i < j; ++i) zj *= z;
    return zj * normal_pdf(z);
}

}  // namespace

double normal_pdf(double z) {
    return kInvSqrt2Pi * std::exp(-0.5 * z * z);
}

double normal_cdf(double z) {
    return 0.5 * std::erfc(-z * std::numbers::sqrt2 / 2.0);
}

double normal_sf(double z) {
    return 0.5 * std::erfc(z * std::numbers::sqrt2 / 2.0);
}

double gaussian_partial_moment(double mu, double sigma, double lo, double hi, int p) {
    if (!(sigma > 0.0)) throw DomainError("gaussian_partial_moment: sigma must be > 0");
    if (p < 0 || p > 4) throw DomainError("gaussian_partial_moment: p must be in {0,...,4}");
    if (!(lo <= hi)) throw DomainError("gaussian_partial_moment: lo must be <= hi");

    const double zl = (lo - mu) / sigma;
    const double zu = (hi - mu) / sigma;

    // I_j = int_zl^zu z^j phi(z) dz by the usual integration-by-parts recurrence.
    double I[5];
    I[0] = normal_sf(zl) - normal_sf(zu);
    if (p >= 1) I[1] = zj_pdf(zl, 0) - zj_pdf(zu, 0);
    for (int j = 2; j <= p; ++j) {
        I[j] = (j - 1) * I[j - 2] + zj_pdf(zl, j - 1) - zj_pdf(zu, j - 1);
    }

    // E[(mu + sigma Z)^p 1{zl<Z<zu}] expanded binomially.
    static const double binom[5][5] = {
        {1, 0, 0, 0, 0}, {1, 1, 0, 0, 0}, {1, 2, 1, 0, 0}, {1, 3, 3, 1, 0}, {1, 4, 6, 4, 1}};
    double acc = 0.0;
    double sig_j = 1.0;
    for (int j = 0; j <= p; ++j) {
        double mu_pow = 1.0;
        for (int i = 0; i < p - j; ++i) mu_pow *= mu;
        acc += binom[p][j] * mu_pow * sig_j * I[j];
        sig_j *= sigma;
    }
    return acc;
}

double gaussian_truncated_square(double mu, double sigma, double theta) {
    if (theta < 0.0) throw DomainError("gaussian_truncated_square: theta must be >= 0");
    if (sigma == 0.0) return (std::abs(mu) > theta) ? mu * mu : 0.0;
    const double inf = std::numeric_limits<double>::infinity();
    return gaussian_partial_moment(mu, sigma, theta, inf, 2) +
           gaussian_partial_moment(mu, sigma, -inf, -theta, 2);
}

double gaussian_abs_tail(double mu, double sigma, double theta) {
    if (theta < 0.0) throw DomainError("gaussian_abs_tail: theta must be >= 0");
    if (sigma == 0.0) return (std::abs(mu) > theta) ? 1.0 : 0.0;
    return normal_sf((theta - mu) / sigma) + normal_sf((theta + mu) / sigma);
}

double chi_square_sf(double dof, double x) {
    if (!(dof > 0.0)) throw DomainError("chi_square_sf: dof must be > 0");
    if (x <= 0.0) return 1.0;
    return boost::math::gamma_q(dof / 2.0, x / 2.0);
}

double chi_square_partial_mean(double dof, double x) {
    return dof * chi_square_sf(dof + 2.0, x);
}

RampMoments gaussian_ramp_moments(double mu, double sigma, double K, double c) {
    if (!(K > 1.0)) throw DomainError("gaussian_ramp_moments: K must be > 1");
    if (!(c > 0.0)) throw DomainError("gaussian_ramp_moments: c must be > 0");
    if (sigma == 0.0) return point_ramp_moments(mu, K, c);

    const double a = 1.0 / (c * K);  // identity region: |x| <= a
    const double b = K / c;          // support bound:   |x| >= b -> 0
    const double kappa = 1.0 / (K - 1.0 / K);

    auto M = [&](double lo, double hi, int p) {
        return gaussian_partial_moment(mu, sigma, lo, hi, p);
    };

    // x rho(c|x|) = x on [-a,a]; kappa (K x - c x^2) on [a,b]; kappa (K x + c x^2) on [-b,-a].
    double mean = M(-a, a, 1);
    mean += kappa * (K * M(a, b, 1) - c * M(a, b, 2));
    mean += kappa * (K * M(-b, -a, 1) + c * M(-b, -a, 2));

    double second = M(-a, a, 2);
    second += kappa * kappa * (K * K * M(a, b, 2) - 2.0 * K * c * M(a, b, 3) + c * c * M(a, b, 4));
    second += kappa * kappa * (K * K * M(-b, -a, 2) + 2.0 * K * c * M(-b, -a, 3) + c * c * M(-b, -a, 4));
    return {mean, second};
}

RampMoments point_ramp_moments(double v, double K, double c) {
    if (!(K > 1.0)) throw DomainError("point_ramp_moments: K must be > 1");
    if (!(c > 0.0)) throw DomainError("point_ramp_moments: c must be > 0");
    const double r = c * std::abs(v);
    double rho;
    if (r <= 1.0 / K) {
        rho = 1.0;
    } else if (r >= K) {
        rho = 0.0;
    } else {
        rho = (K - r) / (K - 1.0 / K);
    }
    const double hv = v * rho;
    return {hv, hv * hv};
}

}  // namespace stepdiff
