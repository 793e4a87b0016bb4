#include "stepdiff/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "stepdiff/parallel.hpp"
#include "stepdiff/rng.hpp"

namespace stepdiff {

double kolmogorov_sf(double lambda) {
    if (lambda <= 0.0) return 1.0;
    if (lambda < 1.18) {
        // theta-function form, accurate for small lambda
        const double y = std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda);
        const double q = std::exp(-y);
        const double cdf = std::sqrt(2.0 * std::numbers::pi) / lambda *
                           (q + std::pow(q, 9.0) + std::pow(q, 25.0) + std::pow(q, 49.0));
        return std::max(0.0, std::min(1.0, 1.0 - cdf));
    }
    double sum = 0.0;
    double sign = 1.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = std::exp(-2.0 * j * j * lambda * lambda);
        sum += sign * term;
        if (term < 1e-18) break;
        sign = -sign;
    }
    return std::max(0.0, std::min(1.0, 2.0 * sum));
}

namespace {

std::vector<double> sorted_scalar(const FunctionalSample& s, const char* who) {
    if (!s.scalar()) throw ContractViolation(std::string(who) + ": scalar sample required");
    s.validate();
    std::vector<double> v(s.values.data(), s.values.data() + s.values.cols());
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace

KsResult ks_two_sample(const FunctionalSample& a, const FunctionalSample& b) {
    const std::vector<double> xa = sorted_scalar(a, "ks_two_sample");
    const std::vector<double> xb = sorted_scalar(b, "ks_two_sample");
    const double na = static_cast<double>(xa.size());
    const double nb = static_cast<double>(xb.size());

    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < xa.size() || j < xb.size()) {
        double x;
        if (i >= xa.size()) {
            x = xb[j];
        } else if (j >= xb.size()) {
            x = xa[i];
        } else {
            x = std::min(xa[i], xb[j]);
        }
        while (i < xa.size() && xa[i] == x) ++i;
        while (j < xb.size() && xb[j] == x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }

    const double ne = na * nb / (na + nb);
    KsResult r;
    r.d_stat = d;
    r.p_value = kolmogorov_sf(std::sqrt(ne) * d);
    r.na = static_cast<long>(xa.size());
    r.nb = static_cast<long>(xb.size());
    return r;
}

KsResult ks_one_sample(const FunctionalSample& a, const std::function<double(double)>& cdf) {
    const std::vector<double> x = sorted_scalar(a, "ks_one_sample");
    const double m = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = cdf(x[i]);
        d = std::max(d, static_cast<double>(i + 1) / m - f);
        d = std::max(d, f - static_cast<double>(i) / m);
    }
    KsResult r;
    r.d_stat = d;
    r.p_value = kolmogorov_sf(std::sqrt(m) * d);
    r.na = static_cast<long>(x.size());
    r.nb = 0;
    return r;
}

namespace {

/// Deterministic subsample of `keep` column indices out of M.
std::vector<long> subsample_indices(long M, long keep, std::uint64_t seed) {
    std::vector<long> idx(static_cast<std::size_t>(M));
    std::iota(idx.begin(), idx.end(), 0L);
    RngStream rng(seed_schedule(seed, 0, StreamPurpose::Subsample));
    for (long i = 0; i < keep; ++i) {
        const long j = i + static_cast<long>(rng.uniform01() * static_cast<double>(M - i));
        std::swap(idx[static_cast<std::size_t>(i)],
                  idx[static_cast<std::size_t>(std::min(j, M - 1))]);
    }
    idx.resize(static_cast<std::size_t>(keep));
    return idx;
}

Eigen::MatrixXd take_columns(const Eigen::MatrixXd& m, const std::vector<long>& idx) {
    Eigen::MatrixXd out(m.rows(), static_cast<long>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) out.col(static_cast<long>(i)) = m.col(idx[i]);
    return out;
}

/// mean_i mean_j |X_i - Y_j| with per-i partials reduced in index order.
double mean_cross_distance(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, int workers,
                           bool serial) {
    std::vector<double> partial(static_cast<std::size_t>(x.cols()), 0.0);
    auto body = [&](std::size_t i) {
        double s = 0.0;
        for (long j = 0; j < y.cols(); ++j)
            s += (x.col(static_cast<long>(i)) - y.col(j)).norm();
        partial[i] = s;
    };
    if (serial) {
        serial_for_index(partial.size(), body);
    } else {
        parallel_for_index(partial.size(), workers, body);
    }
    double total = 0.0;
    for (double s : partial) total += s;
    return total / (static_cast<double>(x.cols()) * static_cast<double>(y.cols()));
}

EnergyResult energy_impl(const FunctionalSample& a, const FunctionalSample& b,
                         long exact_threshold, std::uint64_t subsample_seed, int workers,
                         bool serial) {
    if (a.dim() != b.dim()) throw ContractViolation("energy_distance: dimension mismatch");
    if (a.size() < 1 || b.size() < 1)
        throw DomainError("energy_distance: empty sample");
    if (exact_threshold < 2) throw DomainError("energy_distance: threshold must be >= 2");

    EnergyResult r;
    r.subsample_seed = subsample_seed;
    Eigen::MatrixXd xa = a.values;
    Eigen::MatrixXd xb = b.values;
    if (xa.cols() > exact_threshold) {
        xa = take_columns(xa, subsample_indices(xa.cols(), exact_threshold, subsample_seed));
        r.subsampled = true;
    }
    if (xb.cols() > exact_threshold) {
        xb = take_columns(xb, subsample_indices(xb.cols(), exact_threshold, subsample_seed + 1));
        r.subsampled = true;
    }
    r.used_a = xa.cols();
    r.used_b = xb.cols();
    const double cross = mean_cross_distance(xa, xb, workers, serial);
    const double within_a = mean_cross_distance(xa, xa, workers, serial);
    const double within_b = mean_cross_distance(xb, xb, workers, serial);
    r.value = 2.0 * cross - within_a - within_b;
    return r;
}

}  // namespace

EnergyResult energy_distance(const FunctionalSample& a, const FunctionalSample& b,
                             long exact_threshold, std::uint64_t subsample_seed, int workers) {
    return energy_impl(a, b, exact_threshold, subsample_seed, workers, false);
}

EnergyResult energy_distance_serial(const FunctionalSample& a, const FunctionalSample& b,
                                    long exact_threshold, std::uint64_t subsample_seed) {
    return energy_impl(a, b, exact_threshold, subsample_seed, 1, true);
}

MomentSummary moment_summary(const FunctionalSample& a) {
    a.validate();
    const long d = a.dim();
    const long m = a.size();
    MomentSummary s;
    s.count = m;
    s.mean = a.values.rowwise().mean();
    Eigen::MatrixXd centered = a.values.colwise() - s.mean;
    s.cov = centered * centered.transpose() / static_cast<double>(m - 1);
    s.se = (s.cov.diagonal() / static_cast<double>(m)).cwiseSqrt();
    const double z = 1.959963984540054;  // Phi^{-1}(0.975)
    s.ci_lo = s.mean - z * s.se;
    s.ci_hi = s.mean + z * s.se;
    (void)d;
    return s;
}

}  // namespace stepdiff
