#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <string>

#include "stepdiff/errors.hpp"

namespace stepdiff {

/// A named sample of a scalar or vector functional of simulated paths,
/// column per observation.
struct FunctionalSample {
    std::string name;
    Eigen::MatrixXd values;  // dim x M
    std::string provenance;

    long dim() const { return values.rows(); }
    long size() const { return values.cols(); }
    bool scalar() const { return values.rows() == 1; }

    void validate() const {
        if (values.cols() < 2) throw DomainError("FunctionalSample: need at least 2 observations");
        if (!values.allFinite()) throw DomainError("FunctionalSample: non-finite values");
    }
};

/// Survival function of the Kolmogorov law: Q(lambda) = 2 sum (-1)^{j-1} exp(-2 j^2 lambda^2).
double kolmogorov_sf(double lambda);

struct KsResult {
    double d_stat = 0.0;
    double p_value = 1.0;
    long na = 0, nb = 0;
};

/// Two-sample statistic D = sup |F_a - F_b| by a merged sweep; p from the
/// asymptotic Kolmogorov law at effective size na nb / (na + nb).
KsResult ks_two_sample(const FunctionalSample& a, const FunctionalSample& b);

/// One-sample statistic against a CDF; p at size M.
KsResult ks_one_sample(const FunctionalSample& a, const std::function<double(double)>& cdf);

struct EnergyResult {
    double value = 0.0;
    bool subsampled = false;
    std::uint64_t subsample_seed = 0;
    long used_a = 0, used_b = 0;
};

/// Energy distance 2 E|A - B| - E|A - A'| - E|B - B'| over all pairs
/// (V-statistic; identical samples give exactly 0). Exact up to
/// `exact_threshold` observations per sample; larger samples are subsampled
/// with a recorded stream.
EnergyResult energy_distance(const FunctionalSample& a, const FunctionalSample& b,
                             long exact_threshold = 4096, std::uint64_t subsample_seed = 0,
                             int workers = 0);
EnergyResult energy_distance_serial(const FunctionalSample& a, const FunctionalSample& b,
                                    long exact_threshold = 4096,
                                    std::uint64_t subsample_seed = 0);

struct MomentSummary {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;    // unbiased (divisor M-1)
    Eigen::VectorXd se;     // of the mean, per component
    Eigen::VectorXd ci_lo;  // 95% normal-approximation interval
    Eigen::VectorXd ci_hi;
    long count = 0;
};

MomentSummary moment_summary(const FunctionalSample& a);

}  // namespace stepdiff
