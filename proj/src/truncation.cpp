#include "stepdiff/truncation.hpp"

#include <algorithm>

namespace stepdiff {

TruncationFn make_canonical_truncation(int dim, double K) {
    if (dim < 1) throw DomainError("make_canonical_truncation: dim must be >= 1");
    if (!(K > 1.0)) throw DomainError("make_canonical_truncation: K must be > 1");
    return TruncationFn{dim, K};
}

double g_c(const Eigen::VectorXd& x, double c) {
    if (!(c > 0.0)) throw DomainError("g_c: c must be > 0");
    return std::min(std::max(c * x.norm() - 1.0, 0.0), 1.0);
}

}  // namespace stepdiff
