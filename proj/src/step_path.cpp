#include "stepdiff/step_path.hpp"

namespace stepdiff {

StepPath build_step_path(const Eigen::MatrixXd& increments, const TimeGrid& grid) {
    if (increments.cols() != grid.count + 1)
        throw ContractViolation("build_step_path: need count+1 increments");
    if (increments.rows() < 1) throw ContractViolation("build_step_path: dim must be >= 1");
    Eigen::MatrixXd values(increments.rows(), increments.cols());
    values.col(0) = increments.col(0);
    for (long j = 1; j <= grid.count; ++j) {
        values.col(j) = values.col(j - 1) + increments.col(j);
    }
    return StepPath(static_cast<int>(increments.rows()), grid, std::move(values));
}

StepPath build_step_path(const std::vector<Eigen::VectorXd>& increments, const TimeGrid& grid) {
    if (increments.empty()) throw ContractViolation("build_step_path: empty increments");
    Eigen::MatrixXd m(increments.front().size(), static_cast<long>(increments.size()));
    for (std::size_t j = 0; j < increments.size(); ++j) {
        if (increments[j].size() != m.rows())
            throw ContractViolation("build_step_path: ragged increments");
        m.col(static_cast<long>(j)) = increments[j];
    }
    return build_step_path(m, grid);
}

Eigen::MatrixXd path_increments(const StepPath& path) {
    const Eigen::MatrixXd& v = path.values();
    Eigen::MatrixXd inc(v.rows(), v.cols());
    inc.col(0) = v.col(0);
    for (long j = 1; j < v.cols(); ++j) inc.col(j) = v.col(j) - v.col(j - 1);
    return inc;
}

SampledPath sample_with_left_limits(const StepPath& path, double T) {
    const TimeGrid& g = path.grid();
    if (T < 0.0 || T > g.T) throw DomainError("sample_with_left_limits: T outside grid horizon");
    SampledPath s;
    const long last = g.index_at(T);
    s.times.reserve(2 * static_cast<std::size_t>(last) + 2);
    s.values.reserve(s.times.capacity());
    s.times.push_back(0.0);
    s.values.emplace_back(path.piece(0));
    for (long j = 1; j <= last; ++j) {
        const double t = g.point(j);
        s.times.push_back(t);
        s.values.emplace_back(path.piece(j - 1));  // left limit
        s.times.push_back(t);
        s.values.emplace_back(path.piece(j));
    }
    if (T > g.point(last)) {
        s.times.push_back(T);
        s.values.emplace_back(path.piece(last));
    }
    return s;
}

double sup_norm_diff(const SampledPath& f, const SampledPath& g) {
    if (f.times.size() != g.times.size() || f.values.size() != g.values.size() ||
        f.times.size() != f.values.size())
        throw ContractViolation("sup_norm_diff: sample grids differ in length");
    double sup = 0.0;
    for (std::size_t i = 0; i < f.times.size(); ++i) {
        if (f.times[i] != g.times[i])
            throw ContractViolation("sup_norm_diff: sample times differ");
        if (f.values[i].rows() != g.values[i].rows() || f.values[i].cols() != g.values[i].cols())
            throw ContractViolation("sup_norm_diff: sample shapes differ");
        sup = std::max(sup, (f.values[i] - g.values[i]).norm());
    }
    return sup;
}

}  // namespace stepdiff
