#include "stepdiff/conditions.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <ostream>

#include "stepdiff/parallel.hpp"

namespace stepdiff {

const char* variant_name(Variant v) {
    switch (v) {
        case Variant::Thm21: return "thm21";
        case Variant::Cor22: return "cor22";
        case Variant::Thm31: return "thm31";
        case Variant::Cor32: return "cor32";
    }
    return "?";
}

Variant variant_from_name(const std::string& name) {
    if (name == "thm21") return Variant::Thm21;
    if (name == "cor22") return Variant::Cor22;
    if (name == "thm31") return Variant::Thm31;
    if (name == "cor32") return Variant::Cor32;
    throw ConfigError("unknown condition variant '" + name + "'");
}

void ConditionParams::validate() const {
    if (!(T > 0.0)) throw ConfigError("ConditionParams: T must be > 0");
    if (thetas.empty()) throw ConfigError("ConditionParams: theta list must be nonempty");
    if (epsilons.empty()) throw ConfigError("ConditionParams: epsilon list must be nonempty");
    for (double th : thetas)
        if (!(th > 0.0)) throw ConfigError("ConditionParams: thetas must be > 0");
    for (double e : epsilons)
        if (!(e > 0.0)) throw ConfigError("ConditionParams: epsilons must be > 0");
    if (truncated() && !truncation)
        throw ConfigError("ConditionParams: truncated variants need a truncation function");
    if (!truncated() && truncation)
        throw ConfigError("ConditionParams: truncation given but variant is untruncated");
}

namespace {

/// Streaming single-pass evaluation; O(d^2 + (pd)^2) state.
class PathChecker {
public:
    PathChecker(const ArrayModel& model, const DiffusionSpec& spec, const Integrand* integrand,
                const TimeGrid& grid, const ConditionParams& params)
        : model_(model), spec_(spec), integrand_(integrand), grid_(grid), params_(params) {
        if (params_.stacked()) {
            if (integrand_ == nullptr)
                throw ConfigError("stacked variants require an integrand");
            stacked_ = stacked_coefficients(spec_, *integrand_);
        }
        if (model_.dim() != spec_.d) throw ConfigError("model dimension != spec dimension");
        if (params_.T > grid_.T + 1e-12)
            throw ContractViolation("condition horizon exceeds the grid horizon");
    }

    PathConditions run(RngStream rng) {
        const int d = model_.dim();
        const bool stacked = params_.stacked();
        const int p = stacked ? integrand_->output_dim() : 0;
        const int dim_total = stacked ? d + p * d : d;
        const double mesh = grid_.mesh();
        const long count_T =
            std::min(grid_.count, static_cast<long>(std::floor(grid_.n * params_.T)));

        PathConditions out;
        out.lindeberg.assign(params_.thetas.size(), 0.0);

        Eigen::VectorXd sum_mean = Eigen::VectorXd::Zero(dim_total);
        Eigen::MatrixXd sum_cov = Eigen::MatrixXd::Zero(dim_total, dim_total);
        Eigen::VectorXd int_beta = Eigen::VectorXd::Zero(dim_total);
        Eigen::MatrixXd int_cov = Eigen::MatrixXd::Zero(dim_total, dim_total);

        Eigen::VectorXd u(d), mean_buf(d), beta_buf(d), v_prev, v_buf, w_buf, stack_buf;
        Eigen::MatrixXd cov_buf(d, d), gamma_buf(d, spec_.r), stack_gamma;
        RowHistory h;

        std::unique_ptr<Integrand::State> v_state, w_state;
        if (stacked) {
            v_state = integrand_->new_state();
            w_state = integrand_->new_limit_state();
            v_prev.resize(p);
            v_buf.resize(p);
            w_buf.resize(p);
        }

        model_.sample_initial(rng, u);
        h.k = 1;
        h.prefix = u;
        h.last = u;
        if (stacked) {
            integrand_->prelimit_step(*v_state, 0, u, v_buf);
            v_prev = v_buf;
            integrand_->limit_step(*w_state, 0.0, h.prefix, w_buf);
        }

        auto observe = [&]() {
            out.sup_i = std::max(out.sup_i, (sum_mean - int_beta).norm());
            out.sup_ii = std::max(out.sup_ii, (sum_cov - int_cov).norm());
        };

        for (long k = 1; k <= count_T; ++k) {
            // integral increment over piece k-1, value h.prefix, functional w_buf
            const double s_mid = (static_cast<double>(k - 1) + 0.5) * mesh;
            add_integral(s_mid, mesh, h.prefix, w_buf, beta_buf, gamma_buf, stack_buf,
                         stack_gamma, int_beta, int_cov);
            observe();  // left limit at k/n

            // conditional moments of step k on the realized history
            accumulate_moments(h, v_prev, mean_buf, cov_buf, sum_mean, sum_cov, out.lindeberg);

            model_.sample_next(h, rng, u);
            h.prefix += u;
            h.last = u;
            h.k = k + 1;
            if (stacked) {
                integrand_->prelimit_step(*v_state, k, u, v_buf);
                v_prev = v_buf;
                integrand_->limit_step(*w_state, grid_.point(k), h.prefix, w_buf);
            }
            observe();  // at k/n after the jump
        }

        const double t_full = static_cast<double>(count_T) * mesh;
        if (params_.T > t_full) {
            add_integral(0.5 * (t_full + params_.T), params_.T - t_full, h.prefix, w_buf,
                         beta_buf, gamma_buf, stack_buf, stack_gamma, int_beta, int_cov);
            observe();
        }
        return out;
    }

private:
    void add_integral(double s, double weight, const Eigen::VectorXd& x,
                      const Eigen::VectorXd& w, Eigen::VectorXd& beta_buf,
                      Eigen::MatrixXd& gamma_buf, Eigen::VectorXd& stack_buf,
                      Eigen::MatrixXd& stack_gamma, Eigen::VectorXd& int_beta,
                      Eigen::MatrixXd& int_cov) const {
        if (params_.stacked()) {
            stacked_.beta(s, x, w, stack_buf);
            int_beta += weight * stack_buf;
            stacked_.gamma(s, x, w, stack_gamma);
            int_cov.noalias() += weight * (stack_gamma * stack_gamma.transpose());
        } else {
            spec_.beta(s, x, beta_buf);
            int_beta += weight * beta_buf;
            spec_.gamma(s, x, gamma_buf);
            int_cov.noalias() += weight * (gamma_buf * gamma_buf.transpose());
        }
    }

    void accumulate_moments(const RowHistory& h, const Eigen::VectorXd& v_prev,
                            Eigen::VectorXd& mean_buf, Eigen::MatrixXd& cov_buf,
                            Eigen::VectorXd& sum_mean, Eigen::MatrixXd& sum_cov,
                            std::vector<double>& lin) const {
        const int d = model_.dim();
        switch (params_.variant) {
            case Variant::Cor22: {
                model_.cond_mean(h, mean_buf);
                model_.cond_cov(h, cov_buf);
                sum_mean += mean_buf;
                sum_cov += cov_buf;
                for (std::size_t t = 0; t < params_.thetas.size(); ++t)
                    lin[t] += model_.cond_lindeberg(h, params_.thetas[t]);
                break;
            }
            case Variant::Thm21: {
                const RampMoments rm = model_.cond_ramp_moments(h, *params_.truncation, 1.0);
                sum_mean(0) += rm.mean;
                sum_cov(0, 0) += rm.second - rm.mean * rm.mean;
                for (std::size_t t = 0; t < params_.thetas.size(); ++t)
                    lin[t] += model_.cond_tail(h, params_.thetas[t]);
                break;
            }
            case Variant::Cor32: {
                model_.cond_mean(h, mean_buf);
                model_.cond_cov(h, cov_buf);
                add_stacked(v_prev, mean_buf, cov_buf, sum_mean, sum_cov);
                const double scale = 1.0 + v_prev.norm();
                const double factor = 1.0 + v_prev.squaredNorm();
                for (std::size_t t = 0; t < params_.thetas.size(); ++t)
                    lin[t] += factor * model_.cond_lindeberg(h, params_.thetas[t] / scale);
                break;
            }
            case Variant::Thm31: {
                // Scalar rows only: the stacked increment lies on the line
                // {a u} with a = [1; v], so the ramp moments compose exactly.
                if (d != 1)
                    throw CapabilityError(
                        "thm31 truncated stacked moments are closed-form for scalar rows only");
                const double c = std::sqrt(1.0 + v_prev.squaredNorm());
                const RampMoments rm = model_.cond_ramp_moments(h, *params_.truncation, c);
                const double var = rm.second - rm.mean * rm.mean;
                sum_mean(0) += rm.mean;
                sum_cov(0, 0) += var;
                for (int i = 0; i < v_prev.size(); ++i) {
                    sum_mean(1 + i) += v_prev(i) * rm.mean;
                    sum_cov(0, 1 + i) += v_prev(i) * var;
                    sum_cov(1 + i, 0) += v_prev(i) * var;
                    for (int j = 0; j < v_prev.size(); ++j)
                        sum_cov(1 + i, 1 + j) += v_prev(i) * v_prev(j) * var;
                }
                const double scale = 1.0 + v_prev.norm();
                for (std::size_t t = 0; t < params_.thetas.size(); ++t)
                    lin[t] += model_.cond_tail(h, params_.thetas[t] / scale);
                break;
            }
        }
    }

    void add_stacked(const Eigen::VectorXd& v, const Eigen::VectorXd& m,
                     const Eigen::MatrixXd& cov, Eigen::VectorXd& sum_mean,
                     Eigen::MatrixXd& sum_cov) const {
        // A = [I; v (x) I]: sum_mean += A m, sum_cov += A cov A^T, blockwise.
        const int d = model_.dim();
        const long p = v.size();
        sum_mean.head(d) += m;
        for (long i = 0; i < p; ++i) sum_mean.segment(d + i * d, d) += v(i) * m;
        sum_cov.topLeftCorner(d, d) += cov;
        for (long i = 0; i < p; ++i) {
            sum_cov.block(0, d + i * d, d, d) += v(i) * cov;
            sum_cov.block(d + i * d, 0, d, d) += v(i) * cov;
            for (long j = 0; j < p; ++j)
                sum_cov.block(d + i * d, d + j * d, d, d) += v(i) * v(j) * cov;
        }
    }

    const ArrayModel& model_;
    const DiffusionSpec& spec_;
    const Integrand* integrand_;
    const TimeGrid& grid_;
    const ConditionParams& params_;
    StackedCoefficients stacked_{};
};

ConditionReport run_check(const ArrayModel& model, const DiffusionSpec& spec,
                          const Integrand* integrand, const TimeGrid& grid,
                          const ConditionParams& params, int num_paths,
                          std::uint64_t master_seed, int workers, bool serial) {
    params.validate();
    if (num_paths < 1) throw ConfigError("check_conditions: need at least one path");

    ConditionReport report;
    report.model_name = model.name();
    report.variant = params.variant;
    report.n = grid.n;
    report.T = params.T;
    report.paths = num_paths;
    report.master_seed = master_seed;
    report.lindeberg_exact = model.lindeberg_exact();
    report.thetas = params.thetas;
    report.epsilons = params.epsilons;
    report.sup_i.resize(static_cast<std::size_t>(num_paths));
    report.sup_ii.resize(static_cast<std::size_t>(num_paths));
    report.lindeberg.assign(params.thetas.size(),
                            std::vector<double>(static_cast<std::size_t>(num_paths)));

    auto body = [&](std::size_t i) {
        PathChecker checker(model, spec, integrand, grid, params);
        RngStream rng(seed_schedule(master_seed, static_cast<std::uint32_t>(i),
                                    StreamPurpose::Array));
        PathConditions pc = checker.run(rng);
        report.sup_i[i] = pc.sup_i;
        report.sup_ii[i] = pc.sup_ii;
        for (std::size_t t = 0; t < params.thetas.size(); ++t)
            report.lindeberg[t][i] = pc.lindeberg[t];
    };
    if (serial) {
        serial_for_index(static_cast<std::size_t>(num_paths), body);
    } else {
        parallel_for_index(static_cast<std::size_t>(num_paths), workers, body);
    }

    report.agg_i = aggregate_condition(report.sup_i, params.epsilons);
    report.agg_ii = aggregate_condition(report.sup_ii, params.epsilons);
    report.agg_iii.reserve(params.thetas.size());
    for (const auto& per_theta : report.lindeberg)
        report.agg_iii.push_back(aggregate_condition(per_theta, params.epsilons));
    return report;
}

}  // namespace

PathConditions check_single_path(const ArrayModel& model, const DiffusionSpec& spec,
                                 const Integrand* integrand, const TimeGrid& grid,
                                 const ConditionParams& params, RngStream rng) {
    params.validate();
    PathChecker checker(model, spec, integrand, grid, params);
    return checker.run(std::move(rng));
}

ConditionReport check_conditions(const ArrayModel& model, const DiffusionSpec& spec,
                                 const Integrand* integrand, const TimeGrid& grid,
                                 const ConditionParams& params, int num_paths,
                                 std::uint64_t master_seed, int workers) {
    return run_check(model, spec, integrand, grid, params, num_paths, master_seed, workers,
                     false);
}

ConditionReport check_conditions_serial(const ArrayModel& model, const DiffusionSpec& spec,
                                        const Integrand* integrand, const TimeGrid& grid,
                                        const ConditionParams& params, int num_paths,
                                        std::uint64_t master_seed) {
    return run_check(model, spec, integrand, grid, params, num_paths, master_seed, 1, true);
}

double sample_quantile(std::vector<double> values, double q) {
    if (values.empty()) throw ContractViolation("sample_quantile: empty sample");
    if (q < 0.0 || q > 1.0) throw DomainError("sample_quantile: q outside [0, 1]");
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= values.size()) return values.back();
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

ConditionAggregate aggregate_condition(const std::vector<double>& per_path,
                                       const std::vector<double>& epsilons) {
    ConditionAggregate agg;
    double sum = 0.0;
    for (double v : per_path) sum += v;
    agg.mean = sum / static_cast<double>(per_path.size());
    agg.q50 = sample_quantile(per_path, 0.50);
    agg.q90 = sample_quantile(per_path, 0.90);
    agg.q95 = sample_quantile(per_path, 0.95);
    agg.exceed.reserve(epsilons.size());
    for (double eps : epsilons) {
        long hits = 0;
        for (double v : per_path)
            if (v > eps) ++hits;
        agg.exceed.push_back(static_cast<double>(hits) / static_cast<double>(per_path.size()));
    }
    return agg;
}

namespace {

nlohmann::json aggregate_json(const ConditionAggregate& agg, const std::vector<double>& epsilons) {
    nlohmann::json j;
    j["mean"] = agg.mean;
    j["q50"] = agg.q50;
    j["q90"] = agg.q90;
    j["q95"] = agg.q95;
    nlohmann::json ex = nlohmann::json::object();
    for (std::size_t i = 0; i < epsilons.size(); ++i)
        ex[std::to_string(epsilons[i])] = agg.exceed[i];
    j["exceed"] = ex;
    return j;
}

}  // namespace

nlohmann::json condition_report_json(const ConditionReport& report) {
    nlohmann::json j;
    j["model"] = report.model_name;
    j["variant"] = variant_name(report.variant);
    j["n"] = report.n;
    j["T"] = report.T;
    j["paths"] = report.paths;
    j["seed"] = report.master_seed;
    j["lindeberg_exact"] = report.lindeberg_exact;
    j["thetas"] = report.thetas;
    j["epsilons"] = report.epsilons;
    j["condition_i"] = aggregate_json(report.agg_i, report.epsilons);
    j["condition_ii"] = aggregate_json(report.agg_ii, report.epsilons);
    nlohmann::json iii = nlohmann::json::array();
    for (std::size_t t = 0; t < report.thetas.size(); ++t) {
        nlohmann::json entry = aggregate_json(report.agg_iii[t], report.epsilons);
        entry["theta"] = report.thetas[t];
        iii.push_back(entry);
    }
    j["condition_iii"] = iii;
    j["per_path"] = {{"sup_i", report.sup_i},
                     {"sup_ii", report.sup_ii},
                     {"lindeberg", report.lindeberg}};
    return j;
}

void write_condition_csv(std::ostream& os, const ConditionReport& report) {
    os << "n,T,variant,condition,theta,mean,q50,q90,q95";
    for (double eps : report.epsilons) os << ",exceed_eps_" << eps;
    os << "\n";
    auto row = [&](const char* cond, const std::string& theta, const ConditionAggregate& agg) {
        os << report.n << "," << report.T << "," << variant_name(report.variant) << "," << cond
           << "," << theta << "," << agg.mean << "," << agg.q50 << "," << agg.q90 << ","
           << agg.q95;
        for (double e : agg.exceed) os << "," << e;
        os << "\n";
    };
    row("i", "", report.agg_i);
    row("ii", "", report.agg_ii);
    for (std::size_t t = 0; t < report.thetas.size(); ++t)
        row("iii", std::to_string(report.thetas[t]), report.agg_iii[t]);
}

}  // namespace stepdiff
