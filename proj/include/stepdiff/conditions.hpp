#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "stepdiff/array_model.hpp"
#include "stepdiff/diffusion_spec.hpp"
#include "stepdiff/integrand.hpp"
#include "stepdiff/truncation.hpp"

namespace stepdiff {

/// Which hypothesis set is evaluated.
///  - Cor22: plain conditional means/variances and the Lindeberg sum.
///  - Thm21: truncated conditional means/variances and the norm-tail sum.
///  - Cor32: stacked (U, V (x) U) moments against the stacked coefficients,
///           composite Lindeberg sum with threshold |U|(1+|V|).
///  - Thm31: stacked truncated moments and the composite tail sum.
enum class Variant { Thm21, Cor22, Thm31, Cor32 };

const char* variant_name(Variant v);
Variant variant_from_name(const std::string& name);

struct ConditionParams {
    double T = 1.0;
    std::vector<double> thetas{0.1};
    std::vector<double> epsilons{0.1};
    Variant variant = Variant::Cor22;
    std::optional<TruncationFn> truncation;  // Thm21 / Thm31 only

    void validate() const;
    bool truncated() const { return variant == Variant::Thm21 || variant == Variant::Thm31; }
    bool stacked() const { return variant == Variant::Thm31 || variant == Variant::Cor32; }
};

/// Per-path discrepancy processes: sup over piece endpoints (both sides) of
/// condition (i) and (ii) gaps, and the terminal condition (iii) sums per theta.
struct PathConditions {
    double sup_i = 0.0;
    double sup_ii = 0.0;
    std::vector<double> lindeberg;
};

/// Evaluates one sampled row. The integrand may be null for the plain
/// variants and is required for the stacked ones.
PathConditions check_single_path(const ArrayModel& model, const DiffusionSpec& spec,
                                 const Integrand* integrand, const TimeGrid& grid,
                                 const ConditionParams& params, RngStream rng);

struct ConditionAggregate {
    double mean = 0.0;
    double q50 = 0.0, q90 = 0.0, q95 = 0.0;
    std::vector<double> exceed;  // exceedance frequency per epsilon
};

struct ConditionReport {
    std::string model_name;
    Variant variant = Variant::Cor22;
    long n = 0;
    double T = 0.0;
    int paths = 0;
    std::uint64_t master_seed = 0;
    bool lindeberg_exact = true;

    std::vector<double> thetas, epsilons;
    std::vector<double> sup_i, sup_ii;            // per path
    std::vector<std::vector<double>> lindeberg;   // [theta][path]

    ConditionAggregate agg_i, agg_ii;
    std::vector<ConditionAggregate> agg_iii;      // per theta
};

/// Runs M paths (path i drawn from seed_schedule(master_seed, i, Array)) and
/// aggregates. Deterministic for a fixed seed, independent of workers.
ConditionReport check_conditions(const ArrayModel& model, const DiffusionSpec& spec,
                                 const Integrand* integrand, const TimeGrid& grid,
                                 const ConditionParams& params, int num_paths,
                                 std::uint64_t master_seed, int workers);

/// Serial reference implementation (kept for testing the parallel kernel).
ConditionReport check_conditions_serial(const ArrayModel& model, const DiffusionSpec& spec,
                                        const Integrand* integrand, const TimeGrid& grid,
                                        const ConditionParams& params, int num_paths,
                                        std::uint64_t master_seed);

/// Linear-interpolation quantile of a copy-sorted sample, q in [0, 1].
double sample_quantile(std::vector<double> values, double q);

ConditionAggregate aggregate_condition(const std::vector<double>& per_path,
                                       const std::vector<double>& epsilons);

/// Full JSON rendering (metadata, aggregates, per-path values).
nlohmann::json condition_report_json(const ConditionReport& report);

/// Quantile table: one row per condition (and per theta for (iii)) plus one
/// exceedance column per epsilon.
void write_condition_csv(std::ostream& os, const ConditionReport& report);

}  // namespace stepdiff
