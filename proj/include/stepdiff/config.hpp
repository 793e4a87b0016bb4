#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "stepdiff/array_model.hpp"
#include "stepdiff/diffusion_spec.hpp"
#include "stepdiff/integrand.hpp"

namespace stepdiff {

struct FunctionalConfig {
    std::string kind;  // marginal | integral | sup_abs | qv
    double time = 1.0;

    std::string display_name() const;
};

struct CdfConfig {
    std::string name = "normal";  // normal | uniform
    double mean = 0.0;
    double variance = 1.0;
    double lo = 0.0, hi = 1.0;  // uniform support

    std::function<double(double)> make() const;
};

struct AssertionConfig {
    std::string type;     // mean_range | ks_one_sample | ks_two_sample | condition_quantile
    std::string target;   // "prelimit:<functional>" or "limit:<functional>"
    std::string a, b;     // two-sample targets
    long n = 0;           // ladder rung for prelimit targets (0 = largest)
    double lo = 0.0, hi = 0.0;
    CdfConfig cdf;
    double min_p = -1.0, max_p = -1.0;
    std::string condition;  // i | ii | iii
    double T = 1.0;
    double quantile = 0.5;
    double max_value = 0.0;
    double theta = -1.0;  // for condition iii rows
};

struct ExperimentConfig {
    std::string experiment = "experiment";

    std::string model_name = "lindeberg_iid";
    nlohmann::json model_params = nlohmann::json::object();

    std::string spec_name = "scaled_wiener";
    nlohmann::json spec_params = nlohmann::json::object();

    std::string integrand;  // "" (none) or "identity"

    std::vector<long> n_ladder{300, 3000};
    double delta = 1e-3;
    std::vector<double> horizons{1.0};
    int paths = 1000;
    int limit_paths = 0;  // 0 = same as paths

    std::vector<double> thetas{0.1};
    std::vector<double> epsilons{0.1};
    std::string variant = "cor22";
    double truncation_K = 2.0;
    bool check = true;  // run condition checks

    std::vector<FunctionalConfig> functionals{{"marginal", 1.0}};
    double alpha = 0.05;
    long energy_threshold = 4096;

    std::uint64_t seed = 20240101;
    std::string out_dir = "out";
    std::string format = "both";  // json | csv | both

    std::vector<AssertionConfig> assertions;

    void validate() const;
    int effective_limit_paths() const { return limit_paths > 0 ? limit_paths : paths; }
};

ExperimentConfig default_config();
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
nlohmann::json config_to_json(const ExperimentConfig& c);

/// Built-in registries. Unknown names raise ConfigError naming the field.
DiffusionSpec build_spec(const std::string& name, const nlohmann::json& params);
std::shared_ptr<ArrayModel> build_model(const std::string& name, const nlohmann::json& params,
                                        const DiffusionSpec& spec, long n);
std::shared_ptr<Integrand> build_integrand(const std::string& name, int d);

}  // namespace stepdiff
