#pragma once

#include <nlohmann/json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stepdiff/conditions.hpp"
#include "stepdiff/config.hpp"
#include "stepdiff/stats.hpp"

namespace stepdiff {

/// Per-path functional extraction over a prelimit ensemble; one column per
/// path, deterministic for fixed seed regardless of workers.
std::map<std::string, FunctionalSample> extract_prelimit_functionals(
    const ArrayModel& model, const TimeGrid& grid, const std::vector<FunctionalConfig>& fns,
    const Integrand* integrand, int num_paths, std::uint64_t master_seed, int workers);

/// Same over the simulated limit ensemble (coupled when an integrand is given).
std::map<std::string, FunctionalSample> extract_limit_functionals(
    const DiffusionSpec& spec, double delta, double max_t,
    const std::vector<FunctionalConfig>& fns, const Integrand* integrand, int num_paths,
    std::uint64_t master_seed, int workers);

/// Materialized prelimit ensemble (for the simulate subcommand and container IO).
PathEnsemble simulate_array_ensemble(const ArrayModel& model, const TimeGrid& grid,
                                     int num_paths, std::uint64_t master_seed, int workers);

enum class RunMode { Full, SimulateOnly, ConditionsOnly, CompareOnly };

struct RunOptions {
    int workers = 0;  // <= 0: library default
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<std::string> format;
    RunMode mode = RunMode::Full;
    bool write_files = true;
};

struct ExperimentResult {
    nlohmann::json report;
    bool passed = true;
    std::vector<std::string> failures;  // human-readable failed assertions
};

/// Full pipeline: per rung of the n-ladder simulate, check conditions and
/// extract functionals; simulate the limit ensemble once; compare; evaluate
/// the configured assertions; write report files.
ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options);

}  // namespace stepdiff
