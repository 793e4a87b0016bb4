#include "stepdiff/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "stepdiff/gaussian_moments.hpp"

namespace stepdiff {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError("config error at " + path + ": " + what);
}

const json& member(const json& j, const std::string& path, const char* key) {
    if (!j.is_object()) fail(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) fail(path + "/" + key, "missing field");
    return *it;
}

template <typename T>
T as(const json& j, const std::string& path) {
    try {
        return j.get<T>();
    } catch (const json::exception&) {
        fail(path, std::string("wrong type (") + j.type_name() + ")");
    }
}

template <typename T>
void read_opt(const json& j, const std::string& path, const char* key, T& out) {
    if (!j.is_object()) fail(path, "expected an object");
    auto it = j.find(key);
    if (it != j.end()) out = as<T>(*it, path + "/" + key);
}

}  // namespace

std::string FunctionalConfig::display_name() const {
    std::ostringstream os;
    if (kind == "marginal") {
        os << "U@t=" << time;
    } else if (kind == "integral") {
        os << "Y@t=" << time;
    } else if (kind == "sup_abs") {
        os << "sup|U|@T=" << time;
    } else if (kind == "qv") {
        os << "qv@t=" << time;
    } else {
        os << kind << "@t=" << time;
    }
    return os.str();
}

std::function<double(double)> CdfConfig::make() const {
    if (name == "normal") {
        const double mu = mean;
        const double sd = std::sqrt(variance);
        if (!(sd > 0.0)) throw ConfigError("cdf: normal variance must be > 0");
        return [mu, sd](double x) { return normal_cdf((x - mu) / sd); };
    }
    if (name == "uniform") {
        const double a = lo, b = hi;
        if (!(b > a)) throw ConfigError("cdf: uniform needs hi > lo");
        return [a, b](double x) {
            if (x <= a) return 0.0;
            if (x >= b) return 1.0;
            return (x - a) / (b - a);
        };
    }
    throw ConfigError("cdf: unknown name '" + name + "'");
}

void ExperimentConfig::validate() const {
    if (n_ladder.empty()) throw ConfigError("config error at /n_ladder: must be nonempty");
    for (std::size_t i = 0; i < n_ladder.size(); ++i) {
        if (n_ladder[i] < 1) throw ConfigError("config error at /n_ladder: entries must be >= 1");
        if (i > 0 && n_ladder[i] <= n_ladder[i - 1])
            throw ConfigError("config error at /n_ladder: must be strictly increasing");
    }
    if (!(delta > 0.0)) throw ConfigError("config error at /delta: must be > 0");
    if (horizons.empty()) throw ConfigError("config error at /horizons: must be nonempty");
    for (double t : horizons)
        if (!(t > 0.0)) throw ConfigError("config error at /horizons: entries must be > 0");
    if (paths < 2) throw ConfigError("config error at /paths: must be >= 2");
    if (check) {
        if (thetas.empty()) throw ConfigError("config error at /thetas: must be nonempty");
        if (epsilons.empty()) throw ConfigError("config error at /epsilons: must be nonempty");
    }
    variant_from_name(variant);
    if (!(alpha > 0.0 && alpha < 1.0))
        throw ConfigError("config error at /alpha: must be in (0, 1)");
    if (format != "json" && format != "csv" && format != "both")
        throw ConfigError("config error at /format: must be json, csv or both");
    for (const auto& f : functionals) {
        if (f.kind != "marginal" && f.kind != "integral" && f.kind != "sup_abs" && f.kind != "qv")
            throw ConfigError("config error at /functionals: unknown kind '" + f.kind + "'");
        if (!(f.time > 0.0))
            throw ConfigError("config error at /functionals: time must be > 0");
    }
    if ((variant == "thm21" || variant == "thm31") && !(truncation_K > 1.0))
        throw ConfigError("config error at /truncation_K: must be > 1 for truncated variants");
}

ExperimentConfig default_config() { return ExperimentConfig{}; }

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig c;
    if (!j.is_object()) throw ConfigError("config error at /: expected an object");
    read_opt(j, "", "experiment", c.experiment);

    if (j.contains("model")) {
        const json& m = member(j, "", "model");
        c.model_name = as<std::string>(member(m, "/model", "name"), "/model/name");
        if (m.contains("params")) c.model_params = m.at("params");
    }
    if (j.contains("spec")) {
        const json& s = member(j, "", "spec");
        c.spec_name = as<std::string>(member(s, "/spec", "name"), "/spec/name");
        if (s.contains("params")) c.spec_params = s.at("params");
    }
    read_opt(j, "", "integrand", c.integrand);
    read_opt(j, "", "n_ladder", c.n_ladder);
    read_opt(j, "", "delta", c.delta);
    read_opt(j, "", "horizons", c.horizons);
    read_opt(j, "", "paths", c.paths);
    read_opt(j, "", "limit_paths", c.limit_paths);
    read_opt(j, "", "thetas", c.thetas);
    read_opt(j, "", "epsilons", c.epsilons);
    read_opt(j, "", "variant", c.variant);
    read_opt(j, "", "truncation_K", c.truncation_K);
    read_opt(j, "", "check", c.check);
    read_opt(j, "", "alpha", c.alpha);
    read_opt(j, "", "energy_threshold", c.energy_threshold);
    read_opt(j, "", "seed", c.seed);
    read_opt(j, "", "out", c.out_dir);
    read_opt(j, "", "format", c.format);

    if (j.contains("functionals")) {
        const json& fs = j.at("functionals");
        if (!fs.is_array()) fail("/functionals", "expected an array");
        c.functionals.clear();
        for (std::size_t i = 0; i < fs.size(); ++i) {
            const std::string path = "/functionals/" + std::to_string(i);
            FunctionalConfig f;
            f.kind = as<std::string>(member(fs[i], path, "kind"), path + "/kind");
            read_opt(fs[i], path, "time", f.time);
            c.functionals.push_back(f);
        }
    }

    if (j.contains("assertions")) {
        const json& asrt = j.at("assertions");
        if (!asrt.is_array()) fail("/assertions", "expected an array");
        for (std::size_t i = 0; i < asrt.size(); ++i) {
            const std::string path = "/assertions/" + std::to_string(i);
            const json& e = asrt[i];
            AssertionConfig a;
            a.type = as<std::string>(member(e, path, "type"), path + "/type");
            read_opt(e, path, "target", a.target);
            read_opt(e, path, "a", a.a);
            read_opt(e, path, "b", a.b);
            read_opt(e, path, "n", a.n);
            read_opt(e, path, "lo", a.lo);
            read_opt(e, path, "hi", a.hi);
            read_opt(e, path, "min_p", a.min_p);
            read_opt(e, path, "max_p", a.max_p);
            read_opt(e, path, "condition", a.condition);
            read_opt(e, path, "T", a.T);
            read_opt(e, path, "quantile", a.quantile);
            read_opt(e, path, "max_value", a.max_value);
            read_opt(e, path, "theta", a.theta);
            if (e.contains("cdf")) {
                const json& cj = e.at("cdf");
                a.cdf.name = as<std::string>(member(cj, path + "/cdf", "name"),
                                             path + "/cdf/name");
                read_opt(cj, path + "/cdf", "mean", a.cdf.mean);
                read_opt(cj, path + "/cdf", "variance", a.cdf.variance);
                read_opt(cj, path + "/cdf", "lo", a.cdf.lo);
                read_opt(cj, path + "/cdf", "hi", a.cdf.hi);
            }
            if (a.type != "mean_range" && a.type != "ks_one_sample" &&
                a.type != "ks_two_sample" && a.type != "condition_quantile")
                fail(path + "/type", "unknown assertion type '" + a.type + "'");
            c.assertions.push_back(std::move(a));
        }
    }

    c.validate();
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config parse error in '" + path + "': " + e.what());
    }
    return config_from_json(j);
}

json config_to_json(const ExperimentConfig& c) {
    json j;
    j["experiment"] = c.experiment;
    j["model"] = {{"name", c.model_name}, {"params", c.model_params}};
    j["spec"] = {{"name", c.spec_name}, {"params", c.spec_params}};
    j["integrand"] = c.integrand;
    j["n_ladder"] = c.n_ladder;
    j["delta"] = c.delta;
    j["horizons"] = c.horizons;
    j["paths"] = c.paths;
    j["limit_paths"] = c.limit_paths;
    j["thetas"] = c.thetas;
    j["epsilons"] = c.epsilons;
    j["variant"] = c.variant;
    j["truncation_K"] = c.truncation_K;
    j["check"] = c.check;
    j["alpha"] = c.alpha;
    j["energy_threshold"] = c.energy_threshold;
    j["seed"] = c.seed;
    j["out"] = c.out_dir;
    j["format"] = c.format;
    json fs = json::array();
    for (const auto& f : c.functionals) fs.push_back({{"kind", f.kind}, {"time", f.time}});
    j["functionals"] = fs;
    json as = json::array();
    for (const auto& a : c.assertions) {
        json e;
        e["type"] = a.type;
        if (!a.target.empty()) e["target"] = a.target;
        if (!a.a.empty()) e["a"] = a.a;
        if (!a.b.empty()) e["b"] = a.b;
        if (a.n > 0) e["n"] = a.n;
        if (a.type == "mean_range") {
            e["lo"] = a.lo;
            e["hi"] = a.hi;
        }
        if (a.type == "ks_one_sample")
            e["cdf"] = {{"name", a.cdf.name}, {"mean", a.cdf.mean}, {"variance", a.cdf.variance}};
        if (a.min_p >= 0.0) e["min_p"] = a.min_p;
        if (a.max_p >= 0.0) e["max_p"] = a.max_p;
        if (a.type == "condition_quantile") {
            e["condition"] = a.condition;
            e["T"] = a.T;
            e["quantile"] = a.quantile;
            e["max_value"] = a.max_value;
            if (a.theta >= 0.0) e["theta"] = a.theta;
        }
        as.push_back(e);
    }
    j["assertions"] = as;
    return j;
}

namespace {

Eigen::VectorXd vector_param(const json& params, const char* key, int d, double fallback) {
    Eigen::VectorXd v = Eigen::VectorXd::Constant(d, fallback);
    if (params.contains(key)) {
        const json& e = params.at(key);
        if (e.is_number()) {
            v.setConstant(e.get<double>());
        } else if (e.is_array()) {
            if (static_cast<int>(e.size()) != d)
                throw ConfigError(std::string("config: '") + key + "' has wrong length");
            for (int i = 0; i < d; ++i) v(i) = e[static_cast<std::size_t>(i)].get<double>();
        } else {
            throw ConfigError(std::string("config: '") + key + "' must be number or array");
        }
    }
    return v;
}

DiffusionSpec apply_initial(DiffusionSpec spec, const json& params) {
    if (!params.contains("initial")) return spec;
    const json& init = params.at("initial");
    const std::string kind = init.value("kind", "point");
    if (kind == "point") {
        return with_point_initial(std::move(spec), vector_param(init, "value", spec.d, 0.0));
    }
    if (kind == "gaussian") {
        const int d = spec.d;
        return with_gaussian_initial(std::move(spec), vector_param(init, "mean", d, 0.0),
                                     vector_param(init, "sd", d, 1.0));
    }
    throw ConfigError("config: unknown initial law '" + kind + "'");
}

}  // namespace

DiffusionSpec build_spec(const std::string& name, const json& params) {
    DiffusionSpec spec;
    if (name == "zero") {
        spec = make_spec_zero(params.value("d", 1), params.value("r", 1));
    } else if (name == "scaled_wiener") {
        spec = make_spec_scaled_wiener(params.value("scale", 1.0));
    } else if (name == "ou") {
        spec = make_spec_ou(params.value("rate", 1.0), params.value("sigma", 1.0));
    } else if (name == "sqrt") {
        spec = make_spec_sqrt(params.value("drift", 0.0), params.value("sigma", 1.0));
    } else {
        throw ConfigError("config error at /spec/name: unknown spec '" + name + "'");
    }
    return apply_initial(std::move(spec), params);
}

std::shared_ptr<ArrayModel> build_model(const std::string& name, const json& params,
                                        const DiffusionSpec& spec, long n) {
    if (name == "nongood_triple") return model_nongood_triple(n);
    if (name == "lindeberg_iid") {
        const int d = params.value("d", 1);
        const std::string law_name = params.value("law", "normal");
        ScaleLaw law;
        if (law_name == "normal") {
            law = ScaleLaw::Normal;
        } else if (law_name == "rademacher") {
            law = ScaleLaw::Rademacher;
        } else if (law_name == "uniform") {
            law = ScaleLaw::Uniform;
        } else {
            throw ConfigError("config error at /model/params/law: unknown law '" + law_name +
                              "'");
        }
        Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(d, d);
        if (params.contains("sigma")) {
            const json& sj = params.at("sigma");
            if (sj.is_number()) {
                sigma *= sj.get<double>();
            } else if (sj.is_array()) {
                if (static_cast<int>(sj.size()) != d)
                    throw ConfigError("config error at /model/params/sigma: wrong size");
                for (int i = 0; i < d; ++i) {
                    const json& row = sj[static_cast<std::size_t>(i)];
                    if (static_cast<int>(row.size()) != d)
                        throw ConfigError("config error at /model/params/sigma: wrong size");
                    for (int k = 0; k < d; ++k)
                        sigma(i, k) = row[static_cast<std::size_t>(k)].get<double>();
                }
            } else {
                throw ConfigError(
                    "config error at /model/params/sigma: must be number or matrix");
            }
        }
        return model_lindeberg_iid(d, law, sigma, n);
    }
    if (name == "euler_array") {
        const std::string noise_name = params.value("noise", "normal");
        NoiseLaw noise;
        if (noise_name == "normal") {
            noise = NoiseLaw::Normal;
        } else if (noise_name == "rademacher") {
            noise = NoiseLaw::Rademacher;
        } else {
            throw ConfigError("config error at /model/params/noise: unknown noise '" +
                              noise_name + "'");
        }
        return model_euler_array(spec, noise, n);
    }
    throw ConfigError("config error at /model/name: unknown model '" + name + "'");
}

std::shared_ptr<Integrand> build_integrand(const std::string& name, int d) {
    if (name.empty() || name == "none") return nullptr;
    if (name == "identity") return integrand_identity(d);
    throw ConfigError("config error at /integrand: unknown integrand '" + name + "'");
}

}  // namespace stepdiff
