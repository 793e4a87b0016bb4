#include "stepdiff/limit_sde.hpp"

#include <cmath>
#include <sstream>

#include "stepdiff/errors.hpp"
#include "stepdiff/parallel.hpp"

namespace stepdiff {

SdeGrid SdeGrid::make(double delta, double T) {
    if (!(delta > 0.0)) throw DomainError("SdeGrid: delta must be > 0");
    if (!(T > 0.0)) throw DomainError("SdeGrid: T must be > 0");
    // ceil with a guard so T/delta within one ulp of an integer lands on it
    long steps = static_cast<long>(std::ceil(T / delta - 1e-9));
    if (steps < 1) steps = 1;
    return SdeGrid{delta, T, steps};
}

long SdeGrid::index_at(double t) const {
    if (t < 0.0 || t > T) throw DomainError("SdeGrid: t outside [0, T]");
    // nearest grid value: the path is a discrete sample of a continuous
    // process, so rounding beats one-sided truncation
    long m = static_cast<long>(std::floor(t / delta + 0.5));
    if (m > steps) m = steps;
    return m;
}

namespace {

void throw_nonfinite(const char* what, long m, const Eigen::VectorXd& x) {
    std::ostringstream os;
    os << what << " at step " << m << " state=[";
    for (long i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x(i);
    os << "]";
    throw ModelRuntimeError(os.str(), m);
}

}  // namespace

SdePath euler_maruyama(const DiffusionSpec& spec, double delta, double T, RngStream rng) {
    const SdeGrid grid = SdeGrid::make(delta, T);
    SdePath path;
    path.dim = spec.d;
    path.grid = grid;
    path.seed = rng.key();
    path.values.resize(spec.d, grid.steps + 1);

    Eigen::VectorXd x(spec.d), b(spec.d), z(spec.r);
    Eigen::MatrixXd g(spec.d, spec.r);
    spec.initial(rng, x);
    if (!x.allFinite()) throw_nonfinite("euler_maruyama: non-finite initial value", 0, x);
    path.values.col(0) = x;
    for (long m = 0; m < grid.steps; ++m) {
        const double t = grid.time(m);
        const double dt = grid.step_size(m);
        spec.beta(t, x, b);
        spec.gamma(t, x, g);
        for (int j = 0; j < spec.r; ++j) z(j) = rng.normal();
        x += b * dt;
        x.noalias() += g * (std::sqrt(dt) * z);
        if (!x.allFinite()) throw_nonfinite("euler_maruyama: non-finite state", m + 1, x);
        path.values.col(m + 1) = x;
    }
    return path;
}

CoupledLimit coupled_limit(const DiffusionSpec& spec, const Integrand& f, double delta, double T,
                           RngStream rng) {
    if (f.input_dim() != spec.d)
        throw ConfigError("coupled_limit: integrand input dimension != spec.d");
    CoupledLimit out;
    out.u = euler_maruyama(spec, delta, T, rng);
    const SdeGrid& grid = out.u.grid;
    const int p = f.output_dim(), d = spec.d;
    out.v.resize(p, grid.steps + 1);
    out.y.resize(p * d, grid.steps + 1);
    out.y.col(0).setZero();

    auto state = f.new_limit_state();
    Eigen::VectorXd w(p), term(p * d), du(d);
    for (long m = 0; m <= grid.steps; ++m) {
        f.limit_step(*state, grid.time(m), out.u.values.col(m), w);
        out.v.col(m) = w;
        if (m > 0) {
            du = out.u.values.col(m) - out.u.values.col(m - 1);
            kron_into(out.v.col(m - 1), du, term);
            out.y.col(m) = out.y.col(m - 1) + term;
        }
    }
    return out;
}

std::vector<SdePath> simulate_limit_ensemble(const DiffusionSpec& spec, double delta, double T,
                                             int num_paths, std::uint64_t master_seed,
                                             int workers) {
    std::vector<SdePath> paths(static_cast<std::size_t>(num_paths));
    parallel_for_index(paths.size(), workers, [&](std::size_t i) {
        RngStream rng(seed_schedule(master_seed, static_cast<std::uint32_t>(i),
                                    StreamPurpose::Limit));
        paths[i] = euler_maruyama(spec, delta, T, rng);
    });
    return paths;
}

std::vector<SdePath> simulate_limit_ensemble_serial(const DiffusionSpec& spec, double delta,
                                                    double T, int num_paths,
                                                    std::uint64_t master_seed) {
    std::vector<SdePath> paths(static_cast<std::size_t>(num_paths));
    serial_for_index(paths.size(), [&](std::size_t i) {
        RngStream rng(seed_schedule(master_seed, static_cast<std::uint32_t>(i),
                                    StreamPurpose::Limit));
        paths[i] = euler_maruyama(spec, delta, T, rng);
    });
    return paths;
}

}  // namespace stepdiff
