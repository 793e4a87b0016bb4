#include "stepdiff/ensemble_io.hpp"

#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>

#include "stepdiff/errors.hpp"

namespace stepdiff {

namespace {

constexpr char kMagic[4] = {'S', 'P', 'E', 'N'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& os, T value) {
    os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
    T value{};
    is.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!is) throw ContractViolation("ensemble container: truncated stream");
    return value;
}

struct Header {
    std::uint8_t kind = 0;
    std::uint32_t d = 0;
    std::uint64_t n = 0;
    double mesh = 0.0;
    double T = 0.0;
    std::uint64_t count = 0;
    std::uint64_t path_count = 0;
};

void write_header(std::ostream& os, const Header& h) {
    os.write(kMagic, 4);
    put(os, kVersion);
    put(os, h.kind);
    put(os, h.d);
    put(os, h.n);
    put(os, h.mesh);
    put(os, h.T);
    put(os, h.count);
    put(os, h.path_count);
}

Header read_header(std::istream& is) {
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw ContractViolation("ensemble container: bad magic");
    if (get<std::uint32_t>(is) != kVersion)
        throw ContractViolation("ensemble container: unsupported version");
    Header h;
    h.kind = get<std::uint8_t>(is);
    h.d = get<std::uint32_t>(is);
    h.n = get<std::uint64_t>(is);
    h.mesh = get<double>(is);
    h.T = get<double>(is);
    h.count = get<std::uint64_t>(is);
    h.path_count = get<std::uint64_t>(is);
    return h;
}

void write_seeds(std::ostream& os, const std::vector<RngKey>& seeds) {
    for (const RngKey& k : seeds) {
        put(os, k.master);
        put(os, k.index);
        put(os, k.purpose);
    }
}

std::vector<RngKey> read_seeds(std::istream& is, std::uint64_t count) {
    std::vector<RngKey> seeds(count);
    for (auto& k : seeds) {
        k.master = get<std::uint64_t>(is);
        k.index = get<std::uint32_t>(is);
        k.purpose = get<std::uint32_t>(is);
    }
    return seeds;
}

void write_values(std::ostream& os, const Eigen::MatrixXd& values) {
    os.write(reinterpret_cast<const char*>(values.data()),
             static_cast<std::streamsize>(sizeof(double) * values.size()));
}

Eigen::MatrixXd read_values(std::istream& is, long rows, long cols) {
    Eigen::MatrixXd values(rows, cols);
    is.read(reinterpret_cast<char*>(values.data()),
            static_cast<std::streamsize>(sizeof(double) * values.size()));
    if (!is) throw ContractViolation("ensemble container: truncated body");
    return values;
}

}  // namespace

void write_step_path_csv(std::ostream& os, const StepPath& path) {
    os << "t_index";
    for (int i = 0; i < path.dim(); ++i) os << ",component_" << i;
    os << "\n";
    const auto& v = path.values();
    os.precision(17);
    for (long j = 0; j < v.cols(); ++j) {
        os << j;
        for (long i = 0; i < v.rows(); ++i) os << "," << v(i, j);
        os << "\n";
    }
}

StepPath read_step_path_csv(std::istream& is, const TimeGrid& grid) {
    std::string line;
    if (!std::getline(is, line)) throw ContractViolation("step path csv: missing header");
    std::vector<Eigen::VectorXd> cols;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        std::vector<double> nums;
        while (std::getline(row, cell, ',')) nums.push_back(std::stod(cell));
        if (nums.size() < 2) throw ContractViolation("step path csv: short row");
        Eigen::VectorXd v(static_cast<long>(nums.size()) - 1);
        for (std::size_t i = 1; i < nums.size(); ++i) v(static_cast<long>(i - 1)) = nums[i];
        cols.push_back(std::move(v));
    }
    if (static_cast<long>(cols.size()) != grid.count + 1)
        throw ContractViolation("step path csv: row count does not match grid");
    Eigen::MatrixXd values(cols.front().size(), static_cast<long>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) values.col(static_cast<long>(j)) = cols[j];
    return StepPath(static_cast<int>(values.rows()), grid, std::move(values));
}

void write_ensemble(std::ostream& os, const PathEnsemble& ensemble) {
    ensemble.validate();
    Header h;
    h.kind = 0;
    h.d = static_cast<std::uint32_t>(ensemble.dim);
    h.n = static_cast<std::uint64_t>(ensemble.grid.n);
    h.mesh = ensemble.grid.mesh();
    h.T = ensemble.grid.T;
    h.count = static_cast<std::uint64_t>(ensemble.grid.count);
    h.path_count = ensemble.paths.size();
    write_header(os, h);
    write_seeds(os, ensemble.seeds);
    for (const StepPath& p : ensemble.paths) write_values(os, p.values());
}

PathEnsemble read_ensemble(std::istream& is) {
    const Header h = read_header(is);
    if (h.kind != 0) throw ContractViolation("ensemble container: not an array-grid container");
    PathEnsemble e;
    e.dim = static_cast<int>(h.d);
    e.grid = TimeGrid::make(static_cast<long>(h.n), h.T);
    if (static_cast<std::uint64_t>(e.grid.count) != h.count)
        throw ContractViolation("ensemble container: inconsistent grid count");
    e.seeds = read_seeds(is, h.path_count);
    e.paths.reserve(h.path_count);
    for (std::uint64_t i = 0; i < h.path_count; ++i) {
        e.paths.emplace_back(e.dim, e.grid,
                             read_values(is, e.dim, static_cast<long>(h.count) + 1));
    }
    return e;
}

void write_sde_ensemble(std::ostream& os, const std::vector<SdePath>& paths) {
    if (paths.empty()) throw ContractViolation("write_sde_ensemble: empty ensemble");
    Header h;
    h.kind = 1;
    h.d = static_cast<std::uint32_t>(paths.front().dim);
    h.n = 0;
    h.mesh = paths.front().grid.delta;
    h.T = paths.front().grid.T;
    h.count = static_cast<std::uint64_t>(paths.front().grid.steps);
    h.path_count = paths.size();
    write_header(os, h);
    std::vector<RngKey> seeds;
    seeds.reserve(paths.size());
    for (const auto& p : paths) {
        if (p.dim != static_cast<int>(h.d) || p.grid.steps != static_cast<long>(h.count))
            throw ContractViolation("write_sde_ensemble: mixed grids");
        seeds.push_back(p.seed);
    }
    write_seeds(os, seeds);
    for (const auto& p : paths) write_values(os, p.values);
}

std::vector<SdePath> read_sde_ensemble(std::istream& is) {
    const Header h = read_header(is);
    if (h.kind != 1) throw ContractViolation("ensemble container: not an sde-grid container");
    const auto seeds = read_seeds(is, h.path_count);
    std::vector<SdePath> paths(h.path_count);
    const SdeGrid grid = SdeGrid::make(h.mesh, h.T);
    for (std::uint64_t i = 0; i < h.path_count; ++i) {
        paths[i].dim = static_cast<int>(h.d);
        paths[i].grid = grid;
        paths[i].seed = seeds[i];
        paths[i].values = read_values(is, paths[i].dim, static_cast<long>(h.count) + 1);
    }
    return paths;
}

}  // namespace stepdiff
