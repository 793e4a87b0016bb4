#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "stepdiff/limit_sde.hpp"
#include "stepdiff/step_path.hpp"

namespace stepdiff {

/// Columnar CSV: header "t_index,component_0,...", one row per piece.
void write_step_path_csv(std::ostream& os, const StepPath& path);
StepPath read_step_path_csv(std::istream& is, const TimeGrid& grid);

// Binary ensemble container (little-endian):
//   magic "SPEN", u32 version, u8 kind (0 = array grid, 1 = sde grid),
//   u32 d, u64 n (0 for sde), f64 mesh, f64 T, u64 count, u64 path_count,
//   path_count x { u64 master, u32 index, u32 purpose },
//   body: per path, (count+1) x d values, column-major over time.

void write_ensemble(std::ostream& os, const PathEnsemble& ensemble);
PathEnsemble read_ensemble(std::istream& is);

void write_sde_ensemble(std::ostream& os, const std::vector<SdePath>& paths);
std::vector<SdePath> read_sde_ensemble(std::istream& is);

}  // namespace stepdiff
