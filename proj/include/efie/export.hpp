#pragma once

#include "efie/estimator.hpp"
#include "efie/mesh.hpp"

#include <string>

namespace efie {

/// Binary coefficient dump: "EFIESOL1", uint64 n, uint64 columns, the edge
/// list as uint64 vertex pairs, then each column as interleaved re/im doubles.
void write_solution(const std::string& path, const SurfaceMesh& mesh, const CVector& U);

struct SolutionDump {
    std::vector<std::array<std::uint64_t, 2>> edges;
    CVector U;
};

SolutionDump read_solution(const std::string& path);

/// Legacy VTK polydata with per-cell eta, osc_R, osc_r, h and level.
void write_indicator_vtk(const std::string& path, const SurfaceMesh& mesh, const IndicatorSet& ind);

}  // namespace efie
