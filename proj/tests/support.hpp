#pragma once

#include "doctest.h"

#include "efie/mesh.hpp"

#include <cmath>
#include <filesystem>
#include <map>
#include <string>

namespace efie::test {

/// Checks closedness, orientation, Euler relation, areas and edge normals
/// directly from the raw connectivity.
inline void check_mesh_invariants(const SurfaceMesh& m) {
    std::map<std::pair<int, int>, int> directed;
    for (int t = 0; t < m.num_triangles(); ++t) {
        const auto& tri = m.triangle(t);
        for (int a = 0; a < 3; ++a) ++directed[{tri[a], tri[(a + 1) % 3]}];
    }
    for (const auto& [e, c] : directed) {
        CHECK(c == 1);
        CHECK(directed.count({e.second, e.first}) == 1);
    }
    CHECK(static_cast<int>(directed.size()) == 2 * m.num_edges());
    CHECK(m.num_vertices() - m.num_edges() + m.num_triangles() == 2);
    for (int t = 0; t < m.num_triangles(); ++t) {
        CHECK(m.area(t) > 0.0);
        CHECK(m.shape_ratio(t) <= m.rho_max());
    }
    for (const auto& e : m.edges()) {
        const auto& s = e.reference_side();
        CHECK(std::abs(s.nu.norm() - 1.0) < 1e-12);
        CHECK(std::abs(s.nu.dot(m.normal(s.triangle))) <= 1e-12);
        const Vec3 opposite = m.corner(s.triangle, s.local);
        CHECK(s.nu.dot(m.vertex(e.v[0]) - opposite) > 0.0);
    }
}

inline std::filesystem::path scratch_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("efie_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

}  // namespace efie::test
