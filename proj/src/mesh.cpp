#include "efie/mesh.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

namespace efie {

namespace {

std::string edge_name(int a, int b) {
    std::ostringstream os;
    os << "(" << std::min(a, b) << ", " << std::max(a, b) << ")";
    return os.str();
}

struct HalfEdge {
    int from, to, triangle, local;
};

// Faces from coplanarity: flood fill across edges whose two triangles share
// their supporting plane.
std::vector<int> detect_faces(const std::vector<Vec3>& vertices, const std::vector<Triangle>& triangles,
                              const std::vector<Vec3>& normals, const std::vector<Edge>& edges,
                              const std::vector<std::array<int, 3>>& tri_edges) {
    const int nt = static_cast<int>(triangles.size());
    std::vector<int> face(nt, -1);
    int next = 0;
    std::vector<int> stack;
    for (int seed = 0; seed < nt; ++seed) {
        if (face[seed] >= 0) continue;
        face[seed] = next;
        stack.push_back(seed);
        const Vec3 n0 = normals[seed];
        const double d0 = n0.dot(vertices[triangles[seed][0]]);
        while (!stack.empty()) {
            const int t = stack.back();
            stack.pop_back();
            for (int a = 0; a < 3; ++a) {
                const Edge& e = edges[tri_edges[t][a]];
                for (const auto& s : e.side) {
                    const int u = s.triangle;
                    if (face[u] >= 0) continue;
                    const double scale = (vertices[triangles[u][0]] - vertices[triangles[u][1]]).norm();
                    bool coplanar = (normals[u] - n0).norm() < 1e-9;
                    for (int c = 0; c < 3 && coplanar; ++c)
                        coplanar = std::abs(n0.dot(vertices[triangles[u][c]]) - d0) <= 1e-9 * std::max(1.0, scale);
                    if (coplanar) {
                        face[u] = next;
                        stack.push_back(u);
                    }
                }
            }
        }
        ++next;
    }
    return face;
}

}  // namespace

SurfaceMesh SurfaceMesh::build(MeshData data, const MeshOptions& opts) {
    SurfaceMesh m;
    m.rho_max_ = opts.rho_max;
    m.vertices_ = std::move(data.vertices);
    m.triangles_ = std::move(data.triangles);
    const int nv = m.num_vertices();
    const int nt = m.num_triangles();
    if (nt == 0) throw MeshError("mesh has no triangles");

    // geometry
    m.h_.resize(nt);
    m.area_.resize(nt);
    m.normal_.resize(nt);
    std::vector<char> used(nv, 0);
    for (int t = 0; t < nt; ++t) {
        const auto& tri = m.triangles_[t];
        for (int a = 0; a < 3; ++a) {
            if (tri[a] < 0 || tri[a] >= nv) {
                std::ostringstream os;
                os << "triangle " << t << " references vertex " << tri[a] << " out of range";
                throw MeshError(os.str());
            }
            used[tri[a]] = 1;
        }
        if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) {
            std::ostringstream os;
            os << "triangle " << t << " has repeated vertices";
            throw MeshError(os.str());
        }
        const Vec3& p0 = m.vertices_[tri[0]];
        const Vec3& p1 = m.vertices_[tri[1]];
        const Vec3& p2 = m.vertices_[tri[2]];
        const Vec3 c = (p1 - p0).cross(p2 - p0);
        const double h = std::max({(p1 - p0).norm(), (p2 - p1).norm(), (p0 - p2).norm()});
        const double area = 0.5 * c.norm();
        if (!(area > 1e-14 * h * h)) {
            std::ostringstream os;
            os << "triangle " << t << " is degenerate (area " << area << ")";
            throw MeshError(os.str());
        }
        m.h_[t] = h;
        m.area_[t] = area;
        m.normal_[t] = c / c.norm();
    }
    for (int i = 0; i < nv; ++i) {
        if (!used[i]) {
            std::ostringstream os;
            os << "vertex " << i << " is not referenced by any triangle";
            throw MeshError(os.str());
        }
    }

    // connectivity
    std::vector<HalfEdge> halves;
    halves.reserve(3 * nt);
    for (int t = 0; t < nt; ++t)
        for (int a = 0; a < 3; ++a)
            halves.push_back({m.triangles_[t][(a + 1) % 3], m.triangles_[t][(a + 2) % 3], t, a});
    std::sort(halves.begin(), halves.end(), [](const HalfEdge& x, const HalfEdge& y) {
        const auto kx = std::minmax(x.from, x.to);
        const auto ky = std::minmax(y.from, y.to);
        if (kx != ky) return kx < ky;
        return x.triangle < y.triangle;
    });
    m.tri_edges_.assign(nt, {-1, -1, -1});
    for (std::size_t i = 0; i < halves.size();) {
        const auto key = std::minmax(halves[i].from, halves[i].to);
        std::size_t j = i;
        while (j < halves.size() && std::minmax(halves[j].from, halves[j].to) == key) ++j;
        const std::size_t count = j - i;
        if (count == 1) throw MeshError("open surface: boundary edge " + edge_name(key.first, key.second));
        if (count > 2) throw MeshError("non-manifold edge " + edge_name(key.first, key.second));
        const HalfEdge& h0 = halves[i];
        const HalfEdge& h1 = halves[i + 1];
        if (h0.from == h1.from)
            throw MeshError("inconsistent orientation across edge " + edge_name(key.first, key.second));
        Edge e;
        e.v = {key.first, key.second};
        const HalfEdge* hs[2] = {&h0, &h1};
        for (int s = 0; s < 2; ++s) {
            const HalfEdge& he = *hs[s];
            e.side[s].triangle = he.triangle;
            e.side[s].local = he.local;
            const Vec3 tangent = (m.vertices_[he.to] - m.vertices_[he.from]).normalized();
            e.side[s].nu = tangent.cross(m.normal_[he.triangle]);
            if (he.from == e.v[0]) e.plus = s;
        }
        e.reference = e.side[0].triangle < e.side[1].triangle ? 0 : 1;
        e.length = (m.vertices_[e.v[1]] - m.vertices_[e.v[0]]).norm();
        const int id = static_cast<int>(m.edges_.size());
        m.tri_edges_[h0.triangle][h0.local] = id;
        m.tri_edges_[h1.triangle][h1.local] = id;
        m.edges_.push_back(e);
        i = j;
    }

    const int euler = nv - m.num_edges() + nt;
    if (euler != 2) {
        std::ostringstream os;
        os << "Euler characteristic V - E + F = " << euler << ", expected 2";
        throw MeshError(os.str());
    }

    double volume = 0.0;
    for (int t = 0; t < nt; ++t)
        volume += m.corner(t, 0).dot(m.corner(t, 1).cross(m.corner(t, 2)));
    if (!(volume > 0.0)) throw MeshError("triangles are oriented inward (negative enclosed volume)");

    for (int t = 0; t < nt; ++t) {
        if (m.shape_ratio(t) > opts.rho_max) {
            std::ostringstream os;
            os << "triangle " << t << " violates shape regularity: h^2/area = " << m.shape_ratio(t)
               << " > " << opts.rho_max;
            throw MeshError(os.str());
        }
    }

    // faces
    if (data.face_id.empty()) {
        m.face_id_ = detect_faces(m.vertices_, m.triangles_, m.normal_, m.edges_, m.tri_edges_);
    } else {
        if (static_cast<int>(data.face_id.size()) != nt) throw MeshError("face_id length mismatch");
        m.face_id_ = std::move(data.face_id);
    }
    std::map<int, std::pair<Vec3, double>> planes;
    for (int t = 0; t < nt; ++t) {
        const Vec3& n = m.normal_[t];
        auto [it, inserted] = planes.try_emplace(m.face_id_[t], n, n.dot(m.corner(t, 0)));
        if (inserted) continue;
        const auto& [n0, d0] = it->second;
        bool ok = (n - n0).norm() < 1e-9;
        for (int a = 0; a < 3 && ok; ++a)
            ok = std::abs(n0.dot(m.corner(t, a)) - d0) <= 1e-9 * std::max(1.0, m.h_[t]);
        if (!ok) {
            std::ostringstream os;
            os << "triangle " << t << " does not lie in the plane of face " << m.face_id_[t];
            throw MeshError(os.str());
        }
    }
    // renumber faces densely in order of first appearance
    std::map<int, int> remap;
    for (int& f : m.face_id_) {
        auto [it, inserted] = remap.try_emplace(f, static_cast<int>(remap.size()));
        f = it->second;
    }
    m.num_faces_ = static_cast<int>(remap.size());

    m.level_ = data.level.empty() ? std::vector<int>(nt, 0) : std::move(data.level);
    m.green_ = data.green.empty() ? std::vector<int>(nt, -1) : std::move(data.green);
    m.green_groups_ = std::move(data.green_groups);
    if (static_cast<int>(m.level_.size()) != nt || static_cast<int>(m.green_.size()) != nt)
        throw MeshError("per-triangle refinement data length mismatch");
    for (auto& g : m.green_groups_) {
        auto it = remap.find(g.face);
        if (it != remap.end()) g.face = it->second;
    }
    return m;
}

Vec3 SurfaceMesh::centroid(int t) const { return (corner(t, 0) + corner(t, 1) + corner(t, 2)) / 3.0; }

Vec3 SurfaceMesh::point(int t, double l0, double l1, double l2) const {
    return l0 * corner(t, 0) + l1 * corner(t, 1) + l2 * corner(t, 2);
}

double SurfaceMesh::h_max() const { return *std::max_element(h_.begin(), h_.end()); }

double SurfaceMesh::total_area() const { return std::accumulate(area_.begin(), area_.end(), 0.0); }

double SurfaceMesh::max_shape_ratio() const {
    double r = 0.0;
    for (int t = 0; t < num_triangles(); ++t) r = std::max(r, shape_ratio(t));
    return r;
}

int SurfaceMesh::find_edge(int a, int b) const {
    const std::array<int, 2> key{std::min(a, b), std::max(a, b)};
    auto it = std::lower_bound(edges_.begin(), edges_.end(), key,
                               [](const Edge& e, const std::array<int, 2>& k) { return e.v < k; });
    if (it == edges_.end() || it->v != key) return -1;
    return static_cast<int>(it - edges_.begin());
}

std::vector<int> SurfaceMesh::edge_patch(int t) const {
    std::vector<int> patch{t};
    for (int e : tri_edges_[t])
        for (const auto& s : edges_[e].side)
            if (s.triangle != t) patch.push_back(s.triangle);
    std::sort(patch.begin(), patch.end());
    patch.erase(std::unique(patch.begin(), patch.end()), patch.end());
    return patch;
}

std::vector<std::vector<int>> SurfaceMesh::vertex_stars() const {
    std::vector<std::vector<int>> stars(num_vertices());
    for (int t = 0; t < num_triangles(); ++t)
        for (int v : triangles_[t]) stars[v].push_back(t);
    return stars;
}

MeshData SurfaceMesh::data() const {
    MeshData d;
    d.vertices = vertices_;
    d.triangles = triangles_;
    d.face_id = face_id_;
    d.level = level_;
    d.green = green_;
    d.green_groups = green_groups_;
    return d;
}

}  // namespace efie
