#include "efie/mesh.hpp"

namespace efie {

namespace {

struct Builder {
    MeshData data;

    // quad (a, b, c, d) counterclockwise seen from outside
    void quad(int a, int b, int c, int d, int face) {
        data.triangles.push_back({a, b, c});
        data.triangles.push_back({a, c, d});
        data.face_id.push_back(face);
        data.face_id.push_back(face);
    }
};

MeshData cube() {
    Builder b;
    for (int k = 0; k < 2; ++k)
        for (int j = 0; j < 2; ++j)
            for (int i = 0; i < 2; ++i) b.data.vertices.emplace_back(i, j, k);
    auto v = [](int i, int j, int k) { return i + 2 * j + 4 * k; };
    b.quad(v(0, 0, 0), v(0, 1, 0), v(1, 1, 0), v(1, 0, 0), 0);  // z = 0
    b.quad(v(0, 0, 1), v(1, 0, 1), v(1, 1, 1), v(0, 1, 1), 1);  // z = 1
    b.quad(v(0, 0, 0), v(1, 0, 0), v(1, 0, 1), v(0, 0, 1), 2);  // y = 0
    b.quad(v(0, 1, 0), v(0, 1, 1), v(1, 1, 1), v(1, 1, 0), 3);  // y = 1
    b.quad(v(0, 0, 0), v(0, 0, 1), v(0, 1, 1), v(0, 1, 0), 4);  // x = 0
    b.quad(v(1, 0, 0), v(1, 1, 0), v(1, 1, 1), v(1, 0, 1), 5);  // x = 1
    return std::move(b.data);
}

MeshData tetrahedron() {
    MeshData d;
    d.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)};
    d.triangles = {{0, 2, 1}, {0, 1, 3}, {0, 3, 2}, {1, 2, 3}};
    d.face_id = {0, 1, 2, 3};
    return d;
}

// L-shaped prism: the union of three unit squares in the xy-plane extruded
// over z in [0, 1].
MeshData l_bracket() {
    Builder b;
    const double outline[8][2] = {{0, 0}, {1, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}, {0, 1}};
    for (int z = 0; z < 2; ++z)
        for (const auto& p : outline) b.data.vertices.emplace_back(p[0], p[1], z);
    const int top = 8;
    // bottom (normal -z), top (normal +z)
    b.quad(0, 7, 4, 1, 0);
    b.quad(1, 4, 3, 2, 0);
    b.quad(7, 6, 5, 4, 0);
    b.quad(top + 0, top + 1, top + 4, top + 7, 1);
    b.quad(top + 1, top + 2, top + 3, top + 4, 1);
    b.quad(top + 7, top + 4, top + 5, top + 6, 1);
    // sides along the counterclockwise outline
    const int side_face[8] = {2, 2, 3, 4, 5, 6, 7, 7};
    for (int s = 0; s < 8; ++s) {
        const int a = s, c = (s + 1) % 8;
        b.quad(a, c, top + c, top + a, side_face[s]);
    }
    return std::move(b.data);
}

}  // namespace

Shape parse_shape(const std::string& name) {
    if (name == "cube") return Shape::cube;
    if (name == "l_bracket") return Shape::l_bracket;
    if (name == "tetrahedron") return Shape::tetrahedron;
    throw InputError("unknown geometry '" + name + "' (expected cube, l_bracket or tetrahedron)");
}

std::string to_string(Shape s) {
    switch (s) {
        case Shape::cube: return "cube";
        case Shape::l_bracket: return "l_bracket";
        case Shape::tetrahedron: return "tetrahedron";
    }
    return "unknown";
}

SurfaceMesh build_canonical(Shape shape, double scale, const MeshOptions& opts) {
    if (!(scale > 0.0)) throw InputError("scale must be positive");
    MeshData d;
    switch (shape) {
        case Shape::cube: d = cube(); break;
        case Shape::l_bracket: d = l_bracket(); break;
        case Shape::tetrahedron: d = tetrahedron(); break;
    }
    for (auto& v : d.vertices) v *= scale;
    return SurfaceMesh::build(std::move(d), opts);
}

}  // namespace efie
