#include "efie/export.hpp"

#include <cstring>
#include <fstream>

namespace efie {

namespace {

constexpr char magic[8] = {'E', 'F', 'I', 'E', 'S', 'O', 'L', '1'};

void put_u64(std::ostream& out, std::uint64_t v) { out.write(reinterpret_cast<const char*>(&v), sizeof v); }

std::uint64_t get_u64(std::istream& in) {
    std::uint64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) throw InputError("solution file truncated");
    return v;
}

}  // namespace

void write_solution(const std::string& path, const SurfaceMesh& mesh, const CVector& U) {
    if (U.size() != mesh.num_edges()) throw InputError("solution size does not match the mesh");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path + "'");
    out.write(magic, sizeof magic);
    put_u64(out, static_cast<std::uint64_t>(U.size()));
    put_u64(out, 1);
    for (const auto& e : mesh.edges()) {
        put_u64(out, static_cast<std::uint64_t>(e.v[0]));
        put_u64(out, static_cast<std::uint64_t>(e.v[1]));
    }
    for (Eigen::Index i = 0; i < U.size(); ++i) {
        const double re = U[i].real(), im = U[i].imag();
        out.write(reinterpret_cast<const char*>(&re), sizeof re);
        out.write(reinterpret_cast<const char*>(&im), sizeof im);
    }
    if (!out) throw InputError("write to '" + path + "' failed");
}

SolutionDump read_solution(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    char head[8];
    in.read(head, sizeof head);
    if (!in || std::memcmp(head, magic, sizeof magic) != 0) throw InputError(path + ": not a solution file");
    const std::uint64_t n = get_u64(in);
    const std::uint64_t cols = get_u64(in);
    if (cols != 1) throw InputError(path + ": expected a single column");
    SolutionDump d;
    d.edges.resize(n);
    for (auto& e : d.edges) {
        e[0] = get_u64(in);
        e[1] = get_u64(in);
    }
    d.U.resize(static_cast<Eigen::Index>(n));
    for (std::uint64_t i = 0; i < n; ++i) {
        double v[2];
        in.read(reinterpret_cast<char*>(v), sizeof v);
        if (!in) throw InputError("solution file truncated");
        d.U[static_cast<Eigen::Index>(i)] = cplx(v[0], v[1]);
    }
    return d;
}

void write_indicator_vtk(const std::string& path, const SurfaceMesh& mesh, const IndicatorSet& ind) {
    if (ind.num_elements() != mesh.num_triangles()) throw InputError("indicators do not match the mesh");
    std::vector<double> level(mesh.num_triangles());
    for (int t = 0; t < mesh.num_triangles(); ++t) level[t] = mesh.level(t);
    const CellArray cells[] = {{"eta", ind.eta}, {"osc_R", ind.osc_R}, {"osc_r", ind.osc_r}, {"h", ind.h},
                               {"level", level}};
    save_mesh(mesh, path, MeshFormat::vtk, cells);
}

}  // namespace efie
