#include "efie/mesh.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <unordered_map>

namespace efie {

namespace {

// Line reader that skips blank lines and '#' comments and remembers the
// current line number for error messages.
class LineReader {
public:
    LineReader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

    bool next(std::istringstream& line) {
        std::string s;
        while (std::getline(in_, s)) {
            ++number_;
            const auto hash = s.find('#');
            if (hash != std::string::npos) s.erase(hash);
            if (s.find_first_not_of(" \t\r") == std::string::npos) continue;
            line.clear();
            line.str(s);
            return true;
        }
        return false;
    }

    void require(std::istringstream& line, const char* what) {
        if (!next(line)) fail(std::string("unexpected end of file, expected ") + what);
    }

    [[noreturn]] void fail(const std::string& msg) const {
        std::ostringstream os;
        os << source_ << ":" << number_ << ": " << msg;
        throw InputError(os.str());
    }

    int number() const { return number_; }

private:
    std::istream& in_;
    std::string source_;
    int number_ = 0;
};

template <class T>
T read_value(std::istringstream& line, LineReader& r, const char* what) {
    T v;
    if (!(line >> v)) r.fail(std::string("cannot parse ") + what);
    return v;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

SurfaceMesh parse_off(std::istream& in, const std::string& source, const MeshOptions& opts) {
    LineReader r(in, source);
    std::istringstream line;
    r.require(line, "OFF header");
    std::string word;
    line >> word;
    if (word != "OFF") r.fail("expected 'OFF' header, found '" + word + "'");
    // counts may follow the keyword on the same line
    long nv, nf;
    if (!(line >> nv)) {
        r.require(line, "vertex/face counts");
        nv = read_value<long>(line, r, "vertex count");
    }
    nf = read_value<long>(line, r, "face count");
    if (nv <= 0 || nf <= 0) r.fail("vertex and face counts must be positive");

    MeshData d;
    d.vertices.reserve(nv);
    for (long i = 0; i < nv; ++i) {
        r.require(line, "vertex coordinates");
        Vec3 p;
        for (int c = 0; c < 3; ++c) p[c] = read_value<double>(line, r, "vertex coordinate");
        d.vertices.push_back(p);
    }
    d.triangles.reserve(nf);
    for (long i = 0; i < nf; ++i) {
        r.require(line, "face");
        const int n = read_value<int>(line, r, "face vertex count");
        if (n != 3) r.fail("face " + std::to_string(i) + " has " + std::to_string(n) + " vertices, only triangles supported");
        Triangle t;
        for (int c = 0; c < 3; ++c) {
            t[c] = read_value<int>(line, r, "face vertex index");
            if (t[c] < 0 || t[c] >= nv) r.fail("vertex index " + std::to_string(t[c]) + " out of range");
        }
        d.triangles.push_back(t);
    }
    return SurfaceMesh::build(std::move(d), opts);
}

SurfaceMesh parse_gmsh(std::istream& in, const std::string& source, const MeshOptions& opts) {
    LineReader r(in, source);
    std::istringstream line;
    MeshData d;
    std::unordered_map<long, int> node_index;
    bool have_format = false, have_nodes = false, have_elements = false;

    while (r.next(line)) {
        const std::string section = trim(line.str());
        if (section == "$MeshFormat") {
            r.require(line, "format line");
            const std::string version = read_value<std::string>(line, r, "version");
            const int file_type = read_value<int>(line, r, "file type");
            if (version.rfind("2.", 0) != 0) r.fail("unsupported MSH version " + version + " (need 2.2)");
            if (file_type != 0) r.fail("binary MSH files are not supported");
            r.require(line, "$EndMeshFormat");
            if (trim(line.str()) != "$EndMeshFormat") r.fail("expected $EndMeshFormat");
            have_format = true;
        } else if (section == "$Nodes") {
            r.require(line, "node count");
            const long n = read_value<long>(line, r, "node count");
            for (long i = 0; i < n; ++i) {
                r.require(line, "node");
                const long id = read_value<long>(line, r, "node id");
                Vec3 p;
                for (int c = 0; c < 3; ++c) p[c] = read_value<double>(line, r, "node coordinate");
                if (!node_index.try_emplace(id, static_cast<int>(d.vertices.size())).second)
                    r.fail("duplicate node id " + std::to_string(id));
                d.vertices.push_back(p);
            }
            r.require(line, "$EndNodes");
            if (trim(line.str()) != "$EndNodes") r.fail("expected $EndNodes");
            have_nodes = true;
        } else if (section == "$Elements") {
            if (!have_nodes) r.fail("$Elements before $Nodes");
            r.require(line, "element count");
            const long n = read_value<long>(line, r, "element count");
            for (long i = 0; i < n; ++i) {
                r.require(line, "element");
                read_value<long>(line, r, "element id");
                const int type = read_value<int>(line, r, "element type");
                const int ntags = read_value<int>(line, r, "tag count");
                for (int t = 0; t < ntags; ++t) read_value<long>(line, r, "tag");
                if (type == 15 || type == 1) continue;  // points and lines carry no surface
                if (type != 2) r.fail("unsupported element type " + std::to_string(type));
                Triangle tri;
                for (int c = 0; c < 3; ++c) {
                    const long id = read_value<long>(line, r, "element node");
                    auto it = node_index.find(id);
                    if (it == node_index.end()) r.fail("unknown node id " + std::to_string(id));
                    tri[c] = it->second;
                }
                d.triangles.push_back(tri);
            }
            r.require(line, "$EndElements");
            if (trim(line.str()) != "$EndElements") r.fail("expected $EndElements");
            have_elements = true;
        } else if (!section.empty() && section[0] == '$') {
            // skip unknown section
            const std::string end = "$End" + section.substr(1);
            do {
                r.require(line, end.c_str());
            } while (trim(line.str()) != end);
        } else {
            r.fail("unexpected content '" + section + "'");
        }
    }
    if (!have_format) r.fail("missing $MeshFormat section");
    if (!have_elements) r.fail("missing $Elements section");
    // drop nodes that only served points/lines
    std::vector<int> remap(d.vertices.size(), -1);
    std::vector<Vec3> used;
    for (auto& t : d.triangles)
        for (int& v : t) {
            if (remap[v] < 0) {
                remap[v] = static_cast<int>(used.size());
                used.push_back(d.vertices[v]);
            }
            v = remap[v];
        }
    d.vertices = std::move(used);
    return SurfaceMesh::build(std::move(d), opts);
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open mesh file '" + path + "'");
    return in;
}

}  // namespace

SurfaceMesh read_off(std::istream& in, const MeshOptions& opts) { return parse_off(in, "<off>", opts); }

SurfaceMesh read_gmsh(std::istream& in, const MeshOptions& opts) { return parse_gmsh(in, "<msh>", opts); }

SurfaceMesh load_mesh(const std::string& path, MeshFormat format, const MeshOptions& opts) {
    auto in = open_input(path);
    switch (format) {
        case MeshFormat::off: return parse_off(in, path, opts);
        case MeshFormat::gmsh: return parse_gmsh(in, path, opts);
        case MeshFormat::vtk: break;
    }
    throw InputError("reading VTK meshes is not supported");
}

SurfaceMesh load_mesh(const std::string& path, const MeshOptions& opts) {
    const auto dot = path.rfind('.');
    const std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
    if (ext == "off" || ext == "OFF") return load_mesh(path, MeshFormat::off, opts);
    if (ext == "msh" || ext == "MSH") return load_mesh(path, MeshFormat::gmsh, opts);
    throw InputError("cannot infer mesh format of '" + path + "' (expected .off or .msh)");
}

void write_off(const SurfaceMesh& mesh, std::ostream& out) {
    out << "OFF\n" << mesh.num_vertices() << ' ' << mesh.num_triangles() << ' ' << mesh.num_edges() << '\n';
    out << std::setprecision(17);
    for (const auto& v : mesh.vertices()) out << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
    for (const auto& t : mesh.triangles()) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

void write_vtk(const SurfaceMesh& mesh, std::ostream& out, std::span<const CellArray> cell_data) {
    out << "# vtk DataFile Version 3.0\nefie surface mesh\nASCII\nDATASET POLYDATA\n";
    out << "POINTS " << mesh.num_vertices() << " double\n" << std::setprecision(17);
    for (const auto& v : mesh.vertices()) out << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
    out << "POLYGONS " << mesh.num_triangles() << ' ' << 4 * mesh.num_triangles() << '\n';
    for (const auto& t : mesh.triangles()) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    if (cell_data.empty()) return;
    out << "CELL_DATA " << mesh.num_triangles() << '\n';
    for (const auto& a : cell_data) {
        if (static_cast<int>(a.values.size()) != mesh.num_triangles())
            throw InputError("cell array '" + a.name + "' has wrong length");
        out << "SCALARS " << a.name << " double 1\nLOOKUP_TABLE default\n";
        for (double v : a.values) out << v << '\n';
    }
}

void save_mesh(const SurfaceMesh& mesh, const std::string& path, MeshFormat format,
               std::span<const CellArray> cell_data) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write '" + path + "'");
    switch (format) {
        case MeshFormat::off: write_off(mesh, out); break;
        case MeshFormat::vtk: write_vtk(mesh, out, cell_data); break;
        case MeshFormat::gmsh: throw InputError("writing Gmsh files is not supported");
    }
    if (!out) throw InputError("write to '" + path + "' failed");
}

}  // namespace efie
