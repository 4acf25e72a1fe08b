#include "efie/spaces.hpp"

#include <random>

namespace efie {

RTSpace::RTSpace(MeshPtr mesh) : mesh_(std::move(mesh)) {
    if (!mesh_) throw InputError("RTSpace needs a mesh");
    sign_.resize(mesh_->num_triangles());
    for (int t = 0; t < mesh_->num_triangles(); ++t)
        for (int a = 0; a < 3; ++a) {
            const Edge& e = mesh_->edge(mesh_->triangle_edge(t, a));
            sign_[t][a] = e.plus_side().triangle == t ? 1.0 : -1.0;
        }
}

Vec3 RTSpace::basis(int t, int a, const Vec3& y) const {
    return sign_[t][a] / (2.0 * mesh_->area(t)) * (y - mesh_->corner(t, a));
}

PanelField RTSpace::restrict_to(const CVector& coeffs, int t) const {
    PanelField f;
    const double s = 1.0 / (2.0 * mesh_->area(t));
    for (int a = 0; a < 3; ++a) {
        const cplx c = coeffs[dof(t, a)] * sign_[t][a] * s;
        f.alpha += c;
        f.beta += c * to_complex(mesh_->corner(t, a));
    }
    return f;
}

std::vector<PanelField> RTSpace::restrict_all(const CVector& coeffs) const {
    if (coeffs.size() != dofs()) throw InputError("RT0 coefficient vector has wrong length");
    std::vector<PanelField> out(mesh_->num_triangles());
    for (int t = 0; t < mesh_->num_triangles(); ++t) out[t] = restrict_to(coeffs, t);
    return out;
}

P1Space::P1Space(MeshPtr mesh) : mesh_(std::move(mesh)) {
    if (!mesh_) throw InputError("P1Space needs a mesh");
    stars_ = mesh_->vertex_stars();
    star_area_.assign(stars_.size(), 0.0);
    for (std::size_t v = 0; v < stars_.size(); ++v)
        for (int t : stars_[v]) star_area_[v] += mesh_->area(t);
}

Vec3 P1Space::hat_gradient(int t, int a) const {
    const Vec3 edge = mesh_->corner(t, (a + 2) % 3) - mesh_->corner(t, (a + 1) % 3);
    return mesh_->normal(t).cross(edge) / (2.0 * mesh_->area(t));
}

cplx P1Space::eval(const CVector& coeffs, int t, const std::array<double, 3>& bary) const {
    const Triangle& tri = mesh_->triangle(t);
    return bary[0] * coeffs[tri[0]] + bary[1] * coeffs[tri[1]] + bary[2] * coeffs[tri[2]];
}

namespace {

void check_point(const Barycentric& b) {
    const double tol = 1e-12;
    if (b[0] < -tol || b[1] < -tol || b[2] < -tol || std::abs(b[0] + b[1] + b[2] - 1.0) > tol)
        throw InputError("point outside the triangle");
}

}  // namespace

CVec3 eval_rt(const RTSpace& rt, const CVector& U, int t, const Barycentric& bary) {
    check_point(bary);
    return rt.restrict_to(U, t)(rt.mesh().point(t, bary[0], bary[1], bary[2]));
}

cplx div_rt(const RTSpace& rt, const CVector& U, int t) { return rt.restrict_to(U, t).div(); }

CVector curl_p1(const P1Space& p1, const RTSpace& rt, const CVector& alpha) {
    if (alpha.size() != p1.dofs()) throw InputError("P1 coefficient vector has wrong length");
    CVector c(rt.dofs());
    for (int e = 0; e < rt.dofs(); ++e) {
        const Edge& ed = rt.mesh().edge(e);
        c[e] = alpha[ed.v[1]] - alpha[ed.v[0]];
    }
    return c;
}

CVector clement_p1(const P1Space& p1, const ScalarField& f, int order) {
    const SurfaceMesh& mesh = p1.mesh();
    const TriangleRule rule = gauss_triangle(order);
    CVector out = CVector::Zero(p1.dofs());
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const Triangle& tri = mesh.triangle(t);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const auto& l = rule.points[q];
            const cplx fx = f(t, mesh.point(t, l[0], l[1], l[2])) * (rule.weights[q] * mesh.area(t));
            for (int a = 0; a < 3; ++a) out[tri[a]] += fx * l[a];
        }
    }
    for (int v = 0; v < p1.dofs(); ++v) out[v] *= 3.0 / p1.star_area(v);
    return out;
}

CVector clement_rt(const RTSpace& rt, const VectorField& v, int order) {
    const SurfaceMesh& mesh = rt.mesh();
    const TriangleRule rule = gauss_triangle(order);
    std::vector<CVec3> mean(mesh.num_triangles(), CVec3::Zero());
    std::vector<char> needed(mesh.num_triangles(), 0);
    for (const Edge& e : mesh.edges()) needed[e.reference_side().triangle] = 1;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        if (!needed[t]) continue;
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const auto& l = rule.points[q];
            mean[t] += rule.weights[q] * v(t, mesh.point(t, l[0], l[1], l[2]));
        }
    }
    CVector c(rt.dofs());
    for (int e = 0; e < rt.dofs(); ++e) {
        const Edge& ed = mesh.edge(e);
        const EdgeSide& ref = ed.reference_side();
        const double sigma = ed.reference == ed.plus ? 1.0 : -1.0;
        c[e] = sigma * ed.length * bdot(mean[ref.triangle], ref.nu);
    }
    return c;
}

double l2_error_sq(const RTSpace& rt, const CVector& U, const VectorField& v, int t, int order) {
    const SurfaceMesh& mesh = rt.mesh();
    const TriangleRule rule = gauss_triangle(order);
    const PanelField u = rt.restrict_to(U, t);
    double s = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const auto& l = rule.points[q];
        const Vec3 x = mesh.point(t, l[0], l[1], l[2]);
        s += rule.weights[q] * (v(t, x) - u(x)).squaredNorm();
    }
    return s * mesh.area(t);
}

double l2_error_sq(const P1Space& p1, const CVector& a, const ScalarField& f, int t, int order) {
    const SurfaceMesh& mesh = p1.mesh();
    const TriangleRule rule = gauss_triangle(order);
    double s = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const auto& l = rule.points[q];
        s += rule.weights[q] * std::norm(f(t, mesh.point(t, l[0], l[1], l[2])) - p1.eval(a, t, l));
    }
    return s * mesh.area(t);
}

VectorField tangential_linear_field(const SurfaceMesh& mesh, const Eigen::Matrix3d& M) {
    return [&mesh, M](int t, const Vec3& x) { return to_complex(tangential(Vec3(M * x), mesh.normal(t))); };
}

NoncommutingWitness noncommuting_witness(const RTSpace& rt, double scale, unsigned seed) {
    const SurfaceMesh& mesh = rt.mesh();
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Eigen::Matrix3d M;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) M(i, j) = dist(gen);
    M *= scale;
    const CVector c = clement_rt(rt, tangential_linear_field(mesh, M));
    NoncommutingWitness best;
    best.M = M;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const Vec3& n = mesh.normal(t);
        const double div_v = M.trace() - n.dot(M * n);
        const cplx div_i = div_rt(rt, c, t);
        if (best.triangle < 0 || std::abs(div_i - div_v) > best.margin()) {
            best.triangle = t;
            best.div_interpolant = div_i;
            best.div_field = div_v;
        }
    }
    return best;
}

CVector prolongate_rt(const RTSpace& coarse, const CVector& U, const RTSpace& fine, const RefinementResult& ref) {
    const SurfaceMesh& cm = coarse.mesh();
    const SurfaceMesh& fm = fine.mesh();
    if (static_cast<int>(ref.source.size()) != fm.num_triangles())
        throw InputError("refinement record does not match the fine mesh");
    std::vector<int> record_of(fm.num_triangles(), -1);
    for (std::size_t r = 0; r < ref.records.size(); ++r)
        for (int c : ref.records[r].children) record_of[c] = static_cast<int>(r);
    const auto fields = coarse.restrict_all(U);

    auto contains = [&cm](int t, const Vec3& x) {
        const Vec3& n = cm.normal(t);
        if (std::abs(n.dot(x - cm.corner(t, 0))) > 1e-10 * cm.h(t)) return false;
        for (int a = 0; a < 3; ++a) {
            const Vec3 e = cm.corner(t, (a + 2) % 3) - cm.corner(t, (a + 1) % 3);
            if (n.cross(e).dot(x - cm.corner(t, (a + 1) % 3)) < -1e-10 * cm.h(t) * cm.h(t)) return false;
        }
        return true;
    };

    CVector out(fine.dofs());
    for (int e = 0; e < fine.dofs(); ++e) {
        const Edge& ed = fm.edge(e);
        const Vec3 mid = 0.5 * (fm.vertex(ed.v[0]) + fm.vertex(ed.v[1]));
        const int t = ed.plus_side().triangle;
        int host = ref.source[t];
        if (host < 0) {
            for (int p : ref.records[record_of[t]].parents)
                if (contains(p, mid)) host = p;
        }
        if (host < 0) throw NumericalError("cannot locate fine edge in the coarse mesh");
        out[e] = ed.length * bdot(fields[host](mid), ed.plus_side().nu);
    }
    return out;
}

}  // namespace efie
