#include "doctest.h"

#include "efie/kernels.hpp"

#include <random>

using namespace efie;

namespace {

using Tri = std::array<Vec3, 3>;

const Tri panel{Vec3(0.1, -0.2, 0.3), Vec3(1.2, 0.1, 0.2), Vec3(0.4, 0.9, 0.5)};

Vec3 in_panel(double l1, double l2) { return (1 - l1 - l2) * panel[0] + l1 * panel[1] + l2 * panel[2]; }

Vec3 panel_normal() { return (panel[1] - panel[0]).cross(panel[2] - panel[0]).normalized(); }

OracleOptions tight() {
    OracleOptions o;
    o.tol = 1e-13;
    o.rel_tol = 1e-11;
    return o;
}

// Reference potentials: per-panel adaptive quadrature of the kernel times the density.
PotentialValues brute_force(const SurfaceDensity& d, double k, const Vec3& x) {
    PotentialValues out;
    const auto& m = d.mesh();
    for (int t = 0; t < m.num_triangles(); ++t) {
        const Tri c{m.corner(t, 0), m.corner(t, 1), m.corner(t, 2)};
        const PanelField& u = d.field(t);
        out.V += d.charge(t) * oracle_panel_integral(c, x, [&](const Vec3& y) { return green(k, x, y); }, tight());
        for (int i = 0; i < 3; ++i) {
            out.A[i] += oracle_panel_integral(c, x, [&](const Vec3& y) { return green(k, x, y) * u(y)[i]; }, tight());
            out.grad_V[i] += d.charge(t) *
                             oracle_panel_integral(c, x, [&](const Vec3& y) { return grad_green_x(k, x, y)[i]; }, tight());
            out.curl_A[i] += oracle_panel_integral(
                c, x, [&](const Vec3& y) { return cross(grad_green_x(k, x, y), u(y))[i]; }, tight());
        }
    }
    return out;
}

double rel(const CVec3& a, const CVec3& b) { return (a - b).norm() / b.norm(); }
double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("Green's function and its remainder") {
    const Vec3 x(0.3, -0.1, 0.2), y(1.0, 0.5, -0.4);
    const double r = (x - y).norm();
    CHECK(std::abs(green(2.0, x, y) - std::exp(cplx(0, 2 * r)) / (4 * pi * r)) < 1e-15);
    CHECK(green(0.0, x, y).imag() == 0.0);
    CHECK_THROWS_AS(green(1.0, x, x), SingularPointError);
    // gradient against central differences
    const double d = 1e-5;
    for (int i = 0; i < 3; ++i) {
        const Vec3 e = Vec3::Unit(i) * d;
        const cplx fd = (green(2.0, x + e, y) - green(2.0, x - e, y)) / (2 * d);
        CHECK(std::abs(grad_green_x(2.0, x, y)[i] - fd) < 1e-8);
        const cplx fdr = (green_remainder(2.0, x + e, y) - green_remainder(2.0, x - e, y)) / (2 * d);
        CHECK(std::abs(grad_green_remainder_x(2.0, x, y)[i] - fdr) < 1e-8);
    }
    CHECK(std::abs(green_remainder(2.0, x, y) - (green(2.0, x, y) - green(0.0, x, y))) < 1e-15);
    // limits at coincident points, and no cancellation just beside them
    CHECK(std::abs(green_remainder(2.0, x, x) - cplx(0, 2.0 / (4 * pi))) < 1e-15);
    CHECK(grad_green_remainder_x(2.0, x, x).norm() == 0.0);
    const Vec3 z = x + Vec3(1e-9, 0, 0);
    CHECK(std::abs(green_remainder(2.0, x, z) - cplx(-2.0 * 2.0 * 1e-9 / 2, 2.0) / (4 * pi)) < 1e-14);
}

TEST_CASE("closed-form panel integrals match adaptive quadrature") {
    const Vec3 n = panel_normal();
    const std::vector<Vec3> points{in_panel(0.3, 0.3),  in_panel(0.3, 0.3) + 0.2 * n, in_panel(0.5, 0.6) - 0.05 * n,
                                   in_panel(-0.4, 0.2), in_panel(1.5, 1.0) + 1.3 * n, in_panel(0.999, 0.0005)};
    for (const Vec3& x : points) {
        const StaticPanelIntegrals s = static_panel_integrals(panel, x);
        CHECK(std::abs(s.normal.dot(n) - 1.0) < 1e-14);
        CHECK((s.rho + s.height * s.normal - x).norm() < 1e-14);
        const cplx v = oracle_panel_integral(panel, x, [&](const Vec3& y) { return cplx(1.0 / (x - y).norm()); }, tight());
        CHECK(std::abs(s.value - v.real()) < 1e-11 * v.real());
        for (int i = 0; i < 3; ++i) {
            const cplx m = oracle_panel_integral(
                panel, x, [&](const Vec3& y) { return cplx((y - s.rho)[i] / (x - y).norm()); }, tight());
            CHECK(std::abs(s.first_moment[i] - m.real()) < 1e-11);
        }
        // gradient against central differences of the closed form
        const double d = 1e-6;
        for (int i = 0; i < 3; ++i) {
            const Vec3 e = Vec3::Unit(i) * d;
            if (s.height == 0.0 && std::abs(n[i]) > 0) continue;
            const double fd = (static_panel_integrals(panel, x + e).value - static_panel_integrals(panel, x - e).value) / (2 * d);
            const double g = s.grad[i];
            CHECK(std::abs(g - fd) < 1e-6 * std::max(1.0, std::abs(g)));
        }
        if (s.height != 0.0) {
            for (int i = 0; i < 3; ++i) {
                const cplx tq = oracle_panel_integral(
                    panel, x, [&](const Vec3& y) { return cplx((y - s.rho)[i] / std::pow((x - y).norm(), 3)); }, tight());
                CHECK(std::abs(s.tangential[i] - tq.real()) < 1e-9 * std::max(1.0, s.tangential.norm()));
            }
        }
    }
    // in-plane tangential gradient by differences along the panel
    const Vec3 x = in_panel(0.2, 0.5);
    const Vec3 t = (panel[1] - panel[0]).normalized();
    const double d = 1e-6;
    const double fd = (static_panel_potential(panel, x + d * t) - static_panel_potential(panel, x - d * t)) / (2 * d);
    CHECK(std::abs(static_panel_potential_grad(panel, x).dot(t) - fd) < 1e-7);
    CHECK(std::abs(static_panel_potential_grad(panel, x).dot(panel_normal())) < 1e-15);

    CHECK_THROWS_AS(static_panel_integrals(panel, in_panel(0.5, 0.0)), SingularPointError);
    CHECK_THROWS_AS(static_panel_integrals(panel, panel[2]), SingularPointError);
    CHECK_THROWS_AS(static_panel_integrals(panel, in_panel(0.0, 0.3)), SingularPointError);
    CHECK_NOTHROW(static_panel_integrals(panel, 2.0 * panel[1] - panel[0]));
    CHECK_NOTHROW(static_panel_integrals(panel, in_panel(0.5, 0.0) + 1e-3 * panel_normal()));
}

TEST_CASE("potential evaluator matches brute-force quadrature") {
    const MeshPtr mesh = share(refine_uniform(build_canonical(Shape::cube)).mesh);
    const RTSpace rt(mesh);
    std::mt19937 rng(2);
    std::normal_distribution<double> g;
    CVector q(mesh->num_triangles()), u(rt.dofs());
    for (auto& v : q) v = cplx(g(rng), g(rng));
    for (auto& v : u) v = cplx(g(rng), g(rng));
    const auto p0 = SurfaceDensity::scalar_p0(mesh, q);
    const auto rt0 = SurfaceDensity::tangential_rt0(rt, u);
    CHECK(rt0.charge(5) == div_rt(rt, u, 5));

    const double k = 1.5;
    EvalOptions fine;
    fine.far_order = 16;
    fine.near_order = 16;
    fine.host_order = 16;
    const PotentialEvaluator def(mesh, k), acc(mesh, k, fine);
    // tol: accuracy expected from the high-order evaluator. The remainder
    // G_k - G_0 is only Lipschitz at y = x, so panels that pass close to x
    // converge slowly under Gauss rules.
    struct Case {
        Vec3 x;
        int host;
        double tol;
    };
    std::vector<Case> cases{{Vec3(3.0, 1.0, 2.0), -1, 1e-9}, {Vec3(0.4, 0.55, 1.1), -1, 1e-6},
                            {Vec3(0.3, 0.7, 0.98), -1, 1e-3}};
    for (int t : {0, 7, 30})
        cases.push_back({mesh->point(t, 0.2, 0.3, 0.5), t, 1e-5});
    for (const auto& c : cases) {
        CAPTURE(c.x.transpose());
        CAPTURE(c.host);
        for (const SurfaceDensity* d : {&p0, &rt0}) {
            const PotentialValues ref = brute_force(*d, k, c.x);
            const PotentialValues a = acc.evaluate(*d, c.x, c.host);
            const PotentialValues b = def.evaluate(*d, c.x, c.host);
            CHECK(rel(a.V, ref.V) < c.tol);
            CHECK(rel(b.V, ref.V) < std::max(10 * c.tol, 1e-3));
            if (d == &rt0) {
                CHECK(rel(a.A, ref.A) < c.tol);
                CHECK(rel(b.A, ref.A) < std::max(10 * c.tol, 1e-3));
            }
            if (c.host < 0) {
                CHECK(rel(a.grad_V, ref.grad_V) < c.tol);
                CHECK(rel(b.grad_V, ref.grad_V) < std::max(10 * c.tol, 1e-2));
                if (d == &rt0) {
                    CHECK(rel(a.curl_A, ref.curl_A) < c.tol);
                    CHECK(rel(b.curl_A, ref.curl_A) < std::max(10 * c.tol, 1e-2));
                }
            }
        }
    }
}

TEST_CASE("surface derivatives on a host triangle") {
    const MeshPtr mesh = share(refine_uniform(build_canonical(Shape::cube)).mesh);
    const RTSpace rt(mesh);
    std::mt19937 rng(4);
    std::normal_distribution<double> g;
    CVector u(rt.dofs());
    for (auto& v : u) v = cplx(g(rng), g(rng));
    const auto d = SurfaceDensity::tangential_rt0(rt, u);
    EvalOptions fine;
    fine.far_order = 16;
    fine.near_order = 16;
    fine.host_order = 16;
    const PotentialEvaluator ev(mesh, 1.0, fine);
    const int t = 11;
    const Vec3 x = mesh->point(t, 0.3, 0.3, 0.4);
    const Vec3 n = mesh->normal(t);
    const Vec3 e1 = (mesh->corner(t, 1) - mesh->corner(t, 0)).normalized();
    const Vec3 e2 = n.cross(e1);
    const double h = 1e-4;
    // tangential gradient of V(div U) and n.curl A by differences inside the host triangle
    auto V = [&](const Vec3& y) { return ev.evaluate(d, y, t).V; };
    auto A = [&](const Vec3& y) { return ev.evaluate(d, y, t).A; };
    const CVec3 grad = ev.eval_grad_Vk_div(d, x, t);
    CHECK(std::abs(bdot(grad, n)) < 1e-14);
    for (const Vec3& e : {e1, e2}) {
        const cplx fd = (V(x + h * e) - V(x - h * e)) / (2 * h);
        CHECK(std::abs(bdot(grad, e) - fd) < 1e-6 * grad.norm());
    }
    // n.curl A = d_e1 (A.e2) - d_e2 (A.e1)
    const cplx fd = (bdot(A(x + h * e1), e2) - bdot(A(x - h * e1), e2)) / (2 * h) -
                    (bdot(A(x + h * e2), e1) - bdot(A(x - h * e2), e1)) / (2 * h);
    const cplx c = ev.eval_curl_Ak(d, x, t);
    CHECK(std::abs(c - fd) < 1e-6 * std::abs(c));
    CHECK_THROWS_AS(ev.eval_curl_Ak(d, x, -1), InputError);
    CHECK_THROWS_AS(PotentialEvaluator(mesh, -1.0), InputError);
}

TEST_CASE("static evaluator is real for real densities") {
    const MeshPtr mesh = share(build_canonical(Shape::tetrahedron));
    CVector q = CVector::Ones(mesh->num_triangles());
    const auto d = SurfaceDensity::scalar_p0(mesh, q);
    const PotentialEvaluator ev(mesh, 0.0);
    const auto v = ev.evaluate(d, Vec3(0.1, 0.2, 3.0));
    CHECK(v.V.imag() == 0.0);
    CHECK(v.grad_V.imag().norm() == 0.0);
    // far field of a total charge Q is Q / (4 pi r)
    const Vec3 far(3000.0, 2000.0, 1000.0);
    const double Q = mesh->total_area();
    CHECK(ev.eval_Vk(d, far).real() == doctest::Approx(Q / (4 * pi * far.norm())).epsilon(1e-3));
}
