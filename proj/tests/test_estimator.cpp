#include "doctest.h"

#include "support.hpp"

#include "efie/estimator.hpp"

#include <fstream>
#include <random>

using namespace efie;

namespace {

MeshPtr cube(int levels) {
    SurfaceMesh m = build_canonical(Shape::cube);
    for (int i = 0; i < levels; ++i) m = refine_uniform(m).mesh;
    return share(std::move(m));
}

struct Solved {
    MeshPtr mesh;
    std::unique_ptr<RTSpace> rt;
    ComplexDenseSystem sys;
    IncidentWave wave;
};

Solved solve_cube(int levels, double k) {
    Solved s;
    s.mesh = cube(levels);
    s.rt = std::make_unique<RTSpace>(s.mesh);
    s.wave.k = k;
    s.sys.A = assemble_matrix(*s.rt, k);
    s.sys.b = assemble_rhs(*s.rt, s.wave);
    solve(s.sys);
    return s;
}

}  // namespace

TEST_CASE("indicators from frozen residual samples") {
    const MeshPtr m = cube(0);
    const TriangleRule rule = gauss_triangle(4);
    std::mt19937 rng(1);
    std::normal_distribution<double> g;
    std::vector<std::vector<CVec3>> R(m->num_triangles());
    std::vector<std::vector<cplx>> r(m->num_triangles());
    for (int t = 0; t < m->num_triangles(); ++t)
        for (std::size_t q = 0; q < rule.size(); ++q) {
            R[t].push_back(tangential(CVec3(cplx(g(rng), g(rng)), g(rng), cplx(0, g(rng))), m->normal(t)));
            r[t].push_back(cplx(g(rng), g(rng)));
        }
    const ResidualField res = make_residual_field(m, rule, R, r);
    const IndicatorSet ind = compute_indicators(res);
    REQUIRE(ind.num_elements() == m->num_triangles());
    double total = 0.0, osc = 0.0;
    for (int t = 0; t < m->num_triangles(); ++t) {
        double nR = 0.0, nr = 0.0, fR = 0.0, fr = 0.0;
        CVec3 mR = CVec3::Zero();
        cplx mr = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q) {
            mR += rule.weights[q] * R[t][q];
            mr += rule.weights[q] * r[t][q];
        }
        for (std::size_t q = 0; q < rule.size(); ++q) {
            nR += rule.weights[q] * m->area(t) * R[t][q].squaredNorm();
            nr += rule.weights[q] * m->area(t) * std::norm(r[t][q]);
            fR += rule.weights[q] * m->area(t) * (R[t][q] - mR).squaredNorm();
            fr += rule.weights[q] * m->area(t) * std::norm(r[t][q] - mr);
        }
        const double h = m->h(t);
        CHECK(ind.h[t] == h);
        CHECK(ind.eta[t] == doctest::Approx(std::sqrt(h * (nR + nr))).epsilon(1e-14));
        CHECK(ind.osc_R[t] == doctest::Approx(std::sqrt(h * fR)).epsilon(1e-13));
        CHECK(ind.osc_r[t] == doctest::Approx(std::sqrt(h * fr)).epsilon(1e-13));
        CHECK(ind.osc_R[t] * ind.osc_R[t] + ind.osc_r[t] * ind.osc_r[t] <= ind.eta[t] * ind.eta[t] * (1 + 1e-14));
        total += h * (nR + nr);
        osc += h * (fR + fr);
    }
    CHECK(ind.total == doctest::Approx(std::sqrt(total)).epsilon(1e-14));
    const GlobalSummary s = global_summary(ind, 18);
    CHECK(s.eta == doctest::Approx(ind.total).epsilon(1e-15));
    CHECK(s.osc == doctest::Approx(std::sqrt(osc)).epsilon(1e-13));
    CHECK(s.h_max == m->h_max());
    CHECK(s.dofs == 18);

    const ResidualDecomposition d = decompose(res);
    CHECK(std::abs(d.R_total - d.R_mean - d.R_osc) <= 1e-12 * d.R_total);
    CHECK(std::abs(d.r_total - d.r_mean - d.r_osc) <= 1e-12 * d.r_total);

    // constant samples have no oscillation
    std::vector<std::vector<CVec3>> Rc(m->num_triangles(), std::vector<CVec3>(rule.size(), CVec3(0, 1, 0)));
    std::vector<std::vector<cplx>> rc(m->num_triangles(), std::vector<cplx>(rule.size(), 2.0));
    const IndicatorSet ic = compute_indicators(make_residual_field(m, rule, Rc, rc));
    for (int t = 0; t < m->num_triangles(); ++t) {
        CHECK(ic.osc_R[t] <= 1e-15);
        CHECK(ic.osc_r[t] <= 1e-15);
    }
    CHECK_THROWS_AS(make_residual_field(m, rule, {}, {}), InputError);

    std::vector<std::vector<cplx>> bad = r;
    bad[3][0] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(compute_indicators(make_residual_field(m, rule, R, bad)), NumericalError);
}

TEST_CASE("residuals of a Galerkin solution") {
    const Solved s = solve_cube(1, 1.0);
    ResidualOptions opts;
    const ResidualField res = compute_residuals(*s.rt, s.sys.x, s.wave, opts);
    CHECK(res.num_elements() == s.mesh->num_triangles());
    CHECK(res.max_normal_leak <= 1e-10);
    for (int t = 0; t < res.num_elements(); ++t)
        for (const CVec3& R : res.R[t]) CHECK(std::abs(bdot(R, s.mesh->normal(t))) <= 1e-14 * std::max(1.0, R.norm()));

    // Galerkin orthogonality seen through the residual: int R.psi_e vanishes up
    // to the sampling error, and int r alpha does for every hat function
    // because curl alpha is a discrete test function.
    const double scale = s.sys.b.cwiseAbs().maxCoeff();
    for (int e = 0; e < s.rt->dofs(); ++e) {
        CVector v = CVector::Zero(s.rt->dofs());
        v[e] = 1.0;
        CHECK(std::abs(residual_pairing(res, *s.rt, v)) <= 0.05 * scale);
    }
    const P1Space p1(s.mesh);
    double worst = 0.0, size = 0.0;
    for (int v = 0; v < p1.dofs(); ++v) {
        CVector a = CVector::Zero(p1.dofs());
        a[v] = 1.0;
        worst = std::max(worst, std::abs(residual_pairing(res, p1, a)));
        // the incident part alone is not small
        size = std::max(size, std::abs(assemble_rhs(*s.rt, s.wave).dot(curl_p1(p1, *s.rt, a))));
    }
    CHECK(worst <= 0.05 * size);

    const IndicatorSet ind = compute_indicators(res);
    CHECK(ind.total > 0.0);
    const ResidualDecomposition d = decompose(res);
    CHECK(std::abs(d.R_total - d.R_mean - d.R_osc) <= 1e-12 * d.R_total);
    CHECK(std::abs(d.r_total - d.r_mean - d.r_osc) <= 1e-12 * d.r_total);
    CHECK(d.R_total + d.r_total == doctest::Approx(ind.total * ind.total).epsilon(1e-12));
}

TEST_CASE("residual sampling under order refinement") {
    // grad V_k div U has logarithmic singularities at the edges, where div U
    // jumps; interior Gauss sampling converges slowly there.
    const Solved s = solve_cube(0, 1.0);
    const P1Space p1(s.mesh);
    auto R_norm = [](const ResidualField& res) {
        double n = 0.0;
        for (double v : res.R_norm) n += v * v;
        return std::sqrt(n);
    };
    auto worst_curl_pairing = [&](const ResidualField& res) {
        double worst = 0.0;
        const VectorField zero = [](int, const Vec3&) { return CVec3::Zero().eval(); };
        for (int v = 0; v < p1.dofs(); ++v) {
            CVector a = CVector::Zero(p1.dofs());
            a[v] = 1.0;
            const CVector c = curl_p1(p1, *s.rt, a);
            double psi = 0.0;
            for (int t = 0; t < s.mesh->num_triangles(); ++t) psi += l2_error_sq(*s.rt, c, zero, t);
            worst = std::max(worst, std::abs(residual_pairing(res, *s.rt, c)) / (R_norm(res) * std::sqrt(psi)));
        }
        return worst;
    };
    ResidualOptions o4, o8, o16;
    o8.order = 8;
    o16.order = 16;
    const ResidualField r4 = compute_residuals(*s.rt, s.sys.x, s.wave, o4);
    const ResidualField r8 = compute_residuals(*s.rt, s.sys.x, s.wave, o8);
    const ResidualField r16 = compute_residuals(*s.rt, s.sys.x, s.wave, o16);
    CHECK(std::abs(R_norm(r8) - R_norm(r4)) <= 0.15 * R_norm(r8));
    CHECK(std::abs(R_norm(r16) - R_norm(r8)) <= 0.5 * std::abs(R_norm(r8) - R_norm(r4)));
    // pairing with discrete curls vanishes in the limit of exact sampling
    const double p4 = worst_curl_pairing(r4), p16 = worst_curl_pairing(r16);
    CHECK(p4 <= 5e-3);
    CHECK(p16 <= 0.5 * p4);
}

TEST_CASE("residual of the zero function is the incident data") {
    {
        const MeshPtr m = cube(0);
        const RTSpace rt(m);
        IncidentWave none;
        none.k = 0.0;
        none.p = CVec3::Zero();
        const ResidualField res = compute_residuals(rt, CVector::Zero(rt.dofs()), none);
        const IndicatorSet ind = compute_indicators(res);
        for (double e : ind.eta) CHECK(e == 0.0);
    }
    const MeshPtr m = cube(0);
    const RTSpace rt(m);
    IncidentWave w;
    w.k = 1.3;
    const ResidualField res = compute_residuals(rt, CVector::Zero(rt.dofs()), w);
    for (int t = 0; t < m->num_triangles(); ++t)
        for (std::size_t q = 0; q < res.rule.size(); ++q) {
            const auto& l = res.rule.points[q];
            const Vec3 x = m->point(t, l[0], l[1], l[2]);
            CHECK((res.R[t][q] - w.trace(x, m->normal(t))).norm() <= 1e-15);
            CHECK(std::abs(res.r[t][q] - w.trace_curl(x, m->normal(t))) <= 1e-15);
        }
}

TEST_CASE("residual computation is independent of the thread count") {
    const Solved s = solve_cube(1, 1.0);
    ResidualOptions a, b;
    b.threads = 3;
    const ResidualField ra = compute_residuals(*s.rt, s.sys.x, s.wave, a);
    const ResidualField rb = compute_residuals(*s.rt, s.sys.x, s.wave, b);
    const IndicatorSet ia = compute_indicators(ra), ib = compute_indicators(rb);
    CHECK(ia.eta == ib.eta);
    CHECK(ia.osc_R == ib.osc_R);
    CHECK(ia.osc_r == ib.osc_r);
}

TEST_CASE("indicator CSV") {
    const MeshPtr m = cube(0);
    const RTSpace rt(m);
    const IndicatorSet ind = compute_indicators(compute_residuals(rt, CVector::Zero(rt.dofs()), IncidentWave{}));
    const auto dir = test::scratch_dir("indicators");
    const std::string path = (dir / "indicators.csv").string();
    write_indicators_csv(ind, path);
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "element_id,h,eta,osc_R,osc_r");
    int rows = 0;
    double sum = 0.0;
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        REQUIRE(cells.size() == 5);
        CHECK(std::stoi(cells[0]) == rows);
        sum += std::pow(std::stod(cells[2]), 2);
        ++rows;
    }
    CHECK(rows == m->num_triangles());
    CHECK(std::sqrt(sum) == doctest::Approx(ind.total).epsilon(1e-14));
    CHECK_THROWS_AS(write_indicators_csv(ind, (dir / "missing" / "x.csv").string()), InputError);
}
