#include "efie/estimator.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <thread>

namespace efie {

namespace {

void finish_element(ResidualField& res, int t) {
    const SurfaceMesh& mesh = *res.mesh;
    const auto& w = res.rule.weights;
    CVec3 Rm = CVec3::Zero();
    cplx rm = 0.0;
    double Rn = 0.0, rn = 0.0;
    for (std::size_t q = 0; q < w.size(); ++q) {
        Rm += w[q] * res.R[t][q];
        rm += w[q] * res.r[t][q];
        Rn += w[q] * res.R[t][q].squaredNorm();
        rn += w[q] * std::norm(res.r[t][q]);
    }
    res.R_mean[t] = Rm;
    res.r_mean[t] = rm;
    res.R_norm[t] = std::sqrt(Rn * mesh.area(t));
    res.r_norm[t] = std::sqrt(rn * mesh.area(t));
}

void allocate(ResidualField& res) {
    const int nt = res.mesh->num_triangles();
    const std::size_t nq = res.rule.size();
    res.R.assign(nt, std::vector<CVec3>(nq, CVec3::Zero()));
    res.r.assign(nt, std::vector<cplx>(nq, 0.0));
    res.R_mean.assign(nt, CVec3::Zero());
    res.r_mean.assign(nt, 0.0);
    res.R_norm.assign(nt, 0.0);
    res.r_norm.assign(nt, 0.0);
}

}  // namespace

double ResidualField::R_fluctuation(int t) const {
    double s = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) s += rule.weights[q] * (R[t][q] - R_mean[t]).squaredNorm();
    return std::sqrt(s * mesh->area(t));
}

double ResidualField::r_fluctuation(int t) const {
    double s = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) s += rule.weights[q] * std::norm(r[t][q] - r_mean[t]);
    return std::sqrt(s * mesh->area(t));
}

ResidualField compute_residuals(const RTSpace& rt, const CVector& U, const IncidentWave& wave,
                                const ResidualOptions& opts) {
    wave.validate();
    ResidualField res;
    res.mesh = rt.mesh_ptr();
    res.rule = gauss_triangle(opts.order);
    allocate(res);
    const SurfaceMesh& mesh = rt.mesh();
    const double k = wave.k;
    const double k2 = k * k;
    const PotentialEvaluator ev(rt.mesh_ptr(), k, opts.eval);
    const SurfaceDensity density = SurfaceDensity::tangential_rt0(rt, U);
    const int nt = mesh.num_triangles();
    std::vector<double> leak(nt, 0.0);

    auto element = [&](int t) {
        const Vec3& n = mesh.normal(t);
        for (std::size_t q = 0; q < res.rule.size(); ++q) {
            const auto& l = res.rule.points[q];
            if (l[0] <= 0.0 || l[1] <= 0.0 || l[2] <= 0.0) throw NumericalError("residual node on element boundary");
            const Vec3 x = mesh.point(t, l[0], l[1], l[2]);
            const PotentialValues pv = ev.evaluate(density, x, t);
            CVec3 R = wave.trace(x, n) + k2 * tangential(pv.A, n) + tangential(pv.grad_V, n);
            const double mag = R.norm();
            const double normal = std::abs(bdot(R, n));
            if (mag > 0.0) leak[t] = std::max(leak[t], normal / mag);
            if (normal > 1e-10 * mag) throw NumericalError("residual R is not tangential");
            res.R[t][q] = tangential(R, n);
            res.r[t][q] = wave.trace_curl(x, n) + k2 * bdot(pv.curl_A, n);
        }
        finish_element(res, t);
    };

    const int threads = std::max(1, opts.threads);
    if (threads == 1) {
        for (int t = 0; t < nt; ++t) element(t);
    } else {
        std::atomic<int> next{0};
        std::vector<std::exception_ptr> errors(threads);
        std::vector<std::thread> pool;
        for (int w = 0; w < threads; ++w)
            pool.emplace_back([&, w]() {
                try {
                    for (int t = next++; t < nt; t = next++) element(t);
                } catch (...) {
                    errors[w] = std::current_exception();
                    next = nt;
                }
            });
        for (auto& th : pool) th.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }
    for (double v : leak) res.max_normal_leak = std::max(res.max_normal_leak, v);
    return res;
}

ResidualField make_residual_field(MeshPtr mesh, const TriangleRule& rule, std::vector<std::vector<CVec3>> R,
                                  std::vector<std::vector<cplx>> r) {
    ResidualField res;
    res.mesh = std::move(mesh);
    res.rule = rule;
    allocate(res);
    const int nt = res.mesh->num_triangles();
    if (static_cast<int>(R.size()) != nt || static_cast<int>(r.size()) != nt)
        throw InputError("residual samples do not match the mesh");
    for (int t = 0; t < nt; ++t)
        if (R[t].size() != rule.size() || r[t].size() != rule.size())
            throw InputError("residual samples do not match the rule");
    res.R = std::move(R);
    res.r = std::move(r);
    for (int t = 0; t < nt; ++t) finish_element(res, t);
    return res;
}

cplx residual_pairing(const ResidualField& res, const RTSpace& rt, const CVector& v) {
    const SurfaceMesh& mesh = *res.mesh;
    if (&rt.mesh() != &mesh) throw InputError("space and residual live on different meshes");
    cplx s = 0.0;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const PanelField f = rt.restrict_to(v, t);
        for (std::size_t q = 0; q < res.rule.size(); ++q) {
            const auto& l = res.rule.points[q];
            s += (res.rule.weights[q] * mesh.area(t)) * bdot(res.R[t][q], f(mesh.point(t, l[0], l[1], l[2])));
        }
    }
    return s;
}

cplx residual_pairing(const ResidualField& res, const P1Space& p1, const CVector& alpha) {
    const SurfaceMesh& mesh = *res.mesh;
    if (&p1.mesh() != &mesh) throw InputError("space and residual live on different meshes");
    cplx s = 0.0;
    for (int t = 0; t < mesh.num_triangles(); ++t)
        for (std::size_t q = 0; q < res.rule.size(); ++q)
            s += (res.rule.weights[q] * mesh.area(t)) * res.r[t][q] * p1.eval(alpha, t, res.rule.points[q]);
    return s;
}

IndicatorSet compute_indicators(const ResidualField& res) {
    const SurfaceMesh& mesh = *res.mesh;
    const int nt = res.num_elements();
    IndicatorSet ind;
    ind.eta.resize(nt);
    ind.osc_R.resize(nt);
    ind.osc_r.resize(nt);
    ind.h.resize(nt);
    double sum = 0.0;
    for (int t = 0; t < nt; ++t) {
        const double h = mesh.h(t);
        const double e2 = h * (res.R_norm[t] * res.R_norm[t] + res.r_norm[t] * res.r_norm[t]);
        ind.h[t] = h;
        ind.eta[t] = std::sqrt(e2);
        ind.osc_R[t] = std::sqrt(h) * res.R_fluctuation(t);
        ind.osc_r[t] = std::sqrt(h) * res.r_fluctuation(t);
        if (!std::isfinite(e2) || !std::isfinite(ind.osc_R[t]) || !std::isfinite(ind.osc_r[t]))
            throw NumericalError("non-finite indicator on element " + std::to_string(t));
        sum += e2;
    }
    ind.total = std::sqrt(sum);
    return ind;
}

GlobalSummary global_summary(const IndicatorSet& ind, int dofs) {
    GlobalSummary s;
    double e = 0.0, o = 0.0;
    for (int t = 0; t < ind.num_elements(); ++t) {
        e += ind.eta[t] * ind.eta[t];
        o += ind.osc_R[t] * ind.osc_R[t] + ind.osc_r[t] * ind.osc_r[t];
        s.h_max = std::max(s.h_max, ind.h[t]);
    }
    s.eta = std::sqrt(e);
    s.osc = std::sqrt(o);
    s.dofs = dofs;
    return s;
}

ResidualDecomposition decompose(const ResidualField& res) {
    const SurfaceMesh& mesh = *res.mesh;
    ResidualDecomposition d;
    for (int t = 0; t < res.num_elements(); ++t) {
        const double h = mesh.h(t);
        const double a = mesh.area(t);
        d.R_total += h * res.R_norm[t] * res.R_norm[t];
        d.R_mean += h * a * res.R_mean[t].squaredNorm();
        d.R_osc += h * std::pow(res.R_fluctuation(t), 2);
        d.r_total += h * res.r_norm[t] * res.r_norm[t];
        d.r_mean += h * a * std::norm(res.r_mean[t]);
        d.r_osc += h * std::pow(res.r_fluctuation(t), 2);
    }
    return d;
}

void write_indicators_csv(const IndicatorSet& ind, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << "element_id,h,eta,osc_R,osc_r\n" << std::setprecision(17);
    for (int t = 0; t < ind.num_elements(); ++t)
        out << t << ',' << ind.h[t] << ',' << ind.eta[t] << ',' << ind.osc_R[t] << ',' << ind.osc_r[t] << '\n';
    if (!out) throw InputError("write to '" + path + "' failed");
}

}  // namespace efie
