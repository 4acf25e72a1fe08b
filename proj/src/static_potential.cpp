#include "efie/kernels.hpp"

#include <cmath>
#include <sstream>

namespace efie {

StaticPanelIntegrals static_panel_integrals(const std::array<Vec3, 3>& tri, const Vec3& x) {
    StaticPanelIntegrals out;
    const Vec3 c = (tri[1] - tri[0]).cross(tri[2] - tri[0]);
    const Vec3 n = c.normalized();
    const double diam = std::max({(tri[1] - tri[0]).norm(), (tri[2] - tri[1]).norm(), (tri[0] - tri[2]).norm()});
    double h = n.dot(x - tri[0]);
    if (std::abs(h) <= 1e-12 * diam) h = 0.0;
    const Vec3 rho = x - h * n;
    const double ah = std::abs(h);

    double value = 0.0, omega = 0.0;
    Vec3 sum_mf = Vec3::Zero(), first = Vec3::Zero();
    for (int i = 0; i < 3; ++i) {
        const Vec3& a = tri[i];
        const Vec3& b = tri[(i + 1) % 3];
        const double len = (b - a).norm();
        const Vec3 l = (b - a) / len;
        const Vec3 m = l.cross(n);
        const double t0 = (a - rho).dot(m);
        const double sm = (a - rho).dot(l);
        const double sp = sm + len;
        const double r0sq = t0 * t0 + h * h;
        const double rm = (x - a).norm();
        const double rp = (x - b).norm();
        const double tol = 1e-12 * diam;
        if (r0sq <= tol * tol && sm <= tol && sp >= -tol) {
            std::ostringstream os;
            os << "evaluation point lies on a triangle edge (distance " << std::sqrt(r0sq) << ")";
            throw SingularPointError(os.str());
        }
        // f = log((R+ + s+)/(R- + s-)), written to avoid cancellation
        double num, den;
        if (sp + sm >= 0.0) {
            num = rp + sp;
            den = sm >= 0.0 ? rm + sm : r0sq / (rm - sm);
        } else {
            num = rm - sm;
            den = sp <= 0.0 ? rp - sp : r0sq / (rp + sp);
        }
        const double f = std::log(num / den);
        double beta = 0.0;
        if (r0sq > 0.0) beta = std::atan(t0 * sp / (r0sq + ah * rp)) - std::atan(t0 * sm / (r0sq + ah * rm));
        value += t0 * f;
        omega += beta;
        sum_mf += m * f;
        first += 0.5 * m * (r0sq * f + sp * rp - sm * rm);
    }
    const double sgn = h > 0.0 ? 1.0 : (h < 0.0 ? -1.0 : 0.0);
    out.value = value - ah * omega;
    out.grad = -sum_mf - sgn * omega * n;
    out.first_moment = first;
    out.tangential = -sum_mf;
    out.rho = rho;
    out.normal = n;
    out.height = h;
    return out;
}

double static_panel_potential(const std::array<Vec3, 3>& tri, const Vec3& x) {
    return static_panel_integrals(tri, x).value / (4.0 * pi);
}

Vec3 static_panel_potential_grad(const std::array<Vec3, 3>& tri, const Vec3& x) {
    return static_panel_integrals(tri, x).grad / (4.0 * pi);
}

}  // namespace efie
