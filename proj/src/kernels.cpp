#include "efie/kernels.hpp"

#include <cmath>

namespace efie {

namespace {

constexpr double inv4pi = 1.0 / (4.0 * pi);

// (iz - 1) e^{iz} + 1, by its series for small z
cplx grad_remainder_factor(double z) {
    if (z < 0.2) {
        const cplx iz(0.0, z);
        cplx term = iz;  // (iz)^m / m!, m = 1
        cplx sum = 0.0;
        for (int m = 2; m <= 24; ++m) {
            term *= iz / static_cast<double>(m);
            sum += term * static_cast<double>(m - 1);
        }
        return sum;
    }
    const cplx e(std::cos(z), std::sin(z));
    return cplx(-1.0, z) * e + 1.0;
}

}  // namespace

cplx green(double k, const Vec3& x, const Vec3& y) {
    const double r = (x - y).norm();
    if (r == 0.0) throw SingularPointError("Green's function evaluated at coincident points");
    return cplx(std::cos(k * r), std::sin(k * r)) * (inv4pi / r);
}

CVec3 grad_green_x(double k, const Vec3& x, const Vec3& y) {
    const Vec3 d = x - y;
    const double r = d.norm();
    if (r == 0.0) throw SingularPointError("Green's function gradient evaluated at coincident points");
    const cplx e(std::cos(k * r), std::sin(k * r));
    const cplx s = cplx(-1.0, k * r) * e * (inv4pi / (r * r * r));
    return s * to_complex(d);
}

cplx green_remainder(double k, const Vec3& x, const Vec3& y) {
    const double r = (x - y).norm();
    if (r == 0.0) return cplx(0.0, k * inv4pi);
    const double z = k * r;
    const double sh = std::sin(0.5 * z);
    return cplx(-2.0 * sh * sh, std::sin(z)) * (inv4pi / r);
}

CVec3 grad_green_remainder_x(double k, const Vec3& x, const Vec3& y) {
    const Vec3 d = x - y;
    const double r = d.norm();
    if (r == 0.0) return CVec3::Zero();
    return grad_remainder_factor(k * r) * (inv4pi / (r * r * r)) * to_complex(d);
}

SurfaceDensity SurfaceDensity::scalar_p0(MeshPtr mesh, CVector values) {
    if (!mesh) throw InputError("density needs a mesh");
    if (values.size() != mesh->num_triangles()) throw InputError("P0 density has wrong length");
    SurfaceDensity d;
    d.kind_ = Kind::scalar_p0;
    d.mesh_ = std::move(mesh);
    d.charge_.assign(values.data(), values.data() + values.size());
    d.field_.assign(d.charge_.size(), PanelField{});
    d.coeffs_ = std::move(values);
    return d;
}

SurfaceDensity SurfaceDensity::tangential_rt0(const RTSpace& rt, CVector coeffs) {
    SurfaceDensity d;
    d.kind_ = Kind::tangential_rt0;
    d.mesh_ = rt.mesh_ptr();
    d.field_ = rt.restrict_all(coeffs);
    d.charge_.resize(d.field_.size());
    for (std::size_t t = 0; t < d.field_.size(); ++t) d.charge_[t] = d.field_[t].div();
    d.coeffs_ = std::move(coeffs);
    return d;
}

PotentialEvaluator::PotentialEvaluator(MeshPtr mesh, double k, const EvalOptions& opts)
    : mesh_(std::move(mesh)),
      k_(k),
      opts_(opts),
      far_rule_(gauss_triangle(opts.far_order)),
      near_rule_(gauss_triangle(opts.near_order)),
      host_line_(gauss_legendre(opts.host_order)) {
    if (!(k >= 0.0) || !std::isfinite(k)) throw InputError("wavenumber must be finite and nonnegative");
    const int nt = mesh_->num_triangles();
    corners_.resize(nt);
    centroid_.resize(nt);
    radius_.resize(nt);
    for (int t = 0; t < nt; ++t) {
        corners_[t] = {mesh_->corner(t, 0), mesh_->corner(t, 1), mesh_->corner(t, 2)};
        centroid_[t] = mesh_->centroid(t);
        radius_[t] = mesh_->h(t);
    }
}

void PotentialEvaluator::far_panel(const SurfaceDensity& d, int t, const Vec3& x, PotentialValues& out) const {
    const auto& c = corners_[t];
    const double area = mesh_->area(t);
    const PanelField& u = d.field(t);
    const cplx q = d.charge(t);
    cplx v = 0.0;
    CVec3 gv = CVec3::Zero(), a = CVec3::Zero(), curl = CVec3::Zero();
    for (std::size_t j = 0; j < far_rule_.size(); ++j) {
        const auto& l = far_rule_.points[j];
        const Vec3 y = l[0] * c[0] + l[1] * c[1] + l[2] * c[2];
        const Vec3 dxy = x - y;
        const double r = dxy.norm();
        const double w = far_rule_.weights[j] * area;
        const cplx e(std::cos(k_ * r), std::sin(k_ * r));
        const cplx g = e * (inv4pi / r);
        const CVec3 grad = (cplx(-1.0, k_ * r) * e * (inv4pi / (r * r * r))) * to_complex(dxy);
        const CVec3 uy = u(y);
        v += w * g;
        gv += w * grad;
        a += (w * g) * uy;
        curl += w * cross(grad, uy);
    }
    out.V += q * v;
    out.grad_V += q * gv;
    out.A += a;
    out.curl_A += curl;
}

void PotentialEvaluator::near_panel(const SurfaceDensity& d, int t, const Vec3& x, bool host,
                                    PotentialValues& out) const {
    const auto& c = corners_[t];
    const PanelField& u = d.field(t);
    const cplx q = d.charge(t);

    // static part in closed form
    const StaticPanelIntegrals s = static_panel_integrals(c, x);
    const CVec3 u_rho = u(s.rho);
    const CVec3 n = to_complex(s.normal);
    out.V += q * (s.value * inv4pi);
    out.grad_V += (q * inv4pi) * to_complex(s.grad);
    out.A += inv4pi * (u.alpha * to_complex(s.first_moment) + s.value * u_rho);
    out.curl_A += inv4pi * (cross(s.grad, u_rho) - (u.alpha * s.height) * cross(n, to_complex(s.tangential)));

    if (k_ == 0.0) return;

    // smooth remainder G_k - G_0
    cplx v = 0.0;
    CVec3 gv = CVec3::Zero(), a = CVec3::Zero(), curl = CVec3::Zero();
    auto add = [&](const Vec3& y, double w) {
        const cplx g = green_remainder(k_, x, y);
        const CVec3 grad = grad_green_remainder_x(k_, x, y);
        const CVec3 uy = u(y);
        v += w * g;
        gv += w * grad;
        a += (w * g) * uy;
        curl += w * cross(grad, uy);
    };
    if (host) {
        // Duffy split about x: the remainder is only Lipschitz at y = x
        const Vec3 nn = s.normal;
        for (int i = 0; i < 3; ++i) {
            const Vec3 p = c[i] - x, b = c[(i + 1) % 3] - c[i];
            const double jac = p.cross(b).dot(nn);
            if (jac <= 0.0) continue;
            for (std::size_t is = 0; is < host_line_.x.size(); ++is) {
                const double sv = host_line_.x[is];
                for (std::size_t it = 0; it < host_line_.x.size(); ++it) {
                    const double tv = host_line_.x[it];
                    add(x + sv * p + sv * tv * b, jac * sv * host_line_.w[is] * host_line_.w[it]);
                }
            }
        }
    } else {
        const double area = mesh_->area(t);
        for (std::size_t j = 0; j < near_rule_.size(); ++j) {
            const auto& l = near_rule_.points[j];
            add(l[0] * c[0] + l[1] * c[1] + l[2] * c[2], near_rule_.weights[j] * area);
        }
    }
    out.V += q * v;
    out.grad_V += q * gv;
    out.A += a;
    out.curl_A += curl;
}

PotentialValues PotentialEvaluator::evaluate(const SurfaceDensity& density, const Vec3& x, int host) const {
    if (&density.mesh() != mesh_.get()) throw InputError("density and evaluator use different meshes");
    PotentialValues out;
    const int nt = mesh_->num_triangles();
    for (int t = 0; t < nt; ++t) {
        const bool near = opts_.force_subtraction || t == host ||
                          (x - centroid_[t]).squaredNorm() < std::pow(opts_.near_factor * radius_[t], 2);
        if (near)
            near_panel(density, t, x, t == host, out);
        else
            far_panel(density, t, x, out);
    }
    return out;
}

cplx PotentialEvaluator::eval_Vk(const SurfaceDensity& density, const Vec3& x, int host) const {
    return evaluate(density, x, host).V;
}

CVec3 PotentialEvaluator::eval_Ak(const SurfaceDensity& density, const Vec3& x, int host) const {
    return evaluate(density, x, host).A;
}

CVec3 PotentialEvaluator::eval_grad_Vk_div(const SurfaceDensity& density, const Vec3& x, int host) const {
    if (host < 0 || host >= mesh_->num_triangles()) throw InputError("surface gradient needs a host triangle");
    return tangential(evaluate(density, x, host).grad_V, mesh_->normal(host));
}

cplx PotentialEvaluator::eval_curl_Ak(const SurfaceDensity& density, const Vec3& x, int host) const {
    if (host < 0 || host >= mesh_->num_triangles()) throw InputError("surface curl needs a host triangle");
    return bdot(evaluate(density, x, host).curl_A, mesh_->normal(host));
}

}  // namespace efie
