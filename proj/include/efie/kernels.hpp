#pragma once

#include "efie/common.hpp"
#include "efie/mesh.hpp"
#include "efie/quadrature.hpp"
#include "efie/spaces.hpp"

#include <array>

namespace efie {

/// G_k(x, y) = exp(ik|x-y|) / (4 pi |x-y|). Throws NumericalError when x = y.
cplx green(double k, const Vec3& x, const Vec3& y);

/// Gradient of G_k with respect to x.
CVec3 grad_green_x(double k, const Vec3& x, const Vec3& y);

/// G_k - G_0, bounded; equals ik/(4 pi) at x = y.
cplx green_remainder(double k, const Vec3& x, const Vec3& y);

/// Gradient in x of G_k - G_0; zero at x = y.
CVec3 grad_green_remainder_x(double k, const Vec3& x, const Vec3& y);

/// Closed-form integrals of 1/R, R = |x - y|, over a flat triangle. rho is
/// the projection of x onto the plane of the triangle and height = n.(x - rho).
/// Points closer to the plane than 1e-12 h_T are treated as lying in it;
/// the normal part of `grad` then vanishes (principal value).
struct StaticPanelIntegrals {
    double value = 0;     ///< int 1/R
    Vec3 grad;            ///< grad_x int 1/R
    Vec3 first_moment;    ///< int (y - rho)/R
    Vec3 tangential;      ///< int (y - rho)/R^3, the in-plane part of grad
    Vec3 rho;
    Vec3 normal;
    double height = 0;
};

/// Throws SingularPointError when x lies on the boundary of the triangle.
StaticPanelIntegrals static_panel_integrals(const std::array<Vec3, 3>& tri, const Vec3& x);

/// int_T 1/(4 pi |x - y|) dy.
double static_panel_potential(const std::array<Vec3, 3>& tri, const Vec3& x);
/// Gradient in x of static_panel_potential.
Vec3 static_panel_potential_grad(const std::array<Vec3, 3>& tri, const Vec3& x);

/// Density on a surface mesh: piecewise constant scalar or RT0 vector field.
class SurfaceDensity {
public:
    enum class Kind { scalar_p0, tangential_rt0 };

    static SurfaceDensity scalar_p0(MeshPtr mesh, CVector values);
    static SurfaceDensity tangential_rt0(const RTSpace& rt, CVector coeffs);

    Kind kind() const { return kind_; }
    const SurfaceMesh& mesh() const { return *mesh_; }
    const CVector& coefficients() const { return coeffs_; }
    /// Constant charge on triangle t: the value (P0) or div U (RT0).
    cplx charge(int t) const { return charge_[t]; }
    /// RT0 restriction to triangle t (zero for P0 densities).
    const PanelField& field(int t) const { return field_[t]; }

private:
    Kind kind_ = Kind::scalar_p0;
    MeshPtr mesh_;
    CVector coeffs_;
    std::vector<cplx> charge_;
    std::vector<PanelField> field_;
};

struct EvalOptions {
    /// Panels closer than near_factor * h_T to x use singularity subtraction.
    double near_factor = 3.0;
    int far_order = 5;    ///< triangle rule degree for well separated panels
    int near_order = 5;   ///< rule degree for the smooth remainder on near panels
    int host_order = 4;   ///< Gauss points per direction of the Duffy split on the host panel
    bool force_subtraction = false;  ///< use subtraction on every panel (consistency checks)
};

/// Layer potentials evaluated at a point. The host triangle, when given,
/// is the triangle containing x; it fixes the surface normal for the
/// tangential derivatives.
struct PotentialValues {
    CVec3 A = CVec3::Zero();         ///< int G_k U
    CVec3 grad_V = CVec3::Zero();    ///< grad_x int G_k div U (full gradient)
    CVec3 curl_A = CVec3::Zero();    ///< curl_x int G_k U (full vector)
    cplx V = 0.0;                    ///< int G_k q for the charge q
};

class PotentialEvaluator {
public:
    PotentialEvaluator(MeshPtr mesh, double k, const EvalOptions& opts = {});

    double k() const { return k_; }
    const SurfaceMesh& mesh() const { return *mesh_; }

    /// All potentials of `density` at x; host = -1 for points off the surface.
    PotentialValues evaluate(const SurfaceDensity& density, const Vec3& x, int host = -1) const;

    cplx eval_Vk(const SurfaceDensity& density, const Vec3& x, int host = -1) const;
    CVec3 eval_Ak(const SurfaceDensity& density, const Vec3& x, int host = -1) const;
    /// Tangential gradient on the host triangle of V_k div U.
    CVec3 eval_grad_Vk_div(const SurfaceDensity& density, const Vec3& x, int host) const;
    /// n . curl_x A_k U on the host triangle.
    cplx eval_curl_Ak(const SurfaceDensity& density, const Vec3& x, int host) const;

private:
    void far_panel(const SurfaceDensity& d, int t, const Vec3& x, PotentialValues& out) const;
    void near_panel(const SurfaceDensity& d, int t, const Vec3& x, bool host, PotentialValues& out) const;

    MeshPtr mesh_;
    double k_;
    EvalOptions opts_;
    TriangleRule far_rule_, near_rule_;
    LineRule host_line_;
    std::vector<std::array<Vec3, 3>> corners_;
    std::vector<Vec3> centroid_;
    std::vector<double> radius_;
};

}  // namespace efie
