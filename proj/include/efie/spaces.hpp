#pragma once

#include "efie/common.hpp"
#include "efie/mesh.hpp"
#include "efie/quadrature.hpp"

#include <Eigen/Core>

#include <functional>

namespace efie {

using CVector = Eigen::VectorXcd;

/// Affine restriction U(y) = alpha y - beta of an RT0 field to one triangle.
/// Its surface divergence is 2 alpha.
struct PanelField {
    cplx alpha = 0.0;
    CVec3 beta = CVec3::Zero();

    CVec3 operator()(const Vec3& y) const { return alpha * to_complex(y) - beta; }
    cplx div() const { return 2.0 * alpha; }
};

/// Lowest-order Raviart-Thomas space on a closed mesh, one DOF per edge.
///
/// The basis function of edge e is (y - p) / (2|T|) on its "+" triangle and
/// -(y - p) / (2|T|) on the "-" triangle, p the vertex opposite e. Its flux
/// through e is 1 and its divergence is +-1/|T|.
class RTSpace {
public:
    explicit RTSpace(MeshPtr mesh);

    int dofs() const { return mesh_->num_edges(); }
    const SurfaceMesh& mesh() const { return *mesh_; }
    const MeshPtr& mesh_ptr() const { return mesh_; }

    /// +1 when t is the "+" triangle of its local edge a, -1 otherwise.
    double sign(int t, int a) const { return sign_[t][a]; }
    int dof(int t, int a) const { return mesh_->triangle_edge(t, a); }

    /// Local basis function a of triangle t at point y of t.
    Vec3 basis(int t, int a, const Vec3& y) const;
    double basis_div(int t, int a) const { return sign_[t][a] / mesh_->area(t); }

    PanelField restrict_to(const CVector& coeffs, int t) const;
    std::vector<PanelField> restrict_all(const CVector& coeffs) const;

private:
    MeshPtr mesh_;
    std::vector<std::array<double, 3>> sign_;
};

/// Continuous piecewise-linear functions, one DOF per vertex.
class P1Space {
public:
    explicit P1Space(MeshPtr mesh);

    int dofs() const { return mesh_->num_vertices(); }
    const SurfaceMesh& mesh() const { return *mesh_; }

    /// Gradient of the hat function of local vertex a on triangle t.
    Vec3 hat_gradient(int t, int a) const;
    /// Triangles of the star of vertex v.
    const std::vector<int>& star(int v) const { return stars_[v]; }
    double star_area(int v) const { return star_area_[v]; }

    cplx eval(const CVector& coeffs, int t, const std::array<double, 3>& bary) const;

private:
    MeshPtr mesh_;
    std::vector<std::vector<int>> stars_;
    std::vector<double> star_area_;
};

using Barycentric = std::array<double, 3>;

/// Value of the RT0 function U on triangle t at barycentric point `bary`.
CVec3 eval_rt(const RTSpace& rt, const CVector& U, int t, const Barycentric& bary);
cplx div_rt(const RTSpace& rt, const CVector& U, int t);

/// RT0 coefficients of the elementwise field grad alpha x n.
CVector curl_p1(const P1Space& p1, const RTSpace& rt, const CVector& alpha);

using ScalarField = std::function<cplx(int t, const Vec3& x)>;
using VectorField = std::function<CVec3(int t, const Vec3& x)>;

/// Scalar Clement operator: DOF of vertex v is (3/|star|) int_star f phi_v.
CVector clement_p1(const P1Space& p1, const ScalarField& f, int order = 4);

/// RT Clement operator: flux through e of the L2(T_e) mean of v, T_e the
/// reference triangle of e.
CVector clement_rt(const RTSpace& rt, const VectorField& v, int order = 4);

/// Squared L2 norm over triangle t of an elementwise field minus an RT0 function.
double l2_error_sq(const RTSpace& rt, const CVector& U, const VectorField& v, int t, int order = 6);
double l2_error_sq(const P1Space& p1, const CVector& a, const ScalarField& f, int t, int order = 6);

/// A tangential linear field and a triangle on which the RT Clement operator
/// does not commute with the divergence.
struct NoncommutingWitness {
    Eigen::Matrix3d M;      ///< field is the tangential part of M x on every face
    int triangle = -1;
    cplx div_interpolant;   ///< div(I v) on the triangle
    double div_field = 0;   ///< div_Gamma v on the triangle (constant)
    double margin() const { return std::abs(div_interpolant - div_field); }
};

NoncommutingWitness noncommuting_witness(const RTSpace& rt, double scale = 1.0, unsigned seed = 7);

/// Field x -> tangential part of M x on triangle t.
VectorField tangential_linear_field(const SurfaceMesh& mesh, const Eigen::Matrix3d& M);

/// Transfer of an RT0 function to a nested refinement; exact since
/// RT0 of the coarse mesh is contained in RT0 of the fine mesh.
CVector prolongate_rt(const RTSpace& coarse, const CVector& U, const RTSpace& fine, const RefinementResult& ref);

}  // namespace efie
