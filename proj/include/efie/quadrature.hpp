#pragma once

#include "efie/common.hpp"
#include "efie/mesh.hpp"

#include <array>
#include <functional>
#include <vector>

namespace efie {

/// Gauss-Legendre rule on [0, 1].
struct LineRule {
    std::vector<double> x, w;
};

LineRule gauss_legendre(int n);

/// Symmetric or collapsed Gauss rule on a triangle. Points are barycentric
/// (l0, l1, l2); weights sum to 1, so a physical integral is |T| * sum w f.
struct TriangleRule {
    std::vector<std::array<double, 3>> points;
    std::vector<double> weights;
    int degree = 0;

    std::size_t size() const { return weights.size(); }
};

/// Rule exact for polynomials of total degree `order`, 1 <= order <= 20.
TriangleRule gauss_triangle(int order);

enum class PairCase { separated = 0, common_vertex = 1, common_edge = 2, coincident = 3 };

const char* to_string(PairCase c);

/// Quadrature for the four-dimensional integral over a pair of reference
/// triangles {0 <= a2, 0 <= a1, a1 + a2 <= 1}. Node (a1, a2, b1, b2) maps to the
/// points a0 P0 + a1 P1 + a2 P2 and b0 Q0 + b1 Q1 + b2 Q2, where shared vertices
/// come first in both triangles and in the same order. Weights sum to 1/4.
struct PanelPairRule {
    struct Node {
        double a1, a2, b1, b2, w;
    };
    PairCase kind = PairCase::separated;
    int order = 0;
    std::vector<Node> nodes;
};

/// Sauter-Schwab rule with `order` Gauss points per direction. The rules are
/// cached; the returned reference stays valid for the program lifetime.
const PanelPairRule& panel_pair_rule(PairCase kind, int order);

/// Vertex-sharing pattern of two triangles and the vertex permutations that
/// put shared vertices first (in matching order).
struct PairTopology {
    PairCase kind = PairCase::separated;
    std::array<int, 3> perm1{0, 1, 2}, perm2{0, 1, 2};
};

PairTopology classify_pair(const Triangle& t1, const Triangle& t2);

/// Physical quadrature points of a panel pair. The weights include both area
/// Jacobians so that sum w f(x, y) approximates the double integral.
struct PairPoint {
    Vec3 x, y;
    double w;
};

void map_pair_rule(const PanelPairRule& rule, const PairTopology& topo, const std::array<Vec3, 3>& tri1,
                   const std::array<Vec3, 3>& tri2, std::vector<PairPoint>& out);

/// Tensor product of two triangle rules (the separated case in assembly).
void map_tensor_rule(const TriangleRule& r1, const TriangleRule& r2, const std::array<Vec3, 3>& tri1,
                     const std::array<Vec3, 3>& tri2, std::vector<PairPoint>& out);

// ---------------------------------------------------------------------------
// brute-force oracle

using PairKernel = std::function<cplx(const Vec3& x, const Vec3& y)>;
using PointFunction = std::function<cplx(const Vec3& y)>;

struct OracleOptions {
    double tol = 1e-10;      ///< absolute tolerance of the outer integral
    double rel_tol = 1e-10;  ///< or relative to the integral of |kernel|, whichever is larger
    int max_depth = 30;    ///< bisection depth of each one-dimensional adaptive integral
};

/// Integral of f over triangle T for an f that may be singular like 1/|y - x|
/// at the point x (in or off the plane of T). Duffy split of T about the
/// point of T nearest to x, then iterated adaptive Gauss-Kronrod.
cplx oracle_panel_integral(const std::array<Vec3, 3>& tri, const Vec3& x, const PointFunction& f,
                           const OracleOptions& opts = {});

/// Integral over T of an f that is smooth inside T but may lose smoothness at
/// its edges and vertices.
cplx oracle_triangle_integral(const std::array<Vec3, 3>& tri, const PointFunction& f, const OracleOptions& opts = {});

/// Double integral of a weakly singular kernel over T1 x T2 by nested adaptive
/// quadrature, graded toward the edges and vertices of T1. Throws
/// QuadratureError when the requested tolerance is not reached.
cplx oracle_double_integral(const std::array<Vec3, 3>& t1, const std::array<Vec3, 3>& t2, const PairKernel& kernel,
                            const OracleOptions& opts = {});

}  // namespace efie
