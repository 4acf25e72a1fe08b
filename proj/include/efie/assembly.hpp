#pragma once

#include "efie/common.hpp"
#include "efie/spaces.hpp"

#include <Eigen/Core>

#include <functional>

namespace efie {

using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;

struct QuadOrders {
    int panel = 5;     ///< Sauter-Schwab points per direction for touching pairs
    int far = 5;       ///< triangle rule degree for separated pairs
    int residual = 4;  ///< triangle rule degree for residual sampling
    int rhs = 6;       ///< triangle rule degree for the right-hand side
};

struct AssemblyOptions {
    QuadOrders orders;
    int threads = 1;
    bool static_blocks = false;  ///< also assemble the k = 0 blocks
};

/// Blocks of the EFIE form: Dk[e, e'] = <V_k div psi_e', div psi_e> and
/// Mk[e, e'] = <A_k psi_e', psi_e>, so that A = Dk - k^2 Mk. D0 and M0 are
/// their static counterparts (empty unless requested).
struct EfieBlocks {
    CMatrix Dk, Mk;
    RMatrix D0, M0;
    double k = 0;

    CMatrix matrix() const;
};

EfieBlocks assemble_blocks(const RTSpace& rt, double k, const AssemblyOptions& opts = {});
CMatrix assemble_matrix(const RTSpace& rt, double k, const AssemblyOptions& opts = {});

/// Gram matrix <V_0 chi_T, chi_T'> of the static single layer on P0.
RMatrix assemble_p0_single_layer(const SurfaceMesh& mesh, const QuadOrders& orders = {});

/// Double integral of `kernel` over triangles t1 x t2 of the mesh with the
/// same rule selection as the assembly (for cross-checks).
cplx panel_pair_integral(const SurfaceMesh& mesh, int t1, int t2,
                         const std::function<cplx(const Vec3&, const Vec3&)>& kernel, const QuadOrders& orders);

/// Plane wave E(x) = p exp(i k d.x).
struct IncidentWave {
    CVec3 p = CVec3(1, 0, 0);
    Vec3 d = Vec3(0, 0, 1);
    double k = 1.0;

    /// Throws InputError unless |d| = 1 and p.d = 0 (tolerance 1e-12).
    void validate() const;
    CVec3 field(const Vec3& x) const;
    /// f = -(E - (E.n) n) on a face with unit normal n.
    CVec3 trace(const Vec3& x, const Vec3& n) const;
    /// Surface curl of f on a face with unit normal n: -ik (d x p).n exp(ik d.x).
    cplx trace_curl(const Vec3& x, const Vec3& n) const;
};

/// Face-wise curl of f on triangle t as a callable.
std::function<cplx(const Vec3&)> trace_curl_f(const IncidentWave& wave, const SurfaceMesh& mesh, int t);

CVector assemble_rhs(const RTSpace& rt, const IncidentWave& wave, int order = 6);

struct ComplexDenseSystem {
    CMatrix A;
    CVector b;
    CVector x;
    double k = 0;
    QuadOrders orders;
    double rcond = 0;             ///< reciprocal condition estimate from the LU factors
    double relative_residual = 0;  ///< |Ax - b| / |b|
};

/// Dense LU solve. Throws NumericalError when the matrix is numerically singular.
void solve(ComplexDenseSystem& sys);

/// Re[<V_0 div v, div conj v> + <A_0 v, conj v>] from the static blocks.
double energy_surrogate(const EfieBlocks& blocks, const CVector& v);

/// Binary dump of a system: header "EFIESYS1", uint64 n, then the edge list
/// (uint64 pairs), A row-major and b, complex values as interleaved doubles.
void write_system(const std::string& path, const SurfaceMesh& mesh, const ComplexDenseSystem& sys);

}  // namespace efie
