#include "efie/assembly.hpp"

#include "efie/quadrature.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <thread>

namespace efie {

namespace {

constexpr double inv4pi = 1.0 / (4.0 * pi);

// Moments of the kernel over a panel pair, relative to the centroids c1, c2:
// S = int int G, X = int int G (x - c1), Y = int int G (y - c2),
// XY = int int G (x - c1).(y - c2). Suffix 0 for the static kernel.
struct PairMoments {
    cplx S = 0.0, XY = 0.0;
    CVec3 X = CVec3::Zero(), Y = CVec3::Zero();
    double S0 = 0.0, XY0 = 0.0;
    Vec3 X0 = Vec3::Zero(), Y0 = Vec3::Zero();
};

PairMoments pair_moments(const std::vector<PairPoint>& pts, const Vec3& c1, const Vec3& c2, double k,
                         bool want_static) {
    PairMoments m;
    for (const auto& p : pts) {
        const Vec3 xv = p.x - c1, yv = p.y - c2;
        const double r = (p.x - p.y).norm();
        if (r == 0.0) continue;
        const double g0 = p.w * inv4pi / r;
        const cplx g = g0 * cplx(std::cos(k * r), std::sin(k * r));
        const double xy = xv.dot(yv);
        m.S += g;
        m.X += g * to_complex(xv);
        m.Y += g * to_complex(yv);
        m.XY += g * xy;
        if (want_static) {
            m.S0 += g0;
            m.X0 += g0 * xv;
            m.Y0 += g0 * yv;
            m.XY0 += g0 * xy;
        }
    }
    return m;
}

struct LocalBlock {
    cplx D[3][3], M[3][3];
    double D0[3][3], M0[3][3];
};

class PairIntegrator {
public:
    PairIntegrator(const SurfaceMesh& mesh, const QuadOrders& orders)
        : mesh_(mesh), orders_(orders), far_(gauss_triangle(orders.far)) {
        corners_.resize(mesh.num_triangles());
        for (int t = 0; t < mesh.num_triangles(); ++t)
            corners_[t] = {mesh.corner(t, 0), mesh.corner(t, 1), mesh.corner(t, 2)};
    }

    const std::array<Vec3, 3>& corners(int t) const { return corners_[t]; }

    void points(int i, int j, std::vector<PairPoint>& pts) const {
        const PairTopology topo = classify_pair(mesh_.triangle(i), mesh_.triangle(j));
        if (topo.kind == PairCase::separated)
            map_tensor_rule(far_, far_, corners_[i], corners_[j], pts);
        else
            map_pair_rule(panel_pair_rule(topo.kind, orders_.panel), topo, corners_[i], corners_[j], pts);
    }

private:
    const SurfaceMesh& mesh_;
    QuadOrders orders_;
    TriangleRule far_;
    std::vector<std::array<Vec3, 3>> corners_;
};

LocalBlock local_block(const RTSpace& rt, const PairIntegrator& pi, int i, int j, double k, bool want_static,
                       std::vector<PairPoint>& pts) {
    const SurfaceMesh& mesh = rt.mesh();
    pi.points(i, j, pts);
    const Vec3 c1 = mesh.centroid(i), c2 = mesh.centroid(j);
    const PairMoments m = pair_moments(pts, c1, c2, k, want_static);
    const double ai = mesh.area(i), aj = mesh.area(j);
    LocalBlock b;
    for (int a = 0; a < 3; ++a) {
        const Vec3 da = c1 - mesh.corner(i, a);
        for (int c = 0; c < 3; ++c) {
            const Vec3 dc = c2 - mesh.corner(j, c);
            const double s = rt.sign(i, a) * rt.sign(j, c);
            const cplx mv = m.XY + bdot(m.X, dc) + bdot(m.Y, da) + da.dot(dc) * m.S;
            b.D[a][c] = s / (ai * aj) * m.S;
            b.M[a][c] = s / (4.0 * ai * aj) * mv;
            if (want_static) {
                const double mv0 = m.XY0 + m.X0.dot(dc) + m.Y0.dot(da) + da.dot(dc) * m.S0;
                b.D0[a][c] = s / (ai * aj) * m.S0;
                b.M0[a][c] = s / (4.0 * ai * aj) * mv0;
            } else {
                b.D0[a][c] = b.M0[a][c] = 0.0;
            }
        }
    }
    if (i == j) {
        for (int a = 0; a < 3; ++a)
            for (int c = a + 1; c < 3; ++c) {
                b.M[a][c] = b.M[c][a] = 0.5 * (b.M[a][c] + b.M[c][a]);
                b.M0[a][c] = b.M0[c][a] = 0.5 * (b.M0[a][c] + b.M0[c][a]);
            }
    }
    return b;
}

// Runs body(i, j, slot) over all pairs j >= i in chunks of rows, then hands
// the chunk to scatter(i, j, slot) serially in (i, j) order. The result is
// independent of the thread count.
template <class T, class Body, class Scatter>
void pair_loop(int nt, int threads, Body body, Scatter scatter) {
    threads = std::max(1, threads);
    const int chunk_rows = std::max(1, std::min(nt, (1 << 17) / std::max(1, nt)));
    std::vector<std::vector<T>> rows(chunk_rows);
    for (int start = 0; start < nt; start += chunk_rows) {
        const int stop = std::min(nt, start + chunk_rows);
        std::atomic<int> next{start};
        auto work = [&]() {
            for (int i = next++; i < stop; i = next++) {
                auto& row = rows[i - start];
                row.resize(nt - i);
                for (int j = i; j < nt; ++j) row[j - i] = body(i, j);
            }
        };
        if (threads == 1) {
            work();
        } else {
            std::vector<std::thread> pool;
            for (int t = 0; t < threads; ++t) pool.emplace_back(work);
            for (auto& th : pool) th.join();
        }
        for (int i = start; i < stop; ++i)
            for (int j = i; j < nt; ++j) scatter(i, j, rows[i - start][j - i]);
    }
}

}  // namespace

CMatrix EfieBlocks::matrix() const { return Dk - (k * k) * Mk; }

EfieBlocks assemble_blocks(const RTSpace& rt, double k, const AssemblyOptions& opts) {
    if (!(k >= 0.0) || !std::isfinite(k)) throw InputError("wavenumber must be finite and nonnegative");
    const SurfaceMesh& mesh = rt.mesh();
    const int n = rt.dofs();
    const int nt = mesh.num_triangles();
    const PairIntegrator pi(mesh, opts.orders);
    EfieBlocks out;
    out.k = k;
    out.Dk = CMatrix::Zero(n, n);
    out.Mk = CMatrix::Zero(n, n);
    if (opts.static_blocks) {
        out.D0 = RMatrix::Zero(n, n);
        out.M0 = RMatrix::Zero(n, n);
    }
    const bool st = opts.static_blocks;
    pair_loop<LocalBlock>(
        nt, opts.threads,
        [&](int i, int j) {
            thread_local std::vector<PairPoint> pts;
            return local_block(rt, pi, i, j, k, st, pts);
        },
        [&](int i, int j, const LocalBlock& b) {
            for (int a = 0; a < 3; ++a) {
                const int r = rt.dof(i, a);
                for (int c = 0; c < 3; ++c) {
                    const int s = rt.dof(j, c);
                    out.Dk(r, s) += b.D[a][c];
                    out.Mk(r, s) += b.M[a][c];
                    if (st) {
                        out.D0(r, s) += b.D0[a][c];
                        out.M0(r, s) += b.M0[a][c];
                    }
                    if (i != j) {
                        out.Dk(s, r) += b.D[a][c];
                        out.Mk(s, r) += b.M[a][c];
                        if (st) {
                            out.D0(s, r) += b.D0[a][c];
                            out.M0(s, r) += b.M0[a][c];
                        }
                    }
                }
            }
        });
    return out;
}

CMatrix assemble_matrix(const RTSpace& rt, double k, const AssemblyOptions& opts) {
    AssemblyOptions o = opts;
    o.static_blocks = false;
    return assemble_blocks(rt, k, o).matrix();
}

RMatrix assemble_p0_single_layer(const SurfaceMesh& mesh, const QuadOrders& orders) {
    const int nt = mesh.num_triangles();
    const PairIntegrator pi(mesh, orders);
    RMatrix G = RMatrix::Zero(nt, nt);
    std::vector<PairPoint> pts;
    for (int i = 0; i < nt; ++i)
        for (int j = i; j < nt; ++j) {
            pi.points(i, j, pts);
            double s = 0.0;
            for (const auto& p : pts) s += p.w * inv4pi / (p.x - p.y).norm();
            G(i, j) = G(j, i) = s;
        }
    return G;
}

cplx panel_pair_integral(const SurfaceMesh& mesh, int t1, int t2,
                         const std::function<cplx(const Vec3&, const Vec3&)>& kernel, const QuadOrders& orders) {
    const PairIntegrator pi(mesh, orders);
    std::vector<PairPoint> pts;
    pi.points(t1, t2, pts);
    cplx s = 0.0;
    for (const auto& p : pts) s += p.w * kernel(p.x, p.y);
    return s;
}

void IncidentWave::validate() const {
    if (!std::isfinite(k) || k < 0.0) throw InputError("k: wavenumber must be finite and nonnegative");
    if (std::abs(d.norm() - 1.0) > 1e-12) throw InputError("direction: |d| must be 1");
    if (std::abs(bdot(p, d)) > 1e-12) throw InputError("polarization not transverse (p.d != 0)");
}

CVec3 IncidentWave::field(const Vec3& x) const {
    const double ph = k * d.dot(x);
    return cplx(std::cos(ph), std::sin(ph)) * p;
}

CVec3 IncidentWave::trace(const Vec3& x, const Vec3& n) const { return -tangential(field(x), n); }

cplx IncidentWave::trace_curl(const Vec3& x, const Vec3& n) const {
    const double ph = k * d.dot(x);
    return cplx(0.0, -k) * bdot(cross(d, p), n) * cplx(std::cos(ph), std::sin(ph));
}

std::function<cplx(const Vec3&)> trace_curl_f(const IncidentWave& wave, const SurfaceMesh& mesh, int t) {
    const Vec3 n = mesh.normal(t);
    return [wave, n](const Vec3& x) { return wave.trace_curl(x, n); };
}

CVector assemble_rhs(const RTSpace& rt, const IncidentWave& wave, int order) {
    const SurfaceMesh& mesh = rt.mesh();
    const TriangleRule rule = gauss_triangle(order);
    CVector b = CVector::Zero(rt.dofs());
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const Vec3& n = mesh.normal(t);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const auto& l = rule.points[q];
            const Vec3 x = mesh.point(t, l[0], l[1], l[2]);
            const CVec3 f = wave.trace(x, n) * (rule.weights[q] * mesh.area(t));
            for (int a = 0; a < 3; ++a) b[rt.dof(t, a)] += bdot(f, rt.basis(t, a, x));
        }
    }
    return b;
}

void solve(ComplexDenseSystem& sys) {
    const auto n = sys.A.rows();
    if (sys.A.cols() != n || sys.b.size() != n) throw InputError("system dimensions do not match");
    Eigen::PartialPivLU<CMatrix> lu(sys.A);
    sys.rcond = lu.rcond();
    if (!(sys.rcond > 1e-14))
        throw NumericalError("matrix is numerically singular (rcond " + std::to_string(sys.rcond) +
                             "); k may be close to an interior resonance");
    sys.x = lu.solve(sys.b);
    const double nb = sys.b.norm();
    sys.relative_residual = nb > 0.0 ? (sys.A * sys.x - sys.b).norm() / nb : (sys.A * sys.x).norm();
}

double energy_surrogate(const EfieBlocks& blocks, const CVector& v) {
    if (blocks.D0.rows() != v.size() || blocks.M0.rows() != v.size())
        throw InputError("energy surrogate needs the static blocks of the same space");
    const CVector w = blocks.D0 * v + blocks.M0 * v;
    const double e = v.dot(w).real();  // conjugates v
    const double scale = v.squaredNorm() * std::max(blocks.D0.cwiseAbs().maxCoeff(), blocks.M0.cwiseAbs().maxCoeff());
    if (e < -1e-12 * scale) throw NumericalError("energy surrogate is negative; static blocks are not positive");
    return std::max(e, 0.0);
}

void write_system(const std::string& path, const SurfaceMesh& mesh, const ComplexDenseSystem& sys) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path + "'");
    out.write("EFIESYS1", 8);
    const std::uint64_t n = static_cast<std::uint64_t>(sys.A.rows());
    out.write(reinterpret_cast<const char*>(&n), sizeof n);
    for (const Edge& e : mesh.edges()) {
        const std::uint64_t v[2] = {static_cast<std::uint64_t>(e.v[0]), static_cast<std::uint64_t>(e.v[1])};
        out.write(reinterpret_cast<const char*>(v), sizeof v);
    }
    for (Eigen::Index r = 0; r < sys.A.rows(); ++r)
        for (Eigen::Index c = 0; c < sys.A.cols(); ++c) {
            const double z[2] = {sys.A(r, c).real(), sys.A(r, c).imag()};
            out.write(reinterpret_cast<const char*>(z), sizeof z);
        }
    for (Eigen::Index r = 0; r < sys.b.size(); ++r) {
        const double z[2] = {sys.b[r].real(), sys.b[r].imag()};
        out.write(reinterpret_cast<const char*>(z), sizeof z);
    }
    if (!out) throw InputError("write to '" + path + "' failed");
}

}  // namespace efie
