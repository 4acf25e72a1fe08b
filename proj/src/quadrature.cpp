#include "efie/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace efie {

LineRule gauss_legendre(int n) {
    if (n < 1) throw InputError("Gauss-Legendre rule needs at least one point");
    LineRule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        // recompute derivative at the converged root
        double p0 = 1.0, p1 = 0.0;
        for (int j = 1; j <= n; ++j) {
            const double p2 = p1;
            p1 = p0;
            p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
        }
        dp = n * (z * p0 - p1) / (z * z - 1.0);
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        r.x[i] = 0.5 * (1.0 - z);
        r.x[n - 1 - i] = 0.5 * (1.0 + z);
        r.w[i] = r.w[n - 1 - i] = 0.5 * w;
    }
    return r;
}

namespace {

void add_orbit3(TriangleRule& r, double a, double w) {
    const double b = 1.0 - 2.0 * a;
    r.points.push_back({b, a, a});
    r.points.push_back({a, b, a});
    r.points.push_back({a, a, b});
    for (int i = 0; i < 3; ++i) r.weights.push_back(w);
}

TriangleRule collapsed_rule(int degree) {
    const int n = (degree + 3) / 2;
    const LineRule g = gauss_legendre(n);
    TriangleRule r;
    r.degree = degree;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double u = g.x[i], v = g.x[j];
            const double a1 = u * (1.0 - v), a2 = u * v;
            r.points.push_back({1.0 - a1 - a2, a1, a2});
            r.weights.push_back(2.0 * g.w[i] * g.w[j] * u);
        }
    }
    return r;
}

}  // namespace

TriangleRule gauss_triangle(int order) {
    if (order < 1 || order > 20) throw InputError("triangle rule order must be in [1, 20], got " + std::to_string(order));
    TriangleRule r;
    r.degree = order;
    if (order == 1) {
        r.points.push_back({1.0 / 3, 1.0 / 3, 1.0 / 3});
        r.weights.push_back(1.0);
    } else if (order == 2) {
        add_orbit3(r, 1.0 / 6, 1.0 / 3);
    } else if (order <= 4) {
        // Dunavant, 6 points, degree 4
        add_orbit3(r, 0.445948490915964886, 0.223381589678011466);
        add_orbit3(r, 0.091576213509770743, 0.109951743655321867);
        r.degree = 4;
    } else if (order == 5) {
        // Radon, 7 points
        const double s = std::sqrt(15.0);
        r.points.push_back({1.0 / 3, 1.0 / 3, 1.0 / 3});
        r.weights.push_back(9.0 / 40);
        add_orbit3(r, (6.0 - s) / 21, (155.0 - s) / 1200);
        add_orbit3(r, (6.0 + s) / 21, (155.0 + s) / 1200);
    } else {
        return collapsed_rule(order);
    }
    return r;
}

const char* to_string(PairCase c) {
    switch (c) {
        case PairCase::separated: return "separated";
        case PairCase::common_vertex: return "common_vertex";
        case PairCase::common_edge: return "common_edge";
        case PairCase::coincident: return "coincident";
    }
    return "unknown";
}

namespace {

// Rules of Sauter and Schwab in the (x, y) parametrization 0 <= y <= x <= 1 of
// the reference triangle; converted to barycentric (a1, a2) = (x - y, y) at the end.
PanelPairRule build_pair_rule(PairCase kind, int n) {
    const LineRule g = gauss_legendre(n);
    PanelPairRule rule;
    rule.kind = kind;
    rule.order = n;
    auto push = [&rule](double x1, double y1, double x2, double y2, double w) {
        rule.nodes.push_back({x1 - y1, y1, x2 - y2, y2, w});
    };
    for (int i = 0; i < n; ++i) {
        const double xi = g.x[i];
        for (int i3 = 0; i3 < n; ++i3) {
            const double e3 = g.x[i3];
            for (int i2 = 0; i2 < n; ++i2) {
                const double e2 = g.x[i2];
                for (int i1 = 0; i1 < n; ++i1) {
                    const double e1 = g.x[i1];
                    const double w = g.w[i] * g.w[i1] * g.w[i2] * g.w[i3];
                    switch (kind) {
                        case PairCase::coincident: {
                            const double lw = w * xi * xi * xi * e1 * e1 * e2;
                            push(xi, xi * (1 - e1 + e1 * e2), xi * (1 - e1 * e2 * e3), xi * (1 - e1), lw);
                            push(xi * (1 - e1 * e2 * e3), xi * (1 - e1), xi, xi * (1 - e1 + e1 * e2), lw);
                            push(xi, xi * e1 * (1 - e2 + e2 * e3), xi * (1 - e1 * e2), xi * e1 * (1 - e2), lw);
                            push(xi * (1 - e1 * e2), xi * e1 * (1 - e2), xi, xi * e1 * (1 - e2 + e2 * e3), lw);
                            push(xi * (1 - e1 * e2 * e3), xi * e1 * (1 - e2 * e3), xi, xi * e1 * (1 - e2), lw);
                            push(xi, xi * e1 * (1 - e2), xi * (1 - e1 * e2 * e3), xi * e1 * (1 - e2 * e3), lw);
                            break;
                        }
                        case PairCase::common_edge: {
                            const double lw = w * xi * xi * xi * e1 * e1 * e2;
                            push(xi, xi * e1 * e3, xi * (1 - e1 * e2), xi * e1 * (1 - e2), w * xi * xi * xi * e1 * e1);
                            push(xi, xi * e1, xi * (1 - e1 * e2 * e3), xi * e1 * e2 * (1 - e3), lw);
                            push(xi * (1 - e1 * e2), xi * e1 * (1 - e2), xi, xi * e1 * e2 * e3, lw);
                            push(xi * (1 - e1 * e2 * e3), xi * e1 * e2 * (1 - e3), xi, xi * e1, lw);
                            push(xi * (1 - e1 * e2 * e3), xi * e1 * (1 - e2 * e3), xi, xi * e1 * e2, lw);
                            break;
                        }
                        case PairCase::common_vertex: {
                            const double lw = w * xi * xi * xi * e2;
                            push(xi, xi * e1, xi * e2, xi * e2 * e3, lw);
                            push(xi * e2, xi * e2 * e3, xi, xi * e1, lw);
                            break;
                        }
                        case PairCase::separated:
                            push(xi, xi * e1, e2, e2 * e3, w * xi * e2);
                            break;
                    }
                }
            }
        }
    }
    return rule;
}

}  // namespace

const PanelPairRule& panel_pair_rule(PairCase kind, int order) {
    if (order < 1 || order > 40) throw InputError("panel pair rule order must be in [1, 40], got " + std::to_string(order));
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::unique_ptr<PanelPairRule>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto& slot = cache[{static_cast<int>(kind), order}];
    if (!slot) slot = std::make_unique<PanelPairRule>(build_pair_rule(kind, order));
    return *slot;
}

PairTopology classify_pair(const Triangle& t1, const Triangle& t2) {
    PairTopology topo;
    int common = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (t1[i] == t2[j]) {
                topo.perm1[common] = i;
                topo.perm2[common] = j;
                ++common;
                break;
            }
    auto fill = [common](std::array<int, 3>& perm) {
        int next = common;
        for (int i = 0; i < 3 && next < 3; ++i) {
            bool used = false;
            for (int j = 0; j < next; ++j) used = used || perm[j] == i;
            if (!used) perm[next++] = i;
        }
    };
    fill(topo.perm1);
    fill(topo.perm2);
    topo.kind = static_cast<PairCase>(common);
    return topo;
}

void map_pair_rule(const PanelPairRule& rule, const PairTopology& topo, const std::array<Vec3, 3>& tri1,
                   const std::array<Vec3, 3>& tri2, std::vector<PairPoint>& out) {
    if (rule.kind != topo.kind) throw NumericalError("panel pair rule does not match the pair topology");
    const Vec3& p0 = tri1[topo.perm1[0]];
    const Vec3 e1 = tri1[topo.perm1[1]] - p0;
    const Vec3 e2 = tri1[topo.perm1[2]] - p0;
    const Vec3& q0 = tri2[topo.perm2[0]];
    const Vec3 f1 = tri2[topo.perm2[1]] - q0;
    const Vec3 f2 = tri2[topo.perm2[2]] - q0;
    const double jac = e1.cross(e2).norm() * f1.cross(f2).norm();
    out.clear();
    out.reserve(rule.nodes.size());
    for (const auto& n : rule.nodes) out.push_back({p0 + n.a1 * e1 + n.a2 * e2, q0 + n.b1 * f1 + n.b2 * f2, n.w * jac});
}

void map_tensor_rule(const TriangleRule& r1, const TriangleRule& r2, const std::array<Vec3, 3>& tri1,
                     const std::array<Vec3, 3>& tri2, std::vector<PairPoint>& out) {
    const double a1 = 0.5 * (tri1[1] - tri1[0]).cross(tri1[2] - tri1[0]).norm();
    const double a2 = 0.5 * (tri2[1] - tri2[0]).cross(tri2[2] - tri2[0]).norm();
    out.clear();
    out.reserve(r1.size() * r2.size());
    for (std::size_t i = 0; i < r1.size(); ++i) {
        const auto& l = r1.points[i];
        const Vec3 x = l[0] * tri1[0] + l[1] * tri1[1] + l[2] * tri1[2];
        for (std::size_t j = 0; j < r2.size(); ++j) {
            const auto& m = r2.points[j];
            out.push_back({x, m[0] * tri2[0] + m[1] * tri2[1] + m[2] * tri2[2], r1.weights[i] * r2.weights[j] * a1 * a2});
        }
    }
}

}  // namespace efie
