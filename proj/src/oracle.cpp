#include "efie/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

namespace efie {

namespace {

// Gauss-Kronrod 7/15 nodes on [-1, 1], nonnegative half.
constexpr double xgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                           0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                           0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                           0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double wgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                           0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                           0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                           0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double wg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                          0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a, b;
    cplx value;
    double error;
    double resabs;
    int depth;
    bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment gk15(F& f, double a, double b, int depth) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const cplx fc = f(c);
    cplx k = fc * wgk[7];
    cplx g = fc * wg[3];
    double abs_sum = std::abs(fc) * wgk[7];
    cplx fv[15];
    fv[7] = fc;
    for (int j = 0; j < 7; ++j) {
        const cplx f1 = f(c - h * xgk[j]);
        const cplx f2 = f(c + h * xgk[j]);
        fv[j] = f1;
        fv[14 - j] = f2;
        k += wgk[j] * (f1 + f2);
        abs_sum += wgk[j] * (std::abs(f1) + std::abs(f2));
        if (j % 2 == 1) g += wg[j / 2] * (f1 + f2);
    }
    // error heuristic of QUADPACK's qk15
    const cplx mean = 0.5 * k;
    double asc = wgk[7] * std::abs(fc - mean);
    for (int j = 0; j < 7; ++j) asc += wgk[j] * (std::abs(fv[j] - mean) + std::abs(fv[14 - j] - mean));
    asc *= h;
    double err = std::abs((k - g) * h);
    if (asc != 0.0 && err != 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
    const double resabs = abs_sum * h;
    const double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50 * eps)) err = std::max(50 * eps * resabs, err);
    return {a, b, k * h, err, resabs, depth};
}

struct AdaptResult {
    cplx value;
    double error;
};

// Stopping test err <= max(abs, rel * int |f|).
struct Tol {
    double abs;
    double rel;
};

// Globally adaptive bisection on [a, b]. Segments at max_depth are frozen;
// if their error keeps the total above the tolerance, QuadratureError is thrown.
template <class F>
AdaptResult adapt(F&& f, double a, double b, Tol tol, int max_depth) {
    constexpr std::size_t max_segments = 4000;
    const double rel = std::max(tol.rel, 200.0 * std::numeric_limits<double>::epsilon());
    std::priority_queue<Segment> heap;
    std::vector<Segment> frozen;
    heap.push(gk15(f, a, b, 0));
    double active = heap.top().error, frozen_err = 0.0;
    double resabs = heap.top().resabs;
    auto goal = [&] { return std::max(tol.abs, rel * resabs); };
    while (!heap.empty() && active + frozen_err > goal() && heap.size() < max_segments) {
        Segment s = heap.top();
        heap.pop();
        active -= s.error;
        if (s.depth >= max_depth) {
            frozen_err += s.error;
            frozen.push_back(s);
            continue;
        }
        const double m = 0.5 * (s.a + s.b);
        Segment l = gk15(f, s.a, m, s.depth + 1);
        Segment r = gk15(f, m, s.b, s.depth + 1);
        active += l.error + r.error;
        resabs += l.resabs + r.resabs - s.resabs;
        heap.push(l);
        heap.push(r);
    }
    const double err = std::max(active, 0.0) + frozen_err;
    if (err > goal()) {
        std::ostringstream os;
        os << "adaptive quadrature did not reach tolerance " << goal() << " (achieved " << err << ")";
        throw QuadratureError(os.str(), err);
    }
    // resum to remove accumulated rounding from the running updates
    cplx total = 0.0;
    for (const auto& seg : frozen) total += seg.value;
    while (!heap.empty()) {
        total += heap.top().value;
        heap.pop();
    }
    return {total, err};
}

// Integral of f over the triangle (p, u, v) in Duffy coordinates about p:
// y = p + s (u - p) + s t (v - u), dA = 2 A s ds dt with A the signed area
// relative to normal n. The inner s integrals get a tenth of the tolerance.
template <class F>
cplx duffy_integral(const Vec3& p, const Vec3& u, const Vec3& v, const Vec3& n, F& f, Tol tol, int max_depth) {
    const Vec3 a = u - p, b = v - u;
    const double area = 0.5 * a.cross(b).dot(n);
    const double scale = std::max(a.squaredNorm(), b.squaredNorm());
    if (std::abs(area) <= 1e-15 * scale) return 0.0;
    const double jac = 2.0 * area;
    const double reach = std::max(p.norm(), std::sqrt(scale));
    const Tol inner_tol{0.05 * tol.abs / std::abs(jac), 0.1 * tol.rel};
    // t outside: for x in the plane the integrand of 1/R is constant in s
    auto outer = [&](double t) {
        const Vec3 d = a + t * b;
        auto inner = [&](double s) { return s * f(p + s * d); };
        // Below s0, |y - p| is under 1e-4 of the coordinate magnitude and
        // round-off in y - x would drive the bisection; one GK15 panel there.
        const double s0 = std::min(1.0, 1e-4 * reach / std::max(d.norm(), 1e-300));
        const cplx head = gk15(inner, 0.0, s0, 0).value;
        if (s0 >= 1.0) return jac * head;
        return jac * (head + adapt(inner, s0, 1.0, inner_tol, max_depth).value);
    };
    return adapt(outer, 0.0, 1.0, Tol{0.5 * tol.abs, tol.rel}, max_depth).value;
}

Vec3 closest_on_segment(const Vec3& x, const Vec3& a, const Vec3& b) {
    const Vec3 d = b - a;
    const double t = std::clamp((x - a).dot(d) / d.squaredNorm(), 0.0, 1.0);
    return a + t * d;
}

// Point of the closed triangle nearest to x.
Vec3 closest_point(const std::array<Vec3, 3>& tri, const Vec3& x, const Vec3& n) {
    const Vec3 p = x - n.dot(x - tri[0]) * n;
    bool inside = true;
    for (int i = 0; i < 3; ++i) {
        const Vec3& a = tri[i];
        const Vec3& b = tri[(i + 1) % 3];
        if ((b - a).cross(p - a).dot(n) < 0.0) inside = false;
    }
    if (inside) return p;
    Vec3 best = closest_on_segment(p, tri[0], tri[1]);
    for (int i = 1; i < 3; ++i) {
        const Vec3 c = closest_on_segment(p, tri[i], tri[(i + 1) % 3]);
        if ((c - p).squaredNorm() < (best - p).squaredNorm()) best = c;
    }
    return best;
}

// Split about the point of T nearest to x, so that the (near) singularity
// sits at the collapsed vertex of every Duffy sub-triangle.
template <class F>
cplx panel_integral(const std::array<Vec3, 3>& tri, const Vec3& x, F& f, Tol tol, int max_depth) {
    const Vec3 n = (tri[1] - tri[0]).cross(tri[2] - tri[0]).normalized();
    const Vec3 q = closest_point(tri, x, n);
    cplx sum = 0.0;
    for (int i = 0; i < 3; ++i)
        sum += duffy_integral(q, tri[i], tri[(i + 1) % 3], n, f, Tol{tol.abs / 3.0, tol.rel}, max_depth);
    return sum;
}

}  // namespace

cplx oracle_panel_integral(const std::array<Vec3, 3>& tri, const Vec3& x, const PointFunction& f,
                           const OracleOptions& opts) {
    auto g = [&f](const Vec3& y) { return f(y); };
    return panel_integral(tri, x, g, Tol{opts.tol, opts.rel_tol}, opts.max_depth);
}

cplx oracle_triangle_integral(const std::array<Vec3, 3>& tri, const PointFunction& f, const OracleOptions& opts) {
    // Duffy about the centroid puts the edges and vertices, where integrands
    // like a panel potential lose smoothness, on the boundary of the parameter square.
    const Vec3 c = (tri[0] + tri[1] + tri[2]) / 3.0;
    const Vec3 n = (tri[1] - tri[0]).cross(tri[2] - tri[0]).normalized();
    auto g = [&](const Vec3& x) { return f(x); };
    cplx sum = 0.0;
    for (int i = 0; i < 3; ++i)
        sum += duffy_integral(c, tri[i], tri[(i + 1) % 3], n, g, Tol{opts.tol / 3.0, opts.rel_tol}, opts.max_depth);
    return sum;
}

cplx oracle_double_integral(const std::array<Vec3, 3>& t1, const std::array<Vec3, 3>& t2, const PairKernel& kernel,
                            const OracleOptions& opts) {
    const double area1 = 0.5 * (t1[1] - t1[0]).cross(t1[2] - t1[0]).norm();
    const Tol inner_tol{0.1 * opts.tol / area1, 0.1 * opts.rel_tol};
    auto outer = [&](const Vec3& x) {
        auto k = [&](const Vec3& y) { return kernel(x, y); };
        return panel_integral(t2, x, k, inner_tol, opts.max_depth);
    };
    return oracle_triangle_integral(t1, outer, opts);
}

}  // namespace efie
