#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <complex>
#include <stdexcept>
#include <string>

namespace efie {

using cplx = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;

inline constexpr double pi = 3.141592653589793238462643383279502884;

/// Thrown on malformed or inconsistent input: mesh files, configuration,
/// invalid geometry passed to a public operation.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Mesh validation failure (open surface, non-manifold edge, bad orientation,
/// degenerate or badly shaped triangle).
class MeshError : public InputError {
public:
    using InputError::InputError;
};

/// Numerical failure: singular system, quadrature that did not converge,
/// evaluation on a singular set.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class QuadratureError : public NumericalError {
public:
    QuadratureError(const std::string& what, double achieved)
        : NumericalError(what), achieved_(achieved) {}
    double achieved() const noexcept { return achieved_; }

private:
    double achieved_;
};

/// Target point lies on a singular set (a triangle edge or vertex).
class SingularPointError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

inline CVec3 to_complex(const Vec3& v) { return v.cast<cplx>(); }

/// Bilinear (non-conjugated) dot product.
inline cplx bdot(const CVec3& a, const CVec3& b) { return a(0) * b(0) + a(1) * b(1) + a(2) * b(2); }
inline cplx bdot(const CVec3& a, const Vec3& b) { return a(0) * b(0) + a(1) * b(1) + a(2) * b(2); }

inline CVec3 cross(const CVec3& a, const Vec3& b) {
    return {a(1) * b(2) - a(2) * b(1), a(2) * b(0) - a(0) * b(2), a(0) * b(1) - a(1) * b(0)};
}
inline CVec3 cross(const Vec3& a, const CVec3& b) {
    return {a(1) * b(2) - a(2) * b(1), a(2) * b(0) - a(0) * b(2), a(0) * b(1) - a(1) * b(0)};
}
// Eigen's cross() conjugates complex results
inline CVec3 cross(const CVec3& a, const CVec3& b) {
    return {a(1) * b(2) - a(2) * b(1), a(2) * b(0) - a(0) * b(2), a(0) * b(1) - a(1) * b(0)};
}

/// Tangential projection v - (v.n) n onto the plane with unit normal n.
inline CVec3 tangential(const CVec3& v, const Vec3& n) { return v - bdot(v, n) * to_complex(n); }
inline Vec3 tangential(const Vec3& v, const Vec3& n) { return v - v.dot(n) * n; }

}  // namespace efie
