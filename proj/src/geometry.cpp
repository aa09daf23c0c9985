#include "sfp/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sfp/rng.hpp"

namespace sfp {

double Vec3::norm() const { return std::sqrt(x * x + y * y + z * z); }

Vec3 Vec3::normalized() const {
    const double n = norm();
    if (n == 0.0) throw std::invalid_argument("Vec3::normalized: zero vector");
    return {x / n, y / n, z / n};
}

Direction Direction::of(const Vec3& raw) {
    return Direction{raw.normalized()};
}

Rotation3 Rotation3::transpose() const {
    Rotation3 t;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) t.m[i][j] = m[j][i];
    return t;
}

Vec3 to_cartesian(const SpherePoint& p) {
    const double st = std::sin(p.tau);
    return {st * std::cos(p.phi), st * std::sin(p.phi), std::cos(p.tau)};
}

SpherePoint from_cartesian(const Vec3& v) {
    const double n = v.norm();
    if (std::abs(n - 1.0) > 1e-9)
        throw std::invalid_argument("from_cartesian: input not unit norm");
    const double z = std::clamp(v.z / n, -1.0, 1.0);
    const double tau = std::acos(z);
    const double rxy = std::hypot(v.x, v.y);
    if (rxy == 0.0) return {tau, 0.0};  // phi undefined at poles, canonical 0
    double phi = std::atan2(v.y, v.x);
    if (phi < 0.0) phi += 2.0 * M_PI;
    if (phi >= 2.0 * M_PI) phi = 0.0;
    return {tau, phi};
}

std::vector<SpherePoint> sample_uniform(std::size_t n, std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("sample_uniform: n must be >= 1");
    Rng rng(seed);
    std::vector<SpherePoint> pts;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double ct = rng.uniform(-1.0, 1.0);
        const double phi = rng.uniform(0.0, 2.0 * M_PI);
        pts.push_back({std::acos(ct), phi});
    }
    return pts;
}

std::vector<SpherePoint> fibonacci_sphere(std::size_t n) {
    if (n == 0) throw std::invalid_argument("fibonacci_sphere: n must be >= 1");
    const double golden = M_PI * (3.0 - std::sqrt(5.0));
    std::vector<SpherePoint> pts;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double z = (n == 1) ? 0.0
                                  : 1.0 - 2.0 * static_cast<double>(i) /
                                              static_cast<double>(n - 1);
        double phi = std::fmod(golden * static_cast<double>(i), 2.0 * M_PI);
        if (phi < 0.0) phi += 2.0 * M_PI;
        pts.push_back({std::acos(std::clamp(z, -1.0, 1.0)), phi});
    }
    return pts;
}

Rotation3 rotation_to(const Direction& w) {
    const Vec3& v = w.v;
    const double rxy2 = v.x * v.x + v.y * v.y;
    Rotation3 r;
    if (rxy2 < 1e-24) {
        if (v.z > 0.0) return r;  // identity
        // south pole: axis fixed to (1,0,0), angle pi -> diag(1,-1,-1)
        r.m[1][1] = -1.0;
        r.m[2][2] = -1.0;
        return r;
    }
    const double ct = std::clamp(v.z, -1.0, 1.0);
    const double st = std::sqrt(rxy2);  // sin(theta) for unit w
    const double inv = 1.0 / st;
    const double kx = -v.y * inv, ky = v.x * inv;  // kz = 0
    // R = I + sin(theta) K + (1 - cos(theta)) K^2 with K the cross-product
    // matrix of (kx, ky, 0).
    const double c1 = 1.0 - ct;
    r.m[0][0] = 1.0 + c1 * (-ky * ky);
    r.m[0][1] = c1 * kx * ky;
    r.m[0][2] = st * ky;
    r.m[1][0] = c1 * kx * ky;
    r.m[1][1] = 1.0 + c1 * (-kx * kx);
    r.m[1][2] = -st * kx;
    r.m[2][0] = -st * ky;
    r.m[2][1] = st * kx;
    r.m[2][2] = 1.0 + c1 * (-kx * kx - ky * ky);
    return r;
}

}  // namespace sfp
