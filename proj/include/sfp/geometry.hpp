#pragma once

#include <cstdint>
#include <vector>

namespace sfp {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const;
    Vec3 normalized() const;
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

/// Point on the unit sphere in polar coordinates: tau in [0,pi], phi in [0,2pi).
struct SpherePoint {
    double tau = 0.0;
    double phi = 0.0;
};

/// Unit vector in R^3. Construct via Direction::of() which normalizes,
/// or brace-init values already known to be unit.
struct Direction {
    Vec3 v{0.0, 0.0, 1.0};

    static Direction of(const Vec3& raw);  // throws on zero norm
};

/// Proper rotation (orthogonal, det +1), row-major.
struct Rotation3 {
    double m[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};

    Vec3 apply(const Vec3& p) const {
        return {m[0][0] * p.x + m[0][1] * p.y + m[0][2] * p.z,
                m[1][0] * p.x + m[1][1] * p.y + m[1][2] * p.z,
                m[2][0] * p.x + m[2][1] * p.y + m[2][2] * p.z};
    }
    Rotation3 transpose() const;
};

Vec3 to_cartesian(const SpherePoint& p);

/// Inverse of to_cartesian. Input must be unit to 1e-9; phi at the poles is 0.
SpherePoint from_cartesian(const Vec3& v);

/// Area-uniform i.i.d. samples (cos tau ~ U[-1,1], phi ~ U[0,2pi)), deterministic in seed.
std::vector<SpherePoint> sample_uniform(std::size_t n, std::uint64_t seed);

/// Fibonacci lattice, quadrature-like coverage. Deterministic, no seed.
std::vector<SpherePoint> fibonacci_sphere(std::size_t n);

/// Rodrigues rotation taking the north pole (0,0,1) to w.
/// At the south pole the axis is fixed to (1,0,0).
Rotation3 rotation_to(const Direction& w);

}  // namespace sfp
