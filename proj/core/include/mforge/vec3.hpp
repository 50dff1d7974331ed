#pragma once

#include <ostream>

namespace mforge {

// x = width, y = height, z = depth.
struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Vec3& operator+=(const Vec3& o) noexcept {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }
    constexpr Vec3& operator-=(const Vec3& o) noexcept {
        x -= o.x;
        y -= o.y;
        z -= o.z;
        return *this;
    }
    constexpr Vec3& operator*=(double k) noexcept {
        x *= k;
        y *= k;
        z *= k;
        return *this;
    }
    constexpr Vec3& operator/=(double k) noexcept {
        x /= k;
        y /= k;
        z /= k;
        return *this;
    }

    friend constexpr Vec3 operator+(Vec3 a, const Vec3& b) noexcept { return a += b; }
    friend constexpr Vec3 operator-(Vec3 a, const Vec3& b) noexcept { return a -= b; }
    friend constexpr Vec3 operator*(Vec3 a, double k) noexcept { return a *= k; }
    friend constexpr Vec3 operator*(double k, Vec3 a) noexcept { return a *= k; }
    friend constexpr Vec3 operator/(Vec3 a, double k) noexcept { return a /= k; }
    friend constexpr Vec3 operator-(const Vec3& a) noexcept { return {-a.x, -a.y, -a.z}; }

    friend constexpr bool operator==(const Vec3&, const Vec3&) = default;

    [[nodiscard]] constexpr bool is_zero() const noexcept { return x == 0.0 && y == 0.0 && z == 0.0; }
};

std::ostream& operator<<(std::ostream& os, const Vec3& v);

} // namespace mforge
