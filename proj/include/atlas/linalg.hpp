#ifndef ATLAS_LINALG_HPP
#define ATLAS_LINALG_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace atlas {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    Vec3 operator-() const { return {-x, -y, -z}; }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }
inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }
inline double norm_inf(const Vec3& v) {
    return std::max(std::abs(v.x), std::max(std::abs(v.y), std::abs(v.z)));
}
inline bool finite(const Vec3& v) {
    return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

struct Mat3 {
    // row-major
    std::array<std::array<double, 3>, 3> m{};

    double& operator()(int r, int c) { return m[r][c]; }
    double operator()(int r, int c) const { return m[r][c]; }

    static Mat3 zero() { return {}; }
    static Mat3 identity() {
        Mat3 a;
        a(0, 0) = a(1, 1) = a(2, 2) = 1.0;
        return a;
    }
};

inline Vec3 operator*(const Mat3& a, const Vec3& v) {
    return {a(0, 0) * v.x + a(0, 1) * v.y + a(0, 2) * v.z,
            a(1, 0) * v.x + a(1, 1) * v.y + a(1, 2) * v.z,
            a(2, 0) * v.x + a(2, 1) * v.y + a(2, 2) * v.z};
}

inline double det(const Mat3& a) {
    return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1))
         - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
         + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
}

inline double frobenius_norm(const Mat3& a) {
    double s = 0.0;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) s += a(r, c) * a(r, c);
    return std::sqrt(s);
}

// Characteristic polynomial of a 3x3 matrix as
//   det(lambda*I - J) = lambda^3 + a2*lambda^2 + a1*lambda + a0.
struct CharPoly3 {
    double a2, a1, a0;
};

inline CharPoly3 char_poly(const Mat3& j) {
    const double tr = j(0, 0) + j(1, 1) + j(2, 2);
    const double m0 = j(1, 1) * j(2, 2) - j(1, 2) * j(2, 1);
    const double m1 = j(0, 0) * j(2, 2) - j(0, 2) * j(2, 0);
    const double m2 = j(0, 0) * j(1, 1) - j(0, 1) * j(1, 0);
    return {-tr, m0 + m1 + m2, -det(j)};
}

// Dense n x n solve with partial pivoting. A is row-major and is destroyed.
// Returns false if a pivot falls below `pivot_tol` (rank deficiency).
inline bool solve_dense(std::vector<double>& a, std::vector<double>& b, int n,
                        double pivot_tol = 1e-13) {
    for (int col = 0; col < n; ++col) {
        int piv = col;
        double best = std::abs(a[static_cast<size_t>(col) * n + col]);
        for (int r = col + 1; r < n; ++r) {
            const double v = std::abs(a[static_cast<size_t>(r) * n + col]);
            if (v > best) { best = v; piv = r; }
        }
        if (!(best > pivot_tol)) return false;
        if (piv != col) {
            for (int c = col; c < n; ++c)
                std::swap(a[static_cast<size_t>(piv) * n + c], a[static_cast<size_t>(col) * n + c]);
            std::swap(b[piv], b[col]);
        }
        const double d = a[static_cast<size_t>(col) * n + col];
        for (int r = col + 1; r < n; ++r) {
            const double f = a[static_cast<size_t>(r) * n + col] / d;
            if (f == 0.0) continue;
            for (int c = col; c < n; ++c)
                a[static_cast<size_t>(r) * n + c] -= f * a[static_cast<size_t>(col) * n + c];
            b[r] -= f * b[col];
        }
    }
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < n; ++c) s -= a[static_cast<size_t>(r) * n + c] * b[c];
        b[r] = s / a[static_cast<size_t>(r) * n + r];
    }
    return true;
}

}  // namespace atlas

#endif
