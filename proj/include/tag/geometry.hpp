#pragma once

#include <array>
#include <cmath>

// Small fixed-size geometry types used throughout the pipeline.
// Rotations are unit quaternions; 3x3 matrices are materialized only where
// Frobenius distances between orientations are needed.

namespace tag {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const { return std::sqrt(dot(*this)); }
    double norm_sq() const { return dot(*this); }
    Vec3 normalized() const {
        const double n = norm();
        return n > 0.0 ? Vec3{x / n, y / n, z / n} : Vec3{};
    }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

// Row-major 3x3 matrix.
struct Mat3 {
    std::array<double, 9> m{};

    double& operator()(int r, int c) { return m[3 * r + c]; }
    double operator()(int r, int c) const { return m[3 * r + c]; }

    static Mat3 identity() {
        Mat3 i;
        i.m = {1, 0, 0, 0, 1, 0, 0, 0, 1};
        return i;
    }

    Mat3 operator-(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 9; ++i) r.m[i] = m[i] - o.m[i];
        return r;
    }

    double frobenius_sq() const {
        double s = 0.0;
        for (double v : m) s += v * v;
        return s;
    }

    // Elementwise inner product <A, B>_F.
    double fdot(const Mat3& o) const {
        double s = 0.0;
        for (int i = 0; i < 9; ++i) s += m[i] * o.m[i];
        return s;
    }

    Vec3 col(int c) const { return {m[c], m[3 + c], m[6 + c]}; }
    void set_col(int c, const Vec3& v) { m[c] = v.x; m[3 + c] = v.y; m[6 + c] = v.z; }
};

// Left-multiplication by the skew matrix of a: returns [a]x * R.
inline Mat3 skew_mul(const Vec3& a, const Mat3& r) {
    Mat3 out;
    for (int c = 0; c < 3; ++c) out.set_col(c, a.cross(r.col(c)));
    return out;
}

struct Quat {
    double w = 1.0, x = 0.0, y = 0.0, z = 0.0;

    static Quat from_axis_angle(const Vec3& unit_axis, double angle) {
        const double h = 0.5 * angle;
        const double s = std::sin(h);
        return {std::cos(h), unit_axis.x * s, unit_axis.y * s, unit_axis.z * s};
    }

    Quat operator*(const Quat& o) const {
        return {w * o.w - x * o.x - y * o.y - z * o.z,
                w * o.x + x * o.w + y * o.z - z * o.y,
                w * o.y - x * o.z + y * o.w + z * o.x,
                w * o.z + x * o.y - y * o.x + z * o.w};
    }

    Quat conjugate() const { return {w, -x, -y, -z}; }

    double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }

    Quat normalized() const {
        const double n = norm();
        return {w / n, x / n, y / n, z / n};
    }

    Vec3 rotate(const Vec3& v) const {
        // v' = v + 2 q_vec x (q_vec x v + w v)
        const Vec3 qv{x, y, z};
        const Vec3 t = qv.cross(v) * 2.0;
        return v + t * w + qv.cross(t);
    }

    Mat3 to_mat3() const {
        Mat3 r;
        const double xx = x * x, yy = y * y, zz = z * z;
        const double xy = x * y, xz = x * z, yz = y * z;
        const double wx = w * x, wy = w * y, wz = w * z;
        r.m = {1 - 2 * (yy + zz), 2 * (xy - wz),     2 * (xz + wy),
               2 * (xy + wz),     1 - 2 * (xx + zz), 2 * (yz - wx),
               2 * (xz - wy),     2 * (yz + wx),     1 - 2 * (xx + yy)};
        return r;
    }
};

// Rigid transform: rotation followed by translation, p' = q*(p) + t.
struct Transform {
    Quat q;
    Vec3 t;

    static Transform identity() { return {}; }

    Transform operator*(const Transform& o) const {
        return {q * o.q, t + q.rotate(o.t)};
    }

    Vec3 apply(const Vec3& p) const { return t + q.rotate(p); }
};

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

// Wraps an angle to the (-pi, pi] convention used by the decoder.
inline double wrap_angle(double a) {
    double r = std::remainder(a, kTwoPi);  // (-pi, pi], except remainder gives [-pi, pi]
    if (r <= -kPi) r += kTwoPi;
    return r;
}

}  // namespace tag
