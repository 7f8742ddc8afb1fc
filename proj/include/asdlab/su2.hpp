#ifndef ASDLAB_SU2_HPP
#define ASDLAB_SU2_HPP

#include <array>
#include <cmath>

namespace asdlab {

// su(2) element in the basis {sigma_1/2i, sigma_2/2i, sigma_3/2i}.
// In this basis the bracket is the cross product and the paper's inner
// product <A,B> = -tr(AB) is dot(a,b)/2.
struct Su2 {
  double a[3]{0.0, 0.0, 0.0};

  Su2() = default;
  Su2(double x, double y, double z) : a{x, y, z} {}

  Su2& operator+=(const Su2& o) {
    a[0] += o.a[0]; a[1] += o.a[1]; a[2] += o.a[2];
    return *this;
  }
  Su2& operator-=(const Su2& o) {
    a[0] -= o.a[0]; a[1] -= o.a[1]; a[2] -= o.a[2];
    return *this;
  }
  Su2& operator*=(double s) {
    a[0] *= s; a[1] *= s; a[2] *= s;
    return *this;
  }
};

inline Su2 operator+(Su2 x, const Su2& y) { return x += y; }
inline Su2 operator-(Su2 x, const Su2& y) { return x -= y; }
inline Su2 operator*(double s, Su2 x) { return x *= s; }

inline Su2 bracket(const Su2& x, const Su2& y) {
  return Su2(x.a[1] * y.a[2] - x.a[2] * y.a[1],
             x.a[2] * y.a[0] - x.a[0] * y.a[2],
             x.a[0] * y.a[1] - x.a[1] * y.a[0]);
}

inline double inner(const Su2& x, const Su2& y) {
  return 0.5 * (x.a[0] * y.a[0] + x.a[1] * y.a[1] + x.a[2] * y.a[2]);
}
inline double norm2(const Su2& x) { return inner(x, x); }
inline double norm(const Su2& x) { return std::sqrt(norm2(x)); }

// Unit quaternions model SU(2): q = (w, v) is w*I - i(v . sigma).
// The algebra element sum_a c_a sigma_a/2i corresponds to the pure
// quaternion (0, c/2), so exp and log carry a factor 2 on the vector part.
struct Quat {
  double w = 1.0, x = 0.0, y = 0.0, z = 0.0;

  Quat() = default;
  Quat(double w_, double x_, double y_, double z_) : w(w_), x(x_), y(y_), z(z_) {}
};

inline Quat operator*(const Quat& p, const Quat& q) {
  return Quat(p.w * q.w - p.x * q.x - p.y * q.y - p.z * q.z,
              p.w * q.x + p.x * q.w + p.y * q.z - p.z * q.y,
              p.w * q.y - p.x * q.z + p.y * q.w + p.z * q.x,
              p.w * q.z + p.x * q.y - p.y * q.x + p.z * q.w);
}
inline Quat operator+(const Quat& p, const Quat& q) { return Quat(p.w + q.w, p.x + q.x, p.y + q.y, p.z + q.z); }
inline Quat operator*(double s, const Quat& q) { return Quat(s * q.w, s * q.x, s * q.y, s * q.z); }
inline Quat conj(const Quat& q) { return Quat(q.w, -q.x, -q.y, -q.z); }
inline double qnorm(const Quat& q) { return std::sqrt(q.w * q.w + q.x * q.x + q.y * q.y + q.z * q.z); }
inline Quat normalized(const Quat& q) {
  double n = qnorm(q);
  return Quat(q.w / n, q.x / n, q.y / n, q.z / n);
}

inline Quat exp_su2(const Su2& u) {
  double hx = 0.5 * u.a[0], hy = 0.5 * u.a[1], hz = 0.5 * u.a[2];
  double t = std::sqrt(hx * hx + hy * hy + hz * hz);
  double c = std::cos(t);
  double s = (t < 1e-12) ? 1.0 - t * t / 6.0 : std::sin(t) / t;
  return Quat(c, s * hx, s * hy, s * hz);
}

// log near the identity (|t| < pi); returns the algebra element.
inline Su2 log_su2(const Quat& q0) {
  Quat q = q0.w >= 0.0 ? q0 : -1.0 * q0;
  double vn = std::sqrt(q.x * q.x + q.y * q.y + q.z * q.z);
  double t = std::atan2(vn, q.w);
  double s = (vn < 1e-12) ? 2.0 / q.w : 2.0 * t / vn;
  return Su2(s * q.x, s * q.y, s * q.z);
}

// Adjoint action g X g^{-1} as a rotation of the coefficient vector.
inline Su2 adjoint(const Quat& g, const Su2& u) {
  Quat v(0.0, 0.5 * u.a[0], 0.5 * u.a[1], 0.5 * u.a[2]);
  Quat r = g * v * conj(g);
  return Su2(2.0 * r.x, 2.0 * r.y, 2.0 * r.z);
}

// Algebra element of a pure-quaternion derivative: (dq) q^{-1} -> su(2).
inline Su2 dexp_to_su2(const Quat& dq, const Quat& q) {
  Quat r = dq * conj(q);
  return Su2(2.0 * r.x, 2.0 * r.y, 2.0 * r.z);
}

inline double dist_to_pm1(const Quat& q) {
  double dp = std::sqrt((q.w - 1) * (q.w - 1) + q.x * q.x + q.y * q.y + q.z * q.z);
  double dm = std::sqrt((q.w + 1) * (q.w + 1) + q.x * q.x + q.y * q.y + q.z * q.z);
  return std::min(dp, dm);
}

}  // namespace asdlab

#endif
