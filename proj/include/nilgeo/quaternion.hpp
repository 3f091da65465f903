#ifndef NILGEO_QUATERNION_HPP
#define NILGEO_QUATERNION_HPP

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "nilgeo/errors.hpp"

namespace nilgeo {

/// Quaternion over the reals, basis (1, i, j, k) with ij = k, jk = i, ki = j.
struct Quaternion {
  double w = 0.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Quaternion() = default;
  Quaternion(double w_, double x_, double y_, double z_) : w(w_), x(x_), y(y_), z(z_) {}

  static Quaternion one() { return {1, 0, 0, 0}; }
  static Quaternion i() { return {0, 1, 0, 0}; }
  static Quaternion j() { return {0, 0, 1, 0}; }
  static Quaternion k() { return {0, 0, 0, 1}; }

  /// Imaginary quaternion a*i + b*j + c*k from a 3-vector.
  static Quaternion imaginary(const Eigen::Vector3d& v) { return {0, v[0], v[1], v[2]}; }

  Eigen::Vector3d vec() const { return {x, y, z}; }

  double norm2() const { return w * w + x * x + y * y + z * z; }
  double norm() const { return std::sqrt(norm2()); }

  bool is_imaginary(double tol = 1e-12) const { return std::abs(w) <= tol; }

  Quaternion conjugate() const { return {w, -x, -y, -z}; }

  Quaternion inverse() const {
    double n2 = norm2();
    if (n2 == 0.0) throw ZeroQuaternion("cannot invert the zero quaternion");
    return {w / n2, -x / n2, -y / n2, -z / n2};
  }

  Quaternion operator+(const Quaternion& q) const { return {w + q.w, x + q.x, y + q.y, z + q.z}; }
  Quaternion operator-(const Quaternion& q) const { return {w - q.w, x - q.x, y - q.y, z - q.z}; }
  Quaternion operator-() const { return {-w, -x, -y, -z}; }
  Quaternion operator*(double s) const { return {w * s, x * s, y * s, z * s}; }
};

inline Quaternion operator*(double s, const Quaternion& q) { return q * s; }

/// Hamilton product.
inline Quaternion operator*(const Quaternion& p, const Quaternion& q) {
  return {p.w * q.w - p.x * q.x - p.y * q.y - p.z * q.z,
          p.w * q.x + p.x * q.w + p.y * q.z - p.z * q.y,
          p.w * q.y - p.x * q.z + p.y * q.w + p.z * q.x,
          p.w * q.z + p.x * q.y - p.y * q.x + p.z * q.w};
}

inline Quaternion quat_mul(const Quaternion& p, const Quaternion& q) { return p * q; }

/// Conjugation action h w h^{-1} on imaginary quaternions; with `bullet` the
/// weight-2 action |h|^2 h w h^{-1}.
inline Quaternion spin_rotate(const Quaternion& h, const Quaternion& w, bool bullet = false) {
  if (h.norm2() == 0.0) throw ZeroQuaternion("spin_rotate requires h != 0");
  Quaternion r = h * w * h.inverse();
  if (bullet) r = r * h.norm2();
  return r;
}

/// Signed permutation symbol on indices in {1,2,3}; zero when not distinct.
inline int epsilon(int a, int b, int c) {
  if (a < 1 || a > 3 || b < 1 || b > 3 || c < 1 || c > 3)
    throw IndexOutOfRange("epsilon indices must lie in {1,2,3}");
  if (a == b || b == c || a == c) return 0;
  // even permutations of (1,2,3)
  if ((a == 1 && b == 2) || (a == 2 && b == 3) || (a == 3 && b == 1)) return 1;
  return -1;
}

/// Rotation matrix of h/|h| acting on imaginary quaternions: column a holds
/// the coordinates of h j_a h^{-1} (j_1, j_2, j_3) = (i, j, k).
inline Eigen::Matrix3d spin_rotation_matrix(const Quaternion& h) {
  if (h.norm2() == 0.0) throw ZeroQuaternion("rotation of the zero quaternion");
  Eigen::Matrix3d R;
  Quaternion basis[3] = {Quaternion::i(), Quaternion::j(), Quaternion::k()};
  for (int a = 0; a < 3; ++a) {
    Quaternion img = spin_rotate(h, basis[a]);
    R.col(a) = img.vec();
  }
  return R;
}

/// The order-3 rotation a i + b j + c k -> c i + a j + b k on (a,b,c).
inline Eigen::Matrix3d cyclic_rotation() {
  Eigen::Matrix3d c;
  c << 0, 0, 1,
       1, 0, 0,
       0, 1, 0;
  return c;
}

/// Point on the unit sphere of imaginary directions, labelling a complex
/// structure J_q = a J_1 + b J_2 + c J_3.
struct SphereLabel {
  double a, b, c;

  SphereLabel(double a_, double b_, double c_) : a(a_), b(b_), c(c_) {
    double n = std::sqrt(a * a + b * b + c * c);
    if (std::abs(n - 1.0) > 1e-12)
      throw ConfigInvalid("sphere label must have unit norm");
  }

  static SphereLabel axis(int a_) {
    if (a_ < 1 || a_ > 3) throw IndexOutOfRange("axis index must lie in {1,2,3}");
    return SphereLabel(a_ == 1 ? 1.0 : 0.0, a_ == 2 ? 1.0 : 0.0, a_ == 3 ? 1.0 : 0.0);
  }

  Quaternion quaternion() const { return {0, a, b, c}; }
  Eigen::Vector3d vec() const { return {a, b, c}; }
};

/// Deterministic Fibonacci lattice on S^2; the seed offsets the golden-angle
/// phase so distinct seeds give distinct (still well-spread) samples.
inline std::vector<SphereLabel> fibonacci_sphere(int count, std::uint64_t seed = 0) {
  std::vector<SphereLabel> pts;
  pts.reserve(count);
  const double golden = M_PI * (3.0 - std::sqrt(5.0));
  const double phase = 0.61803398874989484820 * static_cast<double>(seed % 1024);
  for (int i = 0; i < count; ++i) {
    double t = (i + 0.5) / count;
    double cz = 1.0 - 2.0 * t;
    double r = std::sqrt(std::max(0.0, 1.0 - cz * cz));
    double ang = golden * i + phase;
    pts.emplace_back(r * std::cos(ang), r * std::sin(ang), cz);
  }
  return pts;
}

} // namespace nilgeo

#endif
