#pragma once

#include <cmath>
#include <complex>
#include <numbers>

namespace lagsol {

// A point of the plane, read as the complex number x + iy.
using PlanarPoint = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;

// Euclidean pairing <u, v> = Re(u conj(v)).
inline double dot(PlanarPoint u, PlanarPoint v) { return u.real() * v.real() + u.imag() * v.imag(); }

// Complex structure J(x, y) = (-y, x), i.e. multiplication by i.
inline PlanarPoint rotate_j(PlanarPoint u) { return {-u.imag(), u.real()}; }

inline PlanarPoint unit_from_angle(double angle) { return {std::cos(angle), std::sin(angle)}; }

inline bool is_finite(PlanarPoint p) { return std::isfinite(p.real()) && std::isfinite(p.imag()); }

// Coefficients of the curvature law  kappa = a <p, J p'> + b <p, p'>.
// a generates dilations, b rotations.
struct CurveLaw {
  double a = 0.0;
  double b = 0.0;

  bool is_zero() const { return a == 0.0 && b == 0.0; }

  double curvature(PlanarPoint p, PlanarPoint tangent) const {
    return a * dot(p, rotate_j(tangent)) + b * dot(p, tangent);
  }

  // Law of the alpha-side curve for soliton angle phi.
  static CurveLaw alpha_side(double phi) { return {-std::cos(phi), std::sin(phi)}; }
  // Law of the omega-side curve for soliton angle phi.
  static CurveLaw omega_side(double phi) { return {std::cos(phi), -std::sin(phi)}; }

  friend bool operator==(const CurveLaw&, const CurveLaw&) = default;
};

// A point of C^2.
struct C2Point {
  std::complex<double> z1;
  std::complex<double> z2;

  C2Point& operator+=(const C2Point& o) {
    z1 += o.z1;
    z2 += o.z2;
    return *this;
  }
  C2Point& operator-=(const C2Point& o) {
    z1 -= o.z1;
    z2 -= o.z2;
    return *this;
  }
  friend C2Point operator+(C2Point a, const C2Point& b) { return a += b; }
  friend C2Point operator-(C2Point a, const C2Point& b) { return a -= b; }
  friend C2Point operator*(std::complex<double> c, const C2Point& p) { return {c * p.z1, c * p.z2}; }
  friend C2Point operator*(double c, const C2Point& p) { return {c * p.z1, c * p.z2}; }
  friend bool operator==(const C2Point&, const C2Point&) = default;
};

// Hermitian product (u, v) = u1 conj(v1) + u2 conj(v2).
inline std::complex<double> hermitian(const C2Point& u, const C2Point& v) {
  return u.z1 * std::conj(v.z1) + u.z2 * std::conj(v.z2);
}

// Real inner product of R^4 = Re (u, v).
inline double dot(const C2Point& u, const C2Point& v) { return hermitian(u, v).real(); }

inline double norm_sq(const C2Point& u) { return std::norm(u.z1) + std::norm(u.z2); }

inline double norm(const C2Point& u) { return std::sqrt(norm_sq(u)); }

inline C2Point rotate_j(const C2Point& u) { return std::complex<double>(0.0, 1.0) * u; }

inline bool is_finite(const C2Point& p) { return is_finite(p.z1) && is_finite(p.z2); }

}  // namespace lagsol
