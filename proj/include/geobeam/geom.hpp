#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace geobeam::geom {

using Complex = std::complex<double>;
using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;

// Tolerances: construction-time invariants, equality comparisons, and
// reconstruction residuals. One to two orders above double accumulation
// for the dimensions handled here (d <= 7).
inline constexpr double kConstructTol = 1e-12;
inline constexpr double kCompareTol = 1e-9;
inline constexpr double kReconstructTol = 1e-10;

// Only odd sphere dimensions d >= 3 are supported: the ambient space
// R^{d+1} then carries the global complex structure z_m = x_{2m-1} + i x_{2m}.
// Returns n = (d+1)/2, throwing for invalid d.
int complex_dim(int d);

// Multiplication by i on R^{d+1}, as a real matrix action: J e_{2m-1} = e_{2m},
// J e_{2m} = -e_{2m-1} (indices 1-based).
Vec apply_complex_structure(const Vec& x);

// A point of S^d, unit vector in R^{d+1}.
class AmbientPoint {
 public:
  explicit AmbientPoint(Vec coords);
  const Vec& coords() const { return x_; }
  int sphere_dim() const { return static_cast<int>(x_.size()) - 1; }

 private:
  Vec x_;
};

// The same point in C^n coordinates, z_m = x_{2m-1} + i x_{2m}.
class ComplexPoint {
 public:
  explicit ComplexPoint(CVec coords);
  const CVec& coords() const { return z_; }
  int complex_dim() const { return static_cast<int>(z_.size()); }

 private:
  CVec z_;
};

ComplexPoint complexify(const AmbientPoint& x);
AmbientPoint realify(const ComplexPoint& z);

// Packing helpers between R^{2n} and C^n (no unit-norm requirement).
CVec pack_complex(const Vec& x);
Vec unpack_complex(const CVec& z);

// An element of SO(d+1) acting on the sphere.
class Isometry {
 public:
  explicit Isometry(Mat q);
  static Isometry identity(int ambient_dim);

  const Mat& matrix() const { return q_; }
  int ambient_dim() const { return static_cast<int>(q_.rows()); }

  Isometry inverse() const;
  Isometry operator*(const Isometry& rhs) const;

  Vec apply(const Vec& x) const { return q_ * x; }
  // Real action extended complex-linearly to C^{d+1}.
  CVec apply(const CVec& z) const;
  AmbientPoint apply(const AmbientPoint& x) const;

 private:
  Mat q_;
};

bool isometries_equal(const Isometry& a, const Isometry& b,
                      double tol = kCompareTol);

// An oriented great circle: the intersection of S^d with an oriented
// 2-plane through the origin, stored as an orthonormal frame (u, v).
// The isotropic vector b = u + iv satisfies b.b = 0 (unconjugated) and
// |b|^2 = 2; it determines the oriented circle up to a unit phase.
// Equality is tested through the unit Pluecker bivector u ^ v, which is
// invariant under in-plane rotations of the frame.
class OrientedGeodesic {
 public:
  const Vec& u() const { return u_; }
  const Vec& v() const { return v_; }
  int sphere_dim() const { return static_cast<int>(u_.size()) - 1; }

  // b = u + iv in C^{d+1}.
  CVec isotropic() const;

  // Unit Pluecker coordinates u_m v_n - u_n v_m, pairs (m, n), m < n,
  // in lexicographic order. Size (d+1)d/2.
  const Vec& bivector() const { return bivector_; }

  // Point on the circle at arc parameter t: u cos t + v sin t.
  Vec point(double t) const;

  // The standard circle gamma_j: |z_j| = 1 (1-based block index).
  static OrientedGeodesic standard_circle(int j, int d);

  friend OrientedGeodesic geodesic_from_frame(const Vec& u, const Vec& v);
  friend OrientedGeodesic apply_isometry(const Isometry& phi,
                                         const OrientedGeodesic& gamma);

 private:
  OrientedGeodesic(Vec u, Vec v);

  Vec u_, v_;
  Vec bivector_;
};

// Orthonormalizes (v against u) and builds the oriented geodesic.
// Throws "degenerate frame" when u, v are linearly dependent.
OrientedGeodesic geodesic_from_frame(const Vec& u, const Vec& v);

// Push-forward: the circle with frame (phi u, phi v); its isotropic vector
// is phi b (complex-linear extension of the real action).
OrientedGeodesic apply_isometry(const Isometry& phi,
                                const OrientedGeodesic& gamma);

// Oriented equality: canonical bivectors agree within kCompareTol.
bool geodesics_equal(const OrientedGeodesic& a, const OrientedGeodesic& b);

// Frobenius distance of the unit bivectors; the metric used by the
// geodesic-space dictionary.
double geodesic_distance(const OrientedGeodesic& a, const OrientedGeodesic& b);

// Canonical form of phi in SO(d+1): angles theta_1 <= ... <= theta_n in
// (-pi, pi] and a conjugator V in SO(d+1) with
//     phi = V^T . blockdiag(R(theta_1), ..., R(theta_n)) . V,
// where R(theta) rotates each coordinate pair, i.e. acts on z_m by
// e^{i theta_m}. Deterministic: angles ascend, signs are normalized to be
// nonnegative whenever the determinant constraint allows (at most the first
// angle is left negative).
struct CanonicalForm {
  Isometry conjugator;
  std::vector<double> angles;

  Mat block_diagonal() const;
  // V^T . blockdiag . V; matches the input within kReconstructTol.
  Mat reconstruct() const;
};

CanonicalForm canonical_form(const Isometry& phi);

}  // namespace geobeam::geom
