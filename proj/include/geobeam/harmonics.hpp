#pragma once

#include <functional>
#include <vector>

#include "geobeam/geom.hpp"
#include "geobeam/groups.hpp"

namespace geobeam::harmonics {

using geom::Complex;
using geom::CVec;
using geom::Vec;

// Surface volume of the round sphere S^d (2 pi^2 for d = 3).
double sphere_volume(int d);

// L^2-normalization constant of the degree-k beam: C_k with
// || C_k (b.x)^k ||_{L^2(S^d)} = 1 for isotropic b with |b|^2 = 2.
// Closed form C_k = sqrt((k+n-1)! / (2 pi^n k!)), n = (d+1)/2; the quadrature
// oracle certifies it in the test suite.
double normalization_constant(int k, int d);

// Integer power of a complex number; repeated squaring for small exponents,
// polar form beyond 64 to keep the phase stable at high degree.
Complex cpow_int(Complex z, int k);

// One term c * C_k (b.x)^k with b isotropic (b.b = 0, |b|^2 = 2).
struct Beam {
  CVec b;
  int degree;
  Complex coeff;
};

// A degree-k spherical harmonic given as a finite combination of beams.
// Terms are canonicalized on construction: each b is phase-gauged so its
// first significant component is positive real (the phase moves into the
// coefficient), equal-b terms merge, vanished terms drop, and the list is
// sorted. The zero sum is legal.
class HarmonicSum {
 public:
  HarmonicSum(int degree, int d, std::vector<Beam> terms);
  static HarmonicSum zero(int degree, int d) {
    return HarmonicSum(degree, d, {});
  }

  int degree() const { return degree_; }
  int sphere_dim() const { return d_; }
  const std::vector<Beam>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

 private:
  int degree_;
  int d_;
  std::vector<Beam> terms_;
};

// The normalized beam concentrating on gamma: C_k (b.x)^k, b = u + iv.
HarmonicSum beam(const geom::OrientedGeodesic& gamma, int k);

// Pointwise evaluation.
Complex evaluate(const HarmonicSum& psi, const geom::AmbientPoint& x);
// Degree-0 homogeneous extension psi(y/|y|), used by the finite-difference
// Laplacian oracle.
Complex evaluate_direction(const HarmonicSum& psi, const Vec& y);

// (psi o phi)(x) = psi(phi x): termwise b -> phi^T b.
HarmonicSum compose_isometry(const HarmonicSum& psi, const geom::Isometry& phi);

// Overlap of two normalized beams of equal degree: ((b1 . conj b2)/2)^k.
// Certified against the quadrature oracle before first analytic use.
Complex beam_overlap(const CVec& b1, const CVec& b2, int k);

// Hermitian L^2(S^d) inner product <psi1, psi2> = int psi1 conj(psi2).
// Uses the certified beam-overlap closed form; falls back to quadrature
// (d = 3) if certification ever fails.
Complex inner_product(const HarmonicSum& psi1, const HarmonicSum& psi2);

double norm(const HarmonicSum& psi);
HarmonicSum normalized(const HarmonicSum& psi);

// Linear combinations, degree- and dimension-checked.
HarmonicSum add(const HarmonicSum& a, const HarmonicSum& b);
HarmonicSum scale(const HarmonicSum& a, Complex c);

// Termwise equality after canonicalization, tolerance on b and coefficients.
bool sums_equal(const HarmonicSum& a, const HarmonicSum& b, double tol = 1e-9);

// <psi>_G = (1/|G|) sum_{phi in G} psi o phi. May vanish identically.
HarmonicSum group_average(const HarmonicSum& psi, const groups::FiniteGroup& g);

// Same average computed with |G|/|G_mu| compositions, valid when psi is
// already G_mu-invariant.
HarmonicSum coset_average(const HarmonicSum& psi, const groups::FiniteGroup& g,
                          const groups::FiniteGroup& g_mu);

// Quadrature on S^d. For d = 3 the Hopf product rule: Gauss-Legendre in
// u = |z_1|^2 times equispaced angles, exact for polynomials of total degree
// up to the exactness degree. Other odd d get a seeded Monte Carlo rule with
// a standard-error estimate (exactness reported as -1).
class QuadratureRule {
 public:
  QuadratureRule(Eigen::MatrixXd nodes, Eigen::VectorXd weights, int exactness,
                 int d);

  const Eigen::MatrixXd& nodes() const { return nodes_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  int size() const { return static_cast<int>(weights_.size()); }
  int exactness() const { return exactness_; }
  bool is_exact() const { return exactness_ >= 0; }
  int sphere_dim() const { return d_; }

  template <class F>
  double integrate(F&& f) const {
    double total = 0.0;
    for (int i = 0; i < size(); ++i) total += weights_[i] * f(node(i));
    return total;
  }

  template <class F>
  Complex integrate_complex(F&& f) const {
    Complex total = 0.0;
    for (int i = 0; i < size(); ++i) total += weights_[i] * f(node(i));
    return total;
  }

  struct Estimate {
    double value;
    double standard_error;  // 0 for exact rules
  };
  Estimate integrate_with_error(const std::function<double(const Vec&)>& f) const;

  Vec node(int i) const { return nodes_.row(i).transpose(); }

 private:
  Eigen::MatrixXd nodes_;
  Eigen::VectorXd weights_;
  int exactness_;
  int d_;
};

// Exact Hopf rule for d = 3; a seeded Monte Carlo rule for other odd d.
// Throws when the requested exactness exceeds the cap.
QuadratureRule quadrature_rule(int d, int exactness_degree, int cap = 400);
// Seeded Monte Carlo rule at a chosen sample count.
QuadratureRule monte_carlo_rule(int d, int samples, std::uint64_t seed);

// Quadrature-backed inner product; the slow independent oracle for the
// beam-overlap closed form.
Complex inner_product_quadrature(const HarmonicSum& psi1,
                                 const HarmonicSum& psi2,
                                 const QuadratureRule& rule);

// max over samples of |Laplace(psi) + k(k+d-1) psi|, with the
// Laplace-Beltrami operator applied through 4th-order central differences of
// the degree-0 ambient extension (step 1e-3).
double eigen_residual(const HarmonicSum& psi,
                      const std::vector<geom::AmbientPoint>& samples);

// Exact ambient-harmonicity certificate: max over terms of |b.b|.
double isotropy_residual(const HarmonicSum& psi);

}  // namespace geobeam::harmonics
