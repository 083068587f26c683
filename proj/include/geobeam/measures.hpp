#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "geobeam/geom.hpp"
#include "geobeam/groups.hpp"
#include "geobeam/harmonics.hpp"

namespace geobeam::measures {

// A discrete probability measure sum w_i delta_{gamma_i} on the space of
// oriented geodesics (the flow-invariant reduction of the cosphere bundle).
// Duplicate atoms merge on construction; weights are positive and sum to 1.
class GeodesicMeasure {
 public:
  struct Atom {
    geom::OrientedGeodesic geodesic;
    double weight;
  };

  explicit GeodesicMeasure(std::vector<Atom> atoms);
  static GeodesicMeasure delta(const geom::OrientedGeodesic& gamma);

  const std::vector<Atom>& atoms() const { return atoms_; }
  int size() const { return static_cast<int>(atoms_.size()); }
  int sphere_dim() const { return atoms_[0].geodesic.sphere_dim(); }

 private:
  std::vector<Atom> atoms_;
};

// phi_* mu: atoms mapped by the isometry, weights unchanged.
GeodesicMeasure pushforward(const GeodesicMeasure& mu, const geom::Isometry& phi);

// <mu> = (1/|G|) sum phi_* mu; G-invariant by construction.
GeodesicMeasure average_measure(const GeodesicMeasure& mu,
                                const groups::FiniteGroup& g);

// True iff the atom sets are disjoint. For push-forwards of geodesic deltas
// this realizes the equal-or-singular dichotomy exactly.
bool mutually_singular(const GeodesicMeasure& mu, const GeodesicMeasure& nu);

// Coherent-state density |<psi, beam(gamma, k)>|^2 (unnormalized).
double husimi(const harmonics::HarmonicSum& psi,
              const geom::OrientedGeodesic& gamma);

// Product quadrature grid over the oriented-geodesic space of S^3,
// parameterized as S^2 x S^2 (left/right rotation axes of the circle,
// equivalently the self-dual/anti-self-dual parts of its bivector).
// Equal-area grid with resolution^2 nodes per factor.
class GeodesicGrid {
 public:
  explicit GeodesicGrid(int resolution = 64);

  int resolution() const { return resolution_; }
  int factor_size() const { return resolution_ * resolution_; }
  long total_size() const {
    return static_cast<long>(factor_size()) * factor_size();
  }
  // Node weight (product measure; each factor carries total mass 4 pi).
  double node_weight() const;

  // Factor node as a unit 3-vector.
  Eigen::Vector3d factor_node(int i) const;
  // The oriented geodesic at a node pair (test/diagnostic path).
  geom::OrientedGeodesic geodesic(int ia, int ib) const;

 private:
  int resolution_;
};

// Test-function dictionary on geodesic space: the Pluecker coordinate
// monomials of degree <= 2 plus seeded Gaussian bumps
// exp(-s dist^2(gamma, c)), dist = distance of unit bivectors,
// scales s in {4, 16}. Deterministic for a fixed seed; all functions are
// bounded by 1 in sup norm.
class Dictionary {
 public:
  static Dictionary standard(std::uint64_t seed, int d = 3);

  std::size_t size() const { return names_.size(); }
  const std::string& name(std::size_t i) const { return names_[i]; }
  double evaluate(std::size_t i, const geom::OrientedGeodesic& gamma) const;

  // Hot path: all values from the unit bivector (6 Pluecker coordinates).
  void evaluate_all(const double* p, double* out) const;

  std::size_t polynomial_count() const { return 27; }

 private:
  Dictionary() = default;

  std::vector<std::string> names_;
  std::vector<Eigen::Matrix<double, 6, 1>> bump_centers_;
  std::vector<double> bump_scales_;
};

// The normalized coherent-state (Husimi) measure of a harmonic sum on the
// geodesic grid: density h(gamma) = |<psi, beam(gamma,k)>|^2 / Z with Z fixed
// so the grid integral of h is exactly 1.
class HusimiField {
 public:
  static HusimiField build(const harmonics::HarmonicSum& psi,
                           const GeodesicGrid& grid);

  const harmonics::HarmonicSum& source() const { return psi_; }
  int degree() const { return psi_.degree(); }
  const GeodesicGrid& grid() const { return grid_; }
  double normalization() const { return z_; }

  double density(const geom::OrientedGeodesic& gamma) const;

 private:
  HusimiField(harmonics::HarmonicSum psi, GeodesicGrid grid, double z)
      : psi_(std::move(psi)), grid_(std::move(grid)), z_(z) {}

  harmonics::HarmonicSum psi_;
  GeodesicGrid grid_;
  double z_;
};

// int f h over geodesic space (grid pairing). Deterministic; threads split
// the grid into fixed rows reduced in order, so results do not depend on the
// thread count.
double pair_husimi(const HusimiField& field,
                   const std::function<double(const geom::OrientedGeodesic&)>& f);

// Batched pairings of a field or a discrete measure against the dictionary.
std::vector<double> pairings(const HusimiField& field, const Dictionary& dict);
std::vector<double> pairings(const GeodesicMeasure& mu, const Dictionary& dict);

// max over the dictionary of |<A, f> - <B, f>|.
double weak_star_discrepancy(const HusimiField& a, const HusimiField& b,
                             const Dictionary& dict);
double weak_star_discrepancy(const HusimiField& a, const GeodesicMeasure& b,
                             const Dictionary& dict);
double weak_star_discrepancy(const GeodesicMeasure& a, const HusimiField& b,
                             const Dictionary& dict);
double weak_star_discrepancy(const GeodesicMeasure& a, const GeodesicMeasure& b,
                             const Dictionary& dict);

// Husimi mass of the nearest-atom cells around each atom of `targets`.
std::vector<double> husimi_masses(const HusimiField& field,
                                  const GeodesicMeasure& targets);

// A position-space observable with a declared polynomial degree, so the
// quadrature exactness requirement deg f + 2k can be enforced.
struct PositionObservable {
  std::string name;
  std::function<double(const geom::Vec&)> fn;
  int degree;
};

// int f |psi|^2 over S^d; exact when the rule's exactness covers
// deg f + 2k (error otherwise, naming the required degree).
double position_pairing(const harmonics::HarmonicSum& psi,
                        const PositionObservable& f,
                        const harmonics::QuadratureRule& rule);

// Circle average (1/2pi) int_0^{2pi} f(u cos t + v sin t) dt by the
// trapezoid rule; exact for trigonometric polynomials below the node count.
double line_integral(const geom::OrientedGeodesic& gamma,
                     const std::function<double(const geom::Vec&)>& f,
                     int nodes = 256);

// Constructive realization: a normalized G-invariant harmonic sum whose
// Husimi field converges to average_measure(targets, G) as k grows. Each
// atom's beam is averaged over the G-cosets of its stabilizer (valid when
// the stabilizer order divides k), normalized, and combined with sqrt(w_i)
// coefficients.
harmonics::HarmonicSum realize_measure(const GeodesicMeasure& targets,
                                       const groups::FiniteGroup& g, int k);

// Pairing on the quotient M/G for a G-invariant harmonic and a G-invariant
// observable: equals the upstairs pairing; asserts sheet consistency by
// re-evaluating on translated quadrature nodes for every group element.
double quotient_pairing(const harmonics::HarmonicSum& psi,
                        const PositionObservable& f,
                        const groups::FiniteGroup& g,
                        const harmonics::QuadratureRule& rule);

// Push-forward of a discrete geodesic measure to the quotient: atoms grouped
// into G-orbits, weights summed, representative = lexicographically smallest
// bivector in the orbit.
GeodesicMeasure quotient_husimi_atoms(const GeodesicMeasure& mu,
                                      const groups::FiniteGroup& g);

}  // namespace geobeam::measures
