#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "geobeam/geom.hpp"

namespace geobeam::groups {

// Parameters of the standard lens-type group G(p, l_1, ..., l_n): the cyclic
// subgroup of SO(d+1) generated by the block rotation with angles 2 pi l_j / p,
// i.e. z_j -> e^{2 pi i l_j / p} z_j. Fixed-point-freeness is the arithmetic
// condition gcd(l_j, p) = 1.
struct StandardGroupSpec {
  int p;
  std::vector<int> l;

  StandardGroupSpec(int p_, std::vector<int> l_);

  bool operator==(const StandardGroupSpec&) const = default;
};

// A finite subgroup of SO(d+1), stored by its element list (identity first).
class FiniteGroup {
 public:
  // Validates closure, the presence of the identity, and inverses; reorders
  // so the identity is element 0.
  static FiniteGroup from_elements(std::vector<geom::Isometry> elements);

  // Closes the powers of g. Throws if the order exceeds max_order.
  static FiniteGroup generated_by(const geom::Isometry& g, int max_order = 4096);

  const std::vector<geom::Isometry>& elements() const { return elements_; }
  const geom::Isometry& element(int i) const { return elements_[i]; }
  int order() const { return static_cast<int>(elements_.size()); }
  int ambient_dim() const { return elements_[0].ambient_dim(); }

  // Index of a matching element within tol, or nullopt.
  std::optional<int> find(const geom::Isometry& g,
                          double tol = geom::kCompareTol) const;
  bool contains(const geom::Isometry& g,
                double tol = geom::kCompareTol) const;

 private:
  explicit FiniteGroup(std::vector<geom::Isometry> elements)
      : elements_(std::move(elements)) {}

  std::vector<geom::Isometry> elements_;
};

// The generator matrix of the standard group: blockdiag(R(2 pi l_j / p)).
geom::Isometry standard_generator(const StandardGroupSpec& spec, int d);

// Builds G(p, l_1, ..., l_n) on S^d. Order is exactly p and the action has
// no fixed points; both follow from the gcd(l_j, p) = 1 condition that
// StandardGroupSpec enforces.
FiniteGroup make_group(const StandardGroupSpec& spec, int d);

// Elementwise conjugation { phi^{-1} g phi : g in G }.
FiniteGroup conjugate_group(const FiniteGroup& g, const geom::Isometry& phi);

// True iff no non-identity element has eigenvalue 1 (within kCompareTol on
// the unit circle).
bool is_fixed_point_free(const FiniteGroup& g);

// Subgroup of the elements that map gamma to itself as an oriented geodesic;
// equivalently the stabilizer of the measure delta_gamma under push-forward.
FiniteGroup stabilizer(const FiniteGroup& g, const geom::OrientedGeodesic& gamma);

// Smallest index of a generating element, or nullopt when the group is not
// cyclic. The trivial group reports its identity.
std::optional<int> is_cyclic(const FiniteGroup& g);

// One representative per coset of H in G, identity first. Requires H to be a
// subgroup and G abelian, where left and right cosets coincide so the system
// is automatically two-sided.
std::vector<geom::Isometry> coset_representatives(const FiniteGroup& g,
                                                  const FiniteGroup& h);

// For a cyclic fixed-point-free stabilizer G_gamma, finds phi in SO(d+1) and
// a standard spec with conjugate_group(make_group(spec), phi) = G_gamma; the
// translated geodesic apply_isometry(phi, gamma) is then stabilized by the
// standard group itself. Throws "generator order mismatch" if a canonical
// angle is not of the form 2 pi l / p within kCompareTol.
std::pair<geom::Isometry, StandardGroupSpec> standardize_stabilizer(
    const FiniteGroup& g_gamma, const geom::OrientedGeodesic& gamma);

// The commuting transporter chi in SU(n), as a real matrix in SO(d+1):
// maps the standard circle gamma_j to gamma_target, is the identity on the
// orthogonal complement of the eigenspace of the standard generator phi that
// contains gamma_target, and commutes with phi. gamma_target must be a
// complex line (v = i u) supported on a single eigenvalue of phi.
geom::Isometry build_chi(const geom::Isometry& phi,
                         const geom::OrientedGeodesic& gamma_target, int j);

// Dimension of the space of G-invariant spherical harmonics of degree k on
// S^d, by the Molien-series two-term difference. The general-group path uses
// the floating character sum over canonical angles and rounds, rejecting
// residuals above 0.01.
long invariant_dimension(const FiniteGroup& g, int k);

// Exact counting path for standard groups: lattice-point enumeration of the
// monomials z^a zbar^b with sum(a_j - b_j) l_j = 0 mod p.
long invariant_dimension(const StandardGroupSpec& spec, int d, int k);

}  // namespace geobeam::groups
