#include "geobeam/groups.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace geobeam::groups {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_angle(double t) {
  t = std::remainder(t, 2.0 * kPi);
  if (t <= -kPi) t += 2.0 * kPi;
  return t;
}

// Order of g as a group element, capped.
int element_order(const geom::Isometry& g, int cap) {
  const geom::Isometry id = geom::Isometry::identity(g.ambient_dim());
  geom::Isometry power = g;
  for (int q = 1; q <= cap; ++q) {
    if (isometries_equal(power, id)) return q;
    power = power * g;
  }
  return -1;
}

}  // namespace

StandardGroupSpec::StandardGroupSpec(int p_, std::vector<int> l_)
    : p(p_), l(std::move(l_)) {
  if (p < 1) throw std::invalid_argument("group order must be positive");
  if (l.empty()) throw std::invalid_argument("empty angle numerators");
  for (int lj : l) {
    if (lj < 1 || lj > p)
      throw std::invalid_argument("angle numerators must lie in [1, p]");
    if (std::gcd(lj, p) != 1)
      throw std::invalid_argument(
          "generator has fixed points at power p/gcd = " +
          std::to_string(p / std::gcd(lj, p)));
  }
}

FiniteGroup FiniteGroup::from_elements(std::vector<geom::Isometry> elements) {
  if (elements.empty()) throw std::invalid_argument("empty group");
  const int m = elements[0].ambient_dim();
  const geom::Isometry id = geom::Isometry::identity(m);

  int id_index = -1;
  for (std::size_t i = 0; i < elements.size(); ++i) {
    if (elements[i].ambient_dim() != m)
      throw std::invalid_argument("mixed ambient dimensions");
    if (isometries_equal(elements[i], id)) {
      if (id_index >= 0) throw std::invalid_argument("duplicate identity");
      id_index = static_cast<int>(i);
    }
  }
  if (id_index < 0) throw std::invalid_argument("group has no identity");
  if (id_index != 0)
    std::rotate(elements.begin(), elements.begin() + id_index,
                elements.begin() + id_index + 1);

  FiniteGroup g(std::move(elements));
  for (const geom::Isometry& a : g.elements_)
    for (const geom::Isometry& b : g.elements_)
      if (!g.find(a * b, 1e-10))
        throw std::invalid_argument("element set is not closed under products");
  return g;
}

FiniteGroup FiniteGroup::generated_by(const geom::Isometry& g, int max_order) {
  std::vector<geom::Isometry> elements{geom::Isometry::identity(g.ambient_dim())};
  geom::Isometry power = g;
  while (!isometries_equal(power, elements[0])) {
    if (static_cast<int>(elements.size()) >= max_order)
      throw std::invalid_argument("generator order exceeds cap");
    elements.push_back(power);
    power = power * g;
  }
  return FiniteGroup(std::move(elements));
}

std::optional<int> FiniteGroup::find(const geom::Isometry& g, double tol) const {
  for (std::size_t i = 0; i < elements_.size(); ++i)
    if (isometries_equal(elements_[i], g, tol)) return static_cast<int>(i);
  return std::nullopt;
}

bool FiniteGroup::contains(const geom::Isometry& g, double tol) const {
  return find(g, tol).has_value();
}

geom::Isometry standard_generator(const StandardGroupSpec& spec, int d) {
  const int n = geom::complex_dim(d);
  if (static_cast<int>(spec.l.size()) != n)
    throw std::invalid_argument("spec length must equal (d+1)/2");
  geom::Mat q = geom::Mat::Zero(d + 1, d + 1);
  for (int m = 0; m < n; ++m) {
    const double theta = 2.0 * kPi * spec.l[m] / spec.p;
    const double c = std::cos(theta), s = std::sin(theta);
    q(2 * m, 2 * m) = c;
    q(2 * m, 2 * m + 1) = -s;
    q(2 * m + 1, 2 * m) = s;
    q(2 * m + 1, 2 * m + 1) = c;
  }
  return geom::Isometry(q);
}

FiniteGroup make_group(const StandardGroupSpec& spec, int d) {
  FiniteGroup g = FiniteGroup::generated_by(standard_generator(spec, d), spec.p);
  if (g.order() != spec.p)
    throw std::invalid_argument("generated group order differs from p");
  return g;
}

FiniteGroup conjugate_group(const FiniteGroup& g, const geom::Isometry& phi) {
  const geom::Isometry inv = phi.inverse();
  std::vector<geom::Isometry> elements;
  elements.reserve(g.order());
  for (const geom::Isometry& e : g.elements()) elements.push_back(inv * e * phi);
  return FiniteGroup::from_elements(std::move(elements));
}

bool is_fixed_point_free(const FiniteGroup& g) {
  for (int i = 1; i < g.order(); ++i) {
    const geom::CanonicalForm form = geom::canonical_form(g.element(i));
    for (double theta : form.angles)
      if (std::abs(theta) <= geom::kCompareTol) return false;
  }
  return true;
}

FiniteGroup stabilizer(const FiniteGroup& g, const geom::OrientedGeodesic& gamma) {
  std::vector<geom::Isometry> kept;
  for (const geom::Isometry& e : g.elements())
    if (geodesics_equal(apply_isometry(e, gamma), gamma)) kept.push_back(e);
  return FiniteGroup::from_elements(std::move(kept));
}

std::optional<int> is_cyclic(const FiniteGroup& g) {
  for (int i = 0; i < g.order(); ++i)
    if (element_order(g.element(i), g.order()) == g.order()) return i;
  return std::nullopt;
}

std::vector<geom::Isometry> coset_representatives(const FiniteGroup& g,
                                                  const FiniteGroup& h) {
  if (g.order() % h.order() != 0)
    throw std::invalid_argument("H is not a subgroup of G");
  for (const geom::Isometry& e : h.elements())
    if (!g.contains(e)) throw std::invalid_argument("H is not a subgroup of G");
  for (const geom::Isometry& a : g.elements())
    for (const geom::Isometry& b : g.elements())
      if (!isometries_equal(a * b, b * a))
        throw std::invalid_argument("unsupported: non-abelian group");

  std::vector<geom::Isometry> reps;
  for (const geom::Isometry& e : g.elements()) {
    bool covered = false;
    for (const geom::Isometry& r : reps) {
      if (h.contains(r.inverse() * e)) {
        covered = true;
        break;
      }
    }
    if (!covered) reps.push_back(e);
  }
  return reps;
}

std::pair<geom::Isometry, StandardGroupSpec> standardize_stabilizer(
    const FiniteGroup& g_gamma, const geom::OrientedGeodesic& gamma) {
  for (const geom::Isometry& e : g_gamma.elements())
    if (!geodesics_equal(apply_isometry(e, gamma), gamma))
      throw std::invalid_argument("group does not stabilize the geodesic");

  const std::optional<int> gen = is_cyclic(g_gamma);
  if (!gen) throw std::invalid_argument("group is not cyclic");

  const int p = g_gamma.order();
  const geom::CanonicalForm form = geom::canonical_form(g_gamma.element(*gen));

  std::vector<int> l;
  l.reserve(form.angles.size());
  for (double theta : form.angles) {
    const long rounded = std::lround(theta * p / (2.0 * kPi));
    if (std::abs(wrap_angle(theta - 2.0 * kPi * rounded / p)) > geom::kCompareTol)
      throw std::invalid_argument("generator order mismatch");
    int lj = static_cast<int>(((rounded % p) + p) % p);
    if (lj == 0) lj = p;
    l.push_back(lj);
  }

  StandardGroupSpec spec(p, std::move(l));
  const int d = g_gamma.ambient_dim() - 1;
  const FiniteGroup reproduced =
      conjugate_group(make_group(spec, d), form.conjugator);
  for (const geom::Isometry& e : reproduced.elements())
    if (!g_gamma.contains(e))
      throw std::runtime_error("standardization failed to reproduce the group");

  return {form.conjugator, spec};
}

geom::Isometry build_chi(const geom::Isometry& phi,
                         const geom::OrientedGeodesic& gamma_target, int j) {
  const int m = phi.ambient_dim();
  const int n = m / 2;
  if (j < 1 || j > n) throw std::invalid_argument("block index out of range");

  // phi must already be a standard generator: block-diagonal rotations.
  std::vector<double> angles(n);
  {
    const geom::Mat& q = phi.matrix();
    for (int b = 0; b < n; ++b) {
      angles[b] = std::atan2(q(2 * b + 1, 2 * b), q(2 * b, 2 * b));
      geom::Mat r(2, 2);
      r << std::cos(angles[b]), -std::sin(angles[b]), std::sin(angles[b]),
          std::cos(angles[b]);
      if ((q.block(2 * b, 2 * b, 2, 2) - r).norm() > geom::kCompareTol)
        throw std::invalid_argument("phi is not a standard generator");
    }
    geom::Mat off = q;
    for (int b = 0; b < n; ++b) off.block(2 * b, 2 * b, 2, 2).setZero();
    if (off.norm() > geom::kCompareTol)
      throw std::invalid_argument("phi is not a standard generator");
  }

  if ((gamma_target.v() - geom::apply_complex_structure(gamma_target.u())).norm() >
      geom::kCompareTol)
    throw std::invalid_argument("geodesic not a complex line");

  const geom::CVec w = geom::pack_complex(gamma_target.u());
  for (int b = 0; b < n; ++b) {
    const bool in_eigenspace =
        std::abs(wrap_angle(angles[b] - angles[j - 1])) <= geom::kCompareTol;
    if (!in_eigenspace && std::abs(w[b]) > geom::kCompareTol)
      throw std::invalid_argument("no common eigenspace");
  }

  geom::CMat u = geom::CMat::Identity(n, n);
  const geom::Complex a = w[j - 1];
  geom::CVec rest = w;
  rest[j - 1] = 0.0;
  const double beta = rest.norm();
  if (beta > 1e-12) {
    const geom::CVec u2 = rest / beta;
    geom::CVec ej = geom::CVec::Zero(n);
    ej[j - 1] = 1.0;
    // SU(2) rotation in span(e_j, u2): e_j -> a e_j + beta u2.
    u += (a - 1.0) * (ej * ej.adjoint());
    u += beta * (u2 * ej.adjoint());
    u -= beta * (ej * u2.adjoint());
    u += (std::conj(a) - 1.0) * (u2 * u2.adjoint());
  }
  // beta ~ 0: the target is the complex line of gamma_j itself; identity works.

  geom::Mat chi(m, m);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const double x = u(r, c).real(), y = u(r, c).imag();
      chi(2 * r, 2 * c) = x;
      chi(2 * r, 2 * c + 1) = -y;
      chi(2 * r + 1, 2 * c) = y;
      chi(2 * r + 1, 2 * c + 1) = x;
    }
  return geom::Isometry(chi);
}

namespace {

// Coefficients [t^0 .. t^max_k] of prod_j 1/(1 - 2 cos(theta_j) t + t^2),
// the trace generating function of phi on homogeneous polynomials. Each
// factor's series is the Chebyshev-U recurrence.
std::vector<double> character_series(const std::vector<double>& angles, int max_k) {
  std::vector<double> series(max_k + 1, 0.0);
  series[0] = 1.0;
  for (double theta : angles) {
    const double c = std::cos(theta);
    std::vector<double> factor(max_k + 1);
    for (int i = 0; i <= max_k; ++i) {
      if (i == 0)
        factor[i] = 1.0;
      else if (i == 1)
        factor[i] = 2.0 * c;
      else
        factor[i] = 2.0 * c * factor[i - 1] - factor[i - 2];
    }
    std::vector<double> next(max_k + 1, 0.0);
    for (int i = 0; i <= max_k; ++i)
      for (int s = 0; i + s <= max_k; ++s) next[i + s] += series[i] * factor[s];
    series = std::move(next);
  }
  return series;
}

}  // namespace

long invariant_dimension(const FiniteGroup& g, int k) {
  if (k < 0) throw std::invalid_argument("degree must be nonnegative");
  double total = 0.0;
  for (const geom::Isometry& e : g.elements()) {
    const geom::CanonicalForm form = geom::canonical_form(e);
    const std::vector<double> series = character_series(form.angles, k);
    total += series[k] - (k >= 2 ? series[k - 2] : 0.0);
  }
  total /= g.order();
  const double rounded = std::round(total);
  if (std::abs(total - rounded) >= 0.01)
    throw std::runtime_error("invariant dimension did not round to an integer");
  return static_cast<long>(rounded);
}

namespace {

// #{ (a, b) in N^n x N^n : |a| + |b| = k, sum (a_j - b_j) l_j = res mod p }.
long lattice_count(const StandardGroupSpec& spec, int n, int k) {
  const int p = spec.p;
  // dp[deg][res] after processing some coordinates.
  std::vector<std::vector<long>> dp(k + 1, std::vector<long>(p, 0));
  dp[0][0] = 1;
  auto absorb = [&](int weight) {
    std::vector<std::vector<long>> next(k + 1, std::vector<long>(p, 0));
    for (int deg = 0; deg <= k; ++deg)
      for (int res = 0; res < p; ++res) {
        if (dp[deg][res] == 0) continue;
        for (int e = 0; deg + e <= k; ++e) {
          const int nres = ((res + e * weight) % p + p) % p;
          next[deg + e][nres] += dp[deg][res];
        }
      }
    dp = std::move(next);
  };
  for (int jj = 0; jj < n; ++jj) absorb(spec.l[jj] % p);
  for (int jj = 0; jj < n; ++jj) absorb(-(spec.l[jj] % p));
  return dp[k][0];
}

}  // namespace

long invariant_dimension(const StandardGroupSpec& spec, int d, int k) {
  if (k < 0) throw std::invalid_argument("degree must be nonnegative");
  const int n = geom::complex_dim(d);
  if (static_cast<int>(spec.l.size()) != n)
    throw std::invalid_argument("spec length must equal (d+1)/2");
  const long nk = lattice_count(spec, n, k);
  const long nk2 = k >= 2 ? lattice_count(spec, n, k - 2) : 0;
  return nk - nk2;
}

}  // namespace geobeam::groups
