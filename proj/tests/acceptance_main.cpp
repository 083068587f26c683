// Acceptance suite: end-to-end criteria for the beam-concentration library.
// Each criterion prints one PASS/FAIL line; the exit code is the number of
// failures.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "geobeam/geom.hpp"
#include "geobeam/groups.hpp"
#include "geobeam/harmonics.hpp"
#include "geobeam/measures.hpp"
#include "geobeam/rng.hpp"

using namespace geobeam;
using geom::Complex;
using geom::Isometry;
using geom::OrientedGeodesic;
using geom::Vec;
using groups::FiniteGroup;
using groups::StandardGroupSpec;
using harmonics::beam;
using harmonics::HarmonicSum;

namespace {

constexpr double kPi = std::numbers::pi;

int g_failures = 0;

class Criterion {
 public:
  Criterion(int number, std::string description)
      : number_(number),
        description_(std::move(description)),
        start_(std::chrono::steady_clock::now()) {}

  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

  void finish(bool pass, const std::string& detail) const {
    const double elapsed = seconds();
    std::printf("[%s] criterion %2d: %s (%s; %.2fs)\n", pass ? "PASS" : "FAIL",
                number_, description_.c_str(), detail.c_str(), elapsed);
    std::fflush(stdout);
    if (!pass) ++g_failures;
  }

 private:
  int number_;
  std::string description_;
  std::chrono::steady_clock::time_point start_;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

OrientedGeodesic tilted_circle(double alpha) {
  Vec u = Vec::Zero(4), v = Vec::Zero(4);
  u[0] = 1.0;
  v[1] = std::cos(alpha);
  v[2] = std::sin(alpha);
  return geom::geodesic_from_frame(u, v);
}

// 1. Invariance of the standard beams under the lens generator at degrees
//    divisible by p, pointwise over seeded samples.
void criterion_equivariance() {
  Criterion c(1, "equivariance of standard beams under G(5,(1,2))");
  const StandardGroupSpec spec(5, {1, 2});
  const Isometry phi = groups::standard_generator(spec, 3);
  const OrientedGeodesic g1 = OrientedGeodesic::standard_circle(1, 3);

  Rng rng(1001);
  std::vector<geom::AmbientPoint> points;
  points.reserve(1000);
  for (int i = 0; i < 1000; ++i) points.emplace_back(rng.unit_vector(4));

  double worst = 0.0;
  for (int k = 5; k <= 100; k += 5) {
    const HarmonicSum psi = beam(g1, k);
    const HarmonicSum composed = compose_isometry(psi, phi);
    for (const geom::AmbientPoint& x : points)
      worst = std::max(worst, std::abs(harmonics::evaluate(composed, x) -
                                       harmonics::evaluate(psi, x)));
  }
  const bool pass = worst <= 1e-10 && c.seconds() < 5.0;
  c.finish(pass, "max residual " + fmt(worst));
}

// 2. Eigenvalue law k(k+d-1) via the finite-difference Laplacian, plus the
//    exact ambient-harmonicity certificate.
void criterion_eigenvalue_law() {
  Criterion c(2, "eigenvalue law k(k+d-1) for beams, d in {3,5}");
  Rng rng(2002);
  double worst_fd = 0.0, worst_iso = 0.0;
  for (int d : {3, 5}) {
    std::vector<geom::AmbientPoint> samples;
    for (int i = 0; i < 100; ++i) samples.emplace_back(rng.unit_vector(d + 1));
    for (int k = 0; k <= 10; ++k) {
      const OrientedGeodesic gamma =
          geom::geodesic_from_frame(rng.unit_vector(d + 1),
                                    rng.unit_vector(d + 1));
      const HarmonicSum psi = beam(gamma, k);
      worst_fd = std::max(worst_fd, harmonics::eigen_residual(psi, samples));
      worst_iso = std::max(worst_iso, harmonics::isotropy_residual(psi));
    }
  }
  const bool pass = worst_fd <= 1e-5 && worst_iso <= 1e-12 && c.seconds() < 10.0;
  c.finish(pass,
           "FD residual " + fmt(worst_fd) + ", isotropy " + fmt(worst_iso));
}

// 3. Weak-* concentration of beam Husimi fields onto the geodesic delta.
void criterion_concentration() {
  Criterion c(3, "Husimi concentration onto delta_gamma, k = 8..64");
  const OrientedGeodesic g1 = OrientedGeodesic::standard_circle(1, 3);
  const measures::GeodesicMeasure target = measures::GeodesicMeasure::delta(g1);
  const measures::Dictionary dict =
      measures::Dictionary::standard(derive_seed(42, "dictionary"));
  const measures::GeodesicGrid grid(64);

  std::vector<double> discrepancies;
  for (int k : {8, 16, 32, 64}) {
    const measures::HusimiField field =
        measures::HusimiField::build(beam(g1, k), grid);
    discrepancies.push_back(
        measures::weak_star_discrepancy(field, target, dict));
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < discrepancies.size(); ++i)
    if (!(discrepancies[i] < discrepancies[i - 1])) decreasing = false;
  const bool pass =
      decreasing && discrepancies.back() <= 0.1 && c.seconds() < 60.0;
  std::string detail = "discrepancies";
  for (double d : discrepancies) detail += " " + fmt(d);
  c.finish(pass, detail);
}

// 4. Asymptotic orthogonality: the certified overlap law and equal-mass
//    recovery from an orthogonal superposition.
void criterion_orthogonality() {
  Criterion c(4, "overlap law and superposition mass recovery");
  const OrientedGeodesic g1 = OrientedGeodesic::standard_circle(1, 3);
  const OrientedGeodesic g2 = OrientedGeodesic::standard_circle(2, 3);

  double worst_overlap = 0.0;
  for (double alpha : {0.3, 0.7, 1.2}) {
    const OrientedGeodesic tilted = tilted_circle(alpha);
    for (int k = 1; k <= 8; ++k) {
      const harmonics::QuadratureRule rule = harmonics::quadrature_rule(3, 2 * k);
      const Complex analytic =
          harmonics::inner_product(beam(g1, k), beam(tilted, k));
      const Complex oracle = harmonics::inner_product_quadrature(
          beam(g1, k), beam(tilted, k), rule);
      worst_overlap = std::max(worst_overlap, std::abs(analytic - oracle));
      worst_overlap = std::max(
          worst_overlap,
          std::abs(std::abs(analytic) - std::pow(std::cos(alpha / 2), 2 * k)));
    }
  }

  const HarmonicSum superposition =
      harmonics::normalized(harmonics::add(beam(g1, 64), beam(g2, 64)));
  const measures::GeodesicGrid grid(64);
  const measures::HusimiField field =
      measures::HusimiField::build(superposition, grid);
  const measures::GeodesicMeasure target({{g1, 0.5}, {g2, 0.5}});
  const std::vector<double> masses = measures::husimi_masses(field, target);
  const double worst_mass =
      std::max(std::abs(masses[0] - 0.5), std::abs(masses[1] - 0.5));

  const bool pass = worst_overlap <= 1e-8 && worst_mass <= 0.05;
  c.finish(pass, "overlap residual " + fmt(worst_overlap) + ", mass gap " +
                     fmt(worst_mass));
}

// 5. Norm of the group average: 1/|G| for a free geodesic at high degree,
//    exactly 1 on the invariant circle, and coset = group averaging.
void criterion_average_norm() {
  Criterion c(5, "averaging norms over G(5,(1,2))");
  const FiniteGroup lens = make_group(StandardGroupSpec(5, {1, 2}), 3);
  const OrientedGeodesic g1 = OrientedGeodesic::standard_circle(1, 3);

  Rng rng(5005);
  OrientedGeodesic gamma =
      geom::geodesic_from_frame(rng.unit_vector(4), rng.unit_vector(4));
  while (groups::stabilizer(lens, gamma).order() != 1)
    gamma = geom::geodesic_from_frame(rng.unit_vector(4), rng.unit_vector(4));

  const HarmonicSum averaged = harmonics::group_average(beam(gamma, 320), lens);
  const double norm_sq = harmonics::inner_product(averaged, averaged).real();
  const double free_gap = std::abs(norm_sq - 0.2);

  double invariant_gap = 0.0;
  double coset_gap = 0.0;
  for (int k = 5; k <= 320; k += 5) {
    const HarmonicSum avg = harmonics::group_average(beam(g1, k), lens);
    invariant_gap = std::max(
        invariant_gap, std::abs(harmonics::inner_product(avg, avg).real() - 1.0));
    if (k % 40 == 0) {
      const FiniteGroup stab = groups::stabilizer(lens, g1);
      const HarmonicSum via_cosets =
          harmonics::coset_average(beam(g1, k), lens, stab);
      coset_gap = std::max(
          coset_gap,
          harmonics::sums_equal(via_cosets, avg, 1e-10) ? 0.0 : 1.0);
    }
  }
  // coset route on the free geodesic as well
  const HarmonicSum free_cosets = harmonics::coset_average(
      beam(gamma, 320), lens, groups::stabilizer(lens, gamma));
  if (!harmonics::sums_equal(free_cosets, averaged, 1e-10)) coset_gap = 1.0;

  const bool pass = free_gap <= 0.05 && invariant_gap <= 1e-10 && coset_gap == 0.0;
  c.finish(pass, "free-orbit gap " + fmt(free_gap) + ", invariant gap " +
                     fmt(invariant_gap));
}

// 6. The equal-or-singular dichotomy for push-forwards of geodesic deltas,
//    exhaustive over lens groups of order <= 8.
void criterion_dichotomy() {
  Criterion c(6, "push-forward dichotomy over G(p,l), p <= 8");
  Rng rng(6006);
  std::vector<OrientedGeodesic> sample;
  for (int i = 0; i < 50; ++i)
    sample.push_back(
        geom::geodesic_from_frame(rng.unit_vector(4), rng.unit_vector(4)));

  long counterexamples = 0;
  long checked = 0;
  for (int p = 1; p <= 8; ++p)
    for (int l1 = 1; l1 <= p; ++l1)
      for (int l2 = 1; l2 <= p; ++l2) {
        if (std::gcd(l1, p) != 1 || std::gcd(l2, p) != 1) continue;
        const FiniteGroup group = make_group(StandardGroupSpec(p, {l1, l2}), 3);
        for (const OrientedGeodesic& gamma : sample) {
          const measures::GeodesicMeasure mu =
              measures::GeodesicMeasure::delta(gamma);
          for (const Isometry& e : group.elements()) {
            const measures::GeodesicMeasure pushed = measures::pushforward(mu, e);
            const bool equal =
                geodesics_equal(pushed.atoms()[0].geodesic, gamma);
            const bool singular = measures::mutually_singular(pushed, mu);
            if (equal == singular) ++counterexamples;
            ++checked;
          }
        }
      }
  c.finish(counterexamples == 0, std::to_string(checked) + " push-forwards, " +
                                     std::to_string(counterexamples) +
                                     " counterexamples");
}

// 7. Cyclicity of stabilizers across seeded conjugated lens groups.
void criterion_cyclic_stabilizers() {
  Criterion c(7, "stabilizers of conjugated lens groups are cyclic");
  Rng rng(7007);
  int failures = 0;
  int nontrivial = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int p = 2 + rng.uniform_int(0, 6);
    std::vector<int> coprime;
    for (int l = 1; l <= p; ++l)
      if (std::gcd(l, p) == 1) coprime.push_back(l);
    const StandardGroupSpec spec(
        p, {coprime[rng.uniform_int(0, static_cast<int>(coprime.size()) - 1)],
            coprime[rng.uniform_int(0, static_cast<int>(coprime.size()) - 1)]});
    const Isometry phi(rng.special_orthogonal(4));
    const FiniteGroup group = conjugate_group(make_group(spec, 3), phi);

    OrientedGeodesic gamma = apply_isometry(
        phi.inverse(),
        OrientedGeodesic::standard_circle(1 + trial % 2, 3));
    if (p % 2 == 0 && trial % 3 == 0)
      gamma = geom::geodesic_from_frame(rng.unit_vector(4), rng.unit_vector(4));

    const FiniteGroup stab = groups::stabilizer(group, gamma);
    if (stab.order() > 1) ++nontrivial;
    if (!groups::is_cyclic(stab)) ++failures;
  }
  c.finish(failures == 0 && nontrivial == 100,
           std::to_string(nontrivial) + "/100 nontrivial stabilizers, " +
               std::to_string(failures) + " non-cyclic");
}

// 8. Quotient pairings are sheet-consistent: the integral computed on
//    deck-translated quadrature nodes agrees to 1e-9.
void criterion_quotient_consistency() {
  Criterion c(8, "quotient pairing sheet consistency");
  const std::vector<StandardGroupSpec> specs = {StandardGroupSpec(2, {1, 1}),
                                                StandardGroupSpec(3, {1, 1}),
                                                StandardGroupSpec(5, {1, 2})};
  const OrientedGeodesic g1 = OrientedGeodesic::standard_circle(1, 3);

  const std::vector<measures::PositionObservable> observables = {
      {"1", [](const Vec&) { return 1.0; }, 0},
      {"|z1|^2", [](const Vec& x) { return x[0] * x[0] + x[1] * x[1]; }, 2},
      {"|z2|^2", [](const Vec& x) { return x[2] * x[2] + x[3] * x[3]; }, 2},
      {"|z1|^2|z2|^2",
       [](const Vec& x) {
         return (x[0] * x[0] + x[1] * x[1]) * (x[2] * x[2] + x[3] * x[3]);
       },
       4},
  };

  double worst = 0.0;
  bool threw = false;
  for (const StandardGroupSpec& spec : specs) {
    const FiniteGroup group = make_group(spec, 3);
    for (int k = spec.p; k <= 32; k += spec.p) {
      const HarmonicSum psi = beam(g1, k);
      const harmonics::QuadratureRule rule =
          harmonics::quadrature_rule(3, 2 * k + 4);
      for (const measures::PositionObservable& f : observables) {
        double value = 0.0;
        try {
          value = measures::quotient_pairing(psi, f, group, rule);
        } catch (const std::exception&) {
          threw = true;
          continue;
        }
        // independent recomputation of the sheet residual
        for (int i = 1; i < group.order(); ++i) {
          double translated = 0.0;
          for (int node = 0; node < rule.size(); ++node) {
            const Vec y = group.element(i).apply(Vec(rule.node(node)));
            translated += rule.weights()[node] * f.fn(y) *
                          std::norm(harmonics::evaluate_direction(psi, y));
          }
          worst = std::max(worst, std::abs(translated - value));
        }
      }
    }
  }
  const bool pass = !threw && worst <= 1e-9;
  c.finish(pass, "max sheet residual " + fmt(worst));
}

// 9. Spectral remark: degrees kp carry invariant harmonics, and the trace
//    formula agrees with exact basis counting.
void criterion_spectrum() {
  Criterion c(9, "invariant dimensions: positivity at kp and exact counts");
  bool positive = true;
  for (int p = 1; p <= 8; ++p)
    for (int l1 = 1; l1 <= p; ++l1)
      for (int l2 = 1; l2 <= p; ++l2) {
        if (std::gcd(l1, p) != 1 || std::gcd(l2, p) != 1) continue;
        const StandardGroupSpec spec(p, {l1, l2});
        for (int k = 1; k <= 5; ++k)
          if (groups::invariant_dimension(spec, 3, k * p) < 1) positive = false;
      }

  bool counts_match = true;
  const std::vector<StandardGroupSpec> specs = {
      StandardGroupSpec(1, {1, 1}), StandardGroupSpec(2, {1, 1}),
      StandardGroupSpec(3, {1, 1}), StandardGroupSpec(5, {1, 2}),
      StandardGroupSpec(8, {1, 3})};
  for (const StandardGroupSpec& spec : specs) {
    const FiniteGroup group = make_group(spec, 3);
    for (int k = 0; k <= 6; ++k)
      if (groups::invariant_dimension(group, k) !=
          groups::invariant_dimension(spec, 3, k))
        counts_match = false;
  }
  c.finish(positive && counts_match,
           std::string("positivity ") + (positive ? "ok" : "violated") +
               ", trace vs enumeration " + (counts_match ? "equal" : "differ"));
}

// 10. Position density: exact second moments and concentration on the circle.
void criterion_position_density() {
  Criterion c(10, "position-density moments and concentration");
  const OrientedGeodesic g1 = OrientedGeodesic::standard_circle(1, 3);
  const measures::PositionObservable x1sq{
      "x1^2", [](const Vec& x) { return x[0] * x[0]; }, 2};
  const measures::PositionObservable x3sq{
      "x3^2", [](const Vec& x) { return x[2] * x[2]; }, 2};

  double worst_moment = 0.0;
  for (int k : {4, 8, 16, 32, 64}) {
    const harmonics::QuadratureRule rule =
        harmonics::quadrature_rule(3, 2 * k + 2);
    const double value = measures::position_pairing(beam(g1, k), x1sq, rule);
    worst_moment =
        std::max(worst_moment, std::abs(value - (k + 1.0) / (2.0 * (k + 2.0))));
  }
  const double line_value = measures::line_integral(g1, x1sq.fn);
  const harmonics::QuadratureRule rule64 = harmonics::quadrature_rule(3, 130);
  const double at64 = measures::position_pairing(beam(g1, 64), x1sq, rule64);
  const double off_support = measures::position_pairing(beam(g1, 64), x3sq, rule64);

  const bool pass = worst_moment <= 1e-10 &&
                    std::abs(at64 - line_value) <= 1.0 / 64.0 &&
                    off_support <= 0.01;
  c.finish(pass, "moment residual " + fmt(worst_moment) + ", off-support " +
                     fmt(off_support));
}

}  // namespace

int main() {
  std::printf("geobeam acceptance suite\n");
  criterion_equivariance();
  criterion_eigenvalue_law();
  criterion_concentration();
  criterion_orthogonality();
  criterion_average_norm();
  criterion_dichotomy();
  criterion_cyclic_stabilizers();
  criterion_quotient_consistency();
  criterion_spectrum();
  criterion_position_density();
  std::printf("%d criterion(s) failed\n", g_failures);
  return g_failures;
}
